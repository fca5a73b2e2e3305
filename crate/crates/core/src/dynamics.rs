//! Dynamical realizations on finite sets of group elements, the normalized
//! circle action for a central cofinal anchor, and equivalence verdicts.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::cohmaps::{default_basis, psi, Component, PsiValue};
use crate::error::{Error, Result};
use crate::exactreal::{rat_int, rational_str, Rational, Sign};
use crate::groups::{ball, Element};
use crate::orderings::{is_central, is_cofinal, is_dense, Cone, Decision, Density};
use crate::quasimorph::{rho, RhoContext};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub element: Element,
    #[serde(with = "rational_str")]
    pub t: Rational,
}

/// Inductive assignment `t(g_i)` over an enumeration starting at the identity.
#[derive(Debug, Clone)]
pub struct RealizationTable {
    cone: Cone,
    entries: Vec<Entry>,
    /// Entry indices in increasing order.
    sorted: Vec<usize>,
}

impl Serialize for RealizationTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

impl RealizationTable {
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    /// `Ok(i)` if `g` equals the `i`-th sorted entry, else its insertion point.
    fn locate(&self, g: &Element) -> Result<std::result::Result<usize, usize>> {
        let (mut lo, mut hi) = (0, self.sorted.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.cone.compare(&self.entries[self.sorted[mid]].element, g)? {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Ok(Ok(mid)),
            }
        }
        Ok(Err(lo))
    }

    /// Appends `g` by the inductive rule; a group element already present is
    /// rejected.
    pub fn push(&mut self, g: Element) -> Result<()> {
        let pos = match self.locate(&g)? {
            Ok(i) => {
                return Err(Error::InvalidInput(format!(
                    "{g} repeats enumeration entry {}",
                    self.entries[self.sorted[i]].element
                )))
            }
            Err(p) => p,
        };
        let t_at = |k: usize| &self.entries[self.sorted[k]].t;
        let t = if pos == self.sorted.len() {
            t_at(pos - 1) + Rational::one()
        } else if pos == 0 {
            t_at(0) - Rational::one()
        } else {
            (t_at(pos - 1) + t_at(pos)) / rat_int(2)
        };
        self.entries.push(Entry { element: g, t });
        self.sorted.insert(pos, self.entries.len() - 1);
        Ok(())
    }

    /// `t(g)` for `g` equal in the group to some entry.
    pub fn lookup(&self, g: &Element) -> Result<Option<Rational>> {
        Ok(self.locate(g)?.ok().map(|i| self.entries[self.sorted[i]].t.clone()))
    }

    /// Exhaustive check `g_i < g_j ⟺ t(g_i) < t(g_j)` through the oracle.
    pub fn is_order_embedding(&self) -> Result<bool> {
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                if self.cone.compare(&a.element, &b.element)? != a.t.cmp(&b.t) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Realization over an enumeration `g_0 = 1, g_1, …` of distinct elements.
pub fn realize(p: &Cone, enumeration: &[Element]) -> Result<RealizationTable> {
    let first = enumeration
        .first()
        .ok_or_else(|| Error::InvalidInput("enumeration must be nonempty".into()))?;
    if p.sign(first)? != Sign::Zero {
        return Err(Error::InvalidInput(format!("enumeration must start with the identity, not {first}")));
    }
    let mut table = RealizationTable {
        cone: p.clone(),
        entries: vec![Entry { element: first.clone(), t: Rational::zero() }],
        sorted: vec![0],
    };
    for g in &enumeration[1..] {
        if g.group() != p.group() {
            return Err(Error::MixedGroups(g.group().to_string(), p.group().to_string()));
        }
        table.push(g.clone())?;
    }
    Ok(table)
}

/// Drops later occurrences of equal group elements, keeping the order.
pub fn distinct(p: &Cone, elems: &[Element]) -> Result<Vec<Element>> {
    let mut seen = realize(p, &[p.group().identity()])?;
    let mut out = vec![p.group().identity()];
    for g in elems {
        if seen.lookup(g)?.is_none() {
            seen.push(g.clone())?;
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// Realization over the ball of `radius` in graded order, duplicates removed.
pub fn realize_ball(p: &Cone, radius: usize) -> Result<RealizationTable> {
    realize(p, &distinct(p, &ball(p.group(), radius))?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartialActionReport {
    pub element: Element,
    /// `(t(g_i), t(g·g_i))` in increasing order of the first value.
    pub map: Vec<[String; 2]>,
    pub passed: bool,
}

/// The partial map `t(g_i) ↦ t(g g_i)` on the table, checked strictly increasing.
pub fn partial_action_check(table: &RealizationTable, g: &Element) -> Result<PartialActionReport> {
    let mut pairs = Vec::new();
    for &i in &table.sorted {
        let e = &table.entries[i];
        if let Some(t) = table.lookup(&g.multiply(&e.element)?)? {
            pairs.push((e.t.clone(), t));
        }
    }
    let passed = pairs.windows(2).all(|w| w[0].1 < w[1].1);
    let fmt = crate::exactreal::format_rational;
    Ok(PartialActionReport {
        element: g.clone(),
        map: pairs.iter().map(|(a, b)| [fmt(a), fmt(b)]).collect(),
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPoint {
    pub element: Element,
    pub rho: i64,
    #[serde(with = "rational_str")]
    pub t: Rational,
}

/// `t′(h) = ρ(h) + θ(x^{−ρ(h)} h)` on a ball, `θ` an order embedding of the
/// stratum `1 ≤ s < x` into `[0, 1)` with `θ(1) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct CircleSampleAction {
    pub anchor: Element,
    pub radius: usize,
    #[serde(with = "rational_str")]
    pub epsilon: Rational,
    pub points: Vec<OrbitPoint>,
    #[serde(skip)]
    ctx: RhoContext,
    #[serde(skip)]
    stratum: RealizationTable,
    #[serde(skip)]
    t_min: Rational,
    #[serde(skip)]
    t_max: Rational,
}

impl CircleSampleAction {
    fn theta(&self, t: &Rational) -> Rational {
        if t.is_zero() {
            return Rational::zero();
        }
        if self.t_max == self.t_min {
            return self.epsilon.clone();
        }
        let span = Rational::one() - &self.epsilon * rat_int(2);
        &self.epsilon + span * (t - &self.t_min) / (&self.t_max - &self.t_min)
    }

    /// `x^{−ρ(h)} h` and `ρ(h)`.
    fn reduce(&self, h: &Element) -> Result<(Element, i64)> {
        let r = rho(&self.ctx, h)?;
        Ok((self.ctx.x.power(-r)?.multiply(h)?, r))
    }

    /// `t′(h)`, or `None` when the stratum representative of `h` was not sampled.
    pub fn t_prime(&self, h: &Element) -> Result<Option<Rational>> {
        let (s, r) = self.reduce(h)?;
        Ok(self.stratum.lookup(&s)?.map(|t| rat_int(r) + self.theta(&t)))
    }

    pub fn context(&self) -> &RhoContext {
        &self.ctx
    }

    /// `t′(xh) = t′(h) + 1` for every stored point.
    pub fn unit_translation_holds(&self) -> Result<bool> {
        for p in &self.points {
            match self.t_prime(&self.ctx.x.multiply(&p.element)?)? {
                Some(t) if t == &p.t + Rational::one() => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Exhaustive order check of `t′` on the stored points.
    pub fn is_order_embedding(&self) -> Result<bool> {
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                if self.ctx.cone.compare(&a.element, &b.element)? != a.t.cmp(&b.t) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn require_central_cofinal(ctx: &RhoContext) -> Result<()> {
    if !is_central(&ctx.x, 1 << 20)? {
        return Err(Error::InvalidInput(format!("anchor {} is not central", ctx.x)));
    }
    match is_cofinal(&ctx.cone, &ctx.x, &ctx.gens, crate::cohmaps::COFINAL_SEARCH_CAP)? {
        Decision::Yes => Ok(()),
        Decision::No { .. } => Err(Error::NotCofinal(format!("{}", ctx.x))),
        Decision::UnknownWithinCap => Err(Error::MembershipUnknown("cofinality of the anchor".into())),
    }
}

/// Samples the normalized realization on the ball of `radius`; the anchor
/// must be central, cofinal and positive.
pub fn circle_samples(ctx: &RhoContext, radius: usize) -> Result<CircleSampleAction> {
    require_central_cofinal(ctx)?;
    if ctx.anchor_sign() != Sign::Positive {
        return Err(Error::InvalidInput(format!("anchor {} must be positive; use its inverse", ctx.x)));
    }
    let elems = distinct(&ctx.cone, &ball(ctx.cone.group(), radius))?;
    let mut reps = Vec::with_capacity(elems.len());
    let mut rhos = Vec::with_capacity(elems.len());
    for h in &elems {
        let r = rho(ctx, h)?;
        reps.push(ctx.x.power(-r)?.multiply(h)?);
        rhos.push(r);
    }
    let stratum = realize(&ctx.cone, &distinct(&ctx.cone, &reps)?)?;
    let nonzero: Vec<&Rational> = stratum.entries.iter().map(|e| &e.t).filter(|t| !t.is_zero()).collect();
    if nonzero.iter().any(|t| **t < Rational::zero()) {
        return Err(Error::InvariantViolated("stratum element below the identity".into()));
    }
    let t_min = nonzero.iter().min().map_or_else(Rational::zero, |t| (*t).clone());
    let t_max = nonzero.iter().max().map_or_else(Rational::zero, |t| (*t).clone());
    let epsilon = Rational::new(1.into(), (stratum.len() as i64 + 2).into());
    let mut action = CircleSampleAction {
        anchor: ctx.x.clone(),
        radius,
        epsilon,
        points: Vec::new(),
        ctx: ctx.clone(),
        stratum,
        t_min,
        t_max,
    };
    for ((h, r), s) in elems.into_iter().zip(rhos).zip(&reps) {
        let t = action.stratum.lookup(s)?.expect("representative sampled");
        let t = rat_int(r) + action.theta(&t);
        action.points.push(OrbitPoint { element: h, rho: r, t });
    }
    Ok(action)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum EulerOutcome {
    /// `lift` is the translation `σ(FG)⁻¹σ(F)σ(G)` read off the sampled
    /// lifts; `identity` is `ρ(fg) − ρ(f) − ρ(g)`.
    Agree { lift: i64, identity: i64 },
    Disagree { lift: String, identity: i64 },
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerReport {
    pub f: Element,
    pub g: Element,
    #[serde(flatten)]
    pub outcome: EulerOutcome,
}

/// Reads the section cocycle off the sampled lifts at the orbit of 0:
/// `σ(G)(0) = t′(g) − ⌊t′(g)⌋ = t′(g′)` with `g′ = x^{−⌊t′(g)⌋} g`, then
/// `σ(F)σ(G)(0) = t′(f g′) − ⌊t′(f)⌋`, and the integer translation is
/// `σ(F)σ(G)(0) − σ(FG)(0)`. It is compared with `ρ(fg) − ρ(f) − ρ(g)`.
pub fn euler_identity_check(action: &CircleSampleAction, f: &Element, g: &Element) -> Result<EulerReport> {
    let ctx = &action.ctx;
    let report = |outcome| Ok(EulerReport { f: f.clone(), g: g.clone(), outcome });
    let missing = |what: &str| EulerOutcome::Unknown { reason: format!("{what} not sampled; extend the ball") };
    let fg = f.multiply(g)?;
    let (Some(tf), Some(tg), Some(tfg)) = (action.t_prime(f)?, action.t_prime(g)?, action.t_prime(&fg)?) else {
        return report(missing("orbit point of f, g or fg"));
    };
    let g_hat = ctx.x.power(-tg.floor().to_integer().try_into().unwrap_or(0))?.multiply(g)?;
    let Some(tfg_hat) = action.t_prime(&f.multiply(&g_hat)?)? else {
        return report(missing("orbit point of f·g′"));
    };
    let lift = (&tfg_hat - tf.floor()) - (&tfg - tfg.floor());
    let identity = rho(ctx, &fg)? - rho(ctx, f)? - rho(ctx, g)?;
    if lift.is_integer() && lift.to_integer() == identity.into() {
        report(EulerOutcome::Agree { lift: identity, identity })
    } else {
        report(EulerOutcome::Disagree { lift: crate::exactreal::format_rational(&lift), identity })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EulerSuite {
    pub samples: usize,
    pub agree: usize,
    pub disagree: Vec<EulerReport>,
    pub unknown: usize,
}

impl EulerSuite {
    pub fn passed(&self) -> bool {
        self.disagree.is_empty() && self.unknown == 0
    }
}

/// `samples` random pairs from the ball of half the action's radius, so
/// `fg` stays in the sampled ball.
pub fn euler_identity_suite(action: &CircleSampleAction, samples: usize, seed: u64) -> Result<EulerSuite> {
    let pool = distinct(&action.ctx.cone, &ball(action.ctx.cone.group(), action.radius / 2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suite = EulerSuite { samples, agree: 0, disagree: Vec::new(), unknown: 0 };
    for _ in 0..samples {
        let f = pool.choose(&mut rng).unwrap();
        let g = pool.choose(&mut rng).unwrap();
        let r = euler_identity_check(action, f, g)?;
        match r.outcome {
            EulerOutcome::Agree { .. } => suite.agree += 1,
            EulerOutcome::Disagree { .. } => suite.disagree.push(r),
            EulerOutcome::Unknown { .. } => suite.unknown += 1,
        }
    }
    Ok(suite)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivalenceMode {
    Dynamical,
    SemiDynamical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum EquivalenceOutcome {
    Equivalent,
    NotEquivalent { component: usize },
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    #[serde(flatten)]
    pub outcome: EquivalenceOutcome,
    pub mode: EquivalenceMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_a: Option<PsiValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_b: Option<PsiValue>,
}

/// Compares two classes in `ℝ/ℤ`: `Some(true)` equal, `Some(false)` distinct,
/// `None` when intervals cannot separate them.
fn same_class(a: &Component, b: &Component) -> Option<bool> {
    if let (Some(x), Some(y)) = (a.as_exact(), b.as_exact()) {
        return Some(x == y);
    }
    let ((al, au), (bl, bu)) = (a.bounds(), b.bounds());
    let touches_wrap = |l: &Rational, u: &Rational, l2: &Rational, u2: &Rational| l.is_zero() && u2 >= &Rational::one() || u >= &Rational::one() && l2.is_zero();
    if au < bl || bu < al {
        if touches_wrap(&al, &au, &bl, &bu) {
            return None;
        }
        return Some(false);
    }
    None
}

/// Dynamical (both orderings dense) or semi-dynamical equivalence, decided by
/// equality of the reduced stable-value classes.
pub fn dynamically_equivalent(
    a: &RhoContext,
    b: &RhoContext,
    mode: EquivalenceMode,
    iterations: u64,
) -> Result<EquivalenceVerdict> {
    let unknown = |reason: String| Ok(EquivalenceVerdict { outcome: EquivalenceOutcome::Unknown { reason }, mode, psi_a: None, psi_b: None });
    if a.cone.group() != b.cone.group() {
        return Err(Error::MixedGroups(a.cone.group().to_string(), b.cone.group().to_string()));
    }
    for ctx in [a, b] {
        match require_central_cofinal(ctx) {
            Ok(()) => {}
            Err(e) => return unknown(format!("precondition: {e}")),
        }
    }
    if mode == EquivalenceMode::Dynamical {
        for ctx in [a, b] {
            match is_dense(&ctx.cone, 64)? {
                Density::Dense => {}
                Density::Discrete { .. } => return unknown("not dense".into()),
                Density::UnknownWithinCap { .. } => return unknown("density undecided".into()),
            }
        }
    }
    let basis = default_basis(a);
    let (pa, pb) = match (psi(a, &basis, iterations), psi(b, &basis, iterations)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return unknown(format!("psi: {e}")),
    };
    let mut undecided = false;
    let mut outcome = EquivalenceOutcome::Equivalent;
    for (i, (ca, cb)) in pa.components.iter().zip(&pb.components).enumerate() {
        match same_class(ca, cb) {
            Some(true) => {}
            Some(false) => {
                outcome = EquivalenceOutcome::NotEquivalent { component: i };
                break;
            }
            None => undecided = true,
        }
    }
    if undecided && outcome == EquivalenceOutcome::Equivalent {
        outcome = EquivalenceOutcome::Unknown { reason: "certified intervals overlap".into() };
    }
    Ok(EquivalenceVerdict { outcome, mode, psi_a: Some(pa), psi_b: Some(pb) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{rat, RealConstant};
    use crate::groups::{braid_delta_sq, parse_element, GroupRef};
    use crate::orderings::FlagOrdering;

    fn lex(n: usize) -> Cone {
        Cone::Flag(FlagOrdering::lex(n))
    }

    fn flag(levels: Vec<Vec<RealConstant>>) -> Cone {
        Cone::Flag(FlagOrdering::new(levels).unwrap())
    }

    fn sqrt_flag(a: i64, m: u64) -> Cone {
        flag(vec![vec![RealConstant::integer(a), RealConstant::sqrt(m).scale_int(a)]])
    }

    fn z1(k: i64) -> Element {
        Element::lattice(&[k])
    }

    fn ts(t: &RealizationTable) -> Vec<Rational> {
        t.entries().iter().map(|e| e.t.clone()).collect()
    }

    fn delta_ctx() -> RhoContext {
        let d = Element::Braid(braid_delta_sq(3).unwrap());
        RhoContext::whole_group(Cone::dehornoy(3), d, 1 << 20).unwrap()
    }

    #[test]
    fn realize_examples() {
        let t = realize(&lex(1), &[z1(0), z1(1), z1(-1), z1(2)]).unwrap();
        assert_eq!(ts(&t), vec![rat_int(0), rat_int(1), rat_int(-1), rat_int(2)]);
        let t = realize(&lex(1), &[z1(0), z1(1), z1(-1), z1(3), z1(2)]).unwrap();
        assert_eq!(t.entries()[3].t, rat_int(2));
        assert_eq!(t.entries()[4].t, rat(3, 2));
        assert_eq!(ts(&realize(&lex(1), &[z1(0)]).unwrap()), vec![rat_int(0)]);
        assert!(realize(&lex(1), &[z1(0), z1(1), z1(1)]).is_err());
        assert!(realize(&lex(1), &[z1(1)]).is_err());
        let b3 = GroupRef::Braid { strands: 3 };
        let dup = ["", "s1 s2 s1", "s2 s1 s2"].map(|w| parse_element(w, b3).unwrap());
        assert!(realize(&Cone::dehornoy(3), &dup).is_err());
    }

    #[test]
    fn partial_action_examples() {
        let t = realize(&lex(1), &[z1(0), z1(1), z1(-1), z1(2)]).unwrap();
        let r = partial_action_check(&t, &z1(1)).unwrap();
        assert!(r.passed);
        assert_eq!(r.map, [["-1", "0"], ["0", "1"], ["1", "2"]].map(|p| p.map(String::from)).to_vec());
        let id = partial_action_check(&t, &z1(0)).unwrap();
        assert!(id.passed && id.map.iter().all(|[a, b]| a == b) && id.map.len() == 4);
        let t2 = realize_ball(&lex(2), 2).unwrap();
        assert!(partial_action_check(&t2, &Element::lattice(&[0, 1])).unwrap().passed);
    }

    #[test]
    fn realization_contract_on_balls() {
        for (cone, r) in [(lex(2), 3), (sqrt_flag(1, 2), 3), (Cone::dehornoy(3), 3)] {
            let full = distinct(&cone, &ball(cone.group(), r)).unwrap();
            let t = realize(&cone, &full).unwrap();
            assert!(t.is_order_embedding().unwrap());
            let prefix = realize(&cone, &full[..full.len() / 2]).unwrap();
            assert_eq!(ts(&prefix), ts(&t)[..prefix.len()].to_vec());
        }
    }

    #[test]
    fn circle_samples_lex() {
        let ctx = RhoContext::whole_group(lex(2), Element::lattice(&[1, 0]), 1 << 20).unwrap();
        let a = circle_samples(&ctx, 2).unwrap();
        assert!(a.unit_translation_holds().unwrap());
        assert!(a.is_order_embedding().unwrap());
        let t = |c: &[i64]| a.t_prime(&Element::lattice(c)).unwrap().unwrap();
        assert_eq!(t(&[0, 0]), rat_int(0));
        assert_eq!(t(&[1, 0]) - t(&[0, 0]), rat_int(1));
        // ρ((k, j)) = k for j ≥ 0 and k − 1 for j < 0, since (0, j) < 1 then
        let rho_lex = |k: i64, j: i64| if j >= 0 { k } else { k - 1 };
        for k in -2..=2 {
            for j in -2..=2 {
                let r = rho_lex(k, j);
                assert_eq!(t(&[k, j]), rat_int(r) + t(&[k - r, j]));
                let frac = t(&[k, j]) - rat_int(r);
                assert!(frac >= rat_int(0) && frac < rat_int(1));
                assert_eq!(frac.is_zero(), j == 0);
            }
        }
        assert!(a.points.iter().all(|p| {
            let c = p.element.as_lattice().unwrap().coords();
            p.rho == rho_lex(c[0], c[1])
        }));
    }

    #[test]
    fn circle_samples_braid() {
        let a = circle_samples(&delta_ctx(), 3).unwrap();
        assert!(a.unit_translation_holds().unwrap());
        assert!(a.is_order_embedding().unwrap());
    }

    #[test]
    fn circle_samples_preconditions() {
        let b3 = GroupRef::Braid { strands: 3 };
        let s1 = parse_element("s1", b3).unwrap();
        let ctx = RhoContext::whole_group(Cone::dehornoy(3), s1, 1 << 20).unwrap();
        assert!(matches!(circle_samples(&ctx, 1), Err(Error::InvalidInput(_))));
        let ctx = RhoContext::whole_group(lex(2), Element::lattice(&[0, 1]), 64).unwrap();
        assert!(matches!(circle_samples(&ctx, 1), Err(Error::NotCofinal(_))));
        let ctx = RhoContext::whole_group(lex(2), Element::lattice(&[-1, 0]), 64).unwrap();
        assert!(matches!(circle_samples(&ctx, 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn euler_examples() {
        let ctx = RhoContext::whole_group(lex(2), Element::lattice(&[1, 0]), 1 << 20).unwrap();
        let a = circle_samples(&ctx, 4).unwrap();
        let x = Element::lattice(&[1, 0]);
        assert_eq!(euler_identity_check(&a, &x, &x).unwrap().outcome, EulerOutcome::Agree { lift: 0, identity: 0 });
        // ρ(f) = 0, ρ(g) = −1, ρ(fg) = 0: the lifted section cocycle is +1,
        // the negative of the defect cocycle ρ(f) + ρ(g) − ρ(fg)
        let (f, g) = (Element::lattice(&[0, 1]), Element::lattice(&[0, -1]));
        assert_eq!(euler_identity_check(&a, &f, &g).unwrap().outcome, EulerOutcome::Agree { lift: 1, identity: 1 });
        assert_eq!(crate::quasimorph::defect_cocycle(&ctx, &f, &g).unwrap(), -1);
        let far = Element::lattice(&[0, 9]);
        assert!(matches!(euler_identity_check(&a, &far, &f).unwrap().outcome, EulerOutcome::Unknown { .. }));
    }

    #[test]
    fn euler_suites() {
        let lex_ctx = RhoContext::whole_group(lex(2), Element::lattice(&[1, 0]), 1 << 20).unwrap();
        let sq_ctx = RhoContext::whole_group(sqrt_flag(1, 2), Element::lattice(&[1, 0]), 1 << 20).unwrap();
        for ctx in [lex_ctx, sq_ctx] {
            let a = circle_samples(&ctx, 4).unwrap();
            let s = euler_identity_suite(&a, 200, 0).unwrap();
            assert!(s.passed(), "{s:?}");
        }
        let a = circle_samples(&delta_ctx(), 4).unwrap();
        let s = euler_identity_suite(&a, 100, 0).unwrap();
        assert!(s.passed(), "{s:?}");
    }

    #[test]
    fn equivalence_examples() {
        let x = Element::lattice(&[1, 0]);
        let ctx = |c: Cone| RhoContext::whole_group(c, x.clone(), 1 << 20).unwrap();
        let v = dynamically_equivalent(&ctx(sqrt_flag(1, 2)), &ctx(sqrt_flag(2, 2)), EquivalenceMode::Dynamical, 1).unwrap();
        assert_eq!(v.outcome, EquivalenceOutcome::Equivalent);
        let v = dynamically_equivalent(&ctx(sqrt_flag(1, 2)), &ctx(sqrt_flag(1, 3)), EquivalenceMode::Dynamical, 1).unwrap();
        assert_eq!(v.outcome, EquivalenceOutcome::NotEquivalent { component: 1 });
        let v = dynamically_equivalent(&ctx(lex(2)), &ctx(sqrt_flag(1, 2)), EquivalenceMode::Dynamical, 1).unwrap();
        assert_eq!(v.outcome, EquivalenceOutcome::Unknown { reason: "not dense".into() });
        let v = dynamically_equivalent(&ctx(lex(2)), &ctx(lex(2)), EquivalenceMode::SemiDynamical, 1).unwrap();
        assert_eq!(v.outcome, EquivalenceOutcome::Equivalent);
    }

    #[test]
    fn conjugate_orderings_are_equivalent() {
        let x = Element::lattice(&[1, 0]);
        let base = sqrt_flag(1, 2);
        let conj = base.act(&Element::lattice(&[3, -2])).unwrap();
        let a = RhoContext::whole_group(base, x.clone(), 1 << 20).unwrap();
        let b = RhoContext::whole_group(conj, x, 1 << 20).unwrap();
        let v = dynamically_equivalent(&a, &b, EquivalenceMode::Dynamical, 1).unwrap();
        assert_eq!(v.outcome, EquivalenceOutcome::Equivalent);
        let d = delta_ctx();
        let s2 = parse_element("s2", GroupRef::Braid { strands: 3 }).unwrap();
        let c = RhoContext::whole_group(d.cone.act(&s2).unwrap(), d.x.clone(), 1 << 20).unwrap();
        let v = dynamically_equivalent(&d, &c, EquivalenceMode::SemiDynamical, 600).unwrap();
        assert!(matches!(v.outcome, EquivalenceOutcome::Unknown { .. } | EquivalenceOutcome::Equivalent));
    }

    proptest::proptest! {
        #[test]
        fn realize_embeds_and_is_prefix_stable(
            pts in proptest::collection::vec((-5i64..=5, -5i64..=5), 1..25),
            irrational in proptest::bool::ANY,
        ) {
            let cone = if irrational { sqrt_flag(1, 2) } else { lex(2) };
            let elems: Vec<Element> = pts.iter().map(|&(a, b)| Element::lattice(&[a, b])).collect();
            let en = distinct(&cone, &elems).unwrap();
            let t = realize(&cone, &en).unwrap();
            proptest::prop_assert!(t.is_order_embedding().unwrap());
            let half = realize(&cone, &en[..en.len().div_ceil(2)]).unwrap();
            proptest::prop_assert_eq!(half.entries(), &t.entries()[..half.len()]);
            for g in [Element::lattice(&[1, 0]), Element::lattice(&[0, 1])] {
                proptest::prop_assert!(partial_action_check(&t, &g).unwrap().passed);
            }
        }
    }
}

