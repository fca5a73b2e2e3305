//! The bracketing quasi-morphism `ρ` of an anchor `x`, its stable map and
//! defect cocycle.
//!
//! For `x > 1`, `ρ(h)` is the integer `N` with `x^N ≤ h < x^{N+1}`. For
//! `x < 1` we set `ρ_x(h) = −ρ_{x⁻¹}(h)`, so that `ρ(x^k) = k` in both cases.

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactreal::{format_rational, rat_int, rational_str, RealConstant, Rational, Sign};
use crate::groups::Element;
use crate::orderings::{is_cofinal, Cone, Decision, FlagOrdering};

pub const MAX_EXPONENT: u64 = 1 << 62;

#[derive(Debug, Clone)]
pub struct RhoContext {
    pub cone: Cone,
    pub x: Element,
    pub gens: Vec<Element>,
    pub cap: u64,
    x_sign: Sign,
}

impl RhoContext {
    /// Rejects only an identity anchor; a non-cofinal anchor surfaces later as
    /// [`Error::NotBracketedWithinCap`].
    pub fn new(cone: Cone, x: Element, gens: Vec<Element>, cap: u64) -> Result<RhoContext> {
        let x_sign = cone.sign(&x)?;
        if x_sign == Sign::Zero {
            return Err(Error::AnchorIsIdentity);
        }
        for g in &gens {
            if g.group() != cone.group() {
                return Err(Error::MixedGroups(g.group().to_string(), cone.group().to_string()));
            }
        }
        Ok(RhoContext { cone, x, gens, cap: cap.clamp(1, MAX_EXPONENT), x_sign })
    }

    /// Context on the whole group, generated by its standard generators.
    pub fn whole_group(cone: Cone, x: Element, cap: u64) -> Result<RhoContext> {
        let gens = cone.group().generators();
        RhoContext::new(cone, x, gens, cap)
    }

    /// As [`RhoContext::new`], also refusing anchors that `is_cofinal`
    /// shows to be non-cofinal.
    pub fn checked(cone: Cone, x: Element, gens: Vec<Element>, cap: u64) -> Result<RhoContext> {
        let ctx = RhoContext::new(cone, x, gens, cap)?;
        if let Decision::No { witness } = is_cofinal(&ctx.cone, &ctx.x, &ctx.gens, 64)? {
            let w = witness.map(|w| w.to_string()).unwrap_or_default();
            return Err(Error::NotCofinal(format!("{} does not bracket {w}", ctx.x)));
        }
        Ok(ctx)
    }

    pub fn anchor_sign(&self) -> Sign {
        self.x_sign
    }
}

/// `max {n ≤ cap : x^n ≤ h}` for `x > 1`.
fn bracket_positive(cone: &Cone, x: &Element, h: &Element, cap: u64) -> Result<i64> {
    let x_inv = x.inverse();
    let at_or_below = |n: i64| -> Result<bool> { Ok(cone.sign(&x_inv.power(n)?.multiply(h)?)? != Sign::Negative) };
    let limit = cap as i64;
    let not_found = || Error::NotBracketedWithinCap(h.to_string(), cap);
    let (mut lo, mut hi);
    let mut step = 1i64;
    if at_or_below(0)? {
        lo = 0;
        loop {
            let cand = step.min(limit);
            if !at_or_below(cand)? {
                hi = cand;
                break;
            }
            lo = cand;
            if cand == limit {
                return Err(not_found());
            }
            step = step.saturating_mul(2);
        }
    } else {
        hi = 0;
        loop {
            let cand = -step.min(limit);
            if at_or_below(cand)? {
                lo = cand;
                break;
            }
            hi = cand;
            if -cand == limit {
                return Err(not_found());
            }
            step = step.saturating_mul(2);
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at_or_below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

pub fn rho(ctx: &RhoContext, h: &Element) -> Result<i64> {
    match ctx.x_sign {
        Sign::Positive => bracket_positive(&ctx.cone, &ctx.x, h, ctx.cap),
        Sign::Negative => bracket_positive(&ctx.cone, &ctx.x.inverse(), h, ctx.cap).map(|n| -n),
        Sign::Zero => Err(Error::AnchorIsIdentity),
    }
}

/// `c(f, g) = ρ(f) + ρ(g) − ρ(fg)`, which lies in `{−1, 0}` for `x > 1` and
/// in `{0, 1}` for `x < 1`.
pub fn defect_cocycle(ctx: &RhoContext, f: &Element, g: &Element) -> Result<i64> {
    let c = rho(ctx, f)? + rho(ctx, g)? - rho(ctx, &f.multiply(g)?)?;
    let allowed = match ctx.x_sign {
        Sign::Positive => (-1..=0).contains(&c),
        _ => (0..=1).contains(&c),
    };
    if !allowed {
        return Err(Error::InvariantViolated(format!("defect c({f}, {g}) = {c}")));
    }
    Ok(c)
}

/// Exact stable value of `h` for a flag ordering: `⟨v,h⟩ / ⟨v,x⟩` at the
/// first level `v` that sees `x`.
pub fn stable_exact(flag: &FlagOrdering, x: &Element, h: &Element) -> Result<RealConstant> {
    let xc = flag.sign(x).map(|_| x.as_lattice().expect("checked by sign").coords())?;
    let hc = flag.sign(h).map(|_| h.as_lattice().expect("checked by sign").coords())?;
    let (j0, px) = flag.first_nonzero(xc).ok_or(Error::AnchorIsIdentity)?;
    if let Some(i) = (0..j0).find(|&i| !flag.pairing(i, hc).is_zero()) {
        return Err(Error::NotCofinal(format!("level {} sees {h} but not the anchor {x}", i + 1)));
    }
    let q = px.as_rational().ok_or_else(|| Error::IrrationalAnchorPairing(px.to_string()))?;
    flag.pairing(j0, hc).div_by_rational(&q)
}

/// `ρ(h^N)/N` with its certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StableValue {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<RealConstant>,
    #[serde(with = "rational_str")]
    pub value: Rational,
    #[serde(with = "rational_str")]
    pub radius: Rational,
    /// Certified one-sided enclosure `[lower, upper]` of width `1/N`.
    #[serde(with = "rational_str")]
    pub lower: Rational,
    #[serde(with = "rational_str")]
    pub upper: Rational,
    pub iterations: u64,
}

impl StableValue {
    pub fn contains(&self, c: &RealConstant) -> bool {
        c.cmp_rational(&self.lower) != Sign::Negative && c.cmp_rational(&self.upper) != Sign::Positive
    }

    pub fn overlaps(&self, lower: &Rational, upper: &Rational) -> bool {
        &self.lower <= upper && lower <= &self.upper
    }

    /// Exact rational value when known, otherwise the certified enclosure.
    pub fn exact_or_interval(&self) -> (Rational, Rational) {
        match self.exact.as_ref().and_then(RealConstant::as_rational) {
            Some(q) => (q.clone(), q),
            None => (self.lower.clone(), self.upper.clone()),
        }
    }
}

pub fn stable_approx(ctx: &RhoContext, h: &Element, n: u64) -> Result<StableValue> {
    if n == 0 {
        return Err(Error::InvalidInput("stable_approx needs N ≥ 1".into()));
    }
    let r = rho(ctx, &h.power(n as i64)?)?;
    let nn = Rational::from_integer(n.into());
    let value = rat_int(r) / &nn;
    let radius = Rational::one() / &nn;
    let (lower, upper) = match ctx.x_sign {
        Sign::Positive => (value.clone(), &value + &radius),
        _ => (&value - &radius, value.clone()),
    };
    let exact = ctx.cone.as_flag().and_then(|f| stable_exact(f, &ctx.x, h).ok());
    Ok(StableValue { exact, value, radius, lower, upper, iterations: n })
}

/// Exact stable value from a supplied relation `h^k = x^m`, verified with the
/// order oracle; homogeneity then gives `ρ̄(h) = m/k`.
pub fn stable_from_relation(ctx: &RhoContext, h: &Element, k: i64, m: i64) -> Result<Rational> {
    if k == 0 {
        return Err(Error::InvalidInput("relation exponent k must be nonzero".into()));
    }
    let diff = ctx.x.power(-m)?.multiply(&h.power(k)?)?;
    if ctx.cone.sign(&diff)? != Sign::Zero {
        return Err(Error::InvalidInput(format!("{h} to the power {k} is not x^{m}")));
    }
    Ok(Rational::new(m.into(), k.into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StablePropertiesReport {
    pub checks: usize,
    pub passed: bool,
    pub violations: Vec<String>,
}

/// Certified value of `ρ̄(h)` as a closed rational interval, or an exact
/// constant for flags.
#[derive(Debug, Clone)]
enum Certified {
    Exact(RealConstant),
    Interval(Rational, Rational),
}

fn certify(ctx: &RhoContext, h: &Element, n: u64) -> Result<Certified> {
    if let Some(f) = ctx.cone.as_flag() {
        return stable_exact(f, &ctx.x, h).map(Certified::Exact);
    }
    let v = stable_approx(ctx, h, n)?;
    Ok(Certified::Interval(v.lower, v.upper))
}

impl Certified {
    fn scale(&self, m: i64) -> Certified {
        match self {
            Certified::Exact(c) => Certified::Exact(c.scale_int(m)),
            Certified::Interval(lo, hi) => {
                let (a, b) = (lo * rat_int(m), hi * rat_int(m));
                if m < 0 {
                    Certified::Interval(b, a)
                } else {
                    Certified::Interval(a, b)
                }
            }
        }
    }

    fn bounds(&self) -> (Rational, Rational) {
        match self {
            Certified::Exact(c) => c.enclosure(64),
            Certified::Interval(lo, hi) => (lo.clone(), hi.clone()),
        }
    }

    /// Consistent with being equal: exact equality, or overlapping intervals.
    fn agrees(&self, other: &Certified) -> bool {
        match (self, other) {
            (Certified::Exact(a), Certified::Exact(b)) => a == b,
            _ => {
                let (a0, a1) = self.bounds();
                let (b0, b1) = other.bounds();
                a0 <= b1 && b0 <= a1
            }
        }
    }

    fn add(&self, other: &Certified) -> Certified {
        match (self, other) {
            (Certified::Exact(a), Certified::Exact(b)) => Certified::Exact(a + b),
            _ => {
                let (a0, a1) = self.bounds();
                let (b0, b1) = other.bounds();
                Certified::Interval(a0 + b0, a1 + b1)
            }
        }
    }

    fn certainly_zero(&self) -> bool {
        matches!(self, Certified::Exact(c) if c.is_zero())
    }

    /// `|value| ≤ bound` is consistent with the certificate.
    fn within(&self, bound: i64) -> bool {
        match self {
            Certified::Exact(c) => c.cmp_rational(&rat_int(bound)) != Sign::Positive && c.cmp_rational(&rat_int(-bound)) != Sign::Negative,
            Certified::Interval(lo, hi) => lo <= &rat_int(bound) && hi >= &rat_int(-bound),
        }
    }
}

/// Conjugation invariance, homogeneity for `M ∈ −3..=3`, and the bounded-sum
/// property on products that are trivial (braids) or have vanishing stable
/// value (flags). Braid values are certified with `n` iterations.
pub fn stable_properties_suite(ctx: &RhoContext, samples: &[Element], n: u64, seed: u64) -> Result<StablePropertiesReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let mut violations = Vec::new();
    let mut values = Vec::with_capacity(samples.len());
    for h in samples {
        values.push(certify(ctx, h, n)?);
    }
    for (h, v) in samples.iter().zip(&values) {
        // conjugation by a generator of H
        if !ctx.gens.is_empty() {
            let a = &ctx.gens[rng.gen_range(0..ctx.gens.len())];
            let a = if rng.gen_bool(0.5) { a.clone() } else { a.inverse() };
            let conj = a.inverse().multiply(h)?.multiply(&a)?;
            checks += 1;
            if !certify(ctx, &conj, n)?.agrees(v) {
                violations.push(format!("conjugation: ρ̄({conj}) differs from ρ̄({h})"));
            }
        }
        // homogeneity
        for m in -3i64..=3 {
            if ctx.cone.as_flag().is_none() && m.unsigned_abs() * h.size() * n > 6000 {
                continue;
            }
            checks += 1;
            let lhs = certify(ctx, &h.power(m)?, n)?;
            if !lhs.agrees(&v.scale(m)) {
                violations.push(format!("homogeneity: ρ̄({h}^{m}) ≠ {m}·ρ̄({h})"));
            }
        }
    }
    // bounded sums over (h_i, h_j, (h_i h_j)⁻¹) and (h, h⁻¹)
    for i in 0..samples.len() {
        let j = rng.gen_range(0..samples.len());
        let prod_inv = samples[i].multiply(&samples[j])?.inverse();
        let tuples: [Vec<Element>; 2] = [
            vec![samples[i].clone(), samples[i].inverse()],
            vec![samples[i].clone(), samples[j].clone(), prod_inv],
        ];
        for t in tuples {
            let mut product = ctx.cone.group().identity();
            for e in &t {
                product = product.multiply(e)?;
            }
            let trivial = ctx.cone.sign(&product)? == Sign::Zero;
            if !trivial && !certify(ctx, &product, n)?.certainly_zero() {
                continue;
            }
            let mut sum = Certified::Exact(RealConstant::zero());
            for e in &t {
                sum = sum.add(&certify(ctx, e, n)?);
            }
            checks += 1;
            if !sum.within(t.len() as i64 - 1) {
                let (lo, hi) = sum.bounds();
                violations.push(format!(
                    "bounded sum over {} elements lies in [{}, {}]",
                    t.len(),
                    format_rational(&lo),
                    format_rational(&hi)
                ));
            }
        }
    }
    Ok(StablePropertiesReport { checks, passed: violations.is_empty(), violations })
}

/// `|a − b| ≤ r` for rationals.
pub fn within(a: &Rational, b: &Rational, r: &Rational) -> bool {
    (a - b).abs() <= *r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::rat;
    use crate::groups::{braid_delta_sq, parse_element, random_element, GroupRef};

    fn lex_ctx() -> RhoContext {
        RhoContext::whole_group(Cone::Flag(FlagOrdering::lex(2)), Element::lattice(&[1, 0]), 1 << 20).unwrap()
    }

    fn sqrt2_ctx() -> RhoContext {
        let f = FlagOrdering::new(vec![vec![RealConstant::one(), RealConstant::sqrt(2)]]).unwrap();
        RhoContext::whole_group(Cone::Flag(f), Element::lattice(&[1, 0]), 1 << 40).unwrap()
    }

    fn braid_ctx() -> RhoContext {
        RhoContext::whole_group(Cone::dehornoy(3), Element::Braid(braid_delta_sq(3).unwrap()), 1 << 20).unwrap()
    }

    fn b3(t: &str) -> Element {
        parse_element(t, GroupRef::Braid { strands: 3 }).unwrap()
    }

    #[test]
    fn rho_examples() {
        let ctx = lex_ctx();
        assert_eq!(rho(&ctx, &Element::lattice(&[0, 5])).unwrap(), 0);
        assert_eq!(rho(&ctx, &Element::lattice(&[0, -1])).unwrap(), -1);
        for k in -7..=7 {
            assert_eq!(rho(&ctx, &Element::lattice(&[k, 0])).unwrap(), k);
            assert_eq!(rho(&ctx, &Element::lattice(&[k, 3])).unwrap(), k);
        }
        let b = braid_ctx();
        assert_eq!(rho(&b, &b3("s1 s2 s1 s1 s2 s1 s1")).unwrap(), 1);
        assert_eq!(rho(&b, &b3("")).unwrap(), 0);
        assert_eq!(rho(&b, &b3("s1^-1")).unwrap(), -1);
    }

    #[test]
    fn negative_anchor_convention() {
        let ctx = RhoContext::whole_group(Cone::Flag(FlagOrdering::lex(2)), Element::lattice(&[-1, 0]), 1 << 20).unwrap();
        for k in -5..=5 {
            assert_eq!(rho(&ctx, &Element::lattice(&[k, 0])).unwrap(), -k);
        }
        assert_eq!(rho(&ctx, &Element::lattice(&[0, 1])).unwrap(), 0);
        assert_eq!(rho(&ctx, &Element::lattice(&[0, -1])).unwrap(), 1);
        let c = defect_cocycle(&ctx, &Element::lattice(&[0, 1]), &Element::lattice(&[0, -1])).unwrap();
        assert_eq!(c, 1);
    }

    #[test]
    fn non_cofinal_anchor_is_not_bracketed() {
        let ctx = RhoContext::whole_group(Cone::Flag(FlagOrdering::lex(2)), Element::lattice(&[0, 1]), 1 << 10).unwrap();
        assert!(matches!(rho(&ctx, &Element::lattice(&[1, 0])), Err(Error::NotBracketedWithinCap(_, 1024))));
        assert!(matches!(
            RhoContext::checked(Cone::Flag(FlagOrdering::lex(2)), Element::lattice(&[0, 1]), vec![Element::lattice(&[1, 0])], 8),
            Err(Error::NotCofinal(_))
        ));
        assert!(matches!(
            RhoContext::whole_group(Cone::Flag(FlagOrdering::lex(2)), Element::lattice(&[0, 0]), 8),
            Err(Error::AnchorIsIdentity)
        ));
    }

    #[test]
    fn stable_examples() {
        let x = Element::lattice(&[1, 0]);
        let f = FlagOrdering::new(vec![vec![RealConstant::one(), RealConstant::sqrt(2)]]).unwrap();
        assert_eq!(stable_exact(&f, &x, &x).unwrap(), RealConstant::one());
        assert_eq!(stable_exact(&f, &x, &Element::lattice(&[0, 1])).unwrap(), RealConstant::sqrt(2));
        assert_eq!(stable_exact(&FlagOrdering::lex(2), &x, &Element::lattice(&[0, 1])).unwrap(), RealConstant::zero());
        let ctx = sqrt2_ctx();
        let y = Element::lattice(&[0, 1]);
        for n in [10, 100, 1000] {
            let v = stable_approx(&ctx, &y, n).unwrap();
            assert!(v.contains(&RealConstant::sqrt(2)));
            let err = &RealConstant::sqrt(2) - &RealConstant::rational(v.value.clone());
            assert_ne!(err.cmp_rational(&v.radius), Sign::Positive);
            assert_ne!(err.cmp_rational(&-v.radius.clone()), Sign::Negative);
        }
        let v = stable_approx(&ctx, &x, 17).unwrap();
        assert_eq!(v.value, rat_int(1));
        assert!(v.contains(&RealConstant::one()));
        let lex = FlagOrdering::lex(2);
        assert!(matches!(stable_exact(&lex, &y, &x), Err(Error::NotCofinal(_))));
        let irr = FlagOrdering::new(vec![vec![RealConstant::sqrt(3), RealConstant::one()]]).unwrap();
        assert!(matches!(stable_exact(&irr, &x, &y), Err(Error::IrrationalAnchorPairing(_))));
    }

    #[test]
    fn deeper_anchor_level() {
        // anchor (0,1) in lex ℤ², subgroup ⟨(0,1)⟩: second level decides
        let lex = FlagOrdering::lex(2);
        let y = Element::lattice(&[0, 1]);
        assert_eq!(stable_exact(&lex, &y, &Element::lattice(&[0, -4])).unwrap(), RealConstant::integer(-4));
    }

    #[test]
    fn braid_twisting_number() {
        let ctx = braid_ctx();
        let h = b3("s1 s2");
        assert_eq!(stable_from_relation(&ctx, &h, 3, 1).unwrap(), rat(1, 3));
        assert!(stable_from_relation(&ctx, &h, 2, 1).is_err());
        let v = stable_approx(&ctx, &h, 60).unwrap();
        assert!(within(&v.value, &rat(1, 3), &v.radius));
        assert!(v.lower <= rat(1, 3) && rat(1, 3) <= v.upper);
        let s1 = stable_approx(&ctx, &b3("s1"), 60).unwrap();
        assert!(s1.lower <= rat_int(0) && rat_int(0) <= s1.upper);
    }

    #[test]
    fn defect_examples() {
        let ctx = lex_ctx();
        let x = Element::lattice(&[1, 0]);
        assert_eq!(defect_cocycle(&ctx, &x, &x).unwrap(), 0);
        assert_eq!(defect_cocycle(&ctx, &Element::lattice(&[0, 1]), &Element::lattice(&[0, -1])).unwrap(), -1);
        assert_eq!(defect_cocycle(&ctx, &x, &x.inverse()).unwrap(), 0);
    }

    #[test]
    fn cocycle_identity_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for ctx in [lex_ctx(), sqrt2_ctx(), braid_ctx()] {
            let group = ctx.cone.group();
            let size = if group.is_abelian() { 12 } else { 6 };
            for _ in 0..150 {
                let f = random_element(group, &mut rng, size);
                let g = random_element(group, &mut rng, size);
                let h = random_element(group, &mut rng, size);
                let c = |a: &Element, b: &Element| defect_cocycle(&ctx, a, b).unwrap();
                let fg = f.multiply(&g).unwrap();
                let gh = g.multiply(&h).unwrap();
                assert_eq!(c(&g, &h) - c(&fg, &h) + c(&f, &gh) - c(&f, &g), 0);
                if ctx.cone.compare(&f, &g).unwrap().is_lt() {
                    assert!(rho(&ctx, &f).unwrap() <= rho(&ctx, &g).unwrap());
                }
            }
        }
    }

    #[test]
    fn stable_properties_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = sqrt2_ctx();
        let samples: Vec<Element> = (0..20).map(|_| random_element(ctx.cone.group(), &mut rng, 9)).collect();
        let report = stable_properties_suite(&ctx, &samples, 100, 0).unwrap();
        assert!(report.passed, "{:?}", report.violations);
        let b = braid_ctx();
        let samples = vec![b3("s1 s2"), b3("s2^-1 s1 s2 s2"), b3("s1^-2 s2")];
        let report = stable_properties_suite(&b, &samples, 60, 0).unwrap();
        assert!(report.passed, "{:?}", report.violations);
        let left = stable_approx(&b, &b3("s2^-1 s1 s2 s2"), 60).unwrap();
        let right = stable_approx(&b, &b3("s1 s2"), 60).unwrap();
        assert!(left.overlaps(&right.lower, &right.upper));
    }
}
