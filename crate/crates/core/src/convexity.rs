//! Convexity of free abelian subgroups `B = ⟨w_1..w_k⟩ ≤ A = ⟨x_1..x_n⟩`,
//! with `w_i` given by the rows of an exponent matrix.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactreal::{format_rational, parse_rational, q_rank, rat_int, rational_str, RealConstant, Rational, Sign};
use crate::groups::Element;
use crate::linalg::{rational_rank, IntLattice};
use crate::orderings::{Cone, FlagOrdering};
use crate::quasimorph::{stable_approx, stable_exact, RhoContext};

/// `k×n` integer matrix; row `i` is the exponent vector of `w_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentMatrix {
    rows: Vec<Vec<i64>>,
}

impl ExponentMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<ExponentMatrix> {
        let n = rows.first().map_or(0, Vec::len);
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("exponent matrix rows must be nonempty and of equal length".into()));
        }
        let q: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&c| rat_int(c)).collect()).collect();
        if rational_rank(&q) < rows.len() {
            return Err(Error::RankDeficient("exponent matrix rows are linearly dependent".into()));
        }
        Ok(ExponentMatrix { rows })
    }

    /// Rows separated by `;`, entries by whitespace: `"0 1; 1 1"`.
    pub fn parse(text: &str) -> Result<ExponentMatrix> {
        let rows = text
            .split(';')
            .map(|r| {
                r.split_whitespace()
                    .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent entry {t:?}"))))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ExponentMatrix::new(rows)
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn lattice(&self) -> IntLattice {
        IntLattice::from_i64(self.n(), &self.rows)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    Convex,
    NotConvex { failed: u8, witness: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvexityVerdict {
    #[serde(flatten)]
    pub outcome: Outcome,
    pub row_gcds: Vec<i64>,
    /// `ρ̄(x_j)` for the generators of `A`.
    pub stable_values: Vec<RealConstant>,
    /// `Σ_j e_j^i ρ̄(x_j)` per row.
    pub pairings: Vec<RealConstant>,
    pub q_rank: usize,
    pub expected_q_rank: usize,
}

impl ConvexityVerdict {
    pub fn is_convex(&self) -> bool {
        self.outcome == Outcome::Convex
    }

    pub fn failed(&self) -> Option<u8> {
        match self.outcome {
            Outcome::Convex => None,
            Outcome::NotConvex { failed, .. } => Some(failed),
        }
    }
}

fn row_gcd(row: &[i64]) -> i64 {
    row.iter().fold(0i64, |g, &c| g.gcd(&c))
}

fn check_shape(e: &ExponentMatrix, n: usize) -> Result<()> {
    if e.n() != n {
        return Err(Error::InvalidInput(format!("exponent rows must have length {n}")));
    }
    if e.k() >= n {
        return Err(Error::InvalidInput(format!("the criterion needs k < n; got k = {}, n = {n}", e.k())));
    }
    Ok(())
}

/// Evaluates the three-condition criterion with `A = ℤⁿ` and exact stable
/// values of the standard basis: (1) every row is primitive, (2) `E·r = 0`,
/// (3) `dim_ℚ span(r) = n − k`. Convex iff all three hold.
pub fn check_convex(flag: &FlagOrdering, x: &[i64], e: &ExponentMatrix) -> Result<ConvexityVerdict> {
    let n = flag.rank();
    check_shape(e, n)?;
    let xe = Element::lattice(x);
    let r: Vec<RealConstant> = (0..n)
        .map(|j| {
            let mut ej = vec![0; n];
            ej[j] = 1;
            stable_exact(flag, &xe, &Element::lattice(&ej))
        })
        .collect::<Result<_>>()
        .map_err(|err| match err {
            Error::NotCofinal(m) => Error::NotCofinal(format!("{m}; use structural_convexity instead")),
            other => other,
        })?;
    let row_gcds: Vec<i64> = e.rows().iter().map(|row| row_gcd(row)).collect();
    let pairings: Vec<RealConstant> = e.rows().iter().map(|row| RealConstant::int_combination(&r, row)).collect();
    let rank = q_rank(&r);
    let expected = n - e.k();
    let outcome = if let Some(i) = row_gcds.iter().position(|&g| g != 1) {
        Outcome::NotConvex { failed: 1, witness: format!("row {} has gcd {}", i + 1, row_gcds[i]) }
    } else if let Some(i) = pairings.iter().position(|p| !p.is_zero()) {
        Outcome::NotConvex { failed: 2, witness: format!("row {} pairs to {} ≠ 0", i + 1, pairings[i]) }
    } else if rank != expected {
        Outcome::NotConvex { failed: 3, witness: format!("q-rank {rank} ≠ n − k = {expected}") }
    } else {
        Outcome::Convex
    };
    Ok(ConvexityVerdict { outcome, row_gcds, stable_values: r, pairings, q_rank: rank, expected_q_rank: expected })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralVerdict {
    pub convex: bool,
    /// `j` with `B = K_j`, the common kernel of the first `j` levels.
    pub level: Option<usize>,
    pub kernel_ranks: Vec<usize>,
}

/// Exact convexity for flag orderings, anchor-free: the convex subgroups are
/// precisely the level kernels `K_j`.
pub fn structural_convexity(flag: &FlagOrdering, e: &ExponentMatrix) -> Result<StructuralVerdict> {
    if e.n() != flag.rank() {
        return Err(Error::InvalidInput(format!("exponent rows must have length {}", flag.rank())));
    }
    let b = e.lattice();
    let kernels = flag.level_kernels();
    let level = kernels.iter().position(|k| k.rank() == b.rank() && k.contains_lattice(&b) && b.contains_lattice(k));
    Ok(StructuralVerdict { convex: level.is_some(), level, kernel_ranks: kernels.iter().map(IntLattice::rank).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    Holds,
    Fails,
    Undecided,
}

/// Condition (2) for an arbitrary cone using certified stable values from
/// `iterations` steps: exact sums are never certified from intervals, so the
/// answer is `Fails` or `Undecided` unless `ctx` is a flag.
pub fn condition2_certified(ctx: &RhoContext, a_gens: &[Element], e: &ExponentMatrix, iterations: u64) -> Result<Vec<Tri>> {
    if e.n() != a_gens.len() {
        return Err(Error::InvalidInput("exponent rows must match the generators of A".into()));
    }
    if let Some(f) = ctx.cone.as_flag() {
        let r: Vec<RealConstant> = a_gens.iter().map(|g| stable_exact(f, &ctx.x, g)).collect::<Result<_>>()?;
        return Ok(e
            .rows()
            .iter()
            .map(|row| if RealConstant::int_combination(&r, row).is_zero() { Tri::Holds } else { Tri::Fails })
            .collect());
    }
    let vals = a_gens.iter().map(|g| stable_approx(ctx, g, iterations)).collect::<Result<Vec<_>>>()?;
    Ok(e.rows()
        .iter()
        .map(|row| {
            let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
            for (v, &c) in vals.iter().zip(row) {
                let (a, b) = (&v.lower * rat_int(c), &v.upper * rat_int(c));
                let (a, b) = if c < 0 { (b, a) } else { (a, b) };
                lo += a;
                hi += b;
            }
            if lo.is_positive() || hi.is_negative() {
                Tri::Fails
            } else {
                Tri::Undecided
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum BruteOutcome {
    NoViolationInBall { radius: i64 },
    Violation { b: Element, a: Element, a_prime: Element, radius: i64 },
}

impl BruteOutcome {
    pub fn is_violation(&self) -> bool {
        matches!(self, BruteOutcome::Violation { .. })
    }
}

fn exponent_box(n: usize, radius: i64) -> Vec<Vec<i64>> {
    crate::groups::abelian_ball(n, radius).into_iter().map(|l| l.coords().to_vec()).collect()
}

/// Searches the exponent box `{x_1^{c_1}⋯x_n^{c_n} : |c_j| ≤ R}` of the
/// (pairwise commuting) generators `a_gens` for an element outside `B` lying
/// strictly between two elements of `B` in the box.
pub fn brute_convex(p: &Cone, a_gens: &[Element], e: &ExponentMatrix, radius: i64) -> Result<BruteOutcome> {
    if radius < 1 {
        return Err(Error::InvalidInput("ball radius must be at least 1".into()));
    }
    if e.n() != a_gens.len() {
        return Err(Error::InvalidInput("exponent rows must match the generators of A".into()));
    }
    for (i, a) in a_gens.iter().enumerate() {
        for b in &a_gens[i + 1..] {
            let comm = a.inverse().multiply(&b.inverse())?.multiply(a)?.multiply(b)?;
            if p.sign(&comm)? != Sign::Zero {
                return Err(Error::InvalidInput(format!("generators {a} and {b} do not commute")));
            }
        }
    }
    let realize = |c: &[i64]| -> Result<Element> {
        let mut g = p.group().identity();
        for (a, &k) in a_gens.iter().zip(c) {
            g = g.multiply(&a.power(k)?)?;
        }
        Ok(g)
    };
    let lat = e.lattice();
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for c in exponent_box(a_gens.len(), radius) {
        if lat.contains_i64(&c) {
            inside.push(realize(&c)?);
        } else {
            outside.push(realize(&c)?);
        }
    }
    let (mut lo, mut hi) = (inside[0].clone(), inside[0].clone());
    for g in &inside[1..] {
        if p.compare(g, &lo)?.is_lt() {
            lo = g.clone();
        }
        if p.compare(g, &hi)?.is_gt() {
            hi = g.clone();
        }
    }
    for g in outside {
        if p.compare(&lo, &g)?.is_lt() && p.compare(&g, &hi)?.is_lt() {
            return Ok(BruteOutcome::Violation { b: g, a: lo, a_prime: hi, radius });
        }
    }
    Ok(BruteOutcome::NoViolationInBall { radius })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestingReport {
    /// `(i, j, relation)` with relation one of `"equal"`, `"subset"` (i ⊂ j),
    /// `"superset"`, `"incomparable"`.
    pub pairs: Vec<(usize, usize, &'static str)>,
    pub passed: bool,
}

/// Pairwise containment of subgroups that should all be convex for one
/// ordering; convex subgroups form a chain.
pub fn nesting_check(subgroups: &[ExponentMatrix]) -> NestingReport {
    let lats: Vec<IntLattice> = subgroups.iter().map(ExponentMatrix::lattice).collect();
    let mut pairs = Vec::new();
    let mut passed = true;
    for i in 0..lats.len() {
        for j in i + 1..lats.len() {
            let (a, b) = (&lats[i], &lats[j]);
            let rel = match (b.contains_lattice(a), a.contains_lattice(b)) {
                (true, true) => "equal",
                (true, false) => "subset",
                (false, true) => "superset",
                (false, false) => {
                    passed = false;
                    "incomparable"
                }
            };
            pairs.push((i, j, rel));
        }
    }
    NestingReport { pairs, passed }
}

/// One word expression `x_{i_1}^{j_1} ⋯ x_{i_n}^{j_n}` of a fixed element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordExpr {
    pub text: String,
    pub syllables: usize,
    /// Exponent sum `e_q` per generator name.
    pub exponents: BTreeMap<String, i64>,
}

impl WordExpr {
    /// Tokens `name` or `name^k`, names being ASCII identifiers.
    pub fn parse(text: &str) -> Result<WordExpr> {
        let mut exponents = BTreeMap::new();
        let mut syllables = 0;
        for tok in text.split_whitespace() {
            let (name, k) = match tok.split_once('^') {
                Some((n, k)) => {
                    let k = k.strip_prefix('+').unwrap_or(k);
                    (n, k.parse::<i64>().map_err(|_| Error::Parse(format!("malformed exponent in {tok:?}")))?)
                }
                None => (tok, 1),
            };
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || name.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(Error::Parse(format!("malformed generator name in {tok:?}")));
            }
            syllables += 1;
            *exponents.entry(name.to_string()).or_insert(0) += k;
        }
        Ok(WordExpr { text: text.trim().to_string(), syllables, exponents })
    }

    /// The element the expression denotes under an assignment of generators.
    pub fn evaluate(&self, assignment: &BTreeMap<String, Element>, identity: &Element) -> Result<Element> {
        let mut g = identity.clone();
        for tok in self.text.split_whitespace() {
            let (name, k) = match tok.split_once('^') {
                Some((n, k)) => (n, k.strip_prefix('+').unwrap_or(k).parse::<i64>().unwrap()),
                None => (tok, 1),
            };
            let a = assignment
                .get(name)
                .ok_or_else(|| Error::InvalidInput(format!("generator {name} is not assigned")))?;
            g = g.multiply(&a.power(k)?)?;
        }
        Ok(g)
    }
}

/// Linear constraint `|constant + Σ coefficients·t| ≤ bound` on the unpinned
/// stable values (`bound = 0` in the tight form).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearConstraint {
    pub expression: String,
    pub coefficients: BTreeMap<String, i64>,
    #[serde(with = "rational_str")]
    pub constant: Rational,
    pub bound: i64,
    /// Solution interval when exactly one unknown occurs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum ConstraintOutcome {
    /// Feasible; bounds of each unknown over the feasible set.
    Feasible { constraints: Vec<LinearConstraint>, bounds: BTreeMap<String, [Option<String>; 2]> },
    /// The listed constraints (indices) have no common solution.
    Infeasible { constraints: Vec<LinearConstraint>, witness: Vec<usize> },
}

impl ConstraintOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, ConstraintOutcome::Feasible { .. })
    }
}

/// `Σ a_q t_q ≤ b`, remembering which constraints it came from.
#[derive(Debug, Clone)]
struct Ineq {
    a: Vec<Rational>,
    b: Rational,
    origin: BTreeSet<usize>,
}

/// Fourier–Motzkin elimination of variable `v`.
fn eliminate(ineqs: Vec<Ineq>, v: usize) -> Vec<Ineq> {
    let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for q in ineqs {
        if q.a[v].is_positive() {
            pos.push(q);
        } else if q.a[v].is_negative() {
            neg.push(q);
        } else {
            rest.push(q);
        }
    }
    for p in &pos {
        for q in &neg {
            let (sp, sq) = (-q.a[v].clone(), p.a[v].clone());
            let a: Vec<Rational> = p.a.iter().zip(&q.a).map(|(x, y)| x * &sp + y * &sq).collect();
            let b = &p.b * &sp + &q.b * &sq;
            rest.push(Ineq { a, b, origin: p.origin.union(&q.origin).copied().collect() });
        }
    }
    rest
}

fn first_contradiction(ineqs: &[Ineq]) -> Option<BTreeSet<usize>> {
    ineqs
        .iter()
        .filter(|q| q.a.iter().all(Zero::is_zero) && q.b.is_negative())
        .min_by_key(|q| q.origin.len())
        .map(|q| q.origin.clone())
}

/// Necessary conditions on stable values for `⟨w⟩` to be convex: each word
/// expression of `w` gives `|Σ e_q ρ̄(x_q)| ≤ n` (`n` syllables), or `= 0`
/// when `tight` (abelian ambient group). `pinned` fixes known stable values.
pub fn word_constraints(
    expressions: &[WordExpr],
    pinned: &BTreeMap<String, Rational>,
    tight: bool,
) -> Result<ConstraintOutcome> {
    if expressions.is_empty() {
        return Err(Error::InvalidInput("at least one expression is required".into()));
    }
    let unknowns: Vec<String> = expressions
        .iter()
        .flat_map(|e| e.exponents.keys().cloned())
        .filter(|k| !pinned.contains_key(k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut constraints = Vec::new();
    let mut ineqs = Vec::new();
    for (idx, e) in expressions.iter().enumerate() {
        let mut constant = Rational::zero();
        let mut coefficients = BTreeMap::new();
        for (name, &k) in &e.exponents {
            if let Some(v) = pinned.get(name) {
                constant += v * rat_int(k);
            } else if k != 0 {
                coefficients.insert(name.clone(), k);
            }
        }
        let bound = if tight { 0 } else { e.syllables as i64 };
        let a: Vec<Rational> = unknowns.iter().map(|u| rat_int(*coefficients.get(u).unwrap_or(&0))).collect();
        // c + a·t ≤ bound and −c − a·t ≤ bound
        ineqs.push(Ineq { a: a.clone(), b: rat_int(bound) - &constant, origin: BTreeSet::from([idx]) });
        ineqs.push(Ineq { a: a.iter().map(|x| -x).collect(), b: rat_int(bound) + &constant, origin: BTreeSet::from([idx]) });
        let interval = if coefficients.len() == 1 {
            let k = rat_int(*coefficients.values().next().unwrap());
            let lo = (rat_int(-bound) - &constant) / &k;
            let hi = (rat_int(bound) - &constant) / &k;
            let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
            Some([format_rational(&lo), format_rational(&hi)])
        } else {
            None
        };
        constraints.push(LinearConstraint { expression: e.text.clone(), coefficients, constant, bound, interval });
    }
    let mut all = ineqs.clone();
    for v in 0..unknowns.len() {
        all = eliminate(all, v);
    }
    if let Some(origin) = first_contradiction(&all) {
        return Ok(ConstraintOutcome::Infeasible { constraints, witness: origin.into_iter().collect() });
    }
    let mut bounds = BTreeMap::new();
    for (v, name) in unknowns.iter().enumerate() {
        let mut sys = ineqs.clone();
        for w in 0..unknowns.len() {
            if w != v {
                sys = eliminate(sys, w);
            }
        }
        let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
        for q in &sys {
            let c = &q.a[v];
            if c.is_positive() {
                let h = &q.b / c;
                hi = Some(hi.map_or(h.clone(), |x| x.min(h)));
            } else if c.is_negative() {
                let l = &q.b / c;
                lo = Some(lo.map_or(l.clone(), |x| x.max(l)));
            }
        }
        bounds.insert(name.clone(), [lo.as_ref().map(format_rational), hi.as_ref().map(format_rational)]);
    }
    Ok(ConstraintOutcome::Feasible { constraints, bounds })
}

/// Parses `name=p/q` pins.
pub fn parse_pin(text: &str) -> Result<(String, Rational)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("pin {text:?} must look like name=value")))?;
    Ok((name.trim().to_string(), parse_rational(value)?))
}

/// Maps rows of exponents to subgroup generators of `ℤⁿ`.
pub fn exponent_rows_as_elements(e: &ExponentMatrix) -> Vec<Element> {
    e.rows().iter().map(|r| Element::lattice(r)).collect()
}
