//! Cohomological invariants of an ordering: the tuple of stable values of a
//! homology basis, reduced mod 1 (`psi`) or not (`psi_tilde`), orderings with
//! prescribed stable values, and coordinates on the space of orderings of ℤ².

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactreal::{q_rank, rational_str, RealConstant, Rational, Sign};
use crate::groups::Element;
use crate::linalg::{column_echelon, integer_row, rational_inverse, solve_rational, IntLattice};
use crate::orderings::{expansion_rows, is_cofinal, is_right_x_invariant, Decision, FlagOrdering};
use crate::quasimorph::{stable_approx, stable_exact, RhoContext};

/// Word length bound for the right-invariance search run before `psi`.
pub const INVARIANCE_SEARCH_LEN: usize = 4;
/// Exponent bound for the cofinality search run before `psi`.
pub const COFINAL_SEARCH_CAP: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Component {
    Exact {
        exact: RealConstant,
    },
    Interval {
        #[serde(with = "rational_str")]
        lower: Rational,
        #[serde(with = "rational_str")]
        upper: Rational,
    },
}

impl Component {
    pub fn as_exact(&self) -> Option<&RealConstant> {
        match self {
            Component::Exact { exact } => Some(exact),
            Component::Interval { .. } => None,
        }
    }

    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            Component::Exact { exact } => exact.enclosure(64),
            Component::Interval { lower, upper } => (lower.clone(), upper.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiValue {
    pub basis: Vec<Element>,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum PsiTildeValue {
    Finite { basis: Vec<Element>, components: Vec<Component> },
    Infinity { value: &'static str },
}

impl PsiTildeValue {
    pub fn infinity() -> PsiTildeValue {
        PsiTildeValue::Infinity { value: "inf" }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PsiTildeValue::Infinity { .. })
    }

    pub fn components(&self) -> Option<&[Component]> {
        match self {
            PsiTildeValue::Finite { components, .. } => Some(components),
            PsiTildeValue::Infinity { .. } => None,
        }
    }
}

/// Checks that `basis` projects to a basis of the free part of the
/// abelianization of the ambient group: ℤ-independent vectors for ℤⁿ, one
/// element of exponent sum ±1 for braid groups.
fn check_basis(ctx: &RhoContext, basis: &[Element]) -> Result<()> {
    let group = ctx.cone.group();
    for b in basis {
        if b.group() != group {
            return Err(Error::MixedGroups(b.group().to_string(), group.to_string()));
        }
    }
    if group.is_abelian() {
        let rows: Vec<Vec<Rational>> = basis
            .iter()
            .map(|b| b.as_lattice().unwrap().coords().iter().map(|&c| Rational::from_integer(c.into())).collect())
            .collect();
        if crate::linalg::rational_rank(&rows) < basis.len() {
            return Err(Error::InvalidInput("basis elements are linearly dependent".into()));
        }
    } else if basis.len() != 1 || basis[0].as_braid().unwrap().exponent_sum().abs() != 1 {
        return Err(Error::InvalidInput("braid homology basis must be one element of exponent sum ±1".into()));
    }
    Ok(())
}

/// Default homology basis: the standard basis of ℤⁿ, or `σ_1` for braids.
pub fn default_basis(ctx: &RhoContext) -> Vec<Element> {
    let gens = ctx.cone.group().generators();
    if ctx.cone.group().is_abelian() {
        gens
    } else {
        gens.into_iter().take(1).collect()
    }
}

fn require_invariant(ctx: &RhoContext) -> Result<()> {
    match is_right_x_invariant(&ctx.cone, &ctx.x, &ctx.gens, INVARIANCE_SEARCH_LEN)? {
        Decision::Yes => Ok(()),
        Decision::No { witness } => Err(Error::NotInvariant(format!(
            "comparison with {} changes under right multiplication by {}",
            witness.map(|w| w.to_string()).unwrap_or_default(),
            ctx.x
        ))),
        Decision::UnknownWithinCap => Err(Error::MembershipUnknown("right invariance under the anchor".into())),
    }
}

fn unreduced(ctx: &RhoContext, basis: &[Element], n: u64) -> Result<Vec<Component>> {
    basis
        .iter()
        .map(|b| match ctx.cone.as_flag() {
            Some(f) => stable_exact(f, &ctx.x, b).map(|exact| Component::Exact { exact }),
            None => stable_approx(ctx, b, n).map(|v| Component::Interval { lower: v.lower, upper: v.upper }),
        })
        .collect()
}

fn reduce_mod_one(c: Component) -> Result<Component> {
    match c {
        Component::Exact { exact } => Ok(Component::Exact { exact: exact.fract() }),
        Component::Interval { lower, upper } => {
            let fl = lower.floor();
            if upper >= &fl + Rational::one() {
                return Err(Error::IntervalUndecided(format!(
                    "[{}, {}] contains an integer in its interior or upper end",
                    crate::exactreal::format_rational(&lower),
                    crate::exactreal::format_rational(&upper)
                )));
            }
            Ok(Component::Interval { lower: &lower - &fl, upper: &upper - &fl })
        }
    }
}

/// Stable values of `basis` reduced mod 1. Braid values are certified
/// intervals from `n` iterations.
pub fn psi(ctx: &RhoContext, basis: &[Element], n: u64) -> Result<PsiValue> {
    check_basis(ctx, basis)?;
    require_invariant(ctx)?;
    match is_cofinal(&ctx.cone, &ctx.x, &ctx.gens, COFINAL_SEARCH_CAP)? {
        Decision::Yes => {}
        Decision::No { witness } => {
            return Err(Error::NotCofinal(format!(
                "{} does not bracket {}",
                ctx.x,
                witness.map(|w| w.to_string()).unwrap_or_default()
            )))
        }
        Decision::UnknownWithinCap => return Err(Error::MembershipUnknown("cofinality of the anchor".into())),
    }
    let components = unreduced(ctx, basis, n)?.into_iter().map(reduce_mod_one).collect::<Result<_>>()?;
    Ok(PsiValue { basis: basis.to_vec(), components })
}

/// Unreduced stable values, or `∞` exactly when the anchor is not cofinal.
pub fn psi_tilde(ctx: &RhoContext, basis: &[Element], n: u64) -> Result<PsiTildeValue> {
    check_basis(ctx, basis)?;
    require_invariant(ctx)?;
    match is_cofinal(&ctx.cone, &ctx.x, &ctx.gens, COFINAL_SEARCH_CAP)? {
        Decision::Yes => Ok(PsiTildeValue::Finite { basis: basis.to_vec(), components: unreduced(ctx, basis, n)? }),
        Decision::No { .. } => Ok(PsiTildeValue::infinity()),
        Decision::UnknownWithinCap => Err(Error::MembershipUnknown("cofinality of the anchor".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaturalityReport {
    pub subgroup_basis: Vec<Element>,
    /// Values pulled back from the ambient group through the basis.
    pub pulled_back: Vec<RealConstant>,
    /// Values computed in the restricted ordering.
    pub restricted: Vec<RealConstant>,
    pub passed: bool,
}

fn to_rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&c| Rational::from_integer(c.into())).collect()
}

fn to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|c| c.to_i64().ok_or_else(|| Error::InvalidInput("coordinate does not fit in i64".into())))
        .collect()
}

fn bigints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

/// Compares two routes to the invariant of a sublattice `K ≤ H ≤ ℤⁿ`: the
/// ambient values on `h_basis` pulled back along `K → H`, against the stable
/// values of the ordering restricted to `⟨K, x⟩`. Both mod 1.
pub fn naturality_check(
    flag: &FlagOrdering,
    x: &[i64],
    h_basis: &[Vec<i64>],
    k_basis: &[Vec<i64>],
) -> Result<NaturalityReport> {
    let n = flag.rank();
    let xe = Element::lattice(x);
    let h_vals: Vec<RealConstant> =
        h_basis.iter().map(|h| stable_exact(flag, &xe, &Element::lattice(h))).collect::<Result<_>>()?;
    let h_cols: Vec<Vec<Rational>> = h_basis.iter().map(|h| to_rational_vec(h)).collect();
    let mut gens: Vec<Vec<BigInt>> = k_basis.iter().map(|k| bigints(k)).collect();
    gens.push(bigints(x));
    let span = IntLattice::from_generators(n, &gens);
    let span_basis: Vec<Vec<i64>> = span.basis().iter().map(|r| to_i64(r)).collect::<Result<_>>()?;
    let restricted_flag = flag.restrict(&span_basis)?;
    let x_local = to_i64(&span.coordinates(&bigints(x)).expect("x generates"))?;
    let mut pulled_back = Vec::new();
    let mut restricted = Vec::new();
    for k in k_basis {
        let c = solve_rational(&h_cols, &to_rational_vec(k))
            .ok_or_else(|| Error::InvalidInput(format!("{k:?} is not in the span of H")))?;
        if c.iter().any(|q| !q.is_integer()) {
            return Err(Error::InvalidInput(format!("{k:?} is not in the lattice H")));
        }
        let mut v = RealConstant::zero();
        for (q, hv) in c.iter().zip(&h_vals) {
            v = &v + &hv.scale(q);
        }
        pulled_back.push(v.fract());
        let k_local = to_i64(&span.coordinates(&bigints(k)).expect("k generates"))?;
        restricted.push(stable_exact(&restricted_flag, &Element::lattice(&x_local), &Element::lattice(&k_local))?.fract());
    }
    let passed = pulled_back == restricted;
    Ok(NaturalityReport {
        subgroup_basis: k_basis.iter().map(|k| Element::lattice(k)).collect(),
        pulled_back,
        restricted,
        passed,
    })
}

/// `Σ r_i x_i = 1`.
pub fn image_membership(r: &[RealConstant], x: &[i64]) -> bool {
    r.len() == x.len() && RealConstant::int_combination(r, x) == RealConstant::one()
}

/// Flag ordering of ℤⁿ whose first level is `r` (so `ρ̄(e_i) = r_i` for the
/// anchor `x`) with the kernel of `r` ordered by `tiebreak` in coordinates of
/// a completed kernel basis (lexicographic by default).
pub fn construct_from_tau(r: &[RealConstant], x: &[i64], tiebreak: Option<&FlagOrdering>) -> Result<FlagOrdering> {
    let n = r.len();
    if n == 0 || x.len() != n {
        return Err(Error::InvalidInput("tau and anchor must have the same positive length".into()));
    }
    let value = RealConstant::int_combination(r, x);
    if value != RealConstant::one() {
        return Err(Error::TauNotNormalized(value.to_string()));
    }
    let rows: Vec<Vec<BigInt>> = expansion_rows(r).iter().map(|row| integer_row(row)).collect();
    let (rank, u) = column_echelon(&rows, n);
    let k = n - rank;
    let mut levels = vec![r.to_vec()];
    if k > 0 {
        let ur: Vec<Vec<Rational>> =
            u.iter().map(|row| row.iter().map(|c| Rational::from_integer(c.clone())).collect()).collect();
        let inv = rational_inverse(&ur).expect("unimodular");
        // rows of u⁻¹ read coordinates along the kernel columns of u
        let coord_rows = &inv[rank..];
        let lex = FlagOrdering::lex(k);
        let tb = tiebreak.unwrap_or(&lex);
        if tb.rank() != k {
            return Err(Error::InvalidInput(format!("tie-break ordering must have rank {k}, the kernel rank")));
        }
        for w in tb.levels() {
            let mut level = vec![RealConstant::zero(); n];
            for (wt, row) in w.iter().zip(coord_rows) {
                for (l, c) in level.iter_mut().zip(row) {
                    *l = &*l + &wt.scale(c);
                }
            }
            levels.push(level);
        }
    }
    FlagOrdering::new(levels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SikoraPoint {
    /// Direction `(p, q)` primitive, `v₁` a positive multiple of it; the side
    /// is the sign of `(−q, p)`, which spans the kernel of `v₁`.
    Rational { p: i64, q: i64, side: Side },
    /// `v₁` divided by the absolute value of its first nonzero rational
    /// coefficient.
    Irrational { direction: [RealConstant; 2] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Slope {
    Finite(RealConstant),
    /// `p = 0`, a vertical direction.
    Infinite(&'static str),
    /// Irrational direction with irrational first entry; the slope leaves the
    /// constant field.
    Unavailable(&'static str),
}

pub fn sikora_coordinate(flag: &FlagOrdering) -> Result<SikoraPoint> {
    if flag.rank() != 2 {
        return Err(Error::InvalidInput("Sikora coordinates are defined on orderings of ℤ²".into()));
    }
    let v = &flag.levels()[0];
    let (a, b) = (&v[0], &v[1]);
    if q_rank(v) <= 1 {
        let (p, q) = if a.is_zero() {
            (0, if b.sign() == Sign::Positive { 1 } else { -1 })
        } else {
            let m = a.keys().next().unwrap();
            let ratio = b.coefficient(m) / a.coefficient(m);
            let s = if a.sign() == Sign::Positive { BigInt::one() } else { -BigInt::one() };
            let (pp, qq) = (ratio.denom() * &s, ratio.numer() * &s);
            let g = pp.gcd(&qq);
            let conv = |z: BigInt| z.to_i64().ok_or_else(|| Error::InvalidInput("direction overflows i64".into()));
            (conv(&pp / &g)?, conv(&qq / &g)?)
        };
        let side = match flag.sign_coords(&[-q, p]) {
            Sign::Positive => Side::Plus,
            _ => Side::Minus,
        };
        return Ok(SikoraPoint::Rational { p, q, side });
    }
    let lead = if !a.is_zero() { a } else { b };
    let m = lead.keys().next().unwrap();
    let scale = lead.coefficient(m).abs();
    Ok(SikoraPoint::Irrational { direction: [a.div_by_rational(&scale)?, b.div_by_rational(&scale)?] })
}

impl SikoraPoint {
    /// `π₂`: `q/p`, or `b/a` for an irrational direction `(a, b)`.
    pub fn slope(&self) -> Slope {
        match self {
            SikoraPoint::Rational { p: 0, .. } => Slope::Infinite("inf"),
            SikoraPoint::Rational { p, q, .. } => {
                Slope::Finite(RealConstant::rational(Rational::new((*q).into(), (*p).into())))
            }
            SikoraPoint::Irrational { direction: [a, b] } => match a.as_rational() {
                Some(ar) if !ar.is_zero() => Slope::Finite(b.div_by_rational(&ar).expect("nonzero")),
                _ => Slope::Unavailable("irrational first coordinate"),
            },
        }
    }
}
