//! Positive-cone oracles for left orderings.
//!
//! A [`Cone`] is a total sign function on a group. Two concrete families are
//! provided, flag orderings of ℤⁿ and the Dehornoy ordering of B_n, closed
//! under conjugation.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactreal::{RealConstant, Rational, Sign};
use crate::groups::{random_element, BraidWord, Element, GroupRef};
use crate::linalg::{integer_kernel, integer_row, rational_rank, IntLattice};

pub const DEFAULT_HANDLE_CAP: usize = 1_000_000;

/// Ordering of ℤⁿ comparing pairings against a flag of real vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagOrdering {
    rank: usize,
    levels: Vec<Vec<RealConstant>>,
}

/// Rational rows of a real vector, one per occurring squarefree key.
pub fn expansion_rows(level: &[RealConstant]) -> Vec<Vec<Rational>> {
    let mut keys: Vec<u64> = level.iter().flat_map(|c| c.keys()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter().map(|&m| level.iter().map(|c| c.coefficient(m)).collect()).collect()
}

fn lattice_coords(g: &Element, rank: usize) -> Result<&[i64]> {
    match g {
        Element::Lattice(l) if l.rank() == rank => Ok(l.coords()),
        _ => Err(Error::MixedGroups(g.group().to_string(), GroupRef::FreeAbelian { rank }.to_string())),
    }
}

impl FlagOrdering {
    /// Validates shape and the totality condition.
    pub fn new(levels: Vec<Vec<RealConstant>>) -> Result<FlagOrdering> {
        let flag = FlagOrdering::new_unchecked(levels)?;
        if !flag.is_total() {
            return Err(Error::RankDeficient(format!(
                "flag levels do not separate ℤ^{}; stacked expansion has rank < {}",
                flag.rank, flag.rank
            )));
        }
        Ok(flag)
    }

    /// Shape check only. Non-total flags break LO2; useful for testing the
    /// axiom checker.
    pub fn new_unchecked(levels: Vec<Vec<RealConstant>>) -> Result<FlagOrdering> {
        let rank = levels.first().map_or(0, Vec::len);
        if rank == 0 {
            return Err(Error::InvalidInput("a flag needs at least one nonempty level".into()));
        }
        if levels.iter().any(|l| l.len() != rank) {
            return Err(Error::InvalidInput("flag levels have different lengths".into()));
        }
        Ok(FlagOrdering { rank, levels })
    }

    pub fn from_integers(levels: &[Vec<i64>]) -> Result<FlagOrdering> {
        FlagOrdering::new(levels.iter().map(|l| l.iter().map(|&c| RealConstant::integer(c)).collect()).collect())
    }

    pub fn lex(rank: usize) -> FlagOrdering {
        let levels = (0..rank)
            .map(|i| (0..rank).map(|j| RealConstant::integer((i == j) as i64)).collect())
            .collect();
        FlagOrdering { rank, levels }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group(&self) -> GroupRef {
        GroupRef::FreeAbelian { rank: self.rank }
    }

    pub fn levels(&self) -> &[Vec<RealConstant>] {
        &self.levels
    }

    pub fn is_total(&self) -> bool {
        let rows: Vec<Vec<Rational>> = self.levels.iter().flat_map(|l| expansion_rows(l)).collect();
        rational_rank(&rows) == self.rank
    }

    pub fn pairing(&self, level: usize, coords: &[i64]) -> RealConstant {
        RealConstant::int_combination(&self.levels[level], coords)
    }

    /// First level with nonzero pairing and its value.
    pub fn first_nonzero(&self, coords: &[i64]) -> Option<(usize, RealConstant)> {
        (0..self.levels.len()).find_map(|j| {
            let p = self.pairing(j, coords);
            (!p.is_zero()).then_some((j, p))
        })
    }

    pub fn sign_coords(&self, coords: &[i64]) -> Sign {
        self.first_nonzero(coords).map_or(Sign::Zero, |(_, p)| p.sign())
    }

    pub fn sign(&self, g: &Element) -> Result<Sign> {
        Ok(self.sign_coords(lattice_coords(g, self.rank)?))
    }

    /// `K_0 = ℤⁿ ⊇ K_1 ⊇ …`, where `K_j` is the common integer kernel of the
    /// first `j` levels.
    pub fn level_kernels(&self) -> Vec<IntLattice> {
        let n = self.rank;
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        let identity: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
        let mut out = vec![IntLattice::from_generators(n, &identity)];
        for level in &self.levels {
            rows.extend(expansion_rows(level).iter().map(|r| integer_row(r)));
            out.push(IntLattice::from_generators(n, &integer_kernel(&rows, n)));
        }
        out
    }

    /// Copy with the first level divided by `|⟨v₁,x⟩|`, which must be a
    /// nonzero rational. Same ordering.
    pub fn normalized(&self, x: &[i64]) -> Result<FlagOrdering> {
        let p = self.pairing(0, x);
        if p.is_zero() {
            return Err(Error::NotCofinal("first level vanishes on the anchor".into()));
        }
        let q = p.as_rational().ok_or_else(|| Error::IrrationalAnchorPairing(p.to_string()))?;
        let q = if q < Rational::zero() { -q } else { q };
        let mut levels = self.levels.clone();
        levels[0] = levels[0].iter().map(|c| c.div_by_rational(&q)).collect::<Result<_>>()?;
        Ok(FlagOrdering { rank: self.rank, levels })
    }

    /// Induced ordering on the sublattice spanned by `basis` (each entry a
    /// vector of ℤⁿ), as an ordering of ℤᵐ in those coordinates.
    pub fn restrict(&self, basis: &[Vec<i64>]) -> Result<FlagOrdering> {
        if basis.is_empty() || basis.iter().any(|b| b.len() != self.rank) {
            return Err(Error::InvalidInput(format!("sublattice basis vectors must have length {}", self.rank)));
        }
        let rows: Vec<Vec<Rational>> =
            basis.iter().map(|b| b.iter().map(|&c| Rational::from_integer(c.into())).collect()).collect();
        if rational_rank(&rows) < basis.len() {
            return Err(Error::RankDeficient("sublattice basis is linearly dependent".into()));
        }
        let levels: Vec<Vec<RealConstant>> = self
            .levels
            .iter()
            .map(|v| basis.iter().map(|b| RealConstant::int_combination(v, b)).collect::<Vec<_>>())
            .filter(|w| w.iter().any(|c| !c.is_zero()))
            .collect();
        FlagOrdering::new(levels)
    }
}

/// Dehornoy ordering of B_n: a braid is positive when it has a word in which
/// the lowest-index generator occurs only with positive exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DehornoyOrdering {
    pub strands: usize,
    pub step_cap: usize,
}

impl DehornoyOrdering {
    pub fn new(strands: usize) -> DehornoyOrdering {
        DehornoyOrdering { strands, step_cap: DEFAULT_HANDLE_CAP }
    }

    pub fn sign(&self, g: &Element) -> Result<Sign> {
        match g {
            Element::Braid(b) if b.strands() == self.strands => dehornoy_sign(b, self.step_cap),
            _ => Err(Error::MixedGroups(g.group().to_string(), format!("B_{}", self.strands))),
        }
    }
}

fn free_reduce(word: &mut Vec<i32>) {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &l in word.iter() {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    *word = out;
}

/// Position `(p, q)` of the handle with leftmost right end, if any.
fn find_handle(w: &[i32], n: usize, from: usize) -> Option<(usize, usize)> {
    // last[k]: latest position < j holding a letter of index k
    let mut last = vec![usize::MAX; n];
    for (j, &l) in w.iter().enumerate() {
        let i = l.unsigned_abs() as usize;
        if j >= from {
            let mut best: Option<(usize, usize)> = None;
            for (k, &pos) in last.iter().enumerate().take(i + 1).skip(1) {
                if pos != usize::MAX && best.is_none_or(|(b, _)| pos > b) {
                    best = Some((pos, k));
                }
            }
            if let Some((p, k)) = best {
                if k == i && w[p] == -l {
                    return Some((p, j));
                }
            }
        }
        last[i] = j;
    }
    None
}

/// Rewrites a word into an equivalent word without handles.
pub fn handle_reduce(word: &BraidWord, cap: usize) -> Result<Vec<i32>> {
    let n = word.strands();
    let mut w = word.letters().to_vec();
    let mut start = 0;
    let mut steps = 0;
    while let Some((p, q)) = find_handle(&w, n, start) {
        steps += 1;
        if steps > cap {
            return Err(Error::HandleReductionCap(cap));
        }
        let e = w[p].signum();
        let i = w[p].abs();
        let mut middle = Vec::with_capacity(3 * (q - p));
        for &l in &w[p + 1..q] {
            if l.abs() == i + 1 {
                middle.extend([-e * (i + 1), l.signum() * i, e * (i + 1)]);
            } else {
                middle.push(l);
            }
        }
        let mut next = Vec::with_capacity(w.len() + middle.len());
        next.extend_from_slice(&w[..p]);
        next.extend(middle);
        next.extend_from_slice(&w[q + 1..]);
        free_reduce(&mut next);
        // no handle ends inside the prefix shared with the previous word
        start = w.iter().zip(&next).take(p).take_while(|(a, b)| a == b).count();
        w = next;
    }
    Ok(w)
}

pub fn dehornoy_sign(word: &BraidWord, cap: usize) -> Result<Sign> {
    let w = handle_reduce(word, cap)?;
    let Some(&first) = w.iter().min_by_key(|l| l.abs()) else {
        return Ok(Sign::Zero);
    };
    Ok(if first > 0 { Sign::Positive } else { Sign::Negative })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugatedOrdering {
    pub base: Box<Cone>,
    pub by: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cone {
    Flag(FlagOrdering),
    Dehornoy(DehornoyOrdering),
    Conjugated(ConjugatedOrdering),
}

impl From<FlagOrdering> for Cone {
    fn from(f: FlagOrdering) -> Cone {
        Cone::Flag(f)
    }
}

impl Cone {
    pub fn dehornoy(strands: usize) -> Cone {
        Cone::Dehornoy(DehornoyOrdering::new(strands))
    }

    pub fn group(&self) -> GroupRef {
        match self {
            Cone::Flag(f) => f.group(),
            Cone::Dehornoy(d) => GroupRef::Braid { strands: d.strands },
            Cone::Conjugated(c) => c.base.group(),
        }
    }

    /// The flag behind this cone, looking through conjugations (trivial in
    /// abelian groups).
    pub fn as_flag(&self) -> Option<&FlagOrdering> {
        match self {
            Cone::Flag(f) => Some(f),
            Cone::Conjugated(c) => c.base.as_flag(),
            Cone::Dehornoy(_) => None,
        }
    }

    pub fn sign(&self, g: &Element) -> Result<Sign> {
        match self {
            Cone::Flag(f) => f.sign(g),
            Cone::Dehornoy(d) => d.sign(g),
            Cone::Conjugated(c) => c.base.sign(&g.conjugate_by(&c.by)?),
        }
    }

    pub fn is_positive(&self, g: &Element) -> Result<bool> {
        Ok(self.sign(g)? == Sign::Positive)
    }

    /// `a < b` iff `a⁻¹b` is positive.
    pub fn compare(&self, a: &Element, b: &Element) -> Result<Ordering> {
        Ok(match self.sign(&a.inverse().multiply(b)?)? {
            Sign::Positive => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Negative => Ordering::Greater,
        })
    }

    /// Ordering whose sign is `g ↦ sign(h g h⁻¹)`.
    pub fn act(&self, h: &Element) -> Result<Cone> {
        if h.group() != self.group() {
            return Err(Error::MixedGroups(h.group().to_string(), self.group().to_string()));
        }
        if self.group().is_abelian() {
            return Ok(self.clone());
        }
        Ok(Cone::Conjugated(ConjugatedOrdering { base: Box::new(self.clone()), by: h.clone() }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Decision {
    Yes,
    No { witness: Option<Element> },
    UnknownWithinCap,
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        *self == Decision::Yes
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Decision::No { .. })
    }
}

/// Whether `x` is a nonzero power of `Δ²`.
pub fn is_delta_sq_power(x: &BraidWord, cap: usize) -> Result<bool> {
    let n = x.strands();
    let len = (n * (n - 1)) as i64;
    let e = x.exponent_sum();
    if e == 0 || e % len != 0 {
        return Ok(false);
    }
    let d = crate::groups::braid_delta_sq(n)?.power(e / len);
    Ok(dehornoy_sign(&x.inverse().concat(&d), cap)? == Sign::Zero)
}

/// `x` commutes with every standard generator.
pub fn is_central(x: &Element, cap: usize) -> Result<bool> {
    match x {
        Element::Lattice(_) => Ok(true),
        Element::Braid(b) => {
            for g in x.group().generators() {
                let s = g.as_braid().unwrap();
                let comm = s.inverse().concat(&b.inverse()).concat(s).concat(b);
                if dehornoy_sign(&comm, cap)? != Sign::Zero {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Is `x` cofinal for `gens`: for each generator `h` some `N` has
/// `x^{−N} < h < x^N`.
pub fn is_cofinal(p: &Cone, x: &Element, gens: &[Element], cap: u64) -> Result<Decision> {
    if p.sign(x)? == Sign::Zero {
        return Err(Error::AnchorIsIdentity);
    }
    if let Some(flag) = p.as_flag() {
        let xc = lattice_coords(x, flag.rank())?;
        let (j0, _) = flag.first_nonzero(xc).expect("nonidentity");
        for h in gens {
            let hc = lattice_coords(h, flag.rank())?;
            if (0..j0).any(|i| !flag.pairing(i, hc).is_zero()) {
                return Ok(Decision::No { witness: Some(h.clone()) });
            }
        }
        return Ok(Decision::Yes);
    }
    if let Element::Braid(b) = x {
        let cap_steps = handle_cap(p);
        if matches!(p, Cone::Dehornoy(_)) && is_delta_sq_power(b, cap_steps)? {
            return Ok(Decision::Yes);
        }
    }
    let big = if p.sign(x)? == Sign::Positive { x.clone() } else { x.inverse() };
    for h in gens {
        let mut found = false;
        let mut n = 1u64;
        while n <= cap.max(1) {
            let xn = big.power(n as i64)?;
            let above = p.sign(&xn.multiply(h)?)? == Sign::Positive;
            let below = p.sign(&h.inverse().multiply(&xn)?)? == Sign::Positive;
            if above && below {
                found = true;
                break;
            }
            n *= 2;
        }
        if !found {
            return Ok(Decision::UnknownWithinCap);
        }
    }
    Ok(Decision::Yes)
}

fn handle_cap(p: &Cone) -> usize {
    match p {
        Cone::Dehornoy(d) => d.step_cap,
        Cone::Conjugated(c) => handle_cap(&c.base),
        Cone::Flag(_) => DEFAULT_HANDLE_CAP,
    }
}

/// Freely reduced words of length `≤ len` in `gens ∪ gens⁻¹`,
/// breadth-first and deduplicated.
pub fn subgroup_words(gens: &[Element], len: usize, identity: Element) -> Result<Vec<Element>> {
    let mut alphabet: Vec<Element> = Vec::new();
    for g in gens {
        for a in [g.clone(), g.inverse()] {
            if !a.is_trivial_word() && !alphabet.contains(&a) {
                alphabet.push(a);
            }
        }
    }
    let mut seen: HashSet<Element> = HashSet::new();
    seen.insert(identity.clone());
    let mut out = vec![identity.clone()];
    let mut frontier = vec![identity];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for a in &alphabet {
                let v = w.multiply(a)?;
                if seen.insert(v.clone()) {
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}

/// Right `x`-invariance, `b < b′ ⇔ bx < b′x`, on `⟨gens, x⟩`.
pub fn is_right_x_invariant(p: &Cone, x: &Element, gens: &[Element], cap: usize) -> Result<Decision> {
    if p.group().is_abelian() || is_central(x, handle_cap(p))? {
        return Ok(Decision::Yes);
    }
    let mut all = gens.to_vec();
    all.push(x.clone());
    for c in subgroup_words(&all, cap, p.group().identity())? {
        let moved = x.inverse().multiply(&c)?.multiply(x)?;
        if p.sign(&c)? != p.sign(&moved)? {
            return Ok(Decision::No { witness: Some(c) });
        }
    }
    Ok(Decision::UnknownWithinCap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Density {
    Dense,
    Discrete { minimal_positive: Element },
    UnknownWithinCap { least_positive_found: Option<Element> },
}

pub fn is_dense(p: &Cone, cap: usize) -> Result<Density> {
    if let Some(flag) = p.as_flag() {
        let kernels = flag.level_kernels();
        let j = kernels.iter().position(|k| k.rank() == 0).expect("total flag has trivial final kernel");
        let prev = &kernels[j - 1];
        if prev.rank() >= 2 {
            return Ok(Density::Dense);
        }
        let gen: Vec<i64> = prev.basis()[0].iter().map(|c| c.to_i64().expect("kernel entry fits i64")).collect();
        let g = Element::lattice(&gen);
        let g = if flag.sign(&g)? == Sign::Positive { g } else { g.inverse() };
        return Ok(Density::Discrete { minimal_positive: g });
    }
    let gens = p.group().generators();
    let mut least: Option<Element> = None;
    for w in subgroup_words(&gens, cap, p.group().identity())? {
        if p.sign(&w)? != Sign::Positive {
            continue;
        }
        let better = match &least {
            None => true,
            Some(l) => p.compare(&w, l)? == Ordering::Less,
        };
        if better {
            least = Some(w);
        }
    }
    Ok(Density::UnknownWithinCap { least_positive_found: least })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomsReport {
    pub samples: usize,
    pub passed: bool,
    pub lo2_failures: Vec<Element>,
    pub lo1_failures: Vec<(Element, Element)>,
}

fn is_identity(g: &Element) -> bool {
    match g {
        Element::Lattice(l) => l.is_zero(),
        Element::Braid(b) => b.is_identity_artin(),
    }
}

/// Samples elements and positive pairs; checks LO2 (exactly one of `g > 1`,
/// `g⁻¹ > 1`, `g = 1`) and LO1 (positives are closed under products). For
/// flags the common kernel of all levels is tested first.
pub fn axioms_check(p: &Cone, samples: usize, seed: u64) -> Result<AxiomsReport> {
    let group = p.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = if group.is_abelian() { 8 } else { 6 };
    let mut lo2 = Vec::new();
    let mut lo1 = Vec::new();
    let mut candidates: Vec<Element> = Vec::new();
    if let Some(flag) = p.as_flag() {
        let kernels = flag.level_kernels();
        for v in kernels.last().unwrap().basis() {
            if let Some(c) = v.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<i64>>>() {
                candidates.push(Element::lattice(&c));
            }
        }
    }
    let mut positives = Vec::new();
    for _ in 0..samples {
        candidates.push(random_element(group, &mut rng, size));
    }
    for g in &candidates {
        let count = (p.sign(g)? == Sign::Positive) as u8
            + (p.sign(&g.inverse())? == Sign::Positive) as u8
            + is_identity(g) as u8;
        if count != 1 {
            lo2.push(g.clone());
        }
        if p.sign(g)? == Sign::Positive {
            positives.push(g.clone());
        }
    }
    if !positives.is_empty() {
        for _ in 0..samples {
            let a = &positives[rand::Rng::gen_range(&mut rng, 0..positives.len())];
            let b = &positives[rand::Rng::gen_range(&mut rng, 0..positives.len())];
            if p.sign(&a.multiply(b)?)? != Sign::Positive {
                lo1.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(AxiomsReport { samples, passed: lo1.is_empty() && lo2.is_empty(), lo2_failures: lo2, lo1_failures: lo1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::{rat, rat_int};
    use crate::groups::{braid_delta_sq, parse_element};
    use proptest::prelude::*;

    fn s(m: u64) -> RealConstant {
        RealConstant::sqrt(m)
    }

    fn int(n: i64) -> RealConstant {
        RealConstant::integer(n)
    }

    fn b3(text: &str) -> Element {
        parse_element(text, GroupRef::Braid { strands: 3 }).unwrap()
    }

    fn sqrt2_flag() -> FlagOrdering {
        FlagOrdering::new(vec![vec![int(1), s(2)]]).unwrap()
    }

    #[test]
    fn sign_examples() {
        let lex = Cone::Flag(FlagOrdering::lex(2));
        assert_eq!(lex.sign(&Element::lattice(&[0, 1])).unwrap(), Sign::Positive);
        assert_eq!(lex.sign(&Element::lattice(&[0, 0])).unwrap(), Sign::Zero);
        let d = Cone::dehornoy(3);
        assert_eq!(d.sign(&b3("s1 s2^-1")).unwrap(), Sign::Positive);
        assert_eq!(d.sign(&b3("")).unwrap(), Sign::Zero);
        assert_eq!(d.sign(&b3("s2 s1^-1")).unwrap(), Sign::Negative);
        // σ1σ2σ1 = σ2σ1σ2
        assert_eq!(d.sign(&b3("s1 s2 s1 s2^-1 s1^-1 s2^-1")).unwrap(), Sign::Zero);
        // σ1⁻¹σ2σ1 = σ2σ1σ2⁻¹ is σ1-positive
        assert_eq!(d.sign(&b3("s1^-1 s2 s1")).unwrap(), Sign::Positive);
        assert!(matches!(d.sign(&Element::lattice(&[1])), Err(Error::MixedGroups(..))));
    }

    #[test]
    fn handle_cap_is_enforced() {
        let d = DehornoyOrdering { strands: 3, step_cap: 1 };
        let w = b3("s1^-1 s2^-1 s1^-1 s2^-1 s1^-1 s2^-1 s1^-1 s2 s1 s2 s1 s2 s1 s1");
        assert_eq!(d.sign(&w), Err(Error::HandleReductionCap(1)));
        assert_eq!(Cone::dehornoy(3).sign(&w).unwrap(), Sign::Zero);
    }

    #[test]
    fn delta_sq_is_central() {
        for n in 2..=5 {
            let d = braid_delta_sq(n).unwrap();
            for i in 1..n as i32 {
                let s = BraidWord::from_letters(n, [i]).unwrap();
                let comm = s.inverse().concat(&d.inverse()).concat(&s).concat(&d);
                assert_eq!(dehornoy_sign(&comm, DEFAULT_HANDLE_CAP).unwrap(), Sign::Zero);
            }
            assert!(is_central(&Element::Braid(d), DEFAULT_HANDLE_CAP).unwrap());
        }
        assert!(!is_central(&b3("s1"), DEFAULT_HANDLE_CAP).unwrap());
    }

    #[test]
    fn handle_reduction_agrees_with_artin_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for strands in [3, 4] {
            let group = GroupRef::Braid { strands };
            for _ in 0..400 {
                let g = random_element(group, &mut rng, 9);
                let b = g.as_braid().unwrap();
                let sign = dehornoy_sign(b, DEFAULT_HANDLE_CAP).unwrap();
                assert_eq!(sign == Sign::Zero, b.is_identity_artin(), "{g}");
                let reduced = BraidWord::from_letters(strands, handle_reduce(b, DEFAULT_HANDLE_CAP).unwrap()).unwrap();
                assert!(reduced.inverse().concat(b).is_identity_artin());
            }
        }
    }

    #[test]
    fn axioms_examples() {
        let flag = Cone::Flag(sqrt2_flag());
        assert!(axioms_check(&flag, 500, 0).unwrap().passed);
        assert!(axioms_check(&Cone::dehornoy(3), 1000, 0).unwrap().passed);
        // (1,1) alone is blind to (1,−1)
        let bad = Cone::Flag(FlagOrdering::new_unchecked(vec![vec![int(1), int(1)]]).unwrap());
        let report = axioms_check(&bad, 50, 3).unwrap();
        assert!(!report.passed);
        let kernel = IntLattice::from_i64(2, &[vec![1, -1]]);
        for w in &report.lo2_failures {
            assert!(kernel.contains_i64(w.as_lattice().unwrap().coords()));
        }
        assert!(FlagOrdering::new(vec![vec![int(1), int(1)]]).is_err());
        assert!(FlagOrdering::new(vec![vec![int(1), s(2)]]).is_ok());
    }

    #[test]
    fn restrict_examples() {
        let lex = FlagOrdering::lex(2);
        let r = lex.restrict(&[vec![0, 1]]).unwrap();
        assert_eq!(r.levels(), &[vec![int(1)]]);
        let f = sqrt2_flag();
        assert_eq!(f.restrict(&[vec![1, 0], vec![0, 1]]).unwrap(), f);
        let r = f.restrict(&[vec![2, -1]]).unwrap();
        assert_eq!(r.sign_coords(&[1]), Sign::Positive);
        assert_eq!(r.levels()[0][0], &int(2) - &s(2));
        assert!(matches!(f.restrict(&[vec![1, 1], vec![2, 2]]), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn act_examples() {
        let lex = Cone::Flag(FlagOrdering::lex(2));
        assert_eq!(lex.act(&Element::lattice(&[3, 1])).unwrap(), lex);
        let d = Cone::dehornoy(3);
        let s1 = b3("s1");
        let moved = d.act(&s1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let back = moved.act(&s1.inverse()).unwrap();
        for _ in 0..1000 {
            let g = random_element(d.group(), &mut rng, 7);
            let direct = d.sign(&s1.multiply(&g).unwrap().multiply(&s1.inverse()).unwrap()).unwrap();
            assert_eq!(moved.sign(&g).unwrap(), direct);
            assert_eq!(back.sign(&g).unwrap(), d.sign(&g).unwrap());
        }
    }

    #[test]
    fn cofinality_examples() {
        let lex = Cone::Flag(FlagOrdering::lex(2));
        let gens = lex.group().generators();
        assert!(is_cofinal(&lex, &Element::lattice(&[1, 0]), &gens, 64).unwrap().is_yes());
        assert_eq!(
            is_cofinal(&lex, &Element::lattice(&[0, 1]), &gens, 64).unwrap(),
            Decision::No { witness: Some(Element::lattice(&[1, 0])) }
        );
        let d = Cone::dehornoy(3);
        let delta = Element::Braid(braid_delta_sq(3).unwrap());
        let bgens = d.group().generators();
        assert!(is_cofinal(&d, &delta, &bgens, 64).unwrap().is_yes());
        assert!(is_cofinal(&d, &delta.inverse(), &bgens, 64).unwrap().is_yes());
        // bounded search path: conjugated ordering with Δ² still cofinal
        let moved = d.act(&b3("s1 s2^-1")).unwrap();
        assert!(is_cofinal(&moved, &delta, &bgens, 64).unwrap().is_yes());
        assert_eq!(is_cofinal(&lex, &Element::lattice(&[0, 0]), &gens, 4), Err(Error::AnchorIsIdentity));
    }

    #[test]
    fn invariance_examples() {
        let f = Cone::Flag(sqrt2_flag());
        assert!(is_right_x_invariant(&f, &Element::lattice(&[0, 1]), &f.group().generators(), 3).unwrap().is_yes());
        let d = Cone::dehornoy(3);
        let gens = d.group().generators();
        let delta = Element::Braid(braid_delta_sq(3).unwrap());
        assert!(is_right_x_invariant(&d, &delta, &gens, 3).unwrap().is_yes());
        match is_right_x_invariant(&d, &b3("s1"), &gens, 6).unwrap() {
            Decision::No { witness: Some(c) } => {
                let s1 = b3("s1");
                let moved = s1.inverse().multiply(&c).unwrap().multiply(&s1).unwrap();
                assert_ne!(d.sign(&c).unwrap(), d.sign(&moved).unwrap());
            }
            Decision::UnknownWithinCap => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn density_examples() {
        let lex = Cone::Flag(FlagOrdering::lex(2));
        let dens = is_dense(&lex, 0).unwrap();
        assert_eq!(dens, Density::Discrete { minimal_positive: Element::lattice(&[0, 1]) });
        // betweenness on the radius-4 ball: nothing strictly between 1 and (0,1)
        let min = Element::lattice(&[0, 1]);
        for g in crate::groups::ball(lex.group(), 4) {
            let above_one = lex.sign(&g).unwrap() == Sign::Positive;
            let below_min = lex.compare(&g, &min).unwrap() == Ordering::Less;
            assert!(!(above_one && below_min));
        }
        assert_eq!(is_dense(&Cone::Flag(sqrt2_flag()), 0).unwrap(), Density::Dense);
        let z = Cone::Flag(FlagOrdering::from_integers(&[vec![1]]).unwrap());
        assert_eq!(is_dense(&z, 0).unwrap(), Density::Discrete { minimal_positive: Element::lattice(&[1]) });
        // (1, √2, 0), (0, 0, −1): final kernel is ⟨e3⟩ with e3 negative at level 2
        let f = FlagOrdering::new(vec![vec![int(1), s(2), int(0)], vec![int(0), int(0), int(-1)]]).unwrap();
        assert_eq!(is_dense(&Cone::Flag(f), 0).unwrap(), Density::Discrete { minimal_positive: Element::lattice(&[0, 0, -1]) });
        match is_dense(&Cone::dehornoy(3), 3).unwrap() {
            Density::UnknownWithinCap { least_positive_found: Some(g) } => assert_eq!(g, b3("s2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn level_kernels_chain() {
        let f = FlagOrdering::new(vec![
            vec![int(1), int(0), int(0)],
            vec![int(0), int(1), RealConstant::rational(rat(1, 2))],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        let ks = f.level_kernels();
        assert_eq!(ks.iter().map(IntLattice::rank).collect::<Vec<_>>(), vec![3, 2, 1, 0]);
        assert!(ks[2].contains_i64(&[0, 1, -2]));
        assert!(!ks[2].contains_i64(&[0, 0, 1]));
        let n = f.normalized(&[2, 0, 0]).unwrap();
        assert_eq!(n.pairing(0, &[2, 0, 0]), RealConstant::one());
        assert_eq!(n.levels()[1][2], RealConstant::rational(rat(1, 2)));
        let _ = rat_int(0);
    }

    fn arb_flag() -> impl Strategy<Value = FlagOrdering> {
        (prop::collection::vec(-5i64..=5, 3), prop::collection::vec(-5i64..=5, 3), 0usize..3).prop_filter_map(
            "total",
            |(a, b, key)| {
                let keys = [2u64, 3, 5];
                // rank-2 flag: v1 = (a0 + a1√m, a2), v2 integer
                let v1 = vec![
                    &int(a[0]) + &RealConstant::term(rat_int(a[1]), keys[key]),
                    int(a[2]),
                ];
                let v2 = vec![int(b[0]), int(b[1])];
                FlagOrdering::new(vec![v1, v2]).ok()
            },
        )
    }

    proptest! {
        #[test]
        fn inverse_flips_sign(f in arb_flag(), g in prop::collection::vec(-20i64..=20, 2)) {
            prop_assert_eq!(f.sign_coords(&[-g[0], -g[1]]), f.sign_coords(&g).negate());
        }

        #[test]
        fn flag_transitivity(f in arb_flag(), g in prop::collection::vec(-9i64..=9, 6)) {
            let p = Cone::Flag(f);
            let (a, b, c) = (Element::lattice(&g[0..2]), Element::lattice(&g[2..4]), Element::lattice(&g[4..6]));
            if p.compare(&a, &b).unwrap() == Ordering::Less && p.compare(&b, &c).unwrap() == Ordering::Less {
                prop_assert_eq!(p.compare(&a, &c).unwrap(), Ordering::Less);
            }
        }

        #[test]
        fn restrict_commutes_with_sign(
            f in arb_flag(),
            b in prop::collection::vec(-4i64..=4, 2),
            v in -30i64..=30,
        ) {
            prop_assume!(b.iter().any(|&c| c != 0));
            let r = f.restrict(std::slice::from_ref(&b)).unwrap();
            prop_assert_eq!(r.sign_coords(&[v]), f.sign_coords(&[b[0] * v, b[1] * v]));
        }

        #[test]
        fn dehornoy_transitivity(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = Cone::dehornoy(3);
            let g: Vec<Element> = (0..3).map(|_| random_element(d.group(), &mut rng, 6)).collect();
            if d.compare(&g[0], &g[1]).unwrap() == Ordering::Less && d.compare(&g[1], &g[2]).unwrap() == Ordering::Less {
                prop_assert_eq!(d.compare(&g[0], &g[2]).unwrap(), Ordering::Less);
            }
            prop_assert_eq!(d.sign(&g[0].inverse()).unwrap(), d.sign(&g[0]).unwrap().negate());
        }
    }
}
