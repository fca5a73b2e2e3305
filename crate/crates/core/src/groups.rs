//! Group elements for free abelian groups ℤⁿ and braid groups B_n.
//!
//! Elements are written with a whitespace separated grammar: `x<k>` tokens for
//! ℤⁿ and `s<k>` tokens for B_n, each optionally suffixed by `^<signed
//! integer>`. The empty string is the identity.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupRef {
    FreeAbelian { rank: usize },
    Braid { strands: usize },
}

impl GroupRef {
    pub fn free_abelian(rank: usize) -> Result<GroupRef> {
        if rank < 1 {
            return Err(Error::InvalidInput("free abelian rank must be at least 1".into()));
        }
        Ok(GroupRef::FreeAbelian { rank })
    }

    pub fn braid(strands: usize) -> Result<GroupRef> {
        if strands < 2 {
            return Err(Error::InvalidInput("braid groups need at least 2 strands".into()));
        }
        Ok(GroupRef::Braid { strands })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupRef::FreeAbelian { rank } => GroupRef::free_abelian(rank).map(|_| ()),
            GroupRef::Braid { strands } => GroupRef::braid(strands).map(|_| ()),
        }
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self, GroupRef::FreeAbelian { .. })
    }

    pub fn identity(&self) -> Element {
        match *self {
            GroupRef::FreeAbelian { rank } => Element::Lattice(LatticeElement::zero(rank)),
            GroupRef::Braid { strands } => Element::Braid(BraidWord::identity(strands)),
        }
    }

    /// The standard generators `x_1..x_n` or `σ_1..σ_{n−1}`.
    pub fn generators(&self) -> Vec<Element> {
        match *self {
            GroupRef::FreeAbelian { rank } => {
                (0..rank).map(|i| Element::Lattice(LatticeElement::unit(rank, i))).collect()
            }
            GroupRef::Braid { strands } => (1..strands as i32)
                .map(|i| Element::Braid(BraidWord::from_letters(strands, [i]).expect("index in range")))
                .collect(),
        }
    }
}

impl fmt::Display for GroupRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupRef::FreeAbelian { rank } => write!(f, "Z^{rank}"),
            GroupRef::Braid { strands } => write!(f, "B_{strands}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeElement {
    coords: Vec<i64>,
}

fn overflow() -> Error {
    Error::InvalidInput("lattice coordinate overflow".into())
}

impl LatticeElement {
    pub fn new(coords: Vec<i64>) -> LatticeElement {
        LatticeElement { coords }
    }

    pub fn zero(rank: usize) -> LatticeElement {
        LatticeElement { coords: vec![0; rank] }
    }

    pub fn unit(rank: usize, i: usize) -> LatticeElement {
        let mut coords = vec![0; rank];
        coords[i] = 1;
        LatticeElement { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &LatticeElement) -> Result<LatticeElement> {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.checked_add(*b).ok_or_else(overflow))
            .collect::<Result<_>>()?;
        Ok(LatticeElement { coords })
    }

    pub fn neg(&self) -> LatticeElement {
        LatticeElement { coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, k: i64) -> Result<LatticeElement> {
        let coords = self
            .coords
            .iter()
            .map(|c| c.checked_mul(k).ok_or_else(overflow))
            .collect::<Result<_>>()?;
        Ok(LatticeElement { coords })
    }

    pub fn l1_norm(&self) -> u64 {
        self.coords.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.coords.iter().enumerate() {
            match c {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                _ => parts.push(format!("x{}^{c}", i + 1)),
            }
        }
        parts.join(" ")
    }
}

/// Freely reduced braid word. Letter `+i` is `σ_i`, `−i` is `σ_i⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn identity(strands: usize) -> BraidWord {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn from_letters<I: IntoIterator<Item = i32>>(strands: usize, letters: I) -> Result<BraidWord> {
        let mut w = BraidWord::identity(strands);
        for l in letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(Error::InvalidInput(format!("generator index {} out of range for B_{strands}", l.abs())));
            }
            w.push(l);
        }
        Ok(w)
    }

    fn push(&mut self, l: i32) {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn power(&self, k: i64) -> BraidWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = BraidWord::identity(self.strands);
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|l| l.signum() as i64).sum()
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * l.signum() as i64;
            if run == 1 {
                parts.push(format!("s{}", l.abs()));
            } else {
                parts.push(format!("s{}^{run}", l.abs()));
            }
            i = j;
        }
        parts.join(" ")
    }

    /// Word-problem oracle through the Artin representation on the free group
    /// `F_n`; independent of any ordering. Cost grows exponentially with word
    /// length, so keep it to short words.
    pub fn is_identity_artin(&self) -> bool {
        let n = self.strands as i32;
        let mut images: Vec<Vec<i32>> = (1..=n).map(|j| vec![j]).collect();
        for &b in &self.letters {
            let i = b.abs();
            let sub = |x: i32| -> Vec<i32> {
                let g = x.abs();
                let img = if b > 0 {
                    if g == i {
                        vec![i, i + 1, -i]
                    } else if g == i + 1 {
                        vec![i]
                    } else {
                        vec![g]
                    }
                } else if g == i {
                    vec![i + 1]
                } else if g == i + 1 {
                    vec![-(i + 1), i, i + 1]
                } else {
                    vec![g]
                };
                if x > 0 {
                    img
                } else {
                    img.iter().rev().map(|y| -y).collect()
                }
            };
            for img in images.iter_mut() {
                let mut out: Vec<i32> = Vec::with_capacity(img.len() * 2);
                for &x in img.iter() {
                    for y in sub(x) {
                        if out.last() == Some(&-y) {
                            out.pop();
                        } else {
                            out.push(y);
                        }
                    }
                }
                *img = out;
            }
        }
        images.iter().enumerate().all(|(j, img)| img.as_slice() == [j as i32 + 1])
    }
}

/// `Δ²` with `Δ = (σ_1σ_2⋯σ_{n−1})⋯(σ_1σ_2)(σ_1)`.
pub fn braid_delta_sq(n: usize) -> Result<BraidWord> {
    if n < 2 {
        return Err(Error::InvalidInput("Δ² needs at least 2 strands".into()));
    }
    let mut delta = Vec::new();
    for top in (1..n as i32).rev() {
        delta.extend(1..=top);
    }
    let mut letters = delta.clone();
    letters.extend(delta);
    BraidWord::from_letters(n, letters)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Lattice(LatticeElement),
    Braid(BraidWord),
}

impl Element {
    pub fn group(&self) -> GroupRef {
        match self {
            Element::Lattice(l) => GroupRef::FreeAbelian { rank: l.rank() },
            Element::Braid(b) => GroupRef::Braid { strands: b.strands() },
        }
    }

    pub fn lattice(coords: &[i64]) -> Element {
        Element::Lattice(LatticeElement::new(coords.to_vec()))
    }

    pub fn braid(strands: usize, letters: &[i32]) -> Result<Element> {
        BraidWord::from_letters(strands, letters.iter().copied()).map(Element::Braid)
    }

    pub fn as_lattice(&self) -> Option<&LatticeElement> {
        match self {
            Element::Lattice(l) => Some(l),
            Element::Braid(_) => None,
        }
    }

    pub fn as_braid(&self) -> Option<&BraidWord> {
        match self {
            Element::Braid(b) => Some(b),
            Element::Lattice(_) => None,
        }
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.group() != other.group() {
            return Err(Error::MixedGroups(self.group().to_string(), other.group().to_string()));
        }
        Ok(())
    }

    pub fn multiply(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        match (self, other) {
            (Element::Lattice(a), Element::Lattice(b)) => a.add(b).map(Element::Lattice),
            (Element::Braid(a), Element::Braid(b)) => Ok(Element::Braid(a.concat(b))),
            _ => unreachable!(),
        }
    }

    pub fn inverse(&self) -> Element {
        match self {
            Element::Lattice(a) => Element::Lattice(a.neg()),
            Element::Braid(b) => Element::Braid(b.inverse()),
        }
    }

    pub fn power(&self, k: i64) -> Result<Element> {
        match self {
            Element::Lattice(a) => a.scale(k).map(Element::Lattice),
            Element::Braid(b) => Ok(Element::Braid(b.power(k))),
        }
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Element) -> Result<Element> {
        h.multiply(self)?.multiply(&h.inverse())
    }

    /// Syntactic identity: zero vector or empty freely reduced word. For
    /// braids this is sufficient but not necessary for being trivial.
    pub fn is_trivial_word(&self) -> bool {
        match self {
            Element::Lattice(a) => a.is_zero(),
            Element::Braid(b) => b.is_empty(),
        }
    }

    /// Size used for ball enumerations: ℓ¹ norm or word length.
    pub fn size(&self) -> u64 {
        match self {
            Element::Lattice(a) => a.l1_norm(),
            Element::Braid(b) => b.len() as u64,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Element::Lattice(a) => a.render(),
            Element::Braid(b) => b.render(),
        }
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.render();
        if s.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&s)
        }
    }
}

pub fn parse_element(text: &str, group: GroupRef) -> Result<Element> {
    group.validate()?;
    let (prefix, limit) = match group {
        GroupRef::FreeAbelian { rank } => ('x', rank),
        GroupRef::Braid { strands } => ('s', strands - 1),
    };
    let mut coords = vec![0i64; if group.is_abelian() { limit } else { 0 }];
    let mut letters: Vec<i32> = Vec::new();
    for token in text.split_whitespace().filter(|t| *t != "1") {
        let (gen, exp) = match token.split_once('^') {
            Some((g, e)) => {
                let e = e.strip_prefix('+').unwrap_or(e);
                let e: i64 = e
                    .parse()
                    .map_err(|_| Error::Parse(format!("malformed exponent in {token:?}")))?;
                (g, e)
            }
            None => (token, 1),
        };
        let idx = gen
            .strip_prefix(prefix)
            .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
            .ok_or_else(|| Error::Parse(format!("unknown token {token:?} for {group}")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::Parse(format!("unknown token {token:?}")))?;
        if idx == 0 || idx > limit {
            return Err(Error::Parse(format!("generator index {idx} out of range in {token:?} for {group}")));
        }
        if group.is_abelian() {
            coords[idx - 1] = coords[idx - 1]
                .checked_add(exp)
                .ok_or_else(|| Error::Parse("exponent overflow".into()))?;
        } else {
            if exp.unsigned_abs() > 1_000_000 {
                return Err(Error::Parse(format!("exponent too large in {token:?}")));
            }
            let l = if exp < 0 { -(idx as i32) } else { idx as i32 };
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
    }
    match group {
        GroupRef::FreeAbelian { .. } => Ok(Element::Lattice(LatticeElement::new(coords))),
        GroupRef::Braid { strands } => BraidWord::from_letters(strands, letters).map(Element::Braid),
    }
}

/// Coordinate box `{g : |g_i| ≤ radius}` in graded order: by ℓ¹ norm, then
/// lexicographically. The identity comes first.
pub fn abelian_ball(rank: usize, radius: i64) -> Vec<LatticeElement> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        let mut next = Vec::with_capacity(out.len() * (2 * radius as usize + 1));
        for v in &out {
            for c in -radius..=radius {
                let mut w = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        out = next;
    }
    let mut elems: Vec<LatticeElement> = out.into_iter().map(LatticeElement::new).collect();
    elems.sort_by(|a, b| a.l1_norm().cmp(&b.l1_norm()).then_with(|| a.cmp(b)));
    elems
}

/// All freely reduced words of length `≤ radius`, by length then
/// lexicographically on letters. The identity comes first.
pub fn braid_ball(strands: usize, radius: usize) -> Vec<BraidWord> {
    let alphabet: Vec<i32> = (1..strands as i32).flat_map(|i| [-i, i]).collect();
    let mut layers = vec![vec![Vec::<i32>::new()]];
    for _ in 0..radius {
        let last = layers.last().unwrap();
        let mut next = Vec::new();
        for w in last {
            for &l in &alphabet {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        next.sort();
        layers.push(next);
    }
    layers
        .into_iter()
        .flatten()
        .map(|letters| BraidWord { strands, letters })
        .collect()
}

/// Ball in the group's natural metric: coordinate box for ℤⁿ, word length for
/// braids.
pub fn ball(group: GroupRef, radius: usize) -> Vec<Element> {
    match group {
        GroupRef::FreeAbelian { rank } => abelian_ball(rank, radius as i64).into_iter().map(Element::Lattice).collect(),
        GroupRef::Braid { strands } => braid_ball(strands, radius).into_iter().map(Element::Braid).collect(),
    }
}

/// Random element: coordinates uniform in `[−size, size]`, or a random
/// freely reduced braid word of length `≤ size`.
pub fn random_element<R: Rng + ?Sized>(group: GroupRef, rng: &mut R, size: usize) -> Element {
    match group {
        GroupRef::FreeAbelian { rank } => {
            let s = size as i64;
            Element::Lattice(LatticeElement::new((0..rank).map(|_| rng.gen_range(-s..=s)).collect()))
        }
        GroupRef::Braid { strands } => {
            let len = rng.gen_range(0..=size);
            let mut w = BraidWord::identity(strands);
            while w.len() < len {
                let i = rng.gen_range(1..strands as i32);
                let l = if rng.gen_bool(0.5) { i } else { -i };
                w.push(l);
            }
            Element::Braid(w)
        }
    }
}
