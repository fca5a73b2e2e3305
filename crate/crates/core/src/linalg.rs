//! Exact rational and integer linear algebra: ranks, integer kernels,
//! Hermite-form lattices and unimodular completion.

#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactreal::Rational;

pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pivot;
            for c in col..ncols {
                let d = &f * &m[rank][c];
                m[r][c] -= d;
            }
        }
        rank += 1;
    }
    rank
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn rational_inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for c in 0..2 * n {
            m[col][c] *= &inv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..2 * n {
                let d = &f * &m[col][c];
                m[r][c] -= d;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Rational `c` with `Σ c_j·cols[j] = target`, if one exists.
pub fn solve_rational(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let n = target.len();
    let k = cols.len();
    // augmented rows: n equations in k unknowns
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..n).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in 0..=k {
            m[row][c] *= &inv;
        }
        for r in 0..n {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=k {
                    let d = &f * &m[row][c];
                    m[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut out = vec![Rational::zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        out[c] = m[r][k].clone();
    }
    Some(out)
}

/// Column-echelon reduction by unimodular column operations.
///
/// Returns `(rank, u)` where `u` is an `n×n` unimodular matrix (row-major)
/// such that columns `rank..n` of `m·u` vanish. Those columns of `u` form a
/// ℤ-basis of the integer kernel of `m`, and all columns of `u` together form
/// a basis of ℤⁿ extending it.
pub fn column_echelon(m: &[Vec<BigInt>], n: usize) -> (usize, Vec<Vec<BigInt>>) {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut pivot = 0;
    for row in 0..a.len() {
        if pivot == n {
            break;
        }
        for c in pivot + 1..n {
            if a[row][c].is_zero() {
                continue;
            }
            let x = a[row][pivot].clone();
            let y = a[row][c].clone();
            let e = x.extended_gcd(&y);
            let (g, p, q) = (e.gcd, e.x, e.y);
            let xg = &x / &g;
            let yg = &y / &g;
            // [col_pivot, col_c] ← [p·col_pivot + q·col_c, −(y/g)·col_pivot + (x/g)·col_c]
            let apply = |mat: &mut Vec<Vec<BigInt>>| {
                for r in mat.iter_mut() {
                    let cp = r[pivot].clone();
                    let cc = r[c].clone();
                    r[pivot] = &p * &cp + &q * &cc;
                    r[c] = &xg * &cc - &yg * &cp;
                }
            };
            apply(&mut a);
            apply(&mut u);
        }
        if !a[row][pivot].is_zero() {
            pivot += 1;
        }
    }
    (pivot, u)
}

/// ℤ-basis (as vectors) of `{g ∈ ℤⁿ : m·g = 0}`.
pub fn integer_kernel(m: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let (rank, u) = column_echelon(m, n);
    (rank..n).map(|c| (0..n).map(|r| u[r][c].clone()).collect()).collect()
}

/// Clears denominators of a rational row.
pub fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let den = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| q.numer() * (&den / q.denom())).collect()
}

/// A sublattice of ℤⁿ kept as a row Hermite basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLattice {
    dim: usize,
    /// Echelon rows with positive pivots; entries above a pivot reduced into `[0, pivot)`.
    rows: Vec<Vec<BigInt>>,
}

impl IntLattice {
    pub fn from_generators(dim: usize, gens: &[Vec<BigInt>]) -> IntLattice {
        let mut m: Vec<Vec<BigInt>> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
        let mut rank = 0;
        for col in 0..dim {
            if rank == m.len() {
                break;
            }
            for r in rank + 1..m.len() {
                if m[r][col].is_zero() {
                    continue;
                }
                let x = m[rank][col].clone();
                let y = m[r][col].clone();
                let e = x.extended_gcd(&y);
                let (g, p, q) = (e.gcd, e.x, e.y);
                let xg = &x / &g;
                let yg = &y / &g;
                let top: Vec<BigInt> = (0..dim).map(|c| &p * &m[rank][c] + &q * &m[r][c]).collect();
                let bot: Vec<BigInt> = (0..dim).map(|c| &xg * &m[r][c] - &yg * &m[rank][c]).collect();
                m[rank] = top;
                m[r] = bot;
            }
            if m[rank][col].is_zero() {
                continue;
            }
            if m[rank][col].is_negative() {
                for v in m[rank].iter_mut() {
                    *v = -v.clone();
                }
            }
            let piv = m[rank][col].clone();
            for r in 0..rank {
                let f = m[r][col].div_floor(&piv);
                if !f.is_zero() {
                    for c in 0..dim {
                        let d = &f * &m[rank][c];
                        m[r][c] -= d;
                    }
                }
            }
            rank += 1;
        }
        m.truncate(rank);
        IntLattice { dim, rows: m }
    }

    pub fn from_i64(dim: usize, gens: &[Vec<i64>]) -> IntLattice {
        let g: Vec<Vec<BigInt>> = gens.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntLattice::from_generators(dim, &g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        for row in &self.rows {
            let col = row.iter().position(|x| !x.is_zero()).expect("echelon rows are nonzero");
            let (q, r) = w[col].div_rem(&row[col]);
            if !r.is_zero() {
                return false;
            }
            if !q.is_zero() {
                for c in col..self.dim {
                    let d = &q * &row[c];
                    w[c] -= d;
                }
            }
        }
        w.iter().all(Zero::is_zero)
    }

    /// Coordinates of `v` in the Hermite basis, when `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut w = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let col = row.iter().position(|x| !x.is_zero()).expect("echelon rows are nonzero");
            let (q, r) = w[col].div_rem(&row[col]);
            if !r.is_zero() {
                return None;
            }
            for c in col..self.dim {
                let d = &q * &row[c];
                w[c] -= d;
            }
            coords.push(q);
        }
        w.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains_i64(&self, v: &[i64]) -> bool {
        let w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.contains(&w)
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Whether `ℚ·L ∩ ℤⁿ = L`.
    pub fn is_saturated(&self) -> bool {
        // ℚ·L ∩ ℤⁿ is the integer kernel of the integer kernel of the rows
        let perp = integer_kernel(&self.rows, self.dim);
        let sat = IntLattice::from_generators(self.dim, &integer_kernel(&perp, self.dim));
        self.contains_lattice(&sat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::rat_int;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rank_of_rational_matrix() {
        let rows = vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(-1)],
            vec![rat_int(0), rat_int(1)],
        ];
        assert_eq!(rational_rank(&rows), 2);
    }

    #[test]
    fn kernel_is_saturated_basis() {
        let m = vec![bi(&[2, 4, 6])];
        let k = integer_kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot: BigInt = v.iter().zip(&m[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
        // (1, 1, -1) is in the kernel and must be an integer combination
        let lat = IntLattice::from_generators(3, &k);
        assert!(lat.contains(&bi(&[1, 1, -1])));
        assert!(lat.contains(&bi(&[-2, 1, 0])));
        assert!(lat.is_saturated());
    }

    #[test]
    fn lattice_membership() {
        let lat = IntLattice::from_i64(2, &[vec![2, 0], vec![0, 3]]);
        assert!(lat.contains_i64(&[4, -3]));
        assert!(!lat.contains_i64(&[1, 0]));
        assert!(!lat.is_saturated());
        let sub = IntLattice::from_i64(2, &[vec![4, 6]]);
        assert!(lat.contains_lattice(&sub));
        assert!(!sub.contains_lattice(&lat));
        assert_eq!(IntLattice::from_i64(2, &[vec![1, 1], vec![2, 2]]).rank(), 1);
    }

    #[test]
    fn coordinates_and_solve() {
        let lat = IntLattice::from_i64(3, &[vec![1, 1, 0], vec![0, 2, 1]]);
        let v = bi(&[2, 0, -1]);
        let c = lat.coordinates(&v).unwrap();
        let back: Vec<BigInt> = (0..3).map(|j| lat.basis().iter().zip(&c).map(|(r, q)| &r[j] * q).sum()).collect();
        assert_eq!(back, v);
        assert!(lat.coordinates(&bi(&[0, 0, 1])).is_none());
        let cols = vec![vec![rat_int(1), rat_int(0), rat_int(1)], vec![rat_int(0), rat_int(2), rat_int(0)]];
        let sol = solve_rational(&cols, &[rat_int(3), rat_int(1), rat_int(3)]).unwrap();
        assert_eq!(sol, vec![rat_int(3), crate::exactreal::rat(1, 2)]);
        assert!(solve_rational(&cols, &[rat_int(1), rat_int(0), rat_int(0)]).is_none());
    }

    #[test]
    fn inverse_of_unimodular() {
        let (_, u) = column_echelon(&[bi(&[3, 5])], 2);
        let ur: Vec<Vec<Rational>> = u.iter().map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect();
        let inv = rational_inverse(&ur).unwrap();
        assert!(inv.iter().flatten().all(|q| q.is_integer()));
    }
}
