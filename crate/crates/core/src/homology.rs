//! Integral homology classes on a closed genus-g surface, the symplectic
//! intersection form, and transvection matrices.
//!
//! The basis is (a1, b1, a2, b2, ..., ag, bg) with <ai, bi> = +1. All
//! arithmetic is exact; overflow panics rather than wrapping (desk-scale
//! words stay far below i64 limits).

use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("homology class length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("homology class length {0} is odd; expected 2g entries")]
    OddLength(usize),
}

/// Integer vector of length 2g in the basis (a1, b1, ..., ag, bg).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HomologyClass(Vec<i64>);

impl HomologyClass {
    pub fn new(coeffs: Vec<i64>) -> HomologyClass {
        HomologyClass(coeffs)
    }

    pub fn zero(dim: usize) -> HomologyClass {
        HomologyClass(vec![0; dim])
    }

    /// Basis vector `a_i` (1-based handle index).
    pub fn basis_a(genus: usize, i: usize) -> HomologyClass {
        let mut v = vec![0; 2 * genus];
        v[2 * (i - 1)] = 1;
        HomologyClass(v)
    }

    /// Basis vector `b_i` (1-based handle index).
    pub fn basis_b(genus: usize, i: usize) -> HomologyClass {
        let mut v = vec![0; 2 * genus];
        v[2 * (i - 1) + 1] = 1;
        HomologyClass(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &HomologyClass) -> HomologyClass {
        assert_eq!(self.0.len(), other.0.len());
        HomologyClass(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.checked_add(b).expect("homology coefficient overflow"))
                .collect(),
        )
    }

    pub fn neg(&self) -> HomologyClass {
        HomologyClass(self.0.iter().map(|&a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> HomologyClass {
        HomologyClass(
            self.0
                .iter()
                .map(|&a| a.checked_mul(k).expect("homology coefficient overflow"))
                .collect(),
        )
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// `(J c)_j`, so that `<x, c> = sum_j x_j (J c)_j`.
fn j_apply(c: &[i64]) -> Vec<i64> {
    let mut out = vec![0; c.len()];
    for i in 0..c.len() / 2 {
        out[2 * i] = c[2 * i + 1];
        out[2 * i + 1] = -c[2 * i];
    }
    out
}

/// Algebraic intersection number `u^T J v`; antisymmetric bilinear.
pub fn intersection(u: &HomologyClass, v: &HomologyClass) -> Result<i64, HomologyError> {
    if u.dim() != v.dim() {
        return Err(HomologyError::LengthMismatch(u.dim(), v.dim()));
    }
    if u.dim() % 2 != 0 {
        return Err(HomologyError::OddLength(u.dim()));
    }
    let jv = j_apply(v.coeffs());
    let mut total: i64 = 0;
    for (a, b) in u.coeffs().iter().zip(&jv) {
        total = total
            .checked_add(a.checked_mul(*b).expect("intersection overflow"))
            .expect("intersection overflow");
    }
    Ok(total)
}

/// 2g x 2g integer matrix acting on column vectors, `y = M x`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymplecticMatrix {
    dim: usize,
    entries: Vec<i64>, // row-major
}

impl SymplecticMatrix {
    pub fn identity(dim: usize) -> SymplecticMatrix {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        SymplecticMatrix { dim, entries }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> SymplecticMatrix {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim));
        SymplecticMatrix { dim, entries: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.dim + col]
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(k, &v)| {
            let (i, j) = (k / self.dim, k % self.dim);
            v == i64::from(i == j)
        })
    }

    /// Matrix of `x -> x + <x, c> c`; the homology action of a positive Dehn
    /// twist about a curve with class `c`. Equals the identity iff c = 0.
    /// `power` -1 gives the inverse transvection.
    pub fn transvection_pow(c: &HomologyClass, power: i64) -> SymplecticMatrix {
        let dim = c.dim();
        let jc = j_apply(c.coeffs());
        let mut m = SymplecticMatrix::identity(dim);
        for i in 0..dim {
            for j in 0..dim {
                // column j image: e_j + power * <e_j, c> c
                let add = power
                    .checked_mul(jc[j])
                    .and_then(|t| t.checked_mul(c.coeffs()[i]))
                    .expect("transvection overflow");
                let cell = &mut m.entries[i * dim + j];
                *cell = cell.checked_add(add).expect("transvection overflow");
            }
        }
        m
    }

    pub fn transvection(c: &HomologyClass) -> SymplecticMatrix {
        SymplecticMatrix::transvection_pow(c, 1)
    }

    pub fn mul(&self, rhs: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.entries[k * n + j];
                    if b == 0 {
                        continue;
                    }
                    let cell = &mut entries[i * n + j];
                    *cell = cell
                        .checked_add(a.checked_mul(b).expect("matrix product overflow"))
                        .expect("matrix product overflow");
                }
            }
        }
        SymplecticMatrix { dim: n, entries }
    }

    pub fn apply(&self, x: &HomologyClass) -> HomologyClass {
        assert_eq!(self.dim, x.dim());
        let mut out = vec![0i64; self.dim];
        for i in 0..self.dim {
            let mut acc: i64 = 0;
            for j in 0..self.dim {
                acc = acc
                    .checked_add(
                        self.entries[i * self.dim + j]
                            .checked_mul(x.coeffs()[j])
                            .expect("matrix apply overflow"),
                    )
                    .expect("matrix apply overflow");
            }
            out[i] = acc;
        }
        HomologyClass::new(out)
    }

    pub fn pow(&self, n: u32) -> SymplecticMatrix {
        let mut acc = SymplecticMatrix::identity(self.dim);
        for _ in 0..n {
            acc = self.mul(&acc);
        }
        acc
    }

    /// `M^T J M = J`, checked exactly.
    pub fn is_symplectic(&self) -> bool {
        let n = self.dim;
        if n % 2 != 0 {
            return false;
        }
        // (M^T J M)[i][j] = <M e_i, M e_j> must equal J[i][j].
        let cols: Vec<HomologyClass> = (0..n)
            .map(|j| HomologyClass::new((0..n).map(|i| self.entries[i * n + j]).collect()))
            .collect();
        for i in 0..n {
            for j in 0..n {
                let expected = if i % 2 == 0 && j == i + 1 {
                    1
                } else if i % 2 == 1 && j + 1 == i {
                    -1
                } else {
                    0
                };
                match intersection(&cols[i], &cols[j]) {
                    Ok(v) if v == expected => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Inverse of a symplectic matrix: `M^-1 = -J M^T J` (integer exact).
    pub fn symplectic_inverse(&self) -> SymplecticMatrix {
        let n = self.dim;
        // Compute N = M^T J, then M^-1 = -J N ... derived from M^T J M = J.
        // We verify by multiplication in debug builds.
        let mut mt = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                mt[i * n + j] = self.entries[j * n + i];
            }
        }
        // Right-multiply by J: (A J) columns: J e_{2i} = -e_{2i+1}? Using
        // J[2i][2i+1] = 1, J[2i+1][2i] = -1 as elsewhere:
        // (A J)[r][2i] = -A[r][2i+1], (A J)[r][2i+1] = A[r][2i].
        let mut aj = vec![0i64; n * n];
        for r in 0..n {
            for i in 0..n / 2 {
                aj[r * n + 2 * i] = -mt[r * n + 2 * i + 1];
                aj[r * n + 2 * i + 1] = mt[r * n + 2 * i];
            }
        }
        // Left-multiply by -J: (-J B)[2i][c] = -B[2i+1][c], (-J B)[2i+1][c] = B[2i][c].
        let mut out = vec![0i64; n * n];
        for i in 0..n / 2 {
            for c in 0..n {
                out[(2 * i) * n + c] = -aj[(2 * i + 1) * n + c];
                out[(2 * i + 1) * n + c] = aj[(2 * i) * n + c];
            }
        }
        let inv = SymplecticMatrix { dim: n, entries: out };
        debug_assert!(self.mul(&inv).is_identity(), "symplectic inverse failed");
        inv
    }

    /// Determinant via fraction-free Gaussian elimination (Bareiss).
    pub fn det(&self) -> i64 {
        let n = self.dim;
        let mut m: Vec<i128> = self.entries.iter().map(|&x| x as i128).collect();
        let mut prev: i128 = 1;
        let mut sign = 1i128;
        for k in 0..n {
            if m[k * n + k] == 0 {
                let swap = (k + 1..n).find(|&r| m[r * n + k] != 0);
                match swap {
                    Some(r) => {
                        for c in 0..n {
                            m.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i * n + j] =
                        (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
                }
                m[i * n + k] = 0;
            }
            prev = m[k * n + k];
        }
        i64::try_from(sign * m[(n - 1) * n + (n - 1)]).expect("determinant overflow")
    }

    /// Smallest n <= bound with M^n = identity, if any.
    pub fn order(&self, bound: u32) -> Option<u32> {
        let mut acc = SymplecticMatrix::identity(self.dim);
        for n in 1..=bound {
            acc = self.mul(&acc);
            if acc.is_identity() {
                return Some(n);
            }
        }
        None
    }
}

impl fmt::Display for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:3}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Default bound for order searches; covers the orders 1, 2, 3, 6 arising in
/// this calculus.
pub const DEFAULT_ORDER_BOUND: u32 = 12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_convention() {
        let a1 = HomologyClass::basis_a(2, 1);
        let b1 = HomologyClass::basis_b(2, 1);
        assert_eq!(intersection(&a1, &b1).unwrap(), 1);
        assert_eq!(intersection(&b1, &a1).unwrap(), -1);
        assert_eq!(intersection(&a1, &a1).unwrap(), 0);
    }

    #[test]
    fn chain_assignment_intersections() {
        // Standard chain classes for genus 2: c2 = a1, c3 = b1 + b2, c1 = b1, c4 = a2.
        let c1 = HomologyClass::basis_b(2, 1);
        let c2 = HomologyClass::basis_a(2, 1);
        let c3 = HomologyClass::basis_b(2, 1).add(&HomologyClass::basis_b(2, 2));
        let c4 = HomologyClass::basis_a(2, 2);
        assert_eq!(intersection(&c2, &c3).unwrap(), 1);
        assert_eq!(intersection(&c1, &c4).unwrap(), 0);
    }

    #[test]
    fn transvection_basics() {
        let zero = HomologyClass::zero(4);
        assert!(SymplecticMatrix::transvection(&zero).is_identity());
        // g = 1, c = a1: b1 -> b1 - a1.
        let a1 = HomologyClass::basis_a(1, 1);
        let b1 = HomologyClass::basis_b(1, 1);
        let t = SymplecticMatrix::transvection(&a1);
        assert_eq!(t.apply(&b1), HomologyClass::new(vec![-1, 1]));
        assert!(t.is_symplectic());
        assert_eq!(t.det(), 1);
        // Sign-invariance: T(-c) = T(c).
        assert_eq!(SymplecticMatrix::transvection(&a1.neg()), t);
    }

    #[test]
    fn torus_order_six() {
        // (T_a T_b)^6 = identity on the torus, order exactly 6.
        let a1 = HomologyClass::basis_a(1, 1);
        let b1 = HomologyClass::basis_b(1, 1);
        let ta = SymplecticMatrix::transvection(&a1);
        let tb = SymplecticMatrix::transvection(&b1);
        // Leftmost acts first: word "a b" is M(b) * M(a).
        let m = tb.mul(&ta);
        assert_eq!(m.order(DEFAULT_ORDER_BOUND), Some(6));
        assert!(SymplecticMatrix::identity(2).order(12) == Some(1));
    }

    #[test]
    fn inverse_transvection() {
        let c = HomologyClass::new(vec![1, -2, 0, 3]);
        let t = SymplecticMatrix::transvection(&c);
        let tinv = SymplecticMatrix::transvection_pow(&c, -1);
        assert!(t.mul(&tinv).is_identity());
        assert_eq!(t.symplectic_inverse(), tinv);
    }

    #[test]
    fn length_mismatch_is_error() {
        let u = HomologyClass::zero(4);
        let v = HomologyClass::zero(6);
        assert!(intersection(&u, &v).is_err());
    }
}
