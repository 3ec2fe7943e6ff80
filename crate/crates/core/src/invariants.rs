//! Numerical invariants of the Lefschetz fibration defined by a positive
//! relator: Euler characteristic, signature (from ledger or closed formulas),
//! holomorphic Euler characteristic, c1^2, and H1 of the total space via
//! Smith normal form.

use crate::curve::{CurveError, CurveTable};
use crate::word::{DefinitionTable, Word};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum InvariantError {
    #[error("word is not positive; fibration invariants are undefined")]
    NotPositive,
    #[error("sigma sources disagree: ledger gives {ledger}, closed form gives {closed}")]
    SigmaMismatch { ledger: i64, closed: i64 },
    #[error("sigma + chi = {0} is not divisible by 4")]
    NotDivisible(i64),
    #[error("family parameter out of range: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// chi(X) = 4 - 4g + s for a genus-g Lefschetz fibration over the sphere
/// with s singular fibers.
pub fn euler_characteristic(genus: usize, cycles: usize) -> i64 {
    4 - 4 * genus as i64 + cycles as i64
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i64>,
}

impl IntMat {
    pub fn zero(rows: usize, cols: usize) -> IntMat {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> IntMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_columns(columns: &[Vec<i64>], rows: usize) -> IntMat {
        let mut m = IntMat::zero(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn mul(&self, rhs: &IntMat) -> IntMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = IntMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let add = a.checked_mul(rhs[(k, j)]).expect("matrix overflow");
                    out[(i, j)] = out[(i, j)].checked_add(add).expect("matrix overflow");
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Diagonal entries d1 | d2 | ... | dr of the Smith normal form, all
/// positive, unimodular-equivalent to the input. Zero matrix gives an empty
/// list. Classical elementary-operations algorithm with the pivot chosen as
/// the smallest nonzero absolute value.
pub fn smith_normal_form(matrix: &IntMat) -> Vec<i64> {
    let mut m = matrix.clone();
    let n = m.rows.min(m.cols);
    let mut divisors = Vec::new();
    let mut t = 0;
    while t < n {
        // Find pivot: smallest |entry| != 0 in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                if m[(i, j)] != 0
                    && pivot.map_or(true, |(pi, pj)| m[(i, j)].abs() < m[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        swap_rows(&mut m, t, pi);
        swap_cols(&mut m, t, pj);
        if m[(t, t)] < 0 {
            negate_row(&mut m, t);
        }
        // Reduce the row and column below/right of the pivot.
        let mut dirty = false;
        for i in t + 1..m.rows {
            let q = div_round(m[(i, t)], m[(t, t)]);
            if q != 0 {
                row_axpy(&mut m, i, t, -q);
            }
            if m[(i, t)] != 0 {
                dirty = true;
            }
        }
        for j in t + 1..m.cols {
            let q = div_round(m[(t, j)], m[(t, t)]);
            if q != 0 {
                col_axpy(&mut m, j, t, -q);
            }
            if m[(t, j)] != 0 {
                dirty = true;
            }
        }
        if dirty {
            continue; // smaller remainders exist; repick the pivot
        }
        // Divisibility fix-up: pivot must divide every remaining entry.
        let p = m[(t, t)];
        let offender = (t + 1..m.rows)
            .flat_map(|i| (t + 1..m.cols).map(move |j| (i, j)))
            .find(|&(i, j)| m[(i, j)] % p != 0);
        if let Some((i, _)) = offender {
            row_axpy(&mut m, t, i, 1);
            continue;
        }
        divisors.push(p);
        t += 1;
    }
    divisors
}

fn div_round(a: i64, b: i64) -> i64 {
    // Round toward the nearest multiple to shrink remainders fast.
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}

fn swap_rows(m: &mut IntMat, a: usize, b: usize) {
    if a != b {
        for j in 0..m.cols {
            let (x, y) = (m[(a, j)], m[(b, j)]);
            m[(a, j)] = y;
            m[(b, j)] = x;
        }
    }
}

fn swap_cols(m: &mut IntMat, a: usize, b: usize) {
    if a != b {
        for i in 0..m.rows {
            let (x, y) = (m[(i, a)], m[(i, b)]);
            m[(i, a)] = y;
            m[(i, b)] = x;
        }
    }
}

fn negate_row(m: &mut IntMat, r: usize) {
    for j in 0..m.cols {
        m[(r, j)] = -m[(r, j)];
    }
}

/// row[a] += k * row[b]
fn row_axpy(m: &mut IntMat, a: usize, b: usize, k: i64) {
    for j in 0..m.cols {
        m[(a, j)] = m[(a, j)]
            .checked_add(k.checked_mul(m[(b, j)]).expect("snf overflow"))
            .expect("snf overflow");
    }
}

/// col[a] += k * col[b]
fn col_axpy(m: &mut IntMat, a: usize, b: usize, k: i64) {
    for i in 0..m.rows {
        m[(i, a)] = m[(i, a)]
            .checked_add(k.checked_mul(m[(i, b)]).expect("snf overflow"))
            .expect("snf overflow");
    }
}

/// Finitely generated abelian group in normalized divisor-chain form.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Each >= 2, each dividing the next.
    pub torsion: Vec<i64>,
}

impl AbelianGroup {
    pub fn trivial() -> AbelianGroup {
        AbelianGroup { free_rank: 0, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Cokernel of the matrix as a map Z^cols -> Z^rows.
    pub fn cokernel(matrix: &IntMat) -> AbelianGroup {
        let divisors = smith_normal_form(matrix);
        let rank = divisors.len();
        AbelianGroup {
            free_rank: matrix.rows - rank,
            torsion: divisors.into_iter().filter(|&d| d > 1).collect(),
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z{d}"));
        }
        write!(f, "{}", parts.join("+"))
    }
}

/// H1 of the total space of the fibration defined by a positive relator:
/// the cokernel of the 2g x s matrix whose columns are the homology classes
/// of the word's letters (one vanishing cycle per letter).
pub fn h1_of_fibration(
    word: &Word,
    table: &CurveTable,
    defs: &DefinitionTable,
) -> Result<AbelianGroup, InvariantError> {
    if !word.is_positive() {
        return Err(InvariantError::NotPositive);
    }
    let mut columns = Vec::with_capacity(word.len());
    for letter in word.iter() {
        let class = table.class_of_letter(&letter.curve, defs)?;
        columns.push(class.coeffs().to_vec());
    }
    Ok(AbelianGroup::cokernel(&IntMat::from_columns(&columns, table.dim())))
}

// ---------------------------------------------------------------------------
// Closed-form signatures
// ---------------------------------------------------------------------------

/// The fibration families with closed-form signatures.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    /// X_g for g = 2, 3, 4: sigma = -2(g + 7).
    Xg { g: usize },
    /// X_{g,k}: sigma = sigma(X_g) + k; 1 <= k <= 6 for g = 2, <= 3 for g = 3, 4.
    Xgk { g: usize, k: usize },
    /// X_{3,k,m}: sigma = -20 + k - 6m, 1 <= m <= k <= 3.
    X3km { k: usize, m: usize },
    /// Z_g, g even: sigma = -6g - 6.
    ZgEven { g: usize },
    /// Z_g, g odd: sigma = -6g - 2.
    ZgOdd { g: usize },
    Y4,
    /// Y_{4,k}: sigma = -27 + k, 1 <= k <= 3.
    Y4k { k: usize },
    Y5,
    Y6,
}

/// The closed-form signature of a family member.
pub fn closed_form_sigma(family: Family) -> Result<i64, InvariantError> {
    let bad = |msg: String| Err(InvariantError::BadParameter(msg));
    match family {
        Family::Xg { g } => {
            if !(2..=4).contains(&g) {
                return bad(format!("X_g needs g in 2..=4, got {g}"));
            }
            Ok(-2 * (g as i64 + 7))
        }
        Family::Xgk { g, k } => {
            let kmax = match g {
                2 => 6,
                3 | 4 => 3,
                _ => return bad(format!("X_g,k needs g in 2..=4, got {g}")),
            };
            if !(1..=kmax).contains(&k) {
                return bad(format!("X_{g},k needs 1 <= k <= {kmax}, got {k}"));
            }
            Ok(-2 * (g as i64 + 7) + k as i64)
        }
        Family::X3km { k, m } => {
            if !(1 <= m && m <= k && k <= 3) {
                return bad(format!("X_3,k,m needs 1 <= m <= k <= 3, got k={k} m={m}"));
            }
            Ok(-20 + k as i64 - 6 * m as i64)
        }
        Family::ZgEven { g } => {
            if g % 2 != 0 || g < 2 {
                return bad(format!("Z_g even form needs even g >= 2, got {g}"));
            }
            Ok(-6 * g as i64 - 6)
        }
        Family::ZgOdd { g } => {
            if g % 2 != 1 || g < 3 {
                return bad(format!("Z_g odd form needs odd g >= 3, got {g}"));
            }
            Ok(-6 * g as i64 - 2)
        }
        Family::Y4 => Ok(-27),
        Family::Y4k { k } => {
            if !(1..=3).contains(&k) {
                return bad(format!("Y_4,k needs 1 <= k <= 3, got {k}"));
            }
            Ok(-27 + k as i64)
        }
        Family::Y5 => Ok(-29),
        Family::Y6 => Ok(-30),
    }
}

/// (g, s, chi, sigma, chi_h, c1^2, H1) for one positive relator.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FibrationInvariants {
    pub genus: usize,
    pub cycles: usize,
    pub chi: i64,
    pub sigma: i64,
    pub chi_h: i64,
    pub c1sq: i64,
    pub h1: AbelianGroup,
}

/// Computes the full invariant record. Sigma may come from a ledger total, a
/// closed form, or both; when both are given they must agree.
pub fn invariants_report(
    word: &Word,
    table: &CurveTable,
    defs: &DefinitionTable,
    ledger_sigma: Option<i64>,
    family: Option<Family>,
) -> Result<FibrationInvariants, InvariantError> {
    let cycles = word.letter_count().map_err(|_| InvariantError::NotPositive)?;
    let closed = family.map(closed_form_sigma).transpose()?;
    let sigma = match (ledger_sigma, closed) {
        (Some(l), Some(c)) if l != c => {
            return Err(InvariantError::SigmaMismatch { ledger: l, closed: c })
        }
        (Some(l), _) => l,
        (None, Some(c)) => c,
        (None, None) => {
            return Err(InvariantError::BadParameter(
                "need a ledger or a family for sigma".into(),
            ))
        }
    };
    let chi = euler_characteristic(table.genus, cycles);
    if (sigma + chi).rem_euclid(4) != 0 {
        return Err(InvariantError::NotDivisible(sigma + chi));
    }
    Ok(FibrationInvariants {
        genus: table.genus,
        cycles,
        chi,
        sigma,
        chi_h: (sigma + chi) / 4,
        c1sq: 3 * sigma + 2 * chi,
        h1: h1_of_fibration(word, table, defs)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_characteristic_examples() {
        assert_eq!(euler_characteristic(2, 30), 26);
        assert_eq!(euler_characteristic(3, 36), 28);
        assert_eq!(euler_characteristic(5, 0), 4 - 20);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(smith_normal_form(&IntMat::identity(3)), vec![1, 1, 1]);
        assert_eq!(smith_normal_form(&IntMat::zero(2, 3)), Vec::<i64>::new());
        // diag(2, 3) ~ (1, 6): frozen from the elementary-ops oracle.
        let m = IntMat::from_rows(vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(smith_normal_form(&m), vec![1, 6]);
        // Divisor chain is normalized.
        let m = IntMat::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let d = smith_normal_form(&m);
        for w in d.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        assert!(d.iter().all(|&x| x > 0));
    }

    #[test]
    fn cokernel_groups() {
        // Z^2 / <(2,0),(0,3)> = Z2 + Z3 = Z6 in divisor form (1, 6).
        let m = IntMat::from_rows(vec![vec![2, 0], vec![0, 3]]);
        let g = AbelianGroup::cokernel(&m);
        assert_eq!(g, AbelianGroup { free_rank: 0, torsion: vec![6] });
        assert_eq!(g.to_string(), "Z6");
        // No columns: free of full rank.
        let g = AbelianGroup::cokernel(&IntMat::zero(4, 0));
        assert_eq!(g, AbelianGroup { free_rank: 4, torsion: vec![] });
        assert_eq!(g.to_string(), "Z^4");
        assert_eq!(AbelianGroup::trivial().to_string(), "1");
    }

    #[test]
    fn closed_forms() {
        assert_eq!(closed_form_sigma(Family::Xg { g: 4 }).unwrap(), -22);
        assert_eq!(closed_form_sigma(Family::ZgEven { g: 2 }).unwrap(), -18);
        assert_eq!(closed_form_sigma(Family::ZgOdd { g: 3 }).unwrap(), -20);
        assert_eq!(closed_form_sigma(Family::X3km { k: 3, m: 3 }).unwrap(), -35);
        assert_eq!(closed_form_sigma(Family::Y4).unwrap(), -27);
        assert!(closed_form_sigma(Family::Xgk { g: 2, k: 7 }).is_err());
        assert!(closed_form_sigma(Family::X3km { k: 1, m: 2 }).is_err());
    }

    #[test]
    fn x3km_consistency_identity() {
        // chi_h = (sigma + chi) / 4 holds across the whole parameter range.
        for k in 1..=3usize {
            for m in 1..=k {
                let sigma = closed_form_sigma(Family::X3km { k, m }).unwrap();
                let chi = 28 - k as i64 + 10 * m as i64;
                assert_eq!((sigma + chi) % 4, 0);
                assert_eq!((sigma + chi) / 4, 2 + m as i64);
                assert_eq!(3 * sigma + 2 * chi, -4 + k as i64 + 2 * m as i64);
            }
        }
    }
}
