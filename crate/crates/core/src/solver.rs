//! Recovers homology classes of figure-defined curves from local constraints
//! by exhaustive search over bounded coefficient vectors.
//!
//! The search is a depth-first assignment of the unknowns in the given order.
//! Whenever an unknown occurs exactly once in a relation whose other curves
//! are already known, its transvection matrix is forced and the class is
//! extracted directly; otherwise the solver enumerates coefficient vectors in
//! `[-bound, bound]^2g`, pruned by the declared disjointness constraints.
//! Both paths produce exactly the assignments the naive enumeration would.

use crate::curve::{act_on_homology, CurveTable};
use crate::homology::{intersection, HomologyClass, SymplecticMatrix};
use crate::relation::RelationInstance;
use crate::word::{CurveName, DefinitionTable, Sign, Word};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum SolveError {
    #[error("constraint references defined letters; expand definitions first: {0}")]
    DefinedLetter(CurveName),
    #[error(transparent)]
    Curve(#[from] crate::curve::CurveError),
}

/// A local constraint on the unknown classes.
#[derive(Clone, Debug)]
pub enum SolveConstraint {
    /// lhs and rhs must act identically on homology.
    Relation(RelationInstance),
    /// Geometrically disjoint: intersection form value 0.
    Disjoint(CurveName, CurveName),
    /// Transverse single intersection: form value +-1.
    Unit(CurveName, CurveName),
    /// Separating curve: the zero class.
    Separating(CurveName),
}

struct Solver<'a> {
    base: &'a CurveTable,
    unknowns: &'a [CurveName],
    constraints: &'a [SolveConstraint],
    bound: i64,
    dim: usize,
    assigned: BTreeMap<CurveName, HomologyClass>,
    solutions: Vec<BTreeMap<CurveName, HomologyClass>>,
}

impl<'a> Solver<'a> {
    fn class_of(&self, name: &CurveName) -> Option<HomologyClass> {
        if let Some(c) = self.assigned.get(name) {
            return Some(c.clone());
        }
        self.base.class_of(name).ok().cloned()
    }

    fn is_unknown_here(&self, name: &CurveName) -> bool {
        self.unknowns.contains(name) && !self.assigned.contains_key(name)
    }

    fn word_known(&self, w: &Word) -> bool {
        w.iter().all(|l| !self.is_unknown_here(&l.curve))
    }

    /// Evaluates all constraints whose curves are fully assigned; returns
    /// false when any fails.
    fn consistent(&self) -> bool {
        for c in self.constraints {
            match c {
                SolveConstraint::Disjoint(a, b) => {
                    if let (Some(ca), Some(cb)) = (self.class_of(a), self.class_of(b)) {
                        if intersection(&ca, &cb) != Ok(0) {
                            return false;
                        }
                    }
                }
                SolveConstraint::Unit(a, b) => {
                    if let (Some(ca), Some(cb)) = (self.class_of(a), self.class_of(b)) {
                        if intersection(&ca, &cb).map(i64::abs) != Ok(1) {
                            return false;
                        }
                    }
                }
                SolveConstraint::Separating(name) => {
                    if let Some(c) = self.class_of(name) {
                        if !c.is_zero() {
                            return false;
                        }
                    }
                }
                SolveConstraint::Relation(r) => {
                    if self.word_known(&r.lhs) && self.word_known(&r.rhs) {
                        let table = self.scratch_table();
                        let defs = DefinitionTable::new();
                        let ml = act_on_homology(&r.lhs, &table, &defs);
                        let mr = act_on_homology(&r.rhs, &table, &defs);
                        match (ml, mr) {
                            (Ok(a), Ok(b)) if a == b => {}
                            _ => return false,
                        }
                    }
                }
            }
        }
        true
    }

    fn scratch_table(&self) -> CurveTable {
        let mut t = self.base.clone();
        for (name, class) in &self.assigned {
            t.insert_class(name.clone(), class.clone());
        }
        t
    }

    /// Forced-transvection extraction: if `name` occurs exactly once in some
    /// relation whose other letters are known, the relator pins T(name).
    fn extraction_candidates(&self, name: &CurveName) -> Option<Vec<HomologyClass>> {
        for c in self.constraints {
            let r = match c {
                SolveConstraint::Relation(r) => r,
                _ => continue,
            };
            let relator = r.lhs.concat(&r.rhs.invert());
            let occurrences: Vec<usize> = relator
                .iter()
                .enumerate()
                .filter(|(_, l)| &l.curve == name)
                .map(|(i, _)| i)
                .collect();
            if occurrences.len() != 1 {
                continue;
            }
            let pos = occurrences[0];
            let others_known = relator
                .iter()
                .enumerate()
                .all(|(i, l)| i == pos || !self.is_unknown_here(&l.curve));
            if !others_known {
                continue;
            }
            let table = self.scratch_table();
            let defs = DefinitionTable::new();
            let prefix = Word::new(relator.letters()[..pos].to_vec());
            let suffix = Word::new(relator.letters()[pos + 1..].to_vec());
            let mp = match act_on_homology(&prefix, &table, &defs) {
                Ok(m) => m,
                Err(_) => continue,
            };
            let ms = match act_on_homology(&suffix, &table, &defs) {
                Ok(m) => m,
                Err(_) => continue,
            };
            // M(suffix) T^s M(prefix) = I  =>  T^s = (M(prefix) M(suffix))^-1.
            let mut t = mp.mul(&ms).symplectic_inverse();
            if relator.letters()[pos].sign == Sign::Neg {
                t = t.symplectic_inverse();
            }
            return Some(extract_transvection_class(&t, self.bound));
        }
        None
    }

    /// Enumerates bounded vectors, pruned by disjointness constraints against
    /// known classes.
    fn enumeration_candidates(&self, name: &CurveName) -> Vec<HomologyClass> {
        // Linear functionals: <X, k> = 0 for declared disjoint known k,
        // |<X, k>| = 1 for unit pairs.
        let mut zero_fns: Vec<Vec<i64>> = Vec::new();
        let mut unit_fns: Vec<Vec<i64>> = Vec::new();
        for c in self.constraints {
            let (a, b, is_unit) = match c {
                SolveConstraint::Disjoint(a, b) => (a, b, false),
                SolveConstraint::Unit(a, b) => (a, b, true),
                _ => continue,
            };
            let other = if a == name {
                b
            } else if b == name {
                a
            } else {
                continue;
            };
            if let Some(k) = self.class_of(other) {
                // <X, k> = sum_j X_j (J k)_j
                let jk = j_row(k.coeffs());
                if is_unit {
                    unit_fns.push(jk);
                } else {
                    zero_fns.push(jk);
                }
            }
        }
        let mut out = Vec::new();
        let mut coords = vec![0i64; self.dim];
        self.enumerate_rec(0, &mut coords, &zero_fns, &unit_fns, &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        idx: usize,
        coords: &mut Vec<i64>,
        zero_fns: &[Vec<i64>],
        unit_fns: &[Vec<i64>],
        out: &mut Vec<HomologyClass>,
    ) {
        if idx == self.dim {
            if zero_fns.iter().all(|f| dot(coords, f) == 0)
                && unit_fns.iter().all(|f| dot(coords, f).abs() == 1)
            {
                out.push(HomologyClass::new(coords.clone()));
            }
            return;
        }
        for v in -self.bound..=self.bound {
            coords[idx] = v;
            // Interval pruning: a functional that can no longer reach its
            // target is dead.
            let feasible = |f: &Vec<i64>, lo: i64, hi: i64| -> bool {
                let partial: i64 = (0..=idx).map(|i| coords[i] * f[i]).sum();
                let slack: i64 =
                    (idx + 1..self.dim).map(|i| f[i].abs()).sum::<i64>() * self.bound;
                partial - slack <= hi && partial + slack >= lo
            };
            if zero_fns.iter().all(|f| feasible(f, 0, 0))
                && unit_fns.iter().all(|f| feasible(f, -1, 1))
            {
                self.enumerate_rec(idx + 1, coords, zero_fns, unit_fns, out);
            }
        }
        coords[idx] = 0;
    }

    fn solve_rec(&mut self) {
        let next = self.unknowns.iter().find(|n| !self.assigned.contains_key(n)).cloned();
        let name = match next {
            Some(n) => n,
            None => {
                if self.consistent() {
                    self.solutions.push(self.assigned.clone());
                }
                return;
            }
        };
        let separating = self.constraints.iter().any(
            |c| matches!(c, SolveConstraint::Separating(n) if n == &name),
        );
        let candidates = if separating {
            vec![HomologyClass::zero(self.dim)]
        } else if let Some(cands) = self.extraction_candidates(&name) {
            cands
        } else {
            self.enumeration_candidates(&name)
        };
        for class in candidates {
            if class.coeffs().iter().any(|&c| c.abs() > self.bound) {
                continue;
            }
            self.assigned.insert(name.clone(), class);
            if self.consistent() {
                self.solve_rec();
            }
            self.assigned.remove(&name);
        }
    }
}

fn j_row(k: &[i64]) -> Vec<i64> {
    let mut out = vec![0; k.len()];
    for i in 0..k.len() / 2 {
        out[2 * i] = k[2 * i + 1];
        out[2 * i + 1] = -k[2 * i];
    }
    out
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt().round() as i64;
    for cand in [r - 1, r, r + 1] {
        if cand >= 0 && cand * cand == n {
            return Some(cand);
        }
    }
    None
}

/// Classes c with `transvection(c)` equal to the given matrix, in lex order.
fn extract_transvection_class(t: &SymplecticMatrix, bound: i64) -> Vec<HomologyClass> {
    let n = t.dim();
    if t.is_identity() {
        return vec![HomologyClass::zero(n)];
    }
    // T - I has columns (J c)_j * c; any nonzero column is a multiple of c.
    let col = |j: usize| -> Vec<i64> {
        (0..n).map(|i| t.get(i, j) - i64::from(i == j)).collect()
    };
    let j0 = match (0..n).find(|&j| col(j).iter().any(|&v| v != 0)) {
        Some(j) => j,
        None => return Vec::new(),
    };
    let column = col(j0);
    let g = column.iter().fold(0i64, |acc, &v| gcd(acc, v.abs()));
    let mut d: Vec<i64> = column.iter().map(|&v| v / g).collect();
    let sign_flip = d.iter().find(|&&v| v != 0).map_or(1, |&v| if v < 0 { -1 } else { 1 });
    for v in &mut d {
        *v *= sign_flip;
    }
    let jd = j_row(&d);
    if jd[j0] == 0 {
        return Vec::new();
    }
    let target = sign_flip * g; // column = target * d
    if target % jd[j0] != 0 {
        return Vec::new();
    }
    let m2 = target / jd[j0];
    let m = match isqrt(m2) {
        Some(m) if m > 0 => m,
        _ => return Vec::new(),
    };
    let c = HomologyClass::new(d.iter().map(|&v| v * m).collect());
    if SymplecticMatrix::transvection(&c) != *t {
        return Vec::new();
    }
    let mut candidates = vec![c.neg(), c];
    candidates.retain(|cls| cls.coeffs().iter().all(|&v| v.abs() <= bound));
    candidates.sort();
    candidates
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exhaustive search for the unknown classes. Returns every completed table
/// satisfying all constraints, ordered lexicographically by the concatenated
/// coefficient vectors of the unknowns (in the given unknown order).
pub fn solve_classes(
    partial: &CurveTable,
    unknowns: &[CurveName],
    constraints: &[SolveConstraint],
    bound: i64,
) -> Result<Vec<CurveTable>, SolveError> {
    let mut solver = Solver {
        base: partial,
        unknowns,
        constraints,
        bound,
        dim: 2 * partial.genus,
        assigned: BTreeMap::new(),
        solutions: Vec::new(),
    };
    solver.solve_rec();
    let mut solutions = solver.solutions;
    solutions.sort_by_key(|assignment| {
        unknowns
            .iter()
            .flat_map(|n| assignment[n].coeffs().to_vec())
            .collect::<Vec<i64>>()
    });
    let tables = solutions
        .into_iter()
        .map(|assignment| {
            let mut table = partial.clone();
            for (name, class) in assignment {
                table.insert_class(name.clone(), class);
            }
            for c in constraints {
                match c {
                    SolveConstraint::Disjoint(a, b) => table.declare_disjoint(a.clone(), b.clone()),
                    SolveConstraint::Unit(a, b) => table.declare_unit(a.clone(), b.clone()),
                    SolveConstraint::Separating(n) => table.declare_separating(n.clone()),
                    SolveConstraint::Relation(_) => {}
                }
            }
            table
        })
        .collect();
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::RelationKind;

    fn g2_partial() -> CurveTable {
        let mut t = CurveTable::new(2);
        t.insert_class("c1", HomologyClass::new(vec![0, 1, 0, 0]));
        t.insert_class("c2", HomologyClass::new(vec![1, 0, 0, 0]));
        t.insert_class("c3", HomologyClass::new(vec![0, 1, 0, 1]));
        t.insert_class("c4", HomologyClass::new(vec![0, 0, 1, 0]));
        t.insert_class("c5", HomologyClass::new(vec![0, 0, 0, 1]));
        t.declare_separating("delta");
        t
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn solves_genus_2_lantern_interior() {
        let lantern = RelationInstance::new(
            "lantern_g2",
            RelationKind::Lantern,
            w("delta x c3"),
            w("c1 c1 c5 c5"),
        );
        let constraints = vec![
            SolveConstraint::Relation(lantern),
            SolveConstraint::Disjoint("x".into(), "c1".into()),
            SolveConstraint::Disjoint("x".into(), "c5".into()),
        ];
        let solutions =
            solve_classes(&g2_partial(), &["x".into()], &constraints, 2).unwrap();
        // b1 - b2 up to sign.
        assert_eq!(solutions.len(), 2);
        let expected = HomologyClass::new(vec![0, 1, 0, -1]);
        assert!(solutions
            .iter()
            .any(|t| t.class_of(&"x".into()).unwrap() == &expected));
        assert!(solutions
            .iter()
            .any(|t| t.class_of(&"x".into()).unwrap() == &expected.neg()));
        // Lex order: the -b1+b2 vector sorts first.
        assert_eq!(
            solutions[0].class_of(&"x".into()).unwrap(),
            &HomologyClass::new(vec![0, -1, 0, 1])
        );
    }

    #[test]
    fn separating_unknown_is_zero_only() {
        let constraints = vec![SolveConstraint::Separating("q".into())];
        let solutions = solve_classes(&g2_partial(), &["q".into()], &constraints, 2).unwrap();
        assert_eq!(solutions.len(), 1);
        assert!(solutions[0].class_of(&"q".into()).unwrap().is_zero());
    }

    #[test]
    fn inconsistent_constraints_yield_empty() {
        // Wrong boundary multiset: no class for x satisfies the identity.
        let lantern = RelationInstance::new(
            "broken",
            RelationKind::Lantern,
            w("delta x c3"),
            w("c1 c1 c1 c5"),
        );
        let constraints = vec![SolveConstraint::Relation(lantern)];
        let solutions = solve_classes(&g2_partial(), &["x".into()], &constraints, 2).unwrap();
        assert!(solutions.is_empty());
    }

    #[test]
    fn enumeration_agrees_with_extraction() {
        // Solve for x by pure enumeration (no single-occurrence relation):
        // give the solver only pair constraints plus a relation where x
        // appears twice, then check the extraction-based answer is among the
        // enumerated set.
        let lantern = RelationInstance::new(
            "lantern_g2",
            RelationKind::Lantern,
            w("delta x c3"),
            w("c1 c1 c5 c5"),
        );
        let with_extraction = solve_classes(
            &g2_partial(),
            &["x".into()],
            &[SolveConstraint::Relation(lantern.clone())],
            2,
        )
        .unwrap();
        // Same answers from a doubled relation (x occurs twice, forcing the
        // enumeration path).
        let doubled = RelationInstance::new(
            "doubled",
            RelationKind::Lantern,
            w("delta x c3 delta x c3"),
            w("c1 c1 c5 c5 c1 c1 c5 c5"),
        );
        let enumerated = solve_classes(
            &g2_partial(),
            &["x".into()],
            &[SolveConstraint::Relation(doubled)],
            2,
        )
        .unwrap();
        let xs: Vec<_> = with_extraction
            .iter()
            .map(|t| t.class_of(&"x".into()).unwrap().clone())
            .collect();
        for x in &xs {
            assert!(enumerated
                .iter()
                .any(|t| t.class_of(&"x".into()).unwrap() == x));
        }
    }
}
