//! Curve tables: integral homology classes of named curves on a genus-g
//! surface, declared disjoint/unit pairs, and the homology action of words.
//!
//! Curve-table file format (`*.mcgc`, line oriented, `#` comments):
//!
//! ```text
//! genus 2
//! curve c1 = [0, 1, 0, 0]
//! separating delta
//! disjoint c1 c3
//! unit c1 c2
//! ```

use crate::homology::{intersection, HomologyClass, SymplecticMatrix};
use crate::word::{CurveName, DefinitionTable, Sign, Word};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum CurveError {
    #[error("unknown curve name {0}")]
    UnknownCurve(CurveName),
    #[error("curve table parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Def(#[from] crate::word::DefError),
    #[error(transparent)]
    Homology(#[from] crate::homology::HomologyError),
}

fn pair_key(a: &CurveName, b: &CurveName) -> (CurveName, CurveName) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Genus plus a map from curve names to homology classes, together with the
/// geometric disjointness and once-intersection declarations that gate
/// commutation swaps and braid moves.
#[derive(Clone, Default, Debug)]
pub struct CurveTable {
    pub genus: usize,
    classes: BTreeMap<CurveName, HomologyClass>,
    disjoint: BTreeSet<(CurveName, CurveName)>,
    unit: BTreeSet<(CurveName, CurveName)>,
    separating: BTreeSet<CurveName>,
}

impl CurveTable {
    pub fn new(genus: usize) -> CurveTable {
        CurveTable { genus, ..CurveTable::default() }
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn insert_class(&mut self, name: impl Into<CurveName>, class: HomologyClass) {
        self.classes.insert(name.into(), class);
    }

    pub fn declare_disjoint(&mut self, a: impl Into<CurveName>, b: impl Into<CurveName>) {
        self.disjoint.insert(pair_key(&a.into(), &b.into()));
    }

    pub fn declare_unit(&mut self, a: impl Into<CurveName>, b: impl Into<CurveName>) {
        self.unit.insert(pair_key(&a.into(), &b.into()));
    }

    pub fn declare_separating(&mut self, name: impl Into<CurveName>) {
        let name = name.into();
        if !self.classes.contains_key(&name) {
            self.classes.insert(name.clone(), HomologyClass::zero(self.dim()));
        }
        self.separating.insert(name);
    }

    pub fn class_of(&self, name: &CurveName) -> Result<&HomologyClass, CurveError> {
        self.classes.get(name).ok_or_else(|| CurveError::UnknownCurve(name.clone()))
    }

    pub fn has_curve(&self, name: &CurveName) -> bool {
        self.classes.contains_key(name)
    }

    pub fn curve_names(&self) -> impl Iterator<Item = &CurveName> {
        self.classes.keys()
    }

    pub fn is_separating(&self, name: &CurveName) -> bool {
        self.separating.contains(name)
    }

    pub fn separating_names(&self) -> impl Iterator<Item = &CurveName> {
        self.separating.iter()
    }

    pub fn disjoint_pairs(&self) -> impl Iterator<Item = &(CurveName, CurveName)> {
        self.disjoint.iter()
    }

    pub fn unit_pairs(&self) -> impl Iterator<Item = &(CurveName, CurveName)> {
        self.unit.iter()
    }

    fn declared_disjoint(&self, a: &CurveName, b: &CurveName) -> bool {
        a == b || self.disjoint.contains(&pair_key(a, b))
    }

    /// Geometric disjointness used to gate commutation swaps. Base-curve
    /// pairs must be declared. A defined letter is a twist about a curve in a
    /// neighborhood of its constituent curves, so it is disjoint from
    /// anything disjoint from every constituent.
    pub fn are_disjoint(&self, a: &CurveName, b: &CurveName, defs: &DefinitionTable) -> bool {
        if self.declared_disjoint(a, b) {
            return true;
        }
        let constituents = |n: &CurveName| -> Option<Vec<CurveName>> {
            defs.get(n).map(|w| w.iter().map(|l| l.curve.clone()).collect())
        };
        match (constituents(a), constituents(b)) {
            (None, None) => false,
            (Some(ca), None) => ca.iter().all(|c| self.are_disjoint(c, b, defs)),
            (None, Some(cb)) => cb.iter().all(|c| self.are_disjoint(a, c, defs)),
            (Some(ca), Some(cb)) => ca
                .iter()
                .all(|c| cb.iter().all(|d| self.are_disjoint(c, d, defs))),
        }
    }

    pub fn is_unit_pair(&self, a: &CurveName, b: &CurveName) -> bool {
        self.unit.contains(&pair_key(a, b))
    }

    /// Homology class of the curve a letter twists about. For a defined
    /// letter `L = w a w^-1` this is the image of `[a]` under the inverse
    /// action of the conjugating prefix (leftmost letter acts first).
    pub fn class_of_letter(
        &self,
        name: &CurveName,
        defs: &DefinitionTable,
    ) -> Result<HomologyClass, CurveError> {
        if let Some((prefix, core)) = defs.conjugate_parts(name) {
            let m = act_on_homology(&prefix.invert(), self, defs)?;
            let core_class = self.class_of_letter(&core.curve, defs)?;
            Ok(m.apply(&core_class))
        } else {
            self.class_of(name).cloned()
        }
    }

    // ----- file format -----

    pub fn parse(text: &str) -> Result<CurveTable, CurveError> {
        let mut table = CurveTable::new(0);
        let mut saw_genus = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CurveError::Parse { line: line_no, msg };
            let mut parts = line.split_whitespace();
            match parts.next().unwrap() {
                "genus" => {
                    let g = parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| err("expected `genus <positive int>`".into()))?;
                    if g == 0 {
                        return Err(err("genus must be positive".into()));
                    }
                    table.genus = g;
                    saw_genus = true;
                }
                "curve" => {
                    if !saw_genus {
                        return Err(err("`curve` before `genus`".into()));
                    }
                    let rest = line.strip_prefix("curve").unwrap().trim();
                    let (name, vec_part) = rest
                        .split_once('=')
                        .ok_or_else(|| err("expected `curve <name> = [..]`".into()))?;
                    let name = name.trim();
                    let vec_part = vec_part.trim();
                    if !vec_part.starts_with('[') || !vec_part.ends_with(']') {
                        return Err(err("expected bracketed integer vector".into()));
                    }
                    let inner = &vec_part[1..vec_part.len() - 1];
                    let coeffs: Result<Vec<i64>, _> = inner
                        .split(',')
                        .map(|t| t.trim().parse::<i64>())
                        .collect();
                    let coeffs =
                        coeffs.map_err(|e| err(format!("bad integer in class vector: {e}")))?;
                    if coeffs.len() != table.dim() {
                        return Err(err(format!(
                            "class for {} has {} entries; genus {} needs {}",
                            name,
                            coeffs.len(),
                            table.genus,
                            table.dim()
                        )));
                    }
                    table.insert_class(name, HomologyClass::new(coeffs));
                }
                "disjoint" => {
                    let a = parts.next().ok_or_else(|| err("disjoint needs two names".into()))?;
                    let b = parts.next().ok_or_else(|| err("disjoint needs two names".into()))?;
                    table.declare_disjoint(a, b);
                }
                "unit" => {
                    let a = parts.next().ok_or_else(|| err("unit needs two names".into()))?;
                    let b = parts.next().ok_or_else(|| err("unit needs two names".into()))?;
                    table.declare_unit(a, b);
                }
                "separating" => {
                    let name =
                        parts.next().ok_or_else(|| err("separating needs a name".into()))?;
                    table.declare_separating(name);
                }
                other => return Err(err(format!("unknown directive {other:?}"))),
            }
        }
        if !saw_genus {
            return Err(CurveError::Parse { line: 0, msg: "missing `genus` line".into() });
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<CurveTable, CurveError> {
        let text = std::fs::read_to_string(path).map_err(|source| CurveError::Io {
            path: path.display().to_string(),
            source,
        })?;
        CurveTable::parse(&text)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("genus {}\n", self.genus));
        for (name, class) in &self.classes {
            out.push_str(&format!(
                "curve {} = [{}]\n",
                name,
                class
                    .coeffs()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        for name in &self.separating {
            out.push_str(&format!("separating {name}\n"));
        }
        for (a, b) in &self.unit {
            out.push_str(&format!("unit {a} {b}\n"));
        }
        for (a, b) in &self.disjoint {
            out.push_str(&format!("disjoint {a} {b}\n"));
        }
        out
    }
}

/// Product of transvections for a word, composed in left-to-right application
/// order: the leftmost letter acts first, so `M(u v) = M(v) M(u)`.
pub fn act_on_homology(
    word: &Word,
    table: &CurveTable,
    defs: &DefinitionTable,
) -> Result<SymplecticMatrix, CurveError> {
    let expanded = defs.expand(word)?;
    let mut acc = SymplecticMatrix::identity(table.dim());
    for letter in expanded.iter() {
        let class = table.class_of(&letter.curve)?;
        let t = SymplecticMatrix::transvection_pow(
            class,
            match letter.sign {
                Sign::Pos => 1,
                Sign::Neg => -1,
            },
        );
        acc = t.mul(&acc);
    }
    Ok(acc)
}

/// Smallest n <= bound with `act_on_homology(word)^n` the identity.
pub fn word_order(
    word: &Word,
    table: &CurveTable,
    defs: &DefinitionTable,
    bound: u32,
) -> Result<Option<u32>, CurveError> {
    Ok(act_on_homology(word, table, defs)?.order(bound))
}

/// Outcome of validating a curve table; failures are data, not errors.
#[derive(Clone, Default, Debug)]
pub struct TableReport {
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            writeln!(f, "table ok")?;
        }
        for failure in &self.failures {
            writeln!(f, "FAIL {failure}")?;
        }
        for note in &self.notes {
            writeln!(f, "note {note}")?;
        }
        Ok(())
    }
}

/// Checks the structural invariants of a table: class lengths, declared
/// disjoint pairs pair to 0, unit pairs to +-1, separating curves are zero.
/// Relation instances registered against the table are checked by the
/// relation registry (see `relation::validate_registry`).
pub fn validate_table(table: &CurveTable) -> TableReport {
    let mut report = TableReport::default();
    let dim = table.dim();
    for (name, class) in &table.classes {
        if class.dim() != dim {
            report
                .failures
                .push(format!("class of {name} has length {}, expected {dim}", class.dim()));
        }
    }
    for name in &table.separating {
        match table.classes.get(name) {
            Some(class) if class.is_zero() => {}
            Some(_) => report.failures.push(format!("separating curve {name} has nonzero class")),
            None => report.failures.push(format!("separating curve {name} has no class")),
        }
    }
    let mut check_pair = |a: &CurveName, b: &CurveName, expect_unit: bool| {
        let (label, ok) = match (table.classes.get(a), table.classes.get(b)) {
            (Some(ca), Some(cb)) => match intersection(ca, cb) {
                Ok(v) => {
                    if expect_unit {
                        ("unit", v.abs() == 1)
                    } else {
                        ("disjoint", v == 0)
                    }
                }
                Err(_) => ("pair", false),
            },
            _ => {
                report.failures.push(format!("unknown curve in declared pair {a} {b}"));
                return;
            }
        };
        if !ok {
            report.failures.push(format!("declared {label} pair {a} {b} violates the form"));
        }
    };
    for (a, b) in &table.disjoint {
        check_pair(a, b, false);
    }
    for (a, b) in &table.unit {
        check_pair(a, b, true);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> CurveTable {
        // Genus-2 standard chain.
        let mut t = CurveTable::new(2);
        t.insert_class("c1", HomologyClass::new(vec![0, 1, 0, 0]));
        t.insert_class("c2", HomologyClass::new(vec![1, 0, 0, 0]));
        t.insert_class("c3", HomologyClass::new(vec![0, 1, 0, 1]));
        t.insert_class("c4", HomologyClass::new(vec![0, 0, 1, 0]));
        t.insert_class("c5", HomologyClass::new(vec![0, 0, 0, 1]));
        t.insert_class("x", HomologyClass::new(vec![0, 1, 0, -1]));
        t.declare_separating("delta");
        t.declare_disjoint("c1", "c3");
        t.declare_unit("c1", "c2");
        t
    }

    #[test]
    fn file_round_trip() {
        let table = sample_table();
        let parsed = CurveTable::parse(&table.render()).unwrap();
        assert_eq!(parsed.genus, 2);
        assert_eq!(parsed.class_of(&"x".into()).unwrap(), table.class_of(&"x".into()).unwrap());
        assert!(parsed.is_separating(&"delta".into()));
        assert!(parsed.is_unit_pair(&"c1".into(), &"c2".into()));
    }

    #[test]
    fn parse_errors() {
        assert!(CurveTable::parse("curve c1 = [1, 0]").is_err());
        assert!(CurveTable::parse("genus 2\ncurve c1 = [1, 0]").is_err());
        assert!(CurveTable::parse("genus 2\nwat c1").is_err());
    }

    #[test]
    fn action_is_antihomomorphic() {
        let table = sample_table();
        let defs = DefinitionTable::new();
        let u = Word::parse("c1 c2").unwrap();
        let v = Word::parse("c3 c4 c5").unwrap();
        let mu = act_on_homology(&u, &table, &defs).unwrap();
        let mv = act_on_homology(&v, &table, &defs).unwrap();
        let muv = act_on_homology(&u.concat(&v), &table, &defs).unwrap();
        assert_eq!(muv, mv.mul(&mu));
        let minv = act_on_homology(&u.invert(), &table, &defs).unwrap();
        assert!(mu.mul(&minv).is_identity());
    }

    #[test]
    fn empty_word_acts_trivially() {
        let table = sample_table();
        let defs = DefinitionTable::new();
        assert!(act_on_homology(&Word::empty(), &table, &defs).unwrap().is_identity());
    }

    #[test]
    fn unknown_curve_is_error() {
        let table = sample_table();
        let defs = DefinitionTable::new();
        let w = Word::parse("nope").unwrap();
        assert!(matches!(
            act_on_homology(&w, &table, &defs),
            Err(CurveError::UnknownCurve(_))
        ));
    }

    #[test]
    fn defined_letter_class_matches_action() {
        let table = sample_table();
        let mut defs = DefinitionTable::new();
        defs.insert("t2".into(), Word::parse("c3 c4 c3^-1").unwrap()).unwrap();
        let class = table.class_of_letter(&"t2".into(), &defs).unwrap();
        let direct = act_on_homology(&Word::parse("t2").unwrap(), &table, &defs).unwrap();
        assert_eq!(SymplecticMatrix::transvection(&class), direct);
    }

    #[test]
    fn derived_disjointness_for_defined_letters() {
        let mut table = sample_table();
        table.declare_disjoint("c1", "c4");
        table.declare_disjoint("c1", "c5");
        let mut defs = DefinitionTable::new();
        defs.insert("s2".into(), Word::parse("c5^-1 c4 c5").unwrap()).unwrap();
        // c1 is declared disjoint from both constituents of s2.
        assert!(table.are_disjoint(&"c1".into(), &"s2".into(), &defs));
        // c3 is not declared disjoint from c4 or c5.
        assert!(!table.are_disjoint(&"c3".into(), &"s2".into(), &defs));
    }

    #[test]
    fn validate_catches_violations() {
        let mut table = sample_table();
        assert!(validate_table(&table).passed());
        table.declare_unit("c1", "c3"); // intersection 0, declared unit
        let report = validate_table(&table);
        assert!(!report.passed());
        assert!(report.failures[0].contains("c1 c3"));
    }
}
