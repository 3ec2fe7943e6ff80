//! The catalog of relation kinds with signature values I, concrete relation
//! instances over a curve table, and their homology-level validation.
//!
//! Relation file format (`*.mcgr`, one per line, `#` comments):
//!
//! ```text
//! relation lantern_1 kind lantern lhs "delta1 x1 c3" rhs "c1 c1 e1 f1"
//! relation def_d kind conjugation lhs "c1 c2 c1^-1" rhs "d"
//! ```
//!
//! Conjugation relations double as the definition table: the rhs names the
//! defined letter, the lhs is its expansion.

use crate::curve::{act_on_homology, CurveError, CurveTable};
use crate::homology::intersection;
use crate::word::{CurveName, DefinitionTable, Sign, Word};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Relation kinds and their signature contributions I.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RelationKind {
    Braid,
    Commute,
    ChainC2,
    ChainC3,
    Lantern,
    Star,
    TorusOrder,
    ConjugationDef,
}

impl RelationKind {
    /// Signature contribution of one positively oriented use.
    pub fn signature_i(self) -> i64 {
        match self {
            RelationKind::ChainC2 => -7,
            RelationKind::ChainC3 => -6,
            RelationKind::Lantern => 1,
            RelationKind::Star => -5,
            RelationKind::Braid
            | RelationKind::Commute
            | RelationKind::TorusOrder
            | RelationKind::ConjugationDef => 0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            RelationKind::Braid => "braid",
            RelationKind::Commute => "commute",
            RelationKind::ChainC2 => "chain2",
            RelationKind::ChainC3 => "chain3",
            RelationKind::Lantern => "lantern",
            RelationKind::Star => "star",
            RelationKind::TorusOrder => "torus",
            RelationKind::ConjugationDef => "conjugation",
        }
    }

    pub fn from_tag(tag: &str) -> Option<RelationKind> {
        Some(match tag {
            "braid" => RelationKind::Braid,
            "commute" => RelationKind::Commute,
            "chain2" => RelationKind::ChainC2,
            "chain3" => RelationKind::ChainC3,
            "lantern" => RelationKind::Lantern,
            "star" => RelationKind::Star,
            "torus" => RelationKind::TorusOrder,
            "conjugation" => RelationKind::ConjugationDef,
            _ => return None,
        })
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The eight kinds with their fixed I values.
pub fn builtin_kinds() -> Vec<RelationKind> {
    vec![
        RelationKind::Braid,
        RelationKind::Commute,
        RelationKind::ChainC2,
        RelationKind::ChainC3,
        RelationKind::Lantern,
        RelationKind::Star,
        RelationKind::TorusOrder,
        RelationKind::ConjugationDef,
    ]
}

/// A named identity between two words. The canonical relator orientation is
/// `lhs * rhs^-1`; a derivation move that realizes the relator in that
/// orientation contributes +I.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RelationInstance {
    pub name: String,
    pub kind: RelationKind,
    pub lhs: Word,
    pub rhs: Word,
}

impl RelationInstance {
    pub fn new(name: &str, kind: RelationKind, lhs: Word, rhs: Word) -> RelationInstance {
        RelationInstance { name: name.to_string(), kind, lhs, rhs }
    }

    /// For a lantern, the interior triple is the lhs and the boundary
    /// multiset the rhs, stored explicitly as words.
    pub fn lantern_parts(&self) -> Option<(&[crate::word::TwistLetter], &[crate::word::TwistLetter])> {
        if self.kind == RelationKind::Lantern {
            Some((self.lhs.letters(), self.rhs.letters()))
        } else {
            None
        }
    }
}

#[derive(Error, Debug)]
pub enum RelationError {
    #[error("relation file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown relation {0}")]
    Unknown(String),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Def(#[from] crate::word::DefError),
}

/// Violation of the structural shape required for a relation kind.
fn shape_failure(r: &RelationInstance, table: &CurveTable, defs: &DefinitionTable) -> Option<String> {
    let letters = r.lhs.letters();
    let all_pos = |w: &Word| w.iter().all(|l| l.sign == Sign::Pos);
    let inter = |a: &CurveName, b: &CurveName| -> Option<i64> {
        let ca = table.class_of_letter(a, defs).ok()?;
        let cb = table.class_of_letter(b, defs).ok()?;
        intersection(&ca, &cb).ok()
    };
    match r.kind {
        RelationKind::Braid => {
            if letters.len() != 3 || r.rhs.len() != 3 || !all_pos(&r.lhs) || !all_pos(&r.rhs) {
                return Some("braid must be a b a = b a b in positive letters".into());
            }
            let (a, b) = (&letters[0].curve, &letters[1].curve);
            if &letters[2].curve != a
                || &r.rhs.letters()[0].curve != b
                || &r.rhs.letters()[1].curve != a
                || &r.rhs.letters()[2].curve != b
            {
                return Some("braid words do not have the a b a = b a b pattern".into());
            }
            if inter(a, b).map(i64::abs) != Some(1) {
                return Some(format!("braid pair {a} {b} does not intersect once"));
            }
            None
        }
        RelationKind::Commute => {
            if letters.len() != 2 || r.rhs.len() != 2 {
                return Some("commute must be a b = b a".into());
            }
            let (a, b) = (&letters[0].curve, &letters[1].curve);
            if &r.rhs.letters()[0].curve != b || &r.rhs.letters()[1].curve != a {
                return Some("commute words do not have the a b = b a pattern".into());
            }
            if inter(a, b) != Some(0) {
                return Some(format!("commuting pair {a} {b} has nonzero intersection"));
            }
            if !table.are_disjoint(a, b, defs) {
                return Some(format!("commuting pair {a} {b} is not declared disjoint"));
            }
            None
        }
        RelationKind::ChainC2 | RelationKind::TorusOrder => {
            let want_rhs = if r.kind == RelationKind::ChainC2 { 1 } else { 0 };
            if letters.len() != 12 || !all_pos(&r.lhs) || r.rhs.len() != want_rhs {
                return Some("chain C2 must be (a b)^6 = delta".into());
            }
            let (a, b) = (&letters[0].curve, &letters[1].curve);
            for (i, l) in letters.iter().enumerate() {
                let want = if i % 2 == 0 { a } else { b };
                if &l.curve != want {
                    return Some("lhs is not (a b)^6".into());
                }
            }
            if inter(a, b).map(i64::abs) != Some(1) {
                return Some(format!("chain pair {a} {b} does not intersect once"));
            }
            None
        }
        RelationKind::ChainC3 => {
            if letters.len() != 12 || !all_pos(&r.lhs) || r.rhs.len() != 2 || !all_pos(&r.rhs) {
                return Some("chain C3 must be (a b c)^4 or (b a b c)^3 = d1 d2".into());
            }
            // Accept (a b c)^4 or (b a b c)^3; extract the chain (a, b, c).
            let period4 = letters.chunks(3).all(|ch| {
                ch[0].curve == letters[0].curve
                    && ch[1].curve == letters[1].curve
                    && ch[2].curve == letters[2].curve
            });
            let (a, b, c) = if period4 {
                (&letters[0].curve, &letters[1].curve, &letters[2].curve)
            } else {
                let period3 = letters.chunks(4).all(|ch| {
                    ch[0].curve == letters[0].curve
                        && ch[1].curve == letters[1].curve
                        && ch[2].curve == letters[2].curve
                        && ch[3].curve == letters[3].curve
                });
                if !(period3 && letters[0].curve == letters[2].curve) {
                    return Some("lhs is neither (a b c)^4 nor (b a b c)^3".into());
                }
                (&letters[1].curve, &letters[0].curve, &letters[3].curve)
            };
            if inter(a, b).map(i64::abs) != Some(1) || inter(b, c).map(i64::abs) != Some(1) {
                return Some("chain adjacencies must intersect once".into());
            }
            if inter(a, c) != Some(0) {
                return Some("chain ends must be disjoint".into());
            }
            None
        }
        RelationKind::Lantern => {
            if letters.len() != 3 || r.rhs.len() != 4 || !all_pos(&r.lhs) || !all_pos(&r.rhs) {
                return Some("lantern must equate 3 interior and 4 boundary twists".into());
            }
            let boundary = r.rhs.letters();
            for i in 0..4 {
                for j in i + 1..4 {
                    if inter(&boundary[i].curve, &boundary[j].curve) != Some(0) {
                        return Some(format!(
                            "lantern boundary curves {} {} intersect",
                            boundary[i].curve, boundary[j].curve
                        ));
                    }
                }
            }
            for int in letters {
                for bd in boundary {
                    if inter(&int.curve, &bd.curve) != Some(0) {
                        return Some(format!(
                            "lantern interior {} meets boundary {}",
                            int.curve, bd.curve
                        ));
                    }
                }
            }
            None
        }
        RelationKind::Star => {
            if letters.len() != 12 || !all_pos(&r.lhs) || r.rhs.len() != 3 || !all_pos(&r.rhs) {
                return Some("star must be (a1 a2 a3 b)^3 = d1 d2 d3".into());
            }
            let period = letters.chunks(4).all(|ch| {
                ch[0].curve == letters[0].curve
                    && ch[1].curve == letters[1].curve
                    && ch[2].curve == letters[2].curve
                    && ch[3].curve == letters[3].curve
            });
            if !period {
                return Some("lhs is not (a1 a2 a3 b)^3".into());
            }
            let alphas = [&letters[0].curve, &letters[1].curve, &letters[2].curve];
            let beta = &letters[3].curve;
            for i in 0..3 {
                for j in i + 1..3 {
                    if inter(alphas[i], alphas[j]) != Some(0) {
                        return Some("star alpha curves must be pairwise disjoint".into());
                    }
                }
                if inter(alphas[i], beta).map(i64::abs) != Some(1) {
                    return Some("each star alpha must meet beta once".into());
                }
            }
            None
        }
        RelationKind::ConjugationDef => {
            if r.rhs.len() != 1 || r.rhs.letters()[0].sign != Sign::Pos {
                return Some("conjugation rhs must be a single positive letter".into());
            }
            if DefinitionTable::split_conjugate(&r.lhs).is_none() {
                return Some("conjugation lhs must be w a w^-1 with a positive".into());
            }
            None
        }
    }
}

/// True iff lhs and rhs act identically on homology and the kind's shape
/// constraint holds. Errors on unknown curve names.
pub fn check_instance(
    r: &RelationInstance,
    table: &CurveTable,
    defs: &DefinitionTable,
) -> Result<bool, RelationError> {
    Ok(explain_instance(r, table, defs)?.is_none())
}

/// As `check_instance`, but reporting the reason for a failure.
pub fn explain_instance(
    r: &RelationInstance,
    table: &CurveTable,
    defs: &DefinitionTable,
) -> Result<Option<String>, RelationError> {
    // The homology action is computed first so unknown curves surface as
    // errors rather than shape violations.
    let ml = act_on_homology(&r.lhs, table, defs)?;
    let mr = act_on_homology(&r.rhs, table, defs)?;
    if let Some(msg) = shape_failure(r, table, defs) {
        return Ok(Some(format!("{}: shape: {msg}", r.name)));
    }
    if ml == mr {
        Ok(None)
    } else {
        Ok(Some(format!("{}: lhs and rhs act differently on homology", r.name)))
    }
}

/// Named relation instances for one genus, in file order.
#[derive(Clone, Default, Debug)]
pub struct Registry {
    by_name: BTreeMap<String, usize>,
    relations: Vec<RelationInstance>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    pub fn insert(&mut self, relation: RelationInstance) {
        self.by_name.insert(relation.name.clone(), self.relations.len());
        self.relations.push(relation);
    }

    pub fn get(&self, name: &str) -> Option<&RelationInstance> {
        self.by_name.get(name).map(|&i| &self.relations[i])
    }

    pub fn require(&self, name: &str) -> Result<&RelationInstance, RelationError> {
        self.get(name).ok_or_else(|| RelationError::Unknown(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationInstance> {
        self.relations.iter()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Definition table assembled from the conjugation relations: the rhs
    /// letter is defined as the lhs word.
    pub fn definitions(&self) -> Result<DefinitionTable, crate::word::DefError> {
        let mut defs = DefinitionTable::new();
        for r in &self.relations {
            if r.kind == RelationKind::ConjugationDef && r.lhs.len() > 1 {
                defs.insert(r.rhs.letters()[0].curve.clone(), r.lhs.clone())?;
            }
        }
        Ok(defs)
    }

    pub fn parse(text: &str) -> Result<Registry, RelationError> {
        let mut registry = Registry::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim().to_string();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| RelationError::Parse { line: line_no, msg };
            let mut fields = FieldParser::new(&line);
            fields.expect_keyword("relation").map_err(&err)?;
            let name = fields.word_token().map_err(&err)?;
            fields.expect_keyword("kind").map_err(&err)?;
            let kind_tag = fields.word_token().map_err(&err)?;
            let kind = RelationKind::from_tag(&kind_tag)
                .ok_or_else(|| err(format!("unknown relation kind {kind_tag:?}")))?;
            fields.expect_keyword("lhs").map_err(&err)?;
            let lhs_text = fields.quoted().map_err(&err)?;
            fields.expect_keyword("rhs").map_err(&err)?;
            let rhs_text = fields.quoted().map_err(&err)?;
            let lhs = Word::parse(&lhs_text).map_err(|e| err(format!("lhs: {e}")))?;
            let rhs = Word::parse(&rhs_text).map_err(|e| err(format!("rhs: {e}")))?;
            registry.insert(RelationInstance::new(&name, kind, lhs, rhs));
        }
        Ok(registry)
    }

    pub fn load(path: &Path) -> Result<Registry, RelationError> {
        let text = std::fs::read_to_string(path).map_err(|source| RelationError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Registry::parse(&text)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            out.push_str(&format!(
                "relation {} kind {} lhs \"{}\" rhs \"{}\"\n",
                r.name,
                r.kind.tag(),
                r.lhs.render(),
                r.rhs.render()
            ));
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    // A '#' inside quotes does not occur in this format.
    line.split('#').next().unwrap_or("")
}

struct FieldParser<'a> {
    rest: &'a str,
}

impl<'a> FieldParser<'a> {
    fn new(line: &'a str) -> FieldParser<'a> {
        FieldParser { rest: line.trim_start() }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), String> {
        let got = self.word_token()?;
        if got == kw {
            Ok(())
        } else {
            Err(format!("expected keyword {kw:?}, found {got:?}"))
        }
    }

    fn word_token(&mut self) -> Result<String, String> {
        let rest = self.rest.trim_start();
        if rest.is_empty() {
            return Err("unexpected end of line".into());
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let (tok, tail) = rest.split_at(end);
        self.rest = tail;
        Ok(tok.to_string())
    }

    fn quoted(&mut self) -> Result<String, String> {
        let rest = self.rest.trim_start();
        let inner = rest
            .strip_prefix('"')
            .ok_or_else(|| "expected opening quote".to_string())?;
        let end = inner.find('"').ok_or_else(|| "unterminated quote".to_string())?;
        self.rest = &inner[end + 1..];
        Ok(inner[..end].to_string())
    }
}

/// Validates every instance of a registry over a table; failures are strings.
pub fn validate_registry(
    registry: &Registry,
    table: &CurveTable,
) -> Result<Vec<String>, RelationError> {
    let defs = registry.definitions()?;
    let mut failures = Vec::new();
    for r in registry.iter() {
        // Unknown-curve failures are data here, not errors.
        match explain_instance(r, table, &defs) {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(msg),
            Err(RelationError::Curve(CurveError::UnknownCurve(name))) => {
                failures.push(format!("{}: unknown curve {name}", r.name));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::HomologyClass;

    fn g2_table() -> CurveTable {
        let mut t = CurveTable::new(2);
        t.insert_class("c1", HomologyClass::new(vec![0, 1, 0, 0]));
        t.insert_class("c2", HomologyClass::new(vec![1, 0, 0, 0]));
        t.insert_class("c3", HomologyClass::new(vec![0, 1, 0, 1]));
        t.insert_class("c4", HomologyClass::new(vec![0, 0, 1, 0]));
        t.insert_class("c5", HomologyClass::new(vec![0, 0, 0, 1]));
        t.insert_class("x", HomologyClass::new(vec![0, 1, 0, -1]));
        t.declare_separating("delta");
        t.declare_disjoint("c1", "c5");
        t
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn signature_constants() {
        assert_eq!(RelationKind::ChainC2.signature_i(), -7);
        assert_eq!(RelationKind::ChainC3.signature_i(), -6);
        assert_eq!(RelationKind::Lantern.signature_i(), 1);
        assert_eq!(RelationKind::Star.signature_i(), -5);
        assert_eq!(RelationKind::Braid.signature_i(), 0);
        assert_eq!(builtin_kinds().len(), 8);
    }

    #[test]
    fn braid_instance_checks() {
        let table = g2_table();
        let defs = DefinitionTable::new();
        let good = RelationInstance::new(
            "braid12",
            RelationKind::Braid,
            w("c1 c2 c1"),
            w("c2 c1 c2"),
        );
        assert!(check_instance(&good, &table, &defs).unwrap());
        // Disjoint pair: shape violation.
        let bad =
            RelationInstance::new("bad", RelationKind::Braid, w("c1 c5 c1"), w("c5 c1 c5"));
        assert!(!check_instance(&bad, &table, &defs).unwrap());
    }

    #[test]
    fn lantern_instance_checks() {
        let table = g2_table();
        let defs = DefinitionTable::new();
        let lantern = RelationInstance::new(
            "lantern_g2",
            RelationKind::Lantern,
            w("delta x c3"),
            w("c1 c1 c5 c5"),
        );
        assert!(check_instance(&lantern, &table, &defs).unwrap());
        // Wrong boundary multiset: homology identity fails.
        let wrong = RelationInstance::new(
            "wrong",
            RelationKind::Lantern,
            w("delta x c3"),
            w("c1 c1 c1 c5"),
        );
        assert!(!check_instance(&wrong, &table, &defs).unwrap());
    }

    #[test]
    fn chain_c2_instance() {
        let table = g2_table();
        let defs = DefinitionTable::new();
        let chain = RelationInstance::new(
            "chain_left",
            RelationKind::ChainC2,
            w("(c1 c2)^6"),
            w("delta"),
        );
        assert!(check_instance(&chain, &table, &defs).unwrap());
    }

    #[test]
    fn registry_file_round_trip() {
        let text = r#"
# genus 2 relations
relation chain_left kind chain2 lhs "(c1 c2)^6" rhs "delta"
relation lantern_g2 kind lantern lhs "delta x c3" rhs "c1 c1 c5 c5"
relation def_t2 kind conjugation lhs "c3 c4 c3^-1" rhs "t2"
"#;
        let registry = Registry::parse(text).unwrap();
        assert_eq!(registry.len(), 3);
        let defs = registry.definitions().unwrap();
        assert!(defs.contains(&"t2".into()));
        let reparsed = Registry::parse(&registry.render()).unwrap();
        assert_eq!(reparsed.len(), 3);
        assert_eq!(reparsed.get("lantern_g2").unwrap().rhs, w("c1 c1 c5 c5"));
        let failures = validate_registry(&registry, &g2_table()).unwrap();
        assert!(failures.is_empty(), "{failures:?}");
    }

    #[test]
    fn registry_reports_unknown_curves() {
        let registry = Registry::parse(
            r#"relation ghost kind chain2 lhs "(c1 nope)^6" rhs "delta""#,
        )
        .unwrap();
        let failures = validate_registry(&registry, &g2_table()).unwrap();
        assert_eq!(failures.len(), 1);
        assert!(failures[0].contains("unknown curve"));
    }
}
