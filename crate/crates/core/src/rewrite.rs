//! Derivation scripts: positional application of relation substitutions,
//! cancellations, commutation swaps, braid moves, rotations and definition
//! expansion, with an accumulating signature ledger.
//!
//! Script format (`*.mcgd`, line oriented, `#` comments):
//!
//! ```text
//! genus 2
//! table g2
//! base "((c1 c2)^2 (c5 c4)^-2)^3"
//! base-relation chain_left +1
//! insert chain_right at 4 fwd
//! cancel at 5
//! swap at 3
//! braid at 1 fwd
//! rotate 1
//! expand r occ 0
//! collapse t2 at 3
//! pair c5 at 7
//! power 3
//! assert "c1 c2"
//! ```
//!
//! Positions are 0-based indices into the current letter sequence; free
//! reduction is always an explicit `cancel`, never implicit. The `pair` move
//! splices a letter and its inverse (the inverse of `cancel`); the paper's
//! derivations insert such pairs when renaming conjugations.

use crate::curve::{act_on_homology, CurveError, CurveTable};
use crate::relation::{Registry, RelationError, RelationKind};
use crate::word::{CurveName, DefinitionTable, Sign, TwistLetter, Word};
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Fwd,
    Rev,
}

impl Direction {
    fn tag(self) -> &'static str {
        match self {
            Direction::Fwd => "fwd",
            Direction::Rev => "rev",
        }
    }
}

/// One positional rewriting move.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Move {
    /// Splices relator material reading the relation as an identity word:
    /// `fwd` inserts `rhs^-1 lhs` (net identity, ledger +1), `rev` the
    /// inverse (`lhs^-1 rhs`, ledger -1).
    Insert { rel: String, at: usize, dir: Direction },
    /// Replaces one side of the relation by the other at the position:
    /// `fwd` rewrites lhs -> rhs (ledger -1), `rev` rhs -> lhs (ledger +1).
    Subst { rel: String, at: usize, dir: Direction },
    /// Removes the adjacent inverse pair at the position.
    Cancel { at: usize },
    /// Swaps two adjacent letters whose curves are geometrically disjoint.
    Swap { at: usize },
    /// Rewrites the triple `p q p` to `q p q` (all-positive or all-negative)
    /// for a declared once-intersecting pair.
    Braid { at: usize, dir: Direction },
    /// Cyclic rotation by k (conjugation; legal at relator level only).
    Rotate { k: i64 },
    /// Expands the occ-th occurrence of a defined letter.
    Expand { def: CurveName, occ: usize },
    /// Collapses a literal definition expansion back to the defined letter.
    Collapse { def: CurveName, at: usize },
    /// Splices `letter letter^-1` at the position.
    Pair { letter: TwistLetter, at: usize },
    /// Repeats the whole word n times (the final cubing step).
    Power { n: u32 },
    /// Asserts the current word equals the given one, letter for letter.
    Assert { word: Word },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Insert { rel, at, dir } => write!(f, "insert {rel} at {at} {}", dir.tag()),
            Move::Subst { rel, at, dir } => write!(f, "subst {rel} at {at} {}", dir.tag()),
            Move::Cancel { at } => write!(f, "cancel at {at}"),
            Move::Swap { at } => write!(f, "swap at {at}"),
            Move::Braid { at, dir } => write!(f, "braid at {at} {}", dir.tag()),
            Move::Rotate { k } => write!(f, "rotate {k}"),
            Move::Expand { def, occ } => write!(f, "expand {def} occ {occ}"),
            Move::Collapse { def, at } => write!(f, "collapse {def} at {at}"),
            Move::Pair { letter, at } => write!(f, "pair {letter} at {at}"),
            Move::Power { n } => write!(f, "power {n}"),
            Move::Assert { word } => write!(f, "assert \"{}\"", word.render()),
        }
    }
}

#[derive(Error, Debug)]
pub enum MoveError {
    #[error("position {at} out of bounds for word of length {len}")]
    OutOfBounds { at: usize, len: usize },
    #[error("pattern mismatch at {at}: expected {expected}, found {found}")]
    PatternMismatch { at: usize, expected: String, found: String },
    #[error("letters {a} and {b} are not declared geometrically disjoint")]
    NotDisjoint { a: CurveName, b: CurveName },
    #[error("no unit-pair declaration for braid move on {a} {b}")]
    NotUnitPair { a: CurveName, b: CurveName },
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("unknown defined letter {0}")]
    UnknownDef(CurveName),
    #[error("defined letter {def} has fewer than {occ} occurrences")]
    MissingOccurrence { def: CurveName, occ: usize },
    #[error("power {0} outside 1..=6")]
    BadPower(u32),
    #[error("assert failed: word is\n  {found}\nexpected\n  {expected}")]
    AssertFailed { found: String, expected: String },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Def(#[from] crate::word::DefError),
}

/// One consumed relation with its orientation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LedgerEntry {
    pub relation: String,
    pub kind: RelationKind,
    pub orientation: i64,
}

/// Multiset of consumed relations; the total is the signature of the
/// fibration defined by the derived positive relator.
#[derive(Clone, Default, Debug)]
pub struct SignatureLedger {
    entries: Vec<LedgerEntry>,
}

impl SignatureLedger {
    pub fn new() -> SignatureLedger {
        SignatureLedger::default()
    }

    pub fn push(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// Sum of orientation * I(kind) over all entries.
    pub fn total(&self) -> i64 {
        self.entries.iter().map(|e| e.orientation * e.kind.signature_i()).sum()
    }
}

/// Total signature contribution of a ledger.
pub fn ledger_total(ledger: &SignatureLedger) -> i64 {
    ledger.total()
}

fn check_range(word: &Word, at: usize, need: usize) -> Result<(), MoveError> {
    if at + need > word.len() {
        Err(MoveError::OutOfBounds { at, len: word.len() })
    } else {
        Ok(())
    }
}

fn splice(word: &Word, at: usize, remove: usize, insert: &[TwistLetter]) -> Word {
    let mut letters = word.letters().to_vec();
    letters.splice(at..at + remove, insert.iter().cloned());
    Word::new(letters)
}

fn slice_matches(word: &Word, at: usize, pattern: &Word) -> bool {
    word.letters()[at..at + pattern.len()] == *pattern.letters()
}

/// Applies one move; returns the rewritten word and the ledger entry it
/// contributes, if any.
pub fn apply_move(
    word: &Word,
    mv: &Move,
    registry: &Registry,
    defs: &DefinitionTable,
    table: &CurveTable,
) -> Result<(Word, Option<LedgerEntry>), MoveError> {
    match mv {
        Move::Insert { rel, at, dir } => {
            let r = registry.get(rel).ok_or_else(|| MoveError::UnknownRelation(rel.clone()))?;
            if *at > word.len() {
                return Err(MoveError::OutOfBounds { at: *at, len: word.len() });
            }
            let (material, orientation) = match dir {
                Direction::Fwd => (r.rhs.invert().concat(&r.lhs), 1),
                Direction::Rev => (r.lhs.invert().concat(&r.rhs), -1),
            };
            let out = splice(word, *at, 0, material.letters());
            Ok((out, Some(LedgerEntry { relation: rel.clone(), kind: r.kind, orientation })))
        }
        Move::Subst { rel, at, dir } => {
            let r = registry.get(rel).ok_or_else(|| MoveError::UnknownRelation(rel.clone()))?;
            let (pattern, replacement, orientation) = match dir {
                Direction::Fwd => (&r.lhs, &r.rhs, -1),
                Direction::Rev => (&r.rhs, &r.lhs, 1),
            };
            check_range(word, *at, pattern.len())?;
            if !slice_matches(word, *at, pattern) {
                return Err(MoveError::PatternMismatch {
                    at: *at,
                    expected: pattern.render(),
                    found: Word::new(word.letters()[*at..*at + pattern.len()].to_vec()).render(),
                });
            }
            let out = splice(word, *at, pattern.len(), replacement.letters());
            Ok((out, Some(LedgerEntry { relation: rel.clone(), kind: r.kind, orientation })))
        }
        Move::Cancel { at } => {
            check_range(word, *at, 2)?;
            let (a, b) = (&word.letters()[*at], &word.letters()[*at + 1]);
            if !a.is_inverse_of(b) {
                return Err(MoveError::PatternMismatch {
                    at: *at,
                    expected: "an adjacent inverse pair".into(),
                    found: format!("{a} {b}"),
                });
            }
            Ok((splice(word, *at, 2, &[]), None))
        }
        Move::Swap { at } => {
            check_range(word, *at, 2)?;
            let (a, b) = (&word.letters()[*at], &word.letters()[*at + 1]);
            if !table.are_disjoint(&a.curve, &b.curve, defs) {
                return Err(MoveError::NotDisjoint { a: a.curve.clone(), b: b.curve.clone() });
            }
            let mut letters = word.letters().to_vec();
            letters.swap(*at, *at + 1);
            Ok((Word::new(letters), None))
        }
        Move::Braid { at, .. } => {
            check_range(word, *at, 3)?;
            let triple = &word.letters()[*at..*at + 3];
            let same_sign = triple[0].sign == triple[1].sign && triple[1].sign == triple[2].sign;
            let aba = triple[0].curve == triple[2].curve && triple[0].curve != triple[1].curve;
            if !(same_sign && aba) {
                return Err(MoveError::PatternMismatch {
                    at: *at,
                    expected: "a braid triple p q p of uniform sign".into(),
                    found: Word::new(triple.to_vec()).render(),
                });
            }
            let (p, q) = (&triple[0], &triple[1]);
            if !table.is_unit_pair(&p.curve, &q.curve) {
                return Err(MoveError::NotUnitPair { a: p.curve.clone(), b: q.curve.clone() });
            }
            let out = splice(word, *at, 3, &[q.clone(), p.clone(), q.clone()]);
            Ok((out, None))
        }
        Move::Rotate { k } => Ok((word.cyclic_rotate(*k), None)),
        Move::Expand { def, occ } => {
            let expansion =
                defs.get(def).ok_or_else(|| MoveError::UnknownDef(def.clone()))?.clone();
            let mut seen = 0;
            for (i, letter) in word.iter().enumerate() {
                if &letter.curve == def {
                    if seen == *occ {
                        let material = match letter.sign {
                            Sign::Pos => expansion,
                            Sign::Neg => expansion.invert(),
                        };
                        return Ok((splice(word, i, 1, material.letters()), None));
                    }
                    seen += 1;
                }
            }
            Err(MoveError::MissingOccurrence { def: def.clone(), occ: *occ })
        }
        Move::Collapse { def, at } => {
            let expansion =
                defs.get(def).ok_or_else(|| MoveError::UnknownDef(def.clone()))?.clone();
            check_range(word, *at, expansion.len())?;
            let (pattern_pos, pattern_neg) = (expansion.clone(), expansion.invert());
            let letter = if slice_matches(word, *at, &pattern_pos) {
                TwistLetter::pos(def.as_str())
            } else if slice_matches(word, *at, &pattern_neg) {
                TwistLetter::neg(def.as_str())
            } else {
                return Err(MoveError::PatternMismatch {
                    at: *at,
                    expected: pattern_pos.render(),
                    found: Word::new(word.letters()[*at..*at + expansion.len()].to_vec())
                        .render(),
                });
            };
            Ok((splice(word, *at, expansion.len(), &[letter]), None))
        }
        Move::Pair { letter, at } => {
            if *at > word.len() {
                return Err(MoveError::OutOfBounds { at: *at, len: word.len() });
            }
            Ok((splice(word, *at, 0, &[letter.clone(), letter.inverse()]), None))
        }
        Move::Power { n } => {
            if !(1..=6).contains(n) {
                return Err(MoveError::BadPower(*n));
            }
            Ok((word.repeat(*n as usize), None))
        }
        Move::Assert { word: expected } => {
            if word == expected {
                Ok((word.clone(), None))
            } else {
                Err(MoveError::AssertFailed {
                    found: word.render(),
                    expected: expected.render(),
                })
            }
        }
    }
}

/// A replayable derivation: base relator with its declared ledger entries,
/// then an ordered move list.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub genus: usize,
    /// Curve-table name, e.g. "g4" or "g4rose"; defaults to `g<genus>`.
    pub table: String,
    pub base: Word,
    pub base_entries: Vec<(String, i64)>,
    pub moves: Vec<Move>,
}

impl Derivation {
    /// The final `assert` in the move list, if any.
    pub fn expected_final(&self) -> Option<&Word> {
        self.moves.iter().rev().find_map(|m| match m {
            Move::Assert { word } => Some(word),
            _ => None,
        })
    }
}

#[derive(Error, Debug)]
#[error("derivation step {step} ({mv}): {source}")]
pub struct DerivationError {
    pub step: usize,
    pub mv: String,
    #[source]
    pub source: MoveError,
}

/// Replay output: the final word (freely reduced), the accumulated ledger,
/// and the full trace of intermediate words for audit.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub final_word: Word,
    pub ledger: SignatureLedger,
    pub trace: Vec<Word>,
    /// Indices into `trace` produced by Rotate moves (conjugations).
    pub rotation_steps: Vec<(usize, i64)>,
}

/// Replays a derivation move by move.
pub fn run_derivation(
    d: &Derivation,
    registry: &Registry,
    defs: &DefinitionTable,
    table: &CurveTable,
) -> Result<RunResult, DerivationError> {
    let mut ledger = SignatureLedger::new();
    for (name, orientation) in &d.base_entries {
        let kind = registry
            .get(name)
            .map(|r| r.kind)
            .ok_or_else(|| DerivationError {
                step: 0,
                mv: format!("base-relation {name}"),
                source: MoveError::UnknownRelation(name.clone()),
            })?;
        ledger.push(LedgerEntry { relation: name.clone(), kind, orientation: *orientation });
    }
    let mut word = d.base.clone();
    let mut trace = vec![word.clone()];
    let mut rotation_steps = Vec::new();
    for (step, mv) in d.moves.iter().enumerate() {
        let (next, entry) =
            apply_move(&word, mv, registry, defs, table).map_err(|source| DerivationError {
                step,
                mv: mv.to_string(),
                source,
            })?;
        if let Some(entry) = entry {
            ledger.push(entry);
        }
        if let Move::Rotate { k } = mv {
            rotation_steps.push((trace.len(), *k));
        }
        word = next;
        trace.push(word.clone());
    }
    Ok(RunResult { final_word: word.free_reduce(), ledger, trace, rotation_steps })
}

/// Homology verdict for a replayed derivation.
#[derive(Clone, Debug)]
pub struct HomologyVerdict {
    pub ok: bool,
    pub failing_step: Option<usize>,
}

/// True iff every trace word acts as the identity on homology (each step of
/// a relator derivation is itself a closed relator), and rotate steps are
/// conjugations: M(after) = P M(before) P^-1 with P the matrix of the
/// rotated prefix.
pub fn verify_derivation_homology(
    result: &RunResult,
    table: &CurveTable,
    defs: &DefinitionTable,
) -> Result<HomologyVerdict, CurveError> {
    for (i, word) in result.trace.iter().enumerate() {
        let m = act_on_homology(word, table, defs)?;
        if !m.is_identity() {
            return Ok(HomologyVerdict { ok: false, failing_step: Some(i) });
        }
    }
    for &(after_idx, k) in &result.rotation_steps {
        let before = &result.trace[after_idx - 1];
        let after = &result.trace[after_idx];
        if before.is_empty() {
            continue;
        }
        let kk = k.rem_euclid(before.len() as i64) as usize;
        let prefix = Word::new(before.letters()[..kk].to_vec());
        let p = act_on_homology(&prefix, table, defs)?;
        let mb = act_on_homology(before, table, defs)?;
        let ma = act_on_homology(after, table, defs)?;
        if ma != p.mul(&mb).mul(&p.symplectic_inverse()) {
            return Ok(HomologyVerdict { ok: false, failing_step: Some(after_idx) });
        }
    }
    Ok(HomologyVerdict { ok: true, failing_step: None })
}

// ---------------------------------------------------------------------------
// Script file format
// ---------------------------------------------------------------------------

#[derive(Error, Debug)]
pub enum ScriptError {
    #[error("script parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn parse_letter(tok: &str) -> Option<TwistLetter> {
    let (name, sign) = match tok.strip_suffix("^-1") {
        Some(name) => (name, Sign::Neg),
        None => (tok, Sign::Pos),
    };
    let letter = TwistLetter { curve: CurveName::new(name), sign };
    if letter.curve.is_valid_ident() {
        Some(letter)
    } else {
        None
    }
}

impl Derivation {
    pub fn parse(text: &str) -> Result<Derivation, ScriptError> {
        let mut genus = None;
        let mut table = None;
        let mut base = None;
        let mut base_entries = Vec::new();
        let mut moves = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = if raw.contains('"') {
                raw.trim()
            } else {
                raw.split('#').next().unwrap_or("").trim()
            };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| ScriptError::Parse { line: line_no, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let quoted = || -> Result<String, ScriptError> {
                let start = line.find('"').ok_or_else(|| err("expected quoted word".into()))?;
                let rest = &line[start + 1..];
                let end = rest.find('"').ok_or_else(|| err("unterminated quote".into()))?;
                Ok(rest[..end].to_string())
            };
            let parse_at = |toks: &[&str], kw_idx: usize| -> Result<usize, ScriptError> {
                if toks.get(kw_idx) != Some(&"at") {
                    return Err(err("expected `at <index>`".into()));
                }
                toks.get(kw_idx + 1)
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| err("expected nonnegative index after `at`".into()))
            };
            let parse_dir = |tok: Option<&&str>| -> Result<Direction, ScriptError> {
                match tok {
                    Some(&"fwd") => Ok(Direction::Fwd),
                    Some(&"rev") => Ok(Direction::Rev),
                    _ => Err(err("expected `fwd` or `rev`".into())),
                }
            };
            match toks[0] {
                "genus" => {
                    genus = Some(
                        toks.get(1)
                            .and_then(|s| s.parse::<usize>().ok())
                            .ok_or_else(|| err("expected `genus <int>`".into()))?,
                    );
                }
                "table" => {
                    table = Some(
                        toks.get(1)
                            .ok_or_else(|| err("expected `table <name>`".into()))?
                            .to_string(),
                    );
                }
                "base" => {
                    let text = quoted()?;
                    base = Some(
                        Word::parse(&text).map_err(|e| err(format!("base word: {e}")))?,
                    );
                }
                "base-relation" => {
                    let name = toks
                        .get(1)
                        .ok_or_else(|| err("expected relation name".into()))?
                        .to_string();
                    let orient = match toks.get(2) {
                        Some(&"+1") => 1,
                        Some(&"-1") => -1,
                        _ => return Err(err("expected orientation +1 or -1".into())),
                    };
                    base_entries.push((name, orient));
                }
                "insert" | "subst" => {
                    let rel = toks
                        .get(1)
                        .ok_or_else(|| err("expected relation name".into()))?
                        .to_string();
                    let at = parse_at(&toks, 2)?;
                    let dir = parse_dir(toks.get(4))?;
                    moves.push(if toks[0] == "insert" {
                        Move::Insert { rel, at, dir }
                    } else {
                        Move::Subst { rel, at, dir }
                    });
                }
                "cancel" => moves.push(Move::Cancel { at: parse_at(&toks, 1)? }),
                "swap" => moves.push(Move::Swap { at: parse_at(&toks, 1)? }),
                "braid" => {
                    let at = parse_at(&toks, 1)?;
                    let dir = parse_dir(toks.get(3))?;
                    moves.push(Move::Braid { at, dir });
                }
                "rotate" => {
                    let k = toks
                        .get(1)
                        .and_then(|s| s.parse::<i64>().ok())
                        .ok_or_else(|| err("expected `rotate <int>`".into()))?;
                    moves.push(Move::Rotate { k });
                }
                "expand" => {
                    let def = CurveName::new(
                        toks.get(1).ok_or_else(|| err("expected defined letter".into()))?,
                    );
                    if toks.get(2) != Some(&"occ") {
                        return Err(err("expected `occ <index>`".into()));
                    }
                    let occ = toks
                        .get(3)
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| err("expected occurrence index".into()))?;
                    moves.push(Move::Expand { def, occ });
                }
                "collapse" => {
                    let def = CurveName::new(
                        toks.get(1).ok_or_else(|| err("expected defined letter".into()))?,
                    );
                    let at = parse_at(&toks, 2)?;
                    moves.push(Move::Collapse { def, at });
                }
                "pair" => {
                    let letter = toks
                        .get(1)
                        .and_then(|t| parse_letter(t))
                        .ok_or_else(|| err("expected letter (name or name^-1)".into()))?;
                    let at = parse_at(&toks, 2)?;
                    moves.push(Move::Pair { letter, at });
                }
                "power" => {
                    let n = toks
                        .get(1)
                        .and_then(|s| s.parse::<u32>().ok())
                        .ok_or_else(|| err("expected `power <n>`".into()))?;
                    moves.push(Move::Power { n });
                }
                "assert" => {
                    let text = quoted()?;
                    let word =
                        Word::parse(&text).map_err(|e| err(format!("assert word: {e}")))?;
                    moves.push(Move::Assert { word });
                }
                other => return Err(err(format!("unknown move {other:?}"))),
            }
        }
        let genus = genus.ok_or(ScriptError::Parse { line: 0, msg: "missing genus".into() })?;
        let base = base.ok_or(ScriptError::Parse { line: 0, msg: "missing base".into() })?;
        Ok(Derivation {
            genus,
            table: table.unwrap_or_else(|| format!("g{genus}")),
            base,
            base_entries,
            moves,
        })
    }

    pub fn load(path: &Path) -> Result<Derivation, ScriptError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScriptError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Derivation::parse(&text)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("genus {}\n", self.genus));
        out.push_str(&format!("table {}\n", self.table));
        out.push_str(&format!("base \"{}\"\n", self.base.render()));
        for (name, orient) in &self.base_entries {
            out.push_str(&format!(
                "base-relation {name} {}\n",
                if *orient > 0 { "+1" } else { "-1" }
            ));
        }
        for mv in &self.moves {
            out.push_str(&format!("{mv}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::HomologyClass;
    use crate::relation::RelationInstance;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn setup() -> (CurveTable, Registry, DefinitionTable) {
        let mut t = CurveTable::new(2);
        t.insert_class("c1", HomologyClass::new(vec![0, 1, 0, 0]));
        t.insert_class("c2", HomologyClass::new(vec![1, 0, 0, 0]));
        t.insert_class("c3", HomologyClass::new(vec![0, 1, 0, 1]));
        t.insert_class("c4", HomologyClass::new(vec![0, 0, 1, 0]));
        t.insert_class("c5", HomologyClass::new(vec![0, 0, 0, 1]));
        t.insert_class("x", HomologyClass::new(vec![0, 1, 0, -1]));
        t.declare_separating("delta");
        for (a, b) in [("c1", "c3"), ("c1", "c4"), ("c1", "c5"), ("c2", "c4"), ("c2", "c5"),
                       ("c3", "c5"), ("delta", "c1"), ("delta", "c2"), ("delta", "c4"),
                       ("delta", "c5"), ("x", "c1"), ("x", "c5")] {
            t.declare_disjoint(a, b);
        }
        for (a, b) in [("c1", "c2"), ("c2", "c3"), ("c3", "c4"), ("c4", "c5")] {
            t.declare_unit(a, b);
        }
        let mut registry = Registry::new();
        registry.insert(RelationInstance::new(
            "chain_right",
            RelationKind::ChainC2,
            w("(c5 c4)^6"),
            w("delta"),
        ));
        registry.insert(RelationInstance::new(
            "lantern_g2",
            RelationKind::Lantern,
            w("delta x c3"),
            w("c1 c1 c5 c5"),
        ));
        registry.insert(RelationInstance::new(
            "def_t2",
            RelationKind::ConjugationDef,
            w("c3 c4 c3^-1"),
            w("t2"),
        ));
        let defs = registry.definitions().unwrap();
        (t, registry, defs)
    }

    #[test]
    fn cancel_and_swap_and_braid() {
        let (t, reg, defs) = setup();
        let word = w("c5^-1 c5 c4");
        let (word, e) = apply_move(&word, &Move::Cancel { at: 0 }, &reg, &defs, &t).unwrap();
        assert!(e.is_none());
        assert_eq!(word, w("c4"));

        let word = w("c1 c4");
        let (word, _) = apply_move(&word, &Move::Swap { at: 0 }, &reg, &defs, &t).unwrap();
        assert_eq!(word, w("c4 c1"));
        // c3 c4 intersect once: swap refused.
        let err = apply_move(&w("c3 c4"), &Move::Swap { at: 0 }, &reg, &defs, &t).unwrap_err();
        assert!(matches!(err, MoveError::NotDisjoint { .. }));

        let word = w("c2 c1 c2");
        let (word, _) = apply_move(
            &word,
            &Move::Braid { at: 0, dir: Direction::Fwd },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c1 c2 c1"));
        // All-negative braid triple.
        let (word, _) = apply_move(
            &w("c1^-1 c2^-1 c1^-1"),
            &Move::Braid { at: 0, dir: Direction::Fwd },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c2^-1 c1^-1 c2^-1"));
        // No unit declaration: refused.
        let err = apply_move(
            &w("c1 c4 c1"),
            &Move::Braid { at: 0, dir: Direction::Fwd },
            &reg,
            &defs,
            &t,
        )
        .unwrap_err();
        assert!(matches!(err, MoveError::NotUnitPair { .. }));
    }

    #[test]
    fn insert_and_subst_orientations() {
        let (t, reg, defs) = setup();
        // Insert fwd splices rhs^-1 lhs and contributes +1.
        let (word, entry) = apply_move(
            &w("c1 c2"),
            &Move::Insert { rel: "lantern_g2".into(), at: 1, dir: Direction::Fwd },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c1 c5^-1 c5^-1 c1^-1 c1^-1 delta x c3 c2"));
        let entry = entry.unwrap();
        assert_eq!(entry.orientation, 1);
        assert_eq!(entry.kind, RelationKind::Lantern);
        // Subst rev rewrites rhs -> lhs with +1.
        let (word, entry) = apply_move(
            &w("c4 c1 c1 c5 c5"),
            &Move::Subst { rel: "lantern_g2".into(), at: 1, dir: Direction::Rev },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c4 delta x c3"));
        assert_eq!(entry.unwrap().orientation, 1);
        // Substituting fwd then rev at the same position is a word no-op and
        // cancels in the ledger.
        let start = w("delta x c3");
        let (mid, e1) = apply_move(
            &start,
            &Move::Subst { rel: "lantern_g2".into(), at: 0, dir: Direction::Fwd },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        let (back, e2) = apply_move(
            &mid,
            &Move::Subst { rel: "lantern_g2".into(), at: 0, dir: Direction::Rev },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(back, start);
        assert_eq!(e1.unwrap().orientation + e2.unwrap().orientation, 0);
    }

    #[test]
    fn expand_collapse_pair() {
        let (t, reg, defs) = setup();
        let (word, _) = apply_move(
            &w("c1 t2 t2^-1"),
            &Move::Expand { def: "t2".into(), occ: 0 },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c1 c3 c4 c3^-1 t2^-1"));
        let (word, _) = apply_move(
            &word,
            &Move::Expand { def: "t2".into(), occ: 0 },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c1 c3 c4 c3^-1 c3 c4^-1 c3^-1"));
        let (word, _) = apply_move(
            &word,
            &Move::Collapse { def: "t2".into(), at: 1 },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c1 t2 c3 c4^-1 c3^-1"));
        let (word, _) = apply_move(
            &word,
            &Move::Pair { letter: TwistLetter::pos("c5"), at: 2 },
            &reg,
            &defs,
            &t,
        )
        .unwrap();
        assert_eq!(word, w("c1 t2 c5 c5^-1 c3 c4^-1 c3^-1"));
    }

    #[test]
    fn script_round_trip_and_replay() {
        let (t, reg, defs) = setup();
        let text = r#"
genus 2
table g2
base "delta^-1 (c5 c4)^4 delta (c4^-1 c5^-1)^4"
base-relation chain_right +1
base-relation chain_right -1
insert lantern_g2 at 0 rev
assert "c3^-1 x^-1 delta^-1 c1 c1 c5 c5 delta^-1 (c5 c4)^4 delta (c4^-1 c5^-1)^4"
"#;
        let d = Derivation::parse(text).unwrap();
        assert_eq!(d.genus, 2);
        assert_eq!(d.base_entries.len(), 2);
        let reparsed = Derivation::parse(&d.render()).unwrap();
        assert_eq!(reparsed.moves, d.moves);
        let result = run_derivation(&d, &reg, &defs, &t).unwrap();
        // +1 - 1 (base) + (-1) (rev insert) on I values: chain2 cancels, one
        // negative lantern remains.
        assert_eq!(result.ledger.total(), -1);
        let verdict = verify_derivation_homology(&result, &t, &defs).unwrap();
        assert!(verdict.ok, "failing step {:?}", verdict.failing_step);
    }

    #[test]
    fn move_errors_carry_step_context() {
        let (t, reg, defs) = setup();
        let d = Derivation {
            genus: 2,
            table: "g2".into(),
            base: w("c1 c2"),
            base_entries: vec![],
            moves: vec![Move::Cancel { at: 0 }],
        };
        let err = run_derivation(&d, &reg, &defs, &t).unwrap_err();
        assert_eq!(err.step, 0);
        assert!(matches!(err.source, MoveError::PatternMismatch { .. }));
    }
}
