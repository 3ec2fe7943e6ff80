//! Script builder: applies moves to live state through the rewrite engine
//! and records them, so the emitted scripts replay exactly.

use mcg_core::curve::CurveTable;
use mcg_core::relation::Registry;
use mcg_core::rewrite::{apply_move, Derivation, Direction, Move, SignatureLedger};
use mcg_core::word::{CurveName, DefinitionTable, Sign, TwistLetter, Word};

pub struct Builder<'a> {
    pub table: &'a CurveTable,
    pub registry: &'a Registry,
    pub defs: DefinitionTable,
    pub word: Word,
    pub moves: Vec<Move>,
    pub ledger: SignatureLedger,
    base: Word,
    base_entries: Vec<(String, i64)>,
}

pub fn letters(text: &str) -> Vec<TwistLetter> {
    Word::parse(text).unwrap().letters().to_vec()
}

impl<'a> Builder<'a> {
    pub fn new(
        table: &'a CurveTable,
        registry: &'a Registry,
        base: Word,
        base_entries: Vec<(&str, i64)>,
    ) -> Builder<'a> {
        let defs = registry.definitions().expect("bad definitions");
        Builder {
            table,
            registry,
            defs,
            word: base.clone(),
            moves: Vec::new(),
            ledger: SignatureLedger::new(),
            base,
            base_entries: base_entries
                .into_iter()
                .map(|(n, o)| (n.to_string(), o))
                .collect(),
        }
    }

    pub fn apply(&mut self, mv: Move) {
        match apply_move(&self.word, &mv, self.registry, &self.defs, self.table) {
            Ok((next, entry)) => {
                if let Some(e) = entry {
                    self.ledger.push(e);
                }
                self.word = next;
                self.moves.push(mv);
            }
            Err(e) => panic!(
                "builder: move {} failed: {e}\n  word ({} letters): {}",
                mv,
                self.word.len(),
                self.word.render()
            ),
        }
    }

    pub fn insert(&mut self, rel: &str, at: usize, dir: Direction) {
        self.apply(Move::Insert { rel: rel.into(), at, dir });
    }

    pub fn subst(&mut self, rel: &str, at: usize, dir: Direction) {
        self.apply(Move::Subst { rel: rel.into(), at, dir });
    }

    pub fn cancel(&mut self, at: usize) {
        self.apply(Move::Cancel { at });
    }

    pub fn swap(&mut self, at: usize) {
        self.apply(Move::Swap { at });
    }

    pub fn braid(&mut self, at: usize) {
        self.apply(Move::Braid { at, dir: Direction::Fwd });
    }

    pub fn rotate(&mut self, k: i64) {
        self.apply(Move::Rotate { k });
    }

    pub fn expand(&mut self, def: &str, occ: usize) {
        self.apply(Move::Expand { def: CurveName::new(def), occ });
    }

    pub fn collapse(&mut self, def: &str, at: usize) {
        self.apply(Move::Collapse { def: CurveName::new(def), at });
    }

    pub fn pair(&mut self, letter: &str, at: usize) {
        let l = if let Some(name) = letter.strip_suffix("^-1") {
            TwistLetter::neg(name)
        } else {
            TwistLetter::pos(letter)
        };
        self.apply(Move::Pair { letter: l, at });
    }

    pub fn assert_state(&mut self, text: &str) {
        let word = Word::parse(text).unwrap();
        self.apply(Move::Assert { word });
    }

    pub fn assert_word(&mut self, word: &Word) {
        self.apply(Move::Assert { word: word.clone() });
    }

    // ----- searching -----

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn letter_at(&self, i: usize) -> &TwistLetter {
        &self.word.letters()[i]
    }

    /// Index of the occ-th occurrence (0-based) of a letter, by name+sign.
    pub fn find(&self, letter: &str, occ: usize) -> usize {
        let (name, sign) = match letter.strip_suffix("^-1") {
            Some(n) => (n, Sign::Neg),
            None => (letter, Sign::Pos),
        };
        let mut seen = 0;
        for (i, l) in self.word.iter().enumerate() {
            if l.curve.as_str() == name && l.sign == sign {
                if seen == occ {
                    return i;
                }
                seen += 1;
            }
        }
        panic!(
            "builder: no occurrence {occ} of {letter} in {}",
            self.word.render()
        );
    }

    /// Start of the occ-th occurrence of a letter sequence.
    pub fn find_seq(&self, pattern: &str, occ: usize) -> usize {
        let pat = letters(pattern);
        let mut seen = 0;
        let n = self.word.len();
        if pat.len() <= n {
            for i in 0..=n - pat.len() {
                if self.word.letters()[i..i + pat.len()] == pat[..] {
                    if seen == occ {
                        return i;
                    }
                    seen += 1;
                }
            }
        }
        panic!(
            "builder: no occurrence {occ} of [{pattern}] in {}",
            self.word.render()
        );
    }

    // ----- macros (compound move sequences) -----

    /// Moves the letter at `from` leftward to index `to` by adjacent swaps.
    pub fn ferry_left(&mut self, from: usize, to: usize) {
        assert!(to <= from);
        for i in (to..from).rev() {
            self.swap(i);
        }
    }

    /// Moves the letter at `from` rightward so it ends at index `to`.
    pub fn ferry_right(&mut self, from: usize, to: usize) {
        assert!(from <= to);
        for i in from..to {
            self.swap(i);
        }
    }

    /// Cancels the leftmost adjacent inverse pair until none remain.
    pub fn reduce(&mut self) {
        loop {
            let pos = (0..self.word.len().saturating_sub(1))
                .find(|&i| self.word.letters()[i].is_inverse_of(&self.word.letters()[i + 1]));
            match pos {
                Some(i) => self.cancel(i),
                None => break,
            }
        }
    }

    /// Conjugation flip at `i`: rewrites the triple (p q p^-1) as the braid
    /// conjugate with the roles exchanged. All four sign cases:
    ///   a b a^-1    -> b^-1 a b        a b^-1 a^-1 -> b^-1 a^-1 b
    ///   a^-1 b a    -> b a b^-1        a^-1 b^-1 a -> b a^-1 b^-1
    pub fn flip(&mut self, i: usize) {
        let p = self.letter_at(i).clone();
        let q = self.letter_at(i + 1).clone();
        assert_eq!(self.letter_at(i + 2).curve, p.curve, "flip needs p q p^-1");
        assert_ne!(self.letter_at(i + 2).sign, p.sign, "flip needs p q p^-1");
        let qname = q.curve.as_str().to_string();
        match (p.sign, q.sign) {
            (Sign::Pos, Sign::Pos) => {
                self.pair(&format!("{qname}^-1"), i);
                self.braid(i + 1);
                self.cancel(i + 3);
            }
            (Sign::Pos, Sign::Neg) => {
                self.pair(&format!("{qname}^-1"), i + 3);
                self.braid(i + 1);
                self.cancel(i);
            }
            (Sign::Neg, Sign::Pos) => {
                self.pair(&qname, i + 3);
                self.braid(i + 1);
                self.cancel(i);
            }
            (Sign::Neg, Sign::Neg) => {
                self.pair(&qname, i);
                self.braid(i + 1);
                self.cancel(i + 3);
            }
        }
    }

    /// Wraps a letter in a fresh inverse pair and collapses the conjugate to
    /// a defined letter: used for renames like x2 c5 -> c5 xbar2.
    pub fn collapse_here(&mut self, def: &str, at: usize) {
        self.collapse(def, at);
    }

    pub fn finish(self, genus: usize, table_name: &str) -> (Derivation, Word, SignatureLedger) {
        let mut moves = self.moves;
        moves.push(Move::Assert { word: self.word.clone() });
        let derivation = Derivation {
            genus,
            table: table_name.to_string(),
            base: self.base,
            base_entries: self.base_entries,
            moves,
        };
        (derivation, self.word, self.ledger)
    }
}
