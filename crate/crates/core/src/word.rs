//! Twist letters, words, the word DSL, and combinatorial word operations.
//!
//! A word is a finite sequence of signed Dehn twist letters over an opaque
//! curve-name alphabet. Powers are expanded eagerly: `a^3` is three letters,
//! `a^-2` is two negative letters. The empty word is the identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Exponent of a Dehn twist letter; higher powers are letter repetition.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// Opaque curve identifier, e.g. `c1`, `x2`, `xbar3`, `t2_4`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveName(Arc<str>);

impl CurveName {
    pub fn new(name: &str) -> CurveName {
        CurveName(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True iff the name matches the DSL token grammar `[a-z][a-z0-9_]*`.
    pub fn is_valid_ident(&self) -> bool {
        let mut chars = self.0.chars();
        match chars.next() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
    }
}

impl fmt::Display for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for CurveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for CurveName {
    fn from(s: &str) -> CurveName {
        CurveName::new(s)
    }
}

/// One signed Dehn twist letter.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TwistLetter {
    pub curve: CurveName,
    pub sign: Sign,
}

impl TwistLetter {
    pub fn pos(name: impl Into<CurveName>) -> TwistLetter {
        TwistLetter { curve: name.into(), sign: Sign::Pos }
    }

    pub fn neg(name: impl Into<CurveName>) -> TwistLetter {
        TwistLetter { curve: name.into(), sign: Sign::Neg }
    }

    pub fn inverse(&self) -> TwistLetter {
        TwistLetter { curve: self.curve.clone(), sign: self.sign.flip() }
    }

    pub fn is_inverse_of(&self, other: &TwistLetter) -> bool {
        self.curve == other.curve && self.sign != other.sign
    }
}

impl fmt::Display for TwistLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Pos => write!(f, "{}", self.curve),
            Sign::Neg => write!(f, "{}^-1", self.curve),
        }
    }
}

/// A finite, possibly empty sequence of twist letters.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Word(Vec<TwistLetter>);

impl Word {
    pub fn new(letters: Vec<TwistLetter>) -> Word {
        Word(letters)
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[TwistLetter] {
        &self.0
    }

    pub fn letters_mut(&mut self) -> &mut Vec<TwistLetter> {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TwistLetter> {
        self.0.iter()
    }

    pub fn push(&mut self, letter: TwistLetter) {
        self.0.push(letter);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// The word repeated `n` times.
    pub fn repeat(&self, n: usize) -> Word {
        let mut letters = Vec::with_capacity(self.0.len() * n);
        for _ in 0..n {
            letters.extend_from_slice(&self.0);
        }
        Word(letters)
    }

    /// Reversed sequence with all signs flipped.
    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(TwistLetter::inverse).collect())
    }

    /// Removes adjacent inverse pairs until none remain. Idempotent.
    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<TwistLetter> = Vec::with_capacity(self.0.len());
        for letter in &self.0 {
            if out.last().map_or(false, |top| top.is_inverse_of(letter)) {
                out.pop();
            } else {
                out.push(letter.clone());
            }
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| !w[0].is_inverse_of(&w[1]))
    }

    /// Moves the first `k` letters to the end (`k` may be negative for the
    /// reverse direction; it is taken modulo the length).
    pub fn cyclic_rotate(&self, k: i64) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let n = self.0.len() as i64;
        let k = k.rem_euclid(n) as usize;
        let mut letters = self.0[k..].to_vec();
        letters.extend_from_slice(&self.0[..k]);
        Word(letters)
    }

    /// True iff every letter has sign +1. Defined letters count as positive
    /// twists since each is a conjugate of a positive twist.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.sign == Sign::Pos)
    }

    /// Number of letters, i.e. the count of singular fibers when the word is
    /// a positive relator.
    pub fn letter_count(&self) -> Result<usize, WordError> {
        if self.is_positive() {
            Ok(self.0.len())
        } else {
            let bad = self.0.iter().find(|l| l.sign == Sign::Neg).unwrap();
            Err(WordError::NotPositive { letter: bad.to_string() })
        }
    }

    /// Canonical flat form: space-separated letters with `^-1` suffixes and
    /// no power compression.
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        parts.join(" ")
    }

    /// Parses the word DSL. See the module docs for the grammar.
    pub fn parse(text: &str) -> Result<Word, ParseError> {
        parse_word(text)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromIterator<TwistLetter> for Word {
    fn from_iter<I: IntoIterator<Item = TwistLetter>>(iter: I) -> Word {
        Word(iter.into_iter().collect())
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word is not positive: contains {letter}")]
    NotPositive { letter: String },
}

/// Positivity verdicts at the defined-letter level and after full expansion.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Positivity {
    /// Every letter has sign +1 (defined letters count as positive twists).
    pub raw: bool,
    /// Every letter of the full base-alphabet expansion has sign +1.
    pub expanded: bool,
}

// ---------------------------------------------------------------------------
// DSL parser
// ---------------------------------------------------------------------------

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("syntax error at line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Token {
    Ident(String),
    Int(i64),
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Token,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match c {
                '(' => {
                    self.bump();
                    Token::LParen
                }
                ')' => {
                    self.bump();
                    Token::RParen
                }
                '^' => {
                    self.bump();
                    Token::Caret
                }
                c if c.is_ascii_lowercase() => {
                    let mut name = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' {
                            name.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Token::Ident(name)
                }
                c if c == '-' || c.is_ascii_digit() => {
                    let mut digits = String::new();
                    if c == '-' {
                        digits.push(c);
                        self.bump();
                    }
                    let mut saw_digit = false;
                    while let Some(c) = self.peek() {
                        if c.is_ascii_digit() {
                            saw_digit = true;
                            digits.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if !saw_digit {
                        return Err(self.error("expected digits after '-'"));
                    }
                    let value: i64 = digits
                        .parse()
                        .map_err(|_| self.error(format!("integer out of range: {digits}")))?;
                    Token::Int(value)
                }
                other => return Err(self.error(format!("unexpected character {other:?}"))),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<Spanned>,
    idx: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.tokens.get(self.idx)
    }

    fn error_at(&self, msg: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(s) => ParseError { line: s.line, col: s.col, msg: msg.into() },
            None => {
                let (line, col) = self
                    .tokens
                    .last()
                    .map(|s| (s.line, s.col + 1))
                    .unwrap_or((1, 1));
                ParseError { line, col, msg: msg.into() }
            }
        }
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.tokens.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    /// Parses a power suffix `^<nonzero int>`, if present.
    fn maybe_power(&mut self) -> Result<Option<i64>, ParseError> {
        if matches!(self.peek().map(|s| &s.tok), Some(Token::Caret)) {
            self.next();
            match self.next() {
                Some(Spanned { tok: Token::Int(0), line, col }) => Err(ParseError {
                    line,
                    col,
                    msg: "power 0 is not a meaningful twist power".into(),
                }),
                Some(Spanned { tok: Token::Int(n), .. }) => Ok(Some(n)),
                _ => Err(self.error_at("expected nonzero integer after '^'")),
            }
        } else {
            Ok(None)
        }
    }

    fn parse_group(&mut self) -> Result<Word, ParseError> {
        // Leading '(' already consumed.
        let mut inner = Vec::new();
        loop {
            match self.peek().map(|s| s.tok.clone()) {
                Some(Token::RParen) => {
                    self.next();
                    break;
                }
                Some(_) => {
                    let term = self.parse_term()?;
                    inner.extend(term.0);
                }
                None => return Err(self.error_at("unclosed '('")),
            }
        }
        let word = Word(inner);
        match self.maybe_power()? {
            Some(n) => Ok(apply_power(&word, n)),
            None => Err(self.error_at("a parenthesized word requires a '^<int>' power")),
        }
    }

    fn parse_term(&mut self) -> Result<Word, ParseError> {
        match self.next() {
            Some(Spanned { tok: Token::Ident(name), .. }) => {
                let base = Word(vec![TwistLetter::pos(name.as_str())]);
                match self.maybe_power()? {
                    Some(n) => Ok(apply_power(&base, n)),
                    None => Ok(base),
                }
            }
            Some(Spanned { tok: Token::LParen, .. }) => self.parse_group(),
            Some(s) => Err(ParseError {
                line: s.line,
                col: s.col,
                msg: format!("unexpected token {:?}", s.tok),
            }),
            None => Err(self.error_at("unexpected end of input")),
        }
    }
}

fn apply_power(word: &Word, n: i64) -> Word {
    debug_assert!(n != 0);
    if n > 0 {
        word.repeat(n as usize)
    } else {
        word.invert().repeat((-n) as usize)
    }
}

/// Parses the word DSL: `word := term*`, `term := atom | atom^int |
/// (word)^int`, `atom := [a-z][a-z0-9_]*`, `#` starts a comment.
pub fn parse_word(text: &str) -> Result<Word, ParseError> {
    let tokens = Lexer::new(text).tokens()?;
    let mut parser = Parser { tokens, idx: 0 };
    let mut letters = Vec::new();
    while parser.peek().is_some() {
        let term = parser.parse_term()?;
        letters.extend(term.0);
    }
    Ok(Word(letters))
}

// ---------------------------------------------------------------------------
// Definition tables
// ---------------------------------------------------------------------------

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DefError {
    #[error("unknown defined letter {0}")]
    Unknown(CurveName),
    #[error("cyclic definition through {0}")]
    Cyclic(CurveName),
    #[error("definition of {name} is not a conjugate w a w^-1 of a single positive letter")]
    NotConjugate { name: CurveName },
}

/// Map from defined letter names to their expansion words. Each entry must be
/// a conjugate `w a w^-1` of a single positive letter `a` (these are twists
/// about image curves), and expansion must terminate.
#[derive(Clone, Default, Debug)]
pub struct DefinitionTable {
    entries: BTreeMap<CurveName, Word>,
}

impl DefinitionTable {
    pub fn new() -> DefinitionTable {
        DefinitionTable::default()
    }

    /// Splits a conjugate word `w a w^-1` into `(w, a)`.
    pub fn split_conjugate(word: &Word) -> Option<(Word, TwistLetter)> {
        let n = word.len();
        if n % 2 == 0 {
            return None;
        }
        let half = n / 2;
        let prefix = Word(word.letters()[..half].to_vec());
        let core = word.letters()[half].clone();
        let suffix = Word(word.letters()[half + 1..].to_vec());
        if core.sign == Sign::Pos && suffix == prefix.invert() {
            Some((prefix, core))
        } else {
            None
        }
    }

    pub fn insert(&mut self, name: CurveName, expansion: Word) -> Result<(), DefError> {
        if Self::split_conjugate(&expansion).is_none() {
            return Err(DefError::NotConjugate { name });
        }
        self.entries.insert(name, expansion);
        Ok(())
    }

    pub fn get(&self, name: &CurveName) -> Option<&Word> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &CurveName) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &CurveName> {
        self.entries.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Conjugating prefix and positive core of a defined letter.
    pub fn conjugate_parts(&self, name: &CurveName) -> Option<(Word, TwistLetter)> {
        self.entries.get(name).and_then(Self::split_conjugate)
    }

    fn expand_letter(
        &self,
        letter: &TwistLetter,
        out: &mut Vec<TwistLetter>,
        stack: &mut BTreeSet<CurveName>,
    ) -> Result<(), DefError> {
        match self.entries.get(&letter.curve) {
            None => {
                out.push(letter.clone());
                Ok(())
            }
            Some(expansion) => {
                if !stack.insert(letter.curve.clone()) {
                    return Err(DefError::Cyclic(letter.curve.clone()));
                }
                let expansion = match letter.sign {
                    Sign::Pos => expansion.clone(),
                    Sign::Neg => expansion.invert(),
                };
                for inner in expansion.iter() {
                    self.expand_letter(inner, out, stack)?;
                }
                stack.remove(&letter.curve);
                Ok(())
            }
        }
    }

    /// Replaces each defined letter by its definition word (inverted for
    /// negative occurrences) until only base-alphabet letters remain.
    pub fn expand(&self, word: &Word) -> Result<Word, DefError> {
        let mut out = Vec::with_capacity(word.len());
        let mut stack = BTreeSet::new();
        for letter in word.iter() {
            self.expand_letter(letter, &mut out, &mut stack)?;
        }
        Ok(Word(out))
    }

    /// Positivity verdicts for a word, at the raw and fully expanded level.
    pub fn positivity(&self, word: &Word) -> Result<Positivity, DefError> {
        Ok(Positivity { raw: word.is_positive(), expanded: self.expand(word)?.is_positive() })
    }
}

/// Expands definitions; free function mirroring the operation name.
pub fn expand_definitions(word: &Word, defs: &DefinitionTable) -> Result<Word, DefError> {
    defs.expand(word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    #[test]
    fn parse_plain_and_powers() {
        assert_eq!(w("c1 c2 c1^-1").render(), "c1 c2 c1^-1");
        assert_eq!(w("(c1 c2)^2").render(), "c1 c2 c1 c2");
        // Inverse of a group reverses and flips signs.
        assert_eq!(w("(c5 c4)^-2").render(), "c4^-1 c5^-1 c4^-1 c5^-1");
        assert_eq!(w("a^3").render(), "a a a");
        assert_eq!(w("").render(), "");
        assert_eq!(w("x1 # trailing comment\n c2").render(), "x1 c2");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = Word::parse("c1 c2^0").unwrap_err();
        assert_eq!((err.line, err.col), (1, 7));
        assert!(Word::parse("(c1 c2").is_err());
        assert!(Word::parse("(c1 c2)").is_err());
        assert!(Word::parse("C1").is_err());
        assert!(Word::parse("c1 ^ 2 ^ 3").is_err());
    }

    #[test]
    fn parse_render_round_trip() {
        for text in ["", "c1 c1^-1", "x1", "t2_4 xbar3 w6^-1 delta"] {
            let word = w(text);
            assert_eq!(Word::parse(&word.render()).unwrap(), word);
        }
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(w("c1 c1^-1").free_reduce(), Word::empty());
        assert_eq!(w("c7^-1 c7 c6").free_reduce(), w("c6"));
        assert_eq!(w("c1 c2").free_reduce(), w("c1 c2"));
        // Nested cancellation collapses fully.
        assert_eq!(w("a b b^-1 a^-1").free_reduce(), Word::empty());
        let r = w("a b b^-1 c").free_reduce();
        assert!(r.is_freely_reduced());
        assert_eq!(r, w("a c"));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("c4 e1 c4 f1").invert(), w("f1^-1 c4^-1 e1^-1 c4^-1"));
        assert_eq!(Word::empty().invert(), Word::empty());
        assert_eq!(w("c1^-1").invert(), w("c1"));
        let word = w("c1 c2 x c3");
        assert_eq!(word.concat(&word.invert()).free_reduce(), Word::empty());
    }

    #[test]
    fn rotate_examples() {
        let word = w("c1 c2 x");
        assert_eq!(word.cyclic_rotate(1), w("c2 x c1"));
        assert_eq!(word.cyclic_rotate(0), word);
        assert_eq!(word.cyclic_rotate(3), word);
        assert_eq!(word.cyclic_rotate(-1), w("x c1 c2"));
        assert_eq!(word.cyclic_rotate(1).cyclic_rotate(-1), word);
    }

    #[test]
    fn definitions_expand() {
        let mut defs = DefinitionTable::new();
        defs.insert("d".into(), w("c1 c2 c1^-1")).unwrap();
        defs.insert("r1".into(), w("f1^-1 c4 f1")).unwrap();
        assert_eq!(defs.expand(&w("d")).unwrap(), w("c1 c2 c1^-1"));
        assert_eq!(defs.expand(&w("r1")).unwrap(), w("f1^-1 c4 f1"));
        assert_eq!(defs.expand(&w("c1")).unwrap(), w("c1"));
        // Negative occurrence expands to the inverted definition.
        assert_eq!(defs.expand(&w("d^-1")).unwrap(), w("c1 c2^-1 c1^-1"));
    }

    #[test]
    fn definitions_reject_non_conjugates_and_cycles() {
        let mut defs = DefinitionTable::new();
        assert!(defs.insert("bad".into(), w("c1 c2")).is_err());
        assert!(defs.insert("worse".into(), w("c1 c2^-1 c1^-1")).is_err());
        // A cycle is caught at expansion time.
        let mut cyclic = DefinitionTable::new();
        cyclic.insert("p".into(), w("c1 q c1^-1")).unwrap();
        cyclic.insert("q".into(), w("c2 p c2^-1")).unwrap();
        assert!(matches!(cyclic.expand(&w("p")), Err(DefError::Cyclic(_))));
    }

    #[test]
    fn nested_definitions_expand() {
        let mut defs = DefinitionTable::new();
        defs.insert("d".into(), w("c1 c2 c1^-1")).unwrap();
        defs.insert("u1".into(), w("c3^-1 d c3")).unwrap();
        assert_eq!(defs.expand(&w("u1")).unwrap(), w("c3^-1 c1 c2 c1^-1 c3"));
    }

    #[test]
    fn positivity_verdicts() {
        let mut defs = DefinitionTable::new();
        defs.insert("m".into(), w("c4^-1 c3 c4 c3^-1 c4")).unwrap();
        let report = defs.positivity(&w("c1 m c5")).unwrap();
        assert!(report.raw);
        assert!(!report.expanded);
        let report = defs.positivity(&w("c1 f2^-1")).unwrap();
        assert!(!report.raw);
        assert!(Word::empty().is_positive());
    }

    #[test]
    fn letter_counts() {
        assert_eq!(w("(c1 c2 x c3 c4 c5 c5 c4 c5 c4)^3").letter_count().unwrap(), 30);
        assert!(w("c1 f2^-1").letter_count().is_err());
    }

    #[test]
    fn expansion_commutes_with_invert() {
        let mut defs = DefinitionTable::new();
        defs.insert("d".into(), w("c1 c2 c1^-1")).unwrap();
        let word = w("d c3 d^-1 c4");
        assert_eq!(defs.expand(&word.invert()).unwrap(), defs.expand(&word).unwrap().invert());
    }
}
