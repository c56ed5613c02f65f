//! Freely reduced words over a signed alphabet.
//!
//! Words are immutable value objects storing generator indices only; the
//! [`Alphabet`] carries the printable names. One word type serves every free
//! group in play, whatever its alphabet.

use std::fmt;

use crate::error::Error;

/// A generator index with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: u32,
    inv: bool,
}

impl Letter {
    pub fn new(gen: u32, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn positive(gen: u32) -> Self {
        Letter { gen, inv: false }
    }

    pub fn negative(gen: u32) -> Self {
        Letter { gen, inv: true }
    }

    pub fn gen(self) -> u32 {
        self.gen
    }

    pub fn is_inverse(self) -> bool {
        self.inv
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }

    /// True when `self · other` cancels.
    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inv != other.inv
    }

    /// All signed letters over an alphabet of the given size, positive first.
    pub fn all(alphabet_size: usize) -> impl Iterator<Item = Letter> {
        (0..alphabet_size as u32)
            .flat_map(|g| [Letter::positive(g), Letter::negative(g)].into_iter())
    }
}

/// A freely reduced word; the empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn generator(gen: u32) -> Self {
        Word::letter(Letter::positive(gen))
    }

    /// Free reduction of a raw letter sequence; the inverse pair `x x⁻¹`
    /// collapses until no pair remains. Idempotent.
    pub fn reduce(raw: &[Letter]) -> Word {
        let mut letters: Vec<Letter> = Vec::with_capacity(raw.len());
        for &l in raw {
            push_reduced(&mut letters, l);
        }
        Word { letters }
    }

    /// `reduce` with an alphabet-range check on every letter.
    pub fn reduce_checked(raw: &[Letter], alphabet_size: usize) -> Result<Word, Error> {
        for &l in raw {
            if l.gen() as usize >= alphabet_size {
                return Err(Error::LetterOutOfRange {
                    gen: l.gen(),
                    alphabet_size,
                });
            }
        }
        Ok(Word::reduce(raw))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<u32> {
        self.letters.iter().map(|l| l.gen()).max()
    }

    pub fn fits_alphabet(&self, alphabet_size: usize) -> bool {
        self.max_gen().is_none_or(|g| (g as usize) < alphabet_size)
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        Word { letters }
    }

    /// Reversed sequence with flipped signs; `w · w⁻¹ = 1`.
    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `w^k` for any integer exponent.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically
    /// reduced. Returns `(core, conjugator)`.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut lo = 0usize;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo].cancels(self.letters[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        let core = Word {
            letters: self.letters[lo..hi].to_vec(),
        };
        let conj = Word {
            letters: self.letters[..lo].to_vec(),
        };
        (core, conj)
    }

    /// The unique primitive root: `w = root^exponent` with `root` not a
    /// proper power. Undefined on the empty word.
    pub fn primitive_root(&self) -> Result<(Word, u32), Error> {
        if self.is_empty() {
            return Err(Error::EmptyWordRoot);
        }
        let (core, conj) = self.cyclic_reduce();
        let n = core.len();
        // Largest exponent e | n such that the core is a repetition of its
        // length-n/e prefix.
        for e in (1..=n).rev() {
            if n % e != 0 {
                continue;
            }
            let plen = n / e;
            let prefix = &core.letters[..plen];
            if core.letters.chunks(plen).all(|c| c == prefix) {
                let croot = Word {
                    letters: prefix.to_vec(),
                };
                let root = conj.concat(&croot).concat(&conj.invert());
                return Ok((root, e as u32));
            }
        }
        unreachable!("e = 1 always matches");
    }

    /// True iff the two words commute.
    pub fn commute(&self, other: &Word) -> bool {
        let direct = self.concat(other) == other.concat(self);
        debug_assert_eq!(direct, self.commute_by_roots(other));
        direct
    }

    /// Root-based commutation test: nontrivial words commute iff they are
    /// powers of a common primitive root (up to inversion).
    pub(crate) fn commute_by_roots(&self, other: &Word) -> bool {
        if self.is_empty() || other.is_empty() {
            return true;
        }
        let (r1, _) = self.primitive_root().expect("nonempty");
        let (r2, _) = other.primitive_root().expect("nonempty");
        r1 == r2 || r1 == r2.invert()
    }
}

fn push_reduced(letters: &mut Vec<Letter>, l: Letter) {
    if letters.last().is_some_and(|last| last.cancels(l)) {
        letters.pop();
    } else {
        letters.push(l);
    }
}

/// Printable generator names; words themselves store indices only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Alphabet, String> {
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(format!("invalid generator name `{name}`"));
            }
            if name == "1" || names[..i].contains(name) {
                return Err(format!("duplicate generator name `{name}`"));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn of_size(n: usize) -> Alphabet {
        // x0, x1, ... synthetic names for basis alphabets.
        Alphabet {
            names: (0..n).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, gen: u32) -> &str {
        &self.names[gen as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// A copy with one extra generator appended (fresh name).
    pub fn extended(&self, extra: &str) -> Alphabet {
        let mut names = self.names.clone();
        let mut candidate = extra.to_string();
        while names.contains(&candidate) {
            candidate.push('_');
        }
        names.push(candidate);
        Alphabet { names }
    }

    /// Parses the surface syntax: whitespace-separated letters, each `name`
    /// or `name^-1`; the literal `1` denotes the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, String> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.is_empty() {
            return Err("empty word text; write `1` for the identity".to_string());
        }
        if tokens == ["1"] {
            return Ok(Word::identity());
        }
        let mut raw = Vec::with_capacity(tokens.len());
        for tok in tokens {
            raw.push(self.parse_letter(tok)?);
        }
        Ok(Word::reduce(&raw))
    }

    pub fn parse_letter(&self, tok: &str) -> Result<Letter, String> {
        let (name, inv) = match tok.strip_suffix("^-1") {
            Some(base) => (base, true),
            None => (tok, false),
        };
        match self.index_of(name) {
            Some(gen) => Ok(Letter::new(gen, inv)),
            None => Err(format!("unknown generator `{name}`")),
        }
    }

    /// Inverse of `parse_word`; the identity prints as `1`.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters()
            .iter()
            .map(|l| {
                if l.is_inverse() {
                    format!("{}^-1", self.name(l.gen()))
                } else {
                    self.name(l.gen()).to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(vec!["a".into(), "b".into()]).unwrap()
    }

    fn w(text: &str) -> Word {
        ab().parse_word(text).unwrap()
    }

    #[test]
    fn reduce_cancels() {
        assert_eq!(w("a a^-1"), Word::identity());
        assert_eq!(w("a b b^-1 a"), w("a a"));
        assert_eq!(w("b a b^-1"), w("b a b^-1"));
    }

    #[test]
    fn reduce_checked_rejects_out_of_range() {
        let raw = [Letter::positive(5)];
        assert_eq!(
            Word::reduce_checked(&raw, 2),
            Err(Error::LetterOutOfRange {
                gen: 5,
                alphabet_size: 2
            })
        );
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w("a b").concat(&w("b^-1 a")), w("a a"));
        let v = w("a b a^-1");
        assert_eq!(v.concat(&Word::identity()), v);
        assert_eq!(v.concat(&v.invert()), Word::identity());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(w("a b").invert(), w("b^-1 a^-1"));
        assert_eq!(Word::identity().invert(), Word::identity());
        assert_eq!(w("b a b^-1").invert(), w("b a^-1 b^-1"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        assert_eq!(w("b a b^-1").cyclic_reduce(), (w("a"), w("b")));
        assert_eq!(w("a b").cyclic_reduce(), (w("a b"), Word::identity()));
        assert_eq!(
            Word::identity().cyclic_reduce(),
            (Word::identity(), Word::identity())
        );
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(w("a b a b").primitive_root().unwrap(), (w("a b"), 2));
        assert_eq!(w("a").primitive_root().unwrap(), (w("a"), 1));
        // Conjugated square: b a a b⁻¹ = (b a b⁻¹)².
        assert_eq!(
            w("b a a b^-1").primitive_root().unwrap(),
            (w("b a b^-1"), 2)
        );
        assert_eq!(
            Word::identity().primitive_root(),
            Err(Error::EmptyWordRoot)
        );
    }

    #[test]
    fn primitive_root_of_power() {
        for text in ["a b", "b a b^-1", "a b a^-1 b^-1"] {
            let base = w(text);
            let (root, exp) = base.primitive_root().unwrap();
            for k in 1..=5i64 {
                let (r, e) = base.pow(k).primitive_root().unwrap();
                assert_eq!(r, root);
                assert_eq!(e, exp * k as u32);
            }
        }
    }

    #[test]
    fn commute_examples() {
        assert!(w("a b").commute(&w("a b a b")));
        assert!(!w("a").commute(&w("b")));
        assert!(Word::identity().commute(&w("b a")));
    }

    #[test]
    fn commute_agrees_with_direct_comparison_exhaustively() {
        // All pairs of reduced words of length ≤ 4 over two letters.
        let words = enumerate_reduced(2, 4);
        for u in &words {
            for v in &words {
                let direct = u.concat(v) == v.concat(u);
                assert_eq!(u.commute(v), direct, "u={u:?} v={v:?}");
                assert_eq!(u.commute_by_roots(v), direct);
            }
        }
    }

    #[test]
    fn reduce_idempotent_exhaustive_small() {
        // Raw sequences of length ≤ 5 over three letters.
        let letters: Vec<Letter> = Letter::all(3).collect();
        let mut stack = vec![Vec::new()];
        while let Some(raw) = stack.pop() {
            let reduced = Word::reduce(&raw);
            assert_eq!(Word::reduce(reduced.letters()), reduced);
            if raw.len() < 5 {
                for &l in &letters {
                    let mut next = raw.clone();
                    next.push(l);
                    stack.push(next);
                }
            }
        }
    }

    pub(crate) fn enumerate_reduced(alphabet_size: usize, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut frontier = vec![Word::identity()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for word in &frontier {
                for l in Letter::all(alphabet_size) {
                    if word.letters().last().is_some_and(|last| last.cancels(l)) {
                        continue;
                    }
                    let mut letters = word.letters().to_vec();
                    letters.push(l);
                    next.push(Word { letters });
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}
