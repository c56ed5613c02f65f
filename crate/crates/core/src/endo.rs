//! Endomorphisms of free groups given by generator images.

use crate::error::Error;
use crate::limits::Limits;
use crate::stallings::StallingsAutomaton;
use crate::words::{Letter, Word};

/// An endomorphism of a free group, one image word per positive generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeEndo {
    alphabet_size: usize,
    images: Vec<Word>,
}

impl FreeEndo {
    pub fn new(images: Vec<Word>, alphabet_size: usize) -> Result<FreeEndo, Error> {
        if images.len() != alphabet_size {
            return Err(Error::AlphabetMismatch {
                expected: alphabet_size,
                found: images.len(),
            });
        }
        for img in &images {
            if let Some(g) = img.max_gen() {
                if g as usize >= alphabet_size {
                    return Err(Error::LetterOutOfRange {
                        gen: g,
                        alphabet_size,
                    });
                }
            }
        }
        Ok(FreeEndo {
            alphabet_size,
            images,
        })
    }

    pub fn identity(alphabet_size: usize) -> FreeEndo {
        FreeEndo {
            alphabet_size,
            images: (0..alphabet_size as u32).map(Word::generator).collect(),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, gen: u32) -> &Word {
        &self.images[gen as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(g, img)| img.letters() == [Letter::positive(g as u32)])
    }

    pub fn total_letters(&self) -> usize {
        self.images.iter().map(Word::len).sum()
    }

    /// Homomorphic extension to a word, freely reduced.
    pub fn apply(&self, w: &Word) -> Result<Word, Error> {
        if !w.fits_alphabet(self.alphabet_size) {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet_size,
                found: w.max_gen().unwrap_or(0) as usize + 1,
            });
        }
        let mut out = Word::identity();
        for &l in w.letters() {
            let img = self.image(l.gen());
            out = if l.is_inverse() {
                out.concat(&img.invert())
            } else {
                out.concat(img)
            };
        }
        Ok(out)
    }

    /// `self` followed by `other`: `apply(compose(φ,ψ), w) = ψ(φ(w))`.
    pub fn compose(&self, other: &FreeEndo, limits: &Limits) -> Result<FreeEndo, Error> {
        if self.alphabet_size != other.alphabet_size {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet_size,
                found: other.alphabet_size,
            });
        }
        let mut images = Vec::with_capacity(self.alphabet_size);
        let mut total = 0usize;
        for img in &self.images {
            let composed = other.apply(img)?;
            total += composed.len();
            if total > limits.max_endo_letters {
                return Err(Error::ResourceLimit(format!(
                    "endomorphism image length exceeded {} letters while composing",
                    limits.max_endo_letters
                )));
            }
            images.push(composed);
        }
        FreeEndo::new(images, self.alphabet_size)
    }

    /// `φ^k` by square-and-multiply over the memoized binary tower.
    pub fn power(&self, k: u64, limits: &Limits) -> Result<FreeEndo, Error> {
        let mut result = FreeEndo::identity(self.alphabet_size);
        let mut square = self.clone();
        let mut rest = k;
        loop {
            if rest & 1 == 1 {
                result = result.compose(&square, limits)?;
            }
            rest >>= 1;
            if rest == 0 {
                return Ok(result);
            }
            square = square.compose(&square, limits)?;
        }
    }

    /// Stallings automaton of `Im(φ^k)`, generated by the iterated images of
    /// the generators.
    pub fn image_automaton(&self, k: u64, limits: &Limits) -> Result<StallingsAutomaton, Error> {
        assert!(k >= 1, "image power must be positive");
        let mut gens: Vec<Word> = self.images.clone();
        for _ in 1..k {
            let mut total = 0usize;
            let next: Result<Vec<Word>, Error> = gens
                .iter()
                .map(|g| {
                    let img = self.apply(g)?;
                    total += img.len();
                    if total > limits.max_endo_letters {
                        return Err(Error::ResourceLimit(format!(
                            "image generators exceeded {} letters at power {k}",
                            limits.max_endo_letters
                        )));
                    }
                    Ok(img)
                })
                .collect();
            gens = next?;
        }
        Ok(StallingsAutomaton::from_generators(&gens, self.alphabet_size))
    }
}

/// Signed count of occurrences of one generator.
pub fn exponent_sum(w: &Word, gen: u32) -> i64 {
    w.letters()
        .iter()
        .filter(|l| l.gen() == gen)
        .map(|l| if l.is_inverse() { -1 } else { 1 })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn ab() -> Alphabet {
        Alphabet::new(vec!["a".into(), "b".into()]).unwrap()
    }

    fn w(text: &str) -> Word {
        ab().parse_word(text).unwrap()
    }

    fn endo(a: &str, b: &str) -> FreeEndo {
        FreeEndo::new(vec![w(a), w(b)], 2).unwrap()
    }

    #[test]
    fn apply_examples() {
        // a ↦ aba, b ↦ 1 sends every word to a power of aba.
        let phi = endo("a b a", "1");
        assert_eq!(phi.apply(&w("a b a")).unwrap(), w("a b a a b a"));
        assert_eq!(phi.apply(&Word::identity()).unwrap(), Word::identity());

        let conj = endo("b a b^-1", "1");
        assert_eq!(conj.apply(&w("a")).unwrap(), w("b a b^-1"));
    }

    #[test]
    fn compose_and_power() {
        let limits = Limits::default();
        let phi = endo("a b a", "1");
        let id = FreeEndo::identity(2);
        assert_eq!(id.power(5, &limits).unwrap(), id);
        assert_eq!(phi.compose(&id, &limits).unwrap(), phi);

        let phi2 = phi.power(2, &limits).unwrap();
        assert_eq!(phi2.image(0), &w("a b a a b a"));
        assert_eq!(phi2.image(1), &Word::identity());

        // power agrees with iterated application
        let sample = w("a b a^-1");
        for k in 0..5u64 {
            let pk = phi.power(k, &limits).unwrap();
            let mut iterated = sample.clone();
            for _ in 0..k {
                iterated = phi.apply(&iterated).unwrap();
            }
            assert_eq!(pk.apply(&sample).unwrap(), iterated);
        }
    }

    #[test]
    fn homomorphism_law() {
        let phi = endo("a b", "b a b^-1");
        for u in ["a b", "b^-1 a", "a a b^-1"] {
            for v in ["b b", "a^-1 b a", "1"] {
                let u = w(u);
                let v = w(v);
                assert_eq!(
                    phi.apply(&u.concat(&v)).unwrap(),
                    phi.apply(&u).unwrap().concat(&phi.apply(&v).unwrap())
                );
            }
        }
    }

    #[test]
    fn image_automata() {
        let limits = Limits::default();
        let phi = endo("a b a", "1");
        let im1 = phi.image_automaton(1, &limits).unwrap();
        assert_eq!(im1.rank(), 1);
        assert!(im1.contains(&w("a b a")));

        let id = FreeEndo::identity(2);
        assert_eq!(id.image_automaton(3, &limits).unwrap().rank(), 2);

        let vanish = endo("1", "1");
        assert_eq!(vanish.image_automaton(1, &limits).unwrap().rank(), 0);
    }

    #[test]
    fn descending_image_chain() {
        let limits = Limits::default();
        let phi = endo("a b a", "1");
        for k in 1..4u64 {
            let big = phi.image_automaton(k, &limits).unwrap();
            let small = phi.image_automaton(k + 1, &limits).unwrap();
            for b in small.basis() {
                assert!(big.contains(&b));
            }
        }
    }

    #[test]
    fn exponent_sums() {
        assert_eq!(exponent_sum(&w("a b a^-1 a"), 0), 1);
        assert_eq!(exponent_sum(&w("b"), 0), 0);
        assert_eq!(exponent_sum(&w("a a a"), 0), 3);
    }

    #[test]
    fn length_guard_aborts_runaway_power() {
        let limits = Limits {
            max_endo_letters: 100,
            ..Limits::default()
        };
        let phi = endo("a b a", "1");
        assert!(matches!(
            phi.power(20, &limits),
            Err(Error::ResourceLimit(_))
        ));
    }
}
