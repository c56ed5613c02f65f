//! Finitely generated virtually free groups in coset-decomposition form.
//!
//! A group is given as a disjoint union `G = F b₁ ∪ … ∪ F bₘ` over a free
//! normal subgroup `F = F_A`, with rewriting relations `bᵢ a = u_{ia} bᵢ`
//! and `bᵢ bⱼ = v_{ij} b_{r_ij}`. Free groups are the degenerate case
//! `m = 1`, so every downstream algorithm has a single code path.

use crate::endo::FreeEndo;
use crate::error::Error;
use crate::limits::Limits;
use crate::stallings::StallingsAutomaton;
use crate::words::{Alphabet, Letter, Word};

/// Normal form `f · bᵢ` of a group element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GElement {
    pub word: Word,
    pub coset: usize,
}

impl GElement {
    pub fn new(word: Word, coset: usize) -> GElement {
        GElement { word, coset }
    }

    pub fn free(word: Word) -> GElement {
        GElement { word, coset: 0 }
    }

    pub fn identity() -> GElement {
        GElement {
            word: Word::identity(),
            coset: 0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty() && self.coset == 0
    }
}

/// A virtually free group presentation in decomposition form.
///
/// Tables are stored complete, with the identity-coset rows and columns
/// synthesized at construction; coset 0 is the identity coset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VFPresentation {
    alphabet: Alphabet,
    coset_names: Vec<String>,
    twist: Vec<Vec<Word>>,      // twist[i][a] = u_{ia}
    prod_word: Vec<Vec<Word>>,  // prod_word[i][j] = v_{ij}
    prod_coset: Vec<Vec<usize>>, // prod_coset[i][j] = r_{ij}
}

impl VFPresentation {
    /// Free group: a single identity coset and empty tables.
    pub fn free(alphabet: Alphabet) -> VFPresentation {
        let n = alphabet.size();
        VFPresentation {
            alphabet,
            coset_names: vec!["1".to_string()],
            twist: vec![(0..n as u32).map(Word::generator).collect()],
            prod_word: vec![vec![Word::identity()]],
            prod_coset: vec![vec![0]],
        }
    }

    /// Builds a presentation from the non-identity rows of the tables.
    ///
    /// `twist[i][a]` and `(prod_word, prod_coset)[i][j]` are indexed by
    /// non-identity cosets `i, j ∈ 1..m`; the identity rows are synthesized.
    pub fn new(
        alphabet: Alphabet,
        coset_names: Vec<String>,
        twist_rows: Vec<Vec<Word>>,
        prod_rows: Vec<Vec<(Word, usize)>>,
    ) -> Result<VFPresentation, Error> {
        let n = alphabet.size();
        let m = coset_names.len();
        if twist_rows.len() != m - 1 || prod_rows.len() != m - 1 {
            return Err(Error::Internal("table rows do not match coset count".into()));
        }
        let mut twist = vec![(0..n as u32).map(Word::generator).collect::<Vec<_>>()];
        for row in twist_rows {
            if row.len() != n {
                return Err(Error::Internal("twist row length mismatch".into()));
            }
            twist.push(row);
        }
        let mut prod_word = vec![Vec::new(); m];
        let mut prod_coset = vec![Vec::new(); m];
        // Row 0: b₁ = 1, so 1 · bⱼ = bⱼ.
        for j in 0..m {
            prod_word[0].push(Word::identity());
            prod_coset[0].push(j);
        }
        for (i, row) in prod_rows.into_iter().enumerate() {
            if row.len() != m - 1 {
                return Err(Error::Internal("product row length mismatch".into()));
            }
            // Column 0: bᵢ · 1 = bᵢ.
            prod_word[i + 1].push(Word::identity());
            prod_coset[i + 1].push(i + 1);
            for (v, r) in row {
                if r >= m {
                    return Err(Error::CosetOutOfRange { coset: r, count: m });
                }
                prod_word[i + 1].push(v);
                prod_coset[i + 1].push(r);
            }
        }
        Ok(VFPresentation {
            alphabet,
            coset_names,
            twist,
            prod_word,
            prod_coset,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn free_rank(&self) -> usize {
        self.alphabet.size()
    }

    pub fn coset_count(&self) -> usize {
        self.coset_names.len()
    }

    pub fn is_free(&self) -> bool {
        self.coset_count() == 1
    }

    pub fn coset_name(&self, i: usize) -> &str {
        &self.coset_names[i]
    }

    pub fn coset_index(&self, name: &str) -> Option<usize> {
        self.coset_names.iter().position(|n| n == name)
    }

    pub fn twist_word(&self, coset: usize, gen: u32) -> &Word {
        &self.twist[coset][gen as usize]
    }

    pub fn product_rule(&self, i: usize, j: usize) -> (&Word, usize) {
        (&self.prod_word[i][j], self.prod_coset[i][j])
    }

    /// The twist homomorphism `τᵢ : a ↦ u_{ia}` as a free endomorphism.
    pub fn twist_endo(&self, coset: usize) -> FreeEndo {
        FreeEndo::new(self.twist[coset].clone(), self.free_rank())
            .expect("twist tables are validated words")
    }

    pub fn identity_element(&self) -> GElement {
        GElement::identity()
    }

    /// Normal form of a product: push `bᵢ` across the second word via the
    /// twist table, then resolve `bᵢ bⱼ`.
    pub fn mult(&self, g1: &GElement, g2: &GElement) -> GElement {
        let twisted = self
            .twist_endo(g1.coset)
            .apply(&g2.word)
            .expect("elements share the presentation alphabet");
        let (v, r) = self.product_rule(g1.coset, g2.coset);
        GElement {
            word: g1.word.concat(&twisted).concat(v),
            coset: r,
        }
    }

    /// The coset inverse to `i`: the unique `j` with `r_{ij} = 0`.
    pub fn inverse_coset(&self, i: usize) -> usize {
        (0..self.coset_count())
            .find(|&j| self.prod_coset[i][j] == 0)
            .expect("validated presentations have inverse cosets")
    }

    /// `g⁻¹` in normal form: `(f bᵢ)⁻¹ = τⱼ((f·v_{ij})⁻¹) bⱼ` where `r_{ij} = 0`.
    pub fn inverse(&self, g: &GElement) -> GElement {
        let j = self.inverse_coset(g.coset);
        let (v, _) = self.product_rule(g.coset, j);
        let back = self
            .twist_endo(j)
            .apply(&g.word.concat(v).invert())
            .expect("elements share the presentation alphabet");
        GElement {
            word: back,
            coset: j,
        }
    }

    pub fn element(&self, word: Word, coset: usize) -> Result<GElement, Error> {
        if coset >= self.coset_count() {
            return Err(Error::CosetOutOfRange {
                coset,
                count: self.coset_count(),
            });
        }
        if !word.fits_alphabet(self.free_rank()) {
            return Err(Error::LetterOutOfRange {
                gen: word.max_gen().unwrap_or(0),
                alphabet_size: self.free_rank(),
            });
        }
        Ok(GElement { word, coset })
    }

    pub fn format_element(&self, g: &GElement) -> String {
        if g.coset == 0 {
            self.alphabet.format_word(&g.word)
        } else if g.word.is_empty() {
            self.coset_name(g.coset).to_string()
        } else {
            format!(
                "{} {}",
                self.alphabet.format_word(&g.word),
                self.coset_name(g.coset)
            )
        }
    }

    /// The single-letter group generators: free letters, then coset
    /// representatives `bᵢ` for `i ≥ 1`.
    pub fn group_generators(&self) -> Vec<GElement> {
        let mut gens: Vec<GElement> = (0..self.free_rank() as u32)
            .map(|g| GElement::free(Word::generator(g)))
            .collect();
        for i in 1..self.coset_count() {
            gens.push(GElement::new(Word::identity(), i));
        }
        gens
    }

    /// Structural checks plus a finite associativity spot-check; returns
    /// diagnostics rather than aborting.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        let m = self.coset_count();
        let n = self.free_rank();
        if self.coset_names[0] != "1" {
            diags.push("coset 0 must be named `1`".to_string());
        }
        for (i, name) in self.coset_names.iter().enumerate() {
            if i > 0 && self.coset_names[..i].contains(name) {
                diags.push(format!("duplicate coset name `{name}`"));
            }
            if i > 0 && self.alphabet.index_of(name).is_some() {
                diags.push(format!("coset name `{name}` collides with a generator"));
            }
        }
        for i in 0..m {
            for a in 0..n {
                if !self.twist[i][a].fits_alphabet(n) {
                    diags.push(format!(
                        "twist word for coset {} and letter {} uses letters outside the alphabet",
                        self.coset_name(i),
                        self.alphabet.name(a as u32)
                    ));
                }
            }
            for j in 0..m {
                if self.prod_coset[i][j] >= m {
                    diags.push(format!(
                        "coset index out of range in product rule for ({}, {})",
                        self.coset_name(i),
                        self.coset_name(j)
                    ));
                }
                if !self.prod_word[i][j].fits_alphabet(n) {
                    diags.push(format!(
                        "product word for ({}, {}) uses letters outside the alphabet",
                        self.coset_name(i),
                        self.coset_name(j)
                    ));
                }
            }
        }
        if !diags.is_empty() {
            return diags;
        }
        // Every coset needs an inverse coset.
        for i in 0..m {
            if !(0..m).any(|j| self.prod_coset[i][j] == 0) {
                diags.push(format!("coset {} has no inverse coset", self.coset_name(i)));
            }
        }
        // Twist maps must extend to automorphisms of F: surjective on the
        // rose (index 1, full rank), hence bijective since F_n is Hopfian.
        for i in 1..m {
            let span = StallingsAutomaton::from_generators(&self.twist[i], n);
            if span.rank() != n || !span.is_complete() || span.vertex_count() != 1 {
                diags.push(format!(
                    "twist map of coset {} is not an automorphism of the free part",
                    self.coset_name(i)
                ));
            }
        }
        if !diags.is_empty() {
            return diags;
        }
        // Associativity spot-check on single-letter word parts.
        let mut parts: Vec<Word> = vec![Word::identity()];
        parts.extend(Letter::all(n).map(Word::letter));
        let mut failures = 0usize;
        'outer: for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for wa in &parts {
                        for wb in &parts {
                            for wc in &parts {
                                let g1 = GElement::new(wa.clone(), i);
                                let g2 = GElement::new(wb.clone(), j);
                                let g3 = GElement::new(wc.clone(), k);
                                let left = self.mult(&self.mult(&g1, &g2), &g3);
                                let right = self.mult(&g1, &self.mult(&g2, &g3));
                                if left != right {
                                    diags.push(format!(
                                        "associativity fails on ({}) ({}) ({})",
                                        self.format_element(&g1),
                                        self.format_element(&g2),
                                        self.format_element(&g3)
                                    ));
                                    failures += 1;
                                    if failures >= 5 {
                                        break 'outer;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        diags
    }
}

/// An endomorphism of a virtually free group: images of the free letters and
/// of the coset representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GEndo {
    letter_images: Vec<GElement>,
    // coset_images[i] is the image of bᵢ; entry 0 is the identity.
    coset_images: Vec<GElement>,
}

impl GEndo {
    pub fn new(
        pres: &VFPresentation,
        letter_images: Vec<GElement>,
        mut coset_images: Vec<GElement>,
    ) -> Result<GEndo, Error> {
        if letter_images.len() != pres.free_rank() {
            return Err(Error::AlphabetMismatch {
                expected: pres.free_rank(),
                found: letter_images.len(),
            });
        }
        if coset_images.len() == pres.coset_count() - 1 {
            coset_images.insert(0, GElement::identity());
        }
        if coset_images.len() != pres.coset_count() {
            return Err(Error::CosetOutOfRange {
                coset: coset_images.len(),
                count: pres.coset_count(),
            });
        }
        Ok(GEndo {
            letter_images,
            coset_images,
        })
    }

    /// Wraps a free endomorphism as a `GEndo` on a free presentation.
    pub fn from_free(endo: &FreeEndo) -> GEndo {
        GEndo {
            letter_images: endo
                .images()
                .iter()
                .map(|w| GElement::free(w.clone()))
                .collect(),
            coset_images: vec![GElement::identity()],
        }
    }

    pub fn identity(pres: &VFPresentation) -> GEndo {
        GEndo {
            letter_images: (0..pres.free_rank() as u32)
                .map(|g| GElement::free(Word::generator(g)))
                .collect(),
            coset_images: (0..pres.coset_count())
                .map(|i| GElement::new(Word::identity(), i))
                .collect(),
        }
    }

    pub fn letter_image(&self, gen: u32) -> &GElement {
        &self.letter_images[gen as usize]
    }

    pub fn coset_image(&self, coset: usize) -> &GElement {
        &self.coset_images[coset]
    }

    /// When every image lies in the identity coset, the underlying free
    /// endomorphism.
    pub fn as_free(&self, pres: &VFPresentation) -> Option<FreeEndo> {
        if self.letter_images.iter().any(|g| g.coset != 0) {
            return None;
        }
        FreeEndo::new(
            self.letter_images.iter().map(|g| g.word.clone()).collect(),
            pres.free_rank(),
        )
        .ok()
    }
}

/// Homomorphic image of `g` in normal form.
pub fn endo_apply(
    pres: &VFPresentation,
    endo: &GEndo,
    g: &GElement,
    limits: &Limits,
) -> Result<GElement, Error> {
    let mut acc = GElement::identity();
    for &l in g.word.letters() {
        let img = endo.letter_image(l.gen());
        let img = if l.is_inverse() {
            pres.inverse(img)
        } else {
            img.clone()
        };
        acc = pres.mult(&acc, &img);
        if acc.word.len() > limits.max_word_letters {
            return Err(Error::ResourceLimit(format!(
                "image word exceeded {} letters",
                limits.max_word_letters
            )));
        }
    }
    let out = pres.mult(&acc, endo.coset_image(g.coset));
    if out.word.len() > limits.max_word_letters {
        return Err(Error::ResourceLimit(format!(
            "image word exceeded {} letters",
            limits.max_word_letters
        )));
    }
    Ok(out)
}

/// Iterated application `g · φ^k`.
pub fn endo_apply_iter(
    pres: &VFPresentation,
    endo: &GEndo,
    g: &GElement,
    k: u64,
    limits: &Limits,
) -> Result<GElement, Error> {
    let mut cur = g.clone();
    for _ in 0..k {
        cur = endo_apply(pres, endo, &cur, limits)?;
    }
    Ok(cur)
}

/// `φ^k` materialized by iterated application to the generator images.
pub fn endo_power(
    pres: &VFPresentation,
    endo: &GEndo,
    k: u64,
    limits: &Limits,
) -> Result<GEndo, Error> {
    let mut result = GEndo::identity(pres);
    for _ in 0..k {
        let letter_images: Result<Vec<GElement>, Error> = result
            .letter_images
            .iter()
            .map(|g| endo_apply(pres, endo, g, limits))
            .collect();
        let coset_images: Result<Vec<GElement>, Error> = result
            .coset_images
            .iter()
            .map(|g| endo_apply(pres, endo, g, limits))
            .collect();
        result = GEndo {
            letter_images: letter_images?,
            coset_images: coset_images?,
        };
    }
    Ok(result)
}

/// Verifies every presentation relation on the assigned images; diagnostics
/// name the violated relation.
pub fn endo_check(pres: &VFPresentation, endo: &GEndo, limits: &Limits) -> Vec<String> {
    let mut diags = Vec::new();
    if endo.letter_images.len() != pres.free_rank()
        || endo.coset_images.len() != pres.coset_count()
    {
        diags.push("image counts do not match the presentation".to_string());
        return diags;
    }
    if !endo.coset_images[0].is_identity() {
        diags.push("image of the identity coset must be the identity".to_string());
    }
    let m = pres.coset_count();
    let n = pres.free_rank();
    let apply_word = |w: &Word| -> Result<GElement, Error> {
        endo_apply(pres, endo, &GElement::free(w.clone()), limits)
    };
    for i in 1..m {
        for a in 0..n as u32 {
            // (bᵢ a)φ = (u_{ia} bᵢ)φ
            let left = pres.mult(endo.coset_image(i), endo.letter_image(a));
            let right = match apply_word(pres.twist_word(i, a)) {
                Ok(u) => pres.mult(&u, endo.coset_image(i)),
                Err(e) => {
                    diags.push(format!("resource error while checking twist relation: {e}"));
                    continue;
                }
            };
            if left != right {
                diags.push(format!(
                    "twist relation {} {} = {} {} is not preserved",
                    pres.coset_name(i),
                    pres.alphabet().name(a),
                    pres.alphabet().format_word(pres.twist_word(i, a)),
                    pres.coset_name(i)
                ));
            }
        }
        for j in 1..m {
            // (bᵢ bⱼ)φ = (v_{ij} b_{r_ij})φ
            let (v, r) = pres.product_rule(i, j);
            let left = pres.mult(endo.coset_image(i), endo.coset_image(j));
            let right = match apply_word(v) {
                Ok(v) => pres.mult(&v, endo.coset_image(r)),
                Err(e) => {
                    diags.push(format!("resource error while checking product relation: {e}"));
                    continue;
                }
            };
            if left != right {
                diags.push(format!(
                    "product relation {} {} = {} {} is not preserved",
                    pres.coset_name(i),
                    pres.coset_name(j),
                    pres.alphabet().format_word(v),
                    pres.coset_name(r)
                ));
            }
        }
    }
    diags
}

/// Restriction of `φ` to an invariant subgroup of the free part, expressed
/// over the subgroup's basis alphabet.
pub fn restrict_to_subgroup(
    pres: &VFPresentation,
    endo: &GEndo,
    subgroup: &StallingsAutomaton,
    limits: &Limits,
) -> Result<FreeEndo, Error> {
    let basis = subgroup.basis();
    let mut images = Vec::with_capacity(basis.len());
    for b in &basis {
        let img = endo_apply(pres, endo, &GElement::free(b.clone()), limits)?;
        if img.coset != 0 {
            return Err(Error::InvarianceViolation(format!(
                "image of a basis word leaves the free part (coset {})",
                pres.coset_name(img.coset)
            )));
        }
        if !subgroup.contains(&img.word) {
            return Err(Error::InvarianceViolation(
                "image of a basis word leaves the subgroup".to_string(),
            ));
        }
        images.push(subgroup.rewrite_in_basis(&img.word)?);
    }
    FreeEndo::new(images, basis.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// D_∞ = ⟨x, t | t² = 1, t x t⁻¹ = x⁻¹⟩ over F = ⟨x⟩.
    pub(crate) fn dihedral() -> VFPresentation {
        let alphabet = Alphabet::new(vec!["x".into()]).unwrap();
        let x_inv = alphabet.parse_word("x^-1").unwrap();
        VFPresentation::new(
            alphabet,
            vec!["1".into(), "t".into()],
            vec![vec![x_inv]],
            vec![vec![(Word::identity(), 0)]],
        )
        .unwrap()
    }

    fn xw(p: &VFPresentation, text: &str) -> Word {
        p.alphabet().parse_word(text).unwrap()
    }

    #[test]
    fn dihedral_validates() {
        assert!(dihedral().validate().is_empty());
    }

    #[test]
    fn free_presentation_validates() {
        let p = VFPresentation::free(Alphabet::new(vec!["a".into(), "b".into()]).unwrap());
        assert!(p.validate().is_empty());
        assert!(p.is_free());
    }

    #[test]
    fn bad_coset_index_is_diagnosed() {
        let alphabet = Alphabet::new(vec!["x".into()]).unwrap();
        let x_inv = alphabet.parse_word("x^-1").unwrap();
        let p = VFPresentation::new(
            alphabet,
            vec!["1".into(), "t".into()],
            vec![vec![x_inv]],
            vec![vec![(Word::identity(), 5)]],
        );
        assert!(matches!(p, Err(Error::CosetOutOfRange { .. })));
    }

    #[test]
    fn dihedral_multiplication() {
        let p = dihedral();
        // (x t)(x t) = x (t x t) = x x⁻¹ = 1.
        let xt = GElement::new(xw(&p, "x"), 1);
        assert_eq!(p.mult(&xt, &xt), GElement::identity());
        // t x = x⁻¹ t.
        let t = GElement::new(Word::identity(), 1);
        let x = GElement::free(xw(&p, "x"));
        assert_eq!(p.mult(&t, &x), GElement::new(xw(&p, "x^-1"), 1));

        let g = GElement::new(xw(&p, "x x"), 1);
        assert_eq!(p.mult(&g, &p.identity_element()), g);
        assert_eq!(p.mult(&g, &p.inverse(&g)), GElement::identity());
    }

    #[test]
    fn dihedral_inverse() {
        let p = dihedral();
        assert_eq!(p.inverse(&GElement::identity()), GElement::identity());
        // (x t)⁻¹ = x t because (x t)² = 1.
        let xt = GElement::new(xw(&p, "x"), 1);
        assert_eq!(p.inverse(&xt), xt);
        let w2 = GElement::free(xw(&p, "x x"));
        assert_eq!(p.inverse(&w2), GElement::free(xw(&p, "x^-1 x^-1")));
    }

    #[test]
    fn endo_apply_examples() {
        let p = dihedral();
        let limits = Limits::default();
        let id = GEndo::identity(&p);
        let g = GElement::new(xw(&p, "x x"), 1);
        assert_eq!(endo_apply(&p, &id, &g, &limits).unwrap(), g);

        // φ: x ↦ x, t ↦ x t sends t to x t.
        let phi = GEndo::new(
            &p,
            vec![GElement::free(xw(&p, "x"))],
            vec![GElement::new(xw(&p, "x"), 1)],
        )
        .unwrap();
        let t = GElement::new(Word::identity(), 1);
        assert_eq!(
            endo_apply(&p, &phi, &t, &limits).unwrap(),
            GElement::new(xw(&p, "x"), 1)
        );
    }

    #[test]
    fn endo_check_examples() {
        let p = dihedral();
        let limits = Limits::default();
        assert!(endo_check(&p, &GEndo::identity(&p), &limits).is_empty());

        // x ↦ x, t ↦ 1 breaks t x t⁻¹ = x⁻¹.
        let bad = GEndo::new(
            &p,
            vec![GElement::free(xw(&p, "x"))],
            vec![GElement::identity()],
        )
        .unwrap();
        assert!(!endo_check(&p, &bad, &limits).is_empty());

        // x ↦ 1, t ↦ t vanishes on the free part and is consistent.
        let vanish_f = GEndo::new(
            &p,
            vec![GElement::identity()],
            vec![GElement::new(Word::identity(), 1)],
        )
        .unwrap();
        assert!(endo_check(&p, &vanish_f, &limits).is_empty());
    }

    #[test]
    fn endo_apply_is_homomorphic() {
        let p = dihedral();
        let limits = Limits::default();
        let phi = GEndo::new(
            &p,
            vec![GElement::free(xw(&p, "x"))],
            vec![GElement::new(xw(&p, "x x"), 1)],
        )
        .unwrap();
        assert!(endo_check(&p, &phi, &limits).is_empty());
        let samples = [
            GElement::identity(),
            GElement::free(xw(&p, "x")),
            GElement::new(xw(&p, "x^-1 x^-1"), 1),
            GElement::new(xw(&p, "x x x"), 1),
        ];
        for g in &samples {
            for h in &samples {
                let lhs = endo_apply(&p, &phi, &p.mult(g, h), &limits).unwrap();
                let rhs = p.mult(
                    &endo_apply(&p, &phi, g, &limits).unwrap(),
                    &endo_apply(&p, &phi, h, &limits).unwrap(),
                );
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn restriction_round_trip() {
        let alphabet = Alphabet::new(vec!["a".into(), "b".into()]).unwrap();
        let p = VFPresentation::free(alphabet);
        let limits = Limits::default();
        // S = ⟨a², b, a b a⁻¹⟩ is invariant under a ↦ a, b ↦ b².
        let phi = GEndo::new(
            &p,
            vec![
                GElement::free(xw(&p, "a")),
                GElement::free(xw(&p, "b b")),
            ],
            vec![],
        )
        .unwrap();
        let sub = StallingsAutomaton::from_generators(
            &[xw(&p, "a a"), xw(&p, "b"), xw(&p, "a b a^-1")],
            2,
        );
        let restricted = restrict_to_subgroup(&p, &phi, &sub, &limits).unwrap();
        assert_eq!(restricted.alphabet_size(), 3);
        // Evaluating each image back into F reproduces φ on the basis.
        for (k, basis_word) in sub.basis().iter().enumerate() {
            let direct = endo_apply(&p, &phi, &GElement::free(basis_word.clone()), &limits)
                .unwrap()
                .word;
            assert_eq!(sub.eval_in_basis(restricted.image(k as u32)), direct);
        }
    }

    #[test]
    fn whole_group_restriction_is_identity_change_of_coordinates() {
        let alphabet = Alphabet::new(vec!["a".into(), "b".into()]).unwrap();
        let p = VFPresentation::free(alphabet);
        let limits = Limits::default();
        let phi = GEndo::new(
            &p,
            vec![
                GElement::free(xw(&p, "a b a")),
                GElement::identity(),
            ],
            vec![],
        )
        .unwrap();
        let rose = StallingsAutomaton::rose(2);
        let restricted = restrict_to_subgroup(&p, &phi, &rose, &limits).unwrap();
        assert_eq!(restricted, phi.as_free(&p).unwrap());
    }
}
