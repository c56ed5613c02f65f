//! Fixed-subgroup computation.
//!
//! The free-group backend is a bounded oracle: it enumerates reduced words
//! up to a length bound, keeps the fixed ones, and folds them into a
//! subgroup. Soundness is absolute (everything returned is fixed); the
//! completeness flag records that longer fixed words may exist. The oracle
//! interface is the only thing the virtually-free algorithm sees, so an
//! exact backend can replace it without touching callers.

use std::collections::VecDeque;

use crate::endo::FreeEndo;
use crate::error::Error;
use crate::invariant::FullyInvariantSubgroup;
use crate::limits::Limits;
use crate::stallings::StallingsAutomaton;
use crate::vfree::{endo_apply, restrict_to_subgroup, GElement, GEndo, VFPresentation};
use crate::words::{Letter, Word};

/// Whether a fixed-subgroup result is exact or only sound up to a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Certified,
    Bounded(u32),
}

impl Completeness {
    pub fn is_certified(self) -> bool {
        matches!(self, Completeness::Certified)
    }

    pub fn weakest(self, other: Completeness) -> Completeness {
        match (self, other) {
            (Completeness::Certified, Completeness::Certified) => Completeness::Certified,
            (Completeness::Bounded(a), Completeness::Bounded(b)) => {
                Completeness::Bounded(a.min(b))
            }
            (Completeness::Bounded(a), _) | (_, Completeness::Bounded(a)) => {
                Completeness::Bounded(a)
            }
        }
    }
}

impl std::fmt::Display for Completeness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Completeness::Certified => write!(f, "CERTIFIED"),
            Completeness::Bounded(l) => write!(f, "BOUNDED({l})"),
        }
    }
}

/// A fixed subgroup with its completeness flag. Every basis word is
/// re-verified fixed on construction.
#[derive(Debug, Clone)]
pub struct FixResult {
    pub automaton: StallingsAutomaton,
    pub completeness: Completeness,
}

impl FixResult {
    fn verified(
        automaton: StallingsAutomaton,
        endo: &FreeEndo,
        completeness: Completeness,
    ) -> Result<FixResult, Error> {
        for b in automaton.basis() {
            if endo.apply(&b)? != b {
                return Err(Error::Internal(
                    "fixed-subgroup basis word is not fixed".into(),
                ));
            }
        }
        Ok(FixResult {
            automaton,
            completeness,
        })
    }
}

/// Subgroup generated by all fixed words of reduced length ≤ `bound`.
///
/// Enumeration walks the tree of reduced words depth-first, maintaining the
/// freely reduced image incrementally; fixed words already inside the
/// current subgroup are skipped instead of re-folded.
pub fn fix_free_bounded(
    endo: &FreeEndo,
    bound: u32,
    limits: &Limits,
) -> Result<FixResult, Error> {
    let n = endo.alphabet_size();
    if endo.is_identity() {
        return FixResult::verified(StallingsAutomaton::rose(n), endo, Completeness::Certified);
    }
    let letters: Vec<Letter> = Letter::all(n).collect();
    let images: Vec<Vec<Letter>> = letters
        .iter()
        .map(|l| {
            let img = endo.image(l.gen());
            if l.is_inverse() {
                img.invert().letters().to_vec()
            } else {
                img.letters().to_vec()
            }
        })
        .collect();

    let mut accepted: Vec<Word> = Vec::new();
    let mut subgroup = StallingsAutomaton::trivial(n);

    let mut word: Vec<Letter> = Vec::new();
    let mut image: Vec<Letter> = Vec::new();
    // Per-depth undo data: letters pushed onto the image and letters popped
    // off it by cancellation.
    let mut undo: Vec<(usize, Vec<Letter>)> = Vec::new();
    let mut choice: Vec<usize> = vec![0];
    let mut nodes: u64 = 0;

    while let Some(next_choice) = choice.last_mut() {
        if *next_choice >= letters.len() || word.len() as u32 >= bound {
            // Backtrack.
            choice.pop();
            if let Some((pushed, popped)) = undo.pop() {
                image.truncate(image.len() - pushed);
                image.extend(popped.into_iter().rev());
                word.pop();
            }
            continue;
        }
        let idx = *next_choice;
        *next_choice += 1;
        let l = letters[idx];
        if word.last().is_some_and(|last| last.cancels(l)) {
            continue;
        }
        nodes += 1;
        if nodes > limits.max_enum_nodes {
            return Err(Error::ResourceLimit(format!(
                "fixed-point enumeration exceeded {} nodes; lower the bound",
                limits.max_enum_nodes
            )));
        }
        // Descend: extend the word and its image.
        word.push(l);
        let mut pushed = 0usize;
        let mut popped = Vec::new();
        for &il in &images[idx] {
            if pushed == 0 && image.last().is_some_and(|last| last.cancels(il)) {
                popped.push(image.pop().expect("nonempty"));
            } else {
                image.push(il);
                pushed += 1;
            }
        }
        undo.push((pushed, popped));
        choice.push(0);

        if image == word {
            let w = Word::reduce(&word);
            if !subgroup.contains(&w) {
                accepted.push(w);
                subgroup = StallingsAutomaton::from_generators(&accepted, n);
            }
        }
    }

    FixResult::verified(subgroup, endo, Completeness::Bounded(bound))
}

/// A coset `(subgroup)·representative`; `representative = None` means no
/// witness was found within the bound.
#[derive(Debug, Clone)]
pub struct SubgroupCoset {
    pub subgroup: StallingsAutomaton,
    pub representative: Option<Word>,
}

impl SubgroupCoset {
    pub fn is_empty(&self) -> bool {
        self.representative.is_none()
    }
}

/// Computes `X_u = {x | xψ = xu}` through the added-letter reduction: extend
/// the alphabet by `c`, send `c ↦ u⁻¹c`, and read `X_u c` off the fixed
/// subgroup of the extension.
pub fn x_u(
    endo: &FreeEndo,
    u: &Word,
    bound: u32,
    limits: &Limits,
) -> Result<(SubgroupCoset, Completeness), Error> {
    let n = endo.alphabet_size();
    if !u.fits_alphabet(n) {
        return Err(Error::AlphabetMismatch {
            expected: n,
            found: u.max_gen().unwrap_or(0) as usize + 1,
        });
    }
    if u.is_empty() {
        // X_1 = Fix(ψ) with representative 1.
        let fix = fix_free_bounded(endo, bound, limits)?;
        return Ok((
            SubgroupCoset {
                subgroup: fix.automaton,
                representative: Some(Word::identity()),
            },
            fix.completeness,
        ));
    }
    let c = Letter::positive(n as u32);
    let mut images: Vec<Word> = endo.images().to_vec();
    images.push(u.invert().concat(&Word::letter(c)));
    let extended = FreeEndo::new(images, n + 1)?;
    let fix = fix_free_bounded(&extended, bound, limits)?;

    let subgroup = fix.automaton.restrict_alphabet(n);
    let representative = find_coset_witness(&fix.automaton, n, bound);
    if let Some(ref x0) = representative {
        // x₀ψ must equal x₀·u.
        if endo.apply(x0)? != x0.concat(u) {
            return Err(Error::Internal("coset witness fails xψ = xu".into()));
        }
    }
    Ok((
        SubgroupCoset {
            subgroup,
            representative,
        },
        fix.completeness,
    ))
}

/// Breadth-first search for an accepted word of shape (c-free word)·c:
/// a c-free path from the base to a vertex with a c-edge back to the base.
fn find_coset_witness(aut: &StallingsAutomaton, n: usize, bound: u32) -> Option<Word> {
    let c = Letter::positive(n as u32);
    let mut parent: Vec<Option<(u32, Letter)>> = vec![None; aut.vertex_count()];
    let mut seen = vec![false; aut.vertex_count()];
    seen[aut.base() as usize] = true;
    let mut depth = vec![0u32; aut.vertex_count()];
    let mut queue = VecDeque::from([aut.base()]);
    let mut hit = None;
    if aut.step(aut.base(), c) == Some(aut.base()) {
        hit = Some(aut.base());
    }
    while hit.is_none() {
        let Some(v) = queue.pop_front() else { break };
        if depth[v as usize] + 1 > bound {
            continue;
        }
        for l in Letter::all(n) {
            if let Some(w) = aut.step(v, l) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    parent[w as usize] = Some((v, l));
                    depth[w as usize] = depth[v as usize] + 1;
                    if aut.step(w, c) == Some(aut.base()) {
                        hit = Some(w);
                        break;
                    }
                    queue.push_back(w);
                }
            }
        }
    }
    let mut v = hit?;
    let mut letters = Vec::new();
    while let Some((p, l)) = parent[v as usize] {
        letters.push(l);
        v = p;
    }
    letters.reverse();
    Some(Word::reduce(&letters))
}

/// A coset piece of the fixed subgroup: provably empty, or an `X_u` result.
#[derive(Debug, Clone)]
pub enum CosetPiece {
    /// The displacement left F′, so the piece is empty — certified.
    Empty,
    Coset(SubgroupCoset),
}

/// Fixed subgroup of an endomorphism of a virtually free group, assembled
/// from the core piece and one coset piece per representative.
#[derive(Debug, Clone)]
pub struct GFixResult {
    /// Fix(φ) ∩ F′ over the basis alphabet of F′.
    pub core: FixResult,
    /// Per non-identity representative b′ᵢ, in representative order.
    pub pieces: Vec<CosetPiece>,
    /// Generators of Fix(φ), all re-verified fixed.
    pub generators: Vec<GElement>,
    pub completeness: Completeness,
}

/// Fixed subgroup of `φ` via the decomposition over F′:
/// `Fix(φ) ∩ F′b′ᵢ` is empty when `tᵢ = b′ᵢ·(b′ᵢ⁻¹φ) ∉ F′`, and otherwise a
/// translate of `X_{tᵢ}`.
pub fn fix_vfree(
    pres: &VFPresentation,
    endo: &GEndo,
    fi: &FullyInvariantSubgroup,
    bound: u32,
    limits: &Limits,
) -> Result<GFixResult, Error> {
    let psi = restrict_to_subgroup(pres, endo, &fi.automaton, limits)?;
    let core = fix_free_bounded(&psi, bound, limits)?;
    let mut completeness = core.completeness;

    let mut generators: Vec<GElement> = core
        .automaton
        .basis()
        .iter()
        .map(|b| GElement::free(fi.automaton.eval_in_basis(b)))
        .collect();

    let mut pieces = Vec::with_capacity(fi.index_in_g.saturating_sub(1));
    for rep in fi.reps.iter().skip(1) {
        let inv_image = endo_apply(pres, endo, &pres.inverse(rep), limits)?;
        let displacement = pres.mult(rep, &inv_image);
        if fi.coset_index_of(&displacement) != Some(0) {
            pieces.push(CosetPiece::Empty);
            continue;
        }
        if displacement.coset != 0 || !fi.automaton.contains(&displacement.word) {
            return Err(Error::Internal(
                "displacement passed the quotient test but is not in F′".into(),
            ));
        }
        let u = fi.automaton.rewrite_in_basis(&displacement.word)?;
        let (piece, piece_completeness) = x_u(&psi, &u, bound, limits)?;
        completeness = completeness.weakest(piece_completeness);
        if let Some(ref x0) = piece.representative {
            let x_in_f = fi.automaton.eval_in_basis(x0);
            generators.push(pres.mult(&GElement::free(x_in_f), rep));
        }
        pieces.push(CosetPiece::Coset(piece));
    }

    for g in &generators {
        if endo_apply(pres, endo, g, limits)? != *g {
            return Err(Error::Internal("emitted generator is not fixed".into()));
        }
    }

    Ok(GFixResult {
        core,
        pieces,
        generators,
        completeness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::must_parse;
    use crate::invariant::compute_fully_invariant;
    use crate::words::Alphabet;

    fn limits() -> Limits {
        Limits::default()
    }

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
    fn growing_endo_has_trivial_bounded_fix() {
        // a ↦ aba, b ↦ 1: the fixed subgroup is trivial.
        let fix = fix_free_bounded(&endo("a b a", "1"), 12, &limits()).unwrap();
        assert_eq!(fix.automaton.rank(), 0);
        assert_eq!(fix.completeness, Completeness::Bounded(12));
    }

    #[test]
    fn identity_fix_is_certified_rose() {
        let fix = fix_free_bounded(&FreeEndo::identity(2), 12, &limits()).unwrap();
        assert_eq!(fix.automaton, StallingsAutomaton::rose(2));
        assert_eq!(fix.completeness, Completeness::Certified);
    }

    #[test]
    fn conjugation_fix_is_the_conjugate_cyclic_group() {
        // a ↦ bab⁻¹, b ↦ 1: Fix = ⟨bab⁻¹⟩.
        let fix = fix_free_bounded(&endo("b a b^-1", "1"), 8, &limits()).unwrap();
        let expected = StallingsAutomaton::from_generators(&[w("b a b^-1")], 2);
        assert_eq!(fix.automaton, expected);
        assert_eq!(fix.completeness, Completeness::Bounded(8));
    }

    #[test]
    fn monotone_in_the_bound() {
        let phi = endo("b a b^-1", "1");
        let small = fix_free_bounded(&phi, 4, &limits()).unwrap();
        let large = fix_free_bounded(&phi, 8, &limits()).unwrap();
        for b in small.automaton.basis() {
            assert!(large.automaton.contains(&b));
        }
    }

    #[test]
    fn x_u_trivial_twist_is_fix() {
        let phi = endo("b a b^-1", "1");
        let (coset, _) = x_u(&phi, &Word::identity(), 8, &limits()).unwrap();
        assert_eq!(coset.representative, Some(Word::identity()));
        assert!(coset.subgroup.contains(&w("b a b^-1")));
    }

    #[test]
    fn x_u_witness_satisfies_the_twisted_equation() {
        // ψ: a ↦ bab⁻¹, b ↦ 1 and u = a⁻¹·(bab⁻¹): then x = a has
        // xψ = bab⁻¹ = x·u.
        let phi = endo("b a b^-1", "1");
        let u = w("a^-1 b a b^-1");
        let (coset, _) = x_u(&phi, &u, 8, &limits()).unwrap();
        let x0 = coset.representative.expect("solution exists");
        assert_eq!(phi.apply(&x0).unwrap(), x0.concat(&u));
        // Membership-level identity X_u = Fix(ψ)·x₀ on samples.
        for f in coset.subgroup.basis() {
            let x = f.concat(&x0);
            assert_eq!(phi.apply(&x).unwrap(), x.concat(&u));
        }
    }

    #[test]
    fn x_u_with_no_solution_is_empty() {
        // Vanishing ψ kills every x, so xψ = xa has no solution.
        let phi = endo("1", "1");
        let (coset, _) = x_u(&phi, &w("a"), 8, &limits()).unwrap();
        assert!(coset.is_empty());
    }

    #[test]
    fn free_case_reduces_to_the_bounded_oracle() {
        let f = must_parse("[group]\nfree_generators = a b\n\n[endo phi]\na -> b a b^-1\nb -> 1\n");
        let p = &f.presentation;
        let fi = compute_fully_invariant(p, &limits()).unwrap();
        let gfix = fix_vfree(p, f.endo("phi").unwrap(), &fi, 8, &limits()).unwrap();
        assert!(gfix.pieces.is_empty());
        let expected = StallingsAutomaton::from_generators(&[w("b a b^-1")], 2);
        assert_eq!(gfix.core.automaton, expected);
        assert_eq!(gfix.generators.len(), 1);
        assert_eq!(gfix.generators[0], GElement::free(w("b a b^-1")));
    }

    #[test]
    fn identity_on_dihedral_fixes_everything() {
        let f = must_parse(
            "[group]\nfree_generators = x\ncosets = 1 t\nrel t x = x^-1 t\nrel t t = 1 1\n\n[endo id]\nx -> x\nt -> t\n",
        );
        let p = &f.presentation;
        let fi = compute_fully_invariant(p, &limits()).unwrap();
        let gfix = fix_vfree(p, f.endo("id").unwrap(), &fi, 8, &limits()).unwrap();
        assert_eq!(gfix.completeness, Completeness::Certified);
        // Core is all of F′ and every coset piece is present with witness 1.
        assert!(gfix.core.automaton.is_complete());
        assert_eq!(gfix.pieces.len(), fi.index_in_g - 1);
        for piece in &gfix.pieces {
            match piece {
                CosetPiece::Coset(c) => assert_eq!(c.representative, Some(Word::identity())),
                CosetPiece::Empty => panic!("identity fixes every coset"),
            }
        }
        // The generators contain every coset representative, so they
        // generate all of D_∞.
        for rep in fi.reps.iter().skip(1) {
            assert!(gfix.generators.contains(rep));
        }
    }
}
