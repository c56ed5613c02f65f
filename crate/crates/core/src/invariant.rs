//! The fully invariant finite-index free subgroup F′: the intersection of
//! all normal subgroups of index at most the coset count.
//!
//! Every normal subgroup of index ≤ m is the kernel of a homomorphism onto a
//! group of order ≤ m, and every such group embeds in the symmetric group on
//! m points through its regular action. Enumerating permutation assignments
//! to the generators, filtered by the relations and by image size, therefore
//! finds every kernel; F′ is their intersection, with membership decided by
//! evaluating the stored homomorphisms.

use std::collections::HashMap;

use crate::error::Error;
use crate::limits::Limits;
use crate::stallings::StallingsAutomaton;
use crate::vfree::{endo_apply, GElement, GEndo, VFPresentation};
use crate::words::Word;

type Perm = Vec<u8>;

fn perm_id(degree: usize) -> Perm {
    (0..degree as u8).collect()
}

/// `a` then `b` as right actions.
fn perm_mul(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

fn perm_inv(a: &Perm) -> Perm {
    let mut out = vec![0u8; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u8;
    }
    out
}

fn all_perms(degree: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur = perm_id(degree);
    heap_permute(&mut cur, degree, &mut out);
    out.sort();
    out
}

fn heap_permute(cur: &mut Perm, k: usize, out: &mut Vec<Perm>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(cur, k - 1, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// A homomorphism from G to a symmetric group, stored by generator images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientHom {
    degree: usize,
    letter_perms: Vec<Perm>,
    coset_perms: Vec<Perm>, // entry 0 is the identity
    image_size: usize,
}

impl QuotientHom {
    pub fn image_size(&self) -> usize {
        self.image_size
    }

    fn word_perm(&self, w: &Word) -> Perm {
        let mut acc = perm_id(self.degree);
        for &l in w.letters() {
            let p = &self.letter_perms[l.gen() as usize];
            let p = if l.is_inverse() { perm_inv(p) } else { p.clone() };
            acc = perm_mul(&acc, &p);
        }
        acc
    }

    /// Image of a normal-form element.
    pub fn eval(&self, g: &GElement) -> Perm {
        perm_mul(&self.word_perm(&g.word), &self.coset_perms[g.coset])
    }

    pub fn kills(&self, g: &GElement) -> bool {
        self.eval(g) == perm_id(self.degree)
    }

    /// Closure of the generator images under multiplication.
    fn image_elements(&self) -> Vec<Perm> {
        let gens: Vec<&Perm> = self
            .letter_perms
            .iter()
            .chain(self.coset_perms.iter().skip(1))
            .collect();
        let mut seen: Vec<Perm> = vec![perm_id(self.degree)];
        let mut frontier = seen.clone();
        while let Some(p) = frontier.pop() {
            for g in &gens {
                let q = perm_mul(&p, g);
                if !seen.contains(&q) {
                    seen.push(q.clone());
                    frontier.push(q);
                }
            }
        }
        seen
    }

    /// Same kernel iff a generator-respecting bijection of the images exists.
    fn same_kernel(&self, other: &QuotientHom) -> bool {
        let gens1: Vec<Perm> = self
            .letter_perms
            .iter()
            .cloned()
            .chain(self.coset_perms.iter().skip(1).cloned())
            .collect();
        let gens2: Vec<Perm> = other
            .letter_perms
            .iter()
            .cloned()
            .chain(other.coset_perms.iter().skip(1).cloned())
            .collect();
        let mut fwd: HashMap<Perm, Perm> = HashMap::new();
        let mut bwd: HashMap<Perm, Perm> = HashMap::new();
        let mut stack = vec![(perm_id(self.degree), perm_id(other.degree))];
        fwd.insert(perm_id(self.degree), perm_id(other.degree));
        bwd.insert(perm_id(other.degree), perm_id(self.degree));
        while let Some((p, q)) = stack.pop() {
            for (g1, g2) in gens1.iter().zip(&gens2) {
                let p2 = perm_mul(&p, g1);
                let q2 = perm_mul(&q, g2);
                match (fwd.get(&p2), bwd.get(&q2)) {
                    (Some(q_seen), _) if *q_seen != q2 => return false,
                    (_, Some(p_seen)) if *p_seen != p2 => return false,
                    (None, None) => {
                        fwd.insert(p2.clone(), q2.clone());
                        bwd.insert(q2.clone(), p2.clone());
                        stack.push((p2, q2));
                    }
                    _ => {}
                }
            }
        }
        true
    }
}

/// One side of a relation as a sequence of signed generator positions;
/// `None` stands for the identity coset.
type RelSide = Vec<(Option<usize>, bool)>;

struct Relation {
    lhs: RelSide,
    rhs: RelSide,
    support_max: usize,
}

/// Enumerates all homomorphisms from G onto groups of order ≤ m, as
/// permutation assignments on m points. Complete: every normal subgroup of
/// index ≤ m is the kernel of a listed homomorphism.
pub fn enumerate_small_quotient_homs(
    pres: &VFPresentation,
    m: usize,
    limits: &Limits,
) -> Result<Vec<QuotientHom>, Error> {
    if m > limits.max_quotient_degree {
        return Err(Error::ResourceLimit(format!(
            "quotient degree {m} exceeds the cap {}",
            limits.max_quotient_degree
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let n = pres.free_rank();
    let mc = pres.coset_count();
    // Assignment positions: cosets 1..mc first (their relations prune the
    // search earlier), then the letters.
    let coset_pos = |i: usize| -> Option<usize> {
        if i == 0 {
            None
        } else {
            Some(i - 1)
        }
    };
    let letter_pos = |a: u32| mc - 1 + a as usize;
    let total = mc - 1 + n;

    let word_side = |w: &Word| -> RelSide {
        w.letters()
            .iter()
            .map(|l| (Some(letter_pos(l.gen())), l.is_inverse()))
            .collect()
    };
    let mut relations = Vec::new();
    for i in 1..mc {
        for a in 0..n as u32 {
            // bᵢ a = u_{ia} bᵢ
            let mut rhs = word_side(pres.twist_word(i, a));
            rhs.push((coset_pos(i), false));
            let lhs = vec![(coset_pos(i), false), (Some(letter_pos(a)), false)];
            relations.push(make_relation(lhs, rhs));
        }
        for j in 1..mc {
            // bᵢ bⱼ = v_{ij} b_{r_ij}
            let (v, r) = pres.product_rule(i, j);
            let mut rhs = word_side(v);
            rhs.push((coset_pos(r), false));
            let lhs = vec![(coset_pos(i), false), (coset_pos(j), false)];
            relations.push(make_relation(lhs, rhs));
        }
    }
    // Relations indexed by the last position they mention.
    let mut ready_at: Vec<Vec<usize>> = vec![Vec::new(); total.max(1)];
    for (k, rel) in relations.iter().enumerate() {
        if total > 0 {
            ready_at[rel.support_max].push(k);
        }
    }

    let perms = all_perms(m);
    let mut assignment: Vec<Perm> = vec![perm_id(m); total];
    let mut found = Vec::new();
    search(
        &perms,
        &relations,
        &ready_at,
        &mut assignment,
        0,
        total,
        &mut |assignment| {
            let hom = QuotientHom {
                degree: m,
                letter_perms: (0..n as u32)
                    .map(|a| assignment[letter_pos(a)].clone())
                    .collect(),
                coset_perms: std::iter::once(perm_id(m))
                    .chain((1..mc).map(|i| assignment[i - 1].clone()))
                    .collect(),
                image_size: 0,
            };
            let size = hom.image_elements().len();
            if size <= m && size > 1 {
                found.push(QuotientHom {
                    image_size: size,
                    ..hom
                });
            }
        },
    );

    // The quotient by F itself, through the regular action on the cosets,
    // padded to m points. Guarantees F′ ≤ F structurally.
    if mc > 1 && m >= mc {
        let coset_perms = (0..mc)
            .map(|i| {
                let mut p = perm_id(m);
                for (j, entry) in p.iter_mut().enumerate().take(mc) {
                    *entry = pres.product_rule(j, i).1 as u8;
                }
                p
            })
            .collect();
        found.push(QuotientHom {
            degree: m,
            letter_perms: vec![perm_id(m); n],
            coset_perms,
            image_size: mc,
        });
    }

    // Deduplicate by kernel.
    let mut unique: Vec<QuotientHom> = Vec::new();
    for hom in found {
        if !unique.iter().any(|u| u.same_kernel(&hom)) {
            unique.push(hom);
        }
    }
    Ok(unique)
}

fn make_relation(lhs: RelSide, rhs: RelSide) -> Relation {
    let support_max = lhs
        .iter()
        .chain(rhs.iter())
        .filter_map(|&(p, _)| p)
        .max()
        .unwrap_or(0);
    Relation {
        lhs,
        rhs,
        support_max,
    }
}

fn eval_side(side: &RelSide, assignment: &[Perm], degree: usize) -> Perm {
    let mut acc = perm_id(degree);
    for &(pos, inv) in side {
        let p = match pos {
            Some(k) => assignment[k].clone(),
            None => perm_id(degree),
        };
        let p = if inv { perm_inv(&p) } else { p };
        acc = perm_mul(&acc, &p);
    }
    acc
}

fn search(
    perms: &[Perm],
    relations: &[Relation],
    ready_at: &[Vec<usize>],
    assignment: &mut Vec<Perm>,
    pos: usize,
    total: usize,
    emit: &mut impl FnMut(&[Perm]),
) {
    if pos == total {
        emit(assignment);
        return;
    }
    let degree = perms[0].len();
    for p in perms {
        assignment[pos] = p.clone();
        let ok = ready_at[pos].iter().all(|&k| {
            let rel = &relations[k];
            eval_side(&rel.lhs, assignment, degree) == eval_side(&rel.rhs, assignment, degree)
        });
        if ok {
            search(perms, relations, ready_at, assignment, pos + 1, total, emit);
        }
    }
}

/// The computed fully invariant subgroup with all the data later stages use.
#[derive(Debug, Clone)]
pub struct FullyInvariantSubgroup {
    homs: Vec<QuotientHom>,
    /// Automaton of F′ as a subgroup of the free part F.
    pub automaton: StallingsAutomaton,
    /// Basis of F′ in automaton order; the basis alphabet of restrictions.
    pub basis: Vec<Word>,
    /// Coset representatives b′ᵢ of F′ in G, representative 0 the identity.
    pub reps: Vec<GElement>,
    pub index_in_g: usize,
    coset_lookup: HashMap<Vec<Perm>, usize>,
}

impl FullyInvariantSubgroup {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn homs(&self) -> &[QuotientHom] {
        &self.homs
    }

    fn fingerprint(&self, g: &GElement) -> Vec<Perm> {
        self.homs.iter().map(|h| h.eval(g)).collect()
    }

    /// Membership: every stored homomorphism sends `g` to the identity.
    pub fn contains(&self, g: &GElement) -> bool {
        self.homs.iter().all(|h| h.kills(g))
    }

    /// Which right coset F′ b′ᵢ the element lies in.
    pub fn coset_index_of(&self, g: &GElement) -> Option<usize> {
        self.coset_lookup.get(&self.fingerprint(g)).copied()
    }
}

/// Computes F′ together with a basis, its automaton inside F, and coset
/// representatives in G found by coset enumeration over the quotient data.
pub fn compute_fully_invariant(
    pres: &VFPresentation,
    limits: &Limits,
) -> Result<FullyInvariantSubgroup, Error> {
    let m = pres.coset_count();
    let homs = enumerate_small_quotient_homs(pres, m, limits)?;
    let n = pres.free_rank();

    let fingerprint =
        |g: &GElement| -> Vec<Perm> { homs.iter().map(|h| h.eval(g)).collect() };

    // Coset enumeration of G: states are homomorphism fingerprints.
    let gens = pres.group_generators();
    let mut lookup: HashMap<Vec<Perm>, usize> = HashMap::new();
    let mut reps: Vec<GElement> = vec![GElement::identity()];
    lookup.insert(fingerprint(&GElement::identity()), 0);
    let mut frontier = vec![GElement::identity()];
    while let Some(rep) = frontier.pop() {
        for gen in &gens {
            let next = pres.mult(&rep, gen);
            let fp = fingerprint(&next);
            if !lookup.contains_key(&fp) {
                lookup.insert(fp, reps.len());
                reps.push(next.clone());
                frontier.push(next);
            }
        }
    }
    let index_in_g = reps.len();

    // Stallings automaton of F′ ≤ F: the Schreier graph of Θ(F).
    let letter_fps: Vec<Vec<Perm>> = (0..n as u32)
        .map(|a| fingerprint(&GElement::free(Word::generator(a))))
        .collect();
    let id_fp: Vec<Perm> = homs.iter().map(|h| perm_id(h.degree)).collect();
    let mut f_states: HashMap<Vec<Perm>, u32> = HashMap::new();
    f_states.insert(id_fp.clone(), 0);
    let mut order = vec![id_fp];
    let mut pos = 0;
    while pos < order.len() {
        let fp = order[pos].clone();
        pos += 1;
        for a in 0..n {
            let next: Vec<Perm> = fp
                .iter()
                .zip(&letter_fps[a])
                .map(|(p, q)| perm_mul(p, q))
                .collect();
            if !f_states.contains_key(&next) {
                f_states.insert(next.clone(), order.len() as u32);
                order.push(next);
            }
        }
    }
    let mut edges = Vec::new();
    for (v, fp) in order.iter().enumerate() {
        for a in 0..n {
            let next: Vec<Perm> = fp
                .iter()
                .zip(&letter_fps[a])
                .map(|(p, q)| perm_mul(p, q))
                .collect();
            edges.push((v as u32, a as u32, f_states[&next]));
        }
    }
    let automaton = StallingsAutomaton::from_edges(n, order.len(), 0, &edges)?;
    let basis = automaton.basis();

    debug_assert_eq!(index_in_g, m * order.len());

    Ok(FullyInvariantSubgroup {
        homs,
        automaton,
        basis,
        reps,
        index_in_g,
        coset_lookup: lookup,
    })
}

/// The finite self-map θ induced on the F′-cosets: `F′b′ᵢ ↦ F′(b′ᵢ φ)`.
pub fn quotient_endo(
    pres: &VFPresentation,
    endo: &GEndo,
    fi: &FullyInvariantSubgroup,
    limits: &Limits,
) -> Result<Vec<usize>, Error> {
    fi.reps
        .iter()
        .map(|rep| {
            let image = endo_apply(pres, endo, rep, limits)?;
            fi.coset_index_of(&image).ok_or_else(|| {
                Error::Internal("image coset undetermined; full invariance broken".into())
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::must_parse;
    use crate::words::Alphabet;

    const DIHEDRAL: &str = "\
[group]
free_generators = x
cosets = 1 t
rel t x = x^-1 t
rel t t = 1 1

[endo conj_x]
x -> x
t -> x x t

[endo vanish_f]
x -> 1
t -> t

[endo square]
x -> x x
t -> t
";

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn f2_quotients_of_order_two() {
        let p = VFPresentation::free(Alphabet::new(vec!["a".into(), "b".into()]).unwrap());
        let homs = enumerate_small_quotient_homs(&p, 2, &limits()).unwrap();
        // Three distinct index-2 kernels in F₂.
        assert_eq!(homs.len(), 3);
        for h in &homs {
            assert_eq!(h.image_size(), 2);
        }
    }

    #[test]
    fn trivial_bound_gives_whole_group() {
        let p = VFPresentation::free(Alphabet::new(vec!["a".into(), "b".into()]).unwrap());
        let homs = enumerate_small_quotient_homs(&p, 1, &limits()).unwrap();
        assert!(homs.is_empty());
        let fi = compute_fully_invariant(&p, &limits()).unwrap();
        assert_eq!(fi.index_in_g, 1);
        assert_eq!(fi.rank(), 2);
        assert!(fi.automaton.is_complete());
    }

    #[test]
    fn dihedral_quotients_include_the_free_part_kernel() {
        let f = must_parse(DIHEDRAL);
        let p = &f.presentation;
        let homs = enumerate_small_quotient_homs(p, 2, &limits()).unwrap();
        // x ↦ id, t ↦ swap kills exactly F.
        let x = GElement::free(p.alphabet().parse_word("x").unwrap());
        let t = GElement::new(Word::identity(), 1);
        assert!(homs
            .iter()
            .any(|h| h.kills(&x) && !h.kills(&t)));
    }

    #[test]
    fn dihedral_fully_invariant_subgroup() {
        let f = must_parse(DIHEDRAL);
        let p = &f.presentation;
        let fi = compute_fully_invariant(p, &limits()).unwrap();
        assert_eq!(fi.index_in_g, 4);
        assert_eq!(fi.rank(), 1);

        let word = |t: &str| p.alphabet().parse_word(t).unwrap();
        // F′ = ⟨x²⟩: contains x², excludes x and t.
        assert!(fi.contains(&GElement::free(word("x x"))));
        assert!(!fi.contains(&GElement::free(word("x"))));
        assert!(!fi.contains(&GElement::new(Word::identity(), 1)));
        assert!(fi.automaton.contains(&word("x x")));
        assert!(!fi.automaton.contains(&word("x")));

        // Basis elements are members by construction.
        for b in &fi.basis {
            assert!(fi.contains(&GElement::free(b.clone())));
        }

        // Representative 0 is the identity and the reps fill all cosets.
        assert!(fi.reps[0].is_identity());
        let mut seen: Vec<usize> = fi
            .reps
            .iter()
            .map(|r| fi.coset_index_of(r).unwrap())
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..4).collect::<Vec<_>>());
    }

    #[test]
    fn full_invariance_spot_check() {
        let f = must_parse(DIHEDRAL);
        let p = &f.presentation;
        let fi = compute_fully_invariant(p, &limits()).unwrap();
        for (_, endo) in &f.endos {
            for b in &fi.basis {
                let img = endo_apply(p, endo, &GElement::free(b.clone()), &limits()).unwrap();
                assert!(fi.contains(&img));
            }
        }
    }

    #[test]
    fn quotient_endo_examples() {
        let f = must_parse(DIHEDRAL);
        let p = &f.presentation;
        let fi = compute_fully_invariant(p, &limits()).unwrap();
        let id = GEndo::identity(p);
        let theta = quotient_endo(p, &id, &fi, &limits()).unwrap();
        assert_eq!(theta, (0..fi.index_in_g).collect::<Vec<_>>());

        // Conjugation preserves every F′-coset.
        let conj = f.endo("conj_x").unwrap();
        assert_eq!(
            quotient_endo(p, conj, &fi, &limits()).unwrap(),
            (0..fi.index_in_g).collect::<Vec<_>>()
        );

        // x ↦ 1, t ↦ t folds the x-direction away: θ maps each coset to the
        // coset of its t-part.
        let vanish_f = f.endo("vanish_f").unwrap();
        let theta = quotient_endo(p, vanish_f, &fi, &limits()).unwrap();
        let t_coset = fi
            .coset_index_of(&GElement::new(Word::identity(), 1))
            .unwrap();
        for (i, rep) in fi.reps.iter().enumerate() {
            let expected = if rep.coset == 0 { 0 } else { t_coset };
            assert_eq!(theta[i], expected);
        }

        // θ is well defined: f·b lands in the coset θ(coset of b).
        let samples = ["x", "x x", "x^-1 x^-1 x^-1", "x x x x"];
        for (_, endo) in &f.endos {
            let theta = quotient_endo(p, endo, &fi, &limits()).unwrap();
            for rep in &fi.reps {
                let from = fi.coset_index_of(rep).unwrap();
                for s in samples {
                    let fword = p.alphabet().parse_word(s).unwrap();
                    // Only sample words inside F′ keep the coset.
                    if !fi.automaton.contains(&fword) {
                        continue;
                    }
                    let g = p.mult(&GElement::free(fword), rep);
                    let img = endo_apply(p, endo, &g, &limits()).unwrap();
                    assert_eq!(fi.coset_index_of(&img).unwrap(), theta[from]);
                }
            }
        }
    }

    #[test]
    fn index_product_bound() {
        let f = must_parse(DIHEDRAL);
        let p = &f.presentation;
        let fi = compute_fully_invariant(p, &limits()).unwrap();
        let product: usize = fi.homs().iter().map(|h| h.image_size()).product();
        assert!(fi.index_in_g <= product);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let p = VFPresentation::free(Alphabet::new(vec!["a".into()]).unwrap());
        let tight = Limits {
            max_quotient_degree: 2,
            ..Limits::default()
        };
        assert!(matches!(
            enumerate_small_quotient_homs(&p, 3, &tight),
            Err(Error::ResourceLimit(_))
        ));
    }
}
