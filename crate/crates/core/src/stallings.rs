//! Folded subgroup automata for finitely generated subgroups of free groups.
//!
//! A [`StallingsAutomaton`] is the folded, based core graph of a subgroup:
//! membership is path reading, rank is the graph rank, finite index is
//! completeness. Construction folds a wedge of generator loops with a
//! worklist of label clashes and a union-find, so the result is independent
//! of insertion order; every constructor returns the automaton in canonical
//! (breadth-first) vertex numbering, which makes structural equality an
//! isomorphism test.

use std::collections::{HashMap, VecDeque};

use crate::error::Error;
use crate::words::{Alphabet, Letter, Word};

/// Finite or infinite subgroup index; an explicit value, never an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Index {
    Finite(usize),
    Infinite,
}

impl Index {
    pub fn is_finite(self) -> bool {
        matches!(self, Index::Finite(_))
    }
}

impl std::fmt::Display for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "INFINITE"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StallingsAutomaton {
    alphabet_size: usize,
    // fwd[v][g] follows generator g forward, bwd[v][g] backward.
    fwd: Vec<Vec<Option<u32>>>,
    bwd: Vec<Vec<Option<u32>>>,
}

// Base vertex is always 0 in canonical numbering.
const BASE: u32 = 0;

impl StallingsAutomaton {
    /// Automaton of the trivial subgroup.
    pub fn trivial(alphabet_size: usize) -> Self {
        StallingsAutomaton {
            alphabet_size,
            fwd: vec![vec![None; alphabet_size]],
            bwd: vec![vec![None; alphabet_size]],
        }
    }

    /// One-vertex complete rose: the whole free group.
    pub fn rose(alphabet_size: usize) -> Self {
        StallingsAutomaton {
            alphabet_size,
            fwd: vec![vec![Some(BASE); alphabet_size]],
            bwd: vec![vec![Some(BASE); alphabet_size]],
        }
    }

    /// Folds the wedge of loops labelled by `gens`.
    pub fn from_generators(gens: &[Word], alphabet_size: usize) -> Self {
        let mut folder = Folder::new(alphabet_size);
        for g in gens {
            folder.add_loop(g);
        }
        folder.finish()
    }

    /// Builds an automaton from an explicit edge list `(source, gen, target)`.
    /// Fails if the edges are not folded or the graph is not connected.
    pub fn from_edges(
        alphabet_size: usize,
        vertices: usize,
        base: u32,
        edges: &[(u32, u32, u32)],
    ) -> Result<Self, Error> {
        let mut fwd = vec![vec![None; alphabet_size]; vertices];
        let mut bwd = vec![vec![None; alphabet_size]; vertices];
        for &(u, g, v) in edges {
            if g as usize >= alphabet_size {
                return Err(Error::LetterOutOfRange {
                    gen: g,
                    alphabet_size,
                });
            }
            if u as usize >= vertices || v as usize >= vertices {
                return Err(Error::Internal(format!("edge ({u},{g},{v}) out of range")));
            }
            let (g, u, v) = (g as usize, u as usize, v as usize);
            if fwd[u][g].is_some() || bwd[v][g].is_some() {
                return Err(Error::Internal("edge list is not folded".into()));
            }
            fwd[u][g] = Some(v as u32);
            bwd[v][g] = Some(u as u32);
        }
        let aut = StallingsAutomaton {
            alphabet_size,
            fwd,
            bwd,
        };
        let canonical = aut.canonicalize(base);
        if canonical.vertex_count() != vertices {
            return Err(Error::Internal("edge list is not connected".into()));
        }
        Ok(canonical)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn vertex_count(&self) -> usize {
        self.fwd.len()
    }

    pub fn edge_count(&self) -> usize {
        self.fwd
            .iter()
            .map(|row| row.iter().filter(|e| e.is_some()).count())
            .sum()
    }

    pub fn base(&self) -> u32 {
        BASE
    }

    /// Positive edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.fwd.iter().enumerate().flat_map(|(u, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(g, t)| t.map(|v| (u as u32, g as u32, v)))
        })
    }

    /// Follows one signed letter from a vertex.
    pub fn step(&self, v: u32, l: Letter) -> Option<u32> {
        let table = if l.is_inverse() { &self.bwd } else { &self.fwd };
        table[v as usize][l.gen() as usize]
    }

    /// Vertex reached by reading `w` from `from`.
    pub fn trace(&self, from: u32, w: &Word) -> Option<u32> {
        let mut v = from;
        for &l in w.letters() {
            v = self.step(v, l)?;
        }
        Some(v)
    }

    /// Membership: `w` labels a base-to-base path.
    pub fn contains(&self, w: &Word) -> bool {
        self.trace(BASE, w) == Some(BASE)
    }

    /// Graph rank `|E| − |V| + 1` of the core graph.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    /// True when every vertex carries all `2·|A|` directions.
    pub fn is_complete(&self) -> bool {
        self.fwd.iter().chain(self.bwd.iter()).all(|row| {
            row.iter().all(|e| e.is_some())
        })
    }

    /// Finite index iff the automaton is complete.
    pub fn is_finite_index(&self) -> bool {
        self.is_complete()
    }

    pub fn index(&self) -> Index {
        if self.is_complete() {
            Index::Finite(self.vertex_count())
        } else {
            Index::Infinite
        }
    }

    fn spanning_tree(&self) -> Tree {
        let mut parent: Vec<Option<(u32, Letter)>> = vec![None; self.vertex_count()];
        let mut order = vec![BASE];
        let mut seen = vec![false; self.vertex_count()];
        seen[BASE as usize] = true;
        let mut queue = VecDeque::from([BASE]);
        while let Some(v) = queue.pop_front() {
            for l in Letter::all(self.alphabet_size) {
                if let Some(w) = self.step(v, l) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        parent[w as usize] = Some((v, l));
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        Tree { parent, order }
    }

    /// Is `(u, l, target)` an edge of the given spanning tree?
    fn is_tree_edge(&self, tree: &Tree, u: u32, l: Letter) -> bool {
        let v = self.step(u, l).expect("edge exists");
        tree.parent[v as usize] == Some((u, l)) || tree.parent[u as usize] == Some((v, l.inverse()))
    }

    /// Positive non-tree edges in canonical order; these index the basis.
    fn nontree_edges(&self, tree: &Tree) -> Vec<(u32, u32, u32)> {
        self.edges()
            .filter(|&(u, g, _)| !self.is_tree_edge(tree, u, Letter::positive(g)))
            .collect()
    }

    /// A free basis of the subgroup: one word per non-tree edge.
    pub fn basis(&self) -> Vec<Word> {
        let tree = self.spanning_tree();
        self.nontree_edges(&tree)
            .into_iter()
            .map(|(u, g, v)| {
                tree.path_word(u)
                    .concat(&Word::letter(Letter::positive(g)))
                    .concat(&tree.path_word(v).invert())
            })
            .collect()
    }

    /// Right coset representatives (spanning-tree path labels); `None` when
    /// the index is infinite. Representative 0 is the identity.
    pub fn coset_reps(&self) -> Option<Vec<Word>> {
        if !self.is_complete() {
            return None;
        }
        let tree = self.spanning_tree();
        Some(tree.order.iter().map(|&v| tree.path_word(v)).collect())
    }

    /// Product automaton of the intersection subgroup.
    pub fn intersect(&self, other: &StallingsAutomaton) -> Result<StallingsAutomaton, Error> {
        if self.alphabet_size != other.alphabet_size {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet_size,
                found: other.alphabet_size,
            });
        }
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        ids.insert((BASE, BASE), 0);
        let mut queue = VecDeque::from([(BASE, BASE)]);
        let mut edges = Vec::new();
        while let Some((x, y)) = queue.pop_front() {
            let id = ids[&(x, y)];
            for l in Letter::all(self.alphabet_size) {
                if let (Some(x2), Some(y2)) = (self.step(x, l), other.step(y, l)) {
                    let next = ids.len() as u32;
                    let nid = *ids.entry((x2, y2)).or_insert_with(|| {
                        queue.push_back((x2, y2));
                        next
                    });
                    if !l.is_inverse() {
                        edges.push((id, l.gen(), nid));
                    }
                }
            }
        }
        Ok(Self::assemble_and_trim(
            self.alphabet_size,
            ids.len(),
            edges,
        ))
    }

    /// Keeps only the letters below `new_size` and re-cores around the base.
    pub fn restrict_alphabet(&self, new_size: usize) -> StallingsAutomaton {
        let edges: Vec<(u32, u32, u32)> = self
            .edges()
            .filter(|&(_, g, _)| (g as usize) < new_size)
            .collect();
        Self::assemble_and_trim(new_size, self.vertex_count(), edges)
    }

    fn assemble_and_trim(
        alphabet_size: usize,
        vertices: usize,
        edges: Vec<(u32, u32, u32)>,
    ) -> StallingsAutomaton {
        let mut fwd = vec![vec![None; alphabet_size]; vertices];
        let mut bwd = vec![vec![None; alphabet_size]; vertices];
        for (u, g, v) in edges {
            fwd[u as usize][g as usize] = Some(v);
            bwd[v as usize][g as usize] = Some(u);
        }
        let mut aut = StallingsAutomaton {
            alphabet_size,
            fwd,
            bwd,
        };
        aut.trim();
        aut.canonicalize(BASE)
    }

    /// Repeatedly removes non-base vertices of degree ≤ 1.
    fn trim(&mut self) {
        loop {
            let mut removed = false;
            for v in 0..self.vertex_count() as u32 {
                if v == BASE {
                    continue;
                }
                let degree: usize = (0..self.alphabet_size)
                    .map(|g| {
                        usize::from(self.fwd[v as usize][g].is_some())
                            + usize::from(self.bwd[v as usize][g].is_some())
                    })
                    .sum();
                if degree <= 1 && degree > 0 {
                    for g in 0..self.alphabet_size {
                        if let Some(w) = self.fwd[v as usize][g] {
                            self.bwd[w as usize][g] = None;
                        }
                        if let Some(w) = self.bwd[v as usize][g] {
                            self.fwd[w as usize][g] = None;
                        }
                        self.fwd[v as usize][g] = None;
                        self.bwd[v as usize][g] = None;
                    }
                    removed = true;
                }
            }
            if !removed {
                return;
            }
        }
    }

    /// Renumbers vertices breadth-first from `base`; drops unreachable ones.
    fn canonicalize(&self, base: u32) -> StallingsAutomaton {
        let mut map: HashMap<u32, u32> = HashMap::new();
        map.insert(base, 0);
        let mut order = vec![base];
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for l in Letter::all(self.alphabet_size) {
                if let Some(w) = self.step(v, l) {
                    if !map.contains_key(&w) {
                        map.insert(w, order.len() as u32);
                        order.push(w);
                        queue.push_back(w);
                    }
                }
            }
        }
        let n = order.len();
        let mut fwd = vec![vec![None; self.alphabet_size]; n];
        let mut bwd = vec![vec![None; self.alphabet_size]; n];
        for (new_u, &old_u) in order.iter().enumerate() {
            for g in 0..self.alphabet_size {
                if let Some(old_v) = self.fwd[old_u as usize][g] {
                    if let Some(&new_v) = map.get(&old_v) {
                        fwd[new_u][g] = Some(new_v);
                        bwd[new_v as usize][g] = Some(new_u as u32);
                    }
                }
            }
        }
        StallingsAutomaton {
            alphabet_size: self.alphabet_size,
            fwd,
            bwd,
        }
    }

    /// Expresses `w` over this automaton's basis: evaluating the result in
    /// [`Self::basis`] reproduces `w`.
    pub fn rewrite_in_basis(&self, w: &Word) -> Result<Word, Error> {
        let tree = self.spanning_tree();
        let nontree = self.nontree_edges(&tree);
        let mut edge_index: HashMap<(u32, u32), usize> = HashMap::new();
        for (i, &(u, g, _)) in nontree.iter().enumerate() {
            edge_index.insert((u, g), i);
        }
        let mut out = Vec::new();
        let mut v = BASE;
        for &l in w.letters() {
            let next = self.step(v, l).ok_or(Error::NotInSubgroup)?;
            if !self.is_tree_edge(&tree, v, l) {
                let (src, sign) = if l.is_inverse() { (next, true) } else { (v, false) };
                let idx = edge_index[&(src, l.gen())];
                out.push(Letter::new(idx as u32, sign));
            }
            v = next;
        }
        if v != BASE {
            return Err(Error::NotInSubgroup);
        }
        Ok(Word::reduce(&out))
    }

    /// Evaluates a word over this automaton's basis alphabet back into the
    /// ambient free group.
    pub fn eval_in_basis(&self, over_basis: &Word) -> Word {
        let basis = self.basis();
        eval_substitution(over_basis, &basis)
    }

    /// Index of `sub` inside `self`, after checking `sub ≤ self`.
    pub fn relative_index(&self, sub: &StallingsAutomaton) -> Result<Index, Error> {
        if self.alphabet_size != sub.alphabet_size {
            return Err(Error::AlphabetMismatch {
                expected: self.alphabet_size,
                found: sub.alphabet_size,
            });
        }
        let sub_basis = sub.basis();
        if !sub_basis.iter().all(|w| self.contains(w)) {
            return Err(Error::NotContained);
        }
        let rewritten: Result<Vec<Word>, Error> =
            sub_basis.iter().map(|w| self.rewrite_in_basis(w)).collect();
        let inner = StallingsAutomaton::from_generators(&rewritten?, self.rank());
        Ok(inner.index())
    }

    /// Debug dump: one line per edge, base vertex flagged.
    pub fn dump(&self, alphabet: &Alphabet) -> String {
        let mut out = format!("base: {BASE}\n");
        for (u, g, v) in self.edges() {
            out.push_str(&format!("{u} --{}--> {v}\n", alphabet.name(g)));
        }
        out
    }
}

struct Tree {
    parent: Vec<Option<(u32, Letter)>>,
    order: Vec<u32>,
}

impl Tree {
    /// Label of the tree path from the base to `v`.
    fn path_word(&self, v: u32) -> Word {
        let mut letters = Vec::new();
        let mut cur = v;
        while let Some((p, l)) = self.parent[cur as usize] {
            letters.push(l);
            cur = p;
        }
        letters.reverse();
        Word::reduce(&letters)
    }
}

/// Substitutes `images[i]` for generator `i`.
pub fn eval_substitution(word: &Word, images: &[Word]) -> Word {
    let mut out = Word::identity();
    for &l in word.letters() {
        let img = &images[l.gen() as usize];
        out = if l.is_inverse() {
            out.concat(&img.invert())
        } else {
            out.concat(img)
        };
    }
    out
}

/// Worklist folding of a partial labelled graph, vertices merged with
/// union-find.
struct Folder {
    alphabet_size: usize,
    parent: Vec<u32>,
    out: Vec<HashMap<Letter, u32>>,
    queue: VecDeque<(u32, Letter, u32)>,
}

impl Folder {
    fn new(alphabet_size: usize) -> Self {
        Folder {
            alphabet_size,
            parent: vec![0],
            out: vec![HashMap::new()],
            queue: VecDeque::new(),
        }
    }

    fn fresh(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        self.out.push(HashMap::new());
        id
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Adds the loop labelled `w` at the base vertex.
    fn add_loop(&mut self, w: &Word) {
        if w.is_empty() {
            return;
        }
        let mut prev = 0;
        for (i, &l) in w.letters().iter().enumerate() {
            let next = if i + 1 == w.len() { 0 } else { self.fresh() };
            self.queue.push_back((prev, l, next));
            prev = next;
        }
        self.drain();
    }

    fn drain(&mut self) {
        while let Some((u, l, v)) = self.queue.pop_front() {
            let u = self.find(u);
            let v = self.find(v);
            match self.out[u as usize].get(&l).copied() {
                Some(w) => {
                    let w = self.find(w);
                    if w != v {
                        self.merge(v, w);
                    }
                }
                None => {
                    self.out[u as usize].insert(l, v);
                    // Keep the reverse direction consistent too.
                    match self.out[v as usize].get(&l.inverse()).copied() {
                        Some(w) => {
                            let w = self.find(w);
                            if w != u {
                                self.merge(u, w);
                            }
                        }
                        None => {
                            self.out[v as usize].insert(l.inverse(), u);
                        }
                    }
                }
            }
        }
    }

    fn merge(&mut self, a: u32, b: u32) {
        // The base vertex must stay a root.
        let (keep, absorb) = if b == 0 {
            (b, a)
        } else if a == 0 {
            (a, b)
        } else if self.out[a as usize].len() >= self.out[b as usize].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[absorb as usize] = keep;
        let moved = std::mem::take(&mut self.out[absorb as usize]);
        for (l, w) in moved {
            self.queue.push_back((keep, l, w));
        }
    }

    fn finish(mut self) -> StallingsAutomaton {
        self.drain();
        // Compact live roots, resolving stale targets.
        let live: Vec<u32> = (0..self.parent.len() as u32)
            .filter(|&v| self.parent[v as usize] == v)
            .collect();
        let renum: HashMap<u32, u32> = live
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let mut edges = Vec::new();
        for &v in &live {
            let targets: Vec<(Letter, u32)> =
                self.out[v as usize].iter().map(|(&l, &w)| (l, w)).collect();
            for (l, w) in targets {
                if !l.is_inverse() {
                    let w = self.find(w);
                    edges.push((renum[&v], l.gen(), renum[&w]));
                }
            }
        }
        StallingsAutomaton::assemble_and_trim(self.alphabet_size, live.len(), edges)
    }
}

/// Subgroup automaton together with right coset representatives.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub subgroup: StallingsAutomaton,
    pub representatives: Vec<Word>,
}

impl CosetTable {
    /// `None` when the subgroup has infinite index.
    pub fn new(subgroup: StallingsAutomaton) -> Option<CosetTable> {
        let representatives = subgroup.coset_reps()?;
        Some(CosetTable {
            subgroup,
            representatives,
        })
    }
}
