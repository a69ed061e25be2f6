//! Extensions `1 → π₁(|C(Y)|) → Π → G → 1` for a finite group acting on a
//! graph-like complex, towers of such extensions, and the levelwise maps
//! between towers.
//!
//! `Π` is presented as the fundamental group of the quotient graph of groups
//! of the action on the barycentric subdivision. Every presentation is
//! checked against a second model of `Π`: pairs `(g, p)` with `p` a reduced
//! edge path from the basepoint to its translate by `g`, multiplied by
//! `(g, p)(h, q) = (gh, p · g(q))`.

use crate::complex::{Element, PolyMorphism, PolysimplicialSet};
use crate::error::{Error, Result};
use crate::fibration::corpus;
use crate::group::{
    cycles_text, free_reduce, generator_of, inverse, letter, AbelianInvariants, GroupPresentation, PermGroup,
    Subgroup, Word,
};
use crate::lambda::LambdaMorphism;
use crate::pi1::{pi1_presentation, Subdivision, TwoSkeleton};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

/// Coset enumeration is only attempted up to this group order.
pub const COSET_CHECK_ORDER: usize = 64;
const COSET_LIMIT: usize = 200_000;

/// Edge index and whether it is traversed backwards.
pub type Step = (usize, bool);

fn reduce_path(p: &[Step]) -> Vec<Step> {
    let mut out: Vec<Step> = Vec::with_capacity(p.len());
    for &s in p {
        match out.last() {
            Some(&(e, b)) if e == s.0 && b != s.1 => {
                out.pop();
            }
            _ => out.push(s),
        }
    }
    out
}

fn reverse_path(p: &[Step]) -> Vec<Step> {
    p.iter().rev().map(|&(e, b)| (e, !b)).collect()
}

fn shift(w: &[i32], offset: usize) -> Word {
    w.iter().map(|&l| letter(generator_of(l) + offset, l < 0)).collect()
}

/// Replaces every generator by a word.
pub fn substitute(w: &[i32], images: &[Word]) -> Word {
    let mut out = Vec::new();
    for &l in w {
        let img = &images[generator_of(l)];
        if l > 0 {
            out.extend_from_slice(img);
        } else {
            out.extend(inverse(img));
        }
    }
    free_reduce(&out)
}

fn same_complex(a: &PolysimplicialSet, b: &PolysimplicialSet) -> bool {
    a.len() == b.len() && a.to_text() == b.to_text()
}

/// A finite group acting on a complex by automorphisms.
#[derive(Clone, Debug)]
pub struct GaloisAction {
    pub group: PermGroup,
    pub complex: PolysimplicialSet,
    /// The automorphism of each group element, in element order.
    pub elements: Vec<PolyMorphism>,
}

impl GaloisAction {
    /// Extends the automorphisms given for the generators, checking that
    /// the extension is well defined.
    pub fn new(complex: PolysimplicialSet, group: PermGroup, generators: Vec<PolyMorphism>) -> Result<GaloisAction> {
        if generators.len() != group.generators.len() {
            return Err(Error::Group(format!(
                "{} generators but {} automorphisms",
                group.generators.len(),
                generators.len()
            )));
        }
        for (k, a) in generators.iter().enumerate() {
            if !same_complex(&a.source, &complex) || !same_complex(&a.target, &complex) {
                return Err(Error::InvalidMorphism(format!("action of generator {k} is not an endomorphism")));
            }
            if !a.is_bijective_on_cells() || !a.is_iso() {
                return Err(Error::InvalidMorphism(format!("action of generator {k} is not an automorphism")));
            }
        }
        let gen_index: Vec<usize> =
            group.generators.iter().map(|p| group.index_of(p).expect("generators are elements")).collect();
        let mut elements: Vec<Option<PolyMorphism>> = vec![None; group.order()];
        elements[group.identity()] = Some(PolyMorphism::identity(&complex));
        for e in 0..group.order() {
            let base = elements[e].clone().expect("breadth-first element order");
            for (k, a) in generators.iter().enumerate() {
                let t = group.mul(e, gen_index[k]);
                let cand = base.after(a);
                match &elements[t] {
                    Some(prev) if !prev.same_as(&cand) => {
                        return Err(Error::Group(format!(
                            "action is not a homomorphism at {}",
                            cycles_text(&group.elements[t])
                        )))
                    }
                    Some(_) => {}
                    None => elements[t] = Some(cand),
                }
            }
        }
        let elements = elements.into_iter().map(|e| e.expect("group generated")).collect();
        Ok(GaloisAction { group, complex, elements })
    }

    pub fn trivial(complex: PolysimplicialSet, group: PermGroup) -> GaloisAction {
        let id = PolyMorphism::identity(&complex);
        let gens = vec![id; group.generators.len()];
        GaloisAction::new(complex, group, gens).expect("trivial action")
    }
}

/// Group homomorphism between permutation groups, as a table on elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub table: Vec<usize>,
}

impl GroupHom {
    pub fn from_generators(src: &PermGroup, dst: &PermGroup, images: &[usize]) -> Result<GroupHom> {
        if images.len() != src.generators.len() || images.iter().any(|&i| i >= dst.order()) {
            return Err(Error::Group("one target element per generator is required".into()));
        }
        let table: Vec<usize> = src
            .words
            .iter()
            .map(|w| {
                w.iter().fold(dst.identity(), |acc, &l| {
                    let g = images[generator_of(l)];
                    dst.mul(acc, if l > 0 { g } else { dst.inv(g) })
                })
            })
            .collect();
        for e in 0..src.order() {
            for (k, p) in src.generators.iter().enumerate() {
                let t = src.mul(e, src.index_of(p).expect("generator"));
                if table[t] != dst.mul(table[e], images[k]) {
                    return Err(Error::Group("generator images do not define a homomorphism".into()));
                }
            }
        }
        Ok(GroupHom { table })
    }

    pub fn identity(g: &PermGroup) -> GroupHom {
        GroupHom { table: (0..g.order()).collect() }
    }

    /// Sends each generator to the generator of the same position.
    pub fn matching_generators(src: &PermGroup, dst: &PermGroup) -> Result<GroupHom> {
        let images: Vec<usize> = dst
            .generators
            .iter()
            .map(|p| dst.index_of(p).expect("generator"))
            .take(src.generators.len())
            .collect();
        GroupHom::from_generators(src, dst, &images)
    }

    pub fn inverse(&self) -> Option<GroupHom> {
        let mut inv = vec![usize::MAX; self.table.len()];
        for (a, &b) in self.table.iter().enumerate() {
            if b >= inv.len() || inv[b] != usize::MAX {
                return None;
            }
            inv[b] = a;
        }
        Some(GroupHom { table: inv })
    }
}

/// An element of the path model of `Π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lift {
    pub element: usize,
    pub path: Vec<Step>,
}

/// Edge of the quotient graph with its chosen lift `ẽ`: the lift starts at
/// the chosen vertex lift of `from` and ends at `twist` applied to the
/// vertex lift of `to`.
#[derive(Clone, Debug)]
pub struct QuotientEdge {
    pub lift: usize,
    pub from: usize,
    pub to: usize,
    pub twist: usize,
    pub stable_letter: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct ExtensionPresentation {
    pub action: GaloisAction,
    /// Barycentric subdivision, edges oriented by increasing dimension.
    pub graph: TwoSkeleton,
    pub basepoint: usize,
    vertex_action: Vec<Vec<usize>>,
    edge_action: Vec<Vec<usize>>,
    edge_orbit: Vec<usize>,
    pub lifts: Vec<usize>,
    lift_paths: Vec<Vec<Step>>,
    pub stabilizers: Vec<Subgroup>,
    offsets: Vec<usize>,
    pub quotient_edges: Vec<QuotientEdge>,
    pub presentation: GroupPresentation,
    /// Image in `G` of each generator.
    pub quotient_map: Vec<usize>,
    /// Words for a free basis of the image of `π₁`.
    pub kernel: Vec<Word>,
    /// `[Π : π₁]` found by coset enumeration, for small groups.
    pub coset_index: Option<usize>,
    generator_lifts: Vec<Lift>,
}

/// Presentation of the extension of `G` by `π₁` of the complex, based at
/// the barycentre of `basepoint` (the first vertex by default).
pub fn lift_extension(action: GaloisAction, basepoint: Option<usize>) -> Result<ExtensionPresentation> {
    let c = &action.complex;
    if c.is_empty() {
        return Err(Error::Disconnected("empty complex".into()));
    }
    if c.dimension() > 1 {
        return Err(Error::Unsupported(format!(
            "extensions are computed for complexes of dimension at most 1, got {}",
            c.dimension()
        )));
    }
    let g = &action.group;
    let sub = Subdivision::new(c);
    let graph = sub.skeleton();
    let comps = graph.components();
    if comps.len() > 1 {
        return Err(Error::Disconnected(format!("{} components", comps.len())));
    }
    let edge_index: BTreeMap<_, usize> = graph.edge_keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut vertex_action = Vec::with_capacity(g.order());
    let mut edge_action = Vec::with_capacity(g.order());
    for a in &action.elements {
        let v: Vec<usize> = graph
            .vertex_keys
            .iter()
            .map(|k| sub.map_simplex(a, &sub, k).expect("automorphisms keep vertices").class)
            .collect();
        let e: Vec<usize> = graph
            .edge_keys
            .iter()
            .map(|k| edge_index[&sub.map_simplex(a, &sub, k).expect("automorphisms keep edges")])
            .collect();
        vertex_action.push(v);
        edge_action.push(e);
    }

    let base_cell = match basepoint {
        Some(b) if b < c.len() => b,
        Some(b) => return Err(Error::InvalidComplex(format!("no cell {b}"))),
        None => (0..c.len()).find(|&x| c.cell_type(x).dimension() == 0).unwrap_or(0),
    };
    let x0 = sub.vertex_of(base_cell);

    // vertex orbits, numbered in order of discovery from the basepoint
    let nv = graph.vertex_count();
    let mut vertex_orbit = vec![usize::MAX; nv];
    let mut lifts = vec![x0];
    let mut lift_paths: Vec<Vec<Step>> = vec![Vec::new()];
    for row in &vertex_action {
        vertex_orbit[row[x0]] = 0;
    }
    let adj = graph.adjacency();
    let mut tree_lift: HashMap<usize, usize> = HashMap::new();
    let mut raw_edge_orbit = vec![usize::MAX; graph.edges.len()];
    for e in 0..graph.edges.len() {
        if raw_edge_orbit[e] == usize::MAX {
            for row in &edge_action {
                raw_edge_orbit[row[e]] = e;
            }
        }
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let v = lifts[i];
        for &(e, w) in &adj[v] {
            if vertex_orbit[w] != usize::MAX {
                continue;
            }
            let j = lifts.len();
            for row in &vertex_action {
                vertex_orbit[row[w]] = j;
            }
            let mut p = lift_paths[i].clone();
            p.push((e, graph.edges[e].1 == v));
            lifts.push(w);
            lift_paths.push(p);
            tree_lift.insert(raw_edge_orbit[e], e);
            queue.push_back(j);
        }
    }

    let find = |pred: &dyn Fn(usize) -> bool| (0..g.order()).find(|&h| pred(h));
    let mut quotient_edges: Vec<QuotientEdge> = Vec::new();
    let mut edge_orbit = vec![usize::MAX; graph.edges.len()];
    let mut stable_count = 0;
    for e in 0..graph.edges.len() {
        if edge_orbit[e] != usize::MAX {
            continue;
        }
        let id = quotient_edges.len();
        for row in &edge_action {
            edge_orbit[row[e]] = id;
        }
        let (o, t) = graph.edges[e];
        let (from, to) = (vertex_orbit[o], vertex_orbit[t]);
        let qe = match tree_lift.get(&raw_edge_orbit[e]) {
            Some(&l) => QuotientEdge { lift: l, from, to, twist: g.identity(), stable_letter: None },
            None => {
                let h = find(&|h| vertex_action[h][o] == lifts[from]).expect("orbit");
                let l = edge_action[h][e];
                let end = graph.edges[l].1;
                let twist = find(&|k| vertex_action[k][lifts[to]] == end).expect("orbit");
                stable_count += 1;
                QuotientEdge { lift: l, from, to, twist, stable_letter: Some(stable_count - 1) }
            }
        };
        quotient_edges.push(qe);
    }

    let stabilizers: Vec<Subgroup> = lifts
        .iter()
        .map(|&v| {
            let members: Vec<usize> = (0..g.order()).filter(|&h| vertex_action[h][v] == v).collect();
            Subgroup::new(g, &members)
        })
        .collect();
    let mut offsets = Vec::with_capacity(lifts.len());
    let mut names = Vec::new();
    let mut quotient_map = Vec::new();
    for (i, s) in stabilizers.iter().enumerate() {
        offsets.push(names.len());
        for (j, &h) in s.generators.iter().enumerate() {
            names.push(format!("v{i}s{j}"));
            quotient_map.push(h);
        }
    }
    let stable_offset = names.len();
    for (id, qe) in quotient_edges.iter().enumerate() {
        if qe.stable_letter.is_some() {
            names.push(format!("t{id}"));
            quotient_map.push(qe.twist);
        }
    }

    let mut ext = ExtensionPresentation {
        action: action.clone(),
        graph,
        basepoint: x0,
        vertex_action,
        edge_action,
        edge_orbit,
        lifts,
        lift_paths,
        stabilizers,
        offsets,
        quotient_edges,
        presentation: GroupPresentation::trivial(),
        quotient_map,
        kernel: Vec::new(),
        coset_index: None,
        generator_lifts: Vec::new(),
    };

    let mut relators = Vec::new();
    for (i, s) in ext.stabilizers.iter().enumerate() {
        relators.extend(s.relators(g).iter().map(|r| shift(r, ext.offsets[i])));
    }
    for (id, qe) in ext.quotient_edges.iter().enumerate() {
        let stab: Vec<usize> = (0..g.order()).filter(|&h| ext.edge_action[h][qe.lift] == qe.lift).collect();
        let t: Word = qe.stable_letter.map(|k| vec![letter(stable_offset + k, false)]).unwrap_or_default();
        let tw_inv = g.inv(qe.twist);
        for &h in &Subgroup::new(g, &stab).generators {
            let conj = g.mul(g.mul(tw_inv, h), qe.twist);
            if !ext.stabilizers[qe.to].contains(conj) {
                return Err(Error::Group(format!("edge {id}: stabilizers are not nested")));
            }
            let mut r = inverse(&t);
            r.extend(ext.vertex_word(qe.from, h));
            r.extend(t.iter().copied());
            r.extend(inverse(&ext.vertex_word(qe.to, conj)));
            relators.push(r);
        }
    }
    ext.presentation = GroupPresentation::new(names, relators)?;

    let mut gl = Vec::new();
    for (i, s) in ext.stabilizers.iter().enumerate() {
        for &h in &s.generators {
            let gamma = &ext.lift_paths[i];
            let mut p = gamma.clone();
            p.extend(reverse_path(&ext.apply_path(h, gamma)));
            gl.push(Lift { element: h, path: reduce_path(&p) });
        }
    }
    for qe in &ext.quotient_edges {
        if qe.stable_letter.is_some() {
            let mut p = ext.lift_paths[qe.from].clone();
            p.push((qe.lift, false));
            p.extend(reverse_path(&ext.apply_path(qe.twist, &ext.lift_paths[qe.to])));
            gl.push(Lift { element: qe.twist, path: reduce_path(&p) });
        }
    }
    ext.generator_lifts = gl;

    ext.kernel = ext.kernel_loops().iter().map(|l| ext.path_to_word(g.identity(), l)).collect::<Result<_>>()?;
    ext.verify()?;
    Ok(ext)
}

impl ExtensionPresentation {
    fn vertex_word(&self, i: usize, h: usize) -> Word {
        shift(&self.stabilizers[i].words[&h], self.offsets[i])
    }

    fn apply_path(&self, g: usize, p: &[Step]) -> Vec<Step> {
        p.iter().map(|&(e, b)| (self.edge_action[g][e], b)).collect()
    }

    fn step_ends(&self, (e, back): Step) -> (usize, usize) {
        let (o, t) = self.graph.edges[e];
        if back {
            (t, o)
        } else {
            (o, t)
        }
    }

    pub fn group(&self) -> &PermGroup {
        &self.action.group
    }

    pub fn identity_lift(&self) -> Lift {
        Lift { element: self.group().identity(), path: Vec::new() }
    }

    pub fn mul_lift(&self, a: &Lift, b: &Lift) -> Lift {
        let mut p = a.path.clone();
        p.extend(self.apply_path(a.element, &b.path));
        Lift { element: self.group().mul(a.element, b.element), path: reduce_path(&p) }
    }

    pub fn inverse_lift(&self, a: &Lift) -> Lift {
        let gi = self.group().inv(a.element);
        Lift { element: gi, path: reduce_path(&self.apply_path(gi, &reverse_path(&a.path))) }
    }

    pub fn generator_lift(&self, k: usize) -> &Lift {
        &self.generator_lifts[k]
    }

    /// Value of a word in the path model.
    pub fn eval(&self, w: &[i32]) -> Lift {
        w.iter().fold(self.identity_lift(), |acc, &l| {
            let x = &self.generator_lifts[generator_of(l)];
            if l > 0 {
                self.mul_lift(&acc, x)
            } else {
                self.mul_lift(&acc, &self.inverse_lift(x))
            }
        })
    }

    /// Image of a word in `G`.
    pub fn quotient_of(&self, w: &[i32]) -> usize {
        let g = self.group();
        w.iter().fold(g.identity(), |acc, &l| {
            let x = self.quotient_map[generator_of(l)];
            g.mul(acc, if l > 0 { x } else { g.inv(x) })
        })
    }

    /// Word representing `(g, p)`; `p` runs from the basepoint to its
    /// translate by `g`.
    pub fn path_to_word(&self, g: usize, p: &[Step]) -> Result<Word> {
        let grp = self.group();
        let mut word: Word = Vec::new();
        let mut a = grp.identity();
        let mut i = 0usize;
        let mut u = self.basepoint;
        let stable = |qe: &QuotientEdge| {
            qe.stable_letter.map(|k| letter(self.presentation.rank() - self.stable_count() + k, false))
        };
        for &step in p {
            let (from, to) = self.step_ends(step);
            if from != u {
                return Err(Error::InvalidMorphism("path is not connected".into()));
            }
            let (e, back) = step;
            let ainv = grp.inv(a);
            let moved = self.edge_action[ainv][e];
            let qe = &self.quotient_edges[self.edge_orbit[moved]];
            if !back {
                let c = self.stabilizers[i]
                    .elements
                    .iter()
                    .copied()
                    .find(|&c| self.edge_action[c][qe.lift] == moved)
                    .expect("edge orbits meet the stabilizer");
                word.extend(self.vertex_word(i, c));
                word.extend(stable(qe));
                a = grp.mul(grp.mul(a, c), qe.twist);
                i = qe.to;
            } else {
                let d = (0..grp.order()).find(|&d| self.edge_action[d][qe.lift] == moved).expect("orbit");
                let x = grp.mul(d, qe.twist);
                if !self.stabilizers[i].contains(x) {
                    return Err(Error::Group("backward step left the stabilizer".into()));
                }
                word.extend(self.vertex_word(i, x));
                word.extend(stable(qe).map(|l| -l));
                a = grp.mul(a, d);
                i = qe.from;
            }
            u = to;
        }
        if i != 0 || self.vertex_action[g][self.basepoint] != u {
            return Err(Error::InvalidMorphism("path does not end at the translated basepoint".into()));
        }
        let rest = grp.mul(grp.inv(a), g);
        word.extend(self.vertex_word(0, rest));
        Ok(free_reduce(&word))
    }

    fn stable_count(&self) -> usize {
        self.quotient_edges.iter().filter(|q| q.stable_letter.is_some()).count()
    }

    /// Loops at the basepoint through the non-tree edges of a spanning tree.
    fn kernel_loops(&self) -> Vec<Vec<Step>> {
        let parent = self.graph.spanning_tree(self.basepoint);
        let mut to_vertex: Vec<Option<Vec<Step>>> = vec![None; self.graph.vertex_count()];
        to_vertex[self.basepoint] = Some(Vec::new());
        let adj = self.graph.adjacency();
        let mut queue = VecDeque::from([self.basepoint]);
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v] {
                if parent[w] == Some(e) && to_vertex[w].is_none() {
                    let mut p = to_vertex[v].clone().expect("visited");
                    p.push((e, self.graph.edges[e].1 == v));
                    to_vertex[w] = Some(p);
                    queue.push_back(w);
                }
            }
        }
        let tree: Vec<bool> = (0..self.graph.edges.len()).map(|e| parent.contains(&Some(e))).collect();
        let mut loops = Vec::new();
        for (e, &(a, b)) in self.graph.edges.iter().enumerate() {
            if tree[e] {
                continue;
            }
            let mut p = to_vertex[a].clone().expect("connected");
            p.push((e, false));
            p.extend(reverse_path(to_vertex[b].as_ref().expect("connected")));
            loops.push(reduce_path(&p));
        }
        loops
    }

    fn verify(&mut self) -> Result<()> {
        let id = self.identity_lift();
        for r in &self.presentation.relators {
            if self.eval(r) != id {
                return Err(Error::Group(format!("relator {} fails in the path model", self.presentation.word_text(r))));
            }
        }
        let g = self.group();
        if Subgroup::new(g, &self.quotient_map).order() != g.order() {
            return Err(Error::Group("quotient map is not surjective".into()));
        }
        for (w, l) in self.kernel.iter().zip(self.kernel_loops()) {
            if self.quotient_of(w) != g.identity() || self.eval(w) != (Lift { element: g.identity(), path: l }) {
                return Err(Error::Group("kernel word does not represent its loop".into()));
            }
        }
        let rank = pi1_presentation(&self.graph, Some(self.basepoint))?.free_rank();
        if rank != Some(self.kernel.len()) {
            return Err(Error::Group("kernel rank differs from the fundamental group of the complex".into()));
        }
        if g.order() <= COSET_CHECK_ORDER {
            let index = self.presentation.coset_index(&self.kernel, COSET_LIMIT)?;
            if index != g.order() {
                return Err(Error::Group(format!("kernel has index {index}, expected {}", g.order())));
            }
            self.coset_index = Some(index);
        }
        Ok(())
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel.len()
    }

    /// All generators commute in the path model.
    pub fn is_abelian(&self) -> bool {
        let n = self.generator_lifts.len();
        (0..n).all(|a| {
            (a + 1..n).all(|b| {
                let (x, y) = (&self.generator_lifts[a], &self.generator_lifts[b]);
                self.mul_lift(x, y) == self.mul_lift(y, x)
            })
        })
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        self.presentation.abelianization()
    }

    pub fn hash(&self) -> String {
        self.presentation.hash()
    }

    pub fn to_text(&self) -> String {
        let mut s = self.presentation.to_text();
        let g = self.group();
        for (k, name) in self.presentation.generators.iter().enumerate() {
            let _ = writeln!(s, "quotient {name} = {}", cycles_text(&g.elements[self.quotient_map[k]]));
        }
        for w in &self.kernel {
            let _ = writeln!(s, "kernel {}", self.presentation.word_text(w));
        }
        s
    }
}

/// Homomorphism `Π₁ → Π₂` induced by an equivariant map of complexes.
#[derive(Clone, Debug)]
pub struct ExtensionMorphism {
    pub group_map: GroupHom,
    /// Image of each source generator.
    pub images: Vec<Word>,
    /// Images of the target generators under the inverse, when it exists.
    pub inverse_images: Option<Vec<Word>>,
}

impl ExtensionMorphism {
    pub fn is_isomorphism(&self) -> bool {
        self.inverse_images.is_some()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ExtensionMorphism) -> ExtensionMorphism {
        let images = self.images.iter().map(|w| substitute(w, &other.images)).collect();
        let table = self.group_map.table.iter().map(|&g| other.group_map.table[g]).collect();
        let inverse_images = match (&self.inverse_images, &other.inverse_images) {
            (Some(a), Some(b)) => Some(b.iter().map(|w| substitute(w, a)).collect()),
            _ => None,
        };
        ExtensionMorphism { group_map: GroupHom { table }, images, inverse_images }
    }

    /// Agreement on every generator, compared in the target's path model.
    pub fn agrees_with(&self, other: &ExtensionMorphism, target: &ExtensionPresentation) -> bool {
        self.group_map == other.group_map
            && self.images.iter().zip(&other.images).all(|(a, b)| target.eval(a) == target.eval(b))
    }
}

struct GraphMap {
    vertices: Vec<usize>,
    edges: Vec<Option<usize>>,
}

impl GraphMap {
    fn path(&self, p: &[Step]) -> Vec<Step> {
        reduce_path(&p.iter().filter_map(|&(e, b)| self.edges[e].map(|f| (f, b))).collect::<Vec<_>>())
    }

    fn inverse(&self, nv: usize, ne: usize) -> Option<GraphMap> {
        if self.vertices.len() != nv || self.edges.len() != ne {
            return None;
        }
        let mut v = vec![usize::MAX; nv];
        for (a, &b) in self.vertices.iter().enumerate() {
            if v[b] != usize::MAX {
                return None;
            }
            v[b] = a;
        }
        let mut e = vec![None; ne];
        for (a, b) in self.edges.iter().enumerate() {
            let b = (*b)?;
            if e[b].is_some() {
                return None;
            }
            e[b] = Some(a);
        }
        Some(GraphMap { vertices: v, edges: e })
    }
}

fn graph_map(src: &ExtensionPresentation, dst: &ExtensionPresentation, phi: &PolyMorphism) -> GraphMap {
    let s1 = Subdivision::new(&src.action.complex);
    let s2 = Subdivision::new(&dst.action.complex);
    let index: BTreeMap<_, usize> = dst.graph.edge_keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let vertices = src
        .graph
        .vertex_keys
        .iter()
        .map(|k| s1.map_simplex(phi, &s2, k).expect("vertices map to vertices").class)
        .collect();
    let edges = src.graph.edge_keys.iter().map(|k| s1.map_simplex(phi, &s2, k).map(|e| index[&e])).collect();
    GraphMap { vertices, edges }
}

fn lift_images(
    src: &ExtensionPresentation,
    dst: &ExtensionPresentation,
    map: &GraphMap,
    psi: &GroupHom,
) -> Result<Vec<Word>> {
    src.generator_lifts.iter().map(|l| dst.path_to_word(psi.table[l.element], &map.path(&l.path))).collect()
}

/// The map on extensions induced by `phi` and `psi`, which must satisfy
/// `phi(g·x) = psi(g)·phi(x)` and preserve basepoints. `level` labels
/// errors.
pub fn induced_hom(
    src: &ExtensionPresentation,
    dst: &ExtensionPresentation,
    phi: &PolyMorphism,
    psi: &GroupHom,
    level: usize,
) -> Result<ExtensionMorphism> {
    if !same_complex(&phi.source, &src.action.complex) || !same_complex(&phi.target, &dst.action.complex) {
        return Err(Error::InvalidMorphism("complex map does not match the extensions".into()));
    }
    if psi.table.len() != src.group().order() {
        return Err(Error::InvalidMorphism("group map does not match the extensions".into()));
    }
    for (g, a) in src.action.elements.iter().enumerate() {
        let b = &dst.action.elements[psi.table[g]];
        for x in 0..phi.source.len() {
            if phi.apply(&a.images[x]) != b.apply(&phi.images[x]) {
                return Err(Error::NonCommuting {
                    level,
                    detail: format!(
                        "{} moves `{}` incompatibly with its image",
                        cycles_text(&src.group().elements[g]),
                        phi.source.name(x)
                    ),
                });
            }
        }
    }
    let map = graph_map(src, dst, phi);
    if map.vertices[src.basepoint] != dst.basepoint {
        return Err(Error::NonCommuting { level, detail: "basepoint is not preserved".into() });
    }
    let images = lift_images(src, dst, &map, psi)?;
    for (k, w) in images.iter().enumerate() {
        if dst.quotient_of(w) != psi.table[src.quotient_map[k]] {
            return Err(Error::NonCommuting {
                level,
                detail: format!("generator {} does not commute with the quotients", src.presentation.generators[k]),
            });
        }
    }
    let id = dst.identity_lift();
    for r in &src.presentation.relators {
        if dst.eval(&substitute(r, &images)) != id {
            return Err(Error::Group("induced map does not respect a relator".into()));
        }
    }
    let inverse_images = match (psi.inverse(), map.inverse(dst.graph.vertex_count(), dst.graph.edges.len())) {
        (Some(psi_inv), Some(inv)) => {
            let back = lift_images(dst, src, &inv, &psi_inv)?;
            for (k, w) in images.iter().enumerate() {
                if src.eval(&substitute(w, &back)) != src.generator_lifts[k] {
                    return Err(Error::Group("inverse does not undo the induced map".into()));
                }
            }
            for (k, w) in back.iter().enumerate() {
                if dst.eval(&substitute(w, &images)) != dst.generator_lifts[k] {
                    return Err(Error::Group("induced map does not undo its inverse".into()));
                }
            }
            Some(back)
        }
        _ => None,
    };
    Ok(ExtensionMorphism { group_map: psi.clone(), images, inverse_images })
}

#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub id: usize,
    pub extension: ExtensionPresentation,
}

/// Covering map between two levels, given by the map of complexes and
/// the images of the source group's generators.
#[derive(Clone, Debug)]
pub struct ConnectingDatum {
    pub from: usize,
    pub to: usize,
    pub complex_map: PolyMorphism,
    pub group_images: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ConnectingMap {
    pub from: usize,
    pub to: usize,
    pub morphism: ExtensionMorphism,
}

#[derive(Clone, Debug)]
pub struct TemperedTower {
    pub levels: Vec<TowerLevel>,
    pub connecting: Vec<ConnectingMap>,
}

pub fn build_tower(levels: Vec<TowerLevel>, data: Vec<ConnectingDatum>) -> Result<TemperedTower> {
    for (i, l) in levels.iter().enumerate() {
        if levels[..i].iter().any(|m| m.id == l.id) {
            return Err(Error::InvalidMorphism(format!("level {} appears twice", l.id)));
        }
    }
    let mut tower = TemperedTower { levels, connecting: Vec::new() };
    for d in data {
        let a = tower.position(d.from)?;
        let b = tower.position(d.to)?;
        let (src, dst) = (&tower.levels[a].extension, &tower.levels[b].extension);
        let psi = GroupHom::from_generators(src.group(), dst.group(), &d.group_images)?;
        if psi.table.iter().collect::<std::collections::BTreeSet<_>>().len() != dst.group().order() {
            return Err(Error::Group(format!("connecting map {} -> {} is not onto", d.from, d.to)));
        }
        let morphism = induced_hom(src, dst, &d.complex_map, &psi, d.from)?;
        tower.connecting.push(ConnectingMap { from: d.from, to: d.to, morphism });
    }
    Ok(tower)
}

impl TemperedTower {
    pub fn position(&self, id: usize) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| l.id == id)
            .ok_or_else(|| Error::InvalidMorphism(format!("no level {id}")))
    }

    pub fn level(&self, id: usize) -> Option<&ExtensionPresentation> {
        self.levels.iter().find(|l| l.id == id).map(|l| &l.extension)
    }

    pub fn connecting_map(&self, from: usize, to: usize) -> Option<&ExtensionMorphism> {
        self.connecting.iter().find(|c| c.from == from && c.to == to).map(|c| &c.morphism)
    }

    /// One line per level: id, `|G|`, kernel rank, presentation hash.
    pub fn report(&self) -> String {
        let mut s = String::from("level\torder\tkernel_rank\tabelianization\thash\n");
        for l in &self.levels {
            let e = &l.extension;
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}",
                l.id,
                e.group().order(),
                e.kernel_rank(),
                e.abelianization(),
                &e.hash()[..16]
            );
        }
        for c in &self.connecting {
            let _ = writeln!(s, "map {} -> {}", c.from, c.to);
        }
        s
    }
}

/// Level map between two towers.
#[derive(Clone, Debug)]
pub struct LevelMap {
    pub source_level: usize,
    pub target_level: usize,
    pub complex_map: PolyMorphism,
    pub group_images: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TowerCospecialization {
    /// `(source level, target level, map)`.
    pub levels: Vec<(usize, usize, ExtensionMorphism)>,
}

impl TowerCospecialization {
    pub fn is_levelwise_isomorphism(&self) -> bool {
        self.levels.iter().all(|(_, _, m)| m.is_isomorphism())
    }
}

/// Levelwise homomorphisms `t1 → t2`, checked against the connecting maps
/// wherever both ends of a connecting map are matched.
pub fn cospecialize_tower(t1: &TemperedTower, t2: &TemperedTower, maps: &[LevelMap]) -> Result<TowerCospecialization> {
    let mut levels = Vec::with_capacity(maps.len());
    for m in maps {
        let src = t1.level(m.source_level).ok_or_else(|| Error::InvalidMorphism(format!("no level {}", m.source_level)))?;
        let dst = t2.level(m.target_level).ok_or_else(|| Error::InvalidMorphism(format!("no level {}", m.target_level)))?;
        let psi = GroupHom::from_generators(src.group(), dst.group(), &m.group_images)
            .map_err(|e| Error::NonCommuting { level: m.source_level, detail: e.to_string() })?;
        let hom = induced_hom(src, dst, &m.complex_map, &psi, m.source_level)?;
        levels.push((m.source_level, m.target_level, hom));
    }
    for c1 in &t1.connecting {
        let at = |id: usize| levels.iter().find(|(s, _, _)| *s == id);
        let (Some((_, a2, fa)), Some((_, b2, fb))) = (at(c1.from), at(c1.to)) else { continue };
        let Some(c2) = t2.connecting_map(*a2, *b2) else { continue };
        let lower = c1.morphism.then(fb);
        let upper = fa.then(c2);
        if !lower.agrees_with(&upper, t2.level(*b2).expect("matched level")) {
            return Err(Error::NonCommuting {
                level: c1.from,
                detail: format!("square over {} -> {} does not commute", c1.from, c1.to),
            });
        }
    }
    Ok(TowerCospecialization { levels })
}

/// Collapse of a complex onto the point.
pub fn collapse_to_point(c: &PolysimplicialSet) -> Result<PolyMorphism> {
    let images = (0..c.len())
        .map(|x| Element { surjection: LambdaMorphism::standard_surjection(c.cell_type(x), &[]), cell: 0 })
        .collect();
    PolyMorphism::new(c.clone(), PolysimplicialSet::point(), images)
}

fn rotate_cycle(name: &str, by: usize, modulus: usize) -> String {
    match name.split_once('.') {
        Some((p, rest)) if p.starts_with('p') => match p[1..].parse::<usize>() {
            Ok(k) => format!("p{}.{rest}", (k + by) % modulus),
            Err(_) => name.to_string(),
        },
        _ => name.to_string(),
    }
}

/// Level `m` of the Tate analogue: the `m`-cycle with `Z/m × Z/m` acting,
/// the first factor by rotation and the second trivially.
pub fn tate_level(m: usize) -> Result<ExtensionPresentation> {
    if m < 2 {
        return Err(Error::Unsupported("Tate levels start at 2".into()));
    }
    let glued = corpus::closed(&corpus::cycle(m));
    let rot = glued.induced_morphism(&glued, |n| rotate_cycle(n, 1, m))?;
    let id = PolyMorphism::identity(&glued.complex);
    let action = GaloisAction::new(glued.complex.clone(), PermGroup::cyclic_square(m), vec![rot, id])?;
    lift_extension(action, None)
}

/// Level `m` of the good reduction analogue: the point with `Z/m × Z/m`.
pub fn good_level(m: usize) -> Result<ExtensionPresentation> {
    lift_extension(GaloisAction::trivial(PolysimplicialSet::point(), PermGroup::cyclic_square(m)), None)
}

fn divisibility_data(ids: &[usize], complex_map: impl Fn(usize, usize) -> Result<PolyMorphism>) -> Result<Vec<ConnectingDatum>> {
    let mut data = Vec::new();
    for &a in ids {
        for &b in ids {
            if a != b && a % b == 0 {
                let target = PermGroup::cyclic_square(b);
                let group_images = target.generators.iter().map(|p| target.index_of(p).expect("generator")).collect();
                data.push(ConnectingDatum { from: a, to: b, complex_map: complex_map(a, b)?, group_images });
            }
        }
    }
    Ok(data)
}

/// Tate tower over the given levels, with maps `m' → m` whenever `m | m'`.
pub fn tate_tower(ids: &[usize]) -> Result<TemperedTower> {
    let levels = ids.iter().map(|&m| Ok(TowerLevel { id: m, extension: tate_level(m)? })).collect::<Result<_>>()?;
    let data = divisibility_data(ids, |a, b| {
        let ga = corpus::closed(&corpus::cycle(a));
        let gb = corpus::closed(&corpus::cycle(b));
        ga.induced_morphism(&gb, |n| rotate_cycle(n, 0, b))
    })?;
    build_tower(levels, data)
}

pub fn good_tower(ids: &[usize]) -> Result<TemperedTower> {
    let levels = ids.iter().map(|&m| Ok(TowerLevel { id: m, extension: good_level(m)? })).collect::<Result<_>>()?;
    let pt = PolysimplicialSet::point();
    let data = divisibility_data(ids, |_, _| Ok(PolyMorphism::identity(&pt)))?;
    build_tower(levels, data)
}

/// Level maps collapsing each cycle onto the point.
pub fn tate_to_good_maps(t1: &TemperedTower) -> Result<Vec<LevelMap>> {
    t1.levels
        .iter()
        .map(|l| {
            let g = l.extension.group();
            Ok(LevelMap {
                source_level: l.id,
                target_level: l.id,
                complex_map: collapse_to_point(&l.extension.action.complex)?,
                group_images: g.generators.iter().map(|p| g.index_of(p).expect("generator")).collect(),
            })
        })
        .collect()
}

/// Level maps sending the point to the basepoint of each cycle.
pub fn good_to_tate_maps(good: &TemperedTower, tate: &TemperedTower) -> Result<Vec<LevelMap>> {
    good.levels
        .iter()
        .map(|l| {
            let target = &tate.level(l.id).ok_or_else(|| Error::InvalidMorphism(format!("no level {}", l.id)))?.action.complex;
            let cell = (0..target.len()).find(|&x| target.cell_type(x).dimension() == 0).unwrap_or(0);
            let complex_map = PolyMorphism::new(
                PolysimplicialSet::point(),
                target.clone(),
                vec![Element::nondegenerate(cell, target.cell_type(cell))],
            )?;
            let g = l.extension.group();
            Ok(LevelMap {
                source_level: l.id,
                target_level: l.id,
                complex_map,
                group_images: g.generators.iter().map(|p| g.index_of(p).expect("generator")).collect(),
            })
        })
        .collect()
}

/// Identity level maps of a tower onto itself.
pub fn identity_maps(t: &TemperedTower) -> Vec<LevelMap> {
    t.levels
        .iter()
        .map(|l| {
            let g = l.extension.group();
            LevelMap {
                source_level: l.id,
                target_level: l.id,
                complex_map: PolyMorphism::identity(&l.extension.action.complex),
                group_images: g.generators.iter().map(|p| g.index_of(p).expect("generator")).collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group_gives_pi1() {
        let lp = corpus::closed(&corpus::nodal_cubic()).complex;
        let e = lift_extension(GaloisAction::trivial(lp, PermGroup::trivial()), None).unwrap();
        assert_eq!(e.presentation.free_rank(), Some(1));
        assert_eq!(e.kernel_rank(), 1);
        let th = corpus::closed(&corpus::theta()).complex;
        let e = lift_extension(GaloisAction::trivial(th, PermGroup::trivial()), None).unwrap();
        assert_eq!(e.presentation.abelianization().free_rank, 2);
    }

    #[test]
    fn free_rotation() {
        let n = 4;
        let glued = corpus::closed(&corpus::cycle(n));
        let rot = glued.induced_morphism(&glued, |s| rotate_cycle(s, 1, n)).unwrap();
        let mut p: Vec<u32> = (0..n as u32).collect();
        p.rotate_left(1);
        let g = PermGroup::new(n, vec![p]).unwrap();
        let e = lift_extension(GaloisAction::new(glued.complex.clone(), g, vec![rot]).unwrap(), None).unwrap();
        assert_eq!(e.abelianization().to_string(), "Z");
        assert!(e.is_abelian());
        assert_eq!(e.coset_index, Some(n));
    }

    #[test]
    fn tate_and_good() {
        for m in [2, 3] {
            let t = tate_level(m).unwrap();
            assert!(t.is_abelian());
            let ab = t.abelianization();
            assert_eq!((ab.free_rank, ab.torsion.clone()), (1, vec![m as i64]));
            let g = good_level(m).unwrap();
            assert_eq!(g.kernel_rank(), 0);
            assert_eq!(g.coset_index, Some(m * m));
            assert_eq!(g.abelianization().torsion, vec![m as i64, m as i64]);
        }
    }

    #[test]
    fn towers_and_direction() {
        let t = tate_tower(&[2, 4]).unwrap();
        let g = good_tower(&[2, 4]).unwrap();
        assert_eq!(t.connecting.len(), 1);
        let down = cospecialize_tower(&t, &g, &tate_to_good_maps(&t).unwrap()).unwrap();
        assert!(!down.is_levelwise_isomorphism());
        let up = cospecialize_tower(&g, &t, &good_to_tate_maps(&g, &t).unwrap());
        assert!(matches!(up, Err(Error::NonCommuting { .. })));
        let same = cospecialize_tower(&t, &t, &identity_maps(&t)).unwrap();
        assert!(same.is_levelwise_isomorphism());
    }

    #[test]
    fn higher_dimension_is_unsupported() {
        let sq = PolysimplicialSet::representable(&crate::lambda::LambdaObject::new(vec![1, 1]).unwrap());
        let r = lift_extension(GaloisAction::trivial(sq, PermGroup::trivial()), None);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
