//! Barycentric 2-skeleta of realizations and edge-path presentations of
//! their fundamental groups.
//!
//! A simplex of the subdivision is a strict chain of faces of `Σ_n` ending at
//! the whole of `Σ_n`, attached to a cell class. Faces of a product of
//! simplices are tuples of nonempty vertex subsets, stored as bit masks.

use crate::complex::{isomorphisms_into, PolyMorphism, PolysimplicialSet};
use crate::error::{Error, Result};
use crate::group::{free_reduce, letter, GroupPresentation, Word};
use crate::lambda::{Coord, LambdaMorphism, LambdaObject};
use crate::lattice;
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

pub type FaceSet = Vec<u32>;

fn full_face(n: &LambdaObject) -> FaceSet {
    n.dims().iter().map(|&d| (1u32 << (d + 1)) - 1).collect()
}

fn all_faces(n: &LambdaObject) -> Vec<FaceSet> {
    let mut out: Vec<FaceSet> = vec![Vec::new()];
    for &d in n.dims() {
        let mut next = Vec::new();
        for prefix in &out {
            for mask in 1u32..(1u32 << (d + 1)) {
                let mut f = prefix.clone();
                f.push(mask);
                next.push(f);
            }
        }
        out = next;
    }
    out.sort_by_key(|f| (f.iter().map(|m| m.count_ones()).sum::<u32>(), f.clone()));
    out
}

fn is_subface(a: &FaceSet, b: &FaceSet) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == *x)
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// The injection of `Σ_m` onto a face, with increasing vertex maps.
fn face_injection(n: &LambdaObject, face: &FaceSet) -> LambdaMorphism {
    let wide: Vec<usize> = (0..face.len()).filter(|&l| face[l].count_ones() >= 2).collect();
    let source = if wide.is_empty() {
        LambdaObject::point()
    } else {
        LambdaObject::new(wide.iter().map(|&l| face[l].count_ones() as usize - 1).collect()).expect("positive")
    };
    let coords = (0..face.len())
        .map(|l| match wide.iter().position(|&w| w == l) {
            Some(k) => Coord::From { src: k, alpha: bits(face[l]) },
            None => Coord::Const(bits(face[l])[0]),
        })
        .collect();
    LambdaMorphism::new(source, n.clone(), coords).expect("face injection")
}

/// Preimage under `iota` of a face contained in its image.
fn pull_back(iota: &LambdaMorphism, face: &FaceSet) -> FaceSet {
    if iota.source().is_point() {
        return vec![1];
    }
    let mut out = vec![0u32; iota.source().coords()];
    for (l, c) in iota.coords().iter().enumerate() {
        if let Coord::From { src, alpha } = c {
            for (j, &a) in alpha.iter().enumerate() {
                if face[l] >> a & 1 == 1 {
                    out[*src] |= 1 << j;
                }
            }
        }
    }
    out
}

/// Image of a face under an arbitrary morphism of Λ.
fn push_forward(m: &LambdaMorphism, face: &FaceSet) -> FaceSet {
    m.coords()
        .iter()
        .map(|c| match c {
            Coord::Const(v) => 1u32 << v,
            Coord::From { src, alpha } => bits(face[*src]).iter().fold(0u32, |acc, &j| acc | 1 << alpha[j]),
        })
        .collect()
}

fn strict(chain: &[FaceSet]) -> bool {
    chain.windows(2).all(|w| w[0] != w[1] && is_subface(&w[0], &w[1]))
}

/// Key of a simplex of the subdivision: cell class and face chain in the
/// class representative, minimal over its stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SdKey {
    pub class: usize,
    pub chain: Vec<FaceSet>,
}

/// Normal forms of simplices of the barycentric subdivision of `|C|`.
pub struct Subdivision<'a> {
    pub complex: &'a PolysimplicialSet,
    class_of: Vec<usize>,
    reps: Vec<usize>,
    /// For each cell `y`, an isomorphism `σ` with `rep · σ = y`.
    to_rep: Vec<LambdaMorphism>,
    stabilizers: Vec<Vec<LambdaMorphism>>,
}

impl<'a> Subdivision<'a> {
    pub fn new(complex: &'a PolysimplicialSet) -> Subdivision<'a> {
        let (class_of, classes) = complex.orbit_of();
        let reps: Vec<usize> = classes.iter().map(|m| m[0]).collect();
        let mut to_rep: Vec<Option<LambdaMorphism>> = vec![None; complex.len()];
        let mut stabilizers = Vec::with_capacity(reps.len());
        for &r in &reps {
            let mut stab = Vec::new();
            for sigma in isomorphisms_into(complex.cell_type(r)) {
                let y = complex.act(r, &sigma).cell;
                if y == r && sigma.source() == complex.cell_type(r) {
                    stab.push(sigma.clone());
                }
                if to_rep[y].is_none() {
                    to_rep[y] = Some(sigma);
                }
            }
            stabilizers.push(stab);
        }
        let to_rep = to_rep.into_iter().map(|s| s.expect("every cell lies in a class")).collect();
        Subdivision { complex, class_of, reps, to_rep, stabilizers }
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }

    pub fn representative(&self, class: usize) -> usize {
        self.reps[class]
    }

    /// Vertex of the subdivision at the barycentre of a cell.
    pub fn vertex_of(&self, cell: usize) -> usize {
        self.class_of[cell]
    }

    /// Normal form of the simplex given by a chain of faces of `Σ_{type(y)}`;
    /// `None` when the simplex is degenerate in `|C|`.
    pub fn reduce(&self, cell: usize, chain: Vec<FaceSet>) -> Option<SdKey> {
        let c = self.complex;
        let (mut y, mut chain) = (cell, chain);
        if !strict(&chain) {
            return None;
        }
        loop {
            let ty = c.cell_type(y);
            let top = chain.last().expect("nonempty chain").clone();
            if top == full_face(ty) {
                break;
            }
            let iota = face_injection(ty, &top);
            let e = c.act(y, &iota);
            chain = chain.iter().map(|g| push_forward(&e.surjection, &pull_back(&iota, g))).collect();
            if !strict(&chain) {
                return None;
            }
            y = e.cell;
        }
        let class = self.class_of[y];
        let sigma = &self.to_rep[y];
        let in_rep: Vec<FaceSet> = chain.iter().map(|g| push_forward(sigma, g)).collect();
        let best = self.stabilizers[class]
            .iter()
            .map(|tau| in_rep.iter().map(|g| push_forward(tau, g)).collect::<Vec<_>>())
            .min()
            .unwrap_or(in_rep);
        Some(SdKey { class, chain: best })
    }

    /// Image of a simplex under a morphism of polysimplicial sets.
    pub fn map_simplex(&self, f: &PolyMorphism, target: &Subdivision<'_>, key: &SdKey) -> Option<SdKey> {
        let r = self.reps[key.class];
        let img = &f.images[r];
        let chain = key.chain.iter().map(|g| push_forward(&img.surjection, g)).collect();
        target.reduce(img.cell, chain)
    }

    pub fn skeleton(&self) -> TwoSkeleton {
        let c = self.complex;
        let mut vertex_keys = Vec::new();
        for (k, &r) in self.reps.iter().enumerate() {
            vertex_keys.push(SdKey { class: k, chain: vec![full_face(c.cell_type(r))] });
        }
        let vertex_of = |key: &SdKey| key.class;
        let mut edges: BTreeMap<SdKey, (usize, usize)> = BTreeMap::new();
        let mut triangles: BTreeMap<SdKey, [SdKey; 3]> = BTreeMap::new();
        let mut degenerate: BTreeMap<SdKey, ()> = BTreeMap::new();
        for (k, &r) in self.reps.iter().enumerate() {
            let ty = c.cell_type(r);
            let full = full_face(ty);
            let faces: Vec<FaceSet> = all_faces(ty).into_iter().filter(|f| *f != full).collect();
            for g0 in &faces {
                let key = self.reduce(r, vec![g0.clone(), full.clone()]).expect("chain ending at the top");
                let lower = self.reduce(r, vec![g0.clone()]).expect("vertex");
                edges.entry(key).or_insert((vertex_of(&lower), k));
                for g1 in &faces {
                    if g0 == g1 || !is_subface(g0, g1) {
                        continue;
                    }
                    let key = self.reduce(r, vec![g0.clone(), g1.clone(), full.clone()]).expect("top chain");
                    if triangles.contains_key(&key) {
                        continue;
                    }
                    let d0 = self.reduce(r, vec![g1.clone(), full.clone()]).expect("top chain");
                    let d1 = self.reduce(r, vec![g0.clone(), full.clone()]).expect("top chain");
                    let d2 = match self.reduce(r, vec![g0.clone(), g1.clone()]) {
                        Some(e) => e,
                        None => {
                            let v = self.reduce(r, vec![g0.clone()]).expect("vertex");
                            let marker = SdKey { class: usize::MAX, chain: v.chain.clone() };
                            degenerate.insert(marker.clone(), ());
                            SdKey { class: usize::MAX, chain: vec![vec![v.class as u32]] }
                        }
                    };
                    triangles.insert(key, [d2, d0, d1]);
                }
            }
        }
        // faces of triangles are edges of the classes they reduce into
        let edge_keys: Vec<SdKey> = edges.keys().cloned().collect();
        let edge_index: BTreeMap<SdKey, usize> = edge_keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let edge_list: Vec<(usize, usize)> = edge_keys.iter().map(|k| edges[k]).collect();
        let mut tri_list = Vec::new();
        let mut tri_keys = Vec::new();
        for (key, [e01, e12, e02]) in &triangles {
            let idx = |e: &SdKey| if e.class == usize::MAX { None } else { Some(edge_index[e]) };
            let (i01, i12, i02) = (idx(e01), idx(e12), idx(e02));
            let v0 = edge_list[i02.expect("edge to the top")].0;
            let v2 = key.class;
            let v1 = edge_list[i12.expect("edge to the top")].0;
            tri_list.push(Triangle { vertices: [v0, v1, v2], edges: [i01, i12, i02] });
            tri_keys.push(key.clone());
        }
        let labels = self
            .reps
            .iter()
            .map(|&r| format!("{} {}", c.name(r), c.cell_type(r)))
            .collect();
        TwoSkeleton { vertex_labels: labels, edges: edge_list, triangles: tri_list, vertex_keys, edge_keys, triangle_keys: tri_keys }
    }
}

/// A triangle `v0 < v1 < v2` with edges `v0v1`, `v1v2`, `v0v2`; `None` marks
/// an edge collapsed to a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub edges: [Option<usize>; 3],
}

#[derive(Clone, Debug)]
pub struct TwoSkeleton {
    pub vertex_labels: Vec<String>,
    /// Oriented edges `(origin, terminus)`.
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<Triangle>,
    pub vertex_keys: Vec<SdKey>,
    pub edge_keys: Vec<SdKey>,
    pub triangle_keys: Vec<SdKey>,
}

pub fn two_skeleton(c: &PolysimplicialSet) -> TwoSkeleton {
    Subdivision::new(c).skeleton()
}

impl TwoSkeleton {
    pub fn vertex_count(&self) -> usize {
        self.vertex_labels.len()
    }

    /// Every triangle boundary is a closed edge path.
    pub fn is_valid(&self) -> bool {
        self.triangles.iter().all(|t| {
            let [v0, v1, v2] = t.vertices;
            let ends = |e: Option<usize>, a: usize, b: usize| match e {
                Some(i) => self.edges[i] == (a, b),
                None => a == b,
            };
            ends(t.edges[0], v0, v1) && ends(t.edges[1], v1, v2) && ends(t.edges[2], v0, v2)
        })
    }

    /// Boundary word `e01 · e12 · e02⁻¹` as signed edge indices.
    pub fn boundary(&self, t: &Triangle) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        if let Some(e) = t.edges[0] {
            out.push((e, false));
        }
        if let Some(e) = t.edges[1] {
            out.push((e, false));
        }
        if let Some(e) = t.edges[2] {
            out.push((e, true));
        }
        out
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let adj = self.adjacency();
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(_, w) in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// `(edge, neighbour)` lists in edge order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((i, b));
            if a != b {
                adj[b].push((i, a));
            }
        }
        adj
    }

    /// Vertex with the least label.
    pub fn default_basepoint(&self) -> usize {
        (0..self.vertex_count()).min_by(|&a, &b| self.vertex_labels[a].cmp(&self.vertex_labels[b])).unwrap_or(0)
    }

    /// Breadth-first spanning tree: for each vertex the tree edge used to
    /// reach it.
    pub fn spanning_tree(&self, base: usize) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut parent = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[base] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(e);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// First Betti number from the ranks of the boundary maps.
    pub fn h1_rank(&self) -> usize {
        let nv = self.vertex_count();
        let ne = self.edges.len();
        let d1: Vec<Vec<i64>> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let mut row = vec![0i64; nv];
                row[a] -= 1;
                row[b] += 1;
                row
            })
            .collect();
        let d2: Vec<Vec<i64>> = self
            .triangles
            .iter()
            .map(|t| {
                let mut row = vec![0i64; ne];
                for (e, inv) in self.boundary(t) {
                    row[e] += if inv { -1 } else { 1 };
                }
                row
            })
            .collect();
        let r1 = lattice::smith_invariants(&d1, nv).len();
        let r2 = lattice::smith_invariants(&d2, ne).len();
        ne - r1 - r2
    }

    /// Subdivides every edge and triangle once more.
    pub fn barycentric_refinement(&self) -> TwoSkeleton {
        let nv = self.vertex_count();
        let mut labels = self.vertex_labels.clone();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut mid = Vec::with_capacity(self.edges.len());
        let mut halves = Vec::with_capacity(self.edges.len());
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            let m = labels.len();
            labels.push(format!("m{i}"));
            mid.push(m);
            halves.push([edges.len(), edges.len() + 1]);
            edges.push((a, m));
            edges.push((b, m));
        }
        let mut triangles = Vec::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            let bc = labels.len();
            labels.push(format!("b{ti}"));
            let corner: Vec<usize> = (0..3)
                .map(|i| {
                    edges.push((t.vertices[i], bc));
                    edges.len() - 1
                })
                .collect();
            let sides = [(0usize, 1usize), (1, 2), (0, 2)];
            for (s, &(i, j)) in sides.iter().enumerate() {
                let (m, to_mid) = match t.edges[s] {
                    Some(e) => (mid[e], Some(halves[e])),
                    None => (t.vertices[i], None),
                };
                edges.push((m, bc));
                let side = edges.len() - 1;
                for (end, v) in [(0usize, i), (1, j)] {
                    let vm = to_mid.map(|h| h[end]);
                    triangles.push(Triangle { vertices: [t.vertices[v], m, bc], edges: [vm, Some(side), Some(corner[v])] });
                }
            }
        }
        let _ = nv;
        TwoSkeleton {
            vertex_labels: labels,
            edges,
            triangles,
            vertex_keys: Vec::new(),
            edge_keys: Vec::new(),
            triangle_keys: Vec::new(),
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n");
        for (i, l) in self.vertex_labels.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{}\"];", l.replace('"', "'"));
        }
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "  v{a} -- v{b} [label=\"e{i}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// Edge-path presentation of `π₁(|sk|, base)`.
#[derive(Clone, Debug)]
pub struct Pi1 {
    pub presentation: GroupPresentation,
    pub basepoint: usize,
    /// Generator index of each edge; `None` for tree edges.
    pub edge_generator: Vec<Option<usize>>,
}

impl Pi1 {
    pub fn edge_word(&self, edge: usize, inverse: bool) -> Word {
        self.edge_generator[edge].map(|g| vec![letter(g, inverse)]).unwrap_or_default()
    }

    pub fn free_rank(&self) -> Option<usize> {
        self.presentation.free_rank()
    }
}

pub fn pi1_presentation(sk: &TwoSkeleton, basepoint: Option<usize>) -> Result<Pi1> {
    let comps = sk.components();
    if comps.len() > 1 {
        let listing: Vec<String> = comps
            .iter()
            .map(|c| {
                let names: Vec<&str> = c.iter().map(|&v| sk.vertex_labels[v].as_str()).collect();
                format!("{{{}}}", names.join(", "))
            })
            .collect();
        return Err(Error::Disconnected(format!("{} components: {}", comps.len(), listing.join(" "))));
    }
    if comps.is_empty() {
        return Err(Error::Disconnected("empty complex".into()));
    }
    let base = basepoint.unwrap_or_else(|| sk.default_basepoint());
    let parent = sk.spanning_tree(base);
    let tree: Vec<bool> = {
        let mut t = vec![false; sk.edges.len()];
        for e in parent.iter().flatten() {
            t[*e] = true;
        }
        t
    };
    let mut edge_generator = vec![None; sk.edges.len()];
    let mut names = Vec::new();
    for e in 0..sk.edges.len() {
        if !tree[e] {
            edge_generator[e] = Some(names.len());
            names.push(format!("x{}", names.len()));
        }
    }
    let pi = Pi1 { presentation: GroupPresentation::trivial(), basepoint: base, edge_generator };
    let relators: Vec<Word> = sk
        .triangles
        .iter()
        .map(|t| {
            let w: Word = sk.boundary(t).iter().flat_map(|&(e, inv)| pi.edge_word(e, inv)).collect();
            free_reduce(&w)
        })
        .collect();
    let presentation = GroupPresentation::new(names, relators)?;
    Ok(Pi1 { presentation, ..pi })
}

/// First Betti number of the realization.
pub fn h1_rank(c: &PolysimplicialSet) -> usize {
    two_skeleton(c).h1_rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::corpus;

    fn obj(d: &[usize]) -> LambdaObject {
        LambdaObject::new(d.to_vec()).unwrap()
    }

    #[test]
    fn counts() {
        let pt = two_skeleton(&PolysimplicialSet::point());
        assert_eq!((pt.vertex_count(), pt.edges.len()), (1, 0));
        let e = two_skeleton(&PolysimplicialSet::representable(&obj(&[1])));
        assert_eq!((e.vertex_count(), e.edges.len()), (3, 2));
        let lp = two_skeleton(&corpus::closed(&corpus::nodal_cubic()).complex);
        assert_eq!((lp.vertex_count(), lp.edges.len()), (2, 2));
        let sq = two_skeleton(&PolysimplicialSet::representable(&obj(&[1, 1])));
        assert_eq!((sq.vertex_count(), sq.edges.len(), sq.triangles.len()), (9, 16, 8));
        assert!(sq.is_valid());
    }

    #[test]
    fn groups() {
        let lp = two_skeleton(&corpus::closed(&corpus::nodal_cubic()).complex);
        assert_eq!(pi1_presentation(&lp, None).unwrap().free_rank(), Some(1));
        let th = two_skeleton(&corpus::closed(&corpus::theta()).complex);
        assert_eq!(pi1_presentation(&th, None).unwrap().free_rank(), Some(2));
        let sq = two_skeleton(&PolysimplicialSet::representable(&obj(&[1, 1])));
        assert_eq!(sq.h1_rank(), 0);
        assert_eq!(pi1_presentation(&sq, None).unwrap().presentation.abelianization().free_rank, 0);
        let pt = two_skeleton(&PolysimplicialSet::point());
        assert_eq!(pi1_presentation(&pt, None).unwrap().presentation.rank(), 0);
    }

    #[test]
    fn torus_and_refinement() {
        let lp = corpus::closed(&corpus::nodal_cubic()).complex;
        let torus = PolysimplicialSet::box_product(&lp, &lp);
        let sk = two_skeleton(&torus);
        assert!(sk.is_valid());
        assert_eq!(sk.h1_rank(), 2);
        let p = pi1_presentation(&sk, None).unwrap().presentation;
        assert_eq!(p.abelianization().free_rank, 2);
        let fine = sk.barycentric_refinement();
        assert!(fine.is_valid());
        assert_eq!(fine.h1_rank(), 2);
        assert_eq!(pi1_presentation(&fine, None).unwrap().presentation.abelianization().free_rank, 2);
    }

    #[test]
    fn disconnected_is_rejected() {
        let pt = PolysimplicialSet::point();
        let (two, _) = PolysimplicialSet::disjoint_union(&[("a", &pt), ("b", &pt)]);
        assert!(matches!(pi1_presentation(&two_skeleton(&two), None), Err(Error::Disconnected(_))));
    }
}
