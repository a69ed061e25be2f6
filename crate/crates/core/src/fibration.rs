//! Polysimplicial sets of polystable charts, of their Kummer coverings and
//! of glued objects given by descent data.

use crate::complex::{Element, PolyMorphism, PolysimplicialSet};
use crate::error::{Error, Result};
use crate::lambda::{Coord, LambdaMorphism, LambdaObject};
use crate::monoid::{AffineMonoid, Face, MonoidMap};
use crate::poset::FinitePoset;
use crate::strata::{cospecialize_strata, kummer_strata_transport, FiberChartDatum, StrataCospecialization};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub n: usize,
    pub a: Vec<i64>,
}

/// `Q = (P ⊕ ⊕_i <T_i0..T_in_i>) / (T_i0 + … + T_in_i = a_i)`.
#[derive(Clone, Debug)]
pub struct PolystableChart {
    pub base: AffineMonoid,
    pub blocks: Vec<Block>,
}

impl PolystableChart {
    pub fn new(base: AffineMonoid, blocks: Vec<Block>) -> Result<PolystableChart> {
        for (i, b) in blocks.iter().enumerate() {
            if b.n == 0 {
                return Err(Error::InvalidMap(format!("block {i} has n = 0")));
            }
            if b.a.len() != base.ambient_dim() || !base.contains(&b.a) {
                return Err(Error::InvalidMap(format!("block {i}: a = {:?} is not in the base", b.a)));
            }
        }
        Ok(PolystableChart { base, blocks })
    }

    /// `N` with one block `(n, 1)`.
    pub fn node(n: usize) -> PolystableChart {
        PolystableChart::new(AffineMonoid::free(1), vec![Block { n, a: vec![1] }]).expect("valid")
    }

    pub fn smooth() -> PolystableChart {
        PolystableChart::new(AffineMonoid::free(1), Vec::new()).expect("valid")
    }

    fn ambient_dim(&self) -> usize {
        self.base.ambient_dim() + self.blocks.iter().map(|b| b.n).sum::<usize>()
    }

    /// `T_ij` in the ambient lattice of the standard monoid; `T_{i,n_i}` is
    /// eliminated as `a_i − Σ_{j<n_i} T_ij`.
    pub fn t_vector(&self, i: usize, j: usize) -> Vec<i64> {
        let d = self.base.ambient_dim();
        let offset = d + self.blocks[..i].iter().map(|b| b.n).sum::<usize>();
        let mut v = vec![0i64; self.ambient_dim()];
        let b = &self.blocks[i];
        if j < b.n {
            v[offset + j] = 1;
        } else {
            v[..d].copy_from_slice(&b.a);
            for x in &mut v[offset..offset + b.n] {
                *x = -1;
            }
        }
        v
    }

    pub fn standard_monoid(&self) -> AffineMonoid {
        let d = self.base.ambient_dim();
        let total = self.ambient_dim();
        let mut gens: Vec<Vec<i64>> = self
            .base
            .generators()
            .iter()
            .map(|g| {
                let mut v = g.clone();
                v.resize(total, 0);
                v
            })
            .collect();
        for (i, b) in self.blocks.iter().enumerate() {
            for j in 0..=b.n {
                gens.push(self.t_vector(i, j));
            }
        }
        debug_assert!(gens.iter().all(|g| g.len() == total && d <= total));
        AffineMonoid::new(total, gens).expect("generators fit the ambient lattice")
    }

    pub fn structure_map(&self) -> MonoidMap {
        let d = self.base.ambient_dim();
        let matrix = (0..self.ambient_dim()).map(|r| (0..d).map(|c| i64::from(r == c)).collect()).collect();
        MonoidMap::new(self.base.clone(), self.standard_monoid(), matrix).expect("inclusion of the base")
    }

    pub fn fiber_datum(&self) -> Result<FiberChartDatum> {
        FiberChartDatum::new(self.structure_map())
    }

    /// Blocks degenerate over the point given by `face`.
    pub fn live_blocks(&self, face: &Face) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&i| !self.base.face_contains(face, &self.blocks[i].a)).collect()
    }

    pub fn fiber_cell_type(&self, face: &Face) -> LambdaObject {
        let live = self.live_blocks(face);
        if live.is_empty() {
            LambdaObject::point()
        } else {
            LambdaObject::new(live.iter().map(|&i| self.blocks[i].n).collect()).expect("positive block sizes")
        }
    }

    /// For each cell of `Λ[type]` the stratum of the fiber over `face` it
    /// corresponds to: the face of `Q` where exactly the coordinates outside
    /// the image of the cell become invertible.
    pub fn cell_strata(&self, face: &Face) -> Result<(PolysimplicialSet, Vec<usize>)> {
        let ty = self.fiber_cell_type(face);
        let complex = PolysimplicialSet::representable(&ty);
        let datum = self.fiber_datum()?;
        let strata = datum.strata_over(face);
        let q = datum.total();
        let live = self.live_blocks(face);
        let mut cells = LambdaMorphism::injections_into(&ty);
        cells.sort_by(|a, b| a.source().dimension().cmp(&b.source().dimension()).then_with(|| a.cmp(b)));
        let base_image: Vec<Vec<i64>> =
            self.base.face_generators(face).iter().map(|g| datum.structure.apply(g)).collect();
        let mut out = Vec::with_capacity(cells.len());
        for iota in &cells {
            let mut span = base_image.clone();
            for (i, b) in self.blocks.iter().enumerate() {
                let image: Vec<usize> = match live.iter().position(|&k| k == i) {
                    None => Vec::new(),
                    Some(l) => match &iota.coords()[l] {
                        Coord::Const(v) => vec![*v],
                        Coord::From { alpha, .. } => alpha.clone(),
                    },
                };
                for j in 0..=b.n {
                    if !image.contains(&j) {
                        span.push(self.t_vector(i, j));
                    }
                }
            }
            let g = q.face_spanned_by(&span);
            let k = strata
                .index_of(&g)
                .ok_or_else(|| Error::InvalidComplex(format!("cell {iota} has no stratum")))?;
            out.push(k);
        }
        Ok((complex, out))
    }
}

/// A chart together with an optional Kummer covering of its total monoid.
#[derive(Clone, Debug)]
pub struct KetPiece {
    pub chart: PolystableChart,
    pub covering: Option<MonoidMap>,
    pub primes: Vec<u64>,
}

impl KetPiece {
    pub fn new(chart: PolystableChart, covering: Option<MonoidMap>, primes: Vec<u64>) -> Result<KetPiece> {
        if let Some(h) = &covering {
            if !h.source.same_as(&chart.standard_monoid()) {
                return Err(Error::InvalidMap("covering must start at the chart's total monoid".into()));
            }
            if !h.is_kummer() {
                return Err(Error::NotKummer("covering is not Kummer".into()));
            }
            if !primes.is_empty() {
                let bound = h.target.default_degree_bound();
                if !h.is_l_kummer(&primes, bound).holds() {
                    return Err(Error::NotKummer(format!("covering is not Kummer for the primes {primes:?}")));
                }
            }
        }
        Ok(KetPiece { chart, covering, primes })
    }

    pub fn bare(chart: PolystableChart) -> KetPiece {
        KetPiece { chart, covering: None, primes: Vec::new() }
    }

    pub fn fiber_datum(&self) -> Result<FiberChartDatum> {
        let base = self.chart.fiber_datum()?;
        match &self.covering {
            None => Ok(base),
            Some(h) => FiberChartDatum::new(h.after(&base.structure)?),
        }
    }

    /// `Λ[type] ⊓ D` with one chart-local component per stratum.
    pub fn complex(&self, face: &Face) -> Result<PolysimplicialSet> {
        if let Some(h) = &self.covering {
            kummer_strata_transport(&self.chart.fiber_datum()?, &self.fiber_datum()?, h)?;
        }
        Ok(PolysimplicialSet::representable(&self.chart.fiber_cell_type(face)))
    }
}

/// `⊓_k Λ[type_k]` for a chain of charts over the same base.
pub fn c_of_chain(charts: &[PolystableChart], face: &Face) -> PolysimplicialSet {
    charts.iter().fold(PolysimplicialSet::point(), |acc, c| {
        PolysimplicialSet::box_product(&acc, &PolysimplicialSet::representable(&c.fiber_cell_type(face)))
    })
}

/// Two maps from an overlap piece into pieces `left` and `right`, given as
/// `(overlap cell, target element)`; targets are `name` or `name@surjection`.
#[derive(Clone, Debug)]
pub struct Overlap {
    pub left: usize,
    pub right: usize,
    pub piece: KetPiece,
    pub left_map: Vec<(String, String)>,
    pub right_map: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default)]
pub struct DescentDatum {
    pub pieces: Vec<KetPiece>,
    pub overlaps: Vec<Overlap>,
}

/// Result of gluing: the quotient, the disjoint union of pieces and the
/// projection between them.
#[derive(Clone, Debug)]
pub struct Glued {
    pub complex: PolysimplicialSet,
    pub union: PolysimplicialSet,
    pub projection: PolyMorphism,
}

fn parse_target(c: &PolysimplicialSet, prefix: &str, text: &str, ty: &LambdaObject) -> Result<Element> {
    let (name, surj) = match text.split_once('@') {
        Some((n, s)) => (n, Some(s.parse::<LambdaMorphism>()?)),
        None => (text, None),
    };
    let full = format!("{prefix}.{name}");
    let cell = c
        .cell_index(&full)
        .ok_or_else(|| Error::InvalidComplex(format!("unknown cell `{name}` in {prefix}")))?;
    let surjection = surj.unwrap_or_else(|| LambdaMorphism::identity(c.cell_type(cell)));
    if surjection.source() != ty {
        return Err(Error::InvalidComplex(format!("assignment to `{name}` has the wrong type")));
    }
    Ok(Element { surjection, cell })
}

impl DescentDatum {
    /// `Coker(C(X'×X') ⇉ C(X'))` over the base point `face`.
    pub fn glue(&self, face: &Face) -> Result<Glued> {
        let pieces: Vec<PolysimplicialSet> =
            self.pieces.iter().map(|p| p.complex(face)).collect::<Result<_>>()?;
        let prefixes: Vec<String> = (0..pieces.len()).map(|i| format!("p{i}")).collect();
        let parts: Vec<(&str, &PolysimplicialSet)> = prefixes.iter().map(|s| s.as_str()).zip(pieces.iter()).collect();
        let (union, _) = PolysimplicialSet::disjoint_union(&parts);

        let overlaps: Vec<PolysimplicialSet> =
            self.overlaps.iter().map(|o| o.piece.complex(face)).collect::<Result<_>>()?;
        let oprefixes: Vec<String> = (0..overlaps.len()).map(|i| format!("o{i}")).collect();
        let oparts: Vec<(&str, &PolysimplicialSet)> =
            oprefixes.iter().map(|s| s.as_str()).zip(overlaps.iter()).collect();
        let (ounion, offsets) = PolysimplicialSet::disjoint_union(&oparts);

        let mut left = Vec::with_capacity(ounion.len());
        let mut right = Vec::with_capacity(ounion.len());
        for (k, o) in self.overlaps.iter().enumerate() {
            if o.left >= pieces.len() || o.right >= pieces.len() {
                return Err(Error::InvalidComplex(format!("overlap {k} refers to a missing piece")));
            }
            let oc = &overlaps[k];
            for (map, side, out) in [(&o.left_map, o.left, &mut left), (&o.right_map, o.right, &mut right)] {
                for x in 0..oc.len() {
                    let name = oc.name(x);
                    let target = map
                        .iter()
                        .find(|(n, _)| n == name)
                        .ok_or_else(|| Error::InvalidComplex(format!("overlap {k}: cell `{name}` is not assigned")))?;
                    out.push(parse_target(&union, &prefixes[side], &target.1, oc.cell_type(x))?);
                }
            }
            debug_assert_eq!(left.len(), offsets[k] + oc.len());
        }
        let a = PolyMorphism::new(ounion.clone(), union.clone(), left)?;
        let b = PolyMorphism::new(ounion, union.clone(), right)?;
        let (complex, projection) = PolysimplicialSet::coequalizer(&a, &b)?;
        Ok(Glued { complex, union, projection })
    }
}

impl DescentDatum {
    /// Strata of the glued fiber over `face`, computed on the monoid side:
    /// strata of the pieces, identified along the overlaps.
    pub fn strata(&self, face: &Face) -> Result<FinitePoset> {
        let mut offsets = Vec::with_capacity(self.pieces.len());
        let mut labels = Vec::new();
        let mut cell_maps = Vec::with_capacity(self.pieces.len());
        let mut orders = Vec::with_capacity(self.pieces.len());
        for (k, p) in self.pieces.iter().enumerate() {
            let s = p.chart.fiber_datum()?.strata_over(face);
            offsets.push(labels.len());
            labels.extend(s.poset.labels.iter().map(|l| format!("p{k}:{l}")));
            cell_maps.push(p.chart.cell_strata(face)?);
            orders.push(s.poset);
        }
        let n = labels.len();
        let mut class: Vec<usize> = (0..n).collect();
        fn root(class: &mut [usize], mut x: usize) -> usize {
            while class[x] != x {
                class[x] = class[class[x]];
                x = class[x];
            }
            x
        }
        for (k, o) in self.overlaps.iter().enumerate() {
            let (oc, _) = o.piece.chart.cell_strata(face)?;
            let stratum_of = |side: usize, map: &[(String, String)], name: &str| -> Result<usize> {
                let (_, target) = map
                    .iter()
                    .find(|(n, _)| n == name)
                    .ok_or_else(|| Error::InvalidComplex(format!("overlap {k}: cell `{name}` is not assigned")))?;
                let cell_name = target.split('@').next().unwrap_or(target);
                let (pc, pm) = cell_maps
                    .get(side)
                    .ok_or_else(|| Error::InvalidComplex(format!("overlap {k} refers to a missing piece")))?;
                let x = pc
                    .cell_index(cell_name)
                    .ok_or_else(|| Error::InvalidComplex(format!("unknown cell `{cell_name}`")))?;
                Ok(offsets[side] + pm[x])
            };
            for x in 0..oc.len() {
                let a = stratum_of(o.left, &o.left_map, oc.name(x))?;
                let b = stratum_of(o.right, &o.right_map, oc.name(x))?;
                let (ra, rb) = (root(&mut class, a), root(&mut class, b));
                class[ra.max(rb)] = ra.min(rb);
            }
        }
        let roots: Vec<usize> = (0..n).map(|x| root(&mut class, x)).collect();
        let mut reps: Vec<usize> = roots.clone();
        reps.sort_unstable();
        reps.dedup();
        let idx = |x: usize| reps.binary_search(&roots[x]).expect("root");
        let m = reps.len();
        let mut leq = vec![vec![false; m]; m];
        for (k, ord) in orders.iter().enumerate() {
            for i in 0..ord.len() {
                for j in 0..ord.len() {
                    if ord.leq[i][j] {
                        leq[idx(offsets[k] + i)][idx(offsets[k] + j)] = true;
                    }
                }
            }
        }
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        let poset = FinitePoset::new(reps.iter().map(|&r| labels[r].clone()).collect(), leq);
        if !poset.is_valid() {
            return Err(Error::InvalidComplex("identified strata do not form a poset".into()));
        }
        Ok(poset)
    }
}

impl Glued {
    /// Morphism of quotients induced by a renaming of union cells; the
    /// square with both projections is checked on every cell.
    pub fn induced_morphism(&self, target: &Glued, rename: impl Fn(&str) -> String) -> Result<PolyMorphism> {
        let mut on_union = Vec::with_capacity(self.union.len());
        for u in 0..self.union.len() {
            let name = rename(self.union.name(u));
            let v = target
                .union
                .cell_index(&name)
                .ok_or_else(|| Error::InvalidComplex(format!("renamed cell `{name}` does not exist")))?;
            on_union.push(target.projection.images[v].clone());
        }
        let mut images: Vec<Option<Element>> = vec![None; self.complex.len()];
        for (u, img) in on_union.iter().enumerate() {
            let q = &self.projection.images[u];
            match &images[q.cell] {
                Some(prev) if prev != img => {
                    return Err(Error::InvalidComplex(format!(
                        "renaming does not descend: `{}` has two images",
                        self.complex.name(q.cell)
                    )))
                }
                _ => images[q.cell] = Some(img.clone()),
            }
        }
        let images = images.into_iter().map(|e| e.expect("projection is surjective")).collect();
        PolyMorphism::new(self.complex.clone(), target.complex.clone(), images)
    }
}

/// The morphism `C(z1) → C(z2)` of a chart over base faces `f1 ⊆ f2`,
/// together with the strata map it lies over.
#[derive(Clone, Debug)]
pub struct CCospecialization {
    pub morphism: PolyMorphism,
    pub strata: StrataCospecialization,
}

pub fn cospecialize_c(chart: &PolystableChart, f1: &Face, f2: &Face) -> Result<CCospecialization> {
    let strata = cospecialize_strata(&chart.fiber_datum()?, f1, f2)?;
    let t1 = chart.fiber_cell_type(f1);
    let t2 = chart.fiber_cell_type(f2);
    let live1 = chart.live_blocks(f1);
    let live2 = chart.live_blocks(f2);
    let kept: Vec<usize> = live2
        .iter()
        .map(|i| live1.iter().position(|j| j == i).expect("live blocks shrink under generization"))
        .collect();
    let s = LambdaMorphism::standard_surjection(&t1, &kept);
    let target = PolysimplicialSet::representable(&t2);
    let top = PolysimplicialSet::representable_cell(&t2, &LambdaMorphism::identity(&t2)).expect("identity cell");
    let morphism = PolyMorphism::from_yoneda(&t1, &target, &Element { surjection: s, cell: top })?;
    let (_, c1) = chart.cell_strata(f1)?;
    let (_, c2) = chart.cell_strata(f2)?;
    for (x, img) in morphism.images.iter().enumerate() {
        if strata.map[c1[x]] != c2[img.cell] {
            return Err(Error::NotGood(format!("cell `{}` does not lie over the strata map", morphism.source.name(x))));
        }
    }
    Ok(CCospecialization { morphism, strata })
}

/// Curve-type corpus built by gluing node pieces.
pub mod corpus {
    use super::*;

    fn point_overlap(left: usize, l: &str, right: usize, r: &str) -> Overlap {
        Overlap {
            left,
            right,
            piece: KetPiece::bare(PolystableChart::smooth()),
            left_map: vec![("pt".into(), l.into())],
            right_map: vec![("pt".into(), r.into())],
        }
    }

    /// `n` node pieces glued head to tail; `n = 1` is the nodal cubic.
    pub fn cycle(n: usize) -> DescentDatum {
        DescentDatum {
            pieces: (0..n).map(|_| KetPiece::bare(PolystableChart::node(1))).collect(),
            overlaps: (0..n).map(|k| point_overlap(k, "s1", (k + 1) % n, "s0")).collect(),
        }
    }

    pub fn nodal_cubic() -> DescentDatum {
        cycle(1)
    }

    /// `k` node pieces sharing both endpoints: two components meeting in `k`
    /// nodes.
    pub fn banana(k: usize) -> DescentDatum {
        let mut overlaps = Vec::new();
        for i in 1..k {
            overlaps.push(point_overlap(0, "s0", i, "s0"));
            overlaps.push(point_overlap(0, "s1", i, "s1"));
        }
        DescentDatum { pieces: (0..k).map(|_| KetPiece::bare(PolystableChart::node(1))).collect(), overlaps }
    }

    pub fn theta() -> DescentDatum {
        banana(3)
    }

    pub fn smooth() -> DescentDatum {
        DescentDatum { pieces: vec![KetPiece::bare(PolystableChart::smooth())], overlaps: Vec::new() }
    }

    /// Closed fiber of a corpus datum.
    pub fn closed(d: &DescentDatum) -> Glued {
        d.glue(&AffineMonoid::free(1).bottom_face()).expect("corpus data glue")
    }
}
