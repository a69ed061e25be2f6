//! Strata of chart-described fibers as faces of the total monoid, and the
//! cospecialization maps between them.

use crate::error::{Error, Result};
use crate::monoid::{AffineMonoid, Face, MonoidMap};
use crate::poset::FinitePoset;
use std::fmt::Write as _;

/// A chart `M → Q` of a fiber over a log point with monoid `M`.
#[derive(Clone, Debug)]
pub struct FiberChartDatum {
    pub structure: MonoidMap,
}

impl FiberChartDatum {
    /// Requires `Q` saturated. The base need not be sharp; strata over the
    /// closed point use its unit face.
    pub fn new(structure: MonoidMap) -> Result<FiberChartDatum> {
        if !structure.target.is_saturated()? {
            return Err(Error::InvalidMap("total monoid of a chart must be saturated".into()));
        }
        Ok(FiberChartDatum { structure })
    }

    pub fn base(&self) -> &AffineMonoid {
        &self.structure.source
    }

    pub fn total(&self) -> &AffineMonoid {
        &self.structure.target
    }

    /// Strata over the closed point of the base.
    pub fn strata(&self) -> StrataPoset {
        self.strata_over(&self.base().bottom_face())
    }

    /// Strata of the fiber over the point of `Spec M` given by `base_face`:
    /// faces `G` of `Q` with preimage exactly `base_face`, ordered by
    /// reverse inclusion.
    pub fn strata_over(&self, base_face: &Face) -> StrataPoset {
        let q = self.total();
        let faces: Vec<Face> = q
            .face_poset()
            .faces
            .into_iter()
            .filter(|g| &self.structure.preimage_face(g) == base_face)
            .collect();
        let total_rank = q.rank();
        let strata: Vec<Stratum> = faces
            .into_iter()
            .map(|face| {
                let rank = total_rank - q.face_rank(&face);
                Stratum { face, rank }
            })
            .collect();
        let leq = strata
            .iter()
            .map(|a| strata.iter().map(|b| b.face.is_subface_of(&a.face)).collect())
            .collect();
        let labels = strata.iter().map(|s| s.label(q)).collect();
        StrataPoset { base_face: base_face.clone(), poset: FinitePoset::new(labels, leq), strata }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub face: Face,
    /// Rank of `Q^gp / F^gp`.
    pub rank: usize,
}

impl Stratum {
    fn label(&self, q: &AffineMonoid) -> String {
        let gens: Vec<String> = q.face_generators(&self.face).iter().map(|g| crate::monoid::fmt_vec(g)).collect();
        format!("<{}> r={}", gens.join(","), self.rank)
    }
}

#[derive(Clone, Debug)]
pub struct StrataPoset {
    pub base_face: Face,
    pub strata: Vec<Stratum>,
    /// `x ≤ y` iff `y` lies in the closure of `x`, i.e. `F_y ⊆ F_x`.
    pub poset: FinitePoset,
}

impl StrataPoset {
    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn index_of(&self, face: &Face) -> Option<usize> {
        self.strata.iter().position(|s| &s.face == face)
    }
}

/// Bijection `Str(d) → Str(d')` induced by a Kummer map `h: Q → Q'` over
/// the same base.
pub fn kummer_strata_transport(d: &FiberChartDatum, d2: &FiberChartDatum, h: &MonoidMap) -> Result<Vec<usize>> {
    if !h.source.same_as(d.total()) || !h.target.same_as(d2.total()) || !d.base().same_as(d2.base()) {
        return Err(Error::InvalidMap("covering does not connect the two charts".into()));
    }
    let composite = h.after(&d.structure)?;
    if composite.matrix != d2.structure.matrix {
        return Err(Error::InvalidMap("covering is not compatible with the structure maps".into()));
    }
    let s1 = d.strata();
    let s2 = d2.strata();
    let mut f = Vec::with_capacity(s1.len());
    for s in &s1.strata {
        let image = h.kummer_face_transport(&s.face)?;
        let j = s2
            .index_of(&image)
            .ok_or_else(|| Error::InvalidMap("transported face is not a stratum".into()))?;
        f.push(j);
    }
    if !s1.poset.is_isomorphism(&s2.poset, &f) {
        return Err(Error::InvalidMap("face transport is not an isomorphism of strata".into()));
    }
    Ok(f)
}

/// Cospecialization `Str(z1) → Str(z2)` for base faces `f1 ⊆ f2`.
#[derive(Clone, Debug)]
pub struct StrataCospecialization {
    pub source: StrataPoset,
    pub target: StrataPoset,
    pub map: Vec<usize>,
}

/// Sends `G` to the most special stratum over `f2` whose closure contains
/// `G`, namely the face spanned by `G` and the image of `f2`.
pub fn cospecialize_strata(family: &FiberChartDatum, f1: &Face, f2: &Face) -> Result<StrataCospecialization> {
    if !f1.is_subface_of(f2) {
        return Err(Error::NotGood(format!(
            "base face {:?} does not contain {:?}; cospecialization runs towards the larger face",
            f2.generators, f1.generators
        )));
    }
    let p = family.base();
    let q = family.total();
    let source = family.strata_over(f1);
    let target = family.strata_over(f2);
    let f2_image: Vec<Vec<i64>> = p.face_generators(f2).iter().map(|g| family.structure.apply(g)).collect();
    let mut map = Vec::with_capacity(source.len());
    for s in &source.strata {
        let mut span = q.face_generators(&s.face);
        span.extend(f2_image.iter().cloned());
        let join = q.face_spanned_by(&span);
        let j = target.index_of(&join).ok_or_else(|| {
            Error::NotGood(format!("no stratum over the generization contains the stratum {:?}", s.face.generators))
        })?;
        map.push(j);
    }
    if !source.poset.is_monotone(&target.poset, &map) {
        return Err(Error::NotGood("cospecialization is not monotone".into()));
    }
    let tmin = target.poset.minimal_elements();
    if source.poset.minimal_elements().iter().any(|&i| !tmin.contains(&map[i])) {
        return Err(Error::NotGood("cospecialization does not preserve minimal strata".into()));
    }
    Ok(StrataCospecialization { source, target, map })
}

impl StrataCospecialization {
    /// `other ∘ self`.
    pub fn then(&self, other: &StrataCospecialization) -> Vec<usize> {
        self.map.iter().map(|&j| other.map[j]).collect()
    }

    /// Two-column graph: source strata, target strata, dashed map edges.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=LR;\n");
        for (side, poset) in [("a", &self.source.poset), ("b", &self.target.poset)] {
            let _ = writeln!(s, "  subgraph cluster_{side} {{");
            for (i, l) in poset.labels.iter().enumerate() {
                let _ = writeln!(s, "    {side}{i} [label=\"{}\"];", l.replace('"', "'"));
            }
            for (i, j) in poset.covers() {
                let _ = writeln!(s, "    {side}{i} -> {side}{j};");
            }
            s.push_str("  }\n");
        }
        for (i, &j) in self.map.iter().enumerate() {
            let _ = writeln!(s, "  a{i} -> b{j} [style=dashed];");
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node() -> FiberChartDatum {
        let m = AffineMonoid::free(1);
        let q = AffineMonoid::free(2);
        FiberChartDatum::new(MonoidMap::new(m, q, vec![vec![1], vec![1]]).unwrap()).unwrap()
    }

    #[test]
    fn node_strata() {
        let s = node().strata();
        assert_eq!(s.len(), 3);
        let node_pt = s.index_of(&Face { generators: vec![] }).unwrap();
        for i in 0..3 {
            // the node lies in the closure of each branch
            assert!(s.poset.leq[i][node_pt]);
        }
        assert_eq!(s.strata[node_pt].rank, 2);
        assert_eq!(s.poset.maximal_elements(), vec![node_pt]);
    }

    #[test]
    fn smooth_strata() {
        let m = AffineMonoid::free(1);
        let d = FiberChartDatum::new(MonoidMap::identity(&m)).unwrap();
        assert_eq!(d.strata().len(), 1);
    }

    #[test]
    fn degenerating_node() {
        let d = node();
        let p = d.base().clone();
        let c = cospecialize_strata(&d, &p.bottom_face(), &p.top_face()).unwrap();
        assert_eq!(c.target.len(), 1);
        assert_eq!(c.map, vec![0, 0, 0]);
        let id = cospecialize_strata(&d, &p.bottom_face(), &p.bottom_face()).unwrap();
        assert_eq!(id.map, vec![0, 1, 2]);
        assert!(cospecialize_strata(&d, &p.top_face(), &p.bottom_face()).is_err());
    }
}
