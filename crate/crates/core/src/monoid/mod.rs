//! Fine monoids inside torsion-free lattices.

mod map;

pub use map::{
    pushout, saturation_index, Classification, MonoidMap, Pushout, SearchBounds, TsujiWitness, Verdict,
};

use crate::cone::{Cone, Subsets};
use crate::error::{Error, Result};
use crate::lattice::{self, LatticeGroup};
use num_integer::Integer;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

/// Cap on lattice points visited while computing a Hilbert basis.
pub const DEFAULT_SATURATION_LIMIT: u64 = 2_000_000;

#[derive(Clone, Debug)]
struct Structure {
    envelope: LatticeGroup,
    cone: Cone,
    units: LatticeGroup,
    is_unit_gen: Vec<bool>,
    grading: Vec<i64>,
    facet_masks: Vec<u64>,
}

/// Submonoid of `Z^ambient_dim` generated by finitely many vectors.
#[derive(Clone)]
pub struct AffineMonoid {
    ambient_dim: usize,
    generators: Vec<Vec<i64>>,
    structure: OnceLock<Structure>,
    saturated: OnceLock<Result<bool>>,
}

impl fmt::Debug for AffineMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineMonoid(Z^{}, {:?})", self.ambient_dim, self.generators)
    }
}

impl fmt::Display for AffineMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| fmt_vec(g)).collect();
        write!(f, "<{}> in Z^{}", gens.join(", "), self.ambient_dim)
    }
}

pub fn fmt_vec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

impl AffineMonoid {
    /// Zero vectors and repeated generators are dropped.
    pub fn new(ambient_dim: usize, generators: Vec<Vec<i64>>) -> Result<AffineMonoid> {
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for g in generators {
            if g.len() != ambient_dim {
                return Err(Error::Dimension(format!(
                    "generator {} has length {}, expected {}",
                    fmt_vec(&g),
                    g.len(),
                    ambient_dim
                )));
            }
            if g.iter().any(|&x| x != 0) && !gens.contains(&g) {
                gens.push(g);
            }
        }
        if gens.len() > 64 {
            return Err(Error::ResourceExhausted("more than 64 generators".into()));
        }
        Ok(AffineMonoid {
            ambient_dim,
            generators: gens,
            structure: OnceLock::new(),
            saturated: OnceLock::new(),
        })
    }

    /// The free monoid `N^n` on the standard basis.
    pub fn free(n: usize) -> AffineMonoid {
        let gens = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        AffineMonoid::new(n, gens).expect("standard basis")
    }

    /// `Z^n` as a monoid.
    pub fn group(n: usize) -> AffineMonoid {
        let mut gens = Vec::new();
        for i in 0..n {
            for s in [1, -1] {
                gens.push((0..n).map(|j| if i == j { s } else { 0 }).collect());
            }
        }
        AffineMonoid::new(n, gens).expect("standard basis")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    fn structure(&self) -> &Structure {
        self.structure.get_or_init(|| {
            let envelope = LatticeGroup::spanned_by(self.ambient_dim, &self.generators);
            let cone = Cone::new(self.ambient_dim, &self.generators);
            let grading = cone.grading();
            let is_unit_gen: Vec<bool> = self
                .generators
                .iter()
                .map(|g| cone.facets.iter().all(|f| lattice::dot(f, g) == 0))
                .collect();
            let unit_gens: Vec<Vec<i64>> = self
                .generators
                .iter()
                .zip(&is_unit_gen)
                .filter(|(_, &u)| u)
                .map(|(g, _)| g.clone())
                .collect();
            let units = LatticeGroup::spanned_by(self.ambient_dim, &unit_gens);
            let facet_masks = cone
                .facets
                .iter()
                .map(|f| {
                    self.generators
                        .iter()
                        .enumerate()
                        .filter(|(_, g)| lattice::dot(f, g) == 0)
                        .fold(0u64, |m, (i, _)| m | (1 << i))
                })
                .collect();
            Structure { envelope, cone, units, is_unit_gen, grading, facet_masks }
        })
    }

    pub fn group_envelope(&self) -> LatticeGroup {
        self.structure().envelope.clone()
    }

    pub fn cone(&self) -> &Cone {
        &self.structure().cone
    }

    /// Integer functional vanishing exactly on the units and positive on
    /// every other element.
    pub fn grading(&self) -> &[i64] {
        &self.structure().grading
    }

    /// The subgroup `P^*` of invertible elements.
    pub fn units(&self) -> LatticeGroup {
        self.structure().units.clone()
    }

    pub fn is_unit_generator(&self, i: usize) -> bool {
        self.structure().is_unit_gen[i]
    }

    /// Whether an element of the monoid is invertible.
    pub fn is_unit(&self, v: &[i64]) -> bool {
        self.contains(v) && lattice::dot(self.grading(), v) == 0
    }

    pub fn is_sharp(&self) -> bool {
        self.structure().units.rank() == 0
    }

    pub fn rank(&self) -> usize {
        self.structure().envelope.rank()
    }

    /// Membership in `P^gp ∩ cone(P)`.
    pub fn in_saturation(&self, v: &[i64]) -> bool {
        v.len() == self.ambient_dim && self.structure().cone.contains(v) && self.structure().envelope.contains(v)
    }

    /// Exact membership test.
    pub fn contains(&self, v: &[i64]) -> bool {
        if !self.in_saturation(v) {
            return false;
        }
        if let Some(Ok(true)) = self.saturated.get() {
            return true;
        }
        let s = self.structure();
        let nonunit: Vec<&Vec<i64>> = self
            .generators
            .iter()
            .zip(&s.is_unit_gen)
            .filter(|(_, &u)| !u)
            .map(|(g, _)| g)
            .collect();
        let weights: Vec<i64> = nonunit.iter().map(|g| lattice::dot(&s.grading, g)).collect();
        let mut failed: HashSet<(Vec<i64>, usize)> = HashSet::new();
        self.decompose(v.to_vec(), 0, &nonunit, &weights, &mut failed)
    }

    fn decompose(
        &self,
        rest: Vec<i64>,
        start: usize,
        gens: &[&Vec<i64>],
        weights: &[i64],
        failed: &mut HashSet<(Vec<i64>, usize)>,
    ) -> bool {
        let s = self.structure();
        let degree = lattice::dot(&s.grading, &rest);
        if degree == 0 {
            return s.units.contains(&rest);
        }
        if failed.contains(&(rest.clone(), start)) {
            return false;
        }
        for j in start..gens.len() {
            if weights[j] > degree {
                continue;
            }
            let next: Vec<i64> = rest.iter().zip(gens[j].iter()).map(|(a, b)| a - b).collect();
            if s.cone.contains(&next) && self.decompose(next, j, gens, weights, failed) {
                return true;
            }
        }
        failed.insert((rest, start));
        false
    }

    /// `a | b`, that is `b - a` lies in the monoid.
    pub fn divides(&self, a: &[i64], b: &[i64]) -> bool {
        let d: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        self.contains(&d)
    }

    /// Equality as subsets of the ambient lattice.
    pub fn same_as(&self, other: &AffineMonoid) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.generators.iter().all(|g| other.contains(g))
            && other.generators.iter().all(|g| self.contains(g))
    }

    /// Elements expressible as a sum of at most `bound` generators, each
    /// paired with its minimal word length, in deterministic order.
    pub fn elements_up_to(&self, bound: usize) -> Vec<(Vec<i64>, usize)> {
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        let zero = vec![0i64; self.ambient_dim];
        seen.insert(zero.clone(), 0);
        let mut layer = vec![zero];
        for d in 1..=bound {
            let mut next = Vec::new();
            for v in &layer {
                for g in &self.generators {
                    let w: Vec<i64> = v.iter().zip(g).map(|(a, b)| a + b).collect();
                    if !seen.contains_key(&w) {
                        seen.insert(w.clone(), d);
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        let mut out: Vec<(Vec<i64>, usize)> = seen.into_iter().collect();
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Word length of the default brute-force bound:
    /// twice the largest generator coordinate times the ambient dimension.
    pub fn default_degree_bound(&self) -> usize {
        let m = self
            .generators
            .iter()
            .flat_map(|g| g.iter().map(|x| x.unsigned_abs()))
            .max()
            .unwrap_or(1)
            .max(1) as usize;
        (2 * m * self.ambient_dim.max(1)).max(1)
    }

    pub fn is_saturated(&self) -> Result<bool> {
        self.saturated
            .get_or_init(|| {
                let sat = self.saturate_with_limit(DEFAULT_SATURATION_LIMIT)?;
                let s = self.structure();
                let nonunit: Vec<&Vec<i64>> = self
                    .generators
                    .iter()
                    .zip(&s.is_unit_gen)
                    .filter(|(_, &u)| !u)
                    .map(|(g, _)| g)
                    .collect();
                let weights: Vec<i64> = nonunit.iter().map(|g| lattice::dot(&s.grading, g)).collect();
                let mut failed = HashSet::new();
                Ok(sat.generators.iter().all(|g| {
                    self.in_saturation(g) && self.decompose(g.clone(), 0, &nonunit, &weights, &mut failed)
                }))
            })
            .clone()
    }

    pub fn saturate(&self) -> Result<AffineMonoid> {
        self.saturate_with_limit(DEFAULT_SATURATION_LIMIT)
    }

    /// `P^gp ∩ cone(P)`, generated by a Hilbert basis modulo units.
    pub fn saturate_with_limit(&self, limit: u64) -> Result<AffineMonoid> {
        let s = self.structure();
        let basis = &s.envelope.basis;
        let r = basis.len();
        let coords = |v: &Vec<i64>| s.envelope.coordinates(v).expect("generator in envelope");
        let unit_coords: Vec<Vec<i64>> = self
            .generators
            .iter()
            .zip(&s.is_unit_gen)
            .filter(|(_, &u)| u)
            .map(|(g, _)| coords(g))
            .collect();
        // rows: functionals on Z^r vanishing on the units
        let proj = lattice::kernel(&unit_coords, r);
        let units_sat = lattice::kernel(&proj, r);
        let k = proj.len();
        let images: Vec<Vec<i64>> = self
            .generators
            .iter()
            .zip(&s.is_unit_gen)
            .filter(|(_, &u)| !u)
            .map(|(g, _)| lattice::mat_vec(&proj, &coords(g)))
            .collect();
        let hilbert = if k == 0 { Vec::new() } else { hilbert_basis(k, &images, limit)? };
        // integral right inverse of the projection
        let columns = lattice::transpose(&proj, r);
        let lifts: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                let e: Vec<i64> = (0..k).map(|j| i64::from(i == j)).collect();
                lattice::solve_integer(&columns, &e).expect("projection is surjective")
            })
            .collect();
        let mut gens_coords: Vec<Vec<i64>> = Vec::new();
        for h in &hilbert {
            let mut v = vec![0i64; r];
            for (c, l) in h.iter().zip(&lifts) {
                for (x, y) in v.iter_mut().zip(l) {
                    *x += c * y;
                }
            }
            gens_coords.push(v);
        }
        for u in &units_sat {
            gens_coords.push(u.clone());
            gens_coords.push(u.iter().map(|x| -x).collect());
        }
        let gens: Vec<Vec<i64>> = gens_coords
            .iter()
            .map(|c| {
                let mut v = vec![0i64; self.ambient_dim];
                for (ci, b) in c.iter().zip(basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += ci * y;
                    }
                }
                v
            })
            .collect();
        let out = AffineMonoid::new(self.ambient_dim, gens)?;
        let _ = out.saturated.set(Ok(true));
        Ok(out)
    }

    /// `P / P^*` realised in `Z^k` through a projection of the envelope.
    pub fn sharpen(&self) -> Result<Sharpening> {
        let s = self.structure();
        let r = s.envelope.rank();
        let unit_coords: Vec<Vec<i64>> = s
            .units
            .basis
            .iter()
            .map(|u| s.envelope.coordinates(u).expect("units inside envelope"))
            .collect();
        let units_lattice = LatticeGroup::spanned_by(r, &unit_coords);
        if units_lattice.index_in_saturation() != 1 {
            return Err(Error::Torsion(format!(
                "P^gp/P^* has torsion of order {}",
                units_lattice.index_in_saturation()
            )));
        }
        let projection = lattice::kernel(&unit_coords, r);
        let gens: Vec<Vec<i64>> = self
            .generators
            .iter()
            .map(|g| lattice::mat_vec(&projection, &s.envelope.coordinates(g).expect("in envelope")))
            .collect();
        let monoid = AffineMonoid::new(projection.len(), gens)?;
        Ok(Sharpening { monoid, envelope: s.envelope.clone(), projection })
    }

    // ---- faces ----

    fn all_mask(&self) -> u64 {
        if self.generators.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.generators.len()) - 1
        }
    }

    fn closure_mask(&self, mask: u64) -> u64 {
        self.structure()
            .facet_masks
            .iter()
            .filter(|&&fm| fm & mask == mask)
            .fold(self.all_mask(), |acc, &fm| acc & fm)
    }

    /// Validates a generator subset as a face.
    pub fn face(&self, generator_subset: &[usize]) -> Result<Face> {
        let mut mask = 0u64;
        for &i in generator_subset {
            if i >= self.generators.len() {
                return Err(Error::NotAFace(format!("generator index {i} out of range")));
            }
            mask |= 1 << i;
        }
        if self.closure_mask(mask) != mask {
            return Err(Error::NotAFace(format!(
                "generators {generator_subset:?} are not closed under divisibility"
            )));
        }
        Ok(Face::from_mask(mask))
    }

    /// Smallest face containing the given elements.
    pub fn face_spanned_by(&self, elements: &[Vec<i64>]) -> Face {
        let s = self.structure();
        let mask = s
            .cone
            .facets
            .iter()
            .zip(&s.facet_masks)
            .filter(|(f, _)| elements.iter().all(|v| lattice::dot(f, v) == 0))
            .fold(self.all_mask(), |acc, (_, &m)| acc & m);
        Face::from_mask(mask)
    }

    /// Face generated by the elements of this monoid.
    pub fn top_face(&self) -> Face {
        Face::from_mask(self.all_mask())
    }

    /// The face `P^*`.
    pub fn bottom_face(&self) -> Face {
        Face::from_mask(self.closure_mask(0))
    }

    pub fn face_generators(&self, face: &Face) -> Vec<Vec<i64>> {
        face.generators.iter().map(|&i| self.generators[i].clone()).collect()
    }

    pub fn face_monoid(&self, face: &Face) -> AffineMonoid {
        AffineMonoid::new(self.ambient_dim, self.face_generators(face)).expect("subset of generators")
    }

    pub fn face_rank(&self, face: &Face) -> usize {
        lattice::rank(&self.face_generators(face), self.ambient_dim)
    }

    /// Whether an element of the ambient lattice lies in the face.
    pub fn face_contains(&self, face: &Face, v: &[i64]) -> bool {
        let s = self.structure();
        let m = face.mask();
        self.contains(v)
            && s
                .cone
                .facets
                .iter()
                .zip(&s.facet_masks)
                .filter(|(_, &fm)| fm & m == m)
                .all(|(f, _)| lattice::dot(f, v) == 0)
    }

    pub fn face_poset(&self) -> FacePoset {
        let all = self.all_mask();
        let mut masks: BTreeSet<u64> = BTreeSet::new();
        masks.insert(all);
        let mut frontier = vec![all];
        while let Some(m) = frontier.pop() {
            for &fm in &self.structure().facet_masks {
                let c = m & fm;
                if masks.insert(c) {
                    frontier.push(c);
                }
            }
        }
        let mut faces: Vec<Face> = masks.into_iter().map(Face::from_mask).collect();
        faces.sort_by(|a, b| {
            a.generators.len().cmp(&b.generators.len()).then_with(|| a.generators.cmp(&b.generators))
        });
        let order = faces
            .iter()
            .map(|a| faces.iter().map(|b| a.mask() & b.mask() == a.mask()).collect())
            .collect();
        FacePoset { faces, order }
    }

    /// `F^{-1} P`: adjoin the negatives of the face generators.
    pub fn localize(&self, face: &Face) -> Result<AffineMonoid> {
        let mut gens = self.generators.clone();
        for g in self.face_generators(face) {
            gens.push(g.iter().map(|x| -x).collect());
        }
        AffineMonoid::new(self.ambient_dim, gens)
    }
}

/// Image of a monoid in its envelope modulo units.
#[derive(Clone, Debug)]
pub struct Sharpening {
    pub monoid: AffineMonoid,
    envelope: LatticeGroup,
    projection: Vec<Vec<i64>>,
}

impl Sharpening {
    /// Image of an envelope element in the sharpened lattice.
    pub fn project(&self, v: &[i64]) -> Option<Vec<i64>> {
        let c = self.envelope.coordinates(v)?;
        Some(lattice::mat_vec(&self.projection, &c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    /// Indices of the parent generators lying in the face, increasing.
    pub generators: Vec<usize>,
}

impl Face {
    fn from_mask(mask: u64) -> Face {
        Face { generators: (0..64).filter(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn mask(&self) -> u64 {
        self.generators.iter().fold(0u64, |m, &i| m | (1 << i))
    }

    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.mask() & other.mask() == self.mask()
    }
}

#[derive(Clone, Debug)]
pub struct FacePoset {
    pub faces: Vec<Face>,
    /// `order[i][j]` iff face i is contained in face j.
    pub order: Vec<Vec<bool>>,
}

impl FacePoset {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn index_of(&self, face: &Face) -> Option<usize> {
        self.faces.iter().position(|f| f == face)
    }
}

/// Hilbert basis of `Z^k ∩ cone(rays)` for a pointed full-dimensional cone.
fn hilbert_basis(k: usize, rays: &[Vec<i64>], limit: u64) -> Result<Vec<Vec<i64>>> {
    let cone = Cone::new(k, rays);
    let mut candidates: BTreeSet<Vec<i64>> = rays.iter().cloned().collect();
    let mut visited: u64 = 0;
    for subset in Subsets::new(rays.len(), k) {
        let chosen: Vec<Vec<i64>> = subset.iter().map(|&i| rays[i].clone()).collect();
        let h = lattice::hermite_basis(&chosen, k);
        if h.len() < k {
            continue;
        }
        let diag: Vec<i64> = (0..k).map(|i| h[i][i].abs()).collect();
        let volume: u64 = diag.iter().map(|&d| d as u64).product();
        visited += volume;
        if visited > limit {
            return Err(Error::ResourceExhausted(format!(
                "Hilbert basis search exceeded {limit} lattice points"
            )));
        }
        let mut point = vec![0i64; k];
        loop {
            let t = lattice::solve_rational(&chosen, &point).expect("full rank");
            let mut reduced = point.clone();
            for (tj, s) in t.iter().zip(&chosen) {
                let fl = Integer::div_floor(tj.numer(), tj.denom());
                for (x, y) in reduced.iter_mut().zip(s) {
                    *x -= fl as i64 * y;
                }
            }
            if reduced.iter().any(|&x| x != 0) {
                candidates.insert(reduced);
            }
            // odometer over the box
            let mut i = 0;
            while i < k {
                point[i] += 1;
                if point[i] < diag[i] {
                    break;
                }
                point[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    let cands: Vec<Vec<i64>> = candidates.into_iter().collect();
    let irreducible = cands
        .iter()
        .filter(|x| {
            !cands.iter().any(|y| {
                y != *x && {
                    let d: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    cone.contains(&d)
                }
            })
        })
        .cloned()
        .collect();
    Ok(irreducible)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(dim: usize, gens: &[&[i64]]) -> AffineMonoid {
        AffineMonoid::new(dim, gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(m(1, &[&[2], &[3]]).group_envelope().basis, vec![vec![1]]);
        assert_eq!(m(1, &[]).group_envelope().rank(), 0);
        let p = m(2, &[&[1, 0], &[1, 2]]);
        assert_eq!(p.group_envelope().basis, vec![vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn units_and_sharpening() {
        assert_eq!(AffineMonoid::free(2).units().rank(), 0);
        let z = m(1, &[&[1], &[-1]]);
        assert_eq!(z.units().rank(), 1);
        assert_eq!(z.sharpen().unwrap().monoid.rank(), 0);
        let half = m(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
        assert_eq!(half.units().basis, vec![vec![1, 0]]);
        let sh = half.sharpen().unwrap();
        assert!(sh.monoid.same_as(&AffineMonoid::free(1)) || sh.monoid.same_as(&m(1, &[&[-1]])));
        assert!(sh.monoid.is_sharp());
    }

    #[test]
    fn membership_in_numerical_semigroup() {
        let p = m(1, &[&[2], &[3]]);
        assert!(!p.contains(&[1]));
        assert!(p.contains(&[0]));
        assert!(p.contains(&[5]));
        assert!(!p.contains(&[-2]));
        assert!(!p.is_saturated().unwrap());
        assert!(p.saturate().unwrap().same_as(&AffineMonoid::free(1)));
    }

    #[test]
    fn saturation_examples() {
        assert!(AffineMonoid::free(2).is_saturated().unwrap());
        assert!(m(2, &[&[1, 0], &[1, 2]]).is_saturated().unwrap());
        assert!(m(2, &[&[2, 0], &[0, 2]]).is_saturated().unwrap());
        let q = m(2, &[&[2, 0], &[0, 2], &[1, 1]]);
        assert!(q.is_saturated().unwrap());
        let cusp = m(2, &[&[2, 0], &[1, 1], &[0, 2], &[3, 0]]);
        let sat = cusp.saturate().unwrap();
        assert!(sat.contains(&[1, 1]));
        let non = m(2, &[&[2, 0], &[0, 2], &[1, 1], &[1, 0]]);
        assert!(!non.is_saturated().unwrap());
        let hole = m(2, &[&[1, 0], &[1, 1], &[1, 2], &[0, 2]]);
        assert!(!hole.is_saturated().unwrap());
    }

    #[test]
    fn saturation_with_units() {
        let p = m(2, &[&[1, 0], &[-1, 0], &[0, 2], &[1, 2]]);
        assert!(p.is_saturated().unwrap());
        let q = m(2, &[&[2, 0], &[-2, 0], &[0, 2], &[1, 4]]);
        assert!(!q.is_saturated().unwrap());
        let s = q.saturate().unwrap();
        assert!(s.contains(&[-1, 0]));
        assert!(!q.contains(&[1, 0]));
        assert_eq!(s.units().rank(), 1);
        assert!(!s.contains(&[0, 1]));
    }

    #[test]
    fn face_counts() {
        assert_eq!(AffineMonoid::free(2).face_poset().len(), 4);
        assert_eq!(AffineMonoid::free(3).face_poset().len(), 8);
        assert_eq!(AffineMonoid::free(1).face_poset().len(), 2);
        assert_eq!(AffineMonoid::group(2).face_poset().len(), 1);
        let half = m(2, &[&[1, 0], &[-1, 0], &[0, 1]]);
        let fp = half.face_poset();
        assert_eq!(fp.len(), 2);
        assert_eq!(fp.faces[0].generators, vec![0, 1]);
    }

    #[test]
    fn face_validation() {
        let p = AffineMonoid::free(2);
        assert!(p.face(&[0]).is_ok());
        let q = m(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(q.face(&[2]).is_err());
        assert!(q.face(&[0]).is_ok());
    }

    #[test]
    fn localization() {
        let p = AffineMonoid::free(2);
        let f = p.face(&[0]).unwrap();
        let l = p.localize(&f).unwrap();
        assert!(l.same_as(&m(2, &[&[1, 0], &[-1, 0], &[0, 1]])));
        assert!(p.localize(&p.top_face()).unwrap().same_as(&AffineMonoid::group(2)));
        assert!(p.localize(&p.bottom_face()).unwrap().same_as(&p));
    }
}
