use super::{fmt_vec, AffineMonoid, Face};
use crate::cone::{nonneg_combination, Cone};
use crate::error::{Error, Result};
use crate::lattice::{self, LatticeGroup};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Monoid homomorphism given by an integer matrix between ambient lattices.
#[derive(Clone, Debug)]
pub struct MonoidMap {
    pub source: AffineMonoid,
    pub target: AffineMonoid,
    /// `target.ambient_dim()` rows, `source.ambient_dim()` columns.
    pub matrix: Vec<Vec<i64>>,
}

/// Outcome of a property check that may rely on bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `bound` is `None` when the answer is exact.
    Holds { bound: Option<usize> },
    Fails(Witness),
    Undecided { bound: usize },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::Undecided { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds { bound: None } => write!(f, "true"),
            Verdict::Holds { bound: Some(b) } => write!(f, "true (no counterexample up to degree {b})"),
            Verdict::Fails(w) => write!(f, "false (witness {w})"),
            Verdict::Undecided { bound } => write!(f, "undecided at bound {bound}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsujiWitness {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub p: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Element(Vec<i64>),
    /// Generator index and its order modulo the image envelope.
    Order { generator: usize, order: i64 },
    /// `q1 + h(p1) = q2 + h(p2)` with no common refinement.
    Integral { q1: Vec<i64>, p1: Vec<i64>, q2: Vec<i64>, p2: Vec<i64> },
    Tsuji(TsujiWitness),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Element(v) => write!(f, "{}", fmt_vec(v)),
            Witness::Order { generator, order } => write!(f, "generator {generator} of order {order}"),
            Witness::Integral { q1, p1, q2, p2 } => write!(
                f,
                "q1={} p1={} q2={} p2={}",
                fmt_vec(q1),
                fmt_vec(p1),
                fmt_vec(q2),
                fmt_vec(p2)
            ),
            Witness::Tsuji(t) => write!(f, "a={} b={} p={}", fmt_vec(&t.a), fmt_vec(&t.b), t.p),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchBounds {
    /// Word-length bound for brute force; `None` picks the default.
    pub degree: Option<usize>,
    /// Prime set for the ℒ-Kummer flag.
    pub primes: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub bound: usize,
    pub local: bool,
    pub exact: Verdict,
    pub kummer: bool,
    pub l_kummer: Option<Verdict>,
    pub integral: Verdict,
    pub saturated: Verdict,
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

pub fn is_l_integer(n: i64, primes: &[u64]) -> bool {
    let mut n = n.unsigned_abs();
    if n == 0 {
        return false;
    }
    for &p in primes {
        if p >= 2 {
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
    }
    n == 1
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale(a: &[i64], k: i64) -> Vec<i64> {
    a.iter().map(|x| x * k).collect()
}

impl MonoidMap {
    pub fn new(source: AffineMonoid, target: AffineMonoid, matrix: Vec<Vec<i64>>) -> Result<MonoidMap> {
        if matrix.len() != target.ambient_dim() || matrix.iter().any(|r| r.len() != source.ambient_dim()) {
            return Err(Error::Dimension(format!(
                "matrix must be {}x{}",
                target.ambient_dim(),
                source.ambient_dim()
            )));
        }
        let map = MonoidMap { source, target, matrix };
        for g in map.source.generators() {
            let img = map.apply(g);
            if !map.target.contains(&img) {
                return Err(Error::InvalidMap(format!(
                    "generator {} maps to {} outside the target",
                    fmt_vec(g),
                    fmt_vec(&img)
                )));
            }
        }
        Ok(map)
    }

    pub fn identity(m: &AffineMonoid) -> MonoidMap {
        let d = m.ambient_dim();
        let matrix = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        MonoidMap { source: m.clone(), target: m.clone(), matrix }
    }

    /// Multiplication by `n` on a monoid.
    pub fn scalar(m: &AffineMonoid, n: i64) -> MonoidMap {
        let d = m.ambient_dim();
        let matrix = (0..d).map(|i| (0..d).map(|j| if i == j { n } else { 0 }).collect()).collect();
        MonoidMap::new(m.clone(), m.clone(), matrix).expect("scalar multiple of a generator stays inside")
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        lattice::mat_vec(&self.matrix, v)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &MonoidMap) -> Result<MonoidMap> {
        if !first.target.same_as(&self.source) {
            return Err(Error::InvalidMap("composition of non-composable maps".into()));
        }
        let matrix = lattice::mat_mul(&self.matrix, &first.matrix, first.source.ambient_dim());
        MonoidMap::new(first.source.clone(), self.target.clone(), matrix)
    }

    fn default_bound(&self) -> usize {
        self.source.default_degree_bound().max(self.target.default_degree_bound())
    }

    pub fn is_local(&self) -> bool {
        (0..self.source.generators().len()).all(|i| {
            let img = self.apply(&self.source.generators()[i]);
            self.source.is_unit_generator(i) == self.target.is_unit(&img)
        })
    }

    /// Injectivity of the induced map of envelopes.
    pub fn is_gp_injective(&self) -> bool {
        let basis = self.source.group_envelope().basis;
        let imgs: Vec<Vec<i64>> = basis.iter().map(|b| self.apply(b)).collect();
        lattice::rank(&imgs, self.target.ambient_dim()) == basis.len()
    }

    pub fn is_kummer(&self) -> bool {
        if !self.is_gp_injective() {
            return false;
        }
        let imgs: Vec<Vec<i64>> = self.source.generators().iter().map(|g| self.apply(g)).collect();
        let cone = Cone::new(self.target.ambient_dim(), &imgs);
        self.target.generators().iter().all(|q| cone.contains(q))
    }

    /// Order of each target generator modulo the image of the source envelope.
    pub fn generator_orders(&self) -> Option<Vec<i64>> {
        if !self.is_kummer() {
            return None;
        }
        let basis = self.source.group_envelope().basis;
        let imgs: Vec<Vec<i64>> = basis.iter().map(|b| self.apply(b)).collect();
        Some(
            self.target
                .generators()
                .iter()
                .map(|q| {
                    let t = lattice::solve_rational(&imgs, q).expect("Kummer target lies in the image span");
                    lattice::lcm_denominators(&t) as i64
                })
                .collect(),
        )
    }

    /// Source elements whose image lies in the target.
    fn image_in_target(&self, v: &[i64]) -> bool {
        self.target.contains(&self.apply(v))
    }

    pub fn is_l_kummer(&self, primes: &[u64], bound: usize) -> Verdict {
        let Some(orders) = self.generator_orders() else {
            return Verdict::Fails(Witness::Element(Vec::new()));
        };
        let source_saturated = matches!(self.source.is_saturated(), Ok(true));
        let basis = self.source.group_envelope().basis;
        let imgs: Vec<Vec<i64>> = basis.iter().map(|b| self.apply(b)).collect();
        for (i, (&o, q)) in orders.iter().zip(self.target.generators()).enumerate() {
            if !is_l_integer(o, primes) {
                return Verdict::Fails(Witness::Order { generator: i, order: o });
            }
            if !source_saturated {
                // some ℒ-multiple of o must land in h(P)
                let found = (1..=bound as i64).filter(|k| is_l_integer(*k, primes)).any(|k| {
                    let Some(c) = lattice::solve_integer(&imgs, &scale(q, o * k)) else {
                        return false;
                    };
                    let mut pre = vec![0i64; self.source.ambient_dim()];
                    for (ci, b) in c.iter().zip(&basis) {
                        pre = add(&pre, &scale(b, *ci));
                    }
                    self.source.contains(&pre)
                });
                if !found {
                    return Verdict::Undecided { bound };
                }
            }
        }
        if source_saturated {
            Verdict::Holds { bound: None }
        } else {
            Verdict::Holds { bound: Some(bound) }
        }
    }

    /// `P = (h^gp)^{-1}(Q) ∩ P^gp`.
    pub fn is_exact(&self, bound: usize) -> Verdict {
        let basis = self.source.group_envelope().basis;
        let r = basis.len();
        let tcone = self.target.cone();
        let scone = self.source.cone();
        let himg: Vec<Vec<i64>> = basis.iter().map(|b| self.apply(b)).collect();
        for phi in &scone.facets {
            // variables: y+ (r), y- (r), slack per target facet
            let nf = tcone.facets.len();
            let ne = tcone.span_equations.len();
            let rows = nf + ne + 1;
            let mut columns: Vec<Vec<i64>> = Vec::new();
            for sign in [1i64, -1] {
                for (i, hb) in himg.iter().enumerate() {
                    let mut col = Vec::with_capacity(rows);
                    for f in &tcone.facets {
                        col.push(sign * lattice::dot(f, hb));
                    }
                    for e in &tcone.span_equations {
                        col.push(sign * lattice::dot(e, hb));
                    }
                    col.push(sign * lattice::dot(phi, &basis[i]));
                    columns.push(col);
                }
            }
            for j in 0..nf {
                let mut col = vec![0i64; rows];
                col[j] = -1;
                columns.push(col);
            }
            let mut target = vec![0i64; rows];
            target[rows - 1] = -1;
            if let Some(sol) = nonneg_combination(&columns, &target) {
                let y: Vec<crate::lattice::Rat> = (0..r).map(|i| sol[i] - sol[r + i]).collect();
                let den = lattice::lcm_denominators(&y);
                let coeffs: Vec<i64> = y.iter().map(|x| (x * crate::lattice::Rat::from(den)).to_integer() as i64).collect();
                let mut x = vec![0i64; self.source.ambient_dim()];
                for (c, b) in coeffs.iter().zip(&basis) {
                    x = add(&x, &scale(b, *c));
                }
                for m in 1..=(bound.max(1) as i64 * 8) {
                    let w = scale(&x, m);
                    if self.image_in_target(&w) {
                        return Verdict::Fails(Witness::Element(w));
                    }
                }
                return Verdict::Undecided { bound };
            }
        }
        match self.source.is_saturated() {
            Ok(true) => Verdict::Holds { bound: None },
            _ => {
                // rational test passed; look for holes of P mapping into Q
                let sat = match self.source.saturate() {
                    Ok(s) => s,
                    Err(_) => return Verdict::Undecided { bound },
                };
                for (v, _) in sat.elements_up_to(bound) {
                    if !self.source.contains(&v) && self.image_in_target(&v) {
                        return Verdict::Fails(Witness::Element(v));
                    }
                }
                Verdict::Undecided { bound }
            }
        }
    }

    /// Source elements `c` with `h(c) | b`; `exact` reports whether the list
    /// is complete.
    fn divisor_preimages(&self, b: &[i64], bound: usize) -> (Vec<Vec<i64>>, bool) {
        let grading = self.target.grading();
        let weights: Vec<i64> = self
            .source
            .generators()
            .iter()
            .map(|g| lattice::dot(grading, &self.apply(g)))
            .collect();
        let budget = lattice::dot(grading, b);
        let exact = weights.iter().all(|&w| w > 0);
        let mut out: Vec<Vec<i64>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let zero = vec![0i64; self.source.ambient_dim()];
        let mut stack = vec![(zero, 0usize, 0i64, 0usize)];
        while let Some((v, start, w, len)) = stack.pop() {
            if self.target.divides(&self.apply(&v), b) && seen.insert(v.clone()) {
                out.push(v.clone());
            }
            for (j, g) in self.source.generators().iter().enumerate().skip(start) {
                let nw = w + weights[j];
                let ok = if exact { nw <= budget } else { len < bound };
                if ok {
                    stack.push((add(&v, g), j, nw, len + 1));
                }
            }
        }
        out.sort();
        (out, exact)
    }

    /// Ogus' criterion: whenever `q1 + h(p1) = q2 + h(p2)` there are `p3, p4`
    /// with `p1 + p3 = p2 + p4` and `q1 - h(p3) = q2 - h(p4) ∈ Q`.
    pub fn is_integral(&self, bound: usize) -> Verdict {
        let ps = self.source.elements_up_to(bound);
        let qs = self.target.elements_up_to(bound);
        let mut buckets: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, (q, _)) in qs.iter().enumerate() {
            for (j, (p, _)) in ps.iter().enumerate() {
                buckets.entry(add(q, &self.apply(p))).or_default().push((i, j));
            }
        }
        let mut divisors: HashMap<usize, (Vec<Vec<i64>>, bool)> = HashMap::new();
        let mut complete = true;
        for pairs in buckets.values() {
            for &(i1, j1) in pairs {
                for &(i2, j2) in pairs {
                    if (i1, j1) == (i2, j2) {
                        continue;
                    }
                    let q1 = &qs[i1].0;
                    let diff = sub(&ps[j1].0, &ps[j2].0);
                    let (cands, exact) = divisors.entry(i1).or_insert_with(|| self.divisor_preimages(q1, bound));
                    let found = cands.iter().any(|p3| self.source.contains(&add(&diff, p3)));
                    if !found {
                        if *exact {
                            return Verdict::Fails(Witness::Integral {
                                q1: q1.clone(),
                                p1: ps[j1].0.clone(),
                                q2: qs[i2].0.clone(),
                                p2: ps[j2].0.clone(),
                            });
                        }
                        complete = false;
                    }
                }
            }
        }
        if complete {
            Verdict::Holds { bound: Some(bound) }
        } else {
            Verdict::Undecided { bound }
        }
    }

    /// Tsuji's criterion, assuming integrality: for `a ∈ P`, `b ∈ Q` and a
    /// prime `p` with `h(a) | p b` there is `c ∈ P` with `a | p c` and
    /// `h(c) | b`.
    pub fn tsuji(&self, bound: usize) -> Verdict {
        let primes = primes_up_to(bound.max(3) as u64);
        let ps = self.source.elements_up_to(bound);
        let qs = self.target.elements_up_to(bound);
        let mut complete = true;
        for (b, _) in &qs {
            let (cands, exact) = self.divisor_preimages(b, bound);
            for &p in &primes {
                let pb = scale(b, p as i64);
                for (a, _) in &ps {
                    if !self.target.divides(&self.apply(a), &pb) {
                        continue;
                    }
                    let ok = cands.iter().any(|c| self.source.divides(a, &scale(c, p as i64)));
                    if !ok {
                        if exact {
                            return Verdict::Fails(Witness::Tsuji(TsujiWitness {
                                a: a.clone(),
                                b: b.clone(),
                                p,
                            }));
                        }
                        complete = false;
                    }
                }
            }
        }
        if complete {
            Verdict::Holds { bound: Some(bound) }
        } else {
            Verdict::Undecided { bound }
        }
    }

    pub fn is_saturated_map(&self, bound: usize) -> Verdict {
        match self.is_integral(bound) {
            Verdict::Holds { .. } => self.tsuji(bound),
            other => other,
        }
    }

    pub fn classify(&self, bounds: &SearchBounds) -> Classification {
        let bound = bounds.degree.unwrap_or_else(|| self.default_bound());
        let integral = self.is_integral(bound);
        let saturated = match &integral {
            Verdict::Holds { .. } => self.tsuji(bound),
            other => other.clone(),
        };
        Classification {
            bound,
            local: self.is_local(),
            exact: self.is_exact(bound),
            kummer: self.is_kummer(),
            l_kummer: if bounds.primes.is_empty() { None } else { Some(self.is_l_kummer(&bounds.primes, bound)) },
            integral,
            saturated,
        }
    }

    /// Saturation of `h(F)` in the target, for Kummer `h`.
    pub fn kummer_face_transport(&self, face: &Face) -> Result<Face> {
        if !self.is_kummer() {
            return Err(Error::NotKummer("face transport needs a Kummer map".into()));
        }
        let imgs: Vec<Vec<i64>> = self.source.face_generators(face).iter().map(|g| self.apply(g)).collect();
        Ok(self.target.face_spanned_by(&imgs))
    }

    /// `h^{-1}(F')` as a face of the source.
    pub fn preimage_face(&self, face: &Face) -> Face {
        let subset: Vec<usize> = (0..self.source.generators().len())
            .filter(|&i| self.target.face_contains(face, &self.apply(&self.source.generators()[i])))
            .collect();
        self.source.face(&subset).expect("preimage of a face is a face")
    }

    /// Restriction `h^{-1}(F') → F'`.
    pub fn restrict_to_face(&self, face: &Face) -> (Face, MonoidMap) {
        let pre = self.preimage_face(face);
        let map = MonoidMap {
            source: self.source.face_monoid(&pre),
            target: self.target.face_monoid(face),
            matrix: self.matrix.clone(),
        };
        (pre, map)
    }
}

/// Saturated amalgamated sum, realised modulo torsion.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub monoid: AffineMonoid,
    /// Matrices of the two legs into the pushout lattice.
    pub left: MonoidMap,
    pub right: MonoidMap,
    /// Invariant factors greater than one of the torsion discarded by the
    /// torsion-free model.
    pub torsion: Vec<i64>,
}

pub fn pushout(f: &MonoidMap, g: &MonoidMap) -> Result<Pushout> {
    if !f.source.same_as(&g.source) {
        return Err(Error::InvalidMap("pushout legs must share a source".into()));
    }
    let dq = f.target.ambient_dim();
    let dr = g.target.ambient_dim();
    let n = dq + dr;
    let basis = f.source.group_envelope().basis;
    let relations: Vec<Vec<i64>> = basis
        .iter()
        .map(|b| {
            let mut v = f.apply(b);
            v.extend(g.apply(b).iter().map(|x| -x));
            v
        })
        .collect();
    let proj = lattice::kernel(&relations, n);
    let k = proj.len();
    let left_m: Vec<Vec<i64>> = proj.iter().map(|row| row[..dq].to_vec()).collect();
    let right_m: Vec<Vec<i64>> = proj.iter().map(|row| row[dq..].to_vec()).collect();
    let mut gens: Vec<Vec<i64>> = f.target.generators().iter().map(|q| lattice::mat_vec(&left_m, q)).collect();
    gens.extend(g.target.generators().iter().map(|q| lattice::mat_vec(&right_m, q)));
    let integral = AffineMonoid::new(k, gens)?;
    let monoid = integral.saturate()?;
    // torsion of (Q^gp ⊕ Q'^gp) / R
    let env = LatticeGroup::spanned_by(
        n,
        &f.target
            .group_envelope()
            .basis
            .iter()
            .map(|b| {
                let mut v = b.clone();
                v.extend(std::iter::repeat_n(0, dr));
                v
            })
            .chain(g.target.group_envelope().basis.iter().map(|b| {
                let mut v = vec![0i64; dq];
                v.extend(b.iter().cloned());
                v
            }))
            .collect::<Vec<_>>(),
    );
    let rel_coords: Vec<Vec<i64>> = relations
        .iter()
        .map(|r| env.coordinates(r).expect("relations lie in the envelope"))
        .collect();
    let torsion = lattice::smith_invariants(&rel_coords, env.rank()).into_iter().filter(|&d| d > 1).collect();
    let left = MonoidMap::new(f.target.clone(), monoid.clone(), left_m)?;
    let right = MonoidMap::new(g.target.clone(), monoid.clone(), right_m)?;
    Ok(Pushout { monoid, left, right, torsion })
}

/// Least `n` for which the base change of `h` along `×n` is saturated,
/// with the verdict reached at that `n`.
pub fn saturation_index(h: &MonoidMap, bound: usize, cutoff: u64) -> Result<(u64, Verdict)> {
    for n in 1..=cutoff {
        let times = MonoidMap::scalar(&h.source, n as i64);
        let po = pushout(h, &times)?;
        let verdict = po.right.is_saturated_map(bound);
        match verdict {
            Verdict::Holds { .. } => return Ok((n, verdict)),
            Verdict::Undecided { .. } => return Ok((n, verdict)),
            Verdict::Fails(_) => {}
        }
    }
    Err(Error::Cutoff(cutoff))
}
