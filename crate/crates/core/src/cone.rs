//! Rational polyhedral cones: support hyperplanes and exact membership.

use crate::lattice::{self, Rat};
use num_traits::{One, Signed, Zero};

/// Cone spanned by finitely many integer vectors.
///
/// Facets are stored as primitive integer functionals lying in the linear
/// span of the cone, so the facet set is canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub ambient_dim: usize,
    pub rays: Vec<Vec<i64>>,
    /// Functionals vanishing on the linear span.
    pub span_equations: Vec<Vec<i64>>,
    pub facets: Vec<Vec<i64>>,
}

impl Cone {
    pub fn new(ambient_dim: usize, rays: &[Vec<i64>]) -> Cone {
        let span = lattice::hermite_basis(rays, ambient_dim);
        let r = span.len();
        let span_equations = lattice::kernel(&span, ambient_dim);
        let mut facets: Vec<Vec<i64>> = Vec::new();
        if r > 0 {
            let nonzero: Vec<&Vec<i64>> = rays.iter().filter(|v| v.iter().any(|&x| x != 0)).collect();
            for subset in Subsets::new(nonzero.len(), r - 1) {
                let chosen: Vec<Vec<i64>> = subset.iter().map(|&i| nonzero[i].clone()).collect();
                if lattice::rank(&chosen, ambient_dim) != r - 1 {
                    continue;
                }
                // c with sum_i c_i <span_i, s> = 0 for every chosen s
                let gram: Vec<Vec<i64>> = chosen
                    .iter()
                    .map(|s| span.iter().map(|b| lattice::dot(b, s)).collect())
                    .collect();
                let ker = lattice::kernel(&gram, r);
                debug_assert_eq!(ker.len(), 1);
                let c = &ker[0];
                let mut normal = vec![0i64; ambient_dim];
                for (ci, b) in c.iter().zip(&span) {
                    for (n, x) in normal.iter_mut().zip(b) {
                        *n += ci * x;
                    }
                }
                let normal = lattice::primitive(&normal);
                let values: Vec<i64> = rays.iter().map(|v| lattice::dot(&normal, v)).collect();
                let candidate = if values.iter().all(|&x| x >= 0) {
                    normal
                } else if values.iter().all(|&x| x <= 0) {
                    normal.iter().map(|x| -x).collect()
                } else {
                    continue;
                };
                if values.iter().all(|&x| x == 0) {
                    continue;
                }
                if !facets.contains(&candidate) {
                    facets.push(candidate);
                }
            }
        }
        facets.sort();
        Cone { ambient_dim, rays: rays.to_vec(), span_equations, facets }
    }

    pub fn in_span(&self, v: &[i64]) -> bool {
        self.span_equations.iter().all(|m| lattice::dot(m, v) == 0)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.in_span(v) && self.facets.iter().all(|f| lattice::dot(f, v) >= 0)
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim - self.span_equations.len()
    }

    /// Facets vanishing on every vector of `vs`.
    pub fn facets_containing(&self, vs: &[Vec<i64>]) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| vs.iter().all(|v| lattice::dot(&self.facets[i], v) == 0))
            .collect()
    }

    /// Sum of facet functionals: zero on the lineality space, positive on
    /// every other point of the cone.
    pub fn grading(&self) -> Vec<i64> {
        let mut g = vec![0i64; self.ambient_dim];
        for f in &self.facets {
            for (x, y) in g.iter_mut().zip(f) {
                *x += y;
            }
        }
        g
    }
}

/// Enumerates k-subsets of 0..n in lexicographic order.
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Subsets {
    pub fn new(n: usize, k: usize) -> Subsets {
        Subsets { n, current: if k <= n { Some((0..k).collect()) } else { None } }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let out = cur.clone();
        let k = cur.len();
        let mut next = cur;
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Exact feasibility of `sum_j x_j * columns[j] = target` with `x >= 0`,
/// by phase-one simplex with Bland's rule over the rationals.
pub fn nonneg_combination(columns: &[Vec<i64>], target: &[i64]) -> Option<Vec<Rat>> {
    let m = target.len();
    let n = columns.len();
    // tableau rows: constraints; columns: n originals, m artificials, rhs
    let width = n + m + 1;
    let mut t: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let sign: i128 = if target[i] < 0 { -1 } else { 1 };
            let mut row = vec![Rat::zero(); width];
            for (j, col) in columns.iter().enumerate() {
                row[j] = Rat::from(sign * col[i] as i128);
            }
            row[n + i] = Rat::one();
            row[width - 1] = Rat::from(sign * target[i] as i128);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // objective: minimise the sum of artificials; reduced costs row
    loop {
        let mut reduced = vec![Rat::zero(); width];
        for r in reduced.iter_mut().skip(n).take(m) {
            *r = Rat::one();
        }
        for (i, row) in t.iter().enumerate() {
            if basis[i] >= n {
                for (r, x) in reduced.iter_mut().zip(row) {
                    *r -= *x;
                }
            }
        }
        for &b in &basis {
            reduced[b] = Rat::zero();
        }
        let entering = (0..n + m).find(|&j| reduced[j].is_negative());
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[e].is_positive() {
                let ratio = row[width - 1] / row[e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else { break };
        let p = t[l][e];
        for x in t[l].iter_mut() {
            *x /= p;
        }
        for i in 0..m {
            if i != l && !t[i][e].is_zero() {
                let f = t[i][e];
                for c in 0..width {
                    let d = t[l][c] * f;
                    t[i][c] -= d;
                }
            }
        }
        basis[l] = e;
    }
    let infeasible = t
        .iter()
        .enumerate()
        .any(|(i, row)| basis[i] >= n && !row[width - 1].is_zero());
    if infeasible {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = t[i][width - 1];
        }
    }
    Some(x)
}
