//! Exact integer lattice arithmetic: Hermite and Smith normal forms,
//! integer kernels, integer and rational linear solving.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rat = Ratio<i128>;

/// Result of a row-style Hermite reduction with transform tracking.
///
/// `rows[k]` is a linear combination of the input rows with integer
/// coefficients `transforms[k]`. Together with `kernel` (combinations that
/// vanish) the transforms form a unimodular matrix.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<i128>>,
    pub transforms: Vec<Vec<i128>>,
    pub pivots: Vec<usize>,
    pub kernel: Vec<Vec<i128>>,
}

pub fn echelon(input: &[Vec<i64>], ncols: usize) -> Echelon {
    let nrows = input.len();
    let width = ncols + nrows;
    let mut m: Vec<Vec<i128>> = input
        .iter()
        .enumerate()
        .map(|(i, r)| {
            assert_eq!(r.len(), ncols, "row length mismatch");
            let mut row = vec![0i128; width];
            for (j, &x) in r.iter().enumerate() {
                row[j] = x as i128;
            }
            row[ncols + i] = 1;
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..ncols {
        if prow == nrows {
            break;
        }
        loop {
            let best = (prow..nrows)
                .filter(|&r| m[r][col] != 0)
                .min_by_key(|&r| m[r][col].abs());
            let Some(best) = best else { break };
            m.swap(prow, best);
            let mut done = true;
            for r in prow + 1..nrows {
                if m[r][col] != 0 {
                    let q = Integer::div_floor(&m[r][col], &m[prow][col]);
                    sub_scaled(&mut m, r, prow, q);
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[prow][col] == 0 {
            continue;
        }
        if m[prow][col] < 0 {
            for x in m[prow].iter_mut() {
                *x = -*x;
            }
        }
        for r in 0..prow {
            let q = Integer::div_floor(&m[r][col], &m[prow][col]);
            if q != 0 {
                sub_scaled(&mut m, r, prow, q);
            }
        }
        pivots.push(col);
        prow += 1;
    }

    let mut rows = Vec::new();
    let mut transforms = Vec::new();
    let mut kernel = Vec::new();
    for (i, row) in m.into_iter().enumerate() {
        let (head, tail) = row.split_at(ncols);
        if i < prow {
            rows.push(head.to_vec());
            transforms.push(tail.to_vec());
        } else {
            kernel.push(tail.to_vec());
        }
    }
    Echelon { rows, transforms, pivots, kernel }
}

fn sub_scaled(m: &mut [Vec<i128>], target: usize, source: usize, q: i128) {
    let (a, b) = if target < source {
        let (lo, hi) = m.split_at_mut(source);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[source])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x -= q * y;
    }
}

pub(crate) fn narrow(v: &[i128]) -> Vec<i64> {
    v.iter()
        .map(|&x| i64::try_from(x).expect("integer overflow in lattice arithmetic"))
        .collect()
}

/// Canonical (Hermite-reduced) basis of the lattice spanned by `rows`.
pub fn hermite_basis(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    echelon(rows, ncols).rows.iter().map(|r| narrow(r)).collect()
}

pub fn rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    echelon(rows, ncols).rows.len()
}

/// Integer basis of `{x : A x = 0}` where `A` is given by its rows.
/// The returned lattice is saturated in `Z^ncols`.
pub fn kernel(a_rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let cols = transpose(a_rows, ncols);
    let e = echelon(&cols, a_rows.len());
    let mut k: Vec<Vec<i64>> = e.kernel.iter().map(|r| narrow(r)).collect();
    // canonical form for the kernel lattice
    k = hermite_basis(&k, ncols);
    k
}

pub fn transpose(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    (0..ncols)
        .map(|j| rows.iter().map(|r| r[j]).collect())
        .collect()
}

pub fn mat_vec(rows: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    rows.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>], b_cols: usize) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| {
            (0..b_cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integer solution of `sum_k x_k * vectors[k] = target`, if one exists.
pub fn solve_integer(vectors: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    let n = target.len();
    let e = echelon(vectors, n);
    let mut rest: Vec<i128> = target.iter().map(|&x| x as i128).collect();
    let mut coeffs = vec![0i128; vectors.len()];
    for (k, &p) in e.pivots.iter().enumerate() {
        let row = &e.rows[k];
        if rest[p] % row[p] != 0 {
            return None;
        }
        let q = rest[p] / row[p];
        if q != 0 {
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= q * y;
            }
            for (c, t) in coeffs.iter_mut().zip(&e.transforms[k]) {
                *c += q * t;
            }
        }
    }
    if rest.iter().any(|&x| x != 0) {
        return None;
    }
    Some(narrow(&coeffs))
}

/// Unique rational coordinates of `target` in the span of linearly
/// independent `vectors`; `None` if `target` is outside the span.
pub fn solve_rational(vectors: &[Vec<i64>], target: &[i64]) -> Option<Vec<Rat>> {
    let n = target.len();
    let k = vectors.len();
    // augmented system: columns are vectors, rows are coordinates
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = vectors.iter().map(|v| Rat::from(v[i] as i128)).collect();
            row.push(Rat::from(target[i] as i128));
            row
        })
        .collect();
    let mut prow = 0;
    let mut pivcols = Vec::new();
    for col in 0..k {
        let Some(r) = (prow..n).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(prow, r);
        let p = m[prow][col];
        for x in m[prow].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != prow && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in 0..=k {
                    let d = m[prow][c] * f;
                    m[r][c] -= d;
                }
            }
        }
        pivcols.push(col);
        prow += 1;
    }
    assert_eq!(pivcols.len(), k, "solve_rational requires independent vectors");
    if m[prow..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| m[i][k]).collect())
}

/// Nonzero invariant factors of the integer matrix given by `rows`.
pub fn smith_invariants(rows: &[Vec<i64>], ncols: usize) -> Vec<i64> {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let nr = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(ncols) {
        // locate the smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..ncols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let p = m[t][t];
            let mut changed = false;
            for i in t + 1..nr {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..ncols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    changed = true;
                }
            }
            for j in t + 1..ncols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    changed = true;
                }
            }
            if !changed {
                // enforce divisibility of the trailing block
                let bad = (t + 1..nr)
                    .flat_map(|i| (t + 1..ncols).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..ncols {
                            let v = m[i][j];
                            m[t][j] += v;
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest entry of row/column t into the pivot
            let mut best = (t, t);
            for i in t..nr {
                if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..ncols {
                if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                m.swap(t, best.0);
            }
            if best.1 != t {
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag.sort();
    narrow(&diag)
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_all(v);
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

pub fn lcm_denominators(v: &[Rat]) -> i128 {
    v.iter().fold(1i128, |l, x| l.lcm(x.denom()))
}

pub fn is_nonneg(x: &Rat) -> bool {
    !x.is_negative()
}

/// A sublattice of `Z^ambient_dim`, stored by its canonical Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeGroup {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<i64>>,
}

impl LatticeGroup {
    pub fn spanned_by(ambient_dim: usize, vectors: &[Vec<i64>]) -> Self {
        LatticeGroup { ambient_dim, basis: hermite_basis(vectors, ambient_dim) }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        solve_integer(&self.basis, v).is_some()
    }

    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        solve_integer(&self.basis, v)
    }

    pub fn is_sublattice_of(&self, other: &LatticeGroup) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Rational saturation `(L ⊗ Q) ∩ Z^n`.
    pub fn saturation(&self) -> LatticeGroup {
        let ortho = kernel(&self.basis, self.ambient_dim);
        let back = kernel(&ortho, self.ambient_dim);
        LatticeGroup { ambient_dim: self.ambient_dim, basis: back }
    }

    /// Index in the rational saturation; torsion of `Z^n / L` lives here.
    pub fn index_in_saturation(&self) -> i64 {
        let sat = self.saturation();
        let coords: Vec<Vec<i64>> = self
            .basis
            .iter()
            .map(|b| sat.coordinates(b).expect("lattice inside its saturation"))
            .collect();
        smith_invariants(&coords, sat.rank()).iter().product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_of_two_and_three_is_unit() {
        assert_eq!(hermite_basis(&[vec![2], vec![3]], 1), vec![vec![1]]);
    }

    #[test]
    fn hermite_even_second_coordinate() {
        let b = hermite_basis(&[vec![1, 0], vec![1, 2]], 2);
        assert_eq!(b, vec![vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn kernel_is_orthogonal_and_saturated() {
        let a = vec![vec![2, -2, 0], vec![0, 0, 1]];
        let k = kernel(&a, 3);
        assert_eq!(k, vec![vec![1, 1, 0]]);
    }

    #[test]
    fn smith_of_relation_matrix() {
        assert_eq!(smith_invariants(&[vec![2, -2]], 2), vec![2]);
        assert_eq!(smith_invariants(&[vec![2, 4], vec![6, 8]], 2), vec![2, 4]);
        assert_eq!(smith_invariants(&[vec![0, 0]], 2), Vec::<i64>::new());
        assert_eq!(smith_invariants(&[vec![6, 0], vec![0, 4]], 2), vec![2, 12]);
    }

    #[test]
    fn integer_solve() {
        assert_eq!(solve_integer(&[vec![2], vec![3]], &[1]).map(|x| 2 * x[0] + 3 * x[1]), Some(1));
        assert!(solve_integer(&[vec![2, 0]], &[1, 0]).is_none());
        assert!(solve_integer(&[], &[0, 0]).is_some());
    }

    #[test]
    fn rational_solve() {
        let s = solve_rational(&[vec![2, 0], vec![0, 3]], &[1, 1]).unwrap();
        assert_eq!(s, vec![Rat::new(1, 2), Rat::new(1, 3)]);
        assert!(solve_rational(&[vec![1, 1]], &[1, 0]).is_none());
    }

    #[test]
    fn saturation_index() {
        let l = LatticeGroup::spanned_by(2, &[vec![2, -2]]);
        assert_eq!(l.index_in_saturation(), 2);
        assert_eq!(l.saturation().basis, vec![vec![1, -1]]);
    }
}
