#![allow(dead_code)]

use polystrata::complex::{Element, PolysimplicialSet};
use polystrata::fibration::{corpus, Block, DescentDatum, PolystableChart};
use polystrata::lambda::{LambdaMorphism, LambdaObject};
use polystrata::monoid::{AffineMonoid, MonoidMap};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub fn obj(d: &[usize]) -> LambdaObject {
    LambdaObject::new(d.to_vec()).unwrap()
}

fn map(source: AffineMonoid, target: AffineMonoid, matrix: Vec<Vec<i64>>) -> MonoidMap {
    MonoidMap::new(source, target, matrix).unwrap()
}

pub fn two_block_chart() -> PolystableChart {
    PolystableChart::new(AffineMonoid::free(1), vec![Block { n: 1, a: vec![1] }, Block { n: 1, a: vec![1] }]).unwrap()
}

/// Two independent smoothing parameters, one node each.
pub fn two_parameter_chart() -> PolystableChart {
    PolystableChart::new(AffineMonoid::free(2), vec![Block { n: 1, a: vec![1, 0] }, Block { n: 1, a: vec![0, 1] }])
        .unwrap()
}

pub fn charts() -> Vec<(String, PolystableChart)> {
    vec![
        ("smooth".into(), PolystableChart::smooth()),
        ("node".into(), PolystableChart::node(1)),
        ("node2".into(), PolystableChart::node(2)),
        ("two_blocks".into(), two_block_chart()),
        ("two_parameters".into(), two_parameter_chart()),
        ("a2_node".into(), PolystableChart::new(AffineMonoid::free(1), vec![Block { n: 1, a: vec![2] }]).unwrap()),
    ]
}

pub fn map_corpus() -> Vec<(String, MonoidMap)> {
    let n1 = AffineMonoid::free(1);
    let n2 = AffineMonoid::free(2);
    let n3 = AffineMonoid::free(3);
    let mut out = Vec::new();
    for k in 1..=6 {
        out.push((format!("times{k}"), map(n1.clone(), n1.clone(), vec![vec![k]])));
    }
    out.push(("diagonal".into(), map(n1.clone(), n2.clone(), vec![vec![1], vec![1]])));
    out.push(("diagonal_1_2".into(), map(n1.clone(), n2.clone(), vec![vec![1], vec![2]])));
    out.push(("diagonal_2_2".into(), map(n1.clone(), n2.clone(), vec![vec![2], vec![2]])));
    out.push(("identity2".into(), map(n2.clone(), n2.clone(), vec![vec![1, 0], vec![0, 1]])));
    out.push(("sum".into(), map(n2.clone(), n1.clone(), vec![vec![1, 1]])));
    out.push(("face".into(), map(n1.clone(), n2.clone(), vec![vec![1], vec![0]])));
    out.push(("diagonal3".into(), map(n1.clone(), n3.clone(), vec![vec![1], vec![1], vec![1]])));
    out.push(("diagonal_1_1_2".into(), map(n1.clone(), n3, vec![vec![1], vec![1], vec![2]])));
    out.push(("kummer_2_1".into(), map(n2.clone(), n2, vec![vec![2, 0], vec![0, 1]])));
    for (name, c) in charts().into_iter().filter(|(n, _)| n != "smooth") {
        out.push((format!("chart_{name}"), c.structure_map()));
    }
    out
}

/// Saturation and integrality of `h: N^k → Q` decided from the definitions
/// by exhaustive search: integrality by Kato's condition, saturation by
/// saturation of the pushout along multiplication by each prime.
pub struct MapOracle {
    k: usize,
    q_gens: Vec<Vec<i64>>,
    matrix: Vec<Vec<i64>>,
    weight: Vec<i64>,
    memo: RefCell<HashMap<Vec<i64>, bool>>,
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sums_up_to(gens: &[Vec<i64>], dim: usize, degree: usize) -> Vec<Vec<i64>> {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::from([vec![0; dim]]);
    let mut layer = vec![vec![0; dim]];
    for _ in 0..degree {
        let mut next = Vec::new();
        for v in &layer {
            for g in gens {
                let w = add(v, g);
                if seen.insert(w.clone()) {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    seen.into_iter().collect()
}

impl MapOracle {
    pub fn new(h: &MonoidMap) -> MapOracle {
        let k = h.source.ambient_dim();
        let mut units: Vec<Vec<i64>> = h.source.generators().to_vec();
        units.sort();
        let mut expected: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect();
        expected.sort();
        assert_eq!(units, expected, "the oracle handles free sources only");
        let q_gens = h.target.generators().to_vec();
        let d = h.target.ambient_dim();
        // a grading positive on every generator, found by search
        let mut weight = None;
        let range: Vec<i64> = (-3..=3).collect();
        let mut cur = vec![0i64; d];
        fn search(i: usize, cur: &mut Vec<i64>, range: &[i64], gens: &[Vec<i64>], out: &mut Option<Vec<i64>>) {
            if out.is_some() {
                return;
            }
            if i == cur.len() {
                if gens.iter().all(|g| dot(g, cur) > 0) {
                    *out = Some(cur.clone());
                }
                return;
            }
            for &r in range {
                cur[i] = r;
                search(i + 1, cur, range, gens, out);
            }
        }
        search(0, &mut cur, &range, &q_gens, &mut weight);
        MapOracle {
            k,
            q_gens,
            matrix: h.matrix.clone(),
            weight: weight.expect("sharp target"),
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn h(&self, a: &[i64]) -> Vec<i64> {
        self.matrix.iter().map(|row| dot(row, a)).collect()
    }

    pub fn in_q(&self, v: &[i64]) -> bool {
        if v.iter().all(|&x| x == 0) {
            return true;
        }
        if dot(v, &self.weight) <= 0 {
            return false;
        }
        if let Some(&b) = self.memo.borrow().get(v) {
            return b;
        }
        let r = self.q_gens.iter().any(|g| self.in_q(&sub(v, g)));
        self.memo.borrow_mut().insert(v.to_vec(), r);
        r
    }

    fn p_elements(&self, degree: usize) -> Vec<Vec<i64>> {
        let units: Vec<Vec<i64>> = (0..self.k).map(|i| (0..self.k).map(|j| i64::from(i == j)).collect()).collect();
        sums_up_to(&units, self.k, degree)
    }

    pub fn integral(&self, degree: usize) -> bool {
        let ps = self.p_elements(degree);
        let qs = sums_up_to(&self.q_gens, self.matrix.len(), degree);
        let mut buckets: BTreeMap<Vec<i64>, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, q) in qs.iter().enumerate() {
            for (j, p) in ps.iter().enumerate() {
                buckets.entry(add(q, &self.h(p))).or_default().push((i, j));
            }
        }
        let wide = self.p_elements(degree + 2);
        for pairs in buckets.values() {
            for &(i1, j1) in pairs {
                for &(_, j2) in pairs {
                    let ok = wide.iter().any(|a3| {
                        let a4 = sub(&add(&ps[j1], a3), &ps[j2]);
                        a4.iter().all(|&x| x >= 0) && self.in_q(&sub(&qs[i1], &self.h(a3)))
                    });
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `(q, a)` lies in the pushout along `× n` iff some `c` moves it into
    /// `Q ⊕ N^k`; `c` is bounded above by `a ≥ n c` and below by the
    /// grading of `q + h(c)`.
    fn in_pushout(&self, n: i64, q: &[i64], a: &[i64]) -> bool {
        let upper: Vec<i64> = a.iter().map(|&x| x.div_euclid(n)).collect();
        let wh: Vec<i64> = (0..self.k)
            .map(|i| {
                let e: Vec<i64> = (0..self.k).map(|j| i64::from(i == j)).collect();
                dot(&self.h(&e), &self.weight)
            })
            .collect();
        let wq = dot(q, &self.weight);
        let top: i64 = wh.iter().zip(&upper).map(|(w, u)| w * u).sum();
        let ranges: Vec<(i64, i64)> = (0..self.k)
            .map(|i| {
                let lo = if wh[i] > 0 {
                    let rest = top - wh[i] * upper[i];
                    (-wq - rest).div_euclid(wh[i])
                } else {
                    upper[i] - 12
                };
                (lo, upper[i])
            })
            .collect();
        let mut c = vec![0i64; self.k];
        fn rec(o: &MapOracle, q: &[i64], ranges: &[(i64, i64)], i: usize, c: &mut Vec<i64>) -> bool {
            if i == c.len() {
                return o.in_q(&add(q, &o.h(c)));
            }
            for v in ranges[i].0..=ranges[i].1 {
                c[i] = v;
                if rec(o, q, ranges, i + 1, c) {
                    return true;
                }
            }
            false
        }
        rec(self, q, &ranges, 0, &mut c)
    }

    /// Searches for `x ∉ R` with `p x ∈ R`, `p` prime; a minimal witness of
    /// non-saturation always has this shape. Elements of `R` are `(q, a)`
    /// with `a` reduced modulo `n`, and `x = (r + (h(c), −n c)) / p` where
    /// only `c mod p` matters.
    pub fn pushout_saturated(&self, n: i64, degree: usize) -> bool {
        let qs = sums_up_to(&self.q_gens, self.matrix.len(), degree);
        let boxes = |m: i64| {
            let mut out = vec![Vec::new()];
            for _ in 0..self.k {
                out = out
                    .into_iter()
                    .flat_map(|r: Vec<i64>| {
                        (0..m).map(move |x| {
                            let mut r = r.clone();
                            r.push(x);
                            r
                        })
                    })
                    .collect();
            }
            out
        };
        let residues = boxes(n);
        for p in [2i64, 3, 5] {
            let shifts = boxes(p);
            for q in &qs {
                for a0 in &residues {
                    for c in &shifts {
                        let top = add(q, &self.h(c));
                        let bottom: Vec<i64> = a0.iter().zip(c).map(|(x, y)| x - n * y).collect();
                        if top.iter().chain(&bottom).any(|v| v.rem_euclid(p) != 0) {
                            continue;
                        }
                        let xq: Vec<i64> = top.iter().map(|v| v / p).collect();
                        let xa: Vec<i64> = bottom.iter().map(|v| v / p).collect();
                        if !self.in_pushout(n, &xq, &xa) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn saturated(&self, degree: usize) -> bool {
        self.integral(degree) && [2, 3, 5].iter().all(|&p| self.pushout_saturated(p, degree))
    }
}

/// Glued curve corpus.
pub fn glued_corpus() -> Vec<(String, DescentDatum)> {
    let mut out = vec![("loop".to_string(), corpus::nodal_cubic()), ("smooth".to_string(), corpus::smooth())];
    for n in [2, 3, 4, 5] {
        out.push((format!("cycle{n}"), corpus::cycle(n)));
    }
    out.push(("theta".into(), corpus::theta()));
    for k in [2, 4] {
        out.push((format!("banana{k}"), corpus::banana(k)));
    }
    out
}

/// Every complex the tests know about.
pub fn complex_corpus() -> Vec<(String, PolysimplicialSet)> {
    let mut out = vec![("point".to_string(), PolysimplicialSet::point())];
    for d in [&[1][..], &[2], &[1, 1], &[2, 1], &[3]] {
        out.push((format!("representable{d:?}"), PolysimplicialSet::representable(&obj(d))));
    }
    for (name, d) in glued_corpus() {
        out.push((name, corpus::closed(&d).complex));
    }
    let lp = corpus::closed(&corpus::nodal_cubic()).complex;
    out.push(("torus".into(), PolysimplicialSet::box_product(&lp, &lp)));
    let edge = PolysimplicialSet::representable(&obj(&[1]));
    out.push(("loop_x_edge".into(), PolysimplicialSet::box_product(&lp, &edge)));
    let (two, _) = PolysimplicialSet::disjoint_union(&[("a", &lp), ("b", &edge)]);
    out.push(("loop_plus_edge".into(), two));
    out
}

pub fn small_objects() -> Vec<LambdaObject> {
    vec![LambdaObject::point(), obj(&[1]), obj(&[2]), obj(&[1, 1])]
}

/// Normal forms of `x · m` reached through every factorisation
/// `m = m1 ∘ m2` through a small object, keyed by `m`.
pub fn normal_forms_by_route(c: &PolysimplicialSet, x: usize, n: &LambdaObject) -> Vec<(LambdaMorphism, Vec<Element>)> {
    let t = c.cell_type(x);
    let mut found: BTreeMap<LambdaMorphism, Vec<Element>> = BTreeMap::new();
    for m in LambdaMorphism::all(n, t) {
        found.insert(m.clone(), vec![c.act(x, &m)]);
    }
    for k in small_objects() {
        let firsts = LambdaMorphism::all(&k, t);
        let seconds = LambdaMorphism::all(n, &k);
        for m1 in &firsts {
            let y = c.act(x, m1);
            for m2 in &seconds {
                let m = m1.after(m2).unwrap();
                let e = c.act_element(&y, m2);
                let slot = found.get_mut(&m).expect("composite is a morphism n → type");
                if !slot.contains(&e) {
                    slot.push(e);
                }
            }
        }
    }
    found.into_iter().collect()
}
