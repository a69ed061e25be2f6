//! Berkovich's category Λ of products of finite ordinals.
//!
//! A morphism `[m] → [n]` is stored per target coordinate: either a constant
//! or an injective map from one source coordinate. This is equivalent to the
//! triple `(J, f, α)` and makes equality of morphisms structural.

use crate::error::{Error, Result};
use std::fmt;

/// `[n_0] × … × [n_p]`; the point `[0]` is stored as `dims == [0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaObject {
    dims: Vec<usize>,
}

impl LambdaObject {
    pub fn new(dims: Vec<usize>) -> Result<LambdaObject> {
        if dims.is_empty() {
            return Err(Error::InvalidMorphism("object with no coordinates".into()));
        }
        if dims != [0] && dims.contains(&0) {
            return Err(Error::InvalidMorphism(format!("object {dims:?} mixes 0 with other coordinates")));
        }
        Ok(LambdaObject { dims })
    }

    pub fn point() -> LambdaObject {
        LambdaObject { dims: vec![0] }
    }

    pub fn simplex(n: usize) -> LambdaObject {
        if n == 0 {
            LambdaObject::point()
        } else {
            LambdaObject { dims: vec![n] }
        }
    }

    pub fn is_point(&self) -> bool {
        self.dims == [0]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `w(n)`.
    pub fn width(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn coords(&self) -> usize {
        self.dims.len()
    }

    /// Dimension of the realization `Σ_n`.
    pub fn dimension(&self) -> usize {
        self.dims.iter().sum()
    }

    /// The sub-product on the given coordinates.
    pub fn restrict(&self, coords: &[usize]) -> LambdaObject {
        if coords.is_empty() {
            LambdaObject::point()
        } else {
            LambdaObject { dims: coords.iter().map(|&c| self.dims[c]).collect() }
        }
    }

    /// `[n] ⊓ [n']`, with the point as unit.
    pub fn concat(&self, other: &LambdaObject) -> LambdaObject {
        if self.is_point() {
            return other.clone();
        }
        if other.is_point() {
            return self.clone();
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        LambdaObject { dims }
    }

    /// Coordinates that carry a nontrivial factor.
    pub fn live_coords(&self) -> Vec<usize> {
        if self.is_point() {
            Vec::new()
        } else {
            (0..self.dims.len()).collect()
        }
    }
}

impl fmt::Display for LambdaObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "0")
        } else {
            let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

impl std::str::FromStr for LambdaObject {
    type Err = Error;
    fn from_str(s: &str) -> Result<LambdaObject> {
        let s = s.trim();
        if s == "0" {
            return Ok(LambdaObject::point());
        }
        let inner = s
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidMorphism(format!("bad object `{s}`")))?;
        let dims = inner
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::InvalidMorphism(format!("bad object `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        LambdaObject::new(dims)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Const(usize),
    /// `alpha[j]` is the image of `j ∈ [m_src]`.
    From { src: usize, alpha: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaMorphism {
    source: LambdaObject,
    target: LambdaObject,
    coords: Vec<Coord>,
}

fn is_injective(alpha: &[usize]) -> bool {
    let mut seen = alpha.to_vec();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

impl LambdaMorphism {
    pub fn new(source: LambdaObject, target: LambdaObject, coords: Vec<Coord>) -> Result<LambdaMorphism> {
        if coords.len() != target.coords() {
            return Err(Error::InvalidMorphism(format!(
                "{} coordinates given for target {}",
                coords.len(),
                target
            )));
        }
        let mut used = Vec::new();
        for (l, c) in coords.iter().enumerate() {
            let nl = target.dims[l];
            match c {
                Coord::Const(v) => {
                    if *v > nl {
                        return Err(Error::InvalidMorphism(format!("constant {v} exceeds [{nl}]")));
                    }
                }
                Coord::From { src, alpha } => {
                    if source.is_point() {
                        return Err(Error::InvalidMorphism("J must be empty for the source [0]".into()));
                    }
                    if *src >= source.coords() || used.contains(src) {
                        return Err(Error::InvalidMorphism(format!("source coordinate {src} invalid or reused")));
                    }
                    used.push(*src);
                    if alpha.len() != source.dims[*src] + 1 || alpha.iter().any(|&a| a > nl) || !is_injective(alpha)
                    {
                        return Err(Error::InvalidMorphism(format!(
                            "α_{l} = {alpha:?} is not an injection [{}] → [{nl}]",
                            source.dims[*src]
                        )));
                    }
                }
            }
        }
        Ok(LambdaMorphism { source, target, coords })
    }

    /// Builds a morphism from a triple: `f` maps each element of `j` to a
    /// target coordinate, `alpha[l]` is `α_l`.
    pub fn from_triple(
        source: LambdaObject,
        target: LambdaObject,
        j: &[usize],
        f: &[usize],
        alpha: &[Vec<usize>],
    ) -> Result<LambdaMorphism> {
        if j.len() != f.len() || alpha.len() != target.coords() {
            return Err(Error::InvalidMorphism("triple has inconsistent lengths".into()));
        }
        let coords = (0..target.coords())
            .map(|l| match f.iter().position(|&x| x == l) {
                Some(k) => Coord::From { src: j[k], alpha: alpha[l].clone() },
                None => Coord::Const(alpha[l].first().copied().unwrap_or(0)),
            })
            .collect();
        LambdaMorphism::new(source, target, coords)
    }

    /// `(J, f, α)` with `J` increasing.
    pub fn triple(&self) -> (Vec<usize>, Vec<usize>, Vec<Vec<usize>>) {
        let mut jf: Vec<(usize, usize)> = self
            .coords
            .iter()
            .enumerate()
            .filter_map(|(l, c)| match c {
                Coord::From { src, .. } => Some((*src, l)),
                Coord::Const(_) => None,
            })
            .collect();
        jf.sort();
        let alpha = self
            .coords
            .iter()
            .map(|c| match c {
                Coord::Const(v) => vec![*v],
                Coord::From { alpha, .. } => alpha.clone(),
            })
            .collect();
        (jf.iter().map(|x| x.0).collect(), jf.iter().map(|x| x.1).collect(), alpha)
    }

    pub fn identity(obj: &LambdaObject) -> LambdaMorphism {
        let coords = if obj.is_point() {
            vec![Coord::Const(0)]
        } else {
            (0..obj.coords())
                .map(|i| Coord::From { src: i, alpha: (0..=obj.dims[i]).collect() })
                .collect()
        };
        LambdaMorphism { source: obj.clone(), target: obj.clone(), coords }
    }

    /// Projection onto the listed coordinates, kept in increasing order with
    /// identity α.
    pub fn standard_surjection(source: &LambdaObject, kept: &[usize]) -> LambdaMorphism {
        let target = source.restrict(kept);
        let coords = if kept.is_empty() {
            vec![Coord::Const(0)]
        } else {
            kept.iter()
                .map(|&k| Coord::From { src: k, alpha: (0..=source.dims[k]).collect() })
                .collect()
        };
        LambdaMorphism { source: source.clone(), target, coords }
    }

    pub fn source(&self) -> &LambdaObject {
        &self.source
    }

    pub fn target(&self) -> &LambdaObject {
        &self.target
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    /// Source coordinates the map depends on, increasing.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .coords
            .iter()
            .filter_map(|c| match c {
                Coord::From { src, .. } => Some(*src),
                Coord::Const(_) => None,
            })
            .collect();
        s.sort_unstable();
        s
    }

    pub fn apply(&self, point: &[usize]) -> Vec<usize> {
        self.coords
            .iter()
            .map(|c| match c {
                Coord::Const(v) => *v,
                Coord::From { src, alpha } => alpha[point[*src]],
            })
            .collect()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &LambdaMorphism) -> Result<LambdaMorphism> {
        if first.target != self.source {
            return Err(Error::InvalidMorphism(format!(
                "cannot compose {} → {} after {} → {}",
                self.source, self.target, first.source, first.target
            )));
        }
        let coords = self
            .coords
            .iter()
            .map(|c| match c {
                Coord::Const(v) => Coord::Const(*v),
                Coord::From { src, alpha } => match &first.coords[*src] {
                    Coord::Const(v) => Coord::Const(alpha[*v]),
                    Coord::From { src: s2, alpha: beta } => {
                        Coord::From { src: *s2, alpha: beta.iter().map(|&b| alpha[b]).collect() }
                    }
                },
            })
            .collect();
        Ok(LambdaMorphism { source: first.source.clone(), target: self.target.clone(), coords })
    }

    /// Whether `J` is every source coordinate (or the source is `[0]`).
    /// `new` also accepts a proper `J`: every degeneracy drops a coordinate,
    /// so the strict reading leaves only injections.
    pub fn is_strict(&self) -> bool {
        self.is_injective()
    }

    pub fn is_identity(&self) -> bool {
        *self == LambdaMorphism::identity(&self.source)
    }

    pub fn is_injective(&self) -> bool {
        self.source.is_point() || self.support().len() == self.source.coords()
    }

    pub fn is_surjective(&self) -> bool {
        self.coords.iter().enumerate().all(|(l, c)| match c {
            Coord::From { alpha, .. } => alpha.len() == self.target.dims[l] + 1,
            Coord::Const(_) => self.target.dims[l] == 0,
        })
    }

    pub fn is_automorphism(&self) -> bool {
        self.source == self.target && self.is_injective() && self.is_surjective()
    }

    pub fn is_standard_surjection(&self) -> bool {
        *self == LambdaMorphism::standard_surjection(&self.source, &self.support())
    }

    /// `self = mono ∘ epi` with `epi` a standard surjection.
    pub fn factor(&self) -> (LambdaMorphism, LambdaMorphism) {
        let kept = self.support();
        let epi = LambdaMorphism::standard_surjection(&self.source, &kept);
        let coords = self
            .coords
            .iter()
            .map(|c| match c {
                Coord::Const(v) => Coord::Const(*v),
                Coord::From { src, alpha } => Coord::From {
                    src: kept.iter().position(|k| k == src).expect("support"),
                    alpha: alpha.clone(),
                },
            })
            .collect();
        let mono = LambdaMorphism { source: epi.target.clone(), target: self.target.clone(), coords };
        (epi, mono)
    }

    /// All morphisms `source → target`, in a fixed order.
    pub fn all(source: &LambdaObject, target: &LambdaObject) -> Vec<LambdaMorphism> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        enumerate(source, target, 0, &mut Vec::new(), &mut cur, &mut out, false);
        out
    }

    /// All injective morphisms into `target`, from every possible source.
    pub fn injections_into(target: &LambdaObject) -> Vec<LambdaMorphism> {
        let mut out = Vec::new();
        for source in sub_objects(target) {
            let mut cur = Vec::new();
            enumerate(&source, target, 0, &mut Vec::new(), &mut cur, &mut out, true);
        }
        out
    }

    pub fn automorphisms(obj: &LambdaObject) -> Vec<LambdaMorphism> {
        LambdaMorphism::all(obj, obj).into_iter().filter(|m| m.is_automorphism()).collect()
    }
}

/// Objects admitting an injection into `target`.
fn sub_objects(target: &LambdaObject) -> Vec<LambdaObject> {
    let mut out = vec![LambdaObject::point()];
    if target.is_point() {
        return out;
    }
    let mut dims: Vec<usize> = target.dims.clone();
    dims.sort_unstable_by(|a, b| b.cmp(a));
    // all tuples of length ≤ coords dominated by some injective assignment
    let mut seen = std::collections::BTreeSet::new();
    fn rec(
        dims: &[usize],
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        seen: &mut std::collections::BTreeSet<Vec<usize>>,
    ) {
        if !cur.is_empty() {
            seen.insert(cur.clone());
        }
        for (i, &d) in dims.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            for v in 1..=d {
                cur.push(v);
                rec(dims, used, cur, seen);
                cur.pop();
            }
            used[i] = false;
        }
    }
    rec(&dims, &mut vec![false; dims.len()], &mut Vec::new(), &mut seen);
    out.extend(seen.into_iter().map(|d| LambdaObject { dims: d }));
    out
}

fn enumerate(
    source: &LambdaObject,
    target: &LambdaObject,
    l: usize,
    used: &mut Vec<usize>,
    cur: &mut Vec<Coord>,
    out: &mut Vec<LambdaMorphism>,
    injective_only: bool,
) {
    if l == target.coords() {
        if !injective_only || source.is_point() || used.len() == source.coords() {
            out.push(LambdaMorphism { source: source.clone(), target: target.clone(), coords: cur.clone() });
        }
        return;
    }
    let nl = target.dims[l];
    for v in 0..=nl {
        cur.push(Coord::Const(v));
        enumerate(source, target, l + 1, used, cur, out, injective_only);
        cur.pop();
    }
    if source.is_point() {
        return;
    }
    for src in 0..source.coords() {
        if used.contains(&src) || source.dims[src] > nl {
            continue;
        }
        used.push(src);
        for alpha in injections(source.dims[src] + 1, nl + 1) {
            cur.push(Coord::From { src, alpha });
            enumerate(source, target, l + 1, used, cur, out, injective_only);
            cur.pop();
        }
        used.pop();
    }
}

/// Injective sequences of length `k` with values below `n`.
fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(k, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(k, n, &mut Vec::new(), &mut out);
    out
}

impl fmt::Display for LambdaMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|c| match c {
                Coord::Const(v) => format!("c{v}"),
                Coord::From { src, alpha } => {
                    let a: Vec<String> = alpha.iter().map(|x| x.to_string()).collect();
                    format!("s{src}={}", a.join("."))
                }
            })
            .collect();
        write!(f, "{}->{}|{}", self.source, self.target, parts.join(","))
    }
}

impl std::str::FromStr for LambdaMorphism {
    type Err = Error;
    fn from_str(s: &str) -> Result<LambdaMorphism> {
        let bad = || Error::InvalidMorphism(format!("bad morphism `{s}`"));
        let (objs, body) = s.trim().split_once('|').ok_or_else(bad)?;
        let (src, tgt) = objs.split_once("->").ok_or_else(bad)?;
        let source: LambdaObject = src.parse()?;
        let target: LambdaObject = tgt.parse()?;
        let coords = body
            .split(',')
            .map(|p| {
                let p = p.trim();
                if let Some(v) = p.strip_prefix('c') {
                    v.parse().map(Coord::Const).map_err(|_| bad())
                } else if let Some(rest) = p.strip_prefix('s') {
                    let (sv, av) = rest.split_once('=').ok_or_else(bad)?;
                    let src = sv.parse().map_err(|_| bad())?;
                    let alpha = av.split('.').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                    Ok(Coord::From { src, alpha })
                } else {
                    Err(bad())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        LambdaMorphism::new(source, target, coords)
    }
}
