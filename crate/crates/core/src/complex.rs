//! Finite polysimplicial sets stored by nondegenerate cells and the
//! Eilenberg–Zilber normal forms of their faces.

use crate::error::{Error, Result};
use crate::lambda::{Coord, LambdaMorphism, LambdaObject};
use crate::poset::FinitePoset;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// The element `cell · surjection`; `surjection` is always standard.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub surjection: LambdaMorphism,
    pub cell: usize,
}

impl Element {
    pub fn nondegenerate(cell: usize, ty: &LambdaObject) -> Element {
        Element { surjection: LambdaMorphism::identity(ty), cell }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.surjection.is_identity()
    }

    pub fn ty(&self) -> &LambdaObject {
        self.surjection.source()
    }
}

#[derive(Clone, Debug)]
pub struct PolysimplicialSet {
    names: Vec<String>,
    types: Vec<LambdaObject>,
    /// `(x, ι) ↦ x·ι` for every non-identity injection `ι` into the type of `x`.
    faces: BTreeMap<(usize, LambdaMorphism), Element>,
}

/// Memoised injections into each object.
#[derive(Default)]
struct Injections(HashMap<LambdaObject, Vec<LambdaMorphism>>);

impl Injections {
    fn get(&mut self, obj: &LambdaObject) -> &[LambdaMorphism] {
        self.0.entry(obj.clone()).or_insert_with(|| LambdaMorphism::injections_into(obj))
    }
}

/// Subsets `K` of the coordinates of `n`, increasing, with `n|K == target`.
fn kept_sets(n: &LambdaObject, target: &LambdaObject) -> Vec<Vec<usize>> {
    let coords = n.live_coords();
    let mut out = Vec::new();
    let k = coords.len();
    for mask in 0u32..(1u32 << k) {
        let kept: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        if &n.restrict(&kept) == target {
            out.push(kept);
        }
    }
    out.sort();
    out
}

impl PolysimplicialSet {
    /// Validates closure and coherence of the face table.
    pub fn from_parts(
        names: Vec<String>,
        types: Vec<LambdaObject>,
        faces: BTreeMap<(usize, LambdaMorphism), Element>,
    ) -> Result<PolysimplicialSet> {
        if names.len() != types.len() {
            return Err(Error::InvalidComplex("names and types differ in length".into()));
        }
        let mut sorted = names.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidComplex(format!("duplicate cell name `{}`", w[0])));
        }
        let c = PolysimplicialSet { names, types, faces };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let mut inj = Injections::default();
        let mut expected = 0usize;
        for x in 0..self.len() {
            let ty = self.types[x].clone();
            for iota in inj.get(&ty).to_vec() {
                if iota.is_identity() {
                    continue;
                }
                expected += 1;
                let e = self.faces.get(&(x, iota.clone())).ok_or_else(|| {
                    Error::InvalidComplex(format!("missing face {} of `{}`", iota, self.names[x]))
                })?;
                if e.cell >= self.len()
                    || !e.surjection.is_standard_surjection()
                    || e.surjection.source() != iota.source()
                    || e.surjection.target() != &self.types[e.cell]
                {
                    return Err(Error::InvalidComplex(format!(
                        "face {} of `{}` is not in normal form",
                        iota, self.names[x]
                    )));
                }
                if iota.is_automorphism() && !e.is_nondegenerate() {
                    return Err(Error::InvalidComplex(format!(
                        "automorphism {} sends `{}` to a degenerate element",
                        iota, self.names[x]
                    )));
                }
            }
        }
        if expected != self.faces.len() {
            return Err(Error::InvalidComplex("face table has entries for non-injective or identity maps".into()));
        }
        for x in 0..self.len() {
            let ty = self.types[x].clone();
            for iota in inj.get(&ty).to_vec() {
                let first = self.act(x, &iota);
                for iota2 in inj.get(iota.source()).to_vec() {
                    let direct = self.act(x, &iota.after(&iota2)?);
                    let stepwise = self.act_element(&first, &iota2);
                    if direct != stepwise {
                        return Err(Error::InvalidComplex(format!(
                            "incoherent faces of `{}`: ({})·({}) differs from the composite",
                            self.names[x], iota, iota2
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, cell: usize) -> &str {
        &self.names[cell]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cell_type(&self, cell: usize) -> &LambdaObject {
        &self.types[cell]
    }

    pub fn cell_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn faces(&self) -> &BTreeMap<(usize, LambdaMorphism), Element> {
        &self.faces
    }

    pub fn dimension(&self) -> usize {
        self.types.iter().map(|t| t.dimension()).max().unwrap_or(0)
    }

    /// `x · m` in normal form.
    pub fn act(&self, cell: usize, m: &LambdaMorphism) -> Element {
        let (epi, mono) = m.factor();
        if mono.is_identity() {
            return Element { surjection: epi, cell };
        }
        let e = &self.faces[&(cell, mono)];
        Element { surjection: e.surjection.after(&epi).expect("composable"), cell: e.cell }
    }

    pub fn act_element(&self, e: &Element, m: &LambdaMorphism) -> Element {
        self.act(e.cell, &e.surjection.after(m).expect("composable"))
    }

    /// Every element of type `n`, each in normal form.
    pub fn elements_of_type(&self, n: &LambdaObject) -> Vec<Element> {
        let mut out = Vec::new();
        for y in 0..self.len() {
            for kept in kept_sets(n, &self.types[y]) {
                out.push(Element { surjection: LambdaMorphism::standard_surjection(n, &kept), cell: y });
            }
        }
        out
    }

    /// Class of each cell under isomorphisms of Λ; types in one class may
    /// differ by a permutation of coordinates.
    pub fn orbit_of(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut class = vec![usize::MAX; self.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.len() {
            if class[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = vec![x];
            class[x] = id;
            for sigma in isomorphisms_into(&self.types[x]) {
                let y = self.act(x, &sigma).cell;
                if class[y] == usize::MAX {
                    class[y] = id;
                    members.push(y);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        (class, classes)
    }

    /// The poset `O(C)` of nondegenerate cells modulo automorphisms.
    pub fn cell_poset(&self) -> CellPoset {
        let (class_of, classes) = self.orbit_of();
        let k = classes.len();
        let mut leq = vec![vec![false; k]; k];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for ((x, _), e) in &self.faces {
            if e.is_nondegenerate() {
                leq[class_of[e.cell]][class_of[*x]] = true;
            }
        }
        let labels = classes
            .iter()
            .map(|m| format!("{} {}", self.names[m[0]], self.types[m[0]]))
            .collect();
        CellPoset { poset: FinitePoset::new(labels, leq), class_of, classes }
    }

    /// Whether every non-identity automorphism moves every cell.
    pub fn is_interiorly_free(&self) -> bool {
        self.interior_fixed_point().is_none()
    }

    /// A cell fixed by a non-identity automorphism of its type.
    pub fn interior_fixed_point(&self) -> Option<(usize, LambdaMorphism)> {
        for x in 0..self.len() {
            for sigma in LambdaMorphism::automorphisms(&self.types[x]) {
                if !sigma.is_identity() && self.act(x, &sigma).cell == x {
                    return Some((x, sigma));
                }
            }
        }
        None
    }

    /// Alternating count of open cells of the realization; meaningful for
    /// interiorly free sets.
    pub fn euler_characteristic(&self) -> i64 {
        let (_, classes) = self.orbit_of();
        classes
            .iter()
            .map(|m| if self.types[m[0]].dimension().is_multiple_of(2) { 1 } else { -1 })
            .sum()
    }

    pub fn count_of_dimension(&self, d: usize) -> usize {
        let (_, classes) = self.orbit_of();
        classes.iter().filter(|m| self.types[m[0]].dimension() == d).count()
    }

    // ---- constructions ----

    /// The representable `Λ[n]`: cells are the injections into `[n]`.
    pub fn representable(n: &LambdaObject) -> PolysimplicialSet {
        let mut cells = LambdaMorphism::injections_into(n);
        cells.sort_by(|a, b| {
            a.source().dimension().cmp(&b.source().dimension()).then_with(|| a.cmp(b))
        });
        let index: HashMap<LambdaMorphism, usize> = cells.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut faces = BTreeMap::new();
        let mut inj = Injections::default();
        for (x, cx) in cells.iter().enumerate() {
            for iota in inj.get(cx.source()).to_vec() {
                if iota.is_identity() {
                    continue;
                }
                let comp = cx.after(&iota).expect("composable");
                faces.insert((x, iota.clone()), Element::nondegenerate(index[&comp], iota.source()));
            }
        }
        let names = cells.iter().map(injection_name).collect();
        let types = cells.iter().map(|c| c.source().clone()).collect();
        PolysimplicialSet { names, types, faces }
    }

    /// Cell of the representable corresponding to the given injection.
    pub fn representable_cell(n: &LambdaObject, iota: &LambdaMorphism) -> Option<usize> {
        let mut cells = LambdaMorphism::injections_into(n);
        cells.sort_by(|a, b| {
            a.source().dimension().cmp(&b.source().dimension()).then_with(|| a.cmp(b))
        });
        cells.iter().position(|c| c == iota)
    }

    pub fn point() -> PolysimplicialSet {
        PolysimplicialSet::representable(&LambdaObject::point())
    }

    pub fn empty() -> PolysimplicialSet {
        PolysimplicialSet { names: Vec::new(), types: Vec::new(), faces: BTreeMap::new() }
    }

    /// Renames cells; names must stay distinct.
    pub fn with_names(mut self, names: Vec<String>) -> Result<PolysimplicialSet> {
        if names.len() != self.len() {
            return Err(Error::InvalidComplex("wrong number of names".into()));
        }
        let mut s = names.clone();
        s.sort();
        s.dedup();
        if s.len() != names.len() {
            return Err(Error::InvalidComplex("duplicate cell names".into()));
        }
        self.names = names;
        Ok(self)
    }

    /// Disjoint union; cell names get the given prefixes.
    pub fn disjoint_union(parts: &[(&str, &PolysimplicialSet)]) -> (PolysimplicialSet, Vec<usize>) {
        let mut names = Vec::new();
        let mut types = Vec::new();
        let mut faces = BTreeMap::new();
        let mut offsets = Vec::new();
        for (prefix, c) in parts {
            let off = names.len();
            offsets.push(off);
            for i in 0..c.len() {
                names.push(if prefix.is_empty() { c.names[i].clone() } else { format!("{prefix}.{}", c.names[i]) });
                types.push(c.types[i].clone());
            }
            for ((x, iota), e) in &c.faces {
                faces.insert((x + off, iota.clone()), Element { surjection: e.surjection.clone(), cell: e.cell + off });
            }
        }
        (PolysimplicialSet { names, types, faces }, offsets)
    }

    /// Inclusion of the `k`-th summand of a disjoint union.
    pub fn summand_inclusion(
        union: &PolysimplicialSet,
        part: &PolysimplicialSet,
        offset: usize,
    ) -> PolyMorphism {
        let images = (0..part.len()).map(|i| Element::nondegenerate(i + offset, &part.types[i])).collect();
        PolyMorphism { source: part.clone(), target: union.clone(), images }
    }

    /// `C ⊓ C'`: cells are `(A, y, y')` where `A` lists the coordinates
    /// carried by `y`.
    pub fn box_product(a: &PolysimplicialSet, b: &PolysimplicialSet) -> PolysimplicialSet {
        type Key = (Vec<bool>, usize, usize);
        let mut keys: Vec<(LambdaObject, Key)> = Vec::new();
        for y in 0..a.len() {
            for z in 0..b.len() {
                let na = a.types[y].live_coords().len();
                let nb = b.types[z].live_coords().len();
                for pattern in shuffles(na, nb) {
                    let ty = interleave(&a.types[y], &b.types[z], &pattern);
                    keys.push((ty, (pattern, y, z)));
                }
            }
        }
        keys.sort_by(|p, q| p.0.dimension().cmp(&q.0.dimension()).then_with(|| p.1.cmp(&q.1)));
        let index: HashMap<Key, usize> = keys.iter().enumerate().map(|(i, (_, k))| (k.clone(), i)).collect();
        let mut faces = BTreeMap::new();
        let mut inj = Injections::default();
        for (x, (ty, (pattern, y, z))) in keys.iter().enumerate() {
            let left: Vec<usize> = (0..pattern.len()).filter(|&i| pattern[i]).collect();
            let right: Vec<usize> = (0..pattern.len()).filter(|&i| !pattern[i]).collect();
            let sl = LambdaMorphism::standard_surjection(ty, &left);
            let sr = LambdaMorphism::standard_surjection(ty, &right);
            for iota in inj.get(ty).to_vec() {
                if iota.is_identity() {
                    continue;
                }
                let u = a.act(*y, &sl.after(&iota).expect("composable"));
                let v = b.act(*z, &sr.after(&iota).expect("composable"));
                let ku = u.surjection.support();
                let kv = v.surjection.support();
                let mut support: Vec<usize> = ku.iter().chain(kv.iter()).copied().collect();
                support.sort_unstable();
                let new_pattern: Vec<bool> = support.iter().map(|c| ku.contains(c)).collect();
                let s = LambdaMorphism::standard_surjection(iota.source(), &support);
                let cell = index[&(new_pattern, u.cell, v.cell)];
                faces.insert((x, iota.clone()), Element { surjection: s, cell });
            }
        }
        let names = keys
            .iter()
            .map(|(_, (pattern, y, z))| {
                let tag: String = pattern.iter().map(|&l| if l { 'l' } else { 'r' }).collect();
                let standard = pattern.windows(2).all(|w| w[0] || !w[1]);
                if standard {
                    format!("{}*{}", a.names[*y], b.names[*z])
                } else {
                    format!("{}*{}#{}", a.names[*y], b.names[*z], tag)
                }
            })
            .collect();
        let types = keys.into_iter().map(|(t, _)| t).collect();
        PolysimplicialSet { names, types, faces }
    }

    /// Coequalizer of two morphisms into `self`, with the projection.
    ///
    /// Identifications are generated on nondegenerate cells; two elements
    /// with different degeneracy parts cannot be identified.
    pub fn coequalizer(f: &PolyMorphism, g: &PolyMorphism) -> Result<(PolysimplicialSet, PolyMorphism)> {
        if f.source.len() != g.source.len() || f.target.len() != g.target.len() {
            return Err(Error::InvalidComplex("coequalizer of maps with different endpoints".into()));
        }
        let c = &f.target;
        let mut uf = UnionFind::new(c.len());
        let mut pending: Vec<(Element, Element)> =
            f.images.iter().cloned().zip(g.images.iter().cloned()).collect();
        let mut inj = Injections::default();
        while let Some((u, v)) = pending.pop() {
            if u.surjection != v.surjection {
                return Err(Error::Unsupported(format!(
                    "identification of `{}` with `{}` through different degeneracies",
                    c.names[u.cell], c.names[v.cell]
                )));
            }
            if c.types[u.cell] != c.types[v.cell] {
                return Err(Error::InvalidComplex("identified cells have different types".into()));
            }
            let (ru, rv) = (uf.find(u.cell), uf.find(v.cell));
            if ru == rv {
                continue;
            }
            uf.union(ru, rv);
            for iota in inj.get(&c.types[u.cell]).to_vec() {
                if iota.is_identity() {
                    continue;
                }
                pending.push((c.faces[&(u.cell, iota.clone())].clone(), c.faces[&(v.cell, iota.clone())].clone()));
            }
        }
        let mut rep_index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut names = Vec::new();
        let mut types = Vec::new();
        for x in 0..c.len() {
            let r = uf.find(x);
            if let std::collections::btree_map::Entry::Vacant(e) = rep_index.entry(r) {
                e.insert(names.len());
                names.push(c.names[x].clone());
                types.push(c.types[x].clone());
            }
        }
        let mut faces = BTreeMap::new();
        let mut done = vec![false; names.len()];
        for x in 0..c.len() {
            let q = rep_index[&uf.find(x)];
            if done[q] {
                continue;
            }
            done[q] = true;
            for iota in inj.get(&c.types[x]).to_vec() {
                if iota.is_identity() {
                    continue;
                }
                let e = &c.faces[&(x, iota.clone())];
                faces.insert((q, iota), Element { surjection: e.surjection.clone(), cell: rep_index[&uf.find(e.cell)] });
            }
        }
        let quotient = PolysimplicialSet { names, types, faces };
        let images = (0..c.len())
            .map(|x| Element::nondegenerate(rep_index[&uf.find(x)], &c.types[x]))
            .collect();
        let projection = PolyMorphism { source: c.clone(), target: quotient.clone(), images };
        Ok((quotient, projection))
    }

    // ---- text form ----

    /// Canonical text: one `cell` line per cell and one `face` line per
    /// table entry.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.len() {
            let _ = writeln!(s, "cell {} {}", self.names[i], self.types[i]);
        }
        for ((x, iota), e) in &self.faces {
            let _ = writeln!(s, "face {} {} = {} {}", self.names[*x], iota, e.surjection, self.names[e.cell]);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PolysimplicialSet> {
        let mut names = Vec::new();
        let mut types = Vec::new();
        let mut raw_faces = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::InvalidComplex(format!("line {}: cannot parse `{line}`", lineno + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.first() {
                Some(&"cell") if parts.len() == 3 => {
                    names.push(parts[1].to_string());
                    types.push(parts[2].parse::<LambdaObject>()?);
                }
                Some(&"face") if parts.len() == 6 && parts[3] == "=" => {
                    raw_faces.push((parts[1].to_string(), parts[2].parse::<LambdaMorphism>()?, parts[4].parse::<LambdaMorphism>()?, parts[5].to_string()));
                }
                _ => return Err(bad()),
            }
        }
        let lookup = |n: &str| {
            names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::InvalidComplex(format!("unknown cell `{n}`")))
        };
        let mut faces = BTreeMap::new();
        for (x, iota, s, y) in raw_faces {
            faces.insert((lookup(&x)?, iota), Element { surjection: s, cell: lookup(&y)? });
        }
        PolysimplicialSet::from_parts(names, types, faces)
    }

    /// Graphviz rendering of the cell poset.
    pub fn to_dot(&self, name: &str) -> String {
        self.cell_poset().poset.to_dot(name)
    }
}

/// Isomorphisms of Λ with the given target, from every possible source.
pub fn isomorphisms_into(target: &LambdaObject) -> Vec<LambdaMorphism> {
    LambdaMorphism::injections_into(target).into_iter().filter(|m| m.is_surjective()).collect()
}

/// `s` followed by the image of each coordinate, e.g. `s10` for the flipped
/// edge of `[(1)]` and `s01x1` for an edge of the square; a `~` suffix lists
/// the source coordinates when they are permuted.
fn injection_name(iota: &LambdaMorphism) -> String {
    if iota.target().is_point() {
        return "pt".into();
    }
    let wide = iota.target().dims().iter().any(|&d| d > 9);
    let parts: Vec<String> = iota
        .coords()
        .iter()
        .map(|c| {
            let values: Vec<usize> = match c {
                Coord::Const(v) => vec![*v],
                Coord::From { alpha, .. } => alpha.clone(),
            };
            let digits: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            digits.join(if wide { "." } else { "" })
        })
        .collect();
    let sources: Vec<usize> = iota
        .coords()
        .iter()
        .filter_map(|c| match c {
            Coord::From { src, .. } => Some(*src),
            Coord::Const(_) => None,
        })
        .collect();
    if sources.windows(2).all(|w| w[0] < w[1]) {
        format!("s{}", parts.join("x"))
    } else {
        let order: Vec<String> = sources.iter().map(|v| v.to_string()).collect();
        format!("s{}~{}", parts.join("x"), order.join(if wide { "." } else { "" }))
    }
}

fn shuffles(na: usize, nb: usize) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    fn rec(na: usize, nb: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if na == 0 && nb == 0 {
            out.push(cur.clone());
            return;
        }
        if na > 0 {
            cur.push(true);
            rec(na - 1, nb, cur, out);
            cur.pop();
        }
        if nb > 0 {
            cur.push(false);
            rec(na, nb - 1, cur, out);
            cur.pop();
        }
    }
    rec(na, nb, &mut Vec::new(), &mut out);
    out
}

fn interleave(a: &LambdaObject, b: &LambdaObject, pattern: &[bool]) -> LambdaObject {
    if pattern.is_empty() {
        return LambdaObject::point();
    }
    let (mut i, mut j) = (0, 0);
    let dims = pattern
        .iter()
        .map(|&l| {
            if l {
                i += 1;
                a.dims()[i - 1]
            } else {
                j += 1;
                b.dims()[j - 1]
            }
        })
        .collect();
    LambdaObject::new(dims).expect("nonzero factors")
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    /// Keeps the smaller root so representatives are deterministic.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellPoset {
    pub poset: FinitePoset,
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

/// Morphism of polysimplicial sets, given on nondegenerate cells.
#[derive(Clone, Debug)]
pub struct PolyMorphism {
    pub source: PolysimplicialSet,
    pub target: PolysimplicialSet,
    pub images: Vec<Element>,
}

impl PolyMorphism {
    pub fn new(source: PolysimplicialSet, target: PolysimplicialSet, images: Vec<Element>) -> Result<PolyMorphism> {
        let m = PolyMorphism { source, target, images };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.images.len() != self.source.len() {
            return Err(Error::InvalidComplex("one image per cell is required".into()));
        }
        for (x, e) in self.images.iter().enumerate() {
            if e.cell >= self.target.len()
                || e.ty() != self.source.cell_type(x)
                || !e.surjection.is_standard_surjection()
                || e.surjection.target() != self.target.cell_type(e.cell)
            {
                return Err(Error::InvalidComplex(format!(
                    "image of `{}` has the wrong type or is not normalised",
                    self.source.name(x)
                )));
            }
        }
        for ((x, iota), face) in self.source.faces() {
            let lhs = self.apply(face);
            let rhs = self.target.act_element(&self.images[*x], iota);
            if lhs != rhs {
                return Err(Error::InvalidComplex(format!(
                    "map does not commute with the face {} of `{}`",
                    iota,
                    self.source.name(*x)
                )));
            }
        }
        Ok(())
    }

    pub fn identity(c: &PolysimplicialSet) -> PolyMorphism {
        let images = (0..c.len()).map(|i| Element::nondegenerate(i, c.cell_type(i))).collect();
        PolyMorphism { source: c.clone(), target: c.clone(), images }
    }

    /// The map `Λ[n] → C` classifying an element of type `n`.
    pub fn from_yoneda(n: &LambdaObject, target: &PolysimplicialSet, u: &Element) -> Result<PolyMorphism> {
        if u.ty() != n {
            return Err(Error::InvalidComplex("classifying element has the wrong type".into()));
        }
        let mut cells = LambdaMorphism::injections_into(n);
        cells.sort_by(|a, b| a.source().dimension().cmp(&b.source().dimension()).then_with(|| a.cmp(b)));
        let source = PolysimplicialSet::representable(n);
        let images = cells.iter().map(|iota| target.act_element(u, iota)).collect();
        PolyMorphism::new(source, target.clone(), images)
    }

    /// Image of an arbitrary element.
    pub fn apply(&self, e: &Element) -> Element {
        self.target.act_element(&self.images[e.cell], &e.surjection)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PolyMorphism) -> PolyMorphism {
        let images = first.images.iter().map(|e| self.apply(e)).collect();
        PolyMorphism { source: first.source.clone(), target: self.target.clone(), images }
    }

    pub fn same_as(&self, other: &PolyMorphism) -> bool {
        self.images == other.images
    }

    pub fn maps_nondegenerate_to_nondegenerate(&self) -> bool {
        self.images.iter().all(|e| e.is_nondegenerate())
    }

    /// `O(f)`: class of each source cell class in the target.
    pub fn o_map(&self) -> Vec<usize> {
        let sp = self.source.cell_poset();
        let tp = self.target.cell_poset();
        sp.classes.iter().map(|m| tp.class_of[self.images[m[0]].cell]).collect()
    }

    /// Bijectivity on nondegenerate cells with nondegenerate images.
    pub fn is_bijective_on_cells(&self) -> bool {
        if !self.maps_nondegenerate_to_nondegenerate() || self.source.len() != self.target.len() {
            return false;
        }
        let mut seen = vec![false; self.target.len()];
        self.images.iter().all(|e| !std::mem::replace(&mut seen[e.cell], true))
    }

    /// Applies the O-poset criterion when the target is interiorly free and
    /// falls back to the cell bijection check otherwise.
    pub fn is_iso(&self) -> bool {
        if !self.maps_nondegenerate_to_nondegenerate() {
            return false;
        }
        if self.target.is_interiorly_free() {
            let sp = self.source.cell_poset();
            let tp = self.target.cell_poset();
            let f = self.o_map();
            return sp.poset.is_isomorphism(&tp.poset, &f);
        }
        self.is_bijective_on_cells()
    }

    /// Every morphism `source → target`, up to `limit` of them.
    pub fn enumerate(source: &PolysimplicialSet, target: &PolysimplicialSet, limit: usize) -> Vec<PolyMorphism> {
        let (_, classes) = source.orbit_of();
        let mut reps: Vec<usize> = classes.iter().map(|m| m[0]).collect();
        reps.sort_by_key(|&x| (source.cell_type(x).dimension(), x));
        let mut assignment: Vec<Option<Element>> = vec![None; source.len()];
        let mut out = Vec::new();
        enumerate_rec(source, target, &reps, 0, &mut assignment, &mut out, limit);
        out
    }
}

fn enumerate_rec(
    source: &PolysimplicialSet,
    target: &PolysimplicialSet,
    reps: &[usize],
    k: usize,
    assignment: &mut Vec<Option<Element>>,
    out: &mut Vec<PolyMorphism>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if k == reps.len() {
        let images: Vec<Element> = assignment.iter().map(|e| e.clone().expect("assigned")).collect();
        if let Ok(m) = PolyMorphism::new(source.clone(), target.clone(), images) {
            out.push(m);
        }
        return;
    }
    let x = reps[k];
    let ty = source.cell_type(x).clone();
    for cand in target.elements_of_type(&ty) {
        let saved = assignment.clone();
        let mut ok = true;
        for sigma in isomorphisms_into(&ty) {
            let y = source.act(x, &sigma).cell;
            let img = target.act_element(&cand, &sigma);
            match &assignment[y] {
                Some(prev) if *prev != img => {
                    ok = false;
                    break;
                }
                _ => assignment[y] = Some(img),
            }
        }
        if ok {
            // faces of lower dimension are already assigned
            ok = LambdaMorphism::injections_into(&ty).iter().filter(|i| !i.is_identity()).all(|iota| {
                let face = &source.faces()[&(x, iota.clone())];
                match &assignment[face.cell] {
                    Some(fimg) => target.act_element(fimg, &face.surjection) == target.act_element(&cand, iota),
                    None => true,
                }
            });
        }
        if ok {
            enumerate_rec(source, target, reps, k + 1, assignment, out, limit);
        }
        *assignment = saved;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(d: &[usize]) -> LambdaObject {
        LambdaObject::new(d.to_vec()).unwrap()
    }

    #[test]
    fn representable_posets() {
        assert_eq!(PolysimplicialSet::representable(&obj(&[1])).cell_poset().poset.len(), 3);
        assert_eq!(PolysimplicialSet::point().cell_poset().poset.len(), 1);
        let sq = PolysimplicialSet::representable(&obj(&[1, 1]));
        let p = sq.cell_poset();
        assert_eq!(p.poset.len(), 9);
        assert!(p.poset.is_valid());
        assert_eq!(sq.count_of_dimension(0), 4);
        assert_eq!(sq.count_of_dimension(1), 4);
        assert_eq!(sq.count_of_dimension(2), 1);
        assert!(sq.is_interiorly_free());
        assert_eq!(sq.euler_characteristic(), 1);
    }

    #[test]
    fn text_round_trip() {
        let sq = PolysimplicialSet::representable(&obj(&[1, 1]));
        let again = PolysimplicialSet::from_text(&sq.to_text()).unwrap();
        assert_eq!(again.to_text(), sq.to_text());
    }

    #[test]
    fn box_of_edges_is_square() {
        let e = PolysimplicialSet::representable(&obj(&[1]));
        let p = PolysimplicialSet::box_product(&e, &e);
        let sq = PolysimplicialSet::representable(&obj(&[1, 1]));
        assert_eq!(p.len(), sq.len());
        assert!(p.cell_poset().poset.isomorphism_to(&sq.cell_poset().poset).is_some());
        assert!(PolysimplicialSet::from_text(&p.to_text()).is_ok());
        let unit = PolysimplicialSet::box_product(&e, &PolysimplicialSet::point());
        assert_eq!(unit.len(), e.len());
    }

    #[test]
    fn loop_by_coequalizer() {
        let e = PolysimplicialSet::representable(&obj(&[1]));
        let pt = PolysimplicialSet::point();
        let verts = e.elements_of_type(&LambdaObject::point());
        let a = PolyMorphism::from_yoneda(&LambdaObject::point(), &e, &verts[0]).unwrap();
        let b = PolyMorphism::from_yoneda(&LambdaObject::point(), &e, &verts[1]).unwrap();
        let (lp, proj) = PolysimplicialSet::coequalizer(&a, &b).unwrap();
        assert_eq!(lp.len(), 3);
        assert_eq!(lp.cell_poset().poset.len(), 2);
        assert!(lp.is_interiorly_free());
        assert_eq!(lp.euler_characteristic(), 0);
        assert!(proj.after(&a).same_as(&proj.after(&b)));
        let collapse = PolyMorphism::enumerate(&lp, &pt, 10);
        assert_eq!(collapse.len(), 1);
        assert!(!collapse[0].is_iso());
        assert!(PolyMorphism::identity(&lp).is_iso());
    }
}
