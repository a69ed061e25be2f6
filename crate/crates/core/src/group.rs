//! Finitely presented groups, coset enumeration and finite permutation groups.

use crate::error::{Error, Result};
use crate::lattice;
use sha2::{Digest, Sha256};
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

/// A word over generators `0..n`; letter `k + 1` is generator `k` and
/// `-(k + 1)` its inverse.
pub type Word = Vec<i32>;

pub fn letter(generator: usize, inverse: bool) -> i32 {
    let l = generator as i32 + 1;
    if inverse {
        -l
    } else {
        l
    }
}

pub fn generator_of(l: i32) -> usize {
    (l.unsigned_abs() - 1) as usize
}

pub fn free_reduce(w: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|l| -l).collect()
}

pub fn concat(parts: &[&[i32]]) -> Word {
    let all: Word = parts.iter().flat_map(|p| p.iter().copied()).collect();
    free_reduce(&all)
}

/// Free and cyclic reduction.
pub fn cyclic_reduce(w: &[i32]) -> Word {
    let mut w = free_reduce(w);
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        w.remove(0);
        w.pop();
    }
    w
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

/// `Z^free_rank × ⊕ Z/torsion_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl std::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

impl GroupPresentation {
    /// Relators are cyclically reduced; trivial ones are dropped.
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<GroupPresentation> {
        let n = generators.len();
        let mut rels = Vec::new();
        for r in relators {
            if r.iter().any(|&l| l == 0 || generator_of(l) >= n) {
                return Err(Error::Group(format!("relator {r:?} uses an unknown generator")));
            }
            let r = cyclic_reduce(&r);
            if !r.is_empty() && !rels.contains(&r) {
                rels.push(r);
            }
        }
        Ok(GroupPresentation { generators, relators: rels })
    }

    pub fn trivial() -> GroupPresentation {
        GroupPresentation { generators: Vec::new(), relators: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Free of the returned rank when no relators survive.
    pub fn free_rank(&self) -> Option<usize> {
        self.relators.is_empty().then_some(self.generators.len())
    }

    pub fn exponent_sums(&self, w: &[i32]) -> Vec<i64> {
        let mut v = vec![0i64; self.generators.len()];
        for &l in w {
            v[generator_of(l)] += l.signum() as i64;
        }
        v
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        let n = self.generators.len();
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| self.exponent_sums(r)).collect();
        let inv = lattice::smith_invariants(&rows, n);
        AbelianInvariants { free_rank: n - inv.len(), torsion: inv.into_iter().filter(|&d| d > 1).collect() }
    }

    pub fn word_text(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let name = &self.generators[generator_of(w[i])];
            let e = (j - i) as i64 * w[i].signum() as i64;
            parts.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
            i = j;
        }
        parts.join(" ")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "generators: {}", self.generators.join(" "));
        for r in &self.relators {
            let _ = writeln!(s, "relator: {}", self.word_text(r));
        }
        s
    }

    pub fn hash(&self) -> String {
        Sha256::digest(self.to_text().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Index of the subgroup generated by `subgroup`, by coset enumeration
    /// with at most `limit` cosets defined.
    pub fn coset_index(&self, subgroup: &[Word], limit: usize) -> Result<usize> {
        CosetTable::enumerate(self, subgroup, limit).map(|t| t.index())
    }
}

/// Holt–Linton–Todd coset enumeration with coincidence handling.
struct CosetTable {
    cols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    queue: Vec<usize>,
    limit: usize,
}

const UNDEF: usize = usize::MAX;

impl CosetTable {
    fn col(l: i32) -> usize {
        let g = generator_of(l);
        if l > 0 {
            2 * g
        } else {
            2 * g + 1
        }
    }

    fn inv_col(c: usize) -> usize {
        c ^ 1
    }

    fn enumerate(p: &GroupPresentation, subgroup: &[Word], limit: usize) -> Result<CosetTable> {
        let cols = 2 * p.generators.len();
        let mut t = CosetTable { cols, table: vec![vec![UNDEF; cols]], parent: vec![0], queue: Vec::new(), limit };
        for w in subgroup {
            let cols: Vec<usize> = w.iter().map(|&l| Self::col(l)).collect();
            t.scan_and_fill(0, &cols)?;
        }
        let rels: Vec<Vec<usize>> = p.relators.iter().map(|r| r.iter().map(|&l| Self::col(l)).collect()).collect();
        let mut c = 0;
        while c < t.table.len() {
            if t.parent[c] == c {
                for r in &rels {
                    t.scan_and_fill(c, r)?;
                    if t.parent[c] != c {
                        break;
                    }
                }
                if t.parent[c] == c {
                    for x in 0..cols {
                        if t.table[c][x] == UNDEF {
                            t.define(c, x)?;
                        }
                    }
                }
            }
            c += 1;
        }
        Ok(t)
    }

    fn index(&self) -> usize {
        (0..self.parent.len()).filter(|&c| self.parent[c] == c).count()
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.table.len() >= self.limit {
            return Err(Error::ResourceExhausted(format!("coset enumeration exceeded {} cosets", self.limit)));
        }
        let d = self.table.len();
        self.table.push(vec![UNDEF; self.cols]);
        self.parent.push(d);
        self.table[c][x] = d;
        self.table[d][Self::inv_col(x)] = c;
        Ok(())
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.table[f][w[i]] != UNDEF {
                f = self.table[f][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.table[b][Self::inv_col(w[j as usize])] != UNDEF {
                b = self.table[b][Self::inv_col(w[j as usize])];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i as isize {
                self.table[f][w[i]] = b;
                self.table[b][Self::inv_col(w[i])] = f;
                return Ok(());
            } else {
                self.define(f, w[i])?;
            }
        }
    }

    fn rep(&mut self, k: usize) -> usize {
        let mut r = k;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = k;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, k: usize, l: usize) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k == l {
            return;
        }
        let (m, dead) = if k < l { (k, l) } else { (l, k) };
        self.parent[dead] = m;
        self.queue.push(dead);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let h = self.table[g][x];
                if h == UNDEF {
                    continue;
                }
                let xi = Self::inv_col(x);
                if self.table[h][xi] == g {
                    self.table[h][xi] = UNDEF;
                }
                let f1 = self.rep(g);
                let h1 = self.rep(h);
                if self.table[f1][x] != UNDEF {
                    let t = self.table[f1][x];
                    self.merge(h1, t);
                } else if self.table[h1][xi] != UNDEF {
                    let t = self.table[h1][xi];
                    self.merge(f1, t);
                } else {
                    self.table[f1][x] = h1;
                    self.table[h1][xi] = f1;
                }
            }
        }
    }
}

/// Permutation of `0..degree`; `p[i]` is the image of `i`.
pub type Perm = Vec<u32>;

pub fn perm_identity(degree: usize) -> Perm {
    (0..degree as u32).collect()
}

/// `a ∘ b`: apply `b` first.
pub fn perm_mul(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn perm_inverse(a: &Perm) -> Perm {
    let mut out = vec![0u32; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j as usize] = i as u32;
    }
    out
}

pub fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| (i as usize) < p.len() && !std::mem::replace(&mut seen[i as usize], true))
}

/// Parses a product of cycles such as `(0 1 2)(3 4)`.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Perm> {
    let mut p = perm_identity(degree);
    let t = text.trim();
    if t == "()" || t == "1" || t.is_empty() {
        return Ok(p);
    }
    for cyc in t.split(')') {
        let cyc = cyc.trim();
        if cyc.is_empty() {
            continue;
        }
        let body = cyc.strip_prefix('(').ok_or_else(|| Error::Group(format!("bad cycle text `{text}`")))?;
        let pts: Vec<u32> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u32>().map_err(|_| Error::Group(format!("bad point `{s}`"))))
            .collect::<Result<_>>()?;
        if pts.iter().any(|&x| x as usize >= degree) {
            return Err(Error::Group(format!("cycle `{cyc})` exceeds degree {degree}")));
        }
        let c: Perm = {
            let mut c = perm_identity(degree);
            for k in 0..pts.len() {
                c[pts[k] as usize] = pts[(k + 1) % pts.len()];
            }
            c
        };
        if !is_permutation(&c) {
            return Err(Error::Group(format!("cycle `{cyc})` repeats a point")));
        }
        p = perm_mul(&c, &p);
    }
    Ok(p)
}

pub fn cycles_text(p: &Perm) -> String {
    let mut seen = vec![false; p.len()];
    let mut s = String::new();
    for i in 0..p.len() {
        if seen[i] || p[i] as usize == i {
            continue;
        }
        let mut cyc = vec![i];
        seen[i] = true;
        let mut j = p[i] as usize;
        while j != i {
            seen[j] = true;
            cyc.push(j);
            j = p[j] as usize;
        }
        let parts: Vec<String> = cyc.iter().map(|x| x.to_string()).collect();
        let _ = write!(s, "({})", parts.join(" "));
    }
    if s.is_empty() {
        "()".into()
    } else {
        s
    }
}

/// A finite permutation group with all elements listed in breadth-first
/// order over the generators, each with a shortest word.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub degree: usize,
    pub generators: Vec<Perm>,
    pub elements: Vec<Perm>,
    pub words: Vec<Word>,
    index: HashMap<Perm, usize>,
}

pub const MAX_GROUP_ORDER: usize = 100_000;

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermGroup> {
        for g in &generators {
            if g.len() != degree || !is_permutation(g) {
                return Err(Error::Group(format!("{g:?} is not a permutation of degree {degree}")));
            }
        }
        let id = perm_identity(degree);
        let mut elements = vec![id.clone()];
        let mut words = vec![Vec::new()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(e) = queue.pop_front() {
            for (k, g) in generators.iter().enumerate() {
                let p = perm_mul(&elements[e], g);
                if !index.contains_key(&p) {
                    if elements.len() >= MAX_GROUP_ORDER {
                        return Err(Error::ResourceExhausted(format!("group order exceeds {MAX_GROUP_ORDER}")));
                    }
                    let mut w = words[e].clone();
                    w.push(letter(k, false));
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                    words.push(w);
                }
            }
        }
        Ok(PermGroup { degree, generators, elements, words, index })
    }

    pub fn trivial() -> PermGroup {
        PermGroup::new(1, Vec::new()).expect("trivial group")
    }

    /// `Z/m × Z/m` acting on two disjoint `m`-cycles.
    pub fn cyclic_square(m: usize) -> PermGroup {
        let mut a = perm_identity(2 * m);
        let mut b = perm_identity(2 * m);
        for i in 0..m {
            a[i] = ((i + 1) % m) as u32;
            b[m + i] = (m + (i + 1) % m) as u32;
        }
        PermGroup::new(2 * m, vec![a, b]).expect("valid generators")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&perm_mul(&self.elements[a], &self.elements[b])]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.index[&perm_inverse(&self.elements[a])]
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Evaluates a word in the generators.
    pub fn eval(&self, w: &[i32]) -> usize {
        let mut p = perm_identity(self.degree);
        for &l in w {
            let g = &self.generators[generator_of(l)];
            p = if l > 0 { perm_mul(&p, g) } else { perm_mul(&p, &perm_inverse(g)) };
        }
        self.index[&p]
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|a| self.generators.iter().all(|b| perm_mul(a, b) == perm_mul(b, a)))
    }

    /// Presentation read off the Cayley graph: one relator per non-tree
    /// edge of the breadth-first tree.
    pub fn presentation(&self, names: &[String]) -> GroupPresentation {
        let mut rels = Vec::new();
        for e in 0..self.order() {
            for k in 0..self.generators.len() {
                let t = self.mul(e, self.index[&self.generators[k]]);
                let mut w = self.words[e].clone();
                w.push(letter(k, false));
                w.extend(inverse(&self.words[t]));
                rels.push(w);
            }
        }
        GroupPresentation::new(names.to_vec(), rels).expect("generator indices in range")
    }
}

/// Breadth-first words for the elements of a subgroup given by element
/// indices of `g`, over a greedy generating set.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub generators: Vec<usize>,
    pub elements: Vec<usize>,
    pub words: HashMap<usize, Word>,
}

impl Subgroup {
    pub fn new(g: &PermGroup, members: &[usize]) -> Subgroup {
        let mut generators: Vec<usize> = Vec::new();
        let mut words: HashMap<usize, Word> = HashMap::from([(g.identity(), Vec::new())]);
        let mut elements = vec![g.identity()];
        for &m in members {
            if words.contains_key(&m) {
                continue;
            }
            generators.push(m);
            // rebuild the closure with the enlarged generating set
            words = HashMap::from([(g.identity(), Vec::new())]);
            elements = vec![g.identity()];
            let mut queue = VecDeque::from([g.identity()]);
            while let Some(e) = queue.pop_front() {
                for (k, &s) in generators.iter().enumerate() {
                    let p = g.mul(e, s);
                    if !words.contains_key(&p) {
                        let mut w = words[&e].clone();
                        w.push(letter(k, false));
                        words.insert(p, w);
                        elements.push(p);
                        queue.push_back(p);
                    }
                }
            }
        }
        Subgroup { generators, elements, words }
    }

    pub fn contains(&self, e: usize) -> bool {
        self.words.contains_key(&e)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Cayley-graph relators over the subgroup's own generators.
    pub fn relators(&self, g: &PermGroup) -> Vec<Word> {
        let mut rels = Vec::new();
        for &e in &self.elements {
            for (k, &s) in self.generators.iter().enumerate() {
                let t = g.mul(e, s);
                let mut w = self.words[&e].clone();
                w.push(letter(k, false));
                w.extend(inverse(&self.words[&t]));
                let w = free_reduce(&w);
                if !w.is_empty() {
                    rels.push(w);
                }
            }
        }
        rels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn reduction() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert_eq!(cyclic_reduce(&[-1, 2, 1]), vec![2]);
        assert_eq!(inverse(&[1, -2]), vec![2, -1]);
    }

    #[test]
    fn abelian_invariants() {
        let p = GroupPresentation::new(names(2), vec![vec![1, 1, 1, 1, 1, 1], vec![1, 2, -1, -2]]).unwrap();
        assert_eq!(p.abelianization(), AbelianInvariants { free_rank: 1, torsion: vec![6] });
        assert_eq!(GroupPresentation::new(names(2), vec![]).unwrap().free_rank(), Some(2));
    }

    #[test]
    fn coset_enumeration() {
        // S3 = <a, b | a^2, b^3, (ab)^2>
        let s3 = GroupPresentation::new(names(2), vec![vec![1, 1], vec![2, 2, 2], vec![1, 2, 1, 2]]).unwrap();
        assert_eq!(s3.coset_index(&[], 1000).unwrap(), 6);
        assert_eq!(s3.coset_index(&[vec![1]], 1000).unwrap(), 3);
        // Z x Z/3 relative to <a>
        let zz3 = GroupPresentation::new(names(2), vec![vec![2, 2, 2], vec![1, 2, -1, -2]]).unwrap();
        assert_eq!(zz3.coset_index(&[vec![1]], 1000).unwrap(), 3);
        assert!(zz3.coset_index(&[vec![2]], 200).is_err());
    }

    #[test]
    fn perm_groups() {
        let g = PermGroup::cyclic_square(3);
        assert_eq!(g.order(), 9);
        assert!(g.is_abelian());
        let p = g.presentation(&names(2));
        assert_eq!(p.abelianization(), AbelianInvariants { free_rank: 0, torsion: vec![3, 3] });
        assert_eq!(p.coset_index(&[], 1000).unwrap(), 9);
        let c = parse_cycles("(0 1 2)(3 4)", 5).unwrap();
        assert_eq!(cycles_text(&c), "(0 1 2)(3 4)");
        let s = Subgroup::new(&g, &[g.index_of(&g.generators[0]).unwrap()]);
        assert_eq!(s.order(), 3);
    }
}
