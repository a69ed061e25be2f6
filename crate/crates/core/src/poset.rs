//! Finite posets given by an order matrix.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    pub labels: Vec<String>,
    /// `leq[i][j]` iff `i ≤ j`.
    pub leq: Vec<Vec<bool>>,
}

impl FinitePoset {
    pub fn new(labels: Vec<String>, leq: Vec<Vec<bool>>) -> FinitePoset {
        FinitePoset { labels, leq }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.leq[i][i])
            && (0..n).all(|i| (0..n).all(|j| i == j || !(self.leq[i][j] && self.leq[j][i])))
            && (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(self.leq[i][j] && self.leq[j][k]) || self.leq[i][k])))
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq[j][i]))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.leq[i][j]))
            .collect()
    }

    /// Pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq[i][j] && !(0..n).any(|k| k != i && k != j && self.leq[i][k] && self.leq[k][j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether `f` (indexed by elements of `self`) is order preserving into `other`.
    pub fn is_monotone(&self, other: &FinitePoset, f: &[usize]) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| !self.leq[i][j] || other.leq[f[i]][f[j]]))
    }

    /// Whether `f` is an order isomorphism onto `other`.
    pub fn is_isomorphism(&self, other: &FinitePoset, f: &[usize]) -> bool {
        if self.len() != other.len() || f.len() != self.len() {
            return false;
        }
        let mut seen = vec![false; other.len()];
        for &x in f {
            if x >= other.len() || seen[x] {
                return false;
            }
            seen[x] = true;
        }
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.leq[i][j] == other.leq[f[i]][f[j]]))
    }

    fn invariants(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .map(|i| {
                let down = (0..self.len()).filter(|&j| self.leq[j][i]).count();
                let up = (0..self.len()).filter(|&j| self.leq[i][j]).count();
                (down, up)
            })
            .collect()
    }

    /// An order isomorphism `self → other`, if one exists.
    pub fn isomorphism_to(&self, other: &FinitePoset) -> Option<Vec<usize>> {
        if self.len() != other.len() {
            return None;
        }
        let (a, b) = self.refined_colours_with(other);
        let mut sa = a.clone();
        let mut sb = b.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return None;
        }
        let mut f = vec![usize::MAX; self.len()];
        let mut used = vec![false; other.len()];
        if self.extend(other, &a, &b, 0, &mut f, &mut used) {
            Some(f)
        } else {
            None
        }
    }

    fn extend(
        &self,
        other: &FinitePoset,
        a: &[usize],
        b: &[usize],
        i: usize,
        f: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == self.len() {
            return true;
        }
        for c in 0..other.len() {
            if used[c] || a[i] != b[c] {
                continue;
            }
            let ok = (0..i).all(|k| self.leq[k][i] == other.leq[f[k]][c] && self.leq[i][k] == other.leq[c][f[k]]);
            if ok {
                f[i] = c;
                used[c] = true;
                if self.extend(other, a, b, i + 1, f, used) {
                    return true;
                }
                used[c] = false;
            }
        }
        false
    }

    /// Colour refinement: start from up/down-set sizes and repeatedly split
    /// by the colours strictly below and above. Colours are isomorphism
    /// invariant.
    pub fn refined_colours(&self) -> Vec<usize> {
        let n = self.len();
        let inv = self.invariants();
        let mut colour = rank_signatures(&inv);
        loop {
            let sigs: Vec<(usize, Vec<usize>, Vec<usize>)> = (0..n)
                .map(|i| {
                    let mut below: Vec<usize> = (0..n).filter(|&j| j != i && self.leq[j][i]).map(|j| colour[j]).collect();
                    let mut above: Vec<usize> = (0..n).filter(|&j| j != i && self.leq[i][j]).map(|j| colour[j]).collect();
                    below.sort_unstable();
                    above.sort_unstable();
                    (colour[i], below, above)
                })
                .collect();
            let next = rank_signatures(&sigs);
            let classes = |c: &[usize]| c.iter().collect::<std::collections::BTreeSet<_>>().len();
            if classes(&next) == classes(&colour) {
                return next;
            }
            colour = next;
        }
    }

    /// Isomorphism-invariant digest of the poset: size, refined colour
    /// histogram and the cover counts between colour classes.
    pub fn canonical_hash(&self) -> String {
        let colour = self.refined_colours();
        let mut hist: Vec<usize> = colour.clone();
        hist.sort_unstable();
        let mut edges: Vec<(usize, usize)> = self.covers().iter().map(|&(i, j)| (colour[i], colour[j])).collect();
        edges.sort_unstable();
        let text = format!("{}|{:?}|{:?}", self.len(), hist, edges);
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Refined colours of both posets computed on their disjoint union, so
    /// that colour values are comparable.
    fn refined_colours_with(&self, other: &FinitePoset) -> (Vec<usize>, Vec<usize>) {
        let n = self.len();
        let m = other.len();
        let mut leq = vec![vec![false; n + m]; n + m];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = self.leq[i][j];
            }
        }
        for i in 0..m {
            for j in 0..m {
                leq[n + i][n + j] = other.leq[i][j];
            }
        }
        let union = FinitePoset::new(vec![String::new(); n + m], leq);
        let c = union.refined_colours();
        (c[..n].to_vec(), c[n..].to_vec())
    }

    /// Hasse diagram in Graphviz syntax.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=BT;\n");
        for (i, l) in self.labels.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", l.replace('"', "'"));
        }
        for (i, j) in self.covers() {
            let _ = writeln!(s, "  n{i} -> n{j};");
        }
        s.push_str("}\n");
        s
    }
}

fn rank_signatures<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    sigs.iter().map(|s| distinct.binary_search(s).expect("present")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FinitePoset {
        FinitePoset::new(
            (0..n).map(|i| i.to_string()).collect(),
            (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect(),
        )
    }

    fn vee() -> FinitePoset {
        // 0 below 1 and 2
        FinitePoset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![true, true, true], vec![false, true, false], vec![false, false, true]],
        )
    }

    #[test]
    fn validity_and_hash() {
        assert!(chain(3).is_valid());
        assert!(vee().is_valid());
        assert_ne!(chain(3).canonical_hash(), vee().canonical_hash());
        let relabelled = FinitePoset::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![true, false, false], vec![true, true, true], vec![false, false, true]],
        );
        assert_eq!(relabelled.canonical_hash(), vee().canonical_hash());
        assert!(vee().isomorphism_to(&relabelled).is_some());
        assert!(vee().isomorphism_to(&chain(3)).is_none());
    }

    #[test]
    fn covers_of_chain() {
        assert_eq!(chain(3).covers(), vec![(0, 1), (1, 2)]);
        assert!(chain(2).to_dot("c").contains("n0 -> n1"));
    }
}
