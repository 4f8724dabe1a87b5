//! Win patterns: the "beats" digraph a set of dice must realise.

use std::fmt;

use crate::descriptor::{Descriptor, DescriptorError};

/// A `k x k` beats relation. `beats(i, j)` means die `i` wins against `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WinPattern {
    k: usize,
    beats: Vec<bool>,
}

impl WinPattern {
    pub fn from_fn(k: usize, f: impl Fn(usize, usize) -> bool) -> WinPattern {
        let mut beats = vec![false; k * k];
        for i in 0..k {
            for j in 0..k {
                beats[i * k + j] = i != j && f(i, j);
            }
        }
        WinPattern { k, beats }
    }

    pub fn dice(&self) -> usize {
        self.k
    }

    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.beats[i * self.k + j]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.k).filter(|&j| self.beats(i, j)).count()
    }

    /// Every pair decided one way, and every die beats exactly `(k-1)/2`
    /// others.
    pub fn is_perfectly_nontransitive(&self) -> bool {
        let k = self.k;
        k % 2 == 1
            && (0..k).all(|i| {
                self.out_degree(i) == (k - 1) / 2 && (0..k).all(|j| i == j || self.beats(i, j) != self.beats(j, i))
            })
    }

    /// The pattern seen after renaming die `i` to `map[i]`.
    pub fn relabeled(&self, map: &[usize]) -> WinPattern {
        let mut out = WinPattern { k: self.k, beats: vec![false; self.k * self.k] };
        for i in 0..self.k {
            for j in 0..self.k {
                out.beats[map[i] * self.k + map[j]] = self.beats(i, j);
            }
        }
        out
    }

    /// Pattern of dice built by nesting `sub` into every die of `base`. Die
    /// `b * sub.k + s` beats `c * sub.k + t` when `b` beats `c`, or when
    /// `b == c` and `s` beats `t`.
    pub fn nested(base: &WinPattern, sub: &WinPattern) -> WinPattern {
        let m = sub.k;
        WinPattern::from_fn(base.k * m, |i, j| {
            let (b, s) = (i / m, i % m);
            let (c, t) = (j / m, j % m);
            base.beats(b, c) || (b == c && sub.beats(s, t))
        })
    }

    /// All relabelings `sigma` (target label -> die of `self`) under which
    /// `self` shows exactly `target`. When `first` is given, only labelings
    /// that send label 0 to one of those dice are returned.
    pub fn labelings_onto(&self, target: &WinPattern, first: Option<&[usize]>) -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        if self.k != target.k {
            return found;
        }
        let mut sigma = Vec::with_capacity(self.k);
        let mut used = vec![false; self.k];
        self.extend_labeling(target, first, &mut sigma, &mut used, &mut found);
        found
    }

    fn extend_labeling(
        &self,
        target: &WinPattern,
        first: Option<&[usize]>,
        sigma: &mut Vec<usize>,
        used: &mut [bool],
        found: &mut Vec<Vec<usize>>,
    ) {
        let label = sigma.len();
        if label == self.k {
            found.push(sigma.clone());
            return;
        }
        for die in 0..self.k {
            if used[die] || (label == 0 && first.is_some_and(|f| !f.contains(&die))) {
                continue;
            }
            let consistent = sigma.iter().enumerate().all(|(l, &d)| {
                target.beats(l, label) == self.beats(d, die) && target.beats(label, l) == self.beats(die, d)
            });
            if consistent {
                used[die] = true;
                sigma.push(die);
                self.extend_labeling(target, first, sigma, used, found);
                sigma.pop();
                used[die] = false;
            }
        }
    }

    pub fn is_isomorphic_to(&self, other: &WinPattern) -> bool {
        self.k == other.k && !self.labelings_onto(other, None).is_empty()
    }

    /// Triples `(x, y, z)` with `x` beats `y` beats `z` beats `x`, listed
    /// once each, rotated so the smallest die comes first.
    pub fn cyclic_triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for x in 0..self.k {
            for y in x + 1..self.k {
                for z in x + 1..self.k {
                    if y != z && self.beats(x, y) && self.beats(y, z) && self.beats(z, x) {
                        out.push([x, y, z]);
                    }
                }
            }
        }
        out.sort_by_key(|t| {
            let mut s = *t;
            s.sort_unstable();
            s
        });
        out
    }
}

impl fmt::Debug for WinPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WinPattern[")?;
        let mut first = true;
        for i in 0..self.k {
            for j in 0..self.k {
                if self.beats(i, j) {
                    if !first {
                        write!(f, " ")?;
                    }
                    first = false;
                    write!(f, "{}>{}", (b'A' + i as u8) as char, (b'A' + j as u8) as char)?;
                }
            }
        }
        write!(f, "]")
    }
}

/// Target pattern for a descriptor: the union of every win chain's stride
/// relation, mapped through the primary order when one is given.
pub fn pattern_from_descriptor(d: &Descriptor) -> Result<WinPattern, DescriptorError> {
    let k = d.dice();
    let strides = d.strides();
    let positional = WinPattern::from_fn(k, |i, j| strides.iter().any(|s| (i + s) % k == j));
    if !positional.is_perfectly_nontransitive() {
        return Err(DescriptorError::InvalidPattern(d.canonical().to_string()));
    }
    Ok(match d.primary_order() {
        Some(order) => {
            let map: Vec<usize> = order.iter().map(|die| die.index()).collect();
            positional.relabeled(&map)
        }
        None => positional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(text: &str) -> WinPattern {
        pattern_from_descriptor(&text.parse().unwrap()).unwrap()
    }

    #[test]
    fn three_dice_cycle() {
        let p = pattern("[3D3S]");
        assert!(p.beats(0, 1) && p.beats(1, 2) && p.beats(2, 0));
        assert!(!p.beats(1, 0) && !p.beats(0, 2));
    }

    #[test]
    fn five_dice_step_patterns() {
        let p = pattern("[5D3S:]");
        let q = pattern("[5D3S:1]");
        for i in 0..5 {
            assert!(p.beats(i, (i + 1) % 5) && p.beats(i, (i + 2) % 5));
            assert!(q.beats(i, (i + 1) % 5) && q.beats(i, (i + 3) % 5));
        }
        assert_ne!(p, q);
        // A->A, B->D, C->B, D->E, E->C
        assert_eq!(p.relabeled(&[0, 3, 1, 4, 2]), q);
        assert!(p.is_isomorphic_to(&q));
    }

    #[test]
    fn primary_order_suffix_matches_equivalence_maps() {
        assert_eq!(pattern("[5D:] ADBEC"), pattern("[5D:1]"));
        assert_eq!(pattern("[5D:1] ACEBD"), pattern("[5D:]"));
    }

    #[test]
    fn degenerate_steps_are_rejected() {
        // stride 1 + 1 + 3 = 5 = 0 mod 5
        let d = Descriptor::with_steps(5, Some(3), vec![3]).unwrap();
        assert!(matches!(pattern_from_descriptor(&d), Err(DescriptorError::InvalidPattern(_))));
        // stride 4 = -1 mod 5 collides with the primary chain
        let d = Descriptor::with_steps(5, Some(3), vec![2]).unwrap();
        assert!(pattern_from_descriptor(&d).is_err());
    }

    #[test]
    fn five_composing_triangles() {
        let p = pattern("[5D:]");
        assert_eq!(p.cyclic_triangles(), vec![[0, 1, 3], [0, 2, 3], [0, 2, 4], [1, 2, 4], [1, 3, 4]]);
    }

    #[test]
    fn nested_pattern_is_regular() {
        let p = pattern("[3D3S]");
        let n = WinPattern::nested(&p, &p);
        assert_eq!(n.dice(), 9);
        assert!(n.is_perfectly_nontransitive());
        assert!(n.beats(0, 3) && n.beats(2, 5) && n.beats(6, 0) && n.beats(0, 1));
    }
}
