//! Brute-force dice sweep: every set of `k` distinct `n`-sided dice with
//! faces in `1..=vmax`, read back as identities. It shares nothing with the
//! enumerator except the dice-to-identity reader, so it serves as an
//! independent check on enumerated lists.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::descriptor::Descriptor;
use crate::dice::{dice_to_identity, DiceSet};
use crate::notation::Identity;

/// Default cap on dice-set combinations when `NI_BUDGET` is unset.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("sweep needs {needed} combinations, budget is {budget} (raise NI_BUDGET)")]
    Budget { needed: u128, budget: u128 },
    #[error("need an odd dice count of at least 3 and a positive side count and value range")]
    Shape,
}

/// The combination budget: `NI_BUDGET` if set and numeric, else the default.
pub fn budget_from_env() -> u128 {
    std::env::var("NI_BUDGET").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of dice sets the sweep visits.
pub fn sweep_size(k: usize, n: usize, vmax: u32) -> u128 {
    let faces = binomial(vmax as u128 + n as u128 - 1, n as u128);
    binomial(faces, k as u128)
}

pub fn brute_force_oracle(k: usize, n: usize, vmax: u32) -> Result<BTreeSet<Identity>, OracleError> {
    brute_force_oracle_with_budget(k, n, vmax, budget_from_env())
}

pub fn brute_force_oracle_with_budget(
    k: usize,
    n: usize,
    vmax: u32,
    budget: u128,
) -> Result<BTreeSet<Identity>, OracleError> {
    if k < 3 || k.is_multiple_of(2) || n == 0 || vmax == 0 {
        return Err(OracleError::Shape);
    }
    let needed = sweep_size(k, n, vmax);
    if needed > budget {
        return Err(OracleError::Budget { needed, budget });
    }
    let descriptor = Descriptor::new(k, n).map_err(|_| OracleError::Shape)?;
    let dice = face_multisets(n, vmax);
    let m = dice.len();
    // wins[a * m + b]: face pairs where die a rolls higher than die b
    let wins: Vec<u32> = (0..m * m)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / m, ab % m);
            dice[a].iter().map(|&x| dice[b].iter().filter(|&&y| y < x).count() as u32).sum()
        })
        .collect();
    let sweep = Sweep { k, m, half: (k - 1) / 2, wins: &wins };
    let found: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            let mut chosen = vec![first];
            sweep.extend(&mut chosen, &mut out);
            out
        })
        .collect();
    Ok(found
        .into_iter()
        .filter_map(|set| {
            let faces = set.iter().map(|&i| dice[i].clone()).collect();
            let ds = DiceSet::new(faces).ok()?;
            dice_to_identity(&ds, &descriptor).ok()
        })
        .collect())
}

struct Sweep<'a> {
    k: usize,
    m: usize,
    half: usize,
    wins: &'a [u32],
}

impl Sweep<'_> {
    /// Adds dice in increasing index order, keeping every pair decided and
    /// no die above `half` wins or losses.
    fn extend(&self, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == self.k {
            out.push(chosen.clone());
            return;
        }
        let last = *chosen.last().unwrap();
        for next in last + 1..self.m {
            chosen.push(next);
            if self.balanced(chosen) {
                self.extend(chosen, out);
            }
            chosen.pop();
        }
    }

    fn balanced(&self, chosen: &[usize]) -> bool {
        let new = *chosen.last().unwrap();
        let mut new_wins = 0;
        for &old in &chosen[..chosen.len() - 1] {
            let (w, l) = (self.wins[new * self.m + old], self.wins[old * self.m + new]);
            if w == l {
                return false;
            }
            new_wins += usize::from(w > l);
        }
        let new_losses = chosen.len() - 1 - new_wins;
        if new_wins > self.half || new_losses > self.half {
            return false;
        }
        chosen[..chosen.len() - 1].iter().all(|&old| {
            let mut won = 0;
            let mut lost = 0;
            for &other in chosen {
                if other != old {
                    if self.wins[old * self.m + other] > self.wins[other * self.m + old] {
                        won += 1;
                    } else {
                        lost += 1;
                    }
                }
            }
            won <= self.half && lost <= self.half
        })
    }
}

/// Every non-decreasing face list of length `n` over `1..=vmax`.
fn face_multisets(n: usize, vmax: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, vmax: u32, from: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in from..=vmax {
            cur.push(v);
            go(n, vmax, v, cur, out);
            cur.pop();
        }
    }
    go(n, vmax, 1, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_sizes() {
        assert_eq!(face_multisets(3, 9).len(), 165);
        assert_eq!(sweep_size(3, 3, 9), 165 * 164 * 163 / 6);
    }

    #[test]
    fn single_faced_dice_never_cycle() {
        assert!(brute_force_oracle_with_budget(3, 1, 9, DEFAULT_BUDGET).unwrap().is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(brute_force_oracle_with_budget(3, 3, 9, 1000), Err(OracleError::Budget { budget: 1000, .. })));
    }

    #[test]
    fn small_range_is_a_subset() {
        let small = brute_force_oracle_with_budget(3, 3, 5, DEFAULT_BUDGET).unwrap();
        let large = brute_force_oracle_with_budget(3, 3, 9, DEFAULT_BUDGET).unwrap();
        assert!(!small.is_empty());
        assert!(small.is_subset(&large));
        assert_eq!(large.len(), 25);
    }
}
