//! Canonical forms and the list-stringency predicates.
//!
//! Two rewrites matter. Faces of equal value may be listed in any order, so
//! every `=` run is sorted alphabetically. And two adjacent faces of one die
//! with nothing tied to them, `<N<N`, compare exactly like `<N=N` against
//! every other die, so they are merged.
//!
//! The merge is only applied when neither face shares its value with another
//! die. `<N<N=M` and `<N=N=M` tie `M` against different numbers of `N` faces
//! and can disagree on who wins.

use serde::{Deserialize, Serialize};

use crate::notation::{Identity, Operator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CanonicalLevel {
    /// Sort every `=` run by die label.
    AlphabeticalDupe,
    /// Also merge tie-free `<N<N` adjacencies.
    Irreducible,
}

pub fn canonicalize(id: &Identity, level: CanonicalLevel) -> Identity {
    let mut out = id.clone();
    if level == CanonicalLevel::Irreducible {
        merge_pure_runs(&mut out);
    }
    sort_runs(&mut out);
    out
}

fn sort_runs(id: &mut Identity) {
    let runs = id.runs();
    let (dice, _) = id.parts_mut();
    for run in runs {
        dice[run].sort_unstable();
    }
}

/// Joins neighbouring runs that hold only faces of one and the same die.
fn merge_pure_runs(id: &mut Identity) {
    let runs = id.runs();
    let pure: Vec<Option<_>> = runs
        .iter()
        .map(|r| {
            let first = id.slots()[r.start];
            id.slots()[r.clone()].iter().all(|&d| d == first).then_some(first)
        })
        .collect();
    let (_, ops) = id.parts_mut();
    for w in 0..runs.len().saturating_sub(1) {
        if let (Some(a), Some(b)) = (pure[w], pure[w + 1]) {
            if a == b {
                ops[runs[w].end - 1] = Operator::Equal;
            }
        }
    }
}

/// Every `=` run lists its dice in alphabetical order.
pub fn is_alphabetical(id: &Identity) -> bool {
    id.ops().iter().zip(id.slots().windows(2)).all(|(&op, pair)| op == Operator::Less || pair[0] <= pair[1])
}

/// The published-list rule: alphabetical runs and no `N<N` adjacency of the
/// same die anywhere in the chain.
pub fn is_irreducible(id: &Identity) -> bool {
    is_alphabetical(id)
        && id.ops().iter().zip(id.slots().windows(2)).all(|(&op, pair)| op == Operator::Equal || pair[0] != pair[1])
}
