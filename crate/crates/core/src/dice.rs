//! Concrete dice: solving identities, counting wins, and reading dice back
//! into canonical identities.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::canonical::{canonicalize, CanonicalLevel};
use crate::descriptor::{Descriptor, DescriptorError};
use crate::notation::{Die, Identity, Operator, MAX_DICE};
use crate::pattern::{pattern_from_descriptor, WinPattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("identity {0} is not viable: dice do not all have the same number of faces")]
    NotViable(String),
    #[error("dice must all have the same number of faces")]
    RaggedDice,
    #[error("face values must be positive")]
    ZeroFace,
    #[error("a dice set needs between 1 and {MAX_DICE} dice")]
    DiceCount,
    #[error("expected {expected} dice, found {found}")]
    DiceMismatch { expected: usize, found: usize },
    #[error("win pattern mismatch: no labeling of the dice realises {0}")]
    NotNontransitive(String),
    #[error("{0} is not perfectly nontransitive")]
    NoPattern(String),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error("dice file line {line}: {reason}")]
    DiceFile { line: usize, reason: String },
}

/// `k` dice with `n` positive faces each.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiceSet {
    faces: Vec<Vec<u32>>,
}

impl DiceSet {
    pub fn new(faces: Vec<Vec<u32>>) -> Result<DiceSet, VerifyError> {
        if faces.is_empty() || faces.len() > MAX_DICE {
            return Err(VerifyError::DiceCount);
        }
        let n = faces[0].len();
        if n == 0 || faces.iter().any(|f| f.len() != n) {
            return Err(VerifyError::RaggedDice);
        }
        if faces.iter().flatten().any(|&v| v == 0) {
            return Err(VerifyError::ZeroFace);
        }
        Ok(DiceSet { faces })
    }

    pub fn dice(&self) -> usize {
        self.faces.len()
    }

    pub fn sides(&self) -> usize {
        self.faces[0].len()
    }

    pub fn faces(&self, die: usize) -> &[u32] {
        &self.faces[die]
    }

    pub fn sorted_faces(&self, die: usize) -> Vec<u32> {
        let mut f = self.faces[die].clone();
        f.sort_unstable();
        f
    }

    /// Keeps only the listed dice, in the given order.
    pub fn select(&self, dice: &[usize]) -> DiceSet {
        DiceSet { faces: dice.iter().map(|&d| self.faces[d].clone()).collect() }
    }

    /// Applies `f` to every face value.
    pub fn map_values(&self, f: impl Fn(u32) -> u32) -> DiceSet {
        DiceSet { faces: self.faces.iter().map(|fs| fs.iter().map(|&v| f(v)).collect()).collect() }
    }
}

/// One die per line, `A: 1 6 8`.
impl fmt::Display for DiceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for die in 0..self.dice() {
            write!(f, "{}:", Die::new(die))?;
            for v in self.sorted_faces(die) {
                write!(f, " {v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for DiceSet {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dice_file(s)
    }
}

/// Reads the one-die-per-line format. Blank lines and `#` comments are
/// skipped; letters must cover `A..` without gaps, in any order.
pub fn parse_dice_file(text: &str) -> Result<DiceSet, VerifyError> {
    let mut slots: Vec<Option<Vec<u32>>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |reason: &str| VerifyError::DiceFile { line: line_no, reason: reason.to_string() };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (label, values) = line.split_once(':').ok_or_else(|| err("expected '<Letter>: values'"))?;
        let mut label_chars = label.trim().chars();
        let die = match (label_chars.next().and_then(Die::from_letter), label_chars.next()) {
            (Some(d), None) => d,
            _ => return Err(err("die label must be a single uppercase letter")),
        };
        let faces = values
            .split_whitespace()
            .map(|v| v.parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| err("face values must be non-negative integers"))?;
        if slots.len() <= die.index() {
            slots.resize(die.index() + 1, None);
        }
        if slots[die.index()].replace(faces).is_some() {
            return Err(err("die listed twice"));
        }
    }
    let faces = slots
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            f.ok_or_else(|| VerifyError::DiceFile { line: 0, reason: format!("die {} missing", Die::new(i)) })
        })
        .collect::<Result<Vec<_>, _>>()?;
    DiceSet::new(faces)
}

/// Pairwise win counts. `wins[i][j]` counts face pairs where die `i` rolls
/// strictly higher than die `j`; ties count for neither.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WinMatrix {
    k: usize,
    n: usize,
    wins: Vec<u32>,
}

impl WinMatrix {
    pub fn wins(&self, i: usize, j: usize) -> u32 {
        self.wins[i * self.k + j]
    }

    pub fn ties(&self, i: usize, j: usize) -> u32 {
        if i == j {
            return 0;
        }
        (self.n * self.n) as u32 - self.wins(i, j) - self.wins(j, i)
    }

    pub fn dice(&self) -> usize {
        self.k
    }

    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.wins(i, j) > self.wins(j, i)
    }

    pub fn pattern(&self) -> WinPattern {
        WinPattern::from_fn(self.k, |i, j| self.beats(i, j))
    }
}

pub fn win_matrix(ds: &DiceSet) -> WinMatrix {
    let k = ds.dice();
    let sorted: Vec<Vec<u32>> = (0..k).map(|d| ds.sorted_faces(d)).collect();
    let mut wins = vec![0; k * k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                // faces of j strictly below each face of i
                wins[i * k + j] = sorted[i].iter().map(|&v| sorted[j].partition_point(|&w| w < v) as u32).sum();
            }
        }
    }
    WinMatrix { k, n: ds.sides(), wins }
}

/// True when the measured beats relation equals `p` exactly.
pub fn is_nontransitive(ds: &DiceSet, p: &WinPattern) -> bool {
    ds.dice() == p.dice() && win_matrix(ds).pattern() == *p
}

/// Beats relation of an identity's minimal solution, if it is perfectly
/// nontransitive.
pub fn measured_pattern(id: &Identity) -> Result<WinPattern, VerifyError> {
    let pattern = win_matrix(&solve(id)?).pattern();
    if pattern.is_perfectly_nontransitive() {
        Ok(pattern)
    } else {
        Err(VerifyError::NoPattern(id.to_string()))
    }
}

/// Minimal solution: the first slot gets 1, every `<` adds one, every `=`
/// repeats the value.
pub fn solve(id: &Identity) -> Result<DiceSet, VerifyError> {
    let Some((k, n)) = id.shape() else {
        return Err(VerifyError::NotViable(id.to_string()));
    };
    let mut faces = vec![Vec::with_capacity(n); k];
    let mut value = 1;
    faces[id.first().index()].push(value);
    for (op, die) in id.rest() {
        if op == Operator::Less {
            value += 1;
        }
        faces[die.index()].push(value);
    }
    Ok(DiceSet { faces })
}

/// The chain read off a labeled dice set: all faces in ascending order,
/// `=` between equal values, runs sorted by label.
pub fn chain_of(ds: &DiceSet) -> Identity {
    let mut all: Vec<(u32, usize)> = (0..ds.dice()).flat_map(|d| ds.faces(d).iter().map(move |&v| (v, d))).collect();
    all.sort_unstable();
    let mut id = Identity::single(Die::new(all[0].1));
    for pair in all.windows(2) {
        let op = if pair[1].0 == pair[0].0 { Operator::Equal } else { Operator::Less };
        id.push(op, Die::new(pair[1].1));
    }
    id
}

/// Labelings `sigma` (label -> die index in `ds`) that realise `pattern`
/// with label A on a die holding the lowest face; when several dice share
/// every face value in order, any of them may take A.
pub(crate) fn anchored_labelings(ds: &DiceSet, pattern: &WinPattern) -> Vec<Vec<usize>> {
    let measured = win_matrix(ds).pattern();
    let sorted: Vec<Vec<u32>> = (0..ds.dice()).map(|d| ds.sorted_faces(d)).collect();
    let lowest = sorted.iter().min().unwrap();
    let candidates: Vec<usize> = (0..ds.dice()).filter(|&d| &sorted[d] == lowest).collect();
    measured.labelings_onto(pattern, Some(&candidates))
}

/// Relabels `ds` by `sigma` and returns the irreducible chain.
pub(crate) fn identity_under(ds: &DiceSet, sigma: &[usize]) -> Identity {
    canonicalize(&chain_of(&ds.select(sigma)), CanonicalLevel::Irreducible)
}

/// Canonical identity of a perfectly nontransitive dice set.
///
/// Die A is the die with the lowest face, breaking ties on the next-lowest
/// face and so on. The remaining labels follow the descriptor's win pattern
/// (primary-order suffix ignored). If dice are identical all the way up, the
/// labeling giving the smallest identity text wins.
pub fn dice_to_identity(ds: &DiceSet, d: &Descriptor) -> Result<Identity, VerifyError> {
    if ds.dice() != d.dice() {
        return Err(VerifyError::DiceMismatch { expected: d.dice(), found: ds.dice() });
    }
    let pattern = pattern_from_descriptor(&d.canonical())?;
    anchored_labelings(ds, &pattern)
        .iter()
        .map(|sigma| identity_under(ds, sigma))
        .min_by_key(|id| id.to_string())
        .ok_or_else(|| VerifyError::NotNontransitive(d.canonical().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_identity;

    fn dice(rows: &[&[u32]]) -> DiceSet {
        DiceSet::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn d3() -> Descriptor {
        "[3D3S]".parse().unwrap()
    }

    /// Counts straight from the definition, all `n * n` face pairs.
    fn brute_wins(a: &[u32], b: &[u32]) -> u32 {
        a.iter().map(|x| b.iter().filter(|y| x > y).count() as u32).sum()
    }

    #[test]
    fn solves_the_three_dice_example() {
        let ds = solve(&parse_identity("A<C<B<C<B<A<B<A<C").unwrap()).unwrap();
        assert_eq!(ds.to_string(), "A: 1 6 8\nB: 3 5 7\nC: 2 4 9\n");
    }

    #[test]
    fn solves_all_equal_and_strict_chains() {
        let ds = solve(&parse_identity("A=A=A=B=B=B=C=C=C").unwrap()).unwrap();
        assert!((0..3).all(|d| ds.faces(d) == [1, 1, 1]));
        let ds = solve(&parse_identity("A<D<B<E<C<E<D<C<B<A<C<B<A<E<D").unwrap()).unwrap();
        assert_eq!(ds.to_string(), "A: 1 10 13\nB: 3 9 12\nC: 5 8 11\nD: 2 7 15\nE: 4 6 14\n");
    }

    #[test]
    fn solve_rejects_non_viable() {
        assert!(matches!(solve(&parse_identity("A<B<A").unwrap()), Err(VerifyError::NotViable(_))));
    }

    #[test]
    fn win_counts_match_brute_force() {
        let ds = dice(&[&[1, 6, 8], &[3, 5, 7], &[2, 4, 9]]);
        let m = win_matrix(&ds);
        assert_eq!((m.wins(0, 1), m.wins(1, 0)), (5, 4));
        assert_eq!((m.wins(1, 2), m.wins(2, 1)), (5, 4));
        assert_eq!((m.wins(2, 0), m.wins(0, 2)), (5, 4));
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(m.wins(i, j), brute_wins(ds.faces(i), ds.faces(j)));
                }
            }
        }
    }

    #[test]
    fn identical_dice_only_tie() {
        let ds = dice(&[&[1, 2, 3], &[1, 2, 3]]);
        let m = win_matrix(&ds);
        assert_eq!(m.wins(0, 1), m.wins(1, 0));
        assert_eq!(m.ties(0, 1), 3);
        assert!(!m.beats(0, 1) && !m.beats(1, 0));
    }

    #[test]
    fn five_dice_example_wins_five_of_nine() {
        let ds = solve(&parse_identity("A<D<B<E<C<E<D<C<B<A<C<B<A<E<D").unwrap()).unwrap();
        let m = win_matrix(&ds);
        for i in 0..5 {
            for s in [1, 2] {
                let j = (i + s) % 5;
                assert_eq!(brute_wins(ds.faces(i), ds.faces(j)), 5);
                assert_eq!(m.wins(i, j), 5);
            }
        }
    }

    #[test]
    fn nontransitivity_checks() {
        let p3 = pattern_from_descriptor(&d3()).unwrap();
        assert!(is_nontransitive(&dice(&[&[1, 6, 8], &[3, 5, 7], &[2, 4, 9]]), &p3));
        let standard = dice(&[&[1, 2, 3, 4, 5, 6], &[1, 2, 3, 4, 5, 6], &[1, 2, 3, 4, 5, 6]]);
        assert!(!is_nontransitive(&standard, &p3));
        let five = solve(&parse_identity("A<D<B<E<C<E<D<C<B<A<C<B<A<E<D").unwrap()).unwrap();
        let p5 = pattern_from_descriptor(&"[5D:]".parse().unwrap()).unwrap();
        let p51 = pattern_from_descriptor(&"[5D:1]".parse().unwrap()).unwrap();
        assert!(is_nontransitive(&five, &p5));
        assert!(!is_nontransitive(&five, &p51));
    }

    #[test]
    fn both_example_solutions_read_back_identically() {
        let a = dice(&[&[1, 6, 8], &[3, 5, 7], &[2, 4, 9]]);
        let b = dice(&[&[1, 10, 14], &[7, 9, 13], &[4, 8, 22]]);
        let want = "A<C<B<C<B<A<B<A<C";
        assert_eq!(dice_to_identity(&a, &d3()).unwrap().to_string(), want);
        assert_eq!(dice_to_identity(&b, &d3()).unwrap().to_string(), want);
        // any labeling of the same dice reads back the same way
        let shuffled = dice(&[&[7, 9, 13], &[4, 8, 22], &[1, 10, 14]]);
        assert_eq!(dice_to_identity(&shuffled, &d3()).unwrap().to_string(), want);
    }

    #[test]
    fn monotone_maps_do_not_change_the_identity() {
        let a = dice(&[&[1, 6, 8], &[3, 5, 7], &[2, 4, 9]]);
        let b = dice(&[&[1, 10, 14], &[7, 9, 13], &[4, 8, 22]]);
        for ds in [a, b] {
            let base = dice_to_identity(&ds, &d3()).unwrap();
            for (m, c) in [(2, 0), (3, 7), (11, 5)] {
                let mapped = ds.map_values(|v| m * v + c);
                assert_eq!(dice_to_identity(&mapped, &d3()).unwrap(), base);
            }
        }
    }

    #[test]
    fn identical_dice_are_not_nontransitive() {
        let ds = dice(&[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3]]);
        assert!(matches!(dice_to_identity(&ds, &d3()), Err(VerifyError::NotNontransitive(_))));
    }

    #[test]
    fn dice_file_round_trip() {
        let text = "A: 1 6 8\nB: 3 5 7\nC: 2 4 9\n";
        let ds = parse_dice_file(text).unwrap();
        assert_eq!(ds.to_string(), text);
        let unordered = parse_dice_file("# comment\nC: 9 2 4\n\nA: 8 1 6\nB: 3 5 7\n").unwrap();
        assert_eq!(unordered.to_string(), text);
        assert!(matches!(parse_dice_file("A: 1 2\nC: 1 2\n"), Err(VerifyError::DiceFile { .. })));
        assert!(matches!(parse_dice_file("A 1 2\n"), Err(VerifyError::DiceFile { line: 1, .. })));
        assert_eq!(parse_dice_file("A: 1 2\nB: 1\n"), Err(VerifyError::RaggedDice));
        assert_eq!(parse_dice_file("A: 0 2\nB: 1 1\n"), Err(VerifyError::ZeroFace));
        assert_eq!(parse_dice_file(""), Err(VerifyError::DiceCount));
    }
}
