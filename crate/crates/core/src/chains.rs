//! Relabeling between win-chain patterns, and taking five-dice NIs apart
//! into three-dice pieces and putting them back together.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::canonical::{canonicalize, CanonicalLevel};
use crate::descriptor::Descriptor;
use crate::dice::{dice_to_identity, measured_pattern, solve, win_matrix, VerifyError};
use crate::encoding::split_digit;
use crate::enumerate::{Enumeration, EnumerationMode};
use crate::notation::{parse_identity, Die, Identity, Operator};
use crate::pattern::{pattern_from_descriptor, WinPattern};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("only five-dice step patterns can be relabeled, got {0} dice")]
    UnsupportedDice(usize),
    #[error("{0} is neither [5D:] nor [5D:1]")]
    UnknownStepPattern(String),
    #[error("{0:?} is not a permutation of the dice")]
    NotPermutation(Vec<usize>),
    #[error("need at least 3 surviving dice, got {0}")]
    SubsetTooSmall(usize),
    #[error("die {0} is not in the identity")]
    UnknownDie(Die),
    #[error("{0} is not a five-dice NI with the default pattern")]
    NotFiveDiceNi(String),
    #[error("{dropped} dice dropped from {dice} leaves {left}, target has {target}")]
    SurvivorCount { dice: usize, dropped: usize, left: usize, target: usize },
    #[error("composition spec line {line}: {reason}")]
    SpecLine { line: usize, reason: String },
    #[error("composition spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// A bijection on die labels; `map[old] = new`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiePermutation {
    map: Vec<usize>,
}

impl DiePermutation {
    pub fn new(map: Vec<usize>) -> Result<DiePermutation, ChainError> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() || std::mem::replace(&mut seen[m], true) {
                return Err(ChainError::NotPermutation(map));
            }
        }
        Ok(DiePermutation { map })
    }

    pub fn identity(k: usize) -> DiePermutation {
        DiePermutation { map: (0..k).collect() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, die: Die) -> Die {
        Die::new(self.map[die.index()])
    }

    pub fn inverse(&self) -> DiePermutation {
        let mut inv = vec![0; self.map.len()];
        for (old, &new) in self.map.iter().enumerate() {
            inv[new] = old;
        }
        DiePermutation { map: inv }
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &DiePermutation) -> DiePermutation {
        DiePermutation { map: self.map.iter().map(|&m| next.map[m]).collect() }
    }

    /// Renames every slot; no canonicalisation.
    pub fn apply(&self, id: &Identity) -> Identity {
        id.relabel(|d| self.image(d))
    }

    pub fn apply_pattern(&self, p: &WinPattern) -> WinPattern {
        p.relabeled(&self.map)
    }
}

impl fmt::Display for DiePermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .filter(|(old, new)| old != *new)
            .map(|(old, &new)| format!("{}->{}", Die::new(old), Die::new(new)))
            .collect();
        if parts.is_empty() {
            f.write_str("identity")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Renaming that carries `[5D:]` onto `[5D:1]`: B becomes D, C becomes B,
/// D becomes E and E becomes C.
const FIVE_SKIP: [usize; 5] = [0, 3, 1, 4, 2];

fn five_dice_steps(d: &Descriptor) -> Result<usize, ChainError> {
    if d.dice() != 5 {
        return Err(ChainError::UnsupportedDice(d.dice()));
    }
    let base = d.canonical();
    match (base.steps(), d.primary_order()) {
        ([0], None) => Ok(0),
        ([1], None) => Ok(1),
        _ => Err(ChainError::UnknownStepPattern(d.to_string())),
    }
}

/// The fixed permutation between two five-dice step patterns.
pub fn step_map(from: &Descriptor, to: &Descriptor) -> Result<DiePermutation, ChainError> {
    let forward = DiePermutation { map: FIVE_SKIP.to_vec() };
    Ok(match (five_dice_steps(from)?, five_dice_steps(to)?) {
        (a, b) if a == b => DiePermutation::identity(5),
        (0, _) => forward,
        _ => forward.inverse(),
    })
}

/// Moves an NI from one five-dice step pattern to the other and
/// re-canonicalises it.
pub fn step_relabel(id: &Identity, from: &Descriptor, to: &Descriptor) -> Result<Identity, ChainError> {
    let map = step_map(from, to)?;
    if map == DiePermutation::identity(5) {
        return Ok(id.clone());
    }
    Ok(canonicalize(&map.apply(id), CanonicalLevel::Irreducible))
}

/// Drops every slot whose die maps to `None`. Two survivors are tied only
/// if every operator between them in the original was `=`.
fn restrict_chain(id: &Identity, keep: impl Fn(Die) -> Option<Die>) -> Option<Identity> {
    let mut out: Option<Identity> = None;
    let mut gap = Operator::Equal;
    for (i, &slot) in id.slots().iter().enumerate() {
        if i > 0 {
            gap = gap.max(id.ops()[i - 1]);
        }
        if let Some(new) = keep(slot) {
            match out.as_mut() {
                None => out = Some(Identity::single(new)),
                Some(o) => o.push(gap, new),
            }
            gap = Operator::Equal;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    /// Kept dice, in label order.
    pub survivors: Vec<Die>,
    /// Surviving chain with survivors renamed `A, B, ...` in label order.
    pub raw: Identity,
    /// Irreducible form. When the survivors are perfectly nontransitive this
    /// uses the same labeling the dice reader would choose.
    pub identity: Identity,
}

pub fn restrict(id: &Identity, keep: &[Die]) -> Result<Restriction, ChainError> {
    let mut survivors: Vec<Die> = keep.to_vec();
    survivors.sort_unstable();
    survivors.dedup();
    if survivors.len() < 3 {
        return Err(ChainError::SubsetTooSmall(survivors.len()));
    }
    let k = id.dice_count();
    if let Some(&bad) = survivors.iter().find(|d| d.index() >= k) {
        return Err(ChainError::UnknownDie(bad));
    }
    let raw =
        restrict_chain(id, |d| survivors.iter().position(|&s| s == d).map(Die::new)).expect("at least one survivor");
    let raw = canonicalize(&raw, CanonicalLevel::AlphabeticalDupe);
    let identity = match raw.shape() {
        Some((m, n)) if m % 2 == 1 => {
            let d = Descriptor::new(m, n).map_err(|_| ChainError::SubsetTooSmall(m))?;
            dice_to_identity(&solve(&raw)?, &d).unwrap_or_else(|_| canonicalize(&raw, CanonicalLevel::Irreducible))
        }
        _ => canonicalize(&raw, CanonicalLevel::Irreducible),
    };
    Ok(Restriction { survivors, raw, identity })
}

/// One three-dice piece of a five-dice NI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub triple: [Die; 3],
    /// Die of the triple that plays A: the one with the lowest face.
    pub anchor: Die,
    /// Whether the triple contains the five-dice NI's own A.
    pub anchored: bool,
    /// Restricted chain, renamed so the anchor is A and the die it beats is
    /// B; adjacent faces of one die are left unmerged.
    pub raw: Identity,
    pub canonical: Identity,
}

fn five_dice_pattern() -> WinPattern {
    pattern_from_descriptor(&"[5D:]".parse().expect("valid descriptor")).expect("valid pattern")
}

/// Renaming of a triple's dice that puts `anchor` at A.
fn anchor_map(pattern: &WinPattern, triple: [Die; 3], anchor: Die) -> [Option<Die>; 5] {
    let a = anchor.index();
    let beaten = triple.iter().map(|d| d.index()).find(|&d| d != a && pattern.beats(a, d)).expect("cyclic triple");
    let mut map = [None; 5];
    for d in triple {
        let i = d.index();
        map[i] = Some(Die::new(if i == a {
            0
        } else if i == beaten {
            1
        } else {
            2
        }));
    }
    map
}

/// The five composing triples of a `[5D:]` NI, each restricted and renamed.
pub fn decompose5(id: &Identity) -> Result<Vec<Component>, ChainError> {
    let pattern = five_dice_pattern();
    let measured = measured_pattern(id).map_err(|_| ChainError::NotFiveDiceNi(id.to_string()))?;
    if measured != pattern {
        return Err(ChainError::NotFiveDiceNi(id.to_string()));
    }
    let mut out = Vec::new();
    for t in pattern.cyclic_triangles() {
        let mut triple = t.map(Die::new);
        triple.sort_unstable();
        let anchor = *id.slots().iter().find(|d| triple.contains(d)).expect("every die appears");
        let map = anchor_map(&pattern, triple, anchor);
        let raw = restrict_chain(id, |d| map[d.index()]).expect("triple survives");
        let raw = canonicalize(&raw, CanonicalLevel::AlphabeticalDupe);
        out.push(Component {
            triple,
            anchor,
            anchored: triple.contains(&Die::A),
            canonical: canonicalize(&raw, CanonicalLevel::Irreducible),
            raw,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionEntry {
    pub triple: [Die; 3],
    pub anchor: Die,
    pub identity: Identity,
}

/// Assignment of a three-dice NI to each composing triple of `[5D:]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionSpec {
    entries: Vec<CompositionEntry>,
    sides: usize,
}

impl CompositionSpec {
    pub fn new(mut entries: Vec<CompositionEntry>) -> Result<CompositionSpec, ChainError> {
        let pattern = five_dice_pattern();
        let cycle = WinPattern::from_fn(3, |i, j| (i + 1) % 3 == j);
        let mut wanted: Vec<[Die; 3]> = pattern
            .cyclic_triangles()
            .into_iter()
            .map(|t| {
                let mut t = t.map(Die::new);
                t.sort_unstable();
                t
            })
            .collect();
        wanted.sort_unstable();
        for e in &mut entries {
            e.triple.sort_unstable();
        }
        let mut have: Vec<[Die; 3]> = entries.iter().map(|e| e.triple).collect();
        have.sort_unstable();
        if have != wanted {
            let names: Vec<String> = wanted.iter().map(|t| t.iter().map(|d| d.letter()).collect()).collect();
            return Err(ChainError::Spec(format!("need exactly the triples {}", names.join(", "))));
        }
        let mut sides = None;
        for e in &entries {
            let name: String = e.triple.iter().map(|d| d.letter()).collect();
            if !e.triple.contains(&e.anchor) {
                return Err(ChainError::Spec(format!("anchor {} is not in {name}", e.anchor)));
            }
            if e.triple.contains(&Die::A) && e.anchor != Die::A {
                return Err(ChainError::Spec(format!("{name} contains A, so A must be its anchor")));
            }
            let shape = e.identity.shape();
            let n = match shape {
                Some((3, n)) => n,
                _ => return Err(ChainError::Spec(format!("{name}: {} is not a viable 3-dice identity", e.identity))),
            };
            if *sides.get_or_insert(n) != n {
                return Err(ChainError::Spec("composing identities have different side counts".into()));
            }
            if measured_pattern(&e.identity).ok().as_ref() != Some(&cycle) {
                return Err(ChainError::Spec(format!("{name}: {} is not nontransitive", e.identity)));
            }
        }
        entries.sort_by_key(|e| e.triple);
        Ok(CompositionSpec { entries, sides: sides.expect("five entries") })
    }

    pub fn from_components(components: &[Component]) -> Result<CompositionSpec, ChainError> {
        CompositionSpec::new(
            components
                .iter()
                .map(|c| CompositionEntry { triple: c.triple, anchor: c.anchor, identity: c.raw.clone() })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[CompositionEntry] {
        &self.entries
    }

    pub fn sides(&self) -> usize {
        self.sides
    }
}

impl fmt::Display for CompositionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let name: String = e.triple.iter().map(|d| d.letter()).collect();
            if e.triple.contains(&Die::A) {
                writeln!(f, "{name}: {}", e.identity)?;
            } else {
                writeln!(f, "{name}@{}: {}", e.anchor, e.identity)?;
            }
        }
        Ok(())
    }
}

/// Reads lines like `ABD: A<C<B<C<B<A<B<A<C` or `BDE@D: A<C<B<B<A<C<C<B<A`.
/// Triples without A need an explicit `@anchor`. `#` starts a comment.
pub fn parse_composition_spec(text: &str) -> Result<CompositionSpec, ChainError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: String| ChainError::SpecLine { line: i + 1, reason };
        let (head, body) = line.split_once(':').ok_or_else(|| bad("expected TRIPLE: IDENTITY".into()))?;
        let (letters, anchor) = match head.trim().split_once('@') {
            Some((t, a)) => (t.trim(), Some(a.trim())),
            None => (head.trim(), None),
        };
        let dice: Vec<Die> = letters
            .chars()
            .map(Die::from_letter)
            .collect::<Option<_>>()
            .filter(|d: &Vec<Die>| d.len() == 3)
            .ok_or_else(|| bad(format!("{letters:?} is not three die letters")))?;
        let triple = [dice[0], dice[1], dice[2]];
        let anchor = match anchor {
            Some(a) => {
                let mut chars = a.chars();
                match (chars.next().and_then(Die::from_letter), chars.next()) {
                    (Some(d), None) => d,
                    _ => return Err(bad(format!("{a:?} is not a die letter"))),
                }
            }
            None if triple.contains(&Die::A) => Die::A,
            None => return Err(bad(format!("{letters} has no A, so it needs an @anchor"))),
        };
        let identity = parse_identity(body).map_err(|e| bad(e.to_string()))?;
        entries.push(CompositionEntry { triple, anchor, identity });
    }
    CompositionSpec::new(entries)
}

/// What each triple's restriction must look like.
struct TripleTarget {
    map: [Option<Die>; 5],
    canonical: Identity,
}

impl TripleTarget {
    /// Restricted chain of a partial five-dice chain, with every run but the
    /// last sorted and flattened; the last may still grow.
    fn closed_prefix(&self, slots: &[Die], ops: &[Operator]) -> Vec<Die> {
        let mut seq = Vec::new();
        let mut run: Vec<Die> = Vec::new();
        let mut gap = Operator::Equal;
        for (i, &slot) in slots.iter().enumerate() {
            if i > 0 {
                gap = gap.max(ops[i - 1]);
            }
            if let Some(new) = self.map[slot.index()] {
                if gap == Operator::Less && !run.is_empty() {
                    run.sort_unstable();
                    seq.append(&mut run);
                }
                run.push(new);
                gap = Operator::Equal;
            }
        }
        seq
    }

    fn matches(&self, id: &Identity) -> bool {
        restrict_chain(id, |d| self.map[d.index()])
            .is_some_and(|r| canonicalize(&r, CanonicalLevel::Irreducible) == self.canonical)
    }
}

/// Every five-dice `[5D:]` NI whose composing triples restrict to the
/// assigned three-dice NIs, in irreducible form. Restrictions are compared
/// after canonicalisation, so `<N<N` and `<N=N` spellings are equivalent.
pub fn compose5(spec: &CompositionSpec) -> BTreeSet<Identity> {
    let pattern = five_dice_pattern();
    let targets: Vec<TripleTarget> = spec
        .entries
        .iter()
        .map(|e| TripleTarget {
            map: anchor_map(&pattern, e.triple, e.anchor),
            canonical: canonicalize(&e.identity, CanonicalLevel::Irreducible),
        })
        .collect();
    let target_seqs: Vec<Vec<Die>> = targets.iter().map(|t| t.canonical.slots().to_vec()).collect();
    let targets = Arc::new(targets);
    let filter_targets = Arc::clone(&targets);
    let filter = Arc::new(move |digits: &[u8]| {
        let mut slots = Vec::with_capacity(digits.len() + 1);
        let mut ops = Vec::with_capacity(digits.len());
        slots.push(Die::A);
        for &digit in digits {
            let (op, die) = split_digit(digit, 5);
            ops.push(op);
            slots.push(Die::new(die));
        }
        filter_targets.iter().zip(&target_seqs).all(|(t, want)| {
            let seq = t.closed_prefix(&slots, &ops);
            want.starts_with(&seq)
        })
    });
    let search = Enumeration::from_pattern(&pattern, spec.sides, EnumerationMode::AlphabeticalDupe);
    search
        .nontransitive_filtered(filter)
        .filter(|id| targets.iter().all(|t| t.matches(id)))
        .map(|id| canonicalize(&id, CanonicalLevel::Irreducible))
        .collect()
}

/// Whether dropping `drop` from `id` leaves dice that realise the target
/// pattern under some labeling.
pub fn check_removal(id: &Identity, drop: &[Die], target: &Descriptor) -> Result<bool, ChainError> {
    let ds = solve(id)?;
    let k = ds.dice();
    let keep: Vec<usize> = (0..k).filter(|&d| !drop.iter().any(|x| x.index() == d)).collect();
    if keep.len() != target.dice() {
        return Err(ChainError::SurvivorCount {
            dice: k,
            dropped: k - keep.len(),
            left: keep.len(),
            target: target.dice(),
        });
    }
    let pattern = pattern_from_descriptor(target).map_err(VerifyError::from)?;
    Ok(win_matrix(&ds.select(&keep)).pattern().is_isomorphic_to(&pattern))
}
