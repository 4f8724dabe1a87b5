//! Identity notation: chains of die-face slots joined by `<` and `=`.
//!
//! `A<C<B<C<B<A<B<A<C` reads left to right from the lowest face to the
//! highest. Each letter is one face of the named die; `<` means the next face
//! is strictly higher, `=` that it has the same value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest number of dice a label can name (`A` through `Z`).
pub const MAX_DICE: usize = 26;

/// A die label, `0` for `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Die(u8);

impl Die {
    pub const A: Die = Die(0);

    /// Panics if `index >= MAX_DICE`.
    pub fn new(index: usize) -> Die {
        assert!(index < MAX_DICE, "die index {index} out of range");
        Die(index as u8)
    }

    pub fn from_letter(c: char) -> Option<Die> {
        c.is_ascii_uppercase().then(|| Die(c as u8 - b'A'))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self.0) as char
    }
}

impl fmt::Display for Die {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Operator {
    Equal,
    Less,
}

impl Operator {
    pub fn symbol(self) -> char {
        match self {
            Operator::Equal => '=',
            Operator::Less => '<',
        }
    }

    pub fn from_symbol(c: char) -> Option<Operator> {
        match c {
            '=' => Some(Operator::Equal),
            '<' => Some(Operator::Less),
            _ => None,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for Operator {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Operator::from_symbol(c).ok_or(NotationError::UnexpectedChar { offset: 0, found: c }),
            _ => Err(NotationError::BadOperator(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("empty identity")]
    Empty,
    #[error("unexpected character {found:?} at offset {offset}")]
    UnexpectedChar { offset: usize, found: char },
    #[error("consecutive operators at offset {offset}")]
    ConsecutiveOperators { offset: usize },
    #[error("missing operator before die at offset {offset}")]
    MissingOperator { offset: usize },
    #[error("identity starts with an operator at offset {offset}")]
    LeadingOperator { offset: usize },
    #[error("trailing operator at offset {offset}")]
    TrailingOperator { offset: usize },
    #[error("expected a single operator, got {0:?}")]
    BadOperator(String),
}

impl NotationError {
    /// Byte offset of the offending character, when there is one.
    pub fn offset(&self) -> Option<usize> {
        match *self {
            NotationError::UnexpectedChar { offset, .. }
            | NotationError::ConsecutiveOperators { offset }
            | NotationError::MissingOperator { offset }
            | NotationError::LeadingOperator { offset }
            | NotationError::TrailingOperator { offset } => Some(offset),
            NotationError::Empty | NotationError::BadOperator(_) => None,
        }
    }
}

/// An ordered chain of die-face slots.
///
/// Stored as the slot labels plus the operator between each adjacent pair,
/// so `ops.len() + 1 == dice.len()` always holds. Viability (equal face
/// counts) is a separate predicate and not enforced here.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identity {
    dice: Vec<Die>,
    ops: Vec<Operator>,
}

impl Identity {
    /// A chain of one slot.
    pub fn single(first: Die) -> Identity {
        Identity { dice: vec![first], ops: Vec::new() }
    }

    pub fn new(first: Die, rest: impl IntoIterator<Item = (Operator, Die)>) -> Identity {
        let mut id = Identity::single(first);
        for (op, die) in rest {
            id.push(op, die);
        }
        id
    }

    /// Builds from parallel slot/operator vectors. Returns `None` when the
    /// lengths do not line up.
    pub fn from_parts(dice: Vec<Die>, ops: Vec<Operator>) -> Option<Identity> {
        (!dice.is_empty() && ops.len() + 1 == dice.len()).then_some(Identity { dice, ops })
    }

    pub fn push(&mut self, op: Operator, die: Die) {
        self.ops.push(op);
        self.dice.push(die);
    }

    /// Appends `other` after `joiner`.
    pub fn extend_with(&mut self, joiner: Operator, other: &Identity) {
        self.ops.push(joiner);
        self.ops.extend_from_slice(&other.ops);
        self.dice.extend_from_slice(&other.dice);
    }

    pub fn first(&self) -> Die {
        self.dice[0]
    }

    pub fn rest(&self) -> impl Iterator<Item = (Operator, Die)> + '_ {
        self.ops.iter().copied().zip(self.dice[1..].iter().copied())
    }

    pub fn slots(&self) -> &[Die] {
        &self.dice
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn slot_count(&self) -> usize {
        self.dice.len()
    }

    /// One more than the highest die label used.
    pub fn dice_count(&self) -> usize {
        self.dice.iter().map(|d| d.index() + 1).max().unwrap_or(0)
    }

    /// Number of slots held by each die, indexed by label, over `k` dice.
    pub fn face_counts(&self, k: usize) -> Vec<usize> {
        let mut counts = vec![0; k.max(self.dice_count())];
        for d in &self.dice {
            counts[d.index()] += 1;
        }
        counts
    }

    /// `(k, n)` when every die `0..k` owns exactly `n` slots, with `k`
    /// inferred from the highest label.
    pub fn shape(&self) -> Option<(usize, usize)> {
        let k = self.dice_count();
        let counts = self.face_counts(k);
        let n = counts[0];
        (n > 0 && counts.iter().all(|&c| c == n)).then_some((k, n))
    }

    pub fn less_count(&self) -> usize {
        self.ops.iter().filter(|&&op| op == Operator::Less).count()
    }

    /// Applies `map` to every slot label.
    pub fn relabel(&self, map: impl Fn(Die) -> Die) -> Identity {
        Identity { dice: self.dice.iter().map(|&d| map(d)).collect(), ops: self.ops.clone() }
    }

    /// Slot ranges of maximal `=`-joined runs, in chain order.
    pub fn runs(&self) -> Vec<std::ops::Range<usize>> {
        let mut runs = Vec::new();
        let mut start = 0;
        for (i, op) in self.ops.iter().enumerate() {
            if *op == Operator::Less {
                runs.push(start..i + 1);
                start = i + 1;
            }
        }
        runs.push(start..self.dice.len());
        runs
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [Die], &mut [Operator]) {
        (&mut self.dice, &mut self.ops)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dice[0])?;
        for (op, die) in self.rest() {
            write!(f, "{op}{die}")?;
        }
        Ok(())
    }
}

impl FromStr for Identity {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_identity(s)
    }
}

/// Parses identity notation like `A<C<B=C`. Whitespace between tokens is ignored.
pub fn parse_identity(text: &str) -> Result<Identity, NotationError> {
    let mut dice = Vec::new();
    let mut ops = Vec::new();
    let mut pending: Option<(Operator, usize)> = None;
    for (offset, c) in text.char_indices() {
        if c.is_whitespace() {
            continue;
        }
        if let Some(die) = Die::from_letter(c) {
            match pending.take() {
                Some((op, _)) => ops.push(op),
                None if !dice.is_empty() => return Err(NotationError::MissingOperator { offset }),
                None => {}
            }
            dice.push(die);
        } else if let Some(op) = Operator::from_symbol(c) {
            if pending.is_some() {
                return Err(NotationError::ConsecutiveOperators { offset });
            }
            if dice.is_empty() {
                return Err(NotationError::LeadingOperator { offset });
            }
            pending = Some((op, offset));
        } else {
            return Err(NotationError::UnexpectedChar { offset, found: c });
        }
    }
    if let Some((_, offset)) = pending {
        return Err(NotationError::TrailingOperator { offset });
    }
    if dice.is_empty() {
        return Err(NotationError::Empty);
    }
    Ok(Identity { dice, ops })
}

pub fn format_identity(id: &Identity) -> String {
    id.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_three_dice_example() {
        let id = parse_identity("A<C<B<C<B<A<B<A<C").unwrap();
        assert_eq!(id.slot_count(), 9);
        assert!(id.ops().iter().all(|&op| op == Operator::Less));
        assert_eq!(id.shape(), Some((3, 3)));
        assert_eq!(id.to_string(), "A<C<B<C<B<A<B<A<C");
    }

    #[test]
    fn single_slot() {
        let id = parse_identity("A").unwrap();
        assert_eq!(id.slot_count(), 1);
        assert!(id.ops().is_empty());
        assert_eq!(format_identity(&id), "A");
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(parse_identity("A<<B").unwrap_err(), NotationError::ConsecutiveOperators { offset: 2 });
        assert_eq!(parse_identity("A<").unwrap_err(), NotationError::TrailingOperator { offset: 1 });
        assert_eq!(parse_identity("<A").unwrap_err(), NotationError::LeadingOperator { offset: 0 });
        assert_eq!(parse_identity("AB").unwrap_err(), NotationError::MissingOperator { offset: 1 });
        assert_eq!(parse_identity("A<b").unwrap_err(), NotationError::UnexpectedChar { offset: 2, found: 'b' });
        assert_eq!(parse_identity("  ").unwrap_err(), NotationError::Empty);
    }

    #[test]
    fn whitespace_is_skipped() {
        let id = parse_identity(" A < B = C ").unwrap();
        assert_eq!(id.to_string(), "A<B=C");
    }

    #[test]
    fn runs_split_on_less() {
        let id = parse_identity("A=B<C<A=A=B").unwrap();
        assert_eq!(id.runs(), vec![0..2, 2..3, 3..6]);
    }
}
