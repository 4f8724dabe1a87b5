//! `[kDnS:steps]` descriptors.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::notation::{Die, MAX_DICE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error("malformed descriptor {text:?}: {reason}")]
    Syntax { text: String, reason: &'static str },
    #[error("dice count must be odd and at least 3, got {0}")]
    DiceCount(usize),
    #[error("side count must be at least 1")]
    Sides,
    #[error("{dice} dice need {expected} step offsets, got {found}")]
    StepCount { dice: usize, expected: usize, found: usize },
    #[error("primary order {0:?} is not a permutation of the dice")]
    PrimaryOrder(String),
    #[error("descriptor {0} has no side count")]
    MissingSides(String),
    #[error("step pattern {0} does not give a perfectly nontransitive win pattern")]
    InvalidPattern(String),
}

/// Dice count, side count, secondary win-chain step offsets and an optional
/// primary-chain order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Descriptor {
    dice: usize,
    sides: Option<usize>,
    steps: Vec<usize>,
    primary_order: Option<Vec<Die>>,
}

impl Descriptor {
    /// Descriptor with every secondary chain at the assumed offset.
    pub fn new(dice: usize, sides: usize) -> Result<Descriptor, DescriptorError> {
        if dice < 3 || dice.is_multiple_of(2) {
            return Err(DescriptorError::DiceCount(dice));
        }
        Descriptor::with_steps(dice, Some(sides), vec![0; (dice - 1) / 2 - 1])
    }

    pub fn with_steps(dice: usize, sides: Option<usize>, steps: Vec<usize>) -> Result<Descriptor, DescriptorError> {
        if dice < 3 || dice.is_multiple_of(2) || dice > MAX_DICE {
            return Err(DescriptorError::DiceCount(dice));
        }
        if sides == Some(0) {
            return Err(DescriptorError::Sides);
        }
        let expected = (dice - 1) / 2 - 1;
        if steps.len() != expected {
            return Err(DescriptorError::StepCount { dice, expected, found: steps.len() });
        }
        Ok(Descriptor { dice, sides, steps, primary_order: None })
    }

    pub fn with_primary_order(mut self, order: Vec<Die>) -> Result<Descriptor, DescriptorError> {
        let mut seen = vec![false; self.dice];
        let valid = order.len() == self.dice
            && order.iter().all(|d| d.index() < self.dice && !std::mem::replace(&mut seen[d.index()], true));
        if !valid {
            return Err(DescriptorError::PrimaryOrder(order.iter().map(|d| d.letter()).collect()));
        }
        self.primary_order = Some(order);
        Ok(self)
    }

    pub fn dice(&self) -> usize {
        self.dice
    }

    pub fn sides(&self) -> Option<usize> {
        self.sides
    }

    pub fn require_sides(&self) -> Result<usize, DescriptorError> {
        self.sides.ok_or_else(|| DescriptorError::MissingSides(self.to_string()))
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn primary_order(&self) -> Option<&[Die]> {
        self.primary_order.as_deref()
    }

    /// Same dice and steps, no primary-order suffix.
    pub fn canonical(&self) -> Descriptor {
        Descriptor { primary_order: None, ..self.clone() }
    }

    pub fn with_sides(&self, sides: usize) -> Descriptor {
        Descriptor { sides: Some(sides), ..self.clone() }
    }

    /// Stride of every win chain: the primary chain has stride 1 and
    /// secondary chain `j` has stride `j + 1 + steps[..j].sum()`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1];
        let mut acc = 0;
        for (j, step) in self.steps.iter().enumerate() {
            acc += step;
            strides.push(j + 2 + acc);
        }
        strides
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}D", self.dice)?;
        if let Some(n) = self.sides {
            write!(f, "{n}S")?;
        }
        for &step in &self.steps {
            if step == 0 {
                write!(f, ":")?;
            } else {
                write!(f, ":{step}")?;
            }
        }
        write!(f, "]")?;
        if let Some(order) = &self.primary_order {
            write!(f, " ")?;
            for d in order {
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Descriptor {
    type Err = DescriptorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_descriptor(s)
    }
}

fn take_number(s: &str) -> (Option<usize>, &str) {
    let end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    if end == 0 {
        (None, s)
    } else {
        (s[..end].parse().ok(), &s[end..])
    }
}

pub fn parse_descriptor(text: &str) -> Result<Descriptor, DescriptorError> {
    let syntax = |reason| DescriptorError::Syntax { text: text.to_string(), reason };
    let s = text.trim();
    let body = s.strip_prefix('[').ok_or_else(|| syntax("expected '['"))?;
    let close = body.find(']').ok_or_else(|| syntax("missing ']'"))?;
    let (inner, suffix) = (&body[..close], body[close + 1..].trim());

    let (dice, rest) = take_number(inner);
    let dice = dice.ok_or_else(|| syntax("expected dice count"))?;
    let rest = rest.strip_prefix('D').ok_or_else(|| syntax("expected 'D' after dice count"))?;
    let (sides, rest) = take_number(rest);
    let rest = match sides {
        Some(_) => rest.strip_prefix('S').ok_or_else(|| syntax("expected 'S' after side count"))?,
        None => rest,
    };
    let mut steps = Vec::new();
    let mut rest = rest;
    while let Some(after) = rest.strip_prefix(':') {
        let (step, tail) = take_number(after);
        steps.push(step.unwrap_or(0));
        rest = tail;
    }
    if !rest.is_empty() {
        return Err(syntax("unexpected text inside brackets"));
    }
    if dice < 3 || dice % 2 == 0 || dice > MAX_DICE {
        return Err(DescriptorError::DiceCount(dice));
    }
    let mut descriptor = Descriptor::with_steps(dice, sides, steps)?;
    if !suffix.is_empty() {
        let order = suffix
            .chars()
            .map(Die::from_letter)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| DescriptorError::PrimaryOrder(suffix.to_string()))?;
        descriptor = descriptor.with_primary_order(order)?;
    }
    Ok(descriptor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for text in ["[3D3S]", "[5D3S:]", "[5D3S:1]", "[7D3S::]", "[5D:]", "[5D:1] ADBEC", "[7D4S:2:]"] {
            let d: Descriptor = text.parse().unwrap();
            assert_eq!(d.to_string(), text);
        }
    }

    #[test]
    fn fields() {
        let d: Descriptor = "[5D3S:1]".parse().unwrap();
        assert_eq!((d.dice(), d.sides(), d.steps()), (5, Some(3), &[1][..]));
        assert_eq!(d.strides(), vec![1, 3]);
        let d: Descriptor = "[7D3S::]".parse().unwrap();
        assert_eq!(d.strides(), vec![1, 2, 3]);
        let d: Descriptor = "[3D4S]".parse().unwrap();
        assert_eq!(d.strides(), vec![1]);
    }

    #[test]
    fn rejects_bad_descriptors() {
        assert_eq!("[4D3S]".parse::<Descriptor>().unwrap_err(), DescriptorError::DiceCount(4));
        assert!(matches!(
            "[5D3S]".parse::<Descriptor>().unwrap_err(),
            DescriptorError::StepCount { dice: 5, expected: 1, found: 0 }
        ));
        assert!(matches!("3D3S".parse::<Descriptor>(), Err(DescriptorError::Syntax { .. })));
        assert!(matches!("[3D3S".parse::<Descriptor>(), Err(DescriptorError::Syntax { .. })));
        assert_eq!("[3D0S]".parse::<Descriptor>().unwrap_err(), DescriptorError::Sides);
        assert!(matches!("[5D:] ABCDA".parse::<Descriptor>(), Err(DescriptorError::PrimaryOrder(_))));
        assert!(matches!("[5D:] ABC".parse::<Descriptor>(), Err(DescriptorError::PrimaryOrder(_))));
    }
}

/// True when each of the descriptor's `k` dice owns exactly `n` slots. A
/// descriptor without a side count accepts any common face count.
pub fn is_viable(id: &crate::notation::Identity, d: &Descriptor) -> bool {
    if id.dice_count() > d.dice() {
        return false;
    }
    let counts = id.face_counts(d.dice());
    let n = d.sides().unwrap_or(counts[0]);
    n > 0 && counts.iter().all(|&c| c == n)
}
