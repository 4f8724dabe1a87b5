//! Base-`2k` digit encoding of identities that start with die A.
//!
//! Digit `d < k` stands for `=` followed by die `d`; digit `d >= k` for `<`
//! followed by die `d - k`. The leading `A` is implicit. Numeric order of
//! the digit strings is the order the enumerator walks.

use std::fmt;

use thiserror::Error;

use crate::notation::{Die, Identity, Operator, MAX_DICE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("only identities starting with die A can be encoded, got {0}")]
    NotAnchored(Die),
    #[error("die {die} is out of range for {dice} dice")]
    DieOutOfRange { die: Die, dice: usize },
    #[error("digit {digit} at position {position} is out of range for base {base}")]
    DigitOutOfRange { digit: u8, position: usize, base: usize },
    #[error("unsupported dice count {0}")]
    DiceCount(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EncodedIdentity {
    dice: usize,
    digits: Vec<u8>,
}

impl EncodedIdentity {
    pub fn new(dice: usize, digits: Vec<u8>) -> Result<EncodedIdentity, EncodingError> {
        if dice == 0 || dice > MAX_DICE {
            return Err(EncodingError::DiceCount(dice));
        }
        let base = 2 * dice;
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d as usize >= base) {
            return Err(EncodingError::DigitOutOfRange { digit, position, base });
        }
        Ok(EncodedIdentity { dice, digits })
    }

    pub fn dice(&self) -> usize {
        self.dice
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn base(&self) -> usize {
        2 * self.dice
    }
}

/// Digits print as base-36 characters, so up to 18 dice fit one character
/// per digit.
impl fmt::Display for EncodedIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.base() <= 36 {
            for &d in &self.digits {
                write!(f, "{}", char::from_digit(d as u32, 36).unwrap())?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

pub(crate) fn digit(op: Operator, die: usize, k: usize) -> u8 {
    match op {
        Operator::Equal => die as u8,
        Operator::Less => (k + die) as u8,
    }
}

pub(crate) fn split_digit(d: u8, k: usize) -> (Operator, usize) {
    let d = d as usize;
    if d < k {
        (Operator::Equal, d)
    } else {
        (Operator::Less, d - k)
    }
}

pub fn encode_identity(id: &Identity, dice: usize) -> Result<EncodedIdentity, EncodingError> {
    if dice == 0 || dice > MAX_DICE {
        return Err(EncodingError::DiceCount(dice));
    }
    if id.first() != Die::A {
        return Err(EncodingError::NotAnchored(id.first()));
    }
    let mut digits = Vec::with_capacity(id.slot_count() - 1);
    for (op, die) in id.rest() {
        if die.index() >= dice {
            return Err(EncodingError::DieOutOfRange { die, dice });
        }
        digits.push(digit(op, die.index(), dice));
    }
    Ok(EncodedIdentity { dice, digits })
}

pub fn decode_identity(e: &EncodedIdentity) -> Identity {
    Identity::new(
        Die::A,
        e.digits.iter().map(|&d| {
            let (op, die) = split_digit(d, e.dice);
            (op, Die::new(die))
        }),
    )
}

/// Decodes a raw digit slice, checking every digit against base `2k`.
pub fn decode_digits(digits: &[u8], dice: usize) -> Result<Identity, EncodingError> {
    EncodedIdentity::new(dice, digits.to_vec()).map(|e| decode_identity(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_identity;

    #[test]
    fn lowest_viable_three_by_three() {
        let id = parse_identity("A=A=A=B=B=B=C=C=C").unwrap();
        let e = encode_identity(&id, 3).unwrap();
        assert_eq!(e.to_string(), "00111222");
        assert_eq!(decode_identity(&e), id);
    }

    #[test]
    fn digit_rule() {
        let id = parse_identity("A<C<B<C<B<A<B<A<C").unwrap();
        let e = encode_identity(&id, 3).unwrap();
        assert_eq!(e.digits(), &[5, 4, 5, 4, 3, 4, 3, 5]);
        assert_eq!(decode_identity(&e), id);
        let next = decode_digits(&[0, 0, 1, 1, 1, 2, 2, 3], 3).unwrap();
        assert_eq!(next.to_string(), "A=A=A=B=B=B=C=C<A");
    }

    #[test]
    fn single_slot_is_empty() {
        let e = encode_identity(&parse_identity("A").unwrap(), 3).unwrap();
        assert!(e.digits().is_empty());
        assert_eq!(decode_identity(&e).to_string(), "A");
    }

    #[test]
    fn errors() {
        let id = parse_identity("B<A").unwrap();
        assert_eq!(encode_identity(&id, 3).unwrap_err(), EncodingError::NotAnchored(Die::new(1)));
        let id = parse_identity("A<D").unwrap();
        assert!(matches!(encode_identity(&id, 3), Err(EncodingError::DieOutOfRange { .. })));
        assert!(matches!(
            decode_digits(&[0, 6], 3),
            Err(EncodingError::DigitOutOfRange { digit: 6, position: 1, base: 6 })
        ));
    }
}
