//! Building larger NIs from smaller ones.
//!
//! The rewrites themselves are plain string surgery; whether the result is
//! nontransitive is checked afterwards with [`verify_expansion`] instead of
//! being assumed. Addition and nesting are only known to work empirically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{canonicalize, CanonicalLevel};
use crate::dice::{is_nontransitive, measured_pattern, solve, win_matrix, VerifyError};
use crate::notation::{Die, Identity, Operator, MAX_DICE};
use crate::pattern::WinPattern;

#[derive(Debug, Error)]
pub enum ExpandError {
    #[error("identities have different shapes: {first} vs {other}")]
    ShapeMismatch { first: String, other: String },
    #[error("{found} joiners given for {ids} identities")]
    JoinerCount { ids: usize, found: usize },
    #[error("nothing to add")]
    Empty,
    #[error("substitutions realise different win patterns: {first} vs {other}")]
    PatternMismatch { first: String, other: String },
    #[error("base slots {slots:?} are tied, so they must use the same substituting identity")]
    SpecialCase { slots: Vec<usize> },
    #[error("plan has {found} entries, base needs {expected}")]
    PlanLength { expected: usize, found: usize },
    #[error("result would need {0} dice")]
    TooManyDice(usize),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// How a substituting NI's dice are named in the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NestMode {
    /// Keep the substituting alphabet: same dice, more faces.
    FaceExponentiation,
    /// Give each base die its own block of letters: more dice and faces.
    DiceMultiplication,
}

/// Which substituting NI replaces each slot of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionPlan {
    mode: NestMode,
    per_slot: Vec<Identity>,
}

impl SubstitutionPlan {
    /// One substituting NI for every slot.
    pub fn uniform(base: &Identity, sub: &Identity, mode: NestMode) -> SubstitutionPlan {
        SubstitutionPlan { mode, per_slot: vec![sub.clone(); base.slot_count()] }
    }

    /// One substituting NI per base die; `subs[d]` replaces every face of
    /// die `d`.
    pub fn per_die(base: &Identity, subs: &[Identity], mode: NestMode) -> Result<SubstitutionPlan, ExpandError> {
        let k = base.dice_count();
        if subs.len() < k {
            return Err(ExpandError::PlanLength { expected: k, found: subs.len() });
        }
        let per_slot = base.slots().iter().map(|d| subs[d.index()].clone()).collect();
        Ok(SubstitutionPlan { mode, per_slot })
    }

    /// Arbitrary per-slot choices. Experimental: mixing substitutions inside
    /// one die is not known to preserve nontransitivity.
    pub fn per_slot(subs: Vec<Identity>, mode: NestMode) -> SubstitutionPlan {
        SubstitutionPlan { mode, per_slot: subs }
    }

    pub fn mode(&self) -> NestMode {
        self.mode
    }

    pub fn substitutions(&self) -> &[Identity] {
        &self.per_slot
    }
}

/// An expansion output and its check against the pattern it should have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub raw: Identity,
    pub canonical: Identity,
    pub expected: WinPattern,
    pub nontransitive: bool,
}

pub fn verify_expansion(raw: Identity, expected: &WinPattern) -> Expansion {
    let nontransitive = solve(&raw).is_ok_and(|ds| is_nontransitive(&ds, expected));
    Expansion {
        canonical: canonicalize(&raw, CanonicalLevel::Irreducible),
        raw,
        expected: expected.clone(),
        nontransitive,
    }
}

/// Appends `<A=B=...` with one new top face per die.
pub fn add_zero(id: &Identity) -> Identity {
    let mut out = id.clone();
    for d in 0..id.dice_count() {
        let op = if d == 0 { Operator::Less } else { Operator::Equal };
        out.push(op, Die::new(d));
    }
    out
}

/// Doubles every face: `N` becomes `N joiner N`. Tied runs are doubled as a
/// whole, `B=C` becoming `B=C<B=C` rather than `B<B=C<C`, so each tie
/// survives and every pairwise win count goes from `w` to `4w + t`.
pub fn multiply_by_one(id: &Identity, joiner: Operator) -> Identity {
    let mut dice = Vec::with_capacity(2 * id.slot_count());
    let mut ops = Vec::with_capacity(2 * id.slot_count());
    for run in id.runs() {
        for copy in 0..2 {
            for slot in run.clone() {
                if !dice.is_empty() {
                    ops.push(match (slot == run.start, copy) {
                        (false, _) => Operator::Equal,
                        (true, 0) => Operator::Less,
                        (true, _) => joiner,
                    });
                }
                dice.push(id.slots()[slot]);
            }
        }
    }
    let out = Identity::from_parts(dice, ops).expect("one operator between each pair of slots");
    canonicalize(&out, CanonicalLevel::AlphabeticalDupe)
}

/// Concatenates identities of one shape. The expected pattern is that of the
/// first identity.
pub fn identity_addition(ids: &[Identity], joiners: &[Operator]) -> Result<Expansion, ExpandError> {
    let first = ids.first().ok_or(ExpandError::Empty)?;
    if joiners.len() + 1 != ids.len() {
        return Err(ExpandError::JoinerCount { ids: ids.len(), found: joiners.len() });
    }
    let shape = first.shape().ok_or_else(|| VerifyError::NotViable(first.to_string()))?;
    for id in &ids[1..] {
        if id.shape() != Some(shape) {
            return Err(ExpandError::ShapeMismatch { first: first.to_string(), other: id.to_string() });
        }
    }
    let expected = measured_pattern(first)?;
    let mut out = first.clone();
    for (id, &joiner) in ids[1..].iter().zip(joiners) {
        out.extend_with(joiner, id);
    }
    Ok(verify_expansion(out, &expected))
}

/// Replaces every face of `base` with a whole substituting NI.
///
/// Slots tied by `=` in the base are expanded together: they must share a
/// substitution, and its slots are paired off one by one, `x=x` style, so
/// the tie survives. Untied slots are written out one after another.
pub fn nest(base: &Identity, plan: &SubstitutionPlan) -> Result<Expansion, ExpandError> {
    let subs = &plan.per_slot;
    if subs.len() != base.slot_count() {
        return Err(ExpandError::PlanLength { expected: base.slot_count(), found: subs.len() });
    }
    let base_pattern = measured_pattern(base)?;
    let sub_pattern = measured_pattern(&subs[0])?;
    let shape = subs[0].shape();
    for s in &subs[1..] {
        if s.shape() != shape {
            return Err(ExpandError::ShapeMismatch { first: subs[0].to_string(), other: s.to_string() });
        }
        let p = measured_pattern(s)?;
        if p != sub_pattern {
            return Err(ExpandError::PatternMismatch { first: subs[0].to_string(), other: s.to_string() });
        }
    }
    let runs = base.runs();
    for run in &runs {
        if subs[run.clone()].iter().any(|s| s != &subs[run.start]) {
            return Err(ExpandError::SpecialCase { slots: run.clone().collect() });
        }
    }
    let ks = sub_pattern.dice();
    let (expected, total) = match plan.mode {
        NestMode::FaceExponentiation => (sub_pattern.clone(), ks),
        NestMode::DiceMultiplication => (WinPattern::nested(&base_pattern, &sub_pattern), base_pattern.dice() * ks),
    };
    if total > MAX_DICE {
        return Err(ExpandError::TooManyDice(total));
    }
    let label = |base_die: Die, sub_die: Die| match plan.mode {
        NestMode::FaceExponentiation => sub_die,
        NestMode::DiceMultiplication => Die::new(base_die.index() * ks + sub_die.index()),
    };

    let mut dice = Vec::new();
    let mut ops = Vec::new();
    for run in runs {
        let sub = &subs[run.start];
        for (j, &sub_die) in sub.slots().iter().enumerate() {
            for (r, slot) in run.clone().enumerate() {
                if !dice.is_empty() {
                    ops.push(match (r, j) {
                        (0, 0) => Operator::Less,
                        (0, _) => sub.ops()[j - 1],
                        _ => Operator::Equal,
                    });
                }
                dice.push(label(base.slots()[slot], sub_die));
            }
        }
    }
    let raw = Identity::from_parts(dice, ops).expect("one operator between each pair of slots");
    Ok(verify_expansion(raw, &expected))
}

/// Dice built from base die `X` beat every die built from a base die that
/// `X` beats, judged on the win matrix of the minimal solution.
pub fn block_dominance(id: &Identity, base: &WinPattern, block: usize) -> Result<bool, VerifyError> {
    let m = win_matrix(&solve(id)?);
    if m.dice() != base.dice() * block {
        return Ok(false);
    }
    Ok((0..m.dice()).all(|i| (0..m.dice()).all(|j| !base.beats(i / block, j / block) || m.beats(i, j))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_identity;

    fn id(text: &str) -> Identity {
        parse_identity(text).unwrap()
    }

    const X: &str = "A<C<B<C<B<A<B<A<C";

    #[test]
    fn add_zero_appends_a_tail() {
        assert_eq!(add_zero(&id(X)).to_string(), "A<C<B<C<B<A<B<A<C<A=B=C");
        let twice = add_zero(&add_zero(&id(X)));
        assert_eq!(twice.shape(), Some((3, 5)));
    }

    #[test]
    fn multiply_by_one_doubles() {
        let eq = multiply_by_one(&id(X), Operator::Equal);
        assert_eq!(eq.to_string(), "A=A<C=C<B=B<C=C<B=B<A=A<B=B<A=A<C=C");
        let lt = multiply_by_one(&id(X), Operator::Less);
        assert_eq!(lt.slot_count(), 18);
        assert_eq!(canonicalize(&lt, CanonicalLevel::Irreducible), eq);
        let tied = multiply_by_one(&id("A<B=C=C<A=B=B<A<C"), Operator::Less);
        assert_eq!(tied.to_string(), "A<A<B=C=C<B=C=C<A=B=B<A=B=B<A<A<C<C");
        assert_eq!(multiply_by_one(&id("A<B=C"), Operator::Equal).to_string(), "A=A<B=B=C=C");
    }

    #[test]
    fn addition_checks_shapes() {
        let single = identity_addition(&[id(X)], &[]).unwrap();
        assert_eq!(single.raw, id(X));
        assert!(matches!(
            identity_addition(&[id(X), id("A<C<B")], &[Operator::Less]),
            Err(ExpandError::ShapeMismatch { .. })
        ));
        assert!(matches!(identity_addition(&[id(X), id(X)], &[]), Err(ExpandError::JoinerCount { .. })));
        let sum = identity_addition(&[id(X), id(X)], &[Operator::Less]).unwrap();
        assert!(sum.nontransitive);
        assert_eq!(sum.raw.shape(), Some((3, 6)));
    }

    #[test]
    fn face_exponentiation_gives_27_sides() {
        let x = id(X);
        let out = nest(&x, &SubstitutionPlan::uniform(&x, &x, NestMode::FaceExponentiation)).unwrap();
        assert_eq!(out.raw.shape(), Some((3, 27)));
        assert!(out.nontransitive);
    }

    #[test]
    fn dice_multiplication_gives_nine_dice() {
        let x = id(X);
        let out = nest(&x, &SubstitutionPlan::uniform(&x, &x, NestMode::DiceMultiplication)).unwrap();
        assert_eq!(out.raw.shape(), Some((9, 9)));
        assert!(out.nontransitive);
        let cycle = WinPattern::from_fn(3, |i, j| (i + 1) % 3 == j);
        assert!(block_dominance(&out.raw, &cycle, 3).unwrap());
    }

    #[test]
    fn tied_slots_expand_together() {
        let base = id("A<C<B=C<B<A<B<A<C");
        let x = id(X);
        let other = id("A<C<B=C<B<A<B<A<C");
        let plan =
            SubstitutionPlan::per_die(&base, &[x.clone(), x.clone(), other], NestMode::FaceExponentiation).unwrap();
        assert!(matches!(nest(&base, &plan), Err(ExpandError::SpecialCase { slots }) if slots == vec![2, 3]));
        let out = nest(&base, &SubstitutionPlan::uniform(&base, &x, NestMode::DiceMultiplication)).unwrap();
        // the tied B and C slots become paired faces E=H, G=I, ...
        assert!(out.raw.to_string().contains("<E=H<"));
        assert!(out.nontransitive);
    }
}
