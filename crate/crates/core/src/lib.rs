//! Nontransitive identities: chains like `A<C<B<C<B<A<B<A<C` that describe
//! every perfectly nontransitive dice set sharing one face ordering.

pub mod analyze;
pub mod canonical;
pub mod chains;
pub mod descriptor;
pub mod dice;
pub mod encoding;
pub mod enumerate;
pub mod expand;
pub mod notation;
pub mod oracle;
pub mod pattern;

pub use analyze::{find_repeats, gap_sequence, GapSequence, RepeatReport};
pub use canonical::{canonicalize, is_alphabetical, is_irreducible, CanonicalLevel};
pub use chains::{
    check_removal, compose5, decompose5, parse_composition_spec, restrict, step_map, step_relabel, ChainError,
    Component, CompositionEntry, CompositionSpec, DiePermutation, Restriction,
};
pub use descriptor::{is_viable, parse_descriptor, Descriptor, DescriptorError};
pub use dice::{
    dice_to_identity, is_nontransitive, measured_pattern, parse_dice_file, solve, win_matrix, DiceSet, VerifyError,
    WinMatrix,
};
pub use encoding::{decode_identity, encode_identity, EncodedIdentity, EncodingError};
pub use enumerate::{
    enumerate_ni, enumerate_viable, parse_ni_list, write_ni_list, EnumerateError, Enumeration, EnumerationMode,
    EnumerationRecord, NiList,
};
pub use expand::{
    add_zero, block_dominance, identity_addition, multiply_by_one, nest, verify_expansion, ExpandError, Expansion,
    NestMode, SubstitutionPlan,
};
pub use notation::{format_identity, parse_identity, Die, Identity, NotationError, Operator};
pub use oracle::{brute_force_oracle, OracleError};
pub use pattern::{pattern_from_descriptor, WinPattern};
