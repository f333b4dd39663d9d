//! Finite labeled structures, satisfaction, canonical forms and model
//! enumeration.

mod canon;
mod enumerate;
mod io;
mod named;
mod structure;

pub use canon::{canonical_code, canonical_form, canonical_labeling, encode, isomorphic, Code, IsoClass, MAX_CANON_N};
pub use enumerate::{enumerate_models, extensions};
pub use io::{format_model, parse_model, parse_models};
pub use named::{named_model, perm_language, permutation};
pub use structure::{distinct, Structure};
