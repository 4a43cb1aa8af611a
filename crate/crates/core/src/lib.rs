//! Primitive words `p`, `q` with `|p| = 2|q|` whose product `pq` is not
//! primitive: normal-form classification, constructive and brute-force
//! enumeration, exact counting in several equivalent formulations, and
//! finite-scale checks of their growth.
//!
//! ```
//! use primword::counting::{eps1_divisor_sum, eps2_divisor_sum};
//! use primword::pairs::classify_pair;
//! use primword::{Case, Word};
//!
//! let p = Word::parse("bbabbabb", 2).unwrap();
//! let q = Word::parse("abba", 2).unwrap();
//! let witness = classify_pair(&p, &q).unwrap();
//! assert_eq!(witness.case, Case::II);
//! assert_eq!(witness.root.to_string(), "bba");
//!
//! assert_eq!(eps1_divisor_sum(2, 4).unwrap(), 42u32.into());
//! assert_eq!(eps2_divisor_sum(2, 4).unwrap(), 6u32.into());
//! ```

pub mod asymptotics;
pub mod counting;
pub mod error;
pub mod numtheory;
pub mod pairs;
pub mod parallel;
pub mod properties;
pub mod verify;
pub mod word;

pub use error::{Error, PairRequirement, Result};
pub use numtheory::BigCount;
pub use pairs::{Case, PairWitness};
pub use word::{RootDecomposition, Word};
