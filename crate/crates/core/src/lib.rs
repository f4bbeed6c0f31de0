pub mod check;
pub mod classical;
pub mod error;
pub mod identities;
pub mod inversion;
pub mod par;
pub mod qcore;
pub mod qintegral;
pub mod quadrature;
pub mod sample;
pub mod suite;
pub mod sum;

pub use check::{CheckResult, Status};
pub use error::{Error, Result};
pub use qcore::{Base, SeriesKind, SeriesSpec, SeriesValue, TruncationPolicy};
