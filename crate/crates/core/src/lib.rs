//! Computational laboratory for the arithmetic of `floor(p^c)`, `p` prime and
//! `c > 1` a non-integer rational.
//!
//! * [`exactpow`]: certified floors and fractional parts of rational powers.
//! * [`primes`]: segmented sieve, prime counting and the von Mangoldt table.
//! * [`factor`]: primality, Omega and squarefreeness below 2^127.
//! * [`experiments`]: almost-prime, squarefree and prime censuses, residue
//!   histograms, level-of-distribution error and star discrepancy.
//! * [`expsum`]: direct evaluation of the exponential sums, each paired with its
//!   analytic bound.
//! * [`constants`]: sieve constants, the small-c inequality system, the large-c
//!   regime constants and the margin argument.
//! * [`verify`]: the acceptance suite shared by the CLI and the tests.

pub mod caps;
pub mod constants;
pub mod error;
pub mod exactpow;
pub mod experiments;
pub mod expsum;
pub mod factor;
pub mod json;
pub mod primes;
pub mod verify;

pub use caps::Caps;
pub use error::{LabError, Result};
pub use exactpow::{parse_exponent, CertifiedReal, RationalExponent, Q64};
pub use factor::FactorSignature;
