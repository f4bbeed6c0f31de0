//! Summation and expansion identities, each with independent left- and
//! right-hand evaluators.

mod derivations;
mod expansions;
mod lemmas;
mod terminating;

pub use derivations::{check_base_q2_derivation, check_phi21_derivation, check_phi32_derivation, RELATION_TOL};
pub use expansions::{
    check_base_q2_reduces_to_quadratic, check_curious_base_q2, check_curious_expansion, check_curious_expansion_a0,
    check_curious_expansion_c0, check_curious_phi21, check_curious_phi32, check_phi21_reduces_to_base_q2,
    check_phi21_reduces_to_curious, check_phi32_large_e, check_phi32_m0, check_quadratic_expansion,
    curious_expansion_sum, CuriousParams,
};
pub use lemmas::{
    check_finite_3phi2, check_finite_3phi2_m0, check_finite_3phi2_m1, check_heine, check_q_gauss, check_q_kummer,
    check_rogers_6phi5, check_rogers_to_kummer,
};
pub use terminating::{
    check_10phi9, check_10phi9_exact, check_curious_terminating, check_curious_terminating_a0,
    check_curious_terminating_exact, curious_terminating_sides, ten_phi_nine_sides,
};

use crate::error::{Error, Result};
pub(crate) use crate::qcore::sum_terms;

/// Tolerance for the classical summation lemmas.
pub const LEMMA_TOL: f64 = 1e-9;
/// Tolerance for the infinite expansions and their reductions.
pub const EXPANSION_TOL: f64 = 1e-8;
/// Tolerance for floating evaluation of terminating sums. The summands
/// alternate, so the bound follows the lemma tolerance rather than unit roundoff.
pub const TERMINATING_TOL: f64 = 1e-9;

/// Rejects a parameter assignment outside the convergence region.
pub(crate) fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(what.to_string()))
    }
}

pub(crate) fn nonzero(x: f64, context: &'static str, index: i64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        Err(Error::ZeroDenominator { context, index })
    } else {
        Ok(x)
    }
}
