//! Hypercyclicity and subspace criteria for weighted backward shifts.

pub mod certificates;
pub mod condn;
pub mod hyper;
pub mod poly;
pub mod tail;
pub mod verdict;

pub use certificates::{
    blockcert_to_growthcert, pump, pumping_check, verify_block, verify_growthcert, GrowthCertificate,
    PumpedCertificate,
};
pub use condn::{cond_n_check, CondNReport, TriState};
pub use hyper::{hypercyclicity_test, Hypercyclicity, HypercyclicityReport};
pub use poly::{poly_hypothesis_check, PolyVerdict, Premise};
pub use tail::{tail_inf, theta, window_max_inf, BlockCertificate, Criterion, CriterionValue, Route, Theta};
pub use verdict::{bilateral_verdict, subspace_verdict, subspace_verdict_at, Outcome, Verdict};
