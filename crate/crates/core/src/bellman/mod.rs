//! Bellman function, power functions, approximants and generalized-convexity certification.

pub mod approximant;
pub mod certify;
pub mod mollify;
pub mod nt;
pub mod power;
pub mod rigidity;
pub mod xy;

pub use approximant::{calibrate_c1, certify_rn, ApproximantSpec, C1Calibration};
pub use certify::{
    calibrate_delta, certify, certify_bellman, min_gen_hess, min_gen_hess_at, ConvexityCertificate, Normalization,
    Pair, SamplingPlan, Verdict, Witness,
};
pub use mollify::{mollified_q, MollifierSpec, Smooth};
pub use nt::{BellmanSpec, QEval};
