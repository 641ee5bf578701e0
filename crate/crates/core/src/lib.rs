//! Exact generation of Collatz convergence stairs.
//!
//! The `j`-th stair of the subtree hanging below `2^(2k)` is the set of
//! naturals whose orbit first meets a power of two, namely `2^(2k)`, after
//! exactly `j` steps. [`analytic::generate_stair`] produces it from closed
//! form terms and checks every candidate with [`bvc::verify_bvc`];
//! [`backward`] and [`coverage`] hold brute-force oracles that agree with it.
//!
//! All arithmetic is exact. Forward loops take explicit step budgets.

pub mod analytic;
pub mod backward;
pub mod bvc;
pub mod coverage;
pub mod error;
pub mod nat;
pub mod numtheory;
pub mod par;

pub use analytic::{
    bvc_from_exponents, enumerate_exponent_sequences, generate_stair, generate_stair_with, term_value, y_k,
    RejectReason, Stair, StairTerm, Status, TermExpr,
};
pub use backward::{stairs_icltz, subtree_root, subtree_stairs, subtree_stairs_bfs, tree_dot, StairSet, TreeRoot};
pub use bvc::{verify_bvc, Bvc, ParityRule, Rejection, Verification};
pub use coverage::{
    check_equivalence, classify, coverage_scan, coverage_scan_range, verify_forward, CoverageReport, Mismatch,
    Placement, ScanConfig,
};
pub use error::{Error, Result};
pub use nat::Nat;
pub use numtheory::{
    collatz_step, inverse_step, is_power_of_two, orbit, stair_index_icltz, stair_index_iu, StairIndex,
    DEFAULT_MAX_STEPS,
};
pub use par::Execution;
