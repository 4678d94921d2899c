//! Exact symbolic engine for cohomological field theories built from
//! minimal classes on moduli spaces of stable curves.
//!
//! The engine works over exact rationals throughout. It constructs the
//! graded Frobenius state space of a genus-m surface, evaluates the
//! associated topological field theory in closed form and through an
//! independent gluing oracle, models one-edge boundary graphs and the
//! formal pullback calculus of a minimal class, builds the corrected
//! theory that takes the class as a value, and mechanically verifies the
//! field-theory axioms and their first-order deformation analogues over
//! deterministic desk-scale sweeps. A small appendix computes the
//! dimensions of minimal-class spaces in genus one from the classical
//! cusp-form dimension formula.

pub mod cohft_gamma;
pub mod deformations;
pub mod error;
pub mod formal_classes;
pub mod genus1_dimensions;
pub mod stable_graphs;
pub mod state_space;
pub mod topft;
pub mod verification;

pub use cohft_gamma::{CorrectionCase, Omega};
pub use error::{Error, Result};
pub use formal_classes::{
    check_takes_value, pullback_gamma_q, pullback_gamma_r, ClassSymbol, FormalClass, FormalGamma,
    ProductClass, SpaceLabel,
};
pub use stable_graphs::{
    enumerate_one_edge_graphs, q_image_is_boundary, stabilize_after_forgetting, ContractionResult,
    IrrGraph, OneEdgeGraph, SepGraph,
};
pub use state_space::{
    build_state_space, koszul_sign, BasisVector, BivectorTerm, Coeff, GradingMode, StateSpace,
    Vector,
};
pub use topft::{evaluate_topft_closed, evaluate_topft_oracle, is_stable, trivial_cohft_value};
pub use verification::{verify_theorem_1, SweepConfig, VerificationReport};

pub use deformations::{
    check_deformation_axioms, check_isotropic, check_topft_preserving,
    extract_minimal_candidates, CorrectionDeformation, Deformation, DeformationReport,
    ExplicitTable, MinimalCandidate, SignFlip,
};
