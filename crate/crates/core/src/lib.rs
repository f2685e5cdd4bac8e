//! Permanence of planar S-systems: exact classification, replicator embedding
//! and numerical dynamics.

pub mod classifier;
pub mod dihedral;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod params;
pub mod replicator;
pub mod scenarios;
pub mod scalar;

pub use classifier::{
    classify, classify_s_system, l_infinity, ratio_bound_check, robust_permanence, CaseLabel,
    Classification, Reason, RobustCase, Verdict,
};
pub use dihedral::{apply_dihedral, induced_c_map, DihedralElement};
pub use error::{Error, Result};
pub use params::{
    c_vector, find_positive_equilibrium, jacobian, sign_pattern_geometry, signed_area,
    to_exponential, CVector, EquilibriumSet, ExactParams, ExpParams, JacobianSummary, Params,
    PointGeometry, PositiveEquilibrium, SSystemSpec,
};
pub use scalar::{Deadband, Scalar, Sign};
pub use dynamics::{
    focal_value_l1, integrate_simplex, integrate_uv, permanence_probe, poincare_return_map, three_cycle_scenario,
    BifurcationQuantities, CycleReport, IntegratorConfig, ProbeReport, ProbeVerdict, SectionRay, Stability, TimeScale,
    Trajectory,
};
pub use scenarios::{case_gallery, lotka, selkov, three_cycle, Expected, Scenario, ScenarioArgs};
