//! Stabilized P1 finite elements for the unique continuation problem of the
//! Helmholtz equation `Δu + k²u = -f` with data `u = q` on a subdomain.
//!
//! The discrete solution is the saddle point of a Lagrangian that combines a
//! data-fit term on omega, a gradient-jump penalty on interior faces, and the
//! weak Helmholtz constraint enforced by a dual variable in `H¹₀`.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod region;
pub mod solver;
pub mod sparse;

pub use analysis::{
    error_norms, error_norms_in, fit_rate, run_convergence_study, star_norm, ConvergenceReport,
    ErrorNorms, ErrorReport, ProblemKind, Quantity, StudyConfig,
};
pub use assembly::{
    assemble_jump, assemble_load, assemble_mass, assemble_stiffness, l2_project, DofMap, Execution,
};
pub use error::{Error, Result};
pub use geometry::Geometry;
pub use mesh::{build_uniform_mesh, Mesh, Rect};
pub use problems::{perturb, Perturbation, PerturbationLaw, ProblemCase};
pub use quadrature::Quadrature;
pub use region::{classify_elements, Region};
pub use solver::{
    apply_g, build_system, solve, LinearSystem, ProblemData, Solution, StabilizationParams,
};
pub use sparse::SparseMatrix;
