//! Core algorithms for metric cartography: quality functionals on relations
//! between finite metric spaces, Gromov–Hausdorff style comparison, dilation
//! structures with numerically checked axioms, zoom sequences, and foveal
//! approximations.

pub mod convergence;
pub mod dilation;
pub mod error;
pub mod gh;
pub mod metric;
pub mod relation;
pub mod sampling;
pub mod zoom;

pub use convergence::{dyadic_schedule, ConvergenceEstimate, Verdict};
pub use dilation::{
    axiom_report, check_a0, check_a1_a2, check_a3, check_a4, conical_checks, difference,
    linearity_residual, pansu_map_by_name, pansu_residual, point, structure_agreement,
    structure_by_name, tangent_inverse,
    tangent_sum, transport, A0Report, A3Result, A4Result, AxiomReport, ConicalDilation,
    ConicalReport, DilationStructure, EuclideanDilation, EuclideanGroup, HeisenbergDilation,
    HeisenbergGroup, LogPerturbedEuclidean, MagnifiedDilation, ModelPoint,
    NormedGroupWithDilations, PansuMap, PansuReport, SharedStructure, SnowflakeDilation,
    SnowflakeGroup, TransportedStructure,
};
pub use error::{Error, Result};
pub use gh::{
    gh_exact, gh_lower_bound, gh_oracle, gh_upper_bound, is_admissible, Correspondence, GhReport,
    GhResult,
};
pub use metric::{
    FiniteMetricSpace, PointId, SharedSpace, ValidationReport, Violation, ViolationKind,
};
pub use relation::{
    check_generalization_bounds, is_dense, BoundCheck, GeneralizationBounds, MapQuality, Relation,
};
pub use zoom::{
    build_zoom, cascade_check, composite_map, foveal, foveal_fixedpoint_check, hausdorff_dmu,
    scale_stability, viewpoint_difference, viewpoint_stability, zoom_quality, CascadeReport,
    FixedpointReport, FovealReport, FovealSequence, StabilityReport, ViewpointReport, ZoomConfig,
    ZoomReport, ZoomSequence,
};
