//! Linearized scalar curvature, its adjoint, radial solvers and the
//! renormalized volume functional.

pub mod bumps;
pub mod linearized;
pub mod potential;
pub mod functional;
pub mod radial;

pub use bumps::{random_pairs, BumpScalar, BumpTensor, CompactPair};
pub use linearized::{
    adjoint, adjoint_local, duality_residual, linearized_local, linearized_scalar, static_residual,
    static_residual_at, trace_form_integral, trace_identity, DualityReport, StaticResidualReport,
};
pub use potential::{AsymptoticTag, PotentialField, PotentialSource};
pub use radial::{
    conformal_deform_radial, radial_coefficients, radial_eigenfunction, DeformOptions, DeformReport,
    EigenfunctionReport, NewtonStep, RadialFunction, RadialOptions, RadialTarget,
};
pub use functional::{
    first_variation_check, functional_density, functional_f, FirstVariationReport, FunctionalOptions,
    FunctionalValue, DEFAULT_EPSILONS,
};
