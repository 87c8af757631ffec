//! Identities behind the rigidity argument, and the warped-product examples.

pub mod identities;
pub mod sectional;
pub mod warped;

pub use identities::{divergence_form_check, wang_identity_check, DivergenceFormReport, WangReport};
pub use sectional::{sectional_ode_check, SectionalReport};
pub use warped::{
    hessian_rigidity_residual, warped_fixture, warped_tangential_curvature, SinhPotential, WarpBase,
    WarpedFixtureReport, WarpedMetric,
};
