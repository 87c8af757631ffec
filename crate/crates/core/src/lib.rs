//! Numerical toolkit for asymptotically hyperbolic metrics: curvature by
//! second-order jets, mass flux integrals, the linearized scalar-curvature
//! operator and its adjoint, the decaying-coefficient ODE class, and the
//! static-potential rigidity identities.

pub mod error;
pub mod geometry;
pub mod jet;
pub mod tensor;
pub mod fit;
pub mod quadrature;
pub mod asymptotics;
pub mod mass;
pub mod ode;
pub mod operators;
pub mod rigidity;

pub use error::{Error, Result};
pub use geometry::chart::ChartPoint;
pub use geometry::fields::{FnScalar, FnTensor, ScalarField, Support, SymmetricField, TensorJet};
pub use geometry::metric::{hyperbolic_metric, schwarzschild_ads, Family, Metric, MetricSpec};
pub use geometry::potentials::{static_potential_basis, SchwarzschildLapse, StaticPotential};
pub use jet::Jet;
pub use quadrature::{AnnulusQuadrature, SphereQuadrature};
pub use tensor::{curvature_at, CurvaturePack, LocalGeometry};
