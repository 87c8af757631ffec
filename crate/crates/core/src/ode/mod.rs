//! Linear second-order ODEs with exponentially decaying coefficients,
//! geodesics, and the growth/decay dichotomy along rays.

pub mod dichotomy;
pub mod geodesic;
pub mod integrator;
pub mod lemmas;
pub mod problem;

pub use dichotomy::{classify_growth, classify_seed, fibonacci_directions, seed_fan, GrowthBands, GrowthLabel, Seed, SeedClassification};
pub use geodesic::{integrate_geodesic, integrate_geodesic_with_frame, GeodesicOptions, GeodesicSample};
pub use lemmas::{lemma_suite, random_general, random_perturbed, LemmaCase, LemmaSuiteReport};
pub use integrator::{integrate, integrate_plain, StepStats, Tolerances};
pub use problem::{
    build_decaying_solution, fundamental_pair, particular_solution, solve_ivp, Coefficient, DecayBounds,
    DecayingSolution, ExpTerm, FundamentalPair, OdeProblem, ParticularSolution, RemainderFit, Solution,
};
