pub mod chart;
pub mod fields;
pub mod frame;
pub mod metric;
pub mod potentials;
pub mod profiles;
