pub mod dyadic;
pub mod error;
pub mod linalg;
pub mod norm;
pub mod scalar;
pub mod gen;
pub mod report;
pub mod universal;
pub mod instances;
pub mod sequences;
pub mod measures;
pub mod suite;
