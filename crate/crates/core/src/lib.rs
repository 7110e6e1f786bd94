pub mod num;
pub mod series;
pub mod majorant;
pub mod equation;
pub mod solver;
pub mod certificate;
pub mod characteristics;
pub mod pipeline;
pub mod sampling;
