pub mod bivariate;
pub mod builder;
pub mod conjugacy;
pub mod exec;
pub mod invariant;
pub mod jet;
pub mod linalg;
pub mod normal_form;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod series;
pub mod surface;
pub mod synth;

pub use exec::Execution;
pub use jet::{DiffeoTuple, JetDiffeo, Tangency, VectorField};
pub use scalar::Scalar;
pub use series::Series;
