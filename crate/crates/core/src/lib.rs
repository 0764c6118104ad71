pub mod conditions;
pub mod dgp;
pub mod error;
pub mod harness;
pub mod inference;
pub mod netcore;
pub mod netgen;
pub mod qmle;
pub mod rng;
pub mod sampler;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Single-precision aliases for the scalar-generic types.
pub mod f32 {
    pub type WeightMatrix = crate::netcore::WeightMatrix<f32>;
    pub type SubnetSelection = crate::netcore::SubnetSelection<f32>;
    pub type LikelihoodWorkspace = crate::qmle::LikelihoodWorkspace<f32>;
    pub type FitResult = crate::qmle::FitResult<f32>;
    pub type ResponseVector = crate::dgp::ResponseVector<f32>;
}

/// Double-precision aliases for the scalar-generic types.
pub mod f64 {
    pub type WeightMatrix = crate::netcore::WeightMatrix<f64>;
    pub type SubnetSelection = crate::netcore::SubnetSelection<f64>;
    pub type LikelihoodWorkspace = crate::qmle::LikelihoodWorkspace<f64>;
    pub type FitResult = crate::qmle::FitResult<f64>;
    pub type ResponseVector = crate::dgp::ResponseVector<f64>;
}
