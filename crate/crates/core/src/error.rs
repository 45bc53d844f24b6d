use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("pole in inverse time derivative: mode {mode} has omega = {omega} on the pole")]
    Pole { mode: usize, omega: f64 },

    #[error("time step {dt} exceeds the resolution/stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("conjugate gradient did not converge: residual {residual:e} > {tolerance:e} after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("non-finite state at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
