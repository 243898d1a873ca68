use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} must be finite and non-negative, got {value}")]
    NegativeOrNonFinite { name: &'static str, value: f64 },

    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),

    #[error(
        "{scenario} requires {inequality} (follower {follower:.4} m/s, leader {leader:.4} m/s)"
    )]
    SpeedOrdering {
        scenario: &'static str,
        inequality: &'static str,
        follower: f64,
        leader: f64,
    },

    #[error("speed too low for full ramp: {speed:.4} m/s < a*t_l/2 = {required:.4} m/s")]
    SpeedTooLowForRamp { speed: f64, required: f64 },

    #[error("deceleration must be positive, got {0}")]
    NonPositiveDecel(f64),

    #[error(
        "distance range must satisfy d_min <= d_max with finite bounds, got [{d_min}, {d_max}]"
    )]
    InvalidRange { d_min: f64, d_max: f64 },

    #[error("timestep {dt} s outside (0, {max}] s")]
    InvalidTimestep { dt: f64, max: f64 },

    #[error("response time {response} s outside [{min}, {max}] s")]
    ResponseOutOfRange { response: f64, min: f64, max: f64 },

    #[error("initial gap must be finite and non-negative, got {0} m")]
    NegativeGap(f64),

    #[error("grid is empty")]
    EmptyGrid,

    #[error("grid must be strictly increasing (index {index}: {value} km/h)")]
    GridNotIncreasing { index: usize, value: f64 },

    #[error("grid point {index} ({speed} km/h): {source}")]
    GridPoint {
        index: usize,
        speed: f64,
        #[source]
        source: Box<Error>,
    },
}
