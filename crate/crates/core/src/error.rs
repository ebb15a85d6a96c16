use crate::atlas::ChartId;
use crate::expr::{EvalError, ParseError};
use crate::geom::Vec2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("point ({:.6e}, {:.6e}) is within {distance:.3e} of singular point ({:.6e}, {:.6e})", point.x, point.y, singular.x, singular.y)]
    SingularProximity {
        point: Vec2,
        singular: Vec2,
        distance: f64,
    },
    #[error("point ({}, {}) is outside chart {chart}", point.x, point.y)]
    OutsideChart { chart: ChartId, point: Vec2 },
    #[error("point ({}, {}) is not covered by the atlas", point.x, point.y)]
    OutsideAtlas { point: Vec2 },
    #[error("chart {chart} is not star-shaped: segment from basepoint to ({}, {}) leaves it", point.x, point.y)]
    StarShapeViolation { chart: ChartId, point: Vec2 },
    #[error("potential difference on overlap ({i},{j}) is not constant: spread {spread:.3e} > {tol:.1e}")]
    NonConstantDifference {
        i: ChartId,
        j: ChartId,
        spread: f64,
        tol: f64,
    },
    #[error("cocycle condition fails on triple overlap ({i},{j},{k}): residual {residual:.3e}")]
    TripleOverlap {
        i: ChartId,
        j: ChartId,
        k: ChartId,
        residual: f64,
    },
    #[error("overlap nerve is disconnected: components {components:?}")]
    DisconnectedNerve { components: Vec<Vec<ChartId>> },
    #[error("charts {i} and {j} do not overlap")]
    MissingOverlap { i: ChartId, j: ChartId },
    #[error("transition exp({c}) on overlap ({i},{j}) overflows")]
    TransitionOverflow { i: ChartId, j: ChartId, c: f64 },
    #[error("angle refinement exceeded maximum depth near ({}, {}) (path too coarse or through the reference point)", near.x, near.y)]
    RefinementLimit { near: Vec2 },
    #[error("path is not closed (endpoint gap {gap:.3e})")]
    PathNotClosed { gap: f64 },
    #[error("step angle {angle:.3e} rad at t = {t} exceeds the per-step guard; reduce the step size")]
    StepAngleGuard { t: f64, angle: f64 },
    #[error("sheet index is not an integer (residual {residual:.3e})")]
    NonIntegerSheet { residual: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid(msg.into())
    }

    /// Whether the failure is numeric (singularity, refinement or step guard)
    /// rather than a validation problem.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Eval(_)
                | Error::SingularProximity { .. }
                | Error::RefinementLimit { .. }
                | Error::StepAngleGuard { .. }
                | Error::TransitionOverflow { .. }
        )
    }
}
