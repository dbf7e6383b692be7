//! Per-arc optimal speed policies.
//!
//! The static policy drives the clamped unconstrained optimum `c_v` on every
//! arc. The dynamic policy raises that to the terminal velocity on steep
//! downhill arcs, so it is slope- and load-dependent. The module also
//! computes the payload threshold beyond which every steep-downhill arc
//! saturates at its upper speed bound.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::RoadNetwork;
use crate::physics::{terminal_velocity, Coefficients, VehicleParams};

/// Errors from speed-policy evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpeedError {
    #[error("speed bounds must satisfy 0 <= vmin <= vmax with vmax > 0, got [{v_min}, {v_max}]")]
    InvalidBounds { v_min: f64, v_max: f64 },
    #[error("payload must be finite and nonnegative, got {0}")]
    InvalidLoad(f64),
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),
}

/// Which case of the clamped optimum produced the speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpeedRegime {
    /// The lower bound was binding.
    ClampedMin,
    /// The unconstrained optimum lies inside the band.
    Interior,
    /// The upper bound was binding.
    ClampedMax,
}

/// An optimal-speed decision for one arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedDecision {
    /// Chosen speed (m/s).
    pub speed: f64,
    /// Which clamp, if any, was active.
    pub regime: SpeedRegime,
    /// Terminal velocity used in the decision (zero off steep downhills).
    pub terminal: f64,
}

/// The three speed policies a query can run under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedPolicyKind {
    /// One clamped optimal speed on every arc.
    Static,
    /// Slope- and load-dependent optimal speed per arc.
    Dynamic,
    /// Drive exactly the arc's observed traffic speed.
    Traffic,
}

impl SpeedPolicyKind {
    /// Lowercase label used in CLI arguments and report columns.
    pub fn label(self) -> &'static str {
        match self {
            SpeedPolicyKind::Static => "static",
            SpeedPolicyKind::Dynamic => "dynamic",
            SpeedPolicyKind::Traffic => "traffic",
        }
    }
}

fn check_bounds(v_min: f64, v_max: f64) -> Result<(), SpeedError> {
    if !v_min.is_finite() || !v_max.is_finite() || v_min < 0.0 || v_max <= 0.0 || v_min > v_max {
        return Err(SpeedError::InvalidBounds { v_min, v_max });
    }
    Ok(())
}

fn clamp_to_band(candidate: f64, terminal: f64, v_min: f64, v_max: f64) -> SpeedDecision {
    if candidate <= v_min && v_min > 0.0 {
        SpeedDecision {
            speed: v_min,
            regime: SpeedRegime::ClampedMin,
            terminal,
        }
    } else if candidate <= v_max {
        SpeedDecision {
            speed: candidate,
            regime: SpeedRegime::Interior,
            terminal,
        }
    } else {
        SpeedDecision {
            speed: v_max,
            regime: SpeedRegime::ClampedMax,
            terminal,
        }
    }
}

/// The static optimal speed: `c_v` clamped to `[v_min, v_max]`.
///
/// With `v_min = 0` the band is treated as open below; the optimizer never
/// returns zero because emissions diverge as speed vanishes.
pub fn static_speed(
    coef: &Coefficients,
    v_min: f64,
    v_max: f64,
) -> Result<SpeedDecision, SpeedError> {
    check_bounds(v_min, v_max)?;
    Ok(clamp_to_band(coef.c_v, 0.0, v_min, v_max))
}

/// The dynamic optimal speed: `max(c_v, v^t(angle, load))` clamped to
/// `[v_min, v_max]`, where `v^t` is the terminal velocity. Equals
/// [`static_speed`] whenever the arc is not a steep downhill.
pub fn dynamic_speed(
    coef: &Coefficients,
    vp: &VehicleParams,
    angle: f64,
    load: f64,
    v_min: f64,
    v_max: f64,
) -> Result<SpeedDecision, SpeedError> {
    check_bounds(v_min, v_max)?;
    if !angle.is_finite() {
        return Err(SpeedError::NonFiniteAngle(angle));
    }
    if !load.is_finite() || load < 0.0 {
        return Err(SpeedError::InvalidLoad(load));
    }
    let terminal = terminal_velocity(coef, vp, angle, load);
    Ok(clamp_to_band(coef.c_v.max(terminal), terminal, v_min, v_max))
}

/// The payload beyond which the dynamic speed on every steep-downhill arc of
/// `net` equals that arc's upper bound:
///
/// ```text
/// max over arcs with tanθ < −C_r of  R·v_max² / (−Q(g sinθ + C_r g cosθ)) − w
/// ```
///
/// clamped below at zero; zero when the network has no steep-downhill arcs.
/// The returned value is nudged up by at most a few ulps so the saturation
/// property holds under floating-point evaluation of the terminal velocity.
pub fn asymptotic_load_threshold(
    coef: &Coefficients,
    vp: &VehicleParams,
    net: &RoadNetwork,
) -> f64 {
    let steep: Vec<_> = net
        .arcs()
        .iter()
        .filter(|a| a.grade() < -vp.c_r)
        .collect();
    if steep.is_empty() {
        return 0.0;
    }
    let mut threshold: f64 = 0.0;
    for arc in &steep {
        let force = vp.g * arc.angle.sin() + vp.c_r * vp.g * arc.angle.cos();
        let raw = coef.r * arc.v_max * arc.v_max / (-coef.q * force) - vp.w;
        threshold = threshold.max(raw);
    }
    threshold = threshold.max(0.0);
    for _ in 0..16 {
        let saturated = steep.iter().all(|arc| {
            dynamic_speed(coef, vp, arc.angle, threshold, arc.v_min, arc.v_max)
                .map(|d| d.speed == arc.v_max)
                .unwrap_or(false)
        });
        if saturated {
            break;
        }
        threshold = f64::from_bits(threshold.to_bits() + 1);
    }
    threshold
}
