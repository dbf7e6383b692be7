//! Truck parameters, derived model coefficients, and the two emission models.
//!
//! All quantities are SI internally: meters, seconds, kilograms, radians.
//! Fuel is reported in liters and CO₂ in kilograms. Grades enter the system
//! as percent at ingestion (see [`crate::network`]) and are stored as angles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from parameter validation and emission-model evaluation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    /// A vehicle parameter violates its invariant.
    #[error("vehicle parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    /// An input to an emission-model evaluation is not a finite number.
    #[error("input `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    /// An input that must be strictly positive is not.
    #[error("input `{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    /// Payload must be finite and nonnegative.
    #[error("payload must be finite and nonnegative, got {0}")]
    InvalidLoad(f64),
    /// A custom vehicle file could not be parsed.
    #[error("vehicle file: {0}")]
    VehicleFile(String),
}

/// Physical and engine constants for one truck class.
///
/// Masses are in kg, speeds in m/s, the heating value in kJ/g, engine speed
/// in rev/s, displacement in liters, and frontal area in m². `c_e` converts
/// liters of diesel to kilograms of CO₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Fuel-to-air mass ratio.
    pub xi: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Air density (kg/m³).
    pub rho: f64,
    /// Rolling-resistance coefficient.
    pub c_r: f64,
    /// Engine efficiency.
    pub eta: f64,
    /// Drivetrain efficiency.
    pub eta_tf: f64,
    /// Heating value of diesel (kJ/g).
    pub kappa: f64,
    /// Conversion factor g/s → L/s.
    pub psi: f64,
    /// Curb weight (kg).
    pub w: f64,
    /// Maximum payload (kg).
    pub l_max: f64,
    /// Engine friction factor (kJ/rev/L).
    pub k: f64,
    /// Engine speed (rev/s).
    pub n: f64,
    /// Engine displacement (L).
    pub d: f64,
    /// Aerodynamic drag coefficient.
    pub c_d: f64,
    /// Frontal area (m²).
    pub s: f64,
    /// CO₂ emitted per liter of diesel (kg/L).
    pub c_e: f64,
}

/// The three built-in truck classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruckClass {
    /// Heavy-duty diesel.
    Hdd,
    /// Medium-duty diesel.
    Mdd,
    /// Light-duty diesel.
    Ldd,
}

impl TruckClass {
    /// All built-in classes, heaviest first.
    pub const ALL: [TruckClass; 3] = [TruckClass::Hdd, TruckClass::Mdd, TruckClass::Ldd];

    /// Lowercase label used in CLI arguments and report columns.
    pub fn label(self) -> &'static str {
        match self {
            TruckClass::Hdd => "hdd",
            TruckClass::Mdd => "mdd",
            TruckClass::Ldd => "ldd",
        }
    }

    /// Built-in parameter set for this class.
    pub fn params(self) -> VehicleParams {
        let shared = VehicleParams {
            xi: 1.0,
            g: 9.81,
            rho: 1.2041,
            c_r: 0.01,
            eta: 0.45,
            eta_tf: 0.45,
            kappa: 44.0,
            psi: 737.0,
            w: 0.0,
            l_max: 0.0,
            k: 0.0,
            n: 0.0,
            d: 0.0,
            c_d: 0.0,
            s: 0.0,
            c_e: 2.67,
        };
        match self {
            TruckClass::Hdd => VehicleParams {
                w: 14000.0,
                l_max: 26000.0,
                k: 0.15,
                n: 30.0,
                d: 10.5,
                c_d: 0.9,
                s: 10.0,
                ..shared
            },
            TruckClass::Mdd => VehicleParams {
                w: 5500.0,
                l_max: 12500.0,
                k: 0.2,
                n: 36.67,
                d: 6.9,
                c_d: 0.7,
                s: 8.0,
                ..shared
            },
            TruckClass::Ldd => VehicleParams {
                w: 3500.0,
                l_max: 4000.0,
                k: 0.25,
                n: 38.34,
                d: 4.5,
                c_d: 0.6,
                s: 7.0,
                ..shared
            },
        }
    }
}

impl std::str::FromStr for TruckClass {
    type Err = PhysicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hdd" => Ok(TruckClass::Hdd),
            "mdd" => Ok(TruckClass::Mdd),
            "ldd" => Ok(TruckClass::Ldd),
            other => Err(PhysicsError::VehicleFile(format!(
                "unknown truck class `{other}` (expected hdd, mdd, or ldd)"
            ))),
        }
    }
}

const VEHICLE_KEYS: [&str; 16] = [
    "xi", "g", "rho", "c_r", "eta", "eta_tf", "kappa", "psi", "w", "l_max", "k", "n", "d", "c_d",
    "s", "c_e",
];

impl VehicleParams {
    /// Checks every parameter invariant; returns the first violation found.
    pub fn validate(&self) -> Result<(), PhysicsError> {
        let positive = [
            ("xi", self.xi),
            ("g", self.g),
            ("rho", self.rho),
            ("c_r", self.c_r),
            ("eta", self.eta),
            ("eta_tf", self.eta_tf),
            ("kappa", self.kappa),
            ("psi", self.psi),
            ("w", self.w),
            ("l_max", self.l_max),
            ("k", self.k),
            ("n", self.n),
            ("d", self.d),
            ("c_d", self.c_d),
            ("s", self.s),
            ("c_e", self.c_e),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(PhysicsError::InvalidParameter {
                    name,
                    requirement: "finite and strictly positive",
                    value,
                });
            }
        }
        if self.c_r >= 1.0 {
            return Err(PhysicsError::InvalidParameter {
                name: "c_r",
                requirement: "less than 1",
                value: self.c_r,
            });
        }
        if self.eta > 1.0 {
            return Err(PhysicsError::InvalidParameter {
                name: "eta",
                requirement: "in (0, 1]",
                value: self.eta,
            });
        }
        if self.eta_tf > 1.0 {
            return Err(PhysicsError::InvalidParameter {
                name: "eta_tf",
                requirement: "in (0, 1]",
                value: self.eta_tf,
            });
        }
        Ok(())
    }

    /// Derived model coefficients for this vehicle; see [`derive_coefficients`].
    pub fn coefficients(&self) -> Result<Coefficients, PhysicsError> {
        derive_coefficients(self)
    }

    /// Parses a custom vehicle from a `name = value` key-value text, one pair
    /// per line. Blank lines and lines starting with `#` are ignored. All 16
    /// parameters must appear exactly once, in SI units.
    pub fn from_key_value_str(text: &str) -> Result<Self, PhysicsError> {
        let mut values: std::collections::HashMap<&str, f64> = std::collections::HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                PhysicsError::VehicleFile(format!("line {}: expected `name = value`", lineno + 1))
            })?;
            let key = key.trim();
            let key = VEHICLE_KEYS
                .iter()
                .find(|k| **k == key)
                .copied()
                .ok_or_else(|| {
                    PhysicsError::VehicleFile(format!("line {}: unknown key `{key}`", lineno + 1))
                })?;
            let value: f64 = value.trim().parse().map_err(|_| {
                PhysicsError::VehicleFile(format!(
                    "line {}: value for `{key}` is not a number",
                    lineno + 1
                ))
            })?;
            if values.insert(key, value).is_some() {
                return Err(PhysicsError::VehicleFile(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        for key in VEHICLE_KEYS {
            if !values.contains_key(key) {
                return Err(PhysicsError::VehicleFile(format!("missing key `{key}`")));
            }
        }
        let get = |k: &str| values[k];
        let vp = VehicleParams {
            xi: get("xi"),
            g: get("g"),
            rho: get("rho"),
            c_r: get("c_r"),
            eta: get("eta"),
            eta_tf: get("eta_tf"),
            kappa: get("kappa"),
            psi: get("psi"),
            w: get("w"),
            l_max: get("l_max"),
            k: get("k"),
            n: get("n"),
            d: get("d"),
            c_d: get("c_d"),
            s: get("s"),
            c_e: get("c_e"),
        };
        vp.validate()?;
        Ok(vp)
    }
}

/// Coefficients of the emission model derived from [`VehicleParams`].
///
/// `p` multiplies the engine-module term, `q` the load term, `r` the
/// speed-squared term; `c_v = (p / 2r)^{1/3}` is the fuel-optimal speed
/// absent any speed limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub c_v: f64,
}

/// Fuel, CO₂, and travel time for one arc traversal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcCost {
    /// Liters of diesel.
    pub fuel: f64,
    /// Kilograms of CO₂ (`c_e · fuel`).
    pub co2: f64,
    /// Seconds.
    pub time: f64,
}

/// Derives the model coefficients and the unconstrained optimal speed:
///
/// ```text
/// p = ξkND / (κψ)
/// q = ξ / (1000 η η_tf κ ψ)
/// r = ξ C_d ρ S / (2000 η η_tf κ ψ)
/// c_v = (p / 2r)^(1/3)
/// ```
pub fn derive_coefficients(vp: &VehicleParams) -> Result<Coefficients, PhysicsError> {
    vp.validate()?;
    let p = vp.xi * vp.k * vp.n * vp.d / (vp.kappa * vp.psi);
    let q = vp.xi / (1000.0 * vp.eta * vp.eta_tf * vp.kappa * vp.psi);
    let r = vp.xi * vp.c_d * vp.rho * vp.s / (2000.0 * vp.eta * vp.eta_tf * vp.kappa * vp.psi);
    let c_v = (p / (2.0 * r)).cbrt();
    Ok(Coefficients { p, q, r, c_v })
}

fn check_arc_inputs(length: f64, angle: f64, speed: f64, load: f64) -> Result<(), PhysicsError> {
    for (name, value) in [
        ("length", length),
        ("angle", angle),
        ("speed", speed),
        ("load", load),
    ] {
        if !value.is_finite() {
            return Err(PhysicsError::NonFinite { name, value });
        }
    }
    if length <= 0.0 {
        return Err(PhysicsError::NonPositive {
            name: "length",
            value: length,
        });
    }
    if speed <= 0.0 {
        return Err(PhysicsError::NonPositive {
            name: "speed",
            value: speed,
        });
    }
    if load < 0.0 {
        return Err(PhysicsError::InvalidLoad(load));
    }
    Ok(())
}

/// Gravity-plus-rolling force term per unit mass: `g sinθ + C_r g cosθ`.
fn grade_force(vp: &VehicleParams, angle: f64) -> f64 {
    vp.g * angle.sin() + vp.c_r * vp.g * angle.cos()
}

/// Fuel (liters) under the standard emission model:
/// `Pδ/v + Qδ(g sinθ + C_r g cosθ)(w+l) + Rδv²`.
///
/// May be negative on steep downhill arcs; routing uses [`fuel_improved`]
/// instead, and this form is exposed for diagnostics and cross-checks only.
pub fn fuel_standard(
    coef: &Coefficients,
    vp: &VehicleParams,
    length: f64,
    angle: f64,
    speed: f64,
    load: f64,
) -> Result<f64, PhysicsError> {
    check_arc_inputs(length, angle, speed, load)?;
    let bracket = coef.q * length * grade_force(vp, angle) * (vp.w + load)
        + coef.r * length * speed * speed;
    Ok(coef.p * length / speed + bracket)
}

/// Fuel (liters) under the improved emission model, which clamps the
/// load/speed term at zero: `Pδ/v + (Qδ(g sinθ + C_r g cosθ)(w+l) + Rδv²)⁺`.
///
/// Strictly positive for every input, and identical to [`fuel_standard`]
/// whenever the clamped term is nonnegative (in particular on flat arcs).
pub fn fuel_improved(
    coef: &Coefficients,
    vp: &VehicleParams,
    length: f64,
    angle: f64,
    speed: f64,
    load: f64,
) -> Result<f64, PhysicsError> {
    check_arc_inputs(length, angle, speed, load)?;
    let bracket = coef.q * length * grade_force(vp, angle) * (vp.w + load)
        + coef.r * length * speed * speed;
    Ok(coef.p * length / speed + bracket.max(0.0))
}

/// Fuel, CO₂, and travel time for traversing one arc at `speed` with `load`.
pub fn arc_emissions(
    coef: &Coefficients,
    vp: &VehicleParams,
    length: f64,
    angle: f64,
    speed: f64,
    load: f64,
) -> Result<ArcCost, PhysicsError> {
    let fuel = fuel_improved(coef, vp, length, angle, speed, load)?;
    Ok(ArcCost {
        fuel,
        co2: vp.c_e * fuel,
        time: length / speed,
    })
}

/// Terminal velocity on a slope: the speed at which the downhill component of
/// gravity balances drag plus rolling resistance. Zero unless
/// `tanθ < −C_r`; otherwise `sqrt(−Q(g sinθ + C_r g cosθ)(w+l) / R)`.
///
/// The radicand is clamped at zero so the branch boundary cannot produce NaN
/// from rounding.
pub fn terminal_velocity(coef: &Coefficients, vp: &VehicleParams, angle: f64, load: f64) -> f64 {
    if angle.tan() >= -vp.c_r {
        return 0.0;
    }
    let radicand = -coef.q * grade_force(vp, angle) * (vp.w + load) / coef.r;
    radicand.max(0.0).sqrt()
}
