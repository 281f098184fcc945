//! Equivalent thermal conductivity of air cavities.
//!
//! A cavity is classified by the width of the gap connecting it to the
//! surroundings. Closed and slightly ventilated cavities are replaced by a
//! solid of equivalent conductivity `k_eq = d (h_a + h_r)`, where `d` is the
//! cavity size along the heat flow and `b` the size across it:
//!
//! ```text
//! h_a = C1 / d                  if b <= 5 mm
//!     = max(C1 / d, C3)         otherwise
//! h_r = C4 (1 + sqrt(1 + (d/b)^2) - d/b)
//! ```
//!
//! Non-rectangular cavities are first mapped to the rectangle with the same
//! area and aspect ratio. Fully ventilated cavities are not solids at all:
//! their walls become exposed surfaces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest gap (m) for which a cavity still counts as closed.
pub const UNVENTILATED_MAX_GAP: f64 = 0.002;
/// Largest gap (m) for a slightly ventilated cavity.
pub const SLIGHTLY_VENTILATED_MAX_GAP: f64 = 0.010;
/// Cavity width (m) at or below which convection is conduction-like (`C1/d`).
pub const NARROW_CAVITY_WIDTH: f64 = 0.005;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CavityError {
    #[error("{quantity} must be positive and finite, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },
    #[error("gap width must be non-negative and finite, got {0}")]
    InvalidGap(f64),
    #[error("polygon area {area} exceeds its extents {depth} x {width}")]
    AreaExceedsExtents { area: f64, depth: f64, width: f64 },
}

fn positive(quantity: &'static str, value: f64) -> Result<f64, CavityError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CavityError::NonPositive { quantity, value })
    }
}

/// Coefficients of the cavity correlations. `c3` and `c4` already fold in the
/// fixed 10 K temperature difference and 283 K mean temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityConstants {
    /// W/(m·K)
    pub c1: f64,
    /// W/(m²·K)
    pub c3: f64,
    /// W/(m²·K)
    pub c4: f64,
}

impl Default for CavityConstants {
    fn default() -> Self {
        Self {
            c1: 0.025,
            c3: 1.57,
            c4: 2.11,
        }
    }
}

impl CavityConstants {
    pub fn validate(&self) -> Result<(), CavityError> {
        positive("C1", self.c1)?;
        positive("C3", self.c3)?;
        positive("C4", self.c4)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VentilationClass {
    Unventilated,
    SlightlyVentilated,
    FullyVentilated,
}

impl std::fmt::Display for VentilationClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VentilationClass::Unventilated => "unventilated",
            VentilationClass::SlightlyVentilated => "slightly-ventilated",
            VentilationClass::FullyVentilated => "fully-ventilated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CavityGeometry {
    /// `width` is b (across the heat flow), `depth` is d (along it).
    Rectangle { width: f64, depth: f64 },
    /// Area A′ with extents d′ (along the heat flow) and b′ (across it).
    Polygon { area: f64, depth: f64, width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavitySpec {
    pub geometry: CavityGeometry,
    /// Width (m) of the opening to the outside; 0 for a closed cavity.
    pub gap_width: f64,
}

impl CavitySpec {
    pub fn validate(&self) -> Result<(), CavityError> {
        if !(self.gap_width >= 0.0 && self.gap_width.is_finite()) {
            return Err(CavityError::InvalidGap(self.gap_width));
        }
        match self.geometry {
            CavityGeometry::Rectangle { width, depth } => {
                positive("cavity width b", width)?;
                positive("cavity depth d", depth)?;
            }
            CavityGeometry::Polygon { area, depth, width } => {
                positive("cavity area", area)?;
                positive("cavity depth d'", depth)?;
                positive("cavity width b'", width)?;
                // Relative slack so that a rectangle given in polygon form passes.
                if area > depth * width * (1.0 + 1e-12) {
                    return Err(CavityError::AreaExceedsExtents { area, depth, width });
                }
            }
        }
        Ok(())
    }

    /// Rectangle (b, d) used by the correlations.
    pub fn equivalent_dimensions(&self) -> Result<(f64, f64), CavityError> {
        match self.geometry {
            CavityGeometry::Rectangle { width, depth } => Ok((width, depth)),
            CavityGeometry::Polygon { area, depth, width } => {
                equivalent_rectangle(area, depth, width)
            }
        }
    }
}

pub fn classify_ventilation(gap_width: f64) -> Result<VentilationClass, CavityError> {
    if !(gap_width >= 0.0 && gap_width.is_finite()) {
        return Err(CavityError::InvalidGap(gap_width));
    }
    Ok(if gap_width <= UNVENTILATED_MAX_GAP {
        VentilationClass::Unventilated
    } else if gap_width <= SLIGHTLY_VENTILATED_MAX_GAP {
        VentilationClass::SlightlyVentilated
    } else {
        VentilationClass::FullyVentilated
    })
}

/// Rectangle `(b, d)` with area `area` and aspect ratio `d/b = depth/width`.
pub fn equivalent_rectangle(area: f64, depth: f64, width: f64) -> Result<(f64, f64), CavityError> {
    positive("cavity area", area)?;
    positive("cavity depth d'", depth)?;
    positive("cavity width b'", width)?;
    let b = (area * width / depth).sqrt();
    let d = (area * depth / width).sqrt();
    Ok((b, d))
}

/// Convective coefficient h_a in W/(m²·K).
pub fn convective_coefficient(
    depth: f64,
    width: f64,
    c: &CavityConstants,
) -> Result<f64, CavityError> {
    positive("cavity depth d", depth)?;
    positive("cavity width b", width)?;
    let conduction_like = c.c1 / depth;
    Ok(if width <= NARROW_CAVITY_WIDTH {
        conduction_like
    } else {
        conduction_like.max(c.c3)
    })
}

/// Radiative coefficient h_r in W/(m²·K).
pub fn radiative_coefficient(
    depth: f64,
    width: f64,
    c: &CavityConstants,
) -> Result<f64, CavityError> {
    positive("cavity depth d", depth)?;
    positive("cavity width b", width)?;
    let ratio = depth / width;
    Ok(c.c4 * (1.0 + (1.0 + ratio * ratio).sqrt() - ratio))
}

/// Result of the equivalent conductivity calculation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CavityConductivity {
    Conductive {
        k_eq: f64,
    },
    /// The cavity walls are exposed surfaces; no conductive region.
    FullyVentilated,
}

impl CavityConductivity {
    pub fn conductivity(&self) -> Option<f64> {
        match *self {
            CavityConductivity::Conductive { k_eq } => Some(k_eq),
            CavityConductivity::FullyVentilated => None,
        }
    }
}

/// All intermediate quantities, as printed by the `cavity` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityAnalysis {
    pub class: VentilationClass,
    /// Equivalent rectangle width b (m).
    pub width: f64,
    /// Equivalent rectangle depth d (m).
    pub depth: f64,
    pub h_a: f64,
    pub h_r: f64,
    /// Thermal resistance 1/(h_a + h_r), m²·K/W.
    pub resistance: f64,
    pub conductivity: CavityConductivity,
}

pub fn analyze(spec: &CavitySpec, c: &CavityConstants) -> Result<CavityAnalysis, CavityError> {
    spec.validate()?;
    c.validate()?;
    let class = classify_ventilation(spec.gap_width)?;
    let (width, depth) = spec.equivalent_dimensions()?;
    let h_a = convective_coefficient(depth, width, c)?;
    let h_r = radiative_coefficient(depth, width, c)?;
    let resistance = 1.0 / (h_a + h_r);
    let closed = depth / resistance;
    let conductivity = match class {
        VentilationClass::Unventilated => CavityConductivity::Conductive { k_eq: closed },
        VentilationClass::SlightlyVentilated => {
            CavityConductivity::Conductive { k_eq: 2.0 * closed }
        }
        VentilationClass::FullyVentilated => CavityConductivity::FullyVentilated,
    };
    Ok(CavityAnalysis {
        class,
        width,
        depth,
        h_a,
        h_r,
        resistance,
        conductivity,
    })
}

pub fn equivalent_conductivity(
    spec: &CavitySpec,
    c: &CavityConstants,
) -> Result<CavityConductivity, CavityError> {
    analyze(spec, c).map(|a| a.conductivity)
}
