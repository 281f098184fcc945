//! Cross-section description: material and cavity regions, tagged boundary
//! faces, corner junctions and panel parameters.

mod corner;
mod document;
mod polygon;
mod primitives;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cavity::{self, CavityConstants, CavitySpec};

pub use corner::{apply_corner_rule, corner_zone_length};
pub use document::{load_profile, load_profile_file};
pub use polygon::{Containment, Polygon};
pub use primitives::{Point2, Segment, LENGTH_EPS};
pub use validate::{validate_profile, Violation};

/// Surface resistance of a plane internal surface, m²·K/W.
pub const R_SI_PLANE: f64 = 0.13;
/// Surface resistance of an internal surface in a reduced-convection corner zone.
pub const R_SI_CORNER: f64 = 0.20;
/// Surface resistance of an external surface.
pub const R_SE: f64 = 0.04;
/// Upper bound on the corner zone length along the surface.
pub const CORNER_ZONE_MAX: f64 = 0.030;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("reference error: {0}")]
    Reference(String),
    #[error("invalid profile: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("junction at ({x}, {y}) does not lie on an internal-convection face")]
    JunctionOffFace { x: f64, y: f64 },
    #[error("cavity `{name}`: {source}")]
    Cavity {
        name: String,
        #[source]
        source: cavity::CavityError,
    },
    #[error("cavity `{0}` is fully ventilated but declares no `opens_to` side")]
    VentilationSide(String),
    #[error("no {0} boundary face to take the ambient temperature from")]
    MissingSide(Side),
    #[error("io error reading {path}: {message}")]
    Io { path: String, message: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// W/(m·K)
    pub conductivity: f64,
}

/// Side of the construction a convective face is exposed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Internal,
    External,
}

impl Side {
    pub fn plane_resistance(self) -> f64 {
        match self {
            Side::Internal => R_SI_PLANE,
            Side::External => R_SE,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Internal => "internal",
            Side::External => "external",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceKind {
    InternalConvection,
    ExternalConvection,
    Adiabatic,
}

/// Thermal condition on a boundary face. Adiabatic faces carry neither a
/// resistance nor an ambient temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FaceCondition {
    Convective {
        side: Side,
        /// m²·K/W
        surface_resistance: f64,
        /// °C
        ambient: f64,
    },
    Adiabatic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFace {
    pub segment: Segment,
    pub condition: FaceCondition,
    /// Part of an increased-resistance zone near a reentrant corner.
    pub corner_zone: bool,
}

impl BoundaryFace {
    pub fn kind(&self) -> FaceKind {
        match self.condition {
            FaceCondition::Convective {
                side: Side::Internal,
                ..
            } => FaceKind::InternalConvection,
            FaceCondition::Convective {
                side: Side::External,
                ..
            } => FaceKind::ExternalConvection,
            FaceCondition::Adiabatic => FaceKind::Adiabatic,
        }
    }

    pub fn side(&self) -> Option<Side> {
        match self.condition {
            FaceCondition::Convective { side, .. } => Some(side),
            FaceCondition::Adiabatic => None,
        }
    }

    pub fn surface_resistance(&self) -> Option<f64> {
        match self.condition {
            FaceCondition::Convective {
                surface_resistance, ..
            } => Some(surface_resistance),
            FaceCondition::Adiabatic => None,
        }
    }

    pub fn ambient(&self) -> Option<f64> {
        match self.condition {
            FaceCondition::Convective { ambient, .. } => Some(ambient),
            FaceCondition::Adiabatic => None,
        }
    }

    /// Heat transfer coefficient h = 1/R, W/(m²·K).
    pub fn heat_transfer_coefficient(&self) -> Option<f64> {
        self.surface_resistance().map(|r| 1.0 / r)
    }

    pub fn length(&self) -> f64 {
        self.segment.length()
    }

    fn with_segment(&self, segment: Segment) -> Self {
        Self {
            segment,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionFill {
    /// Index into `ProfileSpec::materials`.
    Material(usize),
    /// Index into `ProfileSpec::cavities`.
    Cavity(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub name: String,
    pub polygon: Polygon,
    pub fill: RegionFill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCavity {
    pub name: String,
    pub spec: CavitySpec,
    /// Side a fully ventilated cavity is open to.
    pub opens_to: Option<Side>,
}

/// Reentrant corner on the internal surface, with the depth `d` that sets the
/// zone of increased surface resistance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub point: Point2,
    pub depth: f64,
}

/// Panel data needed to turn a conductance into a frame transmittance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelParameters {
    /// W/(m²·K)
    pub u_p: f64,
    /// Visible panel width, m.
    pub b_p: f64,
    /// Projected frame width, m.
    pub b_f: f64,
}

/// User-supplied reference values, for geometries outside the built-in table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub l2d: f64,
    pub uf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub materials: Vec<Material>,
    pub cavities: Vec<NamedCavity>,
    pub regions: Vec<RegionSpec>,
    pub boundary: Vec<BoundaryFace>,
    pub junctions: Vec<Junction>,
    pub panel: Option<PanelParameters>,
    pub reference_case: Option<String>,
    pub reference_values: Option<ReferenceValues>,
    pub cavity_constants: CavityConstants,
}

impl ProfileSpec {
    /// Conductivity of a region, or `None` for a fully ventilated cavity.
    pub fn region_conductivity(&self, region: usize) -> Result<Option<f64>, GeometryError> {
        match self.regions[region].fill {
            RegionFill::Material(m) => Ok(Some(self.materials[m].conductivity)),
            RegionFill::Cavity(c) => {
                let cavity = &self.cavities[c];
                cavity::equivalent_conductivity(&cavity.spec, &self.cavity_constants)
                    .map(|k| k.conductivity())
                    .map_err(|source| GeometryError::Cavity {
                        name: cavity.name.clone(),
                        source,
                    })
            }
        }
    }

    /// Whether the region is a hole (fully ventilated cavity) rather than a solid.
    pub fn is_open_cavity(&self, region: usize) -> bool {
        matches!(self.region_conductivity(region), Ok(None))
    }

    /// Index of the first declared solid region containing `point` (boundary inclusive).
    pub fn region_at(&self, point: Point2) -> Option<usize> {
        self.regions.iter().enumerate().find_map(|(i, r)| {
            (r.polygon.contains(point) != Containment::Outside && !self.is_open_cavity(i))
                .then_some(i)
        })
    }

    /// Material at `point`; cavities report their equivalent conductivity under
    /// the name `cavity:<name>`.
    pub fn material_at(&self, point: Point2) -> Option<Material> {
        let region = self.region_at(point)?;
        match self.regions[region].fill {
            RegionFill::Material(m) => Some(self.materials[m].clone()),
            RegionFill::Cavity(c) => {
                let conductivity = self.region_conductivity(region).ok().flatten()?;
                Some(Material {
                    name: format!("cavity:{}", self.cavities[c].name),
                    conductivity,
                })
            }
        }
    }

    /// Ambient temperature of a side, taken from its first convective face.
    pub fn ambient(&self, side: Side) -> Option<f64> {
        self.boundary
            .iter()
            .find(|f| f.side() == Some(side))
            .and_then(|f| f.ambient())
    }

    pub fn total_boundary_length(&self) -> f64 {
        self.boundary.iter().map(|f| f.length()).sum()
    }

    /// Replaces fully ventilated cavities by exposed surfaces: the cavity region is
    /// dropped and every stretch of its outline shared with a solid region becomes
    /// a convective face of the side the cavity opens to.
    pub fn resolve_ventilated_cavities(&self) -> Result<ProfileSpec, GeometryError> {
        let mut out = self.clone();
        let mut keep = vec![true; self.regions.len()];
        for (ri, region) in self.regions.iter().enumerate() {
            let RegionFill::Cavity(ci) = region.fill else {
                continue;
            };
            if !self.is_open_cavity(ri) {
                // Surface conductivity errors here rather than deep in particle generation.
                self.region_conductivity(ri)?;
                continue;
            }
            let cavity = &self.cavities[ci];
            let side = cavity
                .opens_to
                .ok_or_else(|| GeometryError::VentilationSide(cavity.name.clone()))?;
            let ambient = self.ambient(side).ok_or(GeometryError::MissingSide(side))?;
            keep[ri] = false;
            for edge in region.polygon.edges() {
                for (oi, other) in self.regions.iter().enumerate() {
                    if oi == ri || self.is_open_cavity(oi) {
                        continue;
                    }
                    for other_edge in other.polygon.edges() {
                        if let Some((lo, hi)) = edge.collinear_overlap(&other_edge) {
                            out.boundary.push(BoundaryFace {
                                segment: Segment::new(edge.point_at(lo), edge.point_at(hi)),
                                condition: FaceCondition::Convective {
                                    side,
                                    surface_resistance: side.plane_resistance(),
                                    ambient,
                                },
                                corner_zone: false,
                            });
                        }
                    }
                }
            }
        }
        let mut idx = 0;
        out.regions.retain(|_| {
            let k = keep[idx];
            idx += 1;
            k
        });
        Ok(out)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn square_profile() -> ProfileSpec {
        load_profile(
            r#"
            [materials]
            wood = 0.13

            [[regions]]
            material = "wood"
            rect = [0.0, 0.0, 0.1, 0.1]

            [[boundary]]
            from = [0.0, 0.0]
            to = [0.0, 0.1]
            kind = "internal"
            ambient = 20.0

            [[boundary]]
            from = [0.1, 0.0]
            to = [0.1, 0.1]
            kind = "external"
            ambient = 0.0

            [[boundary]]
            from = [0.0, 0.0]
            to = [0.1, 0.0]
            kind = "adiabatic"

            [[boundary]]
            from = [0.0, 0.1]
            to = [0.1, 0.1]
            kind = "adiabatic"
            "#,
        )
        .unwrap()
    }

    #[test]
    fn material_lookup() {
        let p = square_profile();
        assert_eq!(
            p.material_at(Point2::new(0.05, 0.05)).unwrap().conductivity,
            0.13
        );
        assert!(p.material_at(Point2::new(0.2, 0.05)).is_none());
        assert_eq!(p.ambient(Side::Internal), Some(20.0));
        assert_eq!(p.ambient(Side::External), Some(0.0));
    }

    #[test]
    fn shared_edge_goes_to_first_region() {
        let p = load_profile(
            r#"
            [materials]
            wood = 0.13
            insulation = 0.035

            [[regions]]
            material = "insulation"
            rect = [0.01, 0.0, 0.02, 0.01]

            [[regions]]
            material = "wood"
            rect = [0.0, 0.0, 0.01, 0.01]

            [[boundary]]
            from = [0.0, 0.0]
            to = [0.0, 0.01]
            kind = "internal"
            ambient = 20.0

            [[boundary]]
            from = [0.02, 0.0]
            to = [0.02, 0.01]
            kind = "external"
            ambient = 0.0

            [[boundary]]
            from = [0.0, 0.0]
            to = [0.02, 0.0]
            kind = "adiabatic"

            [[boundary]]
            from = [0.0, 0.01]
            to = [0.02, 0.01]
            kind = "adiabatic"
            "#,
        )
        .unwrap();
        assert_eq!(
            p.material_at(Point2::new(0.01, 0.005)).unwrap().name,
            "insulation"
        );
        assert_eq!(
            p.material_at(Point2::new(0.005, 0.005)).unwrap().name,
            "wood"
        );
    }

    #[test]
    fn ventilated_cavity_becomes_faces() {
        let p = load_profile(include_str!("../../fixtures/vented_slot.toml")).unwrap();
        let resolved = p.resolve_ventilated_cavities().unwrap();
        assert_eq!(resolved.regions.len(), p.regions.len() - 1);
        let added = &resolved.boundary[p.boundary.len()..];
        // Slot walls: back, bottom and top, each bordering a solid.
        assert_eq!(added.len(), 3);
        assert!(added
            .iter()
            .all(|f| f.kind() == FaceKind::ExternalConvection
                && f.surface_resistance() == Some(R_SE)
                && f.ambient() == Some(0.0)));
        let wall: f64 = added.iter().map(|f| f.length()).sum();
        assert!((wall - (0.012 + 0.004 + 0.004)).abs() < 1e-12);
    }
}
