//! TOML profile documents.
//!
//! ```toml
//! reference_case = "D2"            # optional: D2, D4 or D7
//!
//! [materials]                      # name -> conductivity, W/(m·K)
//! wood = 0.13
//!
//! [cavities.slot]
//! gap_width = 0.0                  # m, opening to the outside
//! heat_flow = "x"                  # axis of the heat flow, default "x"
//! # rectangle = { width = 0.01, depth = 0.02 }           (optional, else from the region)
//! # polygon = { area = 1e-4, depth = 0.02, width = 0.01 } (optional)
//! # opens_to = "external"          # required when fully ventilated
//!
//! [[regions]]
//! name = "sash"                    # optional
//! material = "wood"                # or: cavity = "slot"
//! polygon = [[0.0, 0.0], [0.02, 0.0], [0.02, 0.05], [0.0, 0.05]]
//! # rect = [x0, y0, x1, y1]        (alternative to polygon)
//!
//! [[boundary]]
//! from = [0.0, 0.0]
//! to = [0.0, 0.05]
//! kind = "internal"                # internal | external | adiabatic
//! ambient = 20.0                   # °C, convective faces only
//! # surface_resistance = 0.13      # m²·K/W, defaults 0.13 internal / 0.04 external
//!
//! [[junctions]]
//! point = [0.01, 0.01]
//! depth = 0.05
//!
//! [panel]
//! u_p = 0.551
//! b_p = 0.19
//! b_f = 0.11
//!
//! [reference]                      # optional custom reference values
//! l2d = 0.263
//! uf = 1.44
//!
//! [constants]                      # optional cavity constants
//! c1 = 0.025
//! c3 = 1.57
//! c4 = 2.11
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{
    validate_profile, BoundaryFace, FaceCondition, GeometryError, Junction, Material, NamedCavity,
    PanelParameters, Point2, Polygon, ProfileSpec, ReferenceValues, RegionFill, RegionSpec,
    Segment, Side,
};
use crate::cavity::{CavityConstants, CavityGeometry, CavitySpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    reference_case: Option<String>,
    #[serde(default)]
    materials: BTreeMap<String, f64>,
    #[serde(default)]
    cavities: BTreeMap<String, CavityDoc>,
    #[serde(default)]
    regions: Vec<RegionDoc>,
    #[serde(default)]
    boundary: Vec<FaceDoc>,
    #[serde(default)]
    junctions: Vec<JunctionDoc>,
    panel: Option<PanelParameters>,
    reference: Option<ReferenceValues>,
    constants: Option<CavityConstants>,
}

#[derive(Debug, Clone, Copy, Deserialize, Default, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Axis {
    #[default]
    X,
    Y,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CavityDoc {
    #[serde(default)]
    gap_width: f64,
    #[serde(default)]
    heat_flow: Axis,
    rectangle: Option<RectangleDoc>,
    polygon: Option<PolygonCavityDoc>,
    opens_to: Option<Side>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RectangleDoc {
    width: f64,
    depth: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonCavityDoc {
    area: f64,
    depth: f64,
    width: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDoc {
    name: Option<String>,
    material: Option<String>,
    cavity: Option<String>,
    polygon: Option<Vec<[f64; 2]>>,
    rect: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindDoc {
    Internal,
    External,
    Adiabatic,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceDoc {
    from: [f64; 2],
    to: [f64; 2],
    kind: KindDoc,
    ambient: Option<f64>,
    surface_resistance: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JunctionDoc {
    point: [f64; 2],
    depth: f64,
}

/// Parses and validates a profile document.
pub fn load_profile(text: &str) -> Result<ProfileSpec, GeometryError> {
    let doc: Document = toml::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))?;
    let profile = resolve(doc)?;
    let violations = validate_profile(&profile);
    if violations.is_empty() {
        Ok(profile)
    } else {
        Err(GeometryError::Invalid(violations))
    }
}

pub fn load_profile_file(path: impl AsRef<Path>) -> Result<ProfileSpec, GeometryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| GeometryError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_profile(&text)
}

fn resolve(doc: Document) -> Result<ProfileSpec, GeometryError> {
    let materials: Vec<Material> = doc
        .materials
        .iter()
        .map(|(name, &conductivity)| Material {
            name: name.clone(),
            conductivity,
        })
        .collect();
    let cavity_names: Vec<&String> = doc.cavities.keys().collect();

    let mut regions = Vec::with_capacity(doc.regions.len());
    for (i, r) in doc.regions.iter().enumerate() {
        let name = r.name.clone().unwrap_or_else(|| format!("region{i}"));
        let polygon = match (&r.polygon, &r.rect) {
            (Some(v), None) => Polygon::new(v.iter().map(|&p| Point2::from(p)).collect()),
            (None, Some([x0, y0, x1, y1])) => Polygon::rectangle(
                Point2::new(x0.min(*x1), y0.min(*y1)),
                Point2::new(x0.max(*x1), y0.max(*y1)),
            ),
            _ => {
                return Err(GeometryError::Parse(format!(
                    "region `{name}` needs exactly one of `polygon` or `rect`"
                )))
            }
        };
        let fill = match (&r.material, &r.cavity) {
            (Some(m), None) => RegionFill::Material(
                materials.iter().position(|x| &x.name == m).ok_or_else(|| {
                    GeometryError::Reference(format!("unknown material `{m}` in region `{name}`"))
                })?,
            ),
            (None, Some(c)) => {
                RegionFill::Cavity(cavity_names.iter().position(|x| *x == c).ok_or_else(|| {
                    GeometryError::Reference(format!("unknown cavity `{c}` in region `{name}`"))
                })?)
            }
            _ => {
                return Err(GeometryError::Parse(format!(
                    "region `{name}` needs exactly one of `material` or `cavity`"
                )))
            }
        };
        regions.push(RegionSpec {
            name,
            polygon,
            fill,
        });
    }

    let mut cavities = Vec::with_capacity(doc.cavities.len());
    for (ci, (name, c)) in doc.cavities.iter().enumerate() {
        let geometry = match (&c.rectangle, &c.polygon) {
            (Some(r), None) => CavityGeometry::Rectangle {
                width: r.width,
                depth: r.depth,
            },
            (None, Some(p)) => CavityGeometry::Polygon {
                area: p.area,
                depth: p.depth,
                width: p.width,
            },
            (None, None) => {
                let users: Vec<&RegionSpec> = regions
                    .iter()
                    .filter(|r| r.fill == RegionFill::Cavity(ci))
                    .collect();
                match users.as_slice() {
                    [region] => geometry_from_polygon(&region.polygon, c.heat_flow),
                    _ => {
                        return Err(GeometryError::Reference(format!(
                            "cavity `{name}` without explicit geometry must be used by exactly one region"
                        )))
                    }
                }
            }
            (Some(_), Some(_)) => {
                return Err(GeometryError::Parse(format!(
                    "cavity `{name}` declares both `rectangle` and `polygon`"
                )))
            }
        };
        cavities.push(NamedCavity {
            name: name.clone(),
            spec: CavitySpec {
                geometry,
                gap_width: c.gap_width,
            },
            opens_to: c.opens_to,
        });
    }

    let mut boundary = Vec::with_capacity(doc.boundary.len());
    for (i, f) in doc.boundary.iter().enumerate() {
        let segment = Segment::new(f.from.into(), f.to.into());
        let condition = match f.kind {
            KindDoc::Adiabatic => {
                if f.ambient.is_some() || f.surface_resistance.is_some() {
                    return Err(GeometryError::Parse(format!(
                        "boundary face #{i} is adiabatic but declares an ambient or surface resistance"
                    )));
                }
                FaceCondition::Adiabatic
            }
            KindDoc::Internal | KindDoc::External => {
                let side = if matches!(f.kind, KindDoc::Internal) {
                    Side::Internal
                } else {
                    Side::External
                };
                let ambient = f.ambient.ok_or_else(|| {
                    GeometryError::Parse(format!(
                        "boundary face #{i} is convective but has no `ambient`"
                    ))
                })?;
                FaceCondition::Convective {
                    side,
                    surface_resistance: f.surface_resistance.unwrap_or(side.plane_resistance()),
                    ambient,
                }
            }
        };
        boundary.push(BoundaryFace {
            segment,
            condition,
            corner_zone: false,
        });
    }

    Ok(ProfileSpec {
        materials,
        cavities,
        regions,
        boundary,
        junctions: doc
            .junctions
            .iter()
            .map(|j| Junction {
                point: j.point.into(),
                depth: j.depth,
            })
            .collect(),
        panel: doc.panel,
        reference_case: doc.reference_case,
        reference_values: doc.reference,
        cavity_constants: doc.constants.unwrap_or_default(),
    })
}

fn geometry_from_polygon(polygon: &Polygon, axis: Axis) -> CavityGeometry {
    let (min, max) = polygon.bounds();
    let (along, across) = match axis {
        Axis::X => (max.x - min.x, max.y - min.y),
        Axis::Y => (max.y - min.y, max.x - min.x),
    };
    if polygon.is_axis_aligned_rectangle() {
        CavityGeometry::Rectangle {
            width: across,
            depth: along,
        }
    } else {
        CavityGeometry::Polygon {
            area: polygon.area(),
            depth: along,
            width: across,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FaceKind;

    const SQUARE: &str = r#"
        [materials]
        wood = 0.13

        [[regions]]
        material = "wood"
        polygon = [[0.0, 0.0], [0.1, 0.0], [0.1, 0.1], [0.0, 0.1]]

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
    "#;

    #[test]
    fn minimal_square() {
        let p = load_profile(SQUARE).unwrap();
        assert_eq!(p.regions.len(), 1);
        assert_eq!(p.boundary.len(), 4);
        assert_eq!(p.boundary[0].kind(), FaceKind::InternalConvection);
        assert_eq!(p.boundary[0].surface_resistance(), Some(0.13));
        assert_eq!(p.boundary[1].surface_resistance(), Some(0.04));
        assert_eq!(p.boundary[2].surface_resistance(), None);
    }

    #[test]
    fn unknown_material_is_a_reference_error() {
        let text = SQUARE.replace("material = \"wood\"", "material = \"pvc\"");
        assert!(
            matches!(load_profile(&text), Err(GeometryError::Reference(m)) if m.contains("pvc"))
        );
    }

    #[test]
    fn malformed_toml_is_a_parse_error() {
        assert!(matches!(
            load_profile("[materials\nwood = "),
            Err(GeometryError::Parse(_))
        ));
        assert!(matches!(
            load_profile("bogus = 1"),
            Err(GeometryError::Parse(_))
        ));
    }

    #[test]
    fn adiabatic_face_rejects_ambient() {
        let text = SQUARE.replacen(
            "kind = \"adiabatic\"",
            "kind = \"adiabatic\"\n        ambient = 3.0",
            1,
        );
        assert!(matches!(load_profile(&text), Err(GeometryError::Parse(_))));
    }

    #[test]
    fn two_layer_fixture() {
        let p = load_profile(include_str!("../../fixtures/two_layer.toml")).unwrap();
        assert_eq!(p.regions.len(), 2);
        let k: Vec<f64> = (0..p.regions.len())
            .map(|i| p.region_conductivity(i).unwrap().unwrap())
            .collect();
        assert_eq!(k, vec![0.13, 0.035]);
        // The shared interface at x = 0.01 carries no face.
        assert!(p
            .boundary
            .iter()
            .all(|f| !(f.segment.start.x == 0.01 && f.segment.end.x == 0.01)));
    }

    #[test]
    fn cavity_geometry_from_region() {
        let p = load_profile(include_str!("../../fixtures/cavity_slab.toml")).unwrap();
        let c = &p.cavities[0];
        assert_eq!(
            c.spec.geometry,
            CavityGeometry::Rectangle {
                width: 0.01,
                depth: 0.01
            }
        );
    }
}
