use std::collections::HashMap;

use rayon::prelude::*;

use super::{
    find_neighbors, KernelSpec, Lattice, Neighborhoods, ParticleError, ParticleSet, ResolutionSpec,
    SurfaceLink,
};
use crate::geometry::{BoundaryFace, Point2, ProfileSpec, Segment, Side, LENGTH_EPS};

/// Lattice index, centre and volume of one particle site.
type Site = ((i64, i64), Point2, f64);

/// Fills every solid region with a square lattice of spacing `dp`, sampling at
/// cell centres. Fully ventilated cavities must already be resolved.
pub fn generate_particles(
    p: &ProfileSpec,
    res: &ResolutionSpec,
) -> Result<ParticleSet, ParticleError> {
    let kernel = res.kernel_spec()?;
    let dp = res.dp;

    let solid: Vec<usize> = (0..p.regions.len())
        .filter(|&i| !p.is_open_cavity(i))
        .collect();
    for &i in &solid {
        let region = &p.regions[i];
        let width = region.polygon.min_feature_width();
        if width < 2.0 * dp {
            return Err(ParticleError::Unresolved {
                region: region.name.clone(),
                width,
                dp,
            });
        }
        p.region_conductivity(i)?;
    }

    let (mut lo, mut hi) = (
        Point2::new(f64::INFINITY, f64::INFINITY),
        Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for &i in &solid {
        let (a, b) = p.regions[i].polygon.bounds();
        lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
    }
    if solid.is_empty() {
        return Err(ParticleError::Empty(dp));
    }
    let nx = ((hi.x - lo.x) / dp - 1e-9).ceil().max(0.0) as i64;
    let ny = ((hi.y - lo.y) / dp - 1e-9).ceil().max(0.0) as i64;

    let rows: Vec<Vec<Site>> = (0..ny)
        .into_par_iter()
        .map(|b| {
            let mut row = Vec::new();
            for a in 0..nx {
                let c = site_center(lo, dp, (a, b));
                if let Some(region) = p.region_at(c) {
                    // Conductivity errors were surfaced above.
                    let k = p.region_conductivity(region).ok().flatten().unwrap_or(0.0);
                    row.push(((a, b), c, k));
                }
            }
            row
        })
        .collect();

    let mut sites = Vec::new();
    let mut position = Vec::new();
    let mut conductivity = Vec::new();
    for (site, c, k) in rows.into_iter().flatten() {
        sites.push(site);
        position.push(c);
        conductivity.push(k);
    }
    if position.is_empty() {
        return Err(ParticleError::Empty(dp));
    }
    let n = position.len();

    let ambients: Vec<f64> = [Side::Internal, Side::External]
        .into_iter()
        .filter_map(|s| p.ambient(s))
        .collect();
    let t0 = if ambients.is_empty() {
        0.0
    } else {
        ambients.iter().sum::<f64>() / ambients.len() as f64
    };

    let faces = p.boundary.clone();
    let boundary_face = position
        .par_iter()
        .map(|&x| nearest_face(&faces, x, kernel.support_radius))
        .collect();

    Ok(ParticleSet {
        position,
        volume: vec![dp * dp; n],
        conductivity,
        temperature: vec![t0; n],
        boundary_face,
        faces,
        lattice: Some(Lattice {
            origin: lo,
            spacing: dp,
            sites,
        }),
        kernel: None,
        neighbors: Neighborhoods::default(),
        link_offsets: vec![0; n + 1],
        links: Vec::new(),
    })
}

fn site_center(origin: Point2, dp: f64, (a, b): (i64, i64)) -> Point2 {
    Point2::new(
        origin.x + (a as f64 + 0.5) * dp,
        origin.y + (b as f64 + 0.5) * dp,
    )
}

fn nearest_face(faces: &[BoundaryFace], x: Point2, radius: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (f, face) in faces.iter().enumerate() {
        let d = face.segment.distance_to(x);
        if d <= radius && best.is_none_or(|(_, bd)| d < bd) {
            best = Some((f, d));
        }
    }
    best.map(|(f, _)| f)
}

/// Builds neighbor lists with cached `r_ij` and `dW/dr`, and for lattice
/// particles the convective links to the boundary faces.
///
/// A particle exchanges heat with a convective face through the empty lattice
/// sites beyond it: every vacant site `g` within the support whose segment from
/// the particle first crosses that face contributes `dp² |dW/dr(|r_i - g|)|`.
/// Each face's weights are then scaled so that they integrate to its length.
pub fn build_neighborhoods(mut ps: ParticleSet, spec: &KernelSpec) -> ParticleSet {
    ps.neighbors = find_neighbors(&ps.position, spec);
    ps.kernel = Some(*spec);
    let n = ps.len();
    ps.link_offsets = vec![0; n + 1];
    ps.links.clear();
    let Some(lattice) = ps.lattice.as_ref() else {
        return ps;
    };
    if ps.faces.is_empty() {
        return ps;
    }

    let occupied: HashMap<(i64, i64), usize> = lattice
        .sites
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i))
        .collect();
    let dp = lattice.spacing;
    let reach = (spec.support_radius / dp + 1e-9).floor() as i64;
    let mut offsets = Vec::new();
    for a in -reach..=reach {
        for b in -reach..=reach {
            let r = dp * ((a * a + b * b) as f64).sqrt();
            if (a, b) != (0, 0) && r <= spec.support_radius * (1.0 + 1e-12) {
                let w = spec.derivative(r).abs();
                if w > 0.0 {
                    offsets.push(((a, b), w));
                }
            }
        }
    }

    let faces = &ps.faces;
    let raw: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            if ps.boundary_face[i].is_none() {
                return Vec::new();
            }
            let xi = ps.position[i];
            let near: Vec<usize> = (0..faces.len())
                .filter(|&f| faces[f].segment.distance_to(xi) <= spec.support_radius)
                .collect();
            let (sa, sb) = lattice.sites[i];
            let mut acc: Vec<(usize, f64)> = Vec::new();
            for &((a, b), w) in &offsets {
                let site = (sa + a, sb + b);
                if occupied.contains_key(&site) {
                    continue;
                }
                let g = site_center(lattice.origin, dp, site);
                let Some(f) = first_crossing(faces, &near, Segment::new(xi, g)) else {
                    continue;
                };
                if faces[f].heat_transfer_coefficient().is_none() {
                    continue;
                }
                let weight = dp * dp * w;
                match acc.iter_mut().find(|(face, _)| *face == f) {
                    Some((_, s)) => *s += weight,
                    None => acc.push((f, weight)),
                }
            }
            acc.sort_by_key(|&(f, _)| f);
            acc
        })
        .collect();

    let mut measure = vec![0.0; faces.len()];
    for (i, row) in raw.iter().enumerate() {
        for &(f, w) in row {
            measure[f] += ps.volume[i] * w;
        }
    }
    for (f, face) in faces.iter().enumerate() {
        if face.heat_transfer_coefficient().is_some() && measure[f] == 0.0 {
            log::warn!(
                "convective face #{f} from ({}, {}) to ({}, {}) has no adjacent particles and is ignored",
                face.segment.start.x,
                face.segment.start.y,
                face.segment.end.x,
                face.segment.end.y
            );
        }
    }

    let mut links = Vec::new();
    let mut link_offsets = Vec::with_capacity(n + 1);
    link_offsets.push(0);
    for row in raw {
        for (f, w) in row {
            links.push(SurfaceLink {
                face: f,
                coupling: faces[f].length() / measure[f] * w,
            });
        }
        link_offsets.push(links.len());
    }
    ps.links = links;
    ps.link_offsets = link_offsets;
    ps
}

/// Face crossed first along `path`, ties going to the lower face index.
fn first_crossing(faces: &[BoundaryFace], candidates: &[usize], path: Segment) -> Option<usize> {
    let slack = LENGTH_EPS / path.length();
    let mut best: Option<(usize, f64)> = None;
    for &f in candidates {
        if let Some((s, _)) = path.intersection(&faces[f].segment) {
            if best.is_none_or(|(_, bs)| s < bs - slack) {
                best = Some((f, s));
            }
        }
    }
    best.map(|(f, _)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{load_profile, FaceKind, Polygon};
    use crate::particles::{kernel_derivative, KernelFamily};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn slab() -> ProfileSpec {
        load_profile(include_str!("../../fixtures/slab.toml")).unwrap()
    }

    fn square(side: f64, k: f64) -> ProfileSpec {
        let mut p = crate::geometry::tests::square_profile();
        p.materials[0].conductivity = k;
        p.regions[0].polygon = Polygon::rectangle(Point2::new(0.0, 0.0), Point2::new(side, side));
        p.boundary.clear();
        p
    }

    /// Interior lattice point of a large square and its kernel.
    fn interior() -> (ParticleSet, usize, KernelSpec) {
        let res = ResolutionSpec::default();
        let k = res.kernel_spec().unwrap();
        let ps = build_neighborhoods(generate_particles(&square(0.011, 0.13), &res).unwrap(), &k);
        let centre = ps
            .position
            .iter()
            .position(|x| x.approx_eq(Point2::new(0.0055, 0.0055)))
            .unwrap();
        (ps, centre, k)
    }

    #[test]
    fn counts_and_volumes_on_a_square() {
        let ps = generate_particles(&square(0.01, 0.13), &ResolutionSpec::default()).unwrap();
        assert_eq!(ps.len(), 100);
        assert!(ps.volume.iter().all(|&v| (v - 1e-6).abs() < 1e-20));
        assert!(ps.conductivity.iter().all(|&k| k == 0.13));
    }

    #[test]
    fn thin_region_is_rejected_by_name() {
        let mut p = square(0.01, 0.13);
        p.regions[0].polygon = Polygon::rectangle(Point2::new(0.0, 0.0), Point2::new(0.0015, 0.01));
        match generate_particles(&p, &ResolutionSpec::default()) {
            Err(ParticleError::Unresolved { region, .. }) => assert_eq!(region, p.regions[0].name),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn initial_temperature_is_mean_ambient() {
        let ps = generate_particles(&slab(), &ResolutionSpec::default()).unwrap();
        assert!(ps.temperature.iter().all(|&t| t == 10.0));
    }

    #[test]
    fn interior_particle_has_twenty_neighbors() {
        let (ps, c, _) = interior();
        // Integer offsets with norm <= 2.6, origin excluded.
        let expected = (-3i32..=3)
            .flat_map(|a| (-3i32..=3).map(move |b| (a, b)))
            .filter(|&(a, b)| (a, b) != (0, 0) && ((a * a + b * b) as f64).sqrt() <= 2.6)
            .count();
        assert_eq!(expected, 20);
        assert_eq!(ps.neighbors().row(c).len(), 20);
    }

    #[test]
    fn lattice_kernel_sum_is_near_one() {
        let (ps, c, k) = interior();
        let sum: f64 = k.value(0.0) * ps.volume[c]
            + ps.neighbors()
                .row(c)
                .iter()
                .map(|(j, r, _)| ps.volume[j] * k.value(r))
                .sum::<f64>();
        // Direct lattice summation for Wendland C2 at h = 1.3 dp.
        assert!((sum - 1.01047).abs() < 1e-5, "{sum}");
        assert!((sum - 1.0).abs() < 0.011);
    }

    #[test]
    fn interior_gradient_sum_vanishes() {
        let (ps, c, k) = interior();
        let (mut gx, mut gy) = (0.0, 0.0);
        for (j, r, _) in ps.neighbors().row(c).iter() {
            let w = kernel_derivative(r, &k).unwrap();
            let d = ps.position[c] - ps.position[j];
            gx += ps.volume[j] * w * d.x / r;
            gy += ps.volume[j] * w * d.y / r;
        }
        assert!(gx.abs() < 1e-10 && gy.abs() < 1e-10, "{gx} {gy}");
    }

    #[test]
    fn boundary_tags_pick_nearest_face() {
        let p = slab();
        let ps = generate_particles(&p, &ResolutionSpec::default()).unwrap();
        // First particle sits in the bottom-left corner, equidistant from the
        // internal (#0) and bottom (#2) faces.
        assert_eq!(ps.boundary_face[0], Some(0));
        let mid = ps
            .position
            .iter()
            .position(|x| x.approx_eq(Point2::new(0.0105, 0.0255)))
            .unwrap();
        assert_eq!(ps.boundary_face[mid], None);
        let right = ps
            .position
            .iter()
            .position(|x| x.approx_eq(Point2::new(0.0195, 0.0255)))
            .unwrap();
        assert_eq!(
            p.boundary[ps.boundary_face[right].unwrap()].kind(),
            FaceKind::ExternalConvection
        );
    }

    #[test]
    fn links_integrate_to_face_length() {
        let p = slab();
        let res = ResolutionSpec::default();
        let ps = build_neighborhoods(
            generate_particles(&p, &res).unwrap(),
            &res.kernel_spec().unwrap(),
        );
        let mut measure = vec![0.0; p.boundary.len()];
        for i in 0..ps.len() {
            for l in ps.links(i) {
                measure[l.face] += ps.volume[i] * l.coupling;
            }
        }
        assert_relative_eq!(measure[0], 0.05, max_relative = 1e-12);
        assert_relative_eq!(measure[1], 0.05, max_relative = 1e-12);
        assert_eq!(measure[2], 0.0);
        assert_eq!(measure[3], 0.0);
        // Only the two outermost columns see vacant sites beyond a convective face.
        assert!(ps
            .position
            .iter()
            .enumerate()
            .all(|(i, x)| ps.links(i).is_empty() || x.x < 0.002 || x.x > 0.018));
    }

    #[test]
    fn quintic_kernel_is_selectable() {
        let res = ResolutionSpec {
            kernel: KernelFamily::QuinticSpline,
            ..Default::default()
        };
        let k = res.kernel_spec().unwrap();
        assert!((k.support_radius - 3.0 * 0.0013).abs() < 1e-15);
        let ps = build_neighborhoods(generate_particles(&square(0.01, 0.13), &res).unwrap(), &k);
        assert!(ps.neighbors().total_pairs() > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn particle_area_matches_region_area(
            w in 0.004f64..0.03,
            h in 0.004f64..0.03,
            x0 in -0.01f64..0.01,
            cut in 0.2f64..0.8,
        ) {
            // An L-shaped region: the rectangle minus its upper-right quadrant.
            let poly = Polygon::new(vec![
                Point2::new(x0, 0.0),
                Point2::new(x0 + w, 0.0),
                Point2::new(x0 + w, h * cut),
                Point2::new(x0 + w * cut, h * cut),
                Point2::new(x0 + w * cut, h),
                Point2::new(x0, h),
            ]);
            let dp = 0.001f64.min(poly.min_feature_width() / 2.0);
            let mut p = square(0.01, 0.13);
            p.regions[0].polygon = poly.clone();
            let ps = generate_particles(&p, &ResolutionSpec::with_dp(dp)).unwrap();
            let area = ps.len() as f64 * dp * dp;
            prop_assert!((area - poly.area()).abs() <= poly.perimeter() * dp,
                "area {} vs {}", area, poly.area());
        }
    }
}
