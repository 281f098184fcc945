use std::collections::HashMap;

use rayon::prelude::*;

use super::KernelSpec;
use crate::geometry::Point2;

/// Neighbor lists in compressed-row form, each row sorted by neighbor index,
/// with cached pair distance and kernel derivative.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Neighborhoods {
    offsets: Vec<usize>,
    index: Vec<usize>,
    distance: Vec<f64>,
    dwdr: Vec<f64>,
}

/// One particle's neighbor row.
#[derive(Debug, Clone, Copy)]
pub struct NeighborRow<'a> {
    pub index: &'a [usize],
    pub distance: &'a [f64],
    pub dwdr: &'a [f64],
}

impl<'a> NeighborRow<'a> {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64, f64)> + 'a {
        let (i, d, w) = (self.index, self.distance, self.dwdr);
        (0..i.len()).map(move |n| (i[n], d[n], w[n]))
    }
}

impl Neighborhoods {
    /// Number of particles the lists were built for.
    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> NeighborRow<'_> {
        let (a, b) = (self.offsets[i], self.offsets[i + 1]);
        NeighborRow {
            index: &self.index[a..b],
            distance: &self.distance[a..b],
            dwdr: &self.dwdr[a..b],
        }
    }

    pub fn total_pairs(&self) -> usize {
        self.index.len()
    }

    /// Neighbor indices of every particle, for comparisons in tests and tools.
    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|i| self.row(i).index.to_vec())
            .collect()
    }
}

/// All `j != i` with `|r_i - r_j| <= support_radius`, found through a uniform
/// grid of cell size `support_radius`.
pub fn find_neighbors(positions: &[Point2], kernel: &KernelSpec) -> Neighborhoods {
    let n = positions.len();
    if n == 0 {
        return Neighborhoods {
            offsets: vec![0],
            ..Default::default()
        };
    }
    let cell = kernel.support_radius;
    let cell_of = |p: Point2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in positions.iter().enumerate() {
        grid.entry(cell_of(p)).or_default().push(i);
    }
    let r2 = kernel.support_radius * kernel.support_radius;

    let rows: Vec<Vec<(usize, f64)>> = positions
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let (cx, cy) = cell_of(p);
            let mut row = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(bucket) = grid.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &j in bucket {
                        if j == i {
                            continue;
                        }
                        let d = p - positions[j];
                        let d2 = d.dot(d);
                        if d2 <= r2 {
                            row.push((j, d2.sqrt()));
                        }
                    }
                }
            }
            row.sort_unstable_by_key(|&(j, _)| j);
            row
        })
        .collect();

    let mut nb = Neighborhoods {
        offsets: Vec::with_capacity(n + 1),
        ..Default::default()
    };
    nb.offsets.push(0);
    for row in rows {
        for (j, r) in row {
            nb.index.push(j);
            nb.distance.push(r);
            nb.dwdr.push(kernel.derivative(r));
        }
        nb.offsets.push(nb.index.len());
    }
    nb
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particles::KernelFamily;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kernel(h: f64) -> KernelSpec {
        KernelSpec::new(KernelFamily::WendlandC2, h).unwrap()
    }

    fn brute_force(points: &[Point2], radius: f64) -> Vec<Vec<usize>> {
        (0..points.len())
            .map(|i| {
                (0..points.len())
                    .filter(|&j| {
                        j != i
                            && (points[i] - points[j]).dot(points[i] - points[j]) <= radius * radius
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn single_particle_has_no_neighbors() {
        let nb = find_neighbors(&[Point2::new(0.0, 0.0)], &kernel(1.0));
        assert!(nb.row(0).is_empty());
    }

    #[test]
    fn pair_beyond_support_is_disconnected() {
        let k = kernel(1.0);
        let nb = find_neighbors(
            &[
                Point2::new(0.0, 0.0),
                Point2::new(k.support_radius + 1e-9, 0.0),
            ],
            &k,
        );
        assert!(nb.row(0).is_empty() && nb.row(1).is_empty());
        let nb = find_neighbors(
            &[
                Point2::new(0.0, 0.0),
                Point2::new(k.support_radius * 0.99, 0.0),
            ],
            &k,
        );
        assert_eq!(nb.to_lists(), vec![vec![1], vec![0]]);
    }

    #[test]
    fn random_clouds_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = rng.gen_range(1..=500);
            let pts: Vec<Point2> = (0..n)
                .map(|_| Point2::new(rng.gen_range(-0.02..0.03), rng.gen_range(0.0..0.01)))
                .collect();
            let k = kernel(0.0013);
            assert_eq!(
                find_neighbors(&pts, &k).to_lists(),
                brute_force(&pts, k.support_radius)
            );
        }
    }

    proptest! {
        #[test]
        fn lists_are_symmetric(raw in prop::collection::vec((0.0f64..0.01, 0.0f64..0.01), 1..200)) {
            let pts: Vec<Point2> = raw.iter().map(|&(x, y)| Point2::new(x, y)).collect();
            let nb = find_neighbors(&pts, &kernel(0.0013));
            for i in 0..pts.len() {
                for (j, r, w) in nb.row(i).iter() {
                    prop_assert!(j != i);
                    let back = nb.row(j);
                    let pos = back.index.binary_search(&i);
                    prop_assert!(pos.is_ok());
                    let pos = pos.unwrap();
                    prop_assert_eq!(back.distance[pos], r);
                    prop_assert_eq!(back.dwdr[pos], w);
                }
            }
        }
    }
}
