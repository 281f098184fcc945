//! Particle lattice, kernels and neighbor lists.

mod kernel;
mod lattice;
mod neighbors;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoundaryFace, GeometryError, Point2};

pub use kernel::{kernel_derivative, KernelFamily, KernelSpec};
pub use lattice::{build_neighborhoods, generate_particles};
pub use neighbors::{find_neighbors, NeighborRow, Neighborhoods};

#[derive(Debug, Error)]
pub enum ParticleError {
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("region `{region}` is {width} m wide at its narrowest, less than 2 x dp = {}", 2.0 * dp)]
    Unresolved { region: String, width: f64, dp: f64 },
    #[error("kernel derivative requested at r = {r}, outside (0, {support}]")]
    KernelDomain { r: f64, support: f64 },
    #[error("profile produced no particles at dp = {0}")]
    Empty(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Particle spacing and smoothing-length ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionSpec {
    pub dp: f64,
    pub h_over_dp: f64,
    #[serde(default)]
    pub kernel: KernelFamily,
}

impl Default for ResolutionSpec {
    fn default() -> Self {
        ResolutionSpec {
            dp: 0.001,
            h_over_dp: 1.3,
            kernel: KernelFamily::WendlandC2,
        }
    }
}

impl ResolutionSpec {
    pub fn with_dp(dp: f64) -> Self {
        ResolutionSpec {
            dp,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParticleError> {
        if !(self.dp > 0.0 && self.dp.is_finite()) {
            return Err(ParticleError::InvalidResolution(format!(
                "dp must be positive, got {}",
                self.dp
            )));
        }
        if !(self.h_over_dp >= 1.0 && self.h_over_dp.is_finite()) {
            return Err(ParticleError::InvalidResolution(format!(
                "h/dp must be at least 1, got {}",
                self.h_over_dp
            )));
        }
        Ok(())
    }

    pub fn smoothing_length(&self) -> f64 {
        self.h_over_dp * self.dp
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec, ParticleError> {
        self.validate()?;
        KernelSpec::new(self.kernel, self.smoothing_length())
    }
}

/// Convective coupling between a particle and a boundary face, in 1/m.
/// Summed as `V_i * coupling` over a face's particles it recovers the face length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceLink {
    pub face: usize,
    pub coupling: f64,
}

/// Lattice bookkeeping for particles generated on a square grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub origin: Point2,
    pub spacing: f64,
    pub sites: Vec<(i64, i64)>,
}

/// Particles in structure-of-arrays layout.
#[derive(Debug, Clone)]
pub struct ParticleSet {
    pub position: Vec<Point2>,
    pub volume: Vec<f64>,
    pub conductivity: Vec<f64>,
    pub temperature: Vec<f64>,
    /// Nearest boundary face within the support radius.
    pub boundary_face: Vec<Option<usize>>,
    faces: Vec<BoundaryFace>,
    lattice: Option<Lattice>,
    kernel: Option<KernelSpec>,
    neighbors: Neighborhoods,
    link_offsets: Vec<usize>,
    links: Vec<SurfaceLink>,
}

impl ParticleSet {
    /// Free particle cloud without faces or lattice, e.g. for insulated test systems.
    pub fn from_points(
        position: Vec<Point2>,
        volume: f64,
        conductivity: f64,
        temperature: Vec<f64>,
    ) -> Self {
        let n = position.len();
        assert_eq!(temperature.len(), n, "one temperature per particle");
        ParticleSet {
            position,
            volume: vec![volume; n],
            conductivity: vec![conductivity; n],
            temperature,
            boundary_face: vec![None; n],
            faces: Vec::new(),
            lattice: None,
            kernel: None,
            neighbors: Neighborhoods::default(),
            link_offsets: vec![0; n + 1],
            links: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn faces(&self) -> &[BoundaryFace] {
        &self.faces
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    /// Kernel the neighborhoods were built with.
    pub fn kernel(&self) -> Option<&KernelSpec> {
        self.kernel.as_ref()
    }

    pub fn neighbors(&self) -> &Neighborhoods {
        &self.neighbors
    }

    pub fn has_neighborhoods(&self) -> bool {
        self.kernel.is_some()
    }

    pub fn links(&self, i: usize) -> &[SurfaceLink] {
        &self.links[self.link_offsets[i]..self.link_offsets[i + 1]]
    }

    pub fn max_conductivity(&self) -> f64 {
        self.conductivity.iter().copied().fold(0.0, f64::max)
    }

    pub fn total_volume(&self) -> f64 {
        self.volume.iter().sum()
    }
}
