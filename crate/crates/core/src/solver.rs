//! Explicit pseudo-time integration of the particle heat equation to steady state.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::particles::{KernelSpec, ParticleSet};

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("conductivities must be positive, got {0} and {1}")]
    NonPositiveConductivity(f64, f64),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("particle neighborhoods have not been built")]
    MissingNeighborhoods,
}

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeScheme {
    /// Two-stage first-order Runge-Kutta-Chebyshev; stable up to ~7.3x the
    /// explicit diffusion step, which the lattice operator needs.
    #[default]
    Rkc2,
    /// Plain forward Euler.
    ForwardEuler,
}

impl std::str::FromStr for TimeScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rkc2" => Ok(TimeScheme::Rkc2),
            "euler" | "forward-euler" => Ok(TimeScheme::ForwardEuler),
            _ => Err(format!(
                "unknown time scheme `{s}` (expected rkc2 or euler)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Converged once `max |dT/dt|` drops to this, in K per unit pseudo-time.
    pub steady_tolerance: f64,
    pub max_steps: u64,
    /// Multiplier on the diffusion time step, in `(0, 1]`.
    pub dt_safety: f64,
    /// Steps between progress log lines.
    pub report_interval: u64,
    #[serde(default)]
    pub scheme: TimeScheme,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            steady_tolerance: 1e-6,
            max_steps: 5_000_000,
            dt_safety: 1.0,
            report_interval: 10_000,
            scheme: TimeScheme::Rkc2,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.steady_tolerance > 0.0 && self.steady_tolerance.is_finite()) {
            return Err(SolverError::InvalidConfig(format!(
                "steady tolerance must be positive, got {}",
                self.steady_tolerance
            )));
        }
        if self.max_steps == 0 {
            return Err(SolverError::InvalidConfig(
                "max_steps must be positive".into(),
            ));
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(SolverError::InvalidConfig(format!(
                "dt_safety must lie in (0, 1], got {}",
                self.dt_safety
            )));
        }
        if self.report_interval == 0 {
            return Err(SolverError::InvalidConfig(
                "report_interval must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub temperatures: Vec<f64>,
    pub steps_taken: u64,
    pub final_residual: f64,
    pub converged: bool,
}

/// Interface conductivity `4 k_i k_j / (k_i + k_j)`.
pub fn effective_conductivity(k_i: f64, k_j: f64) -> Result<f64, SolverError> {
    if !(k_i > 0.0 && k_j > 0.0) {
        return Err(SolverError::NonPositiveConductivity(k_i, k_j));
    }
    Ok(4.0 * k_i * k_j / (k_i + k_j))
}

fn pair_coefficient(k_i: f64, k_j: f64, v_j: f64, r: f64, dwdr: f64) -> f64 {
    4.0 * k_i * k_j / (k_i + k_j) * v_j * dwdr / r
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.c
    }
}

/// Conductive part of `dT_i/dt`.
pub fn conduction_rate(ps: &ParticleSet, i: usize) -> f64 {
    let t = &ps.temperature;
    let mut acc = Neumaier::default();
    for (j, r, w) in ps.neighbors().row(i).iter() {
        let c = pair_coefficient(ps.conductivity[i], ps.conductivity[j], ps.volume[j], r, w);
        acc.add(c * (t[i] - t[j]));
    }
    acc.value()
}

/// Convective part of `dT_i/dt`: `sum h_f (T_inf,f - T_i) c_if` over the
/// particle's face links, zero for particles without links.
pub fn convection_rate(ps: &ParticleSet, i: usize) -> f64 {
    let faces = ps.faces();
    let mut acc = Neumaier::default();
    for l in ps.links(i) {
        let face = &faces[l.face];
        if let (Some(h), Some(ambient)) = (face.heat_transfer_coefficient(), face.ambient()) {
            acc.add(h * l.coupling * (ambient - ps.temperature[i]));
        }
    }
    acc.value()
}

/// Diffusion time step `0.5 h² / k_max`.
pub fn diffusion_time_step(smoothing_length: f64, k_max: f64) -> f64 {
    0.5 * smoothing_length * smoothing_length / k_max
}

pub fn stable_dt(ps: &ParticleSet, spec: &KernelSpec, cfg: &SolverConfig) -> f64 {
    cfg.dt_safety * diffusion_time_step(spec.smoothing_length, ps.max_conductivity())
}

/// Pair and link coefficients frozen for repeated rate evaluation. Produces
/// exactly the values of `conduction_rate + convection_rate`.
struct Operator {
    offsets: Vec<usize>,
    index: Vec<usize>,
    coefficient: Vec<f64>,
    link_offsets: Vec<usize>,
    /// `(h_f c_if, T_inf)` per link.
    link: Vec<(f64, f64)>,
}

impl Operator {
    fn new(ps: &ParticleSet) -> Self {
        let n = ps.len();
        let nb = ps.neighbors();
        let mut op = Operator {
            offsets: Vec::with_capacity(n + 1),
            index: Vec::with_capacity(nb.total_pairs()),
            coefficient: Vec::with_capacity(nb.total_pairs()),
            link_offsets: Vec::with_capacity(n + 1),
            link: Vec::new(),
        };
        op.offsets.push(0);
        op.link_offsets.push(0);
        let faces = ps.faces();
        for i in 0..n {
            for (j, r, w) in nb.row(i).iter() {
                op.index.push(j);
                op.coefficient.push(pair_coefficient(
                    ps.conductivity[i],
                    ps.conductivity[j],
                    ps.volume[j],
                    r,
                    w,
                ));
            }
            op.offsets.push(op.index.len());
            for l in ps.links(i) {
                let face = &faces[l.face];
                if let (Some(h), Some(ambient)) = (face.heat_transfer_coefficient(), face.ambient())
                {
                    op.link.push((h * l.coupling, ambient));
                }
            }
            op.link_offsets.push(op.link.len());
        }
        op
    }

    fn rate(&self, t: &[f64], i: usize) -> f64 {
        let mut cond = Neumaier::default();
        for n in self.offsets[i]..self.offsets[i + 1] {
            cond.add(self.coefficient[n] * (t[i] - t[self.index[n]]));
        }
        let mut conv = Neumaier::default();
        for &(g, ambient) in &self.link[self.link_offsets[i]..self.link_offsets[i + 1]] {
            conv.add(g * (ambient - t[i]));
        }
        cond.value() + conv.value()
    }

    fn rates(&self, t: &[f64], out: &mut [f64]) {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(i, r)| *r = self.rate(t, i));
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Two-stage first-order Runge-Kutta-Chebyshev coefficients with damping 2/13.
#[derive(Debug, Clone, Copy)]
struct Rkc2 {
    mu1: f64,
    mu2: f64,
    mu2_tilde: f64,
}

impl Rkc2 {
    fn new() -> Self {
        let eps = 2.0 / 13.0;
        let w0 = 1.0 + eps / 4.0;
        let t2 = 2.0 * w0 * w0 - 1.0;
        let w1 = t2 / (4.0 * w0);
        Rkc2 {
            mu1: w1 / w0,
            mu2: 2.0 * w0 * w0 / t2,
            mu2_tilde: 2.0 * w1 * w0 / t2,
        }
    }
}

struct Integrator {
    op: Operator,
    scheme: TimeScheme,
    rkc: Rkc2,
    f0: Vec<f64>,
    f1: Vec<f64>,
    y1: Vec<f64>,
}

impl Integrator {
    fn new(ps: &ParticleSet, scheme: TimeScheme) -> Self {
        let n = ps.len();
        Integrator {
            op: Operator::new(ps),
            scheme,
            rkc: Rkc2::new(),
            f0: vec![0.0; n],
            f1: vec![0.0; n],
            y1: vec![0.0; n],
        }
    }

    /// Evaluates the rates of `t` into `f0` and returns their max norm.
    fn residual(&mut self, t: &[f64]) -> f64 {
        self.op.rates(t, &mut self.f0);
        max_abs(&self.f0)
    }

    /// Advances `t` by `dt`, assuming `f0` holds the rates of `t`.
    fn advance(&mut self, t: &mut [f64], dt: f64) {
        match self.scheme {
            TimeScheme::ForwardEuler => {
                t.par_iter_mut()
                    .zip(self.f0.par_iter())
                    .for_each(|(y, f)| *y += dt * f);
            }
            TimeScheme::Rkc2 => {
                let Rkc2 {
                    mu1,
                    mu2,
                    mu2_tilde,
                } = self.rkc;
                let f0 = &self.f0;
                self.y1
                    .par_iter_mut()
                    .enumerate()
                    .for_each(|(i, y)| *y = t[i] + mu1 * dt * f0[i]);
                self.op.rates(&self.y1, &mut self.f1);
                let (y1, f1) = (&self.y1, &self.f1);
                t.par_iter_mut()
                    .enumerate()
                    .for_each(|(i, y)| *y += mu2 * (y1[i] - *y) + mu2_tilde * dt * f1[i]);
            }
        }
    }
}

/// One explicit step of size `dt` on a snapshot of the current temperatures.
pub fn step(ps: &mut ParticleSet, dt: f64, scheme: TimeScheme) {
    let mut integ = Integrator::new(ps, scheme);
    let mut t = std::mem::take(&mut ps.temperature);
    integ.residual(&t);
    integ.advance(&mut t, dt);
    ps.temperature = t;
}

/// Largest `|dT/dt|` of the current field.
pub fn residual(ps: &ParticleSet) -> f64 {
    let mut out = vec![0.0; ps.len()];
    Operator::new(ps).rates(&ps.temperature, &mut out);
    max_abs(&out)
}

pub fn run_to_steady(ps: &mut ParticleSet, cfg: &SolverConfig) -> Result<SteadyState, SolverError> {
    run_to_steady_with(ps, cfg, |_, _| {})
}

/// Steps until the residual reaches the tolerance or `max_steps` is spent,
/// leaving the final field in `ps`. `observer` sees `(step, residual)` before
/// each step and once more at the end.
pub fn run_to_steady_with(
    ps: &mut ParticleSet,
    cfg: &SolverConfig,
    mut observer: impl FnMut(u64, f64),
) -> Result<SteadyState, SolverError> {
    cfg.validate()?;
    let kernel = *ps.kernel().ok_or(SolverError::MissingNeighborhoods)?;
    for (i, &k) in ps.conductivity.iter().enumerate() {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(k > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "particle {i} has conductivity {k}"
            )));
        }
    }
    let dt = stable_dt(ps, &kernel, cfg);
    let mut integ = Integrator::new(ps, cfg.scheme);
    let mut t = std::mem::take(&mut ps.temperature);

    let mut steps = 0;
    let mut res = integ.residual(&t);
    observer(0, res);
    while res > cfg.steady_tolerance && steps < cfg.max_steps && res.is_finite() {
        integ.advance(&mut t, dt);
        steps += 1;
        res = integ.residual(&t);
        observer(steps, res);
        if steps % cfg.report_interval == 0 {
            log::info!(
                "step {steps}: residual {res:.3e}, pseudo-time {:.6e}",
                steps as f64 * dt
            );
        }
    }
    let converged = res <= cfg.steady_tolerance;
    if !converged {
        log::warn!("no steady state after {steps} steps: residual {res:.3e}");
    }
    ps.temperature = t;
    Ok(SteadyState {
        temperatures: ps.temperature.clone(),
        steps_taken: steps,
        final_residual: res,
        converged,
    })
}
