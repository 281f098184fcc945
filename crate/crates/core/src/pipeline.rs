//! End-to-end run: cavity resolution, corner zones, particles, solve, report.

use crate::error::Error;
use crate::geometry::{apply_corner_rule, PanelParameters, ProfileSpec, Side};
use crate::particles::{build_neighborhoods, generate_particles, ParticleSet, ResolutionSpec};
use crate::report::{self, heat_flow_rate, ReferenceCase, ReportInputs, SteadyStateReport};
use crate::solver::{run_to_steady_with, SolverConfig, SteadyState};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub resolution: ResolutionSpec,
    pub solver: SolverConfig,
    /// Keep the `(step, residual)` history.
    pub record_history: bool,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    /// Profile after cavity resolution and corner zoning.
    pub profile: ProfileSpec,
    pub particles: ParticleSet,
    pub state: SteadyState,
    pub history: Vec<(u64, f64)>,
    pub report: SteadyStateReport,
}

/// Replaces fully ventilated cavities by exposed faces and applies the corner rule.
pub fn prepare_profile(p: &ProfileSpec) -> Result<ProfileSpec, Error> {
    let resolved = p.resolve_ventilated_cavities()?;
    Ok(apply_corner_rule(&resolved)?)
}

pub fn build_particles(p: &ProfileSpec, res: &ResolutionSpec) -> Result<ParticleSet, Error> {
    let kernel = res.kernel_spec()?;
    let ps = generate_particles(p, res)?;
    Ok(build_neighborhoods(ps, &kernel))
}

/// Reference data declared by a profile: a built-in case, or custom values
/// which then need a `[panel]` section.
pub fn reference_for(p: &ProfileSpec) -> Result<Option<ReferenceCase>, Error> {
    match (&p.reference_values, &p.reference_case) {
        (Some(values), name) => {
            let panel = p.panel.ok_or_else(|| {
                Error::Config("custom reference values need a [panel] section".into())
            })?;
            let case = ReferenceCase {
                name: name.clone().unwrap_or_else(|| "custom".into()),
                l2d_ref: values.l2d,
                uf_ref: values.uf,
                u_p: panel.u_p,
                b_p: panel.b_p,
                b_f: panel.b_f,
            };
            case.validate()?;
            Ok(Some(case))
        }
        (None, Some(name)) => {
            let case = ReferenceCase::builtin(name)?;
            if let Some(panel) = p.panel {
                if panel
                    != (PanelParameters {
                        u_p: case.u_p,
                        b_p: case.b_p,
                        b_f: case.b_f,
                    })
                {
                    log::warn!(
                        "panel section ignored: reference case {name} carries its own panel data"
                    );
                }
            }
            Ok(Some(case))
        }
        (None, None) => Ok(None),
    }
}

pub fn simulate(p: &ProfileSpec, opts: &RunOptions) -> Result<Simulation, Error> {
    let profile = prepare_profile(p)?;
    let reference = reference_for(&profile)?;
    let (t_internal, t_external) = match (
        profile.ambient(Side::Internal),
        profile.ambient(Side::External),
    ) {
        (Some(i), Some(e)) => (i, e),
        (None, _) => return Err(report::ReportError::NoConvectiveFaces(Side::Internal).into()),
        (_, None) => return Err(report::ReportError::NoConvectiveFaces(Side::External).into()),
    };

    let mut particles = build_particles(&profile, &opts.resolution)?;
    log::info!(
        "{} particles, {} neighbor pairs",
        particles.len(),
        particles.neighbors().total_pairs()
    );
    let mut history = Vec::new();
    let record = opts.record_history;
    let state = run_to_steady_with(&mut particles, &opts.solver, |step, r| {
        if record {
            history.push((step, r));
        }
    })?;

    let inputs = ReportInputs {
        q_internal: heat_flow_rate(&particles, Side::Internal)?,
        q_external: heat_flow_rate(&particles, Side::External)?,
        t_internal,
        t_external,
        converged: state.converged,
        steps: state.steps_taken,
        residual: state.final_residual,
        particles: particles.len(),
    };
    let report = report::validate(&inputs, profile.panel, reference.as_ref())?;
    Ok(Simulation {
        profile,
        particles,
        state,
        history,
        report,
    })
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, Error> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Config("thread count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::load_profile;

    fn fixture(name: &str) -> ProfileSpec {
        let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        crate::geometry::load_profile_file(path).unwrap()
    }

    #[test]
    fn slab_balances_and_matches_series_resistance() {
        let sim = simulate(&fixture("slab.toml"), &RunOptions::default()).unwrap();
        assert!(sim.state.converged);
        let exact = 20.0 / (0.13 + 0.02 / 0.13 + 0.04) * 0.05;
        assert!((sim.report.q_internal - exact).abs() / exact < 0.02);
        assert!(sim.report.flux_imbalance < 0.01);
        assert_eq!(sim.report.reference_case, None);
    }

    #[test]
    fn vented_slot_runs_with_exposed_walls() {
        let sim = simulate(&fixture("vented_slot.toml"), &RunOptions::default()).unwrap();
        assert!(sim.state.converged);
        assert!(sim.report.flux_imbalance < 0.01);
        // No particle sits inside the slot.
        assert!(sim
            .particles
            .position
            .iter()
            .all(|x| !(x.x > 0.016 && x.y > 0.004 && x.y < 0.016)));
    }

    #[test]
    fn corner_zone_is_applied() {
        let sim = simulate(&fixture("l_shape.toml"), &RunOptions::default()).unwrap();
        assert!(sim.profile.boundary.iter().any(|f| f.corner_zone));
        assert!(sim
            .state
            .temperatures
            .iter()
            .all(|&t| (0.0..=20.0).contains(&t)));
    }

    #[test]
    fn custom_reference_needs_panel() {
        let text =
            std::fs::read_to_string(format!("{}/fixtures/slab.toml", env!("CARGO_MANIFEST_DIR")))
                .unwrap();
        let p = load_profile(&format!("{text}\n[reference]\nl2d = 0.2\n")).unwrap();
        assert!(matches!(reference_for(&p), Err(Error::Config(_))));
        let p = load_profile(&format!(
            "{text}\n[reference]\nl2d = 0.2\n[panel]\nu_p = 1.0\nb_p = 0.1\nb_f = 0.1\n"
        ))
        .unwrap();
        let r = reference_for(&p).unwrap().unwrap();
        assert_eq!(
            (r.name.as_str(), r.l2d_ref, r.uf_ref),
            ("custom", 0.2, None)
        );
    }

    #[test]
    fn unknown_builtin_case_is_a_report_error() {
        let mut p = fixture("slab.toml");
        p.reference_case = Some("D5".into());
        let e = reference_for(&p).unwrap_err();
        assert!(e.to_string().starts_with("report:"), "{e}");
    }

    #[test]
    fn explicit_thread_pool() {
        assert_eq!(
            with_threads(Some(2), rayon::current_num_threads).unwrap(),
            2
        );
        assert!(with_threads(Some(0), || ()).is_err());
    }
}
