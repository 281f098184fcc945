//! Command-line interface.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cavity::{self, CavityConductivity, CavityConstants, CavityGeometry, CavitySpec};
use crate::error::Error;
use crate::export::{write_convergence_log, write_field_csv, write_field_vtk};
use crate::geometry::load_profile_file;
use crate::particles::{KernelFamily, ResolutionSpec};
use crate::pipeline::{simulate, with_threads, RunOptions, Simulation};
use crate::solver::{SolverConfig, TimeScheme};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_VALIDATION_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "sphtherm",
    version,
    about = "SPH steady-state heat transfer through window-frame sections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a profile to steady state and report heat flow and conductance.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Solve a profile and check it against its reference values.
    Validate {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Solve a profile and write the temperature field only.
    ExportField {
        #[command(flatten)]
        run: RunArgs,
        /// Output file.
        #[arg(short, long)]
        output: PathBuf,
        /// Field format; defaults from the file extension.
        #[arg(long, value_enum)]
        format: Option<FieldFormat>,
    },
    /// Equivalent conductivity of an air cavity.
    Cavity(CavityArgs),
}

/// Inputs shared by the solving subcommands.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Profile document (TOML).
    pub input: PathBuf,
    /// Particle spacing, m.
    #[arg(long, default_value_t = 0.001)]
    pub dp: f64,
    /// Smoothing length over particle spacing.
    #[arg(long, default_value_t = 1.3)]
    pub h_over_dp: f64,
    /// Kernel family: wendland-c2 or quintic-spline.
    #[arg(long, default_value = "wendland-c2")]
    pub kernel: KernelFamily,
    /// Steady-state threshold on max |dT/dt|.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 5_000_000)]
    pub max_steps: u64,
    /// Multiplier on the diffusion time step, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub dt_safety: f64,
    /// Steps between progress lines on stderr.
    #[arg(long, default_value_t = 10_000)]
    pub report_interval: u64,
    /// Time scheme: rkc2 or euler.
    #[arg(long, default_value = "rkc2")]
    pub scheme: TimeScheme,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the field as CSV (x,y,k,T).
    #[arg(long)]
    pub field_csv: Option<PathBuf>,
    /// Write the field as legacy VTK.
    #[arg(long)]
    pub vtk: Option<PathBuf>,
    /// Write the report as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the residual history as CSV (step,residual).
    #[arg(long)]
    pub convergence_log: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldFormat {
    Csv,
    Vtk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct CavityArgs {
    /// Cavity width across the heat flow, m (rectangle, or equivalent-rectangle input).
    #[arg(long)]
    pub width: f64,
    /// Cavity depth along the heat flow, m.
    #[arg(long)]
    pub depth: f64,
    /// Cross-section area of a non-rectangular cavity, m².
    #[arg(long)]
    pub area: Option<f64>,
    /// Width of the gap connecting the cavity to the surroundings, m.
    #[arg(long, default_value_t = 0.0)]
    pub gap: f64,
    #[arg(long, default_value_t = CavityConstants::default().c1)]
    pub c1: f64,
    #[arg(long, default_value_t = CavityConstants::default().c3)]
    pub c3: f64,
    #[arg(long, default_value_t = CavityConstants::default().c4)]
    pub c4: f64,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
}

impl RunArgs {
    pub fn options(&self, record_history: bool) -> RunOptions {
        RunOptions {
            resolution: ResolutionSpec {
                dp: self.dp,
                h_over_dp: self.h_over_dp,
                kernel: self.kernel,
            },
            solver: SolverConfig {
                steady_tolerance: self.tolerance,
                max_steps: self.max_steps,
                dt_safety: self.dt_safety,
                report_interval: self.report_interval,
                scheme: self.scheme,
            },
            record_history,
        }
    }
}

/// Parses `args` (program name first) and runs, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command) -> Result<i32, Error> {
    match command {
        Command::Simulate { run, outputs } => {
            let sim = solve(&run, outputs.convergence_log.is_some())?;
            write_outputs(&sim, &outputs)?;
            print!("{}", sim.report.to_text());
            Ok(if sim.state.converged {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            })
        }
        Command::Validate { run, outputs } => {
            let profile = load_profile_file(&run.input)?;
            if profile.reference_case.is_none() && profile.reference_values.is_none() {
                return Err(Error::Config(
                    "validate needs `reference_case` or a [reference] section in the profile"
                        .into(),
                ));
            }
            let sim = solve(&run, outputs.convergence_log.is_some())?;
            write_outputs(&sim, &outputs)?;
            print!("{}", sim.report.to_text());
            Ok(if !sim.state.converged {
                EXIT_NOT_CONVERGED
            } else if sim.report.all_pass() {
                EXIT_OK
            } else {
                EXIT_VALIDATION_FAILED
            })
        }
        Command::ExportField {
            run,
            output,
            format,
        } => {
            let sim = solve(&run, false)?;
            let format =
                format.unwrap_or_else(|| match output.extension().and_then(|e| e.to_str()) {
                    Some(e) if e.eq_ignore_ascii_case("vtk") => FieldFormat::Vtk,
                    _ => FieldFormat::Csv,
                });
            match format {
                FieldFormat::Csv => write_file(&output, |w| write_field_csv(&sim.particles, w))?,
                FieldFormat::Vtk => write_file(&output, |w| write_field_vtk(&sim.particles, w))?,
            }
            Ok(if sim.state.converged {
                EXIT_OK
            } else {
                EXIT_NOT_CONVERGED
            })
        }
        Command::Cavity(args) => {
            let text = cavity_table(&args)?;
            print!("{text}");
            Ok(EXIT_OK)
        }
    }
}

fn solve(run: &RunArgs, record_history: bool) -> Result<Simulation, Error> {
    let profile = load_profile_file(&run.input)?;
    let opts = run.options(record_history);
    with_threads(run.threads, || simulate(&profile, &opts))?
}

fn write_outputs(sim: &Simulation, outputs: &OutputArgs) -> Result<(), Error> {
    if let Some(path) = &outputs.field_csv {
        write_file(path, |w| write_field_csv(&sim.particles, w))?;
    }
    if let Some(path) = &outputs.vtk {
        write_file(path, |w| write_field_vtk(&sim.particles, w))?;
    }
    if let Some(path) = &outputs.convergence_log {
        write_file(path, |w| write_convergence_log(&sim.history, w))?;
    }
    if let Some(path) = &outputs.report {
        write_file(path, |mut w| {
            w.write_all(sim.report.to_json().as_bytes())?;
            w.write_all(b"\n")?;
            w.flush()
        })?;
    }
    Ok(())
}

fn write_file(path: &Path, f: impl FnOnce(BufWriter<File>) -> io::Result<()>) -> Result<(), Error> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    f(BufWriter::new(file)).map_err(io_err)
}

/// Coefficient table for the `cavity` subcommand.
pub fn cavity_table(args: &CavityArgs) -> Result<String, Error> {
    let constants = CavityConstants {
        c1: args.c1,
        c3: args.c3,
        c4: args.c4,
    };
    let geometry = match args.area {
        Some(area) => CavityGeometry::Polygon {
            area,
            depth: args.depth,
            width: args.width,
        },
        None => CavityGeometry::Rectangle {
            width: args.width,
            depth: args.depth,
        },
    };
    let spec = CavitySpec {
        geometry,
        gap_width: args.gap,
    };
    let a = cavity::analyze(&spec, &constants)?;
    let k_eq = match a.conductivity {
        CavityConductivity::Conductive { k_eq } => format!("{k_eq}"),
        CavityConductivity::FullyVentilated => "exposed".to_string(),
    };
    Ok(match args.format {
        TableFormat::Csv => format!(
            "class,width,depth,h_a,h_r,R,k_eq\n{},{},{},{},{},{},{}\n",
            a.class, a.width, a.depth, a.h_a, a.h_r, a.resistance, k_eq
        ),
        TableFormat::Text => {
            let mut s = String::new();
            s.push_str(&format!("{:<14} {}\n", "class", a.class));
            for (name, value, unit) in [
                ("width b", a.width, "m"),
                ("depth d", a.depth, "m"),
                ("h_a", a.h_a, "W/(m²·K)"),
                ("h_r", a.h_r, "W/(m²·K)"),
                ("R", a.resistance, "m²·K/W"),
            ] {
                s.push_str(&format!("{name:<14} {value:<12.6} {unit}\n"));
            }
            match a.conductivity {
                CavityConductivity::Conductive { k_eq } => {
                    s.push_str(&format!("{:<14} {k_eq:<12.6} W/(m·K)\n", "k_eq"))
                }
                CavityConductivity::FullyVentilated => s.push_str(&format!(
                    "{:<14} walls treated as exposed surfaces\n",
                    "k_eq"
                )),
            }
            s
        }
    })
}
