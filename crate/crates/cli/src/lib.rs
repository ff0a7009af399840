//! Command-line driver: computes propagators, wave functions, autocorrelations,
//! phase-space distributions and caustic statistics, and writes them as text
//! files with a matching gnuplot script.

pub mod files;
pub mod plot;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

use sckerr::caustics::{caustic_map, stickiness_scan, DEFAULT_EPS_C};
use sckerr::grid::{linspace, Axis, ComplexField2D, GridSpec, WaveFunction, DEFAULT_HALF_WIDTH};
use sckerr::linear_metaplectic::mehler_kernel;
use sckerr::quantum::{
    coherent_state_fock, coherent_state_position, default_n_max, exact_propagator, kerr_evolve, twa,
    wavefunction_from_fock, wigner_transform,
};
use sckerr::root_search::{maslov_closed_form, maslov_index, Counting, RootSearchParams};
use sckerr::semiclassical::{autocorrelation, hk_propagator, propagate_wavefunction, vvg_propagator, AutocorrConfig, Method};
use sckerr::{PhasePoint, SystemId};

use files::{GridFile, SeriesFile};
use plot::{emit_plot_script, PlotStyle};

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "SCKERR_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] sckerr::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(String),
    #[error("missing file: {0}")]
    MissingFile(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(sckerr::Error::InvalidInput(_)) => 2,
            CliError::Numerical(e) if e.is_numerical_guard() => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemArg {
    Kerr,
    Sho,
}

impl From<SystemArg> for SystemId {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Kerr => SystemId::Kerr,
            SystemArg::Sho => SystemId::Sho,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropMethod {
    Hk,
    Vvg,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutoMethod {
    Quantum,
    Hk,
    Vvg,
    Ivr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StyleArg {
    Modulus,
    Real,
}

fn parse_point(s: &str) -> Result<PhasePoint, String> {
    let (q, p) = s.split_once(',').ok_or("expected q,p")?;
    let q = q.trim().parse().map_err(|_| format!("bad q in {s:?}"))?;
    let p = p.trim().parse().map_err(|_| format!("bad p in {s:?}"))?;
    Ok(PhasePoint::new(q, p))
}

/// Grid and output options shared by the field-producing commands.
#[derive(Debug, Clone, clap::Args)]
struct GridArgs {
    /// Points per axis.
    #[arg(long, default_value_t = 201)]
    grid: usize,
    /// Half-width of the symmetric window.
    #[arg(long, default_value_t = DEFAULT_HALF_WIDTH)]
    window: f64,
    /// Output file; a gnuplot script is written next to it with suffix `.gp`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quantity drawn by the plot script.
    #[arg(long, value_enum, default_value_t = StyleArg::Modulus)]
    style: StyleArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical trajectory, monodromy, actions and caustic count.
    Flow {
        #[arg(long, value_enum, default_value_t = SystemArg::Kerr)]
        system: SystemArg,
        #[arg(long, value_parser = parse_point)]
        center: PhasePoint,
        #[arg(long)]
        t: f64,
        /// Count caustics by sampling with this many steps instead of the closed form.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Position-space propagator on an (x′, x) grid.
    Propagator {
        #[arg(long, value_enum, default_value_t = SystemArg::Kerr)]
        system: SystemArg,
        #[arg(long, value_enum)]
        method: PropMethod,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        grid: GridArgs,
        /// Phase-grid points per axis for H-K (defaults to --grid).
        #[arg(long)]
        phase_grid: Option<usize>,
        /// Fock truncation of the spectral kernel.
        #[arg(long, default_value_t = 57)]
        n_max: usize,
        /// Momentum samples of the vV-G root scan (defaults to --grid).
        #[arg(long)]
        p_samples: Option<usize>,
        /// Half-width of the vV-G momentum scan (defaults to --window).
        #[arg(long)]
        p_window: Option<f64>,
    },
    /// Coherent state propagated to time t.
    Wavefunction {
        #[arg(long, value_enum, default_value_t = SystemArg::Kerr)]
        system: SystemArg,
        #[arg(long, value_enum)]
        method: PropMethod,
        #[arg(long, value_parser = parse_point, default_value = "5,0")]
        center: PhasePoint,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        phase_grid: Option<usize>,
        #[arg(long)]
        p_samples: Option<usize>,
    },
    /// Autocorrelation C(t) = ⟨ψ|ψ(t)⟩ of a coherent state.
    Autocorr {
        #[arg(long, value_enum, default_value_t = SystemArg::Kerr)]
        system: SystemArg,
        #[arg(long, value_enum)]
        method: AutoMethod,
        #[arg(long, value_parser = parse_point, default_value = "5,0")]
        center: PhasePoint,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 300)]
        nt: usize,
        /// IVR phase-grid points per axis.
        #[arg(long, default_value_t = 501)]
        ivr_grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wigner function of the Kerr-evolved coherent state.
    Wigner {
        #[arg(long, value_parser = parse_point, default_value = "5,0")]
        center: PhasePoint,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Truncated Wigner approximation: the initial Wigner function carried by the flow.
    Twa {
        #[arg(long, value_enum, default_value_t = SystemArg::Kerr)]
        system: SystemArg,
        #[arg(long, value_parser = parse_point, default_value = "5,0")]
        center: PhasePoint,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Caustic map b(q, p; t) of the Kerr flow (stored as the real part).
    Caustics {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_EPS_C)]
        eps: f64,
    },
    /// Fraction of each orbit within eps_c of the caustic set, as CSV.
    Stickiness {
        /// Radii as `start:stop:count`.
        #[arg(long, default_value = "0.5:9.4:90")]
        radii: String,
        /// Comma-separated times.
        #[arg(long, value_delimiter = ',', default_value = "0.117,0.205,0.606")]
        times: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_EPS_C)]
        eps_c: f64,
        #[arg(long, default_value_t = 3600)]
        n_phi: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the fast invariant checks and print a pass/fail table.
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "sckerr", version, about = "Semiclassical propagators for the Kerr oscillator")]
struct Cli {
    /// Worker threads for the parallel grid evaluations.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Numerical(n) if e.exit_code() == 3 => eprintln!("error: {}: {n}", n.guard_name()),
                _ => eprintln!("error: {e}"),
            }
            e.exit_code()
        }
    }
}

fn axis(g: &GridArgs) -> Result<Axis, CliError> {
    Ok(Axis::symmetric(g.window, g.grid)?)
}

fn style(s: StyleArg) -> PlotStyle {
    match s {
        StyleArg::Modulus => PlotStyle::Modulus,
        StyleArg::Real => PlotStyle::Real,
    }
}

/// Writes `text` to `path` and a plot script for it to `path.gp`.
fn write_with_script(path: &Path, text: &str, st: PlotStyle) -> Result<(), CliError> {
    std::fs::write(path, text)?;
    let mut script_path = path.as_os_str().to_owned();
    script_path.push(".gp");
    let script = emit_plot_script(&[path.to_path_buf()], st)?;
    std::fs::write(&script_path, script)?;
    println!("wrote {} and {}", path.display(), PathBuf::from(script_path).display());
    Ok(())
}

fn write_grid(field: &ComplexField2D, t: f64, out: Option<PathBuf>, default: &str, st: StyleArg) -> Result<(), CliError> {
    let path = out.unwrap_or_else(|| PathBuf::from(default));
    write_with_script(&path, &GridFile::from_field(field, t).emit(), style(st))
}

fn propagator(
    sys: SystemId,
    method: PropMethod,
    t: f64,
    ax: Axis,
    phase_grid: usize,
    n_max: usize,
    p_samples: usize,
    p_window: f64,
) -> Result<ComplexField2D, CliError> {
    let w = ax.max();
    Ok(match method {
        PropMethod::Hk => hk_propagator(sys, ax, ax, t, &GridSpec::new(phase_grid, phase_grid, (-w, w))?, Counting::ClosedForm)?,
        PropMethod::Vvg => {
            let params = RootSearchParams::for_grid(ax.spacing(), (-p_window, p_window), p_samples)?;
            vvg_propagator(sys, ax, ax, t, &params)?
        }
        PropMethod::Exact => match sys {
            SystemId::Kerr => exact_propagator(ax, ax, t, n_max),
            SystemId::Sho => {
                let mut f = ComplexField2D::zeros(ax, ax);
                for i in 0..ax.len() {
                    for j in 0..ax.len() {
                        f.values[[i, j]] = mehler_kernel(t, ax.value(i), ax.value(j))?;
                    }
                }
                f
            }
        },
    })
}

fn exact_wavefunction(sys: SystemId, center: PhasePoint, t: f64, ax: Axis) -> Result<WaveFunction, CliError> {
    Ok(match sys {
        SystemId::Kerr => {
            let fock = coherent_state_fock(center, default_n_max(center))?;
            wavefunction_from_fock(&kerr_evolve(&fock, t), ax)
        }
        SystemId::Sho => {
            let mut psi = coherent_state_position(SystemId::Sho.flow_point(center, t), ax);
            let g = Complex64::from_polar(1.0, -0.5 * t);
            psi.values.iter_mut().for_each(|v| *v *= g);
            psi
        }
    })
}

fn parse_radii(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Usage(format!("--radii expects start:stop:count, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    Ok(if n == 1 { vec![a] } else { linspace(a, b, n) })
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Flow { system, center, t, steps } => {
            let sys = SystemId::from(system);
            let fr = sys.flow(center, t);
            let mu = match steps {
                Some(n) => maslov_index(sys, center, t, n)?,
                None => maslov_closed_form(sys, center, t),
            };
            let m = fr.monodromy;
            println!("q' = {:.16e}\np' = {:.16e}", fr.point.q, fr.point.p);
            println!("monodromy = [[{:.16e}, {:.16e}], [{:.16e}, {:.16e}]]", m.a, m.b, m.c, m.d);
            println!("S = {:.16e}\nS_W = {:.16e}\nmaslov = {mu}", fr.action_pos, fr.action_weyl);
            Ok(())
        }
        Command::Propagator { system, method, t, grid, phase_grid, n_max, p_samples, p_window } => {
            let ax = axis(&grid)?;
            let f = propagator(
                system.into(),
                method,
                t,
                ax,
                phase_grid.unwrap_or(grid.grid),
                n_max,
                p_samples.unwrap_or(grid.grid),
                p_window.unwrap_or(grid.window),
            )?;
            write_grid(&f, t, grid.out, "propagator.grid", grid.style)
        }
        Command::Wavefunction { system, method, center, t, grid, phase_grid, p_samples } => {
            let sys = SystemId::from(system);
            let ax = axis(&grid)?;
            let psi = match method {
                PropMethod::Exact => exact_wavefunction(sys, center, t, ax)?,
                m => {
                    let k = propagator(sys, m, t, ax, phase_grid.unwrap_or(grid.grid), 0, p_samples.unwrap_or(grid.grid), grid.window)?;
                    propagate_wavefunction(&k, &coherent_state_position(center, ax))?
                }
            };
            println!("norm = {:.6}", psi.norm());
            let file = GridFile {
                nx: ax.len(),
                ny: 1,
                x_range: (ax.min(), ax.max()),
                y_range: (0.0, 0.0),
                t,
                values: psi.values,
            };
            let path = grid.out.unwrap_or_else(|| PathBuf::from("wavefunction.grid"));
            write_with_script(&path, &file.emit(), style(grid.style))
        }
        Command::Autocorr { system, method, center, tmax, nt, ivr_grid, out } => {
            if nt < 2 || !(tmax > 0.0) {
                return Err(CliError::Usage("need --nt ≥ 2 and --tmax > 0".into()));
            }
            let cfg = AutocorrConfig::desk(ivr_grid)?;
            let m = match method {
                AutoMethod::Quantum => Method::Quantum,
                AutoMethod::Hk => Method::Hk,
                AutoMethod::Vvg => Method::Vvg,
                AutoMethod::Ivr => Method::Ivr,
            };
            let s = autocorrelation(m, system.into(), center, &linspace(0.0, tmax, nt), &cfg)?;
            let path = out.unwrap_or_else(|| PathBuf::from("autocorr.csv"));
            write_with_script(&path, &SeriesFile::from_series(&s).emit(), PlotStyle::Modulus)
        }
        Command::Wigner { center, t, grid } => {
            let psi_axis = Axis::symmetric(grid.window, 2 * grid.grid + 1)?;
            let psi = exact_wavefunction(SystemId::Kerr, center, t, psi_axis)?;
            let g = axis(&grid)?;
            let w = wigner_transform(&psi, g, g);
            write_grid(&w, t, grid.out, "wigner.grid", grid.style)
        }
        Command::Twa { system, center, t, grid } => {
            let g = axis(&grid)?;
            let w = twa(system.into(), center, t, g, g);
            write_grid(&w, t, grid.out, "twa.grid", grid.style)
        }
        Command::Caustics { t, grid, eps } => {
            let map = caustic_map(t, &GridSpec::new(grid.grid, grid.grid, (-grid.window, grid.window))?, eps)?;
            println!("points within eps: {}, sign changes: {}", map.caustic_count(), map.zero_crossings());
            write_grid(&map.field, t, grid.out, "caustics.grid", StyleArg::Real)
        }
        Command::Stickiness { radii, times, eps_c, n_phi, out } => {
            let rows = stickiness_scan(&parse_radii(&radii)?, &times, eps_c, n_phi)?;
            let mut s = String::from("t,radius,eps_c,fraction\n");
            for r in rows {
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", r.t, r.radius, r.eps_c, r.fraction);
            }
            let path = out.unwrap_or_else(|| PathBuf::from("stickiness.csv"));
            std::fs::write(&path, s)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Verify => {
            let checks = sckerr_validation::quick_checks();
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(failed))
            }
        }
    }
}
