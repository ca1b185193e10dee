//! Command-line front end.
//!
//! Exit statuses: 0 on success, 1 on a runtime failure, 2 on a usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::driver::{self, ConvergenceTable, ManufacturedProblem, SolveOptions};
use crate::element::{LocalElementMatrices, StabilizationPolicy};
use crate::linalg::DenseMatrix;
use crate::mesh::{generate, MeshFamily, MeshFamilySpec, PolygonalMesh};
use crate::oracle;
use crate::plot::SvgScene;

#[derive(Debug, Parser)]
#[command(
    name = "polyvem",
    version,
    about = "Lowest-order virtual elements for the Poisson problem on polygonal meshes",
    arg_required_else_help = true
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a mesh and write it as JSON
    Mesh {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve once and report the errors
    Run {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write measured wall time instead of 0
        #[arg(long)]
        timing: bool,
    },
    /// Convergence study over refinement levels (resolution doubles per level)
    Study {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        solve: SolveArgs,
        /// Number of levels, at least 2
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(2..=10))]
        levels: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write measured wall time instead of 0
        #[arg(long)]
        timing: bool,
    },
    /// Per-cell stability constants against the harmonic oracle
    Stability {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, value_enum, default_value_t = NuPolicy::Unit)]
        nu: NuPolicy,
        /// Oracle refinement levels
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(0..=5))]
        oracle_levels: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of the mesh, optionally colored by the projected solution
    Plot {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Solve this problem and color cells by the centroid value
        #[arg(long, value_enum)]
        problem: Option<Problem>,
        #[arg(long, value_enum, default_value_t = NuPolicy::Unit)]
        nu: NuPolicy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the local matrices of one cell
    DumpElement {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 0)]
        cell: usize,
        #[arg(long, value_enum, default_value_t = NuPolicy::Unit)]
        nu: NuPolicy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct MeshArgs {
    #[arg(long, value_enum, default_value_t = Family::Quad)]
    pub family: Family,
    /// Resolution (cells per side); the first level of a study
    #[arg(long = "n", default_value_t = 4)]
    pub resolution: usize,
    /// Interior vertex displacement as a fraction of 1/n (perturbed_quad)
    #[arg(long, default_value_t = MeshFamilySpec::DEFAULT_PERTURBATION)]
    pub perturbation: f64,
    #[arg(long, default_value_t = MeshFamilySpec::DEFAULT_SEED)]
    pub seed: u64,
    /// Read the mesh from a JSON file instead of generating one
    #[arg(long)]
    pub mesh: Option<PathBuf>,
}

impl MeshArgs {
    pub fn spec(&self) -> MeshFamilySpec {
        MeshFamilySpec {
            family: self.family.into(),
            resolution: self.resolution,
            perturbation: self.perturbation,
            seed: self.seed,
        }
    }

    pub fn load(&self) -> anyhow::Result<PolygonalMesh> {
        Ok(match &self.mesh {
            Some(path) => PolygonalMesh::read_json(path)?,
            None => generate(&self.spec())?,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Problem::Sinsin)]
    pub problem: Problem,
    #[arg(long, value_enum, default_value_t = NuPolicy::Unit)]
    pub nu: NuPolicy,
    /// Relative CG tolerance
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Fan quadrature order (2 or 4)
    #[arg(long, default_value_t = 4, value_parser = parse_quad_order)]
    pub quad_order: usize,
}

impl SolveArgs {
    pub fn options(&self) -> SolveOptions {
        SolveOptions {
            stabilization: self.nu.into(),
            tol: self.tol,
            quad_order: self.quad_order,
            max_iter: None,
        }
    }
}

fn parse_quad_order(s: &str) -> Result<usize, String> {
    match s {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err(format!("quadrature order must be 2 or 4, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Family {
    Quad,
    PerturbedQuad,
    Triangle,
    Hexagon,
    HangingNode,
}

impl From<Family> for MeshFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Quad => MeshFamily::Quad,
            Family::PerturbedQuad => MeshFamily::PerturbedQuad,
            Family::Triangle => MeshFamily::Triangle,
            Family::Hexagon => MeshFamily::Hexagon,
            Family::HangingNode => MeshFamily::HangingNode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Patch,
    Sinsin,
    Quadratic,
}

impl Problem {
    pub fn build(self) -> ManufacturedProblem {
        match self {
            Problem::Patch => ManufacturedProblem::patch(),
            Problem::Sinsin => ManufacturedProblem::sin_sin(),
            Problem::Quadratic => ManufacturedProblem::quadratic(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NuPolicy {
    Unit,
    Trace,
}

impl From<NuPolicy> for StabilizationPolicy {
    fn from(p: NuPolicy) -> Self {
        match p {
            NuPolicy::Unit => StabilizationPolicy::Unit,
            NuPolicy::Trace => StabilizationPolicy::Trace,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Parses `argv` (program name first) and executes it. Returns the exit
/// status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&config) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn execute(config: &RunConfig) -> anyhow::Result<()> {
    match &config.command {
        Command::Mesh { mesh, out } => {
            let m = mesh.load()?;
            emit(out, &m.to_json())
        }
        Command::Run {
            mesh,
            solve,
            format,
            out,
            timing,
        } => {
            let m = mesh.load()?;
            let problem = solve.problem.build();
            let options = solve.options();
            let sol = driver::solve(&m, &problem, &options)?;
            let report = driver::error_norms(&sol, &problem, options.quad_order)?;
            let table = ConvergenceTable::from_reports(mesh.family.into_name(), &problem.name, vec![(mesh.resolution, report)]);
            emit(out, &format_table(&table, *format, *timing)?)
        }
        Command::Study {
            mesh,
            solve,
            levels,
            format,
            out,
            timing,
        } => {
            if mesh.mesh.is_some() {
                anyhow::bail!("study generates its own meshes; --mesh is not supported");
            }
            let problem = solve.problem.build();
            let table = driver::convergence_study(&mesh.spec(), *levels as usize, &problem, &solve.options())?;
            emit(out, &format_table(&table, *format, *timing)?)
        }
        Command::Stability {
            mesh,
            nu,
            oracle_levels,
            format,
            out,
        } => {
            let m = mesh.load()?;
            let rows = oracle::stability_table(&m, (*nu).into(), *oracle_levels as usize)?;
            let text = match format {
                Format::Csv => oracle::stability_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(out, &text)
        }
        Command::Plot { mesh, problem, nu, out } => {
            let m = mesh.load()?;
            let report = m.validate();
            if !report.is_valid() {
                anyhow::bail!("invalid mesh:\n{report}");
            }
            let svg = match problem {
                Some(p) => {
                    let options = SolveOptions {
                        stabilization: (*nu).into(),
                        ..SolveOptions::default()
                    };
                    let sol = driver::solve(&m, &p.build(), &options)?;
                    let values: Vec<f64> = (0..m.n_cells()).map(|c| sol.centroid_value(c)).collect();
                    SvgScene::from_mesh(&m, Some(&values)).render()
                }
                None => SvgScene::from_mesh(&m, None).render(),
            };
            emit(out, &svg)
        }
        Command::DumpElement { mesh, cell, nu, out } => {
            let m = mesh.load()?;
            if *cell >= m.n_cells() {
                anyhow::bail!("cell index {cell} out of range (mesh has {} cells)", m.n_cells());
            }
            let poly = m.cell_polygon(*cell)?;
            let el = LocalElementMatrices::new(&poly, (*nu).into())?;
            emit(out, &dump_element(*cell, &el))
        }
    }
}

impl Family {
    fn into_name(self) -> &'static str {
        MeshFamily::from(self).name()
    }
}

fn format_table(table: &ConvergenceTable, format: Format, timing: bool) -> anyhow::Result<String> {
    Ok(match format {
        Format::Csv => table.to_csv(timing),
        Format::Json => {
            let mut v = serde_json::to_value(table)?;
            if let Some(rows) = v.get_mut("rows").and_then(|r| r.as_array_mut()) {
                for (row, r) in rows.iter_mut().zip(&table.rows) {
                    let ms = if timing { r.report.wall_time.as_millis() } else { 0 };
                    row["wall_ms"] = serde_json::json!(ms);
                }
            }
            serde_json::to_string_pretty(&v)? + "\n"
        }
    })
}

/// Six significant digits, trailing zeros trimmed.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..6).contains(&exp) {
        trim(format!("{:.*}", (5 - exp).max(0) as usize, v))
    } else {
        let s = format!("{v:.5e}");
        match s.split_once('e') {
            Some((m, e)) => format!("{}e{e}", trim(m.to_string())),
            None => s,
        }
    }
}

fn write_matrix(s: &mut String, label: &str, m: &DenseMatrix) {
    let _ = writeln!(s, "{label} ({}x{})", m.rows(), m.cols());
    let chop = 1e-12 * m.max_abs();
    for i in 0..m.rows() {
        for &v in m.row(i) {
            let v = if v.abs() < chop { 0.0 } else { v };
            let _ = write!(s, "{:>14}", format_sig6(v));
        }
        s.push('\n');
    }
    s.push('\n');
}

/// Labelled text dump of one cell's local matrices.
pub fn dump_element(cell: usize, el: &LocalElementMatrices) -> String {
    let mut s = String::new();
    let g = &el.geometry;
    let _ = writeln!(s, "cell {cell}: N = {}", el.n_vertices());
    let _ = writeln!(
        s,
        "area = {}  diameter = {}  centroid = ({}, {})  nu = {}\n",
        format_sig6(g.area),
        format_sig6(g.diameter),
        format_sig6(g.centroid.x),
        format_sig6(g.centroid.y),
        format_sig6(el.nu)
    );
    write_matrix(&mut s, "D", &el.d);
    write_matrix(&mut s, "B", &el.b);
    write_matrix(&mut s, "G", &el.g);
    write_matrix(&mut s, "G_tilde", &el.g_tilde);
    write_matrix(&mut s, "Pi_star", &el.pi_star);
    write_matrix(&mut s, "Pi", &el.pi);
    write_matrix(&mut s, "K", &el.k);
    s
}
