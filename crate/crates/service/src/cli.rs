//! Command-line entry points. Exit status: 0 success, 2 validation failure, 1 I/O failure.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use typespace_core::analytics::{analyze, simulate_cohort, simulate_control_trace, task_id, user_id};
use typespace_core::catalog::{audit_guidelines, demo_flow, AuditReport};
use typespace_core::demo::demo_space;
use typespace_core::render::{glyph_svg, overlay_grid_svg, specimen_sheet, text_svg, OverlayGrid, OverlayPalette, TextLayout};
use typespace_core::store::{Durability, SessionStore};
use typespace_core::{Coords, Space};

use crate::api::{router, AppState};
use crate::API_VERSION;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

fn store_err(e: typespace_core::store::StoreError) -> CliError {
    use typespace_core::store::StoreError;
    match e {
        StoreError::Io(_) => CliError::Io(e.to_string()),
        other => invalid(other),
    }
}

#[derive(Debug, Parser)]
#[command(name = "typespace", version, about = "Parametric typeface selection catalog")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render an instance glyph, a text setting or a specimen sheet as SVG.
    Render(RenderArgs),
    /// Analyze every session in a data directory.
    Analyze(AnalyzeArgs),
    /// Check a scripted navigation flow against the catalog guidelines.
    Audit(AuditArgs),
    /// Write a synthetic cohort of sessions into a data directory.
    Simulate(SimulateArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SpaceArg {
    /// Space document to load instead of the built-in demo space.
    #[arg(long, env = "TYPESPACE_SPACE")]
    pub space: Option<PathBuf>,
}

impl SpaceArg {
    pub fn load(&self) -> Result<Space, CliError> {
        match &self.space {
            None => Ok(demo_space()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| io_err(p, e))?;
                Space::load(&text).map_err(|e| invalid(format!("{}: {e}", p.display())))
            }
        }
    }
}

fn parse_coords(s: &str) -> Result<Coords, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 3] = parts
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 3 comma-separated values, got {}", v.len()))?;
    if arr.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err("coordinates must lie in [0, 1]".into());
    }
    Coords::new(arr).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    /// Instance coordinates as x,y,z.
    #[arg(long, value_parser = parse_coords, default_value = "0.5,0.5,0.5")]
    pub coords: Coords,
    /// Render one glyph.
    #[arg(long, conflicts_with_all = ["text", "specimen"])]
    pub glyph: Option<String>,
    /// Render a text setting.
    #[arg(long, conflicts_with = "specimen")]
    pub text: Option<String>,
    /// Render a specimen sheet with this lattice step (1, 0.5 or 0.25).
    #[arg(long)]
    pub specimen: Option<f64>,
    /// Glyphs for the specimen sheet; defaults to every glyph.
    #[arg(long, value_delimiter = ',')]
    pub glyphs: Vec<String>,
    #[arg(long, default_value_t = 200.0)]
    pub size: f64,
    #[arg(long, default_value_t = 0.0)]
    pub letter_spacing: f64,
    #[arg(long)]
    pub line_spacing: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, env = "TYPESPACE_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long)]
    pub user: Option<String>,
    /// Report JSON output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overlay grid SVG output.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0)]
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Flow {
    /// Select a category, zoom three times on the center, click and fine-tune.
    Demo,
    /// The demo flow with a preselected opening option.
    Preselected,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    #[arg(long, value_enum, default_value = "demo")]
    pub flow: Flow,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 21)]
    pub users: usize,
    #[arg(long, default_value_t = 6)]
    pub tasks: usize,
    /// Also write one slider-only session per user, for the first task.
    #[arg(long)]
    pub control: bool,
    #[arg(long, env = "TYPESPACE_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub space: SpaceArg,
    #[arg(long, env = "TYPESPACE_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, env = "TYPESPACE_HOST", default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, env = "TYPESPACE_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,
    /// Directory of static UI assets served under `/`.
    #[arg(long, env = "TYPESPACE_UI_DIR")]
    pub ui_dir: Option<PathBuf>,
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Render(a) => render(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Audit(a) => audit(a),
        Command::Simulate(a) => simulate(a),
        Command::Serve(a) => serve(a),
    }
}

fn render(a: RenderArgs) -> Result<(), CliError> {
    let space = a.space.load()?;
    if !(a.size > 0.0 && a.size.is_finite()) {
        return Err(invalid("--size must be positive"));
    }
    let svg = if let Some(step) = a.specimen {
        let names: Vec<String> = if a.glyphs.is_empty() {
            space.glyph_names().map(String::from).collect()
        } else {
            a.glyphs.clone()
        };
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        specimen_sheet(&space, &refs, step).map_err(invalid)?
    } else if let Some(text) = &a.text {
        let layout = TextLayout {
            size_px: a.size,
            letter_spacing: a.letter_spacing,
            line_spacing: a.line_spacing.unwrap_or(a.size * 1.25),
        };
        let r = text_svg(&space, &a.coords, text, layout);
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
        r.svg
    } else {
        let glyph = a.glyph.as_deref().unwrap_or("o");
        let outline = space.interpolate_glyph(glyph, &a.coords).map_err(invalid)?;
        glyph_svg(&outline, a.size).map_err(invalid)?
    };
    write_out(a.out.as_deref(), &svg)
}

fn open_store(dir: &Path, durability: Durability) -> Result<SessionStore, CliError> {
    SessionStore::open_with(dir, durability).map_err(|e| io_err(dir, e))
}

fn analyze_cmd(a: AnalyzeArgs) -> Result<(), CliError> {
    if !a.data_dir.is_dir() {
        return Err(io_err(&a.data_dir, "no such directory"));
    }
    let store = open_store(&a.data_dir, Durability::Flush)?;
    let traces: Vec<_> = store
        .load_all()
        .map_err(store_err)?
        .into_iter()
        .filter(|t| a.task.as_ref().is_none_or(|x| &t.header.task_id == x))
        .filter(|t| a.user.as_ref().is_none_or(|x| &t.header.user_id == x))
        .collect();
    let report = analyze(&traces);
    write_out(a.out.as_deref(), &to_json(&report))?;
    if let Some(p) = &a.overlay {
        let grid = OverlayGrid::from_report(&report, a.radius);
        let svg = overlay_grid_svg(&grid, a.radius, &OverlayPalette::default());
        fs::write(p, svg).map_err(|e| io_err(p, e))?;
    }
    let failed = report.per_trace.iter().filter(|t| t.error.is_some()).count();
    eprintln!(
        "analyzed {} sessions ({} users, {} tasks, {failed} unclassifiable)",
        report.per_trace.len(),
        report.per_user.len(),
        report.per_task.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct AuditOutput<'a> {
    v: u32,
    flow: &'a str,
    passed: bool,
    report: &'a AuditReport,
}

fn audit(a: AuditArgs) -> Result<(), CliError> {
    let space = a.space.load()?;
    let (mut opening, states) = demo_flow(&space);
    let flow = match a.flow {
        Flow::Demo => "demo",
        Flow::Preselected => {
            opening.selected_index = Some(0);
            "preselected"
        }
    };
    let report = audit_guidelines(&opening, &states);
    let passed = report.all_passed();
    write_out(
        a.out.as_deref(),
        &to_json(&AuditOutput {
            v: API_VERSION,
            flow,
            passed,
            report: &report,
        }),
    )?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{:?}", c.rule_id))
            .collect();
        Err(invalid(format!("guideline checks failed: {}", failed.join(", "))))
    }
}

fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let space = a.space.load()?;
    fs::create_dir_all(&a.data_dir).map_err(|e| io_err(&a.data_dir, e))?;
    let store = open_store(&a.data_dir, Durability::Flush)?;
    let mut traces = simulate_cohort(&space, a.users, a.tasks, a.seed);
    if a.control {
        let task = task_id(0);
        for u in 0..a.users {
            let seed = a.seed.wrapping_mul(31).wrapping_add(u as u64);
            traces.push(simulate_control_trace(&space, &task, &user_id(u), seed, u % 3 == 0));
        }
    }
    for t in &traces {
        store.import(t).map_err(store_err)?;
        store.close(&t.header.session_id).map_err(store_err)?;
    }
    eprintln!("wrote {} sessions to {}", traces.len(), a.data_dir.display());
    Ok(())
}

fn serve(a: ServeArgs) -> Result<(), CliError> {
    let space = a.space.load()?;
    fs::create_dir_all(&a.data_dir).map_err(|e| io_err(&a.data_dir, e))?;
    let store = open_store(&a.data_dir, Durability::Sync)?;
    let app = router(AppState::new(space, store), a.ui_dir.clone());
    let addr = SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::Io(format!("bind {addr}: {e}")))?;
        tracing::info!(%addr, data_dir = %a.data_dir.display(), "listening");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| CliError::Io(e.to_string()))
    })
}
