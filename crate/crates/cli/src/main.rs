//! `pvg`: render, zoom, validate and compare Poisson vector graphics documents.

use clap::{Args, Parser, Subcommand};
use pvg_core::document::{parse_document, validate, PvgDocument};
use pvg_core::oracle::{error_map, fd_render, relative_mean_error, OracleError, ERROR_MAP_GAIN};
use pvg_core::render::{solve_scene, write_png, BitDepth, RasterImage, RenderError, RenderOptions, Timings, Viewport, ZoomRequest};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const EXIT_INVALID: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "pvg", version, about = "Poisson vector graphics renderer", disable_help_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a document to PNG; with --viewport, render that window of the
    /// canvas-resolution solution
    Render(RenderArgs),
    /// Render a viewport of the canvas-resolution solution (requires --viewport)
    Zoom(RenderArgs),
    /// Print diagnostics; exits 1 if any is an error
    Validate(InputArgs),
    /// Per-channel relative mean error against the finite-difference reference
    Compare(CompareArgs),
    /// Write |engine − reference| × 50 as a PNG
    Errmap(ErrmapArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Worker threads
    #[arg(long, env = "PVG_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Print T_d, T_s, T; repeat for debug logs
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
    #[arg(long, action = clap::ArgAction::Help)]
    help: Option<bool>,
}

#[derive(Args, Debug)]
struct InputArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Size {
    /// Output width in pixels (default: canvas width)
    #[arg(short, long, value_parser = clap::value_parser!(u32).range(1..))]
    width: Option<u32>,
    /// Output height in pixels (default: canvas height)
    #[arg(short = 'h', long, value_parser = clap::value_parser!(u32).range(1..))]
    height: Option<u32>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    size: Size,
    /// Document-space window `x,y,w,h`
    #[arg(long, value_parser = parse_viewport)]
    viewport: Option<Viewport>,
    /// Samples per pixel side away from curves
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=16))]
    supersample: u32,
    /// Write 16 bits per channel
    #[arg(long = "16bit")]
    sixteen: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct CompareArgs {
    input: PathBuf,
    #[command(flatten)]
    size: Size,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ErrmapArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    size: Size,
    #[command(flatten)]
    common: Common,
}

fn parse_viewport(s: &str) -> Result<Viewport, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, y, width, height] if v.iter().all(|c| c.is_finite()) && width > 0.0 && height > 0.0 => {
            Ok(Viewport { x, y, width, height })
        }
        _ => Err("expected x,y,w,h with positive w and h".into()),
    }
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Invalid(ref diags) => {
                let mut msg = e.to_string();
                for d in diags {
                    msg.push_str(&format!("\n  {d}"));
                }
                Failure::new(EXIT_INVALID, msg)
            }
            RenderError::Viewport(_) | RenderError::EmptyImage => Failure::new(EXIT_USAGE, e.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::TooLarge { .. } | OracleError::DimensionMismatch(..) => EXIT_USAGE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<PvgDocument, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    parse_document(&bytes).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn save(img: &RasterImage, path: &Path, depth: BitDepth) -> Result<(), Failure> {
    write_png(img, path, depth).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn dims(size: &Size, doc: &PvgDocument) -> (usize, usize) {
    (
        size.width.unwrap_or(doc.canvas.width) as usize,
        size.height.unwrap_or(doc.canvas.height) as usize,
    )
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn cmd_render(args: &RenderArgs, zoom: bool) -> Result<(), Failure> {
    if zoom && args.viewport.is_none() {
        return Err(Failure::new(EXIT_USAGE, "zoom needs --viewport x,y,w,h"));
    }
    let doc = load(&args.input)?;
    let (w, h) = dims(&args.size, &doc);
    let start = Instant::now();
    let img = match args.viewport {
        None => {
            let scene = solve_scene(&doc, w, h)?;
            report_timings(&args.common, &scene.timings);
            let img = scene.render(RenderOptions { supersample: args.supersample });
            report_total(&args.common, start);
            img
        }
        Some(viewport) => {
            // solve once at canvas resolution, then sample the window
            let (cw, ch) = (doc.canvas.width as usize, doc.canvas.height as usize);
            let scene = solve_scene(&doc, cw, ch)?;
            report_timings(&args.common, &scene.timings);
            let img = scene.render_zoom(&ZoomRequest { viewport, width: w, height: h })?;
            report_total(&args.common, start);
            img
        }
    };
    let depth = if args.sixteen { BitDepth::Sixteen } else { BitDepth::Eight };
    save(&img, &args.output, depth)
}

fn report_timings(common: &Common, t: &Timings) {
    if common.verbose > 0 {
        eprintln!("T_d {:10.2} ms", ms(t.discretize));
        eprintln!("T_s {:10.2} ms", ms(t.solve));
    }
}

fn report_total(common: &Common, start: Instant) {
    if common.verbose > 0 {
        eprintln!("T   {:10.2} ms", ms(start.elapsed()));
    }
}

fn cmd_validate(args: &InputArgs) -> Result<(), Failure> {
    let doc = load(&args.input)?;
    let diags = validate(&doc);
    for d in &diags {
        println!("{d}");
    }
    let errors = diags.iter().filter(|d| d.is_error()).count();
    if errors > 0 {
        return Err(Failure::new(EXIT_INVALID, format!("{errors} error(s)")));
    }
    if diags.is_empty() {
        println!("ok");
    }
    Ok(())
}

fn engine_and_reference(input: &Path, size: &Size, common: &Common) -> Result<(RasterImage, RasterImage), Failure> {
    let doc = load(input)?;
    let (w, h) = dims(size, &doc);
    let start = Instant::now();
    let scene = solve_scene(&doc, w, h)?;
    report_timings(common, &scene.timings);
    let engine = scene.render(RenderOptions::default());
    report_total(common, start);
    let t0 = Instant::now();
    let reference = fd_render(&doc, w, h)?;
    if common.verbose > 0 {
        eprintln!("reference {:10.2} ms", ms(t0.elapsed()));
    }
    Ok((engine, reference))
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Failure> {
    let (engine, reference) = engine_and_reference(&args.input, &args.size, &args.common)?;
    let report = relative_mean_error(&engine, &reference)?;
    println!("channel  rme (%)");
    for (name, v) in ["R", "G", "B"].iter().zip(report.channels) {
        println!("{name:<7}  {v:.4}");
    }
    println!("max      {:.4}", report.max());
    println!("mean     {:.4}", report.mean());
    Ok(())
}

fn cmd_errmap(args: &ErrmapArgs) -> Result<(), Failure> {
    let (engine, reference) = engine_and_reference(&args.input, &args.size, &args.common)?;
    let map = error_map(&engine, &reference, ERROR_MAP_GAIN)?;
    save(&map, &args.output, BitDepth::Eight)
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Render(a) | Command::Zoom(a) => &a.common,
        Command::Validate(a) => &a.common,
        Command::Compare(a) => &a.common,
        Command::Errmap(a) => &a.common,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let c = common(&cli.command);
    let level = match c.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    if let Some(n) = c.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            log::warn!("thread pool: {e}");
        }
    }
    let result = match &cli.command {
        Command::Render(a) => cmd_render(a, false),
        Command::Zoom(a) => cmd_render(a, true),
        Command::Validate(a) => cmd_validate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Errmap(a) => cmd_errmap(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pvg: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
