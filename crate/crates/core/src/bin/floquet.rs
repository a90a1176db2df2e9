use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use floquet::analysis::fit::{teraquop_footprint, threshold_estimate_with, FitResult};
use floquet::analysis::io::{
    fit_from_json, fit_to_json, read_rate_points, write_plot_data, write_rate_points,
};
use floquet::analysis::rates::logical_error_rate_with;
use floquet::analysis::{
    circuit_distance, timelike_distance, RateObservable, RateOptions, RatePoint,
};
use floquet::builder::Family;
use floquet::circuit::Circuit;
use floquet::decoder::MatchingDecoder;
use floquet::dem::{extract_dem, DetectorErrorModel};
use floquet::error::{Error, Result};
use floquet::lattice::build_lattice;
use floquet::logical::{logical_schedule, Observable};
use floquet::noise::{apply_noise, NoiseModel};
use floquet::sim::{reference_simulate, sample_shots_with, ShotBlock};

#[derive(Parser)]
#[command(
    name = "floquet",
    version,
    about = "Honeycomb Floquet code memory experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a memory-experiment circuit.
    Gen(GenArgs),
    /// Sample detection events and observable flips.
    Sample(SampleArgs),
    /// Emit the detector error model of a noisy circuit.
    Dem(DemArgs),
    /// Decode sampled shots into observable predictions.
    Decode(DecodeArgs),
    /// Logical error rates, threshold and footprint fits.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Print spatial and timelike distances.
    Distance(DistanceArgs),
}

#[derive(Args, Clone)]
struct CodeArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Code distance; picks the family's lattice.
    #[arg(long, conflicts_with = "dims")]
    d: Option<usize>,
    /// Explicit lattice dimensions `L1,L2`.
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize)>,
    /// Gauge cycles (default: the family's memory length for `d`).
    #[arg(long)]
    cycles: Option<usize>,
}

impl CodeArgs {
    fn dims(&self) -> Result<(usize, usize)> {
        match (self.d, self.dims) {
            (_, Some(dims)) => Ok(dims),
            (Some(d), None) => Ok(self.family.dims(d)),
            (None, None) => Err(Error::InvalidArgument(
                "one of --d or --dims is required".into(),
            )),
        }
    }

    fn cycles(&self) -> Result<usize> {
        match (self.cycles, self.d) {
            (Some(c), _) => Ok(c),
            (None, Some(d)) => Ok(self.family.memory_cycles(d)),
            (None, None) => Err(Error::InvalidArgument(
                "--cycles is required with --dims".into(),
            )),
        }
    }

    fn circuit(&self, obs: Observable) -> Result<Circuit> {
        let (l1, l2) = self.dims()?;
        let lat = build_lattice(l1, l2)?;
        let schedule = logical_schedule(&lat)?;
        self.family.build(&lat, self.cycles()?, obs, &schedule)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value_t = 0.0)]
    p: f64,
    #[arg(long, default_value = "H", value_parser = parse_observable)]
    observable: Observable,
    /// Depolarize qubits idling during measurement and reset layers.
    #[arg(long)]
    idle_during_meas: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Frame,
    Tableau,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShotFormat {
    Text,
    Binary,
}

#[derive(Args)]
struct SampleArgs {
    /// Circuit file (default: stdin).
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "frame")]
    engine: Engine,
    #[arg(long, value_enum, default_value = "text")]
    format: ShotFormat,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DemArgs {
    /// Circuit file (default: stdin).
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    dem: PathBuf,
    /// Shot file (default: stdin).
    #[arg(long)]
    shots: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: ShotFormat,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Sample and decode memory experiments; emits rate points as CSV.
    Rates(RatesArgs),
    /// Threshold from rate-curve crossings; emits JSON.
    Threshold(ThresholdArgs),
    /// Distance and footprint reaching a target rate; emits JSON.
    Teraquop(TeraquopArgs),
    /// Plot data (rates with standard errors, threshold lines) as CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, value_delimiter = ',', required = true)]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    p: Vec<f64>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only one observable (H, V or sum); all three by default.
    #[arg(long, value_parser = parse_rate_observable)]
    observable: Option<RateObservable>,
    #[arg(long)]
    idle_during_meas: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointFilter {
    /// Rate-point CSV (default: stdin).
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long, default_value = "sum", value_parser = parse_rate_observable)]
    observable: RateObservable,
}

impl PointFilter {
    fn load(&self) -> Result<Vec<RatePoint>> {
        let mut pts = read_rate_points(open_input(self.points.as_deref())?)?;
        pts.retain(|q| {
            q.observable == self.observable && self.family.map_or(true, |f| q.family == f)
        });
        Ok(pts)
    }
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    filter: PointFilter,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TeraquopArgs {
    #[command(flatten)]
    filter: PointFilter,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = floquet::analysis::TERAQUOP_TARGET)]
    target: f64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Rate-point CSV files.
    #[arg(long, value_delimiter = ',')]
    points: Vec<PathBuf>,
    /// Fit JSON files.
    #[arg(long, value_delimiter = ',')]
    fits: Vec<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Largest weight searched exhaustively.
    #[arg(long, default_value_t = 4)]
    w_max: usize,
    /// Skip the timelike search.
    #[arg(long)]
    spatial_only: bool,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse()
}

fn parse_observable(s: &str) -> std::result::Result<Observable, String> {
    s.parse()
}

fn parse_rate_observable(s: &str) -> std::result::Result<RateObservable, String> {
    s.parse()
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected L1,L2")?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((n(a)?, n(b)?))
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn Read>> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(File::open(p)?)),
        None => Box::new(io::stdin().lock()),
    })
}

fn read_input(path: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    open_input(path)?.read_to_string(&mut s)?;
    Ok(s)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_shots(block: &ShotBlock, format: ShotFormat, w: impl Write) -> Result<()> {
    match format {
        ShotFormat::Text => block.write_text(w),
        ShotFormat::Binary => block.write_binary(w),
    }
}

fn read_shots(path: Option<&Path>, format: ShotFormat) -> Result<ShotBlock> {
    let r = open_input(path)?;
    match format {
        ShotFormat::Text => ShotBlock::read_text(BufReader::new(r)),
        ShotFormat::Binary => ShotBlock::read_binary(r),
    }
}

fn gen(a: &GenArgs) -> Result<()> {
    let mut c = a.code.circuit(a.observable)?;
    if a.p > 0.0 || a.idle_during_meas {
        c = apply_noise(
            &c,
            &NoiseModel::new(a.p)?.with_idle_during_meas(a.idle_during_meas),
        )?;
    }
    let mut w = output(a.out.as_deref())?;
    w.write_all(c.to_text().as_bytes())?;
    w.flush()?;
    Ok(())
}

fn sample(a: &SampleArgs) -> Result<()> {
    let c = Circuit::parse(&read_input(a.circuit.as_deref())?)?;
    let block = match a.engine {
        Engine::Frame => sample_shots_with(&c, a.shots, a.seed, a.workers)?,
        Engine::Tableau => reference_simulate(&c, a.shots, a.seed)?,
    };
    let mut w = output(a.out.as_deref())?;
    write_shots(&block, a.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn dem(a: &DemArgs) -> Result<()> {
    let c = Circuit::parse(&read_input(a.circuit.as_deref())?)?;
    let mut w = output(a.out.as_deref())?;
    w.write_all(extract_dem(&c).to_text().as_bytes())?;
    w.flush()?;
    Ok(())
}

fn decode(a: &DecodeArgs) -> Result<()> {
    let dem = DetectorErrorModel::parse(&read_input(Some(&a.dem))?)?;
    let dec = MatchingDecoder::from_dem(&dem)?;
    let shots = read_shots(a.shots.as_deref(), a.format)?;
    if shots.num_detectors() != dec.num_detectors() {
        return Err(Error::InvalidArgument(format!(
            "shots have {} detectors, model has {}",
            shots.num_detectors(),
            dec.num_detectors()
        )));
    }
    let pred = dec.decode_batch(&shots, a.workers)?;
    let mut w = output(a.out.as_deref())?;
    let mut failures = 0usize;
    for s in 0..pred.shots() {
        let bits: String = (0..pred.num_observables())
            .map(|k| if pred.observable(s, k) { '1' } else { '0' })
            .collect();
        writeln!(w, "{bits}")?;
        if shots.num_observables() == pred.num_observables() {
            failures += (pred.observable_mask(s) != shots.observable_mask(s)) as usize;
        }
    }
    w.flush()?;
    eprintln!("shots={} failures={failures}", pred.shots());
    Ok(())
}

fn rates(a: &RatesArgs) -> Result<()> {
    let opts = RateOptions {
        cycles: a.cycles,
        workers: a.workers,
        idle_during_meas: a.idle_during_meas,
        ..RateOptions::default()
    };
    let mut pts = Vec::new();
    for &d in &a.d {
        for &p in &a.p {
            let set = logical_error_rate_with(a.family, d, p, a.shots, a.seed, &opts)?;
            pts.extend(
                set.into_iter()
                    .filter(|q| a.observable.map_or(true, |o| q.observable == o)),
            );
        }
    }
    let mut w = output(a.out.as_deref())?;
    write_rate_points(&pts, &mut w)?;
    w.flush()?;
    Ok(())
}

fn emit_fit(fit: &FitResult, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    writeln!(w, "{}", fit_to_json(fit))?;
    w.flush()?;
    Ok(())
}

fn threshold(a: &ThresholdArgs) -> Result<()> {
    let pts = a.filter.load()?;
    emit_fit(
        &threshold_estimate_with(&pts, a.resamples, a.seed)?,
        a.out.as_deref(),
    )
}

fn teraquop(a: &TeraquopArgs) -> Result<()> {
    let family = a
        .filter
        .family
        .ok_or_else(|| Error::InvalidArgument("--family is required".into()))?;
    let mut pts = a.filter.load()?;
    pts.retain(|q| (q.p - a.p).abs() <= 1e-12 * a.p.abs().max(1.0));
    emit_fit(
        &teraquop_footprint(&pts, family, a.target)?,
        a.out.as_deref(),
    )
}

fn plot(a: &PlotArgs) -> Result<()> {
    let mut pts = Vec::new();
    for p in &a.points {
        pts.extend(read_rate_points(open_input(Some(p))?)?);
    }
    let fits = a
        .fits
        .iter()
        .map(|f| fit_from_json(&read_input(Some(f))?))
        .collect::<Result<Vec<_>>>()?;
    let mut w = output(a.out.as_deref())?;
    write_plot_data(&pts, &fits, &mut w)?;
    w.flush()?;
    Ok(())
}

fn distance(a: &DistanceArgs) -> Result<()> {
    let mut spatial: Option<usize> = None;
    let mut bounded = true;
    for obs in [Observable::H, Observable::V] {
        let c = a.code.circuit(obs)?;
        let w = if a.w_max <= 4 { a.w_max } else { usize::MAX };
        match circuit_distance(&c, w)? {
            Some(d) => spatial = Some(spatial.map_or(d, |s| s.min(d))),
            None => bounded = false,
        }
    }
    match spatial {
        Some(d) => println!("spatial={d}"),
        None if !bounded => println!("spatial>{}", a.w_max),
        None => println!("spatial=none"),
    }
    if !a.spatial_only {
        let (l1, l2) = a.code.dims()?;
        let lat = build_lattice(l1, l2)?;
        println!(
            "timelike={}",
            timelike_distance(a.code.family, &lat, a.code.cycles()?)?
        );
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::InvalidDimensions { .. } => 2,
        Error::NoCrossing | Error::AboveThreshold => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Sample(a) => sample(a),
        Command::Dem(a) => dem(a),
        Command::Decode(a) => decode(a),
        Command::Analyze(AnalyzeCommand::Rates(a)) => rates(a),
        Command::Analyze(AnalyzeCommand::Threshold(a)) => threshold(a),
        Command::Analyze(AnalyzeCommand::Teraquop(a)) => teraquop(a),
        Command::Analyze(AnalyzeCommand::Plot(a)) => plot(a),
        Command::Distance(a) => distance(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
