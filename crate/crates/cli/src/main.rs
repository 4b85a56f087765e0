//! `sonowork`: batch sonification, event rendering, transforms and simulated
//! training sessions from the command line.
//!
//! Exit codes: 0 on success, 1 on input/validation failures, 2 on usage errors.

mod i18n;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sonowork_core::synth::{map_value_to_freq, sonify_events, write_wav, Mapping, SonifyConfig, Waveform};
use sonowork_core::training::{
    generate_block, score_session, synthetic_participant, SessionEvent, SessionOptions, SessionState,
};
use sonowork_core::workbench::{self, WorkbenchError};
use sonowork_core::{parse_events, parse_table, ParseOptions, Table, TransformSpec};

use i18n::{tr, Lang};

#[derive(Debug, Parser)]
#[command(name = "sonowork", version, about = "Render data as sound: sonification, event pings and training sessions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sonify one column of a table as a pitch-mapped note sequence.
    Sonify(SonifyArgs),
    /// Render a (time, weight) event file as pings on a timeline.
    Events(EventsArgs),
    /// Apply transform steps to a column and write the result as CSV.
    Transform(TransformArgs),
    /// Training sessions.
    #[command(subcommand)]
    Train(TrainCommand),
}

#[derive(Debug, Subcommand)]
enum TrainCommand {
    /// Run the machine listener over a generated block and print the report.
    Simulate(SimulateArgs),
}

fn parse_ops(text: &str) -> Result<TransformSpec, String> {
    TransformSpec::from_json(text).map_err(|e| format!("invalid transform JSON: {e}"))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WaveformArg {
    Sine,
    Square,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MappingArg {
    Linear,
    Log,
}

#[derive(Debug, Args)]
struct SoundArgs {
    #[arg(long, value_enum, default_value = "sine")]
    waveform: WaveformArg,
    #[arg(long, value_enum, default_value = "linear")]
    mapping: MappingArg,
    /// Lowest pitch in Hz.
    #[arg(long)]
    fmin: Option<f64>,
    /// Highest pitch in Hz.
    #[arg(long)]
    fmax: Option<f64>,
    /// Seconds per data point.
    #[arg(long = "note-dur")]
    note_dur: Option<f64>,
    #[arg(long = "sample-rate")]
    sample_rate: Option<u32>,
    #[arg(long)]
    amplitude: Option<f64>,
}

impl SoundArgs {
    fn config(&self) -> SonifyConfig {
        let d = SonifyConfig::default();
        SonifyConfig {
            waveform: match self.waveform {
                WaveformArg::Sine => Waveform::Sine,
                WaveformArg::Square => Waveform::Square,
            },
            mapping: match self.mapping {
                MappingArg::Linear => Mapping::Linear,
                MappingArg::Log => Mapping::Logarithmic,
            },
            f_min: self.fmin.unwrap_or(d.f_min),
            f_max: self.fmax.unwrap_or(d.f_max),
            note_duration: self.note_dur.unwrap_or(d.note_duration),
            sample_rate: self.sample_rate.unwrap_or(d.sample_rate),
            amplitude: self.amplitude.unwrap_or(d.amplitude),
            envelope_ramp: d.envelope_ramp,
        }
    }
}

#[derive(Debug, Args)]
struct SonifyArgs {
    file: PathBuf,
    /// Abscissa column (row index when omitted).
    #[arg(long)]
    x: Option<String>,
    /// Column to sonify.
    #[arg(long)]
    y: String,
    /// Transform steps as JSON, e.g. '[{"op":"smooth","window":5}]'.
    #[arg(long, value_parser = parse_ops, default_value = "[]")]
    ops: TransformSpec,
    #[command(flatten)]
    sound: SoundArgs,
    #[arg(long)]
    decimal_comma: bool,
    #[arg(long)]
    out: PathBuf,
    /// Also write an SVG plot of the transformed series.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EventsArgs {
    file: PathBuf,
    /// Timeline length in seconds.
    #[arg(long)]
    timeline: f64,
    #[command(flatten)]
    sound: SoundArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TransformArgs {
    file: PathBuf,
    #[arg(long, value_parser = parse_ops)]
    ops: TransformSpec,
    /// Abscissa column; defaults to the first column of a multi-column table.
    #[arg(long)]
    x: Option<String>,
    /// Column to transform; defaults to the last column.
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    decimal_comma: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    block: u32,
    /// Stimuli per class.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report JSON to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

/// A failure reported on standard error with exit code 1.
struct Failure(String);

type Outcome = Result<(), Failure>;

struct Ctx {
    lang: Lang,
}

impl Ctx {
    fn fail(&self, key: &str, args: &[(&str, &dyn std::fmt::Display)]) -> Failure {
        Failure(tr(self.lang, key, args))
    }

    fn read(&self, path: &Path) -> Result<Vec<u8>, Failure> {
        fs::read(path).map_err(|e| self.fail("read_failed", &[("path", &path.display()), ("reason", &e)]))
    }

    fn write(&self, path: &Path, bytes: &[u8]) -> Outcome {
        fs::write(path, bytes).map_err(|e| self.fail("write_failed", &[("path", &path.display()), ("reason", &e)]))
    }

    fn table(&self, path: &Path, decimal_comma: bool) -> Result<Table, Failure> {
        let options = ParseOptions {
            decimal_comma,
            ..ParseOptions::default()
        };
        parse_table(&self.read(path)?, &options)
            .map_err(|e| self.fail("parse_failed", &[("path", &path.display()), ("reason", &e)]))
    }

    fn workbench(&self, err: WorkbenchError) -> Failure {
        match err {
            WorkbenchError::Transform(e) => self.fail("step_failed", &[("step", &e.step), ("reason", &e.source)]),
            WorkbenchError::Config(e) => self.fail("invalid_config", &[("reason", &e)]),
            other => self.fail("render_failed", &[("reason", &other)]),
        }
    }
}

fn sonify(ctx: &Ctx, args: &SonifyArgs) -> Outcome {
    let config = args.sound.config();
    config
        .validate()
        .map_err(|e| ctx.fail("invalid_config", &[("reason", &e)]))?;
    let table = ctx.table(&args.file, args.decimal_comma)?;
    let (series, wav) = workbench::sonify_table(&table, args.x.as_deref(), &args.y, &args.ops, &config)
        .map_err(|e| ctx.workbench(e))?;
    ctx.write(&args.out, &wav)?;
    if let Some(plot) = &args.plot {
        let svg = workbench::render_svg(&table, args.x.as_deref(), &args.y, &args.ops).map_err(|e| ctx.workbench(e))?;
        ctx.write(plot, &svg)?;
        eprintln!("{}", tr(ctx.lang, "plot_written", &[("path", &plot.display())]));
    }

    let points = series.len();
    let duration = format!("{:.3}", points as f64 * config.note_duration);
    let finite = series.y().iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    let summary = if lo.is_finite() {
        let fmin = format!("{:.1}", map_value_to_freq(lo, &config).unwrap_or(config.f_min));
        let fmax = format!("{:.1}", map_value_to_freq(hi, &config).unwrap_or(config.f_max));
        tr(
            ctx.lang,
            "sonify_summary",
            &[("points", &points), ("duration", &duration), ("fmin", &fmin), ("fmax", &fmax)],
        )
    } else {
        tr(ctx.lang, "sonify_silent", &[("points", &points), ("duration", &duration)])
    };
    println!("{summary}");
    Ok(())
}

fn events(ctx: &Ctx, args: &EventsArgs) -> Outcome {
    let config = args.sound.config();
    config
        .validate()
        .map_err(|e| ctx.fail("invalid_config", &[("reason", &e)]))?;
    let list = parse_events(&ctx.read(&args.file)?)
        .map_err(|e| ctx.fail("parse_failed", &[("path", &args.file.display()), ("reason", &e)]))?;
    let buffer = sonify_events(&list, args.timeline, &config).map_err(|e| ctx.fail("render_failed", &[("reason", &e)]))?;
    ctx.write(&args.out, &write_wav(&buffer))?;
    let duration = format!("{:.3}", buffer.duration());
    println!("{}", tr(ctx.lang, "events_summary", &[("events", &list.len()), ("duration", &duration)]));
    Ok(())
}

fn transform(ctx: &Ctx, args: &TransformArgs) -> Outcome {
    let table = ctx.table(&args.file, args.decimal_comma)?;
    let names = table.column_names();
    let y = args.y.clone().unwrap_or_else(|| names[names.len() - 1].to_string());
    let x = args
        .x
        .clone()
        .or_else(|| (names.len() > 1 && names[0] != y).then(|| names[0].to_string()));
    let series = workbench::transformed_series(&table, x.as_deref(), &y, &args.ops).map_err(|e| ctx.workbench(e))?;

    let mut csv = format!("{},{}\n", x.as_deref().unwrap_or("index"), series.label());
    for (xv, yv) in series.x().iter().zip(series.y()) {
        let _ = write!(csv, "{xv},");
        if !yv.is_nan() {
            let _ = write!(csv, "{yv}");
        }
        csv.push('\n');
    }
    ctx.write(&args.out, csv.as_bytes())?;
    eprintln!(
        "{}",
        tr(ctx.lang, "transform_summary", &[("rows", &series.len()), ("path", &args.out.display())])
    );
    Ok(())
}

fn simulate(ctx: &Ctx, args: &SimulateArgs) -> Outcome {
    let session_err = |e: &dyn std::fmt::Display| ctx.fail("session_failed", &[("reason", e)]);
    let stimuli = generate_block(args.block, args.count as usize, args.seed, &SonifyConfig::default())
        .map_err(|e| session_err(&e))?;
    let mut state = SessionState::new(stimuli, SessionOptions::default()).map_err(|e| session_err(&e))?;
    state = state.advance(SessionEvent::Begin).map_err(|e| session_err(&e))?;
    for _ in 0..state.stimuli.len() {
        state = state.advance(SessionEvent::PresentationDone).map_err(|e| session_err(&e))?;
        let key = synthetic_participant(state.current().expect("presenting a stimulus"));
        state = state
            .advance(SessionEvent::KeyPress { key, latency: 0 })
            .map_err(|e| session_err(&e))?;
        state = state.advance(SessionEvent::FeedbackDone).map_err(|e| session_err(&e))?;
    }
    let report = score_session(&state).map_err(|e| session_err(&e))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = &args.report {
        ctx.write(path, json.as_bytes())?;
    }
    println!("{json}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { lang: Lang::from_env() };
    let outcome = match &cli.command {
        Command::Sonify(args) => sonify(&ctx, args),
        Command::Events(args) => events(&ctx, args),
        Command::Transform(args) => transform(&ctx, args),
        Command::Train(TrainCommand::Simulate(args)) => simulate(&ctx, args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(message)) => {
            eprintln!("{}: {message}", tr(ctx.lang, "error", &[]));
            ExitCode::from(1)
        }
    }
}
