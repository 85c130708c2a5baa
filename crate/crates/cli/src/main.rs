//! `contextuality` — geometry, degree, Rio Negro, game and report runs.
//!
//! Exit status: 0 on success, 1 for configuration errors, 2 when an internal
//! invariant breaks (for instance χ above `L` beyond its error bars).

mod selector;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::{json, Value};

use contextuality::degree::{
    compute_degree, incidence_rank, verify_hexagon_shape, Method, SolverConfig,
};
use contextuality::experiments::{
    contexts_csv, extract_subgeometry_chi, family_members, histogram_csv, histogram_svg,
    members_csv, rio_negro_run, DegreeSource, Family, InitialState, KnownDegree, RioNegroConfig,
    DEFAULT_BINS, DEFAULT_SHOTS,
};
use contextuality::games::{
    classical_from_assignment, optimal_classical, play_classical, play_quantum,
    random_strategy_search, reference_value, ClassicalSearch, GameKind, GameResult, PlayMode,
    TranscriptRow,
};
use contextuality::quantum::NoiseParams;
use contextuality::report::{self, Artifact, Provenance};
use contextuality::{Error, Result};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nbinary: ",
    env!("CARGO_PKG_NAME"),
    " ",
    env!("CARGO_PKG_VERSION"),
    "\nartifacts carry the tool version, seed, config hash and geometry hash"
);

#[derive(Parser, Debug)]
#[command(name = "contextuality", version, long_version = LONG_VERSION, about = "Contextuality workbench for N-qubit Pauli geometries")]
struct Cli {
    /// Directory for artifacts.
    #[arg(long, global = true, env = "CONTEXTUALITY_OUT", default_value = "contextuality-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a geometry, print its counts and write its dump.
    Geometry(GeometryArgs),
    /// Contextuality degree with a witness assignment.
    Degree(DegreeArgs),
    /// Estimate every context and evaluate χ against its bounds.
    RioNegro(RioNegroArgs),
    /// Play a pl, ll or llll game.
    Game(GameArgs),
    /// Merge earlier artifacts into one comparison table.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GeometryArgs {
    /// square | doily | w52 | w:N | elliptic:<center> | hyperbolic:<center> | dump path
    #[arg(long)]
    geometry: String,
    /// Also count embedded copies of these families.
    #[arg(long, value_delimiter = ',')]
    enumerate: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Exhaustive,
    RankReduced,
    Heuristic,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exhaustive => Method::Exhaustive,
            MethodArg::RankReduced => Method::RankReduced,
            MethodArg::Heuristic => Method::Heuristic,
        }
    }
}

#[derive(Args, Debug)]
struct DegreeArgs {
    #[arg(long)]
    geometry: String,
    #[arg(long, value_enum, default_value = "exhaustive")]
    method: MethodArg,
    /// Total single-bit flips for the heuristic.
    #[arg(long, default_value_t = SolverConfig::default().budget)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow exact enumerations above the default size cap.
    #[arg(long)]
    long_running: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Precision {
    F32,
    F64,
}

#[derive(Args, Debug)]
struct RioNegroArgs {
    #[arg(long)]
    geometry: String,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u64,
    /// `p_depolarize,p_readout`
    #[arg(long, default_value = "0,0")]
    noise: String,
    #[arg(long, default_value = "zeros")]
    state: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Subgeometry families to read out of the run: squares, doilies, elliptic, hyperbolic.
    #[arg(long, value_delimiter = ',')]
    extract: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Degree to use for the bound instead of computing or looking one up.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Quantum,
    ClassicalOptimal,
    ClassicalAssignment,
    ClassicalRandom,
}

#[derive(Args, Debug)]
struct GameArgs {
    #[arg(long)]
    geometry: String,
    #[arg(long)]
    kind: String,
    #[arg(long, value_enum, default_value = "quantum")]
    strategy: Strategy,
    #[arg(long, default_value_t = 10_000)]
    rounds: u64,
    /// `p_depolarize,p_readout`
    #[arg(long, default_value = "0,0")]
    noise: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Play every dealing once instead of sampling rounds.
    #[arg(long)]
    exhaustive: bool,
    /// Lift the size limit on the exact classical search.
    #[arg(long)]
    long_running: bool,
    /// Tables drawn by the classical-random strategy.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Artifact files, or directories whose .json files are read.
    paths: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Intractable {
                reference: Some(r), ..
            } = &e
            {
                eprintln!("reference value: {r}");
            }
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let out = Output::new(cli.out)?;
    match cli.command {
        Command::Geometry(a) => geometry(&out, a),
        Command::Degree(a) => degree(&out, a),
        Command::RioNegro(a) => rio_negro(&out, a),
        Command::Game(a) => game(&out, a),
        Command::Report(a) => report_cmd(&out, a),
    }
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        Ok(())
    }
}

/// File-name-safe form of a geometry name: `W(5,2)` → `W-5-2`.
fn slug(name: &str) -> String {
    let mut s = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            s.push(c);
        } else if !s.ends_with('-') {
            s.push('-');
        }
    }
    s.trim_matches('-').to_string()
}

fn parse_noise(s: &str) -> Result<NoiseParams> {
    let bad = || Error::Config(format!("--noise expects p_depolarize,p_readout, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    NoiseParams::new(p(a)?, p(b)?)
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn geometry(out: &Output, a: GeometryArgs) -> Result<()> {
    let geom = selector::resolve(&a.geometry)?;
    let families = a.enumerate.iter().map(|f| f.parse()).collect::<Result<Vec<Family>>>()?;
    let mut counts = serde_json::Map::new();
    for f in &families {
        counts.insert(f.to_string(), json!(family_members(&geom, *f)?.len()));
    }
    let config = json!({"command": "geometry", "geometry": a.geometry, "enumerate": a.enumerate});
    let summary = json!({
        "name": geom.name(),
        "n_qubits": geom.n_qubits(),
        "points": geom.num_points(),
        "lines": geom.num_lines(),
        "negative_lines": geom.negative_lines(),
        "subgeometries": counts,
    });
    let slug = slug(geom.name());
    out.write(&format!("geometry_{slug}.dump.json"), &(geom.to_json() + "\n"))?;
    let artifact = Artifact {
        provenance: Provenance::new("geometry", 0, config, &geom, None),
        result: summary,
    };
    out.write(&format!("geometry_{slug}.json"), &artifact.to_json())?;
    print_json(&artifact.result)
}

fn degree(out: &Output, a: DegreeArgs) -> Result<()> {
    let geom = selector::resolve(&a.geometry)?;
    let config = SolverConfig {
        method: a.method.into(),
        budget: a.budget,
        seed: a.seed,
        long_running: a.long_running,
        ..SolverConfig::default()
    };
    let result = compute_degree(&geom, &config)?;
    let mut value = serde_json::to_value(result.report(&geom))?;
    if geom.n_qubits() == 3 && geom.num_points() == 63 {
        let hex = verify_hexagon_shape(&geom, &result.unsatisfied);
        value["hexagon_check"] = json!({
            "line_count": hex.line_count,
            "count_ok": hex.count_ok,
            "covers_all_points": hex.covers_all_points,
            "three_regular": hex.three_regular,
            "passed": hex.passed(),
        });
    }
    let run_config = json!({
        "command": "degree", "geometry": a.geometry, "method": config.method,
        "budget": a.budget, "seed": a.seed, "long_running": a.long_running,
    });
    let artifact = Artifact {
        provenance: Provenance::new("degree", a.seed, run_config, &geom, None),
        result: value,
    };
    out.write(&format!("degree_{}.json", slug(geom.name())), &artifact.to_json())?;
    print_json(&artifact.result)
}

fn rio_negro(out: &Output, a: RioNegroArgs) -> Result<()> {
    let geom = selector::resolve(&a.geometry)?;
    let noise = parse_noise(&a.noise)?;
    let state: InitialState = a.state.parse()?;
    let families = a.extract.iter().map(|f| f.parse()).collect::<Result<Vec<Family>>>()?;
    let config = RioNegroConfig {
        shots: a.shots,
        noise,
        state,
        seed: a.seed,
    };
    let degree = a.degree.map(|value| KnownDegree {
        value,
        source: DegreeSource::Supplied,
    });
    let run = match a.precision {
        Precision::F64 => rio_negro_run::<f64>(&geom, &config, degree)?,
        Precision::F32 => rio_negro_run::<f32>(&geom, &config, degree)?,
    };
    let run_config = json!({
        "command": "rio-negro", "geometry": a.geometry, "shots": a.shots,
        "noise": noise, "state": state, "seed": a.seed, "extract": a.extract,
        "bins": a.bins, "degree": a.degree, "precision": a.precision.to_possible_value().expect("named").get_name(),
    });
    let prov = Provenance::new("rio-negro", a.seed, run_config, &geom, Some(noise));
    let base = format!("rio-negro_{}", slug(geom.name()));
    let mut summary = json!({ "report": run.report, "histograms": {} });
    for family in families {
        let members = family_members(&geom, family)?;
        let h = extract_subgeometry_chi(&geom, &run.estimates, family, &members, a.bins)?;
        let stem = format!("{base}_{family}");
        out.write(&format!("{stem}_hist.csv"), &histogram_csv(&h))?;
        out.write(&format!("{stem}_members.csv"), &members_csv(&h))?;
        out.write(&format!("{stem}.svg"), &histogram_svg(&h))?;
        summary["histograms"][family.to_string()] = json!({
            "count": h.members.len(), "lines": h.lines, "degree": h.degree,
            "nchv_bound": h.nchv_bound, "max": h.max, "best": h.best, "min": h.min,
            "mean": h.mean, "violation_fraction": h.violation_fraction,
        });
        let artifact = Artifact {
            provenance: prov.clone(),
            result: h,
        };
        out.write(&format!("{stem}.json"), &artifact.to_json())?;
    }
    out.write(&format!("{base}_contexts.csv"), &contexts_csv(&geom, &run.estimates))?;
    let artifact = Artifact {
        provenance: prov,
        result: run.report,
    };
    out.write(&format!("{base}.json"), &artifact.to_json())?;
    print_json(&summary)
}

fn ratio_string(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn transcript_csv(rows: &[TranscriptRow]) -> String {
    let mut s = String::from("round,question,answers,win\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.round, r.question, r.answers, r.win));
    }
    s
}

fn game(out: &Output, a: GameArgs) -> Result<()> {
    let geom = selector::resolve(&a.geometry)?;
    let kind: GameKind = a.kind.parse()?;
    let noise = parse_noise(&a.noise)?;
    let mode = if a.exhaustive {
        PlayMode::Exhaustive
    } else {
        PlayMode::Sampled {
            rounds: a.rounds,
            seed: a.seed,
        }
    };
    let strategy_name = a.strategy.to_possible_value().expect("named").get_name().to_owned();
    let run_config = json!({
        "command": "game", "geometry": a.geometry, "kind": kind, "strategy": strategy_name,
        "rounds": if a.exhaustive { Value::Null } else { json!(a.rounds) },
        "noise": noise, "seed": a.seed, "exhaustive": a.exhaustive,
        "long_running": a.long_running, "samples": a.samples,
        "precision": a.precision.to_possible_value().expect("named").get_name(),
    });
    let quantum = a.strategy == Strategy::Quantum;
    let prov = Provenance::new("game", a.seed, run_config, &geom, quantum.then_some(noise));
    let stem = format!("game_{kind}_{}_{}", slug(geom.name()), strategy_name);

    let mut extra = serde_json::Map::new();
    let (result, transcript): (GameResult, Vec<TranscriptRow>) = match a.strategy {
        Strategy::Quantum => {
            let play = match a.precision {
                Precision::F64 => play_quantum::<f64>(&geom, kind, &noise, mode)?,
                Precision::F32 => play_quantum::<f32>(&geom, kind, &noise, mode)?,
            };
            (play.result, play.transcript)
        }
        Strategy::ClassicalOptimal => {
            let search = ClassicalSearch {
                long_running: a.long_running,
                ..ClassicalSearch::default()
            };
            let opt = match optimal_classical(&geom, kind, search) {
                Ok(opt) => opt,
                Err(Error::Intractable { reason, reference }) => {
                    // bound-only report
                    let artifact = Artifact {
                        provenance: prov,
                        result: json!({
                            "geometry": geom.name(), "kind": kind, "strategy": "classical-optimal",
                            "computed": false, "reason": reason, "reference_value": reference,
                        }),
                    };
                    out.write(&format!("{stem}.json"), &artifact.to_json())?;
                    return print_json(&artifact.result);
                }
                Err(e) => return Err(e),
            };
            extra.insert("optimum".into(), json!(ratio_string(opt.value)));
            play_classical(&geom, kind, &opt.strategies, mode)?
        }
        Strategy::ClassicalAssignment => {
            let method = if incidence_rank(&geom) <= SolverConfig::default().point_cap {
                Method::RankReduced
            } else {
                Method::Heuristic
            };
            let d = compute_degree(
                &geom,
                &SolverConfig {
                    seed: a.seed,
                    ..SolverConfig::with_method(method)
                },
            )?;
            extra.insert("assignment_hex".into(), json!(d.witness.to_hex()));
            extra.insert("assignment_unsatisfied".into(), json!(d.unsatisfied.len()));
            let table = classical_from_assignment(&geom, &d.witness)?;
            play_classical(&geom, kind, &[table], mode)?
        }
        Strategy::ClassicalRandom => {
            let (best, tables) = random_strategy_search(&geom, kind, a.samples, a.seed)?;
            extra.insert("best_random".into(), json!(ratio_string(best)));
            play_classical(&geom, kind, &tables, mode)?
        }
    };
    if let Some(r) = reference_value(geom.name(), kind) {
        extra.insert("reference_classical_value".into(), json!(ratio_string(r)));
        extra.insert("beats_reference".into(), json!(result.rate > r));
    }
    let mut value = serde_json::to_value(&result)?;
    value.as_object_mut().expect("object").extend(extra);
    out.write(&format!("{stem}_transcript.csv"), &transcript_csv(&transcript))?;
    let artifact = Artifact {
        provenance: prov,
        result: value,
    };
    out.write(&format!("{stem}.json"), &artifact.to_json())?;
    print_json(&artifact.result)
}

fn report_cmd(out: &Output, a: ReportArgs) -> Result<()> {
    let bundle = report::report(&a.paths)?;
    out.write("report.json", &(serde_json::to_string_pretty(&bundle)? + "\n"))?;
    let table = bundle.to_markdown();
    out.write("report.md", &table)?;
    print!("{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("W(5,2)"), "W-5-2");
        assert_eq!(slug("E_YYY"), "E_YYY");
        assert_eq!(slug("doily"), "doily");
    }

    #[test]
    fn noise_flag() {
        assert_eq!(parse_noise("0.005,0.01").unwrap(), NoiseParams::new(0.005, 0.01).unwrap());
        assert!(parse_noise("0.1").is_err());
        assert!(parse_noise("0.1,2").is_err());
    }
}
