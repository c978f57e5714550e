mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use holocenter_core::acceptance;
use holocenter_core::center::{
    accumulation_probe, analyze_spectrum, build_disk, min_period_scan, verify_disk, DiskModel, SpectralReport,
};
use holocenter_core::field::PolynomialMap;
use holocenter_core::flow::{integrate_trajectory, TimeTMap};
use holocenter_core::index::{
    fixed_point_index, iterated_index, periodic_points, series_order_1d, zero_index, BallRegion, IndexConfig,
    IndexResult, IterableMap,
};
use holocenter_core::{Error, C64};
use serde::Serialize;
use serde_json::{json, Value};

use scenario::{
    parameters, parse_scenario, DiskParams, IndexParams, MapSpec, OrbitParams, ProbeParams, Quantity, Scenario,
    ScanParams, SpectrumParams, VerifyParams, COMMANDS,
};

/// Fixed-point indices, spectral center conditions and periodic disks of
/// holomorphic polynomial vector fields.
#[derive(Parser, Debug)]
#[command(name = "holocenter", version)]
struct Args {
    /// One of: spectrum, index, iterated-index, disk, verify, orbit, probe, scan, selftest.
    /// Falls back to the scenario's "command" key.
    command: Option<String>,

    /// Scenario document (JSON).
    #[arg(long)]
    scenario: Option<PathBuf>,

    /// Directory for reports; created if missing.
    #[arg(long, default_value = "holocenter-out")]
    out: PathBuf,

    /// Exit with status 1 when the analysis verdict fails.
    #[arg(long)]
    strict: bool,

    /// Seed for the random regular values of the index engine.
    #[arg(long)]
    seed: Option<u64>,
}

struct Outcome {
    parameters: Value,
    result: Value,
    passed: bool,
    summary: String,
    files: Vec<(String, String)>,
}

enum Failure {
    Input(String),
    Analysis(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Analysis(e)
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports are plain data")
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|ch: char| !ch.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("HOLOCENTER_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("HOLOCENTER_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("HOLOCENTER_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> Result<u8, String> {
    let scenario = match &args.scenario {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Some(parse_scenario(&text).map_err(|e| e.to_string())?)
        }
        None => None,
    };
    let command = args
        .command
        .clone()
        .or_else(|| scenario.as_ref().and_then(|s| s.command.clone()))
        .ok_or("no command given on the command line or in the scenario")?;
    if !COMMANDS.contains(&command.as_str()) {
        return Err(format!("unknown command {command:?}; expected one of {}", COMMANDS.join(", ")));
    }
    fs::create_dir_all(&args.out).map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;

    if command == "selftest" {
        return selftest(&args.out);
    }
    let scenario = scenario.ok_or_else(|| format!("command {command} requires --scenario"))?;
    let seed = args.seed.or(scenario.seed).unwrap_or(0);

    let outcome = match dispatch(&command, &scenario, seed) {
        Ok(o) => o,
        Err(Failure::Input(msg)) => return Err(msg),
        Err(Failure::Analysis(e)) => {
            let report = json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "seed": seed,
                "field": to_value(&scenario.field.to_document()),
                "parameters": scenario.parameters,
                "error": { "kind": error_kind(&e), "message": e.to_string() },
                "passed": false,
            });
            write_report(&args.out, &command, &report)?;
            eprintln!("{command}: {e}");
            return Ok(1);
        }
    };

    for (name, data) in &outcome.files {
        let path = args.out.join(name);
        fs::write(&path, data).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let report = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "field": to_value(&scenario.field.to_document()),
        "parameters": outcome.parameters,
        "result": outcome.result,
        "passed": outcome.passed,
    });
    let path = write_report(&args.out, &command, &report)?;
    println!("{command}: {}", outcome.summary);
    println!("report: {}", path.display());
    Ok(if args.strict && !outcome.passed { 1 } else { 0 })
}

fn write_report(out: &Path, command: &str, report: &Value) -> Result<PathBuf, String> {
    let path = out.join(format!("{command}.json"));
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "report": format!("{command}.json"),
        "created_unix": created,
        "threads": rayon::current_num_threads(),
    });
    let meta_path = out.join(format!("{command}.meta.json"));
    fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n")
        .map_err(|e| format!("cannot write {}: {e}", meta_path.display()))?;
    Ok(path)
}

fn selftest(out: &Path) -> Result<u8, String> {
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for o in acceptance::run_all() {
        println!("{}", o.line());
        rows.push(json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }));
        timings.push(json!({ "id": o.id, "seconds": o.seconds }));
    }
    let passed = rows.iter().all(|r| r["passed"] == Value::Bool(true));
    let report = json!({
        "command": "selftest",
        "version": env!("CARGO_PKG_VERSION"),
        "criteria": rows,
        "passed": passed,
    });
    write_report(out, "selftest", &report)?;
    let timing_path = out.join("selftest.timings.json");
    fs::write(&timing_path, serde_json::to_string_pretty(&timings).expect("timings serialize") + "\n")
        .map_err(|e| format!("cannot write {}: {e}", timing_path.display()))?;
    Ok(if passed { 0 } else { 1 })
}

fn dispatch(command: &str, s: &Scenario, seed: u64) -> Result<Outcome, Failure> {
    match command {
        "spectrum" => spectrum(s),
        "index" | "iterated-index" => index(s, seed),
        "orbit" => orbit(s, seed),
        "disk" => disk(s),
        "verify" => verify(s),
        "probe" => probe(s),
        "scan" => scan(s),
        _ => unreachable!("command list checked before dispatch"),
    }
}

fn spectrum(s: &Scenario) -> Result<Outcome, Failure> {
    let p: SpectrumParams = parameters(&s.parameters)?;
    let report = analyze_spectrum(&s.field, p.tol_imag, p.k_max)?;
    let summary = format!(
        "omega {:?}, necessary {}, weak resonance ok {}, strong resonance ok {}",
        report.omega, report.thm11_necessary, report.thm12_ok, report.thm13_ok
    );
    Ok(Outcome {
        passed: report.thm13_ok,
        parameters: to_value(&p),
        result: to_value(&report),
        summary,
        files: Vec::new(),
    })
}

fn region(n: usize, center: &Option<Vec<C64>>, radius: f64) -> Result<BallRegion, Error> {
    let c = center.clone().unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
    BallRegion::new(c, radius)
}

fn index_on<M: IterableMap>(map: &M, p: &IndexParams, region: &BallRegion) -> Result<IndexResult, Error> {
    let point = region.center.clone();
    match (p.quantity, p.m) {
        (Quantity::Zero, 1) => zero_index(map, &point, region, &p.config),
        (Quantity::Zero, _) => Err(Error::InvalidInput("zero index takes no iteration count".into())),
        (Quantity::FixedPoint, 1) => fixed_point_index(map, &point, region, &p.config),
        (Quantity::FixedPoint, m) => iterated_index(map, m, &point, region, &p.config),
    }
}

fn time_map(field: &PolynomialMap, spec: &MapSpec) -> Result<Option<TimeTMap>, Error> {
    match spec {
        MapSpec::Polynomial => Ok(None),
        MapSpec::Time { tau, integrator } => Ok(Some(TimeTMap::new(field.clone(), *tau, *integrator)?)),
    }
}

fn index(s: &Scenario, seed: u64) -> Result<Outcome, Failure> {
    let mut p: IndexParams = parameters(&s.parameters)?;
    p.config.seed = seed;
    p.config.validate()?;
    let region = region(s.field.n(), &p.center, p.radius)?;
    let result = match time_map(&s.field, &p.map)? {
        Some(tm) => index_on(&tm, &p, &region)?,
        None => index_on(&s.field, &p, &region)?,
    };
    let at_origin = region.center.iter().all(|z| z.norm() == 0.0);
    let series_order = match (&p.map, p.quantity) {
        (MapSpec::Polynomial, Quantity::FixedPoint) if s.field.n() == 1 && at_origin && s.field.is_singular_at_origin() => {
            series_order_1d(&s.field, p.m).ok()
        }
        _ => None,
    };
    let summary = match result.value.count() {
        Some(k) => format!("index {k} (certified over {} runs)", result.diagnostics.runs.len()),
        None => "undetermined".to_string(),
    };
    Ok(Outcome {
        passed: result.value.count().is_some(),
        parameters: to_value(&p),
        result: json!({ "index": to_value(&result), "series_order": series_order }),
        summary,
        files: Vec::new(),
    })
}

fn orbit(s: &Scenario, seed: u64) -> Result<Outcome, Failure> {
    let mut p: OrbitParams = parameters(&s.parameters)?;
    p.config = IndexConfig { seed, ..p.config };
    let region = region(s.field.n(), &p.center, p.radius)?;
    let orbits = match time_map(&s.field, &p.map)? {
        Some(tm) => periodic_points(&tm, p.m, &region, &p.config)?,
        None => periodic_points(&s.field, p.m, &region, &p.config)?,
    };
    let mut files = Vec::new();
    if let Some(t) = &p.trajectory {
        let tr = integrate_trajectory(&s.field, &t.x0, t.t_end, t.samples, &t.integrator)?;
        files.push(("orbit_trajectory.csv".to_string(), tr.to_csv()));
    }
    Ok(Outcome {
        passed: true,
        parameters: to_value(&p),
        result: json!({ "orbits": to_value(&orbits) }),
        summary: format!("{} orbit(s) of exact period {}", orbits.len(), p.m),
        files,
    })
}

fn spectral_disk(field: &PolynomialMap, tol_imag: f64, delta: f64, degree: usize, cfg: &holocenter_core::CenterConfig) -> Result<(SpectralReport, DiskModel), Error> {
    let spec = analyze_spectrum(field, tol_imag, None)?;
    let disk = build_disk(field, &spec, delta, degree, cfg)?;
    Ok((spec, disk))
}

fn disk_export(disk: &DiskModel) -> String {
    let v = json!({
        "omega": disk.omega,
        "period": disk.period,
        "delta": disk.delta,
        "coeffs": to_value(&disk.coeffs),
        "residual_max": disk.residual_max,
    });
    serde_json::to_string_pretty(&v).expect("disk serializes") + "\n"
}

fn disk(s: &Scenario) -> Result<Outcome, Failure> {
    let p: DiskParams = parameters(&s.parameters)?;
    let (spec, disk) = spectral_disk(&s.field, p.tol_imag, p.delta, p.degree, &p.config)?;
    let summary = format!("disk of degree {} on |x_1| ≤ {}, fit residual {:.3e}", disk.degree, disk.delta, disk.residual_max);
    Ok(Outcome {
        passed: true,
        parameters: to_value(&p),
        result: json!({ "spectrum": to_value(&spec), "disk": to_value(&disk) }),
        summary,
        files: vec![("disk_model.json".to_string(), disk_export(&disk))],
    })
}

fn verify(s: &Scenario) -> Result<Outcome, Failure> {
    let mut p: VerifyParams = parameters(&s.parameters)?;
    let (spec, disk) = spectral_disk(&s.field, p.tol_imag, p.delta, p.degree, &p.config)?;
    let t0 = p.t0.unwrap_or(disk.period / 8.0);
    p.t0 = Some(t0);
    let report = verify_disk(&s.field, &disk, t0, &p.config)?;
    let mut files = vec![("disk_model.json".to_string(), disk_export(&disk))];
    if p.trajectories {
        for (j, x) in report.samples.iter().enumerate() {
            let tr = integrate_trajectory(&s.field, x, disk.period, p.trajectory_samples, &p.config.integrator)?;
            files.push((format!("verify_trajectory_{j:02}.csv"), tr.to_csv()));
        }
    }
    let summary = format!(
        "max return error {:.3e} at period {:.6}; all periods equal: {}",
        report.max_return_error, report.period, report.all_periods_equal
    );
    Ok(Outcome {
        passed: report.all_periods_equal,
        parameters: to_value(&p),
        result: json!({ "spectrum": to_value(&spec), "disk": to_value(&disk), "periodicity": to_value(&report) }),
        summary,
        files,
    })
}

fn probe(s: &Scenario) -> Result<Outcome, Failure> {
    let mut p: ProbeParams = parameters(&s.parameters)?;
    let omega = match p.omega {
        Some(w) => w,
        None => analyze_spectrum(&s.field, p.tol_imag, None)?
            .omega
            .ok_or_else(|| Error::InvalidInput("F'(0) has no pure imaginary eigenvalue; supply parameters.omega".into()))?,
    };
    p.omega = Some(omega);
    let report = accumulation_probe(&s.field, omega, &p.scales, &p.config)?;
    let found = report.entries.iter().filter(|e| e.found).count();
    Ok(Outcome {
        passed: report.found_at_all_scales(),
        parameters: to_value(&p),
        result: to_value(&report),
        summary: format!("nonzero fixed points of the period map found at {found} of {} scales", report.entries.len()),
        files: Vec::new(),
    })
}

fn scan(s: &Scenario) -> Result<Outcome, Failure> {
    let p: ScanParams = parameters(&s.parameters)?;
    let report = min_period_scan(&s.field, p.rho, p.t0, p.samples, &p.config)?;
    Ok(Outcome {
        passed: report.passed,
        parameters: to_value(&p),
        result: to_value(&report),
        summary: format!("min ratio {:.4} against bound {:.4}", report.min_ratio(), report.bound),
        files: Vec::new(),
    })
}
