//! One function per subcommand. Each writes its artifacts under `--out` and
//! a JSON report embedding the fully resolved configuration.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Mutex;

use alif_core::alif::{decompose, SiftStatus, SiftingConfig, Signal};
use alif_core::counterexample;
use alif_core::matrices::{self, truncate_band};
use alif_core::spectral;
use alif_core::symbol::Symbol;
use serde_json::json;

use crate::io;
use crate::spec::{self, fmt_f64};
use crate::{thread_cap, unix_ms, CliError};

fn sift_status_str(s: SiftStatus) -> &'static str {
    match s {
        SiftStatus::Converged => "converged",
        SiftStatus::IterationCap => "iteration_cap",
        SiftStatus::Diverged => "diverged",
    }
}

pub struct DecomposeArgs {
    pub signal: PathBuf,
    pub filter: String,
    pub length: String,
    pub delta: f64,
    pub max_inner: usize,
    pub max_imfs: usize,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let samples = io::read_signal(&args.signal)?;
    let filter = spec::parse_filter(&args.filter)?;
    let strategy = spec::parse_strategy(&args.length)?;
    let signal =
        Signal::new(samples.clone()).map_err(|e| CliError::config(format!("signal: {e}")))?;
    if !(args.delta > 0.0) {
        return Err(CliError::config("--delta must be positive"));
    }
    let cfg = SiftingConfig {
        delta: args.delta,
        max_inner: args.max_inner,
        max_imfs: args.max_imfs,
        ..SiftingConfig::default()
    };
    let result = decompose(&signal, &filter, &strategy, &cfg)
        .map_err(|e| CliError::config(format!("decompose: {e}")))?;

    for (idx, imf) in result.imfs.iter().enumerate() {
        io::write_signal(&args.out.join(format!("imf_{:02}.csv", idx + 1)), imf)?;
    }
    io::write_signal(&args.out.join("trend.csv"), &result.trend)?;

    let mut recon = result.trend.clone();
    for imf in &result.imfs {
        for (r, v) in recon.iter_mut().zip(imf.iter()) {
            *r += v;
        }
    }
    let residual: f64 = recon
        .iter()
        .zip(samples.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    let telemetry = json!({
        "generated_unix_ms": unix_ms() as u64,
        "config": {
            "command": "decompose",
            "signal": args.signal.display().to_string(),
            "filter": spec::filter_document(&filter),
            "length": spec::strategy_document(&strategy),
            "delta": args.delta,
            "max_inner": args.max_inner,
            "max_imfs": args.max_imfs,
            "seed": args.seed,
        },
        "n": samples.len(),
        "status": match result.status {
            alif_core::alif::DecompositionStatus::TrendReached => "trend_reached",
            alif_core::alif::DecompositionStatus::MaxImfs => "max_imfs",
            alif_core::alif::DecompositionStatus::Diverged => "diverged",
            alif_core::alif::DecompositionStatus::Stagnant => "stagnant",
        },
        "imf_count": result.imfs.len(),
        "reconstruction_residual": residual,
        "sifts": result.telemetry.iter().map(|t| json!({
            "iterations": t.iterations,
            "final_relative_change": t.final_relative_change,
            "status": sift_status_str(t.status),
            "initial_norm": t.initial_norm,
            "final_norm": t.final_norm,
        })).collect::<Vec<_>>(),
    });
    io::write_json(&args.out.join("telemetry.json"), &telemetry)
}

pub struct SymbolArgs {
    pub filter: String,
    pub length: String,
    pub grid_x: usize,
    pub grid_theta: usize,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_symbol(args: &SymbolArgs) -> Result<(), CliError> {
    if args.grid_x < 2 || args.grid_theta < 2 {
        return Err(CliError::config("--grid-x and --grid-theta must be >= 2"));
    }
    let filter = spec::parse_filter(&args.filter)?;
    let length = spec::parse_length(&args.length)?;
    let sym = Symbol::new(filter.clone(), length.clone());

    let mut rows = Vec::with_capacity(args.grid_x * args.grid_theta);
    for i in 0..args.grid_x {
        let x = i as f64 / (args.grid_x - 1) as f64;
        for j in 0..args.grid_theta {
            let theta = -PI + 2.0 * PI * j as f64 / (args.grid_theta - 1) as f64;
            let v = sym.eval(x, theta, None);
            rows.push(vec![fmt_f64(x), fmt_f64(theta), fmt_f64(v)]);
        }
    }
    io::write_csv(&args.out.join("symbol.csv"), "x,theta,kappa", &rows)?;

    let range = sym.range(args.grid_x, args.grid_theta);
    let report = json!({
        "generated_unix_ms": unix_ms() as u64,
        "config": {
            "command": "symbol",
            "filter": spec::filter_document(&filter),
            "length": spec::length_document(&length),
            "grid_x": args.grid_x,
            "grid_theta": args.grid_theta,
            "seed": args.seed,
        },
        "max_shift": sym.max_shift(),
        "range": {
            "min": range.min,
            "max": range.max,
            "argmin": [range.argmin.0, range.argmin.1],
            "argmax": [range.argmax.0, range.argmax.1],
            "condition_ok": range.condition_ok,
        },
    });
    io::write_json(&args.out.join("symbol.json"), &report)
}

pub struct SpectrumArgs {
    pub filter: String,
    pub length: String,
    pub n: usize,
    pub dump_matrix_csv: bool,
    pub dump_matrix_bin: bool,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let filter = spec::parse_filter(&args.filter)?;
    let length = spec::parse_length(&args.length)?;
    let k = matrices::build_k(&filter, &length, args.n)
        .map_err(|e| CliError::config(format!("build: {e}")))?;
    let report =
        spectral::spectral_report(&k).map_err(|e| CliError::config(format!("spectrum: {e}")))?;

    if args.dump_matrix_csv {
        io::write_matrix_csv(&args.out.join("k_matrix.csv"), &k.mat)?;
    }
    if args.dump_matrix_bin {
        io::write_matrix_binary(&args.out.join("k_matrix.bin"), &k.mat)?;
    }

    let doc = json!({
        "generated_unix_ms": unix_ms() as u64,
        "config": {
            "command": "spectrum",
            "filter": spec::filter_document(&filter),
            "length": spec::length_document(&length),
            "n": args.n,
            "seed": args.seed,
        },
        "band_halfwidth": k.band_halfwidth,
        "eigenvalues": report.eigenvalues.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
        "singular_values": report.singular_values,
        "spectral_radius_of_iteration": report.spectral_radius_of_iteration,
        "max_imag": report.max_imag,
        "necessary_condition_ok": report.necessary_condition_ok,
    });
    io::write_json(&args.out.join("spectrum.json"), &doc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMetric {
    Distribution,
    SymmetryDefect,
    ZeroDistribution,
}

pub struct SweepArgs {
    pub metric: SweepMetric,
    pub filter: String,
    pub length: String,
    pub sizes: Vec<usize>,
    /// Truncation width for the zero-distribution metric.
    pub m: usize,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    if args.sizes.is_empty() {
        return Err(CliError::config("--sizes must not be empty"));
    }
    let filter = spec::parse_filter(&args.filter)?;
    let length = spec::parse_length(&args.length)?;
    let mut sizes = args.sizes.clone();
    sizes.sort_unstable();

    // Per-size work, fanned out across capped workers; each entry lands in
    // its own slot so aggregation stays ordered by n.
    let slots: Mutex<Vec<Option<Vec<String>>>> = Mutex::new(vec![None; sizes.len()]);
    let workers = thread_cap().min(sizes.len());
    let next = std::sync::atomic::AtomicUsize::new(0);
    let work = |idx: usize| -> Result<Vec<String>, CliError> {
        let n = sizes[idx];
        let k = matrices::build_k(&filter, &length, n)
            .map_err(|e| CliError::config(format!("build at n = {n}: {e}")))?;
        match args.metric {
            SweepMetric::Distribution => {
                let sym = Symbol::new(filter.clone(), length.clone());
                let check = spectral::distribution_check(&k.mat, &sym, None)
                    .map_err(|e| CliError::config(format!("distribution at n = {n}: {e}")))?;
                Ok(vec![
                    n.to_string(),
                    fmt_f64(check.discrepancy),
                    fmt_f64(check.max_imag),
                    fmt_f64(check.outlier_fraction),
                    fmt_f64(check.test_function_gap),
                ])
            }
            SweepMetric::SymmetryDefect => Ok(vec![
                n.to_string(),
                fmt_f64(spectral::symmetry_defect(&k.mat)),
            ]),
            SweepMetric::ZeroDistribution => {
                let z = k
                    .mat
                    .sub(&truncate_band(&k.mat, args.m))
                    .expect("same size");
                let norm = spectral::schatten_norm(&z, 2.0)
                    .map_err(|e| CliError::config(format!("schatten at n = {n}: {e}")))?;
                Ok(vec![n.to_string(), fmt_f64(norm / (n as f64).sqrt())])
            }
        }
    };

    let failure: Mutex<Option<CliError>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if idx >= sizes.len() {
                    break;
                }
                match work(idx) {
                    Ok(row) => slots.lock().unwrap()[idx] = Some(row),
                    Err(e) => {
                        *failure.lock().unwrap() = Some(e);
                        break;
                    }
                }
            });
        }
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let rows: Vec<Vec<String>> = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("all slots filled"))
        .collect();

    let (name, header) = match args.metric {
        SweepMetric::Distribution => (
            "distribution",
            "n,discrepancy,max_imag,outlier_fraction,test_function_gap",
        ),
        SweepMetric::SymmetryDefect => ("symmetry-defect", "n,defect"),
        SweepMetric::ZeroDistribution => ("zero-distribution", "n,scaled_schatten_2"),
    };
    io::write_csv(&args.out.join("sweep.csv"), header, &rows)?;
    let doc = json!({
        "generated_unix_ms": unix_ms() as u64,
        "config": {
            "command": "sweep",
            "metric": name,
            "filter": spec::filter_document(&filter),
            "length": spec::length_document(&length),
            "sizes": sizes,
            "m": args.m,
            "seed": args.seed,
            "threads": thread_cap(),
        },
    });
    io::write_json(&args.out.join("sweep.json"), &doc)
}

pub struct AcsArgs {
    pub filter: String,
    pub length: String,
    pub sizes: Vec<usize>,
    pub m: Vec<usize>,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_acs(args: &AcsArgs) -> Result<(), CliError> {
    if args.sizes.is_empty() || args.m.is_empty() {
        return Err(CliError::config("--sizes and --m must not be empty"));
    }
    let filter = spec::parse_filter(&args.filter)?;
    let length = spec::parse_length(&args.length)?;
    let mut sizes = args.sizes.clone();
    sizes.sort_unstable();
    let mut ms = args.m.clone();
    ms.sort_unstable();

    let mut rows = Vec::new();
    let mut all_ok = true;
    for &n in &sizes {
        for &m in &ms {
            let cell = spectral::truncation_error(&filter, &length, n, m)
                .map_err(|e| CliError::config(format!("truncation at n = {n}: {e}")))?;
            let ok = cell.empirical <= cell.bound + 1e-12;
            all_ok &= ok;
            rows.push(vec![
                n.to_string(),
                m.to_string(),
                fmt_f64(cell.empirical),
                fmt_f64(cell.bound),
                ok.to_string(),
            ]);
        }
    }
    io::write_csv(&args.out.join("acs.csv"), "n,m,empirical,bound,ok", &rows)?;
    let doc = json!({
        "generated_unix_ms": unix_ms() as u64,
        "config": {
            "command": "acs",
            "filter": spec::filter_document(&filter),
            "length": spec::length_document(&length),
            "sizes": sizes,
            "m": ms,
            "seed": args.seed,
        },
        "all_within_bound": all_ok,
    });
    io::write_json(&args.out.join("acs.json"), &doc)
}

pub struct CounterexampleArgs {
    pub dump_filter: bool,
    pub dump_symbol: bool,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run_counterexample(args: &CounterexampleArgs) -> Result<(), CliError> {
    let bundle = counterexample::build();
    let report = counterexample::verify(&bundle);

    if args.dump_filter {
        let nodes = bundle
            .filter_raw
            .exact_nodes()
            .expect("fixture kernel is piecewise linear");
        let rows: Vec<Vec<String>> = nodes
            .iter()
            .map(|(x, v)| {
                vec![
                    fmt_f64(x.to_f64()),
                    fmt_f64(v.to_f64()),
                    format!("{x}"),
                    format!("{v}"),
                ]
            })
            .collect();
        io::write_csv(
            &args.out.join("filter_nodes.csv"),
            "x,value,x_exact,value_exact",
            &rows,
        )?;
    }
    if args.dump_symbol {
        let sym = bundle.symbol_raw();
        let (nx, ntheta) = (101usize, 257usize);
        let mut rows = Vec::with_capacity(nx * ntheta);
        for i in 0..nx {
            let x = i as f64 / (nx - 1) as f64;
            for j in 0..ntheta {
                let theta = -PI + 2.0 * PI * j as f64 / (ntheta - 1) as f64;
                rows.push(vec![
                    fmt_f64(x),
                    fmt_f64(theta),
                    fmt_f64(sym.eval(x, theta, None)),
                ]);
            }
        }
        io::write_csv(&args.out.join("symbol_grid.csv"), "x,theta,kappa", &rows)?;
    }

    let growth = bundle.seeded_growth_curve(args.seed, 20_000);
    let doc = json!({
        "generated_unix_ms": unix_ms() as u64,
        "config": {
            "command": "counterexample",
            "dump_filter": args.dump_filter,
            "dump_symbol": args.dump_symbol,
            "seed": args.seed,
        },
        "ok": report.all_ok(),
        "matrix": (0..3).map(|i| {
            (0..3).map(|j| bundle.k3.mat.get(i, j)).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "matrix_exact": bundle.k3_exact.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "determinant": report.determinant,
        "determinant_exact": counterexample::expected_determinant().to_string(),
        "determinant_ok": report.determinant_ok,
        "min_eigenvalue": report.min_eigenvalue,
        "min_eigenvalue_ok": report.min_eigenvalue_ok,
        "iteration_radius": report.iteration_radius,
        "iteration_radius_ok": report.iteration_radius_ok,
        "raw_symbol": {
            "min": report.raw_symbol.min,
            "max": report.raw_symbol.max,
            "condition_ok": report.raw_symbol.condition_ok,
            "ok": report.raw_symbol_ok,
        },
        "normalized_symbol_max": report.normalized_symbol_max,
        "normalized_symbol_ok": report.normalized_symbol_ok,
        "kernel_l1_mass": bundle.filter_raw.l1_mass(),
        "sift": {
            "status": sift_status_str(report.sift_status),
            "iterations": report.sift_iterations,
            "ok": report.sift_ok,
        },
        "growth_tail_log_rate": growth.tail_log_rate,
        "polynomials_nonnegative": report.polynomials_nonnegative,
        "polynomial_maxima_ok": report.polynomial_maxima_ok,
    });
    io::write_json(&args.out.join("counterexample.json"), &doc)?;

    if report.all_ok() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!(
            "fixture verification failed: {report:?}"
        )))
    }
}
