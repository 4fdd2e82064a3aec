//! Command-line front end: every library capability behind one scriptable
//! binary with JSON/CSV I/O. Exit code 0 only when every internal assertion
//! of the delegated operation passes; failures print a structured error
//! JSON and exit 1.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use weylcalc::hermite::{quantize, HermiteBasisSpec};
use weylcalc::index::{check_ellipticity, index_integral, operator_index_oracle, OrientedSphere};
use weylcalc::json::{
    any_symbol_from_str, build_weights, symbol_from_str, symbol_to_string, WeightSpecJson,
};
use weylcalc::parametrix::verify_left_inverse;
use weylcalc::spectral::{operator_series_matrix, spectrum_of_symbol, weyl_constant};
use weylcalc::sweep::{
    counting_csv, eigenvalue_csv, run_counting_sweep, run_eigenvalue_sweep, ExperimentConfig,
};
use weylcalc::symbol::{sharp_power_closed, sharp_power_iterated, star};
use weylcalc::weights::{check_conditions, EntireSeries};

#[derive(Parser)]
#[command(name = "weylcalc", version, about = "Weyl symbol calculus and spectral laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Output format where both are supported
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
    /// Seed for any randomized sampling
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sharp product of two symbol files
    Star { a: std::path::PathBuf, b: std::path::PathBuf },
    /// Iterated or closed-form sharp power of a symbol
    Power {
        a: std::path::PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = PowerMethod::Both)]
        method: PowerMethod,
    },
    /// Weyl quantization matrix on a truncated Hermite basis
    Quantize {
        a: std::path::PathBuf,
        #[arg(long = "hermite-n")]
        hermite_n: usize,
    },
    /// Eigenvalues of the quantized symbol (interior block), with trust
    /// certification against a smaller truncation
    Spectrum {
        a: std::path::PathBuf,
        #[arg(long = "hermite-n")]
        hermite_n: usize,
        #[arg(long, default_value_t = 4)]
        refine: usize,
    },
    /// Truncated power series of the quantized symbol, reported through its
    /// spectrum against P at the oscillator lattice
    SeriesOp {
        a: std::path::PathBuf,
        #[arg(long)]
        weights: std::path::PathBuf,
        #[arg(long = "hermite-n")]
        hermite_n: usize,
        #[arg(long, default_value_t = 200)]
        terms: usize,
    },
    /// Counting-law or eigenvalue sweep from a config file
    Counting {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long, value_enum, default_value_t = SweepMode::Counting)]
        mode: SweepMode,
    },
    /// The Weyl-law constant by sphere quadrature
    WeylConst {
        #[arg(long)]
        dim: usize,
        /// symbol degree used to scale a principal-part file; ignored for
        /// the default constant Phi = 1
        #[arg(long, default_value_t = 2)]
        m: u32,
        /// principal part a' to induce Phi = (a')^{1/m}; Phi = 1 if omitted
        #[arg(long = "phi-symbol")]
        phi_symbol: Option<std::path::PathBuf>,
    },
    /// Exact left-inverse check of the parametrix recursion
    Parametrix {
        a: std::path::PathBuf,
        #[arg(long, default_value_t = 3)]
        j: usize,
    },
    /// Fredholm index by boundary integral and/or operator oracle
    Index {
        #[arg(long)]
        symbol: std::path::PathBuf,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = IndexMethod::Both)]
        method: IndexMethod,
        #[arg(long = "hermite-n", default_value_t = 20)]
        hermite_n: usize,
        #[arg(long = "quad-level", default_value_t = 0)]
        quad_level: usize,
    },
    /// Weight-sequence condition report
    CheckWeights {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        m: Option<u32>,
        /// comma-separated values for kind = explicit
        #[arg(long)]
        values: Option<String>,
        #[arg(long, default_value_t = 50)]
        pmax: usize,
        /// c0 for the power-series domination check; skipped if s or m is
        /// missing
        #[arg(long = "stk-c0")]
        stk_c0: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PowerMethod {
    Iterated,
    Closed,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepMode {
    Counting,
    Eigenvalues,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexMethod {
    Integral,
    Oracle,
    Both,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            write_output(&cli.out, &output);
        }
        Err(e) => {
            let msg = serde_json::to_string_pretty(&json!({
                "error": e.to_string(),
            }))
            .unwrap();
            eprintln!("{msg}");
            std::process::exit(1);
        }
    }
}

fn write_output(path: &Option<std::path::PathBuf>, content: &str) {
    match path {
        Some(p) => std::fs::write(p, content).unwrap_or_else(|e| {
            eprintln!("{{\"error\": \"cannot write {}: {e}\"}}", p.display());
            std::process::exit(1);
        }),
        None => println!("{content}"),
    }
}

fn read(path: &std::path::Path) -> weylcalc::Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn run(cli: &Cli) -> weylcalc::Result<String> {
    match &cli.command {
        Command::Star { a, b } => {
            let pa = symbol_from_str(&read(a)?)?;
            let pb = symbol_from_str(&read(b)?)?;
            Ok(symbol_to_string(&star(&pa, &pb)?))
        }
        Command::Power { a, n, method } => {
            let p = symbol_from_str(&read(a)?)?;
            let (it, cl) = match method {
                PowerMethod::Iterated => (Some(sharp_power_iterated(&p, *n)), None),
                PowerMethod::Closed => (None, Some(sharp_power_closed(&p, *n)?)),
                PowerMethod::Both => {
                    let it = sharp_power_iterated(&p, *n);
                    let cl = sharp_power_closed(&p, *n)?;
                    if it != cl {
                        return Err(weylcalc::Error::Config(
                            "closed-form and iterated sharp powers disagree".into(),
                        ));
                    }
                    (Some(it), Some(cl))
                }
            };
            let result = it.or(cl).expect("one method ran");
            Ok(symbol_to_string(&result))
        }
        Command::Quantize { a, hermite_n } => {
            let p = symbol_from_str(&read(a)?)?;
            let op = quantize(&p, HermiteBasisSpec::new(p.dim(), *hermite_n))?;
            match cli.emit {
                Emit::Csv => Ok(op.to_csv()),
                Emit::Json => Ok(serde_json::to_string_pretty(&json!({
                    "dim": op.domain.dim,
                    "n_dom": op.domain.max_degree,
                    "n_cod": op.codomain.max_degree,
                    "csv": op.to_csv(),
                }))?),
            }
        }
        Command::Spectrum { a, hermite_n, refine } => {
            let p = symbol_from_str(&read(a)?)?;
            let s = spectrum_of_symbol(&p, p.dim(), *hermite_n, *refine)?;
            match cli.emit {
                Emit::Json => Ok(serde_json::to_string_pretty(&s)?),
                Emit::Csv => {
                    let mut out = String::from("k,eigenvalue,trusted\n");
                    for (k, e) in s.eigenvalues.iter().enumerate() {
                        out.push_str(&format!("{k},{e},{}\n", k < s.trusted_count));
                    }
                    Ok(out)
                }
            }
        }
        Command::SeriesOp {
            a,
            weights,
            hermite_n,
            terms,
        } => {
            let p = symbol_from_str(&read(a)?)?;
            let wspec: WeightSpecJson = serde_json::from_str(&read(weights)?)?;
            let wseq = build_weights(&wspec, (*terms).max(200))?;
            let series = EntireSeries::new(wseq, 1e-16);
            let op = operator_series_matrix(&p, &series, HermiteBasisSpec::new(p.dim(), *hermite_n), *terms)?;
            let spec = weylcalc::spectral::eigensolve_hermitian(&op, None, "series operator")?;
            match cli.emit {
                Emit::Json => Ok(serde_json::to_string_pretty(&spec)?),
                Emit::Csv => {
                    let mut out = String::from("k,eigenvalue\n");
                    for (k, e) in spec.eigenvalues.iter().enumerate() {
                        out.push_str(&format!("{k},{e}\n"));
                    }
                    Ok(out)
                }
            }
        }
        Command::Counting { config, mode } => {
            let cfg: ExperimentConfig = serde_json::from_str(&read(config)?)?;
            match mode {
                SweepMode::Counting => Ok(counting_csv(&run_counting_sweep(&cfg)?)),
                SweepMode::Eigenvalues => Ok(eigenvalue_csv(&run_eigenvalue_sweep(&cfg)?)),
            }
        }
        Command::WeylConst { dim, m, phi_symbol } => {
            let c = match phi_symbol {
                None => weyl_constant(*dim, &|_: &[f64]| 1.0, 1)?,
                Some(path) => {
                    let aprime = symbol_from_str(&read(path)?)?;
                    if aprime.dim() != *dim {
                        return Err(weylcalc::Error::DimensionMismatch {
                            expected: *dim,
                            got: aprime.dim(),
                        });
                    }
                    let mm = *m;
                    let phi = move |theta: &[f64]| aprime.eval(theta).re.powf(1.0 / mm as f64);
                    weyl_constant(*dim, &phi, 1)?
                }
            };
            Ok(serde_json::to_string_pretty(&json!({"dim": dim, "c": c}))?)
        }
        Command::Parametrix { a, j } => {
            let p = symbol_from_str(&read(a)?)?;
            let report = verify_left_inverse(&p, *j)?;
            Ok(serde_json::to_string_pretty(&json!({
                "J": report.j_max,
                "c0_is_one": report.c0_is_one,
                "max_nonzero_k": report.max_nonzero_k,
                "term_sizes": report.term_sizes,
            }))?)
        }
        Command::Index {
            symbol,
            radius,
            method,
            hermite_n,
            quad_level,
        } => {
            let a = any_symbol_from_str(&read(symbol)?)?;
            let ell = check_ellipticity(&a, *radius, 64, cli.seed);
            if !ell.passed {
                return Err(weylcalc::Error::Ellipticity {
                    min_det: ell.min_abs_det,
                    radius: *radius,
                });
            }
            let integral = match method {
                IndexMethod::Oracle => None,
                _ => Some(index_integral(
                    &a,
                    OrientedSphere::new(a.dim(), *radius),
                    *quad_level,
                )?),
            };
            let oracle = match method {
                IndexMethod::Integral => None,
                _ => Some(operator_index_oracle(&a, *hermite_n)?),
            };
            let agree = match (&integral, &oracle) {
                (Some(i), Some(o)) => Some(i.rounded == *o && (i.value - *o as f64).abs() <= 1e-3),
                _ => None,
            };
            Ok(serde_json::to_string_pretty(&json!({
                "integral": integral.as_ref().map(|i| i.value),
                "rounded": integral.as_ref().map(|i| i.rounded),
                "oracle": oracle,
                "agree": agree,
                "ellipticity": ell,
            }))?)
        }
        Command::CheckWeights {
            kind,
            s,
            h,
            m,
            values,
            pmax,
            stk_c0,
        } => {
            let spec = match kind.as_str() {
                "factorial_power" => WeightSpecJson::FactorialPower {
                    s: s.ok_or_else(|| weylcalc::Error::Config("--s required".into()))?,
                },
                "example313" => WeightSpecJson::Example313 {
                    h: h.unwrap_or(1.0),
                    s: s.ok_or_else(|| weylcalc::Error::Config("--s required".into()))?,
                    m: m.ok_or_else(|| weylcalc::Error::Config("--m required".into()))?,
                },
                "explicit" => WeightSpecJson::Explicit {
                    values: values
                        .as_ref()
                        .ok_or_else(|| weylcalc::Error::Config("--values required".into()))?
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| weylcalc::Error::Config(format!("bad value list: {e}")))?,
                },
                other => {
                    return Err(weylcalc::Error::Config(format!(
                        "unknown weight kind {other:?}"
                    )))
                }
            };
            let seq = build_weights(&spec, *pmax)?;
            let stk = match (&spec, stk_c0) {
                (WeightSpecJson::Example313 { s, m, .. }, Some(c0)) => Some((*s, *m, *c0)),
                (WeightSpecJson::FactorialPower { s }, Some(c0)) => Some((*s, 1, *c0)),
                _ => None,
            };
            let report = check_conditions(&seq, *pmax, stk)?;
            Ok(serde_json::to_string_pretty(&report)?)
        }
    }
}
