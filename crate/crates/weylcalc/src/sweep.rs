//! Experiment driver: counting-function and eigenvalue sweeps for power
//! series of the harmonic oscillator, with persisted CSV artifacts.
//!
//! The exact columns lean on the closed spectral structure of `P(H)`: its
//! eigenvalues are `P(mu)` over the oscillator lattice `mu = d + 2k`, so
//! exact counting reduces to a certified lattice cut. Predictions come from
//! the counting-law constant and the series inverse (plus the associated
//! function on the log scale).

use crate::error::{Error, Result};
use crate::json::WeightSpecJson;
use crate::spectral::{
    certified_lattice_cut, lattice_count_harmonic, multiplicity, predicted_counting, weyl_constant,
};
use crate::threads::par_map;
use crate::weights::EntireSeries;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Declarative sweep configuration. Grids must be strictly increasing and
/// the dimension desk-scale.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub weights: WeightSpecJson,
    /// weight-sequence length used for series evaluation
    #[serde(default = "default_pmax")]
    pub pmax: usize,
    #[serde(default)]
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub j_grid: Vec<u64>,
}

fn default_pmax() -> usize {
    400
}

/// The sweeps quantify the harmonic oscillator symbol `|w|^2`; its degree.
const SYMBOL_DEGREE: u32 = 2;

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > 3 {
            return Err(Error::Config(format!(
                "dimension {} outside desk-scale range 1..=3",
                self.d
            )));
        }
        for w in self.lambda_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("lambda grid must be strictly increasing".into()));
            }
        }
        for w in self.j_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("j grid must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    pub fn series(&self) -> Result<EntireSeries> {
        Ok(EntireSeries::new(
            crate::json::build_weights(&self.weights, self.pmax)?,
            1e-16,
        ))
    }
}

pub const COUNTING_HEADER: &str = "lambda,n_exact,n_predicted_pinv,n_predicted_assoc,ratio";
pub const EIGENVALUE_HEADER: &str = "j,lambda_j_exact,lambda_j_predicted";

/// One row of the counting sweep.
#[derive(Clone, Debug)]
pub struct CountingRow {
    pub lambda: f64,
    pub n_exact: u64,
    pub n_predicted_pinv: f64,
    pub n_predicted_assoc: f64,
    /// exact count over the P-inverse prediction
    pub ratio: f64,
}

/// Exact counts of `N_{P(H)}(lambda)` against both asymptotic predictions.
pub fn run_counting_sweep(config: &ExperimentConfig) -> Result<Vec<CountingRow>> {
    config.validate()?;
    let p = config.series()?;
    let d = config.d;
    let c = weyl_constant(d, &|_: &[f64]| 1.0, 1)?;
    let rows: Vec<Result<CountingRow>> = par_map(&config.lambda_grid, |&lambda| {
        let lam_rat = BigRational::from_float(lambda)
            .ok_or_else(|| Error::Config(format!("lambda {lambda} is not finite")))?;
        let cut = certified_lattice_cut(&p, d, &lam_rat)?;
        let n_exact = match cut {
            None => 0,
            Some(mu) => lattice_count_harmonic(d, mu as f64),
        };
        let (pinv, assoc) = predicted_counting(&p, c, d, SYMBOL_DEGREE, lambda)?;
        Ok(CountingRow {
            lambda,
            n_exact,
            n_predicted_pinv: pinv,
            n_predicted_assoc: assoc,
            ratio: n_exact as f64 / pinv,
        })
    });
    rows.into_iter().collect()
}

/// One row of the eigenvalue sweep.
#[derive(Clone, Debug)]
pub struct EigenvalueRow {
    pub j: u64,
    pub lambda_exact: f64,
    pub lambda_predicted: f64,
}

/// Exact `lambda_j = P(mu_j)` over the oscillator lattice (multiplicity
/// preserved) against the predicted `P((j/c)^{m/2d})`.
pub fn run_eigenvalue_sweep(config: &ExperimentConfig) -> Result<Vec<EigenvalueRow>> {
    config.validate()?;
    let p = config.series()?;
    let d = config.d;
    let c = weyl_constant(d, &|_: &[f64]| 1.0, 1)?;
    let rows: Vec<Result<EigenvalueRow>> = par_map(&config.j_grid, |&j| {
        let mu = lattice_level_of_rank(d, j);
        Ok(EigenvalueRow {
            j,
            lambda_exact: p.eval(mu as f64)?,
            lambda_predicted: crate::spectral::predicted_eigenvalue(&p, c, d, SYMBOL_DEGREE, j)?,
        })
    });
    rows.into_iter().collect()
}

/// The `j`-th (0-based, ascending, multiplicity counted) oscillator
/// eigenvalue `mu_j = d + 2k`.
pub fn lattice_level_of_rank(d: usize, j: u64) -> u64 {
    let mut remaining = j;
    let mut k = 0u64;
    loop {
        let m = multiplicity(d, k);
        if remaining < m {
            return d as u64 + 2 * k;
        }
        remaining -= m;
        k += 1;
    }
}

pub fn counting_csv(rows: &[CountingRow]) -> String {
    let mut s = String::from(COUNTING_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.lambda, r.n_exact, r.n_predicted_pinv, r.n_predicted_assoc, r.ratio
        );
    }
    s
}

pub fn eigenvalue_csv(rows: &[EigenvalueRow]) -> String {
    let mut s = String::from(EIGENVALUE_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.j, r.lambda_exact, r.lambda_predicted);
    }
    s
}

/// Geometric grid of lambda values spanning `P(mu_lo)..P(mu_hi)`.
pub fn default_lambda_grid(p: &EntireSeries, mu_lo: f64, mu_hi: f64, points: usize) -> Result<Vec<f64>> {
    let lo = p.eval(mu_lo)?;
    let hi = p.eval(mu_hi)?;
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    Ok((0..points)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (points - 1) as f64).exp())
        .collect())
}
