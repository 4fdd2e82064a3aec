//! JSON wire formats shared by the library surface and the CLI.
//!
//! Symbols travel as `{"dim": d, "terms": [{"x": [..], "xi": [..],
//! "re": "p/q", "im": "p/q"}]}` with rationals as decimal fraction strings,
//! so round-trips are bit-exact. Matrix symbols wrap a row-major grid of
//! the same term lists.

use crate::error::{Error, Result};
use crate::matrix_symbol::MatrixSymbol;
use crate::multi_index::MultiIndex;
use crate::rational::GaussianRational;
use crate::symbol::{Monomial, PolySymbol};
use crate::weights::{WeightSequence, WeightSpec};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TermJson {
    pub x: Vec<u32>,
    pub xi: Vec<u32>,
    pub re: String,
    pub im: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SymbolJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct MatrixSymbolJson {
    pub dim: usize,
    pub n: usize,
    /// row-major n x n grid
    pub entries: Vec<Vec<SymbolJson>>,
}

pub fn symbol_to_json(a: &PolySymbol) -> SymbolJson {
    SymbolJson {
        dim: a.dim(),
        terms: a
            .terms()
            .map(|(m, c)| TermJson {
                x: m.x.0.clone(),
                xi: m.xi.0.clone(),
                re: c.re.to_string(),
                im: c.im.to_string(),
            })
            .collect(),
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let bad = |what: &str| Error::Config(format!("bad rational {s:?}: {what}"));
    let n = BigInt::from_str(num).map_err(|_| bad("numerator"))?;
    let d = BigInt::from_str(den).map_err(|_| bad("denominator"))?;
    if d.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

pub fn symbol_from_json(j: &SymbolJson) -> Result<PolySymbol> {
    if j.dim == 0 {
        return Err(Error::Config("dim must be positive".into()));
    }
    let mut p = PolySymbol::zero(j.dim);
    for t in &j.terms {
        if t.x.len() != j.dim || t.xi.len() != j.dim {
            return Err(Error::BadMultiIndex {
                expected: j.dim,
                got: if t.x.len() != j.dim {
                    t.x.len()
                } else {
                    t.xi.len()
                },
            });
        }
        p.add_term(
            Monomial {
                x: MultiIndex(t.x.clone()),
                xi: MultiIndex(t.xi.clone()),
            },
            GaussianRational::new(parse_rational(&t.re)?, parse_rational(&t.im)?),
        );
    }
    Ok(p)
}

pub fn symbol_to_string(a: &PolySymbol) -> String {
    serde_json::to_string_pretty(&symbol_to_json(a)).expect("symbol serialises")
}

pub fn symbol_from_str(s: &str) -> Result<PolySymbol> {
    let j: SymbolJson = serde_json::from_str(s)?;
    symbol_from_json(&j)
}

pub fn matrix_symbol_to_json(a: &MatrixSymbol) -> MatrixSymbolJson {
    let n = a.size();
    MatrixSymbolJson {
        dim: a.dim(),
        n,
        entries: (0..n)
            .map(|i| (0..n).map(|j| symbol_to_json(a.entry(i, j))).collect())
            .collect(),
    }
}

pub fn matrix_symbol_from_json(j: &MatrixSymbolJson) -> Result<MatrixSymbol> {
    let mut entries = Vec::with_capacity(j.n * j.n);
    if j.entries.len() != j.n {
        return Err(Error::Shape(format!(
            "expected {} rows, got {}",
            j.n,
            j.entries.len()
        )));
    }
    for row in &j.entries {
        if row.len() != j.n {
            return Err(Error::Shape(format!(
                "expected {} columns, got {}",
                j.n,
                row.len()
            )));
        }
        for e in row {
            entries.push(symbol_from_json(e)?);
        }
    }
    MatrixSymbol::new(j.n, j.dim, entries)
}

/// Accept either a scalar symbol file or a matrix symbol file.
pub fn any_symbol_from_str(s: &str) -> Result<MatrixSymbol> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    if v.get("entries").is_some() {
        let j: MatrixSymbolJson = serde_json::from_value(v)?;
        matrix_symbol_from_json(&j)
    } else {
        let j: SymbolJson = serde_json::from_value(v)?;
        Ok(MatrixSymbol::scalar(symbol_from_json(&j)?))
    }
}

/// Weight-sequence declaration: `{"kind": "factorial_power", "s": 2}` |
/// `{"kind": "example313", "h": 1, "s": 2, "m": 2}` |
/// `{"kind": "explicit", "values": [...]}`.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpecJson {
    FactorialPower { s: f64 },
    Example313 { h: f64, s: f64, m: u32 },
    Explicit { values: Vec<f64> },
}

pub fn build_weights(spec: &WeightSpecJson, pmax: usize) -> Result<WeightSequence> {
    match spec {
        WeightSpecJson::FactorialPower { s } => Ok(WeightSequence::factorial_power(*s, pmax)),
        WeightSpecJson::Example313 { h, s, m } => Ok(WeightSequence::example313(*h, *s, *m, pmax)),
        WeightSpecJson::Explicit { values } => WeightSequence::explicit(values),
    }
}

pub fn weight_spec_to_json(spec: &WeightSpec) -> WeightSpecJson {
    match spec {
        WeightSpec::FactorialPower { s } => WeightSpecJson::FactorialPower { s: *s },
        WeightSpec::Example313 { h, s, m } => WeightSpecJson::Example313 {
            h: *h,
            s: *s,
            m: *m,
        },
        WeightSpec::Explicit { values } => WeightSpecJson::Explicit {
            values: values.clone(),
        },
    }
}
