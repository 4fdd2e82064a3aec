//! Square matrices of polynomial symbols.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::multi_index::MultiIndex;
use crate::symbol::PolySymbol;

/// An `n x n` grid of polynomial symbols sharing one phase-space dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSymbol {
    n: usize,
    dim: usize,
    entries: Vec<PolySymbol>, // row-major
}

impl MatrixSymbol {
    pub fn new(n: usize, dim: usize, entries: Vec<PolySymbol>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Shape(format!(
                "matrix symbol needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for e in &entries {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
        }
        Ok(MatrixSymbol { n, dim, entries })
    }

    pub fn scalar(a: PolySymbol) -> Self {
        let dim = a.dim();
        MatrixSymbol {
            n: 1,
            dim,
            entries: vec![a],
        }
    }

    /// `a * I_n` for a scalar symbol.
    pub fn scalar_times_identity(a: &PolySymbol, n: usize) -> Self {
        let dim = a.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if i == j {
                    a.clone()
                } else {
                    PolySymbol::zero(dim)
                });
            }
        }
        MatrixSymbol { n, dim, entries }
    }

    pub fn block_diag(a: &MatrixSymbol, b: &MatrixSymbol) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch {
                expected: a.dim,
                got: b.dim,
            });
        }
        let n = a.n + b.n;
        let mut entries = vec![PolySymbol::zero(a.dim); n * n];
        for i in 0..a.n {
            for j in 0..a.n {
                entries[i * n + j] = a.entry(i, j).clone();
            }
        }
        for i in 0..b.n {
            for j in 0..b.n {
                entries[(a.n + i) * n + (a.n + j)] = b.entry(i, j).clone();
            }
        }
        Ok(MatrixSymbol {
            n,
            dim: a.dim,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &PolySymbol {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[PolySymbol] {
        &self.entries
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.iter().map(|e| e.degree()).max().unwrap_or(0)
    }

    /// The symbol of the adjoint operator: conjugate transpose entrywise.
    pub fn adjoint_symbol(&self) -> MatrixSymbol {
        let mut entries = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                entries.push(self.entry(j, i).conj());
            }
        }
        MatrixSymbol {
            n: self.n,
            dim: self.dim,
            entries,
        }
    }

    /// Evaluate at a real phase point.
    pub fn eval(&self, w: &[f64]) -> CMatrix {
        CMatrix::from_fn(self.n, self.n, |i, j| self.entry(i, j).eval(w))
    }

    /// Evaluate the plain partial derivative `d_x^{x_order} d_xi^{xi_order}`
    /// entrywise at a real phase point.
    pub fn eval_derivative(
        &self,
        x_order: &MultiIndex,
        xi_order: &MultiIndex,
        w: &[f64],
    ) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let d = self.entry(i, j).derive(x_order, xi_order, false)?;
                out[(i, j)] = d.eval(w);
            }
        }
        Ok(out)
    }
}
