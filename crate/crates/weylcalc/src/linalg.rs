//! Dense complex matrices with the few factorisations this crate needs:
//! a cyclic Jacobi eigensolver for Hermitian matrices, a one-sided Jacobi
//! (Hestenes) SVD for rectangular matrices, and LU inversion for the small
//! pointwise systems of the index integral. Desk-scale sizes make the
//! O(n^3)-per-sweep cost acceptable.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Leading principal block (first `rows` rows, first `cols` columns).
    pub fn leading_block(&self, rows: usize, cols: usize) -> CMatrix {
        assert!(rows <= self.rows && cols <= self.cols);
        CMatrix::from_fn(rows, cols, |i, j| self[(i, j)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max row sum of moduli; an upper bound for the spectral norm of a
    /// Hermitian matrix.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let diff = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }

    /// Inverse by LU with partial pivoting. Intended for the small pointwise
    /// matrices of the index module.
    pub fn inverse(&self) -> Result<CMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Err(Error::Shape("singular matrix in inverse".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let acj = a[(col, j)];
                    let icj = inv[(col, j)];
                    a[(r, j)] -= f * acj;
                    inv[(r, j)] -= f * icj;
                }
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Complex64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[(col, col)].norm();
            for r in col + 1..n {
                let v = a[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= a[(col, col)];
            let p = a[(col, col)];
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let acj = a[(col, j)];
                    a[(r, j)] -= f * acj;
                }
            }
        }
        det
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Stable tangent of the Jacobi angle annihilating the off-diagonal entry of
/// the real symmetric block [[a, r], [r, b]] under R^T M R, R = [[c,-s],[s,c]].
fn jacobi_tangent(a: f64, b: f64, r: f64) -> f64 {
    let tau = (b - a) / (2.0 * r);
    if tau == 0.0 {
        1.0
    } else {
        -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi sweeps with
/// complex plane rotations. Returns ascending eigenvalues and the unitary of
/// eigenvectors (columns), so `A = V diag(l) V*`.
pub fn jacobi_hermitian(a: &CMatrix, tol_defect: f64) -> Result<(Vec<f64>, CMatrix)> {
    assert!(a.is_square());
    let n = a.rows();
    let defect = a.hermitian_defect();
    let scale = a.max_abs().max(1e-300);
    if defect > tol_defect * scale {
        return Err(Error::NonHermitian {
            asym: defect,
            tol: tol_defect * scale,
        });
    }
    let mut m = a.clone();
    // Symmetrise exactly so rounding in the input cannot drift.
    for i in 0..n {
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let fro = m.fro_norm().max(1e-300);
    let stop = 1e-15 * fro;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m[(p, q)];
                let r = g.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = g / r; // e^{i phi}
                let t = jacobi_tangent(m[(p, p)].re, m[(q, q)].re, r);
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column update: A <- A U with U = [[c e^{i phi}, -s e^{i phi}], [s, c]].
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = aip * phase * c + aiq * s;
                    m[(i, q)] = -aip * phase * s + aiq * c;
                }
                // Row update: A <- U* A.
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = apj * phase.conj() * c + aqj * s;
                    m[(q, j)] = -apj * phase.conj() * s + aqj * c;
                }
                // Accumulate eigenvectors.
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * phase * c + viq * s;
                    v[(i, q)] = -vip * phase * s + viq * c;
                }
                // Clean the annihilated pair against rounding drift.
                let avg = (m[(p, q)] + m[(q, p)].conj()) * 0.5;
                m[(p, q)] = avg;
                m[(q, p)] = avg.conj();
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| eigs[i].partial_cmp(&eigs[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let vs = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((sorted, vs))
}

/// Singular values of a rectangular complex matrix by one-sided Jacobi
/// orthogonalisation of the columns. Returned in descending order; the count
/// equals the number of columns (trailing zeros for rank-deficient input).
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut m = a.clone();
    let rows = m.rows();
    let cols = m.cols();
    let scale = m.max_abs().max(1e-300);
    let eps = 1e-14;

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut hpp = 0.0f64;
                let mut hqq = 0.0f64;
                let mut hpq = Complex64::new(0.0, 0.0);
                for i in 0..rows {
                    let cp = m[(i, p)];
                    let cq = m[(i, q)];
                    hpp += cp.norm_sqr();
                    hqq += cq.norm_sqr();
                    hpq += cp.conj() * cq;
                }
                let r = hpq.norm();
                if r <= eps * (hpp * hqq).sqrt().max(eps * scale * scale) {
                    continue;
                }
                rotated = true;
                let phase = hpq / r;
                let t = jacobi_tangent(hpp, hqq, r);
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..rows {
                    let cp = m[(i, p)];
                    let cq = m[(i, q)];
                    m[(i, p)] = cp * phase * c + cq * s;
                    m[(i, q)] = -cp * phase * s + cq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..cols)
        .map(|j| {
            (0..rows)
                .map(|i| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}
