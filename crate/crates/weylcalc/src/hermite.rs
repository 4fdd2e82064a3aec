//! Finite-section Weyl quantization in a graded Hermite-function basis.
//!
//! A polynomial symbol of degree `m` couples Hermite degrees differing by at
//! most `m`, so the matrix of `a^w` from the degree-`<= N` block into the
//! degree-`<= N+m` block is exact (up to double rounding): no truncation
//! artifact enters. Quantization is built by peeling one coordinate at a
//! time from each monomial,
//!
//! ```text
//! (x_j b)^w  = X_j b^w  - (i/2) (d_{xi_j} b)^w
//! (xi_j b)^w = P_j b^w  + (i/2) (d_{x_j} b)^w
//! ```
//!
//! which is forced by the sharp-product identities `x_j # b = x_j b +
//! (i/2) d_{xi_j} b` and `xi_j # b = xi_j b - (i/2) d_{x_j} b`.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::multi_index::MultiIndex;
use crate::symbol::PolySymbol;
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Truncated Hermite basis `{ h_alpha : |alpha| <= max_degree }` in `d`
/// variables, ordered by total degree and then ascending lexicographically.
/// The ordering is fixed so dumped matrices are stable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct HermiteBasisSpec {
    pub dim: usize,
    pub max_degree: usize,
}

impl HermiteBasisSpec {
    pub fn new(dim: usize, max_degree: usize) -> Self {
        assert!(dim >= 1);
        HermiteBasisSpec { dim, max_degree }
    }

    /// Basis size `C(max_degree + dim, dim)`.
    pub fn size(&self) -> usize {
        let mut num = 1usize;
        let mut den = 1usize;
        for i in 0..self.dim {
            num *= self.max_degree + self.dim - i;
            den *= i + 1;
        }
        num / den
    }

    /// All basis multi-indices in the canonical graded-lex order.
    pub fn enumerate(&self) -> Vec<MultiIndex> {
        let mut out = Vec::with_capacity(self.size());
        for deg in 0..=self.max_degree {
            crate::multi_index::for_each_composition(deg as u32, self.dim, &mut |c| {
                out.push(MultiIndex(c.to_vec()));
            });
        }
        out
    }

    pub fn indexer(&self) -> HashMap<MultiIndex, usize> {
        self.enumerate()
            .into_iter()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect()
    }
}

/// A complex dense matrix between two truncated Hermite bases.
#[derive(Clone, Debug)]
pub struct HermiteOperator {
    pub domain: HermiteBasisSpec,
    pub codomain: HermiteBasisSpec,
    pub matrix: CMatrix,
}

impl HermiteOperator {
    pub fn zero(domain: HermiteBasisSpec, codomain: HermiteBasisSpec) -> Self {
        HermiteOperator {
            domain,
            codomain,
            matrix: CMatrix::zeros(codomain.size(), domain.size()),
        }
    }

    /// Identity viewed as the inclusion of the domain block into the
    /// (possibly larger) codomain block.
    pub fn inclusion(domain: HermiteBasisSpec, codomain: HermiteBasisSpec) -> Self {
        assert!(codomain.max_degree >= domain.max_degree && codomain.dim == domain.dim);
        let mut op = Self::zero(domain, codomain);
        for i in 0..domain.size() {
            op.matrix[(i, i)] = Complex64::new(1.0, 0.0);
        }
        op
    }

    /// Zero-pad the codomain up to `new_degree`. Valid because the graded
    /// ordering makes a smaller basis an index prefix of a larger one.
    pub fn embed_codomain(&self, new_degree: usize) -> HermiteOperator {
        assert!(new_degree >= self.codomain.max_degree);
        let cod = HermiteBasisSpec::new(self.codomain.dim, new_degree);
        let mut out = HermiteOperator::zero(self.domain, cod);
        for i in 0..self.matrix.rows() {
            for j in 0..self.matrix.cols() {
                out.matrix[(i, j)] = self.matrix[(i, j)];
            }
        }
        out
    }

    pub fn add(&self, other: &HermiteOperator) -> HermiteOperator {
        assert_eq!(self.domain, other.domain);
        let target = self.codomain.max_degree.max(other.codomain.max_degree);
        let a = self.embed_codomain(target);
        let b = other.embed_codomain(target);
        HermiteOperator {
            domain: a.domain,
            codomain: a.codomain,
            matrix: a.matrix.add(&b.matrix),
        }
    }

    pub fn scale(&self, s: Complex64) -> HermiteOperator {
        HermiteOperator {
            domain: self.domain,
            codomain: self.codomain,
            matrix: self.matrix.scale(s),
        }
    }

    /// Operator composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &HermiteOperator) -> HermiteOperator {
        assert_eq!(self.domain, other.codomain, "composition shape mismatch");
        HermiteOperator {
            domain: other.domain,
            codomain: self.codomain,
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    /// Square restriction to rows and columns of degree `<= N_dom - margin`,
    /// the truncation-artifact-free region for a degree-`margin` symbol.
    pub fn interior_block(&self, margin: usize) -> Result<HermiteOperator> {
        if margin > self.domain.max_degree {
            return Err(Error::MarginTooLarge {
                margin,
                max_degree: self.domain.max_degree,
            });
        }
        let spec = HermiteBasisSpec::new(self.domain.dim, self.domain.max_degree - margin);
        let k = spec.size();
        Ok(HermiteOperator {
            domain: spec,
            codomain: spec,
            matrix: self.matrix.leading_block(k, k),
        })
    }

    /// CSV dump: one header line `dim,N_dom,N_cod,ordering`, then one row per
    /// codomain index holding interleaved `re,im` pairs.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{},{},{},graded-lex",
            self.domain.dim, self.domain.max_degree, self.codomain.max_degree
        );
        for i in 0..self.matrix.rows() {
            for j in 0..self.matrix.cols() {
                if j > 0 {
                    s.push(',');
                }
                let z = self.matrix[(i, j)];
                let _ = write!(s, "{},{}", z.re, z.im);
            }
            s.push('\n');
        }
        s
    }
}

/// Multiply a ladder matrix from the left without materialising it:
/// `out = L_k . b` where `L_k` is `X_k` (`is_x`) or `P_k`, mapping the
/// codomain of `b` one degree up. Ladder coefficients:
///
/// ```text
/// X_k h_a = sqrt(a_k/2) h_{a-e_k} + sqrt((a_k+1)/2) h_{a+e_k}
/// P_k h_a = -i sqrt(a_k/2) h_{a-e_k} + i sqrt((a_k+1)/2) h_{a+e_k}
/// ```
fn ladder_apply(b: &HermiteOperator, k: usize, is_x: bool) -> HermiteOperator {
    let mid = b.codomain;
    let out_spec = HermiteBasisSpec::new(mid.dim, mid.max_degree + 1);
    let mut out = HermiteOperator::zero(b.domain, out_spec);
    let mid_basis = mid.enumerate();
    let out_index = out_spec.indexer();
    let cols = b.matrix.cols();
    for (ai, alpha) in mid_basis.iter().enumerate() {
        let ak = alpha.0[k];
        // h_{alpha+e_k} branch
        let up = {
            let mut v = alpha.clone();
            v.0[k] += 1;
            v
        };
        let w_up = (((ak + 1) as f64) / 2.0).sqrt();
        let c_up = if is_x {
            Complex64::new(w_up, 0.0)
        } else {
            Complex64::new(0.0, w_up)
        };
        let ui = out_index[&up];
        for j in 0..cols {
            let v = b.matrix[(ai, j)];
            if v.norm_sqr() != 0.0 {
                out.matrix[(ui, j)] += c_up * v;
            }
        }
        // h_{alpha-e_k} branch
        if ak > 0 {
            let mut down = alpha.clone();
            down.0[k] -= 1;
            let w_dn = ((ak as f64) / 2.0).sqrt();
            let c_dn = if is_x {
                Complex64::new(w_dn, 0.0)
            } else {
                Complex64::new(0.0, -w_dn)
            };
            let di = out_index[&down];
            for j in 0..cols {
                let v = b.matrix[(ai, j)];
                if v.norm_sqr() != 0.0 {
                    out.matrix[(di, j)] += c_dn * v;
                }
            }
        }
    }
    out
}

/// Position and momentum matrices `X_1..X_d, P_1..P_d` from degree `<= N`
/// into degree `<= N+1`.
pub fn ladder_matrices(spec: HermiteBasisSpec) -> (Vec<HermiteOperator>, Vec<HermiteOperator>) {
    let id = HermiteOperator::inclusion(spec, spec);
    let xs = (0..spec.dim).map(|k| ladder_apply(&id, k, true)).collect();
    let ps = (0..spec.dim).map(|k| ladder_apply(&id, k, false)).collect();
    (xs, ps)
}

/// Weyl quantization of `a` on the truncated basis: a matrix from degree
/// `<= N` into degree `<= N + deg(a)`, exact on every entry.
pub fn quantize(a: &PolySymbol, spec: HermiteBasisSpec) -> Result<HermiteOperator> {
    if a.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: a.dim(),
        });
    }
    let mut memo: HashMap<(Vec<u32>, Vec<u32>), HermiteOperator> = HashMap::new();
    let target_deg = spec.max_degree + a.degree() as usize;
    let mut acc = HermiteOperator::zero(spec, HermiteBasisSpec::new(spec.dim, target_deg));
    for (mono, coeff) in a.terms() {
        let q = quantize_monomial(&mono.x.0, &mono.xi.0, spec, &mut memo);
        acc = acc.add(&q.scale(coeff.to_complex64()));
    }
    Ok(acc)
}

fn quantize_monomial(
    x_exp: &[u32],
    xi_exp: &[u32],
    spec: HermiteBasisSpec,
    memo: &mut HashMap<(Vec<u32>, Vec<u32>), HermiteOperator>,
) -> HermiteOperator {
    let key = (x_exp.to_vec(), xi_exp.to_vec());
    if let Some(op) = memo.get(&key) {
        return op.clone();
    }
    let deg: u32 = x_exp.iter().sum::<u32>() + xi_exp.iter().sum::<u32>();
    let op = if deg == 0 {
        HermiteOperator::inclusion(spec, spec)
    } else if let Some(j) = x_exp.iter().position(|&e| e > 0) {
        // x_j * b with b = x^{g-e_j} xi^{mu}
        let mut bx = x_exp.to_vec();
        bx[j] -= 1;
        let b = quantize_monomial(&bx, xi_exp, spec, memo);
        let mut out = ladder_apply(&b, j, true);
        if xi_exp[j] > 0 {
            // -(i/2) (d_{xi_j} b)^w, with d_{xi_j} b = mu_j * x^{g-e_j} xi^{mu-e_j}
            let mut dxi = xi_exp.to_vec();
            dxi[j] -= 1;
            let d = quantize_monomial(&bx, &dxi, spec, memo);
            let factor = Complex64::new(0.0, -0.5 * xi_exp[j] as f64);
            out = out.add(&d.scale(factor));
        }
        out
    } else {
        let j = xi_exp.iter().position(|&e| e > 0).expect("deg > 0");
        // xi_j * b with b = xi^{mu-e_j}; no x_j factor remains in b here
        // because the x-branch above strips x exponents first.
        let mut bxi = xi_exp.to_vec();
        bxi[j] -= 1;
        let b = quantize_monomial(x_exp, &bxi, spec, memo);
        ladder_apply(&b, j, false)
        // (i/2) (d_{x_j} b)^w would enter if b still carried x_j; the
        // peeling order guarantees x_exp[j] = 0 at this point.
    };
    memo.insert(key, op.clone());
    op
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{sharp_power_iterated, star};

    #[test]
    fn basis_sizes_and_order() {
        let spec = HermiteBasisSpec::new(2, 3);
        assert_eq!(spec.size(), 10);
        let basis = spec.enumerate();
        assert_eq!(basis.len(), 10);
        assert_eq!(basis[0], MultiIndex(vec![0, 0]));
        assert_eq!(basis[1], MultiIndex(vec![0, 1]));
        assert_eq!(basis[2], MultiIndex(vec![1, 0]));
        // degrees never decrease along the ordering
        for w in basis.windows(2) {
            assert!(w[0].order() <= w[1].order());
        }
    }

    #[test]
    fn ladder_entries_d1() {
        let spec = HermiteBasisSpec::new(1, 4);
        let (xs, ps) = ladder_matrices(spec);
        let x = &xs[0];
        // <h_0 | X h_1> = sqrt(1/2)
        assert!((x.matrix[(0, 1)].re - (0.5f64).sqrt()).abs() < 1e-15);
        assert!((x.matrix[(1, 0)].re - (0.5f64).sqrt()).abs() < 1e-15);
        let p = &ps[0];
        for k in 0..4usize {
            let expect = (((k + 1) as f64) / 2.0).sqrt();
            assert!((p.matrix[(k, k + 1)] - Complex64::new(0.0, -expect)).norm() < 1e-15);
            assert!((p.matrix[(k + 1, k)] - Complex64::new(0.0, expect)).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_commutator_interior() {
        let spec = HermiteBasisSpec::new(1, 20);
        let (xs, ps) = ladder_matrices(spec);
        let up = HermiteBasisSpec::new(1, 21);
        let (xs2, ps2) = ladder_matrices(up);
        let xp = xs2[0].compose(&ps[0]);
        let px = ps2[0].compose(&xs[0]);
        let comm = xp.add(&px.scale(Complex64::new(-1.0, 0.0)));
        let interior = comm.interior_block(2).unwrap();
        let n = interior.matrix.rows();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((interior.matrix[(i, j)] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quantize_constant_is_inclusion() {
        let spec = HermiteBasisSpec::new(2, 5);
        let one = PolySymbol::one(2);
        let q = quantize(&one, spec).unwrap();
        assert_eq!(q.codomain.max_degree, 5);
        for i in 0..q.matrix.rows() {
            for j in 0..q.matrix.cols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((q.matrix[(i, j)].re - expect).abs() < 1e-15);
                assert!(q.matrix[(i, j)].im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn harmonic_oscillator_diagonal() {
        for d in 1..=2usize {
            let n = if d == 1 { 24 } else { 10 };
            let spec = HermiteBasisSpec::new(d, n);
            let h = PolySymbol::harmonic_oscillator(d);
            let q = quantize(&h, spec).unwrap();
            let interior = q.interior_block(2).unwrap();
            let basis = interior.domain.enumerate();
            for (i, alpha) in basis.iter().enumerate() {
                for j in 0..basis.len() {
                    let expect = if i == j {
                        alpha.0.iter().map(|&a| 2.0 * a as f64 + 1.0).sum::<f64>()
                    } else {
                        0.0
                    };
                    assert!(
                        (interior.matrix[(i, j)] - Complex64::new(expect, 0.0)).norm() <= 1e-12,
                        "d={d} entry ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn quantized_square_matches_sharp_square() {
        let spec = HermiteBasisSpec::new(1, 30);
        let h = PolySymbol::harmonic_oscillator(1);
        let h2 = sharp_power_iterated(&h, 2); // (x^2+xi^2)^2 - 1
        let q2 = quantize(&h2, spec).unwrap().interior_block(4).unwrap();
        let basis = q2.domain.enumerate();
        for (i, alpha) in basis.iter().enumerate() {
            let expect = (2.0 * alpha.0[0] as f64 + 1.0).powi(2);
            assert!((q2.matrix[(i, i)] - Complex64::new(expect, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn star_compatibility_random_pair() {
        use crate::rational::GaussianRational as GR;
        let d = 1;
        let spec = HermiteBasisSpec::new(d, 24);
        let a = PolySymbol::var_x(d, 0)
            .mul(&PolySymbol::var_xi(d, 0))
            .add(&PolySymbol::var_x(d, 0).scale(&GR::from_ratio(1, 3)));
        let b = PolySymbol::var_xi(d, 0)
            .pow(2)
            .add(&PolySymbol::var_x(d, 0).scale(&GR::new(
                num_rational::BigRational::new(1.into(), 2.into()),
                num_rational::BigRational::new(1.into(), 5.into()),
            )));
        let ab = star(&a, &b).unwrap();
        let margin = (a.degree() + b.degree()) as usize;

        let qa_up = quantize(&a, HermiteBasisSpec::new(d, 24 + b.degree() as usize)).unwrap();
        let qb = quantize(&b, spec).unwrap();
        let product = qa_up.compose(&qb);
        let direct = quantize(&ab, spec).unwrap();

        let pi = product.interior_block(margin).unwrap();
        let di = direct.interior_block(margin).unwrap();
        let diff = pi.matrix.sub(&di.matrix).max_abs();
        assert!(diff <= 1e-10, "interior mismatch {diff}");
    }

    #[test]
    fn real_symbol_hermitian_interior() {
        let spec = HermiteBasisSpec::new(1, 20);
        let a = PolySymbol::harmonic_oscillator(1)
            .mul(&PolySymbol::harmonic_oscillator(1))
            .add(&PolySymbol::var_x(1, 0));
        let q = quantize(&a, spec).unwrap();
        let interior = q.interior_block(a.degree() as usize).unwrap();
        assert!(interior.matrix.hermitian_defect() < 1e-12);
    }

    #[test]
    fn interior_margin_errors() {
        let spec = HermiteBasisSpec::new(1, 4);
        let q = quantize(&PolySymbol::one(1), spec).unwrap();
        assert!(q.interior_block(0).is_ok());
        assert!(q.interior_block(5).is_err());
    }

    #[test]
    fn csv_header() {
        let spec = HermiteBasisSpec::new(1, 2);
        let q = quantize(&PolySymbol::var_x(1, 0), spec).unwrap();
        let csv = q.to_csv();
        assert!(csv.starts_with("1,2,3,graded-lex\n"));
        assert_eq!(csv.lines().count(), 1 + q.matrix.rows());
    }
}
