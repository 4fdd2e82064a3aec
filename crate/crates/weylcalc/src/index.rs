//! Fredholm index of elliptic matrix polynomial symbols, two ways: the
//! boundary integral of `tr (A^{-1} dA)^{2d-1}` over a large sphere, and an
//! operator-truncation oracle counting kernel dimensions of the quantized
//! rectangular sections.
//!
//! Orientation. The integral is taken over the sphere oriented as the
//! boundary of the ball in `R^{2d}` carrying the volume form
//! `dxi_1 ^ dx_1 ^ ... ^ dxi_d ^ dx_d`. Internally the coordinates are
//! reordered to `u = (xi_1, x_1, ..., xi_d, x_d)`, where that form is the
//! standard one, and the boundary gets the outward-normal-first induced
//! orientation. The sign convention is locked by the creation-operator
//! test: the symbol `x - i xi` in d = 1 must come out with index -1.

use crate::error::{Error, Result};
use crate::hermite::{quantize, HermiteBasisSpec};
use crate::linalg::{singular_values, CMatrix};
use crate::matrix_symbol::MatrixSymbol;
use crate::multi_index::MultiIndex;
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Boundary sphere `|w| = radius` of the ball in `R^{2d}`, with the paper's
/// fixed orientation baked into the integration routine.
#[derive(Clone, Copy, Debug)]
pub struct OrientedSphere {
    pub phase_dim: usize,
    pub radius: f64,
}

impl OrientedSphere {
    pub fn new(phase_dim: usize, radius: f64) -> Self {
        assert!(radius > 0.0);
        OrientedSphere { phase_dim, radius }
    }

    /// Sphere dimension `2d - 1`.
    pub fn sphere_dim(&self) -> usize {
        2 * self.phase_dim - 1
    }
}

/// Ellipticity evidence on the sphere `|w| = s` and the shell `s..2s`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EllipticityReport {
    pub radius: f64,
    pub min_abs_det: f64,
    pub max_condition: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Sample `|det A|` on the sphere of radius `s` and on a coarse shell out to
/// `2s`. Report-only; the index operations refuse to run on a failing
/// report.
pub fn check_ellipticity(
    a: &MatrixSymbol,
    radius: f64,
    sample_count: usize,
    seed: u64,
) -> EllipticityReport {
    let d = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_det = f64::INFINITY;
    let mut max_cond = 0.0f64;
    let mut samples = 0usize;

    let mut visit = |w: &[f64]| {
        let m = a.eval(w);
        let det = m.det().norm();
        min_det = min_det.min(det);
        let sv = singular_values(&m);
        let smax = sv.first().copied().unwrap_or(0.0);
        let smin = sv.last().copied().unwrap_or(0.0);
        if smin > 0.0 {
            max_cond = max_cond.max(smax / smin);
        } else {
            max_cond = f64::INFINITY;
        }
        samples += 1;
    };

    // Structured sphere nodes plus random shell points.
    for node in crate::quadrature::sphere_rule(2 * d - 1, 0).iter().take(sample_count) {
        let w: Vec<f64> = node.point.iter().map(|c| c * radius).collect();
        visit(&w);
    }
    for _ in 0..sample_count {
        let mut w: Vec<f64> = (0..2 * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = w.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
        let r = radius * rng.gen_range(1.0..2.0);
        for c in w.iter_mut() {
            *c *= r / norm;
        }
        visit(&w);
    }

    EllipticityReport {
        radius,
        min_abs_det: min_det,
        max_condition: max_cond,
        samples,
        passed: min_det >= 1e-10,
    }
}

/// Value of the index integral with its nearest integer.
#[derive(Clone, Debug, serde::Serialize)]
pub struct IndexIntegral {
    pub value: f64,
    pub rounded: i64,
    pub distance: f64,
}

/// Map the reordered coordinates `u = (xi_1, x_1, ..., xi_d, x_d)` back to
/// the symbol's native `w = (x_1..x_d, xi_1..xi_d)`.
fn u_to_w(u: &[f64]) -> Vec<f64> {
    let d = u.len() / 2;
    let mut w = vec![0.0; 2 * d];
    for j in 0..d {
        w[d + j] = u[2 * j]; // xi_j
        w[j] = u[2 * j + 1]; // x_j
    }
    w
}

/// Partial derivative of `A` along the `u_k` direction, as symbols.
fn partials_in_u(a: &MatrixSymbol) -> Result<Vec<MatrixSymbol>> {
    let d = a.dim();
    let n = a.size();
    let mut out = Vec::with_capacity(2 * d);
    for k in 0..2 * d {
        let (xo, xio) = if k % 2 == 0 {
            // u_{2j} = xi_{j+1}
            (MultiIndex::zeros(d), MultiIndex::unit(d, k / 2))
        } else {
            // u_{2j+1} = x_{j+1}
            (MultiIndex::unit(d, k / 2), MultiIndex::zeros(d))
        };
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(a.entry(i, j).derive(&xo, &xio, false)?);
            }
        }
        out.push(MatrixSymbol::new(n, d, entries)?);
    }
    Ok(out)
}

/// Hyperspherical point and tangent frame on the radius-`s` sphere in
/// `R^{q+1}`: returns `u(t)` and the `q` columns `du/dt_j`.
fn sphere_point_and_frame(angles: &[f64], s: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let q = angles.len();
    let dim = q + 1;
    let mut u = vec![0.0; dim];
    // u_i = s (prod_{k<i} sin t_k) cos t_i for i < q; u_q = s prod sin.
    let mut sin_prefix = vec![1.0; dim + 1];
    for k in 0..q {
        sin_prefix[k + 1] = sin_prefix[k] * angles[k].sin();
    }
    for i in 0..q {
        u[i] = s * sin_prefix[i] * angles[i].cos();
    }
    u[q] = s * sin_prefix[q];

    let mut frame = Vec::with_capacity(q);
    for j in 0..q {
        let mut v = vec![0.0; dim];
        for i in 0..dim {
            v[i] = if i < q {
                if j > i {
                    0.0
                } else if j == i {
                    -s * sin_prefix[i] * angles[i].sin()
                } else {
                    // replace sin t_j by cos t_j inside the prefix
                    let mut p = 1.0;
                    for k in 0..i {
                        p *= if k == j { angles[k].cos() } else { angles[k].sin() };
                    }
                    s * p * angles[i].cos()
                }
            } else {
                let mut p = 1.0;
                for k in 0..q {
                    p *= if k == j { angles[k].cos() } else { angles[k].sin() };
                }
                s * p
            };
        }
        frame.push(v);
    }
    (u, frame)
}

/// Determinant sign of the real matrix with columns `[n | v_1 .. v_q]`:
/// positive when the frame is positively oriented for the outward-normal
/// convention. Near-degenerate frames return 0 and are skipped; the form
/// vanishes on them by multilinearity.
fn orientation_sign(normal: &[f64], frame: &[Vec<f64>]) -> f64 {
    let n = normal.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n] = normal[i];
        for (j, col) in frame.iter().enumerate() {
            m[i * n + j + 1] = col[i];
        }
    }
    // LU determinant with partial pivoting.
    let mut det = 1.0f64;
    let mut scale = 0.0f64;
    for v in m.iter() {
        scale = scale.max(v.abs());
    }
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            if m[r * n + col].abs() > best {
                best = m[r * n + col].abs();
                pivot = r;
            }
        }
        if best <= 1e-12 * scale.max(1.0) {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        det *= m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            for j in col..n {
                m[r * n + j] -= f * m[col * n + j];
            }
        }
    }
    det.signum()
}

/// `sum_{pi} sgn(pi) tr(H_{pi(1)} ... H_{pi(q)})` over all permutations of
/// the tangent-direction matrices: the alternating form evaluated on the
/// frame.
fn alternating_trace(h: &[CMatrix]) -> Complex64 {
    let q = h.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut perm = Vec::with_capacity(q);
    let mut used = vec![false; q];
    fn rec(
        perm: &mut Vec<usize>,
        used: &mut [bool],
        h: &[CMatrix],
        acc: &mut Complex64,
    ) {
        let q = h.len();
        if perm.len() == q {
            // parity by inversion count
            let mut inv = 0usize;
            for i in 0..q {
                for j in i + 1..q {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
            let mut prod = h[perm[0]].clone();
            for &i in perm.iter().skip(1) {
                prod = prod.matmul(&h[i]);
            }
            *acc += prod.trace() * sign;
            return;
        }
        for i in 0..q {
            if !used[i] {
                used[i] = true;
                perm.push(i);
                rec(perm, used, h, acc);
                perm.pop();
                used[i] = false;
            }
        }
    }
    rec(&mut perm, &mut used, h, &mut acc);
    acc
}

fn index_integral_at_level(
    a: &MatrixSymbol,
    sphere: OrientedSphere,
    level: usize,
) -> Result<Complex64> {
    let d = a.dim();
    let s = sphere.radius;
    let partials = partials_in_u(a)?;
    let q = 2 * d - 1;

    if d == 1 {
        // Circle case: u = (xi, x) = s (cos t, sin t) is the positively
        // oriented parameterisation; the integrand is tr(A^{-1} dA/dt).
        let m = 256 << level;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            let u = [s * t.cos(), s * t.sin()];
            let du = [-s * t.sin(), s * t.cos()];
            let w = u_to_w(&u);
            let inv = a.eval(&w).inverse().map_err(|_| Error::Ellipticity {
                min_det: 0.0,
                radius: s,
            })?;
            let da = partials[0]
                .eval(&w)
                .scale(Complex64::new(du[0], 0.0))
                .add(&partials[1].eval(&w).scale(Complex64::new(du[1], 0.0)));
            acc += inv.matmul(&da).trace();
        }
        return Ok(acc * Complex64::new(2.0 * std::f64::consts::PI / m as f64, 0.0));
    }

    // Product Gauss rule over the polar angles, uniform over the azimuth.
    let n_theta = 12 << level;
    let n_phi = 24 << level;
    let (gn, gw) = gauss_legendre(n_theta);
    let thetas: Vec<(f64, f64)> = gn
        .iter()
        .zip(&gw)
        .map(|(&t, &w)| {
            (
                (t + 1.0) * std::f64::consts::FRAC_PI_2,
                w * std::f64::consts::FRAC_PI_2,
            )
        })
        .collect();
    let wphi = 2.0 * std::f64::consts::PI / n_phi as f64;

    // All angle tuples (theta_1, .., theta_{q-1}, phi).
    let mut tuples: Vec<(Vec<f64>, f64)> = vec![(vec![], 1.0)];
    for _ in 0..q - 1 {
        let mut next = Vec::with_capacity(tuples.len() * thetas.len());
        for (angles, weight) in &tuples {
            for &(theta, w) in &thetas {
                let mut a2 = angles.clone();
                a2.push(theta);
                next.push((a2, weight * w));
            }
        }
        tuples = next;
    }

    let mut acc = Complex64::new(0.0, 0.0);
    for (angles, weight) in &tuples {
        for k in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            let mut full = angles.clone();
            full.push(phi);
            let (u, frame) = sphere_point_and_frame(&full, s);
            let normal: Vec<f64> = u.iter().map(|c| c / s).collect();
            let sign = orientation_sign(&normal, &frame);
            if sign == 0.0 {
                continue;
            }
            let w = u_to_w(&u);
            let inv = a.eval(&w).inverse().map_err(|_| Error::Ellipticity {
                min_det: 0.0,
                radius: s,
            })?;
            // H_j = A^{-1} (directional derivative of A along frame_j).
            let h: Vec<CMatrix> = frame
                .iter()
                .map(|v| {
                    let mut da = CMatrix::zeros(a.size(), a.size());
                    for (k, dk) in partials.iter().enumerate() {
                        if v[k] != 0.0 {
                            da = da.add(&dk.eval(&w).scale(Complex64::new(v[k], 0.0)));
                        }
                    }
                    inv.matmul(&da)
                })
                .collect();
            acc += alternating_trace(&h) * (sign * weight * wphi);
        }
    }
    Ok(acc)
}

/// The Fedosov-Hoermander boundary integral
/// `-(d-1)! / ((2d-1)! (2 pi i)^d) * int tr (A^{-1} dA)^{2d-1}` over the
/// oriented sphere, with two-level quadrature agreement required.
pub fn index_integral(a: &MatrixSymbol, sphere: OrientedSphere, level: usize) -> Result<IndexIntegral> {
    let report = check_ellipticity(a, sphere.radius, 64, 0x5eed);
    if !report.passed {
        return Err(Error::Ellipticity {
            min_det: report.min_abs_det,
            radius: sphere.radius,
        });
    }
    let d = a.dim();
    let coarse = finish_integral(index_integral_at_level(a, sphere, level)?, d);
    let fine = finish_integral(index_integral_at_level(a, sphere, level + 1)?, d);
    let gap = (fine - coarse).abs();
    if gap > 1e-4 {
        return Err(Error::QuadratureNonConvergence { gap, limit: 1e-4 });
    }
    let rounded = fine.round() as i64;
    Ok(IndexIntegral {
        value: fine,
        rounded,
        distance: (fine - rounded as f64).abs(),
    })
}

fn finish_integral(raw: Complex64, d: usize) -> f64 {
    // -(d-1)! / ((2d-1)! (2 pi i)^d)
    let fact = |n: usize| -> f64 { (1..=n).map(|k| k as f64).product::<f64>().max(1.0) };
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let c = Complex64::new(-fact(d - 1) / fact(2 * d - 1), 0.0) / two_pi_i.powu(d as u32);
    (c * raw).re
}

/// Kernel dimension of the rectangular Hermite section of `a^w` from degree
/// `<= n_cut` into degree `<= n_cut + deg a`, all `n` symbol rows tensored.
fn section_kernel_dim(a: &MatrixSymbol, n_cut: usize) -> Result<usize> {
    let d = a.dim();
    let n = a.size();
    let m = a.max_degree() as usize;
    let dom = HermiteBasisSpec::new(d, n_cut);
    let cod = HermiteBasisSpec::new(d, n_cut + m);
    let (rows_blk, cols_blk) = (cod.size(), dom.size());
    let mut big = CMatrix::zeros(n * rows_blk, n * cols_blk);
    for bi in 0..n {
        for bj in 0..n {
            let q = quantize(a.entry(bi, bj), dom)?.embed_codomain(n_cut + m);
            for i in 0..rows_blk {
                for j in 0..cols_blk {
                    big[(bi * rows_blk + i, bj * cols_blk + j)] = q.matrix[(i, j)];
                }
            }
        }
    }
    let sv = singular_values(&big);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(n * cols_blk);
    }
    let tau = 1e-8 * smax;
    for &s in &sv {
        if s > tau / 10.0 && s < 10.0 * tau {
            return Err(Error::AmbiguousThreshold { sigma: s, tau });
        }
    }
    Ok(sv.iter().filter(|&&s| s <= tau).count())
}

/// Operator-level index `dim ker a^w - dim ker (a^w)^*` from truncated
/// sections, with the adjoint realised as the quantization of the conjugate
/// transpose symbol. The value must stabilise between `n_cut` and
/// `n_cut + 4` or an error is returned.
pub fn operator_index_oracle(a: &MatrixSymbol, n_cut: usize) -> Result<i64> {
    let at = a.adjoint_symbol();
    let ind_at = |n: usize| -> Result<i64> {
        Ok(section_kernel_dim(a, n)? as i64 - section_kernel_dim(&at, n)? as i64)
    };
    let first = ind_at(n_cut)?;
    let second = ind_at(n_cut + 4)?;
    if first != second {
        return Err(Error::UnstableIndex { first, second });
    }
    Ok(first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::GaussianRational as GR;
    use crate::symbol::PolySymbol;
    use std::ops::Neg;

    /// `(x - i xi)^k` as a 1x1 matrix symbol in d = 1.
    fn annihilator_power(k: u32) -> MatrixSymbol {
        let x = PolySymbol::var_x(1, 0);
        let xi = PolySymbol::var_xi(1, 0);
        let base = x.add(&xi.scale(&GR::imaginary_unit().neg()));
        MatrixSymbol::scalar(base.pow(k))
    }

    #[test]
    fn ellipticity_reports() {
        let id = MatrixSymbol::scalar(PolySymbol::one(1));
        let rep = check_ellipticity(&id, 1.0, 32, 1);
        assert!(rep.passed);
        assert!((rep.min_abs_det - 1.0).abs() < 1e-12);

        let a = annihilator_power(1);
        let rep = check_ellipticity(&a, 1.0, 32, 1);
        assert!(rep.passed);
        // |x - i xi| = |w| = 1 on the unit circle, larger on the shell.
        assert!((rep.min_abs_det - 1.0).abs() < 1e-9);

        // A symbol vanishing on the sphere is flagged.
        let h = PolySymbol::harmonic_oscillator(1)
            .sub(&PolySymbol::one(1)); // |w|^2 - 1 vanishes at |w| = 1
        let rep = check_ellipticity(&MatrixSymbol::scalar(h), 1.0, 32, 1);
        assert!(!rep.passed);
    }

    #[test]
    fn identity_symbol_zero_index() {
        for d in 1..=2usize {
            let id = MatrixSymbol::scalar_times_identity(&PolySymbol::one(d), 2);
            let v = index_integral(&id, OrientedSphere::new(d, 1.0), 0).unwrap();
            assert_eq!(v.rounded, 0);
            assert!(v.value.abs() < 1e-10);
            assert_eq!(operator_index_oracle(&id, 8).unwrap(), 0);
        }
    }

    #[test]
    fn creation_symbol_winding() {
        // (x - i xi)^w = sqrt(2) * creation operator: kernel 0, cokernel 1.
        let a = annihilator_power(1);
        let v = index_integral(&a, OrientedSphere::new(1, 1.0), 0).unwrap();
        assert!((v.value + 1.0).abs() < 1e-6, "integral {}", v.value);
        assert_eq!(operator_index_oracle(&a, 20).unwrap(), -1);
    }

    #[test]
    fn winding_powers() {
        for k in 1..=3u32 {
            let a = annihilator_power(k);
            let v = index_integral(&a, OrientedSphere::new(1, 1.0), 0).unwrap();
            assert!(
                (v.value + k as f64).abs() < 1e-6,
                "k={k} integral {}",
                v.value
            );
            assert_eq!(operator_index_oracle(&a, 24).unwrap(), -(k as i64));
        }
    }

    #[test]
    fn adjoint_flips_sign() {
        let a = annihilator_power(2);
        let at = a.adjoint_symbol();
        assert_eq!(operator_index_oracle(&at, 24).unwrap(), 2);
        let v = index_integral(&at, OrientedSphere::new(1, 1.0), 0).unwrap();
        assert!((v.value - 2.0).abs() < 1e-6);
    }

    #[test]
    fn radius_independence() {
        let a = annihilator_power(1);
        let v1 = index_integral(&a, OrientedSphere::new(1, 1.0), 0).unwrap();
        let v2 = index_integral(&a, OrientedSphere::new(1, 2.0), 0).unwrap();
        assert!((v1.value - v2.value).abs() < 1e-6);
    }

    #[test]
    fn block_diag_additivity() {
        let a = annihilator_power(1);
        let b = annihilator_power(2);
        let ab = MatrixSymbol::block_diag(&a, &b).unwrap();
        assert_eq!(operator_index_oracle(&ab, 24).unwrap(), -3);
        let v = index_integral(&ab, OrientedSphere::new(1, 1.0), 0).unwrap();
        assert!((v.value + 3.0).abs() < 1e-6);
    }

    #[test]
    fn d2_bott_symbol_integral_matches_oracle() {
        // [[x1 + i x2, -(xi1 - i xi2)], [xi1 + i xi2, x1 - i x2]]
        let d = 2;
        let x1 = PolySymbol::var_x(d, 0);
        let x2 = PolySymbol::var_x(d, 1);
        let xi1 = PolySymbol::var_xi(d, 0);
        let xi2 = PolySymbol::var_xi(d, 1);
        let i = GR::imaginary_unit();
        let a = MatrixSymbol::new(
            2,
            d,
            vec![
                x1.add(&x2.scale(&i)),
                xi1.sub(&xi2.scale(&i)).neg(),
                xi1.add(&xi2.scale(&i)),
                x1.sub(&x2.scale(&i)),
            ],
        )
        .unwrap();
        let oracle = operator_index_oracle(&a, 10).unwrap();
        let integral = index_integral(&a, OrientedSphere::new(d, 1.0), 0).unwrap();
        assert!(
            (integral.value - oracle as f64).abs() <= 1e-3,
            "integral {} vs oracle {oracle}",
            integral.value
        );
        assert_eq!(integral.rounded, oracle);
    }

    #[test]
    fn scalar_d2_index_vanishes() {
        // tr(A^{-1} dA)^3 = 0 identically for 1x1 symbols: 1-forms square
        // to zero. The quadrature must respect the antisymmetry.
        let d = 2;
        let a = PolySymbol::one(d).add(&PolySymbol::harmonic_oscillator(d));
        let v = index_integral(&MatrixSymbol::scalar(a), OrientedSphere::new(d, 1.5), 0).unwrap();
        assert!(v.value.abs() < 1e-10, "got {}", v.value);
    }
}
