//! Spectra of quantized operators, exact counting functions, and the
//! asymptotic prediction formulas they are compared against.

use crate::error::{Error, Result};
use crate::hermite::{quantize, HermiteBasisSpec, HermiteOperator};
use crate::linalg::{jacobi_hermitian, CMatrix};
use crate::quadrature::sphere_rule;
use crate::rational::rational_to_f64;
use crate::symbol::PolySymbol;
use crate::weights::{associated_inverse, EntireSeries, WeightSequence};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

/// Ascending eigenvalues with multiplicity, plus how many of the leading
/// ones are certified free of truncation artifacts.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub source: String,
    pub trusted_count: usize,
}

impl SpectrumResult {
    /// `N(lambda)` over the trusted eigenvalues only.
    pub fn counting(&self, lambda: f64) -> usize {
        self.eigenvalues[..self.trusted_count]
            .iter()
            .take_while(|&&e| e <= lambda)
            .count()
    }

    pub fn trusted_ceiling(&self) -> Option<f64> {
        if self.trusted_count == 0 {
            None
        } else {
            Some(self.eigenvalues[self.trusted_count - 1])
        }
    }
}

/// Full spectrum of a Hermitian interior block by the cyclic Jacobi scheme.
/// When `smaller` is given (the same operator truncated at a lower cutoff),
/// eigenvalues stable to 1e-6 relative between the runs are marked trusted;
/// otherwise every eigenvalue is marked trusted and the caller takes
/// responsibility for the ceiling.
pub fn eigensolve_hermitian(
    op: &HermiteOperator,
    smaller: Option<&HermiteOperator>,
    source: &str,
) -> Result<SpectrumResult> {
    let a = &op.matrix;
    if !a.is_square() {
        return Err(Error::Shape("eigensolve needs a square interior block".into()));
    }
    let (eigs, v) = jacobi_hermitian(a, 1e-10)?;

    // Residual check ||A v - l v|| <= 1e-8 ||A|| per pair.
    let n = a.rows();
    let av = a.matmul(&v);
    let scale = a.inf_norm().max(1e-300);
    for j in 0..n {
        let mut res = 0.0f64;
        for i in 0..n {
            res += (av[(i, j)] - v[(i, j)] * eigs[j]).norm_sqr();
        }
        let res = res.sqrt();
        if res > 1e-8 * scale {
            return Err(Error::Shape(format!(
                "eigenpair residual {res:.3e} exceeds 1e-8 * ||A|| = {:.3e}",
                1e-8 * scale
            )));
        }
    }

    let trusted_count = match smaller {
        None => eigs.len(),
        Some(small_op) => {
            let (small_eigs, _) = jacobi_hermitian(&small_op.matrix, 1e-10)?;
            let mut k = 0usize;
            while k < eigs.len() && k < small_eigs.len() {
                let denom = eigs[k].abs().max(1.0);
                if (eigs[k] - small_eigs[k]).abs() > 1e-6 * denom {
                    break;
                }
                k += 1;
            }
            k
        }
    };

    Ok(SpectrumResult {
        eigenvalues: eigs,
        source: source.to_string(),
        trusted_count,
    })
}

/// Quantize a real symbol, restrict to the artifact-free interior, and
/// eigensolve; trust is certified against a run at cutoff `n - refine`.
pub fn spectrum_of_symbol(
    a: &PolySymbol,
    dim: usize,
    n: usize,
    refine: usize,
) -> Result<SpectrumResult> {
    let margin = a.degree() as usize;
    let big = quantize(a, HermiteBasisSpec::new(dim, n))?.interior_block(margin)?;
    let small = quantize(a, HermiteBasisSpec::new(dim, n.saturating_sub(refine)))?
        .interior_block(margin)?;
    eigensolve_hermitian(&big, Some(&small), &format!("{a} @ N={n}"))
}

/// `sum_{n <= N} M^n / Mhat_n` with `M` the interior block of `a^w`. `N` is
/// chosen adaptively: the scalar majorant `||M||^n / Mhat_n` must fall below
/// 1e-10 of the accumulated majorant, with the geometric tail check, before
/// the budget `max_terms` runs out.
pub fn operator_series_matrix(
    a: &PolySymbol,
    p: &EntireSeries,
    spec: HermiteBasisSpec,
    max_terms: usize,
) -> Result<HermiteOperator> {
    let margin = a.degree() as usize;
    let m = quantize(a, spec)?.interior_block(margin)?;
    let dim = m.matrix.rows();
    let norm_bound = m.matrix.inf_norm();

    let mut sum = CMatrix::identity(dim);
    let mut power = CMatrix::identity(dim);
    let mut majorant_term = 1.0f64;
    let mut majorant_sum = 1.0f64;
    let mut done = false;
    for n in 1..=max_terms.min(p.weights.pmax()) {
        power = power.matmul(&m.matrix);
        let coeff = (-(p.weights.ln(n))).exp();
        sum = sum.add(&power.scale(Complex64::new(coeff, 0.0)));
        let prev = majorant_term;
        majorant_term = (n as f64 * norm_bound.max(1e-300).ln() - p.weights.ln(n)).exp();
        majorant_sum += majorant_term;
        if majorant_term < 0.5 * prev && 2.0 * majorant_term < 1e-10 * majorant_sum {
            done = true;
            break;
        }
    }
    if !done {
        return Err(Error::TailBudget {
            budget: max_terms,
        });
    }
    Ok(HermiteOperator {
        domain: m.domain,
        codomain: m.codomain,
        matrix: sum,
    })
}

/// Exact number of harmonic-oscillator eigenvalues `sum_j (2 a_j + 1) <= lambda`
/// by graded enumeration of the multiplicities.
pub fn lattice_count_harmonic(d: usize, lambda: f64) -> u64 {
    if lambda < d as f64 {
        return 0;
    }
    let kmax = ((lambda - d as f64) / 2.0).floor() as u64;
    let mut count = 0u64;
    for k in 0..=kmax {
        count += multiplicity(d, k);
    }
    count
}

/// Multiplicity of the level `d + 2k`: weak compositions of `k` into `d` parts.
pub fn multiplicity(d: usize, k: u64) -> u64 {
    let b = crate::multi_index::binomial(k + d as u64 - 1, d as u64 - 1);
    big_to_u64(&b)
}

/// Closed-form count `C(K + d, d)`; cross-check for small dimensions.
pub fn lattice_count_closed(d: usize, lambda: f64) -> u64 {
    if lambda < d as f64 {
        return 0;
    }
    let k = ((lambda - d as f64) / 2.0).floor() as u64;
    big_to_u64(&crate::multi_index::binomial(k + d as u64, d as u64))
}

fn big_to_u64(b: &BigInt) -> u64 {
    use num_traits::ToPrimitive;
    b.to_u64().expect("count fits in u64 at desk scale")
}

/// The Weyl-law constant `c = pi / ((2 pi)^{d+1} d) * int_{S^{2d-1}} Phi^{-2d}`,
/// by product-angle Gauss quadrature with two-level agreement.
pub fn weyl_constant(d: usize, phi: &dyn Fn(&[f64]) -> f64, level: usize) -> Result<f64> {
    let compute = |lvl: usize| -> f64 {
        let rule = sphere_rule(2 * d - 1, lvl);
        rule.iter()
            .map(|node| node.weight * phi(&node.point).powi(-(2 * d as i32)))
            .sum::<f64>()
    };
    let coarse = compute(level);
    let fine = compute(level + 1);
    let gap = (fine - coarse).abs() / fine.abs().max(1e-300);
    if gap > 1e-4 {
        return Err(Error::QuadratureNonConvergence { gap, limit: 1e-4 });
    }
    let pi = std::f64::consts::PI;
    Ok(pi / ((2.0 * pi).powi(d as i32 + 1) * d as f64) * fine)
}

/// The two asymptotic counting predictions, side by side:
/// `c (P^{-1}(lambda))^{2d/m}` and `c (Mhat^{-1}(ln lambda))^{2d/m}`.
pub fn predicted_counting(
    p: &EntireSeries,
    c: f64,
    d: usize,
    m: u32,
    lambda: f64,
) -> Result<(f64, f64)> {
    let expo = 2.0 * d as f64 / m as f64;
    let p_inv = p.inverse(lambda)?;
    let assoc_inv = associated_inverse(&p.weights, lambda.ln())?;
    Ok((c * p_inv.powf(expo), c * assoc_inv.powf(expo)))
}

/// `lambda_j ~ P((j/c)^{m/2d})`.
pub fn predicted_eigenvalue(p: &EntireSeries, c: f64, d: usize, m: u32, j: u64) -> Result<f64> {
    let arg = ((j as f64) / c).powf(m as f64 / (2.0 * d as f64));
    p.eval(arg)
}

/// Largest lattice level `mu = d + 2k` with `P(mu) <= lambda`, certified by
/// exact rational enclosures of `P` at the integer levels around the f64
/// estimate. Returns `None` when even the ground level exceeds `lambda`.
pub fn certified_lattice_cut(
    p: &EntireSeries,
    d: usize,
    lambda: &BigRational,
) -> Result<Option<u64>> {
    let lambda_f = rational_to_f64(lambda);
    let ground = d as u64;
    // Certified comparison P(mu) <= lambda at an integer level.
    let le = |mu: u64| -> Result<bool> {
        let (lo, hi) = p.eval_exact_bounds(&BigRational::from_integer(BigInt::from(mu)))?;
        if &hi <= lambda {
            Ok(true)
        } else if &lo > lambda {
            Ok(false)
        } else {
            Err(Error::Config(format!(
                "lambda falls inside the P({mu}) enclosure; tighten the series tolerance"
            )))
        }
    };
    if !le(ground)? {
        return Ok(None);
    }
    // f64 estimate, then walk to the certified boundary.
    let mu_est = p.inverse(lambda_f.max(1.0)).unwrap_or(ground as f64);
    let mut k = if mu_est <= ground as f64 {
        0i64
    } else {
        ((mu_est - ground as f64) / 2.0).floor() as i64
    };
    k = k.max(0);
    // Move down until P(level(k)) <= lambda.
    while k > 0 && !le(ground + 2 * k as u64)? {
        k -= 1;
    }
    // Move up while the next level still satisfies P <= lambda.
    while le(ground + 2 * (k + 1) as u64)? {
        k += 1;
    }
    Ok(Some(ground + 2 * k as u64))
}

/// Evidence report for the Hermite-coefficient decay bound
/// `sup_j |c_j| exp(Mtilde(j^{1/(2d)} / K))`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DecayReport {
    pub sup: f64,
    pub attained_at: usize,
    /// true when the running sup is still being pushed up in the last half
    /// of the range, i.e. the quantity diverges on the available evidence
    pub growing: bool,
}

pub fn coeff_decay_diagnostic(
    coeffs: &[Complex64],
    d: usize,
    mtilde: &WeightSequence,
    k: f64,
) -> Result<DecayReport> {
    let mut sup = 0.0f64;
    let mut attained_at = 0usize;
    for (j, c) in coeffs.iter().enumerate() {
        let rho = (j as f64).powf(1.0 / (2.0 * d as f64)) / k;
        let weight = if rho <= 0.0 {
            0.0
        } else {
            crate::weights::associated_function(mtilde, rho)?
        };
        let v = c.norm() * weight.exp();
        if v > sup {
            sup = v;
            attained_at = j;
        }
    }
    Ok(DecayReport {
        sup,
        attained_at,
        growing: attained_at >= coeffs.len() / 2 && coeffs.len() > 4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::WeightSequence;

    fn diag_op(vals: &[f64]) -> HermiteOperator {
        let n = vals.len();
        let spec = HermiteBasisSpec::new(1, n - 1);
        let mut op = HermiteOperator::zero(spec, spec);
        for (i, &v) in vals.iter().enumerate() {
            op.matrix[(i, i)] = Complex64::new(v, 0.0);
        }
        op
    }

    #[test]
    fn eigensolve_diagonal() {
        let op = diag_op(&[1.0, 3.0, 5.0]);
        let s = eigensolve_hermitian(&op, None, "diag(1,3,5)").unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 3.0, 5.0]);
        assert_eq!(s.trusted_count, 3);
        assert_eq!(s.counting(4.0), 2);
    }

    #[test]
    fn eigensolve_rejects_nonhermitian() {
        let spec = HermiteBasisSpec::new(1, 1);
        let mut op = HermiteOperator::zero(spec, spec);
        op.matrix[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(eigensolve_hermitian(&op, None, "bad").is_err());
    }

    #[test]
    fn harmonic_spectrum_d2_multiplicities() {
        let h = PolySymbol::harmonic_oscillator(2);
        let s = spectrum_of_symbol(&h, 2, 16, 4).unwrap();
        // eigenvalues 2, 4, 4, 6, 6, 6, ...
        let expect = [2.0, 4.0, 4.0, 6.0, 6.0, 6.0, 8.0, 8.0, 8.0, 8.0];
        assert!(s.trusted_count >= expect.len());
        for (i, e) in expect.iter().enumerate() {
            assert!(
                (s.eigenvalues[i] - e).abs() < 1e-9,
                "eig[{i}] = {} vs {e}",
                s.eigenvalues[i]
            );
        }
    }

    #[test]
    fn quartic_spectrum_squares() {
        // (x^2+xi^2)^2 - 1 quantizes to diag((2k+1)^2) on the interior.
        let h = PolySymbol::harmonic_oscillator(1);
        let quartic = crate::symbol::sharp_power_iterated(&h, 2);
        let s = spectrum_of_symbol(&quartic, 1, 30, 4).unwrap();
        for k in 0..10usize {
            let expect = ((2 * k + 1) * (2 * k + 1)) as f64;
            assert!((s.eigenvalues[k] - expect).abs() < 1e-8 * expect);
        }
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice_count_harmonic(1, 7.0), 4);
        assert_eq!(lattice_count_harmonic(2, 6.0), 6);
        assert_eq!(lattice_count_harmonic(2, 1.9), 0);
        for d in 1..=2usize {
            for lam in [0.5, 3.0, 7.5, 20.0, 101.0] {
                assert_eq!(
                    lattice_count_harmonic(d, lam),
                    lattice_count_closed(d, lam),
                    "d={d} lambda={lam}"
                );
            }
        }
        // d=1: N(lambda)/(lambda/2) -> 1
        let lam = 1e4;
        let ratio = lattice_count_harmonic(1, lam) as f64 / (lam / 2.0);
        assert!((ratio - 1.0).abs() < 0.05);
    }

    #[test]
    fn weyl_constant_reference_values() {
        let one = |_: &[f64]| 1.0;
        let c1 = weyl_constant(1, &one, 1).unwrap();
        assert!((c1 - 0.5).abs() < 1e-6 * 0.5);
        let c2 = weyl_constant(2, &one, 1).unwrap();
        assert!((c2 - 0.125).abs() < 1e-6 * 0.125);
    }

    #[test]
    fn weyl_constant_homogeneity() {
        let t = 1.7f64;
        let phi = move |_: &[f64]| t;
        let c = weyl_constant(2, &phi, 0).unwrap();
        assert!((c - 0.125 * t.powi(-4)).abs() < 1e-8);
    }

    #[test]
    fn series_operator_diagonal_matches_p() {
        let seq = WeightSequence::example313(1.0, 2.0, 2, 200);
        let p = EntireSeries::new(seq, 1e-16);
        let h = PolySymbol::harmonic_oscillator(1);
        let op = operator_series_matrix(&h, &p, HermiteBasisSpec::new(1, 24), 100).unwrap();
        // Off-diagonal exactly small, diagonal = P(2k+1).
        let n = op.matrix.rows();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(op.matrix[(i, j)].norm() <= 1e-10);
                }
            }
            let expect = p.eval((2 * i + 1) as f64).unwrap();
            assert!(
                (op.matrix[(i, i)].re - expect).abs() <= 1e-8 * expect,
                "k={i}"
            );
        }
    }

    #[test]
    fn certified_cut_brackets_inverse() {
        let seq = WeightSequence::example313(1.0, 2.0, 2, 200);
        let p = EntireSeries::new(seq, 1e-16);
        // lambda = P(10.3) sits between levels 9 and 11.
        let lam = p.eval(10.3).unwrap();
        let cut = certified_lattice_cut(&p, 1, &BigRational::from_float(lam).unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(cut, 9);
        // below the ground level
        let small = BigRational::from_float(0.5).unwrap();
        assert!(certified_lattice_cut(&p, 1, &small).unwrap().is_none());
    }

    #[test]
    fn decay_diagnostic_cases() {
        let seq = WeightSequence::factorial_power(2.0, 120);
        // ground state only
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 30];
        coeffs[0] = Complex64::new(1.0, 0.0);
        let rep = coeff_decay_diagnostic(&coeffs, 1, &seq, 2.0).unwrap();
        assert!((rep.sup - 1.0).abs() < 1e-12);
        assert!(!rep.growing);

        // fast decay dominates the weight
        let fast: Vec<Complex64> = (0..60)
            .map(|j| Complex64::new((-(j as f64)).exp(), 0.0))
            .collect();
        let rep = coeff_decay_diagnostic(&fast, 1, &seq, 2.0).unwrap();
        assert!(!rep.growing, "sup attained at {}", rep.attained_at);

        // 1/(j+1) decay loses to any unbounded weight: the sup keeps being
        // pushed up at the far end of the range, reported as growth.
        let slow: Vec<Complex64> = (0..4000)
            .map(|j| Complex64::new(1.0 / (j as f64 + 1.0), 0.0))
            .collect();
        let rep = coeff_decay_diagnostic(&slow, 1, &seq, 1.0).unwrap();
        assert!(rep.growing, "sup attained at {}", rep.attained_at);
    }
}
