//! Weight sequences, their defining conditions, associated functions, and
//! the entire series `P(l) = sum_n l^n / M_n` with monotone inversion.
//!
//! Sequences are held as `ln M_p` for the floating path and, when the
//! generator produces rationals (integer exponents, rational h), also as
//! exact big rationals. The exact path is what certifies the counting-law
//! comparisons downstream.

use crate::error::{Error, Result};
use crate::rational::ln_rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

/// How a weight sequence was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    /// `M_p = p!^s`
    FactorialPower { s: f64 },
    /// `M_n = h^{-n} n^{s n m}` (with `M_0 = 1`)
    Example313 { h: f64, s: f64, m: u32 },
    /// Explicit positive values `M_0..`
    Explicit { values: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct WeightSequence {
    ln_values: Vec<f64>,
    exact: Option<Vec<BigRational>>,
    spec: WeightSpec,
}

impl WeightSequence {
    pub fn factorial_power(s: f64, pmax: usize) -> Self {
        let mut ln_values = Vec::with_capacity(pmax + 1);
        let mut ln_fact = 0.0f64;
        ln_values.push(0.0);
        for p in 1..=pmax {
            ln_fact += (p as f64).ln();
            ln_values.push(s * ln_fact);
        }
        let exact = if s >= 0.0 && s.fract() == 0.0 {
            let si = s as u32;
            let mut v = Vec::with_capacity(pmax + 1);
            for p in 0..=pmax {
                let f = crate::multi_index::factorial(p as u32);
                v.push(BigRational::from_integer(f.pow(si)));
            }
            Some(v)
        } else {
            None
        };
        WeightSequence {
            ln_values,
            exact,
            spec: WeightSpec::FactorialPower { s },
        }
    }

    pub fn example313(h: f64, s: f64, m: u32, pmax: usize) -> Self {
        let mut ln_values = vec![0.0f64];
        for n in 1..=pmax {
            let nf = n as f64;
            ln_values.push(-(nf) * h.ln() + s * nf * (m as f64) * nf.ln());
        }
        // Exact when s*m is a positive integer and h is a small rational.
        let sm = s * m as f64;
        let exact = if sm > 0.0 && sm.fract() == 0.0 && h > 0.0 && (1.0 / h).fract() == 0.0 {
            let smi = sm as u32;
            let hinv = BigInt::from((1.0 / h) as i64);
            let mut v = vec![BigRational::one()];
            for n in 1..=pmax {
                let base = BigInt::from(n);
                let val = BigRational::from_integer(hinv.pow(n as u32) * base.pow(smi * n as u32));
                v.push(val);
            }
            Some(v)
        } else {
            None
        };
        WeightSequence {
            ln_values,
            exact,
            spec: WeightSpec::Example313 { h, s, m },
        }
    }

    pub fn explicit(values: &[f64]) -> Result<Self> {
        for (p, &v) in values.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonpositiveWeight { p });
            }
        }
        Ok(WeightSequence {
            ln_values: values.iter().map(|v| v.ln()).collect(),
            exact: None,
            spec: WeightSpec::Explicit {
                values: values.to_vec(),
            },
        })
    }

    pub fn explicit_exact(values: Vec<BigRational>) -> Result<Self> {
        for (p, v) in values.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::NonpositiveWeight { p });
            }
        }
        Ok(WeightSequence {
            ln_values: values.iter().map(ln_rational).collect(),
            exact: Some(values),
            spec: WeightSpec::Explicit { values: vec![] },
        })
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn pmax(&self) -> usize {
        self.ln_values.len() - 1
    }

    pub fn ln(&self, p: usize) -> f64 {
        self.ln_values[p]
    }

    pub fn exact(&self, p: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|v| &v[p])
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// Result of scanning the weight-sequence conditions over `p <= pmax`.
/// (M.2) and (M.3)' are asymptotic statements, so those fields carry
/// finite-range evidence, never a categorical verdict.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConditionReport {
    pub pmax: usize,
    /// log-convexity `M_p^2 <= M_{p-1} M_{p+1}`
    pub m1: bool,
    /// smallest `H` with `M_{p+q} <= H^{p+q} M_p M_q` on the range (c0 = 1)
    pub m2_smallest_h: f64,
    /// partial sum of `M_{p-1}/M_p` and whether the ratios `M_p/M_{p-1}`
    /// are monotone increasing on the range
    pub m3p_partial_sum: f64,
    pub m3p_ratios_monotone: bool,
    pub m3p_finite_range_only: bool,
    /// `(M_p/p!)^2 <= (M_{p-1}/(p-1)!) (M_{p+1}/(p+1)!)`
    pub m4: bool,
    /// the power-series domination inequality, when parameters were supplied
    pub stk: Option<StkReport>,
}

/// `C0^{n-k} M_n / (nm)!^s >= M_k / (km)!^s` for all `n >= k` in range.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StkReport {
    pub s: f64,
    pub m: u32,
    pub c0: f64,
    pub holds: bool,
    /// smallest constant making the inequality hold on the scanned range
    pub minimal_c0: f64,
}

const LN_SLACK: f64 = 1e-9;

pub fn check_conditions(
    seq: &WeightSequence,
    pmax: usize,
    stk_params: Option<(f64, u32, f64)>,
) -> Result<ConditionReport> {
    if pmax < 2 || pmax > seq.pmax() {
        return Err(Error::Config(format!(
            "pmax must be in 2..={}, got {pmax}",
            seq.pmax()
        )));
    }

    // (M.1): exact when rationals are available, ln with slack otherwise.
    let mut m1 = true;
    for p in 1..pmax {
        if let Some(v) = seq.exact.as_ref() {
            if &v[p] * &v[p] > &v[p - 1] * &v[p + 1] {
                m1 = false;
                break;
            }
        } else if 2.0 * seq.ln(p) > seq.ln(p - 1) + seq.ln(p + 1) + LN_SLACK {
            m1 = false;
            break;
        }
    }

    // (M.2): smallest feasible H on the range with c0 = 1.
    let mut ln_h = 0.0f64;
    for p in 0..=pmax {
        for q in 0..=(pmax - p) {
            if p + q == 0 {
                continue;
            }
            let need = (seq.ln(p + q) - seq.ln(p) - seq.ln(q)) / (p + q) as f64;
            ln_h = ln_h.max(need);
        }
    }

    // (M.3)': partial sums of M_{p-1}/M_p and ratio monotonicity.
    let mut partial = 0.0f64;
    let mut ratios_monotone = true;
    let mut prev_ratio = f64::NEG_INFINITY;
    for p in 1..=pmax {
        partial += (seq.ln(p - 1) - seq.ln(p)).exp();
        let ratio = seq.ln(p) - seq.ln(p - 1); // ln m_p
        if ratio < prev_ratio - LN_SLACK {
            ratios_monotone = false;
        }
        prev_ratio = ratio;
    }

    // (M.4): log-convexity of M_p / p!.
    let mut m4 = true;
    for p in 1..pmax {
        let lnf = |k: usize| -> f64 {
            ln_rational(&BigRational::from_integer(crate::multi_index::factorial(
                k as u32,
            )))
        };
        let lhs = 2.0 * (seq.ln(p) - lnf(p));
        let rhs = (seq.ln(p - 1) - lnf(p - 1)) + (seq.ln(p + 1) - lnf(p + 1));
        if let Some(v) = seq.exact.as_ref() {
            let f = |k: usize| BigRational::from_integer(crate::multi_index::factorial(k as u32));
            let l = (&v[p] / f(p)) * (&v[p] / f(p));
            let r = (&v[p - 1] / f(p - 1)) * (&v[p + 1] / f(p + 1));
            if l > r {
                m4 = false;
                break;
            }
        } else if lhs > rhs + LN_SLACK {
            m4 = false;
            break;
        }
    }

    let stk = stk_params.map(|(s, m, c0)| {
        // ln of the normalised sequence M_n / (nm)!^s.
        let g: Vec<f64> = (0..=pmax)
            .map(|n| {
                seq.ln(n)
                    - s * ln_rational(&BigRational::from_integer(crate::multi_index::factorial(
                        (n as u32) * m,
                    )))
            })
            .collect();
        let mut holds = true;
        let mut min_ln_c0 = 0.0f64;
        for k in 0..=pmax {
            for n in k..=pmax {
                if n == k {
                    continue;
                }
                let need = (g[k] - g[n]) / (n - k) as f64;
                min_ln_c0 = min_ln_c0.max(need);
                if (n - k) as f64 * c0.ln() + g[n] < g[k] - LN_SLACK {
                    holds = false;
                }
            }
        }
        StkReport {
            s,
            m,
            c0,
            holds,
            minimal_c0: min_ln_c0.exp(),
        }
    });

    Ok(ConditionReport {
        pmax,
        m1,
        m2_smallest_h: ln_h.exp(),
        m3p_partial_sum: partial,
        m3p_ratios_monotone: ratios_monotone,
        m3p_finite_range_only: true,
        m4,
        stk,
    })
}

/// The associated function `M(rho) = sup_p ln_+ (rho^p / M_p)`. The
/// maximiser must land strictly inside the stored range, otherwise the
/// finite sup is not certified to equal the true one.
pub fn associated_function(seq: &WeightSequence, rho: f64) -> Result<f64> {
    assert!(rho > 0.0, "associated function needs rho > 0");
    let pmax = seq.pmax();
    let ln_rho = rho.ln();
    let mut best = 0.0f64; // p = 0 term is ln_+ 1 = 0
    let mut best_p = 0usize;
    for p in 0..=pmax {
        let v = p as f64 * ln_rho - seq.ln(p);
        if v > best {
            best = v;
            best_p = p;
        }
    }
    if best_p == pmax {
        return Err(Error::SupAtPmax { pmax });
    }
    Ok(best)
}

/// Inverse of the associated function: the smallest `rho` with
/// `M(rho) >= y`, found by doubling and bisection.
pub fn associated_inverse(seq: &WeightSequence, y: f64) -> Result<f64> {
    assert!(y >= 0.0);
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 1e-12f64;
    let mut hi = 1.0f64;
    let mut guard = 0;
    while associated_function(seq, hi)? < y {
        hi *= 2.0;
        guard += 1;
        if guard > 4000 {
            return Err(Error::TailBudget { budget: 4000 });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if associated_function(seq, mid)? >= y {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(hi)
}

/// The entire series `P(l) = sum_n l^n / M_n` for a weight sequence with
/// `M_0 = 1`; strictly increasing on `[0, inf)` with `P(0) = 1`.
#[derive(Clone, Debug)]
pub struct EntireSeries {
    pub weights: WeightSequence,
    pub rel_tol: f64,
}

impl EntireSeries {
    pub fn new(weights: WeightSequence, rel_tol: f64) -> Self {
        EntireSeries { weights, rel_tol }
    }

    /// Floating evaluation with max-term scaling; the truncation point is
    /// chosen adaptively so the first omitted term is below `rel_tol` times
    /// the partial sum.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        assert!(lambda >= 0.0, "series is evaluated for lambda >= 0");
        if lambda == 0.0 {
            return Ok(1.0);
        }
        let ln_l = lambda.ln();
        let pmax = self.weights.pmax();
        let ln_terms = |n: usize| n as f64 * ln_l - self.weights.ln(n);
        // Locate the largest term, then sum rescaled by it.
        let mut peak = f64::NEG_INFINITY;
        let mut peak_n = 0usize;
        for n in 0..=pmax {
            let t = ln_terms(n);
            if t > peak {
                peak = t;
                peak_n = n;
            }
        }
        let mut acc = 0.0f64;
        let mut converged = false;
        for n in 0..=pmax {
            let t = (ln_terms(n) - peak).exp();
            acc += t;
            if n > peak_n && t < self.rel_tol * acc {
                converged = true;
                break;
            }
        }
        if !converged && ln_terms(pmax) - peak > (self.rel_tol).ln() + acc.ln() {
            return Err(Error::TailBudget { budget: pmax });
        }
        Ok(acc * peak.exp())
    }

    /// `ln P(lambda)`, safe for values far beyond f64 range.
    pub fn eval_ln(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let ln_l = lambda.ln();
        let pmax = self.weights.pmax();
        let ln_terms = |n: usize| n as f64 * ln_l - self.weights.ln(n);
        let mut peak = f64::NEG_INFINITY;
        let mut peak_n = 0;
        for n in 0..=pmax {
            let t = ln_terms(n);
            if t > peak {
                peak = t;
                peak_n = n;
            }
        }
        if peak_n == pmax {
            return Err(Error::SupAtPmax { pmax });
        }
        let mut acc = 0.0f64;
        for n in 0..=pmax {
            let t = (ln_terms(n) - peak).exp();
            acc += t;
            if n > peak_n && t < self.rel_tol * acc {
                break;
            }
        }
        Ok(peak + acc.ln())
    }

    /// Certified rational enclosure `[lo, hi]` of `P(lambda)` for exact
    /// weights. The upper bound uses the geometric tail estimate, valid once
    /// consecutive term ratios drop below 1/2 (checked, not assumed).
    pub fn eval_exact_bounds(&self, lambda: &BigRational) -> Result<(BigRational, BigRational)> {
        let weights = self
            .weights
            .exact
            .as_ref()
            .ok_or_else(|| Error::Config("exact evaluation needs exact weights".into()))?;
        assert!(!lambda.is_negative());
        let pmax = self.weights.pmax();
        let mut sum = BigRational::one(); // n = 0 term
        let mut term = BigRational::one();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for n in 1..=pmax {
            let new_term = &term * lambda * (&weights[n - 1] / &weights[n]);
            // Stop once the term is both under the geometric threshold and
            // negligible relative to the sum.
            let ratio_ok = &new_term <= &(&term * &half);
            term = new_term;
            sum += &term;
            if ratio_ok && &term * BigRational::from_integer(BigInt::from(10u64.pow(18))) < sum {
                // Certify that the weight ratios keep growing past n, so the
                // geometric bound extends to the whole tail.
                let mut monotone = true;
                for k in n..pmax {
                    if &weights[k] * &weights[k] > &weights[k - 1] * &weights[k + 1] {
                        monotone = false;
                        break;
                    }
                }
                if monotone {
                    let hi = &sum + &term + &term;
                    return Ok((sum, hi));
                }
            }
        }
        Err(Error::TailBudget { budget: pmax })
    }

    /// The unique `l >= 0` with `P(l) = y`, for `y >= 1`, by doubling plus
    /// bisection to relative tolerance 1e-12.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if y < 1.0 {
            return Err(Error::InverseDomain { y });
        }
        if y == 1.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0f64;
        let mut guard = 0;
        while self.eval(hi)? < y {
            hi *= 2.0;
            guard += 1;
            if guard > 2000 {
                return Err(Error::TailBudget { budget: 2000 });
            }
        }
        let mut lo = 0.0f64;
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid)? >= y {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-12 * hi.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `y P'(y) / P(y)` with `P'` taken termwise; evaluated on a grid. The
    /// ratio grows without bound exactly when the series has infinite order.
    pub fn growth_ratio(&self, grid: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(grid.len());
        for &y in grid {
            if y == 0.0 {
                out.push(0.0);
                continue;
            }
            // y P'(y) = sum n y^n / M_n: reuse the scaled summation.
            let ln_y = y.ln();
            let pmax = self.weights.pmax();
            let ln_terms = |n: usize| n as f64 * ln_y - self.weights.ln(n);
            let mut peak = f64::NEG_INFINITY;
            for n in 0..=pmax {
                peak = peak.max(ln_terms(n));
            }
            let mut p_acc = 0.0f64;
            let mut dp_acc = 0.0f64;
            for n in 0..=pmax {
                let t = (ln_terms(n) - peak).exp();
                p_acc += t;
                dp_acc += n as f64 * t;
            }
            out.push(dp_acc / p_acc);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rational_to_f64;

    #[test]
    fn conditions_on_factorial_power() {
        let seq = WeightSequence::factorial_power(2.0, 50);
        let rep = check_conditions(&seq, 50, Some((2.0, 1, 2.0))).unwrap();
        assert!(rep.m1);
        assert!(rep.m4);
        assert!(rep.m3p_ratios_monotone);
        assert!(rep.m3p_finite_range_only);
        // H = 2^s asymptotically for p!^s; the range maximum stays below.
        assert!(rep.m2_smallest_h <= 4.0 + 1e-9);
        let stk = rep.stk.unwrap();
        // p!^2 with m = 1: M_n/(n)!^2 = 1, so any c0 >= 1 works.
        assert!(stk.holds);
        assert!(stk.minimal_c0 <= 1.0 + 1e-9);
    }

    #[test]
    fn stk_for_example313() {
        let seq = WeightSequence::example313(1.0, 2.0, 2, 40);
        assert!(seq.has_exact());
        let rep = check_conditions(&seq, 40, Some((2.0, 2, 4.0))).unwrap();
        let stk = rep.stk.unwrap();
        // The binding pair is (n,k) = (1,0): C0 >= (1*2)!^2 = 4.
        assert!(stk.holds, "c0 = 4 satisfies the inequality on range");
        assert!((stk.minimal_c0 - 4.0).abs() < 1e-6);
        // The spec's c0 = 1 is infeasible at (1,0); the checker reports it.
        let rep1 = check_conditions(&seq, 40, Some((2.0, 2, 1.0))).unwrap();
        assert!(!rep1.stk.unwrap().holds);
    }

    #[test]
    fn corrupted_sequence_fails_m1() {
        let mut vals: Vec<f64> = (0..=20u32)
            .map(|p| {
                let f = crate::multi_index::factorial(p);
                rational_to_f64(&BigRational::from_integer(f.clone() * f))
            })
            .collect();
        vals[10] *= 1e6; // a dip in log-convexity on one side
        let seq = WeightSequence::explicit(&vals).unwrap();
        let rep = check_conditions(&seq, 20, None).unwrap();
        assert!(!rep.m1);
    }

    #[test]
    fn nonpositive_weights_rejected() {
        assert!(matches!(
            WeightSequence::explicit(&[1.0, 0.0, 2.0]),
            Err(Error::NonpositiveWeight { p: 1 })
        ));
    }

    #[test]
    fn associated_function_examples() {
        let seq = WeightSequence::factorial_power(1.0, 60);
        assert_eq!(associated_function(&seq, 1.0).unwrap(), 0.0);

        // p!^s has M(rho) comparable to s rho^{1/s}; band checked on a grid.
        let seq2 = WeightSequence::factorial_power(2.0, 400);
        for &rho in &[10.0, 100.0, 1000.0, 10000.0] {
            let m = associated_function(&seq2, rho).unwrap();
            let scaled = m / rho.sqrt();
            assert!(scaled > 0.9 && scaled < 2.1, "rho={rho} scaled={scaled}");
        }
    }

    #[test]
    fn associated_function_pmax_guard() {
        let seq = WeightSequence::factorial_power(2.0, 10);
        // Maximiser for huge rho runs into the cutoff.
        assert!(matches!(
            associated_function(&seq, 1e30),
            Err(Error::SupAtPmax { .. })
        ));
    }

    #[test]
    fn ex313_associated_function_band() {
        // M_n = n^{sn} with s = 2: e^{-s} exp(s y^{1/s} / e) <= exp(M(y))
        // <= e^s exp(s y^{1/s} / e) for y >= e^s.
        let s = 2.0f64;
        let seq = WeightSequence::example313(1.0, s, 1, 2000);
        for &y in &[8.0, 20.0, 100.0, 1000.0] {
            assert!(y >= s.exp());
            let m = associated_function(&seq, y).unwrap();
            let center = s * y.powf(1.0 / s) / std::f64::consts::E;
            assert!(m >= center - s - 1e-9, "y={y}");
            assert!(m <= center + s + 1e-9, "y={y}");
        }
    }

    #[test]
    fn series_eval_basics() {
        let seq = WeightSequence::factorial_power(2.0, 200);
        let p = EntireSeries::new(seq, 1e-16);
        assert_eq!(p.eval(0.0).unwrap(), 1.0);
        // sum 1/(n!)^2 = I_0(2)
        let bessel_i0_2 = 2.2795853023360673;
        assert!((p.eval(1.0).unwrap() - bessel_i0_2).abs() < 1e-12);
        // strict monotonicity
        let mut prev = 0.0;
        for k in 1..=40 {
            let v = p.eval(k as f64 * 0.7).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn series_eval_exact_bounds() {
        let seq = WeightSequence::factorial_power(2.0, 200);
        let p = EntireSeries::new(seq, 1e-16);
        let (lo, hi) = p
            .eval_exact_bounds(&BigRational::from_integer(BigInt::one()))
            .unwrap();
        let lo_f = rational_to_f64(&lo);
        let hi_f = rational_to_f64(&hi);
        let bessel_i0_2 = 2.2795853023360673;
        assert!(lo_f <= bessel_i0_2 && bessel_i0_2 <= hi_f);
        assert!(hi_f - lo_f < 1e-15);
    }

    #[test]
    fn series_inverse_round_trip() {
        let seq = WeightSequence::example313(1.0, 2.0, 2, 300);
        let p = EntireSeries::new(seq, 1e-16);
        assert_eq!(p.inverse(1.0).unwrap(), 0.0);
        assert!(matches!(p.inverse(0.5), Err(Error::InverseDomain { .. })));
        for &y in &[2.0, 10.0, 1000.0] {
            let l = p.inverse(y).unwrap();
            let back = p.eval(l).unwrap();
            assert!(
                (back - y).abs() <= 1e-10 * y,
                "y={y} back={back} rel={}",
                (back - y).abs() / y
            );
        }
    }

    #[test]
    fn ex313_inverse_asymptotic() {
        // M^{-1}(ln l) ~ (1/h) (e ln l / (sm))^{sm}; the series inverse
        // tracks it within 5% once ln l is large enough.
        let s = 2.0;
        let m = 2u32;
        let h = 1.0;
        let seq = WeightSequence::example313(h, s, m, 4000);
        let sm = s * m as f64;
        for &ln_l in &[2000.0f64, 6000.0, 12000.0] {
            let rho = associated_inverse(&seq, ln_l).unwrap();
            let predicted = (std::f64::consts::E * ln_l / sm).powf(sm) / h;
            let ratio = rho / predicted;
            assert!(
                (ratio - 1.0).abs() < 0.05,
                "ln_l={ln_l} ratio={ratio}"
            );
        }
    }

    #[test]
    fn growth_ratio_properties() {
        let seq = WeightSequence::factorial_power(2.0, 400);
        let p = EntireSeries::new(seq, 1e-16);
        let r = p.growth_ratio(&[0.0, 10.0, 100.0]).unwrap();
        assert_eq!(r[0], 0.0);
        assert!(r[2] > r[1], "ratio must grow: {r:?}");

        // A polynomial truncation plateaus at its degree.
        let vals: Vec<f64> = (0..=6).map(|n| crate::multi_index::factorial(n).to_string().parse::<f64>().unwrap()).collect();
        let trunc = WeightSequence::explicit(&vals).unwrap();
        let pt = EntireSeries::new(trunc, 1e-16);
        let r = pt.growth_ratio(&[1e3, 1e6, 1e9]).unwrap();
        assert!((r[2] - 6.0).abs() < 1e-3, "plateau at degree 6: {r:?}");
    }

    #[test]
    fn duality_spot_check() {
        // exp(M(y)) <= P(y) <= 2 exp(M(2y)) with eps = 1.
        let seq = WeightSequence::example313(1.0, 2.0, 2, 600);
        let p = EntireSeries::new(seq.clone(), 1e-16);
        for &y in &[2.0, 8.0, 32.0, 128.0] {
            let mp = associated_function(&seq, y).unwrap();
            let m2p = associated_function(&seq, 2.0 * y).unwrap();
            let ln_p = p.eval_ln(y).unwrap();
            assert!(ln_p >= mp - 1e-9, "lower bound at y={y}");
            assert!(ln_p <= (2.0f64).ln() + m2p + 1e-9, "upper bound at y={y}");
        }
    }
}
