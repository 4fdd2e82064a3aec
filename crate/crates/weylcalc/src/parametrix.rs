//! Parametrix recursions: exact symbolic terms `q_j` for scalar elliptic
//! polynomial symbols, and grid-numeric terms for matrix symbols.
//!
//! Scalar terms live in the algebra of quotients `p(w) / a(w)^k` over a
//! fixed everywhere-positive denominator base `a`, which the recursion never
//! leaves. The composition identity `(sum_j q_j) # a = 1` is then checked
//! exactly, layer by layer.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matrix_symbol::MatrixSymbol;
use crate::multi_index::{pairs_with_total_order, MultiIndex};
use crate::rational::GaussianRational;
use crate::symbol::PolySymbol;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;
use std::collections::HashMap;
use std::sync::Arc;

/// A fixed denominator base: an everywhere-positive polynomial.
///
/// Positivity is certified structurally (constant term >= 1 and every other
/// term an even monomial with a positive real coefficient) or asserted by
/// the caller for shapes the certificate does not cover.
#[derive(Clone, Debug)]
pub struct DenominatorBase {
    poly: Arc<PolySymbol>,
}

impl DenominatorBase {
    pub fn certify(a: &PolySymbol) -> Result<Self> {
        let mut has_positive_constant = false;
        for (mono, coeff) in a.terms() {
            let constant = mono.x.is_zero() && mono.xi.is_zero();
            if constant {
                if !coeff.is_real() || !coeff.re.is_positive() {
                    return Err(Error::NotCertifiedPositive);
                }
                has_positive_constant = true;
                continue;
            }
            let all_even = mono.x.0.iter().chain(mono.xi.0.iter()).all(|e| e % 2 == 0);
            if !all_even || !coeff.is_real() || !coeff.re.is_positive() {
                return Err(Error::NotCertifiedPositive);
            }
        }
        if !has_positive_constant {
            return Err(Error::NotCertifiedPositive);
        }
        Ok(DenominatorBase {
            poly: Arc::new(a.clone()),
        })
    }

    /// Caller-asserted positivity, for bases outside the structural class.
    pub fn assert_positive(a: &PolySymbol) -> Self {
        DenominatorBase {
            poly: Arc::new(a.clone()),
        }
    }

    pub fn poly(&self) -> &PolySymbol {
        &self.poly
    }
}

/// A formal quotient `numerator / base^denom_power`, kept reduced: the
/// numerator is never divisible by the base.
#[derive(Clone, Debug)]
pub struct RationalSymbol {
    numerator: PolySymbol,
    denom_power: u32,
    base: DenominatorBase,
}

impl RationalSymbol {
    pub fn new(numerator: PolySymbol, denom_power: u32, base: &DenominatorBase) -> Self {
        let mut rs = RationalSymbol {
            numerator,
            denom_power,
            base: base.clone(),
        };
        rs.reduce();
        rs
    }

    pub fn from_poly(p: PolySymbol, base: &DenominatorBase) -> Self {
        Self::new(p, 0, base)
    }

    pub fn one_over_base(base: &DenominatorBase) -> Self {
        Self::new(PolySymbol::one(base.poly().dim()), 1, base)
    }

    pub fn numerator(&self) -> &PolySymbol {
        &self.numerator
    }

    pub fn denom_power(&self) -> u32 {
        self.denom_power
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.numerator.is_real()
    }

    fn same_base(&self, other: &RationalSymbol) -> Result<()> {
        if *self.base.poly() != *other.base.poly() {
            return Err(Error::MixedDenominatorBase);
        }
        Ok(())
    }

    /// Cancel powers of the base out of the numerator.
    fn reduce(&mut self) {
        if self.numerator.is_zero() {
            self.denom_power = 0;
            return;
        }
        while self.denom_power > 0 {
            match self.numerator.div_exact(self.base.poly()) {
                Some(q) => {
                    self.numerator = q;
                    self.denom_power -= 1;
                }
                None => break,
            }
        }
    }

    pub fn add(&self, other: &RationalSymbol) -> Result<RationalSymbol> {
        self.same_base(other)?;
        let k = self.denom_power.max(other.denom_power);
        let lift = |rs: &RationalSymbol| -> PolySymbol {
            let mut p = rs.numerator.clone();
            for _ in rs.denom_power..k {
                p = p.mul(rs.base.poly());
            }
            p
        };
        Ok(RationalSymbol::new(
            lift(self).add(&lift(other)),
            k,
            &self.base,
        ))
    }

    pub fn mul(&self, other: &RationalSymbol) -> Result<RationalSymbol> {
        self.same_base(other)?;
        Ok(RationalSymbol::new(
            self.numerator.mul(&other.numerator),
            self.denom_power + other.denom_power,
            &self.base,
        ))
    }

    pub fn mul_poly(&self, p: &PolySymbol) -> RationalSymbol {
        RationalSymbol::new(self.numerator.mul(p), self.denom_power, &self.base)
    }

    pub fn scale(&self, s: &GaussianRational) -> RationalSymbol {
        RationalSymbol::new(self.numerator.scale(s), self.denom_power, &self.base)
    }

    pub fn neg(&self) -> RationalSymbol {
        RationalSymbol::new(self.numerator.neg(), self.denom_power, &self.base)
    }

    /// Single plain partial derivative in variable `var` (an index into the
    /// `2d` phase variables, x first): quotient rule
    /// `d(p/a^k) = (a dp - k p da) / a^{k+1}`.
    pub fn derive_once(&self, var: usize) -> RationalSymbol {
        let d = self.numerator.dim();
        let (xo, xio) = if var < d {
            (MultiIndex::unit(d, var), MultiIndex::zeros(d))
        } else {
            (MultiIndex::zeros(d), MultiIndex::unit(d, var - d))
        };
        let dp = self.numerator.derive(&xo, &xio, false).expect("same dim");
        if self.denom_power == 0 {
            return RationalSymbol::new(dp, 0, &self.base);
        }
        let da = self.base.poly().derive(&xo, &xio, false).expect("same dim");
        let k = BigRational::from_integer(BigInt::from(self.denom_power));
        let num = self
            .base
            .poly()
            .mul(&dp)
            .sub(&self.numerator.mul(&da).scale(&GaussianRational::one().scale(&k)));
        RationalSymbol::new(num, self.denom_power + 1, &self.base)
    }

    /// Plain `d_x^{x_order} d_xi^{xi_order}` by iterated single steps.
    pub fn derive(&self, x_order: &MultiIndex, xi_order: &MultiIndex) -> RationalSymbol {
        let d = self.numerator.dim();
        let mut out = self.clone();
        for (j, &e) in x_order.0.iter().enumerate() {
            for _ in 0..e {
                out = out.derive_once(j);
            }
        }
        for (j, &e) in xi_order.0.iter().enumerate() {
            for _ in 0..e {
                out = out.derive_once(d + j);
            }
        }
        out
    }

    /// Exact structural equality of reduced representations.
    pub fn eq_exact(&self, other: &RationalSymbol) -> bool {
        self.denom_power == other.denom_power && self.numerator == other.numerator
    }

    pub fn is_one(&self) -> bool {
        self.denom_power == 0 && self.numerator == PolySymbol::one(self.numerator.dim())
    }

    pub fn eval(&self, w: &[f64]) -> Complex64 {
        let base_val = self.base.poly().eval(w);
        self.numerator.eval(w) / base_val.powi(self.denom_power as i32)
    }
}

/// One sharp-product layer `sum_{|a+b|=l} (-1)^{|b|}/(a! b! (2i)^l)
/// (d_xi^a d_x^b f) (d_xi^b d_x^a g)` with `f` rational and `g` polynomial.
fn sharp_layer_rational(f: &RationalSymbol, g: &PolySymbol, l: u32) -> Result<RationalSymbol> {
    let d = g.dim();
    let mut acc = RationalSymbol::from_poly(PolySymbol::zero(d), &f.base);
    let two_l = BigRational::from_integer(BigInt::from(2).pow(l));
    for (alpha, beta) in pairs_with_total_order(d, l) {
        let dg = g.derive(&alpha, &beta, false)?; // d_xi^beta d_x^alpha g
        if dg.is_zero() {
            continue;
        }
        let df = f.derive(&beta, &alpha); // d_xi^alpha d_x^beta f
        if df.is_zero() {
            continue;
        }
        let sign = if beta.order() % 2 == 0 { 1 } else { -1 };
        let denom = BigRational::from_integer(alpha.factorial() * beta.factorial()) * &two_l;
        let coeff = GaussianRational::i_pow(-(l as i64))
            .scale(&(BigRational::from_integer(BigInt::from(sign)) / denom));
        acc = acc.add(&df.mul_poly(&dg).scale(&coeff))?;
    }
    Ok(acc)
}

/// The exact parametrix terms `q_0..q_J` of an everywhere-positive elliptic
/// polynomial symbol:
///
/// ```text
/// q_0 = 1/a
/// q_j = -q_0 sum_{s=1}^{j} sum_{|a+b|=s} (-1)^{|b|}/(a! b! (2i)^s)
///        (d_xi^a d_x^b q_{j-s}) (d_xi^b d_x^a a)
/// ```
pub fn parametrix_terms(a: &PolySymbol, j_max: usize) -> Result<Vec<RationalSymbol>> {
    let base = DenominatorBase::certify(a)?;
    parametrix_terms_with_base(&base, j_max)
}

pub fn parametrix_terms_with_base(
    base: &DenominatorBase,
    j_max: usize,
) -> Result<Vec<RationalSymbol>> {
    let a = base.poly().clone();
    let d = a.dim();
    let q0 = RationalSymbol::one_over_base(base);
    let mut terms = vec![q0.clone()];
    for j in 1..=j_max {
        let mut acc = RationalSymbol::from_poly(PolySymbol::zero(d), base);
        for s in 1..=j {
            let layer = sharp_layer_rational(&terms[j - s], &a, s as u32)?;
            acc = acc.add(&layer)?;
        }
        terms.push(acc.mul(&q0)?.neg());
    }
    Ok(terms)
}

/// Outcome of checking `(sum_{j<=J} q_j) # a = 1` layer by layer, exactly.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LeftInverseReport {
    pub j_max: usize,
    pub c0_is_one: bool,
    /// always `None` on success; a failing layer index aborts instead
    pub max_nonzero_k: Option<usize>,
    /// numerator term counts of the parametrix terms, as a size diagnostic
    pub term_sizes: Vec<usize>,
}

/// Compute the composition layers `c_k = sum_{s+l=k} layer_l(q_s, a)` for
/// `k <= J` and insist on `c_0 = 1`, `c_k = 0` exactly.
pub fn verify_left_inverse(a: &PolySymbol, j_max: usize) -> Result<LeftInverseReport> {
    let terms = parametrix_terms(a, j_max)?;
    let mut c0_is_one = false;
    for k in 0..=j_max {
        let mut ck = RationalSymbol::from_poly(PolySymbol::zero(a.dim()), &terms[0].base);
        for s in 0..=k {
            let layer = sharp_layer_rational(&terms[s], a, (k - s) as u32)?;
            ck = ck.add(&layer)?;
        }
        if k == 0 {
            c0_is_one = ck.is_one();
            if !c0_is_one {
                return Err(Error::LeftInverse { k: 0 });
            }
        } else if !ck.is_zero() {
            return Err(Error::LeftInverse { k });
        }
    }
    Ok(LeftInverseReport {
        j_max,
        c0_is_one,
        max_nonzero_k: None,
        term_sizes: terms.iter().map(|t| t.numerator.num_terms()).collect(),
    })
}

// ---------------------------------------------------------------------------
// Matrix parametrix on grids
// ---------------------------------------------------------------------------

/// Truncated derivative jet of a matrix-valued function at a point: all
/// plain partials `D^gamma` up to total order `order`, as matrices. The
/// non-commutative recursions only ever need products, shifts and one
/// inverse, which is what the jet algebra provides.
#[derive(Clone, Debug)]
struct MatrixJet {
    dim_w: usize,
    order: u32,
    entries: HashMap<MultiIndex, CMatrix>,
}

fn jet_indices(dim_w: usize, order: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for total in 0..=order {
        crate::multi_index::for_each_composition(total, dim_w, &mut |c| {
            out.push(MultiIndex(c.to_vec()));
        });
    }
    out
}

fn multi_binomial(gamma: &MultiIndex, delta: &MultiIndex) -> f64 {
    let mut b = 1.0f64;
    for (g, d) in gamma.0.iter().zip(&delta.0) {
        let mut num = 1.0;
        let mut den = 1.0;
        for t in 0..*d {
            num *= (*g - t) as f64;
            den *= (t + 1) as f64;
        }
        b *= num / den;
    }
    b
}

impl MatrixJet {
    fn value(&self) -> &CMatrix {
        &self.entries[&MultiIndex::zeros(self.dim_w)]
    }

    /// Jet of the product, by the Leibniz rule up to the common order.
    fn mul(&self, other: &MatrixJet) -> MatrixJet {
        let order = self.order.min(other.order);
        let mut entries = HashMap::new();
        for gamma in jet_indices(self.dim_w, order) {
            let n = self.value().rows();
            let mut acc = CMatrix::zeros(n, n);
            // sum over delta <= gamma
            for delta in jet_indices(self.dim_w, gamma.order()) {
                if gamma.checked_sub(&delta).is_none() {
                    continue;
                }
                let rest = gamma.checked_sub(&delta).unwrap();
                let b = multi_binomial(&gamma, &delta);
                let prod = self.entries[&delta].matmul(&other.entries[&rest]);
                acc = acc.add(&prod.scale(Complex64::new(b, 0.0)));
            }
            entries.insert(gamma, acc);
        }
        MatrixJet {
            dim_w: self.dim_w,
            order,
            entries,
        }
    }

    /// View of the jet of `D^{shift} f`, truncated accordingly.
    fn shift(&self, shift: &MultiIndex) -> MatrixJet {
        let order = self.order.saturating_sub(shift.order());
        let mut entries = HashMap::new();
        for gamma in jet_indices(self.dim_w, order) {
            entries.insert(gamma.clone(), self.entries[&gamma.add(shift)].clone());
        }
        MatrixJet {
            dim_w: self.dim_w,
            order,
            entries,
        }
    }

    fn scale(&self, s: Complex64) -> MatrixJet {
        MatrixJet {
            dim_w: self.dim_w,
            order: self.order,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v.scale(s)))
                .collect(),
        }
    }

    fn add(&self, other: &MatrixJet) -> MatrixJet {
        let order = self.order.min(other.order);
        let mut entries = HashMap::new();
        for gamma in jet_indices(self.dim_w, order) {
            entries.insert(
                gamma.clone(),
                self.entries[&gamma].add(&other.entries[&gamma]),
            );
        }
        MatrixJet {
            dim_w: self.dim_w,
            order,
            entries,
        }
    }

    /// Jet of the inverse: `D^g (A^{-1}) = -A^{-1} sum_{0<d<=g} C(g,d)
    /// (D^d A)(D^{g-d} A^{-1})`, filled in order of increasing `|g|`.
    fn inverse(&self) -> Result<MatrixJet> {
        let v0 = self
            .value()
            .inverse()
            .map_err(|_| Error::Shape("singular matrix in jet inverse".into()))?;
        let mut entries: HashMap<MultiIndex, CMatrix> = HashMap::new();
        entries.insert(MultiIndex::zeros(self.dim_w), v0.clone());
        for gamma in jet_indices(self.dim_w, self.order) {
            if gamma.is_zero() {
                continue;
            }
            let n = v0.rows();
            let mut acc = CMatrix::zeros(n, n);
            for delta in jet_indices(self.dim_w, gamma.order()) {
                if delta.is_zero() || gamma.checked_sub(&delta).is_none() {
                    continue;
                }
                let rest = gamma.checked_sub(&delta).unwrap();
                let b = multi_binomial(&gamma, &delta);
                let prod = self.entries[&delta].matmul(&entries[&rest]);
                acc = acc.add(&prod.scale(Complex64::new(b, 0.0)));
            }
            entries.insert(gamma, v0.matmul(&acc).scale(Complex64::new(-1.0, 0.0)));
        }
        Ok(MatrixJet {
            dim_w: self.dim_w,
            order: self.order,
            entries,
        })
    }
}

/// Build the jet of a matrix symbol at a point (exact polynomial derivatives
/// evaluated in doubles).
fn symbol_jet(a: &MatrixSymbol, w: &[f64], order: u32) -> Result<MatrixJet> {
    let d = a.dim();
    let dim_w = 2 * d;
    let mut entries = HashMap::new();
    for gamma in jet_indices(dim_w, order) {
        let xo = MultiIndex(gamma.0[..d].to_vec());
        let xio = MultiIndex(gamma.0[d..].to_vec());
        entries.insert(gamma.clone(), a.eval_derivative(&xo, &xio, w)?);
    }
    Ok(MatrixJet {
        dim_w,
        order,
        entries,
    })
}

/// Which of the paper's two matrix recursions to evaluate: the left
/// parametrix keeps the factor order `(d q) (d a) q_0`, the right variant
/// `q_0 (d a) (d q)`. They coincide for commuting (e.g. scalar-multiple)
/// symbols but differ in general; both share `q_0 = a^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixParametrixSide {
    Left,
    Right,
}

/// Numerically evaluate the matrix parametrix terms `q_0..q_J` at each grid
/// point. Derivatives of the symbol are exact (polynomial calculus);
/// inverses are numeric; the non-commutative factor order follows the
/// requested recursion side.
pub fn matrix_parametrix_eval(
    a: &MatrixSymbol,
    points: &[Vec<f64>],
    j_max: usize,
    side: MatrixParametrixSide,
) -> Result<Vec<Vec<CMatrix>>> {
    let d = a.dim();
    let dim_w = 2 * d;
    let mut out = Vec::with_capacity(points.len());
    for w in points {
        if w.len() != dim_w {
            return Err(Error::Config(format!(
                "grid point has {} coordinates, expected {dim_w}",
                w.len()
            )));
        }
        let det = a.eval(w).det();
        if det.norm() < 1e-12 {
            return Err(Error::SingularAtPoint { point: w.clone() });
        }
        let a_jet = symbol_jet(a, w, j_max as u32)?;
        let q0 = a_jet.inverse()?;
        let mut terms: Vec<MatrixJet> = vec![q0.clone()];
        for j in 1..=j_max {
            let mut acc: Option<MatrixJet> = None;
            for s in 1..=j {
                for (alpha, beta) in pairs_with_total_order(d, s as u32) {
                    // shifts in the combined (x, xi) indexing
                    let q_shift = MultiIndex(
                        beta.0
                            .iter()
                            .chain(alpha.0.iter())
                            .copied()
                            .collect::<Vec<_>>(),
                    ); // d_x^beta d_xi^alpha on q
                    let a_shift = MultiIndex(
                        alpha
                            .0
                            .iter()
                            .chain(beta.0.iter())
                            .copied()
                            .collect::<Vec<_>>(),
                    ); // d_x^alpha d_xi^beta on a
                    let sign = if beta.order() % 2 == 0 { 1.0 } else { -1.0 };
                    let fact = crate::rational::rational_to_f64(&BigRational::from_integer(
                        alpha.factorial() * beta.factorial(),
                    ));
                    let i_pow = match (s as i64).rem_euclid(4) {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, -1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, 1.0),
                    }; // i^{-s}
                    let coeff = i_pow * sign / (fact * 2f64.powi(s as i32));
                    let dq = terms[j - s].shift(&q_shift);
                    let da = a_jet.shift(&a_shift);
                    let contrib = match side {
                        MatrixParametrixSide::Left => dq.mul(&da).mul(&q0),
                        MatrixParametrixSide::Right => q0.mul(&da).mul(&dq),
                    }
                    .scale(coeff);
                    acc = Some(match acc {
                        None => contrib,
                        Some(prev) => prev.add(&contrib),
                    });
                }
            }
            terms.push(acc.expect("j >= 1 has at least one layer").scale(Complex64::new(-1.0, 0.0)));
        }
        out.push(terms.iter().map(|t| t.value().clone()).collect());
    }
    Ok(out)
}

/// Default evaluation grid: product-angle sphere nodes, thinned, on three
/// scaled radii.
pub fn default_grid(d: usize, radius: f64) -> Vec<Vec<f64>> {
    let rule = crate::quadrature::sphere_rule(2 * d - 1, 0);
    let stride = (rule.len() / 12).max(1);
    let mut out = Vec::new();
    for factor in [1.0, 1.5, 2.0] {
        for node in rule.iter().step_by(stride) {
            out.push(node.point.iter().map(|c| c * radius * factor).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::GaussianRational as GR;
    use std::ops::Neg;

    fn one_plus_h(d: usize) -> PolySymbol {
        PolySymbol::one(d).add(&PolySymbol::harmonic_oscillator(d))
    }

    #[test]
    fn certify_positive_base() {
        assert!(DenominatorBase::certify(&one_plus_h(1)).is_ok());
        assert!(DenominatorBase::certify(&one_plus_h(2)).is_ok());
        // odd monomial breaks the certificate
        let bad = one_plus_h(1).add(&PolySymbol::var_x(1, 0));
        assert!(matches!(
            DenominatorBase::certify(&bad),
            Err(Error::NotCertifiedPositive)
        ));
        // no constant term
        assert!(DenominatorBase::certify(&PolySymbol::harmonic_oscillator(1)).is_err());
    }

    #[test]
    fn quotient_rule() {
        // d/dx (1/a) = -da/dx / a^2 for a = 1 + x^2 + xi^2
        let a = one_plus_h(1);
        let base = DenominatorBase::certify(&a).unwrap();
        let q0 = RationalSymbol::one_over_base(&base);
        let dq = q0.derive_once(0);
        assert_eq!(dq.denom_power(), 2);
        let expect_num = PolySymbol::var_x(1, 0).scale(&GR::from_int(-2));
        assert_eq!(*dq.numerator(), expect_num);
    }

    #[test]
    fn product_adds_denominator_powers() {
        let a = one_plus_h(1);
        let base = DenominatorBase::certify(&a).unwrap();
        let q0 = RationalSymbol::one_over_base(&base);
        let sq = q0.mul(&q0).unwrap();
        assert_eq!(sq.denom_power(), 2);
        // a * (p/a^k) reduces to p/a^{k-1}
        let lifted = sq.mul_poly(&a);
        assert_eq!(lifted.denom_power(), 1);
        assert!(lifted.eq_exact(&q0));
    }

    #[test]
    fn div_exact_roundtrip() {
        let a = one_plus_h(2);
        let p = a.mul(&a).mul(&PolySymbol::var_xi(2, 1));
        let q = p.div_exact(&a).unwrap();
        assert_eq!(q, a.mul(&PolySymbol::var_xi(2, 1)));
        assert!(PolySymbol::var_x(2, 0).div_exact(&a).is_none());
    }

    #[test]
    fn q1_vanishes_for_scalar_symbols() {
        // The s = 1 layer is a Poisson bracket {1/a, a}, identically zero.
        let terms = parametrix_terms(&one_plus_h(1), 1).unwrap();
        assert!(terms[1].is_zero());
    }

    #[test]
    fn q1_matches_hand_expansion() {
        // Hand-expanded s = 1 sum for q_1: -q0 * [ (i/2)(d_xi q0 d_x a
        // - d_x q0 d_xi a) ] with the D-factor i^{-1} folded in.
        let a = one_plus_h(1);
        let base = DenominatorBase::certify(&a).unwrap();
        let q0 = RationalSymbol::one_over_base(&base);
        let d = 1;
        let e = MultiIndex::unit(d, 0);
        let z = MultiIndex::zeros(d);
        let dxi_q0 = q0.derive(&z, &e);
        let dx_q0 = q0.derive(&e, &z);
        let dx_a = RationalSymbol::from_poly(a.derive(&e, &z, false).unwrap(), &base);
        let dxi_a = RationalSymbol::from_poly(a.derive(&z, &e, false).unwrap(), &base);
        // (-1)^{|beta|} i^{-1} / 2: (alpha,beta)=(e,0) gives -i/2 on
        // (d_xi q0)(d_x a); (0,e) gives +i/2 on (d_x q0)(d_xi a).
        let minus_i_half = GR::imaginary_unit().neg().scale(&BigRational::new(1.into(), 2.into()));
        let plus_i_half = GR::imaginary_unit().scale(&BigRational::new(1.into(), 2.into()));
        let hand = dxi_q0
            .mul(&dx_a)
            .unwrap()
            .scale(&minus_i_half)
            .add(&dx_q0.mul(&dxi_a).unwrap().scale(&plus_i_half))
            .unwrap()
            .mul(&q0)
            .unwrap()
            .neg();
        let terms = parametrix_terms(&a, 1).unwrap();
        assert!(terms[1].eq_exact(&hand));
    }

    #[test]
    fn parametrix_terms_real_and_bounded() {
        for d in 1..=2usize {
            let a = one_plus_h(d);
            let terms = parametrix_terms(&a, 3).unwrap();
            for (j, t) in terms.iter().enumerate() {
                assert!(t.is_real(), "q_{j} should be real for real a (d={d})");
                assert!(
                    t.denom_power() <= 2 * j as u32 + 1,
                    "denominator growth bound at j={j}"
                );
            }
        }
    }

    #[test]
    fn left_inverse_identity_exact() {
        for d in 1..=2usize {
            let report = verify_left_inverse(&one_plus_h(d), 3).unwrap();
            assert!(report.c0_is_one);
            assert_eq!(report.max_nonzero_k, None);
            assert_eq!(report.term_sizes.len(), 4);
        }
    }

    #[test]
    fn left_inverse_rejects_uncertified() {
        let bad = PolySymbol::var_x(1, 0);
        assert!(verify_left_inverse(&bad, 2).is_err());
    }

    #[test]
    fn matrix_parametrix_scalar_consistency() {
        // A = a I_2: matrix terms must equal scalar q_j I at every point.
        let d = 1;
        let a = one_plus_h(d);
        let matrix = MatrixSymbol::scalar_times_identity(&a, 2);
        let grid = default_grid(d, 1.0);
        let scalar_terms = parametrix_terms(&a, 2).unwrap();
        let per_point =
            matrix_parametrix_eval(&matrix, &grid, 2, MatrixParametrixSide::Left).unwrap();
        for (w, terms) in grid.iter().zip(&per_point) {
            for (j, t) in terms.iter().enumerate() {
                let scalar = scalar_terms[j].eval(w);
                for i in 0..2 {
                    for k in 0..2 {
                        let expect = if i == k {
                            scalar
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        assert!(
                            (t[(i, k)] - expect).norm() < 1e-10,
                            "j={j} at {w:?}: {:?} vs {expect:?}",
                            t[(i, k)]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_parametrix_q0_residual() {
        let d = 1;
        // a noncommuting 2x2 symbol, invertible away from 0
        let x = PolySymbol::var_x(d, 0);
        let xi = PolySymbol::var_xi(d, 0);
        let one = PolySymbol::one(d);
        let a = MatrixSymbol::new(
            2,
            d,
            vec![
                one.add(&x.mul(&x)),
                xi.clone(),
                xi.neg(),
                one.add(&xi.mul(&xi)),
            ],
        )
        .unwrap();
        let grid = default_grid(d, 2.0);
        let per_point =
            matrix_parametrix_eval(&a, &grid, 0, MatrixParametrixSide::Left).unwrap();
        for (w, terms) in grid.iter().zip(&per_point) {
            let prod = a.eval(w).matmul(&terms[0]);
            let res = prod.sub(&CMatrix::identity(2)).max_abs();
            assert!(res <= 1e-12, "residual {res} at {w:?}");
        }
    }

    #[test]
    fn matrix_parametrix_sides_differ_when_noncommuting() {
        let d = 1;
        let x = PolySymbol::var_x(d, 0);
        let xi = PolySymbol::var_xi(d, 0);
        let one = PolySymbol::one(d);
        let a = MatrixSymbol::new(
            2,
            d,
            vec![
                one.add(&x.mul(&x)),
                xi.clone(),
                xi.neg(),
                one.add(&xi.mul(&xi)),
            ],
        )
        .unwrap();
        let grid = vec![vec![0.7, 1.3]];
        let left = matrix_parametrix_eval(&a, &grid, 1, MatrixParametrixSide::Left).unwrap();
        let right = matrix_parametrix_eval(&a, &grid, 1, MatrixParametrixSide::Right).unwrap();
        // q_0 identical on both sides
        assert!(left[0][0].sub(&right[0][0]).max_abs() < 1e-14);
        // q_1 differs for a noncommuting symbol
        assert!(left[0][1].sub(&right[0][1]).max_abs() > 1e-6);
    }

    #[test]
    fn singular_grid_point_rejected() {
        let d = 1;
        let x = PolySymbol::var_x(d, 0);
        let a = MatrixSymbol::scalar(x); // vanishes at x = 0
        let grid = vec![vec![0.0, 0.0]];
        assert!(matches!(
            matrix_parametrix_eval(&a, &grid, 0, MatrixParametrixSide::Left),
            Err(Error::SingularAtPoint { .. })
        ));
    }
}
