//! Exact polynomial phase-space symbols and the Weyl sharp product.
//!
//! A symbol lives on `R^{2d}` in the variables `w = (x, xi)`. Coefficients
//! are Gaussian rationals, so every identity in this module is exact: there
//! is no floating point anywhere on the symbol side.

use crate::error::{Error, Result};
use crate::multi_index::{for_each_composition, pairs_with_total_order, MultiIndex};
use crate::rational::GaussianRational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Neg;

/// Exponent pair of a single monomial `x^a xi^b`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    pub x: MultiIndex,
    pub xi: MultiIndex,
}

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.x.order() + self.xi.order()
    }
}

// Graded ordering (total degree first) keeps term iteration and JSON output
// deterministic and stable across runs.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.x.cmp(&other.x))
            .then_with(|| self.xi.cmp(&other.xi))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse exact polynomial in the `2d` phase-space variables.
///
/// Zero coefficients are never stored, so structural equality of the term
/// maps is exact polynomial equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySymbol {
    dim: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl PolySymbol {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        PolySymbol {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(
            Monomial {
                x: MultiIndex::zeros(dim),
                xi: MultiIndex::zeros(dim),
            },
            c,
        );
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    /// The coordinate symbol `x_j`.
    pub fn var_x(dim: usize, j: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(
            Monomial {
                x: MultiIndex::unit(dim, j),
                xi: MultiIndex::zeros(dim),
            },
            GaussianRational::one(),
        );
        p
    }

    /// The coordinate symbol `xi_j`.
    pub fn var_xi(dim: usize, j: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(
            Monomial {
                x: MultiIndex::zeros(dim),
                xi: MultiIndex::unit(dim, j),
            },
            GaussianRational::one(),
        );
        p
    }

    /// `|w|^2 = x_1^2 + ... + x_d^2 + xi_1^2 + ... + xi_d^2`, the harmonic
    /// oscillator symbol.
    pub fn harmonic_oscillator(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for j in 0..dim {
            let xj = Self::var_x(dim, j);
            let xij = Self::var_xi(dim, j);
            p = p.add(&xj.mul(&xj)).add(&xij.mul(&xij));
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn coefficient(&self, mono: &Monomial) -> GaussianRational {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Accumulate one term, dropping the entry if the sum cancels to zero.
    pub fn add_term(&mut self, mono: Monomial, coeff: GaussianRational) {
        debug_assert_eq!(mono.x.len(), self.dim);
        debug_assert_eq!(mono.xi.len(), self.dim);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &PolySymbol) -> PolySymbol {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolySymbol) -> PolySymbol {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolySymbol {
        let mut out = PolySymbol::zero(self.dim);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.clone().neg());
        }
        out
    }

    pub fn scale(&self, s: &GaussianRational) -> PolySymbol {
        let mut out = PolySymbol::zero(self.dim);
        if s.is_zero() {
            return out;
        }
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &PolySymbol) -> PolySymbol {
        assert_eq!(self.dim, other.dim);
        let mut out = PolySymbol::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(
                    Monomial {
                        x: ma.x.add(&mb.x),
                        xi: ma.xi.add(&mb.xi),
                    },
                    ca * cb,
                );
            }
        }
        out
    }

    /// Pointwise power `a(w)^n`.
    pub fn pow(&self, n: u32) -> PolySymbol {
        let mut out = PolySymbol::one(self.dim);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn conj(&self) -> PolySymbol {
        let mut out = PolySymbol::zero(self.dim);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.conj());
        }
        out
    }

    /// Evaluate at the real phase point `w = (x_1..x_d, xi_1..xi_d)`.
    pub fn eval(&self, w: &[f64]) -> Complex64 {
        assert_eq!(w.len(), 2 * self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut monomial = 1.0f64;
            for (j, &e) in m.x.0.iter().enumerate() {
                monomial *= w[j].powi(e as i32);
            }
            for (j, &e) in m.xi.0.iter().enumerate() {
                monomial *= w[self.dim + j].powi(e as i32);
            }
            acc += c.to_complex64() * monomial;
        }
        acc
    }

    /// Leading monomial in the graded-lex order, if any.
    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. Leading-term reduction in the graded-lex order; for an
    /// exact multiple the leading monomial of the dividend is always
    /// divisible by the leading monomial of the divisor, so the reduction
    /// terminates with remainder zero exactly when the division is exact.
    pub fn div_exact(&self, divisor: &PolySymbol) -> Option<PolySymbol> {
        assert_eq!(self.dim, divisor.dim);
        let (dm, dc) = divisor.leading_term()?;
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = PolySymbol::zero(self.dim);
        while let Some((rm, rc)) = rem.leading_term() {
            let (Some(qx), Some(qxi)) = (rm.x.checked_sub(&dm.x), rm.xi.checked_sub(&dm.xi)) else {
                return None;
            };
            let qc = rc.div(&dc);
            let qmono = Monomial { x: qx, xi: qxi };
            let mut single = PolySymbol::zero(self.dim);
            single.add_term(qmono.clone(), qc.clone());
            rem = rem.sub(&single.mul(divisor));
            quot.add_term(qmono, qc);
        }
        Some(quot)
    }

    /// Exact partial derivative `d^{x_order}_x d^{xi_order}_xi a`. With
    /// `use_d` set the result picks up the factor `i^-(|x_order|+|xi_order|)`
    /// turning plain partials into `D = i^-1 d`.
    pub fn derive(&self, x_order: &MultiIndex, xi_order: &MultiIndex, use_d: bool) -> Result<PolySymbol> {
        if x_order.len() != self.dim || xi_order.len() != self.dim {
            return Err(Error::BadMultiIndex {
                expected: self.dim,
                got: if x_order.len() != self.dim {
                    x_order.len()
                } else {
                    xi_order.len()
                },
            });
        }
        let mut out = PolySymbol::zero(self.dim);
        for (m, c) in &self.terms {
            let (Some(newx), Some(newxi)) = (m.x.checked_sub(x_order), m.xi.checked_sub(xi_order)) else {
                continue;
            };
            // Falling factorial e * (e-1) * ... * (e-k+1) per variable.
            let mut factor = BigInt::one();
            for (e, k) in m.x.0.iter().zip(&x_order.0) {
                for t in 0..*k {
                    factor *= BigInt::from(e - t);
                }
            }
            for (e, k) in m.xi.0.iter().zip(&xi_order.0) {
                for t in 0..*k {
                    factor *= BigInt::from(e - t);
                }
            }
            out.add_term(
                Monomial { x: newx, xi: newxi },
                c.scale(&BigRational::from_integer(factor)),
            );
        }
        if use_d {
            let total = x_order.order() + xi_order.order();
            out = out.scale(&GaussianRational::i_pow(-(total as i64)));
        }
        Ok(out)
    }
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (j, &e) in m.x.0.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{}^{}", j + 1, e)?;
                }
            }
            for (j, &e) in m.xi.0.iter().enumerate() {
                if e > 0 {
                    write!(f, "*xi{}^{}", j + 1, e)?;
                }
            }
        }
        Ok(())
    }
}

fn check_same_dim(a: &PolySymbol, b: &PolySymbol) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// The `l`-th term of the sharp product:
///
/// `c_l = sum_{|a+b|=l} (-1)^{|b|} / (a! b! 2^l) * (d_xi^a D_x^b f) (d_xi^b D_x^a g)`.
///
/// The `D` factors contribute `i^-l` overall, which is folded into the
/// coefficient so only plain partials are taken.
pub fn sharp_term(f: &PolySymbol, g: &PolySymbol, l: u32) -> Result<PolySymbol> {
    check_same_dim(f, g)?;
    let d = f.dim();
    let mut out = PolySymbol::zero(d);
    if l > f.degree() + g.degree() {
        return Ok(out);
    }
    let two_l = BigRational::from_integer(BigInt::from(2).pow(l));
    for (alpha, beta) in pairs_with_total_order(d, l) {
        let df = f.derive(&beta, &alpha, false)?; // d_x^beta d_xi^alpha f
        if df.is_zero() {
            continue;
        }
        let dg = g.derive(&alpha, &beta, false)?; // d_x^alpha d_xi^beta g
        if dg.is_zero() {
            continue;
        }
        let sign = if beta.order() % 2 == 0 { 1 } else { -1 };
        let denom = BigRational::from_integer(alpha.factorial() * beta.factorial()) * &two_l;
        let coeff = GaussianRational::i_pow(-(l as i64))
            .scale(&(BigRational::from_integer(BigInt::from(sign)) / denom));
        out = out.add(&df.mul(&dg).scale(&coeff));
    }
    Ok(out)
}

/// The full sharp product `f # g = sum_l sharp_term(f, g, l)`; the sum is
/// finite for polynomials.
pub fn star(f: &PolySymbol, g: &PolySymbol) -> Result<PolySymbol> {
    check_same_dim(f, g)?;
    let mut out = PolySymbol::zero(f.dim());
    for l in 0..=(f.degree() + g.degree()) {
        out = out.add(&sharp_term(f, g, l)?);
    }
    Ok(out)
}

/// `a^{(#n)}` by iterating the sharp product; `n = 0` is the constant 1.
pub fn sharp_power_iterated(a: &PolySymbol, n: u32) -> PolySymbol {
    if n == 0 {
        return PolySymbol::one(a.dim());
    }
    let mut acc = a.clone();
    for _ in 1..n {
        acc = star(&acc, a).expect("same dimension by construction");
    }
    acc
}

/// Derivative cache keyed by `(xi_order, x_order)`; the closed power formula
/// requests the same derivatives of `a` many times over.
struct DeriveCache<'a> {
    a: &'a PolySymbol,
    map: HashMap<(MultiIndex, MultiIndex), PolySymbol>,
}

impl<'a> DeriveCache<'a> {
    fn new(a: &'a PolySymbol) -> Self {
        DeriveCache {
            a,
            map: HashMap::new(),
        }
    }

    /// Plain `d_xi^{xi_order} d_x^{x_order} a`.
    fn get(&mut self, xi_order: &MultiIndex, x_order: &MultiIndex) -> &PolySymbol {
        let key = (xi_order.clone(), x_order.clone());
        self.map.entry(key).or_insert_with(|| {
            self.a
                .derive(x_order, xi_order, false)
                .expect("orders constructed with matching dimension")
        })
    }
}

/// The `j`-th term `(a^{#n})_j` of the closed combinatorial formula for the
/// iterated sharp power, `n >= 2`:
///
/// a sum over compositions `s_1 + ... + s_{n-1} = j` and blocks of
/// multi-index pairs with `|alpha^l + beta^l| = s_l`, each contributing
/// `(-1)^{|beta~|} / (alpha~! beta~! (2i)^j)` times a product of `n`
/// derivatives of `a`. The term vanishes for `j > floor(n*deg(a)/2)` and the
/// `j = 0` term is the pointwise power `a^n`.
pub fn sharp_power_closed_term(a: &PolySymbol, n: u32, j: u32) -> Result<PolySymbol> {
    if n < 2 {
        return Err(Error::Config(format!(
            "closed sharp-power formula needs n >= 2, got {n}"
        )));
    }
    let d = a.dim();
    let m = a.degree();
    if j == 0 {
        return Ok(a.pow(n));
    }
    if 2 * j > n * m {
        return Ok(PolySymbol::zero(d));
    }

    let mut cache = DeriveCache::new(a);
    let blocks = (n - 1) as usize;
    let mut total = PolySymbol::zero(d);

    // Coefficient denominator (2i)^j folded as i^-j (-1)^j ... note
    // 1/(2i)^j = i^-j / 2^j.
    let inv_2j = BigRational::new(BigInt::one(), BigInt::from(2).pow(j));
    let i_pow = GaussianRational::i_pow(-(j as i64));

    for_each_composition(j, blocks, &mut |s| {
        // Enumerate, per block l (1-based), all pairs of l-tuples of
        // multi-indices with total order s_{l}. Assignments are combined
        // across blocks by recursion.
        #[allow(clippy::too_many_arguments)]
        fn rec(
            a_deg: u32,
            d: usize,
            n: u32,
            s: &[u32],
            block: usize,
            alphas: &mut Vec<Vec<MultiIndex>>,
            betas: &mut Vec<Vec<MultiIndex>>,
            cache: &mut DeriveCache,
            acc: &mut PolySymbol,
        ) {
            if block == s.len() {
                emit(a_deg, d, n, alphas, betas, cache, acc);
                return;
            }
            let l = block + 1; // block holds l multi-index pairs
            let slots = 2 * l * d;
            for_each_composition(s[block], slots, &mut |comp| {
                let mut al = Vec::with_capacity(l);
                let mut bl = Vec::with_capacity(l);
                for k in 0..l {
                    al.push(MultiIndex(comp[k * d..(k + 1) * d].to_vec()));
                }
                for k in 0..l {
                    let off = l * d + k * d;
                    bl.push(MultiIndex(comp[off..off + d].to_vec()));
                }
                alphas.push(al);
                betas.push(bl);
                rec(a_deg, d, n, s, block + 1, alphas, betas, cache, acc);
                alphas.pop();
                betas.pop();
            });
        }

        fn emit(
            a_deg: u32,
            d: usize,
            n: u32,
            alphas: &[Vec<MultiIndex>],
            betas: &[Vec<MultiIndex>],
            cache: &mut DeriveCache,
            acc: &mut PolySymbol,
        ) {
            // Factor l (1-based) of the product takes
            //   xi-order: sum_k beta^{l-1,k} + sum_{t>=l} alpha^{t,l}
            //   x-order : sum_k alpha^{l-1,k} + sum_{t>=l} beta^{t,l}
            let mut factors = Vec::with_capacity(n as usize);
            for l in 1..=(n as usize) {
                let mut xi_ord = MultiIndex::zeros(d);
                let mut x_ord = MultiIndex::zeros(d);
                if l >= 2 {
                    for k in 0..(l - 1) {
                        xi_ord = xi_ord.add(&betas[l - 2][k]);
                        x_ord = x_ord.add(&alphas[l - 2][k]);
                    }
                }
                for t in l..=alphas.len() {
                    // block t (1-based) has entries 1..=t; entry l exists for t >= l
                    xi_ord = xi_ord.add(&alphas[t - 1][l - 1]);
                    x_ord = x_ord.add(&betas[t - 1][l - 1]);
                }
                if xi_ord.order() + x_ord.order() > a_deg {
                    return; // derivative kills the factor
                }
                factors.push((xi_ord, x_ord));
            }
            let mut prod: Option<PolySymbol> = None;
            for (xi_ord, x_ord) in &factors {
                let der = cache.get(xi_ord, x_ord).clone();
                if der.is_zero() {
                    return;
                }
                prod = Some(match prod {
                    None => der,
                    Some(p) => p.mul(&der),
                });
            }
            let prod = prod.expect("n >= 2 factors");

            let mut beta_total = 0u32;
            let mut fact = BigInt::one();
            for bl in betas {
                for b in bl {
                    beta_total += b.order();
                    fact *= b.factorial();
                }
            }
            for al in alphas {
                for a in al {
                    fact *= a.factorial();
                }
            }
            let sign = if beta_total % 2 == 0 { 1 } else { -1 };
            let scale = BigRational::new(BigInt::from(sign), fact);
            *acc = acc.add(&prod.scale(&GaussianRational::one().scale(&scale)));
        }

        let mut alphas: Vec<Vec<MultiIndex>> = Vec::new();
        let mut betas: Vec<Vec<MultiIndex>> = Vec::new();
        rec(m, d, n, s, 0, &mut alphas, &mut betas, &mut cache, &mut total);
    });

    Ok(total.scale(&i_pow.scale(&inv_2j)))
}

/// `a^{(#n)}` summed from the closed formula; `n = 0, 1` fall back to the
/// convention (1 and `a`) rather than the block formula.
pub fn sharp_power_closed(a: &PolySymbol, n: u32) -> Result<PolySymbol> {
    match n {
        0 => Ok(PolySymbol::one(a.dim())),
        1 => Ok(a.clone()),
        _ => {
            let mut acc = PolySymbol::zero(a.dim());
            for j in 0..=(n * a.degree() / 2) {
                acc = acc.add(&sharp_power_closed_term(a, n, j)?);
            }
            Ok(acc)
        }
    }
}

/// Brute-force and closed-form sides of the block multinomial identity:
///
/// `sum_{s_1+..+s_{n-1}=j} sum_{|alpha^l+beta^l|=s_l} 1/(alpha~! beta~! 2^j)`
/// versus `d^j n^j (n-1)^j / (2^j j!)`. Returns both exact rationals.
pub fn multinomial_identity_check(d: usize, n: u32, j: u32) -> (BigRational, BigRational) {
    assert!(n >= 2, "identity is stated for n >= 2");
    let blocks = (n - 1) as usize;
    let mut lhs = BigRational::from_integer(BigInt::from(0));

    for_each_composition(j, blocks, &mut |s| {
        // Per-block sums over all tuple assignments factorise, so walk blocks
        // independently and multiply.
        let mut block_product = BigRational::one();
        for (block, &sl) in s.iter().enumerate() {
            let l = block + 1;
            let slots = 2 * l * d;
            let mut block_sum = BigRational::from_integer(BigInt::from(0));
            for_each_composition(sl, slots, &mut |comp| {
                let mut fact = BigInt::one();
                for &e in comp {
                    fact *= crate::multi_index::factorial(e);
                }
                block_sum += BigRational::new(BigInt::one(), fact);
            });
            block_product *= block_sum;
        }
        lhs += block_product;
    });
    lhs /= BigRational::from_integer(BigInt::from(2).pow(j));

    let rhs = BigRational::new(
        BigInt::from(d).pow(j) * BigInt::from(n).pow(j) * BigInt::from(n - 1).pow(j),
        BigInt::from(2).pow(j) * crate::multi_index::factorial(j),
    );
    (lhs, rhs)
}
