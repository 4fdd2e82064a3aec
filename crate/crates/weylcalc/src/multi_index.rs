//! Multi-indices in `N^d` with exact factorial helpers.

use num_bigint::BigInt;
use num_traits::One;
use std::cell::RefCell;
use std::fmt;

/// A multi-index `(a_1, ..., a_d)` of nonnegative integer exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// Unit multi-index `e_j`.
    pub fn unit(d: usize, j: usize) -> Self {
        let mut v = vec![0; d];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|a| = a_1 + ... + a_d`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise subtraction; `None` unless `other <= self` everywhere.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.len(), other.len());
        let mut v = Vec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if b > a {
                return None;
            }
            v.push(a - b);
        }
        Some(MultiIndex(v))
    }

    /// `a! = a_1! * ... * a_d!` exactly.
    pub fn factorial(&self) -> BigInt {
        let mut f = BigInt::one();
        for &e in &self.0 {
            f *= factorial(e);
        }
        f
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

thread_local! {
    static FACTORIALS: RefCell<Vec<BigInt>> = RefCell::new(vec![BigInt::one()]);
}

/// `n!` exactly, memoised up to the largest argument seen so far.
pub fn factorial(n: u32) -> BigInt {
    FACTORIALS.with(|cell| {
        let mut cache = cell.borrow_mut();
        while cache.len() <= n as usize {
            let next = cache.last().unwrap() * BigInt::from(cache.len());
            cache.push(next);
        }
        cache[n as usize].clone()
    })
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Visit every way of writing `total` as an ordered sum of `slots`
/// nonnegative integers. The callback receives the current composition.
pub fn for_each_composition(total: u32, slots: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(buf: &mut [u32], pos: usize, remaining: u32, f: &mut impl FnMut(&[u32])) {
        if pos + 1 == buf.len() {
            buf[pos] = remaining;
            f(buf);
            return;
        }
        for v in 0..=remaining {
            buf[pos] = v;
            rec(buf, pos + 1, remaining - v, f);
        }
    }
    if slots == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    let mut buf = vec![0u32; slots];
    rec(&mut buf, 0, total, f);
}

/// All multi-index pairs `(alpha, beta)` in `N^d x N^d` with `|alpha| + |beta| = l`.
pub fn pairs_with_total_order(d: usize, l: u32) -> Vec<(MultiIndex, MultiIndex)> {
    let mut out = Vec::new();
    for_each_composition(l, 2 * d, &mut |comp| {
        let alpha = MultiIndex(comp[..d].to_vec());
        let beta = MultiIndex(comp[d..].to_vec());
        out.push((alpha, beta));
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigInt::from(1));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(12), BigInt::from(479001600u64));
    }

    #[test]
    fn multi_factorial() {
        let a = MultiIndex(vec![3, 2]);
        assert_eq!(a.factorial(), BigInt::from(12));
        assert_eq!(a.order(), 5);
    }

    #[test]
    fn compositions_count() {
        // C(total + slots - 1, slots - 1) weak compositions.
        let mut n = 0usize;
        for_each_composition(4, 3, &mut |_| n += 1);
        assert_eq!(n, 15);
        let pairs = pairs_with_total_order(2, 2);
        assert_eq!(pairs.len(), 10); // C(2 + 4 - 1, 3)
    }

    #[test]
    fn checked_sub_partial_order() {
        let a = MultiIndex(vec![2, 1]);
        let b = MultiIndex(vec![1, 1]);
        assert_eq!(a.checked_sub(&b), Some(MultiIndex(vec![1, 0])));
        assert_eq!(b.checked_sub(&a), None);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }
}
