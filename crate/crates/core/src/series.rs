//! Truncated power series over an exact field.
//!
//! A [`TruncSeries`] stores the coefficients of `t^0 .. t^(N-1)`; everything
//! from `t^N` on is unknown, not zero. Every operation returns the tightest
//! truncation it can vouch for.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::Field;

/// Valuation of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// Least exponent carrying a nonzero coefficient.
    Exact(usize),
    /// All stored coefficients vanish; the order is at least the truncation.
    AtLeast(usize),
}

impl Order {
    pub fn exact(self) -> Option<usize> {
        match self {
            Order::Exact(k) => Some(k),
            Order::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Exact(k) => write!(f, "{k}"),
            Order::AtLeast(k) => write!(f, ">= {k}"),
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct TruncSeries<F> {
    coeffs: Vec<F>,
}

impl<F: Field> TruncSeries<F> {
    /// Series whose known coefficients are exactly `coeffs`; the truncation
    /// order is `coeffs.len()`.
    pub fn from_coeffs(coeffs: Vec<F>) -> Self {
        TruncSeries { coeffs }
    }

    pub fn zero(trunc: usize) -> Self {
        TruncSeries {
            coeffs: vec![F::zero(); trunc],
        }
    }

    pub fn one(trunc: usize) -> Self {
        Self::monomial(0, F::one(), trunc)
    }

    /// `c * t^k` truncated at `trunc` (vanishes when `k >= trunc`).
    pub fn monomial(k: usize, c: F, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        if k < trunc {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs; exponents at or
    /// beyond `trunc` are dropped and repeated exponents are summed.
    pub fn from_terms<'a, I>(terms: I, trunc: usize) -> Self
    where
        I: IntoIterator<Item = (usize, &'a F)>,
        F: 'a,
    {
        let mut s = Self::zero(trunc);
        for (k, c) in terms {
            if k < trunc {
                s.coeffs[k] = s.coeffs[k].add_ref(c);
            }
        }
        s
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    /// Coefficient of `t^k`, or `None` when `k` lies beyond the truncation.
    pub fn coeff(&self, k: usize) -> Option<&F> {
        self.coeffs.get(k)
    }

    pub fn order(&self) -> Order {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(k) => Order::Exact(k),
            None => Order::AtLeast(self.coeffs.len()),
        }
    }

    /// True when every stored coefficient vanishes.
    pub fn is_zero_jet(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drops coefficients from `t^n` on. A no-op when `n` exceeds the
    /// current truncation: unknown coefficients cannot be recovered.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.coeffs.len());
        TruncSeries {
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        }
    }

    /// Multiplication by `t^k`; the truncation order grows by `k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncSeries { coeffs }
    }

    /// Formal derivative. The truncation order drops by one.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.mul_ref(&F::from_int(k as i64)))
            .collect();
        TruncSeries { coeffs }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.trunc_order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn nonzero_terms(&self) -> Vec<(usize, &F)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

impl<F: Field> fmt::Debug for TruncSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (N={})", self, self.trunc_order())
    }
}

impl<F: Field> fmt::Display for TruncSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.nonzero_terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.trunc_order())
    }
}

impl<F: Field> Add for &TruncSeries<F> {
    type Output = TruncSeries<F>;
    fn add(self, rhs: Self) -> TruncSeries<F> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.add_ref(b))
            .collect();
        TruncSeries { coeffs }
    }
}

impl<F: Field> Sub for &TruncSeries<F> {
    type Output = TruncSeries<F>;
    fn sub(self, rhs: Self) -> TruncSeries<F> {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.sub_ref(b))
            .collect();
        TruncSeries { coeffs }
    }
}

impl<F: Field> Neg for &TruncSeries<F> {
    type Output = TruncSeries<F>;
    fn neg(self) -> TruncSeries<F> {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }
}

impl<F: Field> Mul for &TruncSeries<F> {
    type Output = TruncSeries<F>;
    /// Cauchy product truncated at the smaller of the two orders. Loops run
    /// over nonzero terms only, so sparse operands stay cheap.
    fn mul(self, rhs: Self) -> TruncSeries<F> {
        let n = self.trunc_order().min(rhs.trunc_order());
        let mut out: TruncSeries<F> = TruncSeries::zero(n);
        let b = rhs.nonzero_terms();
        for (i, a) in self.nonzero_terms() {
            if i >= n {
                break;
            }
            for &(j, bj) in &b {
                if i + j >= n {
                    break;
                }
                out.coeffs[i + j] = out.coeffs[i + j].add_ref(&a.mul_ref(bj));
            }
        }
        out
    }
}

/// Product `prod_j coords[j]^alpha[j]` of coordinate series.
///
/// `alpha` must have one entry per coordinate. The empty product is the
/// constant `1` truncated at the common order.
pub fn monomial_image<F: Field>(coords: &[TruncSeries<F>], alpha: &[u32]) -> TruncSeries<F> {
    assert_eq!(coords.len(), alpha.len(), "exponent vector length");
    let trunc = coords.iter().map(TruncSeries::trunc_order).min().unwrap_or(0);
    let mut acc = TruncSeries::one(trunc);
    for (s, &a) in coords.iter().zip(alpha) {
        if a > 0 {
            acc = &acc * &s.pow(a);
        }
    }
    acc
}

/// An element of the semi-local ring: one truncated series per branch.
#[derive(Clone, PartialEq)]
pub struct MultiSeries<F> {
    components: Vec<TruncSeries<F>>,
}

impl<F: Field> MultiSeries<F> {
    pub fn new(components: Vec<TruncSeries<F>>) -> Self {
        MultiSeries { components }
    }

    /// The unit of the semi-local ring with the given per-branch truncations.
    pub fn one(truncs: &[usize]) -> Self {
        MultiSeries {
            components: truncs.iter().map(|&n| TruncSeries::one(n)).collect(),
        }
    }

    pub fn branch_count(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[TruncSeries<F>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TruncSeries<F> {
        &self.components[i]
    }

    /// Per-branch orders.
    pub fn value_vector(&self) -> Vec<Order> {
        self.components.iter().map(TruncSeries::order).collect()
    }

    pub fn derivative(&self) -> Self {
        MultiSeries {
            components: self.components.iter().map(TruncSeries::derivative).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        MultiSeries {
            components: self.components.iter().map(|s| s.scale(c)).collect(),
        }
    }
}

impl<F: Field> fmt::Debug for MultiSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.components).finish()
    }
}

impl<F: Field> Add for &MultiSeries<F> {
    type Output = MultiSeries<F>;
    fn add(self, rhs: Self) -> MultiSeries<F> {
        assert_eq!(self.branch_count(), rhs.branch_count());
        MultiSeries {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<F: Field> Mul for &MultiSeries<F> {
    type Output = MultiSeries<F>;
    fn mul(self, rhs: Self) -> MultiSeries<F> {
        assert_eq!(self.branch_count(), rhs.branch_count());
        MultiSeries {
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

/// Coefficients of `t^low .. t^(hi-1)` with `low` possibly negative.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentWindow<F> {
    low: i64,
    coeffs: Vec<F>,
}

impl<F: Field> LaurentWindow<F> {
    pub fn new(low: i64, coeffs: Vec<F>) -> Self {
        LaurentWindow { low, coeffs }
    }

    /// `c * t^k` known on `[low, hi)`.
    pub fn monomial(k: i64, c: F, low: i64, hi: i64) -> Self {
        assert!(low <= k && k < hi);
        let mut coeffs = vec![F::zero(); (hi - low) as usize];
        coeffs[(k - low) as usize] = c;
        LaurentWindow { low, coeffs }
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    /// First unknown exponent.
    pub fn hi(&self) -> i64 {
        self.low + self.coeffs.len() as i64
    }

    pub fn coeff(&self, k: i64) -> Option<&F> {
        if k < self.low {
            return None;
        }
        self.coeffs.get((k - self.low) as usize)
    }

    /// Product with a power series; `low` is unchanged and the result is
    /// known below `min(hi, low + N)`.
    pub fn mul_series(&self, s: &TruncSeries<F>) -> Self {
        let hi = self.hi().min(self.low + s.trunc_order() as i64);
        let len = (hi - self.low).max(0) as usize;
        let mut coeffs = vec![F::zero(); len];
        let b = s.nonzero_terms();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, bj) in &b {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].add_ref(&a.mul_ref(bj));
            }
        }
        LaurentWindow {
            low: self.low,
            coeffs,
        }
    }

    /// The power series this window represents, if no negative exponent
    /// carries a nonzero coefficient.
    pub fn to_series(&self) -> Option<TruncSeries<F>> {
        if self.low >= 0 {
            return Some(TruncSeries::from_coeffs(self.coeffs.clone()).shift(self.low as usize));
        }
        let skip = (-self.low) as usize;
        if self.coeffs.iter().take(skip).any(|c| !c.is_zero()) {
            return None;
        }
        Some(TruncSeries::from_coeffs(
            self.coeffs.iter().skip(skip).cloned().collect(),
        ))
    }
}
