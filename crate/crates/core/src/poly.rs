//! Sparse exact polynomials: branch coordinates are univariate polynomials in
//! the branch parameter, ideal generators are multivariate in `x1..xn`.

use std::collections::BTreeMap;


use crate::scalar::Field;
use crate::series::TruncSeries;

/// A univariate polynomial `sum c_k t^k`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<F> {
    terms: BTreeMap<u32, F>,
}

impl<F: Field> UniPoly<F> {
    pub fn zero() -> Self {
        UniPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(k: u32, c: F) -> Self {
        let mut p = Self::zero();
        p.add_term(k, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, F)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, k: u32, c: F) {
        let sum = match self.terms.remove(&k) {
            Some(old) => old.add_ref(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(k, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &F)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> F {
        self.terms.get(&0).cloned().unwrap_or_else(F::zero)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().copied()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    /// Greatest common divisor of all exponents (0 for the zero polynomial
    /// or a constant).
    pub fn exponent_gcd(&self) -> u32 {
        self.terms.keys().fold(0, |g, &k| num_integer::gcd(g, k))
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(&k, _)| k > 0)
                .map(|(&k, c)| (k - 1, c.mul_ref(&F::from_int(k as i64)))),
        )
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_terms(self.terms.iter().map(|(&k, a)| (k, a.mul_ref(c))))
    }

    /// Substitutes `t -> lambda * t`.
    pub fn rescale_param(&self, lambda: &F) -> Self {
        let mut out = Self::zero();
        let mut power = F::one();
        let mut last = 0u32;
        for (&k, c) in &self.terms {
            while last < k {
                power = power.mul_ref(lambda);
                last += 1;
            }
            out.add_term(k, c.mul_ref(&power));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&i, a) in &self.terms {
            for (&j, b) in &other.terms {
                out.add_term(i + j, a.mul_ref(b));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::monomial(0, F::one());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The truncated series `self mod t^n`.
    pub fn to_series(&self, n: usize) -> TruncSeries<F> {
        TruncSeries::from_terms(self.terms.iter().map(|(&k, c)| (k as usize, c)), n)
    }
}

/// A multivariate polynomial in `x1..xn`, keyed by exponent vectors.
#[derive(Clone, PartialEq, Debug)]
pub struct MultiPoly<F> {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, F>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, alpha: Vec<u32>, c: F) {
        assert_eq!(alpha.len(), self.nvars, "exponent vector length");
        let sum = match self.terms.remove(&alpha) {
            Some(old) => old.add_ref(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(alpha, sum);
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, F)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &F)> {
        self.terms.iter().map(|(a, c)| (a.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> F {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(F::zero)
    }

    /// Least total degree of a term (the order at the origin).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|a| a.iter().sum()).min()
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            if a[var] > 0 {
                let mut b = a.clone();
                b[var] -= 1;
                out.add_term(b, c.mul_ref(&F::from_int(a[var] as i64)));
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x.mul_ref(y));
            }
        }
        out
    }

    /// Applies the linear substitution `x_j -> sum_k m[j][k] x_k`.
    pub fn linear_substitute(&self, m: &[Vec<F>]) -> Self {
        let images: Vec<MultiPoly<F>> = (0..self.nvars)
            .map(|j| {
                let mut p = Self::zero(self.nvars);
                for (k, c) in m[j].iter().enumerate() {
                    let mut e = vec![0; self.nvars];
                    e[k] = 1;
                    p.add_term(e, c.clone());
                }
                p
            })
            .collect();
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            let mut term = MultiPoly::from_terms(self.nvars, [(vec![0; self.nvars], c.clone())]);
            for (j, &e) in a.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[j]);
                }
            }
            for (b, d) in term.terms {
                out.add_term(b, d);
            }
        }
        out
    }

    /// Exact composition `self(p_1(t), ..., p_n(t))`.
    pub fn compose(&self, coords: &[UniPoly<F>]) -> UniPoly<F> {
        assert_eq!(coords.len(), self.nvars);
        let mut powers: Vec<Vec<UniPoly<F>>> = vec![vec![UniPoly::monomial(0, F::one())]; self.nvars];
        let mut out = UniPoly::zero();
        for (a, c) in &self.terms {
            let mut term = UniPoly::monomial(0, c.clone());
            for (j, &e) in a.iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().mul(&coords[j]);
                    powers[j].push(next);
                }
                term = term.mul(&powers[j][e as usize]);
            }
            for (k, d) in term.terms {
                out.add_term(k, d);
            }
        }
        out
    }

    /// `self(s_1, ..., s_n)` for truncated series arguments.
    pub fn eval_series(&self, coords: &[TruncSeries<F>]) -> TruncSeries<F> {
        assert_eq!(coords.len(), self.nvars);
        let trunc = coords.iter().map(TruncSeries::trunc_order).min().unwrap_or(0);
        let mut out = TruncSeries::zero(trunc);
        for (a, c) in &self.terms {
            let m = crate::series::monomial_image(coords, a);
            out = &out + &m.scale(c);
        }
        out
    }
}
