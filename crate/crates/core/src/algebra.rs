//! The commutative nilpotent algebra on `n` sites of local dimension `d`.
//!
//! An element is stored as a dense table of `d^n` complex coefficients. The
//! basis monomial `e_1^{i_1} ... e_n^{i_n}` is identified with the product
//! basis state `|i_1 ... i_n>`, so an element doubles as an unnormalised
//! state vector. Table position is the mixed-radix value of the digits with
//! site 1 most significant.
//!
//! Every generator satisfies `e_i^d = 0`, so the non-constant part `r` of an
//! element obeys `r^{n(d-1)+1} = 0` and analytic functions reduce to finite
//! Taylor sums around the constant coefficient.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative threshold below which the constant coefficient is
/// treated as zero by [`AlgebraElement::inverse`] and [`AlgebraElement::log`].
pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 1e-12;

/// A fixed-length digit string `i_1 ... i_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    digits: Vec<u8>,
}

impl MultiIndex {
    pub fn new(digits: Vec<u8>, d: usize) -> Result<Self> {
        if let Some(bad) = digits.iter().find(|&&x| x as usize >= d) {
            return Err(Error::InvalidIndex(format!(
                "digit {bad} is not below local dimension {d}"
            )));
        }
        Ok(Self { digits })
    }

    /// Decodes a table position back into digits.
    pub fn from_linear(mut value: usize, n: usize, d: usize) -> Self {
        let mut digits = vec![0u8; n];
        for slot in digits.iter_mut().rev() {
            *slot = (value % d) as u8;
            value /= d;
        }
        Self { digits }
    }

    pub fn to_linear(&self, d: usize) -> usize {
        self.digits.iter().fold(0, |acc, &x| acc * d + x as usize)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Sum of the digits; for bit strings this is the number of ones.
    pub fn weight(&self) -> usize {
        self.digits.iter().map(|&x| x as usize).sum()
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Parses a string of decimal digits such as `"110"` or `"0212"`.
    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|x| x as u8)
                    .ok_or_else(|| Error::InvalidIndex(format!("'{s}' is not a digit string")))
            })
            .collect::<Result<Vec<_>>>()?;
        if digits.is_empty() {
            return Err(Error::InvalidIndex("empty index".into()));
        }
        Ok(Self { digits })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.digits {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// An element of the state algebra, equivalently an unnormalised state.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    n: usize,
    d: usize,
    coeffs: Vec<Complex64>,
}

impl AlgebraElement {
    pub fn new(n: usize, d: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Shape(format!(
                "local dimension must be at least 2, got {d}"
            )));
        }
        let expected = table_size(n, d)?;
        if coeffs.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} coefficients for n={n}, d={d}, got {}",
                coeffs.len()
            )));
        }
        if let Some(pos) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::Shape(format!("coefficient {pos} is not finite")));
        }
        Ok(Self { n, d, coeffs })
    }

    /// A qubit element from its amplitudes.
    pub fn qubits(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(n, 2, coeffs)
    }

    pub fn zero(n: usize, d: usize) -> Self {
        let size = d.pow(n as u32);
        Self {
            n,
            d,
            coeffs: vec![Complex64::new(0.0, 0.0); size],
        }
    }

    /// The identity element, i.e. the state `|0...0>`.
    pub fn identity(n: usize, d: usize) -> Self {
        let mut out = Self::zero(n, d);
        out.coeffs[0] = Complex64::new(1.0, 0.0);
        out
    }

    /// Builds an element whose coefficient at each index is `f(index)`.
    pub fn from_fn(
        n: usize,
        d: usize,
        mut f: impl FnMut(&MultiIndex) -> Complex64,
    ) -> Result<Self> {
        let size = table_size(n, d)?;
        let coeffs = (0..size)
            .map(|v| f(&MultiIndex::from_linear(v, n, d)))
            .collect();
        Self::new(n, d, coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, index: &MultiIndex) -> Complex64 {
        self.coeffs[index.to_linear(self.d)]
    }

    /// Coefficient at table position `linear`.
    pub fn at(&self, linear: usize) -> Complex64 {
        self.coeffs[linear]
    }

    /// The coefficient `a_{0...0}`.
    pub fn constant(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Everything except the constant coefficient.
    pub fn nilpotent_part(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::new(0.0, 0.0);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `<psi|psi>`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            n: self.n,
            d: self.d,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Returns a copy scaled to unit norm. A zero element is returned unchanged.
    pub fn normalized(&self) -> Self {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return self.clone();
        }
        self.scale(Complex64::new(1.0 / norm, 0.0))
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::Shape(format!(
                "(n={}, d={}) vs (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }

    /// The algebra product. Index digits add without carry; any digit sum
    /// reaching `d` annihilates the term.
    pub fn product(&self, rhs: &Self) -> Result<Self> {
        self.check_shape(rhs)?;
        let (n, d) = (self.n, self.d);
        let size = self.coeffs.len();
        let digits: Vec<Vec<u8>> = (0..size)
            .map(|v| MultiIndex::from_linear(v, n, d).digits)
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); size];
        for (u, lu) in self.coeffs.iter().enumerate() {
            if *lu == Complex64::new(0.0, 0.0) {
                continue;
            }
            'rhs: for (w, rw) in rhs.coeffs.iter().enumerate() {
                if *rw == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (x, y) in digits[u].iter().zip(&digits[w]) {
                    if (x + y) as usize >= d {
                        continue 'rhs;
                    }
                }
                // digit-wise addition without carries is plain addition of
                // the mixed-radix values
                out[u + w] += lu * rw;
            }
        }
        Ok(Self { n, d, coeffs: out })
    }

    /// Highest power of the nilpotent part that can be non-zero.
    pub fn nilpotency_order(&self) -> usize {
        self.n * (self.d - 1)
    }

    /// Linear positions of every index digit-wise below `v`, `0` and `v` included.
    fn sub_indices(&self, v: usize) -> Vec<usize> {
        let digits = MultiIndex::from_linear(v, self.n, self.d).digits;
        let mut out = vec![0usize];
        let mut place = 1usize;
        for &digit in digits.iter().rev() {
            let base = out.len();
            for k in 1..=digit as usize {
                for j in 0..base {
                    out.push(out[j] + k * place);
                }
            }
            place *= self.d;
        }
        out
    }

    /// Digit sum of every position; the product adds these.
    fn weights(&self) -> Vec<f64> {
        (0..self.coeffs.len())
            .map(|v| MultiIndex::from_linear(v, self.n, self.d).weight() as f64)
            .collect()
    }

    fn check_invertible(&self, threshold: f64) -> Result<()> {
        let magnitude = self.constant().norm();
        let limit = threshold * self.max_abs();
        if magnitude == 0.0 || magnitude < limit {
            return Err(Error::Singular {
                magnitude,
                threshold: limit,
            });
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(DEFAULT_SINGULAR_THRESHOLD)
    }

    /// Inverse with a caller-chosen relative singularity threshold.
    pub fn inverse_with(&self, threshold: f64) -> Result<Self> {
        self.check_invertible(threshold)?;
        let a0 = self.constant();
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        out[0] = a0.inv();
        for v in 1..out.len() {
            // a b = 1 at position v, solved for b_v
            let sum: Complex64 = self
                .sub_indices(v)
                .into_iter()
                .filter(|&u| u != 0)
                .map(|u| self.coeffs[u] * out[v - u])
                .sum();
            out[v] = -sum / a0;
        }
        Ok(Self {
            n: self.n,
            d: self.d,
            coeffs: out,
        })
    }

    pub fn log(&self) -> Result<Self> {
        self.log_with(DEFAULT_SINGULAR_THRESHOLD)
    }

    /// Logarithm using the principal branch for the constant term.
    ///
    /// The digit-sum grading `D` is a derivation, so `D a = a D(log a)`,
    /// which fixes each coefficient from lower-weight ones.
    pub fn log_with(&self, threshold: f64) -> Result<Self> {
        self.check_invertible(threshold)?;
        let a0 = self.constant();
        let w = self.weights();
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        out[0] = a0.ln();
        for v in 1..out.len() {
            let sum: Complex64 = self
                .sub_indices(v)
                .into_iter()
                .filter(|&u| u != 0 && u != v)
                .map(|u| w[u] * out[u] * self.coeffs[v - u])
                .sum();
            out[v] = (w[v] * self.coeffs[v] - sum) / (a0 * w[v]);
        }
        Ok(Self {
            n: self.n,
            d: self.d,
            coeffs: out,
        })
    }

    /// Exponential from `D exp(x) = exp(x) D x`.
    pub fn exp(&self) -> Self {
        let w = self.weights();
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
        out[0] = self.constant().exp();
        for v in 1..out.len() {
            let sum: Complex64 = self
                .sub_indices(v)
                .into_iter()
                .filter(|&u| u != 0)
                .map(|u| w[u] * self.coeffs[u] * out[v - u])
                .sum();
            out[v] = sum / w[v];
        }
        Self {
            n: self.n,
            d: self.d,
            coeffs: out,
        }
    }
}

fn table_size(n: usize, d: usize) -> Result<usize> {
    u32::try_from(n)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .filter(|&s| s <= 1 << 24)
        .ok_or_else(|| Error::Size(format!("d^n too large for n={n}, d={d}")))
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;

    fn add(self, rhs: Self) -> AlgebraElement {
        assert_eq!(
            (self.n, self.d),
            (rhs.n, rhs.d),
            "shape mismatch in addition"
        );
        AlgebraElement {
            n: self.n,
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;

    fn sub(self, rhs: Self) -> AlgebraElement {
        assert_eq!(
            (self.n, self.d),
            (rhs.n, rhs.d),
            "shape mismatch in subtraction"
        );
        AlgebraElement {
            n: self.n,
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;

    fn neg(self) -> AlgebraElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two-qubit element `a00 + a10 e1 + a01 e2 + a11 e1 e2`.
    fn two(a00: Complex64, a10: Complex64, a01: Complex64, a11: Complex64) -> AlgebraElement {
        // table order: 00, 01, 10, 11
        AlgebraElement::qubits(2, vec![a00, a01, a10, a11]).unwrap()
    }

    #[test]
    fn multi_index_round_trip() {
        let idx: MultiIndex = "0212".parse().unwrap();
        assert_eq!(idx.to_linear(3), 2 * 9 + 3 + 2);
        assert_eq!(MultiIndex::from_linear(23, 4, 3), idx);
        assert!(MultiIndex::new(vec![0, 2], 2).is_err());
        assert!("1a".parse::<MultiIndex>().is_err());
    }

    #[test]
    fn product_of_distinct_generators() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let x = two(one, one, zero, zero);
        let y = two(one, zero, one, zero);
        assert_eq!(x.product(&y).unwrap(), two(one, one, one, one));
    }

    #[test]
    fn product_square_of_e1e2_vanishes() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let x = two(one, zero, zero, one);
        assert_eq!(x.product(&x).unwrap(), two(one, zero, zero, c(2.0, 0.0)));
    }

    #[test]
    fn product_two_qubit_general() {
        let a = two(c(1.0, 0.5), c(-0.3, 2.0), c(0.7, 0.1), c(0.2, -0.9));
        let b = two(c(0.4, -1.0), c(1.1, 0.3), c(-0.6, 0.8), c(0.5, 0.5));
        let p = a.product(&b).unwrap();
        let (a00, a10, a01, a11) = (a.at(0), a.at(2), a.at(1), a.at(3));
        let (b00, b10, b01, b11) = (b.at(0), b.at(2), b.at(1), b.at(3));
        assert!((p.at(2) - (a00 * b10 + a10 * b00)).norm() < 1e-15);
        assert!((p.at(1) - (a00 * b01 + a01 * b00)).norm() < 1e-15);
        let e1e2 = a00 * b11 + a10 * b01 + a01 * b10 + a11 * b00;
        assert!((p.at(3) - e1e2).norm() < 1e-14);
    }

    #[test]
    fn product_rejects_shape_mismatch() {
        let a = AlgebraElement::identity(2, 2);
        let b = AlgebraElement::identity(3, 2);
        let q = AlgebraElement::identity(2, 3);
        assert!(matches!(a.product(&b), Err(Error::Shape(_))));
        assert!(matches!(a.product(&q), Err(Error::Shape(_))));
    }

    #[test]
    fn inverse_examples() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let x = two(one, zero, zero, one);
        assert_eq!(x.inverse().unwrap(), two(one, zero, zero, c(-1.0, 0.0)));
        let id = AlgebraElement::identity(3, 2);
        assert_eq!(id.inverse().unwrap(), id);

        let (a00, a10, a01, a11) = (c(1.3, -0.2), c(0.4, 0.9), c(-0.8, 0.3), c(0.6, 0.1));
        let inv = two(a00, a10, a01, a11).inverse().unwrap();
        let expected = -a11 / (a00 * a00) + 2.0 * a10 * a01 / (a00 * a00 * a00);
        assert!((inv.at(3) - expected).norm() < 1e-14);
        assert!((inv.at(2) + a10 / (a00 * a00)).norm() < 1e-14);
        assert!((inv.at(0) - a00.inv()).norm() < 1e-14);
    }

    #[test]
    fn inverse_rejects_singular() {
        let x = two(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(x.inverse(), Err(Error::Singular { .. })));
        assert!(matches!(x.log(), Err(Error::Singular { .. })));
        let tiny = two(c(1e-14, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(tiny.inverse().is_err());
        assert!(tiny.inverse_with(1e-16).is_ok());
    }

    #[test]
    fn log_examples() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert_eq!(
            two(one, zero, zero, one).log().unwrap(),
            two(zero, zero, zero, one)
        );
        let l = two(one, one, one, one).log().unwrap();
        assert!(l.max_abs_diff(&two(zero, one, one, zero)) < 1e-15);

        let (a00, a10, a01, a11) = (c(0.9, 0.4), c(0.4, -0.2), c(0.1, 0.3), c(-0.5, 0.6));
        let l = two(a00, a10, a01, a11).log().unwrap();
        assert!((l.at(2) - a10 / a00).norm() < 1e-14);
        assert!((l.at(1) - a01 / a00).norm() < 1e-14);
        assert!((l.at(3) - (a11 / a00 - a10 * a01 / (a00 * a00))).norm() < 1e-14);
        assert!((l.at(0) - a00.ln()).norm() < 1e-14);
    }

    #[test]
    fn exp_examples() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert_eq!(
            AlgebraElement::zero(3, 2).exp(),
            AlgebraElement::identity(3, 2)
        );
        let e = two(zero, one, one, zero).exp();
        assert!(e.max_abs_diff(&two(one, one, one, one)) < 1e-15);
    }

    /// `sum_k series[k] r^k` with explicit powers of the nilpotent part.
    fn taylor(x: &AlgebraElement, series: &[Complex64]) -> AlgebraElement {
        let r = x.nilpotent_part();
        let mut acc = AlgebraElement::zero(x.n(), x.d());
        let mut power = AlgebraElement::identity(x.n(), x.d());
        for (k, coeff) in series.iter().enumerate() {
            if k > 0 {
                power = power.product(&r).unwrap();
            }
            acc = &acc + &power.scale(*coeff);
        }
        acc
    }

    #[test]
    fn recurrences_match_taylor_series() {
        for (n, d) in [(1usize, 3usize), (2, 2), (3, 2), (2, 3), (3, 3)] {
            let size = d.pow(n as u32);
            let x = AlgebraElement::new(
                n,
                d,
                (0..size)
                    .map(|v| c(0.3 + 0.1 * v as f64, 0.2 - 0.05 * v as f64))
                    .collect(),
            )
            .unwrap();
            let a0 = x.constant();
            let order = x.nilpotency_order();
            let inv: Vec<Complex64> = (0..=order)
                .map(|k| (-1f64).powi(k as i32) / a0.powu(k as u32 + 1))
                .collect();
            let mut log = vec![a0.ln()];
            log.extend(
                (1..=order).map(|k| (-1f64).powi(k as i32 + 1) / (k as f64 * a0.powu(k as u32))),
            );
            let mut exp = vec![a0.exp()];
            for k in 1..=order {
                exp.push(exp[k - 1] / k as f64);
            }
            let close = |got: AlgebraElement, want: AlgebraElement| {
                got.max_abs_diff(&want) < 1e-13 * want.max_abs()
            };
            assert!(
                close(x.inverse().unwrap(), taylor(&x, &inv)),
                "inverse n={n} d={d}"
            );
            assert!(close(x.log().unwrap(), taylor(&x, &log)), "log n={n} d={d}");
            assert!(close(x.exp(), taylor(&x, &exp)), "exp n={n} d={d}");
        }
    }

    #[test]
    fn qutrit_nilpotency() {
        // e1 in A_1^(3): e1^2 != 0 but e1^3 = 0
        let e1 = AlgebraElement::new(1, 3, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let sq = e1.product(&e1).unwrap();
        assert_eq!(sq.at(2), c(1.0, 0.0));
        assert_eq!(sq.product(&e1).unwrap(), AlgebraElement::zero(1, 3));
        assert_eq!(e1.nilpotency_order(), 2);
    }

    #[test]
    fn construction_checks() {
        assert!(AlgebraElement::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(AlgebraElement::new(1, 2, vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
        assert!(AlgebraElement::new(1, 1, vec![c(1.0, 0.0)]).is_err());
    }
}
