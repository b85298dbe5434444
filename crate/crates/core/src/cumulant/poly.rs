//! Formal polynomials in qubit amplitudes `a_{i_1...i_n}`.
//!
//! A monomial is a sorted multiset of amplitude labels. A label is the table
//! position of a bit string (site 1 is the most significant bit), so the
//! sort order is the mixed-radix order of the multi-indices.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, MultiIndex};
use crate::cumulant::partition::enumerate_partitions;
use crate::error::{Error, Result};

/// Sorted amplitude labels; the product of the corresponding amplitudes.
pub type Monomial = Vec<usize>;

/// Bit of `site` (zero-based) in an `n`-site label.
pub fn site_bit(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

/// A homogeneous polynomial in the amplitudes of an `n`-qubit state.
#[derive(Clone, Debug, PartialEq)]
pub struct APolynomial {
    n: usize,
    degree: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl APolynomial {
    /// Canonicalises, merges like monomials and drops zero coefficients.
    pub fn new(
        n: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (Monomial, Complex64)>,
    ) -> Result<Self> {
        let mut out = Self::zero(n, degree);
        for (mut mono, coeff) in terms {
            if mono.len() != degree {
                return Err(Error::Shape(format!(
                    "monomial of degree {} in a degree-{degree} polynomial",
                    mono.len()
                )));
            }
            if let Some(bad) = mono.iter().find(|&&f| f >= 1 << n) {
                return Err(Error::Shape(format!(
                    "amplitude label {bad} out of range for n={n}"
                )));
            }
            mono.sort_unstable();
            out.add_term(mono, coeff);
        }
        Ok(out)
    }

    pub fn zero(n: usize, degree: usize) -> Self {
        Self {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The degree-one polynomial `a_label`.
    pub fn amplitude(n: usize, label: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![label], Complex64::new(1.0, 0.0));
        Self {
            n,
            degree: 1,
            terms,
        }
    }

    fn add_term(&mut self, mono: Monomial, coeff: Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == zero {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if coeff != zero {
                    e.insert(coeff);
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &[usize]) -> Complex64 {
        let mut key = mono.to_vec();
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or_default()
    }

    /// Evaluates at a qubit state.
    pub fn evaluate(&self, state: &AlgebraElement) -> Result<Complex64> {
        if state.d() != 2 {
            return Err(Error::UnsupportedDimension(state.d()));
        }
        if state.n() != self.n {
            return Err(Error::Shape(format!(
                "polynomial on {} sites evaluated at a {}-site state",
                self.n,
                state.n()
            )));
        }
        Ok(self.evaluate_amplitudes(state.coeffs()))
    }

    /// Evaluates at a raw amplitude table of length `2^n`.
    pub fn evaluate_amplitudes(&self, amps: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(mono, coeff)| mono.iter().fold(*coeff, |acc, &f| acc * amps[f]))
            .sum()
    }

    /// The raising operator `R_{site,k}`: the coefficient of `x^k` in the
    /// product of `(1 + x S_site)` over the factors of each monomial, where
    /// `S_site` flips a 0 at `site` to 1 and annihilates a factor already at 1.
    pub fn raise(&self, site: usize, k: usize) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        if k > self.degree {
            return out;
        }
        let bit = site_bit(self.n, site);
        for (mono, coeff) in &self.terms {
            let free: Vec<usize> = (0..mono.len()).filter(|&q| mono[q] & bit == 0).collect();
            for_each_subset(free.len(), k, |chosen| {
                let mut next = mono.clone();
                for &c in chosen {
                    next[free[c]] |= bit;
                }
                next.sort_unstable();
                out.add_term(next, *coeff);
            });
        }
        out
    }

    /// The lowering map `L_site`: every factor's digit at `site` is set to 0.
    pub fn lower(&self, site: usize) -> Self {
        let bit = site_bit(self.n, site);
        let mut out = Self::zero(self.n, self.degree);
        for (mono, coeff) in &self.terms {
            let mut next: Monomial = mono.iter().map(|f| f & !bit).collect();
            next.sort_unstable();
            out.add_term(next, *coeff);
        }
        out
    }

    /// Product of two polynomials on the same sites.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape(format!("{} vs {} sites", self.n, other.n)));
        }
        let mut out = Self::zero(self.n, self.degree + other.degree);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut mono = m1.clone();
                mono.extend_from_slice(m2);
                mono.sort_unstable();
                out.add_term(mono, c1 * c2);
            }
        }
        Ok(out)
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: Complex64) -> Result<Self> {
        if self.n != other.n || (self.degree != other.degree && !other.is_zero() && !self.is_zero())
        {
            return Err(Error::Shape("adding polynomials of different shape".into()));
        }
        let degree = if self.is_zero() {
            other.degree
        } else {
            self.degree
        };
        let mut out = Self {
            n: self.n,
            degree,
            terms: self.terms.clone(),
        };
        for (mono, coeff) in &other.terms {
            out.add_term(mono.clone(), coeff * factor);
        }
        Ok(out)
    }
}

impl fmt::Display for APolynomial {
    /// Renders e.g. `a11*a00 - a10*a01`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (mono, coeff)) in self.terms.iter().enumerate() {
            let (sign, mag) = if coeff.im == 0.0 && coeff.re < 0.0 {
                ("-", -*coeff)
            } else {
                ("+", *coeff)
            };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else if sign == "-" {
                f.write_str("-")?;
            }
            if mag != Complex64::new(1.0, 0.0) {
                if mag.im == 0.0 {
                    write!(f, "{}*", mag.re)?;
                } else {
                    write!(f, "({mag})*")?;
                }
            }
            for (j, &label) in mono.iter().rev().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                write!(f, "a{}", MultiIndex::from_linear(label, self.n, 2))?;
            }
        }
        Ok(())
    }
}

/// Calls `visit` with every `k`-subset of `0..len`, in lexicographic order.
pub(crate) fn for_each_subset(len: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > len {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < len - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The cumulant polynomial `d_index = a_{0...0}^theta c_index` as a sum over
/// partitions of the 1-positions.
pub fn cumulant_poly(index: &MultiIndex) -> Result<APolynomial> {
    if index.digits().iter().any(|&x| x > 1) {
        return Err(Error::UnsupportedDimension(
            *index.digits().iter().max().unwrap() as usize + 1,
        ));
    }
    let n = index.len();
    let ones: Vec<usize> = index
        .digits()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x == 1)
        .map(|(s, _)| s)
        .collect();
    let theta = ones.len();
    if theta == 0 {
        return Err(Error::InvalidIndex(
            "the all-zero index has no cumulant polynomial".into(),
        ));
    }
    let mut terms = Vec::new();
    for pi in enumerate_partitions(theta)? {
        let blocks = pi.num_blocks();
        let sign = if blocks % 2 == 1 { 1.0 } else { -1.0 };
        let coeff = sign * factorial(blocks - 1);
        let mut mono = vec![0usize; theta - blocks];
        for block in pi.blocks() {
            mono.push(block.iter().map(|&b| site_bit(n, ones[b])).sum());
        }
        terms.push((mono, Complex64::new(coeff, 0.0)));
    }
    APolynomial::new(n, theta, terms)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}
