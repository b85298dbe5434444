//! Twirled cumulant invariants `I_{i_1...i_n}` of qubit states.
//!
//! For an index with `theta >= 2` ones the Haar integral of `|d|^2` over
//! `SU(2)^n` collapses, by Schur orthogonality of the weight vectors, to
//!
//! ```text
//! I = sum_k (prod_p alpha^{i_p}_{k_p}) |prod_p R_{p,k_p} d|^2
//! ```
//!
//! with `alpha^0_k = 1/C(theta, k)` for `k = 0..=theta` and
//! `alpha^1_k = 1/C(theta-2, k)` for `k = 0..=theta-2`. The weights multiply
//! the squared modulus; they are not inside it. A single 1 gives `<psi|psi>`.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{AlgebraElement, MultiIndex};
use crate::cumulant::{cumulant_poly, APolynomial};
use crate::error::{Error, Result};
use crate::haar::binomial;

pub mod jacobian;
pub mod report;
pub mod sudbery;

pub use jacobian::{jacobian_rank, jacobian_singular_values};
pub use report::{InvariantEntry, InvariantReport, Method};
pub use sudbery::{check_relations, sudbery_j, RelationCheck, SudberyJ};

/// A bit-string invariant label with at least one 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantIndex {
    bits: MultiIndex,
}

impl InvariantIndex {
    pub fn new(bits: MultiIndex) -> Result<Self> {
        if bits.digits().iter().any(|&x| x > 1) {
            return Err(Error::InvalidIndex(format!("{bits} is not a bit string")));
        }
        if bits.weight() == 0 {
            return Err(Error::InvalidIndex(format!("{bits} has no 1s")));
        }
        Ok(Self { bits })
    }

    /// From a zero-based list of 1-positions.
    pub fn from_ones(n: usize, ones: &[usize]) -> Result<Self> {
        let mut digits = vec![0u8; n];
        for &s in ones {
            if s >= n {
                return Err(Error::InvalidIndex(format!(
                    "site {} outside 1..={n}",
                    s + 1
                )));
            }
            digits[s] = 1;
        }
        Self::new(MultiIndex::new(digits, 2)?)
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn theta(&self) -> usize {
        self.bits.weight()
    }

    pub fn bits(&self) -> &[u8] {
        self.bits.digits()
    }

    pub fn as_multi(&self) -> &MultiIndex {
        &self.bits
    }

    /// Zero-based positions of the 1s.
    pub fn ones(&self) -> Vec<usize> {
        self.bits()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(s, _)| s)
            .collect()
    }

    /// The index with its digits permuted: site `s` moves to `perm[s]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::Shape("permutation length".into()));
        }
        let mut digits = vec![0u8; self.n()];
        for (s, &b) in self.bits().iter().enumerate() {
            digits[perm[s]] = b;
        }
        Self::new(MultiIndex::new(digits, 2)?)
    }

    /// Polynomial degree `2 theta` of the invariant.
    pub fn degree(&self) -> usize {
        2 * self.theta()
    }
}

impl FromStr for InvariantIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

impl fmt::Display for InvariantIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.fmt(f)
    }
}

/// `gamma_{n,theta} = (theta+1)^{n-theta} (theta-1)^theta`, with the
/// single-1 case `gamma_{n,1} = 2^n`.
pub fn gamma(n: usize, theta: usize) -> f64 {
    if theta == 1 {
        return 2f64.powi(n as i32);
    }
    ((theta + 1) as f64).powi((n - theta) as i32) * ((theta - 1) as f64).powi(theta as i32)
}

/// The closed form of one invariant as a weighted sum of squared moduli.
#[derive(Clone, Debug)]
pub struct InvariantPlan {
    index: InvariantIndex,
    /// `(weight, R d)` pairs; empty for the single-1 (norm) case.
    terms: Vec<(f64, APolynomial)>,
}

impl InvariantPlan {
    pub fn new(index: &InvariantIndex) -> Result<Self> {
        let theta = index.theta();
        if theta == 1 {
            return Ok(Self {
                index: index.clone(),
                terms: Vec::new(),
            });
        }
        let mut terms = vec![(1.0, cumulant_poly(index.as_multi())?)];
        for (site, &bit) in index.bits().iter().enumerate() {
            let top = if bit == 0 { theta } else { theta - 2 };
            let mut next = Vec::with_capacity(terms.len() * (top + 1));
            for (weight, poly) in &terms {
                for k in 0..=top {
                    let raised = poly.raise(site, k);
                    if !raised.is_zero() {
                        next.push((weight / binomial(top, k), raised));
                    }
                }
            }
            terms = next;
        }
        Ok(Self {
            index: index.clone(),
            terms,
        })
    }

    pub fn index(&self) -> &InvariantIndex {
        &self.index
    }

    /// `(weight, polynomial)` pairs with `I = sum weight |polynomial|^2`.
    /// Empty when the invariant is the squared norm.
    pub fn terms(&self) -> &[(f64, APolynomial)] {
        &self.terms
    }

    pub fn is_norm(&self) -> bool {
        self.index.theta() == 1
    }

    pub fn evaluate(&self, state: &AlgebraElement) -> Result<f64> {
        if state.d() != 2 {
            return Err(Error::UnsupportedDimension(state.d()));
        }
        if state.n() != self.index.n() {
            return Err(Error::Shape(format!(
                "index {} does not fit a {}-site state",
                self.index,
                state.n()
            )));
        }
        Ok(self.evaluate_amplitudes(state.coeffs()))
    }

    /// Evaluates at a raw amplitude table; no shape checks.
    pub fn evaluate_amplitudes(&self, amps: &[num_complex::Complex64]) -> f64 {
        if self.is_norm() {
            return amps.iter().map(|a| a.norm_sqr()).sum();
        }
        self.terms
            .iter()
            .map(|(w, p)| w * p.evaluate_amplitudes(amps).norm_sqr())
            .sum()
    }
}

/// The closed-form invariant `I_index(state)`.
pub fn invariant_i(state: &AlgebraElement, index: &InvariantIndex) -> Result<f64> {
    InvariantPlan::new(index)?.evaluate(state)
}

/// The cumulant family on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantFamily {
    /// `10...0` followed by every index with two or more 1s.
    pub indices: Vec<InvariantIndex>,
    /// Total number of independent invariants, `2^{n+1} - (3n+1)`, for `n >= 3`.
    pub total_invariants: Option<u64>,
}

/// `2^n - n` algebraically independent cumulant invariants.
pub fn cumulant_family(n: usize) -> Result<CumulantFamily> {
    if !(2..=20).contains(&n) {
        return Err(Error::Size(format!(
            "family defined for 2 <= n <= 20, got {n}"
        )));
    }
    let mut indices = vec![InvariantIndex::from_ones(n, &[0])?];
    let mut rest: Vec<InvariantIndex> = (0..1usize << n)
        .map(|v| MultiIndex::from_linear(v, n, 2))
        .filter(|m| m.weight() >= 2)
        .map(|m| InvariantIndex::new(m).expect("bit string with 1s"))
        .collect();
    // by theta, then descending bit value (110 before 101 before 011)
    rest.sort_by(|a, b| {
        a.theta()
            .cmp(&b.theta())
            .then_with(|| b.as_multi().to_linear(2).cmp(&a.as_multi().to_linear(2)))
    });
    indices.extend(rest);
    let total_invariants = (n >= 3).then(|| (1u64 << (n + 1)) - (3 * n as u64 + 1));
    Ok(CumulantFamily {
        indices,
        total_invariants,
    })
}
