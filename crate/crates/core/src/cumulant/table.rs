use num_complex::Complex64;

use crate::algebra::{AlgebraElement, MultiIndex};
use crate::cumulant::partition::{splits_partition, SetPartition};
use crate::error::Result;

/// Coefficients `c_{i_1...i_n}` of the algebra logarithm of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantTable {
    log: AlgebraElement,
}

impl CumulantTable {
    /// Cumulants of `state`; fails when `a_{0...0}` is singular.
    pub fn from_state(state: &AlgebraElement) -> Result<Self> {
        Ok(Self { log: state.log()? })
    }

    /// Wraps an arbitrary coefficient table as cumulants.
    pub fn from_values(values: AlgebraElement) -> Self {
        Self { log: values }
    }

    pub fn n(&self) -> usize {
        self.log.n()
    }

    pub fn d(&self) -> usize {
        self.log.d()
    }

    pub fn get(&self, index: &MultiIndex) -> Complex64 {
        self.log.get(index)
    }

    pub fn values(&self) -> &AlgebraElement {
        &self.log
    }

    /// Sets every cumulant whose index splits `pi` to zero.
    pub fn without_splitting(&self, pi: &SetPartition) -> Self {
        let (n, d) = (self.n(), self.d());
        let coeffs = self
            .log
            .coeffs()
            .iter()
            .enumerate()
            .map(|(v, c)| {
                if splits_partition(&MultiIndex::from_linear(v, n, d), pi) {
                    Complex64::new(0.0, 0.0)
                } else {
                    *c
                }
            })
            .collect();
        Self {
            log: AlgebraElement::new(n, d, coeffs).expect("same shape"),
        }
    }

    /// The state whose logarithm is this table.
    pub fn to_state(&self) -> AlgebraElement {
        self.log.exp()
    }
}
