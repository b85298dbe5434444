//! Density matrices, partial traces, the mixed-state form of the cumulant
//! invariants and the trace-norm cumulant invariant `M`.
//!
//! Site `s` (zero-based) of an `n`-qubit matrix index is bit `n-1-s`, the
//! same big-endian convention as the state table.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::cumulant::{enumerate_partitions, Monomial};
use crate::error::{Error, Result};
use crate::invariant::{InvariantIndex, InvariantPlan};

const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues smaller than this in magnitude do not contribute to a trace norm.
pub const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Checks the dimension and Hermiticity (relative `1e-12`).
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Shape(format!(
                "{}x{} matrix for {n} qubits",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermitian_defect(&matrix);
        let scale = matrix.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if defect > HERMITIAN_TOL * scale {
            return Err(Error::Shape(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(Self { n, matrix })
    }

    /// `|psi><psi|`, unnormalised if `psi` is.
    pub fn from_pure(state: &AlgebraElement) -> Result<Self> {
        if state.d() != 2 {
            return Err(Error::UnsupportedDimension(state.d()));
        }
        let a = state.coeffs();
        let dim = a.len();
        let matrix = DMatrix::from_fn(dim, dim, |i, j| a[i] * a[j].conj());
        Ok(Self {
            n: state.n(),
            matrix,
        })
    }

    /// The maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        let matrix =
            DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        Self { n, matrix }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Entry `<row|rho|col>` by table position.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Keeps the listed (zero-based) sites, tracing out the rest. The kept
    /// sites appear in ascending order in the result.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "partial trace must keep at least one site".into(),
            ));
        }
        if let Some(&bad) = keep.iter().find(|&&s| s >= self.n) {
            return Err(Error::InvalidArgument(format!(
                "site {} outside 1..={}",
                bad + 1,
                self.n
            )));
        }
        let traced: Vec<usize> = (0..self.n).filter(|s| !keep.contains(s)).collect();
        let k = keep.len();
        let dim = 1usize << k;
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        for env in 0..1usize << traced.len() {
            let env_bits = scatter(env, &traced, self.n);
            for r in 0..dim {
                let row = env_bits | scatter(r, &keep, self.n);
                for c in 0..dim {
                    let col = env_bits | scatter(c, &keep, self.n);
                    out[(r, c)] += self.matrix[(row, col)];
                }
            }
        }
        Ok(Self { n: k, matrix: out })
    }

    /// Kronecker product with `self` on the leading sites.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            n: self.n + other.n,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }
}

/// Spreads the bits of a `sites.len()`-qubit local index onto the given
/// sites of an `n`-qubit index.
fn scatter(local: usize, sites: &[usize], n: usize) -> usize {
    let k = sites.len();
    sites
        .iter()
        .enumerate()
        .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
        .map(|(_, &s)| 1usize << (n - 1 - s))
        .sum()
}

/// Inverse of [`scatter`]: reads the bits at `sites` into a local index.
fn gather(global: usize, sites: &[usize], n: usize) -> usize {
    sites
        .iter()
        .fold(0, |acc, &s| (acc << 1) | (global >> (n - 1 - s) & 1))
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// The mixed-state polynomial obtained from a closed-form invariant by
/// replacing each `a_{i^1}..a_{i^t} conj(a_{j^1})..conj(a_{j^t})` with the
/// average over pairings `sigma` of `prod_r rho[i^r, j^{sigma(r)}]`.
#[derive(Clone, Debug)]
pub struct HatPlan {
    index: InvariantIndex,
    /// `(row labels, column labels) -> coefficient`
    pairs: BTreeMap<(Monomial, Monomial), Complex64>,
    permutations: Vec<Vec<usize>>,
}

impl HatPlan {
    pub fn new(index: &InvariantIndex) -> Result<Self> {
        let plan = InvariantPlan::new(index)?;
        let mut pairs: BTreeMap<(Monomial, Monomial), Complex64> = BTreeMap::new();
        for (weight, poly) in plan.terms() {
            for (m1, c1) in poly.terms() {
                for (m2, c2) in poly.terms() {
                    *pairs.entry((m1.clone(), m2.clone())).or_default() += *weight * c1 * c2.conj();
                }
            }
        }
        pairs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(Self {
            index: index.clone(),
            pairs,
            permutations: permutations(index.theta()),
        })
    }

    pub fn index(&self) -> &InvariantIndex {
        &self.index
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.n() != self.index.n() {
            return Err(Error::Shape(format!(
                "index {} does not fit a {}-qubit density matrix",
                self.index,
                rho.n()
            )));
        }
        if self.index.theta() < 2 {
            return Ok(rho.trace().re);
        }
        let scale = 1.0 / self.permutations.len() as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for ((rows, cols), coeff) in &self.pairs {
            let mut perm_sum = Complex64::new(0.0, 0.0);
            for sigma in &self.permutations {
                perm_sum += rows
                    .iter()
                    .zip(sigma)
                    .fold(Complex64::new(1.0, 0.0), |acc, (&r, &s)| {
                        acc * rho.entry(r, cols[s])
                    });
            }
            total += coeff * perm_sum;
        }
        Ok(total.re * scale)
    }
}

/// `hat I_index(rho)`; for a single 1 this is `tr rho`.
pub fn mixed_hat_i(rho: &DensityMatrix, index: &InvariantIndex) -> Result<f64> {
    HatPlan::new(index)?.evaluate(rho)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// `rho_c = sum_pi (-1)^{|pi|-1} (|pi|-1)! prod_i rho_{pi_i}`, with every
/// product of marginals laid out in ascending site order.
pub fn zhou_cumulant_operator(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    let n = rho.n();
    if n < 2 {
        return Err(Error::Size(
            "the cumulant operator needs at least 2 sites".into(),
        ));
    }
    let dim = 1usize << n;
    let mut marginals: HashMap<Vec<usize>, DensityMatrix> = HashMap::new();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for pi in enumerate_partitions(n)? {
        for block in pi.blocks() {
            if !marginals.contains_key(block) {
                marginals.insert(block.clone(), rho.partial_trace(block)?);
            }
        }
        let blocks = pi.num_blocks();
        let sign = if blocks % 2 == 1 { 1.0 } else { -1.0 };
        let coeff = sign * (1..blocks).map(|x| x as f64).product::<f64>();
        for r in 0..dim {
            for c in 0..dim {
                let term = pi
                    .blocks()
                    .iter()
                    .fold(Complex64::new(1.0, 0.0), |acc, block| {
                        let m = &marginals[block];
                        acc * m.entry(gather(r, block, n), gather(c, block, n))
                    });
                out[(r, c)] += coeff * term;
            }
        }
    }
    let defect = hermitian_defect(&out);
    if defect > 1e-10 * out.iter().map(|c| c.norm()).fold(1.0, f64::max) {
        return Err(Error::Shape(format!(
            "cumulant operator not Hermitian (defect {defect:e})"
        )));
    }
    Ok(out)
}

/// `tr |H|` of a Hermitian matrix from its eigenvalues.
pub fn trace_norm(h: &DMatrix<Complex64>) -> f64 {
    h.clone()
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.abs())
        .filter(|&l| l >= EIGEN_FLOOR)
        .sum()
}

/// `M_index(psi) = tr|(tr_{0-sites} |psi><psi|)_c| / 2`.
pub fn zhou_m(state: &AlgebraElement, index: &InvariantIndex) -> Result<f64> {
    if index.n() != state.n() {
        return Err(Error::Shape(format!(
            "index {index} vs {} sites",
            state.n()
        )));
    }
    if index.theta() < 2 {
        return Err(Error::InvalidIndex(format!(
            "{index}: M needs at least two kept sites"
        )));
    }
    let rho = DensityMatrix::from_pure(state)?.partial_trace(&index.ones())?;
    Ok(0.5 * trace_norm(&zhou_cumulant_operator(&rho)?))
}
