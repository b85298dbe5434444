//! Named and random qubit states.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::algebra::AlgebraElement;
use crate::cumulant::SetPartition;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Random,
    Bell,
    Ghz,
    W,
    Separable,
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => Self::Random,
            "bell" => Self::Bell,
            "ghz" => Self::Ghz,
            "w" => Self::W,
            "separable" => Self::Separable,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown state kind '{other}'"
                )))
            }
        })
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Random => "random",
            Self::Bell => "bell",
            Self::Ghz => "ghz",
            Self::W => "w",
            Self::Separable => "separable",
        })
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Normalised state with i.i.d. standard complex Gaussian amplitudes.
pub fn random_state_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AlgebraElement {
    let amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    AlgebraElement::qubits(n, amps)
        .expect("finite amplitudes")
        .normalized()
}

pub fn random_state(n: usize, seed: u64) -> AlgebraElement {
    random_state_with(n, &mut ChaCha20Rng::seed_from_u64(seed))
}

/// `(|00> + |11>)/sqrt 2`.
pub fn bell() -> AlgebraElement {
    ghz(2)
}

/// `(|0...0> + |1...1>)/sqrt 2`.
pub fn ghz(n: usize) -> AlgebraElement {
    let mut amps = vec![real(0.0); 1 << n];
    amps[0] = real(std::f64::consts::FRAC_1_SQRT_2);
    amps[(1 << n) - 1] = real(std::f64::consts::FRAC_1_SQRT_2);
    AlgebraElement::qubits(n, amps).expect("valid shape")
}

/// Equal superposition of the single-excitation basis states.
pub fn w_state(n: usize) -> AlgebraElement {
    let mut amps = vec![real(0.0); 1 << n];
    for s in 0..n {
        amps[1 << s] = real(1.0 / (n as f64).sqrt());
    }
    AlgebraElement::qubits(n, amps).expect("valid shape")
}

/// `lhs` on the leading sites, `rhs` on the trailing ones.
pub fn tensor_product(lhs: &AlgebraElement, rhs: &AlgebraElement) -> AlgebraElement {
    let (a, b) = (lhs.coeffs(), rhs.coeffs());
    let amps = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect();
    AlgebraElement::new(lhs.n() + rhs.n(), lhs.d(), amps).expect("valid shape")
}

/// Embeds a state on `sites.len()` qudits into `n` sites, placing it on
/// `sites` (ascending, zero-based) with all other digits zero.
pub fn embed(state: &AlgebraElement, sites: &[usize], n: usize) -> Result<AlgebraElement> {
    if sites.len() != state.n() || sites.iter().any(|&s| s >= n) {
        return Err(Error::Shape(format!(
            "cannot place {} sites onto {sites:?} of {n}",
            state.n()
        )));
    }
    let d = state.d();
    let mut out = AlgebraElement::zero(n, d).into_coeffs();
    for (local, c) in state.coeffs().iter().enumerate() {
        let digits = crate::algebra::MultiIndex::from_linear(local, sites.len(), d);
        let global: usize = digits
            .digits()
            .iter()
            .zip(sites)
            .map(|(&x, &s)| x as usize * d.pow((n - 1 - s) as u32))
            .sum();
        out[global] = *c;
    }
    AlgebraElement::new(n, d, out)
}

/// Tensor product of one random factor per block of `partition`, built as an
/// algebra product of the embedded factors.
pub fn separable_state<R: Rng + ?Sized>(partition: &SetPartition, rng: &mut R) -> AlgebraElement {
    let n = partition.ground_size();
    let mut acc = AlgebraElement::identity(n, 2);
    for block in partition.blocks() {
        let factor = random_state_with(block.len(), rng);
        let placed = embed(&factor, block, n).expect("block inside ground set");
        acc = acc.product(&placed).expect("same shape");
    }
    acc
}

/// Moves site `s` to `perm[s]`.
pub fn permute_sites(state: &AlgebraElement, perm: &[usize]) -> Result<AlgebraElement> {
    let n = state.n();
    let mut check = perm.to_vec();
    check.sort_unstable();
    if check != (0..n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!(
            "{perm:?} is not a permutation of {n} sites"
        )));
    }
    AlgebraElement::from_fn(n, state.d(), |idx| {
        // idx is the new index; its digit at perm[s] came from old site s
        let old: Vec<u8> = (0..n).map(|s| idx.digits()[perm[s]]).collect();
        state.get(&crate::algebra::MultiIndex::new(old, state.d()).expect("digits in range"))
    })
}

/// Builds a state from the command-line generator options.
pub fn generate_state(
    kind: StateKind,
    n: usize,
    seed: u64,
    partition: Option<&str>,
) -> Result<AlgebraElement> {
    if n == 0 || n > 12 {
        return Err(Error::Size(format!("site count {n} outside 1..=12")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    match kind {
        StateKind::Random => Ok(random_state_with(n, &mut rng)),
        StateKind::Bell => {
            if n != 2 {
                return Err(Error::InvalidArgument("the Bell state has n = 2".into()));
            }
            Ok(bell())
        }
        StateKind::Ghz => Ok(ghz(n)),
        StateKind::W => Ok(w_state(n)),
        StateKind::Separable => {
            let text = partition.ok_or_else(|| {
                Error::InvalidPartition("separable states need a partition such as 1,2|3".into())
            })?;
            let pi: SetPartition = text.parse()?;
            if pi.ground_size() != n {
                return Err(Error::InvalidPartition(format!(
                    "'{text}' does not cover {n} sites"
                )));
            }
            Ok(separable_state(&pi, &mut rng))
        }
    }
}
