//! Haar-random SU(2) sampling and a Monte-Carlo twirl of `|d|^2`.
//!
//! Each sample draws from its own ChaCha stream (`stream = sample number`)
//! under the master seed, so estimates do not depend on how the samples are
//! spread across threads. Per-sample values are collected in order and
//! reduced by pairwise summation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::AlgebraElement;
use crate::cumulant::{cumulant_poly, site_bit};
use crate::error::{Error, Result};
use crate::invariant::{gamma, InvariantIndex};

const UNITARY_TOL: f64 = 1e-12;

/// `[[u, v], [w, z]]` with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SU2Matrix {
    pub u: Complex64,
    pub v: Complex64,
    pub w: Complex64,
    pub z: Complex64,
}

impl SU2Matrix {
    /// Validates unitarity and `det = 1` to within `1e-12`.
    pub fn new(u: Complex64, v: Complex64, w: Complex64, z: Complex64) -> Result<Self> {
        let g = Self { u, v, w, z };
        if (g.det() - Complex64::new(1.0, 0.0)).norm() > UNITARY_TOL {
            return Err(Error::InvalidArgument(format!(
                "determinant {} is not 1",
                g.det()
            )));
        }
        if g.unitarity_defect() > UNITARY_TOL {
            return Err(Error::InvalidArgument("matrix is not unitary".into()));
        }
        Ok(g)
    }

    /// Completes a unit first row `(u, v)` to `[[u, v], [-conj v, conj u]]`.
    pub fn from_first_row(u: Complex64, v: Complex64) -> Self {
        Self {
            u,
            v,
            w: -v.conj(),
            z: u.conj(),
        }
    }

    pub fn identity() -> Self {
        Self::from_first_row(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn det(&self) -> Complex64 {
        self.u * self.z - self.v * self.w
    }

    /// Largest entry of `g g^dagger - 1` in magnitude.
    pub fn unitarity_defect(&self) -> f64 {
        let d00 = self.u.norm_sqr() + self.v.norm_sqr() - 1.0;
        let d11 = self.w.norm_sqr() + self.z.norm_sqr() - 1.0;
        let d01 = self.u * self.w.conj() + self.v * self.z.conj();
        d00.abs().max(d11.abs()).max(d01.norm())
    }

    /// Row-major entries.
    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        [[self.u, self.v], [self.w, self.z]]
    }
}

/// Draws a Haar-distributed element of SU(2): the first row is a
/// normalised pair of independent standard complex Gaussians.
pub fn sample_su2<R: Rng + ?Sized>(rng: &mut R) -> SU2Matrix {
    loop {
        let mut draw = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let (u, v) = (draw(), draw());
        let norm = (u.norm_sqr() + v.norm_sqr()).sqrt();
        if norm > 0.0 {
            return SU2Matrix::from_first_row(u / norm, v / norm);
        }
    }
}

/// The generator for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Applies `g` at `site` (zero-based): `a_{..j..} -> sum_k g_{jk} a_{..k..}`.
pub fn apply_local(state: &AlgebraElement, site: usize, g: &SU2Matrix) -> Result<AlgebraElement> {
    if state.d() != 2 {
        return Err(Error::UnsupportedDimension(state.d()));
    }
    if site >= state.n() {
        return Err(Error::InvalidArgument(format!(
            "site {} outside 1..={}",
            site + 1,
            state.n()
        )));
    }
    let mut amps = state.coeffs().to_vec();
    rotate_in_place(&mut amps, state.n(), site, &g.entries());
    AlgebraElement::qubits(state.n(), amps)
}

/// Applies one matrix per site.
pub fn apply_local_all(state: &AlgebraElement, gates: &[SU2Matrix]) -> Result<AlgebraElement> {
    if gates.len() != state.n() {
        return Err(Error::Shape(format!(
            "{} gates for {} sites",
            gates.len(),
            state.n()
        )));
    }
    if state.d() != 2 {
        return Err(Error::UnsupportedDimension(state.d()));
    }
    let mut amps = state.coeffs().to_vec();
    for (site, g) in gates.iter().enumerate() {
        rotate_in_place(&mut amps, state.n(), site, &g.entries());
    }
    AlgebraElement::qubits(state.n(), amps)
}

/// Applies an arbitrary 2x2 matrix at one site of a raw amplitude table.
pub fn rotate_in_place(amps: &mut [Complex64], n: usize, site: usize, g: &[[Complex64; 2]; 2]) {
    let bit = site_bit(n, site);
    for lo in 0..amps.len() {
        if lo & bit != 0 {
            continue;
        }
        let hi = lo | bit;
        let (a0, a1) = (amps[lo], amps[hi]);
        amps[lo] = g[0][0] * a0 + g[0][1] * a1;
        amps[hi] = g[1][0] * a0 + g[1][1] * a1;
    }
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwirlEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl TwirlEstimate {
    /// Whether `exact` lies within `bands` standard errors of the mean.
    /// A vanishing standard error falls back to a `1e-12` absolute band.
    pub fn agrees_with(&self, exact: f64, bands: f64) -> bool {
        (self.mean - exact).abs() <= bands * self.std_error + 1e-12 * exact.abs().max(1.0)
    }
}

/// Recursive pairwise summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

/// Monte-Carlo mean of `f` over independent per-sample generators.
pub fn estimate<F>(samples: usize, seed: u64, f: F) -> Result<TwirlEstimate>
where
    F: Fn(&mut ChaCha20Rng) -> f64 + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument(
            "at least one sample is required".into(),
        ));
    }
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| f(&mut sample_rng(seed, i)))
        .collect();
    let count = samples as f64;
    let mean = pairwise_sum(&values) / count;
    let deviations: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let variance = if samples > 1 {
        pairwise_sum(&deviations) / (count - 1.0)
    } else {
        0.0
    };
    Ok(TwirlEstimate {
        mean,
        std_error: (variance / count).sqrt(),
        samples,
        seed,
    })
}

/// Estimate of `C(p+q, p) E[|u|^{2p} |v|^{2q}]`, whose exact value is `1/(p+q+1)`.
pub fn moment_estimate(p: u32, q: u32, samples: usize, seed: u64) -> Result<TwirlEstimate> {
    let binom = binomial((p + q) as usize, p as usize);
    estimate(samples, seed, |rng| {
        let g = sample_su2(rng);
        binom * g.u.norm_sqr().powi(p as i32) * g.v.norm_sqr().powi(q as i32)
    })
}

/// Real and imaginary estimates of `E[u^{t-k} v^k conj(u)^{t-j} conj(v)^j]`.
pub fn cross_moment_estimate(
    theta: u32,
    k: u32,
    j: u32,
    samples: usize,
    seed: u64,
) -> Result<(TwirlEstimate, TwirlEstimate)> {
    let term = |rng: &mut ChaCha20Rng| {
        let g = sample_su2(rng);
        g.u.powu(theta - k) * g.v.powu(k) * g.u.conj().powu(theta - j) * g.v.conj().powu(j)
    };
    let re = estimate(samples, seed, |rng| term(rng).re)?;
    let im = estimate(samples, seed, |rng| term(rng).im)?;
    Ok((re, im))
}

/// Monte-Carlo estimate of `gamma_{n,theta} * E_g |d(g psi)|^2` over Haar-random local rotations.
pub fn twirl_estimate(
    state: &AlgebraElement,
    index: &InvariantIndex,
    samples: usize,
    seed: u64,
) -> Result<TwirlEstimate> {
    if state.d() != 2 {
        return Err(Error::UnsupportedDimension(state.d()));
    }
    if index.n() != state.n() {
        return Err(Error::Shape(format!(
            "index {} does not fit a {}-site state",
            index,
            state.n()
        )));
    }
    if index.theta() < 2 {
        return Err(Error::InvalidIndex(format!(
            "index {index} has a single 1; its invariant is the squared norm"
        )));
    }
    if samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "{samples} samples; at least 100 required"
        )));
    }
    let n = state.n();
    let d = cumulant_poly(index.as_multi())?;
    let scale = gamma(n, index.theta());
    let base = state.coeffs();
    let raw = estimate(samples, seed, |rng| {
        let mut amps = base.to_vec();
        for site in 0..n {
            let g = sample_su2(rng);
            rotate_in_place(&mut amps, n, site, &g.entries());
        }
        d.evaluate_amplitudes(&amps).norm_sqr()
    })?;
    Ok(TwirlEstimate {
        mean: raw.mean * scale,
        std_error: raw.std_error * scale,
        ..raw
    })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn samples_are_special_unitary() {
        let mut rng = sample_rng(11, 0);
        for _ in 0..1000 {
            let g = sample_su2(&mut rng);
            assert!((g.det() - c(1.0, 0.0)).norm() < 1e-12);
            assert!(g.unitarity_defect() < 1e-12);
            assert!(SU2Matrix::new(g.u, g.v, g.w, g.z).is_ok());
        }
    }

    #[test]
    fn validation_rejects_non_unitary() {
        assert!(SU2Matrix::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)).is_err());
        assert!(SU2Matrix::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn low_moments() {
        let m = moment_estimate(1, 1, 100_000, 5).unwrap();
        // C(2,1) E|u|^2|v|^2 = 1/3, i.e. E|u|^2|v|^2 = 1/6
        assert!(m.agrees_with(1.0 / 3.0, 5.0), "{m:?}");
        let m = moment_estimate(1, 0, 100_000, 6).unwrap();
        assert!(m.agrees_with(0.5, 5.0), "{m:?}");
        let (re, im) = cross_moment_estimate(3, 1, 2, 100_000, 7).unwrap();
        assert!(re.agrees_with(0.0, 5.0) && im.agrees_with(0.0, 5.0));
    }

    #[test]
    fn estimate_is_deterministic() {
        let a = moment_estimate(2, 1, 2000, 99).unwrap();
        let b = moment_estimate(2, 1, 2000, 99).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = pool.install(|| moment_estimate(2, 1, 2000, 99).unwrap());
        assert_eq!(serial.mean.to_bits(), a.mean.to_bits());
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let values: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&values), values.iter().sum::<f64>());
    }

    #[test]
    fn apply_local_matches_matrix_action() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = SU2Matrix::new(c(s, 0.0), c(s, 0.0), c(-s, 0.0), c(s, 0.0)).unwrap();
        let zero = AlgebraElement::identity(2, 2);
        let out = apply_local(&zero, 1, &h).unwrap();
        // a_{00} -> u a_00 + v a_01, a_{01} -> w a_00 + z a_01
        assert!(
            out.max_abs_diff(
                &AlgebraElement::qubits(2, vec![c(s, 0.0), c(-s, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
                    .unwrap()
            ) < 1e-15
        );
        assert!(apply_local(&zero, 2, &h).is_err());
    }

    #[test]
    fn twirl_rejects_bad_inputs() {
        let state = AlgebraElement::identity(3, 2);
        let single: InvariantIndex = "100".parse().unwrap();
        assert!(twirl_estimate(&state, &single, 1000, 1).is_err());
        let pair: InvariantIndex = "110".parse().unwrap();
        assert!(twirl_estimate(&state, &pair, 10, 1).is_err());
        let wrong: InvariantIndex = "11".parse().unwrap();
        assert!(twirl_estimate(&state, &wrong, 1000, 1).is_err());
    }
}
