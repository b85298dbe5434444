//! The self-test battery: thirteen numbered criteria, each a list of
//! named checks with a worst residual and a tolerance.
//!
//! Everything is seeded, so two runs with the same options produce the same
//! report byte for byte.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::algebra::{AlgebraElement, MultiIndex};
use crate::cumulant::{
    cumulant_poly, enumerate_partitions, separability_dimension_counts, splits_partition,
};
use crate::error::Result;
use crate::haar::{apply_local_all, moment_estimate, sample_su2, twirl_estimate, SU2Matrix};
use crate::invariant::{
    check_relations, cumulant_family, invariant_i, jacobian::DEFAULT_STEP, jacobian_rank,
    InvariantIndex, InvariantPlan,
};
use crate::mixed::{zhou_m, DensityMatrix, HatPlan};
use crate::states::{bell, ghz, random_state_with, separable_state, tensor_product, w_state};
use crate::transvectant::{
    covariant_norm, family_covariants, hyperdeterminant, iota_chain, xi_constant, CovariantFamily,
};

pub const DEFAULT_SEED: u64 = 20_061_130;
pub const DEFAULT_TWIRL_SAMPLES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatteryOptions {
    pub seed: u64,
    /// Samples per Monte-Carlo estimate in criteria 6 and 13.
    pub twirl_samples: usize,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            twirl_samples: DEFAULT_TWIRL_SAMPLES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst residual over the check's instances, in the units of `tolerance`.
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: residual.is_finite() && residual <= tolerance,
            residual,
            tolerance,
            detail: None,
        }
    }

    /// A yes/no check; the residual is 0 or 1.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Criterion {
    fn new(id: u8, checks: Vec<Check>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self {
            id,
            name: CRITERIA[id as usize - 1],
            passed,
            checks,
        }
    }

    /// `"PASS  6 monte-carlo oracle"` style summary line.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!("{verdict} {:>2} {}", self.id, self.name);
        for c in self.checks.iter().filter(|c| !c.passed) {
            line.push_str(&format!(
                "\n       failed check '{}': residual {:.3e} > tolerance {:.1e}",
                c.name, c.residual, c.tolerance
            ));
        }
        line
    }
}

pub const CRITERIA: [&str; 13] = [
    "algebra identities",
    "cumulant consistency",
    "local-unitary invariance",
    "sudbery relations",
    "separability criterion",
    "monte-carlo oracle",
    "lift and trace consistency",
    "transvectant constant",
    "hyperdeterminant",
    "trace-norm cumulant invariant",
    "independence surrogate",
    "dimension count",
    "determinism",
];

fn criterion_rng(opts: &BatteryOptions, id: u8) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    rng.set_stream(id as u64);
    rng
}

fn gaussian(rng: &mut ChaCha20Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn all_indices(n: usize) -> Vec<InvariantIndex> {
    (1..1usize << n)
        .map(|v| InvariantIndex::new(MultiIndex::from_linear(v, n, 2)).expect("nonzero bits"))
        .collect()
}

fn random_local(n: usize, rng: &mut ChaCha20Rng) -> Vec<SU2Matrix> {
    (0..n).map(|_| sample_su2(rng)).collect()
}

pub fn run_criterion(id: u8, opts: &BatteryOptions) -> Result<Criterion> {
    let mut rng = criterion_rng(opts, id);
    let checks = match id {
        1 => algebra_identities(&mut rng)?,
        2 => cumulant_consistency(&mut rng)?,
        3 => lu_invariance(&mut rng)?,
        4 => sudbery(&mut rng)?,
        5 => separability(&mut rng)?,
        6 => monte_carlo(&mut rng, opts)?,
        7 => lift_consistency(&mut rng)?,
        8 => transvectant_constant(&mut rng)?,
        9 => hyperdet(&mut rng)?,
        10 => zhou(&mut rng)?,
        11 => independence(&mut rng)?,
        12 => dimension_count()?,
        13 => determinism(opts)?,
        other => {
            return Err(crate::Error::InvalidArgument(format!(
                "no criterion {other}; valid ids are 1..=13"
            )))
        }
    };
    Ok(Criterion::new(id, checks))
}

pub fn run_all(opts: &BatteryOptions) -> Result<Vec<Criterion>> {
    (1..=13).map(|id| run_criterion(id, opts)).collect()
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn random_element(rng: &mut ChaCha20Rng) -> AlgebraElement {
    loop {
        let d = rng.random_range(2..=3usize);
        let n = rng.random_range(1..=5usize);
        let mut coeffs: Vec<Complex64> =
            (0..d.pow(n as u32)).map(|_| 0.5 * gaussian(rng)).collect();
        coeffs[0] = real(1.0) + 0.5 * gaussian(rng);
        // right half-plane keeps arg(a0 b0) = arg a0 + arg b0 on the principal branch
        if coeffs[0].re > 0.3 {
            return AlgebraElement::new(n, d, coeffs).expect("finite");
        }
    }
}

fn partner(a: &AlgebraElement, rng: &mut ChaCha20Rng) -> AlgebraElement {
    loop {
        let mut coeffs: Vec<Complex64> =
            (0..a.coeffs().len()).map(|_| 0.5 * gaussian(rng)).collect();
        coeffs[0] = real(1.0) + 0.5 * gaussian(rng);
        if coeffs[0].re > 0.3 {
            return AlgebraElement::new(a.n(), a.d(), coeffs).expect("finite");
        }
    }
}

/// `exp` of the element with every coefficient replaced by its magnitude
/// (real part for the constant): the scale of the summands inside `exp(x)`.
fn exp_summand_scale(x: &AlgebraElement) -> f64 {
    let mut coeffs: Vec<Complex64> = x.coeffs().iter().map(|c| real(c.norm())).collect();
    coeffs[0] = real(x.constant().re);
    AlgebraElement::new(x.n(), x.d(), coeffs)
        .expect("finite")
        .exp()
        .max_abs()
}

fn algebra_identities(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let (mut logsum, mut expsum, mut inv, mut explog) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..200 {
        let a = random_element(rng);
        let b = partner(&a, rng);
        let (la, lb) = (a.log()?, b.log()?);
        let ab = a.product(&b)?;
        let lhs = ab.log()?;
        logsum = logsum.max(relative(lhs.max_abs_diff(&(&la + &lb)), lhs.max_abs()));
        let e = (&la + &lb).exp();
        let scale = exp_summand_scale(&(&la + &lb));
        expsum = expsum.max(relative(
            e.max_abs_diff(&la.exp().product(&lb.exp())?),
            scale,
        ));
        let one = AlgebraElement::identity(a.n(), a.d());
        let a_inv = a.inverse()?;
        inv = inv
            .max(a.product(&a_inv)?.max_abs_diff(&one) / (a.max_abs() * a_inv.max_abs()).max(1.0));
        explog = explog.max(relative(la.exp().max_abs_diff(&a), exp_summand_scale(&la)));
    }
    Ok(vec![
        Check::new("log(ab) = log a + log b", logsum, 1e-10),
        Check::new("exp(x + y) = exp x exp y", expsum, 1e-10),
        Check::new("a a^-1 = 1", inv, 1e-10),
        Check::new("exp(log a) = a", explog, 1e-10),
    ])
}

fn cumulant_consistency(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let mut worst = 0f64;
    for trial in 0..100 {
        let n = 1 + trial % 4;
        let psi = random_state_with(n, rng);
        let log = psi.log()?;
        let a0 = psi.constant();
        for idx in all_indices(n) {
            let value = cumulant_poly(idx.as_multi())?.evaluate(&psi)?;
            let expected = a0.powu(idx.theta() as u32) * log.get(idx.as_multi());
            worst = worst.max(relative((value - expected).norm(), expected.norm()));
        }
    }
    Ok(vec![Check::new("d_idx = a_0^theta c_idx", worst, 1e-10)])
}

fn lu_invariance(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let plans: Vec<Vec<InvariantPlan>> = (2..=4)
        .map(|n| {
            cumulant_family(n)?
                .indices
                .iter()
                .map(InvariantPlan::new)
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut worst = 0f64;
    for trial in 0..100 {
        let n = 2 + trial % 3;
        let psi = random_state_with(n, rng);
        let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let moved = apply_local_all(&psi, &random_local(n, rng))?.scale(phase);
        for plan in &plans[n - 2] {
            let (before, after) = (plan.evaluate(&psi)?, plan.evaluate(&moved)?);
            worst = worst.max(relative((before - after).abs(), before.abs()) / 1e-9);
        }
    }
    Ok(vec![Check::new(
        "I(g psi) = I(psi), in units of 1e-9 max(1, I)",
        worst,
        1.0,
    )])
}

fn sudbery(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let mut worst = 0f64;
    for _ in 0..100 {
        let psi = random_state_with(3, rng);
        for rel in check_relations(&psi)? {
            worst = worst.max(rel.residual);
        }
    }
    let g = ghz(3);
    let ghz_err = (invariant_i(&g, &"110".parse()?)? - 0.125)
        .abs()
        .max((invariant_i(&g, &"111".parse()?)? - 0.25).abs());
    Ok(vec![
        Check::new("five identities with the J invariants", worst, 1e-10),
        Check::new("GHZ: I110 = 1/8, I111 = 1/4", ghz_err, 1e-10),
    ])
}

fn separability(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let partitions: Vec<_> = (2..=4)
        .map(enumerate_partitions)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .filter(|p| p.num_blocks() >= 2)
        .collect();
    let plans: Vec<Vec<(InvariantIndex, InvariantPlan)>> = (2..=4)
        .map(|n| {
            all_indices(n)
                .into_iter()
                .filter(|i| i.theta() >= 2)
                .map(|i| InvariantPlan::new(&i).map(|p| (i, p)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut worst = 0f64;
    for k in 0..50 {
        let pi = &partitions[k % partitions.len()];
        let n = pi.ground_size();
        let scale = rng.random_range(0.5..2.0);
        let psi = separable_state(pi, rng).scale(real(scale));
        let norm2 = psi.norm_sqr();
        for (idx, plan) in &plans[n - 2] {
            if splits_partition(idx.as_multi(), pi) {
                let bound = 1e-10 * norm2.powi(idx.theta() as i32);
                worst = worst.max(plan.evaluate(&psi)?.abs() / bound);
            }
        }
    }
    let mut factor = 0f64;
    for m in 1..=3 {
        for extra in 1..=(4 - m) {
            let mu = random_state_with(m, rng);
            let lifted = tensor_product(&mu, &AlgebraElement::identity(extra, 2));
            for idx in all_indices(m) {
                let mut bits = idx.bits().to_vec();
                bits.extend(std::iter::repeat_n(0, extra));
                let long = InvariantIndex::new(MultiIndex::new(bits, 2)?)?;
                factor = factor.max((invariant_i(&lifted, &long)? - invariant_i(&mu, &idx)?).abs());
            }
        }
    }
    Ok(vec![
        Check::new(
            "splitting invariants, in units of 1e-10 norm^(2 theta)",
            worst,
            1.0,
        )
        .with_detail(format!(
            "{} partitions of n <= 4, 50 states",
            partitions.len()
        )),
        Check::new("I(mu (x) |0..0>) = I(mu)", factor, 1e-10),
    ])
}

fn monte_carlo(rng: &mut ChaCha20Rng, opts: &BatteryOptions) -> Result<Vec<Check>> {
    let samples = opts.twirl_samples;
    let mut moments = 0f64;
    let mut count = 0u64;
    for p in 0..=6u32 {
        for q in 0..=(6 - p) {
            let est = moment_estimate(p, q, samples, opts.seed.wrapping_add(count))?;
            let exact = 1.0 / f64::from(p + q + 1);
            moments = moments.max(band_ratio(est.mean, est.std_error, exact));
            count += 1;
        }
    }
    let mut twirl = 0f64;
    let mut compared = 0usize;
    for n in 2..=4 {
        let family = cumulant_family(n)?;
        for _ in 0..20 {
            let psi = random_state_with(n, rng);
            for idx in family.indices.iter().filter(|i| i.theta() >= 2) {
                let seed: u64 = rng.random();
                let est = twirl_estimate(&psi, idx, samples, seed)?;
                twirl = twirl.max(band_ratio(est.mean, est.std_error, invariant_i(&psi, idx)?));
                compared += 1;
            }
        }
    }
    Ok(vec![
        Check::new("Haar moments p + q <= 6, in standard errors", moments, 5.0)
            .with_detail(format!("{count} moments at {samples} samples")),
        Check::new("twirl vs closed form, in standard errors", twirl, 5.0)
            .with_detail(format!("{compared} comparisons at {samples} samples")),
    ])
}

fn band_ratio(mean: f64, se: f64, exact: f64) -> f64 {
    let diff = (mean - exact).abs();
    let floor = 1e-12 * exact.abs().max(1.0);
    if diff <= floor {
        0.0
    } else {
        diff / se
    }
}

fn restricted(idx: &InvariantIndex, keep: &[usize]) -> Result<InvariantIndex> {
    InvariantIndex::new(MultiIndex::new(
        keep.iter().map(|&s| idx.bits()[s]).collect(),
        2,
    )?)
}

/// Compares `I_idx(psi)` with `hat I` of the index restricted to the kept
/// sites, on the partial trace over every nonempty set of 0-positions.
/// Single-site traces and the iterated one-site-at-a-time trace are
/// reported separately from traces over two or more sites at once.
fn lift_consistency(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let (mut single, mut multi, mut iterated) = (0f64, 0f64, 0f64);
    let (mut single_cases, mut multi_cases) = (0usize, 0usize);
    for n in 2..=4 {
        for _ in 0..3 {
            let psi = random_state_with(n, rng);
            let rho = DensityMatrix::from_pure(&psi)?;
            for idx in all_indices(n) {
                let zeros: Vec<usize> = (0..n).filter(|&s| idx.bits()[s] == 0).collect();
                let full = invariant_i(&psi, &idx)?;
                for mask in 1..1usize << zeros.len() {
                    let traced: Vec<usize> = zeros
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &s)| s)
                        .collect();
                    let keep: Vec<usize> = (0..n).filter(|s| !traced.contains(s)).collect();
                    let hat = HatPlan::new(&restricted(&idx, &keep)?)?
                        .evaluate(&rho.partial_trace(&keep)?)?;
                    if traced.len() == 1 {
                        single = single.max((hat - full).abs());
                        single_cases += 1;
                    } else {
                        multi = multi.max((hat - full).abs());
                        multi_cases += 1;
                        // peel one traced site at a time: I_{idx} = hat I over n-1 sites
                        let keep_one: Vec<usize> = (0..n).filter(|&s| s != traced[0]).collect();
                        let hat_one = HatPlan::new(&restricted(&idx, &keep_one)?)?
                            .evaluate(&rho.partial_trace(&keep_one)?)?;
                        iterated = iterated.max((hat_one - full).abs());
                    }
                }
            }
        }
    }
    Ok(vec![
        Check::new("one traced site, every placement", single, 1e-10)
            .with_detail(format!("{single_cases} cases")),
        Check::new("one site at a time where two or more are 0", iterated, 1e-10),
        Check::new("two or more sites traced at once", multi, 1e-10).with_detail(format!(
            "{multi_cases} cases; I_1100 differs between purifications of the same two-site marginal"
        )),
    ])
}

fn transvectant_constant(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (n, k) in [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (4, 4)] {
        let ones: Vec<usize> = (0..k).collect();
        let idx = InvariantIndex::from_ones(n, &ones)?;
        let plan = InvariantPlan::new(&idx)?;
        let ratios: Vec<f64> = (0..50)
            .map(|_| {
                let psi = random_state_with(n, rng);
                Ok(covariant_norm(&iota_chain(&psi, k, n)?) / plan.evaluate(&psi)?)
            })
            .collect::<Result<_>>()?;
        let (lo, hi, mean) = spread(&ratios);
        let xi = xi_constant(n, k);
        checks.push(
            Check::new(
                format!("(n, k) = ({n}, {k}): ratio spread"),
                (hi - lo) / mean.abs(),
                1e-8,
            )
            .with_detail(format!("mean ratio {mean:.12}")),
        );
        checks.push(Check::new(
            format!("(n, k) = ({n}, {k}): ratio = {xi}"),
            (mean - xi).abs() / xi,
            1e-8,
        ));
    }
    Ok(checks)
}

fn spread(values: &[f64]) -> (f64, f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi, values.iter().sum::<f64>() / values.len() as f64)
}

fn hyperdet(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let det_ghz = hyperdeterminant(&ghz(3))?;
    let det_w = hyperdeterminant(&w_state(3))?;
    let ratios: Vec<f64> = (0..50)
        .map(|_| {
            let psi = random_state_with(3, rng);
            let h = family_covariants(&psi, CovariantFamily::H, "222")?;
            Ok(h / hyperdeterminant(&psi)?.norm_sqr())
        })
        .collect::<Result<_>>()?;
    let (lo, hi, mean) = spread(&ratios);
    Ok(vec![
        Check::new("Det(GHZ) = -1/2", (det_ghz - real(-0.5)).norm(), 1e-12),
        Check::new("Det(W) = 0", det_w.norm(), 1e-12),
        Check::new("H222 / |Det|^2 spread", (hi - lo) / mean.abs(), 1e-8)
            .with_detail(format!("constant {mean:.12}")),
    ])
}

fn zhou(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let i2: InvariantIndex = "11".parse()?;
    let i3: InvariantIndex = "111".parse()?;
    let mut two = 0f64;
    for _ in 0..50 {
        let psi = random_state_with(2, rng);
        let i = invariant_i(&psi, &i2)?;
        two = two.max((zhou_m(&psi, &i2)? - (i + i.sqrt())).abs());
    }
    let mut f1 = 0f64;
    let mut f2 = 0f64;
    for step in 0..20 {
        let t = std::f64::consts::FRAC_PI_2 * (step as f64 + 0.5) / 20.0;
        let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let mut amps = vec![real(0.0); 8];
        amps[0] = real(t.cos());
        amps[7] = phase * t.sin();
        let psi = AlgebraElement::qubits(3, amps)?;
        let (m, i) = (zhou_m(&psi, &i3)?, invariant_i(&psi, &i3)?);
        let rhs =
            6.0 * i * (1.0 - 4.0 * i).max(0.0).sqrt() + 2.0 * (i + i * i - 4.0 * i.powi(3)).sqrt();
        f1 = f1.max((m - rhs).abs());

        let mut amps = vec![real(0.0); 8];
        for pos in [4, 2, 1] {
            amps[pos] = gaussian(rng);
        }
        let phi = AlgebraElement::qubits(3, amps)?.normalized();
        let (m, i) = (zhou_m(&phi, &i3)?, invariant_i(&phi, &i3)?);
        f2 = f2.max(((m - i / 2.0).powi(3) - i / 4.0).abs());
    }
    let mut product = 0f64;
    for _ in 0..10 {
        let psi = tensor_product(&random_state_with(1, rng), &random_state_with(2, rng));
        for idx in ["111", "110", "101"] {
            product = product.max(zhou_m(&psi, &idx.parse()?)?);
        }
        let pair = tensor_product(&random_state_with(1, rng), &random_state_with(1, rng));
        product = product.max(zhou_m(&pair, &i2)?);
    }
    let bell_m = zhou_m(&bell(), &i2)?;
    Ok(vec![
        Check::new("M11 = I11 + sqrt(I11)", two, 1e-8),
        Check::new(
            "a|000> + b|111> sweep: M111 = 6I sqrt(1-4I) + 2 sqrt(I + I^2 - 4I^3)",
            f1,
            1e-8,
        ),
        Check::new("W-family sweep: (M111 - I111/2)^3 - I111/4 = 0", f2, 1e-8),
        Check::new("M = 0 on product states", product, 1e-10),
        Check::new("M11(Bell) = 0.75", (bell_m - 0.75).abs(), 1e-10),
    ])
}

fn independence(rng: &mut ChaCha20Rng) -> Result<Vec<Check>> {
    let f3 = cumulant_family(3)?.indices;
    let f2 = cumulant_family(2)?.indices;
    let mut ranks3 = Vec::new();
    let mut ranks2 = Vec::new();
    for _ in 0..10 {
        ranks3.push(jacobian_rank(
            &f3,
            &random_state_with(3, rng),
            DEFAULT_STEP,
        )?);
        ranks2.push(jacobian_rank(
            &f2,
            &random_state_with(2, rng),
            DEFAULT_STEP,
        )?);
    }
    let at_zero = jacobian_rank(&f3, &AlgebraElement::identity(3, 2), DEFAULT_STEP)?;
    Ok(vec![
        Check::flag(
            "n = 3 family has rank 5 at 10 random states",
            ranks3.iter().all(|&r| r == 5),
        )
        .with_detail(format!("ranks {ranks3:?}")),
        Check::flag("n = 2 family has rank 2", ranks2.iter().all(|&r| r == 2))
            .with_detail(format!("ranks {ranks2:?}")),
        Check::flag("rank drops at |000>", at_zero < 5).with_detail(format!("rank {at_zero}")),
    ])
}

fn dimension_count() -> Result<Vec<Check>> {
    let mut failures = 0usize;
    let mut total = 0usize;
    for n in 1..=6 {
        for pi in enumerate_partitions(n)? {
            for d in [2, 3] {
                total += 1;
                if !separability_dimension_counts(n, d, &pi).identity_holds {
                    failures += 1;
                }
            }
        }
    }
    Ok(vec![Check::flag(
        "separable dimension = full dimension - 2 * splitting count",
        failures == 0,
    )
    .with_detail(format!(
        "{total} (partition, d) pairs, {failures} failures"
    ))])
}

/// Renders a seeded sample report; used to compare runs under different thread pools.
fn sample_report(opts: &BatteryOptions) -> Result<String> {
    let mut rng = criterion_rng(opts, 13);
    let psi = random_state_with(3, &mut rng);
    let mut values = Vec::new();
    for idx in cumulant_family(3)?.indices {
        values.push(invariant_i(&psi, &idx)?);
        if idx.theta() >= 2 {
            let est = twirl_estimate(&psi, &idx, opts.twirl_samples.clamp(100, 5_000), opts.seed)?;
            values.push(est.mean);
            values.push(est.std_error);
        }
    }
    values.push(zhou_m(&psi, &"111".parse()?)?);
    Ok(serde_json::to_string(&values)?)
}

fn determinism(opts: &BatteryOptions) -> Result<Vec<Check>> {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
    let wide = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
    let a = single.install(|| sample_report(opts))?;
    let b = wide.install(|| sample_report(opts))?;
    let c = sample_report(opts)?;
    Ok(vec![Check::flag(
        "seeded report identical across thread pools",
        a == b && b == c,
    )])
}
