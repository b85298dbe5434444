use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use lu_cumulants::cumulant::{
    cumulant_poly, enumerate_partitions, splits_partition, CumulantTable, SetPartition,
};
use lu_cumulants::haar::{apply_local_all, rotate_in_place, sample_rng, sample_su2};
use lu_cumulants::invariant::{cumulant_family, invariant_i, InvariantIndex};
use lu_cumulants::mixed::{mixed_hat_i, zhou_m, DensityMatrix};
use lu_cumulants::states::{permute_sites, random_state, separable_state, tensor_product};
use lu_cumulants::transvectant::{
    covariant_norm, family_covariant, family_covariants, iota_chain, CovariantFamily,
};
use lu_cumulants::{AlgebraElement, MultiIndex};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn element(n: usize, d: usize, raw: &[(f64, f64)]) -> AlgebraElement {
    let len = d.pow(n as u32);
    AlgebraElement::new(
        n,
        d,
        raw.iter()
            .cycle()
            .take(len)
            .map(|&(r, i)| c(r, i))
            .collect(),
    )
    .unwrap()
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        (1usize..=5).prop_map(|n| (n, 2)),
        (1usize..=4).prop_map(|n| (n, 3))
    ]
}

fn coefficients() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=243)
}

fn close(a: &AlgebraElement, b: &AlgebraElement, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol * a.max_abs().max(b.max_abs()).max(1.0)
}

fn with_constant(x: AlgebraElement, a0: Complex64) -> AlgebraElement {
    let (n, d) = (x.n(), x.d());
    let mut coeffs = x.into_coeffs();
    coeffs[0] = a0;
    AlgebraElement::new(n, d, coeffs).unwrap()
}

fn all_indices(n: usize) -> Vec<InvariantIndex> {
    cumulant_family(n).unwrap().indices
}

/// Largest ratio s_2 / s_1 over the bipartitions `block | rest`.
fn worst_schmidt_ratio(state: &AlgebraElement, pi: &SetPartition) -> f64 {
    let n = state.n();
    let mut worst: f64 = 0.0;
    for block in pi.blocks() {
        let rest: Vec<usize> = (0..n).filter(|s| !block.contains(s)).collect();
        if rest.is_empty() {
            continue;
        }
        let m = DMatrix::from_fn(1 << block.len(), 1 << rest.len(), |r, col| {
            let mut digits = vec![0u8; n];
            for (k, &s) in block.iter().enumerate() {
                digits[s] = ((r >> (block.len() - 1 - k)) & 1) as u8;
            }
            for (k, &s) in rest.iter().enumerate() {
                digits[s] = ((col >> (rest.len() - 1 - k)) & 1) as u8;
            }
            state.get(&MultiIndex::new(digits, 2).unwrap())
        });
        let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if sv.len() > 1 {
            worst = worst.max(sv[1] / sv[0]);
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_is_commutative_and_associative(
        (n, d) in shape(), x in coefficients(), y in coefficients(), z in coefficients()
    ) {
        let (a, b, e) = (element(n, d, &x), element(n, d, &y), element(n, d, &z));
        let ab = a.product(&b).unwrap();
        prop_assert!(close(&ab, &b.product(&a).unwrap(), 1e-12));
        let left = ab.product(&e).unwrap();
        let right = a.product(&b.product(&e).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn identity_is_neutral((n, d) in shape(), x in coefficients()) {
        let a = element(n, d, &x);
        prop_assert_eq!(a.product(&AlgebraElement::identity(n, d)).unwrap(), a);
    }

    #[test]
    fn product_respects_tensor_factors(
        n in 1usize..=2, m in 1usize..=3,
        x in coefficients(), y in coefficients(), z in coefficients(), w in coefficients()
    ) {
        let (a, b) = (element(n, 2, &x), element(n, 2, &y));
        let (e, f) = (element(m, 2, &z), element(m, 2, &w));
        let lhs = tensor_product(&a, &e).product(&tensor_product(&b, &f)).unwrap();
        let rhs = tensor_product(&a.product(&b).unwrap(), &e.product(&f).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn log_exp_and_inverse(
        n in 1usize..=4, x in coefficients(), re in 0.3..2.0f64, im in -1.0..1.0f64
    ) {
        let a = with_constant(element(n, 2, &x), c(re, im));
        let inv = a.inverse().unwrap();
        let one = AlgebraElement::identity(n, 2);
        let scale = a.max_abs() * inv.max_abs();
        prop_assert!(a.product(&inv).unwrap().max_abs_diff(&one) <= 1e-11 * scale);
        let back = a.log().unwrap().exp();
        prop_assert!(close(&back, &a, 1e-10));
        let nil = element(n, 2, &x).nilpotent_part();
        let again = nil.exp().log().unwrap();
        prop_assert!(close(&again, &nil, 1e-10));
    }

    #[test]
    fn separable_states_have_no_splitting_cumulants(n in 2usize..=5, pick in any::<usize>(), seed in any::<u64>()) {
        let partitions = enumerate_partitions(n).unwrap();
        let pi = &partitions[pick % partitions.len()];
        let psi = separable_state(pi, &mut ChaCha20Rng::seed_from_u64(seed));
        let table = CumulantTable::from_state(&psi).unwrap();
        let scale = table.values().max_abs().max(1.0);
        for v in 1..1usize << n {
            let idx = MultiIndex::from_linear(v, n, 2);
            if splits_partition(&idx, pi) {
                prop_assert!(table.get(&idx).norm() <= 1e-10 * scale, "{} = {}", idx, table.get(&idx));
            }
        }
    }

    #[test]
    fn zeroing_splitting_cumulants_gives_a_product(
        n in 2usize..=5, pick in any::<usize>(), x in coefficients()
    ) {
        let partitions = enumerate_partitions(n).unwrap();
        let pi = &partitions[pick % partitions.len()];
        let values = element(n, 2, &x).nilpotent_part();
        let state = CumulantTable::from_values(values).without_splitting(pi).to_state();
        prop_assert!(worst_schmidt_ratio(&state, pi) <= 1e-10);
    }

    #[test]
    fn raising_past_the_ones_vanishes(n in 2usize..=4, v in any::<usize>(), seed in any::<u64>()) {
        let count = (1usize << n) - 1;
        let idx = MultiIndex::from_linear(1 + v % count, n, 2);
        let theta = idx.weight();
        let d = cumulant_poly(&idx).unwrap();
        let psi = random_state(n, seed);
        prop_assert!((d.raise(0, 0).evaluate(&psi).unwrap() - d.evaluate(&psi).unwrap()).norm() <= 1e-14);
        for site in (0..n).filter(|&s| idx.digits()[s] == 1) {
            prop_assert!(d.raise(site, theta).evaluate(&psi).unwrap().norm() <= 1e-12);
            if theta >= 2 {
                prop_assert!(d.raise(site, theta - 1).evaluate(&psi).unwrap().norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn lower_triangular_action_scales_cumulants(
        n in 2usize..=4, v in any::<usize>(), seed in any::<u64>(),
        params in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, 0.5..1.5f64, -3.2..3.2f64), 4)
    ) {
        let weighty: Vec<usize> = (0..1usize << n).filter(|x| x.count_ones() >= 2).collect();
        let idx = MultiIndex::from_linear(weighty[v % weighty.len()], n, 2);
        let d = cumulant_poly(&idx).unwrap();
        let psi = random_state(n, seed);
        let mut amps = psi.coeffs().to_vec();
        let mut factor = c(1.0, 0.0);
        for (site, &(wr, wi, r, phase)) in params.iter().take(n).enumerate() {
            let z = Complex64::from_polar(r, phase);
            rotate_in_place(&mut amps, n, site, &[[c(1.0, 0.0), c(0.0, 0.0)], [c(wr, wi), z]]);
            if idx.digits()[site] == 1 {
                factor *= z;
            }
        }
        let moved = AlgebraElement::qubits(n, amps).unwrap();
        let expected = factor * d.evaluate(&psi).unwrap();
        prop_assert!((d.evaluate(&moved).unwrap() - expected).norm() <= 1e-10 * expected.norm().max(1.0));
    }

    #[test]
    fn invariants_follow_site_permutations(n in 2usize..=4, seed in any::<u64>(), shuffle in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha20Rng::seed_from_u64(shuffle));
        let psi = random_state(n, seed);
        let moved = permute_sites(&psi, &perm).unwrap();
        for idx in all_indices(n) {
            let a = invariant_i(&psi, &idx).unwrap();
            let b = invariant_i(&moved, &idx.permuted(&perm).unwrap()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{}: {} vs {}", idx, a, b);
        }
    }

    #[test]
    fn invariants_are_homogeneous(n in 2usize..=4, seed in any::<u64>(), r in 0.2..3.0f64, phase in -3.2..3.2f64) {
        let psi = random_state(n, seed);
        let lambda = Complex64::from_polar(r, phase);
        let scaled = psi.scale(lambda);
        for idx in all_indices(n) {
            let expected = r.powi(idx.degree() as i32) * invariant_i(&psi, &idx).unwrap();
            let got = invariant_i(&scaled, &idx).unwrap();
            prop_assert!((got - expected).abs() <= 1e-11 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn invariants_are_local_unitary_invariant(n in 2usize..=4, seed in any::<u64>(), gates in any::<u64>()) {
        let psi = random_state(n, seed);
        let g: Vec<_> = (0..n).map(|s| sample_su2(&mut sample_rng(gates, s as u64))).collect();
        let moved = apply_local_all(&psi, &g).unwrap();
        for idx in all_indices(n) {
            let a = invariant_i(&psi, &idx).unwrap();
            let b = invariant_i(&moved, &idx).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn product_with_a_product_factor_keeps_the_invariant(k in 2usize..=3, m in 1usize..=2, s1 in any::<u64>(), s2 in any::<u64>()) {
        let mu = random_state(k, s1);
        let nu = (1..m as u64).fold(random_state(1, s2), |acc, j| {
            tensor_product(&acc, &random_state(1, s2.wrapping_add(j)))
        });
        let psi = tensor_product(&mu, &nu);
        for idx in all_indices(k).into_iter().filter(|i| i.theta() >= 2) {
            let mut digits = idx.bits().to_vec();
            digits.extend(std::iter::repeat_n(0, m));
            let wide = InvariantIndex::new(MultiIndex::new(digits, 2).unwrap()).unwrap();
            let a = invariant_i(&mu, &idx).unwrap();
            let b = invariant_i(&psi, &wide).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{}: {} vs {}", idx, a, b);
        }
    }

    #[test]
    fn zhou_m_is_local_unitary_invariant(n in 2usize..=4, seed in any::<u64>(), gates in any::<u64>()) {
        let psi = random_state(n, seed);
        let g: Vec<_> = (0..n).map(|s| sample_su2(&mut sample_rng(gates, s as u64))).collect();
        let moved = apply_local_all(&psi, &g).unwrap();
        for idx in all_indices(n).into_iter().filter(|i| i.theta() >= 2) {
            let a = zhou_m(&psi, &idx).unwrap();
            let b = zhou_m(&moved, &idx).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn covariant_norms_are_local_unitary_invariant(seed in any::<u64>(), gates in any::<u64>()) {
        for (n, family, index) in [(4, CovariantFamily::G, "1111"), (4, CovariantFamily::G, "1100"), (3, CovariantFamily::H, "222")] {
            let psi = random_state(n, seed);
            let g: Vec<_> = (0..n).map(|s| sample_su2(&mut sample_rng(gates, s as u64))).collect();
            let moved = apply_local_all(&psi, &g).unwrap();
            let a = family_covariants(&psi, family, index).unwrap();
            let b = family_covariants(&moved, family, index).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "{}{}: {} vs {}", family, index, a, b);
        }
        let psi = random_state(3, seed);
        let g: Vec<_> = (0..3).map(|s| sample_su2(&mut sample_rng(gates, s as u64))).collect();
        let moved = apply_local_all(&psi, &g).unwrap();
        let a = covariant_norm(&iota_chain(&psi, 2, 3).unwrap());
        let b = covariant_norm(&iota_chain(&moved, 2, 3).unwrap());
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}

#[test]
fn lifted_invariant_matches_pure_states() {
    for seed in 0..20 {
        let psi = random_state(3, seed);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        for idx in all_indices(3) {
            let a = invariant_i(&psi, &idx).unwrap();
            let b = mixed_hat_i(&rho, &idx).unwrap();
            assert!((a - b).abs() <= 1e-12, "{idx}: {a} vs {b}");
        }
    }
}

#[test]
fn full_transvectant_is_twice_the_quadratic_invariant() {
    let a = |s: &str| s.parse::<MultiIndex>().unwrap();
    for seed in 0..10 {
        let psi = random_state(4, seed);
        let amp = |s: &str| psi.get(&a(s));
        let pair = |x: &str, y: &str| amp(x) * amp(y);
        let g = pair("0000", "1111")
            - (pair("1000", "0111")
                + pair("0100", "1011")
                + pair("0010", "1101")
                + pair("0001", "1110"))
            + (pair("1100", "0011") + pair("1010", "0101") + pair("1001", "0110"));
        let cov = family_covariant(&psi, CovariantFamily::G, "1111").unwrap();
        assert_eq!(cov.len(), 1);
        let value = cov.coefficient(&[(0, 0); 4]);
        assert!((value - 2.0 * g).norm() <= 1e-14, "{value} vs {}", 2.0 * g);
    }
}
