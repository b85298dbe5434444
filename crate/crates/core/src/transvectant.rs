//! Covariants of qubit states as polynomials in per-site binary variables,
//! Cayley's Omega process, and the derivative inner product.
//!
//! Coefficients are numbers: the amplitude part of every covariant is
//! evaluated at a fixed state. Each term is keyed by four exponents per
//! site, those of `x0, x1, y0, y1`; the `y` set only exists in the middle
//! of a transvection.
//!
//! The Omega operator is applied literally,
//! `Omega_i = d/dx0 d/dy1 - d/dx1 d/dy0` at site `i`, with no normalising
//! factor. Under this convention `(f, f)^{11}` of a two-qubit form is
//! `2 d_11`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, MultiIndex};
use crate::error::{Error, Result};

const X0: usize = 0;
const X1: usize = 1;
const Y0: usize = 2;
const Y1: usize = 3;

type Exponents = Vec<u16>;

#[derive(Clone, Debug, PartialEq)]
pub struct XPolynomial {
    n: usize,
    terms: BTreeMap<Exponents, Complex64>,
}

impl XPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial `c`.
    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut out = Self::zero(n);
        out.add_term(vec![0; 4 * n], c);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `prod_j (x0^(j))^{e[j].0} (x1^(j))^{e[j].1}`.
    pub fn coefficient(&self, x_exponents: &[(u16, u16)]) -> Complex64 {
        let key: Exponents = x_exponents
            .iter()
            .flat_map(|&(a, b)| [a, b, 0, 0])
            .collect();
        self.terms.get(&key).copied().unwrap_or_default()
    }

    /// `(x-exponents per site, coefficient)` pairs; `y` exponents are dropped.
    pub fn x_terms(&self) -> impl Iterator<Item = (Vec<(u16, u16)>, Complex64)> + '_ {
        self.terms
            .iter()
            .map(|(k, c)| (k.chunks(4).map(|s| (s[X0], s[X1])).collect(), *c))
    }

    fn add_term(&mut self, key: Exponents, coeff: Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self.terms.entry(key) {
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

    fn has_y(&self) -> bool {
        self.terms
            .keys()
            .any(|k| k.chunks(4).any(|s| s[Y0] != 0 || s[Y1] != 0))
    }

    /// Total `x` and `y` degree per site, checking every term agrees.
    pub fn site_degrees(&self) -> Result<Vec<(u16, u16)>> {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else {
            return Ok(vec![(0, 0); self.n]);
        };
        let degrees = |k: &Exponents| -> Vec<(u16, u16)> {
            k.chunks(4)
                .map(|s| (s[X0] + s[X1], s[Y0] + s[Y1]))
                .collect()
        };
        let expected = degrees(first);
        for key in iter {
            if degrees(key) != expected {
                return Err(Error::Shape(
                    "covariant is not homogeneous at every site".into(),
                ));
            }
        }
        Ok(expected)
    }

    fn relabel_to_y(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (key, c) in &self.terms {
            let moved = key.chunks(4).flat_map(|s| [0, 0, s[X0], s[X1]]).collect();
            out.add_term(moved, *c);
        }
        out
    }

    fn y_to_x(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (key, c) in &self.terms {
            let merged = key
                .chunks(4)
                .flat_map(|s| [s[X0] + s[Y0], s[X1] + s[Y1], 0, 0])
                .collect();
            out.add_term(merged, *c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Shape(format!("{} vs {} sites", self.n, other.n)));
        }
        let mut out = Self::zero(self.n);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let key = k1.iter().zip(k2).map(|(a, b)| a + b).collect();
                out.add_term(key, c1 * c2);
            }
        }
        Ok(out)
    }

    /// `d/dx0 d/dy1 - d/dx1 d/dy0` at `site`.
    fn omega(&self, site: usize) -> Self {
        let mut out = Self::zero(self.n);
        let base = 4 * site;
        for (key, c) in &self.terms {
            for (dx, dy, sign) in [(X0, Y1, 1.0), (X1, Y0, -1.0)] {
                let (ex, ey) = (key[base + dx], key[base + dy]);
                if ex == 0 || ey == 0 {
                    continue;
                }
                let mut next = key.clone();
                next[base + dx] -= 1;
                next[base + dy] -= 1;
                out.add_term(next, c * (sign * ex as f64 * ey as f64));
            }
        }
        out
    }
}

impl fmt::Display for XPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (key, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (site, s) in key.chunks(4).enumerate() {
                for (var, &e) in ["x0", "x1", "y0", "y1"].iter().zip(s) {
                    match e {
                        0 => {}
                        1 => write!(f, "*{var}^({})", site + 1)?,
                        e => write!(f, "*{var}^({})^{e}", site + 1)?,
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_qubits(state: &AlgebraElement) -> Result<()> {
    if state.d() != 2 {
        return Err(Error::UnsupportedDimension(state.d()));
    }
    Ok(())
}

/// `f = sum a_{i_1..i_n} x^(1)_{i_1} ... x^(n)_{i_n}`.
pub fn fundamental_form(state: &AlgebraElement) -> Result<XPolynomial> {
    check_qubits(state)?;
    let n = state.n();
    let mut out = XPolynomial::zero(n);
    for (v, a) in state.coeffs().iter().enumerate() {
        let index = MultiIndex::from_linear(v, n, 2);
        let key = index
            .digits()
            .iter()
            .flat_map(|&b| if b == 0 { [1, 0, 0, 0] } else { [0, 1, 0, 0] })
            .collect();
        out.add_term(key, *a);
    }
    Ok(out)
}

/// `(p, q)^mask`: `q` moves to the `y` variables, `Omega` acts at every
/// site whose mask bit is 1, and `y` is then set back to `x`.
pub fn transvectant(p: &XPolynomial, q: &XPolynomial, mask: &[u8]) -> Result<XPolynomial> {
    if p.n != q.n || mask.len() != p.n {
        return Err(Error::Shape(format!(
            "transvectant of {}- and {}-site covariants with a {}-site mask",
            p.n,
            q.n,
            mask.len()
        )));
    }
    if p.has_y() || q.has_y() {
        return Err(Error::InvalidArgument(
            "transvectant inputs must be free of y variables".into(),
        ));
    }
    let mut prod = p.mul(&q.relabel_to_y())?;
    for (site, &bit) in mask.iter().enumerate() {
        match bit {
            0 => {}
            1 => prod = prod.omega(site),
            other => return Err(Error::InvalidIndex(format!("mask digit {other}"))),
        }
        prod.site_degrees()?;
    }
    let out = prod.y_to_x();
    out.site_degrees()?;
    Ok(out)
}

/// Derivative inner product `<p|p> = sum |c|^2 prod_j (x0 exponent)! (x1 exponent)!`.
pub fn covariant_norm(p: &XPolynomial) -> f64 {
    p.terms
        .iter()
        .map(|(key, c)| {
            let weight: f64 = key.iter().map(|&e| factorial(e)).product();
            c.norm_sqr() * weight
        })
        .sum()
}

fn factorial(e: u16) -> f64 {
    (1..=e).map(f64::from).product()
}

fn unit_mask(n: usize, sites: &[usize]) -> Vec<u8> {
    let mut mask = vec![0u8; n];
    for &s in sites {
        mask[s] = 1;
    }
    mask
}

/// Nested transvectants adding one 1-position per step:
/// `(f, ... (f, (f, f)^{s1 s2})^{s3} ...)^{sk}` for `ones = [s1, ..., sk]`.
pub fn iota_for_ones(state: &AlgebraElement, ones: &[usize]) -> Result<XPolynomial> {
    let n = state.n();
    if ones.len() < 2 {
        return Err(Error::InvalidArgument(
            "an iota chain needs at least two 1-positions".into(),
        ));
    }
    if ones.iter().any(|&s| s >= n) {
        return Err(Error::InvalidArgument(format!(
            "1-positions {ones:?} outside {n} sites"
        )));
    }
    let f = fundamental_form(state)?;
    let mut acc = transvectant(&f, &f, &unit_mask(n, &ones[..2]))?;
    for &site in &ones[2..] {
        acc = transvectant(&f, &acc, &unit_mask(n, &[site]))?;
    }
    Ok(acc)
}

/// `iota_{1^k 0^{n-k}}`.
pub fn iota_chain(state: &AlgebraElement, k: usize, n: usize) -> Result<XPolynomial> {
    if state.n() != n {
        return Err(Error::Shape(format!(
            "state has {} sites, chain asks for {n}",
            state.n()
        )));
    }
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!(
            "iota chain needs 2 <= k <= n, got k = {k}"
        )));
    }
    iota_for_ones(state, &(0..k).collect::<Vec<_>>())
}

fn epsilon(a: usize, b: usize) -> f64 {
    match (a, b) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Cayley's hyperdeterminant of a three-qubit state, as the literal
/// contraction `a_{ijk} a_{i'j'm} a_{npk'} a_{n'p'm'} eps_{ii'} eps_{jj'}
/// eps_{kk'} eps_{mm'} eps_{nn'} eps_{pp'}` over all twelve binary indices.
pub fn hyperdeterminant(state: &AlgebraElement) -> Result<Complex64> {
    check_qubits(state)?;
    if state.n() != 3 {
        return Err(Error::Shape(format!(
            "the hyperdeterminant needs 3 qubits, got {}",
            state.n()
        )));
    }
    let a = |i: usize, j: usize, k: usize| state.at(4 * i + 2 * j + k);
    let mut det = Complex64::new(0.0, 0.0);
    for code in 0..1usize << 12 {
        let bit = |b: usize| code >> b & 1;
        let (i, i2, j, j2, k, k2) = (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5));
        let (m, m2, nn, n2, p, p2) = (bit(6), bit(7), bit(8), bit(9), bit(10), bit(11));
        let sign = epsilon(i, i2)
            * epsilon(j, j2)
            * epsilon(k, k2)
            * epsilon(m, m2)
            * epsilon(nn, n2)
            * epsilon(p, p2);
        if sign == 0.0 {
            continue;
        }
        det += sign * a(i, j, k) * a(i2, j2, m) * a(nn, p, k2) * a(n2, p2, m2);
    }
    Ok(det)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovariantFamily {
    /// `g = (f, f)^{mask}` for an even number (at least two) of 1s.
    G,
    /// `h = (f, iota_{twos})^{twos}` over the positions marked 2; at least three.
    H,
}

impl FromStr for CovariantFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "G" | "g" => Ok(Self::G),
            "H" | "h" => Ok(Self::H),
            other => Err(Error::InvalidArgument(format!(
                "unknown covariant family '{other}'"
            ))),
        }
    }
}

impl fmt::Display for CovariantFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::G => "G",
            Self::H => "H",
        })
    }
}

/// Builds the family covariant for `index`. Zeros in the index are lifted
/// positions: the same transvectant recipe with 0 in every mask there.
pub fn family_covariant(
    state: &AlgebraElement,
    family: CovariantFamily,
    index: &str,
) -> Result<XPolynomial> {
    let digits: Vec<u8> = index.parse::<MultiIndex>()?.digits().to_vec();
    let n = state.n();
    if digits.len() != n {
        return Err(Error::InvalidIndex(format!(
            "{index} does not fit {n} sites"
        )));
    }
    match family {
        CovariantFamily::G => {
            let ones = digits.iter().filter(|&&b| b == 1).count();
            if digits.iter().any(|&b| b > 1) || ones < 2 || ones % 2 == 1 {
                return Err(Error::InvalidIndex(format!(
                    "G index {index} needs an even number (>= 2) of 1s and no other digits"
                )));
            }
            let f = fundamental_form(state)?;
            transvectant(&f, &f, &digits)
        }
        CovariantFamily::H => {
            let twos: Vec<usize> = digits
                .iter()
                .enumerate()
                .filter(|(_, &b)| b == 2)
                .map(|(s, _)| s)
                .collect();
            if digits.iter().any(|&b| b != 0 && b != 2) || twos.len() < 3 {
                return Err(Error::InvalidIndex(format!(
                    "H index {index} needs at least three 2s and otherwise 0s"
                )));
            }
            let f = fundamental_form(state)?;
            let iota = iota_for_ones(state, &twos)?;
            transvectant(&f, &iota, &unit_mask(n, &twos))
        }
    }
}

/// `<p|p>` of the family covariant.
pub fn family_covariants(
    state: &AlgebraElement,
    family: CovariantFamily,
    index: &str,
) -> Result<f64> {
    Ok(covariant_norm(&family_covariant(state, family, index)?))
}

/// `4 ((k-2)!)^k (k!)^{n-k}`.
pub fn xi_constant(n: usize, k: usize) -> f64 {
    let fact = |m: usize| (1..=m).map(|x| x as f64).product::<f64>();
    4.0 * fact(k - 2).powi(k as i32) * fact(k).powi((n - k) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulant::cumulant_poly;
    use crate::states::{bell, ghz, random_state, tensor_product, w_state};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn fundamental_form_examples() {
        let f = fundamental_form(&AlgebraElement::identity(2, 2)).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.coefficient(&[(1, 0), (1, 0)]), c(1.0));

        let unnormalised = bell().scale(c(std::f64::consts::SQRT_2));
        let f = fundamental_form(&unnormalised).unwrap();
        assert_eq!(f.len(), 2);
        assert!((f.coefficient(&[(0, 1), (0, 1)]) - c(1.0)).norm() < 1e-15);

        let psi = random_state(2, 3);
        let f = fundamental_form(&psi).unwrap();
        assert_eq!(f.coefficient(&[(0, 1), (1, 0)]), psi.at(0b10));
        assert!(fundamental_form(&AlgebraElement::identity(2, 3)).is_err());
    }

    #[test]
    fn two_qubit_transvectant_is_twice_d11() {
        let psi = random_state(2, 7);
        let f = fundamental_form(&psi).unwrap();
        let p = transvectant(&f, &f, &[1, 1]).unwrap();
        let d11 = cumulant_poly(&"11".parse().unwrap())
            .unwrap()
            .evaluate(&psi)
            .unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.coefficient(&[(0, 0), (0, 0)]) - 2.0 * d11).norm() < 1e-14);
    }

    #[test]
    fn three_qubit_pair_transvectant_structure() {
        let psi = random_state(3, 8);
        let f = fundamental_form(&psi).unwrap();
        let p = transvectant(&f, &f, &[1, 1, 0]).unwrap();
        let d = cumulant_poly(&"110".parse().unwrap()).unwrap();
        let expect = |k: usize| 2.0 * d.raise(2, k).evaluate(&psi).unwrap();
        assert!((p.coefficient(&[(0, 0), (0, 0), (2, 0)]) - expect(0)).norm() < 1e-14);
        assert!((p.coefficient(&[(0, 0), (0, 0), (1, 1)]) - expect(1)).norm() < 1e-14);
        assert!((p.coefficient(&[(0, 0), (0, 0), (0, 2)]) - expect(2)).norm() < 1e-14);
        assert_eq!(p.site_degrees().unwrap(), vec![(0, 0), (0, 0), (2, 0)]);
    }

    #[test]
    fn zero_mask_is_plain_product() {
        let f = fundamental_form(&random_state(2, 1)).unwrap();
        let g = fundamental_form(&random_state(2, 2)).unwrap();
        assert_eq!(transvectant(&f, &g, &[0, 0]).unwrap(), f.mul(&g).unwrap());
        assert!(transvectant(&f, &g, &[1]).is_err());
        assert!(transvectant(&f, &g, &[2, 0]).is_err());
    }

    #[test]
    fn norm_weights() {
        let z = c(0.0);
        assert_eq!(
            covariant_norm(&XPolynomial::constant(1, Complex64::new(3.0, 4.0))),
            25.0
        );
        let f = fundamental_form(
            &AlgebraElement::qubits(1, vec![z, Complex64::new(0.0, 2.0)]).unwrap(),
        )
        .unwrap();
        // c x1 at one site
        assert_eq!(covariant_norm(&f), 4.0);
        // (x0 + 2i x1)(x0 + 2i x1): x0^2 has weight 2!, x0 x1 weight 1
        let g = fundamental_form(&AlgebraElement::qubits(1, vec![c(1.0), z]).unwrap()).unwrap();
        let sq = g.mul(&g).unwrap();
        assert_eq!(covariant_norm(&sq), 2.0);
    }

    #[test]
    fn iota_examples() {
        let psi = random_state(2, 5);
        let iota = iota_chain(&psi, 2, 2).unwrap();
        let d11 = cumulant_poly(&"11".parse().unwrap())
            .unwrap()
            .evaluate(&psi)
            .unwrap();
        assert!((iota.coefficient(&[(0, 0), (0, 0)]) - 2.0 * d11).norm() < 1e-14);
        assert!(iota_chain(&psi, 1, 2).is_err());
        assert!(iota_chain(&psi, 3, 2).is_err());
        assert!(iota_chain(&psi, 2, 3).is_err());
    }

    #[test]
    fn hyperdeterminant_examples() {
        assert!((hyperdeterminant(&ghz(3)).unwrap() - c(-0.5)).norm() < 1e-15);
        assert_eq!(
            hyperdeterminant(&AlgebraElement::identity(3, 2)).unwrap(),
            c(0.0)
        );
        assert!(hyperdeterminant(&w_state(3)).unwrap().norm() < 1e-15);
        assert!(hyperdeterminant(&bell()).is_err());
    }

    #[test]
    fn hyperdeterminant_matches_cayley_polynomial() {
        // Cayley's explicit 2x2x2 form
        let psi = random_state(3, 12);
        let a = |i: usize, j: usize, k: usize| psi.at(4 * i + 2 * j + k);
        let cayley = a(0, 0, 0).powu(2) * a(1, 1, 1).powu(2)
            + a(0, 0, 1).powu(2) * a(1, 1, 0).powu(2)
            + a(0, 1, 0).powu(2) * a(1, 0, 1).powu(2)
            + a(1, 0, 0).powu(2) * a(0, 1, 1).powu(2)
            - 2.0 * a(0, 0, 0) * a(0, 0, 1) * a(1, 1, 0) * a(1, 1, 1)
            - 2.0 * a(0, 0, 0) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 1)
            - 2.0 * a(0, 0, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 1)
            - 2.0 * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 1) * a(1, 1, 0)
            - 2.0 * a(0, 0, 1) * a(1, 0, 0) * a(0, 1, 1) * a(1, 1, 0)
            - 2.0 * a(0, 1, 0) * a(1, 0, 0) * a(0, 1, 1) * a(1, 0, 1)
            + 4.0 * a(0, 0, 0) * a(0, 1, 1) * a(1, 0, 1) * a(1, 1, 0)
            + 4.0 * a(1, 1, 1) * a(1, 0, 0) * a(0, 1, 0) * a(0, 0, 1);
        let det = hyperdeterminant(&psi).unwrap();
        assert!(
            (det.norm() - 2.0 * cayley.norm()).abs() < 1e-14,
            "{det} vs {cayley}"
        );
    }

    #[test]
    fn family_examples() {
        let zero4 = AlgebraElement::identity(4, 2);
        assert_eq!(
            family_covariants(&zero4, CovariantFamily::G, "1111").unwrap(),
            0.0
        );
        let g = family_covariant(&ghz(4), CovariantFamily::G, "1111").unwrap();
        assert!((g.coefficient(&[(0, 0); 4]) - c(1.0)).norm() < 1e-15);
        assert!(
            (family_covariants(&ghz(4), CovariantFamily::G, "1111").unwrap() - 1.0).abs() < 1e-15
        );

        let psi3 = random_state(3, 21);
        let lifted = tensor_product(&psi3, &AlgebraElement::identity(1, 2));
        let h3 = family_covariants(&psi3, CovariantFamily::H, "222").unwrap();
        let h4 = family_covariants(&lifted, CovariantFamily::H, "2220").unwrap();
        assert!(h3 > 1e-6);
        let ratio = h4 / h3;
        assert!(ratio.is_finite() && ratio > 0.0);

        assert!(family_covariants(&zero4, CovariantFamily::G, "1110").is_err());
        assert!(family_covariants(&zero4, CovariantFamily::G, "1200").is_err());
        assert!(family_covariants(&zero4, CovariantFamily::H, "2200").is_err());
        assert!(family_covariants(&zero4, CovariantFamily::H, "222").is_err());
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi_constant(2, 2), 4.0);
        assert_eq!(xi_constant(3, 2), 8.0);
        assert_eq!(xi_constant(3, 3), 4.0);
        assert_eq!(xi_constant(4, 4), 4.0 * 16.0);
    }
}
