//! Sudbery's three-qubit invariants and their relations to the cumulant family.

use serde::Serialize;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::invariant::{invariant_i, InvariantIndex};
use crate::mixed::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SudberyJ {
    /// `<psi|psi>`
    J1,
    /// `tr rho_3^2`
    J2,
    /// `tr rho_2^2`
    J3,
    /// `tr rho_1^2`
    J4,
    /// `3 tr[(rho_1 x rho_2) rho_12] - tr rho_1^3 - tr rho_2^3`
    J5,
}

impl SudberyJ {
    pub const ALL: [SudberyJ; 5] = [Self::J1, Self::J2, Self::J3, Self::J4, Self::J5];
}

fn check_three_qubits(state: &AlgebraElement) -> Result<()> {
    if state.d() != 2 {
        return Err(Error::UnsupportedDimension(state.d()));
    }
    if state.n() != 3 {
        return Err(Error::Shape(format!(
            "Sudbery invariants need 3 qubits, got {}",
            state.n()
        )));
    }
    Ok(())
}

pub fn sudbery_j(state: &AlgebraElement, which: SudberyJ) -> Result<f64> {
    check_three_qubits(state)?;
    let rho = DensityMatrix::from_pure(state)?;
    let purity = |site: usize| -> Result<f64> {
        let r = rho.partial_trace(&[site])?;
        Ok(r.matrix().iter().map(|c| c.norm_sqr()).sum())
    };
    Ok(match which {
        SudberyJ::J1 => state.norm_sqr(),
        SudberyJ::J2 => purity(2)?,
        SudberyJ::J3 => purity(1)?,
        SudberyJ::J4 => purity(0)?,
        SudberyJ::J5 => {
            let r1 = rho.partial_trace(&[0])?;
            let r2 = rho.partial_trace(&[1])?;
            let r12 = rho.partial_trace(&[0, 1])?;
            let mixed = (r1.kron(&r2).matrix() * r12.matrix()).trace();
            let cube = |r: &DensityMatrix| (r.matrix() * r.matrix() * r.matrix()).trace().re;
            3.0 * mixed.re - cube(&r1) - cube(&r2)
        }
    })
}

/// One evaluated identity `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Evaluates the five identities linking `I_100, I_110, I_101, I_011, I_111`
/// to `J1..J5`.
pub fn check_relations(state: &AlgebraElement) -> Result<Vec<RelationCheck>> {
    check_three_qubits(state)?;
    let j: Vec<f64> = SudberyJ::ALL
        .iter()
        .map(|&w| sudbery_j(state, w))
        .collect::<Result<_>>()?;
    let (j1, j2, j3, j4, j5) = (j[0], j[1], j[2], j[3], j[4]);
    let i = |s: &str| -> Result<f64> { invariant_i(state, &s.parse::<InvariantIndex>()?) };
    let rows = [
        ("I100 = J1", i("100")?, j1),
        (
            "4 I110 = J1^2 + J2 - J3 - J4",
            4.0 * i("110")?,
            j1 * j1 + j2 - j3 - j4,
        ),
        (
            "4 I101 = J1^2 + J3 - J2 - J4",
            4.0 * i("101")?,
            j1 * j1 + j3 - j2 - j4,
        ),
        (
            "4 I011 = J1^2 + J4 - J2 - J3",
            4.0 * i("011")?,
            j1 * j1 + j4 - j2 - j3,
        ),
        (
            "6 I111 = 5 J1^3 - 3 J1 (J2 + J3 + J4) + 4 J5",
            6.0 * i("111")?,
            5.0 * j1.powi(3) - 3.0 * j1 * (j2 + j3 + j4) + 4.0 * j5,
        ),
    ];
    Ok(rows
        .into_iter()
        .map(|(name, lhs, rhs)| RelationCheck {
            name,
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
        })
        .collect())
}
