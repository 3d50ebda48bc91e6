//! Graph energies `E_m`, the bilinear form, and the closed-form total energy of an FIF.

use serde::Serialize;

use crate::address::{cell_count, DepthCap};
use crate::error::{Error, Result};
use crate::fif::FifSpec;
use crate::mesh::VertexFunction;

/// Relative tolerance for deciding `E_1 = E_0`.
pub const HARMONIC_REL_TOL: f64 = 1e-12;

/// Conductances `c_12, c_13, c_23` and renormalization ratios `r_1, r_2, r_3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HarmonicStructure {
    pub conductances: [f64; 3],
    pub ratios: [f64; 3],
}

impl Default for HarmonicStructure {
    /// The standard structure on SG: `c_ij = 1`, `r_i = 3/5`.
    fn default() -> Self {
        HarmonicStructure {
            conductances: [1.0; 3],
            ratios: [0.6; 3],
        }
    }
}

impl HarmonicStructure {
    pub fn new(conductances: [f64; 3], ratios: [f64; 3]) -> Result<Self> {
        if conductances
            .iter()
            .chain(&ratios)
            .any(|&v| !(v > 0.0 && v.is_finite()))
        {
            return Err(Error::Precondition(
                "conductances and ratios must be positive and finite".into(),
            ));
        }
        Ok(HarmonicStructure {
            conductances,
            ratios,
        })
    }

    /// `r_ω^{-1}` for every level-`m` cell, in lexicographic cell order.
    pub fn cell_weights(&self, m: usize) -> Vec<f64> {
        let inv = self.ratios.map(|r| 1.0 / r);
        let mut w = vec![1.0];
        for _ in 0..m {
            w = w.iter().flat_map(|&p| inv.map(|q| p * q)).collect();
        }
        debug_assert_eq!(w.len(), cell_count(m));
        w
    }
}

const CELL_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// `E_m(u, v) = Σ_{x ~_m y} c_m(x,y) (u(x) - u(y)) (v(x) - v(y))`
pub fn graph_energy_bilinear(
    u: &VertexFunction,
    v: &VertexFunction,
    hs: &HarmonicStructure,
) -> Result<f64> {
    u.same_level(v)?;
    let weights = hs.cell_weights(u.level());
    let (a, b) = (u.values(), v.values());
    let mut total = 0.0;
    for (cell, w) in u.mesh().cells().iter().zip(&weights) {
        let mut s = 0.0;
        for (e, &(p, q)) in CELL_PAIRS.iter().enumerate() {
            let (x, y) = (cell[p], cell[q]);
            s += hs.conductances[e] * (a[x] - a[y]) * (b[x] - b[y]);
        }
        total += w * s;
    }
    Ok(total)
}

pub fn graph_energy(u: &VertexFunction, hs: &HarmonicStructure) -> f64 {
    graph_energy_bilinear(u, u, hs).expect("same function, same level")
}

/// `δ = Σ_k r_k^{-1} d_k²`
pub fn delta_factor(d: [f64; 3], hs: &HarmonicStructure) -> f64 {
    d.iter().zip(&hs.ratios).map(|(d, r)| d * d / r).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EnergyClass {
    Harmonic,
    Finite,
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedForm {
    pub class: EnergyClass,
    /// `+∞` when the class is `Infinite`.
    pub total: f64,
}

fn approx_equal_energy(e0: f64, e1: f64) -> bool {
    (e1 - e0).abs() <= HARMONIC_REL_TOL * e0.abs().max(e1.abs())
}

/// Total energy from `E_0`, `E_1` and `δ`.
///
/// `E_1 = E_0` (to [`HARMONIC_REL_TOL`]) is the harmonic case with total `E_0`;
/// otherwise the energy is finite iff `δ < 1`, with total
/// `E_0 + (E_1 - E_0) / (1 - δ)`.
pub fn energy_closed_form(e0: f64, e1: f64, delta: f64) -> Result<ClosedForm> {
    if !(e0.is_finite() && e1.is_finite() && delta.is_finite()) {
        return Err(Error::Precondition("energies and δ must be finite".into()));
    }
    if delta < 0.0 {
        return Err(Error::Precondition(format!("δ = {delta} is negative")));
    }
    if e0 < 0.0 || e1 < e0 && !approx_equal_energy(e0, e1) {
        return Err(Error::Precondition(format!(
            "energies must satisfy 0 <= E0 <= E1, got E0 = {e0}, E1 = {e1}"
        )));
    }
    Ok(if approx_equal_energy(e0, e1) {
        ClosedForm {
            class: EnergyClass::Harmonic,
            total: e0,
        }
    } else if delta < 1.0 {
        ClosedForm {
            class: EnergyClass::Finite,
            total: e0 + (e1 - e0) / (1.0 - delta),
        }
    } else {
        ClosedForm {
            class: EnergyClass::Infinite,
            total: f64::INFINITY,
        }
    })
}

/// `E_m` predicted from `E_0`, `E_1`, `δ` by the explicit solution of the recursion.
pub fn energy_at_level(e0: f64, e1: f64, delta: f64, m: u32) -> f64 {
    if delta == 1.0 {
        e0 + m as f64 * (e1 - e0)
    } else {
        delta.powi(m as i32) / (1.0 - delta) * (e0 - e1) + e0 + (e1 - e0) / (1.0 - delta)
    }
}

/// Deviation relative to the larger of the two values and `floor`; the floor keeps
/// `E_0 = 0` from turning round-off into an O(1) residual.
fn rel_residual(actual: f64, predicted: f64, floor: f64) -> f64 {
    let diff = (actual - predicted).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / actual.abs().max(predicted.abs()).max(floor)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyReport {
    /// Directly summed `E_0 ..= E_{m_max}`.
    pub energies: Vec<f64>,
    pub delta: f64,
    /// Relative deviation of `E_m` from `δ (E_{m-1} - E_0) + E_1`; zero for `m < 2`.
    pub recursion_residuals: Vec<f64>,
    /// Relative deviation of `E_m` from [`energy_at_level`].
    pub formula_residuals: Vec<f64>,
    pub max_recursion_residual: f64,
    pub max_formula_residual: f64,
    pub monotone: bool,
    pub classification: EnergyClass,
    pub closed_form_total: f64,
}

/// Sum `E_0 ..= E_{m_max}` directly and compare against the recursion and its closed form.
pub fn verify_recursion(
    spec: &FifSpec,
    m_max: usize,
    hs: &HarmonicStructure,
    cap: DepthCap,
) -> Result<EnergyReport> {
    cap.check(m_max)?;
    let mut energies = Vec::with_capacity(m_max + 1);
    let mut u = spec.on_level(0, cap)?;
    energies.push(graph_energy(&u, hs));
    for _ in 0..m_max {
        u = spec.refine(&u, cap)?;
        energies.push(graph_energy(&u, hs));
    }
    let delta = delta_factor(spec.d(), hs);
    let e0 = energies[0];
    let e1 = energies
        .get(1)
        .copied()
        .unwrap_or_else(|| graph_energy(&spec.on_level(1, cap).expect("level 1 within cap"), hs));
    let floor = e0.abs().max(e1.abs());
    let recursion_residuals: Vec<f64> = energies
        .iter()
        .enumerate()
        .map(|(m, &em)| {
            if m < 2 {
                0.0
            } else {
                rel_residual(em, delta * (energies[m - 1] - e0) + e1, floor)
            }
        })
        .collect();
    let formula_residuals: Vec<f64> = energies
        .iter()
        .enumerate()
        .map(|(m, &em)| rel_residual(em, energy_at_level(e0, e1, delta, m as u32), floor))
        .collect();
    let monotone = energies
        .windows(2)
        .all(|w| w[1] >= w[0] || approx_equal_energy(w[0], w[1]));
    let closed = energy_closed_form(e0, e1, delta)?;
    Ok(EnergyReport {
        max_recursion_residual: recursion_residuals.iter().cloned().fold(0.0, f64::max),
        max_formula_residual: formula_residuals.iter().cloned().fold(0.0, f64::max),
        energies,
        delta,
        recursion_residuals,
        formula_residuals,
        monotone,
        classification: closed.class,
        closed_form_total: closed.total,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EnergyTrend {
    Constant,
    Saturating,
    Growing,
    Undetermined,
}

/// Classify the tail of an energy sequence (levels beyond 3) by its increments:
/// constant, geometrically shrinking, or non-shrinking.
pub fn energy_trend(energies: &[f64]) -> EnergyTrend {
    if energies.len() < 6 {
        return EnergyTrend::Undetermined;
    }
    let scale = energies.iter().cloned().fold(0.0, f64::max);
    let inc: Vec<f64> = energies[3..].windows(2).map(|w| w[1] - w[0]).collect();
    if inc.iter().all(|d| d.abs() <= HARMONIC_REL_TOL * scale) {
        return EnergyTrend::Constant;
    }
    if inc.iter().any(|&d| d <= 0.0) {
        return EnergyTrend::Undetermined;
    }
    let ratios: Vec<f64> = inc.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().all(|&r| r < 1.0) {
        EnergyTrend::Saturating
    } else if ratios.iter().all(|&r| r >= 1.0) {
        EnergyTrend::Growing
    } else {
        EnergyTrend::Undetermined
    }
}
