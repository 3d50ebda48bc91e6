//! Graph Laplacians on `Γ_m`, their renormalized limits, and the Laplacian of
//! FIFs with a uniform vertical scaling factor.
//!
//! For uniform `d` the Laplacian exists on `SG \ V_0` exactly when either the
//! data on `V_1` obey the 1/5–2/5 rule (then `f` is harmonic and `Δf = 0`), or
//! `d = 1/5` and `y_k + x_k / 5` does not depend on `k`; in the second case
//! `Δf ≡ 3 (2x_1 + 2x_2 + x_3 − 5y_3)`.

use serde::Serialize;

use crate::address::{canonicalize, neighbors, Address, CanonicalVertex, DepthCap};
use crate::error::{Error, Result};
use crate::fif::{opposite, FifSpec};
use crate::mesh::VertexFunction;

/// Absolute classification tolerance, scaled by `max(1, ‖x‖∞, ‖y‖∞)`.
pub const CLASSIFY_TOL: f64 = 1e-10;

/// Tolerance on `d` when testing `d = 1/5`.
pub const SCALING_TOL: f64 = 1e-12;

/// `(3/2) 5^m`
pub fn renormalization(m: usize) -> f64 {
    1.5 * 5f64.powi(m as i32)
}

fn interior_check(x: &CanonicalVertex) -> Result<()> {
    if x.is_boundary() {
        Err(Error::BoundaryVertex(x.clone()))
    } else {
        Ok(())
    }
}

/// `Δ_m u(x) = Σ_{y ~_m x} (u(y) − u(x))` for `x ∈ V_m \ V_0`.
pub fn graph_laplacian(u: &VertexFunction, x: &CanonicalVertex) -> Result<f64> {
    let n = u.mesh().require(x)?;
    interior_check(x)?;
    let ux = u.values()[n];
    neighbors(x, u.level())?
        .iter()
        .map(|y| Ok(u.get(y).expect("neighbour lies in the same level") - ux))
        .sum()
}

/// `(3/2) 5^m Δ_m u(x)`
pub fn renormalized_laplacian(u: &VertexFunction, x: &CanonicalVertex) -> Result<f64> {
    Ok(renormalization(u.level()) * graph_laplacian(u, x)?)
}

/// Graph Laplacian at a single vertex of `V_{x.level()}`, evaluating `f` on demand.
pub fn graph_laplacian_with(f: impl Fn(&Address) -> f64, x: &CanonicalVertex) -> Result<f64> {
    interior_check(x)?;
    let fx = f(x.address());
    Ok(neighbors(x, x.level())?
        .iter()
        .map(|y| f(y.address()) - fx)
        .sum())
}

/// Laplacian every interior vertex of `u`'s level, in vertex order.
pub fn laplacian_on_level(u: &VertexFunction) -> Vec<(CanonicalVertex, f64)> {
    let adj = u.mesh().adjacency();
    let vals = u.values();
    u.mesh()
        .vertices()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_boundary())
        .map(|(n, v)| {
            let s: f64 = adj[n].iter().map(|&k| vals[k] - vals[n]).sum();
            (v.clone(), s)
        })
        .collect()
}

/// A point of `V_1`: a corner `q_i` or the midpoint `q_{ij}`, labelled by `k = 6 − i − j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum V1Point {
    Corner(u8),
    Midpoint(u8),
}

impl V1Point {
    pub fn midpoint(i: u8, j: u8) -> V1Point {
        V1Point::Midpoint(opposite(i, j))
    }

    fn slot(self) -> usize {
        match self {
            V1Point::Corner(i) => i as usize - 1,
            V1Point::Midpoint(k) => k as usize + 2,
        }
    }

    /// The three points of `P_i(V_0)`.
    fn cell(i: u8) -> [V1Point; 3] {
        let others: Vec<u8> = (1..=3).filter(|&j| j != i).collect();
        [
            V1Point::Corner(i),
            V1Point::midpoint(i, others[0]),
            V1Point::midpoint(i, others[1]),
        ]
    }
}

/// The boundary-cell operators `Δ_0`, `Δ_1^i` and the combinations `α_ij`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellOperators {
    /// `Δ_0 u(q_i)`
    pub delta0: [f64; 3],
    /// `Δ_1^i u(p)` for cell `i` (row) and `p` in order `q_1, q_2, q_3, q_23, q_13, q_12`.
    pub delta1: [[f64; 6]; 3],
    /// `α_ij` from the operators, indexed by `k = 6 − i − j`.
    pub alpha: [f64; 3],
    /// `α_ij` from the explicit affine form, same indexing.
    pub alpha_affine: [f64; 3],
}

impl CellOperators {
    pub fn delta1_in_cell(&self, cell: u8, p: V1Point) -> f64 {
        self.delta1[cell as usize - 1][p.slot()]
    }

    /// `Δ_1 u(p)`, the full level-1 graph Laplacian.
    pub fn delta1_total(&self, p: V1Point) -> f64 {
        self.delta1.iter().map(|row| row[p.slot()]).sum()
    }

    pub fn alpha(&self, i: u8, j: u8) -> f64 {
        self.alpha[opposite(i, j) as usize - 1]
    }
}

/// Evaluate the cell operators of a function given on `V_1` as `(x, y)`.
pub fn cell_operators(x: [f64; 3], y: [f64; 3]) -> CellOperators {
    let value = |p: V1Point| match p {
        V1Point::Corner(i) => x[i as usize - 1],
        V1Point::Midpoint(k) => y[k as usize - 1],
    };
    let total: f64 = x.iter().sum();
    let delta0 = x.map(|xi| total - 3.0 * xi);
    let mut delta1 = [[0.0; 6]; 3];
    for i in 1..=3u8 {
        let cell = V1Point::cell(i);
        for p in cell {
            delta1[i as usize - 1][p.slot()] = cell
                .iter()
                .filter(|&&q| q != p)
                .map(|&q| value(q) - value(p))
                .sum();
        }
    }
    let mut alpha = [0.0; 3];
    let mut alpha_affine = [0.0; 3];
    for (i, j) in crate::address::PAIRS {
        let k = opposite(i, j);
        let (iu, ju, ku) = (i as usize - 1, j as usize - 1, k as usize - 1);
        alpha[ku] = delta1[iu][V1Point::Corner(i).slot()]
            + delta1[ju][V1Point::Corner(j).slot()]
            + 0.6 * delta0[ku];
        alpha_affine[ku] = -1.4 * x[iu] - 1.4 * x[ju] - 1.2 * x[ku] + y[iu] + y[ju] + 2.0 * y[ku];
    }
    CellOperators {
        delta0,
        delta1,
        alpha,
        alpha_affine,
    }
}

fn uniform_noncritical(spec: &FifSpec) -> Result<f64> {
    let d = spec.uniform_d().ok_or(Error::NonUniform(spec.d()))?;
    if d == 0.6 {
        return Err(Error::CriticalScaling(d));
    }
    Ok(d)
}

/// Closed form of `f(q_{i^m j}) + f(q_{i^m k})` for uniform `d ≠ 3/5`.
pub fn pair_sum_fif(spec: &FifSpec, i: u8, m: u32) -> Result<f64> {
    let d = uniform_noncritical(spec)?;
    if !(1..=3).contains(&i) {
        return Err(Error::Precondition(format!("index {i} is not in 1..=3")));
    }
    let ops = cell_operators(spec.boundary(), spec.midpoints());
    let d0 = ops.delta0[i as usize - 1];
    let d1 = ops.delta1_in_cell(i, V1Point::Corner(i));
    let dm = d.powi(m as i32);
    Ok(2.0 * spec.boundary()[i as usize - 1]
        + dm * d0
        + (d1 - d * d0) / (0.6 - d) * (0.6f64.powi(m as i32) - dm))
}

fn check_pair(i: u8, j: u8) -> Result<()> {
    if i == j || !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::Precondition(format!(
            "({i}, {j}) is not a pair of distinct indices"
        )));
    }
    Ok(())
}

/// Closed form of `Δ_{m+1} f(q_{ij})` for uniform `d ≠ 3/5`:
/// `d α_ij / (3/5 − d) · ((3/5)^m − d^m) + Δ_1 f(q_{ij}) (3/5)^m`.
pub fn midpoint_laplacian_closed_form(spec: &FifSpec, (i, j): (u8, u8), m: u32) -> Result<f64> {
    let d = uniform_noncritical(spec)?;
    check_pair(i, j)?;
    let ops = cell_operators(spec.boundary(), spec.midpoints());
    let p = 0.6f64.powi(m as i32);
    Ok(d * ops.alpha(i, j) / (0.6 - d) * (p - d.powi(m as i32))
        + ops.delta1_total(V1Point::midpoint(i, j)) * p)
}

/// The vertex `q_{ω i j}` written at level `|ω| + 1 + m`.
pub fn midpoint_vertex(omega: &[u8], (i, j): (u8, u8), m: usize) -> Result<CanonicalVertex> {
    check_pair(i, j)?;
    let mut word = omega.to_vec();
    word.push(i);
    let a = Address::new(word, j)?;
    Ok(canonicalize(&a.lift(omega.len() + 1 + m)))
}

/// `Δ_{|ω|+m+1} f(q_{ωij})` summed directly from point values.
pub fn direct_midpoint_laplacian(
    spec: &FifSpec,
    omega: &[u8],
    pair: (u8, u8),
    m: usize,
    cap: DepthCap,
) -> Result<f64> {
    cap.check(omega.len() + m + 1)?;
    let v = midpoint_vertex(omega, pair, m)?;
    graph_laplacian_with(|a| spec.eval(a), &v)
}

/// `d^{|ω|} Δ_{m+1} f(q_{ij})`, the shallow-level value scaled down to cell `ω`.
pub fn laplacian_scaling(
    spec: &FifSpec,
    omega: &[u8],
    pair: (u8, u8),
    m: usize,
    cap: DepthCap,
) -> Result<f64> {
    let d = spec.uniform_d().ok_or(Error::NonUniform(spec.d()))?;
    cap.check(omega.len() + m + 1)?;
    midpoint_vertex(omega, pair, m)?;
    let shallow = direct_midpoint_laplacian(spec, &[], pair, m, cap)?;
    Ok(d.powi(omega.len() as i32) * shallow)
}

/// Entries of the matrices in the linear conditions `α_ij = 0` (`A_1 y = B_1 x`)
/// and `Δ_1 f(q_ij) = 0` (`A_2 y = B_2 x`).
pub mod matrices {
    pub type M3 = [[f64; 3]; 3];

    pub const A1: M3 = [[1.0, 1.0, 2.0], [1.0, 2.0, 1.0], [2.0, 1.0, 1.0]];
    pub const B1: M3 = [[1.4, 1.4, 1.2], [1.4, 1.2, 1.4], [1.2, 1.4, 1.4]];
    pub const A2: M3 = [[1.0, 1.0, -4.0], [1.0, -4.0, 1.0], [-4.0, 1.0, 1.0]];
    pub const B2: M3 = [[-1.0, -1.0, 0.0], [-1.0, 0.0, -1.0], [0.0, -1.0, -1.0]];

    /// The 1/5–2/5 rule as a map from `x` to `y`: `y_k = x_k / 5 + 2 (x_i + x_j) / 5`.
    pub const RULE: M3 = [[0.2, 0.4, 0.4], [0.4, 0.2, 0.4], [0.4, 0.4, 0.2]];

    pub fn det(m: &M3) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(m: &M3) -> Option<M3> {
        let det = det(m);
        if det == 0.0 {
            return None;
        }
        let mut out = [[0.0; 3]; 3];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
                let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
                *slot = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / det;
            }
        }
        Some(out)
    }

    pub fn mul(a: &M3, b: &M3) -> M3 {
        let mut out = [[0.0; 3]; 3];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = (0..3).map(|k| a[r][k] * b[k][c]).sum();
            }
        }
        out
    }

    /// `det(λ A_1 + A_2)`
    pub fn pencil_det(lambda: f64) -> f64 {
        let mut m = A2;
        for (r, row) in m.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot += lambda * A1[r][c];
            }
        }
        det(&m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LaplacianCase {
    HarmonicCase,
    ConstantCase,
    Nonexistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `α_ij`, indexed by `k = 6 − i − j`.
    pub alpha: [f64; 3],
    /// `y − RULE · x`
    pub harmonic_residuals: [f64; 3],
    /// `(y_k + x_k / 5) − mean_k (y_k + x_k / 5)`
    pub y123_residuals: [f64; 3],
    pub tolerance: f64,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaplacianClassification {
    pub case: LaplacianCase,
    pub constant_value: Option<f64>,
    pub diagnostics: Diagnostics,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Decide whether `Δf` exists on `SG \ V_0` for a uniform-`d` FIF, and its value.
pub fn classify(spec: &FifSpec) -> Result<LaplacianClassification> {
    let d = spec.uniform_d().ok_or(Error::NonUniform(spec.d()))?;
    let (x, y) = (spec.boundary(), spec.midpoints());
    let tolerance = CLASSIFY_TOL * inf_norm(&x).max(inf_norm(&y)).max(1.0);
    let harmonic_residuals =
        [0, 1, 2].map(|k| y[k] - (0..3).map(|c| matrices::RULE[k][c] * x[c]).sum::<f64>());
    let shifted = [0, 1, 2].map(|k| y[k] + 0.2 * x[k]);
    let mean = shifted.iter().sum::<f64>() / 3.0;
    let y123_residuals = shifted.map(|s| s - mean);
    let ops = cell_operators(x, y);
    let mut notes = Vec::new();

    let harmonic = inf_norm(&harmonic_residuals) <= tolerance;
    let one_fifth = (d - 0.2).abs() <= SCALING_TOL;
    let (case, constant_value) = if harmonic {
        (LaplacianCase::HarmonicCase, Some(0.0))
    } else if one_fifth && inf_norm(&y123_residuals) <= tolerance {
        (
            LaplacianCase::ConstantCase,
            Some(3.0 * (2.0 * x[0] + 2.0 * x[1] + x[2] - 5.0 * y[2])),
        )
    } else {
        if d * d >= 0.2 {
            notes.push(format!(
                "|d| = {} >= 1/sqrt(5): the energy is infinite, so f is not in dom Δ",
                d.abs()
            ));
        }
        if (d - 0.5).abs() <= SCALING_TOL {
            notes.push(
                "d = 1/2 is the other root of det(λA1 + A2) = 0 but is excluded by |d| < 1/sqrt(5)"
                    .into(),
            );
        }
        if one_fifth {
            notes.push("d = 1/5 but y_k + x_k/5 is not constant in k".into());
        }
        (LaplacianCase::Nonexistent, None)
    };
    if case == LaplacianCase::ConstantCase {
        notes.push(format!("equals -(15/4) α_12 = {}", -3.75 * ops.alpha(1, 2)));
    }
    Ok(LaplacianClassification {
        case,
        constant_value,
        diagnostics: Diagnostics {
            alpha: ops.alpha,
            harmonic_residuals,
            y123_residuals,
            tolerance,
            notes,
        },
    })
}

/// `Δf(q_{ωij}) = (5d)^{|ω|} Δf(q_{ij})` at an interior point.
pub fn laplacian_at(spec: &FifSpec, a: &Address) -> Result<f64> {
    let v = canonicalize(a);
    interior_check(&v)?;
    let class = classify(spec)?;
    let value = match class.case {
        LaplacianCase::Nonexistent => return Err(Error::LaplacianNonexistent),
        LaplacianCase::HarmonicCase => return Ok(0.0),
        LaplacianCase::ConstantCase => class.constant_value.expect("constant case has a value"),
    };
    let t = v.address().terminal();
    let depth = v
        .address()
        .word()
        .iter()
        .rposition(|&l| l != t)
        .expect("interior")
        + 1;
    let d = spec.uniform_d().expect("classified specs are uniform");
    Ok((5.0 * d).powi(depth as i32 - 1) * value)
}

/// The renormalized graph Laplacian at one vertex over a range of levels.
#[derive(Clone, Debug, Serialize)]
pub struct RenormalizedSeries {
    pub vertex: String,
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    pub divergent: bool,
}

/// Growth of at least 2x per level across three consecutive levels, above the
/// round-off floor `~ ε · scale · 5^m`.
pub fn detect_divergence(levels: &[usize], values: &[f64], scale: f64) -> bool {
    let floor = |m: usize| 1e3 * f64::EPSILON * scale.max(1.0) * 8.0 * renormalization(m);
    levels.windows(3).zip(values.windows(3)).any(|(l, v)| {
        v[0] != 0.0
            && v[1].abs() >= 2.0 * v[0].abs()
            && v[2].abs() >= 2.0 * v[1].abs()
            && v[2].abs() > floor(l[2])
    })
}

pub fn renormalized_series(
    spec: &FifSpec,
    a: &Address,
    m_max: usize,
    cap: DepthCap,
) -> Result<RenormalizedSeries> {
    cap.check(m_max)?;
    let v = canonicalize(a);
    interior_check(&v)?;
    let t = v.address().terminal();
    let first = v
        .address()
        .word()
        .iter()
        .rposition(|&l| l != t)
        .expect("interior")
        + 1;
    let mut levels = Vec::new();
    let mut values = Vec::new();
    for m in first..=m_max {
        let x = v.lift(m);
        levels.push(m);
        values.push(renormalization(m) * graph_laplacian_with(|b| spec.eval(b), &x)?);
    }
    let scale = inf_norm(&spec.boundary()).max(inf_norm(&spec.midpoints()));
    let divergent = detect_divergence(&levels, &values, scale);
    Ok(RenormalizedSeries {
        vertex: v.to_string(),
        levels,
        values,
        divergent,
    })
}

/// The FIF with `d = 1/5` solving `u(q_i) = a_i`, `Δu = η` on `SG \ V_0`:
/// `u(q_{ij}) = (2a_i + 2a_j + a_k − η/3) / 5`.
pub fn solve_dirichlet(a: [f64; 3], eta: f64) -> Result<FifSpec> {
    let y = [0usize, 1, 2].map(|k| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        (2.0 * a[i] + 2.0 * a[j] + a[k] - eta / 3.0) / 5.0
    });
    FifSpec::uniform(a, y, 0.2)
}
