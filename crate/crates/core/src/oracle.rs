//! Brute-force reference computations that share nothing with the closed forms:
//! energy-minimizing extensions and discrete Dirichlet problems, both solved as
//! sparse symmetric positive-definite systems by direct elimination.
//!
//! Only the address/mesh plumbing is shared with the rest of the crate.

use std::collections::BTreeMap;

use crate::address::{edges_at_level, DepthCap};
use crate::energy::HarmonicStructure;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, VertexFunction};

pub const DEFAULT_SOLVER_CAP: usize = 7;

/// Symmetric system `A x = b` stored as its lower triangle, row by row.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    lower: Vec<BTreeMap<usize, f64>>,
    rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn new(n: usize) -> Self {
        LinearSystem {
            lower: vec![BTreeMap::new(); n],
            rhs: vec![0.0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `A[i][j] += v` and, for `i != j`, `A[j][i] += v`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        *self.lower[r].entry(c).or_insert(0.0) += v;
    }

    pub fn add_rhs(&mut self, i: usize, v: f64) {
        self.rhs[i] += v;
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.lower[r].get(&c).copied().unwrap_or(0.0)
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Whether every off-diagonal row sum is strictly dominated by the diagonal.
    pub fn diagonally_dominant(&self) -> bool {
        let n = self.dim();
        let mut off = vec![0.0; n];
        for (r, row) in self.lower.iter().enumerate() {
            for (&c, &v) in row {
                if c != r {
                    off[r] += v.abs();
                    off[c] += v.abs();
                }
            }
        }
        (0..n).all(|r| self.entry(r, r) >= off[r] && self.entry(r, r) > 0.0)
    }

    /// Envelope Cholesky factorization in the given row order, then two triangular solves.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let first: Vec<usize> = self
            .lower
            .iter()
            .enumerate()
            .map(|(r, row)| row.keys().next().copied().unwrap_or(r).min(r))
            .collect();
        // rows[i][k - first[i]] = L[i][k]
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let fi = first[i];
            let mut row = vec![0.0; i - fi + 1];
            for (&c, &v) in &self.lower[i] {
                row[c - fi] = v;
            }
            for j in fi..=i {
                let fj = first[j];
                let start = fi.max(fj);
                let mut s = row[j - fi];
                if j < i {
                    let lj = &rows[j];
                    for k in start..j {
                        s -= row[k - fi] * lj[k - fj];
                    }
                    row[j - fi] = s / lj[j - fj];
                } else {
                    for k in start..i {
                        s -= row[k - fi] * row[k - fi];
                    }
                    if s.is_nan() || s <= 0.0 {
                        return Err(Error::SingularSystem { row: i, pivot: s });
                    }
                    row[i - fi] = s.sqrt();
                }
            }
            rows.push(row);
        }
        let mut x = self.rhs.clone();
        for i in 0..n {
            let fi = first[i];
            let mut s = x[i];
            for k in fi..i {
                s -= rows[i][k - fi] * x[k];
            }
            x[i] = s / rows[i][i - fi];
        }
        for i in (0..n).rev() {
            let fi = first[i];
            x[i] /= rows[i][i - fi];
            let xi = x[i];
            for k in fi..i {
                x[k] -= rows[i][k - fi] * xi;
            }
        }
        Ok(x)
    }
}

/// Edge list of `Γ_m` as mesh indices with weights `c_ij / r_ω`.
fn weighted_edges(
    mesh: &Mesh,
    hs: &HarmonicStructure,
    cap: DepthCap,
) -> Result<Vec<(usize, usize, f64)>> {
    edges_at_level(mesh.level(), cap)?
        .into_iter()
        .map(|e| {
            let r: f64 = e.cell.iter().map(|&l| hs.ratios[l as usize - 1]).product();
            let c = match e.pair {
                (1, 2) => hs.conductances[0],
                (1, 3) => hs.conductances[1],
                _ => hs.conductances[2],
            };
            let a = mesh.require(&e.endpoints.0)?;
            let b = mesh.require(&e.endpoints.1)?;
            Ok((a, b, c / r))
        })
        .collect()
}

/// Assemble and solve the normal equations of a weighted Dirichlet energy with
/// the values at `known` vertices held fixed.
fn constrained_minimizer(
    n: usize,
    edges: &[(usize, usize, f64)],
    known: &[Option<f64>],
    source: impl Fn(usize) -> f64,
) -> Result<Vec<f64>> {
    let mut slot = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    for v in 0..n {
        if known[v].is_none() {
            slot[v] = unknowns.len();
            unknowns.push(v);
        }
    }
    let mut sys = LinearSystem::new(unknowns.len());
    for &(a, b, w) in edges {
        match (known[a], known[b]) {
            (None, None) => {
                sys.add(slot[a], slot[a], w);
                sys.add(slot[b], slot[b], w);
                sys.add(slot[a], slot[b], -w);
            }
            (None, Some(vb)) => {
                sys.add(slot[a], slot[a], w);
                sys.add_rhs(slot[a], w * vb);
            }
            (Some(va), None) => {
                sys.add(slot[b], slot[b], w);
                sys.add_rhs(slot[b], w * va);
            }
            (Some(_), Some(_)) => {}
        }
    }
    for (s, &v) in unknowns.iter().enumerate() {
        sys.add_rhs(s, source(v));
    }
    let sol = sys.solve()?;
    Ok((0..n)
        .map(|v| known[v].unwrap_or_else(|| sol[slot[v]]))
        .collect())
}

/// The extension of `u` from `V_{m-1}` to `V_m` that minimizes `E_m`.
pub fn minimize_extension(
    u: &VertexFunction,
    hs: &HarmonicStructure,
    cap: DepthCap,
) -> Result<VertexFunction> {
    let m = u.level() + 1;
    cap.check(m)?;
    let mesh = Mesh::new(m, cap)?;
    let known: Vec<Option<f64>> = mesh
        .vertices()
        .iter()
        .map(|v| {
            let a = v.address();
            let word = a.word();
            (word[m - 1] == a.terminal()).then(|| {
                let coarse =
                    crate::address::Address::new_unchecked(word[..m - 1].to_vec(), a.terminal());
                u.at(&coarse).expect("coarse vertex lies in V_{m-1}")
            })
        })
        .collect();
    let edges = weighted_edges(&mesh, hs, cap)?;
    let values = constrained_minimizer(mesh.len(), &edges, &known, |_| 0.0)?;
    VertexFunction::new(mesh, values)
}

/// Solve `(3/2) 5^m Δ_m u(x) = η` on `V_m \ V_0` with `u(q_i) = a_i`.
pub fn solve_discrete_dirichlet(
    a: [f64; 3],
    eta: f64,
    m: usize,
    solver_cap: usize,
) -> Result<VertexFunction> {
    if m > solver_cap {
        return Err(Error::SolverCap {
            requested: m,
            cap: solver_cap,
        });
    }
    let cap = DepthCap(m.max(solver_cap));
    let mesh = Mesh::new(m, cap)?;
    let known: Vec<Option<f64>> = mesh
        .vertices()
        .iter()
        .map(|v| v.boundary_index().map(|i| a[i as usize - 1]))
        .collect();
    let edges: Vec<(usize, usize, f64)> = edges_at_level(m, cap)?
        .into_iter()
        .map(|e| {
            Ok((
                mesh.require(&e.endpoints.0)?,
                mesh.require(&e.endpoints.1)?,
                1.0,
            ))
        })
        .collect::<Result<_>>()?;
    // Σ_y (u_y − u_x) = η / ((3/2) 5^m)  ⇔  4 u_x − Σ_y u_y = −η / ((3/2) 5^m)
    let scaled = eta / (1.5 * 5f64.powi(m as i32));
    let values = constrained_minimizer(mesh.len(), &edges, &known, |_| -scaled)?;
    VertexFunction::new(mesh, values)
}
