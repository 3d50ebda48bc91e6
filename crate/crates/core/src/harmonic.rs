//! Harmonic functions on SG, determined by their three boundary values.

use std::sync::Arc;

use crate::address::Address;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, VertexFunction};

pub type Matrix3 = [[f64; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicFunction {
    pub boundary: [f64; 3],
}

impl HarmonicFunction {
    pub fn new(boundary: [f64; 3]) -> Self {
        HarmonicFunction { boundary }
    }

    /// Boundary values of `h ∘ P_ω`.
    pub fn cell_values(&self, word: &[u8]) -> [f64; 3] {
        let maps = restriction_maps();
        word.iter()
            .fold(self.boundary, |b, &l| apply(&maps[l as usize - 1], b))
    }

    pub fn eval(&self, a: &Address) -> f64 {
        self.cell_values(a.word())[a.terminal() as usize - 1]
    }

    /// Values on every vertex of `mesh`, by top-down cell refinement.
    pub fn on_level(&self, mesh: &Arc<Mesh>) -> VertexFunction {
        let maps = restriction_maps();
        let mut cells = vec![self.boundary];
        for _ in 0..mesh.level() {
            cells = cells
                .iter()
                .flat_map(|b| maps.iter().map(move |m| apply(m, *b)))
                .collect();
        }
        let mut values = vec![0.0; mesh.len()];
        for (corners, b) in mesh.cells().iter().zip(&cells) {
            for t in 0..3 {
                values[corners[t]] = b[t];
            }
        }
        VertexFunction::new(mesh.clone(), values).expect("one value per vertex")
    }
}

fn apply(m: &Matrix3, b: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|r| m[r][0] * b[0] + m[r][1] * b[1] + m[r][2] * b[2])
}

/// `M_i` with `(h ∘ P_i)|_{V_0} = M_i · h|_{V_0}`: row `i` is `e_i`, row `j ≠ i`
/// puts 2/5 on `i` and `j` and 1/5 on the third index.
pub fn restriction_maps() -> [Matrix3; 3] {
    [0usize, 1, 2].map(|i| {
        let mut m = [[0.0; 3]; 3];
        for (j, row) in m.iter_mut().enumerate() {
            if j == i {
                row[i] = 1.0;
            } else {
                let k = 3 - i - j;
                row[i] = 0.4;
                row[j] = 0.4;
                row[k] = 0.2;
            }
        }
        m
    })
}

/// `h(q_{ωt})` evaluated letter by letter along the word.
pub fn eval_harmonic(h: &HarmonicFunction, a: &Address) -> f64 {
    h.eval(a)
}

/// Closed form of `h(q_{i^m j}) + h(q_{i^m k})`:
/// `2 h(q_i) + (3/5)^m (h(q_j) + h(q_k) - 2 h(q_i))`.
pub fn pair_sum(h: &HarmonicFunction, i: u8, m: u32) -> Result<f64> {
    if !(1..=3).contains(&i) {
        return Err(Error::Precondition(format!("index {i} is not in 1..=3")));
    }
    let b = h.boundary;
    let hi = b[i as usize - 1];
    let others: f64 = b.iter().sum::<f64>() - hi;
    Ok(2.0 * hi + 0.6f64.powi(m as i32) * (others - 2.0 * hi))
}
