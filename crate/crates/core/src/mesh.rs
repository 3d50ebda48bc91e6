//! Indexed level structures: `V_m` with cell corner tables, and functions on it.

use std::collections::HashMap;
use std::sync::Arc;

use crate::address::{
    canonicalize, cell_count, cell_word, vertices_at_level, Address, CanonicalVertex, DepthCap,
};
use crate::error::{Error, Result};

/// `V_m` with a stable index per canonical vertex (sorted canonical order)
/// and the three corner indices of every level-`m` cell (lexicographic cell order).
#[derive(Debug)]
pub struct Mesh {
    level: usize,
    vertices: Vec<CanonicalVertex>,
    index: HashMap<Address, usize>,
    cells: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn new(level: usize, cap: DepthCap) -> Result<Arc<Mesh>> {
        let vertices = vertices_at_level(level, cap)?;
        let index: HashMap<Address, usize> = vertices
            .iter()
            .enumerate()
            .map(|(n, v)| (v.address().clone(), n))
            .collect();
        let cells = (0..cell_count(level))
            .map(|n| {
                let word = cell_word(n, level);
                [1u8, 2, 3].map(|t| {
                    let v = canonicalize(&Address::new_unchecked(word.clone(), t));
                    index[v.address()]
                })
            })
            .collect();
        Ok(Arc::new(Mesh {
            level,
            vertices,
            index,
            cells,
        }))
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertices(&self) -> &[CanonicalVertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Corner indices `[P_ω q_1, P_ω q_2, P_ω q_3]`, indexed like [`cell_word`].
    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn index_of(&self, v: &CanonicalVertex) -> Option<usize> {
        if v.level() != self.level {
            return None;
        }
        self.index.get(v.address()).copied()
    }

    /// Index of any (not necessarily canonical) level-`m` address.
    pub fn index_of_address(&self, a: &Address) -> Option<usize> {
        if a.len() != self.level {
            return None;
        }
        self.index.get(canonicalize(a).address()).copied()
    }

    pub fn require(&self, v: &CanonicalVertex) -> Result<usize> {
        self.index_of(v).ok_or_else(|| Error::NotInLevel {
            vertex: v.clone(),
            level: self.level,
        })
    }

    /// Adjacency lists built from the cell table, indices sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::with_capacity(4); self.len()];
        for cell in &self.cells {
            for a in 0..3 {
                for b in 0..3 {
                    if a != b {
                        adj[cell[a]].push(cell[b]);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// A real-valued function on exactly the vertices of one `V_m`.
#[derive(Clone, Debug)]
pub struct VertexFunction {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl VertexFunction {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::Precondition(format!(
                "{} values supplied for {} vertices of V_{}",
                values.len(),
                mesh.len(),
                mesh.level()
            )));
        }
        Ok(VertexFunction { mesh, values })
    }

    pub fn from_fn(mesh: Arc<Mesh>, mut f: impl FnMut(&CanonicalVertex) -> f64) -> Self {
        let values = mesh.vertices().iter().map(&mut f).collect();
        VertexFunction { mesh, values }
    }

    pub fn level(&self) -> usize {
        self.mesh.level()
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: &CanonicalVertex) -> Option<f64> {
        self.mesh.index_of(v).map(|n| self.values[n])
    }

    pub fn at(&self, a: &Address) -> Option<f64> {
        self.mesh.index_of_address(a).map(|n| self.values[n])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalVertex, f64)> + '_ {
        self.mesh.vertices().iter().zip(self.values.iter().copied())
    }

    pub(crate) fn same_level(&self, other: &VertexFunction) -> Result<()> {
        if self.level() != other.level() {
            return Err(Error::DomainMismatch {
                left: self.level(),
                right: other.level(),
            });
        }
        Ok(())
    }
}
