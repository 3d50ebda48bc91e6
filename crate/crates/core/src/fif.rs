//! Fractal interpolation functions on SG.
//!
//! An FIF is fixed by its six values on `V_1` and three vertical scaling
//! factors; it is the unique continuous `f` with
//! `f(P_i x) = d_i f(x) + h_i(x)` for harmonic `h_i`.
//!
//! Midpoint convention: `y_k = f(q_{ij})` where `{i, j, k} = {1, 2, 3}`.

use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::address::{canonicalize, Address, DepthCap};
use crate::error::{Error, Result};
use crate::harmonic::HarmonicFunction;
use crate::mesh::Mesh;
pub use crate::mesh::VertexFunction;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FifSpec {
    boundary: [f64; 3],
    midpoints: [f64; 3],
    d: [f64; 3],
}

/// Index `k` of the midpoint `q_{ij}` (`k = 6 - i - j`, 1-based).
pub fn opposite(i: u8, j: u8) -> u8 {
    debug_assert!(i != j);
    6 - i - j
}

impl FifSpec {
    pub fn new(boundary: [f64; 3], midpoints: [f64; 3], d: [f64; 3]) -> Result<Self> {
        if boundary.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec {
                field: "boundary",
                reason: "values must be finite".into(),
            });
        }
        if midpoints.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec {
                field: "midpoints",
                reason: "values must be finite".into(),
            });
        }
        if let Some(bad) = d.iter().find(|v| v.is_nan() || v.abs() >= 1.0) {
            return Err(Error::InvalidSpec {
                field: "d",
                reason: format!("vertical scaling factor {bad} is outside (-1, 1)"),
            });
        }
        Ok(FifSpec {
            boundary,
            midpoints,
            d,
        })
    }

    pub fn uniform(boundary: [f64; 3], midpoints: [f64; 3], d: f64) -> Result<Self> {
        Self::new(boundary, midpoints, [d; 3])
    }

    pub fn boundary(&self) -> [f64; 3] {
        self.boundary
    }

    pub fn midpoints(&self) -> [f64; 3] {
        self.midpoints
    }

    pub fn d(&self) -> [f64; 3] {
        self.d
    }

    /// The common factor when `d_1 = d_2 = d_3`.
    pub fn uniform_d(&self) -> Option<f64> {
        let [a, b, c] = self.d;
        (a == b && b == c).then_some(a)
    }

    /// `f(q_{ωt})` for `|ω| <= 1`, read straight from the data.
    fn level_one_value(&self, a: &Address) -> f64 {
        let t = a.terminal();
        match a.word() {
            [] => self.boundary[t as usize - 1],
            [i] if *i == t => self.boundary[t as usize - 1],
            [i] => self.midpoints[opposite(*i, t) as usize - 1],
            _ => unreachable!("level_one_value called on a deep address"),
        }
    }

    /// `h_i(q_j) = f(q_{ij}) - d_i f(q_j)`, with `f(q_{ii}) = f(q_i)`.
    pub fn harmonics(&self) -> [HarmonicFunction; 3] {
        [1u8, 2, 3].map(|i| {
            let di = self.d[i as usize - 1];
            HarmonicFunction::new([1u8, 2, 3].map(|j| {
                let fij = self.level_one_value(&Address::new_unchecked(vec![i], j));
                fij - di * self.boundary[j as usize - 1]
            }))
        })
    }

    /// Pointwise evaluation by unrolling the self-similar recursion along the word.
    pub fn eval(&self, a: &Address) -> f64 {
        let t = a.terminal();
        let word = a.word();
        let depth = word.iter().rposition(|&l| l != t).map_or(0, |k| k + 1);
        let word = &word[..depth];
        if word.len() <= 1 {
            return self.level_one_value(&Address::new_unchecked(word.to_vec(), t));
        }
        let hs = self.harmonics();
        let mut scale = 1.0;
        let mut acc = 0.0;
        for n in 0..word.len() - 1 {
            let i = word[n] as usize - 1;
            let rest = Address::new_unchecked(word[n + 1..].to_vec(), t);
            acc += scale * hs[i].eval(&rest);
            scale *= self.d[i];
        }
        let base = Address::new_unchecked(word[word.len() - 1..].to_vec(), t);
        acc + scale * self.level_one_value(&base)
    }

    /// Values on all of `V_m`.
    pub fn on_level(&self, m: usize, cap: DepthCap) -> Result<VertexFunction> {
        cap.check(m)?;
        let mesh0 = Mesh::new(0, cap)?;
        let mut prev = VertexFunction::new(mesh0, self.boundary.to_vec())?;
        for level in 1..=m {
            prev = self.refine(&prev, cap)?;
            debug_assert_eq!(prev.level(), level);
        }
        Ok(prev)
    }

    /// `f` on `V_{m+1}` from `f` on `V_m`: cell `i` of the new level carries
    /// `d_i · f + h_i` sampled on `V_m`; points already in `V_m` are copied.
    pub fn refine(&self, prev: &VertexFunction, cap: DepthCap) -> Result<VertexFunction> {
        let level = prev.level() + 1;
        let mesh = Mesh::new(level, cap)?;
        let prev_mesh = prev.mesh();
        let hvals: Vec<VertexFunction> = self
            .harmonics()
            .iter()
            .map(|h| h.on_level(prev_mesh))
            .collect();
        let values = mesh
            .vertices()
            .iter()
            .map(|v| {
                let a = v.address();
                if level == 1 {
                    return self.level_one_value(a);
                }
                let word = a.word();
                if word[level - 1] == a.terminal() {
                    let old = Address::new_unchecked(word[..level - 1].to_vec(), a.terminal());
                    return prev
                        .at(&old)
                        .expect("lifted vertex lies in the previous level");
                }
                let i = word[0] as usize - 1;
                let rest = Address::new_unchecked(word[1..].to_vec(), a.terminal());
                let n = prev_mesh
                    .index_of_address(&rest)
                    .expect("tail address lies in the previous level");
                self.d[i] * prev.values()[n] + hvals[i].values()[n]
            })
            .collect();
        VertexFunction::new(mesh, values)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "boundary": self.boundary,
            "midpoints": self.midpoints,
            "d": self.d,
        })
    }

    /// Parse the JSON spec format. `"d"` may be a scalar (uniform shorthand)
    /// or a three-element array; errors name the offending field.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or(Error::InvalidSpec {
            field: "spec",
            reason: "expected a JSON object".into(),
        })?;
        if let Some(extra) = obj
            .keys()
            .find(|k| !matches!(k.as_str(), "boundary" | "midpoints" | "d"))
        {
            return Err(Error::InvalidSpec {
                field: "spec",
                reason: format!("unknown field `{extra}`"),
            });
        }
        let boundary = triple(obj, "boundary")?;
        let midpoints = triple(obj, "midpoints")?;
        let d = match obj.get("d") {
            Some(Value::Number(n)) => [n.as_f64().unwrap_or(f64::NAN); 3],
            Some(_) => triple(obj, "d")?,
            None => {
                return Err(Error::InvalidSpec {
                    field: "d",
                    reason: "missing".into(),
                })
            }
        };
        Self::new(boundary, midpoints, d)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        Self::from_json_value(&v)
    }
}

fn triple(obj: &Map<String, Value>, field: &'static str) -> Result<[f64; 3]> {
    let bad = |reason: String| Error::InvalidSpec { field, reason };
    let arr = obj
        .get(field)
        .ok_or_else(|| bad("missing".into()))?
        .as_array()
        .ok_or_else(|| bad("expected an array of three numbers".into()))?;
    if arr.len() != 3 {
        return Err(bad(format!("expected 3 numbers, found {}", arr.len())));
    }
    let mut out = [0.0; 3];
    for (slot, v) in out.iter_mut().zip(arr) {
        *slot = v
            .as_f64()
            .ok_or_else(|| bad(format!("`{v}` is not a number")))?;
    }
    Ok(out)
}

impl Serialize for FifSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FifSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        FifSpec::from_json_value(&v).map_err(serde::de::Error::custom)
    }
}

/// The three harmonic functions `h_i` of the defining recursion.
pub fn derive_h(spec: &FifSpec) -> [HarmonicFunction; 3] {
    spec.harmonics()
}

pub fn eval_at(spec: &FifSpec, a: &Address) -> f64 {
    spec.eval(a)
}

pub fn evaluate_on_level(spec: &FifSpec, m: usize, cap: DepthCap) -> Result<VertexFunction> {
    spec.on_level(m, cap)
}

/// Values of `f ∘ P_i` on `V_m`, read off a level-`m+1` function.
pub fn restrict_to_cell(u: &VertexFunction, i: u8, mesh: &Arc<Mesh>) -> Result<VertexFunction> {
    if mesh.level() + 1 != u.level() {
        return Err(Error::DomainMismatch {
            left: u.level(),
            right: mesh.level() + 1,
        });
    }
    Ok(VertexFunction::from_fn(mesh.clone(), |v| {
        u.at(canonicalize(&v.address().prepend(i)).address())
            .expect("sub-cell vertex lies in V_{m+1}")
    }))
}
