//! Self-verification suites run by `fif verify`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::address::{self, canonicalize, vertex_count, Address, DepthCap};
use crate::energy::{graph_energy, verify_recursion, HarmonicStructure};
use crate::error::Result;
use crate::fif::FifSpec;
use crate::harmonic::{pair_sum, HarmonicFunction};
use crate::laplacian::{
    classify, direct_midpoint_laplacian, laplacian_on_level, matrices,
    midpoint_laplacian_closed_form, pair_sum_fif, renormalization, solve_dirichlet, LaplacianCase,
};
use crate::mesh::Mesh;
use crate::oracle::{minimize_extension, solve_discrete_dirichlet, DEFAULT_SOLVER_CAP};

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Deepest level exercised by the level-based suites.
    pub levels: usize,
    /// Number of random specs per randomized suite.
    pub samples: usize,
    pub seed: u64,
    /// Test hook: perturb computed values so that suites must fail.
    pub perturb: bool,
    pub cap: DepthCap,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            levels: 6,
            samples: 50,
            seed: 0x5161_f1f0,
            perturb: false,
            cap: DepthCap::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed error against the suite's tolerance.
    pub worst: f64,
    pub tolerance: f64,
    #[serde(serialize_with = "as_secs")]
    pub elapsed: Duration,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

fn rel(a: f64, b: f64) -> f64 {
    let diff = (a - b).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / a.abs().max(b.abs())
    }
}

fn random_spec(rng: &mut ChaCha8Rng, d: [f64; 3]) -> FifSpec {
    let mut tri = || [(); 3].map(|_| rng.gen_range(-1.0..1.0));
    let x = tri();
    let y = tri();
    FifSpec::new(x, y, d).expect("random spec is valid")
}

fn uniform_d(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let mag = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

struct Suite {
    name: &'static str,
    tolerance: f64,
    run: fn(&VerifyConfig, &mut ChaCha8Rng) -> Result<f64>,
}

fn bump(cfg: &VerifyConfig) -> f64 {
    if cfg.perturb {
        1e-6
    } else {
        0.0
    }
}

const SUITES: &[Suite] = &[
    Suite {
        name: "vertex and edge counts",
        tolerance: 0.0,
        run: |cfg, _| {
            let mut bad = 0usize;
            for m in 0..=cfg.levels.min(8) {
                let v = address::vertices_at_level(m, cfg.cap)?;
                let e = address::edges_at_level(m, cfg.cap)?;
                bad += (v.len() != vertex_count(m)) as usize;
                bad += (e.len() != 3usize.pow(m as u32 + 1)) as usize;
                for x in &v {
                    let deg = address::neighbors(x, m)?.len();
                    bad += (deg != if x.is_boundary() { 2 } else { 4 }) as usize;
                    for alias in x.aliases() {
                        bad += (canonicalize(&alias) != *x) as usize;
                    }
                }
            }
            Ok(bad as f64 + bump(cfg))
        },
    },
    Suite {
        name: "harmonic annihilation and energy conservation",
        tolerance: 1e-10,
        run: |cfg, rng| {
            let hs = HarmonicStructure::default();
            let mut worst: f64 = 0.0;
            for _ in 0..3 {
                let h = HarmonicFunction::new([(); 3].map(|_| rng.gen_range(-1.0..1.0)));
                let e0 = graph_energy(&h.on_level(&Mesh::new(0, cfg.cap)?), &hs);
                for m in 1..=cfg.levels {
                    let u = h.on_level(&Mesh::new(m, cfg.cap)?);
                    for (_, l) in laplacian_on_level(&u) {
                        worst = worst.max((l + bump(cfg)).abs());
                    }
                    worst = worst.max(rel(graph_energy(&u, &hs), e0));
                }
            }
            Ok(worst)
        },
    },
    Suite {
        name: "minimizing extension reproduces the 1/5-2/5 rule",
        tolerance: 1e-10,
        run: |cfg, rng| {
            let hs = HarmonicStructure::default();
            let mut worst: f64 = 0.0;
            let h = HarmonicFunction::new([(); 3].map(|_| rng.gen_range(-1.0..1.0)));
            for m in 1..=cfg.levels.min(5) {
                let coarse = h.on_level(&Mesh::new(m - 1, cfg.cap)?);
                let ext = minimize_extension(&coarse, &hs, cfg.cap)?;
                for (v, val) in ext.iter() {
                    worst = worst.max((val - h.eval(v.address()) + bump(cfg)).abs());
                }
            }
            Ok(worst)
        },
    },
    Suite {
        name: "energy recursion and closed form",
        tolerance: 1e-9,
        run: |cfg, rng| {
            let hs = HarmonicStructure::default();
            let mut worst: f64 = 0.0;
            for s in 0..cfg.samples {
                let d = if s % 2 == 0 {
                    [uniform_d(rng, 0.0, 0.4); 3]
                } else {
                    [(); 3].map(|_| rng.gen_range(-0.4..0.4))
                };
                let spec = random_spec(rng, d);
                let r = verify_recursion(&spec, cfg.levels, &hs, cfg.cap)?;
                worst = worst
                    .max(r.max_recursion_residual)
                    .max(r.max_formula_residual)
                    .max(if r.monotone { 0.0 } else { 1.0 })
                    + bump(cfg);
            }
            Ok(worst)
        },
    },
    Suite {
        name: "pair-sum closed forms",
        tolerance: 1e-11,
        run: |cfg, rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.samples {
                let d = uniform_d(rng, 0.05, 0.9);
                let spec = random_spec(rng, [d; 3]);
                let h = HarmonicFunction::new(spec.boundary());
                for i in 1..=3u8 {
                    let (j, k) = match i {
                        1 => (2, 3),
                        2 => (1, 3),
                        _ => (1, 2),
                    };
                    for m in 0..=cfg.levels as u32 {
                        let at = |t: u8| Address::new(vec![i; m as usize], t).expect("valid");
                        let fd = spec.eval(&at(j)) + spec.eval(&at(k)) + bump(cfg);
                        worst = worst.max(rel(fd, pair_sum_fif(&spec, i, m)?));
                        if m > 0 {
                            let hd = h.eval(&at(j)) + h.eval(&at(k));
                            worst = worst.max(rel(hd, pair_sum(&h, i, m)?));
                        }
                    }
                }
            }
            Ok(worst)
        },
    },
    Suite {
        name: "midpoint Laplacian closed form",
        tolerance: 1e-11,
        run: |cfg, rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.samples {
                let d = uniform_d(rng, 0.05, 0.55);
                let spec = random_spec(rng, [d; 3]);
                for pair in address::PAIRS {
                    for m in 0..cfg.levels {
                        let direct = direct_midpoint_laplacian(&spec, &[], pair, m, cfg.cap)?;
                        let closed = midpoint_laplacian_closed_form(&spec, pair, m as u32)?;
                        worst = worst.max(rel(direct + bump(cfg), closed));
                    }
                }
            }
            Ok(worst)
        },
    },
    Suite {
        name: "Laplacian scaling under cell maps",
        tolerance: 1e-10,
        run: |cfg, rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.samples.min(5) {
                let d = uniform_d(rng, 0.15, 0.55);
                let spec = random_spec(rng, [d; 3]);
                let d = spec.uniform_d().expect("uniform");
                for len in 0..=cfg.levels.min(4) {
                    let omega: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=3)).collect();
                    for pair in address::PAIRS {
                        for m in 0..=3 {
                            let deep = direct_midpoint_laplacian(&spec, &omega, pair, m, cfg.cap)?;
                            let shallow = direct_midpoint_laplacian(&spec, &[], pair, m, cfg.cap)?;
                            let scaled = d.powi(len as i32) * shallow;
                            worst = worst.max(rel(deep + bump(cfg), scaled));
                        }
                    }
                }
            }
            Ok(worst)
        },
    },
    Suite {
        name: "matrix identities",
        tolerance: 1e-10,
        run: |cfg, rng| {
            use matrices::*;
            let mut worst: f64 = 0.0;
            for (a, b) in [(A1, B1), (A2, B2)] {
                let h = mul(&inverse(&a).expect("invertible"), &b);
                for r in 0..3 {
                    for c in 0..3 {
                        worst = worst.max((h[r][c] - RULE[r][c]).abs());
                    }
                }
            }
            for _ in 0..10 {
                let l: f64 = rng.gen_range(-10.0..10.0);
                let expect = -2.0 * (l - 5.0).powi(2) * (2.0 * l - 1.0);
                worst = worst.max(rel(pencil_det(l) + bump(cfg), expect));
            }
            Ok(worst)
        },
    },
    Suite {
        name: "constant Laplacian of the d = 1/5 FIF",
        tolerance: 1e-8,
        run: |cfg, _| {
            let f = FifSpec::uniform([0.0; 3], [1.0; 3], 0.2)?;
            let mut worst: f64 = 0.0;
            for m in 1..=cfg.levels {
                let u = f.on_level(m, cfg.cap)?;
                for (_, l) in laplacian_on_level(&u) {
                    worst = worst.max((renormalization(m) * l + 15.0 + bump(cfg)).abs());
                }
            }
            Ok(worst)
        },
    },
    Suite {
        name: "Dirichlet solution against the discrete solve",
        tolerance: 1e-8,
        run: |cfg, rng| {
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.samples.min(10) {
                let a = [(); 3].map(|_| rng.gen_range(-2.0..2.0));
                let eta = rng.gen_range(-20.0..20.0);
                let spec = solve_dirichlet(a, eta)?;
                for m in 1..=cfg.levels.min(DEFAULT_SOLVER_CAP).min(5) {
                    let fif = spec.on_level(m, cfg.cap)?;
                    let oracle = solve_discrete_dirichlet(a, eta, m, DEFAULT_SOLVER_CAP)?;
                    for (x, y) in fif.values().iter().zip(oracle.values()) {
                        worst = worst.max((x - y + bump(cfg)).abs());
                    }
                }
            }
            Ok(worst)
        },
    },
    Suite {
        name: "Laplacian classifier",
        tolerance: 0.0,
        run: |cfg, rng| {
            let mut wrong = 0usize;
            for n in 0..cfg.samples * 10 {
                let x = [(); 3].map(|_| rng.gen_range(-1.0..1.0));
                let rule = [0, 1, 2].map(|k| 0.2 * x[k] + 0.4 * (x[(k + 1) % 3] + x[(k + 2) % 3]));
                let (spec, expect) = match n % 3 {
                    0 => (
                        FifSpec::uniform(x, rule, uniform_d(rng, 0.0, 0.99))?,
                        LaplacianCase::HarmonicCase,
                    ),
                    1 => {
                        let c = rng.gen_range(0.1..1.0);
                        let y = [0, 1, 2].map(|k| rule[k] + c);
                        (FifSpec::uniform(x, y, 0.2)?, LaplacianCase::ConstantCase)
                    }
                    _ => {
                        let mut y = rule;
                        y[n % 3] += 1e-9;
                        (FifSpec::uniform(x, y, 0.2)?, LaplacianCase::Nonexistent)
                    }
                };
                let got = classify(&spec)?.case;
                wrong += (got != expect) as usize;
            }
            Ok(wrong as f64 + bump(cfg))
        },
    },
];

/// Run every suite; each is timed and compared against its fixed tolerance.
pub fn run_all(cfg: &VerifyConfig) -> Vec<(SuiteResult, Option<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    SUITES
        .iter()
        .map(|s| {
            let start = Instant::now();
            let outcome = (s.run)(cfg, &mut rng);
            let elapsed = start.elapsed();
            match outcome {
                Ok(worst) => (
                    SuiteResult {
                        name: s.name,
                        passed: worst <= s.tolerance,
                        worst,
                        tolerance: s.tolerance,
                        elapsed,
                    },
                    None,
                ),
                Err(e) => (
                    SuiteResult {
                        name: s.name,
                        passed: false,
                        worst: f64::INFINITY,
                        tolerance: s.tolerance,
                        elapsed,
                    },
                    Some(e.to_string()),
                ),
            }
        })
        .collect()
}
