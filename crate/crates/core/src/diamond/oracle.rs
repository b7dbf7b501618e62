//! Numerical diamond norm by multistart simplex search over pure inputs.
//!
//! ‖Φ‖⋄ = sup over two-qubit pure states ψ of ‖(id ⊗ Φ)(ψψ†)‖₁. The
//! objective is evaluated for an unnormalised ψ ∈ C⁴ (eight real
//! coordinates) and divided by ‖ψ‖², so the search runs over all of R⁸. Each
//! start is a Nelder–Mead descent on the negated objective, restarted once
//! from its best vertex to shake off simplex collapse. The largest value
//! found is a lower bound on the true norm.

use nalgebra::{Matrix2, Matrix4, SVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::gd::PauliMap;
use crate::linalg::{trace_norm_hermitian, Complex64};

type Point = SVector<f64, 8>;

/// Disagreement between the two best starts above which a result is flagged.
pub const AGREEMENT_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Number of independent starts; the first is the maximally entangled
    /// state, the rest are uniform on the unit 7-sphere.
    pub starts: usize,
    /// Stop a descent once the objective spread across the simplex falls
    /// below this.
    pub tolerance: f64,
    /// Evaluation budget per descent.
    pub max_evals: usize,
    /// Edge length of the initial simplex around a unit-norm start.
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            starts: 50,
            tolerance: 1e-7,
            max_evals: 4000,
            initial_step: 0.25,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    /// Best minus worst over all starts.
    pub spread: f64,
    /// Best minus second best.
    pub top_gap: f64,
    /// Set when the two best starts disagree by more than
    /// [`AGREEMENT_THRESHOLD`].
    pub flagged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiamondOracle {
    pub config: OracleConfig,
}

impl DiamondOracle {
    pub fn new(config: OracleConfig) -> Self {
        Self { config }
    }

    pub fn evaluate(&self, map: &PauliMap) -> OracleResult {
        let objective = Objective::new(map);
        let cfg = &self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut values = Vec::with_capacity(cfg.starts.max(1));
        let mut evaluations = 0;

        for k in 0..cfg.starts.max(1) {
            let start = if k == 0 {
                maximally_entangled()
            } else {
                random_unit(&mut rng)
            };
            let (x, _, n1) = nelder_mead(&objective, start, cfg);
            let (_, f, n2) = nelder_mead(&objective, x / x.norm(), cfg);
            evaluations += n1 + n2;
            values.push(f);
        }

        values.sort_by(|a, b| b.total_cmp(a));
        let value = values[0];
        let top_gap = values.get(1).map_or(0.0, |s| value - s);
        OracleResult {
            value,
            spread: value - values[values.len() - 1],
            top_gap,
            flagged: top_gap > AGREEMENT_THRESHOLD,
            evaluations,
        }
    }
}

/// Convenience wrapper around [`DiamondOracle::evaluate`].
pub fn diamond_oracle(map: &PauliMap, config: &OracleConfig) -> OracleResult {
    DiamondOracle::new(*config).evaluate(map)
}

struct Objective {
    /// blocks[b][b'] = Φ(|b⟩⟨b'|).
    blocks: [[Matrix2<Complex64>; 2]; 2],
}

impl Objective {
    fn new(map: &PauliMap) -> Self {
        let unit = |a: usize, b: usize| {
            let mut e = Matrix2::zeros();
            e[(a, b)] = Complex64::new(1.0, 0.0);
            map.apply(&e)
        };
        Self {
            blocks: [[unit(0, 0), unit(0, 1)], [unit(1, 0), unit(1, 1)]],
        }
    }

    /// ‖(id ⊗ Φ)(ψψ†)‖₁ / ‖ψ‖² with ψ = Σ M_ab |a⟩|b⟩.
    fn value(&self, x: &Point) -> f64 {
        let norm = x.norm_squared();
        if norm == 0.0 {
            return 0.0;
        }
        let m = |a: usize, b: usize| Complex64::new(x[2 * (2 * a + b)], x[2 * (2 * a + b) + 1]);
        let mut out = Matrix4::<Complex64>::zeros();
        for a in 0..2 {
            for ap in 0..2 {
                let mut block = Matrix2::zeros();
                for b in 0..2 {
                    for bp in 0..2 {
                        block += self.blocks[b][bp] * (m(a, b) * m(ap, bp).conj());
                    }
                }
                out.fixed_view_mut::<2, 2>(2 * a, 2 * ap).copy_from(&block);
            }
        }
        trace_norm_hermitian(&out) / norm
    }
}

fn maximally_entangled() -> Point {
    let mut x = Point::zeros();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    x[0] = h;
    x[6] = h;
    x
}

fn random_unit(rng: &mut ChaCha8Rng) -> Point {
    loop {
        let x = Point::from_fn(|_, _| StandardNormal.sample(rng));
        let n = x.norm();
        if n > 1e-12 {
            return x / n;
        }
    }
}

/// Maximises the objective from `start`. Returns (best point, best value,
/// evaluations used).
fn nelder_mead(obj: &Objective, start: Point, cfg: &OracleConfig) -> (Point, f64, usize) {
    const N: usize = 8;
    // Minimise the negated objective.
    let f = |x: &Point| -obj.value(x);
    let mut simplex: Vec<(Point, f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, f(&start)));
    for i in 0..N {
        let mut p = start;
        p[i] += cfg.initial_step;
        simplex.push((p, f(&p)));
    }
    let mut evals = N + 1;

    while evals < cfg.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[N].1;
        if worst - best <= cfg.tolerance {
            break;
        }
        let centroid = simplex[..N].iter().fold(Point::zeros(), |acc, v| acc + v.0) / N as f64;
        let reflected = centroid + (centroid - simplex[N].0);
        let fr = f(&reflected);
        evals += 1;

        if fr < best {
            let expanded = centroid + (reflected - centroid) * 2.0;
            let fe = f(&expanded);
            evals += 1;
            simplex[N] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[N - 1].1 {
            simplex[N] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let c = centroid + (reflected - centroid) * 0.5;
            (c, f(&c))
        } else {
            let c = centroid + (simplex[N].0 - centroid) * 0.5;
            (c, f(&c))
        };
        evals += 1;
        if fc < worst.min(fr) {
            simplex[N] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0;
        for v in simplex.iter_mut().skip(1) {
            v.0 = anchor + (v.0 - anchor) * 0.5;
            v.1 = f(&v.0);
        }
        evals += N;
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, -simplex[0].1, evals)
}
