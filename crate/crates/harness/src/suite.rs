//! Seeded random problems: polynomial fluxes of degree ≤ 5 (convex and not)
//! with multi-jump grid-valued data.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavetrace_core::rational::{grid_index, int, ratio, Rational};

use crate::config::{DatumConfig, Exact, FluxConfig, RandomDatum, RunConfig, RunOptions};

pub const SUITE_EPSILONS: [(i64, i64); 4] = [(1, 4), (1, 8), (1, 16), (1, 32)];

#[derive(Clone, Debug)]
pub struct SuiteParams {
    /// States are grid indices in `[-levels, levels]`.
    pub levels: i64,
    pub min_jumps: usize,
    pub max_jumps: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            levels: 8,
            min_jumps: 2,
            max_jumps: 10,
        }
    }
}

/// Coefficients of `Σ cₖ (u/R)ᵏ` expanded in powers of `u`; the `cₖ` are
/// small integers, degree 2 to 5, never affine.
pub fn random_polynomial(rng: &mut ChaCha8Rng, scale: &Rational) -> Vec<Exact> {
    let degree = rng.gen_range(2..=5);
    let mut c: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-3..=3)).collect();
    if c[degree] == 0 {
        c[degree] = *[-2, -1, 1, 2].choose(rng).unwrap();
    }
    let mut power = int(1);
    c.iter()
        .map(|&ck| {
            let v = int(ck) / &power;
            power *= scale;
            Exact(v)
        })
        .collect()
}

/// Grid-valued datum with distinct consecutive states and positions on a
/// quarter-integer lattice.
pub fn random_datum(rng: &mut ChaCha8Rng, eps: &Rational, levels: i64, jumps: usize) -> DatumConfig {
    let mut state = rng.gen_range(-levels..=levels);
    let constant = Exact(int(state) * eps);
    let mut x = ratio(rng.gen_range(-8..=8), 4);
    let mut pieces = Vec::with_capacity(jumps);
    for _ in 0..jumps {
        let mut next = rng.gen_range(-levels..=levels);
        while next == state {
            next = rng.gen_range(-levels..=levels);
        }
        state = next;
        pieces.push((Exact(x.clone()), Exact(int(state) * eps)));
        x += ratio(rng.gen_range(1..=8), 4);
    }
    DatumConfig { constant, pieces }
}

/// The `index`-th member of the suite seeded by `seed`.
pub fn random_config(seed: u64, index: u64, params: &SuiteParams) -> RunConfig {
    let member_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index);
    let mut rng = ChaCha8Rng::seed_from_u64(member_seed);
    let (n, d) = SUITE_EPSILONS[rng.gen_range(0..SUITE_EPSILONS.len())];
    let eps = ratio(n, d);
    let scale = int(params.levels) * &eps / int(2);
    let coeffs = random_polynomial(&mut rng, &scale);
    let jumps = rng.gen_range(params.min_jumps..=params.max_jumps);
    let datum = random_datum(&mut rng, &eps, params.levels, jumps);
    RunConfig {
        flux: FluxConfig::Polynomial(coeffs),
        epsilon: Exact(eps),
        datum,
        grid: Some((-params.levels - 1, params.levels + 1)),
        options: RunOptions::default(),
        seed: member_seed,
    }
}

/// Datum for a sweep: states on the grid of `coarsest`, so every member of
/// the sweep discretizes it exactly.
pub fn sweep_datum(seed: u64, spec: &RandomDatum, coarsest: &Rational) -> DatumConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = grid_index(&(&spec.amplitude.0 / coarsest).floor(), &int(1)).unwrap_or(1).max(1);
    let mut datum = random_datum(&mut rng, coarsest, levels, spec.jumps);
    let raw: Vec<Rational> = datum.pieces.iter().map(|(x, _)| x.0.clone()).collect();
    let (lo, hi) = (raw.first().cloned().unwrap_or_default(), raw.last().cloned().unwrap_or_default());
    let width = if hi > lo { &hi - &lo } else { int(1) };
    for (p, x) in datum.pieces.iter_mut().zip(raw) {
        p.0 = Exact((x - &lo) * &spec.span.0 / &width);
    }
    datum
}
