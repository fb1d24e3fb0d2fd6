#![allow(dead_code)]

use proptest::prelude::*;
use wavetrace_core::envelope::{sample_flux, FluxSpec, GridFlux};
use wavetrace_core::rational::{int, ratio, Rational};
use wavetrace_core::tracker::Profile;

/// A small random problem: flux `Σ c_k (u/R)^k` sampled on a window that
/// covers the datum, plus a grid-valued datum.
#[derive(Clone, Debug)]
pub struct Problem {
    pub flux: GridFlux,
    pub profile: Profile,
}

pub fn epsilon_strategy() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(int(1)), Just(ratio(1, 2)), Just(ratio(1, 4))]
}

pub fn problem_strategy(max_level: i64, max_jumps: usize) -> impl Strategy<Value = Problem> {
    (
        epsilon_strategy(),
        prop::collection::vec(-3i64..=3, 2..=5),
        -max_level..=max_level,
        prop::collection::vec((1i64..=4, -max_level..=max_level), 1..=max_jumps),
    )
        .prop_map(move |(eps, coeffs, start, steps)| build_problem(eps, &coeffs, start, &steps, max_level))
}

pub fn build_problem(eps: Rational, coeffs: &[i64], start: i64, steps: &[(i64, i64)], max_level: i64) -> Problem {
    // Scale so that the flux shape does not degenerate as ε shrinks.
    let scale = int(max_level) * &eps / int(2);
    let mut c: Vec<Rational> = Vec::new();
    let mut power = int(1);
    for &ck in coeffs {
        c.push(int(ck) / &power);
        power *= &scale;
    }
    if coeffs.iter().skip(2).all(|&ck| ck == 0) {
        // Keep the flux nonlinear.
        c.resize(3, int(0));
        c[2] = int(1) / (&scale * &scale);
    }
    let mut x = int(0);
    let mut jumps = Vec::new();
    let mut current = start;
    for &(dx, level) in steps {
        x += ratio(dx, 2);
        if level != current {
            jumps.push((x.clone(), int(level) * &eps));
            current = level;
        }
    }
    let profile = Profile::new(int(start) * &eps, jumps).unwrap();
    let flux = sample_flux(&FluxSpec::Polynomial(c), &eps, (-max_level - 1, max_level + 1)).unwrap();
    Problem { flux, profile }
}
