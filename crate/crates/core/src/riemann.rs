//! Entropic Riemann solver for `u_t + F_ε(u)_x = 0`.
//!
//! A jump `(uL, uR)` splits into one front per affine piece of the convex
//! envelope (increasing jump) or concave envelope (decreasing jump) of `F_ε`
//! on the jump interval.

use num_traits::Signed;
use thiserror::Error;

use crate::envelope::{hull, EnvelopeError, GridFlux, Orientation};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiemannError {
    #[error(transparent)]
    State(#[from] EnvelopeError),
}

/// A discontinuity moving at constant speed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Front {
    pub left_state: Rational,
    pub right_state: Rational,
    pub speed: Rational,
    pub birth_position: Rational,
    pub birth_time: Rational,
}

impl Front {
    pub fn position_at(&self, t: &Rational) -> Rational {
        &self.birth_position + &self.speed * (t - &self.birth_time)
    }

    /// `+1` for an increasing jump, `-1` for a decreasing one.
    pub fn sign(&self) -> i8 {
        if self.right_state > self.left_state {
            1
        } else {
            -1
        }
    }

    pub fn strength(&self) -> Rational {
        (&self.right_state - &self.left_state).abs()
    }

    /// Lower and upper state of the jump.
    pub fn state_bounds(&self) -> (&Rational, &Rational) {
        if self.left_state < self.right_state {
            (&self.left_state, &self.right_state)
        } else {
            (&self.right_state, &self.left_state)
        }
    }
}

/// Fronts of the entropy solution of the Riemann problem `(uL, uR)` centred at `(t0, x0)`,
/// ordered left to right (strictly increasing speeds).
pub fn solve_riemann(
    u_left: &Rational,
    u_right: &Rational,
    f: &GridFlux,
    t0: &Rational,
    x0: &Rational,
) -> Result<Vec<Front>, RiemannError> {
    let kl = f.index_of(u_left)?;
    let kr = f.index_of(u_right)?;
    if kl == kr {
        return Ok(Vec::new());
    }
    let front = |from: i64, to: i64, speed: &Rational| Front {
        left_state: f.state(from),
        right_state: f.state(to),
        speed: speed.clone(),
        birth_position: x0.clone(),
        birth_time: t0.clone(),
    };
    let fronts = if kl < kr {
        hull(f, kl, kr, Orientation::Convex)
            .pieces()
            .map(|(a, b, s)| front(a, b, s))
            .collect()
    } else {
        // Concave pieces run with decreasing slope in u; walking them from
        // the top state down gives increasing speeds in x.
        let h = hull(f, kr, kl, Orientation::Concave);
        let mut fronts: Vec<Front> = h.pieces().map(|(a, b, s)| front(b, a, s)).collect();
        fronts.reverse();
        fronts
    };
    Ok(fronts)
}

/// True iff the relevant envelope over the jump is the single chord of slope `speed`.
pub fn is_admissible(front: &Front, f: &GridFlux) -> bool {
    let (Ok(kl), Ok(kr)) = (f.index_of(&front.left_state), f.index_of(&front.right_state)) else {
        return false;
    };
    if kl == kr {
        return false;
    }
    let h = hull(f, kl.min(kr), kl.max(kr), Orientation::for_sign(front.sign()));
    h.piece_count() == 1 && h.slopes[0] == front.speed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{sample_flux, FluxSpec};
    use crate::rational::{int, ratio};

    fn burgers() -> GridFlux {
        sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap()
    }

    #[test]
    fn burgers_shock_is_one_front() {
        let f = burgers();
        let fronts = solve_riemann(&int(1), &int(-1), &f, &int(0), &int(0)).unwrap();
        assert_eq!(fronts.len(), 1);
        assert_eq!(fronts[0].speed, int(0));
        assert_eq!((fronts[0].left_state.clone(), fronts[0].right_state.clone()), (int(1), int(-1)));
    }

    #[test]
    fn burgers_rarefaction_is_a_fan() {
        let f = burgers();
        let fronts = solve_riemann(&int(-1), &int(1), &f, &int(0), &int(3)).unwrap();
        let speeds: Vec<_> = fronts.iter().map(|fr| fr.speed.clone()).collect();
        assert_eq!(speeds, vec![ratio(-1, 2), ratio(1, 2)]);
        assert_eq!(fronts[0].right_state, int(0));
        assert_eq!(fronts[1].birth_position, int(3));
    }

    #[test]
    fn equal_states_give_nothing() {
        let f = burgers();
        assert!(solve_riemann(&int(1), &int(1), &f, &int(0), &int(0)).unwrap().is_empty());
        assert!(solve_riemann(&ratio(1, 2), &int(1), &f, &int(0), &int(0)).is_err());
    }

    #[test]
    fn admissibility() {
        let f = burgers();
        let shock = Front {
            left_state: int(1),
            right_state: int(-1),
            speed: int(0),
            birth_position: int(0),
            birth_time: int(0),
        };
        assert!(is_admissible(&shock, &f));
        let expansion = Front {
            left_state: int(-1),
            right_state: int(1),
            ..shock.clone()
        };
        assert!(!is_admissible(&expansion, &f));
        let cell = Front {
            left_state: int(0),
            right_state: int(1),
            speed: ratio(1, 2),
            ..shock
        };
        assert!(is_admissible(&cell, &f));
    }
}
