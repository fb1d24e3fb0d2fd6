//! Piecewise-affine flux on a uniform grid and its convex/concave envelopes.
//!
//! A [`GridFlux`] stores exact samples `F(kε)` for `k_min ≤ k ≤ k_max`; between
//! samples it is the affine interpolant. Envelopes are computed with a
//! monotone-chain sweep over the samples and keep only the hull vertices, so
//! slope integrals reduce to sums over a handful of pieces.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{self, int, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("grid size must be positive, got {0}")]
    NonPositiveEpsilon(Rational),
    #[error("grid index range [{0}, {1}] is degenerate")]
    DegenerateRange(i64, i64),
    #[error("flux table has no value at grid index {0}")]
    MissingTablePoint(i64),
    #[error("state {value} lies outside the flux grid [{lo}, {hi}]")]
    OutOfDomain {
        value: Rational,
        lo: Rational,
        hi: Rational,
    },
    #[error("state {value} is not a multiple of the grid size {epsilon}")]
    OffGrid { value: Rational, epsilon: Rational },
    #[error("interval [{0}, {1}] is empty")]
    EmptyInterval(Rational, Rational),
    #[error("curvature constant needs at least 3 grid points, got {0}")]
    TooFewPoints(usize),
    #[error("piecewise linear function needs at least two strictly increasing breakpoints")]
    InvalidBreakpoints,
    #[error("one-sided slope at {0} is not defined on that side")]
    SlopeOutsideDomain(Rational),
}

/// Source of a flux before sampling.
#[derive(Clone, Debug, PartialEq)]
pub enum FluxSpec {
    /// Coefficients `c0, c1, ...` of `Σ c_i u^i`.
    Polynomial(Vec<Rational>),
    /// Values keyed by grid index `k` (the sample at `u = kε`).
    Table(BTreeMap<i64, Rational>),
}

impl FluxSpec {
    pub fn burgers() -> Self {
        FluxSpec::Polynomial(vec![int(0), int(0), rational::ratio(1, 2)])
    }

    fn evaluate_polynomial(coefficients: &[Rational], u: &Rational) -> Rational {
        coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * u + c)
    }
}

/// Which envelope: lower convex hull or upper concave hull.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Convex,
    Concave,
}

impl Orientation {
    /// Envelope that solves a jump with the given sign (`+1` increasing, `-1` decreasing).
    pub fn for_sign(sign: i8) -> Self {
        if sign > 0 {
            Orientation::Convex
        } else {
            Orientation::Concave
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The piecewise affine interpolant `F_ε` of a flux on the grid `εℤ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFlux {
    epsilon: Rational,
    k_min: i64,
    values: Vec<Rational>,
}

impl GridFlux {
    pub fn from_values(
        epsilon: Rational,
        k_min: i64,
        values: Vec<Rational>,
    ) -> Result<Self, EnvelopeError> {
        if !epsilon.is_positive() {
            return Err(EnvelopeError::NonPositiveEpsilon(epsilon));
        }
        if values.len() < 2 {
            return Err(EnvelopeError::DegenerateRange(
                k_min,
                k_min + values.len() as i64 - 1,
            ));
        }
        Ok(GridFlux {
            epsilon,
            k_min,
            values,
        })
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn contains_index(&self, k: i64) -> bool {
        k >= self.k_min && k <= self.k_max()
    }

    /// `F_ε(kε)`; panics when `k` is outside the grid.
    pub fn value(&self, k: i64) -> &Rational {
        assert!(self.contains_index(k), "grid index {k} outside flux domain");
        &self.values[(k - self.k_min) as usize]
    }

    pub fn state(&self, k: i64) -> Rational {
        int(k) * &self.epsilon
    }

    /// Slope of `F_ε` on the atom `[kε, (k+1)ε]`.
    pub fn cell_slope(&self, k: i64) -> Rational {
        (self.value(k + 1) - self.value(k)) / &self.epsilon
    }

    /// Chord slope between grid indices `i != j`.
    pub fn chord_slope(&self, i: i64, j: i64) -> Rational {
        (self.value(j) - self.value(i)) / (int(j - i) * &self.epsilon)
    }

    fn domain_error(&self, value: &Rational) -> EnvelopeError {
        EnvelopeError::OutOfDomain {
            value: value.clone(),
            lo: self.state(self.k_min),
            hi: self.state(self.k_max()),
        }
    }

    /// Grid index of a state that must lie on the grid and inside the domain.
    pub fn index_of(&self, u: &Rational) -> Result<i64, EnvelopeError> {
        let k = rational::grid_index(u, &self.epsilon).ok_or_else(|| EnvelopeError::OffGrid {
            value: u.clone(),
            epsilon: self.epsilon.clone(),
        })?;
        if !self.contains_index(k) {
            return Err(self.domain_error(u));
        }
        Ok(k)
    }

    /// Affine interpolation at an arbitrary state inside the domain.
    pub fn eval(&self, u: &Rational) -> Result<Rational, EnvelopeError> {
        let q = u / &self.epsilon;
        let floor = q.floor();
        let k = num_traits::ToPrimitive::to_i64(&floor.to_integer())
            .ok_or_else(|| self.domain_error(u))?;
        if !self.contains_index(k) {
            return Err(self.domain_error(u));
        }
        if k == self.k_max() {
            return if q == floor {
                Ok(self.value(k).clone())
            } else {
                Err(self.domain_error(u))
            };
        }
        let frac = q - floor;
        Ok(self.value(k) + frac * (self.value(k + 1) - self.value(k)))
    }

    /// The flux of the mirrored problem `v = -u`: `G(v) = -F(-v)`.
    ///
    /// Entropy solutions map to entropy solutions and speeds are preserved;
    /// convex envelopes of `G` correspond to concave envelopes of `F`.
    pub fn mirrored(&self) -> GridFlux {
        let values = self.values.iter().rev().map(|v| -v).collect();
        GridFlux {
            epsilon: self.epsilon.clone(),
            k_min: -self.k_max(),
            values,
        }
    }

    /// `-F`, the flux of the spatially reflected problem `x -> -x`.
    pub fn negated(&self) -> GridFlux {
        GridFlux {
            epsilon: self.epsilon.clone(),
            k_min: self.k_min,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Samples a flux specification on `k_min..=k_max`.
pub fn sample_flux(
    spec: &FluxSpec,
    epsilon: &Rational,
    (k_min, k_max): (i64, i64),
) -> Result<GridFlux, EnvelopeError> {
    if !epsilon.is_positive() {
        return Err(EnvelopeError::NonPositiveEpsilon(epsilon.clone()));
    }
    if k_max <= k_min {
        return Err(EnvelopeError::DegenerateRange(k_min, k_max));
    }
    let values = (k_min..=k_max)
        .map(|k| match spec {
            FluxSpec::Polynomial(c) => Ok(FluxSpec::evaluate_polynomial(c, &(int(k) * epsilon))),
            FluxSpec::Table(table) => table
                .get(&k)
                .cloned()
                .ok_or(EnvelopeError::MissingTablePoint(k)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    GridFlux::from_values(epsilon.clone(), k_min, values)
}

/// Envelope of `F_ε` on a grid interval, in index space.
///
/// `vertices` are the grid indices where the envelope touches `F_ε` and its
/// slope changes; `slopes[i]` is the slope on `[vertices[i], vertices[i+1]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hull {
    pub orientation: Orientation,
    pub vertices: Vec<i64>,
    pub slopes: Vec<Rational>,
}

impl Hull {
    pub fn lo(&self) -> i64 {
        self.vertices[0]
    }

    pub fn hi(&self) -> i64 {
        *self.vertices.last().unwrap()
    }

    pub fn piece_count(&self) -> usize {
        self.slopes.len()
    }

    /// `(start, end, slope)` for every affine piece, left to right.
    pub fn pieces(&self) -> impl Iterator<Item = (i64, i64, &Rational)> + '_ {
        self.vertices
            .windows(2)
            .zip(&self.slopes)
            .map(|(w, s)| (w[0], w[1], s))
    }

    /// Slope on the atom `[kε, (k+1)ε]`, which must lie inside the hull.
    pub fn slope_on_atom(&self, k: i64) -> &Rational {
        assert!(k >= self.lo() && k < self.hi(), "atom {k} outside hull");
        let i = self.vertices.partition_point(|&v| v <= k) - 1;
        &self.slopes[i]
    }

    /// Pieces restricted to the atoms `lo..hi`, as `(atom count, slope)`.
    pub fn slopes_on(&self, lo: i64, hi: i64) -> Vec<(i64, Rational)> {
        assert!(lo >= self.lo() && hi <= self.hi() && lo < hi);
        self.pieces()
            .filter_map(|(a, b, s)| {
                let start = a.max(lo);
                let end = b.min(hi);
                (start < end).then(|| (end - start, s.clone()))
            })
            .collect()
    }

    /// Whether the envelope touches `F_ε` at grid index `k`.
    pub fn touches(&self, f: &GridFlux, k: i64) -> bool {
        if self.vertices.binary_search(&k).is_ok() {
            return true;
        }
        if k <= self.lo() || k >= self.hi() {
            return false;
        }
        let i = self.vertices.partition_point(|&v| v <= k) - 1;
        let a = self.vertices[i];
        let on_chord = f.value(a) + &self.slopes[i] * int(k - a) * f.epsilon();
        &on_chord == f.value(k)
    }

    pub fn to_fn(&self, f: &GridFlux) -> PiecewiseLinearFn {
        PiecewiseLinearFn {
            breakpoints: self.vertices.iter().map(|&k| f.state(k)).collect(),
            ordinates: self.vertices.iter().map(|&k| f.value(k).clone()).collect(),
        }
    }
}

fn cross(f: &GridFlux, o: i64, a: i64, b: i64) -> Rational {
    // (a - o) × (b - o) with x measured in grid steps.
    int(a - o) * (f.value(b) - f.value(o)) - (f.value(a) - f.value(o)) * int(b - o)
}

/// Envelope of `F_ε` over the grid indices `lo..=hi` (`lo < hi`).
pub fn hull(f: &GridFlux, lo: i64, hi: i64, orientation: Orientation) -> Hull {
    assert!(lo < hi && f.contains_index(lo) && f.contains_index(hi));
    let mut stack: Vec<i64> = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        while stack.len() >= 2 {
            let c = cross(f, stack[stack.len() - 2], stack[stack.len() - 1], k);
            let keep = match orientation {
                Orientation::Convex => c.is_positive(),
                Orientation::Concave => c.is_negative(),
            };
            if keep {
                break;
            }
            stack.pop();
        }
        stack.push(k);
    }
    let slopes = stack.windows(2).map(|w| f.chord_slope(w[0], w[1])).collect();
    Hull {
        orientation,
        vertices: stack,
        slopes,
    }
}

fn interval_indices(
    f: &GridFlux,
    a: &Rational,
    b: &Rational,
) -> Result<(i64, i64), EnvelopeError> {
    if a >= b {
        return Err(EnvelopeError::EmptyInterval(a.clone(), b.clone()));
    }
    Ok((f.index_of(a)?, f.index_of(b)?))
}

/// `conv_[a,b] F_ε`: the largest convex minorant on `[a, b]`.
pub fn convex_envelope(
    f: &GridFlux,
    a: &Rational,
    b: &Rational,
) -> Result<PiecewiseLinearFn, EnvelopeError> {
    let (lo, hi) = interval_indices(f, a, b)?;
    Ok(hull(f, lo, hi, Orientation::Convex).to_fn(f))
}

/// `conc_[a,b] F_ε`: the smallest concave majorant on `[a, b]`.
pub fn concave_envelope(
    f: &GridFlux,
    a: &Rational,
    b: &Rational,
) -> Result<PiecewiseLinearFn, EnvelopeError> {
    let (lo, hi) = interval_indices(f, a, b)?;
    Ok(hull(f, lo, hi, Orientation::Concave).to_fn(f))
}

/// Rankine-Hugoniot speed `(F_ε(b) - F_ε(a)) / (b - a)`.
pub fn rh_speed(f: &GridFlux, a: &Rational, b: &Rational) -> Result<Rational, EnvelopeError> {
    if a == b {
        return Err(EnvelopeError::EmptyInterval(a.clone(), b.clone()));
    }
    let (i, j) = (f.index_of(a)?, f.index_of(b)?);
    Ok(f.chord_slope(i, j))
}

/// Discrete `C^{1,1}` seminorm of `F_ε`: the largest jump of consecutive cell
/// slopes divided by `ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureConstant(pub Rational);

impl CurvatureConstant {
    pub fn value(&self) -> &Rational {
        &self.0
    }
}

impl fmt::Display for CurvatureConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn curvature_constant(f: &GridFlux) -> Result<CurvatureConstant, EnvelopeError> {
    if f.len() < 3 {
        return Err(EnvelopeError::TooFewPoints(f.len()));
    }
    let k = (f.k_min() + 1..f.k_max())
        .map(|k| (f.cell_slope(k) - f.cell_slope(k - 1)).abs() / f.epsilon())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(CurvatureConstant(k))
}

/// `∫ |g' - h'|` over the atoms `lo..hi` for two envelopes covering them.
pub fn slope_gap_integral(g: &Hull, h: &Hull, lo: i64, hi: i64, epsilon: &Rational) -> Rational {
    let left = g.slopes_on(lo, hi);
    let right = h.slopes_on(lo, hi);
    let (mut i, mut j) = (0, 0);
    let (mut rem_i, mut rem_j) = (left[0].0, right[0].0);
    let mut atoms_weighted = Rational::zero();
    loop {
        let step = rem_i.min(rem_j);
        atoms_weighted += int(step) * (&left[i].1 - &right[j].1).abs();
        rem_i -= step;
        rem_j -= step;
        if rem_i == 0 {
            i += 1;
            if i == left.len() {
                break;
            }
            rem_i = left[i].0;
        }
        if rem_j == 0 {
            j += 1;
            rem_j = right[j].0;
        }
    }
    atoms_weighted * epsilon
}

/// A continuous piecewise linear function given by its breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<Rational>,
    ordinates: Vec<Rational>,
}

impl PiecewiseLinearFn {
    pub fn new(breakpoints: Vec<Rational>, ordinates: Vec<Rational>) -> Result<Self, EnvelopeError> {
        if breakpoints.len() < 2
            || breakpoints.len() != ordinates.len()
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(EnvelopeError::InvalidBreakpoints);
        }
        Ok(PiecewiseLinearFn {
            breakpoints,
            ordinates,
        })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn ordinates(&self) -> &[Rational] {
        &self.ordinates
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.breakpoints[0], self.breakpoints.last().unwrap())
    }

    pub fn slopes(&self) -> Vec<Rational> {
        (0..self.breakpoints.len() - 1).map(|i| self.piece_slope(i)).collect()
    }

    fn piece_slope(&self, i: usize) -> Rational {
        (&self.ordinates[i + 1] - &self.ordinates[i]) / (&self.breakpoints[i + 1] - &self.breakpoints[i])
    }

    pub fn eval(&self, u: &Rational) -> Option<Rational> {
        let (lo, hi) = self.domain();
        if u < lo || u > hi {
            return None;
        }
        let i = self.breakpoints.partition_point(|b| b <= u).min(self.breakpoints.len() - 1);
        let i = i.max(1) - 1;
        Some(&self.ordinates[i] + self.piece_slope(i) * (u - &self.breakpoints[i]))
    }

    /// Exact one-sided derivative at `u`.
    pub fn slope_at(&self, u: &Rational, side: Side) -> Result<Rational, EnvelopeError> {
        let (lo, hi) = self.domain();
        let outside = match side {
            Side::Left => u <= lo || u > hi,
            Side::Right => u < lo || u >= hi,
        };
        if outside {
            return Err(EnvelopeError::SlopeOutsideDomain(u.clone()));
        }
        let i = match side {
            Side::Right => self.breakpoints.partition_point(|b| b <= u) - 1,
            Side::Left => self.breakpoints.partition_point(|b| b < u) - 1,
        };
        Ok(self.piece_slope(i))
    }
}

/// Free-function form of [`PiecewiseLinearFn::slope_at`].
pub fn slope_at(g: &PiecewiseLinearFn, u: &Rational, side: Side) -> Result<Rational, EnvelopeError> {
    g.slope_at(u, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn cubic() -> FluxSpec {
        FluxSpec::Polynomial(vec![int(0), int(0), int(0), int(1)])
    }

    #[test]
    fn samples_burgers_and_cubic() {
        let f = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        assert_eq!(f.values(), &[int(2), ratio(1, 2), int(0), ratio(1, 2), int(2)]);
        let g = sample_flux(&cubic(), &ratio(1, 2), (-2, 2)).unwrap();
        assert_eq!(g.values(), &[int(-1), ratio(-1, 8), int(0), ratio(1, 8), int(1)]);
    }

    #[test]
    fn table_flux_is_echoed_and_gaps_rejected() {
        let table: BTreeMap<i64, Rational> =
            [(-1, ratio(3, 7)), (0, int(0)), (1, ratio(2, 5))].into_iter().collect();
        let f = sample_flux(&FluxSpec::Table(table.clone()), &int(1), (-1, 1)).unwrap();
        assert_eq!(f.values(), &[ratio(3, 7), int(0), ratio(2, 5)]);
        assert_eq!(
            sample_flux(&FluxSpec::Table(table), &int(1), (-1, 2)),
            Err(EnvelopeError::MissingTablePoint(2))
        );
        assert!(matches!(
            sample_flux(&cubic(), &int(0), (0, 1)),
            Err(EnvelopeError::NonPositiveEpsilon(_))
        ));
        assert!(matches!(
            sample_flux(&cubic(), &int(1), (1, 1)),
            Err(EnvelopeError::DegenerateRange(1, 1))
        ));
    }

    #[test]
    fn convex_envelope_examples() {
        let burgers = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        let env = convex_envelope(&burgers, &int(-1), &int(1)).unwrap();
        assert_eq!(env.breakpoints(), &[int(-1), int(0), int(1)]);
        assert_eq!(env.ordinates(), &[ratio(1, 2), int(0), ratio(1, 2)]);

        let coarse = sample_flux(&cubic(), &int(1), (-1, 1)).unwrap();
        let env = convex_envelope(&coarse, &int(-1), &int(1)).unwrap();
        assert_eq!(env.breakpoints(), &[int(-1), int(1)]);
        assert_eq!(env.slopes(), vec![int(1)]);

        // u³ at ε = 1/4: tangent chord from (-1,-1) to (1/2,1/8), then the samples.
        let fine = sample_flux(&cubic(), &ratio(1, 4), (-4, 4)).unwrap();
        let env = convex_envelope(&fine, &int(-1), &int(1)).unwrap();
        assert_eq!(env.breakpoints(), &[int(-1), ratio(1, 2), ratio(3, 4), int(1)]);
        assert_eq!(env.slopes()[0], ratio(3, 4));
        assert_eq!(env.slopes()[1], ratio(19, 16));
        assert_eq!(env.slopes()[2], ratio(37, 16));
        assert_eq!(env.slope_at(&ratio(1, 4), Side::Right).unwrap(), ratio(3, 4));
    }

    #[test]
    fn concave_envelope_examples() {
        let burgers = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        let env = concave_envelope(&burgers, &int(-1), &int(1)).unwrap();
        assert_eq!(env.breakpoints(), &[int(-1), int(1)]);
        assert_eq!(env.slopes(), vec![int(0)]);

        let concave = sample_flux(
            &FluxSpec::Polynomial(vec![int(0), int(0), ratio(-1, 2)]),
            &int(1),
            (-2, 2),
        )
        .unwrap();
        let env = concave_envelope(&concave, &int(-2), &int(2)).unwrap();
        assert_eq!(env.breakpoints().len(), 5);

        let env = concave_envelope(&burgers, &int(0), &int(1)).unwrap();
        assert_eq!(env.breakpoints(), &[int(0), int(1)]);
    }

    #[test]
    fn envelope_interval_errors() {
        let f = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        assert!(matches!(
            convex_envelope(&f, &int(1), &int(1)),
            Err(EnvelopeError::EmptyInterval(..))
        ));
        assert!(matches!(
            convex_envelope(&f, &int(-3), &int(1)),
            Err(EnvelopeError::OutOfDomain { .. })
        ));
        assert!(matches!(
            convex_envelope(&f, &ratio(1, 2), &int(1)),
            Err(EnvelopeError::OffGrid { .. })
        ));
    }

    #[test]
    fn one_sided_slopes() {
        let f = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        let chord = concave_envelope(&f, &int(-1), &int(1)).unwrap();
        assert_eq!(chord.slope_at(&int(0), Side::Left).unwrap(), int(0));
        assert_eq!(chord.slope_at(&int(0), Side::Right).unwrap(), int(0));
        let env = convex_envelope(&f, &int(-1), &int(1)).unwrap();
        assert_eq!(env.slope_at(&int(0), Side::Left).unwrap(), ratio(-1, 2));
        assert_eq!(env.slope_at(&int(0), Side::Right).unwrap(), ratio(1, 2));
        assert!(env.slope_at(&int(-1), Side::Left).is_err());
        assert!(env.slope_at(&int(1), Side::Right).is_err());
        assert_eq!(env.slope_at(&int(1), Side::Left).unwrap(), ratio(1, 2));
        assert!(env.slope_at(&int(2), Side::Left).is_err());
    }

    #[test]
    fn rh_speed_examples() {
        let f = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        assert_eq!(rh_speed(&f, &int(0), &int(1)).unwrap(), ratio(1, 2));
        assert_eq!(rh_speed(&f, &int(-1), &int(1)).unwrap(), int(0));
        assert_eq!(rh_speed(&f, &int(1), &int(-1)).unwrap(), int(0));
        let g = sample_flux(&cubic(), &int(1), (-1, 1)).unwrap();
        assert_eq!(rh_speed(&g, &int(-1), &int(0)).unwrap(), int(1));
        assert!(rh_speed(&g, &int(0), &int(0)).is_err());
    }

    #[test]
    fn curvature_constant_examples() {
        let f = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        assert_eq!(curvature_constant(&f).unwrap().0, int(1));
        let affine =
            sample_flux(&FluxSpec::Polynomial(vec![int(3), ratio(-2, 3)]), &ratio(1, 3), (-5, 5))
                .unwrap();
        assert_eq!(curvature_constant(&affine).unwrap().0, int(0));
        let narrow = sample_flux(&cubic(), &int(1), (-1, 1)).unwrap();
        assert_eq!(curvature_constant(&narrow).unwrap().0, int(0));
        let wide = sample_flux(&cubic(), &int(1), (-2, 2)).unwrap();
        assert_eq!(curvature_constant(&wide).unwrap().0, int(6));
        let two = sample_flux(&cubic(), &int(1), (0, 1)).unwrap();
        assert_eq!(curvature_constant(&two), Err(EnvelopeError::TooFewPoints(2)));
    }

    #[test]
    fn eval_interpolates() {
        let f = sample_flux(&FluxSpec::burgers(), &int(1), (-2, 2)).unwrap();
        assert_eq!(f.eval(&ratio(1, 2)).unwrap(), ratio(1, 4));
        assert_eq!(f.eval(&int(2)).unwrap(), int(2));
        assert!(f.eval(&ratio(5, 2)).is_err());
    }

    #[test]
    fn mirrored_flux_swaps_envelopes() {
        let f = sample_flux(&cubic(), &ratio(1, 4), (-4, 6)).unwrap();
        let g = f.mirrored();
        assert_eq!(g.k_min(), -6);
        assert_eq!(g.k_max(), 4);
        let conv = hull(&f, -4, 3, Orientation::Convex);
        let conc = hull(&g, -3, 4, Orientation::Concave);
        let mirrored: Vec<i64> = conc.vertices.iter().rev().map(|v| -v).collect();
        assert_eq!(mirrored, conv.vertices);
        let slopes: Vec<Rational> = conc.slopes.iter().rev().cloned().collect();
        assert_eq!(slopes, conv.slopes);
    }
}
