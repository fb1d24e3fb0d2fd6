//! Event-driven front tracking.
//!
//! Fronts move at constant speed until adjacent ones meet; each meeting point
//! is resolved as a fresh Riemann problem between the outer states. The run is
//! recorded as a [`Timeline`]: every front ever created, the events in
//! lexicographic `(t, x)` order, and the live front set of every slab.
//!
//! Slab `0` is `[0, t_0]`, slab `j + 1` starts at event `j`. Several events at
//! the same instant (distinct `x`) produce zero-length slabs between them.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::envelope::{EnvelopeError, GridFlux};
use crate::rational::{self, int, Rational};
use crate::riemann::{solve_riemann, Front, RiemannError};

pub type FrontId = usize;

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("profile value {value} lies outside the flux window [{lo}, {hi}]")]
    OutsideFluxWindow {
        value: Rational,
        lo: Rational,
        hi: Rational,
    },
    #[error(transparent)]
    Riemann(#[from] RiemannError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error("colliding fronts at ({t}, {x}) are inconsistent: {reason}")]
    InconsistentCollision {
        t: Rational,
        x: Rational,
        reason: String,
    },
    #[error("event cap of {cap} exceeded; partial timeline has {} events", partial.events.len())]
    EventCap { cap: usize, partial: Box<Timeline> },
    #[error("time {0} is negative")]
    NegativeTime(Rational),
}

/// Piecewise constant, right-continuous profile with finitely many jumps.
///
/// `constant_state` is the value left of the first jump; the value right of
/// the last jump may differ from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    pub constant_state: Rational,
    /// `(position, value to the right of position)`.
    pub jumps: Vec<(Rational, Rational)>,
}

impl Profile {
    pub fn new(constant_state: Rational, jumps: Vec<(Rational, Rational)>) -> Result<Self, TrackerError> {
        let p = Profile {
            constant_state,
            jumps,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn constant(value: Rational) -> Self {
        Profile {
            constant_state: value,
            jumps: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), TrackerError> {
        let bad = |m: &str| Err(TrackerError::InvalidProfile(m.to_string()));
        if self.jumps.windows(2).any(|w| w[0].0 >= w[1].0) {
            return bad("jump positions must be strictly increasing");
        }
        let mut prev = &self.constant_state;
        for (_, v) in &self.jumps {
            if v == prev {
                return bad("consecutive values must differ");
            }
            prev = v;
        }
        Ok(())
    }

    /// `u(x)`, taking the value of the segment whose left end is `≤ x`.
    pub fn value_at(&self, x: &Rational) -> &Rational {
        let i = self.jumps.partition_point(|(p, _)| p <= x);
        if i == 0 {
            &self.constant_state
        } else {
            &self.jumps[i - 1].1
        }
    }

    pub fn left_limit(&self, x: &Rational) -> &Rational {
        let i = self.jumps.partition_point(|(p, _)| p < x);
        if i == 0 {
            &self.constant_state
        } else {
            &self.jumps[i - 1].1
        }
    }

    /// `(position, left value, right value)` for every jump.
    pub fn jump_triples(&self) -> Vec<(Rational, Rational, Rational)> {
        let mut prev = self.constant_state.clone();
        self.jumps
            .iter()
            .map(|(x, v)| {
                let left = std::mem::replace(&mut prev, v.clone());
                (x.clone(), left, v.clone())
            })
            .collect()
    }

    pub fn total_variation(&self) -> Rational {
        self.jump_triples()
            .into_iter()
            .map(|(_, l, r)| (r - l).abs())
            .sum()
    }

    pub fn state_range(&self) -> (Rational, Rational) {
        let values = self.jumps.iter().map(|(_, v)| v);
        let lo = values.clone().fold(&self.constant_state, |a, b| a.min(b)).clone();
        let hi = values.fold(&self.constant_state, |a, b| a.max(b)).clone();
        (lo, hi)
    }

    pub fn right_state(&self) -> &Rational {
        self.jumps.last().map(|(_, v)| v).unwrap_or(&self.constant_state)
    }

    /// `∫ (u(x) - h(x)) dx` where `h` is the step from the left to the right
    /// far-field state at `x = 0`.
    pub fn deviation_integral(&self) -> Rational {
        let zero = Rational::zero();
        let (left, right) = (&self.constant_state, self.right_state());
        let mut xs: Vec<&Rational> = self.jumps.iter().map(|(x, _)| x).collect();
        xs.push(&zero);
        xs.sort();
        xs.dedup();
        xs.windows(2)
            .map(|w| {
                let h = if w[0] < &zero { left } else { right };
                (self.value_at(w[0]) - h) * (w[1] - w[0])
            })
            .sum()
    }
}

/// `∫ |u - v| dx`; `None` when the far-field states differ.
pub fn l1_distance(u: &Profile, v: &Profile) -> Option<Rational> {
    if u.constant_state != v.constant_state || u.right_state() != v.right_state() {
        return None;
    }
    let mut xs: Vec<&Rational> = u.jumps.iter().chain(&v.jumps).map(|(x, _)| x).collect();
    xs.sort();
    xs.dedup();
    Some(
        xs.windows(2)
            .map(|w| (u.value_at(w[0]) - v.value_at(w[0])).abs() * (w[1] - w[0]))
            .sum(),
    )
}

/// Initial datum before projection onto the state grid: a piecewise constant
/// function equal to `constant` left of the first listed piece.
#[derive(Clone, Debug, PartialEq)]
pub struct DatumSpec {
    pub constant: Rational,
    /// `(position, value to the right)`; values need not lie on the grid.
    pub pieces: Vec<(Rational, Rational)>,
}

impl DatumSpec {
    fn total_variation(&self) -> Rational {
        let mut prev = &self.constant;
        let mut tv = Rational::zero();
        for (_, v) in &self.pieces {
            tv += (v - prev).abs();
            prev = v;
        }
        tv
    }
}

/// Rounds every value to the nearest multiple of `epsilon` (ties to even) and
/// drops jumps that vanish.
pub fn discretize_initial(datum: &DatumSpec, epsilon: &Rational) -> Result<Profile, TrackerError> {
    if !epsilon.is_positive() {
        return Err(TrackerError::InvalidDatum(format!("grid size {epsilon} is not positive")));
    }
    if datum.pieces.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(TrackerError::InvalidDatum("positions must be strictly increasing".into()));
    }
    let round = |v: &Rational| {
        rational::round_half_even_index(v, epsilon)
            .map(|k| int(k) * epsilon)
            .ok_or_else(|| TrackerError::InvalidDatum(format!("value {v} is out of range")))
    };
    let constant_state = round(&datum.constant)?;
    let mut jumps: Vec<(Rational, Rational)> = Vec::new();
    let mut current = constant_state.clone();
    for (x, v) in &datum.pieces {
        let v = round(v)?;
        if v != current {
            current = v.clone();
            jumps.push((x.clone(), v));
        }
    }
    let profile = Profile::new(constant_state, jumps)?;
    let (tv_in, tv_out) = (datum.total_variation(), profile.total_variation());
    if tv_out > tv_in {
        return Err(TrackerError::InvalidDatum(format!(
            "rounding to the grid raises total variation from {tv_in} to {tv_out}"
        )));
    }
    Ok(profile)
}

/// Riemann fans of every jump of `p` at `t = 0`, left to right.
pub fn initial_fronts(p: &Profile, f: &GridFlux) -> Result<Vec<Front>, TrackerError> {
    let zero = Rational::zero();
    let mut out = Vec::new();
    for (x, l, r) in p.jump_triples() {
        out.extend(solve_riemann(&l, &r, f, &zero, &x)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collision {
    pub t: Rational,
    pub x: Rational,
    /// Indices into the live front list, contiguous and increasing.
    pub members: Vec<usize>,
}

fn meeting_time(l: &Front, r: &Front) -> Option<Rational> {
    if l.speed <= r.speed {
        return None;
    }
    let num = (&r.birth_position - &r.speed * &r.birth_time) - (&l.birth_position - &l.speed * &l.birth_time);
    Some(num / (&l.speed - &r.speed))
}

fn earliest_meeting(live: &[&Front], after: &Rational) -> Option<Rational> {
    live.windows(2)
        .filter_map(|w| meeting_time(w[0], w[1]))
        .filter(|t| t > after)
        .min()
}

/// Maximal runs of at least two fronts sharing a position at time `t`.
fn clusters_at(live: &[&Front], t: &Rational) -> Vec<Collision> {
    let positions: Vec<Rational> = live.iter().map(|f| f.position_at(t)).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < positions.len() {
        let mut j = i + 1;
        while j < positions.len() && positions[j] == positions[i] {
            j += 1;
        }
        if j - i >= 2 {
            out.push(Collision {
                t: t.clone(),
                x: positions[i].clone(),
                members: (i..j).collect(),
            });
        }
        i = j;
    }
    out
}

/// Earliest meeting strictly after `after`, leftmost if several happen at once.
pub fn next_collision(live: &[Front], after: &Rational) -> Option<Collision> {
    let refs: Vec<&Front> = live.iter().collect();
    let t = earliest_meeting(&refs, after)?;
    clusters_at(&refs, &t).into_iter().next()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InteractionKind {
    SameSign,
    Cancellation,
}

impl InteractionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InteractionKind::SameSign => "same_sign",
            InteractionKind::Cancellation => "cancellation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionEvent {
    pub t: Rational,
    pub x: Rational,
    pub incoming: Vec<Front>,
    pub outgoing: Vec<Front>,
    /// Ids of `incoming` / `outgoing` in [`Timeline::fronts`]; empty until the
    /// event is recorded in a timeline.
    pub incoming_ids: Vec<FrontId>,
    pub outgoing_ids: Vec<FrontId>,
    pub kind: InteractionKind,
    /// `(a, b, c)`: outer states and the intermediate state farthest from both.
    pub jump_triple: (Rational, Rational, Rational),
    /// Chain of incoming states `a = s_0, s_1, ..., s_m = c`.
    pub states: Vec<Rational>,
}

/// One binary step `(a, b, c)` of a possibly multi-front interaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubInteraction {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub kind: InteractionKind,
}

impl InteractionEvent {
    pub fn is_binary(&self) -> bool {
        self.incoming.len() == 2
    }

    /// Left-to-right sequence of binary interactions: the jump accumulated so
    /// far `(a, s_i)` meets the next incoming front `(s_i, s_{i+1})`.
    pub fn substeps(&self) -> Vec<SubInteraction> {
        substeps_of(&self.states)
    }
}

/// Left-to-right binary decomposition of a state sequence `a, b₁, …, c`: the
/// jump accumulated so far from `a` meets the next jump.
pub fn substeps_of(states: &[Rational]) -> Vec<SubInteraction> {
    let a = &states[0];
    let mut acc = states[1].clone();
    let mut out = Vec::new();
    for next in &states[2..] {
        if &acc == a {
            acc = next.clone();
            continue;
        }
        let same = (&acc > a && next > &acc) || (&acc < a && next < &acc);
        out.push(SubInteraction {
            a: a.clone(),
            b: acc.clone(),
            c: next.clone(),
            kind: if same {
                InteractionKind::SameSign
            } else {
                InteractionKind::Cancellation
            },
        });
        acc = next.clone();
    }
    out
}

/// Resolves fronts meeting at `(t, x)` as one Riemann problem between the outer states.
pub fn resolve_event(
    colliding: &[Front],
    t: &Rational,
    x: &Rational,
    f: &GridFlux,
) -> Result<InteractionEvent, TrackerError> {
    let fail = |reason: String| TrackerError::InconsistentCollision {
        t: t.clone(),
        x: x.clone(),
        reason,
    };
    if colliding.len() < 2 {
        return Err(fail(format!("{} front(s) cannot interact", colliding.len())));
    }
    for (i, fr) in colliding.iter().enumerate() {
        if &fr.position_at(t) != x {
            return Err(fail(format!("front {i} is not at the meeting point")));
        }
    }
    if colliding.windows(2).any(|w| w[0].right_state != w[1].left_state) {
        return Err(fail("states do not chain".into()));
    }
    let mut states: Vec<Rational> = colliding.iter().map(|fr| fr.left_state.clone()).collect();
    states.push(colliding.last().unwrap().right_state.clone());
    let a = states[0].clone();
    let c = states.last().unwrap().clone();
    let kind = if colliding.iter().all(|fr| fr.sign() == colliding[0].sign()) {
        InteractionKind::SameSign
    } else {
        InteractionKind::Cancellation
    };
    let b = states[1..states.len() - 1]
        .iter()
        .fold(None::<(&Rational, Rational)>, |best, s| {
            let score = (s - &a).abs() + (s - &c).abs();
            match best {
                Some((_, ref top)) if *top >= score => best,
                _ => Some((s, score)),
            }
        })
        .map(|(s, _)| s.clone())
        .unwrap();
    let outgoing = solve_riemann(&a, &c, f, t, x)?;
    Ok(InteractionEvent {
        t: t.clone(),
        x: x.clone(),
        incoming: colliding.to_vec(),
        outgoing,
        incoming_ids: Vec::new(),
        outgoing_ids: Vec::new(),
        kind,
        jump_triple: (a, b, c),
        states,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slab {
    pub t_lo: Rational,
    /// `None` for the final, unbounded slab.
    pub t_hi: Option<Rational>,
    /// Live fronts ordered left to right.
    pub fronts: Vec<FrontId>,
}

impl Slab {
    /// A time strictly inside the slab (or its start if it has zero length).
    pub fn midpoint(&self) -> Rational {
        match &self.t_hi {
            Some(hi) => (&self.t_lo + hi) / int(2),
            None => &self.t_lo + int(1),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.t_hi.as_ref() == Some(&self.t_lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeSide {
    /// Left limit: events at exactly `t` have not happened yet.
    Pre,
    /// Right-continuous value: events at `t` have happened.
    Post,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timeline {
    pub flux: GridFlux,
    pub initial_profile: Profile,
    pub fronts: Vec<Front>,
    pub events: Vec<InteractionEvent>,
    pub slabs: Vec<Slab>,
}

#[derive(Clone, Debug, Default)]
pub struct EvolveOptions {
    /// Overrides the default cap of `10·n²` events (`n` initial fronts).
    pub max_events: Option<usize>,
}

pub fn evolve(p: &Profile, f: &GridFlux) -> Result<Timeline, TrackerError> {
    evolve_with(p, f, &EvolveOptions::default())
}

pub fn evolve_with(p: &Profile, f: &GridFlux, options: &EvolveOptions) -> Result<Timeline, TrackerError> {
    p.validate()?;
    let (lo, hi) = p.state_range();
    for v in [&lo, &hi] {
        if f.index_of(v).is_err() {
            return Err(TrackerError::OutsideFluxWindow {
                value: v.clone(),
                lo: f.state(f.k_min()),
                hi: f.state(f.k_max()),
            });
        }
    }
    let fronts = initial_fronts(p, f)?;
    let n0 = fronts.len();
    let cap = options.max_events.unwrap_or(10 * n0 * n0).max(1);
    let mut tl = Timeline {
        flux: f.clone(),
        initial_profile: p.clone(),
        slabs: vec![Slab {
            t_lo: Rational::zero(),
            t_hi: None,
            fronts: (0..n0).collect(),
        }],
        fronts,
        events: Vec::new(),
    };
    let mut live: Vec<FrontId> = (0..n0).collect();
    let mut now = Rational::zero();
    loop {
        let refs: Vec<&Front> = live.iter().map(|&id| &tl.fronts[id]).collect();
        let Some(t) = earliest_meeting(&refs, &now) else {
            break;
        };
        let clusters = clusters_at(&refs, &t);
        let mut shift: isize = 0;
        for cl in clusters {
            if tl.events.len() >= cap {
                return Err(TrackerError::EventCap {
                    cap,
                    partial: Box::new(tl),
                });
            }
            let start = (cl.members[0] as isize + shift) as usize;
            let end = start + cl.members.len();
            let incoming_ids: Vec<FrontId> = live[start..end].to_vec();
            let incoming: Vec<Front> = incoming_ids.iter().map(|&id| tl.fronts[id].clone()).collect();
            let mut event = resolve_event(&incoming, &cl.t, &cl.x, f)?;
            let first_new = tl.fronts.len();
            tl.fronts.extend(event.outgoing.iter().cloned());
            event.incoming_ids = incoming_ids;
            event.outgoing_ids = (first_new..tl.fronts.len()).collect();
            live.splice(start..end, event.outgoing_ids.iter().copied());
            shift += event.outgoing_ids.len() as isize - cl.members.len() as isize;
            tl.events.push(event);
            tl.slabs.last_mut().unwrap().t_hi = Some(t.clone());
            tl.slabs.push(Slab {
                t_lo: t.clone(),
                t_hi: None,
                fronts: live.clone(),
            });
        }
        now = t;
    }
    Ok(tl)
}

impl Timeline {
    pub fn front(&self, id: FrontId) -> &Front {
        &self.fronts[id]
    }

    pub fn epsilon(&self) -> &Rational {
        self.flux.epsilon()
    }

    /// Slab holding the fronts that are live at `t` on the given side.
    pub fn slab_index(&self, t: &Rational, side: TimeSide) -> usize {
        self.events
            .iter()
            .take_while(|e| match side {
                TimeSide::Pre => &e.t < t,
                TimeSide::Post => &e.t <= t,
            })
            .count()
    }

    pub fn slab_total_variation(&self, slab: usize) -> Rational {
        self.slabs[slab]
            .fronts
            .iter()
            .map(|&id| self.fronts[id].strength())
            .sum()
    }

    pub fn initial_total_variation(&self) -> Rational {
        self.initial_profile.total_variation()
    }

    /// Profile built from the fronts of `slab` at time `t`; fronts sharing a
    /// position merge into one jump.
    pub fn profile_of_slab(&self, slab: usize, t: &Rational) -> Profile {
        let mut jumps: Vec<(Rational, Rational)> = Vec::new();
        let mut current = self.initial_profile.constant_state.clone();
        let fronts = &self.slabs[slab].fronts;
        let mut i = 0;
        while i < fronts.len() {
            let x = self.fronts[fronts[i]].position_at(t);
            let mut j = i + 1;
            while j < fronts.len() && self.fronts[fronts[j]].position_at(t) == x {
                j += 1;
            }
            let right = &self.fronts[fronts[j - 1]].right_state;
            if right != &current {
                current = right.clone();
                jumps.push((x, current.clone()));
            }
            i = j;
        }
        Profile {
            constant_state: self.initial_profile.constant_state.clone(),
            jumps,
        }
    }

    pub fn profile_at(&self, t: &Rational, side: TimeSide) -> Result<Profile, TrackerError> {
        if t.is_negative() {
            return Err(TrackerError::NegativeTime(t.clone()));
        }
        Ok(self.profile_of_slab(self.slab_index(t, side), t))
    }

    /// Checks that the fronts of every slab are strictly ordered inside it.
    pub fn check_no_crossing(&self) -> Result<(), String> {
        for (s, slab) in self.slabs.iter().enumerate() {
            if slab.is_degenerate() {
                continue;
            }
            let t = slab.midpoint();
            let xs: Vec<Rational> = slab.fronts.iter().map(|&id| self.fronts[id].position_at(&t)).collect();
            if let Some(w) = xs.windows(2).position(|w| w[0].cmp(&w[1]) != Ordering::Less) {
                return Err(format!("slab {s}: fronts {w} and {} are not ordered at t = {t}", w + 1));
            }
        }
        Ok(())
    }
}
