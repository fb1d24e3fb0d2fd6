//! Speed changes at interactions, the quadratic interaction potential and the
//! checks that tie them together.
//!
//! All wave-pair integrals are exact sums over `ε`-atoms: pair weights are
//! constant on atom pairs, and envelope slopes are constant on state atoms.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::envelope::{curvature_constant, hull, slope_gap_integral, EnvelopeError, GridFlux, Hull, Orientation};
use crate::rational::{int, positive_part, Rational};
use crate::tracing::{trace, Snapshot, TracingError, WaveSystem};
use crate::tracker::{evolve_with, substeps_of, EvolveOptions, InteractionEvent, InteractionKind, Timeline, TrackerError};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("expected a {expected:?} interaction, got {actual:?}")]
    WrongKind {
        expected: InteractionKind,
        actual: InteractionKind,
    },
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Tracing(#[from] TracingError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error("wave atom {0} is not live in slab {1}")]
    NotLive(i64, usize),
    #[error("{b} is not in ({a}, {d}]")]
    OutsideInterval { a: Rational, b: Rational, d: Rational },
    #[error("wave set {0:?} has no interval image")]
    NotAnInterval(Vec<usize>),
}

fn indices(f: &GridFlux, states: &[&Rational]) -> Result<Vec<i64>, EnvelopeError> {
    states.iter().map(|s| f.index_of(s)).collect()
}

fn span(i: i64, j: i64) -> (i64, i64) {
    (i.min(j), i.max(j))
}

/// `Δσ` of one binary interaction `(a, b) + (b, c)`.
///
/// Same sign: `Σ ∫_{I_in} |env'_{I_in} − env'_{I(a,c)}|` over both incoming
/// jumps. Cancellation: `∫_{I(a,c)} |env'_{I(a,c)} − env'_{I_dom}|`, where
/// `I_dom` is the incoming jump that contains the surviving states. The
/// envelope is convex for increasing jumps and concave for decreasing ones.
pub fn delta_sigma_triple(f: &GridFlux, a: &Rational, b: &Rational, c: &Rational) -> Result<Rational, EnvelopeError> {
    let ix = indices(f, &[a, b, c])?;
    let (ia, ib, ic) = (ix[0], ix[1], ix[2]);
    if ia == ic || ia == ib || ib == ic {
        return Ok(Rational::zero());
    }
    let orientation = Orientation::for_sign(if ic > ia { 1 } else { -1 });
    let env = |(lo, hi): (i64, i64)| hull(f, lo, hi, orientation);
    let outer = span(ia, ic);
    let h_outer = env(outer);
    let same_sign = (ib > ia && ic > ib) || (ib < ia && ic < ib);
    if same_sign {
        let (left, right) = (span(ia, ib), span(ib, ic));
        Ok(slope_gap_integral(&env(left), &h_outer, left.0, left.1, f.epsilon())
            + slope_gap_integral(&env(right), &h_outer, right.0, right.1, f.epsilon()))
    } else {
        let left = span(ia, ib);
        let dominant = if outer.0 >= left.0 && outer.1 <= left.1 { left } else { span(ib, ic) };
        Ok(slope_gap_integral(&h_outer, &env(dominant), outer.0, outer.1, f.epsilon()))
    }
}

/// `Δσ` of an event.
///
/// Binary events use [`delta_sigma_triple`]. When several same-sign fronts
/// merge, every incoming jump is compared with the outgoing envelope directly,
/// which is the wave-wise speed change. Events with a cancellation are summed
/// over their left-to-right binary sub-steps.
pub fn delta_sigma(event: &InteractionEvent, f: &GridFlux) -> Result<Rational, EnvelopeError> {
    delta_sigma_states(f, &event.states)
}

/// [`delta_sigma`] for the state sequence `a, b₁, …, c` of the incoming jumps.
pub fn delta_sigma_states(f: &GridFlux, states: &[Rational]) -> Result<Rational, EnvelopeError> {
    let ix: Vec<i64> = states.iter().map(|s| f.index_of(s)).collect::<Result<_, _>>()?;
    let rising = ix.windows(2).all(|w| w[1] > w[0]);
    let falling = ix.windows(2).all(|w| w[1] < w[0]);
    if states.len() > 3 && (rising || falling) {
        let orientation = Orientation::for_sign(if rising { 1 } else { -1 });
        let (a, c) = (ix[0], ix[ix.len() - 1]);
        let outer = hull(f, a.min(c), a.max(c), orientation);
        return Ok(ix
            .windows(2)
            .map(|w| {
                let (lo, hi) = span(w[0], w[1]);
                slope_gap_integral(&hull(f, lo, hi, orientation), &outer, lo, hi, f.epsilon())
            })
            .sum());
    }
    substeps_of(states)
        .iter()
        .map(|s| delta_sigma_triple(f, &s.a, &s.b, &s.c))
        .sum()
}

/// Sum of [`delta_sigma_triple`] over the binary sub-steps, for comparison
/// with [`delta_sigma`] on multi-front merges.
pub fn delta_sigma_sequential(event: &InteractionEvent, f: &GridFlux) -> Result<Rational, EnvelopeError> {
    event
        .substeps()
        .iter()
        .map(|s| delta_sigma_triple(f, &s.a, &s.b, &s.c))
        .sum()
}

pub fn delta_sigma_same_sign(event: &InteractionEvent, f: &GridFlux) -> Result<Rational, PotentialError> {
    if event.kind != InteractionKind::SameSign {
        return Err(PotentialError::WrongKind {
            expected: InteractionKind::SameSign,
            actual: event.kind,
        });
    }
    Ok(delta_sigma(event, f)?)
}

pub fn delta_sigma_cancellation(event: &InteractionEvent, f: &GridFlux) -> Result<Rational, PotentialError> {
    if event.kind != InteractionKind::Cancellation {
        return Err(PotentialError::WrongKind {
            expected: InteractionKind::Cancellation,
            actual: event.kind,
        });
    }
    Ok(delta_sigma(event, f)?)
}

/// `2(σ′ − σ″)s′s″ / (s′ + s″)` for a binary same-sign event.
pub fn binary_closed_form(event: &InteractionEvent) -> Option<Rational> {
    if !event.is_binary() || event.kind != InteractionKind::SameSign {
        return None;
    }
    let (l, r) = (&event.incoming[0], &event.incoming[1]);
    let (s1, s2) = (l.strength(), r.strength());
    Some(int(2) * (&l.speed - &r.speed) * &s1 * &s2 / (&s1 + &s2))
}

/// Largest `d̄ ≤ d` such that the convex envelope of `F_ε` on `[a, d]` does
/// not touch `F_ε` strictly between `a`'s side of `b` and `d̄`: the first
/// contact grid point at or after `b`.
pub fn maximal_noncontact_interval(f: &GridFlux, a: &Rational, b: &Rational, d: &Rational) -> Result<Rational, PotentialError> {
    if !(a < b && b <= d) {
        return Err(PotentialError::OutsideInterval {
            a: a.clone(),
            b: b.clone(),
            d: d.clone(),
        });
    }
    let ix = indices(f, &[a, b, d])?;
    let h = hull(f, ix[0], ix[2], Orientation::Convex);
    let contact = (ix[1]..=ix[2]).find(|&k| h.touches(f, k)).unwrap_or(ix[2]);
    Ok(f.state(contact))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairClass {
    MixedSign,
    SamePosition,
    NeverInteract,
    Generic,
}

/// Weight of one pair of wave atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWeightRecord {
    pub atoms: (i64, i64),
    pub cells: (usize, usize),
    pub class: PairClass,
    pub q: Rational,
    pub pi: Rational,
    pub d: Rational,
    pub j_left: Vec<usize>,
    pub j_right: Vec<usize>,
    pub meeting: Option<(Rational, Rational)>,
}

/// Weight of the atom pair `(n, n2)`, `n < n2`, computed directly from wave
/// positions (independent of the survival bookkeeping used by
/// [`quadratic_potential`]). Degenerate slabs are not supported here.
pub fn pair_weight(ws: &WaveSystem, snap: &Snapshot, n: i64, n2: i64, k: &Rational) -> Result<PairWeightRecord, PotentialError> {
    let (c, c2) = (ws.cell_of_atom(n), ws.cell_of_atom(n2));
    for (atom, cell) in [(n, c), (n2, c2)] {
        if !ws.cells[cell].is_live(snap.slab) {
            return Err(PotentialError::NotLive(atom, snap.slab));
        }
    }
    let mut rec = PairWeightRecord {
        atoms: (n, n2),
        cells: (c, c2),
        class: PairClass::SamePosition,
        q: Rational::zero(),
        pi: Rational::zero(),
        d: Rational::zero(),
        j_left: Vec::new(),
        j_right: Vec::new(),
        meeting: None,
    };
    let sign = ws.cells[c].sign;
    if (c..=c2).any(|i| ws.cells[i].is_live(snap.slab) && ws.cells[i].sign != sign) {
        rec.class = PairClass::MixedSign;
        rec.q = k.clone();
        return Ok(rec);
    }
    let t_bar = ws.representative_time(snap);
    let pos = |cell: usize, slab: usize, t: &Rational| ws.cell_position(cell, slab, t);
    if pos(c, snap.slab, &t_bar) == pos(c2, snap.slab, &t_bar) {
        return Ok(rec);
    }
    let mut times: Vec<&Rational> = ws.event_times.iter().filter(|t| *t > &t_bar).collect();
    times.dedup();
    let meeting = times.into_iter().find_map(|t| {
        let after = ws.snapshot_at(t).slab;
        match (pos(c, after, t), pos(c2, after, t)) {
            (Some(x), Some(y)) if x == y => Some((t.clone(), x, after)),
            _ => None,
        }
    });
    let Some((t_int, x_int, after)) = meeting else {
        rec.class = PairClass::NeverInteract;
        return Ok(rec);
    };
    let meeting_set: Vec<usize> = ws
        .live_cells(after)
        .into_iter()
        .filter(|&i| pos(i, after, &t_int).as_ref() == Some(&x_int))
        .collect();
    let x_left = pos(c, snap.slab, &t_bar);
    let x_right = pos(c2, snap.slab, &t_bar);
    rec.j_left = meeting_set
        .iter()
        .copied()
        .filter(|&i| pos(i, snap.slab, &t_bar) == x_left)
        .collect();
    rec.j_right = meeting_set
        .iter()
        .copied()
        .filter(|&i| pos(i, snap.slab, &t_bar) == x_right)
        .collect();
    let entropic = |set: &[usize], cell: usize, atom: i64| -> Result<Rational, PotentialError> {
        let (lo, hi) = ws
            .state_image(set)
            .ok_or_else(|| PotentialError::NotAnInterval(set.to_vec()))?;
        let h = hull(&ws.flux, lo, hi, Orientation::for_sign(sign));
        Ok(h.slope_on_atom(ws.cells[cell].state_atom(atom)).clone())
    };
    let sigma_left = entropic(&rec.j_left, c, n)?;
    let sigma_right = entropic(&rec.j_right, c2, n2)?;
    let atoms: i64 = meeting_set.iter().map(|&i| ws.cells[i].atoms()).sum();
    rec.class = PairClass::Generic;
    rec.pi = positive_part(sigma_left - sigma_right);
    rec.d = int(atoms) * &ws.epsilon;
    rec.q = &rec.pi / &rec.d;
    rec.meeting = Some((t_int, x_int));
    Ok(rec)
}

/// `𝔔` as a literal sum of [`pair_weight`] over all ordered atom pairs.
pub fn quadratic_potential_by_atoms(ws: &WaveSystem, snap: &Snapshot, k: &Rational) -> Result<Rational, PotentialError> {
    let live: Vec<i64> = ws
        .live_cells(snap.slab)
        .into_iter()
        .flat_map(|c| ws.cells[c].lo..ws.cells[c].hi)
        .collect();
    let mut total = Rational::zero();
    for (i, &n) in live.iter().enumerate() {
        for &n2 in &live[i + 1..] {
            total += pair_weight(ws, snap, n, n2, k)?.q;
        }
    }
    Ok(total * &ws.epsilon * &ws.epsilon)
}

/// Cell-level evaluator with memoised envelopes.
struct Evaluator<'a> {
    ws: &'a WaveSystem,
    hulls: RefCell<HashMap<(i64, i64, Orientation), Hull>>,
}

impl<'a> Evaluator<'a> {
    fn new(ws: &'a WaveSystem) -> Self {
        Evaluator {
            ws,
            hulls: RefCell::new(HashMap::new()),
        }
    }

    /// `(atom count, σ^ent)` pieces of `cell` inside the interval of waves `set`.
    fn entropic_pieces(&self, set: &[usize], cell: usize) -> Vec<(i64, Rational)> {
        let (lo, hi) = self
            .ws
            .state_image(set)
            .expect("interval of waves must have an interval image");
        let c = &self.ws.cells[cell];
        let key = (lo, hi, Orientation::for_sign(c.sign));
        let mut cache = self.hulls.borrow_mut();
        let h = cache
            .entry(key)
            .or_insert_with(|| hull(&self.ws.flux, lo, hi, key.2));
        h.slopes_on(c.state_lo, c.state_hi)
    }

    fn potential(&self, snap: &Snapshot, k: &Rational) -> Rational {
        let ws = self.ws;
        let groups = ws.position_groups(snap);
        let mut group_of: HashMap<usize, usize> = HashMap::new();
        for (g, members) in groups.iter().enumerate() {
            for &c in members {
                group_of.insert(c, g);
            }
        }
        let live: Vec<usize> = groups.iter().flatten().copied().collect();

        // Pairs separated by a sign change weigh K.
        let mut runs: Vec<Vec<usize>> = Vec::new();
        for &c in &live {
            match runs.last_mut() {
                Some(run) if ws.cells[run[0]].sign == ws.cells[c].sign => run.push(c),
                _ => runs.push(vec![c]),
            }
        }
        let total: i128 = live.iter().map(|&c| ws.cells[c].atoms() as i128).sum();
        let same: i128 = runs
            .iter()
            .map(|r| {
                let m: i128 = r.iter().map(|&c| ws.cells[c].atoms() as i128).sum();
                m * m
            })
            .sum();
        let mixed_pairs = (total * total - same) / 2;
        let eps2 = &ws.epsilon * &ws.epsilon;
        let mut q = k * Rational::from_integer(mixed_pairs.into()) * &eps2;

        let mut pieces: HashMap<(usize, usize), Vec<(i64, Rational)>> = HashMap::new();
        let mut pieces_for = |cell: usize, event: usize| -> Vec<(i64, Rational)> {
            pieces
                .entry((cell, event))
                .or_insert_with(|| {
                    let set: Vec<usize> = groups[group_of[&cell]]
                        .iter()
                        .copied()
                        .filter(|&m| ws.cells[m].survived.binary_search(&event).is_ok())
                        .collect();
                    self.entropic_pieces(&set, cell)
                })
                .clone()
        };
        for run in &runs {
            for (i, &c) in run.iter().enumerate() {
                for &c2 in &run[i + 1..] {
                    if group_of[&c] == group_of[&c2] {
                        continue;
                    }
                    let Some(e) = ws.first_common_survival(c, c2, snap.slab) else {
                        continue;
                    };
                    let left = pieces_for(c, e);
                    let right = pieces_for(c2, e);
                    let mut acc = Rational::zero();
                    for (m, s) in &left {
                        for (m2, s2) in &right {
                            if s > s2 {
                                acc += int(m * m2) * (s - s2);
                            }
                        }
                    }
                    if !acc.is_zero() {
                        // q = π/d with d = survivors·ε, times ε² per atom pair.
                        q += acc * &ws.epsilon / int(ws.event_survivors[e]);
                    }
                }
            }
        }
        q
    }
}

/// `𝔔` at a snapshot.
pub fn quadratic_potential(ws: &WaveSystem, snap: &Snapshot, k: &Rational) -> Rational {
    Evaluator::new(ws).potential(snap, k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Upsilon {
    /// `K·TV(ū)·TV(t) + 𝔔(t)`
    pub paper: Rational,
    /// `K·TV(ū)·TV(t) + 2𝔔(t)`
    pub strict: Rational,
}

pub fn upsilon(q: &Rational, tv: &Rational, tv0: &Rational, k: &Rational) -> Upsilon {
    let base = k * tv0 * tv;
    Upsilon {
        paper: &base + q,
        strict: base + int(2) * q,
    }
}

/// `∬_{w<w'} |σ(w) − σ(w')|`, with `σ` the speed of the carrying front.
pub fn bianchini_cubic(ws: &WaveSystem, snap: &Snapshot) -> Rational {
    let live = ws.live_cells(snap.slab);
    let speed = |c: usize| &ws.fronts[ws.cells[c].front_in(snap.slab).unwrap()].speed;
    let mut total = Rational::zero();
    for (i, &c) in live.iter().enumerate() {
        for &c2 in &live[i + 1..] {
            total += (speed(c) - speed(c2)).abs() * int(ws.cells[c].atoms() * ws.cells[c2].atoms());
        }
    }
    total * &ws.epsilon * &ws.epsilon
}

/// Checks, for all live atom triples `w < w' < w''` at the snapshot, that
/// equal `J^right` sets for `(w, w')` and `(w, w'')` force equal `J^left` sets.
pub fn check_fundamental_property(ws: &WaveSystem, snap: &Snapshot, k: &Rational) -> Result<usize, String> {
    let live: Vec<i64> = ws
        .live_cells(snap.slab)
        .into_iter()
        .flat_map(|c| ws.cells[c].lo..ws.cells[c].hi)
        .collect();
    let mut records: HashMap<(i64, i64), PairWeightRecord> = HashMap::new();
    for (i, &n) in live.iter().enumerate() {
        for &n2 in &live[i + 1..] {
            let r = pair_weight(ws, snap, n, n2, k).map_err(|e| e.to_string())?;
            if r.class == PairClass::Generic {
                records.insert((n, n2), r);
            }
        }
    }
    let mut checked = 0;
    for (i, &n) in live.iter().enumerate() {
        for (j, &n2) in live.iter().enumerate().skip(i + 1) {
            let Some(r1) = records.get(&(n, n2)) else { continue };
            for &n3 in &live[j + 1..] {
                let Some(r2) = records.get(&(n, n3)) else { continue };
                checked += 1;
                if r1.j_right == r2.j_right && r1.j_left != r2.j_left {
                    return Err(format!(
                        "slab {}: atoms ({n}, {n2}, {n3}) share J^right but not J^left",
                        snap.slab
                    ));
                }
            }
        }
    }
    Ok(checked)
}

/// Outcome of one exact inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: &'static str,
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
    /// Reported but not part of the pass/fail decision.
    pub informational: bool,
}

impl Verdict {
    fn le(name: &'static str, lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs <= rhs;
        Verdict {
            name,
            lhs,
            rhs,
            holds,
            informational: false,
        }
    }

    fn info(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlabRecord {
    pub t_lo: Rational,
    pub t_hi: Option<Rational>,
    pub q: Rational,
    pub tv: Rational,
    pub upsilon: Upsilon,
    pub bianchini: Rational,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRecord {
    pub index: usize,
    pub t: Rational,
    pub x: Rational,
    pub kind: InteractionKind,
    pub jump_triple: (Rational, Rational, Rational),
    pub incoming: usize,
    pub delta_sigma: Rational,
    pub closed_form: Option<Rational>,
    pub q_minus: Rational,
    pub q_plus: Rational,
    pub tv_minus: Rational,
    pub tv_plus: Rational,
    pub upsilon_minus: Upsilon,
    pub upsilon_plus: Upsilon,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSeries {
    pub k: Rational,
    pub tv0: Rational,
    /// `𝔔(0)` with fans of the initial jumps sharing their position.
    pub q0: Rational,
    pub upsilon0: Upsilon,
    pub slabs: Vec<SlabRecord>,
    pub events: Vec<EventRecord>,
    pub verdicts: Vec<Verdict>,
}

impl PotentialSeries {
    fn all_verdicts(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts
            .iter()
            .chain(self.slabs.iter().flat_map(|s| &s.verdicts))
            .chain(self.events.iter().flat_map(|e| &e.verdicts))
    }

    /// Failed verdicts that count towards the outcome.
    pub fn failures(&self) -> Vec<&Verdict> {
        self.all_verdicts().filter(|v| !v.holds && !v.informational).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// Events where `Δσ ≤ Υ_paper(−) − Υ_paper(+)` fails.
    pub fn paper_upsilon_counterexamples(&self) -> Vec<usize> {
        self.events
            .iter()
            .filter(|e| e.verdicts.iter().any(|v| v.name == "upsilon_paper_decrease" && !v.holds))
            .map(|e| e.index)
            .collect()
    }
}

/// Computes 𝔔, Υ and `Δσ` along the run and checks every inequality exactly.
pub fn verify_run(tl: &Timeline, ws: &WaveSystem) -> Result<PotentialSeries, PotentialError> {
    let f = &tl.flux;
    let k = curvature_constant(f)?.0;
    let tv0 = ws.total_variation();
    let eval = Evaluator::new(ws);
    let q0 = eval.potential(&ws.snapshot_at(&Rational::zero()), &k);
    let upsilon0 = upsilon(&q0, &tv0, &tv0, &k);
    let kt2 = &k * &tv0 * &tv0;
    let verdicts = vec![
        Verdict::le("initial_potential_bound", q0.clone(), kt2.clone()),
        Verdict::le("initial_upsilon_literal", upsilon0.paper.clone(), kt2).info(),
    ];
    let slabs: Vec<SlabRecord> = tl
        .slabs
        .iter()
        .enumerate()
        .map(|(s, slab)| {
            let snap = Snapshot::open(s);
            let q = eval.potential(&snap, &k);
            let tv = tl.slab_total_variation(s);
            let up = upsilon(&q, &tv, &tv0, &k);
            let bound = &k * &tv * &tv;
            SlabRecord {
                t_lo: slab.t_lo.clone(),
                t_hi: slab.t_hi.clone(),
                verdicts: vec![Verdict::le("potential_uniform_bound", q.clone(), bound)],
                q,
                tv,
                upsilon: up,
                bianchini: bianchini_cubic(ws, &snap),
            }
        })
        .collect();
    let mut events = Vec::with_capacity(tl.events.len());
    for (e, ev) in tl.events.iter().enumerate() {
        let (before, after) = (&slabs[e], &slabs[e + 1]);
        let ds = delta_sigma(ev, f)?;
        let mut cancel_ds = Rational::zero();
        let mut cancel_local = Rational::zero();
        for st in ev.substeps().iter().filter(|st| st.kind == InteractionKind::Cancellation) {
            cancel_ds += delta_sigma_triple(f, &st.a, &st.b, &st.c)?;
            cancel_local += &k * (&st.c - &st.a).abs() * (&st.c - &st.b).abs();
        }
        let q_drop = &before.q - &after.q;
        let tv_drop = &before.tv - &after.tv;
        let mut v = vec![Verdict::le("potential_nonincreasing", after.q.clone(), before.q.clone())];
        match ev.kind {
            InteractionKind::SameSign => {
                v.push(Verdict::le("same_sign_interaction", &ds / int(2), q_drop.clone()));
                if !ev.is_binary() {
                    let seq = delta_sigma_sequential(ev, f)?;
                    v.push(Verdict::le("same_sign_interaction_sequential", seq / int(2), q_drop.clone()).info());
                }
            }
            InteractionKind::Cancellation => {
                v.push(Verdict::le("cancellation_local", cancel_ds.clone(), cancel_local));
                v.push(Verdict::le("cancellation_variation", cancel_ds, &k * &tv0 * &tv_drop));
            }
        }
        v.push(Verdict::le(
            "upsilon_strict_decrease",
            ds.clone(),
            &before.upsilon.strict - &after.upsilon.strict,
        ));
        v.push(Verdict::le("upsilon_paper_decrease", ds.clone(), &before.upsilon.paper - &after.upsilon.paper).info());
        events.push(EventRecord {
            index: e,
            t: ev.t.clone(),
            x: ev.x.clone(),
            kind: ev.kind,
            jump_triple: ev.jump_triple.clone(),
            incoming: ev.incoming.len(),
            closed_form: binary_closed_form(ev),
            delta_sigma: ds,
            q_minus: before.q.clone(),
            q_plus: after.q.clone(),
            tv_minus: before.tv.clone(),
            tv_plus: after.tv.clone(),
            upsilon_minus: before.upsilon.clone(),
            upsilon_plus: after.upsilon.clone(),
            verdicts: v,
        });
    }
    Ok(PotentialSeries {
        k,
        tv0,
        q0,
        upsilon0,
        slabs,
        events,
        verdicts,
    })
}

/// Restarts the run from the profile in the middle of `slab` and returns
/// `(𝔔 of the slab, 𝔔(0) of the restarted run)`.
pub fn restart_check(tl: &Timeline, ws: &WaveSystem, slab: usize, options: &EvolveOptions) -> Result<(Rational, Rational), PotentialError> {
    let k = curvature_constant(&tl.flux)?.0;
    let snap = Snapshot::open(slab);
    let original = quadratic_potential(ws, &snap, &k);
    let t = ws.representative_time(&snap);
    let profile = tl.profile_of_slab(slab, &t);
    let rerun = evolve_with(&profile, &tl.flux, options)?;
    let ws2 = trace(&rerun)?;
    let restarted = quadratic_potential(&ws2, &ws2.snapshot_at(&Rational::zero()), &k);
    Ok((original, restarted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{sample_flux, FluxSpec};
    use crate::rational::ratio;
    use crate::tracker::{evolve, Profile};

    fn burgers() -> GridFlux {
        sample_flux(&FluxSpec::burgers(), &int(1), (-3, 3)).unwrap()
    }

    fn two_shocks() -> (Timeline, WaveSystem) {
        let p = Profile::new(int(1), vec![(int(0), int(0)), (int(1), int(-1))]).unwrap();
        let tl = evolve(&p, &burgers()).unwrap();
        let ws = trace(&tl).unwrap();
        (tl, ws)
    }

    #[test]
    fn two_shock_potential() {
        let (tl, ws) = two_shocks();
        let k = int(1);
        assert_eq!(quadratic_potential(&ws, &Snapshot::open(0), &k), ratio(1, 2));
        assert_eq!(quadratic_potential(&ws, &Snapshot::open(1), &k), int(0));
        let rec = pair_weight(&ws, &Snapshot::open(0), 0, 1, &k).unwrap();
        assert_eq!(rec.class, PairClass::Generic);
        assert_eq!((rec.pi.clone(), rec.d.clone(), rec.q.clone()), (int(1), int(2), ratio(1, 2)));
        assert_eq!(delta_sigma(&tl.events[0], &tl.flux).unwrap(), int(1));
        assert_eq!(binary_closed_form(&tl.events[0]), Some(int(1)));
        assert_eq!(bianchini_cubic(&ws, &Snapshot::open(0)), int(1));
        assert_eq!(bianchini_cubic(&ws, &Snapshot::open(1)), int(0));

        let series = verify_run(&tl, &ws).unwrap();
        assert!(series.passed());
        assert_eq!(series.q0, ratio(1, 2));
        assert_eq!(series.upsilon0, Upsilon { paper: ratio(9, 2), strict: int(5) });
        assert_eq!(series.slabs[1].upsilon, Upsilon { paper: int(4), strict: int(4) });
        let same = &series.events[0].verdicts[1];
        assert_eq!((same.name, same.lhs.clone(), same.rhs.clone()), ("same_sign_interaction", ratio(1, 2), ratio(1, 2)));
        assert_eq!(series.paper_upsilon_counterexamples(), vec![0]);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let (tl, _) = two_shocks();
        assert!(delta_sigma_cancellation(&tl.events[0], &tl.flux).is_err());
        assert_eq!(delta_sigma_same_sign(&tl.events[0], &tl.flux).unwrap(), int(1));
    }

    #[test]
    fn affine_and_convex_cases_vanish() {
        let affine = sample_flux(&FluxSpec::Polynomial(vec![int(1), int(2)]), &int(1), (-3, 3)).unwrap();
        assert_eq!(delta_sigma_triple(&affine, &int(-2), &int(0), &int(3)).unwrap(), int(0));
        let f = burgers();
        assert_eq!(delta_sigma_triple(&f, &int(-2), &int(2), &int(0)).unwrap(), int(0));
        assert_eq!(delta_sigma_triple(&f, &int(0), &int(2), &int(0)).unwrap(), int(0));
    }

    #[test]
    fn cubic_cancellation_is_positive() {
        let f = sample_flux(&FluxSpec::Polynomial(vec![int(0), int(0), int(0), int(1)]), &ratio(1, 4), (-4, 4)).unwrap();
        let d = delta_sigma_triple(&f, &int(-1), &ratio(1, 2), &ratio(1, 4)).unwrap();
        assert!(d.is_positive());
    }

    #[test]
    fn noncontact_interval() {
        let f = burgers();
        assert_eq!(maximal_noncontact_interval(&f, &int(-2), &int(0), &int(2)).unwrap(), int(0));
        let cubic = sample_flux(&FluxSpec::Polynomial(vec![int(0), int(0), int(0), int(1)]), &ratio(1, 4), (-4, 4)).unwrap();
        assert_eq!(maximal_noncontact_interval(&cubic, &int(-1), &int(0), &ratio(1, 2)).unwrap(), ratio(1, 2));
        assert!(maximal_noncontact_interval(&f, &int(0), &int(0), &int(1)).is_err());
    }

    #[test]
    fn single_front_has_no_potential() {
        let p = Profile::new(int(1), vec![(int(0), int(-1))]).unwrap();
        let tl = evolve(&p, &burgers()).unwrap();
        let ws = trace(&tl).unwrap();
        let series = verify_run(&tl, &ws).unwrap();
        assert!(series.passed());
        assert!(series.slabs.iter().all(|s| s.q.is_zero()));
    }
}
