//! Wave tracing over a completed [`Timeline`].
//!
//! The wave set is `(0, TV(ū)]`, cut into atoms of length `ε`. Atom `n` holds
//! the waves `(nε, (n+1)ε]`. Waves are grouped into cells: contiguous atom
//! ranges with one sign whose states form a contiguous run of state atoms and
//! which share one front in every slab. Cells are split only when an event
//! separates them (partial cancellation or an outgoing fan), so the final
//! cell list is the coarsest partition on which positions, signs and
//! cancellation times are all constant.
//!
//! The state of a wave is `u_left + ∫₀^w S`, where `u_left` is the state left
//! of every jump, so that states are actual values of the solution.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::envelope::GridFlux;
use crate::rational::{int, Rational};
use crate::riemann::Front;
use crate::tracker::{initial_fronts, FrontId, Profile, Timeline, TrackerError};

#[derive(Debug, Error)]
pub enum TracingError {
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error("wave tracing inconsistent at event {event}: {reason}")]
    Inconsistent { event: usize, reason: String },
    #[error("wave {0} is outside the wave set")]
    OutsideWaveSet(Rational),
    #[error("wave {w} is canceled at time {t}")]
    Canceled { w: Rational, t: Rational },
}

/// Waves `(lo·ε, hi·ε]` with states in the state atoms `state_lo..state_hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveCell {
    pub lo: i64,
    pub hi: i64,
    pub sign: i8,
    pub state_lo: i64,
    pub state_hi: i64,
    /// Front carrying the cell in each slab; `None` once canceled.
    pub fronts: Vec<Option<FrontId>>,
    pub canceled_at: Option<usize>,
    /// Events the cell entered and survived, increasing.
    pub survived: Vec<usize>,
}

impl WaveCell {
    pub fn atoms(&self) -> i64 {
        self.hi - self.lo
    }

    /// State atom of wave atom `n`; `u` runs forward for positive cells and
    /// backward for negative ones.
    pub fn state_atom(&self, n: i64) -> i64 {
        debug_assert!(n >= self.lo && n < self.hi);
        if self.sign > 0 {
            self.state_lo + (n - self.lo)
        } else {
            self.state_hi - 1 - (n - self.lo)
        }
    }

    pub fn front_in(&self, slab: usize) -> Option<FrontId> {
        self.fronts.get(slab).copied().flatten()
    }

    pub fn is_live(&self, slab: usize) -> bool {
        self.front_in(slab).is_some()
    }

    /// Splits at state-grid point `s` (strictly inside the state range);
    /// returns the parts in wave order.
    fn split_at_state(self, s: i64) -> (WaveCell, WaveCell) {
        debug_assert!(s > self.state_lo && s < self.state_hi);
        let mut first = self.clone();
        let mut second = self;
        if first.sign > 0 {
            first.hi = first.lo + (s - first.state_lo);
            first.state_hi = s;
            second.lo = first.hi;
            second.state_lo = s;
        } else {
            first.hi = first.lo + (first.state_hi - s);
            first.state_lo = s;
            second.lo = first.hi;
            second.state_hi = s;
        }
        (first, second)
    }
}

/// Cut `cells` so that no cell straddles a state-grid point in `cuts`.
fn split_cells(cells: Vec<WaveCell>, cuts: &[i64]) -> Vec<WaveCell> {
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut inner: Vec<i64> = cuts
            .iter()
            .copied()
            .filter(|&s| s > cell.state_lo && s < cell.state_hi)
            .collect();
        inner.sort_unstable();
        inner.dedup();
        // The part still to be cut is always the last one in wave order: the
        // high states for a positive cell, the low states for a negative one.
        if cell.sign < 0 {
            inner.reverse();
        }
        let mut rest = cell;
        for s in inner {
            let (a, b) = rest.split_at_state(s);
            out.push(a);
            rest = b;
        }
        out.push(rest);
    }
    out
}

/// How wave positions are grouped when evaluating a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub slab: usize,
    /// `None`: a time strictly inside the slab, where distinct fronts sit at
    /// distinct positions. `Some(t)`: exactly `t`, which may be an event time;
    /// fronts sharing a position at `t` (fans) form one group.
    pub exact_time: Option<Rational>,
}

impl Snapshot {
    pub fn open(slab: usize) -> Self {
        Snapshot {
            slab,
            exact_time: None,
        }
    }
}

/// Result of a future-interaction query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interaction {
    /// Already at the same position at the query time.
    SamePosition,
    Meet { t: Rational, x: Rational, event: usize },
    Never,
}

/// A same-sign set of live cells, contiguous in wave order at one time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveInterval {
    pub cells: Vec<usize>,
    pub sign: i8,
}

impl WaveInterval {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct WaveSystem {
    pub flux: GridFlux,
    pub epsilon: Rational,
    pub total_atoms: i64,
    pub left_state: Rational,
    pub cells: Vec<WaveCell>,
    pub fronts: Vec<Front>,
    pub event_times: Vec<Rational>,
    pub event_positions: Vec<Rational>,
    /// Atoms surviving each event (`|c - a| / ε`).
    pub event_survivors: Vec<i64>,
    pub slab_count: usize,
}

/// Time-zero layer: one cell per initial front.
pub fn build_initial_waves(p: &Profile, f: &GridFlux) -> Result<WaveSystem, TracingError> {
    let fronts = initial_fronts(p, f)?;
    let mut cells = Vec::with_capacity(fronts.len());
    let mut cursor = 0;
    for (id, fr) in fronts.iter().enumerate() {
        let (lo, hi) = fr.state_bounds();
        let (s_lo, s_hi) = (f.index_of(lo).map_err(TrackerError::from)?, f.index_of(hi).map_err(TrackerError::from)?);
        cells.push(WaveCell {
            lo: cursor,
            hi: cursor + (s_hi - s_lo),
            sign: fr.sign(),
            state_lo: s_lo,
            state_hi: s_hi,
            fronts: vec![Some(id)],
            canceled_at: None,
            survived: Vec::new(),
        });
        cursor += s_hi - s_lo;
    }
    Ok(WaveSystem {
        flux: f.clone(),
        epsilon: f.epsilon().clone(),
        total_atoms: cursor,
        left_state: p.constant_state.clone(),
        cells,
        fronts,
        event_times: Vec::new(),
        event_positions: Vec::new(),
        event_survivors: Vec::new(),
        slab_count: 1,
    })
}

fn state_interval(f: &GridFlux, a: &Rational, b: &Rational) -> (i64, i64) {
    let (i, j) = (f.index_of(a).unwrap(), f.index_of(b).unwrap());
    (i.min(j), i.max(j))
}

/// Extends a time-zero layer through every event of `tl`.
pub fn advance_tracing(mut ws: WaveSystem, tl: &Timeline) -> Result<WaveSystem, TracingError> {
    if ws.slab_count != 1 || ws.fronts.len() > tl.fronts.len() || ws.fronts[..] != tl.fronts[..ws.fronts.len()] {
        return Err(TracingError::Inconsistent {
            event: 0,
            reason: "wave system does not match the timeline's initial fronts".into(),
        });
    }
    ws.fronts = tl.fronts.clone();
    let f = &tl.flux;
    for (e, event) in tl.events.iter().enumerate() {
        let fail = |reason: String| TracingError::Inconsistent { event: e, reason };
        for cell in &mut ws.cells {
            let carried = cell.fronts[e];
            cell.fronts.push(carried);
        }
        let incoming: BTreeMap<FrontId, usize> =
            event.incoming_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let start = ws.cells.iter().position(|c| c.fronts[e].is_some_and(|id| incoming.contains_key(&id)));
        let Some(start) = start else {
            return Err(fail("no cell carried by the incoming fronts".into()));
        };
        let mut end = start;
        while end < ws.cells.len()
            && (ws.cells[end].fronts[e].is_none()
                || ws.cells[end].fronts[e].is_some_and(|id| incoming.contains_key(&id)))
        {
            end += 1;
        }
        let mut involved: Vec<WaveCell> = ws.cells.drain(start..end).collect();
        let mut dormant: Vec<WaveCell> = Vec::new();
        involved.retain(|c| {
            if c.fronts[e].is_none() {
                dormant.push(c.clone());
                false
            } else {
                true
            }
        });
        if ws.cells.iter().any(|c| c.fronts[e].is_some_and(|id| incoming.contains_key(&id))) {
            return Err(fail("cells of the incoming fronts are not contiguous in wave order".into()));
        }

        // Left-to-right survival: the jump accumulated so far meets the next front.
        let a = &event.states[0];
        let mut acc_b = a.clone();
        let mut acc: Vec<WaveCell> = Vec::new();
        let mut canceled: Vec<WaveCell> = Vec::new();
        for (i, fr) in event.incoming.iter().enumerate() {
            let mine: Vec<WaveCell> = involved
                .iter()
                .filter(|c| c.fronts[e] == Some(event.incoming_ids[i]))
                .cloned()
                .collect();
            let next = &fr.right_state;
            let same_sign = (&acc_b > a && next > &acc_b) || (&acc_b < a && next < &acc_b);
            if &acc_b == a || same_sign {
                acc.extend(mine);
            } else {
                let (lo, hi) = state_interval(f, a, next);
                let pool = split_cells(acc.drain(..).chain(mine).collect(), &[lo, hi]);
                for cell in pool {
                    if cell.state_lo >= lo && cell.state_hi <= hi && lo < hi {
                        acc.push(cell);
                    } else {
                        canceled.push(cell);
                    }
                }
            }
            acc_b = next.clone();
        }
        let c = &acc_b;
        let (lo, hi) = if a == c { (0, 0) } else { state_interval(f, a, c) };
        let covered: i64 = acc.iter().map(|c| c.atoms()).sum();
        if covered != hi - lo {
            return Err(fail(format!("survivors cover {covered} atoms, expected {}", hi - lo)));
        }

        let mut cuts: Vec<i64> = Vec::new();
        let mut ranges: Vec<(i64, i64, FrontId)> = Vec::new();
        for (fr, &id) in event.outgoing.iter().zip(&event.outgoing_ids) {
            let (s, t) = state_interval(f, &fr.left_state, &fr.right_state);
            cuts.extend([s, t]);
            ranges.push((s, t, id));
        }
        let mut survivors = split_cells(acc, &cuts);
        for cell in &mut survivors {
            let Some(&(_, _, id)) = ranges
                .iter()
                .find(|(s, t, _)| cell.state_lo >= *s && cell.state_hi <= *t)
            else {
                return Err(fail(format!(
                    "surviving states [{}, {}) match no outgoing front",
                    cell.state_lo, cell.state_hi
                )));
            };
            cell.fronts[e + 1] = Some(id);
            cell.survived.push(e);
        }
        for cell in &mut canceled {
            cell.fronts[e + 1] = None;
            cell.canceled_at = Some(e);
        }
        let mut block: Vec<WaveCell> = survivors.into_iter().chain(canceled).chain(dormant).collect();
        block.sort_by_key(|c| c.lo);
        ws.cells.splice(start..start, block);
        ws.event_times.push(event.t.clone());
        ws.event_positions.push(event.x.clone());
        ws.event_survivors.push(hi - lo);
        ws.slab_count += 1;
    }
    Ok(ws)
}

/// Full tracing of a timeline.
pub fn trace(tl: &Timeline) -> Result<WaveSystem, TracingError> {
    advance_tracing(build_initial_waves(&tl.initial_profile, &tl.flux)?, tl)
}

impl WaveSystem {
    pub fn total_variation(&self) -> Rational {
        int(self.total_atoms) * &self.epsilon
    }

    /// Snapshot for the right-continuous value at time `t`.
    pub fn snapshot_at(&self, t: &Rational) -> Snapshot {
        Snapshot {
            slab: self.event_times.iter().take_while(|e| *e <= t).count(),
            exact_time: Some(t.clone()),
        }
    }

    pub fn live_cells(&self, slab: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].is_live(slab)).collect()
    }

    /// Index of the cell holding the waves of atom `n`.
    pub fn cell_of_atom(&self, n: i64) -> usize {
        self.cells.partition_point(|c| c.hi <= n)
    }

    /// Atom containing wave coordinate `w ∈ (0, TV]`.
    pub fn atom_of(&self, w: &Rational) -> Result<i64, TracingError> {
        let q = (w / &self.epsilon).ceil().to_integer();
        let n: i64 = num_traits::ToPrimitive::to_i64(&q).unwrap_or(-1) - 1;
        if w <= &Rational::zero() || n >= self.total_atoms || n < 0 {
            return Err(TracingError::OutsideWaveSet(w.clone()));
        }
        Ok(n)
    }

    /// Time used to place fronts for a snapshot.
    pub fn representative_time(&self, snap: &Snapshot) -> Rational {
        if let Some(t) = &snap.exact_time {
            return t.clone();
        }
        let lo = if snap.slab == 0 {
            Rational::zero()
        } else {
            self.event_times[snap.slab - 1].clone()
        };
        match self.event_times.get(snap.slab) {
            Some(hi) => (&lo + hi) / int(2),
            None => lo + int(1),
        }
    }

    pub fn cell_position(&self, cell: usize, slab: usize, t: &Rational) -> Option<Rational> {
        self.cells[cell].front_in(slab).map(|id| self.fronts[id].position_at(t))
    }

    /// Live cells in wave order, grouped by common position.
    pub fn position_groups(&self, snap: &Snapshot) -> Vec<Vec<usize>> {
        let live = self.live_cells(snap.slab);
        let key = |c: usize| -> Rational {
            let id = self.cells[c].front_in(snap.slab).unwrap();
            match &snap.exact_time {
                Some(t) => self.fronts[id].position_at(t),
                None => int(id as i64),
            }
        };
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut last: Option<Rational> = None;
        for c in live {
            let k = key(c);
            if last.as_ref() == Some(&k) {
                groups.last_mut().unwrap().push(c);
            } else {
                groups.push(vec![c]);
                last = Some(k);
            }
        }
        groups
    }

    /// Speed of the front carrying the wave `w` right after time `t`.
    pub fn sigma(&self, t: &Rational, w: &Rational) -> Result<Rational, TracingError> {
        let n = self.atom_of(w)?;
        let slab = self.snapshot_at(t).slab;
        let cell = &self.cells[self.cell_of_atom(n)];
        match cell.front_in(slab) {
            Some(id) => Ok(self.fronts[id].speed.clone()),
            None => Err(TracingError::Canceled {
                w: w.clone(),
                t: t.clone(),
            }),
        }
    }

    /// Live waves at `(t, x)` after the events at time `t`.
    pub fn waves_at(&self, t: &Rational, x: &Rational) -> WaveInterval {
        let slab = self.snapshot_at(t).slab;
        let cells: Vec<usize> = self
            .live_cells(slab)
            .into_iter()
            .filter(|&c| self.cell_position(c, slab, t).as_ref() == Some(x))
            .collect();
        let sign = cells.first().map(|&c| self.cells[c].sign).unwrap_or(0);
        WaveInterval { cells, sign }
    }

    /// First event at or after `from` that both cells enter and survive.
    pub fn first_common_survival(&self, c: usize, d: usize, from: usize) -> Option<usize> {
        let (x, y) = (&self.cells[c].survived, &self.cells[d].survived);
        let (mut i, mut j) = (x.partition_point(|&e| e < from), y.partition_point(|&e| e < from));
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(x[i]),
            }
        }
        None
    }

    /// Cell-level interaction query; cells must be live in the snapshot.
    pub fn cell_interaction(&self, snap: &Snapshot, c: usize, d: usize) -> Interaction {
        let t = self.representative_time(snap);
        if self.cell_position(c, snap.slab, &t) == self.cell_position(d, snap.slab, &t) {
            return Interaction::SamePosition;
        }
        match self.first_common_survival(c, d, snap.slab) {
            Some(e) => Interaction::Meet {
                t: self.event_times[e].clone(),
                x: self.event_positions[e].clone(),
                event: e,
            },
            None => Interaction::Never,
        }
    }

    /// `T^int` and `X^int` for two waves live after time `t̄`.
    pub fn interaction_query(
        &self,
        t_bar: &Rational,
        w: &Rational,
        w2: &Rational,
    ) -> Result<Interaction, TracingError> {
        let snap = self.snapshot_at(t_bar);
        let mut cells = Vec::new();
        for v in [w, w2] {
            let c = self.cell_of_atom(self.atom_of(v)?);
            if !self.cells[c].is_live(snap.slab) {
                return Err(TracingError::Canceled {
                    w: v.clone(),
                    t: t_bar.clone(),
                });
            }
            cells.push(c);
        }
        Ok(self.cell_interaction(&snap, cells[0], cells[1]))
    }

    /// State atoms `lo..hi` covered by a set of cells, if they tile an interval.
    pub fn state_image(&self, cells: &[usize]) -> Option<(i64, i64)> {
        let mut ranges: Vec<(i64, i64)> = cells
            .iter()
            .map(|&c| (self.cells[c].state_lo, self.cells[c].state_hi))
            .collect();
        ranges.sort();
        let first = *ranges.first()?;
        ranges
            .iter()
            .skip(1)
            .try_fold(first, |(lo, hi), &(a, b)| (a == hi).then_some((lo, b)))
    }

    /// Checks atom-level state consistency, sign constancy and monotone
    /// positions for every slab, plus cancellation mass accounting.
    pub fn check_invariants(&self, tl: &Timeline) -> Result<(), String> {
        let f = &self.flux;
        let covered: i64 = self.cells.iter().map(|c| c.atoms()).sum();
        if covered != self.total_atoms || self.cells.windows(2).any(|w| w[0].hi != w[1].lo) {
            return Err("cells do not partition the wave set".into());
        }
        for cell in &self.cells {
            if let Some(e) = cell.canceled_at {
                if cell.fronts[e + 1..].iter().any(|f| f.is_some()) {
                    return Err(format!("cell at atoms {}..{} reappears after cancellation", cell.lo, cell.hi));
                }
            }
        }
        // A zero-length slab has no interior time; its fronts still sit on
        // top of each other, so it is covered by the exact-time snapshots.
        let mut snapshots: Vec<Snapshot> = (0..self.slab_count)
            .filter(|&s| !tl.slabs[s].is_degenerate())
            .map(Snapshot::open)
            .collect();
        snapshots.push(self.snapshot_at(&Rational::zero()));
        for t in &self.event_times {
            snapshots.push(self.snapshot_at(t));
        }
        for snap in &snapshots {
            let t = self.representative_time(snap);
            let profile = tl.profile_of_slab(snap.slab, &t);
            for group in self.position_groups(snap) {
                let sign = self.cells[group[0]].sign;
                if group.iter().any(|&c| self.cells[c].sign != sign) {
                    return Err(format!("mixed signs at one position in slab {}", snap.slab));
                }
                let x = self.cell_position(group[0], snap.slab, &t).unwrap();
                let (ul, ur) = (profile.left_limit(&x), profile.value_at(&x));
                let expected = state_interval(f, ul, ur);
                if ul == ur || self.state_image(&group) != Some(expected) {
                    return Err(format!(
                        "slab {} at x = {x}: wave states do not match the jump ({ul}, {ur})",
                        snap.slab
                    ));
                }
            }
        }
        for s in 0..self.slab_count {
            let lo = if s == 0 { Rational::zero() } else { self.event_times[s - 1].clone() };
            let mut times = vec![lo.clone(), self.representative_time(&Snapshot::open(s))];
            if let Some(hi) = self.event_times.get(s) {
                times.push(hi.clone());
            }
            let live = self.live_cells(s);
            for t in &times {
                let xs: Vec<Rational> = live.iter().map(|&c| self.cell_position(c, s, t).unwrap()).collect();
                if xs.windows(2).any(|w| w[0] > w[1]) {
                    return Err(format!("positions decrease in wave order in slab {s} at t = {t}"));
                }
            }
        }
        for e in 0..self.event_times.len() {
            let lost: i64 = self
                .cells
                .iter()
                .filter(|c| c.canceled_at == Some(e))
                .map(|c| c.atoms())
                .sum();
            let drop = tl.slab_total_variation(e) - tl.slab_total_variation(e + 1);
            if int(lost) * &self.epsilon != drop {
                return Err(format!("event {e}: canceled mass does not match the variation drop {drop}"));
            }
        }
        Ok(())
    }

    /// Per-slab table of live cells, for debugging and golden tests.
    pub fn debug_rows(&self, slab: usize) -> Vec<CellRow> {
        let start = if slab == 0 { Rational::zero() } else { self.event_times[slab - 1].clone() };
        self.live_cells(slab)
            .into_iter()
            .map(|c| {
                let cell = &self.cells[c];
                let id = cell.front_in(slab).unwrap();
                let fr = &self.fronts[id];
                CellRow {
                    w_lo: int(cell.lo) * &self.epsilon,
                    w_hi: int(cell.hi) * &self.epsilon,
                    sign: cell.sign,
                    u_lo: int(cell.state_lo) * &self.epsilon,
                    u_hi: int(cell.state_hi) * &self.epsilon,
                    front: id,
                    position: fr.position_at(&start),
                    speed: fr.speed.clone(),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellRow {
    pub w_lo: Rational,
    pub w_hi: Rational,
    pub sign: i8,
    pub u_lo: Rational,
    pub u_hi: Rational,
    pub front: FrontId,
    pub position: Rational,
    pub speed: Rational,
}
