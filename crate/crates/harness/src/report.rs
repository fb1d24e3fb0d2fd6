//! Serializable run reports, CSV tables and re-verification of stored reports.

use serde::{Deserialize, Serialize};
use wavetrace_core::potential::{EventRecord, PotentialSeries, SlabRecord, Upsilon, Verdict};
use wavetrace_core::rational::{self, Rational};

use crate::config::{Exact, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub name: String,
    pub lhs: Exact,
    pub rhs: Exact,
    pub holds: bool,
    pub informational: bool,
}

impl From<&Verdict> for VerdictRow {
    fn from(v: &Verdict) -> Self {
        VerdictRow {
            name: v.name.to_string(),
            lhs: v.lhs.clone().into(),
            rhs: v.rhs.clone().into(),
            holds: v.holds,
            informational: v.informational,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpsilonRow {
    pub paper: Exact,
    pub strict: Exact,
}

impl From<&Upsilon> for UpsilonRow {
    fn from(u: &Upsilon) -> Self {
        UpsilonRow {
            paper: u.paper.clone().into(),
            strict: u.strict.clone().into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRow {
    pub index: usize,
    pub t: Exact,
    pub x: Exact,
    pub kind: String,
    pub a: Exact,
    pub b: Exact,
    pub c: Exact,
    pub incoming: usize,
    pub delta_sigma: Exact,
    /// `2(σ′ − σ″)s′s″/(s′ + s″)`, binary same-sign events only.
    pub closed_form: Option<Exact>,
    #[serde(rename = "Q_minus")]
    pub q_minus: Exact,
    #[serde(rename = "Q_plus")]
    pub q_plus: Exact,
    #[serde(rename = "TV_minus")]
    pub tv_minus: Exact,
    #[serde(rename = "TV_plus")]
    pub tv_plus: Exact,
    pub upsilon_minus: UpsilonRow,
    pub upsilon_plus: UpsilonRow,
    pub verdicts: Vec<VerdictRow>,
}

impl From<&EventRecord> for EventRow {
    fn from(e: &EventRecord) -> Self {
        let (a, b, c) = &e.jump_triple;
        EventRow {
            index: e.index,
            t: e.t.clone().into(),
            x: e.x.clone().into(),
            kind: e.kind.as_str().to_string(),
            a: a.clone().into(),
            b: b.clone().into(),
            c: c.clone().into(),
            incoming: e.incoming,
            delta_sigma: e.delta_sigma.clone().into(),
            closed_form: e.closed_form.clone().map(Exact),
            q_minus: e.q_minus.clone().into(),
            q_plus: e.q_plus.clone().into(),
            tv_minus: e.tv_minus.clone().into(),
            tv_plus: e.tv_plus.clone().into(),
            upsilon_minus: (&e.upsilon_minus).into(),
            upsilon_plus: (&e.upsilon_plus).into(),
            verdicts: e.verdicts.iter().map(VerdictRow::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabRow {
    pub t_lo: Exact,
    pub t_hi: Option<Exact>,
    #[serde(rename = "Q")]
    pub q: Exact,
    #[serde(rename = "TV")]
    pub tv: Exact,
    pub upsilon_paper: Exact,
    pub upsilon_strict: Exact,
    pub bianchini: Exact,
    pub verdicts: Vec<VerdictRow>,
}

impl From<&SlabRecord> for SlabRow {
    fn from(s: &SlabRecord) -> Self {
        SlabRow {
            t_lo: s.t_lo.clone().into(),
            t_hi: s.t_hi.clone().map(Exact),
            q: s.q.clone().into(),
            tv: s.tv.clone().into(),
            upsilon_paper: s.upsilon.paper.clone().into(),
            upsilon_strict: s.upsilon.strict.clone().into(),
            bianchini: s.bianchini.clone().into(),
            verdicts: s.verdicts.iter().map(VerdictRow::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRow {
    pub slab: usize,
    pub t: Exact,
    #[serde(rename = "Q")]
    pub q: Exact,
    #[serde(rename = "Q_restart")]
    pub q_restart: Exact,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub run_config: RunConfig,
    #[serde(rename = "K")]
    pub k: Exact,
    #[serde(rename = "TV0")]
    pub tv0: Exact,
    #[serde(rename = "Q0")]
    pub q0: Exact,
    pub upsilon0: UpsilonRow,
    pub passed: bool,
    /// Whether `Δσ ≤ Υ_paper(−) − Υ_paper(+)` holds at every event.
    pub upsilon_paper_holds: bool,
    pub paper_upsilon_counterexamples: Vec<usize>,
    pub verdicts: Vec<VerdictRow>,
    pub events: Vec<EventRow>,
    pub slabs: Vec<SlabRow>,
    pub restart_checks: Vec<RestartRow>,
}

impl Report {
    pub fn new(run_config: RunConfig, series: &PotentialSeries, restart_checks: Vec<RestartRow>) -> Self {
        let counterexamples = series.paper_upsilon_counterexamples();
        let passed = series.passed() && restart_checks.iter().all(|r| r.equal);
        Report {
            run_config,
            k: series.k.clone().into(),
            tv0: series.tv0.clone().into(),
            q0: series.q0.clone().into(),
            upsilon0: (&series.upsilon0).into(),
            passed,
            upsilon_paper_holds: counterexamples.is_empty(),
            paper_upsilon_counterexamples: counterexamples,
            verdicts: series.verdicts.iter().map(VerdictRow::from).collect(),
            events: series.events.iter().map(EventRow::from).collect(),
            slabs: series.slabs.iter().map(SlabRow::from).collect(),
            restart_checks,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Failed, non-informational verdicts with where they occurred.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |place: String, v: &VerdictRow| {
            if !v.holds && !v.informational {
                out.push(format!("{place}: {} ({} > {})", v.name, fmt(&v.lhs), fmt(&v.rhs)));
            }
        };
        for v in &self.verdicts {
            push("run".into(), v);
        }
        for (i, s) in self.slabs.iter().enumerate() {
            for v in &s.verdicts {
                push(format!("slab {i}"), v);
            }
        }
        for e in &self.events {
            for v in &e.verdicts {
                push(format!("event {} at (t, x) = ({}, {})", e.index, fmt(&e.t), fmt(&e.x)), v);
            }
        }
        for r in &self.restart_checks {
            if !r.equal {
                out.push(format!(
                    "restart at slab {}: Q = {} but restarted Q = {}",
                    r.slab,
                    fmt(&r.q),
                    fmt(&r.q_restart)
                ));
            }
        }
        out
    }
}

fn fmt(e: &Exact) -> String {
    rational::format(&e.0)
}

pub const EVENT_COLUMNS: [&str; 11] = [
    "t", "x", "kind", "a", "b", "c", "delta_sigma", "Q_minus", "Q_plus", "TV_minus", "TV_plus",
];
pub const POTENTIAL_COLUMNS: [&str; 7] = ["t_lo", "t_hi", "Q", "TV", "upsilon_paper", "upsilon_strict", "bianchini"];

/// Writes rows of exact cells; with `decimal`, every rational column gets a
/// companion `<name>_f64` column.
fn write_table(header: &[&str], rows: Vec<Vec<Option<&Exact>>>, text: &[Option<Vec<String>>], decimal: bool) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    if decimal {
        for (i, h) in header.iter().enumerate() {
            if text.get(i).is_none_or(|t| t.is_none()) {
                head.push(format!("{h}_f64"));
            }
        }
    }
    w.write_record(&head)?;
    for (r, row) in rows.iter().enumerate() {
        let mut rec: Vec<String> = Vec::new();
        for (i, cell) in row.iter().enumerate() {
            match text.get(i).and_then(|t| t.as_ref()) {
                Some(col) => rec.push(col[r].clone()),
                None => rec.push(cell.map(fmt).unwrap_or_default()),
            }
        }
        if decimal {
            for (i, cell) in row.iter().enumerate() {
                if text.get(i).is_none_or(|t| t.is_none()) {
                    rec.push(cell.map(|e| rational::to_f64(&e.0).to_string()).unwrap_or_default());
                }
            }
        }
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"))
}

pub fn events_csv(report: &Report, decimal: bool) -> csv::Result<String> {
    let rows = report
        .events
        .iter()
        .map(|e| {
            vec![
                Some(&e.t),
                Some(&e.x),
                None,
                Some(&e.a),
                Some(&e.b),
                Some(&e.c),
                Some(&e.delta_sigma),
                Some(&e.q_minus),
                Some(&e.q_plus),
                Some(&e.tv_minus),
                Some(&e.tv_plus),
            ]
        })
        .collect();
    let kinds = report.events.iter().map(|e| e.kind.clone()).collect();
    write_table(&EVENT_COLUMNS, rows, &[None, None, Some(kinds)], decimal)
}

pub fn potential_csv(report: &Report, decimal: bool) -> csv::Result<String> {
    let rows = report
        .slabs
        .iter()
        .map(|s| {
            vec![
                Some(&s.t_lo),
                s.t_hi.as_ref(),
                Some(&s.q),
                Some(&s.tv),
                Some(&s.upsilon_paper),
                Some(&s.upsilon_strict),
                Some(&s.bianchini),
            ]
        })
        .collect();
    write_table(&POTENTIAL_COLUMNS, rows, &[], decimal)
}

/// Re-checks a stored report: each verdict's `holds` flag against its sides,
/// the `Υ` columns against `K`, `TV0`, `TV` and `𝔔`, and the event verdict
/// sides against the event columns. Returns the list of problems found.
pub fn verify_report(report: &Report) -> Vec<String> {
    let mut problems = report.failures();
    let k = &report.k.0;
    let tv0 = &report.tv0.0;
    let two = Rational::from_integer(2.into());
    let upsilon = |q: &Rational, tv: &Rational| (k * tv0 * tv + q, k * tv0 * tv + &two * q);
    let mut check_flags = |place: String, vs: &[VerdictRow]| {
        for v in vs {
            if (v.lhs.0 <= v.rhs.0) != v.holds {
                problems.push(format!("{place}: stored flag of {} disagrees with its sides", v.name));
            }
        }
    };
    check_flags("run".into(), &report.verdicts);
    for (i, s) in report.slabs.iter().enumerate() {
        check_flags(format!("slab {i}"), &s.verdicts);
    }
    for e in &report.events {
        check_flags(format!("event {}", e.index), &e.verdicts);
    }
    for (i, s) in report.slabs.iter().enumerate() {
        let (p, st) = upsilon(&s.q.0, &s.tv.0);
        if p != s.upsilon_paper.0 || st != s.upsilon_strict.0 {
            problems.push(format!("slab {i}: upsilon columns are inconsistent with Q and TV"));
        }
        if let Some(v) = s.verdicts.iter().find(|v| v.name == "potential_uniform_bound") {
            if v.lhs != s.q || v.rhs.0 != k * &s.tv.0 * &s.tv.0 {
                problems.push(format!("slab {i}: uniform bound sides do not match Q and K·TV²"));
            }
        }
    }
    for e in &report.events {
        let drop = &e.q_minus.0 - &e.q_plus.0;
        for v in &e.verdicts {
            let expected = match v.name.as_str() {
                "potential_nonincreasing" => Some((e.q_plus.0.clone(), e.q_minus.0.clone())),
                "same_sign_interaction" => Some((&e.delta_sigma.0 / &two, drop.clone())),
                "upsilon_strict_decrease" => Some((
                    e.delta_sigma.0.clone(),
                    &e.upsilon_minus.strict.0 - &e.upsilon_plus.strict.0,
                )),
                "upsilon_paper_decrease" => Some((
                    e.delta_sigma.0.clone(),
                    &e.upsilon_minus.paper.0 - &e.upsilon_plus.paper.0,
                )),
                _ => None,
            };
            if let Some((lhs, rhs)) = expected {
                if lhs != v.lhs.0 || rhs != v.rhs.0 {
                    problems.push(format!("event {}: sides of {} do not match the event columns", e.index, v.name));
                }
            }
        }
        let (p, st) = upsilon(&e.q_minus.0, &e.tv_minus.0);
        if p != e.upsilon_minus.paper.0 || st != e.upsilon_minus.strict.0 {
            problems.push(format!("event {}: upsilon before the event is inconsistent", e.index));
        }
    }
    let counter: Vec<usize> = report
        .events
        .iter()
        .filter(|e| e.verdicts.iter().any(|v| v.name == "upsilon_paper_decrease" && !v.holds))
        .map(|e| e.index)
        .collect();
    if counter != report.paper_upsilon_counterexamples || report.upsilon_paper_holds != counter.is_empty() {
        problems.push("paper upsilon counterexample list is inconsistent".into());
    }
    let passed = report.failures().is_empty();
    if passed != report.passed {
        problems.push(format!("stored outcome passed = {} but verdicts say {passed}", report.passed));
    }
    problems
}
