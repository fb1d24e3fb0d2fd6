//! Deterministic SVG diagrams: front trajectories in the `(x, t)` plane and
//! step plots of `𝔔`, `Υ_paper` and `Υ_strict`.
//!
//! Coordinates are printed with three decimals inside a fixed viewBox, and
//! elements are emitted in front/slab order, so equal input gives equal bytes.

use std::fmt::Write;

use wavetrace_core::potential::PotentialSeries;
use wavetrace_core::rational::{int, to_f64, Rational};
use wavetrace_core::tracker::Timeline;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        let pad = |a: f64, b: f64| if b > a { (a, b) } else { (a - 1.0, a + 1.0) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#
    )
    .unwrap();
    writeln!(out, "<title>{title}</title>").unwrap();
    writeln!(out, r##"<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>"##).unwrap();
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, b, t) = (MARGIN, W - MARGIN, H - MARGIN, MARGIN);
    writeln!(out, r##"<g id="axes" stroke="#000000" stroke-width="1">"##).unwrap();
    writeln!(out, r#"<line x1="{l:.3}" y1="{b:.3}" x2="{r:.3}" y2="{b:.3}"/>"#).unwrap();
    writeln!(out, r#"<line x1="{l:.3}" y1="{b:.3}" x2="{l:.3}" y2="{t:.3}"/>"#).unwrap();
    writeln!(out, "</g>").unwrap();
    writeln!(
        out,
        r#"<g id="labels" font-family="monospace" font-size="11"><text x="{:.3}" y="{:.3}">{xlabel} [{:.3}, {:.3}]</text><text x="4" y="{:.3}">{ylabel} [{:.3}, {:.3}]</text></g>"#,
        W / 2.0 - 60.0,
        H - 10.0,
        f.x0,
        f.x1,
        MARGIN - 12.0,
        f.y0,
        f.y1
    )
    .unwrap();
}

/// Time at which the diagrams stop: a quarter past the last event.
fn horizon(tl: &Timeline) -> Rational {
    match tl.events.last() {
        Some(e) if e.t > int(0) => &e.t * Rational::new(5.into(), 4.into()),
        _ => int(1),
    }
}

/// Every front as a segment from its birth to the event that absorbs it.
pub fn fronts_svg(tl: &Timeline) -> String {
    let t_end = horizon(tl);
    let mut death: Vec<Option<Rational>> = vec![None; tl.fronts.len()];
    for e in &tl.events {
        for &id in &e.incoming_ids {
            death[id] = Some(e.t.clone());
        }
    }
    let segments: Vec<(f64, f64, f64, f64, i8)> = tl
        .fronts
        .iter()
        .zip(&death)
        .map(|(fr, d)| {
            let end = d.clone().unwrap_or_else(|| t_end.clone());
            (
                to_f64(&fr.birth_position),
                to_f64(&fr.birth_time),
                to_f64(&fr.position_at(&end)),
                to_f64(&end),
                fr.sign(),
            )
        })
        .collect();
    let xs = segments.iter().flat_map(|s| [s.0, s.2]);
    let (xmin, xmax) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (xmin, xmax) = if segments.is_empty() { (0.0, 1.0) } else { (xmin, xmax) };
    let frame = Frame::new(xmin, xmax, 0.0, to_f64(&t_end));
    let mut out = String::new();
    header(&mut out, "wavefronts");
    axes(&mut out, &frame, "x", "t");
    writeln!(out, r#"<g id="fronts" stroke-width="1.5">"#).unwrap();
    for (id, (xa, ta, xb, tb, sign)) in segments.iter().enumerate() {
        let color = if *sign > 0 { "#1f77b4" } else { "#d62728" };
        writeln!(
            out,
            r#"<line id="front-{id}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}"/>"#,
            frame.px(*xa),
            frame.py(*ta),
            frame.px(*xb),
            frame.py(*tb)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r##"<g id="events" fill="#000000">"##).unwrap();
    for (i, e) in tl.events.iter().enumerate() {
        writeln!(
            out,
            r#"<circle id="event-{i}" cx="{:.3}" cy="{:.3}" r="2.5"/>"#,
            frame.px(to_f64(&e.x)),
            frame.py(to_f64(&e.t))
        )
        .unwrap();
    }
    writeln!(out, "</g>\n</svg>").unwrap();
    out
}

/// Step plot of `𝔔`, `Υ_paper` and `Υ_strict` over the slabs.
pub fn potential_svg(series: &PotentialSeries) -> String {
    let last_t = series
        .slabs
        .iter()
        .filter_map(|s| s.t_hi.as_ref())
        .max()
        .cloned()
        .unwrap_or_else(|| int(0));
    let t_end = if last_t > int(0) {
        &last_t * Rational::new(5.into(), 4.into())
    } else {
        int(1)
    };
    let curves: [(&str, &str, Vec<f64>); 3] = [
        ("Q", "#2ca02c", series.slabs.iter().map(|s| to_f64(&s.q)).collect()),
        ("upsilon-paper", "#ff7f0e", series.slabs.iter().map(|s| to_f64(&s.upsilon.paper)).collect()),
        ("upsilon-strict", "#9467bd", series.slabs.iter().map(|s| to_f64(&s.upsilon.strict)).collect()),
    ];
    let ymax = curves.iter().flat_map(|c| c.2.iter().copied()).fold(0.0, f64::max);
    let frame = Frame::new(0.0, to_f64(&t_end), 0.0, ymax);
    let mut out = String::new();
    header(&mut out, "interaction potential");
    axes(&mut out, &frame, "t", "value");
    writeln!(out, r#"<g id="curves" fill="none" stroke-width="1.5">"#).unwrap();
    for (name, color, ys) in &curves {
        let mut d = String::new();
        for (s, y) in series.slabs.iter().zip(ys) {
            let lo = to_f64(&s.t_lo);
            let hi = to_f64(s.t_hi.as_ref().unwrap_or(&t_end));
            let cmd = if d.is_empty() { 'M' } else { 'L' };
            write!(
                d,
                "{cmd}{:.3},{:.3} L{:.3},{:.3} ",
                frame.px(lo),
                frame.py(*y),
                frame.px(hi),
                frame.py(*y)
            )
            .unwrap();
        }
        writeln!(out, r#"<path id="{name}" stroke="{color}" d="{}"/>"#, d.trim_end()).unwrap();
    }
    writeln!(out, "</g>\n</svg>").unwrap();
    out
}
