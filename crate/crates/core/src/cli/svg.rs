//! Two-panel SVG of a sweep: energy and asphericity against `log₁₀ γ`.

use std::fmt::Write;

use crate::optimize::SweepRecord;

const WIDTH: f64 = 640.0;
const PANEL: f64 = 260.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const GAP: f64 = 60.0;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !(lo.is_finite() && hi.is_finite()) {
            return Axis { lo: 0.0, hi: 1.0 };
        }
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
        Axis { lo: lo - pad, hi: hi + pad }
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }
}

fn panel(svg: &mut String, top: f64, title: &str, xs: &[f64], ys: &[f64], xa: &Axis) {
    let ya = Axis::fit(ys.iter().copied());
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (top + PANEL, top);
    let _ = writeln!(
        svg,
        r##"<rect x="{x0}" y="{y1}" width="{}" height="{PANEL}" fill="none" stroke="#444"/>"##,
        x1 - x0
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{title}</text>"#, (x0 + x1) / 2.0, top - 8.0);
    let (dlo, dhi) = (xa.lo.ceil() as i32, xa.hi.floor() as i32);
    for k in dlo..=dhi {
        let x = xa.map(k as f64, x0, x1);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{y0}" x2="{x:.1}" y2="{}" stroke="#444"/><text x="{x:.1}" y="{}" text-anchor="middle" font-size="12">1e{k}</text>"##,
            y0 + 5.0,
            y0 + 20.0
        );
    }
    for k in 0..=4 {
        let v = ya.lo + (ya.hi - ya.lo) * k as f64 / 4.0;
        let y = ya.map(v, y0, y1);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="#444"/><text x="{}" y="{:.1}" text-anchor="end" font-size="12">{v:.3e}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| format!("{:.2},{:.2}", xa.map(*x, x0, x1), ya.map(*y, y0, y1)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#1f5fa8" stroke-width="2"/>"##,
        points.join(" ")
    );
    for p in &points {
        let (x, y) = p.split_once(',').expect("formatted as x,y");
        let _ = writeln!(svg, r##"<circle cx="{x}" cy="{y}" r="3" fill="#1f5fa8"/>"##);
    }
}

/// Energy and asphericity panels over a shared logarithmic `γ` axis.
pub fn sweep_svg(records: &[SweepRecord]) -> String {
    let xs: Vec<f64> = records.iter().map(|r| r.gamma.log10()).collect();
    let xa = Axis::fit(xs.iter().copied());
    let height = TOP + 2.0 * PANEL + GAP + 40.0;
    let mut svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" font-family="sans-serif">"#
    );
    svg.push('\n');
    let energy: Vec<f64> = records.iter().map(|r| r.energy).collect();
    let asph: Vec<f64> = records.iter().map(|r| r.asphericity).collect();
    panel(&mut svg, TOP, "energy e(γ)", &xs, &energy, &xa);
    panel(&mut svg, TOP + PANEL + GAP, "asphericity", &xs, &asph, &xa);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">γ</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        height - 5.0
    );
    svg.push_str("</svg>\n");
    svg
}
