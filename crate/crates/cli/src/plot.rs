//! Static SVG rendering of the CSV artifacts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{CliError, CliResult};
use crate::records::{MinimumRecord, Table};

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD_L: f64 = 64.0;
const PAD_R: f64 = 120.0;
const PAD_T: f64 = 36.0;
const PAD_B: f64 = 52.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

// viridis, five stops
const RAMP: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn ramp(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let pos = t * (RAMP.len() - 1) as f64;
    let i = (pos.floor() as usize).min(RAMP.len() - 2);
    let f = pos - i as f64;
    let (a, b) = (RAMP[i], RAMP[i + 1]);
    let mix = |x: f64, y: f64| (x + (y - x) * f).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Frame::at(x, y, PAD_L, PAD_T, W - PAD_L - PAD_R, H - PAD_T - PAD_B)
    }

    fn at(x: (f64, f64), y: (f64, f64), left: f64, top: f64, width: f64, height: f64) -> Self {
        let widen = |(a, b): (f64, f64)| {
            if a.is_finite() && b.is_finite() && b > a {
                (a, b)
            } else if a.is_finite() {
                (a - 0.5, a + 0.5)
            } else {
                (0.0, 1.0)
            }
        };
        let (x0, x1) = widen(x);
        let (y0, y1) = widen(y);
        Frame {
            x0,
            x1,
            y0,
            y1,
            left,
            top,
            width,
            height,
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y0) / (self.y1 - self.y0) * self.height
    }

    fn axes(&self, svg: &mut String, xlabel: &str, ylabel: &str, xfmt: impl Fn(f64) -> String) {
        let (l, t, w, h) = (self.left, self.top, self.width, self.height);
        let _ = writeln!(
            svg,
            r##"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="#333"/>"##
        );
        for k in 0..=4 {
            let fx = self.x0 + (self.x1 - self.x0) * k as f64 / 4.0;
            let fy = self.y0 + (self.y1 - self.y0) * k as f64 / 4.0;
            let (x, y) = (self.px(fx), self.py(fy));
            let _ = writeln!(
                svg,
                r##"<text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"##,
                t + h + 16.0,
                escape(&xfmt(fx))
            );
            let _ = writeln!(
                svg,
                r##"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"##,
                l - 6.0,
                y + 4.0,
                escape(&short(fy))
            );
        }
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"##,
            l + w / 2.0,
            t + h + 38.0,
            escape(xlabel)
        );
        let _ = writeln!(
            svg,
            r##"<text x="14" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"##,
            t + h / 2.0,
            t + h / 2.0,
            escape(ylabel)
        );
    }
}

fn short(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"##
    );
    let _ = writeln!(s, r##"<rect width="{W}" height="{H}" fill="white"/>"##);
    let _ = writeln!(
        s,
        r##"<text x="{}" y="22" font-size="15" text-anchor="middle">{}</text>"##,
        W / 2.0,
        escape(title)
    );
    s
}

fn close(mut s: String) -> String {
    s.push_str("</svg>\n");
    s
}

fn extent(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    vals.filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        })
}

type Series = BTreeMap<String, Vec<(f64, f64)>>;

fn polyline(svg: &mut String, f: &Frame, pts: &[(f64, f64)], color: &str) {
    let path: Vec<String> = pts
        .iter()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    if !path.is_empty() {
        let _ = writeln!(
            svg,
            r##"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"##,
            path.join(" ")
        );
    }
}

fn legend(svg: &mut String, names: impl Iterator<Item = String>) {
    for (i, name) in names.enumerate() {
        let y = PAD_T + 14.0 + 18.0 * i as f64;
        let x = W - PAD_R + 12.0;
        let c = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            r##"<rect x="{x}" y="{:.1}" width="12" height="4" fill="{c}"/><text x="{:.1}" y="{y:.1}" font-size="12">{}</text>"##,
            y - 6.0,
            x + 18.0,
            escape(&name)
        );
    }
}

fn line_chart(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &Series,
    log_x: bool,
    y_range: Option<(f64, f64)>,
) -> String {
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let mut svg = open(title);
    let xr = extent(series.values().flatten().map(|p| tx(p.0)));
    let yr = y_range.unwrap_or_else(|| extent(series.values().flatten().map(|p| p.1)));
    let f = Frame::new(xr, yr);
    f.axes(&mut svg, xlabel, ylabel, |v| {
        if log_x {
            short(10f64.powf(v))
        } else {
            short(v)
        }
    });
    for (i, pts) in series.values().enumerate() {
        let pts: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (tx(x), y)).collect();
        polyline(&mut svg, &f, &pts, PALETTE[i % PALETTE.len()]);
    }
    legend(&mut svg, series.keys().cloned());
    close(svg)
}

/// `(x, y, value)` samples that must form a complete rectangular grid.
fn heatmap(
    title: &str,
    labels: (&str, &str),
    pts: &[(f64, f64, f64)],
    markers: &[(f64, f64)],
) -> CliResult<String> {
    let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    for v in [&mut xs, &mut ys] {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Format("grid coordinates must be finite".into()));
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    if xs.len() < 2 || ys.len() < 2 || xs.len() * ys.len() != pts.len() {
        return Err(CliError::Format(format!(
            "{} points do not form a {}x{} grid",
            pts.len(),
            xs.len(),
            ys.len()
        )));
    }
    let (vmin, vmax) = extent(pts.iter().map(|p| p.2));
    let span = if vmax > vmin { vmax - vmin } else { 1.0 };
    let idx = |v: &[f64], x: f64| v.partition_point(|&a| a < x);
    let mut seen = vec![false; xs.len() * ys.len()];
    for p in pts {
        let k = idx(&ys, p.1) * xs.len() + idx(&xs, p.0);
        if std::mem::replace(&mut seen[k], true) {
            return Err(CliError::Format(format!(
                "duplicate grid point ({}, {})",
                p.0, p.1
            )));
        }
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let dy = (ys[ys.len() - 1] - ys[0]) / (ys.len() - 1) as f64;
    let f = Frame::new(
        (xs[0] - dx / 2.0, xs[xs.len() - 1] + dx / 2.0),
        (ys[0] - dy / 2.0, ys[ys.len() - 1] + dy / 2.0),
    );
    let cw = f.width / xs.len() as f64;
    let ch = f.height / ys.len() as f64;
    let mut svg = open(title);
    let _ = writeln!(svg, r##"<g shape-rendering="crispEdges">"##);
    for &(x, y, v) in pts {
        let t = if v.is_finite() {
            (v - vmin) / span
        } else {
            1.0
        };
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"##,
            f.px(x) - cw / 2.0,
            f.py(y) - ch / 2.0,
            cw + 0.05,
            ch + 0.05,
            ramp(t)
        );
    }
    let _ = writeln!(svg, "</g>");
    for &(x, y) in markers {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="#e00" stroke-width="2"/>"##,
            f.px(x),
            f.py(y)
        );
    }
    f.axes(&mut svg, labels.0, labels.1, short);
    // colour bar
    let bx = W - PAD_R + 24.0;
    for k in 0..50 {
        let t = k as f64 / 49.0;
        let y = PAD_T + f.height * (1.0 - t) - f.height / 50.0;
        let _ = writeln!(
            svg,
            r##"<rect x="{bx}" y="{y:.2}" width="16" height="{:.2}" fill="{}"/>"##,
            f.height / 49.0,
            ramp(t)
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="11">{}</text><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"##,
        bx + 20.0,
        PAD_T + 8.0,
        escape(&short(vmax)),
        bx + 20.0,
        PAD_T + f.height,
        escape(&short(vmin))
    );
    Ok(close(svg))
}

fn bars(title: &str, ylabel: &str, items: &[(String, f64)]) -> String {
    let mut svg = open(title);
    let (_, hi) = extent(items.iter().map(|i| i.1));
    let f = Frame::new(
        (0.0, items.len().max(1) as f64),
        (0.0, if hi > 0.0 { hi } else { 1.0 }),
    );
    f.axes(&mut svg, "", ylabel, |_| String::new());
    let bw = f.width / items.len().max(1) as f64;
    for (i, (label, v)) in items.iter().enumerate() {
        let v = if v.is_finite() { v.max(0.0) } else { 0.0 };
        let x = f.left + bw * i as f64;
        let y = f.py(v);
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"##,
            x + bw * 0.1,
            bw * 0.8,
            f.top + f.height - y,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"##,
            x + bw / 2.0,
            f.top + f.height + 30.0,
            escape(label)
        );
    }
    close(svg)
}

/// Renders a parsed table. `minima` adds markers to a landscape heatmap.
pub fn render(table: &Table, minima: Option<&[MinimumRecord]>) -> CliResult<String> {
    let mut series = Series::new();
    Ok(match table {
        Table::Sweep(rows) => {
            for r in rows {
                series
                    .entry(r.model.clone())
                    .or_default()
                    .push((r.lr, r.success_rate));
            }
            if series
                .values()
                .flatten()
                .any(|p| p.0.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater))
            {
                return Err(CliError::Format("learning rates must be positive".into()));
            }
            line_chart(
                "Success rate vs learning rate",
                "learning rate",
                "success rate",
                &series,
                true,
                Some((0.0, 1.0)),
            )
        }
        Table::Curves(rows) => {
            for r in rows {
                series
                    .entry(r.model.clone())
                    .or_default()
                    .push((r.epoch as f64, r.success_rate));
            }
            line_chart(
                "Success rate over epochs",
                "epoch",
                "success rate",
                &series,
                false,
                Some((0.0, 1.0)),
            )
        }
        Table::Trial(t) => {
            series.insert(
                "mse".into(),
                t.rows.iter().map(|r| (r.epoch as f64, r.mse)).collect(),
            );
            line_chart("Training loss", "epoch", "mse", &series, false, None)
        }
        Table::Trajectory(rows) => {
            series.insert("path".into(), rows.iter().map(|r| (r.w1, r.w2)).collect());
            line_chart("Optimizer trajectory", "w1", "w2", &series, false, None)
        }
        Table::Landscape(rows) => {
            let pts: Vec<_> = rows.iter().map(|r| (r.w1, r.w2, r.mse)).collect();
            let marks: Vec<_> = minima
                .unwrap_or_default()
                .iter()
                .map(|m| (m.w1, m.w2))
                .collect();
            heatmap("Loss landscape", ("w1", "w2"), &pts, &marks)?
        }
        Table::Boundary(rows) => {
            let pts: Vec<_> = rows.iter().map(|r| (r.x1, r.x2, r.mean_class)).collect();
            heatmap("Mean decision boundary", ("x1", "x2"), &pts, &[])?
        }
        Table::Minima(rows) => {
            series.insert("minima".into(), rows.iter().map(|r| (r.w1, r.w2)).collect());
            line_chart("Local minima", "w1", "w2", &series, false, None)
        }
        Table::Quadrants(rows) => {
            let items: Vec<_> = rows
                .iter()
                .map(|r| (format!("{} q{}", r.slope, r.quadrant), r.success_rate))
                .collect();
            bars("Success rate by starting quadrant", "success rate", &items)
        }
        Table::Margins(rows) => {
            let items: Vec<_> = rows.iter().map(|r| (r.model.clone(), r.margin)).collect();
            bars("Decision-boundary margin", "margin", &items)
        }
        Table::Bench(rows) => {
            let mut by: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            for r in rows {
                if let Some(t) = r.wall_time_ns {
                    by.entry(r.model.as_str()).or_default().push(t as f64);
                }
            }
            let items: Vec<_> = by
                .into_iter()
                .map(|(m, mut v)| {
                    v.sort_by(f64::total_cmp);
                    (m.to_string(), v[v.len() / 2] / 1e3)
                })
                .collect();
            bars("Median single-trial wall time", "microseconds", &items)
        }
        Table::BenchSummary(rows) => {
            let items: Vec<_> = rows
                .iter()
                .map(|r| (r.model.clone(), r.median_ns.unwrap_or(0.0) / 1e3))
                .collect();
            bars("Median single-trial wall time", "microseconds", &items)
        }
    })
}
