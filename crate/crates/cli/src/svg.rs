//! Log-log error plot of a sweep.

use std::fmt::Write;

use signfem::harness::SweepRecord;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

fn log_bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite() && *v > 0.0)
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    Some(if lo == hi { (lo - 1.0, hi + 1.0) } else { (lo, hi) })
}

/// Relative L2 and H1 errors against `1 / h_minus`, log-log.
pub fn error_plot(records: &[SweepRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let xb = log_bounds(records.iter().map(|r| 1.0 / r.h_minus));
    let yb = log_bounds(records.iter().flat_map(|r| [r.rel_l2, r.rel_h1]));
    let (Some((x0, x1)), Some((y0, y1))) = (xb, yb) else {
        s.push_str("</svg>\n");
        return s;
    };
    let px = |v: f64| PAD + (v.log10() - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |v: f64| H - PAD - (v.log10() - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    for e in x0 as i32..=x1 as i32 {
        let x = px(10f64.powi(e));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{PAD}" x2="{x:.1}" y2="{:.1}" stroke="lightgray"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{e}</text>"#,
            H - PAD,
            H - PAD + 18.0
        );
    }
    for e in y0 as i32..=y1 as i32 {
        let y = py(10f64.powi(e));
        let _ = writeln!(
            s,
            r#"<line x1="{PAD}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="lightgray"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"#,
            W - PAD,
            PAD - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">1/h_minus</text>"#,
        W / 2.0,
        H - 15.0
    );

    let series: [(&str, &str, fn(&SweepRecord) -> f64); 2] =
        [("L2", "steelblue", |r| r.rel_l2), ("H1", "darkorange", |r| r.rel_h1)];
    for (k, (name, color, get)) in series.into_iter().enumerate() {
        let pts: Vec<String> = records
            .iter()
            .filter(|r| get(r).is_finite() && get(r) > 0.0)
            .map(|r| format!("{:.1},{:.1}", px(1.0 / r.h_minus), py(get(r))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        for p in &pts {
            let (x, y) = p.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
        }
        let ly = PAD + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{name} error</text>"#,
            W - PAD - 90.0,
            W - PAD - 70.0,
            W - PAD - 64.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
