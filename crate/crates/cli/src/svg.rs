//! Minimal SVG rendering of a sweep: measured times as points, the speed
//! limit as a dashed curve, and the region below it shaded.

use std::fmt::Write;

use crate::sweep::SweepRow;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        LEFT + (x - self.x_min) / span * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - y / self.y_max * (HEIGHT - TOP - BOTTOM)
    }
}

pub fn sweep_svg(rows: &[SweepRow], m: usize) -> String {
    let finite: Vec<&SweepRow> = rows.iter().filter(|r| r.omega_ratio.is_finite()).collect();
    let x_min = finite.iter().map(|r| r.omega_ratio).fold(f64::INFINITY, f64::min);
    let x_max = finite.iter().map(|r| r.omega_ratio).fold(f64::NEG_INFINITY, f64::max);
    let y_top = finite
        .iter()
        .flat_map(|r| [Some(r.t_qsl), r.t_perp])
        .flatten()
        .fold(0.0, f64::max);
    let frame = Frame {
        x_min: if x_min.is_finite() { x_min } else { 0.0 },
        x_max: if x_max.is_finite() && x_max > x_min { x_max } else { x_min.max(0.0) + 1.0 },
        y_max: if y_top > 0.0 { 1.05 * y_top } else { 1.0 },
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    if !finite.is_empty() {
        // forbidden region: below the speed-limit curve
        let mut pts = format!("{:.2},{:.2}", frame.px(frame.x_min), frame.py(0.0));
        for r in &finite {
            let _ = write!(pts, " {:.2},{:.2}", frame.px(r.omega_ratio), frame.py(r.t_qsl));
        }
        let _ = write!(pts, " {:.2},{:.2}", frame.px(frame.x_max), frame.py(0.0));
        let _ = writeln!(s, r##"<polygon points="{pts}" fill="#d9d9d9" stroke="none"/>"##);

        let line: Vec<String> = finite
            .iter()
            .map(|r| format!("{:.2},{:.2}", frame.px(r.omega_ratio), frame.py(r.t_qsl)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5" stroke-dasharray="6,4"/>"#,
            line.join(" ")
        );
        for r in &finite {
            if let Some(t) = r.t_perp {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#,
                    frame.px(r.omega_ratio),
                    frame.py(t)
                );
            }
        }
    }

    axes(&mut s, &frame);
    let _ = writeln!(
        s,
        r#"<text x="{:.0}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">M = {m}</text>"#,
        WIDTH / 2.0
    );
    s.push_str("</svg>\n");
    s
}

fn axes(s: &mut String, f: &Frame) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let frac = i as f64 / TICKS as f64;
        let xv = f.x_min + frac * (f.x_max - f.x_min);
        let px = f.px(xv);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.0}" stroke="black"/><text x="{px:.2}" y="{:.0}" font-family="sans-serif" font-size="12" text-anchor="middle">{:.2}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            xv
        );
        let yv = frac * f.y_max;
        let py = f.py(yv);
        let _ = writeln!(
            s,
            r#"<line x1="{:.0}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{:.0}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{:.3}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            yv
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.0}" y="{:.0}" font-family="sans-serif" font-size="14" text-anchor="middle">omega / omega0</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.0}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.0})">time</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}
