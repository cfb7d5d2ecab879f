//! Self-contained SVG figures of traced loci.

use std::fmt::Write;

use sle0::config::{Point, Uniformization};
use sle0::C64;

const SIZE: f64 = 480.0;
const DISK_VIEW: f64 = 1.15;

pub struct Figure<'a> {
    pub title: &'a str,
    pub domain: Uniformization,
    pub traces: Vec<&'a [C64]>,
    pub critical: &'a [C64],
    /// Poles in the closure of the domain; mirror images are left out.
    pub poles: Vec<C64>,
    pub marked: Point,
}

struct View {
    lo: f64,
    top: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl View {
    fn map(&self, z: C64) -> (f64, f64) {
        ((z.re - self.lo) * self.scale, (self.top - z.im) * self.scale)
    }
}

fn view(fig: &Figure) -> View {
    match fig.domain {
        Uniformization::Disk => View {
            lo: -DISK_VIEW,
            top: DISK_VIEW,
            scale: SIZE / (2.0 * DISK_VIEW),
            width: SIZE,
            height: SIZE,
        },
        Uniformization::HalfPlane => {
            let mut xs: Vec<f64> = fig.critical.iter().map(|z| z.re).collect();
            xs.extend(fig.poles.iter().map(|z| z.re));
            if let Point::Finite(u) = fig.marked {
                xs.push(u.re);
            }
            let (a, b) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let (a, b) = if a.is_finite() { (a, b) } else { (-1.0, 1.0) };
            let span = (b - a).max(1.0);
            let lo = a - 0.1 * span;
            let hi = b + 0.1 * span;
            let scale = SIZE / (hi - lo);
            let top = 0.6 * (hi - lo);
            // A strip below the axis keeps boundary markers whole.
            View { lo, top, scale, width: SIZE, height: (top + 0.05 * (hi - lo)) * scale }
        }
    }
}

/// Polyline path data; points closer than half a pixel to the previous
/// emitted point are dropped, the endpoint is always kept.
fn path(view: &View, pts: &[C64]) -> String {
    let mut d = String::new();
    let mut last: Option<(f64, f64)> = None;
    for (k, &z) in pts.iter().enumerate() {
        let (x, y) = view.map(z);
        let end = k + 1 == pts.len();
        if let Some((lx, ly)) = last {
            if !end && (x - lx).hypot(y - ly) < 0.5 {
                continue;
            }
        }
        d.push_str(if last.is_none() { "M" } else { " L" });
        let _ = write!(d, "{x:.3},{y:.3}");
        last = Some((x, y));
    }
    d
}

pub fn render(fig: &Figure) -> String {
    let v = view(fig);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#,
        w = v.width,
        h = v.height
    );
    let _ = writeln!(s, "<title>{}</title>", escape(fig.title));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{:.3}" height="{:.3}" style="fill:white"/>"#, v.width, v.height);
    match fig.domain {
        Uniformization::Disk => {
            let (cx, cy) = v.map(C64::new(0.0, 0.0));
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" style="fill:none;stroke:black;stroke-width:1.5"/>"#,
                v.scale
            );
        }
        Uniformization::HalfPlane => {
            let (_, y) = v.map(C64::new(0.0, 0.0));
            let _ = writeln!(
                s,
                r#"<line x1="0" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" style="stroke:black;stroke-width:1.5"/>"#,
                v.width
            );
        }
    }
    for t in &fig.traces {
        let _ = writeln!(s, r#"<path d="{}" style="fill:none;stroke:#1f3a93;stroke-width:1.2"/>"#, path(&v, t));
    }
    let mut dot = |z: C64, fill: &str| {
        let (x, y) = v.map(z);
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" style="fill:{fill};stroke:black;stroke-width:0.6"/>"#);
    };
    for &p in &fig.poles {
        dot(p, "yellow");
    }
    for &c in fig.critical {
        dot(c, "red");
    }
    if let Point::Finite(u) = fig.marked {
        dot(u, "green");
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_figure_has_boundary_and_markers() {
        let crit = [C64::new(1.0, 0.0)];
        let line = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)];
        let svg = render(&Figure {
            title: "ray",
            domain: Uniformization::Disk,
            traces: vec![&line],
            critical: &crit,
            poles: vec![],
            marked: Point::real(-1.0),
        });
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"r="208.696""#));
        assert!(svg.contains("fill:red"));
        assert!(svg.contains("fill:green"));
        assert!(!svg.contains("fill:yellow"));
        assert!(!svg.contains("href"));
        assert!(svg.contains("M448.696,240.000 L240.000,240.000 L31.304,240.000"));
    }

    #[test]
    fn half_plane_axis_has_ten_percent_margins() {
        let crit = [C64::new(-1.0, 0.0), C64::new(1.0, 0.0)];
        let fig = Figure {
            title: "a<b",
            domain: Uniformization::HalfPlane,
            traces: vec![],
            critical: &crit,
            poles: vec![C64::new(0.0, 0.0)],
            marked: Point::Infinity,
        };
        let v = view(&fig);
        assert!((v.lo + 1.2).abs() < 1e-12);
        assert!((v.map(C64::new(1.2, 0.0)).0 - SIZE).abs() < 1e-9);
        let svg = render(&fig);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("fill:yellow"));
    }
}
