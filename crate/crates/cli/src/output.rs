//! File emission: atomic writes, CSV tables, and self-contained SVG plots.

use anyhow::Context;
use std::fmt::Write as _;
use std::path::Path;

/// Write via a temporary sibling then rename, so readers never observe a
/// partially written file.
pub fn atomic_write(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    std::fs::write(&tmp, contents)
        .with_context(|| format!("cannot write {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot rename into {}", path.display()))?;
    Ok(())
}

/// Fixed-precision float formatting shared by every CSV so repeated runs are
/// byte-identical.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut out = String::with_capacity(32 * rows.len());
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for &v in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_f64(v));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// One curve on a plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Self-contained 800×500 SVG line plot with axes, ticks, and a legend.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const ML: f64 = 70.0; // margins: left, right, top, bottom
    const MR: f64 = 25.0;
    const MT: f64 = 40.0;
    const MB: f64 = 55.0;

    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        x1 = x0 + 1.0;
    }
    if !(y0 < y1) {
        let c = if y0.is_finite() { y0 } else { 0.0 };
        y0 = c - 0.5;
        y1 = c + 0.5;
    }
    let pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    let sx = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        (ML + W - MR) / 2.0
    );

    // frame and ticks
    let _ = writeln!(
        s,
        r#"<rect x="{ML}" y="{MT}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        W - ML - MR,
        H - MT - MB
    );
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        let px = sx(fx);
        let py = sy(fy);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/>"#,
            H - MB,
            H - MB + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{fx:.3}</text>"#,
            H - MB + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{ML}" y2="{py:.1}" stroke="black"/>"#,
            ML - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{fy:.3}</text>"#,
            ML - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
        (ML + W - MR) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"#,
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0
    );

    for (k, ser) in series.iter().enumerate() {
        let mut path = String::new();
        for (i, &(x, y)) in ser.points.iter().enumerate() {
            let _ = write!(path, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.8"/>"#,
            path.trim_end(),
            ser.color
        );
        let ly = MT + 16.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2.5"/>"#,
            ML + 12.0,
            ML + 40.0,
            ser.color
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            ML + 46.0,
            ly + 4.0,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_is_deterministic() {
        let rows = vec![vec![1.0, 2.0], vec![0.1, -3.5e-7]];
        let a = csv("x,y", &rows);
        let b = csv("x,y", &rows);
        assert_eq!(a, b);
        assert!(a.starts_with("x,y\n"));
        assert_eq!(a.lines().count(), 3);
    }

    #[test]
    fn svg_has_fixed_viewbox() {
        let s = svg_plot(
            "t",
            "x",
            "y",
            &[Series { label: "a", color: "#1f77b4", points: vec![(0.0, 0.0), (1.0, 1.0)] }],
        );
        assert!(s.contains(r#"viewBox="0 0 800 500""#));
        assert!(s.ends_with("</svg>\n"));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        atomic_write(&p, "one").unwrap();
        atomic_write(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        // no stray temp files
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
