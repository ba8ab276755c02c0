use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::metrics::EpochMetrics;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "epoch,success_rate,avg_reward,avg_turns";

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

pub fn emit_csv(path: &Path, metrics: &[EpochMetrics]) -> Result<()> {
    if metrics.is_empty() {
        return Err(Error::invalid("no metrics to write"));
    }
    let mut text = String::with_capacity(40 * (metrics.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for m in metrics {
        writeln!(
            text,
            "{},{:.6},{:.6},{:.6}",
            m.epoch, m.success_rate, m.avg_reward, m.avg_turns
        )
        .expect("writing to a String");
    }
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<EpochMetrics>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, msg: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    };
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(parse_err(1, "missing header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(parse_err(i + 2, "expected 4 fields"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(i + 2, "bad number"));
            Ok(EpochMetrics {
                epoch: fields[0].parse().map_err(|_| parse_err(i + 2, "bad epoch"))?,
                success_rate: num(fields[1])?,
                avg_reward: num(fields[2])?,
                avg_turns: num(fields[3])?,
            })
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Success rate against epoch, one polyline per labelled curve.
pub fn emit_svg(path: &Path, curves: &[(&str, &[EpochMetrics])]) -> Result<()> {
    if curves.is_empty() || curves.iter().any(|(_, c)| c.is_empty()) {
        return Err(Error::invalid("no curves to plot"));
    }
    let (w, h, left, right, top, bottom) = (640.0, 400.0, 60.0, 20.0, 20.0, 50.0);
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let max_epoch = curves
        .iter()
        .flat_map(|(_, c)| c.iter().map(|m| m.epoch))
        .max()
        .unwrap_or(1)
        .max(2) as f64;
    let x = |epoch: usize| left + plot_w * (epoch as f64 - 1.0) / (max_epoch - 1.0);
    let y = |rate: f64| top + plot_h * (1.0 - rate.clamp(0.0, 1.0));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<g stroke="black" stroke-width="1"><line x1="{left}" y1="{}" x2="{}" y2="{}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{}"/></g>"#,
        top + plot_h,
        left + plot_w,
        top + plot_h,
        top + plot_h
    );
    let _ = writeln!(svg, r#"<g font-family="sans-serif" font-size="11">"#);
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{tick:.2}</text>"#,
            left - 6.0,
            y(tick) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{left}" y="{:.1}">1</text><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
        top + plot_h + 16.0,
        left + plot_w,
        top + plot_h + 16.0,
        max_epoch as usize
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">epoch</text>"#,
        left + plot_w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">success rate</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );
    let _ = writeln!(svg, "</g>");
    for (i, (label, curve)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = curve
            .iter()
            .map(|m| format!("{:.2},{:.2}", x(m.epoch), y(m.success_rate)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 14.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
            left + plot_w - 110.0,
            left + plot_w - 90.0,
            left + plot_w - 84.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    ensure_parent(path)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(n: usize) -> Vec<EpochMetrics> {
        (1..=n)
            .map(|e| EpochMetrics {
                epoch: e,
                success_rate: e as f64 / n as f64,
                avg_reward: -1.5,
                avg_turns: 12.25,
            })
            .collect()
    }

    #[test]
    fn csv_has_header_plus_one_line_per_epoch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/0.csv");
        let metrics = curve(500);
        emit_csv(&path, &metrics).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 501);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().nth(1).unwrap(), "1,0.002000,-1.500000,12.250000");
        assert_eq!(read_csv(&path).unwrap().len(), 500);
    }

    #[test]
    fn svg_is_well_formed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.svg");
        let a = curve(40);
        let b = curve(40);
        emit_svg(&path, &[("eierl", &a), ("dqn <0.05> & co", &b)]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        let polylines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
        assert_eq!(polylines, 2);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_csv(&blocker.join("a.csv"), &curve(2)).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
        assert!(emit_csv(&dir.path().join("e.csv"), &[]).is_err());
    }
}
