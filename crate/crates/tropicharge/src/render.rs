//! Deterministic SVG figures from a run report: the tropical region, the
//! placed curve with weight labels, and (when present) the amoeba point
//! cloud with the reflected skeleton overlay.

use num::ToPrimitive;

use crate::amoeba::{skeleton_f64, superpotential_tropical};
use crate::config::{parse_rational, parse_rational_vec};
use crate::error::{Error, Result};
use crate::fano::FanData;
use crate::linalg::{Q, Z};
use crate::report::Report;
use crate::tropical::hypersurface_skeleton;

const SCALE: f64 = 90.0;
const PAD: f64 = 1.2;

fn q_to_f64(q: &Q) -> f64 {
    q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap()
}

fn parse_point(v: &[String]) -> Result<[f64; 2]> {
    let qs = parse_rational_vec(v)?;
    if qs.len() != 2 {
        return Err(Error::NothingToRender("non-planar point".into()));
    }
    Ok([q_to_f64(&qs[0]), q_to_f64(&qs[1])])
}

struct Canvas {
    min: [f64; 2],
    max: [f64; 2],
    body: String,
}

impl Canvas {
    fn new(points: &[[f64; 2]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for i in 0..2 {
                min[i] = min[i].min(p[i]);
                max[i] = max[i].max(p[i]);
            }
        }
        Canvas {
            min: [min[0] - PAD, min[1] - PAD],
            max: [max[0] + PAD, max[1] + PAD],
            body: String::new(),
        }
    }

    fn tx(&self, p: [f64; 2]) -> (f64, f64) {
        (
            (p[0] - self.min[0]) * SCALE,
            (self.max[1] - p[1]) * SCALE,
        )
    }

    fn polygon(&mut self, pts: &[[f64; 2]], style: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.tx(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        self.body.push_str(&format!(
            "<polygon points=\"{}\" style=\"{}\"/>\n",
            coords.join(" "),
            style
        ));
    }

    fn line(&mut self, a: [f64; 2], b: [f64; 2], style: &str, class: &str) {
        let (x1, y1) = self.tx(a);
        let (x2, y2) = self.tx(b);
        self.body.push_str(&format!(
            "<line class=\"{class}\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" style=\"{style}\"/>\n"
        ));
    }

    fn circle(&mut self, p: [f64; 2], r: f64, style: &str, class: &str) {
        let (x, y) = self.tx(p);
        self.body.push_str(&format!(
            "<circle class=\"{class}\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r:.2}\" style=\"{style}\"/>\n"
        ));
    }

    fn text(&mut self, p: [f64; 2], content: &str) {
        let (x, y) = self.tx(p);
        self.body.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" font-family=\"monospace\">{}</text>\n",
            x + 4.0,
            y - 4.0,
            content
        ));
    }

    fn finish(self) -> String {
        let w = (self.max[0] - self.min[0]) * SCALE;
        let h = (self.max[1] - self.min[1]) * SCALE;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
             viewBox=\"0 0 {w:.2} {h:.2}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body
        )
    }
}

/// Sort polygon vertices counterclockwise about their centroid so the
/// region renders as a simple polygon.
fn ccw_sorted(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let c = pts.iter().fold([0.0, 0.0], |acc, p| {
        [acc[0] + p[0] / pts.len() as f64, acc[1] + p[1] / pts.len() as f64]
    });
    pts.sort_by(|a, b| {
        let aa = (a[1] - c[1]).atan2(a[0] - c[0]);
        let bb = (b[1] - c[1]).atan2(b[0] - c[0]);
        aa.partial_cmp(&bb).unwrap()
    });
    pts
}

/// Render a report to SVG.
///
/// # Errors
///
/// `NothingToRender` when the report is not two-dimensional and carries
/// no amoeba sample.
pub fn render_svg(report: &Report) -> Result<String> {
    if report.fan.dim != 2 {
        return Err(Error::NothingToRender(format!(
            "report is {}-dimensional and has no planar figure",
            report.fan.dim
        )));
    }
    let g: Vec<[f64; 2]> = report
        .placed
        .g_trop_vertices
        .iter()
        .map(|v| parse_point(v))
        .collect::<Result<_>>()?;
    let positions: Vec<[f64; 2]> = report
        .placed
        .positions
        .iter()
        .map(|v| parse_point(v))
        .collect::<Result<_>>()?;
    let mut all_points = g.clone();
    all_points.extend(positions.iter().cloned());
    if let Some(am) = &report.amoeba {
        all_points.extend(am.final_points.iter().cloned());
    }
    let mut canvas = Canvas::new(&all_points);

    // Tropical region.
    canvas.polygon(
        &ccw_sorted(g),
        "fill:#eef4ff;stroke:#4466aa;stroke-width:2",
    );

    // Amoeba cloud and the reflected skeleton overlay.
    if let Some(am) = &report.amoeba {
        for &p in &am.final_points {
            canvas.circle(p, 1.2, "fill:#bbbbbb;stroke:none", "amoeba");
        }
        let fan = FanData::new(
            report.fan.dim,
            report
                .fan
                .rays
                .iter()
                .map(|r| r.iter().map(|&x| Z::from(x)).collect())
                .collect(),
        );
        let lambda = parse_rational_vec(&report.lambda)?;
        let skel = skeleton_f64(
            &hypersurface_skeleton(&superpotential_tropical(&fan, &lambda)?)?.reflect(),
        );
        for &(a, b) in &skel.segments {
            canvas.line(a, b, "stroke:#cc4444;stroke-width:1.5", "skeleton");
        }
        for &(a, d) in &skel.rays {
            let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let reach = 2.0 * (canvas.max[0] - canvas.min[0]).max(canvas.max[1] - canvas.min[1]);
            let b = [a[0] + d[0] / norm * reach, a[1] + d[1] / norm * reach];
            canvas.line(a, b, "stroke:#cc4444;stroke-width:1.5", "skeleton");
        }
    }

    // Placed curve: bounded edges, ends and vertices.
    let exits: std::collections::BTreeMap<usize, [f64; 2]> = report
        .placed
        .exits
        .iter()
        .map(|(i, v)| Ok((*i, parse_point(v)?)))
        .collect::<Result<_>>()?;
    for (ei, e) in report.curve.edges.iter().enumerate() {
        let (a, b) = match e.ends {
            (a, Some(b)) => (positions[a], positions[b]),
            (a, None) => (
                positions[a],
                *exits.get(&ei).ok_or_else(|| {
                    Error::NothingToRender(format!("missing exit for edge {ei}"))
                })?,
            ),
        };
        canvas.line(a, b, "stroke:#228833;stroke-width:2.5", "curve-edge");
        if e.ends.1.is_none() {
            canvas.circle(b, 3.5, "fill:white;stroke:#228833;stroke-width:2", "curve-end");
        }
        let weight = parse_rational(&e.weight)?;
        if weight != Q::from_integer(Z::from(1)) {
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            canvas.text(mid, &e.weight);
        }
    }
    for &p in &positions {
        canvas.circle(p, 4.0, "fill:#228833;stroke:none", "curve-vertex");
    }
    Ok(canvas.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FamilyMemberConfig, FanConfig, JobConfig, OutputConfig};
    use crate::report::execute;

    fn p2_config() -> JobConfig {
        JobConfig {
            fan: FanConfig {
                dim: 2,
                rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            },
            lambda: vec!["0".into(), "0".into(), "1".into()],
            family: vec![FamilyMemberConfig {
                divisor: vec!["0".into(), "0".into(), "1".into()],
                coefficients: Some(vec![
                    (vec![0, 0], "0".into()),
                    (vec![1, 0], "0".into()),
                    (vec![0, 1], "0".into()),
                ]),
            }],
            truncation_order: 2,
            shrink: "1/8".into(),
            seed: 1,
            amoeba: None,
            outputs: OutputConfig {
                report: "/tmp/r.json".into(),
                svg: None,
            },
        }
    }

    #[test]
    fn p2_line_svg_structure() {
        let report = execute(&p2_config(), true).unwrap();
        let svg = render_svg(&report).unwrap();
        // One region polygon, one vertex, three end edges with end markers.
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("class=\"curve-vertex\"").count(), 1);
        assert_eq!(svg.matches("class=\"curve-edge\"").count(), 3);
        assert_eq!(svg.matches("class=\"curve-end\"").count(), 3);
    }

    #[test]
    fn svg_is_deterministic() {
        let report = execute(&p2_config(), true).unwrap();
        assert_eq!(render_svg(&report).unwrap(), render_svg(&report).unwrap());
    }

    #[test]
    fn non_planar_report_rejected() {
        let mut report = execute(&p2_config(), true).unwrap();
        report.fan.dim = 3;
        assert!(matches!(
            render_svg(&report),
            Err(Error::NothingToRender(_))
        ));
    }
}
