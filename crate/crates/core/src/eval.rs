//! Precision/recall curves per fold, max-F1 and covariance-ellipse confidence bands.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::corpus::Name;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PRPoint {
    /// 1-based rank cutoff.
    pub position: usize,
    pub precision: f64,
    pub recall: f64,
}

impl PRPoint {
    pub fn f1(&self) -> f64 {
        let s = self.precision + self.recall;
        if s > 0.0 {
            2.0 * self.precision * self.recall / s
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PRCurve {
    pub method: String,
    pub fold: usize,
    /// One point per position `1..=N`.
    pub points: Vec<PRPoint>,
}

/// Pair-level precision and recall at every cutoff `1..=max_position`.
///
/// Only sources in `truth` are evaluated; a source missing from `predictions`
/// predicts nothing.
pub fn compute_pr_curve(
    method: &str,
    fold: usize,
    predictions: &BTreeMap<Name, Vec<Name>>,
    truth: &BTreeMap<Name, BTreeSet<Name>>,
    max_position: usize,
) -> Result<PRCurve> {
    let actual: usize = truth.values().map(BTreeSet::len).sum();
    if actual == 0 {
        return Err(Error::EmptyTruth);
    }
    // hits[k] = true positives found exactly at position k + 1; ends[k] = lists of length k.
    let mut hits = vec![0usize; max_position];
    let mut ends = vec![0usize; max_position + 1];
    for (source, targets) in truth {
        let list = predictions.get(source).map_or(&[][..], Vec::as_slice);
        let len = list.len().min(max_position);
        ends[len] += 1;
        for (k, c) in list[..len].iter().enumerate() {
            if targets.contains(c) {
                hits[k] += 1;
            }
        }
    }
    let mut points = Vec::with_capacity(max_position);
    let (mut tp, mut predicted) = (0usize, 0usize);
    // Lists still growing at the current cutoff.
    let mut open = truth.len() - ends[0];
    for k in 0..max_position {
        tp += hits[k];
        predicted += open;
        open -= ends[k + 1];
        points.push(PRPoint {
            position: k + 1,
            precision: if predicted == 0 { 0.0 } else { tp as f64 / predicted as f64 },
            recall: tp as f64 / actual as f64,
        });
    }
    Ok(PRCurve {
        method: method.to_string(),
        fold,
        points,
    })
}

pub fn max_f1(curve: &PRCurve) -> f64 {
    curve.points.iter().map(PRPoint::f1).fold(0.0, f64::max)
}

/// Square root of the 2-degree-of-freedom chi-square quantile at `confidence`.
pub fn sigma_multiplier(confidence: f64) -> f64 {
    (-2.0 * (1.0 - confidence).ln()).sqrt()
}

/// One position's spread of fold points. Coordinates are (precision, recall).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ellipse {
    pub center: (f64, f64),
    /// Symmetric: `[[sxx, sxy], [sxy, syy]]`.
    pub covariance: [[f64; 2]; 2],
    /// Descending.
    pub eigenvalues: [f64; 2],
    /// Unit columns matching `eigenvalues`; the major one satisfies `v · (1, 1) >= 0`.
    pub eigenvectors: [(f64, f64); 2],
    pub sigma_multiplier: f64,
}

impl Ellipse {
    fn from_points(points: &[(f64, f64)], sigma_multiplier: f64) -> Self {
        let k = points.len() as f64;
        // Shifted by the first point so that identical inputs average to themselves exactly.
        let (x0, y0) = points[0];
        let mx = x0 + points.iter().map(|p| p.0 - x0).sum::<f64>() / k;
        let my = y0 + points.iter().map(|p| p.1 - y0).sum::<f64>() / k;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for &(x, y) in points {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
            syy += (y - my) * (y - my);
        }
        let (sxx, sxy, syy) = (sxx / (k - 1.0), sxy / (k - 1.0), syy / (k - 1.0));
        let (eigenvalues, eigenvectors) = symmetric_eigen(sxx, sxy, syy);
        Ellipse {
            center: (mx, my),
            covariance: [[sxx, sxy], [sxy, syy]],
            eigenvalues,
            eigenvectors,
            sigma_multiplier,
        }
    }

    /// Semi-axis lengths, major first.
    pub fn semi_axes(&self) -> [f64; 2] {
        self.eigenvalues.map(|l| self.sigma_multiplier * l.max(0.0).sqrt())
    }

    /// Ends of the major axis, the `v · (1, 1) >= 0` side first.
    pub fn major_axis_endpoints(&self) -> ((f64, f64), (f64, f64)) {
        let a = self.semi_axes()[0];
        let (vx, vy) = self.eigenvectors[0];
        let (cx, cy) = self.center;
        ((cx + a * vx, cy + a * vy), (cx - a * vx, cy - a * vy))
    }
}

/// Closed-form eigen-decomposition of `[[a, b], [b, c]]`.
fn symmetric_eigen(a: f64, b: f64, c: f64) -> ([f64; 2], [(f64, f64); 2]) {
    let mid = 0.5 * (a + c);
    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l1, l2) = (mid + rad, mid - rad);
    let mut v = if b != 0.0 {
        // Both vectors solve the system; the longer one is better conditioned.
        let (p, q) = ((l1 - c, b), (b, l1 - a));
        let (x, y) = if p.0.hypot(p.1) >= q.0.hypot(q.1) { p } else { q };
        let n = x.hypot(y);
        (x / n, y / n)
    } else if a >= c {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    if v.0 + v.1 < 0.0 {
        v = (-v.0, -v.1);
    }
    ([l1, l2], [v, (-v.1, v.0)])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfidenceBand {
    pub method: String,
    /// Pointwise mean (precision, recall) per position.
    pub centroid: Vec<(f64, f64)>,
    pub ellipses: Vec<Ellipse>,
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
}

pub fn confidence_band(curves: &[PRCurve], confidence: f64) -> Result<ConfidenceBand> {
    if curves.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "a confidence band needs at least 2 curves, got {}",
            curves.len()
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence must be in (0, 1), got {confidence}")));
    }
    let n = curves[0].points.len();
    if curves.iter().any(|c| c.points.len() != n) {
        return Err(Error::DegenerateInput("curves differ in length".into()));
    }
    let sigma = sigma_multiplier(confidence);
    let mut band = ConfidenceBand {
        method: curves[0].method.clone(),
        centroid: Vec::with_capacity(n),
        ellipses: Vec::with_capacity(n),
        upper: Vec::with_capacity(n),
        lower: Vec::with_capacity(n),
    };
    for i in 0..n {
        let points: Vec<(f64, f64)> = curves
            .iter()
            .map(|c| (c.points[i].precision, c.points[i].recall))
            .collect();
        let e = Ellipse::from_points(&points, sigma);
        let (hi, lo) = e.major_axis_endpoints();
        band.centroid.push(e.center);
        band.ellipses.push(e);
        band.upper.push(hi);
        band.lower.push(lo);
    }
    Ok(band)
}

pub fn write_pr_csv<W: Write>(mut w: W, curves: &[PRCurve]) -> std::io::Result<()> {
    writeln!(w, "method,fold,position,precision,recall")?;
    for c in curves {
        for p in &c.points {
            writeln!(w, "{},{},{},{},{}", c.method, c.fold, p.position, p.precision, p.recall)?;
        }
    }
    Ok(())
}

/// Reads curves written by [`write_pr_csv`], in first-appearance order.
pub fn read_pr_csv<R: BufRead>(reader: R, label: &str) -> Result<Vec<PRCurve>> {
    let mut curves: Vec<PRCurve> = Vec::new();
    let mut index: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(label, e))?;
        if i == 0 || line.is_empty() {
            continue;
        }
        let bad = |m: &str| Error::parse(label, i + 1, m);
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(bad("expected method,fold,position,precision,recall"));
        }
        let fold: usize = f[1].parse().map_err(|_| bad("bad fold"))?;
        let point = PRPoint {
            position: f[2].parse().map_err(|_| bad("bad position"))?,
            precision: f[3].parse().map_err(|_| bad("bad precision"))?,
            recall: f[4].parse().map_err(|_| bad("bad recall"))?,
        };
        let slot = *index.entry((f[0].to_string(), fold)).or_insert_with(|| {
            curves.push(PRCurve {
                method: f[0].to_string(),
                fold,
                points: Vec::new(),
            });
            curves.len() - 1
        });
        curves[slot].points.push(point);
    }
    Ok(curves)
}

pub fn write_band_csv<W: Write>(mut w: W, bands: &[ConfidenceBand]) -> std::io::Result<()> {
    writeln!(w, "method,position,mu_p,mu_r,sxx,sxy,syy")?;
    for b in bands {
        for (i, e) in b.ellipses.iter().enumerate() {
            let [[sxx, sxy], [_, syy]] = e.covariance;
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                b.method,
                i + 1,
                e.center.0,
                e.center.1,
                sxx,
                sxy,
                syy
            )?;
        }
    }
    Ok(())
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Standalone SVG: recall on x, precision on y, both on [0, 1]. Each method gets a
/// translucent band polygon, its centroid polyline and a legend entry.
pub fn render_svg(bands: &[ConfidenceBand]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 50.0;
    let px = |(p, r): (f64, f64)| (M + r.clamp(0.0, 1.0) * (W - 2.0 * M), H - M - p.clamp(0.0, 1.0) * (H - 2.0 * M));
    let path = |pts: &mut dyn Iterator<Item = &(f64, f64)>| {
        pts.map(|&q| {
            let (x, y) = px(q);
            format!("{x:.2},{y:.2}")
        })
        .collect::<Vec<_>>()
        .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    for i in 0..=10 {
        let t = f64::from(i) / 10.0;
        let (x, _) = px((0.0, t));
        let (_, y) = px((t, 0.0));
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{t:.1}</text>"#, H - M + 16.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{t:.1}</text>"#, M - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">Recall</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">Precision</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (i, b) in bands.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let polygon = path(&mut b.upper.iter().chain(b.lower.iter().rev()));
        let _ = writeln!(s, r#"<polygon points="{polygon}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#);
        let line = path(&mut b.centroid.iter());
        let _ = writeln!(s, r#"<polyline points="{line}" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
        let y = M + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            W - M - 130.0,
            W - M - 110.0,
            W - M - 104.0,
            y + 4.0,
            escape(&b.method)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(s: &str) -> Name {
        Name::new(s).unwrap()
    }

    fn preds(v: &[(&str, &[&str])]) -> BTreeMap<Name, Vec<Name>> {
        v.iter().map(|(s, l)| (n(s), l.iter().map(|x| n(x)).collect())).collect()
    }

    fn truth(v: &[(&str, &[&str])]) -> BTreeMap<Name, BTreeSet<Name>> {
        v.iter().map(|(s, l)| (n(s), l.iter().map(|x| n(x)).collect())).collect()
    }

    fn pr(c: &PRCurve) -> Vec<(f64, f64)> {
        c.points.iter().map(|p| (p.precision, p.recall)).collect()
    }

    #[test]
    fn curve_examples() {
        let c = compute_pr_curve("m", 0, &preds(&[("a", &["b"])]), &truth(&[("a", &["b"])]), 1).unwrap();
        assert_eq!(pr(&c), vec![(1.0, 1.0)]);
        let c = compute_pr_curve("m", 0, &preds(&[("a", &["x", "b"])]), &truth(&[("a", &["b"])]), 2).unwrap();
        assert_eq!(pr(&c), vec![(0.0, 0.0), (0.5, 1.0)]);
        let c = compute_pr_curve(
            "m",
            0,
            &preds(&[("a", &["b"]), ("d", &[])]),
            &truth(&[("a", &["b"]), ("d", &["c"])]),
            1,
        )
        .unwrap();
        assert_eq!(pr(&c), vec![(1.0, 0.5)]);
        assert!(matches!(
            compute_pr_curve("m", 0, &BTreeMap::new(), &BTreeMap::new(), 3),
            Err(Error::EmptyTruth)
        ));
    }

    #[test]
    fn f1_examples() {
        let curve = |v: &[(f64, f64)]| PRCurve {
            method: "m".into(),
            fold: 0,
            points: v
                .iter()
                .enumerate()
                .map(|(i, &(precision, recall))| PRPoint {
                    position: i + 1,
                    precision,
                    recall,
                })
                .collect(),
        };
        assert_eq!(max_f1(&curve(&[(1.0, 1.0)])), 1.0);
        assert!((max_f1(&curve(&[(0.0, 0.0), (0.5, 1.0)])) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(max_f1(&curve(&[(0.0, 0.0), (0.0, 0.0)])), 0.0);
    }

    fn single_point_curves(points: &[(f64, f64)]) -> Vec<PRCurve> {
        points
            .iter()
            .enumerate()
            .map(|(fold, &(precision, recall))| PRCurve {
                method: "m".into(),
                fold,
                points: vec![PRPoint {
                    position: 1,
                    precision,
                    recall,
                }],
            })
            .collect()
    }

    #[test]
    fn band_examples() {
        assert!((sigma_multiplier(0.95) - 2.447).abs() < 1e-3);
        let band = confidence_band(&single_point_curves(&[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)]), 0.95).unwrap();
        let e = band.ellipses[0];
        assert_eq!(e.center, (1.0, 1.0));
        assert!((e.covariance[0][0] - 4.0 / 3.0).abs() < 1e-12);
        assert!(e.covariance[0][1].abs() < 1e-12);
        assert!((e.semi_axes()[0] - sigma_multiplier(0.95) * (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
        // 2.825 comes from the rounded multiplier 2.447; the exact one gives 2.8264.
        assert!((e.semi_axes()[0] - 2.825).abs() < 2e-3);

        let same = single_point_curves(&[(0.3, 0.6); 10]);
        let band = confidence_band(&same, 0.95).unwrap();
        assert_eq!(band.upper, vec![(0.3, 0.6)]);
        assert_eq!(band.lower, band.upper);
        assert_eq!(band.centroid, band.upper);

        assert!(matches!(
            confidence_band(&same[..1], 0.95),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let c = compute_pr_curve("mt", 3, &preds(&[("a", &["x", "b"])]), &truth(&[("a", &["b"])]), 2).unwrap();
        let mut buf = Vec::new();
        write_pr_csv(&mut buf, std::slice::from_ref(&c)).unwrap();
        assert_eq!(read_pr_csv(buf.as_slice(), "mem").unwrap(), vec![c]);
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let band = confidence_band(&single_point_curves(&[(0.1, 0.2), (0.3, 0.5)]), 0.95).unwrap();
        let svg = render_svg(&[band]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("<polygon") && svg.contains(">m</text>"));
    }

    /// Recount from first principles: every (source, candidate) in the top k, checked against truth.
    fn brute(p: &BTreeMap<Name, Vec<Name>>, t: &BTreeMap<Name, BTreeSet<Name>>, k: usize) -> (f64, f64) {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for (s, targets) in t {
            let top: Vec<&Name> = p.get(s).map(|l| l.iter().take(k).collect()).unwrap_or_default();
            for c in &top {
                if targets.contains(*c) {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
            fn_ += targets.iter().filter(|x| !top.contains(x)).count();
        }
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        (precision, tp as f64 / (tp + fn_) as f64)
    }

    proptest! {
        #[test]
        fn curve_matches_brute_force(
            raw in proptest::collection::vec(
                (proptest::collection::btree_set("[a-d]", 1..3), proptest::collection::vec("[a-d]", 0..4)),
                1..4),
        ) {
            let sources = ["p", "q", "r"];
            let t: BTreeMap<Name, BTreeSet<Name>> = raw.iter().enumerate()
                .map(|(i, (ts, _))| (n(sources[i]), ts.iter().map(|x| n(x)).collect())).collect();
            let p: BTreeMap<Name, Vec<Name>> = raw.iter().enumerate()
                .map(|(i, (_, l))| {
                    let mut seen = BTreeSet::new();
                    (n(sources[i]), l.iter().filter(|x| seen.insert(x.to_string())).map(|x| n(x)).collect())
                }).collect();
            let c = compute_pr_curve("m", 0, &p, &t, 4).unwrap();
            let mut prev = 0.0;
            for pt in &c.points {
                prop_assert_eq!((pt.precision, pt.recall), brute(&p, &t, pt.position));
                prop_assert!(pt.recall >= prev);
                prev = pt.recall;
            }
        }

        #[test]
        fn band_invariants(pts in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..12)) {
            let band = confidence_band(&single_point_curves(&pts), 0.95).unwrap();
            let e = band.ellipses[0];
            let [[a, b], [b2, c]] = e.covariance;
            prop_assert_eq!(b, b2);
            // V diag(l) V^T reconstructs the covariance.
            let [(v1x, v1y), (v2x, v2y)] = e.eigenvectors;
            let [l1, l2] = e.eigenvalues;
            let r = [
                l1 * v1x * v1x + l2 * v2x * v2x,
                l1 * v1x * v1y + l2 * v2x * v2y,
                l1 * v1y * v1y + l2 * v2y * v2y,
            ];
            prop_assert!((r[0] - a).abs() <= 1e-9 && (r[1] - b).abs() <= 1e-9 && (r[2] - c).abs() <= 1e-9);
            prop_assert!(l2 >= -1e-12);
            let k = pts.len() as f64;
            let mean = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
            prop_assert!((band.centroid[0].0 - mean.0).abs() < 1e-12 && (band.centroid[0].1 - mean.1).abs() < 1e-12);
            // The centroid sits midway along the band's cross-section.
            let (u, l) = (band.upper[0], band.lower[0]);
            prop_assert!(((u.0 + l.0) / 2.0 - mean.0).abs() < 1e-12 && ((u.1 + l.1) / 2.0 - mean.1).abs() < 1e-12);
        }
    }
}
