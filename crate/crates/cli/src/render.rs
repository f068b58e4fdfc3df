//! SVG drawing of a translated line arrangement `H_i^t = {a_i x + b_i y = t_i}`.
//!
//! Intersection points are computed exactly and grouped, so concurrency of
//! three or more lines is decided without tolerance. Only the final pixel
//! coordinates are floating point.

use std::collections::BTreeMap;
use std::fmt::Write;

use discrarr::{Arrangement, Error, Result, Scalar, Subset, TranslationVector};

const WIDTH: f64 = 640.0;
const PAD: f64 = 0.2;

/// `[xmin, ymin, xmax, ymax]` in plane coordinates.
pub type Viewport = [f64; 4];

/// Exact intersection points with the lines through them.
pub fn intersection_points(
    a: &Arrangement,
    t: &TranslationVector,
) -> Result<BTreeMap<(Scalar, Scalar), Subset>> {
    check(a, t)?;
    let n = a.n();
    let mut points: BTreeMap<(Scalar, Scalar), Subset> = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let det = a.delta(i, j)?;
            let Some(inv) = det.inv() else { continue };
            let (p, q) = (a.normal(i)?, a.normal(j)?);
            let (ti, tj) = (&t.t[i - 1], &t.t[j - 1]);
            let x = &(&(ti * &q[1]) - &(tj * &p[1])) * &inv;
            let y = &(&(&p[0] * tj) - &(&q[0] * ti)) * &inv;
            let entry = points.entry((x, y)).or_insert(Subset::EMPTY);
            *entry = entry.with(i).with(j);
        }
    }
    Ok(points)
}

fn check(a: &Arrangement, t: &TranslationVector) -> Result<()> {
    if a.k() != 2 {
        return Err(Error::WrongRank {
            expected: 2,
            found: a.k(),
        });
    }
    if t.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "translation of length {} for {} lines",
            t.len(),
            a.n()
        )));
    }
    Ok(())
}

/// A point on the line and its direction, in floating point.
fn line_f64(a: &Arrangement, t: &TranslationVector, i: usize) -> ([f64; 2], [f64; 2]) {
    let v = &a.normals()[i - 1];
    let (p, q, c) = (v[0].to_f64(), v[1].to_f64(), t.t[i - 1].to_f64());
    let norm = p * p + q * q;
    ([c * p / norm, c * q / norm], [-q, p])
}

/// Parameter range of `origin + s * dir` inside the box, if it meets it.
fn clip(origin: [f64; 2], dir: [f64; 2], b: &Viewport) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for axis in 0..2 {
        let (min, max) = (b[axis], b[axis + 2]);
        if dir[axis] == 0.0 {
            if origin[axis] < min || origin[axis] > max {
                return None;
            }
            continue;
        }
        let s1 = (min - origin[axis]) / dir[axis];
        let s2 = (max - origin[axis]) / dir[axis];
        lo = lo.max(s1.min(s2));
        hi = hi.min(s1.max(s2));
    }
    (lo <= hi).then_some((lo, hi))
}

/// Bounding box of the intersection points, grown to reach every line that
/// misses it, padded by 20% of its extent on each side.
pub fn default_viewport(a: &Arrangement, t: &TranslationVector) -> Result<Viewport> {
    let points = intersection_points(a, t)?;
    let mut b = [
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    ];
    let include = |b: &mut Viewport, p: [f64; 2]| {
        b[0] = b[0].min(p[0]);
        b[1] = b[1].min(p[1]);
        b[2] = b[2].max(p[0]);
        b[3] = b[3].max(p[1]);
    };
    for (x, y) in points.keys() {
        include(&mut b, [x.to_f64(), y.to_f64()]);
    }
    if b[0] > b[2] {
        b = [0.0, 0.0, 0.0, 0.0];
    }
    let center = [(b[0] + b[2]) / 2.0, (b[1] + b[3]) / 2.0];
    for i in 1..=a.n() {
        let (origin, dir) = line_f64(a, t, i);
        if clip(origin, dir, &b).is_none() {
            let d2 = dir[0] * dir[0] + dir[1] * dir[1];
            let s = ((center[0] - origin[0]) * dir[0] + (center[1] - origin[1]) * dir[1]) / d2;
            include(&mut b, [origin[0] + s * dir[0], origin[1] + s * dir[1]]);
        }
    }
    let span = (b[2] - b[0]).max(b[3] - b[1]).max(1.0);
    let (w, h) = ((b[2] - b[0]).max(span / 4.0), (b[3] - b[1]).max(span / 4.0));
    let (cx, cy) = ((b[0] + b[2]) / 2.0, (b[1] + b[3]) / 2.0);
    let (hw, hh) = (w * (0.5 + PAD), h * (0.5 + PAD));
    Ok([cx - hw, cy - hh, cx + hw, cy + hh])
}

/// Standalone SVG: every line clipped to the viewport and labeled `H_i`,
/// every point on three or more lines marked.
pub fn render_svg(
    a: &Arrangement,
    t: &TranslationVector,
    viewport: Option<Viewport>,
) -> Result<String> {
    let points = intersection_points(a, t)?;
    let b = match viewport {
        Some(v) if v[0] < v[2] && v[1] < v[3] => v,
        Some(_) => {
            return Err(Error::InvalidArgument(
                "viewport needs xmin < xmax and ymin < ymax".into(),
            ))
        }
        None => default_viewport(a, t)?,
    };
    let scale = WIDTH / (b[2] - b[0]);
    let height = (b[3] - b[1]) * scale;
    let px = |p: [f64; 2]| ((p[0] - b[0]) * scale, (b[3] - p[1]) * scale);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.2} {height:.2}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<g stroke="black" stroke-width="1.5">"#);
    let mut labels = Vec::new();
    for i in 1..=a.n() {
        let (origin, dir) = line_f64(a, t, i);
        let Some((lo, hi)) = clip(origin, dir, &b) else {
            let _ = writeln!(svg, "<!-- H_{i} lies outside the viewport -->");
            continue;
        };
        let at = |s: f64| px([origin[0] + s * dir[0], origin[1] + s * dir[1]]);
        let ((x1, y1), (x2, y2)) = (at(lo), at(hi));
        let _ = writeln!(
            svg,
            r#"<line class="line" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#
        );
        let (lx, ly) = at(lo + 0.06 * (hi - lo));
        labels.push(format!(
            r#"<text x="{:.2}" y="{:.2}">H_{i}</text>"#,
            lx + 4.0,
            ly - 4.0
        ));
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<g font-family="serif" font-size="14" fill="black">"#
    );
    for l in labels {
        let _ = writeln!(svg, "{l}");
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g fill="red">"#);
    for ((x, y), lines) in &points {
        if lines.len() < 3 {
            continue;
        }
        let (cx, cy) = px([x.to_f64(), y.to_f64()]);
        let _ = writeln!(
            svg,
            r#"<circle class="point" cx="{cx:.2}" cy="{cy:.2}" r="4"><title>{}</title></circle>"#,
            lines.format(a.n() > 9)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}
