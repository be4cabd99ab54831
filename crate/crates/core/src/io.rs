//! Plain-text formats for point clouds, depth images and pose lists.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Values are
//! written with the shortest representation that parses back exactly.
//!
//! * point cloud: one point per line, `x y z` or `x y z label` with label
//!   `1` (object) or `0` (background); labels must be all present or all
//!   absent.
//! * depth image: header line `w h fx fy cx cy`, then `w·h` depth values in
//!   row-major order, any number per line.
//! * poses: one pose per line, 9 row-major rotation entries, 3 translation
//!   values, 3 sizes, optionally followed by `asymmetric` or `symmetric`.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};

use crate::augment::{DepthImage, Intrinsics, Label, PointCloud, Pose};
use crate::error::{Error, Result};
use crate::fvr::SymmetryClass;
use crate::real::Real;
use crate::so3::RotationMatrix;

/// Largest deviation from orthonormality that is repaired (by projecting to
/// the nearest rotation) rather than rejected, for rounded input files.
pub const ROTATION_REPAIR_TOL: f64 = 1e-4;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number<T: Real>(tok: &str, line: usize) -> Result<T> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{tok}` is not finite")));
    }
    Ok(T::lit(v))
}

fn push_num<T: Real>(out: &mut String, v: T) {
    let _ = write!(out, "{}", v.as_f64());
}

fn push_row<T: Real>(out: &mut String, values: &[T]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        push_num(out, *v);
    }
}

pub fn parse_point_cloud<T: Real>(text: &str) -> Result<PointCloud<T>> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut labelled: Option<bool> = None;
    for (line, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let has_label = match toks.len() {
            3 => false,
            4 => true,
            n => return Err(parse_err(line, format!("expected 3 or 4 values, found {n}"))),
        };
        if *labelled.get_or_insert(has_label) != has_label {
            return Err(parse_err(line, "labels must be given for every point or for none"));
        }
        points.push(Vector3::new(
            number(toks[0], line)?,
            number(toks[1], line)?,
            number(toks[2], line)?,
        ));
        if has_label {
            let label = toks[3]
                .parse::<u8>()
                .ok()
                .and_then(Label::from_u8)
                .ok_or_else(|| parse_err(line, format!("label `{}` is not 0 or 1", toks[3])))?;
            labels.push(label);
        }
    }
    if labelled == Some(true) {
        PointCloud::with_labels(points, labels)
    } else {
        PointCloud::new(points)
    }
}

pub fn write_point_cloud<T: Real>(cloud: &PointCloud<T>) -> String {
    let mut out = String::new();
    for (i, p) in cloud.points().iter().enumerate() {
        push_row(&mut out, p.as_slice());
        if let Some(labels) = cloud.labels() {
            let _ = write!(out, " {}", labels[i].as_u8());
        }
        out.push('\n');
    }
    out
}

pub fn parse_depth_image<T: Real>(text: &str) -> Result<DepthImage<T>> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 6 {
        return Err(parse_err(hline, "header must be `w h fx fy cx cy`"));
    }
    let dim = |tok: &str| {
        tok.parse::<usize>()
            .map_err(|_| parse_err(hline, format!("`{tok}` is not an image dimension")))
    };
    let (w, h) = (dim(toks[0])?, dim(toks[1])?);
    let intrinsics = Intrinsics {
        fx: number(toks[2], hline)?,
        fy: number(toks[3], hline)?,
        cx: number(toks[4], hline)?,
        cy: number(toks[5], hline)?,
    };
    let mut depth = Vec::with_capacity(w.saturating_mul(h).min(1 << 24));
    let mut last = hline;
    for (line, l) in lines {
        last = line;
        for tok in l.split_whitespace() {
            depth.push(number(tok, line)?);
        }
    }
    if depth.len() != w * h {
        return Err(parse_err(
            last,
            format!("expected {} depth values, found {}", w * h, depth.len()),
        ));
    }
    DepthImage::new(w, h, depth, intrinsics)
}

pub fn write_depth_image<T: Real>(d: &DepthImage<T>) -> String {
    let k = d.intrinsics();
    let mut out = format!("{} {} ", d.width(), d.height());
    push_row(&mut out, &[k.fx, k.fy, k.cx, k.cy]);
    out.push('\n');
    for row in d.depth().chunks(d.width()) {
        push_row(&mut out, row);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseRecord<T: Real> {
    pub pose: Pose<T>,
    pub symmetry: Option<SymmetryClass>,
}

fn rotation_from_text<T: Real>(m: Matrix3<T>, line: usize) -> Result<RotationMatrix<T>> {
    if let Ok(r) = RotationMatrix::new(m) {
        return Ok(r);
    }
    let gram = m.transpose() * m - Matrix3::identity();
    let off = gram.iter().fold(0.0f64, |a, v| a.max(v.as_f64().abs()));
    if off <= ROTATION_REPAIR_TOL && m.determinant() > T::zero() {
        return RotationMatrix::nearest(&m);
    }
    Err(parse_err(line, "rotation is not orthonormal with determinant +1"))
}

pub fn parse_poses<T: Real>(text: &str) -> Result<Vec<PoseRecord<T>>> {
    content_lines(text)
        .map(|(line, l)| {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let symmetry = match toks.len() {
                15 => None,
                16 => Some(match toks[15] {
                    "asymmetric" => SymmetryClass::Asymmetric,
                    "symmetric" => SymmetryClass::AxisSymmetric,
                    t => return Err(parse_err(line, format!("unknown symmetry `{t}`"))),
                }),
                n => return Err(parse_err(line, format!("expected 15 or 16 fields, found {n}"))),
            };
            let v = toks[..15]
                .iter()
                .map(|t| number::<T>(t, line))
                .collect::<Result<Vec<T>>>()?;
            let r = rotation_from_text(Matrix3::from_row_slice(&v[..9]), line)?;
            let pose = Pose::new(
                r,
                Vector3::new(v[9], v[10], v[11]),
                Vector3::new(v[12], v[13], v[14]),
            )
            .map_err(|e| parse_err(line, e.to_string()))?;
            Ok(PoseRecord { pose, symmetry })
        })
        .collect()
}

pub fn write_poses<T: Real>(records: &[PoseRecord<T>]) -> String {
    let mut out = String::new();
    for rec in records {
        let p = &rec.pose;
        push_row(&mut out, &p.r.to_row_major());
        out.push(' ');
        push_row(&mut out, p.t.as_slice());
        out.push(' ');
        push_row(&mut out, p.size.as_slice());
        match rec.symmetry {
            Some(SymmetryClass::Asymmetric) => out.push_str(" asymmetric"),
            Some(SymmetryClass::AxisSymmetric) => out.push_str(" symmetric"),
            None => {}
        }
        out.push('\n');
    }
    out
}
