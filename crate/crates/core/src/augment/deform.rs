//! Box-cage deformation `R·F(Rᵀ(P − T)) + T`.
//!
//! The cage is the object's 3D bounding box. `F` acts in the canonical frame:
//!
//! * face offsets: along each axis the segment `[−h, h]` is mapped affinely
//!   onto `[−h − δ₋, h + δ₊]`, so a point on a face moves exactly with it and
//!   interior points blend the two opposite faces;
//! * taper: each axis carries a scale factor for its two faces, linearly
//!   interpolated along the axis; it scales the two in-plane coordinates about
//!   the cage centre line. The three tapers are evaluated on the offset-stage
//!   coordinates and applied together, so moving a point along one axis never
//!   changes the scale applied to that axis and per-axis order is preserved.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PointCloud, Pose};
use crate::error::{invalid, Result};
use crate::real::Real;

/// Canonical axis-aligned cage, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformCage<T: Real> {
    half_extents: Vector3<T>,
}

impl<T: Real> DeformCage<T> {
    pub fn new(half_extents: Vector3<T>) -> Result<Self> {
        if half_extents.iter().any(|h| !(*h > T::zero()) || !h.is_finite()) {
            return Err(invalid("cage half extents must be positive"));
        }
        Ok(Self { half_extents })
    }

    /// The 3D bounding box of an object with the given pose size.
    pub fn from_pose(pose: &Pose<T>) -> Self {
        Self {
            half_extents: pose.size / T::lit(2.0),
        }
    }

    pub fn half_extents(&self) -> &Vector3<T> {
        &self.half_extents
    }

    pub fn contains(&self, p: &Vector3<T>, tol: T) -> bool {
        (0..3).all(|a| p[a].abs() <= self.half_extents[a] + tol)
    }

    /// Images of the eight cage corners under `params`.
    pub fn deformed_corners(&self, params: &DeformParams<T>) -> Vec<Vector3<T>> {
        let h = self.half_extents;
        let mut out = Vec::with_capacity(8);
        for sx in [-T::one(), T::one()] {
            for sy in [-T::one(), T::one()] {
                for sz in [-T::one(), T::one()] {
                    let c = Vector3::new(sx * h.x, sy * h.y, sz * h.z);
                    out.push(canonical_face_map(&c, self, params));
                }
            }
        }
        out
    }
}

/// Face offsets (m, along outward normals) and per-axis taper factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformParams<T: Real> {
    /// `[+x, −x, +y, −y, +z, −z]`
    pub face_offsets: [T; 6],
    /// Per axis: `[factor at the − face, factor at the + face]`.
    pub taper: [[T; 2]; 3],
}

impl<T: Real> DeformParams<T> {
    pub fn identity() -> Self {
        Self {
            face_offsets: [T::zero(); 6],
            taper: [[T::one(); 2]; 3],
        }
    }

    pub fn offset_plus(&self, axis: usize) -> T {
        self.face_offsets[2 * axis]
    }

    pub fn offset_minus(&self, axis: usize) -> T {
        self.face_offsets[2 * axis + 1]
    }

    /// Rejects fold-over: every deformed extent must stay positive and every
    /// taper factor must be positive.
    pub fn validate(&self, cage: &DeformCage<T>) -> Result<()> {
        if self.face_offsets.iter().any(|o| !o.is_finite()) {
            return Err(invalid("face offsets must be finite"));
        }
        for a in 0..3 {
            let extent = T::lit(2.0) * cage.half_extents[a] + self.offset_plus(a) + self.offset_minus(a);
            if !(extent > T::zero()) {
                return Err(invalid(format!("offsets fold axis {a} over")));
            }
        }
        if self
            .taper
            .iter()
            .flatten()
            .any(|f| !(*f > T::zero()) || !f.is_finite())
        {
            return Err(invalid("taper factors must be positive"));
        }
        Ok(())
    }
}

/// Sampling ranges for [`sample_deformation`].
///
/// Offsets are fractions of the half-extent of the face's axis, so any lower
/// bound above −1 keeps every axis from folding over regardless of the
/// object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformBounds {
    pub offset_fraction: (f64, f64),
    pub taper: (f64, f64),
}

impl Default for DeformBounds {
    fn default() -> Self {
        Self {
            offset_fraction: (-0.2, 0.2),
            taper: (0.8, 1.2),
        }
    }
}

impl DeformBounds {
    pub fn identity() -> Self {
        Self {
            offset_fraction: (0.0, 0.0),
            taper: (1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (olo, ohi) = self.offset_fraction;
        let (tlo, thi) = self.taper;
        if ![olo, ohi, tlo, thi].iter().all(|v| v.is_finite()) {
            return Err(invalid("deformation bounds must be finite"));
        }
        if olo > ohi || tlo > thi {
            return Err(invalid("deformation bounds are inverted"));
        }
        if olo <= -1.0 {
            return Err(invalid("offset fraction lower bound must exceed -1 (fold-over)"));
        }
        if tlo <= 0.0 {
            return Err(invalid("taper lower bound must be positive"));
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Seeded uniform draw of offsets and tapers within `bounds`.
pub fn sample_deformation<T: Real>(
    seed: u64,
    bounds: &DeformBounds,
    cage: &DeformCage<T>,
) -> Result<DeformParams<T>> {
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = DeformParams::identity();
    for (i, o) in params.face_offsets.iter_mut().enumerate() {
        *o = T::lit(draw(&mut rng, bounds.offset_fraction)) * cage.half_extents[i / 2];
    }
    for f in params.taper.iter_mut().flatten() {
        *f = T::lit(draw(&mut rng, bounds.taper));
    }
    Ok(params)
}

/// Applies `F` to a canonical-frame point.
pub fn canonical_face_map<T: Real>(
    p: &Vector3<T>,
    cage: &DeformCage<T>,
    params: &DeformParams<T>,
) -> Vector3<T> {
    let two = T::lit(2.0);
    let mut moved = Vector3::zeros();
    let mut centre = Vector3::zeros();
    let mut factor = Vector3::zeros();
    for a in 0..3 {
        let h = cage.half_extents[a];
        let (plus, minus) = (params.offset_plus(a), params.offset_minus(a));
        let t = (p[a] + h) / (two * h);
        // lo' + t·(hi' − lo') with lo' = −h − δ₋, hi' = h + δ₊, rearranged so
        // zero offsets reproduce the input bit for bit.
        moved[a] = p[a] + t * (plus + minus) - minus;
        centre[a] = (plus - minus) / two;
        let [f_lo, f_hi] = params.taper[a];
        let tc = t.clamp(T::zero(), T::one());
        factor[a] = f_lo + tc * (f_hi - f_lo);
    }
    Vector3::from_fn(|b, _| {
        let scale = (0..3).filter(|&a| a != b).fold(T::one(), |s, a| s * factor[a]);
        centre[b] + (moved[b] - centre[b]) * scale
    })
}

/// Deforms the object points of `cloud`; background points pass through.
/// An unlabelled cloud is treated as all object.
pub fn deform<T: Real>(
    cloud: &PointCloud<T>,
    pose: &Pose<T>,
    cage: &DeformCage<T>,
    params: &DeformParams<T>,
) -> Result<PointCloud<T>> {
    if cloud.is_empty() {
        return Err(invalid("cannot deform an empty cloud"));
    }
    params.validate(cage)?;
    Ok(cloud.map_object_points(|p| {
        let c = pose.to_canonical(p);
        pose.transform(&canonical_face_map(&c, cage, params))
    }))
}
