//! Oriented lines of real projective 3-space.
//!
//! A line is stored by its six Plücker coordinates `(p01, p02, p03, p23, p31,
//! p12)`, scaled to unit Euclidean norm; negating all six reverses the
//! orientation. Valid lines satisfy the Klein quadric relation
//! `p01·p23 + p02·p31 + p03·p12 = 0`.
//!
//! On the quadric, the linear change of coordinates `u = d + m`, `w = d − m`
//! (with `d = (p01,p02,p03)` the direction part and `m = (p23,p31,p12)` the
//! moment part) has `|u| = |w| = |p|`, so after normalization an oriented line
//! is exactly a pair of unit 3-vectors: the split used throughout this crate.

use crate::error::{Error, Result};
use crate::quat::Isometry4;
use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector4, Vector6};
use serde::{Deserialize, Serialize};

/// Tolerance for the Klein quadric residual accepted from external input;
/// constructed lines are snapped onto the quadric exactly.
pub const QUADRIC_INPUT_TOL: f64 = 1e-6;

/// Incidence threshold on unit-normalized data.
pub const INCIDENCE_TOL: f64 = 1e-8;

/// Below this direction-part norm (for `|p| = 1`) a line is taken to lie in
/// the plane at infinity.
pub const AT_INFINITY_TOL: f64 = 1e-8;

/// Point of projective 3-space: a unit homogeneous 4-vector `(x0, x1, x2, x3)`
/// with canonical sign (first component of magnitude above 1e-12 is positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    v: Vector4<f64>,
}

impl ProjectivePoint {
    pub fn from_homogeneous(v: Vector4<f64>) -> Result<Self> {
        let n = v.norm();
        if n < 1e-12 {
            return Err(Error::ZeroVector { norm: n });
        }
        let mut u = v / n;
        let flip = u.iter().find(|c| c.abs() > 1e-12).is_some_and(|c| *c < 0.0);
        if flip {
            u = -u;
        }
        Ok(Self { v: u })
    }

    /// Finite point (x, y, z) of the affine chart `x0 = 1`.
    pub fn from_affine(p: Vector3<f64>) -> Self {
        Self::from_homogeneous(Vector4::new(1.0, p.x, p.y, p.z)).expect("nonzero by construction")
    }

    /// Point at infinity in direction `d`.
    pub fn at_infinity(d: Vector3<f64>) -> Result<Self> {
        Self::from_homogeneous(Vector4::new(0.0, d.x, d.y, d.z))
    }

    pub fn coords(&self) -> Vector4<f64> {
        self.v
    }

    pub fn weight(&self) -> f64 {
        self.v.x
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.v.y, self.v.z, self.v.w)
    }
}

/// Oriented line in unit-normalized Plücker coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlueckerJson", into = "PlueckerJson")]
pub struct OrientedPlueckerLine {
    p: Vector6<f64>,
}

impl OrientedPlueckerLine {
    /// Accepts a raw six-tuple, enforcing the quadric within
    /// [`QUADRIC_INPUT_TOL`] and snapping exactly onto it.
    pub fn from_components(c: [f64; 6]) -> Result<Self> {
        let p = Vector6::from_row_slice(&c);
        let n = p.norm();
        if n < 1e-12 {
            return Err(Error::ZeroVector { norm: n });
        }
        let p = p / n;
        let residual = p[0] * p[3] + p[1] * p[4] + p[2] * p[5];
        if residual.abs() > QUADRIC_INPUT_TOL {
            return Err(Error::OffQuadric { residual, limit: QUADRIC_INPUT_TOL });
        }
        Self::from_dual_pair(
            Vector3::new(p[0], p[1], p[2]) + Vector3::new(p[3], p[4], p[5]),
            Vector3::new(p[0], p[1], p[2]) - Vector3::new(p[3], p[4], p[5]),
        )
    }

    /// Builds the line with split coordinates `(u/|u|, w/|w|)`; always exactly
    /// on the quadric. Both inputs must be nonzero.
    fn from_dual_pair(u: Vector3<f64>, w: Vector3<f64>) -> Result<Self> {
        let (nu, nw) = (u.norm(), w.norm());
        if nu < 1e-12 || nw < 1e-12 {
            return Err(Error::ZeroVector { norm: nu.min(nw) });
        }
        let x = u / nu;
        let y = w / nw;
        let d = (x + y) * 0.5;
        let m = (x - y) * 0.5;
        Ok(Self { p: Vector6::new(d.x, d.y, d.z, m.x, m.y, m.z) })
    }

    pub fn components(&self) -> [f64; 6] {
        [self.p[0], self.p[1], self.p[2], self.p[3], self.p[4], self.p[5]]
    }

    /// Direction part `(p01, p02, p03)`; vanishes exactly for lines in the
    /// plane at infinity.
    pub fn direction_part(&self) -> Vector3<f64> {
        Vector3::new(self.p[0], self.p[1], self.p[2])
    }

    /// Moment part `(p23, p31, p12)`.
    pub fn moment_part(&self) -> Vector3<f64> {
        Vector3::new(self.p[3], self.p[4], self.p[5])
    }

    pub fn quadric_residual(&self) -> f64 {
        self.direction_part().dot(&self.moment_part())
    }

    pub fn reverse(&self) -> Self {
        Self { p: -self.p }
    }

    /// Oriented equality within `tol` on the unit 6-vectors.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.p - other.p).norm() <= tol
    }

    /// Distance treating both orientations of `other` as equal.
    pub fn ordinary_distance(&self, other: &Self) -> f64 {
        (self.p - other.p).norm().min((self.p + other.p).norm())
    }

    /// Symmetric incidence pairing: zero iff the two lines meet (share a
    /// point or, equivalently, span a plane).
    pub fn incidence_pairing(&self, other: &Self) -> f64 {
        self.direction_part().dot(&other.moment_part())
            + other.direction_part().dot(&self.moment_part())
    }

    /// The pair of unit 3-vectors `(u, w) = (d + m, d − m)` identifying the
    /// oriented line; a bijection onto the product of two 2-spheres.
    pub fn klein_split(&self) -> SphereCoords {
        let d = self.direction_part();
        let m = self.moment_part();
        SphereCoords { x: (d + m).normalize(), y: (d - m).normalize() }
    }
}

/// Oriented line through two distinct points, oriented from `p` toward `q`
/// (using the canonical sign representatives).
pub fn line_through(p: &ProjectivePoint, q: &ProjectivePoint) -> Result<OrientedPlueckerLine> {
    let a = p.coords();
    let b = q.coords();
    let mut c = [0.0; 6];
    for (slot, (i, j)) in PAIR_INDEX.iter().enumerate() {
        c[slot] = a[*i] * b[*j] - a[*j] * b[*i];
    }
    let p6 = Vector6::from_row_slice(&c);
    let n = p6.norm();
    // |P ∧ Q| is the sine of the angle between unit representatives.
    if n < 1e-8 {
        return Err(Error::DegenerateLine { sep: n });
    }
    let p6 = p6 / n;
    OrientedPlueckerLine::from_dual_pair(
        Vector3::new(p6[0], p6[1], p6[2]) + Vector3::new(p6[3], p6[4], p6[5]),
        Vector3::new(p6[0], p6[1], p6[2]) - Vector3::new(p6[3], p6[4], p6[5]),
    )
}

/// Uniformly random oriented line: independent uniform split coordinates.
/// This is the invariant sampling measure used by all verifiers.
pub fn sample_uniform_line(rng: &mut crate::sampling::CounterRng) -> OrientedPlueckerLine {
    SphereCoords { x: rng.unit_vector(), y: rng.unit_vector() }.klein_merge()
}

/// True iff the point lies on the line (threshold [`INCIDENCE_TOL`] on
/// normalized data).
pub fn incident(p: &ProjectivePoint, l: &OrientedPlueckerLine) -> bool {
    let x0 = p.weight();
    let x = p.spatial();
    let d = l.direction_part();
    let m = l.moment_part();
    x.dot(&m).abs() <= INCIDENCE_TOL && (m * x0 - x.cross(&d)).norm() <= INCIDENCE_TOL
}

/// Split coordinates of an oriented line: a pair of unit 3-vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SphereCoordsJson", into = "SphereCoordsJson")]
pub struct SphereCoords {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
}

impl SphereCoords {
    pub fn new(x: Vector3<f64>, y: Vector3<f64>) -> Result<Self> {
        let (nx, ny) = (x.norm(), y.norm());
        if nx < 1e-12 || ny < 1e-12 {
            return Err(Error::ZeroVector { norm: nx.min(ny) });
        }
        Ok(Self { x: x / nx, y: y / ny })
    }

    /// Inverse of [`OrientedPlueckerLine::klein_split`]; the result lies on
    /// the quadric exactly.
    pub fn klein_merge(&self) -> OrientedPlueckerLine {
        OrientedPlueckerLine::from_dual_pair(self.x, self.y).expect("unit inputs")
    }

    /// Chordal distance on the product of spheres.
    pub fn distance(&self, other: &Self) -> f64 {
        ((self.x - other.x).norm_squared() + (self.y - other.y).norm_squared()).sqrt()
    }

    pub fn antipode(&self) -> Self {
        Self { x: -self.x, y: -self.y }
    }
}

/// Line in the affine picture of projective 3-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AffineLine {
    /// Ordinary line through `base` with unit direction `dir`.
    Finite { base: Vector3<f64>, dir: Vector3<f64> },
    /// Common line at infinity of the planes with unit normal `normal`; the
    /// sign of the normal carries the orientation.
    AtInfinity { normal: Vector3<f64> },
}

impl AffineLine {
    pub fn finite(base: Vector3<f64>, dir: Vector3<f64>) -> Result<Self> {
        let n = dir.norm();
        if n < 1e-12 {
            return Err(Error::ZeroVector { norm: n });
        }
        Ok(Self::Finite { base, dir: dir / n })
    }

    pub fn at_infinity(normal: Vector3<f64>) -> Result<Self> {
        let n = normal.norm();
        if n < 1e-12 {
            return Err(Error::ZeroVector { norm: n });
        }
        Ok(Self::AtInfinity { normal: normal / n })
    }

    pub fn reverse(&self) -> Self {
        match *self {
            Self::Finite { base, dir } => Self::Finite { base, dir: -dir },
            Self::AtInfinity { normal } => Self::AtInfinity { normal: -normal },
        }
    }

    /// Plücker coordinates: a finite line has direction part along `dir` and
    /// moment `base × dir`; the line at infinity with normal `n` is `(0; n)`.
    pub fn to_pluecker(&self) -> OrientedPlueckerLine {
        match *self {
            Self::Finite { base, dir } => {
                let m = base.cross(&dir);
                OrientedPlueckerLine::from_dual_pair(dir + m, dir - m).expect("unit direction")
            }
            Self::AtInfinity { normal } => {
                OrientedPlueckerLine::from_dual_pair(normal, -normal).expect("unit normal")
            }
        }
    }

    /// Affine form of a line; the finite base point is the foot of the
    /// perpendicular from the origin.
    pub fn from_pluecker(l: &OrientedPlueckerLine) -> Self {
        let d = l.direction_part();
        let m = l.moment_part();
        let nd = d.norm();
        if nd <= AT_INFINITY_TOL {
            Self::AtInfinity { normal: m.normalize() }
        } else {
            Self::Finite { base: d.cross(&m) / (nd * nd), dir: d / nd }
        }
    }

    /// Same line with the same orientation, within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.to_pluecker().approx_eq(&other.to_pluecker(), tol)
    }
}

/// Invertible projective transformation of 3-space, acting on homogeneous
/// coordinates `(x0, x1, x2, x3)`.
#[derive(Debug, Clone, Copy)]
pub struct ProjectiveMap {
    m: Matrix4<f64>,
}

impl ProjectiveMap {
    pub fn from_matrix(m: Matrix4<f64>) -> Result<Self> {
        let det = m.determinant();
        if det.abs() < 1e-12 * m.norm().powi(4).max(1e-300) {
            return Err(Error::SingularMap { det });
        }
        Ok(Self { m })
    }

    /// Affine map `x ↦ linear·x + shift` of the chart `x0 = 1`.
    pub fn from_affine(linear: Matrix3<f64>, shift: Vector3<f64>) -> Result<Self> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(&linear);
        m.fixed_view_mut::<3, 1>(1, 0).copy_from(&shift);
        Self::from_matrix(m)
    }

    pub fn from_isometry4(g: &Isometry4) -> Self {
        Self { m: g.as_matrix4() }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { m: self.m * other.m }
    }

    pub fn inverse(&self) -> Self {
        Self { m: self.m.try_inverse().expect("invertible by construction") }
    }

    pub fn apply_point(&self, p: &ProjectivePoint) -> ProjectivePoint {
        ProjectivePoint::from_homogeneous(self.m * p.coords()).expect("invertible map")
    }
}

/// Index pairs of the six Plücker slots, in storage order.
const PAIR_INDEX: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// Induced action of a projective map on oriented lines: the 6×6 exterior
/// square of the 4×4 matrix. Well defined on orientations because the
/// exterior square of `−M` equals that of `M`.
#[derive(Debug, Clone)]
pub struct LineMap {
    k: Matrix6<f64>,
}

impl LineMap {
    pub fn from_projective(map: &ProjectiveMap) -> Self {
        let m = map.matrix();
        let mut k = Matrix6::zeros();
        for (row, &(i, j)) in PAIR_INDEX.iter().enumerate() {
            for (col, &(a, b)) in PAIR_INDEX.iter().enumerate() {
                k[(row, col)] = m[(i, a)] * m[(j, b)] - m[(i, b)] * m[(j, a)];
            }
        }
        Self { k }
    }

    pub fn identity() -> Self {
        Self { k: Matrix6::identity() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { k: self.k * other.k }
    }

    pub fn apply(&self, l: &OrientedPlueckerLine) -> OrientedPlueckerLine {
        let p = self.k * Vector6::from_row_slice(&l.components());
        OrientedPlueckerLine::from_dual_pair(
            Vector3::new(p[0], p[1], p[2]) + Vector3::new(p[3], p[4], p[5]),
            Vector3::new(p[0], p[1], p[2]) - Vector3::new(p[3], p[4], p[5]),
        )
        .expect("image of a line under an invertible map")
    }
}

#[derive(Serialize, Deserialize)]
struct PlueckerJson {
    pluecker: [f64; 6],
}

impl TryFrom<PlueckerJson> for OrientedPlueckerLine {
    type Error = Error;
    fn try_from(j: PlueckerJson) -> Result<Self> {
        Self::from_components(j.pluecker)
    }
}

impl From<OrientedPlueckerLine> for PlueckerJson {
    fn from(l: OrientedPlueckerLine) -> Self {
        Self { pluecker: l.components() }
    }
}

#[derive(Serialize, Deserialize)]
struct SphereCoordsJson {
    x: [f64; 3],
    y: [f64; 3],
}

impl TryFrom<SphereCoordsJson> for SphereCoords {
    type Error = Error;
    fn try_from(j: SphereCoordsJson) -> Result<Self> {
        Self::new(Vector3::from_row_slice(&j.x), Vector3::from_row_slice(&j.y))
    }
}

impl From<SphereCoords> for SphereCoordsJson {
    fn from(c: SphereCoords) -> Self {
        Self { x: [c.x.x, c.x.y, c.x.z], y: [c.y.x, c.y.y, c.y.z] }
    }
}
