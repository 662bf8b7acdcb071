//! Quaternion algebra and the rotations of 3- and 4-space it induces.
//!
//! Real 4-space is identified with the quaternions, `(w,x,y,z) ↔ w + xi + yj + zk`.
//! A pair of unit quaternions `(a, b)` acts by `q ↦ a·q·b`; these maps exhaust
//! the rotation group of 4-space, and `(a, b)`, `(−a, −b)` give the same map.
//! One-sided multiplications `q ↦ aq` and `q ↦ qb` generate the two commuting
//! normal factors. On imaginary quaternions the sandwich `v ↦ u·v·ū` realizes
//! every rotation of 3-space.

use crate::error::{Error, Result};
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use std::ops::{Add, Mul, Neg, Sub};

/// Quaternion `w + x·i + y·j + z·k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_parts(scalar: f64, imag: Vector3<f64>) -> Self {
        Self::new(scalar, imag.x, imag.y, imag.z)
    }

    /// Coordinates in the order (w, x, y, z), matching homogeneous point coords.
    pub fn from_vector4(v: Vector4<f64>) -> Self {
        Self::new(v.x, v.y, v.z, v.w)
    }

    pub fn as_vector4(&self) -> Vector4<f64> {
        Vector4::new(self.w, self.x, self.y, self.z)
    }

    pub fn imag(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_squared(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(&self) -> Result<UnitQuaternion> {
        UnitQuaternion::new(*self)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    /// Hamilton product.
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.w + q.w, self.x + q.x, self.y + q.y, self.z + q.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.w - q.w, self.x - q.x, self.y - q.y, self.z - q.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scaled(-1.0)
    }
}

/// Quaternion of norm one. Products are not re-normalized; call
/// [`UnitQuaternion::renormalized`] after composing long chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion(Quaternion);

impl UnitQuaternion {
    pub const ONE: Self = Self(Quaternion::ONE);
    pub const I: Self = Self(Quaternion::I);
    pub const J: Self = Self(Quaternion::J);
    pub const K: Self = Self(Quaternion::K);

    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.norm();
        if n < 1e-12 {
            return Err(Error::ZeroQuaternion { norm: n });
        }
        Ok(Self(q.scaled(1.0 / n)))
    }

    /// Rotation of 3-space by `angle` about `axis` (need not be unit).
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Result<Self> {
        let n = axis.norm();
        if n < 1e-12 {
            return Err(Error::ZeroVector { norm: n });
        }
        let (s, c) = (0.5 * angle).sin_cos();
        Ok(Self(Quaternion::from_parts(c, axis * (s / n))))
    }

    /// Some rotation carrying unit vector `from` to unit vector `to`.
    pub fn rotation_between(from: Vector3<f64>, to: Vector3<f64>) -> Self {
        let dot = from.dot(&to);
        if dot < -1.0 + 1e-12 {
            // Antipodal: half-turn about any axis orthogonal to `from`.
            let pick = if from.x.abs() < 0.9 {
                Vector3::x()
            } else {
                Vector3::y()
            };
            let axis = from.cross(&pick).normalize();
            return Self(Quaternion::from_parts(0.0, axis));
        }
        let q = Quaternion::from_parts(1.0 + dot, from.cross(&to));
        Self(q.scaled(1.0 / q.norm()))
    }

    pub fn as_quaternion(&self) -> Quaternion {
        self.0
    }

    /// Inverse rotation.
    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn renormalized(&self) -> Self {
        Self(self.0.scaled(1.0 / self.0.norm()))
    }

    /// Sandwich action `v ↦ u·v·ū` on imaginary quaternions.
    pub fn rotate_vector(&self, v: Vector3<f64>) -> Vector3<f64> {
        (self.0 * Quaternion::from_parts(0.0, v) * self.0.conjugate()).imag()
    }

    /// Matrix of the sandwich action: the image of `u` under the double
    /// covering of the rotation group of 3-space.
    pub fn rotation3(&self) -> Matrix3<f64> {
        let Quaternion { w, x, y, z } = self.0;
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, rhs: UnitQuaternion) -> UnitQuaternion {
        UnitQuaternion(self.0 * rhs.0)
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion(-self.0)
    }
}

/// Rotation of 4-space `q ↦ left·q·right`, stored as a canonical pair:
/// the first nonzero component of `left` is positive (flipping both
/// components preserves the map).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry4 {
    left: UnitQuaternion,
    right: UnitQuaternion,
}

impl Isometry4 {
    pub fn new(left: UnitQuaternion, right: UnitQuaternion) -> Self {
        let l = left.as_quaternion();
        let flip = [l.w, l.x, l.y, l.z]
            .iter()
            .find(|c| c.abs() > 1e-12)
            .is_some_and(|c| *c < 0.0);
        if flip {
            Self { left: -left, right: -right }
        } else {
            Self { left, right }
        }
    }

    pub fn identity() -> Self {
        Self::new(UnitQuaternion::ONE, UnitQuaternion::ONE)
    }

    /// Left multiplication `q ↦ a·q`.
    pub fn from_left(a: UnitQuaternion) -> Self {
        Self::new(a, UnitQuaternion::ONE)
    }

    /// Right multiplication `q ↦ q·b`.
    pub fn from_right(b: UnitQuaternion) -> Self {
        Self::new(UnitQuaternion::ONE, b)
    }

    pub fn left(&self) -> UnitQuaternion {
        self.left
    }

    pub fn right(&self) -> UnitQuaternion {
        self.right
    }

    pub fn apply(&self, q: Quaternion) -> Quaternion {
        self.left.as_quaternion() * q * self.right.as_quaternion()
    }

    /// `self ∘ other` as maps of 4-space.
    pub fn compose(&self, other: &Isometry4) -> Self {
        Self::new(self.left * other.left, other.right * self.right)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.left.conjugate(), self.right.conjugate())
    }

    /// The 4×4 matrix acting on coordinates (w, x, y, z): orthogonal with
    /// determinant +1. Column j is the image of the j-th basis quaternion.
    pub fn as_matrix4(&self) -> Matrix4<f64> {
        let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
        Matrix4::from_columns(&basis.map(|e| self.apply(e).as_vector4()))
    }
}

impl Mul for Isometry4 {
    type Output = Isometry4;
    fn mul(self, rhs: Isometry4) -> Isometry4 {
        self.compose(&rhs)
    }
}
