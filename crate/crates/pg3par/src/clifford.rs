//! Left and right Clifford parallelisms.
//!
//! Identifying 4-space with the quaternions, left multiplications `q ↦ aq`
//! act on an oriented line's split coordinates by fixing one unit vector and
//! rotating the other; right multiplications `q ↦ qb` do the opposite. The
//! orbit structure partitions oriented lines into classes indexed by the
//! fixed coordinate — the class *anchor*. Which split factor belongs to which
//! side, and whether the moving factor rotates by the quaternion or by its
//! conjugate, is calibrated empirically once and frozen (see
//! [`action_calibration`]); the recorded convention is covered by a
//! regression fixture.

use crate::lines::{LineMap, OrientedPlueckerLine, ProjectiveMap, SphereCoords};
use crate::quat::{Isometry4, UnitQuaternion};
use crate::sampling::CounterRng;
use crate::sphere::angular_distance;
use nalgebra::{Matrix4, Vector3};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CliffordSide {
    Left,
    Right,
}

impl CliffordSide {
    pub fn other(&self) -> Self {
        match self {
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }
}

/// One parallel class: all oriented lines whose side-fixed split coordinate
/// equals `anchor`. With `oriented = false`, antipodal anchors label the same
/// class of ordinary lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClassJson", into = "ClassJson")]
pub struct CliffordClass {
    pub side: CliffordSide,
    pub anchor: Vector3<f64>,
    pub oriented: bool,
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    side: CliffordSide,
    anchor: [f64; 3],
    oriented: bool,
}

impl TryFrom<ClassJson> for CliffordClass {
    type Error = crate::Error;
    fn try_from(j: ClassJson) -> crate::Result<Self> {
        let anchor = Vector3::from_row_slice(&j.anchor);
        let n = anchor.norm();
        if n < 1e-12 {
            return Err(crate::Error::ZeroVector { norm: n });
        }
        Ok(Self { side: j.side, anchor: anchor / n, oriented: j.oriented })
    }
}

impl From<CliffordClass> for ClassJson {
    fn from(c: CliffordClass) -> Self {
        Self {
            side: c.side,
            anchor: [c.anchor.x, c.anchor.y, c.anchor.z],
            oriented: c.oriented,
        }
    }
}

/// Image of a line under the projective map induced by `q ↦ a·q`.
pub fn act_left(a: UnitQuaternion, l: &OrientedPlueckerLine) -> OrientedPlueckerLine {
    LineMap::from_projective(&ProjectiveMap::from_isometry4(&Isometry4::from_left(a))).apply(l)
}

/// Image of a line under the projective map induced by `q ↦ q·b`.
pub fn act_right(b: UnitQuaternion, l: &OrientedPlueckerLine) -> OrientedPlueckerLine {
    LineMap::from_projective(&ProjectiveMap::from_isometry4(&Isometry4::from_right(b))).apply(l)
}

/// Which split coordinate of [`SphereCoords`] a one-sided action fixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitCoord {
    X,
    Y,
}

impl SplitCoord {
    pub fn pick(&self, c: &SphereCoords) -> Vector3<f64> {
        match self {
            Self::X => c.x,
            Self::Y => c.y,
        }
    }

    pub fn other(&self) -> Self {
        match self {
            Self::X => Self::Y,
            Self::Y => Self::X,
        }
    }
}

/// Empirical convention binding the two split factors to the two one-sided
/// actions: which coordinate each action fixes, and whether the moving
/// coordinate rotates by the sandwich of the quaternion itself or of its
/// conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionCalibration {
    pub left_fixed: SplitCoord,
    pub right_fixed: SplitCoord,
    /// Moving coordinate of `act_left` rotates by `rotation3` of the
    /// conjugate quaternion (rather than the quaternion itself).
    pub left_conjugated: bool,
    /// Same flag for `act_right`.
    pub right_conjugated: bool,
}

/// Measures, on a fixed internal sample, which coordinate the action fixes
/// and how the other one rotates. Panics only if the action fails to be a
/// product action at all, which would mean the line maps are broken.
fn calibrate(act: fn(UnitQuaternion, &OrientedPlueckerLine) -> OrientedPlueckerLine)
-> (SplitCoord, bool) {
    const SAMPLES: u64 = 16;
    let samples: Vec<(UnitQuaternion, SphereCoords, SphereCoords)> = (0..SAMPLES)
        .map(|i| {
            let mut rng = CounterRng::new(0xC11F_F0CD, i);
            let [w, x, y, z] = rng.unit_4vector();
            let q = UnitQuaternion::new(crate::quat::Quaternion::new(w, x, y, z)).unwrap();
            let l = crate::lines::sample_uniform_line(&mut rng);
            (q, l.klein_split(), act(q, &l).klein_split())
        })
        .collect();

    let mut drift_x: f64 = 0.0;
    let mut drift_y: f64 = 0.0;
    for (_, before, after) in &samples {
        drift_x = drift_x.max((after.x - before.x).norm());
        drift_y = drift_y.max((after.y - before.y).norm());
    }
    let fixed = if drift_x < drift_y { SplitCoord::X } else { SplitCoord::Y };
    assert!(
        drift_x.min(drift_y) <= 1e-9 && drift_x.max(drift_y) > 0.1,
        "one-sided action does not fix a split coordinate (drifts {drift_x:.2e}, {drift_y:.2e})"
    );

    let moving = fixed.other();
    let mut plain_err: f64 = 0.0; // moving coordinate vs rotation3(q)
    let mut conj_err: f64 = 0.0; // moving coordinate vs rotation3(q̄)
    for (q, before, after) in &samples {
        let (mb, ma) = (moving.pick(before), moving.pick(after));
        plain_err = plain_err.max((q.rotation3() * mb - ma).norm());
        conj_err = conj_err.max((q.conjugate().rotation3() * mb - ma).norm());
    }
    let conjugated = conj_err < plain_err;
    assert!(
        plain_err.min(conj_err) <= 1e-9,
        "moving coordinate is not a sandwich rotation (errors {plain_err:.2e}, {conj_err:.2e})"
    );
    (fixed, conjugated)
}

/// The calibration, computed once on first use.
pub fn action_calibration() -> &'static ActionCalibration {
    static CAL: OnceLock<ActionCalibration> = OnceLock::new();
    CAL.get_or_init(|| {
        let (left_fixed, left_conjugated) = calibrate(act_left);
        let (right_fixed, right_conjugated) = calibrate(act_right);
        assert_ne!(left_fixed, right_fixed, "both actions fix the same coordinate");
        ActionCalibration { left_fixed, right_fixed, left_conjugated, right_conjugated }
    })
}

/// The oriented Clifford class of `l` on the given side: anchor = the split
/// coordinate fixed by that side's action.
pub fn class_of(l: &OrientedPlueckerLine, side: CliffordSide) -> CliffordClass {
    let cal = action_calibration();
    let fixed = match side {
        CliffordSide::Left => cal.left_fixed,
        CliffordSide::Right => cal.right_fixed,
    };
    CliffordClass { side, anchor: fixed.pick(&l.klein_split()), oriented: true }
}

/// Anchor comparison tolerance (angular); anchors are one linear map away
/// from normalized input.
pub const ANCHOR_TOL: f64 = 1e-8;

/// True iff the two oriented lines are side-parallel.
pub fn parallel(a: &OrientedPlueckerLine, b: &OrientedPlueckerLine, side: CliffordSide) -> bool {
    angular_distance(&class_of(a, side).anchor, &class_of(b, side).anchor) <= ANCHOR_TOL
}

/// Image of a line under coordinate-wise quaternion conjugation — the linear
/// involution diag(1, −1, −1, −1) of 4-space. Exchanges the left and right
/// class structures.
pub fn conjugation_image(l: &OrientedPlueckerLine) -> OrientedPlueckerLine {
    static MAP: OnceLock<LineMap> = OnceLock::new();
    MAP.get_or_init(|| {
        let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, -1.0, -1.0));
        LineMap::from_projective(&ProjectiveMap::from_matrix(m).expect("involution"))
    })
    .apply(l)
}
