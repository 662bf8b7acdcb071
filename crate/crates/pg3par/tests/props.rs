//! Randomized invariants of the line-geometry core and the spread
//! constructions, shrunk to minimal counterexamples on failure.

use nalgebra::Vector3;
use pg3par::clifford::{act_left, act_right, class_of, parallel, CliffordSide};
use pg3par::lines::{line_through, AffineLine, OrientedPlueckerLine, ProjectivePoint, SphereCoords};
use pg3par::parallelism::GroupCopyParams;
use pg3par::quat::{Quaternion, UnitQuaternion};
use pg3par::spreads::{RotationalSpread, SpreadProfile};
use proptest::prelude::*;

fn vec3(range: f64) -> impl Strategy<Value = Vector3<f64>> {
    prop::array::uniform3(-range..range).prop_map(Vector3::from)
}

fn unit_vec3() -> impl Strategy<Value = Vector3<f64>> {
    vec3(1.0)
        .prop_filter("away from the origin", |v| v.norm() > 0.3)
        .prop_map(|v| v.normalize())
}

fn unit_quaternion() -> impl Strategy<Value = UnitQuaternion> {
    prop::array::uniform4(-1.0..1.0f64)
        .prop_filter("away from the origin", |v| {
            (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt() > 0.3
        })
        .prop_map(|v| {
            UnitQuaternion::new(Quaternion::new(v[0], v[1], v[2], v[3])).expect("nonzero")
        })
}

fn random_line() -> impl Strategy<Value = OrientedPlueckerLine> {
    (vec3(10.0), vec3(10.0))
        .prop_filter("distinct points", |(p, q)| (p - q).norm() > 1e-3)
        .prop_map(|(p, q)| {
            line_through(&ProjectivePoint::from_affine(p), &ProjectivePoint::from_affine(q))
                .expect("distinct points span a line")
        })
}

fn log_radius() -> impl Strategy<Value = f64> {
    (-2.0..2.0f64).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constructed_lines_lie_on_the_quadric(l in random_line()) {
        prop_assert!(l.quadric_residual() <= 1e-10);
        let s = l.klein_split();
        prop_assert!((s.x.norm() - 1.0).abs() <= 1e-12);
        prop_assert!((s.y.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sphere_pairs_roundtrip_through_lines(x in unit_vec3(), y in unit_vec3()) {
        let coords = SphereCoords::new(x, y).unwrap();
        let back = coords.klein_merge().klein_split();
        prop_assert!(coords.distance(&back) <= 1e-12);
    }

    #[test]
    fn reversal_is_antipodal_in_both_factors(l in random_line()) {
        let s = l.klein_split();
        let r = l.reverse().klein_split();
        prop_assert!(s.antipode().distance(&r) <= 1e-12);
    }

    #[test]
    fn incidence_pairing_is_symmetric_and_vanishes_on_the_diagonal(
        l in random_line(),
        m in random_line(),
    ) {
        prop_assert!((l.incidence_pairing(&m) - m.incidence_pairing(&l)).abs() <= 1e-12);
        prop_assert!(l.incidence_pairing(&l).abs() <= 1e-12);
    }

    #[test]
    fn one_sided_actions_are_homomorphisms(
        a in unit_quaternion(),
        b in unit_quaternion(),
        l in random_line(),
    ) {
        prop_assert!(act_left(a, &act_left(b, &l)).approx_eq(&act_left(a * b, &l), 1e-9));
        prop_assert!(act_right(a, &act_right(b, &l)).approx_eq(&act_right(b * a, &l), 1e-9));
    }

    #[test]
    fn one_sided_actions_fix_their_own_anchor(
        a in unit_quaternion(),
        l in random_line(),
    ) {
        // The left action fixes the split coordinate that anchors Left
        // classes, so it moves lines within their Left class (and likewise
        // on the other side).
        let moved = act_left(a, &l);
        prop_assert!(parallel(&l, &moved, CliffordSide::Left));
        let moved = act_right(a, &l);
        prop_assert!(parallel(&l, &moved, CliffordSide::Right));
    }

    #[test]
    fn class_anchors_are_unit_vectors(l in random_line()) {
        for side in [CliffordSide::Left, CliffordSide::Right] {
            let class = class_of(&l, side);
            prop_assert!((class.anchor.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn spread_lines_are_members(c in 0.2..5.0f64, r in log_radius(), theta in 0.0..6.2f64) {
        let spread = RotationalSpread::new(SpreadProfile::complex(c).unwrap(), true).unwrap();
        let line = spread.spread_line(r, theta).unwrap();
        let hit = spread.contains(&line.to_pluecker());
        prop_assert!(hit.member, "residual {}", hit.residual);
    }

    #[test]
    fn coverage_is_rotation_invariant_about_the_axis(
        c in 0.2..5.0f64,
        r in log_radius(),
        z in -20.0..20.0f64,
        phi in 0.0..6.2f64,
    ) {
        let spread = RotationalSpread::new(SpreadProfile::complex(c).unwrap(), true).unwrap();
        let p = Vector3::new(r, 0.0, z);
        let q = Vector3::new(r * phi.cos(), r * phi.sin(), z);
        let a = spread.coverage_count(p).unwrap();
        let b = spread.coverage_count(q).unwrap();
        prop_assert_eq!(a.count(), b.count());
        for (ra, rb) in a.roots.iter().zip(b.roots.iter()) {
            prop_assert!((ra.r - rb.r).abs() <= 1e-9 * (1.0 + ra.r));
        }
    }

    #[test]
    fn profile_serialization_roundtrips(c in 0.2..5.0f64) {
        let profile = SpreadProfile::complex(c).unwrap();
        let json = serde_json::to_string(&profile).unwrap();
        let back: SpreadProfile = serde_json::from_str(&json).unwrap();
        for r in [0.1, 1.0, 10.0] {
            prop_assert_eq!(profile.slope(r), back.slope(r));
            prop_assert_eq!(profile.center(r), back.center(r));
        }
    }

    #[test]
    fn group_copy_maps_invert(s in 0.2..5.0f64, t in -3.0..3.0f64, n in unit_vec3(), l in random_line()) {
        let copy = GroupCopyParams::new(s, t).unwrap();
        let roundtrip = copy.inverse_class_map(&n).apply(&copy.class_map(&n).apply(&l));
        prop_assert!(roundtrip.approx_eq(&l, 1e-9));
    }

    #[test]
    fn affine_conversion_roundtrips(l in random_line()) {
        let back = AffineLine::from_pluecker(&l).to_pluecker();
        prop_assert!(back.approx_eq(&l, 1e-9));
    }
}
