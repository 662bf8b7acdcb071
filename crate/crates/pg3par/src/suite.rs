//! Named verification battery tying the pieces together.
//!
//! Each criterion exercises one claim end to end — quaternion algebra,
//! the Klein coordinates, the two-sided product action, the exchange
//! involution, the spread axiom, recovery of the Clifford partition from the
//! unshifted orbit family, the oriented/ordinary dichotomy of the shifted
//! families, invariance groups, the scaling reduction of the copy
//! parameters, and regularity detection. Every check is a pure function of
//! its sample count and seed, so reports are reproducible byte for byte.

use crate::clifford::{self, CliffordSide};
use crate::lines::{line_through, sample_uniform_line, LineMap, ProjectivePoint, ProjectiveMap};
use crate::parallelism::{
    equivalence_reduction_check, GroupCopyParams, ParallelClass, Parallelism,
};
use crate::quat::{Isometry4, Quaternion, UnitQuaternion};
use crate::sampling::CounterRng;
use crate::sphere::angular_distance;
use crate::spreads::{RotationalSpread, SpreadProfile, TabulatedProfile};
use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Outcome of one named criterion. `detail` carries the measured extremes so
/// a failing run explains itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremSuiteReport {
    pub quick: bool,
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

fn result(name: &str, pass: bool, detail: String) -> CriterionResult {
    CriterionResult { name: name.to_string(), pass, detail }
}

fn random_quaternion(rng: &mut CounterRng) -> Quaternion {
    Quaternion::new(
        rng.uniform(-2.0, 2.0),
        rng.uniform(-2.0, 2.0),
        rng.uniform(-2.0, 2.0),
        rng.uniform(-2.0, 2.0),
    )
}

fn random_unit_quaternion(rng: &mut CounterRng) -> UnitQuaternion {
    let v = rng.unit_4vector();
    UnitQuaternion::new(Quaternion::new(v[0], v[1], v[2], v[3])).expect("unit sample")
}

/// Norm multiplicativity, the product anti-automorphism, and Klein-quadric
/// residuals of random line constructions.
pub fn quaternion_algebra(samples: u64, seed: u64) -> CriterionResult {
    let worst = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::new(seed, i);
            let p = random_quaternion(&mut rng);
            let q = random_quaternion(&mut rng);
            let scale = (p.norm() * q.norm()).max(1e-12);
            let norm_dev = (((p * q).norm() - p.norm() * q.norm()) / scale).abs();
            let anti_dev = ((p * q).conjugate() - q.conjugate() * p.conjugate()).norm() / scale;

            let a = Vector3::new(
                rng.uniform(-10.0, 10.0),
                rng.uniform(-10.0, 10.0),
                rng.uniform(-10.0, 10.0),
            );
            let b = Vector3::new(
                rng.uniform(-10.0, 10.0),
                rng.uniform(-10.0, 10.0),
                rng.uniform(-10.0, 10.0),
            );
            let quadric_a = line_through(
                &ProjectivePoint::from_affine(a),
                &ProjectivePoint::from_affine(b),
            )
            .map(|l| l.quadric_residual())
            .unwrap_or(0.0);
            let quadric_b = sample_uniform_line(&mut rng).quadric_residual();
            norm_dev.max(anti_dev).max(quadric_a).max(quadric_b)
        })
        .reduce(|| 0.0, f64::max);
    result(
        "quaternion_algebra",
        worst <= 1e-10,
        format!("{samples} samples, worst deviation {worst:.3e} (limit 1e-10)"),
    )
}

/// Split/merge round-trips and antipodality of orientation reversal.
pub fn klein_roundtrip(samples: u64, seed: u64) -> CriterionResult {
    let worst = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::new(seed, i);
            let l = sample_uniform_line(&mut rng);
            let split = l.klein_split();
            let merged = split.klein_merge();
            let round: f64 = l
                .components()
                .iter()
                .zip(merged.components().iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();

            let reversed = l.reverse().klein_split();
            let anti = (reversed.x + split.x).norm().max((reversed.y + split.y).norm());

            let x = rng.unit_vector();
            let y = rng.unit_vector();
            let sc = crate::lines::SphereCoords::new(x, y).expect("unit inputs");
            let back = sc.klein_merge().klein_split();
            let sphere_round = (back.x - x).norm().max((back.y - y).norm());

            round.max(anti).max(sphere_round)
        })
        .reduce(|| 0.0, f64::max);
    result(
        "klein_roundtrip",
        worst <= 1e-10,
        format!("{samples} samples, worst deviation {worst:.3e} (limit 1e-10)"),
    )
}

/// One-sided multiplications fix one split coordinate and rotate the other by
/// the stored calibrated rotation.
pub fn product_action(samples: u64, seed: u64) -> CriterionResult {
    let cal = clifford::action_calibration();
    let worst = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::new(seed, i);
            let a = random_unit_quaternion(&mut rng);
            let b = random_unit_quaternion(&mut rng);
            let l = sample_uniform_line(&mut rng);
            let before = l.klein_split();

            let mut worst: f64 = 0.0;
            for (fixed, conj, q, moved) in [
                (cal.left_fixed, cal.left_conjugated, a, clifford::act_left(a, &l)),
                (cal.right_fixed, cal.right_conjugated, b, clifford::act_right(b, &l)),
            ] {
                let after = moved.klein_split();
                let fixed_dev = (fixed.pick(&after) - fixed.pick(&before)).norm();
                let rot = if conj { q.conjugate().rotation3() } else { q.rotation3() };
                let move_dev =
                    (fixed.other().pick(&after) - rot * fixed.other().pick(&before)).norm();
                worst = worst.max(fixed_dev).max(move_dev);
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    result(
        "product_action",
        worst <= 1e-9,
        format!(
            "{samples} samples, worst deviation {worst:.3e} (limit 1e-9); calibration: \
             left fixes {:?} ({}conjugated), right fixes {:?} ({}conjugated)",
            cal.left_fixed,
            if cal.left_conjugated { "" } else { "not " },
            cal.right_fixed,
            if cal.right_conjugated { "" } else { "not " },
        ),
    )
}

/// Coordinate conjugation swaps the left and right class structures: lines
/// sharing a right anchor map to lines sharing a left anchor.
pub fn conjugation_exchange(samples: u64, seed: u64) -> CriterionResult {
    let worst = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = CounterRng::new(seed, i);
            let l1 = sample_uniform_line(&mut rng);
            let b = random_unit_quaternion(&mut rng);
            let l2 = clifford::act_right(b, &l1);

            let r1 = clifford::class_of(&l1, CliffordSide::Right).anchor;
            let r2 = clifford::class_of(&l2, CliffordSide::Right).anchor;
            let precondition = (r1 - r2).norm();

            let left1 = clifford::class_of(&clifford::conjugation_image(&l1), CliffordSide::Left);
            let left2 = clifford::class_of(&clifford::conjugation_image(&l2), CliffordSide::Left);
            let exchanged = (left1.anchor - left2.anchor).norm();
            precondition.max(exchanged)
        })
        .reduce(|| 0.0, f64::max);
    result(
        "conjugation_exchange",
        worst <= 1e-9,
        format!("{samples} right-parallel pairs, worst left-anchor spread {worst:.3e} (limit 1e-9)"),
    )
}

/// Oscillating-center profile sampled from `f = 1/r`, `g = 10·sin(5r)`:
/// close enough to a spread to be plausible, far enough to break the axiom.
pub fn oscillating_center_profile() -> SpreadProfile {
    let r: Vec<f64> = (1..=1200).map(|k| 0.05 * k as f64).collect();
    let f: Vec<f64> = r.iter().map(|r| 1.0 / r).collect();
    let g: Vec<f64> = r.iter().map(|r| 10.0 * (5.0 * r).sin()).collect();
    SpreadProfile::Tabulated(TabulatedProfile::new(r, f, g, [-1.0, -1.0]).expect("valid grid"))
}

/// Closed-form spreads cover every point exactly once; the engineered bad
/// profile does not and yields witnesses.
pub fn spread_axiom(good_samples: u64, bad_samples: u64, seed: u64) -> CriterionResult {
    let mut pass = true;
    let mut detail = String::new();
    for (k, c) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let spread = RotationalSpread::new(SpreadProfile::complex(c).expect("positive"), true)
            .expect("valid");
        let report = spread.verify_spread(good_samples, seed.wrapping_add(k as u64));
        pass &= report.pass;
        detail.push_str(&format!(
            "slope constant {c}: {} samples, histogram {:?}; ",
            good_samples, report.histogram
        ));
    }
    let bad = RotationalSpread::new(oscillating_center_profile(), true).expect("valid");
    let bad_report = bad.verify_spread(bad_samples, seed);
    let bad_fails = !bad_report.pass && !bad_report.witnesses.is_empty();
    pass &= bad_fails;
    detail.push_str(&format!(
        "oscillating center: {} samples, multiplicities {:?}, {} witnesses",
        bad_samples,
        bad_report.histogram.keys().collect::<Vec<_>>(),
        bad_report.witnesses.len()
    ));
    result("spread_axiom", pass, detail)
}

/// The unshifted orbit family of the unit complex spread induces the same
/// oriented partition as one exact Clifford parallelism: the resolved orbit
/// axis equals the fixed split anchor.
pub fn clifford_recovery(samples: u64, seed: u64) -> CriterionResult {
    let base = RotationalSpread::new(SpreadProfile::complex(1.0).expect("positive"), true)
        .expect("valid");
    let resolver =
        Parallelism::rotation_orbit(base, GroupCopyParams::identity()).resolver();
    let worst = (0..samples)
        .into_par_iter()
        .map(|i| {
            let l = sample_uniform_line(&mut CounterRng::new(seed, i));
            match resolver.resolve(&l) {
                Ok(res) if res.multiplicity() == 1 => {
                    let ParallelClass::Orbit(o) = res.hits[0].class else {
                        return f64::INFINITY;
                    };
                    let anchor = clifford::class_of(&l, CliffordSide::Right).anchor;
                    angular_distance(&o.axis_vec(), &anchor)
                }
                _ => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);
    result(
        "clifford_recovery",
        worst <= 1e-4,
        format!(
            "{samples} lines, worst axis/anchor disagreement {worst:.3e} (limit 1e-4)"
        ),
    )
}

/// With a vertical shift, the oriented orbit family partitions oriented
/// lines while the ordinary one double-covers almost every line.
pub fn oriented_ordinary_dichotomy(
    oriented_samples: u64,
    ordinary_samples: u64,
    seed: u64,
) -> CriterionResult {
    let copy = GroupCopyParams { s: 1.0, t: 1.0 };
    let profile = SpreadProfile::complex(1.0).expect("positive");
    let oriented = Parallelism::rotation_orbit(
        RotationalSpread::new(profile.clone(), true).expect("valid"),
        copy,
    )
    .resolver()
    .verify_parallelism(oriented_samples, seed);
    let ordinary = Parallelism::rotation_orbit(
        RotationalSpread::new(profile, false).expect("valid"),
        copy,
    )
    .resolver()
    .verify_parallelism(ordinary_samples, seed);

    let doubles = ordinary.multiplicity_histogram.get(&2).copied().unwrap_or(0);
    let uncovered = ordinary.multiplicity_histogram.get(&0).copied().unwrap_or(0);
    let pass =
        oriented.pass && doubles >= 1 && uncovered == 0 && !ordinary.witnesses.is_empty();
    result(
        "oriented_ordinary_dichotomy",
        pass,
        format!(
            "oriented: {} samples, histogram {:?}, pass={}; ordinary: {} samples, histogram {:?}, \
             {} double-cover witnesses",
            oriented_samples,
            oriented.multiplicity_histogram,
            oriented.pass,
            ordinary_samples,
            ordinary.multiplicity_histogram,
            ordinary.witnesses.len()
        ),
    )
}

/// Two-sided rotation pairs preserve both Clifford partitions; a generic
/// one-sided multiplication breaks the shifted orbit family.
pub fn isometry_invariance(
    elements: u64,
    pairs_per_element: u64,
    factor_pairs: u64,
    seed: u64,
) -> CriterionResult {
    let left = Parallelism::clifford(CliffordSide::Left, true).resolver();
    let right = Parallelism::clifford(CliffordSide::Right, true).resolver();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for e in 0..elements {
        let mut rng = CounterRng::new(seed ^ 0x150_4EAD, e);
        let iso = Isometry4::new(
            random_unit_quaternion(&mut rng),
            random_unit_quaternion(&mut rng),
        );
        let map = LineMap::from_projective(&ProjectiveMap::from_isometry4(&iso));
        for resolver in [&left, &right] {
            let rep = resolver.is_automorphism(&map, pairs_per_element, seed.wrapping_add(e));
            pass &= rep.pass;
            worst = worst.max(rep.max_defect);
        }
    }

    let mut rng = CounterRng::new(seed, 0xFACE);
    let factor = loop {
        let b = random_unit_quaternion(&mut rng);
        if b.as_quaternion().imag().norm() >= 0.3 {
            break b;
        }
    };
    let upsilon =
        LineMap::from_projective(&ProjectiveMap::from_isometry4(&Isometry4::from_right(factor)));
    let orbit = Parallelism::rotation_orbit(
        RotationalSpread::new(SpreadProfile::complex(1.0).expect("positive"), true)
            .expect("valid"),
        GroupCopyParams { s: 1.0, t: 1.0 },
    )
    .resolver();
    let factor_report = orbit.is_automorphism(&upsilon, factor_pairs, seed);
    let factor_breaks = !factor_report.pass && factor_report.witness.is_some();
    pass &= factor_breaks;

    result(
        "isometry_invariance",
        pass,
        format!(
            "{elements} two-sided pairs × {pairs_per_element} class-pair checks per side, worst \
             anchor defect {worst:.3e}; one-sided factor on the shifted family: {} of \
             {factor_pairs} pairs broken, witness {}",
            factor_report.failures,
            if factor_report.witness.is_some() { "recorded" } else { "missing" },
        ),
    )
}

/// The scaling `(x, y, z) ↦ (s·x, s·y, z)` reduces the `(s, t)` family to
/// `(1, t)` class by class.
pub fn similarity_reduction(samples_per_case: u64, seed: u64) -> CriterionResult {
    let base = RotationalSpread::new(SpreadProfile::complex(1.0).expect("positive"), true)
        .expect("valid");
    let mut pass = true;
    let mut detail = String::new();
    for (s, t) in [(2.0, 0.0), (2.0, 1.0), (0.5, 3.0)] {
        let report = equivalence_reduction_check(
            &base,
            GroupCopyParams::new(s, t).expect("valid"),
            samples_per_case,
            seed,
        );
        pass &= report.pass;
        detail.push_str(&format!(
            "(s={s}, t={t}): {} lines, worst axis defect {:.3e}, failures {}; ",
            samples_per_case, report.max_axis_defect, report.failures
        ));
    }
    result("similarity_reduction", pass, detail)
}

/// The six regularity fixtures: detection must accept exactly the
/// closed-form profiles.
pub fn regularity_fixtures() -> Vec<(&'static str, RotationalSpread, bool)> {
    let grid: Vec<f64> = (0..200).map(|k| 0.1 * 1.03f64.powi(k)).collect();
    let tabulated = |f: fn(f64) -> f64, g: fn(f64) -> f64, tails: [f64; 2]| {
        let fs: Vec<f64> = grid.iter().map(|r| f(*r)).collect();
        let gs: Vec<f64> = grid.iter().map(|r| g(*r)).collect();
        RotationalSpread::new(
            SpreadProfile::Tabulated(
                TabulatedProfile::new(grid.clone(), fs, gs, tails).expect("valid grid"),
            ),
            true,
        )
        .expect("valid")
    };
    let complex = |c: f64| {
        RotationalSpread::new(SpreadProfile::complex(c).expect("positive"), true).expect("valid")
    };
    vec![
        ("closed form c=0.5", complex(0.5), true),
        ("closed form c=1", complex(1.0), true),
        ("closed form c=2", complex(2.0), true),
        ("inverse-square slope", tabulated(|r| 1.0 / (r * r), |_| 0.0, [-2.0, -2.0]), false),
        ("offset center", tabulated(|r| 1.0 / r, |_| 0.1, [-1.0, -1.0]), false),
        (
            "oscillating center",
            tabulated(|r| 1.0 / r, |r| 10.0 * (5.0 * r).sin(), [-1.0, -1.0]),
            false,
        ),
    ]
}

pub fn regularity_detection() -> CriterionResult {
    let mut pass = true;
    let mut detail = String::new();
    for (name, spread, expected) in regularity_fixtures() {
        let got = spread.is_regular(1e-6);
        pass &= got == expected;
        detail.push_str(&format!("{name}: regular={got} (expected {expected}); "));
    }
    result("regularity_detection", pass, detail)
}

/// Runs every criterion. `quick` trims sample counts for interactive use;
/// the full battery matches the documented verification scale.
pub fn run_all(quick: bool, seed: u64) -> TheoremSuiteReport {
    let criteria = if quick {
        vec![
            quaternion_algebra(2_000, seed),
            klein_roundtrip(2_000, seed),
            product_action(500, seed),
            conjugation_exchange(500, seed),
            spread_axiom(2_000, 300, seed),
            clifford_recovery(150, seed),
            oriented_ordinary_dichotomy(150, 50, seed),
            isometry_invariance(4, 25, 6, seed),
            similarity_reduction(60, seed),
            regularity_detection(),
        ]
    } else {
        vec![
            quaternion_algebra(100_000, seed),
            klein_roundtrip(100_000, seed),
            product_action(10_000, seed),
            conjugation_exchange(10_000, seed),
            spread_axiom(100_000, 2_000, seed),
            clifford_recovery(10_000, seed),
            oriented_ordinary_dichotomy(2_000, 50, seed),
            isometry_invariance(20, 50, 20, seed),
            similarity_reduction(1_000, seed),
            regularity_detection(),
        ]
    };
    let pass = criteria.iter().all(|c| c.pass);
    TheoremSuiteReport { quick, seed, criteria, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_battery_passes() {
        let report = run_all(true, 1405);
        for c in &report.criteria {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
        assert!(report.pass);
        assert_eq!(report.criteria.len(), 10);
    }

    #[test]
    fn battery_is_deterministic() {
        let a = run_all(true, 77);
        let b = run_all(true, 77);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn criterion_names_are_stable() {
        let names: Vec<_> = run_all(true, 3).criteria.into_iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            [
                "quaternion_algebra",
                "klein_roundtrip",
                "product_action",
                "conjugation_exchange",
                "spread_axiom",
                "clifford_recovery",
                "oriented_ordinary_dichotomy",
                "isometry_invariance",
                "similarity_reduction",
                "regularity_detection",
            ]
        );
    }
}
