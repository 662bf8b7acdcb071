//! Cross-checks the adaptive coverage scan against a brute-force oracle: a
//! 10⁶-node linear sweep of the same branch functions. The two use different
//! grids and different root isolation, so agreement on counts and locations
//! guards against missed or spurious roots.

use nalgebra::Vector3;
use pg3par::sampling::CounterRng;
use pg3par::spreads::{Branch, RotationalSpread, SpreadProfile};
use pg3par::suite::oscillating_center_profile;

const DENSE_NODES: usize = 1_000_000;

/// Sign-change brackets of h(r) = g(r) + σ√(ρ² − r²) f(r) − z₀ on a dense
/// linear grid over (0, ρ).
fn dense_brackets(
    profile: &SpreadProfile,
    rho: f64,
    z0: f64,
    sigma: f64,
) -> Vec<(f64, f64)> {
    let h = |r: f64| {
        let s = (rho * rho - r * r).max(0.0).sqrt();
        profile.center(r) + sigma * s * profile.slope(r) - z0
    };
    let step = rho / DENSE_NODES as f64;
    let mut brackets = Vec::new();
    let mut prev_r = step;
    let mut prev_h = h(prev_r);
    for k in 2..DENSE_NODES {
        let r = step * k as f64;
        let value = h(r);
        if prev_h * value < 0.0 {
            brackets.push((prev_r, r));
        }
        prev_r = r;
        prev_h = value;
    }
    brackets
}

fn check_point(spread: &RotationalSpread, rho: f64, z0: f64) {
    let p = Vector3::new(rho, 0.0, z0);
    let coverage = spread.coverage_count(p).unwrap();
    for root in &coverage.roots {
        assert!(
            !root.tangential,
            "generic sample produced a tangential root at {p:?}: {root:?}"
        );
        if !matches!(root.branch, Branch::Waist) {
            // The oracle grid starts at ρ/10⁶; roots must sit above it for
            // the comparison to be meaningful.
            assert!(root.r >= 2.0 * rho / DENSE_NODES as f64, "root below oracle grid at {p:?}");
        }
    }
    for (branch, sigma) in [(Branch::Upper, 1.0), (Branch::Lower, -1.0)] {
        let adaptive: Vec<f64> = coverage
            .roots
            .iter()
            .filter(|r| r.branch == branch)
            .map(|r| r.r)
            .collect();
        let brackets = dense_brackets(spread.profile(), rho, z0, sigma);
        assert_eq!(
            adaptive.len(),
            brackets.len(),
            "branch {branch:?} at ρ={rho}, z₀={z0}: adaptive roots {adaptive:?} \
             vs dense brackets {brackets:?}"
        );
        for (root, (a, b)) in adaptive.iter().zip(&brackets) {
            assert!(
                *root >= a - 1e-9 * rho && *root <= b + 1e-9 * rho,
                "root {root} outside its dense bracket [{a}, {b}]"
            );
        }
    }
}

#[test]
fn closed_form_coverage_matches_the_dense_scan() {
    for (case, c) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let spread =
            RotationalSpread::new(SpreadProfile::complex(c).unwrap(), true).unwrap();
        let mut rng = CounterRng::new(0xD0_5E, case as u64);
        for _ in 0..20 {
            let rho = rng.log_uniform(0.1, 20.0);
            let z0 = rng.uniform(-8.0, 8.0);
            check_point(&spread, rho, z0);
        }
    }
}

#[test]
fn oscillating_center_coverage_matches_the_dense_scan() {
    // The engineered non-spread profile has many roots per point; the counts
    // and positions must still agree with the oracle.
    let spread = RotationalSpread::new(oscillating_center_profile(), true).unwrap();
    let mut rng = CounterRng::new(0xD0_5E, 99);
    for _ in 0..20 {
        let rho = rng.log_uniform(0.1, 20.0);
        let z0 = rng.uniform(-12.0, 12.0);
        check_point(&spread, rho, z0);
    }
}

#[test]
fn waist_points_carry_exactly_the_boundary_root() {
    // z₀ on the reference circle of the closed-form spread: the only line
    // through the point is the boundary ruling; both branch functions keep
    // one sign on the open interval.
    let spread = RotationalSpread::new(SpreadProfile::complex(1.0).unwrap(), true).unwrap();
    for rho in [0.3, 1.0, 7.5] {
        let coverage = spread.coverage_count(Vector3::new(rho, 0.0, 0.0)).unwrap();
        assert_eq!(coverage.count(), 1);
        assert!(matches!(coverage.roots[0].branch, Branch::Waist));
        for sigma in [1.0, -1.0] {
            assert!(dense_brackets(spread.profile(), rho, 0.0, sigma).is_empty());
        }
    }
}
