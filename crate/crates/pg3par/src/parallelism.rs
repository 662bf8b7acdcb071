//! Parallelisms of oriented and ordinary line space, and the machinery to
//! verify them by sampling.
//!
//! Two families are covered. The exact Clifford families assign to every
//! oriented line its fixed split coordinate (see [`crate::clifford`]); their
//! classes are labelled by points of the 2-sphere. The rotation-orbit
//! families start from a rotational spread `𝒞` and a conjugated copy
//! `μ·SO(3)·μ⁻¹` of the rotation group, `μ(x, y, z) = (x, y, s·z + t)`, and
//! collect the spread's images: the class of axis `n ∈ S²` is
//! `μ·ω·μ⁻¹(𝒞)` for any rotation `ω` sending the z-axis to `n` (the choice
//! does not matter: two such rotations differ by a z-rotation, which commutes
//! with `μ` and stabilizes `𝒞`).
//!
//! The resolver inverts that construction: given a line, it finds every axis
//! whose class contains it, by scanning an icosahedral grid of axes for small
//! membership residuals and polishing the candidates with a derivative-free
//! minimizer on the sphere. A hit is accepted only if the polished residual
//! is tiny *and* the structural membership test passes, so reported classes
//! are sound; completeness comes from the grid being finer than the
//! residual's basin of attraction.

use crate::clifford::{self, CliffordClass, CliffordSide};
use crate::error::{Error, Result};
use crate::lines::{sample_uniform_line, LineMap, OrientedPlueckerLine, ProjectiveMap};
use crate::quat::UnitQuaternion;
use crate::sampling::CounterRng;
use crate::sphere::{angular_distance, icosphere_centers, refine_on_sphere};
use crate::spreads::RotationalSpread;
use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Residual below which a polished axis counts as a genuine class hit.
pub const RESOLVE_TOL: f64 = 1e-7;

/// Axis/anchor agreement tolerance for cross-checks between independently
/// resolved classes.
pub const CLASS_MATCH_TOL: f64 = 1e-4;

/// Icosahedral subdivision levels for the axis grids (20·4^k nodes).
const COARSE_SUBDIV: u32 = 3;
const FINE_SUBDIV: u32 = 4;

/// Parameters of the conjugating map `μ(x, y, z) = (x, y, s·z + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupCopyParams {
    pub s: f64,
    pub t: f64,
}

impl GroupCopyParams {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s.is_finite() && s != 0.0 && t.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "group copy needs finite s ≠ 0 and finite t, got s={s}, t={t}"
            )));
        }
        Ok(Self { s, t })
    }

    pub fn identity() -> Self {
        Self { s: 1.0, t: 0.0 }
    }

    /// Line map of `μ·ρ·μ⁻¹` for a rotation `ρ` of 3-space.
    fn conjugated(&self, rot: &Matrix3<f64>) -> LineMap {
        let d = Vector3::new(1.0, 1.0, self.s);
        let d_inv = Vector3::new(1.0, 1.0, 1.0 / self.s);
        let linear = Matrix3::from_diagonal(&d) * rot * Matrix3::from_diagonal(&d_inv);
        let shift = Vector3::new(0.0, 0.0, self.t);
        let map = ProjectiveMap::from_affine(linear, shift - linear * shift)
            .expect("conjugate of a rotation is invertible");
        LineMap::from_projective(&map)
    }

    fn axis_rotation(n: &Vector3<f64>) -> UnitQuaternion {
        UnitQuaternion::rotation_between(Vector3::z(), n.normalize())
    }

    /// Line map of `μ·ω·μ⁻¹` for some rotation `ω` with `ω(e_z) = n`.
    pub fn class_map(&self, n: &Vector3<f64>) -> LineMap {
        self.conjugated(&Self::axis_rotation(n).rotation3())
    }

    /// Line map of `μ·ω⁻¹·μ⁻¹`; pulls members of class `n` back to the base.
    pub fn inverse_class_map(&self, n: &Vector3<f64>) -> LineMap {
        self.conjugated(&Self::axis_rotation(n).rotation3().transpose())
    }
}

/// A family of line classes claimed to partition (oriented or ordinary)
/// line space.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Parallelism {
    /// Exact one-sided Clifford parallelism.
    Clifford { side: CliffordSide, oriented: bool },
    /// Orbit of a rotational spread under a conjugated rotation group.
    RotationOrbit { base: RotationalSpread, copy: GroupCopyParams },
}

/// Label of one class: a Clifford anchor or an orbit axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParallelClass {
    Clifford(CliffordClass),
    Orbit(OrbitClass),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitClass {
    pub axis: [f64; 3],
}

impl OrbitClass {
    pub fn new(n: Vector3<f64>) -> Self {
        Self { axis: [n.x, n.y, n.z] }
    }

    pub fn axis_vec(&self) -> Vector3<f64> {
        Vector3::from_row_slice(&self.axis)
    }
}

impl Parallelism {
    pub fn clifford(side: CliffordSide, oriented: bool) -> Self {
        Self::Clifford { side, oriented }
    }

    pub fn rotation_orbit(base: RotationalSpread, copy: GroupCopyParams) -> Self {
        Self::RotationOrbit { base, copy }
    }

    pub fn oriented(&self) -> bool {
        match self {
            Self::Clifford { oriented, .. } => *oriented,
            Self::RotationOrbit { base, .. } => base.oriented(),
        }
    }

    /// In non-oriented families, whether opposite axes label the *same* class
    /// of ordinary lines. For Clifford families this always holds; an orbit
    /// family needs the exact symmetry `t = 0` and vanishing center profile
    /// (then a half-turn about a horizontal axis maps the base spread to its
    /// reverse and commutes with `μ`).
    fn merge_antipodal(&self) -> bool {
        match self {
            Self::Clifford { oriented, .. } => !oriented,
            Self::RotationOrbit { base, copy } => {
                !base.oriented() && copy.t == 0.0 && base.profile().center_is_zero()
            }
        }
    }

    /// Whether `l` belongs to the given class of this family.
    pub fn class_member_test(
        &self,
        class: &ParallelClass,
        l: &OrientedPlueckerLine,
    ) -> Result<bool> {
        match (self, class) {
            (Self::Clifford { side, oriented }, ParallelClass::Clifford(c)) => {
                if c.side != *side {
                    return Err(Error::InvalidParams(format!(
                        "class side {:?} does not match family side {side:?}",
                        c.side
                    )));
                }
                let got = clifford::class_of(l, *side);
                let d = if *oriented {
                    angular_distance(&got.anchor, &c.anchor)
                } else {
                    angular_distance(&got.anchor, &c.anchor)
                        .min(angular_distance(&got.anchor, &(-c.anchor)))
                };
                Ok(d <= clifford::ANCHOR_TOL)
            }
            (Self::RotationOrbit { base, copy }, ParallelClass::Orbit(o)) => {
                let pulled = copy.inverse_class_map(&o.axis_vec()).apply(l);
                Ok(base.contains(&pulled).member)
            }
            _ => Err(Error::InvalidParams(
                "class label kind does not match the family kind".into(),
            )),
        }
    }

    pub fn resolver(&self) -> ClassResolver {
        ClassResolver::new(self.clone())
    }
}

/// One resolved class containing a queried line, with the membership residual
/// at the reported label (0 for the exact Clifford resolution).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClassHit {
    pub class: ParallelClass,
    pub residual: f64,
}

/// All classes of a family containing one line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassResolution {
    pub hits: Vec<ClassHit>,
}

impl ClassResolution {
    pub fn multiplicity(&self) -> usize {
        self.hits.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParallelismWitness {
    pub line: OrientedPlueckerLine,
    pub classes: Vec<ClassHit>,
}

/// Sampled partition check. Everything is a pure function of family, samples
/// and seed; field order is the serialization order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParallelismReport {
    pub family: Parallelism,
    pub samples: u64,
    pub seed: u64,
    /// class multiplicity → number of sampled lines.
    pub multiplicity_histogram: BTreeMap<usize, u64>,
    pub pass: bool,
    pub witnesses: Vec<ParallelismWitness>,
}

/// First same-class pair whose images landed in different classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomorphismWitness {
    pub line: OrientedPlueckerLine,
    pub partner: OrientedPlueckerLine,
    pub image_classes: Vec<ClassHit>,
    pub partner_image_classes: Vec<ClassHit>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomorphismReport {
    pub samples: u64,
    pub seed: u64,
    pub failures: u64,
    pub max_defect: f64,
    pub pass: bool,
    pub witness: Option<AutomorphismWitness>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionReport {
    pub original: GroupCopyParams,
    pub reduced: GroupCopyParams,
    pub samples: u64,
    pub seed: u64,
    pub failures: u64,
    pub max_axis_defect: f64,
    pub max_residual: f64,
    pub pass: bool,
}

struct Node {
    axis: Vector3<f64>,
    inverse: LineMap,
}

/// Class resolver for one family, with precomputed axis grids.
pub struct ClassResolver {
    family: Parallelism,
    coarse: Vec<Node>,
    fine: OnceLock<Vec<Node>>,
}

const MAX_WITNESSES: usize = 16;
const MAX_SEEDS: usize = 32;
/// Minimum angular separation between polish seeds.
const SEED_SEPARATION: f64 = 0.12;

impl ClassResolver {
    pub fn new(family: Parallelism) -> Self {
        let coarse = match &family {
            Parallelism::Clifford { .. } => Vec::new(),
            Parallelism::RotationOrbit { copy, .. } => build_nodes(copy, COARSE_SUBDIV),
        };
        Self { family, coarse, fine: OnceLock::new() }
    }

    pub fn family(&self) -> &Parallelism {
        &self.family
    }

    /// Every class of the family containing `l`, labels polished to well
    /// below [`CLASS_MATCH_TOL`]. Errors with [`Error::NoClassFound`] when no
    /// axis survives even on the fine grid.
    pub fn resolve(&self, l: &OrientedPlueckerLine) -> Result<ClassResolution> {
        match &self.family {
            Parallelism::Clifford { side, oriented } => {
                let mut class = clifford::class_of(l, *side);
                if !oriented {
                    class.oriented = false;
                    class.anchor = canonical_axis(class.anchor);
                }
                Ok(ClassResolution {
                    hits: vec![ClassHit { class: ParallelClass::Clifford(class), residual: 0.0 }],
                })
            }
            Parallelism::RotationOrbit { base, copy } => {
                let (mut found, mut best) = self.resolve_orbit(l, base, copy, &self.coarse);
                if found.is_empty() {
                    let fine = self.fine.get_or_init(|| build_nodes(copy, FINE_SUBDIV));
                    let (fine_found, fine_best) = self.resolve_orbit(l, base, copy, fine);
                    found = fine_found;
                    best = best.min(fine_best);
                }
                if found.is_empty() {
                    return Err(Error::NoClassFound {
                        best_residual: best,
                        threshold: RESOLVE_TOL,
                    });
                }
                let hits = found
                    .into_iter()
                    .map(|(axis, residual)| ClassHit {
                        class: ParallelClass::Orbit(OrbitClass::new(axis)),
                        residual,
                    })
                    .collect();
                Ok(ClassResolution { hits })
            }
        }
    }

    /// Grid scan → seed selection → on-sphere polish → sound acceptance.
    /// Returns accepted (axis, residual) pairs and the best residual seen.
    fn resolve_orbit(
        &self,
        l: &OrientedPlueckerLine,
        base: &RotationalSpread,
        copy: &GroupCopyParams,
        nodes: &[Node],
    ) -> (Vec<(Vector3<f64>, f64)>, f64) {
        let residual_at = |n: &Vector3<f64>| {
            base.membership_residual(&copy.inverse_class_map(n).apply(l))
        };

        let grid: Vec<f64> =
            nodes.iter().map(|nd| base.membership_residual(&nd.inverse.apply(l))).collect();
        let best = grid.iter().copied().fold(f64::INFINITY, f64::min);
        let cut = (4.0 * best).max(0.35);

        let mut order: Vec<usize> = (0..nodes.len()).filter(|i| grid[*i] <= cut).collect();
        order.sort_by(|a, b| grid[*a].total_cmp(&grid[*b]));
        let mut seeds: Vec<usize> = Vec::new();
        for i in order {
            if seeds.len() >= MAX_SEEDS {
                break;
            }
            if seeds
                .iter()
                .all(|j| angular_distance(&nodes[i].axis, &nodes[*j].axis) >= SEED_SEPARATION)
            {
                seeds.push(i);
            }
        }

        let merge = self.family.merge_antipodal();
        let class_distance = |a: &Vector3<f64>, b: &Vector3<f64>| {
            if merge {
                angular_distance(a, b).min(angular_distance(a, &-b))
            } else {
                angular_distance(a, b)
            }
        };

        let mut best_seen = f64::INFINITY;
        let mut accepted: Vec<(Vector3<f64>, f64)> = Vec::new();
        for seed in seeds {
            let (axis, residual) =
                refine_on_sphere(residual_at, &nodes[seed].axis, 0.06, 1e-11, 250);
            best_seen = best_seen.min(residual);
            if residual > RESOLVE_TOL {
                continue;
            }
            let pulled = copy.inverse_class_map(&axis).apply(l);
            if !base.contains(&pulled).member {
                continue;
            }
            let axis = if merge { canonical_axis(axis) } else { axis };
            match accepted.iter_mut().find(|(a, _)| class_distance(a, &axis) <= CLASS_MATCH_TOL)
            {
                Some(entry) => {
                    if residual < entry.1 {
                        *entry = (axis, residual);
                    }
                }
                None => accepted.push((axis, residual)),
            }
        }
        accepted.sort_by(|a, b| {
            (a.0.z, a.0.y, a.0.x)
                .partial_cmp(&(b.0.z, b.0.y, b.0.x))
                .expect("finite axes")
        });
        (accepted, best_seen.min(best))
    }

    /// Samples oriented lines uniformly and checks that each lies in exactly
    /// one class (for non-oriented families, the line stands for its
    /// unoriented extension).
    pub fn verify_parallelism(&self, samples: u64, seed: u64) -> ParallelismReport {
        #[derive(Default)]
        struct Acc {
            histogram: BTreeMap<usize, u64>,
            witnesses: Vec<(u64, ParallelismWitness)>,
        }
        fn keep_smallest(w: &mut Vec<(u64, ParallelismWitness)>) {
            w.sort_by_key(|(i, _)| *i);
            w.truncate(MAX_WITNESSES);
        }

        let acc = (0..samples)
            .into_par_iter()
            .fold(Acc::default, |mut acc, i| {
                let line = sample_uniform_line(&mut CounterRng::new(seed, i));
                let classes = match self.resolve(&line) {
                    Ok(res) => res.hits,
                    Err(_) => Vec::new(),
                };
                let multiplicity = classes.len();
                *acc.histogram.entry(multiplicity).or_insert(0) += 1;
                if multiplicity != 1 {
                    acc.witnesses.push((i, ParallelismWitness { line, classes }));
                    keep_smallest(&mut acc.witnesses);
                }
                acc
            })
            .reduce(Acc::default, |mut a, b| {
                for (k, v) in b.histogram {
                    *a.histogram.entry(k).or_insert(0) += v;
                }
                a.witnesses.extend(b.witnesses);
                keep_smallest(&mut a.witnesses);
                a
            });

        let pass = acc.histogram.keys().all(|k| *k == 1);
        ParallelismReport {
            family: self.family.clone(),
            samples,
            seed,
            multiplicity_histogram: acc.histogram,
            pass,
            witnesses: acc.witnesses.into_iter().map(|(_, w)| w).collect(),
        }
    }

    /// Does `map` respect the partition? Pairs of same-class lines are
    /// constructed directly, pushed through `map`, and their resolved class
    /// sets compared. Meaningful for families that verify as parallelisms.
    pub fn is_automorphism(&self, map: &LineMap, samples: u64, seed: u64) -> AutomorphismReport {
        let merge = self.family.merge_antipodal();
        let mut failures = 0;
        let mut max_defect: f64 = 0.0;
        let mut witness: Option<AutomorphismWitness> = None;
        for i in 0..samples {
            let mut rng = CounterRng::new(seed, i);
            let (l1, l2) = self.same_class_pair(&mut rng);
            let (g1, g2) = (map.apply(&l1), map.apply(&l2));
            let (c1, c2) = (
                self.resolve(&g1).map(|r| r.hits).unwrap_or_default(),
                self.resolve(&g2).map(|r| r.hits).unwrap_or_default(),
            );
            let failed = match class_set_defect(&c1, &c2, merge) {
                Some(defect) => {
                    max_defect = max_defect.max(defect);
                    defect > CLASS_MATCH_TOL
                }
                None => true,
            };
            if failed {
                failures += 1;
                witness.get_or_insert(AutomorphismWitness {
                    line: l1,
                    partner: l2,
                    image_classes: c1,
                    partner_image_classes: c2,
                });
            }
        }
        AutomorphismReport {
            samples,
            seed,
            failures,
            max_defect,
            pass: failures == 0,
            witness,
        }
    }

    /// Two distinct lines of one (randomly chosen) class.
    fn same_class_pair(
        &self,
        rng: &mut CounterRng,
    ) -> (OrientedPlueckerLine, OrientedPlueckerLine) {
        match &self.family {
            Parallelism::Clifford { side, .. } => {
                let l1 = sample_uniform_line(rng);
                let q = UnitQuaternion::new(crate::quat::Quaternion::from_vector4(
                    nalgebra::Vector4::from_row_slice(&rng.unit_4vector()),
                ))
                .expect("unit sample");
                let l2 = match side {
                    CliffordSide::Left => clifford::act_left(q, &l1),
                    CliffordSide::Right => clifford::act_right(q, &l1),
                };
                (l1, l2)
            }
            Parallelism::RotationOrbit { base, copy } => {
                let n = rng.unit_vector();
                let forward = copy.class_map(&n);
                let mut member = || {
                    let r = rng.log_uniform(0.1, 10.0);
                    let theta = rng.uniform(0.0, std::f64::consts::TAU);
                    forward.apply(
                        &base.spread_line(r, theta).expect("positive radius").to_pluecker(),
                    )
                };
                (member(), member())
            }
        }
    }
}

/// Symmetric worst mismatch between two resolved class sets, or `None` for
/// different multiplicities or non-matching kinds.
fn class_set_defect(a: &[ClassHit], b: &[ClassHit], merge: bool) -> Option<f64> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let dist = |x: &ParallelClass, y: &ParallelClass| -> Option<f64> {
        match (x, y) {
            (ParallelClass::Clifford(cx), ParallelClass::Clifford(cy)) => {
                if cx.side != cy.side {
                    return None;
                }
                let d = angular_distance(&cx.anchor, &cy.anchor);
                Some(if merge { d.min(angular_distance(&cx.anchor, &(-cy.anchor))) } else { d })
            }
            (ParallelClass::Orbit(ox), ParallelClass::Orbit(oy)) => {
                let (vx, vy) = (ox.axis_vec(), oy.axis_vec());
                let d = angular_distance(&vx, &vy);
                Some(if merge { d.min(angular_distance(&vx, &-vy)) } else { d })
            }
            _ => None,
        }
    };
    let mut worst: f64 = 0.0;
    for hit in a {
        let nearest = b.iter().filter_map(|h| dist(&hit.class, &h.class)).fold(
            f64::INFINITY,
            f64::min,
        );
        worst = worst.max(nearest);
    }
    for hit in b {
        let nearest = a.iter().filter_map(|h| dist(&hit.class, &h.class)).fold(
            f64::INFINITY,
            f64::min,
        );
        worst = worst.max(nearest);
    }
    worst.is_finite().then_some(worst)
}

/// Representative of `{n, −n}` with the first coordinate of magnitude above
/// 1e−8 made positive.
fn canonical_axis(n: Vector3<f64>) -> Vector3<f64> {
    for c in [n.x, n.y, n.z] {
        if c > 1e-8 {
            return n;
        }
        if c < -1e-8 {
            return -n;
        }
    }
    n
}

fn build_nodes(copy: &GroupCopyParams, subdivisions: u32) -> Vec<Node> {
    icosphere_centers(subdivisions)
        .into_iter()
        .map(|axis| Node { inverse: copy.inverse_class_map(&axis), axis })
        .collect()
}

/// Checks that the scaling `(x, y, z) ↦ (s·x, s·y, z)` carries each class of
/// the `(s, t)` family onto the class of the *same* axis in the `(1, t)`
/// family, reducing the two-parameter group copies to one parameter. Exact
/// for bases invariant under that scaling (the closed-form profiles).
pub fn equivalence_reduction_check(
    base: &RotationalSpread,
    copy: GroupCopyParams,
    samples: u64,
    seed: u64,
) -> ReductionReport {
    let reduced = GroupCopyParams { s: 1.0, t: copy.t };
    let resolver = Parallelism::rotation_orbit(base.clone(), reduced).resolver();
    let gamma = LineMap::from_projective(
        &ProjectiveMap::from_affine(
            Matrix3::from_diagonal(&Vector3::new(copy.s, copy.s, 1.0)),
            Vector3::zeros(),
        )
        .expect("s nonzero"),
    );

    let mut failures = 0;
    let mut max_axis_defect: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    for i in 0..samples {
        let mut rng = CounterRng::new(seed, i);
        let n = rng.unit_vector();
        let r = rng.log_uniform(0.1, 10.0);
        let theta = rng.uniform(0.0, std::f64::consts::TAU);
        let member = copy
            .class_map(&n)
            .apply(&base.spread_line(r, theta).expect("positive radius").to_pluecker());
        match resolver.resolve(&gamma.apply(&member)) {
            Ok(res) => {
                let (defect, residual) = res
                    .hits
                    .iter()
                    .map(|h| match h.class {
                        ParallelClass::Orbit(o) => {
                            (angular_distance(&o.axis_vec(), &n), h.residual)
                        }
                        ParallelClass::Clifford(_) => (f64::INFINITY, h.residual),
                    })
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .unwrap_or((f64::INFINITY, f64::INFINITY));
                if defect > CLASS_MATCH_TOL {
                    failures += 1;
                } else {
                    max_axis_defect = max_axis_defect.max(defect);
                    max_residual = max_residual.max(residual);
                }
            }
            Err(_) => failures += 1,
        }
    }
    ReductionReport {
        original: copy,
        reduced,
        samples,
        seed,
        failures,
        max_axis_defect,
        max_residual,
        pass: failures == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spreads::SpreadProfile;

    fn complex_base(oriented: bool) -> RotationalSpread {
        RotationalSpread::new(SpreadProfile::complex(1.0).unwrap(), oriented).unwrap()
    }

    fn orbit_family(s: f64, t: f64, oriented: bool) -> Parallelism {
        Parallelism::rotation_orbit(complex_base(oriented), GroupCopyParams::new(s, t).unwrap())
    }

    #[test]
    fn params_validation() {
        assert!(GroupCopyParams::new(0.0, 1.0).is_err());
        assert!(GroupCopyParams::new(f64::NAN, 0.0).is_err());
        assert!(GroupCopyParams::new(-2.0, 3.0).is_ok());
    }

    #[test]
    fn class_maps_invert_each_other() {
        let copy = GroupCopyParams::new(2.0, 0.7).unwrap();
        for i in 0..50 {
            let mut rng = CounterRng::new(211, i);
            let n = rng.unit_vector();
            let l = sample_uniform_line(&mut rng);
            let round = copy.inverse_class_map(&n).apply(&copy.class_map(&n).apply(&l));
            assert!(round.approx_eq(&l, 1e-9));
        }
    }

    #[test]
    fn base_class_is_the_spread_itself() {
        let family = orbit_family(2.0, 0.7, true);
        let base = complex_base(true);
        let class = ParallelClass::Orbit(OrbitClass::new(Vector3::z()));
        for i in 0..30 {
            let mut rng = CounterRng::new(223, i);
            let r = rng.log_uniform(0.05, 20.0);
            let theta = rng.uniform(0.0, std::f64::consts::TAU);
            let l = base.spread_line(r, theta).unwrap().to_pluecker();
            assert!(family.class_member_test(&class, &l).unwrap());
            // A generic line is not in the base class.
            let other = sample_uniform_line(&mut rng);
            assert!(!family.class_member_test(&class, &other).unwrap());
        }
    }

    #[test]
    fn class_choice_of_rotation_does_not_matter() {
        // ω and ω·(z-rotation) define the same class.
        let copy = GroupCopyParams::new(3.0, -0.4).unwrap();
        let base = complex_base(true);
        let family = Parallelism::rotation_orbit(base.clone(), copy);
        for i in 0..30 {
            let mut rng = CounterRng::new(227, i);
            let n = rng.unit_vector();
            let psi = rng.uniform(0.0, std::f64::consts::TAU);
            let omega = GroupCopyParams::axis_rotation(&n).rotation3()
                * UnitQuaternion::from_axis_angle(Vector3::z(), psi).unwrap().rotation3();
            let member = copy
                .conjugated(&omega)
                .apply(&base.spread_line(1.7, 0.3).unwrap().to_pluecker());
            let class = ParallelClass::Orbit(OrbitClass::new(n));
            assert!(family.class_member_test(&class, &member).unwrap());
        }
    }

    #[test]
    fn clifford_resolution_is_exact_and_unique() {
        for side in [CliffordSide::Left, CliffordSide::Right] {
            let resolver = Parallelism::clifford(side, true).resolver();
            let report = resolver.verify_parallelism(300, 5);
            assert!(report.pass);
            assert_eq!(report.multiplicity_histogram.get(&1), Some(&300));
            assert!(report.witnesses.is_empty());
        }
    }

    #[test]
    fn clifford_class_member_checks() {
        let family = Parallelism::clifford(CliffordSide::Left, true);
        let resolver = family.resolver();
        let mut rng = CounterRng::new(229, 0);
        let l = sample_uniform_line(&mut rng);
        let hit = resolver.resolve(&l).unwrap().hits[0];
        assert!(family.class_member_test(&hit.class, &l).unwrap());

        // Wrong side is a usage error, not a negative answer.
        let ParallelClass::Clifford(mut c) = hit.class else { panic!() };
        c.side = CliffordSide::Right;
        assert!(family.class_member_test(&ParallelClass::Clifford(c), &l).is_err());

        // An unrelated anchor does not contain the line.
        let ParallelClass::Clifford(mut far) = hit.class else { panic!() };
        far.anchor = canonical_axis(Vector3::new(0.3, -0.9, 0.4).normalize());
        if angular_distance(&far.anchor, &c.anchor) > 1e-3 {
            assert!(!family.class_member_test(&ParallelClass::Clifford(far), &l).unwrap());
        }
    }

    #[test]
    fn resolver_recovers_constructed_classes() {
        let copy = GroupCopyParams::new(2.0, 0.7).unwrap();
        let base = complex_base(true);
        let resolver = Parallelism::rotation_orbit(base.clone(), copy).resolver();
        for i in 0..15 {
            let mut rng = CounterRng::new(233, i);
            let n = rng.unit_vector();
            let r = rng.log_uniform(0.1, 10.0);
            let theta = rng.uniform(0.0, std::f64::consts::TAU);
            let l = copy.class_map(&n).apply(&base.spread_line(r, theta).unwrap().to_pluecker());
            let res = resolver.resolve(&l).unwrap();
            assert_eq!(res.multiplicity(), 1, "sample {i}");
            let ParallelClass::Orbit(o) = res.hits[0].class else { panic!() };
            let defect = angular_distance(&o.axis_vec(), &n);
            assert!(defect <= 1e-6, "sample {i}: axis defect {defect:.3e}");
            assert!(res.hits[0].residual <= RESOLVE_TOL);
        }
    }

    #[test]
    fn resolve_is_deterministic() {
        let resolver = orbit_family(2.0, 0.7, true).resolver();
        let l = sample_uniform_line(&mut CounterRng::new(239, 4));
        let a = resolver.resolve(&l).unwrap();
        let b = resolver.resolve(&l).unwrap();
        assert_eq!(a.hits.len(), b.hits.len());
        for (x, y) in a.hits.iter().zip(&b.hits) {
            let (ParallelClass::Orbit(ox), ParallelClass::Orbit(oy)) = (x.class, y.class) else {
                panic!()
            };
            assert_eq!(ox.axis, oy.axis);
            assert_eq!(x.residual, y.residual);
        }
    }

    #[test]
    fn oriented_orbit_family_partitions_lines() {
        let resolver = orbit_family(2.0, 0.7, true).resolver();
        let report = resolver.verify_parallelism(50, 11);
        assert!(report.pass, "histogram {:?}", report.multiplicity_histogram);
        assert_eq!(report.multiplicity_histogram.get(&1), Some(&50));
    }

    #[test]
    fn ordinary_orbit_family_with_shift_double_covers() {
        let resolver = orbit_family(2.0, 0.7, false).resolver();
        let report = resolver.verify_parallelism(50, 13);
        assert!(!report.pass);
        assert!(!report.multiplicity_histogram.contains_key(&0), "no line may be uncovered");
        let twos = report.multiplicity_histogram.get(&2).copied().unwrap_or(0);
        assert!(twos >= 45, "histogram {:?}", report.multiplicity_histogram);
        assert!(!report.witnesses.is_empty());
    }

    #[test]
    fn ordinary_orbit_family_with_symmetry_partitions() {
        let resolver = orbit_family(3.0, 0.0, false).resolver();
        let report = resolver.verify_parallelism(50, 17);
        assert!(report.pass, "histogram {:?}", report.multiplicity_histogram);
    }

    #[test]
    fn z_rotation_is_an_automorphism() {
        let rot = UnitQuaternion::from_axis_angle(Vector3::z(), 0.8).unwrap().rotation3();
        let gamma = LineMap::from_projective(
            &ProjectiveMap::from_affine(rot, Vector3::zeros()).unwrap(),
        );
        let orbit = orbit_family(2.0, 0.7, true).resolver();
        let report = orbit.is_automorphism(&gamma, 20, 19);
        assert!(report.pass, "failures {} defect {:.3e}", report.failures, report.max_defect);

        let clifford = Parallelism::clifford(CliffordSide::Left, true).resolver();
        let report = clifford.is_automorphism(&gamma, 40, 19);
        assert!(report.pass);
    }

    #[test]
    fn anisotropic_scaling_is_not_an_automorphism() {
        let gamma = LineMap::from_projective(
            &ProjectiveMap::from_affine(
                Matrix3::from_diagonal(&Vector3::new(2.0, 1.0, 1.0)),
                Vector3::zeros(),
            )
            .unwrap(),
        );
        let orbit = orbit_family(1.0, 0.5, true).resolver();
        let report = orbit.is_automorphism(&gamma, 10, 23);
        assert!(!report.pass);
        assert!(report.witness.is_some());

        let clifford = Parallelism::clifford(CliffordSide::Left, true).resolver();
        let report = clifford.is_automorphism(&gamma, 10, 23);
        assert!(!report.pass);
        assert!(report.witness.is_some());
    }

    #[test]
    fn non_spread_orbit_is_not_a_parallelism() {
        // An oscillating center breaks the spread axiom; its orbit family
        // still covers lines (the construction has covering degree one) but
        // with wildly varying multiplicity, so verification must fail — and
        // every hit the resolver does report must be a genuine membership.
        let r: Vec<f64> = (1..=300).map(|k| 0.05 * k as f64).collect();
        let f: Vec<f64> = r.iter().map(|r| 1.0 / r).collect();
        let g: Vec<f64> = r.iter().map(|r| 10.0 * (5.0 * r).sin()).collect();
        let base = RotationalSpread::new(
            SpreadProfile::Tabulated(
                crate::spreads::TabulatedProfile::new(r, f, g, [-1.0, -1.0]).unwrap(),
            ),
            true,
        )
        .unwrap();
        let resolver =
            Parallelism::rotation_orbit(base, GroupCopyParams::identity()).resolver();
        let report = resolver.verify_parallelism(40, 241);
        assert!(!report.pass);
        assert!(report.multiplicity_histogram.keys().any(|k| *k > 1));
        for witness in &report.witnesses {
            for hit in &witness.classes {
                assert!(resolver
                    .family()
                    .class_member_test(&hit.class, &witness.line)
                    .unwrap());
            }
        }
    }

    #[test]
    fn scaling_reduction_collapses_s() {
        let base = complex_base(true);
        let copy = GroupCopyParams::new(4.0, 0.9).unwrap();
        let report = equivalence_reduction_check(&base, copy, 25, 29);
        assert!(report.pass, "failures {}", report.failures);
        assert!(report.max_axis_defect <= CLASS_MATCH_TOL);
        assert_eq!(report.reduced, GroupCopyParams { s: 1.0, t: 0.9 });
    }

    #[test]
    fn family_and_class_serde_shapes() {
        let family = orbit_family(2.0, 0.5, true);
        let js = serde_json::to_string(&family).unwrap();
        assert!(js.contains("\"family\":\"rotation_orbit\""));
        assert!(js.contains("\"copy\":{\"s\":2.0,\"t\":0.5}"));
        let back: Parallelism = serde_json::from_str(&js).unwrap();
        assert!(matches!(back, Parallelism::RotationOrbit { .. }));

        let clifford = Parallelism::clifford(CliffordSide::Right, false);
        let js = serde_json::to_string(&clifford).unwrap();
        assert!(js.contains("\"family\":\"clifford\""));
        assert!(js.contains("\"side\":\"right\""));

        let class = ParallelClass::Orbit(OrbitClass::new(Vector3::z()));
        assert_eq!(serde_json::to_string(&class).unwrap(), "{\"axis\":[0.0,0.0,1.0]}");
        let parsed: ParallelClass = serde_json::from_str("{\"axis\":[1.0,0.0,0.0]}").unwrap();
        assert!(matches!(parsed, ParallelClass::Orbit(_)));
        let parsed: ParallelClass =
            serde_json::from_str("{\"side\":\"left\",\"anchor\":[0,0,1],\"oriented\":true}")
                .unwrap();
        assert!(matches!(parsed, ParallelClass::Clifford(_)));
    }

    #[test]
    fn report_serialization_round_trips() {
        let resolver = orbit_family(1.0, 0.3, true).resolver();
        let report = resolver.verify_parallelism(4, 31);
        let js = serde_json::to_string(&report).unwrap();
        assert!(js.contains("\"multiplicity_histogram\""));
        assert!(js.contains("\"witnesses\""));
        let back: ParallelismReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back.samples, 4);
        assert_eq!(back.pass, report.pass);
    }
}
