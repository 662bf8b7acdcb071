//! Rotational spreads built from hyperboloid reguli.
//!
//! For a slope profile `f > 0` and center profile `g`, the spread collects,
//! over every waist radius `r > 0`, one ruling of the one-sheeted hyperboloid
//! of revolution about the z-axis with waist circle `x² + y² = r²` at height
//! `g(r)`: the lines `t ↦ (r cosθ − t sinθ, r sinθ + t cosθ, g(r) + t·f(r))`,
//! together with the upward z-axis and the line at infinity of the horizontal
//! planes. The choice `f(r) = c/r`, `g ≡ 0` is the regular spread coming from
//! complex scalar multiplication on ℝ⁴ = ℂ²; relaxing it gives the general
//! rotational spreads.
//!
//! A point at distance `ρ₀ > 0` from the axis at height `z₀` lies on the
//! ruling line of radius `r ∈ (0, ρ₀]` and branch `σ = ±` exactly when
//! `z₀ = g(r) + σ·√(ρ₀² − r²)·f(r)`; counting those roots verifies the spread
//! axiom (every point on exactly one line) numerically.

use crate::error::{Error, Result};
use crate::lines::{AffineLine, OrientedPlueckerLine, SphereCoords};
use crate::sampling::CounterRng;
use nalgebra::{Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Structural membership tolerance on normalized data.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Default number of scan nodes for closed-form profiles.
pub const DEFAULT_GRID: usize = 2048;

/// Denser default for tabulated profiles, whose center functions may
/// oscillate on the scale of a few grid cells.
pub const TABULATED_GRID: usize = 8192;

/// Slope/center profile of a rotational spread.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpreadProfile {
    /// `f(r) = c/r`, `g ≡ 0`: the regular spread of complex scalar
    /// multiplication.
    Complex { c: f64 },
    /// Sampled profile with monotone-cubic interpolation and power-law tails.
    Tabulated(TabulatedProfile),
}

impl SpreadProfile {
    pub fn complex(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidProfile(format!("slope constant must be positive, got {c}")));
        }
        Ok(Self::Complex { c })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Complex { c } => {
                Self::complex(*c)?;
            }
            Self::Tabulated(_) => {} // validated at construction/deserialization
        }
        Ok(())
    }

    /// Slope `f(r)` of the ruling at waist radius `r > 0`.
    pub fn slope(&self, r: f64) -> f64 {
        match self {
            Self::Complex { c } => c / r,
            Self::Tabulated(t) => t.slope(r),
        }
    }

    /// Hyperboloid center height `g(r)`.
    pub fn center(&self, r: f64) -> f64 {
        match self {
            Self::Complex { .. } => 0.0,
            Self::Tabulated(t) => t.center(r),
        }
    }

    /// True iff the center profile vanishes identically (within 1e-12 on the
    /// probe grid). Exact for the closed form.
    pub fn center_is_zero(&self) -> bool {
        match self {
            Self::Complex { .. } => true,
            Self::Tabulated(t) => {
                t.g.iter().all(|v| v.abs() <= 1e-12)
            }
        }
    }

    fn default_grid(&self) -> usize {
        match self {
            Self::Complex { .. } => DEFAULT_GRID,
            Self::Tabulated(_) => TABULATED_GRID,
        }
    }

    /// Probe radii for regularity checks: the tabulated range, or a wide
    /// logarithmic window for closed forms.
    fn probe_range(&self) -> (f64, f64) {
        match self {
            Self::Complex { .. } => (1e-2, 1e2),
            Self::Tabulated(t) => (t.r[0], *t.r.last().expect("nonempty grid")),
        }
    }
}

/// Strictly increasing radius grid with slope and center samples,
/// interpolated by the monotone (Fritsch–Carlson) cubic and extended by
/// power laws `y(r_end)·(r/r_end)^e` beyond both ends.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TabulatedJson", into = "TabulatedJson")]
pub struct TabulatedProfile {
    r: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    tail_exponents: [f64; 2],
    fd: Vec<f64>,
    gd: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TabulatedJson {
    r: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    tail_exponents: [f64; 2],
}

impl TryFrom<TabulatedJson> for TabulatedProfile {
    type Error = Error;
    fn try_from(j: TabulatedJson) -> Result<Self> {
        TabulatedProfile::new(j.r, j.f, j.g, j.tail_exponents)
    }
}

impl From<TabulatedProfile> for TabulatedJson {
    fn from(t: TabulatedProfile) -> Self {
        Self { r: t.r, f: t.f, g: t.g, tail_exponents: t.tail_exponents }
    }
}

impl TabulatedProfile {
    pub fn new(r: Vec<f64>, f: Vec<f64>, g: Vec<f64>, tail_exponents: [f64; 2]) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        if r.len() < 4 {
            return bad(format!("need at least 4 grid nodes, got {}", r.len()));
        }
        if f.len() != r.len() || g.len() != r.len() {
            return bad(format!(
                "grid lengths differ: r={}, f={}, g={}",
                r.len(),
                f.len(),
                g.len()
            ));
        }
        if !r.iter().all(|v| v.is_finite() && *v > 0.0) || r.windows(2).any(|w| w[0] >= w[1]) {
            return bad("radius grid must be finite, positive, strictly increasing".into());
        }
        if !f.iter().all(|v| v.is_finite() && *v > 0.0) {
            return bad("slope samples must be finite and positive".into());
        }
        if !g.iter().all(|v| v.is_finite()) || !tail_exponents.iter().all(|v| v.is_finite()) {
            return bad("center samples and tail exponents must be finite".into());
        }
        let fd = pchip_slopes(&r, &f);
        let gd = pchip_slopes(&r, &g);
        Ok(Self { r, f, g, tail_exponents, fd, gd })
    }

    fn slope(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] {
            self.f[0] * (x / self.r[0]).powf(self.tail_exponents[0])
        } else if x >= self.r[n - 1] {
            self.f[n - 1] * (x / self.r[n - 1]).powf(self.tail_exponents[1])
        } else {
            pchip_eval(&self.r, &self.f, &self.fd, x)
        }
    }

    fn center(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] {
            self.g[0] * (x / self.r[0]).powf(self.tail_exponents[0])
        } else if x >= self.r[n - 1] {
            self.g[n - 1] * (x / self.r[n - 1]).powf(self.tail_exponents[1])
        } else {
            pchip_eval(&self.r, &self.g, &self.gd, x)
        }
    }
}

/// Monotonicity-preserving cubic Hermite slopes (Fritsch–Carlson).
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];

    let one_sided = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let mut m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if m * d0 <= 0.0 {
            m = 0.0;
        } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
            m = 3.0 * d0;
        }
        m
    };

    m[0] = one_sided(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = one_sided(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    m
}

fn pchip_eval(x: &[f64], y: &[f64], m: &[f64], q: f64) -> f64 {
    let i = x.partition_point(|v| *v <= q).clamp(1, x.len() - 1) - 1;
    let h = x[i + 1] - x[i];
    let s = (q - x[i]) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    y[i] * (2.0 * s3 - 3.0 * s2 + 1.0)
        + m[i] * h * (s3 - 2.0 * s2 + s)
        + y[i + 1] * (-2.0 * s3 + 3.0 * s2)
        + m[i + 1] * h * (s3 - s2)
}

/// A rotational spread, with or without the orientation refinement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotationalSpread {
    profile: SpreadProfile,
    oriented: bool,
}

/// Outcome of a membership test: the structural verdict and a continuous
/// diagnostic residual that vanishes exactly on members.
#[derive(Debug, Clone, Copy)]
pub struct Containment {
    pub member: bool,
    pub residual: f64,
}

/// Which branch of `z₀ = g(r) ± √(ρ₀²−r²)·f(r)` a coverage root solves;
/// `Waist` is the boundary root `r = ρ₀` (the point sits on the waist circle).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
    Waist,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoverageRoot {
    pub r: f64,
    pub branch: Branch,
    /// Tangential (double) root: the coverage curve touches zero without
    /// crossing. Counted once but flagged, since perturbing the point splits
    /// it into zero or two ordinary roots.
    pub tangential: bool,
}

/// All spread lines through one off-axis point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Coverage {
    pub roots: Vec<CoverageRoot>,
}

impl Coverage {
    pub fn count(&self) -> usize {
        self.roots.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageWitness {
    pub point: [f64; 3],
    pub count: usize,
    pub roots: Vec<CoverageRoot>,
}

/// Point-coverage verification report. Field order is the serialization
/// order; everything here is a pure function of profile, samples and seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadReport {
    pub profile: SpreadProfile,
    pub oriented: bool,
    pub samples: u64,
    pub seed: u64,
    pub grid_nodes: usize,
    /// coverage count → number of sampled points.
    pub histogram: BTreeMap<usize, u64>,
    pub pass: bool,
    pub witnesses: Vec<CoverageWitness>,
}

const MAX_WITNESSES: usize = 16;

impl RotationalSpread {
    pub fn new(profile: SpreadProfile, oriented: bool) -> Result<Self> {
        profile.validate()?;
        Ok(Self { profile, oriented })
    }

    pub fn profile(&self) -> &SpreadProfile {
        &self.profile
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    /// The ruling line of waist radius `r` at angle `theta`, oriented upward.
    pub fn spread_line(&self, r: f64, theta: f64) -> Result<AffineLine> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidRadius { radius: r });
        }
        let (sin, cos) = theta.sin_cos();
        let base = Vector3::new(r * cos, r * sin, self.profile.center(r));
        let dir = Vector3::new(-sin, cos, self.profile.slope(r));
        AffineLine::finite(base, dir)
    }

    /// The two non-ruling members: the upward z-axis and the line at infinity
    /// of the horizontal planes (oriented by the counterclockwise sense).
    pub fn special_lines(&self) -> (AffineLine, AffineLine) {
        (
            AffineLine::finite(Vector3::zeros(), Vector3::z()).expect("unit direction"),
            AffineLine::at_infinity(Vector3::z()).expect("unit normal"),
        )
    }

    /// Structural membership test; see [`Containment`]. In non-oriented mode
    /// both orientations of `l` are accepted.
    pub fn contains(&self, l: &OrientedPlueckerLine) -> Containment {
        self.analyze(l, self.oriented)
    }

    /// Continuous residual of `l` against the spread: the chordal distance in
    /// split coordinates from `l` to the nearest structurally reconstructed
    /// member candidate. Zero exactly on members; the quantity the class
    /// resolver minimizes.
    pub fn membership_residual(&self, l: &OrientedPlueckerLine) -> f64 {
        self.analyze(l, self.oriented).residual
    }

    fn analyze(&self, l: &OrientedPlueckerLine, oriented: bool) -> Containment {
        let split = l.klein_split();
        let d = l.direction_part();
        let m = l.moment_part();
        let nd = d.norm();

        // Lines in the plane at infinity: the only member is the horizontal
        // one, with normal +z (either sign in non-oriented mode).
        if nd <= crate::lines::AT_INFINITY_TOL {
            let normal = m.normalize();
            let candidate = SphereCoords { x: Vector3::z(), y: -Vector3::z() };
            let (residual, defect) = if oriented {
                (split.distance(&candidate), (normal - Vector3::z()).norm())
            } else {
                (
                    split.distance(&candidate).min(split.antipode().distance(&candidate)),
                    (normal - Vector3::z()).norm().min((normal + Vector3::z()).norm()),
                )
            };
            return Containment { member: defect <= MEMBERSHIP_TOL, residual };
        }

        let dxy = Vector2::new(d.x, d.y);
        let ndxy = dxy.norm();

        // Vertical lines: the only member is the axis, oriented up.
        if ndxy <= 1e-10 {
            let base = d.cross(&m) / (nd * nd);
            let candidate = SphereCoords { x: Vector3::z(), y: Vector3::z() };
            let on_axis = Vector2::new(base.x, base.y).norm() <= MEMBERSHIP_TOL;
            let (residual, member) = if oriented {
                (split.distance(&candidate), on_axis && d.z > 0.0)
            } else {
                (
                    split.distance(&candidate).min(split.antipode().distance(&candidate)),
                    on_axis,
                )
            };
            return Containment { member, residual };
        }

        // Generic finite line: drop to the xy-projection and find the point
        // of the line over the projection's closest approach to the origin.
        let p0 = d.cross(&m) / (nd * nd);
        let p0xy = Vector2::new(p0.x, p0.y);
        let tstar = -p0xy.dot(&dxy) / (ndxy * ndxy);
        let foot = p0xy + dxy * tstar;
        let zstar = p0.z + tstar * d.z;
        let rstar = foot.norm();

        if rstar <= 1e-12 {
            // Through-the-axis projection: never a member; report the
            // distance to the nearest special line for diagnosis.
            let axis = SphereCoords { x: Vector3::z(), y: Vector3::z() };
            let inf = SphereCoords { x: Vector3::z(), y: -Vector3::z() };
            let mut residual = split.distance(&axis).min(split.distance(&inf));
            if !oriented {
                let a = split.antipode();
                residual = residual.min(a.distance(&axis)).min(a.distance(&inf));
            }
            return Containment { member: false, residual };
        }

        // Candidate member over the same foot.
        let theta = foot.y.atan2(foot.x);
        let candidate = self
            .spread_line(rstar, theta)
            .expect("positive radius")
            .to_pluecker()
            .klein_split();
        let residual = if oriented {
            split.distance(&candidate)
        } else {
            split.distance(&candidate).min(split.antipode().distance(&candidate))
        };

        // Structural checks, on the upward representative in non-oriented mode.
        let (dz, dxy_rep) = if oriented || d.z >= 0.0 { (d.z, dxy) } else { (-d.z, -dxy) };
        if oriented && d.z <= 0.0 {
            return Containment { member: false, residual };
        }
        if dz == 0.0 {
            return Containment { member: false, residual };
        }
        let ruling_sign = foot.x * dxy_rep.y - foot.y * dxy_rep.x;
        let slope_defect =
            ((dz / ndxy).atan() - self.profile.slope(rstar).atan()).abs();
        let center_defect = (zstar - self.profile.center(rstar)).abs();
        let member = ruling_sign > 0.0
            && slope_defect <= MEMBERSHIP_TOL
            && center_defect <= MEMBERSHIP_TOL;
        Containment { member, residual }
    }

    /// Lines of the spread through the point `p`, as roots `(r, branch)` of
    /// the coverage equation, using the profile's default scan resolution.
    pub fn coverage_count(&self, p: Vector3<f64>) -> Result<Coverage> {
        self.coverage_count_with(p, self.profile.default_grid())
    }

    /// As [`coverage_count`](Self::coverage_count) with an explicit number of
    /// scan nodes. The scan is logarithmic on `r ∈ [ρ₀·1e−15, ρ₀]`, refined
    /// by bisection to relative 1e−12, with extremum refinement for root
    /// pairs and tangencies hiding between sign changes.
    pub fn coverage_count_with(&self, p: Vector3<f64>, grid_nodes: usize) -> Result<Coverage> {
        let rho = Vector2::new(p.x, p.y).norm();
        if rho <= 1e-8 {
            return Err(Error::AxisPoint { rho });
        }
        let z0 = p.z;
        let grid = relative_grid(grid_nodes);

        // Node values of g(r) ± √(ρ₀²−r²)·f(r) − z₀, shared between branches.
        // For the closed form, g ≡ 0 and √(ρ₀²−r²)·f(r) = c·√(1−u²)/u.
        let n = grid.u.len();
        let mut upper = Vec::with_capacity(n);
        let mut lower = Vec::with_capacity(n);
        match &self.profile {
            SpreadProfile::Complex { c } => {
                for k in 0..n {
                    let s = c * grid.w[k];
                    upper.push(s - z0);
                    lower.push(-s - z0);
                }
            }
            profile => {
                for k in 0..n {
                    let r = rho * grid.u[k];
                    let s = rho * grid.s[k] * profile.slope(r);
                    let g = profile.center(r);
                    upper.push(g + s - z0);
                    lower.push(g - s - z0);
                }
            }
        }

        let radii: Vec<f64> = grid.u.iter().map(|u| rho * u).collect();
        let sqrt_term = |r: f64| (rho * rho - r * r).max(0.0).sqrt();
        let h_upper = |r: f64| {
            self.profile.center(r) + sqrt_term(r) * self.profile.slope(r) - z0
        };
        let h_lower = |r: f64| {
            self.profile.center(r) - sqrt_term(r) * self.profile.slope(r) - z0
        };

        let mut roots: Vec<CoverageRoot> = Vec::new();

        // Boundary root: both branches meet at r = ρ₀ with value g(ρ₀) − z₀.
        let boundary = self.profile.center(rho) - z0;
        let boundary_scale = 1.0 + z0.abs() + self.profile.center(rho).abs();
        let waist = boundary.abs() <= 1e-9 * boundary_scale;
        if waist {
            roots.push(CoverageRoot { r: rho, branch: Branch::Waist, tangential: false });
        }

        scan_branch(&radii, &upper, &h_upper, Branch::Upper, waist, rho, z0, &mut roots);
        scan_branch(&radii, &lower, &h_lower, Branch::Lower, waist, rho, z0, &mut roots);

        roots.sort_by(|a, b| a.r.total_cmp(&b.r));
        Ok(Coverage { roots })
    }

    /// Samples off-axis points (log-uniform radius in [1e−3, 1e3], uniform
    /// angle, heavy-tailed height) and verifies that every point lies on
    /// exactly one spread line.
    pub fn verify_spread(&self, samples: u64, seed: u64) -> SpreadReport {
        let grid_nodes = self.profile.default_grid();

        #[derive(Default)]
        struct Acc {
            histogram: BTreeMap<usize, u64>,
            witnesses: Vec<(u64, CoverageWitness)>,
        }
        fn keep_smallest(w: &mut Vec<(u64, CoverageWitness)>) {
            w.sort_by_key(|(i, _)| *i);
            w.truncate(MAX_WITNESSES);
        }

        let acc = (0..samples)
            .into_par_iter()
            .fold(Acc::default, |mut acc, i| {
                let p = sample_probe_point(seed, i);
                let coverage =
                    self.coverage_count_with(p, grid_nodes).expect("point off the axis");
                let count = coverage.count();
                *acc.histogram.entry(count).or_insert(0) += 1;
                if count != 1 {
                    acc.witnesses.push((
                        i,
                        CoverageWitness { point: [p.x, p.y, p.z], count, roots: coverage.roots },
                    ));
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
        SpreadReport {
            profile: self.profile.clone(),
            oriented: self.oriented,
            samples,
            seed,
            grid_nodes,
            histogram: acc.histogram,
            pass,
            witnesses: acc.witnesses.into_iter().map(|(_, w)| w).collect(),
        }
    }

    /// True iff `r·f(r)` is constant and `g` vanishes (within `tol`) across
    /// the probe range: the characterization of the regular spread.
    pub fn is_regular(&self, tol: f64) -> bool {
        let (lo, hi) = self.profile.probe_range();
        let n = 129;
        let mut rf: Vec<f64> = (0..n)
            .map(|k| {
                let r = lo * (hi / lo).powf(k as f64 / (n - 1) as f64);
                r * self.profile.slope(r)
            })
            .collect();
        let max_g = (0..n)
            .map(|k| {
                let r = lo * (hi / lo).powf(k as f64 / (n - 1) as f64);
                self.profile.center(r).abs()
            })
            .fold(0.0, f64::max);
        rf.sort_by(f64::total_cmp);
        let median = rf[n / 2];
        let max_dev = rf.iter().map(|v| (v - median).abs()).fold(0.0, f64::max);
        max_dev <= tol * median.max(1.0) && max_g <= tol
    }
}

/// Probe-point stream used by [`RotationalSpread::verify_spread`] (and the
/// CSV sample dump): log-uniform radius in [1e−3, 1e3], uniform angle, and a
/// heavy-tailed height scaled with the radius so distant cells get exercised.
pub fn sample_probe_point(seed: u64, index: u64) -> Vector3<f64> {
    let mut rng = CounterRng::new(seed, index);
    let rho = rng.log_uniform(1e-3, 1e3);
    let theta = rng.uniform(0.0, std::f64::consts::TAU);
    let z = rng.cauchy() * (1.0 + rho);
    Vector3::new(rho * theta.cos(), rho * theta.sin(), z)
}

/// Shared relative scan grid: `u` log-spaced on [1e−15, 1] (last node exactly
/// 1), `s = √(1−u²)`, `w = s/u`.
struct RelativeGrid {
    u: Vec<f64>,
    s: Vec<f64>,
    w: Vec<f64>,
}

fn relative_grid(n: usize) -> Arc<RelativeGrid> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RelativeGrid>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("grid cache");
    guard
        .entry(n.max(16))
        .or_insert_with_key(|&n| {
            let span = (1e-15f64).ln();
            let u: Vec<f64> = (0..n)
                .map(|k| {
                    if k == n - 1 {
                        1.0
                    } else {
                        (span * (1.0 - k as f64 / (n - 1) as f64)).exp()
                    }
                })
                .collect();
            let s: Vec<f64> = u.iter().map(|u| (1.0 - u * u).max(0.0).sqrt()).collect();
            let w: Vec<f64> = u.iter().zip(&s).map(|(u, s)| s / u).collect();
            Arc::new(RelativeGrid { u, s, w })
        })
        .clone()
}

/// Scans one branch for sign changes (bisection refinement) and for root
/// pairs or tangencies hidden between nodes near discrete extrema.
#[allow(clippy::too_many_arguments)]
fn scan_branch(
    radii: &[f64],
    values: &[f64],
    h: &impl Fn(f64) -> f64,
    branch: Branch,
    waist_present: bool,
    rho: f64,
    z0: f64,
    roots: &mut Vec<CoverageRoot>,
) {
    let n = radii.len();
    let scale = 1.0 + z0.abs();
    let near_boundary = |r: f64| waist_present && (rho - r).abs() <= 1e-9 * rho;
    let push = |r: f64, tangential: bool, roots: &mut Vec<CoverageRoot>| {
        if near_boundary(r) {
            return; // already counted as the waist root
        }
        if roots
            .iter()
            .any(|row| row.branch == branch && (row.r - r).abs() <= 1e-9 * r.max(1e-300))
        {
            return;
        }
        roots.push(CoverageRoot { r, branch, tangential });
    };

    for k in 0..n - 1 {
        let (a, b) = (radii[k], radii[k + 1]);
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 {
            push(a, false, roots);
            continue;
        }
        if fa * fb < 0.0 {
            push(bisect(h, a, b, fa), false, roots);
        }
    }
    if values[n - 1] == 0.0 && !near_boundary(radii[n - 1]) {
        push(radii[n - 1], false, roots);
    }

    // Discrete-extremum cells: the slope sign flips at node k while the
    // values keep one sign; a pair of crossings or a tangency may hide there.
    for k in 1..n - 1 {
        let s_prev = values[k] - values[k - 1];
        let s_next = values[k + 1] - values[k];
        if s_prev * s_next >= 0.0 {
            continue;
        }
        let sign = values[k].signum();
        if values[k - 1].signum() != sign || values[k + 1].signum() != sign {
            continue; // a plain crossing already handled
        }
        // Is the extremum worth refining? Only if the mid value is small
        // compared to the local scale.
        if values[k].abs() > 0.2 * (values[k - 1].abs() + values[k + 1].abs() + scale) {
            continue;
        }
        let (mut lo, mut hi) = (radii[k - 1], radii[k + 1]);
        // Ternary search for the extremum of sign·h.
        for _ in 0..200 {
            if (hi - lo) <= 1e-13 * hi {
                break;
            }
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if sign * h(m1) < sign * h(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let x = 0.5 * (lo + hi);
        let v = h(x);
        if v == 0.0 || v.signum() != sign {
            if sign * v < -1e-12 * scale {
                // Two genuine crossings around the extremum.
                let (la, lb) = (radii[k - 1], x);
                push(bisect(h, la, lb, h(la)), false, roots);
                let (ra, rb) = (x, radii[k + 1]);
                push(bisect(h, ra, rb, h(ra)), false, roots);
            } else {
                push(x, true, roots);
            }
        } else if v.abs() <= 1e-9 * scale {
            push(x, true, roots);
        }
    }
}

/// Bisection on [a, b] given h(a) = fa with a sign change; refines to
/// relative width 1e−12.
fn bisect(h: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sign = fa.signum();
    for _ in 0..200 {
        if (b - a) <= 1e-12 * b {
            break;
        }
        let mid = 0.5 * (a + b);
        let val = h(mid);
        if val == 0.0 {
            return mid;
        }
        if val.signum() == sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
