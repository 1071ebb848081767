//! Independent checks that use function values only: winding numbers,
//! finite-difference derivatives and a grid search for injectivity failures.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::MeromorphicFn;
use crate::error::{Error, Result};
use crate::jet::ComplexJet;
use crate::report::ser_complex;
use crate::scan::{sample_exterior, SamplingPlan};

/// Largest grid accepted by the pairwise scan.
pub const PAIRWISE_LIMIT: usize = 2000;

const CLOSURE_TOL: f64 = 1e-12;
const SEGMENT_GUARD: f64 = 1e-9;
const WINDING_RESIDUAL: f64 = 0.1;
const NEWTON_ITERATIONS: usize = 40;

fn distance_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * s)).norm()
}

/// Winding number of a closed polygon (first sample repeated at the end)
/// around `point`.
pub fn winding_number(contour: &[Complex64], point: Complex64) -> Result<i64> {
    if contour.len() < 2 || (contour[0] - contour[contour.len() - 1]).norm() > CLOSURE_TOL {
        return Err(Error::OpenContour);
    }
    let mut total = 0.0;
    for seg in contour.windows(2) {
        if distance_to_segment(point, seg[0], seg[1]) <= SEGMENT_GUARD {
            return Err(Error::PointTooCloseToContour(point));
        }
        total += ((seg[1] - point) / (seg[0] - point)).arg();
    }
    let turns = total / (2.0 * PI);
    let n = turns.round();
    if (turns - n).abs() >= WINDING_RESIDUAL {
        return Err(Error::PointTooCloseToContour(point));
    }
    Ok(n as i64)
}

/// Central differences on the real offsets `±step, ±2 step`, second order in
/// `step` for every derivative. The step is snapped so that `zeta.re + step`
/// is exact.
pub fn fd_derivatives(f: &MeromorphicFn, zeta: Complex64, step: f64) -> Result<ComplexJet> {
    let h = (zeta.re + step) - zeta.re;
    let stencil = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k| zeta + k * h);
    if !(step > 0.0 && h > 0.0) || stencil.iter().any(|z| !(z.norm() > 1.0)) {
        return Err(Error::StencilLeavesDomain(zeta));
    }
    let mut v = [Complex64::new(0.0, 0.0); 5];
    for (slot, z) in v.iter_mut().zip(stencil) {
        *slot = f.value(z)?;
    }
    let [m2, m1, f0, p1, p2] = v;
    Ok(ComplexJet::new(
        f0,
        (p1 - m1) / (2.0 * h),
        (p1 - 2.0 * f0 + m1) / (h * h),
        (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collision {
    #[serde(serialize_with = "ser_complex")]
    pub z1: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub z2: Complex64,
    pub image_distance: f64,
    pub domain_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionReport {
    pub collisions: Vec<Collision>,
    pub grid_size: usize,
    pub collision_tolerance: f64,
    pub separation_floor: f64,
}

impl CollisionReport {
    pub fn injective_on_grid(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Domain points with their images and the image-side size of each point's
/// grid cell.
struct Sampled {
    points: Vec<Complex64>,
    images: Vec<Complex64>,
    /// image-side reach `|f'| * cell`
    reach: Vec<f64>,
    r_lo: f64,
    r_hi: f64,
}

fn value_derivative(f: &MeromorphicFn, z: Complex64) -> Result<Complex64> {
    let h = 1e-6 * z.norm().max(1.0);
    Ok((f.value(z + h)? - f.value(z - h)?) / (2.0 * h))
}

fn lex(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

impl Sampled {
    fn new(f: &MeromorphicFn, plan: &SamplingPlan) -> Result<Self> {
        let cell_factor = (plan.log_radial_step().exp() - 1.0).max(plan.angular_step());
        Self::from_points(f, sample_exterior(plan)?, cell_factor, plan.r_min, plan.r_max)
    }

    /// `cell_factor * |z|` is the domain size of the cell around `z`.
    fn from_points(f: &MeromorphicFn, points: Vec<Complex64>, cell_factor: f64, r_lo: f64, r_hi: f64) -> Result<Self> {
        let evaluated: Vec<Result<(Complex64, f64)>> = points
            .par_iter()
            .map(|&z| {
                let fz = f.value(z)?;
                let d = value_derivative(f, z)?;
                let reach = d.norm() * z.norm() * cell_factor;
                if !fz.is_finite() || !reach.is_finite() {
                    return Err(Error::PoleAtPoint(z));
                }
                Ok((fz, reach))
            })
            .collect();
        let mut images = Vec::with_capacity(points.len());
        let mut reach = Vec::with_capacity(points.len());
        for (z, r) in points.iter().zip(evaluated) {
            let (fz, k) = r.map_err(|e| Error::EvaluationFailure(format!("at {z}: {e}")))?;
            images.push(fz);
            reach.push(k);
        }
        Ok(Self {
            points,
            images,
            reach,
            r_lo,
            r_hi,
        })
    }

    fn is_candidate(&self, i: usize, j: usize) -> bool {
        (self.images[i] - self.images[j]).norm() <= self.reach[i] + self.reach[j]
    }

    /// Unordered index pairs whose image cells may overlap, via a hash grid.
    fn bucketed_candidates(&self) -> BTreeSet<(usize, usize)> {
        let n = self.points.len();
        let width = median(self.reach.clone());
        let mut out = BTreeSet::new();
        if !(width > 0.0) {
            return self.pairwise_candidates();
        }
        let key = |z: Complex64| ((z.re / width).floor() as i64, (z.im / width).floor() as i64);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &w) in self.images.iter().enumerate() {
            buckets.entry(key(w)).or_default().push(i);
        }
        for i in 0..n {
            let radius = 2.0 * self.reach[i];
            let span = (radius / width).ceil() as i64;
            let mut visit = |j: usize| {
                if j != i && self.reach[j] <= self.reach[i] && self.is_candidate(i, j) {
                    out.insert((i.min(j), i.max(j)));
                }
            };
            if (2 * span + 1).saturating_mul(2 * span + 1) as usize > n {
                (0..n).for_each(&mut visit);
                continue;
            }
            let (kx, ky) = key(self.images[i]);
            for dx in -span..=span {
                for dy in -span..=span {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                        list.iter().copied().for_each(&mut visit);
                    }
                }
            }
        }
        out
    }

    fn pairwise_candidates(&self) -> BTreeSet<(usize, usize)> {
        let n = self.points.len();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.is_candidate(i, j) {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    fn default_tolerance(&self, plan: &SamplingPlan) -> f64 {
        let (nr, na) = (plan.radial_count, plan.angular_count);
        let nn = (0..self.points.len())
            .map(|i| {
                let (ri, ai) = (i / na, i % na);
                let mut best = f64::INFINITY;
                let mut consider = |j: usize| {
                    if j != i {
                        best = best.min((self.images[i] - self.images[j]).norm());
                    }
                };
                consider(ri * na + (ai + 1) % na);
                consider(ri * na + (ai + na - 1) % na);
                if ri + 1 < nr {
                    consider((ri + 1) * na + ai);
                }
                if ri > 0 {
                    consider((ri - 1) * na + ai);
                }
                best
            })
            .filter(|d| d.is_finite())
            .collect();
        1e-9 * median(nn)
    }

    /// Moves `start` so that its image lands on `target`.
    fn polish(&self, f: &MeromorphicFn, start: Complex64, target: Complex64, tol: f64) -> Option<(Complex64, f64)> {
        let mut z = start;
        let mut err = (f.value(z).ok()? - target).norm();
        for _ in 0..NEWTON_ITERATIONS {
            if err <= 1e-3 * tol {
                break;
            }
            let d = value_derivative(f, z).ok()?;
            if d.norm() == 0.0 || !d.is_finite() {
                return None;
            }
            let next = z - (f.value(z).ok()? - target) / d;
            let next_err = (f.value(next).ok()? - target).norm();
            if !(next_err < err) {
                break;
            }
            z = next;
            err = next_err;
        }
        let r = z.norm();
        let slack = 1e-12 * self.r_hi;
        if r < self.r_lo - slack || r > self.r_hi + slack {
            return None;
        }
        Some((z, err))
    }

    fn confirm(
        &self,
        f: &MeromorphicFn,
        candidates: BTreeSet<(usize, usize)>,
        tol: f64,
        floor: f64,
    ) -> Vec<Collision> {
        let pairs: Vec<(usize, usize)> = candidates
            .into_iter()
            .filter(|&(i, j)| (self.points[i] - self.points[j]).norm() >= floor / 2.0)
            .collect();
        let found: Vec<Option<Collision>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let (a, b) = if lex(self.points[i], self.points[j]).is_le() { (i, j) } else { (j, i) };
                let (z1, z2) = (self.points[a], self.points[b]);
                let (moved, image_distance) = self.polish(f, z2, self.images[a], tol)?;
                let domain_distance = (moved - z1).norm();
                (image_distance <= tol && domain_distance >= floor).then_some(Collision {
                    z1,
                    z2: moved,
                    image_distance,
                    domain_distance,
                })
            })
            .collect();
        // one collision per anchor: the closest image, ties by partner
        let mut best: BTreeMap<(u64, u64), Collision> = BTreeMap::new();
        for c in found.into_iter().flatten() {
            let key = (c.z1.re.to_bits(), c.z1.im.to_bits());
            let replace = match best.get(&key) {
                None => true,
                Some(old) => c
                    .image_distance
                    .total_cmp(&old.image_distance)
                    .then(lex(c.z2, old.z2))
                    .is_lt(),
            };
            if replace {
                best.insert(key, c);
            }
        }
        let mut out: Vec<Collision> = best.into_values().collect();
        out.sort_by(|a, b| lex(a.z1, b.z1).then(lex(a.z2, b.z2)));
        out
    }
}

fn default_floor(plan: &SamplingPlan) -> f64 {
    let radii = plan.radii();
    let spacings: Vec<f64> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let angular = if plan.angular_count > 1 {
                2.0 * r * (plan.angular_step() / 2.0).sin()
            } else {
                f64::INFINITY
            };
            let radial = [i.checked_sub(1).map(|j| radii[j]), radii.get(i + 1).copied()]
                .into_iter()
                .flatten()
                .map(|s| (s - r).abs())
                .fold(f64::INFINITY, f64::min);
            angular.min(radial)
        })
        .flat_map(|s| std::iter::repeat_n(s, plan.angular_count))
        .collect();
    2.0 * median(spacings)
}

fn run_scan(
    f: &MeromorphicFn,
    plan: &SamplingPlan,
    collision_tolerance: Option<f64>,
    separation_floor: Option<f64>,
    pairwise: bool,
) -> Result<CollisionReport> {
    let sampled = Sampled::new(f, plan)?;
    let tol = collision_tolerance.unwrap_or_else(|| sampled.default_tolerance(plan));
    let floor = separation_floor.unwrap_or_else(|| default_floor(plan));
    let candidates = if pairwise {
        sampled.pairwise_candidates()
    } else {
        sampled.bucketed_candidates()
    };
    Ok(CollisionReport {
        collisions: sampled.confirm(f, candidates, tol, floor),
        grid_size: sampled.points.len(),
        collision_tolerance: tol,
        separation_floor: floor,
    })
}

/// Searches the plan's grid for pairs `z1 != z2` with `f(z1) = f(z2)`.
///
/// Pairs whose image cells overlap are found by spatial hashing and then
/// confirmed by moving one point with Newton's method until its image meets
/// the other's. A pair is reported when the images agree to
/// `collision_tolerance` and the domain points stay `separation_floor` apart.
/// `None` selects the defaults: `1e-9` times the median image distance
/// between grid neighbours, and twice the median grid spacing.
pub fn injectivity_scan(
    f: &MeromorphicFn,
    plan: &SamplingPlan,
    collision_tolerance: Option<f64>,
    separation_floor: Option<f64>,
) -> Result<CollisionReport> {
    run_scan(f, plan, collision_tolerance, separation_floor, false)
}

/// [`injectivity_scan`] with an all-pairs candidate search, for grids of at
/// most [`PAIRWISE_LIMIT`] points.
pub fn injectivity_scan_pairwise(
    f: &MeromorphicFn,
    plan: &SamplingPlan,
    collision_tolerance: Option<f64>,
    separation_floor: Option<f64>,
) -> Result<CollisionReport> {
    let n = plan.radial_count.saturating_mul(plan.angular_count);
    if n > PAIRWISE_LIMIT {
        return Err(Error::InvalidPlan(format!(
            "pairwise scan limited to {PAIRWISE_LIMIT} points, plan has {n}"
        )));
    }
    run_scan(f, plan, collision_tolerance, separation_floor, true)
}
