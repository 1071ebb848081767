//! Sampling of the exterior disk, supremum estimation of a criterion over the
//! samples, and verdicts.
//!
//! A scan is a finite computation and can never certify a statement "for all
//! zeta"; every verdict here means "satisfied on the evaluated samples".

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{corollary_lhs, CriterionParams};
use crate::error::{Error, Result};
use crate::report::ser_complex;

/// Relative improvement below which the last refinement round counts as converged.
pub const REFINEMENT_RTOL: f64 = 1e-4;

/// Default pass/fail tolerance on the supremum.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub r_min: f64,
    pub r_max: f64,
    pub radial_count: usize,
    pub angular_count: usize,
    pub refine_depth: usize,
    pub refine_factor: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            r_min: 1.0 + 1e-3,
            r_max: 50.0,
            radial_count: 64,
            angular_count: 128,
            refine_depth: 2,
            refine_factor: 4,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 1.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::InvalidPlan(format!(
                "need 1 < r_min < r_max < inf, got r_min = {}, r_max = {}",
                self.r_min, self.r_max
            )));
        }
        if self.radial_count == 0 || self.angular_count == 0 || self.refine_factor == 0 {
            return Err(Error::InvalidPlan(
                "radial_count, angular_count and refine_factor must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Log-radius step between consecutive rings (0 for a single ring).
    pub fn log_radial_step(&self) -> f64 {
        if self.radial_count < 2 {
            0.0
        } else {
            (self.r_max / self.r_min).ln() / (self.radial_count - 1) as f64
        }
    }

    pub fn angular_step(&self) -> f64 {
        2.0 * PI / self.angular_count as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        let n = self.radial_count;
        (0..n)
            .map(|i| {
                if i + 1 == n && n > 1 {
                    self.r_max
                } else {
                    self.r_min * (i as f64 * self.log_radial_step()).exp()
                }
            })
            .collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.angular_count)
            .map(|k| 2.0 * PI * k as f64 / self.angular_count as f64)
            .collect()
    }
}

/// Grid points, radius-major then angle.
pub fn sample_exterior(plan: &SamplingPlan) -> Result<Vec<Complex64>> {
    plan.validate()?;
    let angles = plan.angles();
    Ok(plan
        .radii()
        .into_iter()
        .flat_map(|r| angles.iter().map(move |&t| Complex64::from_polar(r, t)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupReport {
    pub sup_estimate: f64,
    #[serde(serialize_with = "ser_complex")]
    pub argmax: Complex64,
    /// The supremum is the extrapolated tail value; `argmax` is then the
    /// outer-ring point on the angle where it was attained.
    pub argmax_at_tail: bool,
    pub samples_evaluated: usize,
    pub refinement_converged: bool,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    /// CLI exit status for this outcome.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// `1 - sup_estimate`
    pub margin: f64,
    pub tol: f64,
}

/// A finished scan together with every evaluated `(point, value)` in
/// evaluation order.
#[derive(Debug, Clone)]
pub struct ScanTrace {
    pub report: SupReport,
    pub samples: Vec<(Complex64, f64)>,
}

fn evaluate_all(p: &CriterionParams, points: &[Complex64]) -> Result<Vec<f64>> {
    let values: Vec<Result<f64>> = points.par_iter().map(|&z| corollary_lhs(p, z)).collect();
    values
        .into_iter()
        .zip(points)
        .map(|(v, &z)| match v {
            Ok(x) if x.is_finite() => Ok(x),
            Ok(_) => Err(Error::EvaluationFailure(format!("non-finite criterion value at {z}"))),
            Err(Error::CriticalPoint(at)) => Err(Error::CriticalPointInRegion(at)),
            Err(e) => Err(Error::EvaluationFailure(format!("at {z}: {e}"))),
        })
        .collect()
}

/// First index of the maximum, scanning in order.
fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Runs the full scan and keeps every sample.
pub fn scan(p: &CriterionParams, plan: &SamplingPlan) -> Result<ScanTrace> {
    let grid = sample_exterior(plan)?;
    let grid_values = evaluate_all(p, &grid)?;
    let mut samples: Vec<(Complex64, f64)> = grid.iter().copied().zip(grid_values.iter().copied()).collect();

    let best = argmax(&grid_values).expect("plan has at least one point");
    let (mut best_point, mut best_value) = samples[best];

    // local refinement around the running argmax
    let mut converged = false;
    let (dl, dt) = (plan.log_radial_step(), plan.angular_step());
    let factor = plan.refine_factor as i64;
    for round in 1..=plan.refine_depth {
        let scale = (plan.refine_factor as f64).powi(round as i32);
        let (sl, st) = (dl / scale, dt / scale);
        let (l0, t0) = (best_point.norm().ln(), best_point.arg());
        let mut local = Vec::new();
        for i in -factor..=factor {
            let r = (l0 + i as f64 * sl).exp();
            if (i != 0 && sl == 0.0) || r < plan.r_min || r > plan.r_max {
                continue;
            }
            for j in -factor..=factor {
                if i == 0 && j == 0 {
                    continue;
                }
                local.push(Complex64::from_polar(r, t0 + j as f64 * st));
            }
        }
        let values = evaluate_all(p, &local)?;
        let before = best_value;
        if let Some(k) = argmax(&values) {
            if values[k] > best_value {
                best_value = values[k];
                best_point = local[k];
            }
        }
        samples.extend(local.into_iter().zip(values));
        if round == plan.refine_depth {
            converged = best_value - before <= REFINEMENT_RTOL * best_value.abs();
        }
    }

    // tail: compare the outer ring with a ring at twice its radius and
    // extrapolate assuming the leading correction decays like |zeta|^-2
    let angles = plan.angles();
    let outer_start = (plan.radial_count - 1) * plan.angular_count;
    let far: Vec<Complex64> = angles
        .iter()
        .map(|&t| Complex64::from_polar(2.0 * plan.r_max, t))
        .collect();
    let far_values = evaluate_all(p, &far)?;
    let mut tail_estimate = 0.0f64;
    let mut tail_point = far[0];
    for (k, &v2) in far_values.iter().enumerate() {
        let v1 = grid_values[outer_start + k];
        let extrapolated = v2 + (v2 - v1) / 3.0;
        if extrapolated > tail_estimate {
            tail_estimate = extrapolated;
            tail_point = far[k];
        }
    }
    if let Some(k) = argmax(&far_values) {
        if far_values[k] > best_value {
            best_value = far_values[k];
            best_point = far[k];
        }
    }
    samples.extend(far.into_iter().zip(far_values));

    let argmax_at_tail = tail_estimate > best_value;
    let report = SupReport {
        sup_estimate: best_value.max(tail_estimate),
        argmax: if argmax_at_tail { tail_point } else { best_point },
        argmax_at_tail,
        samples_evaluated: samples.len(),
        refinement_converged: converged,
        tail_estimate,
    };
    Ok(ScanTrace { report, samples })
}

/// Supremum estimate of the selected criterion over the plan's region.
pub fn estimate_sup(p: &CriterionParams, plan: &SamplingPlan) -> Result<SupReport> {
    scan(p, plan).map(|t| t.report)
}

/// Pass only when the supremum is within `tol` of 1 and refinement settled.
pub fn issue_verdict(report: &SupReport, tol: f64) -> Verdict {
    let outcome = if report.sup_estimate > 1.0 + tol {
        Outcome::Fail
    } else if report.refinement_converged {
        Outcome::Pass
    } else {
        Outcome::Inconclusive
    };
    Verdict {
        outcome,
        margin: 1.0 - report.sup_estimate,
        tol,
    }
}

/// Writes `re,im,lhs` rows in evaluation order.
pub fn write_grid_csv<W: Write>(samples: &[(Complex64, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "re,im,lhs")?;
    for (z, v) in samples {
        writeln!(out, "{},{},{}", z.re, z.im, v)?;
    }
    out.flush()
}
