//! The Loewner chain built from `(f, g, h, alpha)` and numeric audits of the
//! conditions that make it a chain: `Re p > 0`, `a1(t) = e^t`, subordination
//! in `t`, and boundedness of `f(z,t)/e^t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{u_and_v, HFunction, MeromorphicFn, CRITICAL_EPS};
use crate::error::{Error, Result};
use crate::oracle::winding_number;
use crate::report::Point;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

/// `|1 - w|` below this means `p` is undefined.
pub const W_ONE_GUARD: f64 = 1e-15;

/// Change in `a1` under node doubling above which an estimate is flagged.
pub const A1_DOUBLING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub f: MeromorphicFn,
    pub g: MeromorphicFn,
    pub h: HFunction,
    pub alpha: Complex64,
    /// Squares `f''/f' - g''/g'` in `w`, as in the criteria module.
    pub squared_variant: bool,
}

impl ChainSpec {
    pub fn new(f: MeromorphicFn, g: MeromorphicFn, h: HFunction, alpha: Complex64) -> Self {
        Self {
            f,
            g,
            h,
            alpha,
            squared_variant: true,
        }
    }

    /// `f = g = identity`, `h = 1`: the chain `e^t z`.
    pub fn trivial() -> Self {
        Self::new(
            MeromorphicFn::identity(),
            MeromorphicFn::identity(),
            HFunction::constant_one(),
            HALF,
        )
    }
}

fn check_point(z: Complex64, t: f64) -> Result<()> {
    if z == Complex64::new(0.0, 0.0) || !(z.norm() <= 1.0) {
        return Err(Error::OutsideDomain(z));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::EvaluationFailure(format!("time {t} must be finite and >= 0")));
    }
    Ok(())
}

/// `f(z,t)` for `0 < |z| <= 1`, `t >= 0`.
///
/// With `s = e^t/z` and `k = (e^-t - e^t)/z = e^-t/z - s` the chain is
/// `(v + k h v') / (u + k h u')` at `s`; both sums are grouped as
/// `(x - s h x') + (e^-t/z) h x'` so that the `t -> infinity` limit does not
/// subtract two large terms.
pub fn chain_eval(spec: &ChainSpec, z: Complex64, t: f64) -> Result<Complex64> {
    check_point(z, t)?;
    let s = t.exp() / z;
    let k0 = (-t).exp() / z;
    let (u, v) = u_and_v(&spec.f, &spec.g, spec.alpha, s)?;
    let hv = spec.h.value(s)?;
    let den = (u.value - s * hv * u.d1) + k0 * hv * u.d1;
    let num = (v.value - s * hv * v.d1) + k0 * hv * v.d1;
    if den == Complex64::new(0.0, 0.0) || !den.is_finite() {
        return Err(Error::DenominatorVanishes { z, t });
    }
    let out = num / den;
    if !out.is_finite() {
        return Err(Error::DenominatorVanishes { z, t });
    }
    Ok(out)
}

/// `w(z,t)`, with `p = (1 + w)/(1 - w)`, in closed form. All functions are
/// evaluated at `s = e^t/z`:
///
/// ```text
/// w = e^2t (1-h)/h + (1 - e^2t) s [h'/h + (1-2a) f''/f' + 2a g''/g']
///   + a e^2t (e^-2t - 1)^2 (e^2t/z^2) h [(S_f - S_g) + (a - 1/2) D]
/// ```
///
/// where `D = (f''/f' - g''/g')^2`, or its first power when
/// `squared_variant` is off.
pub fn chain_w(spec: &ChainSpec, z: Complex64, t: f64) -> Result<Complex64> {
    check_point(z, t)?;
    let s = t.exp() / z;
    let fj = spec.f.jet(s)?;
    let gj = spec.g.jet(s)?;
    if fj.d1.norm() <= CRITICAL_EPS || gj.d1.norm() <= CRITICAL_EPS {
        return Err(Error::CriticalPoint(s));
    }
    let hj = spec.h.jet(s)?;
    if hj.value == Complex64::new(0.0, 0.0) {
        return Err(Error::HVanishes(s));
    }
    let (pf, sf) = (fj.pre_schwarzian()?, fj.schwarzian()?);
    let (pg, sg) = (gj.pre_schwarzian()?, gj.schwarzian()?);
    let (h, h1) = (hj.value, hj.d1);
    let a = spec.alpha;
    let e2 = (2.0 * t).exp();
    let delta = pf - pg;
    let delta = if spec.squared_variant { delta * delta } else { delta };
    let m = (-2.0 * t).exp() - 1.0;
    let w = e2 * (ONE - h) / h
        + (1.0 - e2) * s * (h1 / h + (ONE - 2.0 * a) * pf + 2.0 * a * pg)
        + a * (e2 * m * m) * (e2 / (z * z)) * h * ((sf - sg) + (a - HALF) * delta);
    if !w.is_finite() {
        return Err(Error::EvaluationFailure(format!("w is not finite at z = {z}, t = {t}")));
    }
    Ok(w)
}

/// `(1 + w)/(1 - w)`.
pub fn p_from_w(w: Complex64) -> Result<Complex64> {
    if (ONE - w).norm() < W_ONE_GUARD {
        return Err(Error::WEqualsOne);
    }
    Ok((ONE + w) / (ONE - w))
}

pub fn chain_p(spec: &ChainSpec, z: Complex64, t: f64) -> Result<Complex64> {
    p_from_w(chain_w(spec, z, t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct A1Estimate {
    pub value: Point,
    /// `|a1(2N nodes) - a1(N nodes)|`
    pub delta: f64,
    /// `delta >= A1_DOUBLING_TOL`, a sign of a singularity near the contour.
    pub flagged: bool,
}

impl A1Estimate {
    pub fn complex(&self) -> Complex64 {
        self.value.into()
    }
}

fn trapezoid_a1(spec: &ChainSpec, t: f64, radius: f64, nodes: usize) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..nodes {
        let z = Complex64::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64);
        let fz = chain_eval(spec, z, t).map_err(|_| Error::ContourThroughSingularity(z))?;
        sum += fz / z;
    }
    Ok(sum / nodes as f64)
}

/// First Taylor coefficient of `z -> f(z,t)` from the trapezoid rule on
/// `|z| = circle_radius`, cross-checked against twice the node count.
pub fn extract_a1(spec: &ChainSpec, t: f64, circle_radius: f64, node_count: usize) -> Result<A1Estimate> {
    if !(circle_radius > 0.0 && circle_radius < 1.0) || node_count == 0 {
        return Err(Error::InvalidPlan(format!(
            "a1 needs 0 < radius < 1 and nodes > 0, got {circle_radius}, {node_count}"
        )));
    }
    let coarse = trapezoid_a1(spec, t, circle_radius, node_count)?;
    let fine = trapezoid_a1(spec, t, circle_radius, 2 * node_count)?;
    let delta = (fine - coarse).norm();
    Ok(A1Estimate {
        value: coarse.into(),
        delta,
        flagged: !(delta < A1_DOUBLING_TOL),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinationFailure {
    pub t: f64,
    pub s: f64,
    pub probe: Point,
    /// `None` when the winding number could not be computed.
    pub winding: Option<i64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinationResult {
    pub t: f64,
    pub s: f64,
    pub holds: bool,
    pub failures: Vec<SubordinationFailure>,
}

/// Tests `f(., t) < f(., s)` by containment: images of probes on
/// `|z| = 0.9 r` at time `t` must lie inside the image of `|z| = r` at time
/// `s`. Nothing forces `t <= s`; swapped times simply test the reverse
/// containment.
pub fn subordination_check(
    spec: &ChainSpec,
    t: f64,
    s: f64,
    r: f64,
    boundary_nodes: usize,
    probe_nodes: usize,
) -> Result<SubordinationResult> {
    if !(r > 0.0 && r < 1.0) || boundary_nodes < 3 || probe_nodes == 0 {
        return Err(Error::InvalidPlan(format!(
            "subordination needs 0 < r < 1, >= 3 boundary nodes and >= 1 probe, got {r}, {boundary_nodes}, {probe_nodes}"
        )));
    }
    let mut contour = (0..boundary_nodes)
        .map(|k| {
            let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / boundary_nodes as f64);
            chain_eval(spec, z, s).map_err(|_| Error::ContourThroughSingularity(z))
        })
        .collect::<Result<Vec<_>>>()?;
    contour.push(contour[0]);

    let mut failures = Vec::new();
    for j in 0..probe_nodes {
        let z0 = Complex64::from_polar(0.9 * r, 2.0 * PI * j as f64 / probe_nodes as f64);
        let fail = |winding, reason: String| SubordinationFailure {
            t,
            s,
            probe: z0.into(),
            winding,
            reason,
        };
        match chain_eval(spec, z0, t) {
            Err(e) => failures.push(fail(None, e.to_string())),
            Ok(image) => match winding_number(&contour, image) {
                Ok(1) => {}
                Ok(n) => failures.push(fail(Some(n), format!("winding number {n}"))),
                Err(e) => failures.push(fail(None, e.to_string())),
            },
        }
    }
    Ok(SubordinationResult {
        t,
        s,
        holds: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditSettings {
    pub a1_radius: f64,
    pub a1_nodes: usize,
    pub a1_tol: f64,
    pub subordination_radius: f64,
    pub boundary_nodes: usize,
    pub probe_nodes: usize,
    pub lipschitz_delta: f64,
}

impl Default for AuditSettings {
    fn default() -> Self {
        Self {
            a1_radius: 0.5,
            a1_nodes: 256,
            a1_tol: 1e-6,
            subordination_radius: 0.5,
            boundary_nodes: 256,
            probe_nodes: 32,
            lipschitz_delta: 1e-4,
        }
    }
}

/// Circles `|z| in {0.5, 0.9, 1}` with 64 angles each.
pub fn default_z_samples() -> Vec<Complex64> {
    [0.5, 0.9, 1.0]
        .iter()
        .flat_map(|&r| (0..64).map(move |k| Complex64::from_polar(r, 2.0 * PI * k as f64 / 64.0)))
        .collect()
}

pub fn default_t_samples() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub z: Point,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A1Row {
    pub t: f64,
    pub value: Option<Point>,
    /// `|a1 - e^t| / e^t`; infinite when extraction failed.
    pub residual: f64,
    pub delta: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationError {
    pub z: Point,
    pub t: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub max_abs_w: f64,
    pub witness_w: Option<Witness>,
    pub min_re_p: f64,
    pub witness_p: Option<Witness>,
    /// samples with `|w| >= 1`
    pub w_violations: usize,
    pub a1: Vec<A1Row>,
    pub subordination: Vec<SubordinationResult>,
    /// max `|f(z,t)| / e^t`
    pub boundedness_proxy: f64,
    /// max `|f(z,t+d) - f(z,t)| / d`
    pub lipschitz_proxy: f64,
    pub evaluation_errors: Vec<EvaluationError>,
    pub settings: AuditSettings,
    pub pass: bool,
}

struct SampleResult {
    w: Result<Complex64>,
    chain: Result<(f64, f64)>,
}

/// Audits the chain on the product grid `t_samples x z_samples`, aggregated
/// t-major. Evaluation errors are recorded per sample.
pub fn audit_pommerenke(spec: &ChainSpec, z_samples: &[Complex64], t_samples: &[f64]) -> AuditReport {
    audit_pommerenke_with(spec, z_samples, t_samples, &AuditSettings::default())
}

pub fn audit_pommerenke_with(
    spec: &ChainSpec,
    z_samples: &[Complex64],
    t_samples: &[f64],
    settings: &AuditSettings,
) -> AuditReport {
    let grid: Vec<(f64, Complex64)> = t_samples
        .iter()
        .flat_map(|&t| z_samples.iter().map(move |&z| (t, z)))
        .collect();
    let delta = settings.lipschitz_delta;
    let results: Vec<SampleResult> = grid
        .par_iter()
        .map(|&(t, z)| SampleResult {
            w: chain_w(spec, z, t),
            chain: chain_eval(spec, z, t).and_then(|f0| {
                let f1 = chain_eval(spec, z, t + delta)?;
                Ok((f0.norm() / t.exp(), (f1 - f0).norm() / delta))
            }),
        })
        .collect();

    let mut report = AuditReport {
        max_abs_w: f64::NAN,
        witness_w: None,
        min_re_p: f64::NAN,
        witness_p: None,
        w_violations: 0,
        a1: Vec::new(),
        subordination: Vec::new(),
        boundedness_proxy: 0.0,
        lipschitz_proxy: 0.0,
        evaluation_errors: Vec::new(),
        settings: *settings,
        pass: false,
    };
    let mut record = |z: Complex64, t: f64, e: &Error| {
        report_error(&mut report.evaluation_errors, z, t, e);
    };
    let mut max_w: Option<(f64, Witness)> = None;
    let mut min_p: Option<(f64, Witness)> = None;
    let mut bounded = 0.0f64;
    let mut lipschitz = 0.0f64;
    let mut violations = 0;
    for (&(t, z), r) in grid.iter().zip(&results) {
        let witness = Witness { z: z.into(), t };
        match &r.w {
            Ok(w) => {
                let aw = w.norm();
                if aw >= 1.0 {
                    violations += 1;
                }
                if max_w.is_none_or(|(m, _)| aw > m) {
                    max_w = Some((aw, witness));
                }
                match p_from_w(*w) {
                    Ok(p) => {
                        if min_p.is_none_or(|(m, _)| p.re < m) {
                            min_p = Some((p.re, witness));
                        }
                    }
                    Err(e) => record(z, t, &e),
                }
            }
            Err(e) => record(z, t, e),
        }
        match &r.chain {
            Ok((b, l)) => {
                bounded = bounded.max(*b);
                lipschitz = lipschitz.max(*l);
            }
            Err(e) => record(z, t, e),
        }
    }

    let mut a1_ok = true;
    let a1: Vec<A1Row> = t_samples
        .par_iter()
        .map(|&t| match extract_a1(spec, t, settings.a1_radius, settings.a1_nodes) {
            Ok(est) => A1Row {
                t,
                value: Some(est.value),
                residual: (est.complex() - t.exp()).norm() / t.exp(),
                delta: est.delta,
                flagged: est.flagged,
            },
            Err(_) => A1Row {
                t,
                value: None,
                residual: f64::INFINITY,
                delta: f64::INFINITY,
                flagged: true,
            },
        })
        .collect();
    for row in &a1 {
        a1_ok &= row.residual <= settings.a1_tol;
    }

    let pairs: Vec<(f64, f64)> = t_samples.windows(2).map(|w| (w[0], w[1])).collect();
    let subordination: Vec<std::result::Result<SubordinationResult, (f64, f64, Error)>> = pairs
        .par_iter()
        .map(|&(t, s)| {
            subordination_check(
                spec,
                t,
                s,
                settings.subordination_radius,
                settings.boundary_nodes,
                settings.probe_nodes,
            )
            .map_err(|e| (t, s, e))
        })
        .collect();
    let mut sub_ok = true;
    for item in subordination {
        match item {
            Ok(res) => {
                sub_ok &= res.holds;
                report.subordination.push(res);
            }
            Err((t, s, e)) => {
                sub_ok = false;
                report.subordination.push(SubordinationResult {
                    t,
                    s,
                    holds: false,
                    failures: vec![SubordinationFailure {
                        t,
                        s,
                        probe: Complex64::new(0.0, 0.0).into(),
                        winding: None,
                        reason: e.to_string(),
                    }],
                });
            }
        }
    }

    if let Some((m, w)) = max_w {
        report.max_abs_w = m;
        report.witness_w = Some(w);
    }
    if let Some((m, w)) = min_p {
        report.min_re_p = m;
        report.witness_p = Some(w);
    }
    report.w_violations = violations;
    report.boundedness_proxy = bounded;
    report.lipschitz_proxy = lipschitz;
    report.a1 = a1;
    report.pass = report.max_abs_w < 1.0
        && report.min_re_p > 0.0
        && a1_ok
        && sub_ok
        && report.evaluation_errors.is_empty();
    report
}

fn report_error(errors: &mut Vec<EvaluationError>, z: Complex64, t: f64, e: &Error) {
    errors.push(EvaluationError {
        z: z.into(),
        t,
        message: e.to_string(),
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn jk(v: f64) -> MeromorphicFn {
        MeromorphicFn::joukowski(c(v, 0.0)).unwrap()
    }

    fn same(v: f64) -> ChainSpec {
        ChainSpec::new(jk(v), jk(v), HFunction::constant_one(), HALF)
    }

    fn general() -> ChainSpec {
        ChainSpec::new(jk(0.5), jk(1.2), "hinvsq:0.25".parse().unwrap(), c(0.3, 0.0))
    }

    #[test]
    fn trivial_chain_is_scaling() {
        let spec = ChainSpec::trivial();
        assert!((chain_eval(&spec, c(0.5, 0.0), LN_2).unwrap() - 1.0).norm() < 1e-15);
        for z in [c(0.3, 0.4), c(-0.9, 0.1), c(0.0, 1.0)] {
            for t in [0.0f64, 0.5, 3.0] {
                let want = t.exp() * z;
                assert!((chain_eval(&spec, z, t).unwrap() - want).norm() <= 1e-12 * want.norm());
                assert_eq!(chain_w(&spec, z, t).unwrap().norm(), 0.0);
            }
        }
    }

    #[test]
    fn chain_examples() {
        // v = 1, u = f, k = -1.5 at z = 1, t = ln 2
        let got = chain_eval(&same(0.5), c(1.0, 0.0), LN_2).unwrap();
        assert!((got - 1.0 / 0.9375).norm() < 1e-12);
        let got = chain_eval(&same(0.5), c(0.5, 0.0), 0.0).unwrap();
        assert!((got - 1.0 / 2.25).norm() < 1e-15);
    }

    #[test]
    fn chain_against_reference() {
        // 40-digit reference; w from the closed form agrees with w obtained
        // from p = z f_z / f_t only when the difference term is squared
        let spec = general();
        let (z, t) = (c(0.6, 0.3), 0.5);
        let chain = chain_eval(&spec, z, t).unwrap();
        assert!((chain - c(0.906_226_461_671_843_6, 0.307_133_103_705_133_03)).norm() < 1e-13);
        let w = chain_w(&spec, z, t).unwrap();
        assert!((w - c(-0.206_485_308_072_036_26, -0.171_827_649_397_238_86)).norm() < 1e-13);
        let p = chain_p(&spec, z, t).unwrap();
        assert!((p - c(0.624_752_119_025_112_6, -0.231_397_212_711_519_38)).norm() < 1e-13);
    }

    #[test]
    fn w_examples() {
        assert_eq!(chain_w(&same(0.3), c(0.4, 0.2), 0.0).unwrap().norm(), 0.0);
        let spec = ChainSpec::new(jk(0.5), jk(0.5), "hinvsq:0.25".parse().unwrap(), HALF);
        let w = chain_w(&spec, c(0.5, 0.0), 0.0).unwrap();
        assert!((w - (1.0 - 1.0625) / 1.0625).norm() < 1e-15);
        let p = p_from_w(w).unwrap();
        assert!((p - 0.888_888_9).norm() < 1e-7);
        let w = chain_w(&same(0.5), c(1.0, 0.0), LN_2).unwrap();
        assert!((w - (-6.0 / 7.0)).norm() < 1e-14);
    }

    #[test]
    fn p_maps_disk_to_half_plane() {
        assert_eq!(p_from_w(c(0.0, 0.0)).unwrap(), ONE);
        assert_eq!(p_from_w(ONE), Err(Error::WEqualsOne));
        for k in 0..32 {
            let w = Complex64::from_polar(0.5, 2.0 * PI * k as f64 / 32.0);
            assert!(p_from_w(w).unwrap().re > 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        let spec = same(0.5);
        assert!(matches!(chain_eval(&spec, c(0.0, 0.0), 1.0), Err(Error::OutsideDomain(_))));
        assert!(matches!(chain_eval(&spec, c(1.5, 0.0), 1.0), Err(Error::OutsideDomain(_))));
        assert!(chain_eval(&spec, c(0.5, 0.0), -1.0).is_err());
        // f' = 0 at s = sqrt(1.2): z = 1/sqrt(1.2), t = 0
        let spec = same(1.2);
        let z = c(1.0 / 1.2f64.sqrt(), 0.0);
        assert!(matches!(chain_w(&spec, z, 0.0), Err(Error::CriticalPoint(_))));
    }

    #[test]
    fn a1_examples() {
        let a = extract_a1(&ChainSpec::trivial(), 1.0, 0.5, 256).unwrap();
        assert!((a.complex() - 1f64.exp()).norm() < 1e-12);
        assert!(!a.flagged);
        let a = extract_a1(&same(0.5), 0.0, 0.5, 256).unwrap();
        assert!((a.complex() - 1.0).norm() < 1e-12);
        let a = extract_a1(&same(0.5), LN_2, 0.5, 256).unwrap();
        assert!((a.complex() - 2.0).norm() < 2e-6);
        assert!(extract_a1(&same(0.5), 0.0, 1.5, 16).is_err());
    }

    #[test]
    fn subordination_examples() {
        let spec = ChainSpec::trivial();
        assert!(subordination_check(&spec, 0.0, 1.0, 0.5, 128, 16).unwrap().holds);
        assert!(subordination_check(&spec, 0.7, 0.7, 0.5, 128, 16).unwrap().holds);
        let swapped = subordination_check(&spec, 1.0, 0.0, 0.5, 128, 16).unwrap();
        assert!(!swapped.holds);
        assert_eq!(swapped.failures.len(), 16);
        assert_eq!(swapped.failures[0].winding, Some(0));
    }

    #[test]
    fn trivial_audit_passes_exactly() {
        let rep = audit_pommerenke(&ChainSpec::trivial(), &default_z_samples(), &default_t_samples());
        assert_eq!(rep.max_abs_w, 0.0);
        assert_eq!(rep.min_re_p, 1.0);
        assert!(rep.a1.iter().all(|r| r.residual < 1e-12));
        assert!(rep.pass, "{rep:?}");
        assert!((rep.boundedness_proxy - 1.0).abs() < 1e-12);
    }

    #[test]
    fn becker_chain_audit() {
        let rep = audit_pommerenke(&same(0.4), &default_z_samples(), &default_t_samples());
        assert!(rep.max_abs_w < 0.8 && rep.max_abs_w > 0.75, "{}", rep.max_abs_w);
        assert!(rep.pass, "{rep:?}");

        let rep = audit_pommerenke(&same(0.6), &[c(1.0, 0.0)], &[LN_2]);
        assert!((rep.max_abs_w - 3.6 / 3.4).abs() < 1e-12);
        assert_eq!(rep.w_violations, 1);
        assert!(!rep.pass);
        let wit = rep.witness_w.unwrap();
        assert_eq!((wit.z, wit.t), (c(1.0, 0.0).into(), LN_2));
    }

    #[test]
    fn audit_is_deterministic() {
        let z = default_z_samples();
        let t = default_t_samples();
        let a = audit_pommerenke(&general(), &z, &t);
        let b = audit_pommerenke(&general(), &z, &t);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
