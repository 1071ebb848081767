//! Catalog of meromorphic functions on the exterior disk and auxiliary
//! h-functions, with validators for their class membership and the
//! branch-tracked power `(g'/f')^alpha`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::ComplexJet;
use crate::scan::{sample_exterior, SamplingPlan};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `|f'|` at or below this counts as a critical point.
pub const CRITICAL_EPS: f64 = 1e-12;

/// Radius from which the branch of `log(g'/f')` is continued inward.
pub const BRANCH_ORIGIN_RADIUS: f64 = 1e6;

/// Tolerance used when classifying a function as Sigma0.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Default tolerance for h-admissibility.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

const BRANCH_INITIAL_STEPS: f64 = 32.0;
const BRANCH_MAX_JUMP: f64 = PI / 2.0;
const BRANCH_MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    Identity,
    /// `zeta + c / zeta`
    Joukowski { c: Complex64 },
    /// `b zeta + b0 + sum_k tail[k-1] zeta^-k`
    Laurent {
        b: Complex64,
        b0: Complex64,
        tail: Vec<Complex64>,
    },
    /// `(a F + b) / (c F + d)` with `F` the inner function.
    Moebius {
        inner: Box<SigmaSpec>,
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaClass {
    /// `b = 1`, `b0 = 0`.
    Sigma0,
    Sigma,
    /// Not of the form `b zeta + b0 + O(1/zeta)` with `b != 0`, or not known.
    Neither,
}

/// A function from the catalog, evaluable as a jet anywhere off its poles.
#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphicFn {
    spec: SigmaSpec,
    declared_class: SigmaClass,
}

fn is_bad(c: Complex64) -> bool {
    !(c.re.is_finite() && c.im.is_finite())
}

fn validate(spec: &SigmaSpec) -> Result<()> {
    match spec {
        SigmaSpec::Identity => Ok(()),
        SigmaSpec::Joukowski { c } => {
            if is_bad(*c) {
                return Err(Error::InvalidSpec("non-finite joukowski parameter".into()));
            }
            Ok(())
        }
        SigmaSpec::Laurent { b, b0, tail } => {
            if std::iter::once(b).chain(std::iter::once(b0)).chain(tail).any(|c| is_bad(*c)) {
                return Err(Error::InvalidSpec("non-finite laurent coefficient".into()));
            }
            if *b == ZERO {
                return Err(Error::InvalidSpec("laurent leading coefficient b must be nonzero".into()));
            }
            Ok(())
        }
        SigmaSpec::Moebius { inner, a, b, c, d } => {
            if [a, b, c, d].iter().any(|x| is_bad(**x)) {
                return Err(Error::InvalidSpec("non-finite moebius coefficient".into()));
            }
            if *a * *d - *b * *c == ZERO {
                return Err(Error::InvalidSpec("degenerate moebius map (ad - bc = 0)".into()));
            }
            validate(inner)
        }
    }
}

fn declared_class(spec: &SigmaSpec) -> SigmaClass {
    let classify = |b: Complex64, b0: Complex64| {
        if b == ONE && b0 == ZERO {
            SigmaClass::Sigma0
        } else {
            SigmaClass::Sigma
        }
    };
    match spec {
        SigmaSpec::Identity | SigmaSpec::Joukowski { .. } => SigmaClass::Sigma0,
        SigmaSpec::Laurent { b, b0, .. } => classify(*b, *b0),
        SigmaSpec::Moebius { inner, a, b, c, d } => {
            // only affine outer maps keep the pole at infinity
            if *c != ZERO {
                return SigmaClass::Neither;
            }
            match leading_coefficients(inner) {
                Some((ib, ib0)) => classify(*a / *d * ib, (*a * ib0 + *b) / *d),
                None => SigmaClass::Neither,
            }
        }
    }
}

fn leading_coefficients(spec: &SigmaSpec) -> Option<(Complex64, Complex64)> {
    match spec {
        SigmaSpec::Identity | SigmaSpec::Joukowski { .. } => Some((ONE, ZERO)),
        SigmaSpec::Laurent { b, b0, .. } => Some((*b, *b0)),
        SigmaSpec::Moebius { inner, a, b, c, d } => {
            if *c != ZERO {
                return None;
            }
            let (ib, ib0) = leading_coefficients(inner)?;
            Some((*a / *d * ib, (*a * ib0 + *b) / *d))
        }
    }
}

/// Builds a validated catalog function.
pub fn make_sigma_function(spec: SigmaSpec) -> Result<MeromorphicFn> {
    validate(&spec)?;
    let declared_class = declared_class(&spec);
    Ok(MeromorphicFn { spec, declared_class })
}

/// Falling factorial `e (e-1) ... (e-n+1)`.
fn falling(e: i32, n: usize) -> f64 {
    (0..n as i32).map(|k| (e - k) as f64).product()
}

/// Adds the derivatives of order 0..=4 of `coef * zeta^e` into `out`.
fn add_power_term(out: &mut [Complex64; 5], coef: Complex64, e: i32, zeta: Complex64) {
    if coef == ZERO {
        return;
    }
    for (n, slot) in out.iter_mut().enumerate() {
        let k = falling(e, n);
        if k != 0.0 {
            *slot += coef * k * zeta.powi(e - n as i32);
        }
    }
}

fn finite_or(values: [Complex64; 5], zeta: Complex64) -> Result<[Complex64; 5]> {
    if values.iter().any(|c| is_bad(*c) || c.norm() > crate::jet::NON_FINITE_THRESHOLD) {
        Err(Error::PoleAtPoint(zeta))
    } else {
        Ok(values)
    }
}

impl SigmaSpec {
    /// Value only, by direct closed-form arithmetic (no jets).
    pub fn value(&self, zeta: Complex64) -> Result<Complex64> {
        let out = match self {
            SigmaSpec::Identity => zeta,
            SigmaSpec::Joukowski { c } => {
                if zeta == ZERO {
                    return Err(Error::PoleAtPoint(zeta));
                }
                zeta + *c / zeta
            }
            SigmaSpec::Laurent { b, b0, tail } => {
                if zeta == ZERO && !tail.is_empty() {
                    return Err(Error::PoleAtPoint(zeta));
                }
                // Horner in 1/zeta for the tail
                let w = if tail.is_empty() { ZERO } else { zeta.inv() };
                let t = tail.iter().rev().fold(ZERO, |acc, c| (acc + *c) * w);
                *b * zeta + *b0 + t
            }
            SigmaSpec::Moebius { inner, a, b, c, d } => {
                let f = inner.value(zeta)?;
                let den = *c * f + *d;
                if den == ZERO {
                    return Err(Error::PoleAtPoint(zeta));
                }
                (*a * f + *b) / den
            }
        };
        if is_bad(out) {
            return Err(Error::PoleAtPoint(zeta));
        }
        Ok(out)
    }

    /// `[f, f', f'', f''', f'''']` at `zeta`.
    fn derivatives(&self, zeta: Complex64) -> Result<[Complex64; 5]> {
        let mut out = [ZERO; 5];
        match self {
            SigmaSpec::Identity => {
                out[0] = zeta;
                out[1] = ONE;
            }
            SigmaSpec::Joukowski { c } => {
                if zeta == ZERO {
                    return Err(Error::PoleAtPoint(zeta));
                }
                let w = zeta.inv();
                let w2 = w * w;
                out[0] = zeta + *c * w;
                out[1] = ONE - *c * w2;
                out[2] = 2.0 * *c * w2 * w;
                out[3] = -6.0 * *c * w2 * w2;
                out[4] = 24.0 * *c * w2 * w2 * w;
            }
            SigmaSpec::Laurent { b, b0, tail } => {
                if zeta == ZERO && !tail.is_empty() {
                    return Err(Error::PoleAtPoint(zeta));
                }
                add_power_term(&mut out, *b, 1, zeta);
                add_power_term(&mut out, *b0, 0, zeta);
                for (k, coef) in tail.iter().enumerate() {
                    add_power_term(&mut out, *coef, -(k as i32 + 1), zeta);
                }
            }
            SigmaSpec::Moebius { inner, a, b, c, d } => {
                let inner_d = inner.derivatives(zeta)?;
                let fj = ComplexJet::new(inner_d[0], inner_d[1], inner_d[2], inner_d[3]);
                let dfj = ComplexJet::new(inner_d[1], inner_d[2], inner_d[3], inner_d[4]);
                let den = fj.scale(*c) + *d;
                if den.value == ZERO {
                    return Err(Error::PoleAtPoint(zeta));
                }
                let num = fj.scale(*a) + *b;
                let outer = num.div(&den).map_err(|_| Error::PoleAtPoint(zeta))?;
                // (T o F)' = (ad - bc) F' / (cF + d)^2
                let deriv = dfj
                    .scale(*a * *d - *b * *c)
                    .div(&(den * den))
                    .map_err(|_| Error::PoleAtPoint(zeta))?;
                out = [outer.value, outer.d1, outer.d2, outer.d3, deriv.d3];
            }
        }
        finite_or(out, zeta)
    }
}

impl MeromorphicFn {
    pub fn identity() -> Self {
        Self {
            spec: SigmaSpec::Identity,
            declared_class: SigmaClass::Sigma0,
        }
    }

    pub fn joukowski(c: Complex64) -> Result<Self> {
        make_sigma_function(SigmaSpec::Joukowski { c })
    }

    pub fn spec(&self) -> &SigmaSpec {
        &self.spec
    }

    pub fn declared_class(&self) -> SigmaClass {
        self.declared_class
    }

    /// Value at any non-pole point of the plane.
    pub fn value(&self, zeta: Complex64) -> Result<Complex64> {
        self.spec.value(zeta)
    }

    /// Jet `(f, f', f'', f''')` at any non-pole point of the plane.
    pub fn jet(&self, zeta: Complex64) -> Result<ComplexJet> {
        let d = self.spec.derivatives(zeta)?;
        Ok(ComplexJet::new(d[0], d[1], d[2], d[3]))
    }

    /// Jet of the derivative, `(f', f'', f''', f'''')`.
    pub fn derivative_jet(&self, zeta: Complex64) -> Result<ComplexJet> {
        let d = self.spec.derivatives(zeta)?;
        Ok(ComplexJet::new(d[1], d[2], d[3], d[4]))
    }

    /// Jet at `zeta`, which must lie in the exterior disk.
    pub fn derivatives_of(&self, zeta: Complex64) -> Result<ComplexJet> {
        if zeta.norm() <= 1.0 {
            return Err(Error::OutsideDomain(zeta));
        }
        self.jet(zeta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HSpec {
    ConstantOne,
    /// `1 + c / zeta^2`
    InverseSquare(Complex64),
    /// `1 + h2 / zeta^2 + h4 / zeta^4 + ...`, coefficients in order h2, h4, ...
    LaurentEven(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HFunction {
    spec: HSpec,
}

/// Builds an h-function. The spec forms carry no `1/zeta` term by construction.
pub fn make_h_function(spec: HSpec) -> Result<HFunction> {
    let bad = match &spec {
        HSpec::ConstantOne => false,
        HSpec::InverseSquare(c) => is_bad(*c),
        HSpec::LaurentEven(cs) => cs.iter().any(|c| is_bad(*c)),
    };
    if bad {
        return Err(Error::InvalidSpec("non-finite h coefficient".into()));
    }
    Ok(HFunction { spec })
}

impl HFunction {
    pub fn constant_one() -> Self {
        Self {
            spec: HSpec::ConstantOne,
        }
    }

    pub fn spec(&self) -> &HSpec {
        &self.spec
    }

    pub fn jet(&self, zeta: Complex64) -> Result<ComplexJet> {
        let mut out = [ZERO; 5];
        match &self.spec {
            HSpec::ConstantOne => out[0] = ONE,
            HSpec::InverseSquare(c) => {
                if zeta == ZERO {
                    return Err(Error::PoleAtPoint(zeta));
                }
                let w = zeta.inv();
                let w2 = w * w;
                out[0] = ONE + *c * w2;
                out[1] = -2.0 * *c * w2 * w;
                out[2] = 6.0 * *c * w2 * w2;
                out[3] = -24.0 * *c * w2 * w2 * w;
            }
            HSpec::LaurentEven(cs) => {
                if zeta == ZERO && !cs.is_empty() {
                    return Err(Error::PoleAtPoint(zeta));
                }
                out[0] = ONE;
                for (k, coef) in cs.iter().enumerate() {
                    add_power_term(&mut out, *coef, -2 * (k as i32 + 1), zeta);
                }
            }
        }
        let d = finite_or(out, zeta)?;
        Ok(ComplexJet::new(d[0], d[1], d[2], d[3]))
    }

    pub fn value(&self, zeta: Complex64) -> Result<Complex64> {
        Ok(self.jet(zeta)?.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationReport {
    pub b: Complex64,
    pub b0: Complex64,
    /// `|b - 1|`
    pub b_residual: f64,
    /// `|b0|`
    pub b0_residual: f64,
    /// max over the circle of `|f - b zeta - b0|`
    pub tail_residual: f64,
    pub radius: f64,
    pub class: SigmaClass,
}

/// Estimates `b` and `b0` from circle means on the plan's outermost radius.
///
/// On a circle of radius R the node means of `f(zeta)/zeta` and of
/// `f(zeta) - b zeta` pick out the `zeta^1` and `zeta^0` coefficients; the
/// remaining Laurent terms alias in only at order `R^-N`.
pub fn validate_sigma_normalization(
    f: &MeromorphicFn,
    plan: &SamplingPlan,
) -> Result<NormalizationReport> {
    let radius = plan.r_max;
    let n = plan.angular_count.max(8);
    let points: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
        .collect();
    let values = points
        .iter()
        .map(|&z| f.value(z))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::EvaluationFailure(e.to_string()))?;
    let nf = n as f64;
    let b = points.iter().zip(&values).map(|(z, v)| v / z).sum::<Complex64>() / nf;
    let b0 = points.iter().zip(&values).map(|(z, v)| v - b * z).sum::<Complex64>() / nf;
    let tail_residual = points
        .iter()
        .zip(&values)
        .map(|(z, v)| (v - b * z - b0).norm())
        .fold(0.0, f64::max);
    let b_residual = (b - ONE).norm();
    let b0_residual = b0.norm();
    let class = if b.norm() < NORMALIZATION_TOL || is_bad(b) || is_bad(b0) {
        SigmaClass::Neither
    } else if b_residual <= NORMALIZATION_TOL && b0_residual <= NORMALIZATION_TOL {
        SigmaClass::Sigma0
    } else {
        SigmaClass::Sigma
    };
    Ok(NormalizationReport {
        b,
        b0,
        b_residual,
        b0_residual,
        tail_residual,
        radius,
        class,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub min_re_h: f64,
    pub min_re_h_at: Complex64,
    /// max of `|(1 - h)/h|`
    pub max_ratio: f64,
    pub max_ratio_at: Complex64,
    pub samples: usize,
    /// points where `Re h >= 1/2` and `|(1-h)/h| <= 1` disagree beyond `tol`
    pub disagreements: usize,
    pub tol: f64,
    pub pass: bool,
}

impl AdmissibilityReport {
    pub fn conditions_agree(&self) -> bool {
        self.disagreements == 0
    }
}

/// Checks `Re h >= 1/2` on the plan's grid, together with the equivalent
/// disk form `|(1 - h)/h| <= 1`.
pub fn validate_h_admissible(
    h: &HFunction,
    plan: &SamplingPlan,
    tol: f64,
) -> Result<AdmissibilityReport> {
    let points = sample_exterior(plan)?;
    let mut report = AdmissibilityReport {
        min_re_h: f64::INFINITY,
        min_re_h_at: ZERO,
        max_ratio: 0.0,
        max_ratio_at: ZERO,
        samples: points.len(),
        disagreements: 0,
        tol,
        pass: false,
    };
    for z in points {
        let hv = h.value(z).map_err(|e| Error::EvaluationFailure(e.to_string()))?;
        if hv == ZERO {
            return Err(Error::EvaluationFailure(format!("h vanishes at {z}")));
        }
        let ratio = ((ONE - hv) / hv).norm();
        if hv.re < report.min_re_h {
            report.min_re_h = hv.re;
            report.min_re_h_at = z;
        }
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.max_ratio_at = z;
        }
        let half_plane = hv.re - 0.5;
        let disk = 1.0 - ratio;
        if (half_plane > tol && disk < -tol) || (half_plane < -tol && disk > tol) {
            report.disagreements += 1;
        }
    }
    report.pass = report.min_re_h >= 0.5 - tol;
    Ok(report)
}

/// Jet of `v = (g'/f')^alpha` at `zeta`, on the branch with `v -> 1` at infinity.
pub fn power_branch(
    f: &MeromorphicFn,
    g: &MeromorphicFn,
    alpha: Complex64,
    zeta: Complex64,
) -> Result<ComplexJet> {
    if zeta.norm() <= 1.0 {
        return Err(Error::OutsideDomain(zeta));
    }
    power_branch_closed(f, g, alpha, zeta)
}

/// As [`power_branch`] but also accepting points on the unit circle.
pub(crate) fn power_branch_closed(
    f: &MeromorphicFn,
    g: &MeromorphicFn,
    alpha: Complex64,
    zeta: Complex64,
) -> Result<ComplexJet> {
    let fd = f.derivative_jet(zeta)?;
    let gd = g.derivative_jet(zeta)?;
    if fd.value.norm() <= CRITICAL_EPS || gd.value.norm() <= CRITICAL_EPS {
        return Err(Error::CriticalPoint(zeta));
    }
    if alpha == ZERO || f == g {
        return Ok(ComplexJet::constant(ONE));
    }
    let ratio = gd.div(&fd)?;
    let branch = continued_log_ratio(f, g, zeta)?;
    ratio.ln_with_value(branch)?.scale(alpha).exp()
}

/// `log(g'/f')` at `zeta`, continued along the ray from `BRANCH_ORIGIN_RADIUS`
/// inward, starting from the principal value (which is near 0 out there).
fn continued_log_ratio(f: &MeromorphicFn, g: &MeromorphicFn, zeta: Complex64) -> Result<Complex64> {
    let ratio_at = |z: Complex64| -> Result<Complex64> {
        let fp = f.derivative_jet(z)?.value;
        let gp = g.derivative_jet(z)?.value;
        if fp.norm() <= CRITICAL_EPS || gp.norm() <= CRITICAL_EPS {
            return Err(Error::BranchTrackingFailure(z));
        }
        Ok(gp / fp)
    };
    let r = zeta.norm();
    if r >= BRANCH_ORIGIN_RADIUS {
        return Ok(ratio_at(zeta)?.ln());
    }
    let dir = zeta / r;
    let total = (BRANCH_ORIGIN_RADIUS / r).ln();
    let max_step = total / BRANCH_INITIAL_STEPS;
    let mut log = ratio_at(dir * BRANCH_ORIGIN_RADIUS)?.ln();
    let mut travelled = 0.0;
    let mut step = max_step;
    while travelled < total {
        let h = step.min(total - travelled);
        let last = travelled + h >= total;
        let point = if last {
            zeta
        } else {
            dir * (BRANCH_ORIGIN_RADIUS * (-(travelled + h)).exp())
        };
        let principal = ratio_at(point)?.ln();
        let turns = ((log.im - principal.im) / (2.0 * PI)).round();
        let candidate = principal + Complex64::new(0.0, 2.0 * PI * turns);
        if (candidate - log).norm() > BRANCH_MAX_JUMP {
            step /= 2.0;
            if step < BRANCH_MIN_STEP {
                return Err(Error::BranchTrackingFailure(point));
            }
            continue;
        }
        log = candidate;
        travelled = if last { total } else { travelled + h };
        step = (step * 2.0).min(max_step);
    }
    Ok(log)
}

/// Jets of `u = f v` and `v` at `zeta`.
pub(crate) fn u_and_v(
    f: &MeromorphicFn,
    g: &MeromorphicFn,
    alpha: Complex64,
    zeta: Complex64,
) -> Result<(ComplexJet, ComplexJet)> {
    let v = power_branch_closed(f, g, alpha, zeta)?;
    let u = f.jet(zeta)? * v;
    Ok((u, v))
}

// ---------------------------------------------------------------------------
// mini-language

/// Parses `re`, `re,im`, or a `j`-suffixed literal such as `0.5-0.2j`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::InvalidSpec(format!("cannot parse complex number `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((re, im)) = s.split_once(',') {
        let re: f64 = re.trim().parse().map_err(|_| bad())?;
        let im: f64 = im.trim().parse().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    if let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        });
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    let re: f64 = s.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, 0.0))
}

fn parse_list(s: &str) -> Result<Vec<Complex64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_complex).collect()
}

impl FromStr for SigmaSpec {
    type Err = Error;

    /// `identity`, `joukowski:<re>[,<im>]`, `laurent:<b>;<b0>;<b1>,<b2>,...`,
    /// `moebius:<a>,<b>,<c>,<d>:<inner>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let missing = || Error::InvalidSpec(format!("`{head}` needs parameters"));
        match (head, rest) {
            ("identity", None) => Ok(SigmaSpec::Identity),
            ("joukowski", Some(r)) => Ok(SigmaSpec::Joukowski { c: parse_complex(r)? }),
            ("laurent", Some(r)) => {
                let mut parts = r.splitn(3, ';');
                let b = parse_complex(parts.next().ok_or_else(missing)?)?;
                let b0 = parse_complex(parts.next().ok_or_else(missing)?)?;
                let tail = parse_list(parts.next().unwrap_or(""))?;
                Ok(SigmaSpec::Laurent { b, b0, tail })
            }
            ("moebius", Some(r)) => {
                let (coeffs, inner) = r
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidSpec("moebius needs `:<inner>`".into()))?;
                let c = parse_list(coeffs)?;
                if c.len() != 4 {
                    return Err(Error::InvalidSpec("moebius needs exactly a,b,c,d".into()));
                }
                Ok(SigmaSpec::Moebius {
                    inner: Box::new(inner.parse()?),
                    a: c[0],
                    b: c[1],
                    c: c[2],
                    d: c[3],
                })
            }
            _ => Err(Error::InvalidSpec(format!("unknown function spec `{s}`"))),
        }
    }
}

impl FromStr for MeromorphicFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        make_sigma_function(s.parse()?)
    }
}

impl FromStr for HSpec {
    type Err = Error;

    /// `hconst`, `hinvsq:<c>`, `heven:<h2>,<h4>,...`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once(':') {
            None if s == "hconst" => Ok(HSpec::ConstantOne),
            Some(("hinvsq", c)) => Ok(HSpec::InverseSquare(parse_complex(c)?)),
            Some(("heven", cs)) => Ok(HSpec::LaurentEven(parse_list(cs)?)),
            _ => Err(Error::InvalidSpec(format!("unknown h spec `{s}`"))),
        }
    }
}

impl FromStr for HFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        make_h_function(s.parse()?)
    }
}

impl fmt::Display for SigmaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaClass::Sigma0 => "sigma0",
            SigmaClass::Sigma => "sigma",
            SigmaClass::Neither => "neither",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        c(re, 0.0)
    }

    fn jk(cc: f64) -> MeromorphicFn {
        MeromorphicFn::joukowski(r(cc)).unwrap()
    }

    #[test]
    fn construction_and_class() {
        let id = make_sigma_function(SigmaSpec::Identity).unwrap();
        assert_eq!(id.value(r(2.0)).unwrap(), r(2.0));
        assert_eq!(id.declared_class(), SigmaClass::Sigma0);

        let j = jk(0.5);
        assert_eq!(j.value(r(2.0)).unwrap(), r(2.25));
        assert_eq!(j.declared_class(), SigmaClass::Sigma0);

        let l = make_sigma_function(SigmaSpec::Laurent {
            b: r(1.0),
            b0: r(3.0),
            tail: vec![],
        })
        .unwrap();
        assert_eq!(l.declared_class(), SigmaClass::Sigma);
    }

    #[test]
    fn invalid_specs() {
        let zero_b = SigmaSpec::Laurent {
            b: r(0.0),
            b0: r(1.0),
            tail: vec![r(1.0)],
        };
        assert!(matches!(make_sigma_function(zero_b), Err(Error::InvalidSpec(_))));
        let degenerate = SigmaSpec::Moebius {
            inner: Box::new(SigmaSpec::Identity),
            a: r(1.0),
            b: r(2.0),
            c: r(2.0),
            d: r(4.0),
        };
        assert!(matches!(make_sigma_function(degenerate), Err(Error::InvalidSpec(_))));
        assert!(matches!(
            make_h_function(HSpec::InverseSquare(c(f64::NAN, 0.0))),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn joukowski_jet_closed_form() {
        // f = z + 0.5/z, f' = 1 - 0.5 z^-2, f'' = z^-3, f''' = -3 z^-4 at z = 2
        let j = jk(0.5).derivatives_of(r(2.0)).unwrap();
        let want = [r(2.25), r(0.875), r(0.125), r(-0.1875)];
        for (got, want) in j.to_array().iter().zip(want) {
            assert!((got - want).norm() < 1e-15);
        }
    }

    #[test]
    fn laurent_matches_joukowski() {
        let l: MeromorphicFn = "laurent:1;0;0.5".parse().unwrap();
        let j = jk(0.5);
        for z in [r(2.0), c(1.3, -0.4), c(-3.0, 7.0)] {
            let (a, b) = (l.jet(z).unwrap(), j.jet(z).unwrap());
            for (x, y) in a.to_array().iter().zip(b.to_array()) {
                assert!((x - y).norm() <= 1e-14 * (1.0 + y.norm()));
            }
            assert!((l.value(z).unwrap() - j.value(z).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn domain_and_pole_errors() {
        let j = jk(0.5);
        assert!(matches!(j.derivatives_of(r(0.5)), Err(Error::OutsideDomain(_))));
        assert!(matches!(j.derivatives_of(r(1.0)), Err(Error::OutsideDomain(_))));
        // 1/(z - 2) has a pole at 2
        let m: MeromorphicFn = "moebius:0,1,1,-2:identity".parse().unwrap();
        assert!(matches!(m.derivatives_of(r(2.0)), Err(Error::PoleAtPoint(_))));
        assert!(matches!(m.value(r(2.0)), Err(Error::PoleAtPoint(_))));
    }

    #[test]
    fn moebius_inverse_jet() {
        // 1/z: f' = -z^-2, f'' = 2 z^-3, f''' = -6 z^-4
        let m: MeromorphicFn = "moebius:0,1,1,0:identity".parse().unwrap();
        let z = c(1.5, 0.5);
        let d = m.derivatives_of(z).unwrap();
        let w = z.inv();
        let want = [w, -w * w, 2.0 * w * w * w, -6.0 * w * w * w * w];
        for (got, want) in d.to_array().iter().zip(want) {
            assert!((got - want).norm() < 1e-14);
        }
        // the fourth derivative through the derivative jet: 24 z^-5
        let dd = m.derivative_jet(z).unwrap();
        assert!((dd.d3 - 24.0 * w.powi(5)).norm() < 1e-13);
        assert_eq!(m.declared_class(), SigmaClass::Neither);
    }

    #[test]
    fn h_functions() {
        let h = HFunction::constant_one();
        let j = h.jet(c(3.0, 1.0)).unwrap();
        assert_eq!(j, ComplexJet::constant(ONE));

        let h: HFunction = "hinvsq:0.25".parse().unwrap();
        let j = h.jet(r(2.0)).unwrap();
        assert!((j.value - r(1.0625)).norm() < 1e-15);
        assert!((j.d1 - r(-0.0625)).norm() < 1e-15);

        let h0: HFunction = "hinvsq:0".parse().unwrap();
        assert_eq!(h0.jet(c(1.7, -2.0)).unwrap(), ComplexJet::constant(ONE));

        let he: HFunction = "heven:0.25".parse().unwrap();
        let a = he.jet(c(1.2, 0.9)).unwrap();
        let b = h.jet(c(1.2, 0.9)).unwrap();
        for (x, y) in a.to_array().iter().zip(b.to_array()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn normalization_estimates() {
        let plan = SamplingPlan::default();
        let id = validate_sigma_normalization(&MeromorphicFn::identity(), &plan).unwrap();
        assert_eq!(id.class, SigmaClass::Sigma0);
        assert!(id.b_residual < 1e-12 && id.b0_residual < 1e-12);

        let l: MeromorphicFn = "laurent:1;3;".parse().unwrap();
        let rep = validate_sigma_normalization(&l, &plan).unwrap();
        assert_eq!(rep.class, SigmaClass::Sigma);
        assert!((rep.b - ONE).norm() < 1e-10 && (rep.b0 - r(3.0)).norm() < 1e-10);

        let far = SamplingPlan {
            r_max: 1e4,
            ..SamplingPlan::default()
        };
        let rep = validate_sigma_normalization(&jk(0.5), &far).unwrap();
        assert_eq!(rep.class, SigmaClass::Sigma0);
        assert!(rep.b_residual <= 1e-8 && rep.b0_residual <= 1e-8);

        let inv: MeromorphicFn = "moebius:0,1,1,0:identity".parse().unwrap();
        assert_eq!(
            validate_sigma_normalization(&inv, &plan).unwrap().class,
            SigmaClass::Neither
        );
    }

    #[test]
    fn trivial_moebius_keeps_inner_class() {
        let plan = SamplingPlan::default();
        for inner in ["identity", "joukowski:0.3", "laurent:1;0;0.2,0.1", "laurent:2;1;0.5"] {
            let f: MeromorphicFn = inner.parse().unwrap();
            let wrapped: MeromorphicFn = format!("moebius:1,0,0,1:{inner}").parse().unwrap();
            assert_eq!(
                validate_sigma_normalization(&wrapped, &plan).unwrap().class,
                validate_sigma_normalization(&f, &plan).unwrap().class
            );
            assert_eq!(wrapped.declared_class(), f.declared_class());
        }
    }

    #[test]
    fn admissibility() {
        let plan = SamplingPlan::default();
        let rep = validate_h_admissible(&HFunction::constant_one(), &plan, 1e-9).unwrap();
        assert!(rep.pass && rep.conditions_agree());
        assert_eq!(rep.min_re_h, 1.0);
        assert_eq!(rep.max_ratio, 0.0);

        let h: HFunction = "hinvsq:0.5".parse().unwrap();
        let rep = validate_h_admissible(&h, &plan, 1e-9).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.min_re_h >= 0.5 && rep.min_re_h < 0.502);
        assert!(rep.max_ratio <= 1.0 + 1e-9);

        let h: HFunction = "hinvsq:0.6".parse().unwrap();
        let rep = validate_h_admissible(&h, &plan, 1e-9).unwrap();
        assert!(!rep.pass);
        // Re h = 1 - 0.6/r^2 at zeta = i r with r = 1.001
        assert!((rep.min_re_h - (1.0 - 0.6 / (1.001f64 * 1.001))).abs() < 1e-12);
        assert!(rep.conditions_agree());
    }

    #[test]
    fn power_branch_examples() {
        let (f, g) = (jk(0.5), jk(1.2));
        let v = power_branch(&f, &g, r(0.5), r(2.0)).unwrap();
        assert!((v.value - r(0.8f64.sqrt())).norm() < 1e-14);

        let same = power_branch(&f, &f, c(0.7, -0.2), c(1.4, 1.1)).unwrap();
        assert_eq!(same, ComplexJet::constant(ONE));
        let zero = power_branch(&f, &g, ZERO, c(1.4, 1.1)).unwrap();
        assert_eq!(zero, ComplexJet::constant(ONE));

        // g'(sqrt 1.2) = 0
        assert!(matches!(
            power_branch(&f, &g, r(0.5), r(1.2f64.sqrt())),
            Err(Error::CriticalPoint(_))
        ));
    }

    #[test]
    fn power_branch_against_high_precision_reference() {
        // 40-digit reference: v = (g'/f')^0.3 with f = J(0.5), g = J(1.2) at 1.5+0.7i
        let v = power_branch(&jk(0.5), &jk(1.2), r(0.3), c(1.5, 0.7)).unwrap();
        let want = [
            c(0.961_418_228_049_239_5, 0.080_896_489_989_897_41),
            c(-0.031_080_712_535_167_95, -0.122_128_342_255_027_44),
            c(0.238_242_108_745_170_8, 0.146_622_035_740_924_3),
            c(-0.838_599_265_742_420_2, 0.238_181_240_474_794_8),
        ];
        for (got, want) in v.to_array().iter().zip(want) {
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn branch_continues_past_the_negative_axis() {
        // g' = 1 + a/z^2 + b/z^4 with a = -2+4.9i, b = -5i. Along the positive
        // real ray g' runs from 1 through the upper half plane and ends just
        // below the negative axis at z = 1.01, so the continued log sits one
        // sheet above the principal one and the square root flips sign.
        let g: MeromorphicFn = "laurent:1;0;2-4.9j,0,1.6666666666666667j".parse().unwrap();
        let f = MeromorphicFn::identity();
        let z = r(1.01);
        let ratio = g.derivative_jet(z).unwrap().value;
        assert!(ratio.re < 0.0 && ratio.im < 0.0 && ratio.im > -0.01);
        let v = power_branch(&f, &g, r(0.5), z).unwrap();
        assert!((v.value * v.value - ratio).norm() < 1e-12);
        assert!((v.value + ratio.sqrt()).norm() < 1e-12, "{} vs {}", v.value, ratio.sqrt());
        // principal branch would be used just outside where the ratio has not wound
        let out = power_branch(&f, &g, r(0.5), r(3.0)).unwrap();
        let ratio_out = g.derivative_jet(r(3.0)).unwrap().value;
        assert!((out.value - ratio_out.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), r(0.5));
        assert_eq!(parse_complex("0.5,0.25").unwrap(), c(0.5, 0.25));
        assert_eq!(parse_complex("0.5-0.25j").unwrap(), c(0.5, -0.25));
        assert_eq!(parse_complex("1e-3+2e-1j").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex("-2j").unwrap(), c(0.0, -2.0));
        assert!(parse_complex("abc").is_err());

        let s: SigmaSpec = "moebius:1,0,0,1:moebius:2,1,0,1:joukowski:0.3,0.1".parse().unwrap();
        match s {
            SigmaSpec::Moebius { inner, .. } => match *inner {
                SigmaSpec::Moebius { inner, b, .. } => {
                    assert_eq!(b, ONE);
                    assert_eq!(*inner, SigmaSpec::Joukowski { c: c(0.3, 0.1) });
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
        let l: SigmaSpec = "laurent:1;0.5,0.5;0.1,0.2+0.3j".parse().unwrap();
        assert_eq!(
            l,
            SigmaSpec::Laurent {
                b: ONE,
                b0: c(0.5, 0.5),
                tail: vec![r(0.1), c(0.2, 0.3)]
            }
        );
        assert!("joukowski".parse::<SigmaSpec>().is_err());
        assert!("hinvsq:x".parse::<HSpec>().is_err());
        assert_eq!("hconst".parse::<HSpec>().unwrap(), HSpec::ConstantOne);
    }

    fn catalog_fn() -> impl Strategy<Value = MeromorphicFn> {
        prop_oneof![
            Just(MeromorphicFn::identity()),
            (-0.9f64..0.9, -0.3f64..0.3).prop_map(|(a, b)| MeromorphicFn::joukowski(c(a, b)).unwrap()),
            (-0.3f64..0.3, -0.3f64..0.3, -0.2f64..0.2).prop_map(|(a, b, d)| {
                make_sigma_function(SigmaSpec::Laurent { b: ONE, b0: r(a), tail: vec![r(b), c(0.0, d)] }).unwrap()
            }),
        ]
    }

    proptest! {
        #[test]
        fn reciprocal_powers_multiply_to_one(
            f in catalog_fn(), g in catalog_fn(),
            ar in -1.0f64..1.0, ai in -1.0f64..1.0,
            rad in 1.1f64..6.0, th in 0.0f64..(2.0 * PI),
        ) {
            let z = Complex64::from_polar(rad, th);
            let alpha = c(ar, ai);
            let a = power_branch(&f, &g, alpha, z);
            let b = power_branch(&g, &f, alpha, z);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a.value * b.value - ONE).norm() <= 1e-10);
            }
        }

        #[test]
        fn unit_power_is_the_ratio(
            f in catalog_fn(), g in catalog_fn(),
            rad in 1.1f64..6.0, th in 0.0f64..(2.0 * PI),
        ) {
            let z = Complex64::from_polar(rad, th);
            if let Ok(v) = power_branch(&f, &g, ONE, z) {
                let ratio = g.derivative_jet(z).unwrap().div(&f.derivative_jet(z).unwrap()).unwrap();
                for (x, y) in v.to_array().iter().zip(ratio.to_array()) {
                    prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
                }
            }
        }
    }
}
