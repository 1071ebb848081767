//! Pointwise evaluation of the general univalence criterion and its five
//! specializations. Every criterion is reported as a nonnegative number whose
//! pass condition is `<= 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{HFunction, MeromorphicFn, CRITICAL_EPS};
use crate::error::{Error, Result};
use crate::jet::ComplexJet;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const HALF: Complex64 = Complex64::new(0.5, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Criterion {
    /// The general criterion with arbitrary `f, g, h, alpha`.
    Theorem1,
    /// `alpha = 0`; involves `f` and `h` only.
    AlphaZero,
    /// `alpha = 1/2`.
    MiazgaWesolowski,
    /// `alpha = 1/2`, `h = 1`.
    Epstein,
    /// `alpha = 1/2`, `h = 1`, `g = f`.
    Becker,
    /// `alpha = 1/2`, `h = 1`, `g = identity`; normalized by the bound `2/(|z|^2-1)^2`.
    Nehari,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Theorem1,
        Criterion::AlphaZero,
        Criterion::MiazgaWesolowski,
        Criterion::Epstein,
        Criterion::Becker,
        Criterion::Nehari,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Theorem1 => "theorem1",
            Criterion::AlphaZero => "alpha_zero",
            Criterion::MiazgaWesolowski => "miazga_wesolowski",
            Criterion::Epstein => "epstein",
            Criterion::Becker => "becker",
            Criterion::Nehari => "nehari",
        }
    }

    /// The `alpha` a corollary fixes, if any.
    pub fn fixed_alpha(self) -> Option<Complex64> {
        match self {
            Criterion::Theorem1 => None,
            Criterion::AlphaZero => Some(Complex64::new(0.0, 0.0)),
            _ => Some(HALF),
        }
    }

    fn uses_g(self) -> bool {
        !matches!(self, Criterion::AlphaZero | Criterion::Becker | Criterion::Nehari)
    }

    fn uses_h(self) -> bool {
        matches!(
            self,
            Criterion::Theorem1 | Criterion::AlphaZero | Criterion::MiazgaWesolowski
        )
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown criterion `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionParams {
    pub f: MeromorphicFn,
    pub g: MeromorphicFn,
    pub h: HFunction,
    pub alpha: Complex64,
    pub criterion: Criterion,
    /// Use `(f''/f' - g''/g')^2` in the third term (the default); `false`
    /// uses the first power.
    pub squared_variant: bool,
}

impl CriterionParams {
    pub fn new(
        f: MeromorphicFn,
        g: MeromorphicFn,
        h: HFunction,
        alpha: Complex64,
        criterion: Criterion,
    ) -> Self {
        Self {
            f,
            g,
            h,
            alpha,
            criterion,
            squared_variant: true,
        }
    }

    /// Replaces the fields a corollary ignores or fixes with the values it
    /// implies, so that a recorded parameter set describes what was computed.
    pub fn resolved(mut self) -> Self {
        if let Some(a) = self.criterion.fixed_alpha() {
            self.alpha = a;
        }
        match self.criterion {
            Criterion::Becker => {
                self.g = self.f.clone();
                self.h = HFunction::constant_one();
            }
            Criterion::Nehari => {
                self.g = MeromorphicFn::identity();
                self.h = HFunction::constant_one();
            }
            Criterion::Epstein => self.h = HFunction::constant_one(),
            Criterion::AlphaZero => self.g = MeromorphicFn::identity(),
            _ => {}
        }
        self
    }
}

/// Per-point quantities shared by all criteria.
struct PointTerms {
    zeta: Complex64,
    /// `|zeta|^2`
    r2: f64,
    /// `zeta / conj(zeta)`
    phase: Complex64,
    h: Complex64,
    h1: Complex64,
    /// `f''/f'`
    pf: Complex64,
    sf: Complex64,
    pg: Complex64,
    sg: Complex64,
}

fn fn_terms(jet: &ComplexJet, zeta: Complex64) -> Result<(Complex64, Complex64)> {
    if jet.d1.norm() <= CRITICAL_EPS {
        return Err(Error::CriticalPoint(zeta));
    }
    Ok((jet.pre_schwarzian()?, jet.schwarzian()?))
}

impl PointTerms {
    /// One jet evaluation per function actually used by `criterion`.
    fn at(p: &CriterionParams, zeta: Complex64, criterion: Criterion) -> Result<Self> {
        if zeta.norm() <= 1.0 {
            return Err(Error::OutsideDomain(zeta));
        }
        let (pf, sf) = fn_terms(&p.f.jet(zeta)?, zeta)?;
        let (pg, sg) = if criterion.uses_g() {
            fn_terms(&p.g.jet(zeta)?, zeta)?
        } else {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        };
        let (h, h1) = if criterion.uses_h() {
            let hj = p.h.jet(zeta)?;
            if hj.value == Complex64::new(0.0, 0.0) {
                return Err(Error::HVanishes(zeta));
            }
            (hj.value, hj.d1)
        } else {
            (ONE, Complex64::new(0.0, 0.0))
        };
        Ok(Self {
            zeta,
            r2: zeta.norm_sqr(),
            phase: zeta / zeta.conj(),
            h,
            h1,
            pf,
            sf,
            pg,
            sg,
        })
    }

    fn m(&self) -> f64 {
        self.r2 - 1.0
    }

    /// `(1 - h)/h |zeta|^2`
    fn boundary_term(&self) -> Complex64 {
        (ONE - self.h) / self.h * self.r2
    }

    /// `alpha (|zeta|^2 - 1)^2 (zeta / conj zeta) h [inner]`
    fn schwarzian_term(&self, alpha: Complex64, inner: Complex64) -> Complex64 {
        let m = self.m();
        alpha * (m * m) * self.phase * self.h * inner
    }
}

fn lhs_general(t: &PointTerms, alpha: Complex64, squared: bool) -> f64 {
    let z = t.zeta;
    let bracket = z * t.h1 / t.h + (ONE - 2.0 * alpha) * (z * t.pf) + 2.0 * alpha * (z * t.pg);
    let delta = t.pf - t.pg;
    let delta = if squared { delta * delta } else { delta };
    let inner = (alpha - HALF) * delta + (t.sf - t.sg);
    (t.boundary_term() - t.m() * bracket + t.schwarzian_term(alpha, inner)).norm()
}

/// Modulus of the general criterion expression at `zeta`. The corollary
/// selector in `p` is ignored.
pub fn theorem1_lhs(p: &CriterionParams, zeta: Complex64) -> Result<f64> {
    let t = PointTerms::at(p, zeta, Criterion::Theorem1)?;
    Ok(lhs_general(&t, p.alpha, p.squared_variant))
}

/// The criterion selected by `p.criterion`, normalized so that pass means `<= 1`.
pub fn corollary_lhs(p: &CriterionParams, zeta: Complex64) -> Result<f64> {
    let crit = p.criterion;
    if crit == Criterion::Theorem1 {
        return theorem1_lhs(p, zeta);
    }
    let t = PointTerms::at(p, zeta, crit)?;
    let z = t.zeta;
    let m = t.m();
    let value = match crit {
        Criterion::Theorem1 => unreachable!(),
        Criterion::AlphaZero => (t.boundary_term() - m * (z * t.h1 / t.h + z * t.pf)).norm(),
        Criterion::MiazgaWesolowski => (t.boundary_term() - m * (z * t.h1 / t.h + z * t.pg)
            + t.schwarzian_term(HALF, t.sf - t.sg))
        .norm(),
        Criterion::Epstein => {
            (t.schwarzian_term(HALF, t.sf - t.sg) - m * (z * t.pg)).norm()
        }
        Criterion::Becker => m * (z * t.pf).norm(),
        Criterion::Nehari => 0.5 * (m * m) * t.sf.norm(),
    };
    Ok(value)
}
