//! Order-3 truncated Taylor arithmetic over the complex numbers.
//!
//! A [`ComplexJet`] holds a value and its first three complex derivatives
//! with respect to one variable. Arithmetic propagates all three orders by
//! the product, quotient and chain rules, which is exactly enough for the
//! Schwarzian derivative.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::catalog::MeromorphicFn;
use crate::error::{Error, Result};

/// Components above this magnitude are treated as overflow.
pub const NON_FINITE_THRESHOLD: f64 = 1e300;

/// Distance from the negative real axis inside which log/pow refuse to run.
pub const BRANCH_CUT_GUARD: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexJet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

/// One step of jet arithmetic. Binary operations carry their right operand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JetOp {
    Add(ComplexJet),
    Sub(ComplexJet),
    Mul(ComplexJet),
    Div(ComplexJet),
    Exp,
    Log,
    Pow(Complex64),
}

/// Applies `op` to `a` and checks the result for overflow.
pub fn jet_combine(a: &ComplexJet, op: JetOp) -> Result<ComplexJet> {
    let out = match op {
        JetOp::Add(b) => *a + b,
        JetOp::Sub(b) => *a - b,
        JetOp::Mul(b) => *a * b,
        JetOp::Div(b) => a.div(&b)?,
        JetOp::Exp => a.exp()?,
        JetOp::Log => a.ln()?,
        JetOp::Pow(p) => a.powc(p)?,
    };
    out.checked()
}

impl ComplexJet {
    pub const fn new(value: Complex64, d1: Complex64, d2: Complex64, d3: Complex64) -> Self {
        Self { value, d1, d2, d3 }
    }

    pub const fn constant(value: Complex64) -> Self {
        Self::new(value, ZERO, ZERO, ZERO)
    }

    /// Jet of the identity map at `z`.
    pub const fn variable(z: Complex64) -> Self {
        Self::new(z, ONE, ZERO, ZERO)
    }

    pub fn from_array(c: [Complex64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(&self) -> [Complex64; 4] {
        [self.value, self.d1, self.d2, self.d3]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array()
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite() && c.norm() <= NON_FINITE_THRESHOLD)
    }

    pub fn checked(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::NonFiniteJet)
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::new(self.value * k, self.d1 * k, self.d2 * k, self.d3 * k)
    }

    /// The quotient `self / other`, solved order by order from `q * other = self`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let b = other;
        if b.value == ZERO {
            return Err(Error::DivisionByZeroJet);
        }
        let inv = b.value.inv();
        let q0 = self.value * inv;
        let q1 = (self.d1 - q0 * b.d1) * inv;
        let q2 = (self.d2 - 2.0 * q1 * b.d1 - q0 * b.d2) * inv;
        let q3 = (self.d3 - 3.0 * q2 * b.d1 - 3.0 * q1 * b.d2 - q0 * b.d3) * inv;
        Self::new(q0, q1, q2, q3).checked()
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(ONE).div(self)
    }

    /// Composition `phi(self)` where `phi` has derivatives `phi[k]` at `self.value`.
    fn compose(&self, phi: [Complex64; 4]) -> Self {
        let (a1, a2, a3) = (self.d1, self.d2, self.d3);
        Self::new(
            phi[0],
            phi[1] * a1,
            phi[2] * a1 * a1 + phi[1] * a2,
            phi[3] * a1 * a1 * a1 + 3.0 * phi[2] * a1 * a2 + phi[1] * a3,
        )
    }

    pub fn exp(&self) -> Result<Self> {
        let e = self.value.exp();
        self.compose([e, e, e, e]).checked()
    }

    fn guard_cut(&self) -> Result<()> {
        let a = self.value;
        if a.re <= 0.0 && a.im.abs() <= BRANCH_CUT_GUARD {
            Err(Error::BranchCutViolation(a))
        } else {
            Ok(())
        }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Result<Self> {
        self.guard_cut()?;
        self.ln_with_value(self.value.ln())
    }

    /// Logarithm on the branch whose value at `self.value` is `branch_value`.
    /// The derivatives do not depend on the branch; only the value does, so
    /// callers that track a branch by continuation pass the tracked value.
    pub fn ln_with_value(&self, branch_value: Complex64) -> Result<Self> {
        if self.value == ZERO {
            return Err(Error::BranchCutViolation(self.value));
        }
        let inv = self.value.inv();
        self.compose([branch_value, inv, -inv * inv, 2.0 * inv * inv * inv])
            .checked()
    }

    /// Principal power `self^p`.
    pub fn powc(&self, p: Complex64) -> Result<Self> {
        self.guard_cut()?;
        let a = self.value;
        let inv = a.inv();
        let v = (p * a.ln()).exp();
        let f1 = p * v * inv;
        let f2 = (p - 1.0) * f1 * inv;
        let f3 = (p - 2.0) * f2 * inv;
        self.compose([v, f1, f2, f3]).checked()
    }

    /// `f''/f'` for a jet read as `(f, f', f'', f''')`.
    pub fn pre_schwarzian(&self) -> Result<Complex64> {
        if self.d1 == ZERO {
            return Err(Error::CriticalPoint(self.value));
        }
        Ok(self.d2 / self.d1)
    }

    /// `f'''/f' - (3/2) (f''/f')^2`.
    pub fn schwarzian(&self) -> Result<Complex64> {
        if self.d1 == ZERO {
            return Err(Error::CriticalPoint(self.value));
        }
        let r = self.d2 / self.d1;
        Ok(self.d3 / self.d1 - 1.5 * r * r)
    }
}

impl Add for ComplexJet {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl Sub for ComplexJet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl Neg for ComplexJet {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2, -self.d3)
    }
}

impl Mul for ComplexJet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self, o);
        Self::new(
            a.value * b.value,
            a.d1 * b.value + a.value * b.d1,
            a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2,
            a.d3 * b.value + 3.0 * a.d2 * b.d1 + 3.0 * a.d1 * b.d2 + a.value * b.d3,
        )
    }
}

impl Add<Complex64> for ComplexJet {
    type Output = Self;
    fn add(self, c: Complex64) -> Self {
        Self::new(self.value + c, self.d1, self.d2, self.d3)
    }
}

/// Jet of `f` at `zeta`, restricted to the exterior disk.
pub fn derivatives_of(f: &MeromorphicFn, zeta: Complex64) -> Result<ComplexJet> {
    f.derivatives_of(zeta)
}

/// `f''(zeta) / f'(zeta)`.
pub fn pre_schwarzian(f: &MeromorphicFn, zeta: Complex64) -> Result<Complex64> {
    derivatives_of(f, zeta)?
        .pre_schwarzian()
        .map_err(|_| Error::CriticalPoint(zeta))
}

/// Schwarzian derivative of `f` at `zeta`, in the expanded form
/// `f'''/f' - (3/2)(f''/f')^2`.
pub fn schwarzian(f: &MeromorphicFn, zeta: Complex64) -> Result<Complex64> {
    derivatives_of(f, zeta)?
        .schwarzian()
        .map_err(|_| Error::CriticalPoint(zeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &ComplexJet, b: [Complex64; 4], tol: f64) -> bool {
        a.to_array().iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn exp_at_origin() {
        let j = jet_combine(&ComplexJet::variable(c(0.0, 0.0)), JetOp::Exp).unwrap();
        assert!(close(&j, [c(1.0, 0.0); 4], 1e-15));
    }

    #[test]
    fn log_one_plus_z() {
        let a = ComplexJet::new(c(1.0, 0.0), c(1.0, 0.0), ZERO, ZERO);
        let j = jet_combine(&a, JetOp::Log).unwrap();
        assert!(close(&j, [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)], 1e-15));
    }

    #[test]
    fn sqrt_one_plus_z() {
        let a = ComplexJet::new(c(1.0, 0.0), c(1.0, 0.0), ZERO, ZERO);
        let j = jet_combine(&a, JetOp::Pow(c(0.5, 0.0))).unwrap();
        assert!(close(&j, [c(1.0, 0.0), c(0.5, 0.0), c(-0.25, 0.0), c(0.375, 0.0)], 1e-15));
    }

    #[test]
    fn geometric_series_by_division() {
        // 1/(1-z) at 0: all derivatives k!
        let one = ComplexJet::constant(c(1.0, 0.0));
        let d = one - ComplexJet::variable(ZERO);
        let j = jet_combine(&one, JetOp::Div(d)).unwrap();
        assert!(close(&j, [c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(6.0, 0.0)], 1e-15));
    }

    #[test]
    fn division_by_zero_value() {
        let a = ComplexJet::variable(c(1.0, 0.0));
        let z = ComplexJet::variable(ZERO);
        assert_eq!(jet_combine(&a, JetOp::Div(z)), Err(Error::DivisionByZeroJet));
    }

    #[test]
    fn branch_cut_rejected() {
        let a = ComplexJet::variable(c(-2.0, 0.0));
        assert!(matches!(jet_combine(&a, JetOp::Log), Err(Error::BranchCutViolation(_))));
        let a = ComplexJet::variable(c(-2.0, 1e-13));
        assert!(matches!(
            jet_combine(&a, JetOp::Pow(c(0.5, 0.0))),
            Err(Error::BranchCutViolation(_))
        ));
        // just off the guard band is fine
        let a = ComplexJet::variable(c(-2.0, 1e-9));
        assert!(jet_combine(&a, JetOp::Log).is_ok());
        let zero = ComplexJet::variable(ZERO);
        assert!(matches!(jet_combine(&zero, JetOp::Log), Err(Error::BranchCutViolation(_))));
    }

    #[test]
    fn overflow_is_reported() {
        let a = ComplexJet::variable(c(800.0, 0.0));
        assert_eq!(jet_combine(&a, JetOp::Exp), Err(Error::NonFiniteJet));
        let big = ComplexJet::constant(c(1e200, 0.0));
        assert_eq!(jet_combine(&big, JetOp::Mul(big)), Err(Error::NonFiniteJet));
    }

    #[test]
    fn schwarzian_of_cubic() {
        // f = z^3 at z=2: f' = 12, f'' = 12, f''' = 6; S = 6/12 - 1.5 * 1 = -1
        let z = ComplexJet::variable(c(2.0, 0.0));
        let f = z * z * z;
        assert!((f.schwarzian().unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((f.pre_schwarzian().unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            ComplexJet::constant(ONE).schwarzian(),
            Err(Error::CriticalPoint(_))
        ));
    }

    fn arb_jet() -> impl Strategy<Value = ComplexJet> {
        prop::array::uniform8(-3.0f64..3.0).prop_map(|v| {
            ComplexJet::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7]))
        })
    }

    proptest! {
        #[test]
        fn multiplying_by_one_is_exact(a in arb_jet()) {
            let one = ComplexJet::constant(ONE);
            prop_assert_eq!(jet_combine(&a, JetOp::Mul(one)).unwrap(), a);
        }

        #[test]
        fn log_inverts_exp(a in arb_jet()) {
            // Im(value) kept inside (-pi, pi) by the strategy range
            let e = jet_combine(&a, JetOp::Exp).unwrap();
            let back = jet_combine(&e, JetOp::Log).unwrap();
            for (x, y) in back.to_array().iter().zip(a.to_array().iter()) {
                prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()),
                    "{:?} vs {:?}", back, a);
            }
        }

        #[test]
        fn quotient_times_divisor(a in arb_jet(), b in arb_jet()) {
            prop_assume!(b.value.norm() > 0.5);
            let q = a.div(&b).unwrap();
            let back = q * b;
            for (x, y) in back.to_array().iter().zip(a.to_array().iter()) {
                prop_assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()));
            }
        }
    }
}
