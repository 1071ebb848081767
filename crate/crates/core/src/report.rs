//! Serialization helpers shared by the JSON reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

/// A complex number as `{"re": .., "im": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Point {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.re, p.im)
    }
}

pub fn ser_complex<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    Point::from(*c).serialize(s)
}

/// Schema version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;
