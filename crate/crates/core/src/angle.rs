//! Exact rational points of the circle `R/Z` and the angle map `θ ↦ dθ mod 1`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleParseError {
    #[error("empty angle string")]
    Empty,
    #[error("invalid integer in angle {0:?}")]
    BadInteger(String),
    #[error("zero denominator in angle {0:?}")]
    ZeroDenominator(String),
}

/// A rational point of the circle, kept reduced with `0 <= value < 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Angle(BigRational);

impl Angle {
    /// Builds `num/den mod 1`. Panics if `den == 0`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        let fl = r.floor();
        Angle(r - fl)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// `self + delta mod 1`.
    pub fn add(&self, delta: &BigRational) -> Angle {
        Angle::from_rational(&self.0 + delta)
    }

    /// Counterclockwise arc length from `self` to `other`, in `[0, 1)`.
    pub fn ccw_distance(&self, other: &Angle) -> BigRational {
        let diff = &other.0 - &self.0;
        if diff.is_negative() {
            diff + BigRational::one()
        } else {
            diff
        }
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = AngleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(AngleParseError::Empty);
        }
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| AngleParseError::BadInteger(s.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Angle::from_rational(BigRational::from_integer(parse(s)?))),
            Some((n, d)) => {
                let n = parse(n)?;
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(AngleParseError::ZeroDenominator(s.to_string()));
                }
                Ok(Angle::new(n, d))
            }
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The degree-`d` angle map `θ ↦ dθ mod 1`.
pub fn tau(theta: &Angle, d: u32) -> Angle {
    debug_assert!(d >= 2);
    let num = theta.numer() * BigInt::from(d);
    let den = theta.denom();
    let (_, rem) = num.div_mod_floor(den);
    Angle(BigRational::new(rem, den.clone()))
}

/// `τ^n(θ)`.
pub fn tau_iter(theta: &Angle, d: u32, n: usize) -> Angle {
    let mut x = theta.clone();
    for _ in 0..n {
        x = tau(&x, d);
    }
    x
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSummary {
    pub preperiod: usize,
    pub period: usize,
    /// `θ, τ(θ), ...` up to (excluding) the first repetition.
    pub orbit: Vec<Angle>,
}

impl OrbitSummary {
    /// `τ^n(θ)` read off the eventually periodic orbit.
    pub fn iterate(&self, n: usize) -> &Angle {
        &self.orbit[self.reduce_index(n)]
    }

    /// Position in `orbit` of `τ^n(θ)`.
    pub fn reduce_index(&self, n: usize) -> usize {
        if n < self.orbit.len() {
            n
        } else {
            self.preperiod + (n - self.preperiod) % self.period
        }
    }
}

/// Forward orbit of a rational angle until its first repetition.
pub fn orbit(theta: &Angle, d: u32) -> OrbitSummary {
    let mut seen: HashMap<Angle, usize> = HashMap::new();
    let mut orbit = Vec::new();
    let mut x = theta.clone();
    loop {
        if let Some(&first) = seen.get(&x) {
            let period = orbit.len() - first;
            return OrbitSummary {
                preperiod: first,
                period,
                orbit,
            };
        }
        seen.insert(x.clone(), orbit.len());
        let next = tau(&x, d);
        orbit.push(x);
        x = next;
    }
}

/// True iff going counterclockwise from `a` one meets `b` strictly before `c`.
/// False whenever two of the arguments coincide.
pub fn cyclic_order(a: &Angle, b: &Angle, c: &Angle) -> bool {
    if a == b || b == c || a == c {
        return false;
    }
    a.ccw_distance(b) < a.ccw_distance(c)
}
