//! Points of the unit hypercube and axis-aligned boxes inside it.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_exact, in_unit_interval, parse_lenient, Rational};

/// A point of `[0, 1]^d`, `d >= 2`, with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitPoint(Vec<Rational>);

impl UnitPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DimensionTooSmall(coords.len()));
        }
        if let Some((index, value)) = coords
            .iter()
            .enumerate()
            .find(|(_, c)| !in_unit_interval(c))
        {
            return Err(Error::OutOfUnitInterval {
                index,
                value: format_exact(value),
            });
        }
        Ok(Self(coords))
    }

    /// Wraps coordinates already known to lie in the unit cube.
    pub(crate) fn from_trusted(coords: Vec<Rational>) -> Self {
        debug_assert!(coords.len() >= 2 && coords.iter().all(in_unit_interval));
        Self(coords)
    }

    pub fn ones(d: usize) -> Result<Self> {
        Self::new(vec![Rational::one(); d])
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::new(vec![Rational::zero(); d])
    }

    /// Parses a comma-separated list such as `3/5,3/5,4/5,1` or `0.6,0.6,0.8,1`.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(parse_lenient)
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    /// Coordinates in ascending order.
    pub fn sorted(&self) -> UnitPoint {
        let mut c = self.0.clone();
        c.sort();
        UnitPoint(c)
    }

    pub fn min_coord(&self) -> Rational {
        *self.0.iter().min().expect("dimension >= 2")
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().copied().sum()
    }
}

impl fmt::Display for UnitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_exact).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// An axis-aligned closed box `[a_1, b_1] x ... x [a_d, b_d]` in the unit cube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperBox {
    sides: Vec<(Rational, Rational)>,
}

impl HyperBox {
    pub fn new(sides: Vec<(Rational, Rational)>) -> Result<Self> {
        for (k, (a, b)) in sides.iter().enumerate() {
            if !in_unit_interval(a) || !in_unit_interval(b) {
                return Err(Error::InvalidBox(format!(
                    "axis {}: endpoints outside [0, 1]",
                    k + 1
                )));
            }
            if a > b {
                return Err(Error::InvalidBox(format!(
                    "axis {}: lower endpoint {} exceeds upper endpoint {}",
                    k + 1,
                    format_exact(a),
                    format_exact(b)
                )));
            }
        }
        Ok(Self { sides })
    }

    pub fn unit(d: usize) -> Self {
        Self {
            sides: vec![(Rational::zero(), Rational::one()); d],
        }
    }

    /// The cube `[lo, hi]^d`.
    pub fn cube(d: usize, lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(vec![(lo, hi); d])
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[(Rational, Rational)] {
        &self.sides
    }

    /// Splits along `axis` at `at`, which must lie within that side.
    pub fn split(&self, axis: usize, at: Rational) -> Result<(HyperBox, HyperBox)> {
        let (a, b) = *self
            .sides
            .get(axis)
            .ok_or_else(|| Error::InvalidBox(format!("axis {} out of range", axis + 1)))?;
        if at < a || at > b {
            return Err(Error::InvalidBox("split point outside the side".into()));
        }
        let mut lower = self.clone();
        let mut upper = self.clone();
        lower.sides[axis] = (a, at);
        upper.sides[axis] = (at, b);
        Ok((lower, upper))
    }
}

impl fmt::Display for HyperBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sides
            .iter()
            .map(|(a, b)| format!("[{}, {}]", format_exact(a), format_exact(b)))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}
