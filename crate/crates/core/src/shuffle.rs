//! Shuffle-of-min structures: hypercube cells that rearrange the mass of a
//! base copula, their validity conditions, evaluation and the two builders.
//!
//! A cell is a product of `d` equal-length intervals `J^1 x ... x J^d` and a
//! base copula; its mass is the common side length. Four conditions make a
//! list of cells a proper shuffling structure:
//!
//! 1. the index set is finite;
//! 2. on every axis, the intervals of two distinct cells overlap in at most
//!    one point;
//! 3. within a cell all sides have the same length;
//! 4. on every axis the side lengths sum to 1.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::UnitPoint;
use crate::rational::{format_exact, in_unit_interval, lcm_of, parse_exact, pos, ratio, Rational};

/// Mass distribution inside a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseCopula {
    /// All mass on the main diagonal of the cell.
    Min,
    /// Mass spread uniformly over the cell.
    Independence,
}

impl BaseCopula {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Self::Min),
            "independence" | "indep" => Ok(Self::Independence),
            other => Err(Error::Parse(format!("unknown base copula `{other}`"))),
        }
    }
}

impl fmt::Display for BaseCopula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Min => "min",
            Self::Independence => "independence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub intervals: Vec<(Rational, Rational)>,
    pub base: BaseCopula,
}

impl Cell {
    /// Side length on the first axis.
    pub fn mass(&self) -> Rational {
        let (a, b) = self.intervals[0];
        b - a
    }

    fn lefts(&self) -> Vec<Rational> {
        self.intervals.iter().map(|(a, _)| *a).collect()
    }
}

/// An unvalidated list of cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShuffleStructure {
    pub dim: usize,
    pub cells: Vec<Cell>,
}

/// Outcome of one validity condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(String),
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Pass => f.write_str("pass"),
            Check::Fail(w) => write!(f, "fail ({w})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    /// Shape checks: dimension, one interval per axis, endpoints ordered in `[0, 1]`.
    pub well_formed: Check,
    pub finite: Check,
    pub overlap: Check,
    pub hypercube: Check,
    pub unit_sum: Check,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries().iter().all(|(_, c)| c.passed())
    }

    pub fn entries(&self) -> [(&'static str, &Check); 5] {
        [
            ("well_formed", &self.well_formed),
            ("finite", &self.finite),
            ("overlap", &self.overlap),
            ("hypercube", &self.hypercube),
            ("unit_sum", &self.unit_sum),
        ]
    }

    fn first_failure(&self) -> Option<String> {
        self.entries().iter().find_map(|(name, c)| match c {
            Check::Fail(w) => Some(format!("{name}: {w}")),
            Check::Pass => None,
        })
    }
}

impl ShuffleStructure {
    pub fn new(dim: usize, cells: Vec<Cell>) -> Self {
        Self { dim, cells }
    }

    /// Evaluates every validity condition; failures carry the first witness.
    pub fn validate(&self) -> ValidationReport {
        let d = self.dim;
        let skipped = || Check::Fail("skipped: structure is malformed".into());

        let well_formed = self.check_well_formed();
        if !well_formed.passed() {
            return ValidationReport {
                well_formed,
                finite: Check::Pass,
                overlap: skipped(),
                hypercube: skipped(),
                unit_sum: skipped(),
            };
        }

        let mut overlap = Check::Pass;
        'axes: for k in 0..d {
            for (i1, c1) in self.cells.iter().enumerate() {
                for (i2, c2) in self.cells.iter().enumerate().skip(i1 + 1) {
                    let (a1, b1) = c1.intervals[k];
                    let (a2, b2) = c2.intervals[k];
                    if a1.max(a2) < b1.min(b2) {
                        overlap = Check::Fail(format!(
                            "axis {}: cells {} and {} overlap on [{}, {}]",
                            k + 1,
                            i1 + 1,
                            i2 + 1,
                            format_exact(&a1.max(a2)),
                            format_exact(&b1.min(b2))
                        ));
                        break 'axes;
                    }
                }
            }
        }

        let hypercube = self
            .cells
            .iter()
            .enumerate()
            .find_map(|(i, c)| {
                let m = c.mass();
                c.intervals
                    .iter()
                    .enumerate()
                    .find(|(_, (a, b))| *b - *a != m)
                    .map(|(k, (a, b))| {
                        Check::Fail(format!(
                            "cell {}: side {} has length {} but side 1 has length {}",
                            i + 1,
                            k + 1,
                            format_exact(&(*b - *a)),
                            format_exact(&m)
                        ))
                    })
            })
            .unwrap_or(Check::Pass);

        let unit_sum = (0..d)
            .find_map(|k| {
                let s: Rational = self
                    .cells
                    .iter()
                    .map(|c| c.intervals[k].1 - c.intervals[k].0)
                    .sum();
                (s != Rational::one()).then(|| {
                    Check::Fail(format!(
                        "axis {}: lengths sum to {}",
                        k + 1,
                        format_exact(&s)
                    ))
                })
            })
            .unwrap_or(Check::Pass);

        ValidationReport {
            well_formed,
            finite: Check::Pass,
            overlap,
            hypercube,
            unit_sum,
        }
    }

    fn check_well_formed(&self) -> Check {
        if self.dim < 2 {
            return Check::Fail(format!("dimension {} < 2", self.dim));
        }
        if self.cells.is_empty() {
            return Check::Fail("no cells".into());
        }
        for (i, c) in self.cells.iter().enumerate() {
            if c.intervals.len() != self.dim {
                return Check::Fail(format!(
                    "cell {} has {} intervals, expected {}",
                    i + 1,
                    c.intervals.len(),
                    self.dim
                ));
            }
            for (k, (a, b)) in c.intervals.iter().enumerate() {
                if !in_unit_interval(a) || !in_unit_interval(b) || a > b {
                    return Check::Fail(format!(
                        "cell {}, axis {}: [{}, {}] is not an interval in [0, 1]",
                        i + 1,
                        k + 1,
                        format_exact(a),
                        format_exact(b)
                    ));
                }
            }
        }
        Check::Pass
    }

    /// Validates and seals the structure for evaluation.
    pub fn into_validated(self) -> Result<ValidatedShuffle> {
        let report = self.validate();
        if let Some(why) = report.first_failure() {
            return Err(Error::InvalidShuffle(why));
        }
        let masses = self.cells.iter().map(Cell::mass).collect();
        let lefts = self.cells.iter().map(Cell::lefts).collect();
        Ok(ValidatedShuffle {
            structure: self,
            masses,
            lefts,
        })
    }

    /// Serializes to the shuffle file JSON document.
    pub fn to_json(&self) -> String {
        let file = ShuffleFile {
            dim: self.dim,
            cells: self
                .cells
                .iter()
                .map(|c| CellFile {
                    intervals: c
                        .intervals
                        .iter()
                        .map(|(a, b)| [format_exact(a), format_exact(b)])
                        .collect(),
                    base: c.base,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }

    /// Parses the shuffle file JSON document. Endpoints must be `n` or `n/m`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ShuffleFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("shuffle file: {e}")))?;
        let cells = file
            .cells
            .into_iter()
            .map(|c| {
                let intervals = c
                    .intervals
                    .iter()
                    .map(|[a, b]| Ok((parse_exact(a)?, parse_exact(b)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Cell {
                    intervals,
                    base: c.base,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim: file.dim,
            cells,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShuffleFile {
    dim: usize,
    cells: Vec<CellFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    intervals: Vec<[String; 2]>,
    base: BaseCopula,
}

/// A structure that passed [`ShuffleStructure::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedShuffle {
    structure: ShuffleStructure,
    masses: Vec<Rational>,
    lefts: Vec<Vec<Rational>>,
}

impl ValidatedShuffle {
    pub fn dim(&self) -> usize {
        self.structure.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.structure.cells
    }

    pub fn structure(&self) -> &ShuffleStructure {
        &self.structure
    }

    pub fn total_mass(&self) -> Rational {
        self.masses.iter().copied().sum()
    }

    /// Sum over cells of the base copula's mass in `[0, u]` within the cell.
    pub fn eval(&self, u: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for ((cell, mass), lefts) in self
            .structure
            .cells
            .iter()
            .zip(&self.masses)
            .zip(&self.lefts)
        {
            if mass.is_zero() {
                continue;
            }
            match cell.base {
                BaseCopula::Min => {
                    let mut m = *mass;
                    for (x, a) in u.iter().zip(lefts) {
                        m = m.min(pos(*x - *a));
                        if m.is_zero() {
                            break;
                        }
                    }
                    total += m;
                }
                BaseCopula::Independence => {
                    let mut prod = *mass;
                    for (x, a) in u.iter().zip(lefts) {
                        let side = pos(*x - *a).min(*mass);
                        if side.is_zero() {
                            prod = Rational::zero();
                            break;
                        }
                        prod = prod * side / mass;
                    }
                    total += prod;
                }
            }
        }
        total
    }

    pub fn evaluate(&self, u: &UnitPoint) -> Result<Rational> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        Ok(self.eval(u.coords()))
    }

    pub fn breakpoint_denominators(&self) -> Vec<i128> {
        vec![lcm_of(self.structure.cells.iter().flat_map(|c| {
            c.intervals
                .iter()
                .flat_map(|(a, b)| [*a.denom(), *b.denom()])
        }))]
    }
}

pub fn validate(s: &ShuffleStructure) -> ValidationReport {
    s.validate()
}

pub fn evaluate_shuffle(s: &ValidatedShuffle, u: &UnitPoint) -> Result<Rational> {
    s.evaluate(u)
}

/// The `δ` parameters of the even-dimensional family, `d = 2n`.
///
/// `0 <= δ_1 <= ... <= δ_n <= 1/(d+1)` and `Σ δ_j = (n-1)/(d+1)`; for `d = 2`
/// this forces `δ = (0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeltaVector {
    dim: usize,
    values: Vec<Rational>,
}

impl DeltaVector {
    pub fn new(dim: usize, values: Vec<Rational>) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidDelta(format!(
                "dimension {dim} is not even and >= 2"
            )));
        }
        let n = dim / 2;
        if values.len() != n {
            return Err(Error::InvalidDelta(format!(
                "expected {n} entries, got {}",
                values.len()
            )));
        }
        let cap = ratio(1, dim as i128 + 1);
        if values.iter().any(|v| v.is_negative() || *v > cap) {
            return Err(Error::InvalidDelta(format!(
                "entries must lie in [0, {}]",
                format_exact(&cap)
            )));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidDelta("entries must be nondecreasing".into()));
        }
        let sum: Rational = values.iter().copied().sum();
        let want = ratio(n as i128 - 1, dim as i128 + 1);
        if sum != want {
            return Err(Error::InvalidDelta(format!(
                "entries sum to {}, expected {}",
                format_exact(&sum),
                format_exact(&want)
            )));
        }
        Ok(Self { dim, values })
    }

    /// The vector `(0, 1/(d+1), ..., 1/(d+1))` whose point is `u*`.
    pub fn canonical(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidDelta(format!(
                "dimension {dim} is not even and >= 2"
            )));
        }
        let n = dim / 2;
        let mut values = vec![ratio(1, dim as i128 + 1); n];
        values[0] = Rational::zero();
        Self::new(dim, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `((d-1)/(d+1)` repeated `n` times, then `d/(d+1) + δ_j)`.
    pub fn point(&self) -> UnitPoint {
        let big_d = self.dim as i128 + 1;
        let n = self.dim / 2;
        let mut coords = vec![ratio(self.dim as i128 - 1, big_d); n];
        coords.extend(
            self.values
                .iter()
                .map(|v| ratio(self.dim as i128, big_d) + v),
        );
        UnitPoint::from_trusted(coords)
    }
}

impl fmt::Display for DeltaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(format_exact).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The `d`-cell min-shuffle whose evaluation is `C*`, cut by the hyperplanes
/// `u_k = Σ_{i<=k} (1 - u*_i)`.
pub fn build_c_star_structure(d: usize) -> Result<ValidatedShuffle> {
    let star = crate::copula::u_star(d)?;
    // gap[i] = 1 - u*_{i+1}
    let gap: Vec<Rational> = star.coords().iter().map(|s| Rational::one() - s).collect();
    let total: Rational = gap.iter().copied().sum();
    let sum_excluding = |lo: usize, hi: usize| -> Rational {
        // Σ over 1-based i outside lo..=hi
        total - (lo..=hi).map(|i| gap[i - 1]).sum::<Rational>()
    };
    let sum_range = |lo: usize, hi: usize| -> Rational { (lo..=hi).map(|i| gap[i - 1]).sum() };

    let cells = (1..=d)
        .map(|j| {
            let intervals = (1..=d)
                .map(|k| match j.cmp(&k) {
                    std::cmp::Ordering::Less => (sum_excluding(j, k), sum_excluding(j + 1, k)),
                    std::cmp::Ordering::Equal => (sum_excluding(k, k), Rational::one()),
                    std::cmp::Ordering::Greater => (sum_range(k + 1, j - 1), sum_range(k + 1, j)),
                })
                .collect();
            Cell {
                intervals,
                base: BaseCopula::Min,
            }
        })
        .collect();
    ShuffleStructure::new(d, cells).into_validated()
}

/// The even-dimensional family attaining the sharp bound at `δ.point()` with
/// the order-reversing permutation. Zero-mass cells are omitted.
pub fn build_manifold_structure(delta: &DeltaVector, base: BaseCopula) -> Result<ValidatedShuffle> {
    let structure = manifold_cells(delta, base);
    structure.into_validated()
}

/// Raw cell list of the even-dimensional family, before validation.
pub fn manifold_cells(delta: &DeltaVector, base: BaseCopula) -> ShuffleStructure {
    let d = delta.dim();
    let n = d / 2;
    let big_d = d as i128 + 1;
    let frac = |k: i128| ratio(k, big_d);
    let dl = |j: usize| delta.values[j - 1];
    let plus = |j: usize| frac(1) + dl(j);
    let minus = |j: usize| frac(1) - dl(j);
    // Σ_{j=1, j != skip}^{upto} f(j)
    let partial = |f: &dyn Fn(usize) -> Rational, upto: usize, skip: Option<usize>| -> Rational {
        (1..=upto).filter(|&j| Some(j) != skip).map(f).sum()
    };
    let d_i = d as i128;
    let one = Rational::one();

    let mut cells = Vec::with_capacity(3 * n - 1);

    // i in 1..=n-1
    for i in 1..n {
        let intervals = (1..=d)
            .map(|k| {
                if k <= n - i || k > n {
                    (partial(&plus, i - 1, None), partial(&plus, i, None))
                } else if k == n - i + 1 {
                    (frac(d_i - 1), frac(d_i) + dl(i))
                } else {
                    let skip = Some(n + 1 - k);
                    (partial(&plus, i - 1, skip), partial(&plus, i, skip))
                }
            })
            .collect();
        cells.push(Cell { intervals, base });
    }

    // i in n..=2n-2
    for i in n..=(2 * n).saturating_sub(2) {
        let t = i - n;
        let lo = partial(&minus, t, None);
        let hi = partial(&minus, t + 1, None);
        let intervals = (1..=d)
            .map(|k| {
                if k == 1 {
                    let c = frac(d_i - 2) - dl(n);
                    (c + lo, c + hi)
                } else if k == 2 * n - i {
                    (frac(d_i) + dl(n + 1 - k), one)
                } else if k < 2 * n - i {
                    // upper endpoint repaired so the side has the cell length
                    let c = frac(d_i - 3) - dl(n) - dl(n + 1 - k);
                    (c + lo, c + hi)
                } else if k <= n {
                    let c = frac(d_i - 4) - dl(n);
                    (c + lo, c + hi)
                } else {
                    let c = frac(d_i) - dl(n);
                    (c + lo, c + hi)
                }
            })
            .collect();
        cells.push(Cell { intervals, base });
    }

    // i in 2n-1..=3n-2
    for i in (2 * n - 1)..=(3 * n - 2) {
        let t = i + 1 - 2 * n;
        let lo = partial(&minus, t, None);
        let hi = partial(&minus, t + 1, None);
        let intervals = (1..=d)
            .map(|k| {
                if k == 1 {
                    (frac(d_i - 2) + lo, frac(d_i - 2) + hi)
                } else if k <= n {
                    (frac(d_i - 4) + lo, frac(d_i - 4) + hi)
                } else if k == i + 2 - n {
                    (frac(d_i) + dl(k - n), one)
                } else {
                    let skip = Some(k - n);
                    (
                        frac(d_i) + partial(&minus, t, skip),
                        frac(d_i) + partial(&minus, t + 1, skip),
                    )
                }
            })
            .collect();
        cells.push(Cell { intervals, base });
    }

    // i = 3n-1
    let intervals = (1..=d)
        .map(|k| {
            if k == 1 {
                (frac(d_i - 1), one)
            } else if k <= n {
                (frac(d_i - 3), frac(d_i - 1))
            } else {
                (frac(d_i - 2) - dl(n), frac(d_i) - dl(n))
            }
        })
        .collect();
    cells.push(Cell { intervals, base });

    cells.retain(|c| !c.mass().is_zero());
    ShuffleStructure::new(d, cells)
}
