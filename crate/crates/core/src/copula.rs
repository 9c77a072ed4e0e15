//! Exact d-variate copula-like functions: Fréchet–Hoeffding bounds,
//! independence, the extremal `C*`, shuffles, relabeled views and margins.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::point::{HyperBox, UnitPoint};
use crate::rational::{int, pos, ratio, Rational};
use crate::shuffle::ValidatedShuffle;

/// Anything that can be evaluated exactly on `[0, 1]^d`.
///
/// The axiom checks and the searches are written against this trait so that
/// test stubs (deliberately broken functions) go through the same code paths
/// as genuine copulas.
pub trait Copula: Send + Sync {
    fn dim(&self) -> usize;

    /// Evaluates at `u`; callers guarantee `u.len() == self.dim()` and
    /// coordinates in `[0, 1]`.
    fn eval(&self, u: &[Rational]) -> Rational;

    /// False for functions known not to be copulas (`W_d`, `d > 2`).
    fn is_declared_copula(&self) -> bool {
        true
    }

    /// Denominators of the function's breakpoints, used by samplers to land
    /// on cell boundaries.
    fn breakpoint_denominators(&self) -> Vec<i128> {
        Vec::new()
    }

    fn evaluate(&self, u: &UnitPoint) -> Result<Rational> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        Ok(self.eval(u.coords()))
    }
}

/// The point where the sharp bound `(d-1)/(d+1)` is attained:
/// `(d-1)/(d+1)` at every `j` with `2j <= d+1`, `d/(d+1)` at `j = d/2 + 1`
/// when `d` is even, and `1` elsewhere.
pub fn u_star(d: usize) -> Result<UnitPoint> {
    Ok(UnitPoint::from_trusted(u_star_coords(d)?))
}

fn u_star_coords(d: usize) -> Result<Vec<Rational>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let big_d = d as i128 + 1;
    Ok((1..=d)
        .map(|j| {
            if 2 * j <= d + 1 {
                ratio(d as i128 - 1, big_d)
            } else if d.is_multiple_of(2) && j == d / 2 + 1 {
                ratio(d as i128, big_d)
            } else {
                Rational::one()
            }
        })
        .collect())
}

/// Closed form of `C*`: a sum over `j` of clipped minima, where term `(j, k)`
/// reads axis `(j + k) mod d` shifted by the mass of `u*` outside the cyclic
/// window `I(j, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CStarForm {
    dim: usize,
    // terms[j][k] = (0-based axis, offset)
    terms: Vec<Vec<(usize, Rational)>>,
}

impl CStarForm {
    pub fn new(d: usize) -> Result<Self> {
        let star = u_star_coords(d)?;
        let gap: Vec<Rational> = star.iter().map(|s| Rational::one() - s).collect();
        let terms = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| {
                        let mut in_window = vec![false; d];
                        for l in 0..=k {
                            in_window[(j + l) % d] = true;
                        }
                        let offset: Rational =
                            (0..d).filter(|&i| !in_window[i]).map(|i| gap[i]).sum();
                        ((j + k) % d, offset)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { dim: d, terms })
    }

    fn eval(&self, u: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|row| {
                let m = row
                    .iter()
                    .map(|&(axis, offset)| u[axis] - offset)
                    .min()
                    .expect("d >= 2");
                pos(m)
            })
            .sum()
    }
}

/// An evaluatable algebraic description of a d-variate function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CopulaTerm {
    /// `M_d(u) = min u_i`.
    FrechetUpper {
        dim: usize,
    },
    /// `W_d(u) = max(Σ u_i - d + 1, 0)`; not a copula once `d > 2`.
    FrechetLower {
        dim: usize,
    },
    /// `Π_d(u) = Π u_i`.
    Independence {
        dim: usize,
    },
    CStar(CStarForm),
    Shuffle(ValidatedShuffle),
    /// Evaluates `inner` at `apply(perm, u)`.
    Permuted {
        inner: Box<CopulaTerm>,
        perm: Perm,
    },
    /// Evaluates `inner` with every axis not in `kept` pinned to 1; `kept`
    /// holds 0-based axes in caller order.
    Margin {
        inner: Box<CopulaTerm>,
        kept: Vec<usize>,
    },
}

impl CopulaTerm {
    pub fn upper(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self::FrechetUpper { dim: d })
    }

    pub fn lower(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self::FrechetLower { dim: d })
    }

    pub fn independence(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self::Independence { dim: d })
    }

    pub fn c_star(d: usize) -> Result<Self> {
        Ok(Self::CStar(CStarForm::new(d)?))
    }

    pub fn shuffle(s: ValidatedShuffle) -> Self {
        Self::Shuffle(s)
    }

    pub fn permuted(inner: CopulaTerm, perm: Perm) -> Result<Self> {
        if inner.dim() != perm.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                actual: perm.dim(),
            });
        }
        Ok(Self::Permuted {
            inner: Box::new(inner),
            perm,
        })
    }

    /// Margin on the 1-based `kept_axes`, in the given order.
    pub fn margin(inner: CopulaTerm, kept_axes: &[usize]) -> Result<Self> {
        let d = inner.dim();
        if kept_axes.len() < 2 {
            return Err(Error::InvalidMargin(format!(
                "need at least 2 kept axes, got {}",
                kept_axes.len()
            )));
        }
        let mut seen = vec![false; d];
        for &a in kept_axes {
            if a == 0 || a > d {
                return Err(Error::InvalidMargin(format!("axis {a} outside 1..={d}")));
            }
            if std::mem::replace(&mut seen[a - 1], true) {
                return Err(Error::InvalidMargin(format!("axis {a} kept twice")));
            }
        }
        Ok(Self::Margin {
            inner: Box::new(inner),
            kept: kept_axes.iter().map(|a| a - 1).collect(),
        })
    }

    pub fn label(&self) -> String {
        match self {
            Self::FrechetUpper { dim } => format!("M_{dim}"),
            Self::FrechetLower { dim } => format!("W_{dim}"),
            Self::Independence { dim } => format!("Pi_{dim}"),
            Self::CStar(f) => format!("C*_{}", f.dim),
            Self::Shuffle(s) => format!("shuffle_{}[{} cells]", s.dim(), s.cells().len()),
            Self::Permuted { inner, perm } => format!("{}∘[{perm}]", inner.label()),
            Self::Margin { inner, kept } => {
                let axes: Vec<String> = kept.iter().map(|k| (k + 1).to_string()).collect();
                format!("{}|{{{}}}", inner.label(), axes.join(","))
            }
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::DimensionTooSmall(d))
    } else {
        Ok(())
    }
}

impl Copula for CopulaTerm {
    fn dim(&self) -> usize {
        match self {
            Self::FrechetUpper { dim }
            | Self::FrechetLower { dim }
            | Self::Independence { dim } => *dim,
            Self::CStar(f) => f.dim,
            Self::Shuffle(s) => s.dim(),
            Self::Permuted { inner, .. } => inner.dim(),
            Self::Margin { kept, .. } => kept.len(),
        }
    }

    fn eval(&self, u: &[Rational]) -> Rational {
        match self {
            Self::FrechetUpper { .. } => *u.iter().min().expect("d >= 2"),
            Self::FrechetLower { dim } => {
                let s: Rational = u.iter().copied().sum();
                pos(s - int(*dim as i128 - 1))
            }
            Self::Independence { .. } => u.iter().product(),
            Self::CStar(f) => f.eval(u),
            Self::Shuffle(s) => s.eval(u),
            Self::Permuted { inner, perm } => inner.eval(&perm.apply_slice(u)),
            Self::Margin { inner, kept } => {
                let mut full = vec![Rational::one(); inner.dim()];
                for (&axis, &x) in kept.iter().zip(u) {
                    full[axis] = x;
                }
                inner.eval(&full)
            }
        }
    }

    fn is_declared_copula(&self) -> bool {
        match self {
            Self::FrechetLower { dim } => *dim <= 2,
            Self::Permuted { inner, .. } => inner.is_declared_copula(),
            // pinning axes of W_d to 1 leaves W_m
            Self::Margin { inner, kept } => match **inner {
                Self::FrechetLower { .. } => kept.len() <= 2,
                _ => inner.is_declared_copula(),
            },
            _ => true,
        }
    }

    fn breakpoint_denominators(&self) -> Vec<i128> {
        match self {
            Self::CStar(f) => vec![f.dim as i128 + 1],
            Self::Shuffle(s) => s.breakpoint_denominators(),
            Self::Permuted { inner, .. } | Self::Margin { inner, .. } => {
                inner.breakpoint_denominators()
            }
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for CopulaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Evaluates `c` at `u`, checking the dimension.
pub fn evaluate<C: Copula + ?Sized>(c: &C, u: &UnitPoint) -> Result<Rational> {
    c.evaluate(u)
}

pub fn c_star_closed_form(d: usize) -> Result<CopulaTerm> {
    CopulaTerm::c_star(d)
}

pub fn margin(c: CopulaTerm, kept_axes: &[usize]) -> Result<CopulaTerm> {
    CopulaTerm::margin(c, kept_axes)
}

/// C-volume of `b`: inclusion–exclusion over the `2^d` corners with sign
/// `(-1)^(number of lower endpoints)`.
pub fn box_volume<C: Copula + ?Sized>(c: &C, b: &HyperBox) -> Result<Rational> {
    let d = c.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: b.dim(),
        });
    }
    Ok(box_volume_unchecked(c, b.sides()))
}

pub(crate) fn box_volume_unchecked<C: Copula + ?Sized>(
    c: &C,
    sides: &[(Rational, Rational)],
) -> Rational {
    let d = sides.len();
    let mut corner = vec![Rational::zero(); d];
    let mut total = Rational::zero();
    for mask in 0u32..(1u32 << d) {
        for (k, (a, b)) in sides.iter().enumerate() {
            corner[k] = if mask & (1 << k) != 0 { *b } else { *a };
        }
        let lower = d as u32 - mask.count_ones();
        let v = c.eval(&corner);
        if lower.is_multiple_of(2) {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}
