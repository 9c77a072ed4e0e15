//! Certified grid maximization of `|C(u) - C(u_π)|`, the normalized measure
//! `μ(C)`, and the set of sorted maximal points.
//!
//! The grid `{0, h, ..., 1}^d` uses `h = 1/m` with `(d+1) | m`. Since
//! `u ↦ C(u) - C(u_π)` is 2-Lipschitz in the sum metric and every point lies
//! within sum distance `d·h/2` of the grid, the true maximum is at most
//! `best + d·h`.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::theorem_bound;
use crate::copula::{u_star, Copula};
use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::point::UnitPoint;
use crate::rational::{format_exact, int, ratio, Rational};
use crate::shuffle::DeltaVector;

/// Grids above this many points are evaluated without caching `C`.
const CACHE_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub best_point: UnitPoint,
    pub best_perm: Perm,
    pub best_value: Rational,
    pub grid_step: Rational,
    pub certified_upper: Rational,
    pub gap: Rational,
    /// Number of evaluations of `C`.
    pub evaluations: u64,
}

impl SearchReport {
    /// Key/value lines in a fixed order.
    pub fn lines(&self) -> Vec<(&'static str, String)> {
        vec![
            ("best_point", self.best_point.to_string()),
            ("best_perm", self.best_perm.to_string()),
            ("best_value", format_exact(&self.best_value)),
            ("grid_step", format_exact(&self.grid_step)),
            ("certified_upper", format_exact(&self.certified_upper)),
            ("gap", format_exact(&self.gap)),
            ("evaluations", self.evaluations.to_string()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuReport {
    pub mu: Rational,
    pub search: SearchReport,
    pub permutations_checked: usize,
    /// False when only a sample of permutations was searched; `mu` is then a
    /// lower bound (up to grid slack).
    pub exhaustive: bool,
}

/// Checks `h = 1/m` with `(d+1) | m` and returns `m`.
pub fn grid_divisions(d: usize, h: &Rational) -> Result<i128> {
    let bad = |reason: String| Error::InvalidStep {
        step: format_exact(h),
        reason,
    };
    if !h.is_positive() || *h.numer() != 1 {
        return Err(bad("step must be 1/m for a positive integer m".into()));
    }
    let m = *h.denom();
    if m % (d as i128 + 1) != 0 {
        return Err(bad(format!(
            "m = {m} is not a multiple of d + 1 = {}",
            d + 1
        )));
    }
    Ok(m)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

/// The uniform grid with linear indices in lexicographic order (axis 1 most
/// significant).
struct Grid {
    d: usize,
    m: i128,
    side: usize,
    len: usize,
}

impl Grid {
    fn new(d: usize, m: i128) -> Result<Self> {
        let side = m as usize + 1;
        let len = (0..d)
            .try_fold(1usize, |acc, _| acc.checked_mul(side))
            .ok_or_else(|| Error::InvalidParameter("grid too large".into()))?;
        Ok(Self { d, m, side, len })
    }

    fn digits(&self, mut idx: usize, out: &mut [usize]) {
        for k in (0..self.d).rev() {
            out[k] = idx % self.side;
            idx /= self.side;
        }
    }

    fn point(&self, idx: usize) -> Vec<Rational> {
        let mut dg = vec![0; self.d];
        self.digits(idx, &mut dg);
        dg.iter().map(|&i| ratio(i as i128, self.m)).collect()
    }

    /// Index of `apply(π, u)` for the grid point `u` at `idx`.
    fn permuted(&self, idx: usize, map: &[usize], scratch: &mut [usize]) -> usize {
        self.digits(idx, scratch);
        map.iter()
            .fold(0, |acc, &src| acc * self.side + scratch[src])
    }
}

/// Values of `C` on the grid, or `None` when too large to cache.
fn cache_values<C: Copula + ?Sized>(c: &C, grid: &Grid) -> Option<Vec<Rational>> {
    (grid.len <= CACHE_LIMIT).then(|| {
        (0..grid.len)
            .into_par_iter()
            .map(|i| c.eval(&grid.point(i)))
            .collect()
    })
}

/// Best `(value, index)` with ties to the smallest index. When `paired` is
/// set, the inverse permutation's candidate is reduced in the same pass.
fn best_for(
    c: &(impl Copula + ?Sized),
    grid: &Grid,
    values: Option<&[Rational]>,
    perm: &Perm,
) -> ((Rational, usize), (Rational, usize)) {
    let map = perm.zero_based();
    let key = |(v, i): (Rational, usize)| (v, Reverse(i));
    let (own, inverse) = (0..grid.len)
        .into_par_iter()
        .fold(
            || {
                (
                    None::<(Rational, Reverse<usize>)>,
                    None::<(Rational, Reverse<usize>)>,
                    vec![0usize; grid.d],
                )
            },
            |(own, inv, mut scratch), idx| {
                let j = grid.permuted(idx, map, &mut scratch);
                let diff = match values {
                    Some(vals) => (vals[idx] - vals[j]).abs(),
                    None => (c.eval(&grid.point(idx)) - c.eval(&grid.point(j))).abs(),
                };
                // the inverse permutation reaches the same difference at point j
                let a = key((diff, idx));
                let b = key((diff, j));
                (
                    Some(own.map_or(a, |o| o.max(a))),
                    Some(inv.map_or(b, |o| o.max(b))),
                    scratch,
                )
            },
        )
        .map(|(a, b, _)| (a, b))
        .reduce(|| (None, None), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    let unwrap = |k: Option<(Rational, Reverse<usize>)>| {
        let (v, Reverse(i)) = k.expect("grid is nonempty");
        (v, i)
    };
    (unwrap(own), unwrap(inverse))
}

fn report(
    grid: &Grid,
    perm: Perm,
    (value, idx): (Rational, usize),
    h: Rational,
    evaluations: u64,
) -> SearchReport {
    let gap = h * int(grid.d as i128);
    SearchReport {
        best_point: UnitPoint::from_trusted(grid.point(idx)),
        best_perm: perm,
        best_value: value,
        grid_step: h,
        certified_upper: value + gap,
        gap,
        evaluations,
    }
}

/// Exhaustive grid search of `|C(u) - C(u_π)|` with step `h`.
pub fn max_difference<C: Copula + ?Sized>(
    c: &C,
    perm: &Perm,
    h: Rational,
    workers: usize,
) -> Result<SearchReport> {
    let d = c.dim();
    if perm.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: perm.dim(),
        });
    }
    let grid = Grid::new(d, grid_divisions(d, &h)?)?;
    pool(workers)?.install(|| {
        let values = cache_values(c, &grid);
        let evaluations = match values {
            Some(_) => grid.len as u64,
            None => 2 * grid.len as u64,
        };
        let (own, _) = best_for(c, &grid, values.as_deref(), perm);
        Ok(report(&grid, perm.clone(), own, h, evaluations))
    })
}

/// Every grid point and permutation attaining the overall maximal difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMaxima {
    pub value: Rational,
    /// In permutation order, then lexicographic point order.
    pub points: Vec<(UnitPoint, Perm)>,
}

/// Collects all maximizers of `|C(u) - C(u_π)|` over the grid and `perms`.
pub fn maximizers<C: Copula + ?Sized>(
    c: &C,
    perms: &[Perm],
    h: Rational,
    workers: usize,
) -> Result<GridMaxima> {
    let d = c.dim();
    if let Some(p) = perms.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: p.dim(),
        });
    }
    let grid = Grid::new(d, grid_divisions(d, &h)?)?;
    if grid.len > CACHE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "grid of {} points is too large",
            grid.len
        )));
    }
    pool(workers)?.install(|| {
        let values = cache_values(c, &grid).expect("size checked");
        let mut value = Rational::zero();
        let mut points = Vec::new();
        for p in perms {
            let map = p.zero_based();
            let diffs: Vec<Rational> = (0..grid.len)
                .into_par_iter()
                .map_init(
                    || vec![0usize; d],
                    |scratch, idx| (values[idx] - values[grid.permuted(idx, map, scratch)]).abs(),
                )
                .collect();
            let top = diffs.iter().max().copied().unwrap_or_else(Rational::zero);
            if top > value {
                value = top;
                points.clear();
            }
            if top == value {
                points.extend(
                    diffs
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v == value)
                        .map(|(i, _)| (UnitPoint::from_trusted(grid.point(i)), p.clone())),
                );
            }
        }
        Ok(GridMaxima { value, points })
    })
}

/// Number of permutations of `d` elements, if representable.
fn factorial(d: usize) -> Option<usize> {
    (1..=d).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// `μ(C) = (d+1)/(d-1) · max_π max_u |C(u) - C(u_π)|` over the grid.
///
/// All of `S_d` is searched when `d! <= perm_budget`, visiting one member of
/// each inverse pair. Otherwise the reversal and `perm_budget` random
/// permutations drawn from `seed` are searched and the result is flagged.
pub fn mu<C: Copula + ?Sized>(
    c: &C,
    h: Rational,
    perm_budget: usize,
    workers: usize,
    seed: u64,
) -> Result<MuReport> {
    let d = c.dim();
    let grid = Grid::new(d, grid_divisions(d, &h)?)?;
    let exhaustive = factorial(d).is_some_and(|n| n <= perm_budget);

    // (candidate permutation, its inverse if searched in the same pass)
    let mut jobs: Vec<(Perm, Option<Perm>)> = Vec::new();
    if exhaustive {
        for p in Perm::all(d) {
            let inv = p.inverse();
            match inv.cmp(&p) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => jobs.push((p, None)),
                std::cmp::Ordering::Greater => jobs.push((p, Some(inv))),
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = BTreeSet::new();
        let mut images: Vec<usize> = (1..=d).collect();
        seen.insert(Perm::reverse(d)?);
        for _ in 0..perm_budget {
            images.shuffle(&mut rng);
            seen.insert(Perm::new(&images)?);
        }
        jobs.extend(seen.into_iter().map(|p| (p, None)));
    }

    pool(workers)?.install(|| {
        let values = cache_values(c, &grid);
        let mut evaluations = if values.is_some() { grid.len as u64 } else { 0 };
        let mut checked = 0usize;
        // ordered by value, then smallest point, then smallest images
        let mut best: Option<(Rational, Reverse<usize>, Reverse<Perm>)> = None;
        let mut offer = |cand: (Rational, Reverse<usize>, Reverse<Perm>)| {
            if best.as_ref().is_none_or(|b| cand > *b) {
                best = Some(cand);
            }
        };
        for (p, inv) in &jobs {
            let (own, other) = best_for(c, &grid, values.as_deref(), p);
            if values.is_none() {
                evaluations += 2 * grid.len as u64;
            }
            checked += 1;
            offer((own.0, Reverse(own.1), Reverse(p.clone())));
            if let Some(q) = inv {
                checked += 1;
                offer((other.0, Reverse(other.1), Reverse(q.clone())));
            }
        }
        let (value, Reverse(idx), Reverse(perm)) = best.expect("at least one permutation");
        let search = report(&grid, perm, (value, idx), h, evaluations);
        let mu = if d >= 2 {
            search.best_value / theorem_bound(d)
        } else {
            Rational::zero()
        };
        Ok(MuReport {
            mu,
            search,
            permutations_checked: checked,
            exhaustive,
        })
    })
}

/// A sorted point of the maximal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifoldPoint {
    Even {
        delta: DeltaVector,
        point: UnitPoint,
    },
    Odd {
        point: UnitPoint,
    },
}

impl ManifoldPoint {
    pub fn point(&self) -> &UnitPoint {
        match self {
            Self::Even { point, .. } | Self::Odd { point } => point,
        }
    }

    pub fn delta(&self) -> Option<&DeltaVector> {
        match self {
            Self::Even { delta, .. } => Some(delta),
            Self::Odd { .. } => None,
        }
    }
}

/// Sorts `u` and tests membership: `u*` for odd `d`; for `d = 2n` the first
/// `n` coordinates equal `(d-1)/(d+1)` and the rest are `d/(d+1) + δ_j` with
/// `δ` valid.
pub fn is_in_manifold(u: &UnitPoint) -> Option<ManifoldPoint> {
    let d = u.dim();
    let sorted = u.sorted();
    if d % 2 == 1 {
        let star = u_star(d).ok()?;
        return (sorted == star).then_some(ManifoldPoint::Odd { point: star });
    }
    let n = d / 2;
    let big_d = d as i128 + 1;
    let c = sorted.coords();
    if c[..n].iter().any(|x| *x != ratio(d as i128 - 1, big_d)) {
        return None;
    }
    let delta: Vec<Rational> = c[n..]
        .iter()
        .map(|x| *x - ratio(d as i128, big_d))
        .collect();
    let delta = DeltaVector::new(d, delta).ok()?;
    Some(ManifoldPoint::Even {
        point: sorted,
        delta,
    })
}

/// Draws valid `δ` vectors: `n-1` free entries in `[0, 1/(d+1)]`, the last
/// solved from the sum constraint, rejected when out of range, then sorted.
/// Odd `d` and `d = 2` return their single point. Duplicates are skipped.
pub fn sample_manifold(d: usize, count: usize, seed: u64) -> Result<Vec<ManifoldPoint>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    if d % 2 == 1 {
        return Ok(vec![ManifoldPoint::Odd { point: u_star(d)? }]);
    }
    let n = d / 2;
    if n == 1 {
        let delta = DeltaVector::canonical(2)?;
        return Ok(vec![ManifoldPoint::Even {
            point: delta.point(),
            delta,
        }]);
    }
    let big_d = d as i128 + 1;
    let cap = ratio(1, big_d);
    let target = ratio(n as i128 - 1, big_d);
    // entries p / (q·(d+1)) with 0 <= p <= q
    let scales = [1i128, 2, 4, 5, 10, 20, 40, 100];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    let max_attempts = 10_000 * count.max(1);
    for _ in 0..max_attempts {
        if out.len() == count {
            break;
        }
        let q = *scales.choose(&mut rng).expect("nonempty");
        let mut values: Vec<Rational> = (0..n - 1)
            .map(|_| ratio(rng.gen_range(0..=q), q * big_d))
            .collect();
        let last = target - values.iter().copied().sum::<Rational>();
        if last.is_negative() || last > cap {
            continue;
        }
        values.push(last);
        values.sort();
        let delta = DeltaVector::new(d, values)?;
        if seen.insert(delta.clone()) {
            out.push(ManifoldPoint::Even {
                point: delta.point(),
                delta,
            });
        }
    }
    Ok(out)
}
