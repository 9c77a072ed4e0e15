//! Exact, sample-based checks of the copula axioms: groundedness, uniform
//! margins, d-increasingness and 1-Lipschitz continuity in the sum metric,
//! plus the margin audit for pairs of lower-dimensional margins.
//!
//! Samples are drawn sequentially from a seeded generator, evaluated in
//! parallel, and the failure with the smallest sample index is reported.

use std::fmt;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::bounds::theorem_bound;
use crate::copula::{box_volume_unchecked, Copula};
use crate::error::{Error, Result};
use crate::point::{HyperBox, UnitPoint};
use crate::rational::{format_exact, ratio, Rational};
use crate::sample::Sampler;

/// Largest dimension for which the lattice pass over box corners runs.
pub const LATTICE_MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A point with a zero coordinate where the value is not 0.
    Grounded {
        point: UnitPoint,
        value: Rational,
    },
    /// `C(1, ..., t, ..., 1) != t` on a 1-based axis.
    Margin {
        axis: usize,
        t: Rational,
        value: Rational,
    },
    Box {
        region: HyperBox,
        volume: Rational,
    },
    Lipschitz {
        u: UnitPoint,
        v: UnitPoint,
        difference: Rational,
        distance: Rational,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Grounded { point, value } => write!(f, "C{point} = {}", format_exact(value)),
            Witness::Margin { axis, t, value } => write!(
                f,
                "axis {axis}, t = {}: margin value {}",
                format_exact(t),
                format_exact(value)
            ),
            Witness::Box { region, volume } => {
                write!(f, "box {region} has volume {}", format_exact(volume))
            }
            Witness::Lipschitz {
                u,
                v,
                difference,
                distance,
            } => write!(
                f,
                "|C{u} - C{v}| = {} > {}",
                format_exact(difference),
                format_exact(distance)
            ),
        }
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

impl fmt::Display for AxiomCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "pass ({} checked)", self.checked),
            Some(w) => write!(f, "fail: {w}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomConfig {
    pub samples: usize,
    pub boxes: usize,
    pub pairs: usize,
    pub seed: u64,
    /// Run the `(d+1)`-adic lattice pass when `d <= LATTICE_MAX_DIM`.
    pub lattice: bool,
}

impl AxiomConfig {
    pub fn new(samples: usize, boxes: usize, seed: u64) -> Self {
        Self {
            samples,
            boxes,
            pairs: samples,
            seed,
            lattice: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub grounded: AxiomCheck,
    pub uniform_margins: AxiomCheck,
    pub d_increasing: AxiomCheck,
    pub lipschitz: AxiomCheck,
    pub boxes_checked: usize,
    pub points_checked: usize,
    pub seed: u64,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, c)| c.passed())
    }

    pub fn checks(&self) -> [(&'static str, &AxiomCheck); 4] {
        [
            ("grounded", &self.grounded),
            ("uniform_margins", &self.uniform_margins),
            ("d_increasing", &self.d_increasing),
            ("lipschitz", &self.lipschitz),
        ]
    }
}

/// Runs all four checks; each uses its own stream derived from `seed`.
pub fn check_axioms<C: Copula + ?Sized>(c: &C, cfg: &AxiomConfig) -> AxiomReport {
    let grounded = check_grounded(c, cfg.samples, cfg.seed);
    let uniform_margins = check_uniform_margins(c, cfg.samples, cfg.seed.wrapping_add(1));
    let d_increasing = if cfg.lattice {
        check_d_increasing(c, cfg.boxes, cfg.seed.wrapping_add(2))
    } else {
        check_random_boxes(c, cfg.boxes, cfg.seed.wrapping_add(2))
    };
    let lipschitz = check_lipschitz(c, cfg.pairs, cfg.seed.wrapping_add(3));
    AxiomReport {
        boxes_checked: d_increasing.checked,
        points_checked: grounded.checked + uniform_margins.checked + 2 * lipschitz.checked,
        grounded,
        uniform_margins,
        d_increasing,
        lipschitz,
        seed: cfg.seed,
    }
}

fn sampler_for<C: Copula + ?Sized>(c: &C, seed: u64) -> Sampler {
    Sampler::new(seed, c.dim(), &c.breakpoint_denominators())
}

fn first_failure<T: Sync, F>(items: &[T], f: F) -> Option<Witness>
where
    F: Fn(&T) -> Option<Witness> + Sync + Send,
{
    items
        .par_iter()
        .map(f)
        .find_first(Option::is_some)
        .flatten()
}

/// Random points with at least one zero coordinate must evaluate to 0.
pub fn check_grounded<C: Copula + ?Sized>(c: &C, samples: usize, seed: u64) -> AxiomCheck {
    let d = c.dim();
    let mut s = sampler_for(c, seed);
    let points: Vec<Vec<Rational>> = (0..samples)
        .map(|_| {
            let mut u = s.point(d);
            let axis = s.index(d);
            u[axis] = Rational::zero();
            if s.coin() {
                let other = s.index(d);
                u[other] = Rational::zero();
            }
            u
        })
        .collect();
    let witness = first_failure(&points, |u| {
        let value = c.eval(u);
        (!value.is_zero()).then(|| Witness::Grounded {
            point: UnitPoint::from_trusted(u.clone()),
            value,
        })
    });
    AxiomCheck {
        checked: samples,
        witness,
    }
}

/// `C(1, ..., 1, t, 1, ..., 1) = t` for random axes and `t`.
pub fn check_uniform_margins<C: Copula + ?Sized>(c: &C, samples: usize, seed: u64) -> AxiomCheck {
    let d = c.dim();
    let mut s = sampler_for(c, seed);
    let cases: Vec<(usize, Rational)> = (0..samples).map(|_| (s.index(d), s.coord())).collect();
    let witness = first_failure(&cases, |&(axis, t)| {
        let mut u = vec![Rational::one(); d];
        u[axis] = t;
        let value = c.eval(&u);
        (value != t).then_some(Witness::Margin {
            axis: axis + 1,
            t,
            value,
        })
    });
    AxiomCheck {
        checked: samples,
        witness,
    }
}

/// Lattice pass (for `d <= LATTICE_MAX_DIM`) followed by `boxes` random boxes.
///
/// A lattice failure reports the box of smallest volume, first in
/// enumeration order on ties.
pub fn check_d_increasing<C: Copula + ?Sized>(c: &C, boxes: usize, seed: u64) -> AxiomCheck {
    let lattice = if c.dim() <= LATTICE_MAX_DIM {
        check_lattice_boxes(c)
    } else {
        AxiomCheck {
            checked: 0,
            witness: None,
        }
    };
    if !lattice.passed() {
        return lattice;
    }
    let random = check_random_boxes(c, boxes, seed);
    AxiomCheck {
        checked: lattice.checked + random.checked,
        witness: random.witness,
    }
}

pub fn check_random_boxes<C: Copula + ?Sized>(c: &C, boxes: usize, seed: u64) -> AxiomCheck {
    let d = c.dim();
    let mut s = sampler_for(c, seed);
    let regions: Vec<Vec<(Rational, Rational)>> = (0..boxes)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let (x, y) = (s.coord(), s.coord());
                    (x.min(y), x.max(y))
                })
                .collect()
        })
        .collect();
    let witness = first_failure(&regions, |sides| {
        let volume = box_volume_unchecked(c, sides);
        volume.is_negative().then(|| Witness::Box {
            region: HyperBox::new(sides.clone()).expect("sorted sides"),
            volume,
        })
    });
    AxiomCheck {
        checked: boxes,
        witness,
    }
}

/// All boxes with corners in `{0, 1/(d+1), ..., 1}` and positive side lengths.
///
/// `C` is evaluated once per lattice point; box volumes combine cached values.
pub fn check_lattice_boxes<C: Copula + ?Sized>(c: &C) -> AxiomCheck {
    let d = c.dim();
    let m = d as i128 + 1;
    let side = m as usize + 1;
    let values: Vec<Rational> = (0..d)
        .map(|_| 0..side)
        .multi_cartesian_product()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|idx| c.eval(&idx.iter().map(|&i| ratio(i as i128, m)).collect::<Vec<_>>()))
        .collect();
    let sides: Vec<(usize, usize)> = (0..side).tuple_combinations().collect();
    let regions: Vec<Vec<(usize, usize)>> = (0..d)
        .map(|_| sides.iter().copied())
        .multi_cartesian_product()
        .collect();
    let volume = |r: &[(usize, usize)]| -> Rational {
        let mut total = Rational::zero();
        for mask in 0u32..(1u32 << d) {
            let idx = r.iter().enumerate().fold(0usize, |acc, (k, &(a, b))| {
                acc * side + if mask & (1 << k) != 0 { b } else { a }
            });
            if (d as u32 - mask.count_ones()).is_multiple_of(2) {
                total += values[idx];
            } else {
                total -= values[idx];
            }
        }
        total
    };
    let worst = regions
        .par_iter()
        .enumerate()
        .map(|(i, r)| (volume(r), i))
        .min()
        .expect("at least one box");
    let witness = worst.0.is_negative().then(|| Witness::Box {
        region: HyperBox::new(
            regions[worst.1]
                .iter()
                .map(|&(a, b)| (ratio(a as i128, m), ratio(b as i128, m)))
                .collect(),
        )
        .expect("lattice sides"),
        volume: worst.0,
    });
    AxiomCheck {
        checked: regions.len(),
        witness,
    }
}

/// `|C(u) - C(v)| <= Σ |u_k - v_k|` on random pairs; half the pairs differ
/// in a single coordinate.
pub fn check_lipschitz<C: Copula + ?Sized>(c: &C, pairs: usize, seed: u64) -> AxiomCheck {
    let d = c.dim();
    let mut s = sampler_for(c, seed);
    let cases: Vec<(Vec<Rational>, Vec<Rational>)> = (0..pairs)
        .map(|_| {
            let u = s.point(d);
            let v = if s.coin() {
                s.point(d)
            } else {
                let mut v = u.clone();
                v[s.index(d)] = s.coord();
                v
            };
            (u, v)
        })
        .collect();
    let witness = first_failure(&cases, |(u, v)| {
        let difference = (c.eval(u) - c.eval(v)).abs();
        let distance: Rational = u.iter().zip(v).map(|(a, b)| (*a - *b).abs()).sum();
        (difference > distance).then(|| Witness::Lipschitz {
            u: UnitPoint::from_trusted(u.clone()),
            v: UnitPoint::from_trusted(v.clone()),
            difference,
            distance,
        })
    });
    AxiomCheck {
        checked: pairs,
        witness,
    }
}

/// Result of comparing every pair of `(d-k)`-dimensional margins on a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginAudit {
    pub dim: usize,
    pub k: usize,
    /// `(d-1)/(d+1)`, the bound every pair difference must respect.
    pub bound: Rational,
    /// `(d-k-1)/(d-k)`, the Fréchet gap bound in the margins' own dimension.
    pub margin_bound: Rational,
    pub max_difference: Rational,
    /// 1-based kept axes of the pair attaining `max_difference`, and the point.
    pub worst_pair: (Vec<usize>, Vec<usize>),
    pub worst_point: Vec<Rational>,
    pub pairs_checked: usize,
    pub points_checked: usize,
}

impl MarginAudit {
    pub fn passed(&self) -> bool {
        self.max_difference <= self.bound && self.bound < self.margin_bound
    }
}

/// Compares all pairs of `(d-k)`-margins (kept axes in increasing order) on
/// the grid `{0, h, ..., 1}^(d-k)`, `h = 1/m`.
pub fn audit_margins<C: Copula + ?Sized>(c: &C, k: usize, h: Rational) -> Result<MarginAudit> {
    let d = c.dim();
    if d <= 3 || k == 0 || 2 * k + 1 >= d {
        return Err(Error::InvalidParameter(format!(
            "margin audit needs d > 3 and 1 <= k < (d-1)/2, got d = {d}, k = {k}"
        )));
    }
    if h <= Rational::zero() || *h.numer() != 1 {
        return Err(Error::InvalidStep {
            step: format_exact(&h),
            reason: "step must be 1/m".into(),
        });
    }
    let m = *h.denom();
    let kept_dim = d - k;
    let grid: Vec<Vec<Rational>> = (0..kept_dim)
        .map(|_| (0..=m).map(|i| ratio(i, m)))
        .multi_cartesian_product()
        .collect();
    let kept_sets: Vec<Vec<usize>> = (0..d).combinations(kept_dim).collect();
    let values: Vec<Vec<Rational>> = kept_sets
        .iter()
        .map(|kept| {
            grid.par_iter()
                .map(|g| {
                    let mut full = vec![Rational::one(); d];
                    for (&axis, &x) in kept.iter().zip(g) {
                        full[axis] = x;
                    }
                    c.eval(&full)
                })
                .collect()
        })
        .collect();

    let mut best = (Rational::zero(), 0usize, 1usize, 0usize);
    for (a, b) in (0..kept_sets.len()).tuple_combinations() {
        for (i, (x, y)) in values[a].iter().zip(&values[b]).enumerate() {
            let diff = (*x - *y).abs();
            if diff > best.0 {
                best = (diff, a, b, i);
            }
        }
    }
    let one_based = |v: &Vec<usize>| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    let pairs = kept_sets.len() * (kept_sets.len() - 1) / 2;
    Ok(MarginAudit {
        dim: d,
        k,
        bound: theorem_bound(d),
        margin_bound: ratio(kept_dim as i128 - 1, kept_dim as i128),
        max_difference: best.0,
        worst_pair: (one_based(&kept_sets[best.1]), one_based(&kept_sets[best.2])),
        worst_point: grid[best.3].clone(),
        pairs_checked: pairs,
        points_checked: pairs * grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::CopulaTerm;
    use crate::rational::int;
    use crate::shuffle::{build_manifold_structure, BaseCopula, DeltaVector};

    struct ConstantOne(usize);
    impl Copula for ConstantOne {
        fn dim(&self) -> usize {
            self.0
        }
        fn eval(&self, _: &[Rational]) -> Rational {
            int(1)
        }
    }

    struct DoubledProduct;
    impl Copula for DoubledProduct {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, u: &[Rational]) -> Rational {
            int(2) * u[0] * u[1]
        }
    }

    fn manifold4() -> CopulaTerm {
        let delta = DeltaVector::new(4, vec![ratio(1, 20), ratio(3, 20)]).unwrap();
        CopulaTerm::shuffle(build_manifold_structure(&delta, BaseCopula::Min).unwrap())
    }

    #[test]
    fn grounded_examples() {
        assert!(check_grounded(&CopulaTerm::upper(3).unwrap(), 1000, 1).passed());
        assert!(check_grounded(&CopulaTerm::c_star(4).unwrap(), 1000, 1).passed());
        let r = check_grounded(&ConstantOne(3), 1000, 1);
        assert!(matches!(r.witness, Some(Witness::Grounded { .. })));
    }

    #[test]
    fn margin_examples() {
        assert!(check_uniform_margins(&CopulaTerm::independence(4).unwrap(), 1000, 2).passed());
        assert!(check_uniform_margins(&manifold4(), 1000, 2).passed());
        assert!(check_uniform_margins(&CopulaTerm::lower(3).unwrap(), 1000, 2).passed());
        assert!(!check_uniform_margins(&ConstantOne(2), 10, 2).passed());
    }

    #[test]
    fn d_increasing_examples() {
        assert!(check_d_increasing(&CopulaTerm::upper(4).unwrap(), 2000, 3).passed());
        assert!(check_d_increasing(&CopulaTerm::c_star(3).unwrap(), 2000, 3).passed());
        assert!(check_d_increasing(&CopulaTerm::lower(2).unwrap(), 2000, 3).passed());
        let r = check_d_increasing(&CopulaTerm::lower(3).unwrap(), 2000, 3);
        let half = ratio(1, 2);
        assert_eq!(
            r.witness,
            Some(Witness::Box {
                region: HyperBox::cube(3, half, int(1)).unwrap(),
                volume: -half
            })
        );
        // the random pass alone also finds a violation
        assert!(!check_random_boxes(&CopulaTerm::lower(3).unwrap(), 2000, 3).passed());
    }

    #[test]
    fn lattice_pass_covers_every_box() {
        let c = manifold4();
        let m = 5;
        let r = check_lattice_boxes(&c);
        assert!(r.passed());
        assert_eq!(r.checked, 15usize.pow(4));
        let b = HyperBox::new(vec![
            (ratio(1, m), ratio(3, m)),
            (int(0), int(1)),
            (ratio(2, m), ratio(4, m)),
            (ratio(3, m), int(1)),
        ])
        .unwrap();
        assert!(crate::copula::box_volume(&c, &b).unwrap() >= int(0));
    }

    #[test]
    fn lipschitz_examples() {
        assert!(check_lipschitz(&CopulaTerm::upper(5).unwrap(), 2000, 4).passed());
        assert!(check_lipschitz(&CopulaTerm::c_star(4).unwrap(), 2000, 4).passed());
        let r = check_lipschitz(&DoubledProduct, 2000, 4);
        match r.witness {
            Some(Witness::Lipschitz {
                difference,
                distance,
                ..
            }) => assert!(difference > distance),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = AxiomConfig::new(500, 500, 11);
        let w = CopulaTerm::lower(4).unwrap();
        assert_eq!(check_axioms(&w, &cfg), check_axioms(&w, &cfg));
        let r = check_axioms(&manifold4(), &cfg);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.points_checked, 2000);
    }

    #[test]
    fn margin_audit_examples() {
        let audit = audit_margins(&CopulaTerm::c_star(5).unwrap(), 1, ratio(1, 6)).unwrap();
        assert!(audit.passed());
        assert_eq!(audit.bound, ratio(2, 3));
        assert_eq!(audit.margin_bound, ratio(3, 4));
        assert_eq!(audit.pairs_checked, 10);

        let audit = audit_margins(&CopulaTerm::c_star(4).unwrap(), 1, ratio(1, 5)).unwrap();
        assert_eq!(audit.bound, ratio(3, 5));
        assert_eq!(audit.margin_bound, ratio(2, 3));
        assert!(audit.passed());

        let audit = audit_margins(&CopulaTerm::independence(5).unwrap(), 1, ratio(1, 4)).unwrap();
        assert_eq!(audit.max_difference, int(0));

        assert!(audit_margins(&CopulaTerm::c_star(3).unwrap(), 1, ratio(1, 4)).is_err());
        assert!(audit_margins(&CopulaTerm::c_star(5).unwrap(), 2, ratio(1, 4)).is_err());
        assert!(audit_margins(&CopulaTerm::c_star(5).unwrap(), 1, ratio(2, 7)).is_err());
    }
}
