//! Pointwise upper bounds on `|C(u) - C(u_π)|` valid for every d-copula `C`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::perm::{Perm, Transposition};
use crate::point::UnitPoint;
use crate::rational::{pos, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    /// `|u_i - u_j|`, present only when the permutation swaps exactly two indices.
    pub transposition_bound: Option<Rational>,
    pub corollary_min_bound: Rational,
    /// Half-sum bound over sorted coordinates; when a permutation is given
    /// this is the smaller of the full and the non-fixed-index version.
    pub improved_half_bound: Rational,
    pub frechet_gap: Rational,
    pub theorem_bound: Rational,
    pub combined: Rational,
}

impl BoundReport {
    pub fn entries(&self) -> Vec<(&'static str, Rational)> {
        let mut out = Vec::with_capacity(6);
        if let Some(t) = self.transposition_bound {
            out.push(("transposition_bound", t));
        }
        out.extend([
            ("corollary_min_bound", self.corollary_min_bound),
            ("improved_half_bound", self.improved_half_bound),
            ("frechet_gap", self.frechet_gap),
            ("theorem_bound", self.theorem_bound),
            ("combined", self.combined),
        ]);
        out
    }
}

pub fn theorem_bound(d: usize) -> Rational {
    ratio(d as i128 - 1, d as i128 + 1)
}

pub fn transposition_bound(u: &UnitPoint, t: &Transposition) -> Result<Rational> {
    let d = u.dim();
    if t.j() > d {
        return Err(Error::DimensionMismatch {
            expected: t.j(),
            actual: d,
        });
    }
    let c = u.coords();
    Ok((c[t.i() - 1] - c[t.j() - 1]).abs())
}

/// `min{u_1, ..., u_d, Σ (u_i - u_(1)), (d-1) + u_(1) - Σ u_i}`.
pub fn corollary_min_bound(u: &UnitPoint) -> Rational {
    let d = u.dim() as i128;
    let lo = u.min_coord();
    let sum = u.sum();
    let spread = sum - lo * Rational::from_integer(d);
    let slack = Rational::from_integer(d - 1) + lo - sum;
    lo.min(spread).min(slack)
}

/// `Σ_{i = ceil(d/2)+1}^{d} (v_i - v_1)` for the ascending sort `v` of `u`,
/// capped at 1.
pub fn improved_half_bound(u: &UnitPoint) -> Rational {
    half_sum(u.sorted().coords()).min(Rational::one())
}

/// The half-sum restricted to the coordinates `π` moves.
pub fn improved_half_bound_for(u: &UnitPoint, perm: &Perm) -> Result<Rational> {
    if perm.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: perm.dim(),
            actual: u.dim(),
        });
    }
    let c = u.coords();
    let mut moved: Vec<Rational> = perm.nonfixed_indices().iter().map(|&i| c[i - 1]).collect();
    moved.sort();
    Ok(half_sum(&moved).min(improved_half_bound(u)))
}

fn half_sum(sorted: &[Rational]) -> Rational {
    let p = sorted.len();
    if p == 0 {
        return Rational::zero();
    }
    let first = sorted[0];
    sorted[p.div_ceil(2)..].iter().map(|v| *v - first).sum()
}

/// `M_d(u) - W_d(u)`.
pub fn frechet_gap(u: &UnitPoint) -> Rational {
    let d = u.dim() as i128;
    u.min_coord() - pos(u.sum() - Rational::from_integer(d - 1))
}

/// Every bound that holds for the given permutation, and their minimum.
pub fn pointwise_bound(u: &UnitPoint, perm: &Perm) -> Result<BoundReport> {
    if perm.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: perm.dim(),
            actual: u.dim(),
        });
    }
    let transposition_bound = perm
        .as_transposition()
        .map(|t| transposition_bound(u, &t))
        .transpose()?;
    let improved = improved_half_bound_for(u, perm)?;
    Ok(assemble(u, transposition_bound, improved))
}

/// Bounds that hold simultaneously for every permutation.
pub fn universal_bound(u: &UnitPoint) -> BoundReport {
    assemble(u, None, improved_half_bound(u))
}

fn assemble(
    u: &UnitPoint,
    transposition_bound: Option<Rational>,
    improved_half_bound: Rational,
) -> BoundReport {
    let corollary_min_bound = corollary_min_bound(u);
    let frechet_gap = frechet_gap(u);
    let theorem_bound = theorem_bound(u.dim());
    let mut combined = corollary_min_bound
        .min(improved_half_bound)
        .min(frechet_gap)
        .min(theorem_bound);
    if let Some(t) = transposition_bound {
        combined = combined.min(t);
    }
    BoundReport {
        transposition_bound,
        corollary_min_bound,
        improved_half_bound,
        frechet_gap,
        theorem_bound,
        combined,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::u_star;
    use crate::rational::{int, parse_lenient};

    fn pt(s: &str) -> UnitPoint {
        UnitPoint::parse(s).unwrap()
    }

    #[test]
    fn transposition_examples() {
        let t = Transposition::new(1, 2).unwrap();
        assert_eq!(
            transposition_bound(&pt("0.3,0.8"), &t).unwrap(),
            ratio(1, 2)
        );
        assert_eq!(transposition_bound(&pt("1/4,1/4"), &t).unwrap(), int(0));
        assert_eq!(
            transposition_bound(&pt("1/3,2/3"), &t).unwrap(),
            ratio(1, 3)
        );
        let far = Transposition::new(1, 3).unwrap();
        assert!(transposition_bound(&pt("1/3,2/3"), &far).is_err());
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(corollary_min_bound(&u_star(4).unwrap()), ratio(3, 5));
        assert_eq!(corollary_min_bound(&UnitPoint::zeros(4).unwrap()), int(0));
        assert_eq!(corollary_min_bound(&UnitPoint::ones(4).unwrap()), int(0));
    }

    #[test]
    fn improved_half_examples() {
        assert_eq!(improved_half_bound(&u_star(4).unwrap()), ratio(3, 5));
        assert_eq!(improved_half_bound(&pt("2/7,2/7,2/7")), int(0));
        assert_eq!(improved_half_bound(&u_star(3).unwrap()), ratio(1, 2));
        assert_eq!(improved_half_bound(&pt("1,0,1,1")), int(1));
    }

    #[test]
    fn refinement_uses_moved_coordinates() {
        // only axes 3 and 4 move: the bound collapses to |u_3 - u_4|
        let u = pt("1/10,9/10,1/2,3/5");
        let p = Perm::new(&[1, 2, 4, 3]).unwrap();
        assert_eq!(improved_half_bound_for(&u, &p).unwrap(), ratio(1, 10));
        assert_eq!(
            improved_half_bound_for(&u, &Perm::identity(4).unwrap()).unwrap(),
            int(0)
        );
    }

    #[test]
    fn frechet_examples() {
        assert_eq!(frechet_gap(&pt("2/3,2/3,2/3")), ratio(2, 3));
        assert_eq!(frechet_gap(&UnitPoint::ones(3).unwrap()), int(0));
        assert_eq!(
            frechet_gap(&pt("0.9,0.8,0.7")),
            parse_lenient("0.3").unwrap()
        );
    }

    #[test]
    fn pointwise_examples() {
        let r = pointwise_bound(&u_star(4).unwrap(), &Perm::reverse(4).unwrap()).unwrap();
        assert_eq!(r.combined, ratio(3, 5));
        assert_eq!(r.transposition_bound, None);

        let r = pointwise_bound(&pt("0.1,0.5,0.9"), &Perm::identity(3).unwrap()).unwrap();
        assert_eq!(r.transposition_bound, None);
        assert_eq!(r.combined, int(0));
        for p in Perm::all(3) {
            assert!(pointwise_bound(&pt("0.1,0.5,0.9"), &p).unwrap().combined <= ratio(1, 10));
        }

        let r = pointwise_bound(&pt("1/3,2/3"), &Perm::new(&[2, 1]).unwrap()).unwrap();
        assert_eq!(r.transposition_bound, Some(ratio(1, 3)));
        assert_eq!(r.combined, ratio(1, 3));
        assert!(pointwise_bound(&pt("1/3,2/3"), &Perm::reverse(3).unwrap()).is_err());
    }

    #[test]
    fn report_entries_stay_in_unit_interval() {
        for s in ["1,0,1,1", "0,0,0", "1,1", "1/2,1,1,1,1,1", "0,1,1,1,1,1"] {
            let u = pt(s);
            for p in Perm::all(u.dim()) {
                let r = pointwise_bound(&u, &p).unwrap();
                for (name, v) in r.entries() {
                    assert!(v >= int(0) && v <= int(1), "{name} = {v} at {u}");
                    assert!(r.combined <= v);
                }
            }
        }
    }
}
