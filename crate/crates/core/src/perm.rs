//! Permutations of `{1, ..., d}` acting on points by relabeling coordinates.
//!
//! The action is fixed as `apply(π, u)_k = u_{π(k)}`. Composition is defined
//! through that action: `apply(σ.compose(τ), u) == apply(τ, apply(σ, u))`,
//! which makes the images of `σ.compose(τ)` equal to `σ ∘ τ` as maps.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::point::UnitPoint;

/// A permutation of `{1, ..., d}` with `d >= 2`.
///
/// Internally 0-based; the public surface speaks 1-based images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    map: Vec<usize>,
}

/// The transposition exchanging axes `i < j` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transposition {
    i: usize,
    j: usize,
}

impl Transposition {
    /// Canonicalizes so the smaller index comes first.
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j || i == 0 || j == 0 {
            return Err(Error::InvalidPermutation(format!(
                "transposition needs two distinct 1-based axes, got ({i}, {j})"
            )));
        }
        Ok(Self {
            i: i.min(j),
            j: i.max(j),
        })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn to_perm(&self, d: usize) -> Result<Perm> {
        if self.j > d {
            return Err(Error::InvalidPermutation(format!(
                "transposition ({}, {}) does not fit dimension {d}",
                self.i, self.j
            )));
        }
        let mut map: Vec<usize> = (0..d).collect();
        map.swap(self.i - 1, self.j - 1);
        Perm::from_zero_based(map)
    }
}

impl fmt::Display for Transposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl Perm {
    /// Builds a permutation from its 1-based images `π(1), ..., π(d)`.
    pub fn new(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation("images are 1-based".into()));
        }
        Self::from_zero_based(images.iter().map(|m| m - 1).collect())
    }

    fn from_zero_based(map: Vec<usize>) -> Result<Self> {
        let d = map.len();
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        let mut seen = vec![false; d];
        for &m in &map {
            if m >= d || seen[m] {
                return Err(Error::InvalidPermutation(format!(
                    "images {:?} are not a bijection of 1..={d}",
                    map.iter().map(|m| m + 1).collect::<Vec<_>>()
                )));
            }
            seen[m] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::from_zero_based((0..d).collect())
    }

    /// The order-reversing permutation `π(k) = d - k + 1`.
    pub fn reverse(d: usize) -> Result<Self> {
        Self::from_zero_based((0..d).rev().collect())
    }

    /// Parses `id`, `reverse`, or comma-separated 1-based images such as `3,2,4,1`.
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        let p = match s.trim() {
            "id" | "identity" => Self::identity(d)?,
            "reverse" | "rev" => Self::reverse(d)?,
            other => {
                let images = other
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad permutation image `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::new(&images)?
            }
        };
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: p.dim(),
            });
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.map.iter().map(|m| m + 1).collect()
    }

    /// `π(k)` for 1-based `k`.
    pub fn image(&self, k: usize) -> usize {
        self.map[k - 1] + 1
    }

    pub(crate) fn zero_based(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &m)| k == m)
    }

    /// `v_k = u_{π(k)}`.
    pub fn apply(&self, u: &UnitPoint) -> Result<UnitPoint> {
        self.check_dim(u.dim())?;
        Ok(UnitPoint::from_trusted(self.apply_slice(u.coords())))
    }

    /// Relabels any slice of length `d` the same way points are relabeled.
    pub fn apply_slice<T: Copy>(&self, u: &[T]) -> Vec<T> {
        debug_assert_eq!(u.len(), self.dim());
        self.map.iter().map(|&m| u[m]).collect()
    }

    /// The permutation that acts as `self` followed by `then`.
    pub fn compose(&self, then: &Perm) -> Result<Perm> {
        self.check_dim(then.dim())?;
        Ok(Perm {
            map: then.map.iter().map(|&t| self.map[t]).collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.dim()];
        for (k, &m) in self.map.iter().enumerate() {
            inv[m] = k;
        }
        Perm { map: inv }
    }

    /// Transpositions whose successive point actions reproduce `apply(π, ·)`.
    ///
    /// Axes are settled from `d` down to `2`; at most `d - 1` transpositions
    /// are returned and identity steps are omitted.
    pub fn decompose(&self) -> Vec<Transposition> {
        let d = self.dim();
        // current[k] is the original axis whose value sits at position k
        let mut current: Vec<usize> = (0..d).collect();
        let mut out = Vec::new();
        for k in (1..d).rev() {
            let want = self.map[k];
            if current[k] == want {
                continue;
            }
            let m = current[..k]
                .iter()
                .position(|&c| c == want)
                .expect("positions above k are already settled");
            current.swap(m, k);
            out.push(Transposition { i: m + 1, j: k + 1 });
        }
        out
    }

    /// Sorted 1-based indices `i` with `π(i) != i`.
    pub fn nonfixed_indices(&self) -> Vec<usize> {
        self.map
            .iter()
            .enumerate()
            .filter(|(k, &m)| *k != m)
            .map(|(k, _)| k + 1)
            .collect()
    }

    /// `Some(t)` when `π` moves exactly two indices.
    pub fn as_transposition(&self) -> Option<Transposition> {
        match self.nonfixed_indices()[..] {
            [i, j] => Some(Transposition { i, j }),
            _ => None,
        }
    }

    /// All of `S_d` in lexicographic order of images.
    pub fn all(d: usize) -> impl Iterator<Item = Perm> {
        (0..d).permutations(d).map(|map| Perm { map })
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if other != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.images().iter().join(","))
    }
}

/// Replays transpositions through the point action, in order.
pub fn replay(transpositions: &[Transposition], d: usize) -> Result<Perm> {
    let mut acc = Perm::identity(d)?;
    for t in transpositions {
        acc = acc.compose(&t.to_perm(d)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio, Rational};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn letters(d: usize) -> Vec<Rational> {
        // distinct values so the action is visible
        (1..=d as i128).map(|k| ratio(k, d as i128 + 1)).collect()
    }

    fn pt(v: Vec<Rational>) -> UnitPoint {
        UnitPoint::new(v).unwrap()
    }

    #[test]
    fn apply_examples() {
        let u = pt(vec![ratio(1, 5), ratio(7, 10)]);
        assert_eq!(Perm::identity(2).unwrap().apply(&u).unwrap(), u);

        let u = pt(vec![ratio(3, 5), ratio(3, 5), ratio(4, 5), int(1)]);
        let v = Perm::reverse(4).unwrap().apply(&u).unwrap();
        assert_eq!(v.coords(), &[int(1), ratio(4, 5), ratio(3, 5), ratio(3, 5)]);

        let (a, b, c, e) = (ratio(1, 10), ratio(2, 10), ratio(3, 10), ratio(4, 10));
        let p = Perm::new(&[3, 2, 4, 1]).unwrap();
        assert_eq!(
            p.apply(&pt(vec![a, b, c, e])).unwrap().coords(),
            &[c, b, e, a]
        );
    }

    #[test]
    fn apply_rejects_mismatch() {
        let p = Perm::identity(3).unwrap();
        let u = pt(vec![int(0), int(1)]);
        assert!(matches!(
            p.apply(&u),
            Err(Error::DimensionMismatch {
                expected: 3,
                actual: 2
            })
        ));
        assert!(p.compose(&Perm::identity(2).unwrap()).is_err());
    }

    #[test]
    fn construction_errors() {
        assert!(Perm::new(&[1]).is_err());
        assert!(Perm::new(&[1, 1]).is_err());
        assert!(Perm::new(&[0, 1]).is_err());
        assert!(Perm::new(&[1, 3]).is_err());
        assert!(Transposition::new(2, 2).is_err());
        assert!(matches!(
            Perm::parse("2,1", 3),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Perm::parse("2,x", 2).is_err());
        assert_eq!(Perm::parse("reverse", 3).unwrap().images(), vec![3, 2, 1]);
        assert_eq!(Perm::parse("id", 3).unwrap().images(), vec![1, 2, 3]);
    }

    #[test]
    fn compose_and_inverse_examples() {
        let p = Perm::new(&[3, 2, 4, 1]).unwrap();
        let id = Perm::identity(4).unwrap();
        assert_eq!(id.compose(&p).unwrap(), p);
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
        assert!(id.inverse().is_identity());
        let t = Transposition::new(2, 4).unwrap().to_perm(4).unwrap();
        assert_eq!(t.inverse(), t);
        assert_eq!(p.inverse().images(), vec![4, 2, 1, 3]);
    }

    #[test]
    fn worked_transposition_chain() {
        // (3,4) then (1,4) then the identity step gives images (3,2,4,1)
        let t4 = Transposition::new(3, 4).unwrap().to_perm(4).unwrap();
        let t3 = Transposition::new(1, 4).unwrap().to_perm(4).unwrap();
        let t2 = Perm::identity(4).unwrap();
        let p = t4.compose(&t3).unwrap().compose(&t2).unwrap();
        assert_eq!(p.images(), vec![3, 2, 4, 1]);
        // its inverse is the 3-cycle 1 -> 4 -> 3 -> 1
        assert_eq!(p.inverse().images(), vec![4, 2, 1, 3]);
    }

    #[test]
    fn decompose_examples() {
        assert!(Perm::identity(5).unwrap().decompose().is_empty());
        let t = Transposition::new(2, 5).unwrap();
        assert_eq!(t.to_perm(6).unwrap().decompose(), vec![t]);

        for images in [[3, 2, 4, 1], [4, 2, 1, 3]] {
            let p = Perm::new(&images).unwrap();
            let ts = p.decompose();
            assert_eq!(ts.len(), 2, "{images:?}");
            assert_eq!(replay(&ts, 4).unwrap(), p);
            let u = pt(letters(4));
            let mut v = u.clone();
            for t in &ts {
                v = t.to_perm(4).unwrap().apply(&v).unwrap();
            }
            assert_eq!(v, p.apply(&u).unwrap());
        }
    }

    #[test]
    fn nonfixed_examples() {
        assert!(Perm::identity(4).unwrap().nonfixed_indices().is_empty());
        let t = Transposition::new(2, 5).unwrap().to_perm(6).unwrap();
        assert_eq!(t.nonfixed_indices(), vec![2, 5]);
        assert_eq!(
            t.as_transposition(),
            Some(Transposition::new(5, 2).unwrap())
        );
        // 1 -> 3 -> 4 -> 1 in d = 5
        let c = Perm::new(&[3, 2, 4, 1, 5]).unwrap();
        assert_eq!(c.nonfixed_indices(), vec![1, 3, 4]);
        assert_eq!(c.as_transposition(), None);
    }

    #[test]
    fn exhaustive_enumeration() {
        for (d, count) in [(2, 2), (3, 6), (4, 24), (5, 120), (6, 720)] {
            let all: Vec<Perm> = Perm::all(d).collect();
            assert_eq!(all.len(), count);
            assert_eq!(all.iter().collect::<HashSet<_>>().len(), count);
            assert!(all.windows(2).all(|w| w[0] < w[1]));
            for p in &all {
                assert_ne!(p.nonfixed_indices().len(), 1);
                let ts = p.decompose();
                assert!(ts.len() < d);
                assert_eq!(&replay(&ts, d).unwrap(), p);
            }
        }
    }

    fn perm_strategy() -> impl Strategy<Value = Perm> {
        (2usize..=8)
            .prop_flat_map(|d| Just((0..d).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|map| Perm { map })
    }

    fn point_for(d: usize) -> impl Strategy<Value = UnitPoint> {
        proptest::collection::vec(0i128..=60, d)
            .prop_map(|v| UnitPoint::new(v.into_iter().map(|n| ratio(n, 60)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn inverse_undoes_apply((p, u) in perm_strategy().prop_flat_map(|p| {
            let d = p.dim();
            (Just(p), point_for(d))
        })) {
            let v = p.apply(&u).unwrap();
            prop_assert_eq!(p.inverse().apply(&v).unwrap(), u);
        }

        #[test]
        fn decomposition_replays_action((p, pts) in perm_strategy().prop_flat_map(|p| {
            let d = p.dim();
            (Just(p), proptest::collection::vec(point_for(d), 100))
        })) {
            let ts = p.decompose();
            prop_assert!(ts.len() < p.dim());
            for u in &pts {
                let mut v = u.clone();
                for t in &ts {
                    v = t.to_perm(p.dim()).unwrap().apply(&v).unwrap();
                }
                prop_assert_eq!(v, p.apply(u).unwrap());
            }
        }

        #[test]
        fn compose_matches_sequential_action((s, t, u) in perm_strategy().prop_flat_map(|s| {
            let d = s.dim();
            (Just(s), Just((0..d).collect::<Vec<_>>()).prop_shuffle().prop_map(|map| Perm { map }), point_for(d))
        })) {
            let lhs = s.compose(&t).unwrap().apply(&u).unwrap();
            let rhs = t.apply(&s.apply(&u).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
