//! Open-set descriptors inside a single group.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use super::{GroupElement, GroupId, GroupKind, Groups, Value};
use crate::error::{Error, Result};
use crate::rational::{prime_power, valuation, Rational, Valuation};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Any subset of a discrete group (table indices).
    FiniteSet(BTreeSet<usize>),
    /// `{y : |y - center| < radius}`.
    Interval { center: Rational, radius: Rational },
    /// `{y : v_p(y - center) >= level}`.
    PadicBall { center: Rational, level: i64 },
}

/// An open subset of one group. With `punctured` set, the identity is removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Neighborhood {
    pub group: GroupId,
    pub shape: Shape,
    pub punctured: bool,
}

impl Neighborhood {
    pub fn finite(group: GroupId, members: impl IntoIterator<Item = usize>) -> Self {
        Neighborhood {
            group,
            shape: Shape::FiniteSet(members.into_iter().collect()),
            punctured: false,
        }
    }

    pub fn interval(group: GroupId, center: Rational, radius: Rational) -> Self {
        Neighborhood {
            group,
            shape: Shape::Interval { center, radius },
            punctured: false,
        }
    }

    pub fn ball(group: GroupId, center: Rational, level: i64) -> Self {
        Neighborhood {
            group,
            shape: Shape::PadicBall { center, level },
            punctured: false,
        }
    }

    pub fn punctured(mut self) -> Self {
        self.punctured = true;
        self
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.shape, Shape::FiniteSet(_))
    }
}

impl Groups {
    fn padic_prime(&self, id: GroupId) -> Option<u64> {
        match self.kind(id) {
            GroupKind::RationalPadic { p } => Some(*p),
            _ => None,
        }
    }

    /// Checks that a descriptor is well formed for its group: the shape
    /// matches the group kind, radii are positive, finite sets are nonempty
    /// and name existing elements.
    pub fn validate_neighborhood(&self, n: &Neighborhood) -> Result<()> {
        if n.group.0 >= self.len() {
            return Err(Error::UnknownGroup(format!("#{}", n.group.0)));
        }
        let name = self.name(n.group);
        match (&n.shape, self.kind(n.group)) {
            (Shape::FiniteSet(set), GroupKind::FiniteTable(t)) => {
                if set.is_empty() {
                    return Err(Error::Malformed(format!("empty finite set in {name}")));
                }
                if set.iter().any(|&i| i >= t.order()) {
                    return Err(Error::Malformed(format!("unknown element in {name}")));
                }
            }
            (Shape::Interval { radius, .. }, GroupKind::RationalEuclidean) => {
                if !radius.is_positive() {
                    return Err(Error::Malformed(format!("non-positive radius in {name}")));
                }
            }
            (Shape::PadicBall { .. }, GroupKind::RationalPadic { .. }) => {}
            _ => return Err(Error::ShapeMismatch(name.to_string())),
        }
        Ok(())
    }

    pub fn contains(&self, n: &Neighborhood, g: &GroupElement) -> Result<bool> {
        self.same_group(n.group, g.group)?;
        if n.punctured && self.is_identity(g) {
            return Ok(false);
        }
        Ok(match (&n.shape, &g.value) {
            (Shape::FiniteSet(set), Value::Table(i)) => set.contains(i),
            (Shape::Interval { center, radius }, Value::Rational(y)) => (y - center).abs() < *radius,
            (Shape::PadicBall { center, level }, Value::Rational(y)) => {
                let p = self
                    .padic_prime(n.group)
                    .ok_or_else(|| Error::ShapeMismatch(self.name(n.group).to_string()))?;
                valuation(&(y - center), p).at_least(*level)
            }
            _ => return Err(Error::ShapeMismatch(self.name(n.group).to_string())),
        })
    }

    /// All points of a finite-set descriptor, honoring the puncture.
    pub fn finite_points(&self, n: &Neighborhood) -> Option<Vec<GroupElement>> {
        match &n.shape {
            Shape::FiniteSet(set) => Some(
                set.iter()
                    .map(|&i| GroupElement::new(n.group, Value::Table(i)))
                    .filter(|g| !(n.punctured && self.is_identity(g)))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// `k` members of `n`, deterministic in the state of `rng`.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        n: &Neighborhood,
        rng: &mut R,
        k: usize,
    ) -> Result<Vec<GroupElement>> {
        if k == 0 {
            return Err(Error::Invalid("sample count must be at least 1".into()));
        }
        let group = n.group;
        let out = match &n.shape {
            Shape::FiniteSet(_) => {
                let points = self.finite_points(n).unwrap_or_default();
                if points.is_empty() {
                    return Err(Error::EmptyNeighborhood(self.name(group).to_string()));
                }
                (0..k)
                    .map(|_| points[rng.random_range(0..points.len())].clone())
                    .collect()
            }
            Shape::Interval { center, radius } => (1..=k)
                .map(|j| {
                    let y = sample_interval(center, radius, j, k, rng);
                    let y = if n.punctured && y.is_zero() {
                        // 0 lies inside, so center + radius > 0 and the midpoint
                        // of (0, center + radius) is a nonzero member.
                        (center + radius) / Rational::from_integer(BigInt::from(2))
                    } else {
                        y
                    };
                    GroupElement::rational(group, y)
                })
                .collect(),
            Shape::PadicBall { center, level } => {
                let p = self
                    .padic_prime(group)
                    .ok_or_else(|| Error::ShapeMismatch(self.name(group).to_string()))?;
                (0..k)
                    .map(|_| {
                        let y = sample_ball(center, *level, p, n.punctured, rng);
                        GroupElement::rational(group, y)
                    })
                    .collect()
            }
        };
        Ok(out)
    }

    /// Intersection of two descriptors of the same shape. Membership in the
    /// result is the conjunction of memberships; punctures combine by OR.
    pub fn intersect(&self, a: &Neighborhood, b: &Neighborhood) -> Result<Neighborhood> {
        self.same_group(a.group, b.group)?;
        let group = a.group;
        let name = || self.name(group).to_string();
        let punctured = a.punctured || b.punctured;
        let shape = match (&a.shape, &b.shape) {
            (Shape::FiniteSet(x), Shape::FiniteSet(y)) => {
                let set: BTreeSet<usize> = x.intersection(y).copied().collect();
                let identity = self.identity(group).value.as_table();
                if set.iter().all(|&i| punctured && Some(i) == identity) {
                    return Err(Error::EmptyIntersection(name()));
                }
                Shape::FiniteSet(set)
            }
            (
                Shape::Interval {
                    center: c1,
                    radius: r1,
                },
                Shape::Interval {
                    center: c2,
                    radius: r2,
                },
            ) => {
                let lo = (c1 - r1).max(c2 - r2);
                let hi = (c1 + r1).min(c2 + r2);
                if lo >= hi {
                    return Err(Error::EmptyIntersection(name()));
                }
                let two = Rational::from_integer(BigInt::from(2));
                Shape::Interval {
                    center: (&lo + &hi) / &two,
                    radius: (hi - lo) / two,
                }
            }
            (
                Shape::PadicBall {
                    center: c1,
                    level: k1,
                },
                Shape::PadicBall {
                    center: c2,
                    level: k2,
                },
            ) => {
                let p = self.padic_prime(group).ok_or_else(|| Error::ShapeMismatch(name()))?;
                // Two balls of an ultrametric are nested or disjoint.
                if !valuation(&(c1 - c2), p).at_least(*k1.min(k2)) {
                    return Err(Error::EmptyIntersection(name()));
                }
                if k1 >= k2 {
                    a.shape.clone()
                } else {
                    b.shape.clone()
                }
            }
            _ => return Err(Error::ShapeMismatch(name())),
        };
        Ok(Neighborhood {
            group,
            shape,
            punctured,
        })
    }

    /// Neighborhoods `U_1..U_n` of `xs` (all in one group, product not the
    /// identity) such that no selection `u_m ∈ U_m` multiplies to the identity.
    ///
    /// * finite tables: singletons `{x_m}`;
    /// * Euclidean: intervals of radius `|s| / 2n` where `s = Σ x_m`, so every
    ///   selection sums into `(s - |s|/2, s + |s|/2)`;
    /// * p-adic: balls of level `v_p(s) + 1`, so every selection's sum has
    ///   valuation exactly `v_p(s)`.
    pub fn separate_identity_uniform(&self, xs: &[GroupElement]) -> Result<Vec<Neighborhood>> {
        let group = match xs.first() {
            Some(x) => x.group,
            None => return Err(Error::Invalid("no elements to separate".into())),
        };
        for x in xs {
            self.same_group(group, x.group)?;
        }
        let product = self.product(group, xs)?;
        if self.is_identity(&product) {
            return Err(Error::ProductIsIdentity(self.name(group).to_string()));
        }
        let out = match self.kind(group) {
            GroupKind::FiniteTable(_) => xs
                .iter()
                .map(|x| Neighborhood::finite(group, x.value.as_table()))
                .collect(),
            GroupKind::RationalEuclidean => {
                let s = product.value.as_rational().expect("rational group");
                let n = Rational::from_integer(BigInt::from(2 * xs.len()));
                let radius = s.abs() / n;
                xs.iter()
                    .map(|x| {
                        let c = x.value.as_rational().expect("rational group").clone();
                        Neighborhood::interval(group, c, radius.clone())
                    })
                    .collect()
            }
            GroupKind::RationalPadic { p } => {
                let s = product.value.as_rational().expect("rational group");
                let level = match valuation(s, *p) {
                    Valuation::Finite(v) => v + 1,
                    Valuation::Infinite => unreachable!("nonzero sum"),
                };
                xs.iter()
                    .map(|x| {
                        let c = x.value.as_rational().expect("rational group").clone();
                        Neighborhood::ball(group, c, level)
                    })
                    .collect()
            }
        };
        Ok(out)
    }
}

fn dyadic_unit<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    // m / 2^e with |m| < 2^e, so strictly inside (-1, 1).
    let e: u32 = rng.random_range(1..=20);
    let bound: i64 = (1 << e) - 1;
    let m = rng.random_range(-bound..=bound);
    Rational::new(BigInt::from(m), BigInt::from(1i64 << e))
}

fn sample_interval<R: Rng + ?Sized>(
    center: &Rational,
    radius: &Rational,
    j: usize,
    k: usize,
    rng: &mut R,
) -> Rational {
    if rng.random_bool(0.5) {
        // Evenly spread grid point center ± radius·(j/(k+1)) style.
        let offset = Rational::new(
            BigInt::from(2 * j as i64 - (k as i64 + 1)),
            BigInt::from(k as i64 + 1),
        );
        center + radius * offset
    } else {
        center + radius * dyadic_unit(rng)
    }
}

fn sample_ball<R: Rng + ?Sized>(
    center: &Rational,
    level: i64,
    p: u64,
    punctured: bool,
    rng: &mut R,
) -> Rational {
    let step = prime_power(p, level);
    for _ in 0..16 {
        let a: i64 = rng.random_range(-20..=20);
        let b: i64 = loop {
            let b = rng.random_range(1..=9i64);
            if b as u64 % p != 0 {
                break b;
            }
        };
        let depth = prime_power(p, rng.random_range(0..=3));
        let m = Rational::new(BigInt::from(a), BigInt::from(b)) * depth;
        let y = center + &step * m;
        if !(punctured && y.is_zero()) {
            return y;
        }
    }
    // center + step and center + 2·step cannot both vanish.
    let y = center + &step;
    if y.is_zero() {
        center + step * Rational::from_integer(BigInt::from(2))
    } else {
        y
    }
}
