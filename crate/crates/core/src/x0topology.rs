//! The wedge space X: the union of the groups with their identities glued
//! to a single point. A subset of X is open when its trace on every group is
//! open. Only the two kinds of open set needed for separation are
//! represented: sets away from the identity inside one group, and sets
//! around the identity with one component per group.

use std::collections::BTreeMap;

use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::freeprod::Letter;
use crate::rational::Rational;
use crate::topogroups::{GroupId, GroupKind, Groups, Neighborhood};

/// A point of X. Letters of words are exactly points of X.
pub type XPoint = Letter;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum XNeighborhood {
    /// A punctured neighborhood inside a single group; never contains the identity.
    AwayFromIdentity(Neighborhood),
    /// One identity neighborhood per configured group, indexed by group.
    AroundIdentity(Vec<Neighborhood>),
}

/// Scales of the default identity neighborhoods used for the components
/// of around-identity sets that no construction constrains. Finite groups
/// always use the whole group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityScales {
    pub euclidean_radius: Rational,
    pub padic_level: i64,
}

impl Default for IdentityScales {
    fn default() -> Self {
        IdentityScales {
            euclidean_radius: Rational::one(),
            padic_level: 1,
        }
    }
}

impl XNeighborhood {
    pub fn is_away(&self) -> bool {
        matches!(self, XNeighborhood::AwayFromIdentity(_))
    }
}

impl Groups {
    pub fn default_identity_neighborhood(&self, id: GroupId, scales: &IdentityScales) -> Neighborhood {
        match self.kind(id) {
            GroupKind::FiniteTable(t) => Neighborhood::finite(id, 0..t.order()),
            GroupKind::RationalEuclidean => {
                Neighborhood::interval(id, Rational::default(), scales.euclidean_radius.clone())
            }
            GroupKind::RationalPadic { .. } => {
                Neighborhood::ball(id, Rational::default(), scales.padic_level)
            }
        }
    }

    pub fn default_around_identity(&self, scales: &IdentityScales) -> XNeighborhood {
        XNeighborhood::AroundIdentity(
            self.ids()
                .map(|id| self.default_identity_neighborhood(id, scales))
                .collect(),
        )
    }

    /// Structural openness check: every trace on a group is a representable open set.
    pub fn validate_x(&self, n: &XNeighborhood) -> Result<()> {
        match n {
            XNeighborhood::AwayFromIdentity(u) => {
                self.validate_neighborhood(u)?;
                if !u.punctured {
                    return Err(Error::Malformed(format!(
                        "away-from-identity set in {} is not punctured",
                        self.name(u.group)
                    )));
                }
            }
            XNeighborhood::AroundIdentity(components) => {
                if components.len() != self.len() {
                    return Err(Error::Malformed(format!(
                        "around-identity set has {} components for {} groups",
                        components.len(),
                        self.len()
                    )));
                }
                for (id, c) in self.ids().zip(components) {
                    if c.group != id {
                        return Err(Error::Malformed(format!(
                            "component {} belongs to the wrong group",
                            id.0
                        )));
                    }
                    self.validate_neighborhood(c)?;
                    if !self.contains(c, &self.identity(id))? {
                        return Err(Error::Malformed(format!(
                            "component for {} misses the identity",
                            self.name(id)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn x_contains(&self, n: &XNeighborhood, p: &XPoint) -> bool {
        match (n, p) {
            (XNeighborhood::AwayFromIdentity(_), Letter::Identity) => false,
            (XNeighborhood::AwayFromIdentity(u), Letter::Tagged(g)) => {
                u.group == g.group && self.contains(u, g).unwrap_or(false)
            }
            (XNeighborhood::AroundIdentity(_), Letter::Identity) => true,
            (XNeighborhood::AroundIdentity(cs), Letter::Tagged(g)) => cs
                .get(g.group.0)
                .is_some_and(|c| self.contains(c, g).unwrap_or(false)),
        }
    }

    pub fn x_intersect(&self, a: &XNeighborhood, b: &XNeighborhood) -> Result<XNeighborhood> {
        match (a, b) {
            (XNeighborhood::AwayFromIdentity(u), XNeighborhood::AwayFromIdentity(v)) => {
                Ok(XNeighborhood::AwayFromIdentity(self.intersect(u, v)?))
            }
            (XNeighborhood::AroundIdentity(us), XNeighborhood::AroundIdentity(vs)) => {
                if us.len() != vs.len() {
                    return Err(Error::VariantMismatch);
                }
                let cs = us
                    .iter()
                    .zip(vs)
                    .map(|(u, v)| self.intersect(u, v))
                    .collect::<Result<Vec<_>>>()?;
                Ok(XNeighborhood::AroundIdentity(cs))
            }
            _ => Err(Error::VariantMismatch),
        }
    }

    /// Validates an externally supplied description of `O ∩ X`, given per
    /// group as a list of open descriptors whose union is `O ∩ G_i`.
    pub fn check_condition_i(&self, per_group: &BTreeMap<String, Vec<Neighborhood>>) -> Result<bool> {
        for (name, descriptors) in per_group {
            let id = self.lookup(name)?;
            for n in descriptors {
                if n.group != id || self.validate_neighborhood(n).is_err() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The trace of `n` on `group`, or `None` when the trace is empty.
    pub fn trace<'a>(&self, n: &'a XNeighborhood, group: GroupId) -> Option<&'a Neighborhood> {
        match n {
            XNeighborhood::AwayFromIdentity(u) => (u.group == group).then_some(u),
            XNeighborhood::AroundIdentity(cs) => cs.get(group.0),
        }
    }

    pub fn is_finite_x(&self, n: &XNeighborhood) -> bool {
        match n {
            XNeighborhood::AwayFromIdentity(u) => u.is_finite(),
            XNeighborhood::AroundIdentity(cs) => cs.iter().all(Neighborhood::is_finite),
        }
    }

    /// All points of a finite descriptor, or `None` if some trace is infinite.
    pub fn finite_points_x(&self, n: &XNeighborhood) -> Option<Vec<XPoint>> {
        match n {
            XNeighborhood::AwayFromIdentity(u) => Some(
                self.finite_points(u)?
                    .into_iter()
                    .map(|g| Letter::new(self, g))
                    .collect(),
            ),
            XNeighborhood::AroundIdentity(cs) => {
                let mut out = vec![Letter::Identity];
                for c in cs {
                    for g in self.finite_points(c)? {
                        if !self.is_identity(&g) {
                            out.push(Letter::Tagged(g));
                        }
                    }
                }
                Some(out)
            }
        }
    }

    /// `k` points of `n`. Around-identity sets yield the identity with
    /// probability 1/4 and otherwise a point of a uniformly chosen component.
    pub fn sample_x<R: Rng + ?Sized>(&self, n: &XNeighborhood, rng: &mut R, k: usize) -> Result<Vec<XPoint>> {
        if k == 0 {
            return Err(Error::Invalid("sample count must be at least 1".into()));
        }
        match n {
            XNeighborhood::AwayFromIdentity(u) => Ok(self
                .sample(u, rng, k)?
                .into_iter()
                .map(|g| Letter::new(self, g))
                .collect()),
            XNeighborhood::AroundIdentity(cs) => {
                if cs.is_empty() {
                    return Ok(vec![Letter::Identity; k]);
                }
                let mut out = Vec::with_capacity(k);
                for _ in 0..k {
                    if rng.random_bool(0.25) {
                        out.push(Letter::Identity);
                    } else {
                        let c = &cs[rng.random_range(0..cs.len())];
                        let g = self.sample(c, rng, 1)?.pop().expect("one sample");
                        out.push(Letter::new(self, g));
                    }
                }
                Ok(out)
            }
        }
    }
}
