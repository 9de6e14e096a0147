//! Concretely represented Hausdorff topological groups.
//!
//! Three families are supported: finite groups given by a multiplication
//! table (discrete topology), the additive rationals with the Euclidean
//! topology, and the additive rationals with a p-adic topology. All
//! arithmetic is exact.

mod config;
mod neighborhood;

use std::fmt;

use num_traits::Zero;

pub use config::{FiniteTable, STANDARD_CONFIG};
pub use neighborhood::{Neighborhood, Shape};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Position of a group in its configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    /// Index into the element list of a finite table.
    Table(usize),
    /// Canonical (lowest terms, positive denominator) rational.
    Rational(Rational),
}

impl Value {
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Value::Rational(q) => Some(q),
            Value::Table(_) => None,
        }
    }

    pub fn as_table(&self) -> Option<usize> {
        match self {
            Value::Table(i) => Some(*i),
            Value::Rational(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub group: GroupId,
    pub value: Value,
}

impl GroupElement {
    pub fn new(group: GroupId, value: Value) -> Self {
        GroupElement { group, value }
    }

    pub fn rational(group: GroupId, q: Rational) -> Self {
        GroupElement {
            group,
            value: Value::Rational(q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    FiniteTable(FiniteTable),
    RationalEuclidean,
    RationalPadic { p: u64 },
}

impl GroupKind {
    pub fn label(&self) -> &'static str {
        match self {
            GroupKind::FiniteTable(_) => "finite_table",
            GroupKind::RationalEuclidean => "rational_euclidean",
            GroupKind::RationalPadic { .. } => "rational_padic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub name: String,
    pub kind: GroupKind,
}

/// A validated, ordered configuration of groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Groups {
    groups: Vec<Group>,
    digest: String,
}

impl Groups {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = GroupId> + '_ {
        (0..self.groups.len()).map(GroupId)
    }

    pub fn group(&self, id: GroupId) -> &Group {
        &self.groups[id.0]
    }

    pub fn name(&self, id: GroupId) -> &str {
        &self.groups[id.0].name
    }

    pub fn kind(&self, id: GroupId) -> &GroupKind {
        &self.groups[id.0].kind
    }

    pub fn lookup(&self, name: &str) -> Result<GroupId> {
        self.groups
            .iter()
            .position(|g| g.name == name)
            .map(GroupId)
            .ok_or_else(|| Error::UnknownGroup(name.to_string()))
    }

    /// SHA-256 over the canonical form of the configuration.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn is_finite(&self, id: GroupId) -> bool {
        matches!(self.kind(id), GroupKind::FiniteTable(_))
    }

    pub fn identity(&self, id: GroupId) -> GroupElement {
        let value = match self.kind(id) {
            GroupKind::FiniteTable(t) => Value::Table(t.identity()),
            _ => Value::Rational(Rational::zero()),
        };
        GroupElement::new(id, value)
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        match (&g.value, self.kind(g.group)) {
            (Value::Table(i), GroupKind::FiniteTable(t)) => *i == t.identity(),
            (Value::Rational(q), _) => q.is_zero(),
            _ => false,
        }
    }

    pub(crate) fn same_group(&self, a: GroupId, b: GroupId) -> Result<()> {
        if a == b {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.name(a).to_string(),
                right: self.name(b).to_string(),
            })
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.same_group(a.group, b.group)?;
        let value = match (&a.value, &b.value, self.kind(a.group)) {
            (Value::Table(x), Value::Table(y), GroupKind::FiniteTable(t)) => {
                Value::Table(t.product(*x, *y))
            }
            (Value::Rational(x), Value::Rational(y), _) => Value::Rational(x + y),
            _ => return Err(Error::Invalid("element does not match its group kind".into())),
        };
        Ok(GroupElement::new(a.group, value))
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        let value = match (&a.value, self.kind(a.group)) {
            (Value::Table(x), GroupKind::FiniteTable(t)) => Value::Table(t.inverse(*x)),
            (Value::Rational(x), _) => Value::Rational(-x),
            _ => a.value.clone(),
        };
        GroupElement::new(a.group, value)
    }

    /// Ordered product of `xs` inside `group`; the empty product is the identity.
    pub fn product<'a, I>(&self, group: GroupId, xs: I) -> Result<GroupElement>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut acc = self.identity(group);
        for x in xs {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// Every element of a finite group, in table order.
    pub fn elements(&self, id: GroupId) -> Option<Vec<GroupElement>> {
        match self.kind(id) {
            GroupKind::FiniteTable(t) => Some(
                (0..t.order())
                    .map(|i| GroupElement::new(id, Value::Table(i)))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Parses the value part of a `group:value` token.
    pub fn parse_value(&self, id: GroupId, text: &str) -> Result<GroupElement> {
        let value = match self.kind(id) {
            GroupKind::FiniteTable(t) => t
                .index_of(text)
                .map(Value::Table)
                .ok_or_else(|| Error::Invalid(format!("{text:?} is not an element of {}", self.name(id))))?,
            _ => parse_rational(text)
                .map(Value::Rational)
                .ok_or_else(|| Error::Invalid(format!("{text:?} is not a rational literal")))?,
        };
        Ok(GroupElement::new(id, value))
    }

    /// `group:value` token.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let (group, value) = text
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("{text:?} is not of the form group:value")))?;
        let id = self.lookup(group)?;
        self.parse_value(id, value)
    }

    pub fn format_value(&self, g: &GroupElement) -> String {
        match (&g.value, self.kind(g.group)) {
            (Value::Table(i), GroupKind::FiniteTable(t)) => t.name(*i).to_string(),
            (Value::Rational(q), _) => format_rational(q),
            (Value::Table(i), _) => format!("#{i}"),
        }
    }

    pub fn format_element(&self, g: &GroupElement) -> String {
        format!("{}:{}", self.name(g.group), self.format_value(g))
    }

    pub fn display<'a>(&'a self, g: &'a GroupElement) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Groups, &'a GroupElement);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format_element(self.1))
            }
        }
        D(self, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn std_groups() -> Groups {
        Groups::standard()
    }

    #[test]
    fn rational_addition() {
        let g = std_groups();
        let q = g.lookup("q").unwrap();
        let a = GroupElement::rational(q, rat(1, 2));
        let b = GroupElement::rational(q, rat(1, 3));
        assert_eq!(g.mul(&a, &b).unwrap(), GroupElement::rational(q, rat(5, 6)));
        assert_eq!(
            g.inv(&GroupElement::rational(q, rat(2, 3))),
            GroupElement::rational(q, rat(-2, 3))
        );
        assert_eq!(g.inv(&g.identity(q)), g.identity(q));
    }

    #[test]
    fn order_two_and_three() {
        let g = std_groups();
        let s = g.parse_element("z2:s").unwrap();
        assert!(g.is_identity(&g.mul(&s, &s).unwrap()));
        let t = g.parse_element("z3:t").unwrap();
        assert_eq!(g.inv(&t), g.parse_element("z3:t2").unwrap());
    }

    #[test]
    fn mixing_groups_is_rejected() {
        let g = std_groups();
        let s = g.parse_element("z2:s").unwrap();
        let t = g.parse_element("z3:t").unwrap();
        assert!(matches!(g.mul(&s, &t), Err(Error::GroupMismatch { .. })));
    }

    #[test]
    fn element_literals() {
        let g = std_groups();
        assert!(g.parse_element("q:one").is_err());
        assert!(g.parse_element("nope:1").is_err());
        let x = g.parse_element("q:-6/4").unwrap();
        assert_eq!(g.format_element(&x), "q:-3/2");
    }
}
