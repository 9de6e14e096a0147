//! Exact decision of whether some selection from a system of sets reaches a
//! given value of the free product.
//!
//! A word reduces to 1 exactly when its positions split into non-crossing
//! blocks, each lying in one group (identity letters lie in every group)
//! with ordered product 1. Blocks are independent, so reachability of 1 is
//! an interval dynamic program over the positions combined with an exact
//! per-block test:
//!
//! * finite groups: the product set, computed element by element;
//! * Euclidean rationals: sums of open intervals are open intervals, and
//!   with two or more intervals the removed identity points do not matter;
//! * p-adic rationals: sums of balls are balls of the smallest level.
//!
//! Reaching a value `v` is reaching 1 after appending the letters of `v⁻¹`
//! as fixed points.

use std::collections::HashMap;

use num_traits::Zero;

use crate::freeprod::{FreeProduct, Letter, ReducedWord};
use crate::rational::{prime_power, valuation, Rational};
use crate::topogroups::{GroupElement, GroupId, GroupKind, Groups, Neighborhood, Shape};
use crate::x0topology::XNeighborhood;

#[derive(Clone, Copy)]
enum Slot<'a> {
    Set(&'a XNeighborhood),
    Point(&'a GroupElement),
}

/// Trace of one slot on the group of its block.
#[derive(Clone, Copy)]
enum Piece<'a> {
    Set(&'a Neighborhood),
    Point(&'a GroupElement),
}

#[derive(Clone, Debug)]
struct Block {
    positions: Vec<usize>,
    values: Vec<GroupElement>,
}

struct Solver<'a> {
    groups: &'a Groups,
    slots: Vec<Slot<'a>>,
    /// `table[i][j]`: a block decomposition cancelling positions `i..j`.
    table: Vec<Vec<Option<Option<Block>>>>,
    feasible: HashMap<(u64, GroupId), Option<Vec<GroupElement>>>,
}

/// A selection from `sets` whose product is `target`, if one exists.
pub(crate) fn reaching_selection(
    fp: &FreeProduct,
    sets: &[XNeighborhood],
    target: &ReducedWord,
) -> Option<Vec<Letter>> {
    let groups = fp.groups();
    let inverse = fp.word_inv(target);
    let mut slots: Vec<Slot> = sets.iter().map(Slot::Set).collect();
    slots.extend(inverse.letters().iter().map(Slot::Point));
    let n = slots.len();
    assert!(n < 64, "too many positions for the symbolic check");
    let mut solver = Solver {
        groups,
        slots,
        table: vec![vec![None; n + 1]; n + 1],
        feasible: HashMap::new(),
    };
    for i in 0..=n {
        solver.table[i][i] = Some(Some(Block {
            positions: Vec::new(),
            values: Vec::new(),
        }));
    }
    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len;
            let found = solver.first_block(i, j);
            solver.table[i][j] = Some(found);
        }
    }
    let mut values: Vec<Option<GroupElement>> = vec![None; n];
    if !solver.fill(0, n, &mut values) {
        return None;
    }
    Some(
        values
            .into_iter()
            .take(sets.len())
            .map(|v| Letter::new(groups, v.expect("every position is assigned")))
            .collect(),
    )
}

impl<'a> Solver<'a> {
    fn cancels(&self, i: usize, j: usize) -> bool {
        matches!(self.table[i][j], Some(Some(_)))
    }

    fn allowed(&self, pos: usize) -> Vec<GroupId> {
        match self.slots[pos] {
            Slot::Set(XNeighborhood::AwayFromIdentity(u)) => vec![u.group],
            Slot::Set(XNeighborhood::AroundIdentity(_)) => self.groups.ids().collect(),
            Slot::Point(g) => vec![g.group],
        }
    }

    fn piece(&self, pos: usize, group: GroupId) -> Option<Piece<'a>> {
        match self.slots[pos] {
            Slot::Set(w) => self.groups.trace(w, group).map(Piece::Set),
            Slot::Point(g) => (g.group == group).then_some(Piece::Point(g)),
        }
    }

    /// A block starting at `i`, inside `i..j`, with the rest of `i..j` cancelling.
    fn first_block(&mut self, i: usize, j: usize) -> Option<Block> {
        let mut stack = vec![i];
        let candidates = self.allowed(i);
        self.extend(&mut stack, &candidates, j)
    }

    fn extend(&mut self, stack: &mut Vec<usize>, candidates: &[GroupId], j: usize) -> Option<Block> {
        let last = *stack.last().expect("block is nonempty");
        if self.cancels(last + 1, j) {
            for &g in candidates {
                if let Some(values) = self.block_values(stack, g) {
                    return Some(Block {
                        positions: stack.clone(),
                        values,
                    });
                }
            }
        }
        for b in last + 1..j {
            if !self.cancels(last + 1, b) {
                continue;
            }
            let here = self.allowed(b);
            let next: Vec<GroupId> = candidates.iter().copied().filter(|g| here.contains(g)).collect();
            if next.is_empty() {
                continue;
            }
            stack.push(b);
            let found = self.extend(stack, &next, j);
            stack.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn block_values(&mut self, positions: &[usize], group: GroupId) -> Option<Vec<GroupElement>> {
        let mask = positions.iter().fold(0u64, |m, &p| m | 1 << p);
        if let Some(cached) = self.feasible.get(&(mask, group)) {
            return cached.clone();
        }
        let pieces: Option<Vec<Piece>> = positions.iter().map(|&p| self.piece(p, group)).collect();
        let result = pieces.and_then(|pieces| solve_block(self.groups, group, &pieces));
        self.feasible.insert((mask, group), result.clone());
        result
    }

    fn fill(&self, i: usize, j: usize, out: &mut [Option<GroupElement>]) -> bool {
        if i == j {
            return true;
        }
        let Some(Some(block)) = &self.table[i][j] else {
            return false;
        };
        for (&p, v) in block.positions.iter().zip(&block.values) {
            out[p] = Some(v.clone());
        }
        for pair in block.positions.windows(2) {
            if !self.fill(pair[0] + 1, pair[1], out) {
                return false;
            }
        }
        let last = *block.positions.last().expect("nonempty block");
        self.fill(last + 1, j, out)
    }
}

/// Members of each piece whose ordered product is the identity.
fn solve_block(groups: &Groups, group: GroupId, pieces: &[Piece]) -> Option<Vec<GroupElement>> {
    match groups.kind(group) {
        GroupKind::FiniteTable(_) => solve_finite(groups, group, pieces),
        GroupKind::RationalEuclidean => solve_additive(group, pieces, &euclidean_pick),
        GroupKind::RationalPadic { p } => {
            let p = *p;
            solve_additive(group, pieces, &move |parts, target| padic_pick(p, parts, target))
        }
    }
}

fn solve_finite(groups: &Groups, group: GroupId, pieces: &[Piece]) -> Option<Vec<GroupElement>> {
    // Reachable partial products, each with one selection realizing it.
    let mut reach: HashMap<GroupElement, Vec<GroupElement>> = HashMap::new();
    reach.insert(groups.identity(group), Vec::new());
    for piece in pieces {
        let members = match piece {
            Piece::Point(g) => vec![(*g).clone()],
            Piece::Set(n) => groups.finite_points(n)?,
        };
        let mut next = HashMap::new();
        for (value, choice) in &reach {
            for m in &members {
                let product = groups.mul(value, m).ok()?;
                next.entry(product).or_insert_with(|| {
                    let mut c = choice.clone();
                    c.push(m.clone());
                    c
                });
            }
        }
        reach = next;
    }
    reach.remove(&groups.identity(group))
}

/// An open piece of an additive block.
struct Part<'a> {
    shape: &'a Shape,
    punctured: bool,
}

type Picker<'f> = dyn Fn(&[Part], &Rational) -> Option<Vec<Rational>> + 'f;

fn solve_additive(group: GroupId, pieces: &[Piece], pick: &Picker) -> Option<Vec<GroupElement>> {
    let mut fixed = Rational::zero();
    let mut parts = Vec::new();
    for piece in pieces {
        match piece {
            Piece::Point(g) => fixed += g.value.as_rational()?,
            Piece::Set(n) => parts.push(Part {
                shape: &n.shape,
                punctured: n.punctured,
            }),
        }
    }
    let target = -fixed;
    let chosen = if parts.is_empty() {
        target.is_zero().then(Vec::new)?
    } else {
        pick(&parts, &target)?
    };
    let mut chosen = chosen.into_iter();
    Some(
        pieces
            .iter()
            .map(|piece| match piece {
                Piece::Point(g) => (*g).clone(),
                Piece::Set(_) => GroupElement::rational(group, chosen.next().expect("one value per part")),
            })
            .collect(),
    )
}

/// Three distinct points of a nonempty open interval.
fn three_points(lo: &Rational, hi: &Rational) -> [Rational; 3] {
    let four = Rational::from_integer(4.into());
    let step = (hi - lo) / four;
    [lo + &step * Rational::from_integer(2.into()), lo + &step, hi - step]
}

fn euclidean_pick(parts: &[Part], target: &Rational) -> Option<Vec<Rational>> {
    let bounds: Vec<(Rational, Rational)> = parts
        .iter()
        .map(|p| match p.shape {
            Shape::Interval { center, radius } => Some((center - radius, center + radius)),
            _ => None,
        })
        .collect::<Option<_>>()?;
    if parts.len() == 1 {
        let (lo, hi) = &bounds[0];
        let ok = lo < target && target < hi && !(parts[0].punctured && target.is_zero());
        return ok.then(|| vec![target.clone()]);
    }
    let total_lo: Rational = bounds.iter().map(|b| &b.0).sum();
    let total_hi: Rational = bounds.iter().map(|b| &b.1).sum();
    if !(total_lo < *target && *target < total_hi) {
        return None;
    }
    // Choose values left to right, keeping the remaining target inside the
    // sum of the remaining intervals; the last value is forced.
    let r = parts.len();
    let mut out = Vec::with_capacity(r);
    let mut remaining = target.clone();
    for m in 0..r - 1 {
        let rest_lo: Rational = bounds[m + 1..].iter().map(|b| &b.0).sum();
        let rest_hi: Rational = bounds[m + 1..].iter().map(|b| &b.1).sum();
        let lo = (&bounds[m].0).max(&(&remaining - &rest_hi)).clone();
        let hi = (&bounds[m].1).min(&(&remaining - &rest_lo)).clone();
        debug_assert!(lo < hi);
        let last_step = m + 2 == r;
        let y = three_points(&lo, &hi).into_iter().find(|y| {
            let own = !(parts[m].punctured && y.is_zero());
            let forced_last = !(last_step && parts[r - 1].punctured && (&remaining - y).is_zero());
            own && forced_last
        })?;
        remaining -= &y;
        out.push(y);
    }
    out.push(remaining);
    Some(out)
}

fn padic_pick(p: u64, parts: &[Part], target: &Rational) -> Option<Vec<Rational>> {
    let balls: Vec<(&Rational, i64)> = parts
        .iter()
        .map(|part| match part.shape {
            Shape::PadicBall { center, level } => Some((center, *level)),
            _ => None,
        })
        .collect::<Option<_>>()?;
    if parts.len() == 1 {
        let (c, k) = balls[0];
        let ok = valuation(&(target - c), p).at_least(k) && !(parts[0].punctured && target.is_zero());
        return ok.then(|| vec![target.clone()]);
    }
    let center_sum: Rational = balls.iter().map(|b| b.0).sum();
    let min_level = balls.iter().map(|b| b.1).min().expect("nonempty");
    if !valuation(&(target - &center_sum), p).at_least(min_level) {
        return None;
    }
    // The lowest-level ball absorbs the difference; the others sit at
    // center + p^level·u for a small u avoiding the removed identity.
    let star = balls.iter().position(|b| b.1 == min_level).expect("minimum exists");
    let others: Vec<usize> = (0..balls.len()).filter(|&m| m != star).collect();
    let mut out: Vec<Rational> = balls.iter().map(|b| b.0.clone()).collect();
    for (idx, &m) in others.iter().enumerate() {
        let is_last = idx + 1 == others.len();
        let (c, k) = balls[m];
        let step = prime_power(p, k);
        let y = (0..3i64)
            .map(|u| c + &step * Rational::from_integer(u.into()))
            .find(|y| {
                if parts[m].punctured && y.is_zero() {
                    return false;
                }
                if is_last && parts[star].punctured {
                    let partial: Rational = out
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != star && *i != m)
                        .map(|(_, v)| v)
                        .sum();
                    if (target - partial - y).is_zero() {
                        return false;
                    }
                }
                true
            })?;
        out[m] = y;
    }
    let others_sum: Rational = out
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != star)
        .map(|(_, v)| v)
        .sum();
    out[star] = target - others_sum;
    debug_assert!(out
        .iter()
        .zip(&balls)
        .all(|(y, (c, k))| valuation(&(y - *c), p).at_least(*k)));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::separator::Separator;

    #[test]
    fn certificates_do_not_reach_identity() {
        let s = Separator::standard();
        let fp = s.free_product();
        for text in [
            "q:3/2 z2:s q:-3/2",
            "q:1 q:1",
            "z3:t 1 z3:t",
            "q2:1 q2:1 z2:s 1 q:1/3",
            "s3:r s3:f 1 s3:r",
        ] {
            let w = fp.parse_word(text).unwrap();
            let c = s.separate_word_from_identity(&w).unwrap();
            assert!(
                reaching_selection(fp, &c.neighborhoods, &ReducedWord::empty()).is_none(),
                "{text}"
            );
        }
    }

    #[test]
    fn widened_interval_reaches_identity() {
        let s = Separator::standard();
        let fp = s.free_product();
        let g = s.groups();
        let q = g.lookup("q").unwrap();
        let ws = vec![
            XNeighborhood::AwayFromIdentity(Neighborhood::interval(q, int(1), int(2)).punctured()),
            XNeighborhood::AwayFromIdentity(Neighborhood::interval(q, int(1), int(2)).punctured()),
        ];
        let sel = reaching_selection(fp, &ws, &ReducedWord::empty()).unwrap();
        assert!(fp.normal_form(&sel).is_empty());
        // A single punctured interval around 0 cannot reach 0.
        let one = vec![XNeighborhood::AwayFromIdentity(
            Neighborhood::interval(q, rat(1, 2), int(1)).punctured(),
        )];
        assert!(reaching_selection(fp, &one, &ReducedWord::empty()).is_none());
    }

    #[test]
    fn lowered_ball_level_reaches_identity() {
        let s = Separator::standard();
        let fp = s.free_product();
        let q2 = s.groups().lookup("q2").unwrap();
        // Balls of level 1 around 1 and 1: 1 + (-1) = 0 with v2(-1 - 1) = 1.
        let ws = vec![
            XNeighborhood::AwayFromIdentity(Neighborhood::ball(q2, int(1), 1).punctured()),
            XNeighborhood::AwayFromIdentity(Neighborhood::ball(q2, int(1), 1).punctured()),
        ];
        let sel = reaching_selection(fp, &ws, &ReducedWord::empty()).unwrap();
        assert!(fp.normal_form(&sel).is_empty());
        let strict = vec![
            XNeighborhood::AwayFromIdentity(Neighborhood::ball(q2, int(1), 2).punctured()),
            XNeighborhood::AwayFromIdentity(Neighborhood::ball(q2, int(1), 2).punctured()),
        ];
        assert!(reaching_selection(fp, &strict, &ReducedWord::empty()).is_none());
    }

    #[test]
    fn nested_cancellation_through_other_groups() {
        let s = Separator::standard();
        let fp = s.free_product();
        let g = s.groups();
        let q = g.lookup("q").unwrap();
        let z2 = g.lookup("z2").unwrap();
        // a s s b with a + b able to vanish.
        let ws = vec![
            XNeighborhood::AwayFromIdentity(Neighborhood::interval(q, int(1), rat(1, 2)).punctured()),
            XNeighborhood::AwayFromIdentity(Neighborhood::finite(z2, [1]).punctured()),
            XNeighborhood::AwayFromIdentity(Neighborhood::finite(z2, [1]).punctured()),
            XNeighborhood::AwayFromIdentity(Neighborhood::interval(q, int(-1), rat(1, 2)).punctured()),
        ];
        let sel = reaching_selection(fp, &ws, &ReducedWord::empty()).unwrap();
        assert!(fp.normal_form(&sel).is_empty());
    }

    #[test]
    fn reaching_a_nontrivial_target() {
        let s = Separator::standard();
        let fp = s.free_product();
        let g = s.groups();
        let z3 = g.lookup("z3").unwrap();
        let ws = vec![XNeighborhood::AwayFromIdentity(Neighborhood::finite(z3, [1, 2]).punctured())];
        let target = fp.parse_reduced("z3:t2").unwrap();
        let sel = reaching_selection(fp, &ws, &target).unwrap();
        assert_eq!(fp.normal_form(&sel), target);
        let other = fp.parse_reduced("z2:s").unwrap();
        assert!(reaching_selection(fp, &ws, &other).is_none());
    }
}
