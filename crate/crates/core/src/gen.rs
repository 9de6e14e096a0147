//! Random words and instances for the property suites and benchmarks.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::freeprod::{FreeProduct, Letter, ReducedWord, Word};
use crate::rational::Rational;
use crate::topogroups::{GroupElement, GroupId, GroupKind, Groups, Value};

/// Shape parameters for random words.
#[derive(Clone, Debug)]
pub struct WordGen {
    pub min_len: usize,
    pub max_len: usize,
    /// Probability that a letter is the identity letter.
    pub identity_weight: f64,
    /// Probability that a letter repeats the previous letter's group.
    pub repeat_weight: f64,
    /// Rational numerators are drawn from `-bound..=bound`, denominators from `1..=bound`.
    pub bound: i64,
}

impl Default for WordGen {
    fn default() -> Self {
        WordGen {
            min_len: 0,
            max_len: 12,
            identity_weight: 0.1,
            repeat_weight: 0.3,
            bound: 6,
        }
    }
}

/// A uniformly chosen non-identity element of `group`.
pub fn random_element<R: Rng + ?Sized>(groups: &Groups, group: GroupId, bound: i64, rng: &mut R) -> GroupElement {
    match groups.kind(group) {
        GroupKind::FiniteTable(t) => {
            let e = t.identity();
            let mut i = rng.random_range(0..t.order() - 1);
            if i >= e {
                i += 1;
            }
            GroupElement::new(group, Value::Table(i))
        }
        GroupKind::RationalEuclidean | GroupKind::RationalPadic { .. } => {
            GroupElement::rational(group, random_nonzero_rational(bound, rng))
        }
    }
}

pub fn random_nonzero_rational<R: Rng + ?Sized>(bound: i64, rng: &mut R) -> Rational {
    loop {
        let n = rng.random_range(-bound..=bound);
        if n != 0 {
            let d = rng.random_range(1..=bound);
            return Rational::new(BigInt::from(n), BigInt::from(d));
        }
    }
}

/// Groups that have a non-identity element.
fn usable_groups(groups: &Groups) -> Vec<GroupId> {
    groups
        .ids()
        .filter(|&g| match groups.kind(g) {
            GroupKind::FiniteTable(t) => t.order() > 1,
            _ => true,
        })
        .collect()
}

impl WordGen {
    pub fn letter<R: Rng + ?Sized>(&self, groups: &Groups, previous: Option<GroupId>, rng: &mut R) -> Letter {
        let usable = usable_groups(groups);
        if usable.is_empty() || rng.random_bool(self.identity_weight) {
            return Letter::Identity;
        }
        let group = match previous {
            Some(g) if rng.random_bool(self.repeat_weight) => g,
            _ => usable[rng.random_range(0..usable.len())],
        };
        Letter::Tagged(random_element(groups, group, self.bound, rng))
    }

    pub fn word<R: Rng + ?Sized>(&self, groups: &Groups, rng: &mut R) -> Word {
        let len = rng.random_range(self.min_len..=self.max_len);
        let mut letters = Vec::with_capacity(len);
        let mut previous = None;
        for _ in 0..len {
            let l = self.letter(groups, previous, rng);
            if let Some(g) = l.group() {
                previous = Some(g);
            }
            letters.push(l);
        }
        Word::new(letters)
    }

    /// A word whose value is not 1; gives up after many attempts.
    pub fn nonidentity_word<R: Rng + ?Sized>(&self, fp: &FreeProduct, rng: &mut R) -> Option<Word> {
        let shape = WordGen {
            min_len: self.min_len.max(1),
            ..self.clone()
        };
        (0..1000)
            .map(|_| shape.word(fp.groups(), rng))
            .find(|w| !fp.normal_form(&w.letters).is_empty())
    }

    /// A reduced word of length at most `max_len`.
    pub fn reduced<R: Rng + ?Sized>(&self, fp: &FreeProduct, rng: &mut R) -> ReducedWord {
        let groups = fp.groups();
        let usable = usable_groups(groups);
        let len = rng.random_range(0..=self.max_len);
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        let mut previous: Option<GroupId> = None;
        for _ in 0..len {
            let choices: Vec<GroupId> = usable.iter().copied().filter(|&g| Some(g) != previous).collect();
            if choices.is_empty() {
                break;
            }
            let g = choices[rng.random_range(0..choices.len())];
            letters.push(Letter::Tagged(random_element(groups, g, self.bound, rng)));
            previous = Some(g);
        }
        fp.normal_form(&letters)
    }
}

/// A uniform rational instance `xs` in `group` whose sum is not 0.
pub fn uniform_rational_instance<R: Rng + ?Sized>(
    group: GroupId,
    max_len: usize,
    bound: i64,
    rng: &mut R,
) -> Vec<GroupElement> {
    loop {
        let n = rng.random_range(1..=max_len);
        let xs: Vec<Rational> = (0..n).map(|_| random_nonzero_rational(bound, rng)).collect();
        let sum: Rational = xs.iter().sum();
        if !sum.is_zero() {
            return xs.into_iter().map(|q| GroupElement::rational(group, q)).collect();
        }
    }
}

/// Every word of length at most `max_len` over `alphabet`, shortest first.
pub fn all_words(alphabet: &[Letter], max_len: usize) -> impl Iterator<Item = Word> + '_ {
    (0..=max_len).flat_map(move |len| {
        let total = alphabet.len().pow(len as u32);
        (0..total).map(move |mut code| {
            let mut letters = vec![Letter::Identity; len];
            for slot in letters.iter_mut().rev() {
                *slot = alphabet[code % alphabet.len()].clone();
                code /= alphabet.len();
            }
            Word::new(letters)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_words_respect_bounds() {
        let fp = FreeProduct::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = WordGen::default();
        for _ in 0..200 {
            let w = g.word(fp.groups(), &mut rng);
            assert!(w.len() <= 12);
            let r = g.reduced(&fp, &mut rng);
            assert_eq!(fp.normal_form(&r.to_word().letters), r);
            let n = g.nonidentity_word(&fp, &mut rng).unwrap();
            assert!(!fp.normal_form(&n.letters).is_empty());
        }
    }

    #[test]
    fn all_words_counts() {
        let fp = FreeProduct::standard();
        let s = fp.parse_word("z2:s").unwrap().letters;
        let alphabet = vec![Letter::Identity, s[0].clone()];
        assert_eq!(all_words(&alphabet, 3).count(), 1 + 2 + 4 + 8);
    }
}
