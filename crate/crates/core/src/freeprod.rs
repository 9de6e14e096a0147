//! Words over the wedge of the configured groups and their normal forms in
//! the free product.
//!
//! A word is a finite sequence of letters, each either the shared identity
//! point or a non-identity element tagged with its group. Reduction applies
//! two rewrites until neither applies: delete an identity letter, and merge
//! two adjacent letters of the same group by multiplying them.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::topogroups::{GroupElement, GroupId, Groups};

pub const DEFAULT_CAP: usize = 16;
/// Position sets are handled as 64-bit masks.
pub const MAX_CAP: usize = 63;

/// A letter of a word: a point of the wedge space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Identity,
    /// Never carries the identity of its group.
    Tagged(GroupElement),
}

impl Letter {
    /// Wraps `g`, collapsing the group identity onto the shared identity point.
    pub fn new(groups: &Groups, g: GroupElement) -> Letter {
        if groups.is_identity(&g) {
            Letter::Identity
        } else {
            Letter::Tagged(g)
        }
    }

    pub fn group(&self) -> Option<GroupId> {
        match self {
            Letter::Identity => None,
            Letter::Tagged(g) => Some(g.group),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Letter::Identity)
    }

    /// The letter read as an element of `group`; `None` if it lies in another group.
    pub fn in_group(&self, groups: &Groups, group: GroupId) -> Option<GroupElement> {
        match self {
            Letter::Identity => Some(groups.identity(group)),
            Letter::Tagged(g) if g.group == group => Some(g.clone()),
            Letter::Tagged(_) => None,
        }
    }
}

/// A possibly unreduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        Word { letters }
    }
}

impl From<&ReducedWord> for Word {
    fn from(w: &ReducedWord) -> Word {
        Word {
            letters: w.letters.iter().cloned().map(Letter::Tagged).collect(),
        }
    }
}

/// Normal form: non-identity letters, adjacent letters from distinct groups.
/// The empty word is the identity of the free product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    letters: Vec<GroupElement>,
}

impl ReducedWord {
    pub fn empty() -> ReducedWord {
        ReducedWord::default()
    }

    pub fn letters(&self) -> &[GroupElement] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_word(&self) -> Word {
        Word::from(self)
    }
}

/// Positions (0-based, strictly increasing) of a subterm all of whose letters lie in `group`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniformSubterm {
    pub group: GroupId,
    pub positions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma31Report {
    /// Whether the word reduces to the identity.
    pub premise_met: bool,
    pub holds: bool,
    pub violating_group: Option<GroupId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma32Report {
    pub cond_i: bool,
    pub cond_ii: bool,
    /// A position set uniform in the second word but not in the first.
    pub witness_i: Option<Vec<usize>>,
    /// A position set whose first-word value is not 1 but whose second-word value is.
    pub witness_ii: Option<Vec<usize>>,
}

/// Free product of a configured family of groups, with a word-length cap.
#[derive(Clone, Debug)]
pub struct FreeProduct {
    groups: Groups,
    cap: usize,
}

impl FreeProduct {
    pub fn new(groups: Groups, cap: usize) -> Result<FreeProduct> {
        if cap == 0 || cap > MAX_CAP {
            return Err(Error::Invalid(format!("cap must be between 1 and {MAX_CAP}")));
        }
        Ok(FreeProduct { groups, cap })
    }

    pub fn standard() -> FreeProduct {
        FreeProduct {
            groups: Groups::standard(),
            cap: DEFAULT_CAP,
        }
    }

    pub fn groups(&self) -> &Groups {
        &self.groups
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn check_cap(&self, len: usize) -> Result<()> {
        if len > self.cap {
            Err(Error::CapExceeded { len, cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// Whitespace-separated `group:value` tokens; `1` is the identity letter
    /// and `ε` (alone) the empty word. Identity-valued tokens become `1`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let trimmed = text.trim();
        if trimmed == "ε" {
            return Ok(Word::default());
        }
        let mut letters = Vec::new();
        for (token, item) in trimmed.split_whitespace().enumerate() {
            if item == "1" {
                letters.push(Letter::Identity);
                continue;
            }
            let g = self.groups.parse_element(item).map_err(|e| Error::Parse {
                token,
                text: item.to_string(),
                reason: e.to_string(),
            })?;
            letters.push(Letter::new(&self.groups, g));
        }
        Ok(Word { letters })
    }

    /// Parses a word and reduces it, without the length cap.
    pub fn parse_reduced(&self, text: &str) -> Result<ReducedWord> {
        Ok(self.normal_form(&self.parse_word(text)?.letters))
    }

    pub fn format_letter(&self, l: &Letter) -> String {
        match l {
            Letter::Identity => "1".to_string(),
            Letter::Tagged(g) => self.groups.format_element(g),
        }
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let tokens: Vec<String> = w.letters.iter().map(|l| self.format_letter(l)).collect();
        tokens.join(" ")
    }

    pub fn format_reduced(&self, w: &ReducedWord) -> String {
        self.format_word(&w.to_word())
    }

    pub fn display<'a>(&'a self, w: &'a ReducedWord) -> impl fmt::Display + 'a {
        struct D<'a>(&'a FreeProduct, &'a ReducedWord);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format_reduced(self.1))
            }
        }
        D(self, w)
    }

    /// Left-to-right stack reduction; no length cap.
    pub fn normal_form(&self, letters: &[Letter]) -> ReducedWord {
        let mut stack: Vec<GroupElement> = Vec::with_capacity(letters.len());
        for l in letters {
            let Letter::Tagged(g) = l else { continue };
            match stack.last_mut() {
                Some(top) if top.group == g.group => {
                    let merged = self.groups.mul(top, g).expect("same group");
                    if self.groups.is_identity(&merged) {
                        stack.pop();
                    } else {
                        *top = merged;
                    }
                }
                _ => stack.push(g.clone()),
            }
        }
        ReducedWord { letters: stack }
    }

    pub fn reduce(&self, w: &Word) -> Result<ReducedWord> {
        self.check_cap(w.len())?;
        Ok(self.normal_form(&w.letters))
    }

    pub fn word_mul(&self, u: &ReducedWord, v: &ReducedWord) -> Result<ReducedWord> {
        self.check_cap(u.len() + v.len())?;
        let mut letters: Vec<Letter> = u.letters.iter().cloned().map(Letter::Tagged).collect();
        letters.extend(v.letters.iter().cloned().map(Letter::Tagged));
        Ok(self.normal_form(&letters))
    }

    pub fn word_inv(&self, u: &ReducedWord) -> ReducedWord {
        ReducedWord {
            letters: u.letters.iter().rev().map(|g| self.groups.inv(g)).collect(),
        }
    }

    /// Every nonempty set of positions carrying letters of one group, groups
    /// in configuration order and position sets in lexicographic order.
    /// Identity letters belong to no uniform subterm here.
    pub fn uniform_subterms(&self, w: &Word, nonidentity_value_only: bool) -> Result<Vec<UniformSubterm>> {
        self.check_cap(w.len())?;
        let mut out = Vec::new();
        for group in self.groups.ids() {
            let positions: Vec<usize> = w
                .letters
                .iter()
                .enumerate()
                .filter(|(_, l)| l.group() == Some(group))
                .map(|(i, _)| i)
                .collect();
            let mut current = Vec::new();
            self.lex_subsets(&positions, 0, &mut current, &mut |set| {
                let s = UniformSubterm {
                    group,
                    positions: set.to_vec(),
                };
                if nonidentity_value_only {
                    let value = self.subterm_value(w, &s).expect("positions are in range");
                    if self.groups.is_identity(&value) {
                        return;
                    }
                }
                out.push(s);
            });
        }
        Ok(out)
    }

    /// Depth-first enumeration of nonempty subsequences of `items`, which
    /// visits them in lexicographic order.
    pub(crate) fn lex_subsets(
        &self,
        items: &[usize],
        start: usize,
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        for idx in start..items.len() {
            current.push(items[idx]);
            visit(current);
            self.lex_subsets(items, idx + 1, current, visit);
            current.pop();
        }
    }

    /// Ordered product of the indexed letters inside the subterm's group.
    /// Identity letters contribute the identity.
    pub fn subterm_value(&self, w: &Word, s: &UniformSubterm) -> Result<GroupElement> {
        let mut acc = self.groups.identity(s.group);
        for &i in &s.positions {
            let l = w.letters.get(i).ok_or(Error::IndexOutOfRange {
                index: i,
                len: w.len(),
            })?;
            let g = l.in_group(&self.groups, s.group).ok_or_else(|| {
                Error::GroupMismatch {
                    left: self.groups.name(s.group).to_string(),
                    right: self.format_letter(l),
                }
            })?;
            acc = self.groups.mul(&acc, &g)?;
        }
        Ok(acc)
    }

    /// If `w` is 1 in the free product, the ordered product of its letters
    /// from each single group is 1 in that group.
    pub fn lemma31_check(&self, w: &Word) -> Result<Lemma31Report> {
        if !self.reduce(w)?.is_empty() {
            return Ok(Lemma31Report {
                premise_met: false,
                holds: true,
                violating_group: None,
            });
        }
        for group in self.groups.ids() {
            let letters = w.letters.iter().filter_map(|l| match l {
                Letter::Tagged(g) if g.group == group => Some(g),
                _ => None,
            });
            let product = self.groups.product(group, letters)?;
            if !self.groups.is_identity(&product) {
                return Ok(Lemma31Report {
                    premise_met: true,
                    holds: false,
                    violating_group: Some(group),
                });
            }
        }
        Ok(Lemma31Report {
            premise_met: true,
            holds: true,
            violating_group: None,
        })
    }

    /// Value of the subterm at `mask` if all its letters lie in one group
    /// (identity letters lie in every group). `None` if not uniform.
    fn uniform_value(&self, w: &Word, mask: u64) -> Option<Option<GroupElement>> {
        let mut group = None;
        for (i, l) in w.letters.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if let Some(g) = l.group() {
                    match group {
                        None => group = Some(g),
                        Some(h) if h != g => return None,
                        _ => {}
                    }
                }
            }
        }
        // All-identity subterms are uniform with value 1.
        let Some(group) = group else {
            return Some(None);
        };
        let mut acc = self.groups.identity(group);
        for (i, l) in w.letters.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if let Letter::Tagged(g) = l {
                    acc = self.groups.mul(&acc, g).expect("same group");
                }
            }
        }
        Some(if self.groups.is_identity(&acc) { None } else { Some(acc) })
    }

    /// The two hypotheses relating words `t` and `t2` of equal length:
    ///
    /// * (i) every position set uniform in `t2` is uniform in `t`;
    /// * (ii) every position set uniform in `t` with value not 1, that is
    ///   also uniform in `t2`, has value not 1 in `t2`.
    ///
    /// Identity letters count as lying in every group, since all groups
    /// share the identity point.
    pub fn lemma32_conditions(&self, t: &Word, t2: &Word) -> Result<Lemma32Report> {
        if t.len() != t2.len() {
            return Err(Error::LengthMismatch {
                left: t.len(),
                right: t2.len(),
            });
        }
        self.check_cap(t.len())?;
        let eligible = |w: &Word, group: GroupId| -> u64 {
            w.letters
                .iter()
                .enumerate()
                .filter(|(_, l)| l.group().is_none_or(|g| g == group))
                .fold(0u64, |m, (i, _)| m | 1 << i)
        };
        let mut report = Lemma32Report {
            cond_i: true,
            cond_ii: true,
            witness_i: None,
            witness_ii: None,
        };
        for group in self.groups.ids() {
            if report.cond_i {
                let all = eligible(t2, group);
                let mut sub = all;
                while sub != 0 {
                    if self.uniform_value(t, sub).is_none() {
                        report.cond_i = false;
                        report.witness_i = Some(mask_positions(sub));
                        break;
                    }
                    sub = (sub - 1) & all;
                }
            }
            if report.cond_ii {
                let all = eligible(t, group);
                let mut sub = all;
                while sub != 0 {
                    if let Some(Some(_)) = self.uniform_value(t, sub) {
                        if let Some(None) = self.uniform_value(t2, sub) {
                            report.cond_ii = false;
                            report.witness_ii = Some(mask_positions(sub));
                            break;
                        }
                    }
                    sub = (sub - 1) & all;
                }
            }
        }
        Ok(report)
    }

    /// Applies uniformly random rewrites (delete an identity letter, or merge
    /// an adjacent same-group pair into their product) until none applies.
    pub fn random_rewrite_oracle<R: Rng + ?Sized>(&self, w: &Word, rng: &mut R) -> Result<ReducedWord> {
        self.check_cap(w.len())?;
        let mut letters = w.letters.clone();
        let mut moves: Vec<Rewrite> = Vec::new();
        loop {
            moves.clear();
            for (i, l) in letters.iter().enumerate() {
                if l.is_identity() {
                    moves.push(Rewrite::Delete(i));
                } else if i + 1 < letters.len() && l.group().is_some() && l.group() == letters[i + 1].group() {
                    moves.push(Rewrite::Merge(i));
                }
            }
            if moves.is_empty() {
                break;
            }
            match moves[rng.random_range(0..moves.len())] {
                Rewrite::Delete(i) => {
                    letters.remove(i);
                }
                Rewrite::Merge(i) => {
                    let (Letter::Tagged(a), Letter::Tagged(b)) = (&letters[i], &letters[i + 1]) else {
                        unreachable!("merge needs two tagged letters")
                    };
                    let product = self.groups.mul(a, b)?;
                    letters[i] = Letter::new(&self.groups, product);
                    letters.remove(i + 1);
                }
            }
        }
        let letters = letters
            .into_iter()
            .map(|l| match l {
                Letter::Tagged(g) => g,
                Letter::Identity => unreachable!("identity letters are always deletable"),
            })
            .collect();
        Ok(ReducedWord { letters })
    }
}

#[derive(Clone, Copy, Debug)]
enum Rewrite {
    Delete(usize),
    Merge(usize),
}

fn mask_positions(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}
