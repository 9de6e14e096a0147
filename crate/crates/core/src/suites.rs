//! Property suites run by `freeprod proptest`.
//!
//! Every case draws its randomness from a seed derived from the suite seed
//! and the case index, so a failing case can be replayed alone. On the
//! first failure the offending input is shrunk by dropping letters and
//! moving rationals toward 0 while the failure persists.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::format::{certificate_from_json, certificate_to_json};
use crate::freeprod::{FreeProduct, Letter, ReducedWord, Word};
use crate::gen::{all_words, uniform_rational_instance, WordGen};
use crate::rational::{valuation, Rational, Valuation};
use crate::separator::{selection_seed, CheckMode, SeparationCertificate, Separator};
use crate::topogroups::{GroupElement, GroupId, GroupKind, Groups, Shape, Value};
use crate::x0topology::XNeighborhood;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Confluence,
    Lemma31,
    Lemma32,
    Separation,
    Hausdorff,
    Bounds,
    Tamper,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Confluence,
        Suite::Lemma31,
        Suite::Lemma32,
        Suite::Separation,
        Suite::Hausdorff,
        Suite::Bounds,
        Suite::Tamper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Confluence => "confluence",
            Suite::Lemma31 => "lemma31",
            Suite::Lemma32 => "lemma32",
            Suite::Separation => "separation",
            Suite::Hausdorff => "hausdorff",
            Suite::Bounds => "bounds",
            Suite::Tamper => "tamper",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Number of random cases.
    pub k: usize,
    pub seed: u64,
    /// Selections sampled per certificate in the separation and Hausdorff suites.
    pub samples: usize,
    /// Rewrite orders compared per word in the confluence suite.
    pub orders: usize,
    /// Enumerate every word up to this length instead of sampling (lemma31).
    pub exhaustive_len: Option<usize>,
    /// Groups whose elements form the lemma31 alphabet; empty means `z2`
    /// and `z3` when configured, otherwise every finite group.
    pub alphabet: Vec<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            k: 1000,
            seed: 0,
            samples: 200,
            orders: 20,
            exhaustive_len: None,
            alphabet: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: u64,
    pub failures: u64,
    /// Shrunk description of the first failing case.
    pub counterexample: Option<String>,
    /// Suite-specific tallies.
    pub counts: BTreeMap<&'static str, u64>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn new(suite: Suite) -> SuiteReport {
        SuiteReport {
            suite,
            cases: 0,
            failures: 0,
            counterexample: None,
            counts: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn bump(&mut self, key: &'static str) {
        *self.counts.entry(key).or_default() += 1;
    }

    fn fail(&mut self, describe: impl FnOnce() -> String) {
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }
}

pub fn case_rng(seed: u64, case: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(selection_seed(seed, case))
}

pub fn run_suite(sep: &Separator, suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut report = SuiteReport::new(suite);
    match suite {
        Suite::Confluence => confluence(sep.free_product(), opts, &mut report),
        Suite::Lemma31 => lemma31(sep.free_product(), opts, &mut report)?,
        Suite::Lemma32 => lemma32(sep, opts, &mut report),
        Suite::Separation => separation(sep, opts, &mut report),
        Suite::Hausdorff => hausdorff(sep, opts, &mut report),
        Suite::Bounds => bounds(sep.groups(), opts, &mut report)?,
        Suite::Tamper => tamper(sep, opts, &mut report),
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

fn word_shape(fp: &FreeProduct, max_len: usize) -> WordGen {
    WordGen {
        max_len: max_len.min(fp.cap()),
        ..WordGen::default()
    }
}

/// Letters of `w` in reverse order, each inverted.
pub fn inverse_word(fp: &FreeProduct, w: &Word) -> Word {
    Word::new(
        w.letters
            .iter()
            .rev()
            .map(|l| match l {
                Letter::Identity => Letter::Identity,
                Letter::Tagged(g) => Letter::Tagged(fp.groups().inv(g)),
            })
            .collect(),
    )
}

/// Why a word breaks confluence, or `None`.
pub fn confluence_failure(fp: &FreeProduct, w: &Word, orders: usize, seed: u64) -> Option<String> {
    let reduced = match fp.reduce(w) {
        Ok(r) => r,
        Err(e) => return Some(e.to_string()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for order in 0..orders {
        match fp.random_rewrite_oracle(w, &mut rng) {
            Ok(r) if r == reduced => {}
            Ok(r) => {
                return Some(format!(
                    "rewrite order {order} gives {} but reduce gives {}",
                    fp.format_reduced(&r),
                    fp.format_reduced(&reduced)
                ))
            }
            Err(e) => return Some(e.to_string()),
        }
    }
    if fp.normal_form(&reduced.to_word().letters) != reduced {
        return Some("reduce is not idempotent".into());
    }
    if !fp.normal_form(&w.concat(&inverse_word(fp, w)).letters).is_empty() {
        return Some("w·w⁻¹ does not reduce to ε".into());
    }
    None
}

fn confluence(fp: &FreeProduct, opts: &SuiteOptions, report: &mut SuiteReport) {
    let shape = word_shape(fp, 12);
    for case in 0..opts.k as u64 {
        let mut rng = case_rng(opts.seed, case);
        let w = shape.word(fp.groups(), &mut rng);
        let order_seed = rng.random();
        report.cases += 1;
        if let Some(reason) = confluence_failure(fp, &w, opts.orders, order_seed) {
            report.fail(|| {
                let small = shrink_words(fp, vec![w], |ws| {
                    confluence_failure(fp, &ws[0], opts.orders, order_seed).is_some()
                });
                format!("case {case}: word `{}`: {reason}", fp.format_word(&small[0]))
            });
        }
    }
}

fn lemma31_alphabet(fp: &FreeProduct, names: &[String]) -> Result<Vec<Letter>> {
    let groups = fp.groups();
    let ids: Vec<GroupId> = if names.is_empty() {
        match (groups.lookup("z2"), groups.lookup("z3")) {
            (Ok(a), Ok(b)) => vec![a, b],
            _ => groups.ids().filter(|&g| groups.is_finite(g)).collect(),
        }
    } else {
        names.iter().map(|n| groups.lookup(n)).collect::<Result<_>>()?
    };
    let mut alphabet = vec![Letter::Identity];
    for id in ids {
        let elements = groups
            .elements(id)
            .ok_or_else(|| Error::Invalid(format!("group {} is not finite", groups.name(id))))?;
        alphabet.extend(elements.into_iter().map(|g| Letter::new(groups, g)).filter(|l| !l.is_identity()));
    }
    Ok(alphabet)
}

fn lemma31(fp: &FreeProduct, opts: &SuiteOptions, report: &mut SuiteReport) -> Result<()> {
    let check = |w: &Word, report: &mut SuiteReport| {
        report.cases += 1;
        match fp.lemma31_check(w) {
            Ok(r) => {
                if r.premise_met {
                    report.bump("identity_words");
                }
                if !r.holds {
                    report.fail(|| format!("word `{}`", fp.format_word(w)));
                }
            }
            Err(e) => report.fail(|| format!("word `{}`: {e}", fp.format_word(w))),
        }
    };
    match opts.exhaustive_len {
        Some(len) => {
            fp.check_cap(len)?;
            let alphabet = lemma31_alphabet(fp, &opts.alphabet)?;
            for w in all_words(&alphabet, len) {
                check(&w, report);
            }
        }
        None => {
            // Words built as a product of a word and its inverse, so the premise holds often.
            let shape = word_shape(fp, fp.cap() / 2);
            for case in 0..opts.k as u64 {
                let mut rng = case_rng(opts.seed, case);
                let w = shape.word(fp.groups(), &mut rng);
                let w = if rng.random_bool(0.5) {
                    let mut both = w.concat(&inverse_word(fp, &w));
                    let shift = rng.random_range(0..both.len().max(1));
                    both.letters.rotate_left(shift);
                    both
                } else {
                    w
                };
                check(&w, report);
            }
        }
    }
    Ok(())
}

/// Ground truth for the two pair conditions, found by enumerating every position set and reducing
/// the sub-words directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lemma32Truth {
    pub cond_i: bool,
    pub cond_ii: bool,
}

pub fn lemma32_brute_force(fp: &FreeProduct, t: &Word, t2: &Word) -> Lemma32Truth {
    let n = t.len();
    assert_eq!(n, t2.len());
    let uniform = |w: &Word, mask: u32| -> bool {
        let mut seen: Option<GroupId> = None;
        (0..n).filter(|i| mask >> i & 1 == 1).all(|i| match w.letters[i].group() {
            None => true,
            Some(g) => *seen.get_or_insert(g) == g,
        })
    };
    let value_is_one = |w: &Word, mask: u32| -> bool {
        let sub: Vec<Letter> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| w.letters[i].clone()).collect();
        fp.normal_form(&sub).is_empty()
    };
    let mut truth = Lemma32Truth {
        cond_i: true,
        cond_ii: true,
    };
    for mask in 1..1u32 << n {
        let in_t = uniform(t, mask);
        let in_t2 = uniform(t2, mask);
        if in_t2 && !in_t {
            truth.cond_i = false;
        }
        if in_t && in_t2 && !value_is_one(t, mask) && value_is_one(t2, mask) {
            truth.cond_ii = false;
        }
    }
    truth
}

/// A second word related to `t` position by position: each letter keeps its
/// group (identity letters may become anything) and changes value at random.
fn perturb(fp: &FreeProduct, t: &Word, shape: &WordGen, rng: &mut ChaCha8Rng) -> Word {
    let groups = fp.groups();
    Word::new(
        t.letters
            .iter()
            .map(|l| match l {
                Letter::Identity => {
                    if rng.random_bool(0.5) {
                        Letter::Identity
                    } else {
                        shape.letter(groups, None, rng)
                    }
                }
                Letter::Tagged(g) => {
                    if rng.random_bool(0.5) {
                        l.clone()
                    } else {
                        Letter::Tagged(crate::gen::random_element(groups, g.group, shape.bound, rng))
                    }
                }
            })
            .collect(),
    )
}

/// A selection from the certificate of `t`, sampled with `rng`.
fn certificate_selection(sep: &Separator, t: &Word, rng: &mut ChaCha8Rng) -> Option<Word> {
    let c = sep.separate_word_from_identity(t).ok()?;
    let letters = c
        .neighborhoods
        .iter()
        .map(|w| sep.groups().sample_x(w, rng, 1).ok()?.pop())
        .collect::<Option<Vec<_>>>()?;
    Some(Word::new(letters))
}

/// Changes one letter of `t2` so that a subterm uniform in `t` with value
/// not 1 gets value 1, or moves a letter to another group.
fn mutate_pair(fp: &FreeProduct, t: &Word, t2: &Word, rng: &mut ChaCha8Rng) -> Option<Word> {
    let groups = fp.groups();
    let n = t.len();
    if n == 0 {
        return None;
    }
    let mut out = t2.clone();
    if rng.random_bool(0.5) {
        // Kill a subterm: choose a set uniform in both words, then solve for one letter.
        for _ in 0..20 {
            let mask: u32 = rng.random_range(1..1u32 << n);
            let positions: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let Some(group) = common_group(t, t2, &positions) else { continue };
            let m = positions[rng.random_range(0..positions.len())];
            let part = |range: &[usize]| -> GroupElement {
                let letters: Vec<GroupElement> = range
                    .iter()
                    .map(|&i| t2.letters[i].in_group(groups, group).expect("uniform"))
                    .collect();
                groups.product(group, &letters).expect("same group")
            };
            let at = positions.iter().position(|&p| p == m).expect("member");
            let prefix = part(&positions[..at]);
            let suffix = part(&positions[at + 1..]);
            let y = groups.inv(&groups.mul(&suffix, &prefix).expect("same group"));
            out.letters[m] = Letter::new(groups, y);
            return Some(out);
        }
        None
    } else {
        let m = rng.random_range(0..n);
        let shape = WordGen::default();
        let others: Vec<GroupId> = groups.ids().filter(|&g| Some(g) != t.letters[m].group()).collect();
        let g = others[rng.random_range(0..others.len())];
        out.letters[m] = Letter::Tagged(crate::gen::random_element(groups, g, shape.bound, rng));
        Some(out)
    }
}

/// A group containing every letter of both words at `positions`, if the
/// position set is uniform in both and involves at least one group letter.
fn common_group(t: &Word, t2: &Word, positions: &[usize]) -> Option<GroupId> {
    let mut group = None;
    for &i in positions {
        for l in [&t.letters[i], &t2.letters[i]] {
            if let Some(g) = l.group() {
                match group {
                    None => group = Some(g),
                    Some(h) if h != g => return None,
                    _ => {}
                }
            }
        }
    }
    group
}

/// A word pair for the cancellation lemma, related position by position,
/// and a mutant of the second word that may break the hypotheses.
pub fn lemma32_case(sep: &Separator, rng: &mut ChaCha8Rng) -> (Word, Word, Option<Word>) {
    let fp = sep.free_product();
    let shape = WordGen {
        max_len: 8.min(fp.cap()),
        identity_weight: 0.2,
        repeat_weight: 0.4,
        ..WordGen::default()
    };
    let t = shape.word(fp.groups(), rng);
    let t2 = if rng.random_bool(0.5) {
        certificate_selection(sep, &t, rng).unwrap_or_else(|| perturb(fp, &t, &shape, rng))
    } else {
        perturb(fp, &t, &shape, rng)
    };
    let mutant = mutate_pair(fp, &t, &t2, rng);
    (t, t2, mutant)
}

fn lemma32(sep: &Separator, opts: &SuiteOptions, report: &mut SuiteReport) {
    let fp = sep.free_product();
    let describe = |t: &Word, t2: &Word| format!("t = `{}`, t' = `{}`", fp.format_word(t), fp.format_word(t2));
    for case in 0..opts.k as u64 {
        let mut rng = case_rng(opts.seed, case);
        let (t, t2, mutant) = lemma32_case(sep, &mut rng);
        report.cases += 1;
        let pair_fails = |ws: &[Word]| -> bool {
            let Ok(r) = fp.lemma32_conditions(&ws[0], &ws[1]) else { return true };
            let truth = lemma32_brute_force(fp, &ws[0], &ws[1]);
            let conclusion_broken = r.cond_i
                && r.cond_ii
                && !fp.normal_form(&ws[0].letters).is_empty()
                && fp.normal_form(&ws[1].letters).is_empty();
            (r.cond_i, r.cond_ii) != (truth.cond_i, truth.cond_ii) || conclusion_broken
        };
        match fp.lemma32_conditions(&t, &t2) {
            Ok(r) if r.cond_i && r.cond_ii => report.bump("pairs_satisfying"),
            _ => {}
        }
        if pair_fails(&[t.clone(), t2.clone()]) {
            report.fail(|| {
                let small = shrink_words(fp, vec![t.clone(), t2.clone()], pair_fails);
                describe(&small[0], &small[1])
            });
        }
        if let Some(mutant) = mutant {
            let truth = lemma32_brute_force(fp, &t, &mutant);
            if !(truth.cond_i && truth.cond_ii) {
                report.bump("mutants_violating");
                match fp.lemma32_conditions(&t, &mutant) {
                    Ok(r) if (r.cond_i, r.cond_ii) == (truth.cond_i, truth.cond_ii) => {
                        report.bump("mutants_flagged")
                    }
                    _ => report.fail(|| format!("mutant not flagged: {}", describe(&t, &mutant))),
                }
            }
        }
    }
}

/// Checks a certificate exhaustively when its sets are finite and small,
/// otherwise by sampling.
fn check_mode_for(sep: &Separator, c: &SeparationCertificate, samples: usize, seed: u64) -> CheckMode {
    let groups = sep.groups();
    let total = c.neighborhoods.iter().try_fold(1u64, |acc, w| {
        groups
            .finite_points_x(w)
            .and_then(|ps| acc.checked_mul(ps.len() as u64))
    });
    match total {
        Some(t) if t <= 1_000_000 => CheckMode::Exhaustive,
        _ => CheckMode::Sampled { k: samples, seed },
    }
}

/// Placement rule for the sets of a certificate: every non-identity letter
/// gets a punctured set in its own group.
pub fn placement_ok(c: &SeparationCertificate) -> bool {
    c.word.letters.iter().zip(&c.neighborhoods).all(|(l, w)| match (l, w) {
        (Letter::Tagged(g), XNeighborhood::AwayFromIdentity(u)) => u.group == g.group && u.punctured,
        (Letter::Identity, XNeighborhood::AroundIdentity(_)) => true,
        _ => false,
    })
}

fn separation(sep: &Separator, opts: &SuiteOptions, report: &mut SuiteReport) {
    let fp = sep.free_product();
    let shape = WordGen {
        max_len: 8.min(fp.cap()),
        identity_weight: 0.2,
        repeat_weight: 0.4,
        ..WordGen::default()
    };
    for case in 0..opts.k as u64 {
        let mut rng = case_rng(opts.seed, case);
        let Some(w) = shape.nonidentity_word(fp, &mut rng) else { continue };
        report.cases += 1;
        let failure = |w: &Word| -> Option<String> {
            let c = match sep.separate_word_from_identity(w) {
                Ok(c) => c,
                Err(e) => return Some(e.to_string()),
            };
            if !placement_ok(&c) {
                return Some("placement rule violated".into());
            }
            match certificate_from_json(fp, &certificate_to_json(fp, &c)) {
                Ok(back) if back == c => {}
                _ => return Some("certificate does not round-trip".into()),
            }
            let mode = check_mode_for(sep, &c, opts.samples, selection_seed(opts.seed, case));
            match sep.check_certificate(&c, mode, None) {
                Ok(r) if r.passed() => None,
                Ok(r) => Some(format!(
                    "selection `{}` reaches the identity",
                    fp.format_word(&Word::new(r.violations[0].selection.clone()))
                )),
                Err(e) => Some(e.to_string()),
            }
        };
        match failure(&w) {
            None => {
                let finite = w.letters.iter().all(|l| l.group().is_none_or(|g| fp.groups().is_finite(g)));
                report.bump(if finite { "finite_words" } else { "mixed_words" });
            }
            Some(reason) => report.fail(|| {
                let small = shrink_words(fp, vec![w.clone()], |ws| {
                    !fp.normal_form(&ws[0].letters).is_empty() && failure(&ws[0]).is_some()
                });
                format!("word `{}`: {reason}", fp.format_word(&small[0]))
            }),
        }
    }
}

fn hausdorff(sep: &Separator, opts: &SuiteOptions, report: &mut SuiteReport) {
    let fp = sep.free_product();
    let shape = WordGen {
        max_len: 6.min(fp.cap() / 2),
        ..WordGen::default()
    };
    for case in 0..opts.k as u64 {
        let mut rng = case_rng(opts.seed, case);
        let a = shape.reduced(fp, &mut rng);
        let b = if rng.random_bool(0.3) && !a.is_empty() {
            // A close neighbour: the same word with its last letter changed.
            let mut letters = a.to_word().letters;
            let last = letters.len() - 1;
            let g = letters[last].group().expect("reduced letters are tagged");
            letters[last] = Letter::Tagged(crate::gen::random_element(fp.groups(), g, shape.bound, &mut rng));
            fp.normal_form(&letters)
        } else {
            shape.reduced(fp, &mut rng)
        };
        if a == b {
            continue;
        }
        report.cases += 1;
        let describe = || format!("`{}` against `{}`", fp.format_reduced(&a), fp.format_reduced(&b));
        let c = match sep.separate_from_point(&a.to_word(), &b) {
            Ok(c) => c,
            Err(e) => {
                report.fail(|| format!("{}: {e}", describe()));
                continue;
            }
        };
        let mode = CheckMode::Sampled {
            k: opts.samples,
            seed: selection_seed(opts.seed, case),
        };
        match sep.check_certificate(&c, mode, None) {
            Ok(r) if r.passed() => {}
            Ok(_) => report.fail(|| format!("{}: a selection reaches the target", describe())),
            Err(e) => report.fail(|| format!("{}: {e}", describe())),
        }
    }
}

/// Exact interval and valuation bounds for one uniform rational instance.
pub fn uniform_bound_holds(groups: &Groups, xs: &[GroupElement]) -> Result<bool> {
    let group = xs[0].group;
    let s: Rational = xs.iter().map(|x| x.value.as_rational().expect("rational")).sum();
    let ns = groups.separate_identity_uniform(xs)?;
    let centered = ns.iter().zip(xs).all(|(n, x)| match &n.shape {
        Shape::Interval { center, .. } | Shape::PadicBall { center, .. } => {
            Some(center) == x.value.as_rational()
        }
        Shape::FiniteSet(_) => false,
    });
    if !centered {
        return Ok(false);
    }
    Ok(match groups.kind(group) {
        GroupKind::RationalEuclidean => {
            let mut lo = Rational::zero();
            let mut hi = Rational::zero();
            for n in &ns {
                let Shape::Interval { center, radius } = &n.shape else { return Ok(false) };
                lo += center - radius;
                hi += center + radius;
            }
            // The open range (lo, hi) of all selection sums excludes 0 and holds s.
            (lo >= Rational::zero() || hi <= Rational::zero()) && lo < s && s < hi
        }
        GroupKind::RationalPadic { p } => {
            let Valuation::Finite(v) = valuation(&s, *p) else { return Ok(false) };
            // Each selection differs from s by a sum of terms of valuation
            // above v, so its valuation is exactly v.
            ns.iter().all(|n| matches!(n.shape, Shape::PadicBall { level, .. } if level > v))
        }
        GroupKind::FiniteTable(_) => false,
    })
}

fn bounds(groups: &Groups, opts: &SuiteOptions, report: &mut SuiteReport) -> Result<()> {
    let rational: Vec<GroupId> = groups.ids().filter(|&g| !groups.is_finite(g)).collect();
    if rational.is_empty() {
        return Err(Error::Invalid("the configuration has no rational group".into()));
    }
    for case in 0..opts.k as u64 {
        let mut rng = case_rng(opts.seed, case);
        let group = rational[rng.random_range(0..rational.len())];
        let xs = uniform_rational_instance(group, 8, 12, &mut rng);
        report.cases += 1;
        report.bump(match groups.kind(group) {
            GroupKind::RationalPadic { .. } => "padic",
            _ => "euclidean",
        });
        match uniform_bound_holds(groups, &xs) {
            Ok(true) => {}
            Ok(false) => report.fail(|| {
                let text: Vec<String> = xs.iter().map(|x| groups.format_element(x)).collect();
                format!("instance [{}]", text.join(", "))
            }),
            Err(e) => report.fail(|| e.to_string()),
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    PunctureCleared,
    RadiusDoubled,
    LevelDecreased,
    LetterSwapped,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::PunctureCleared,
        Mutation::RadiusDoubled,
        Mutation::LevelDecreased,
        Mutation::LetterSwapped,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::PunctureCleared => "puncture_cleared",
            Mutation::RadiusDoubled => "radius_doubled",
            Mutation::LevelDecreased => "level_decreased",
            Mutation::LetterSwapped => "letter_swapped",
        }
    }
}

/// Applies `kind` at a random applicable place; `None` if there is none.
pub fn mutate_certificate(
    groups: &Groups,
    c: &SeparationCertificate,
    kind: Mutation,
    rng: &mut ChaCha8Rng,
) -> Option<SeparationCertificate> {
    let mut out = c.clone();
    // (position, component) pairs; component None is an away set.
    let mut sites: Vec<(usize, Option<usize>)> = Vec::new();
    for (m, w) in c.neighborhoods.iter().enumerate() {
        let candidates: Vec<(Option<usize>, &crate::topogroups::Neighborhood)> = match w {
            XNeighborhood::AwayFromIdentity(u) => vec![(None, u)],
            XNeighborhood::AroundIdentity(cs) => cs.iter().enumerate().map(|(i, u)| (Some(i), u)).collect(),
        };
        for (slot, u) in candidates {
            let applies = match kind {
                Mutation::PunctureCleared => slot.is_none(),
                Mutation::RadiusDoubled => matches!(u.shape, Shape::Interval { .. }),
                Mutation::LevelDecreased => matches!(u.shape, Shape::PadicBall { .. }),
                Mutation::LetterSwapped => slot.is_none(),
            };
            if applies {
                sites.push((m, slot));
            }
        }
    }
    // Widening an away set is the interesting case; around-identity
    // components are used only when there is no away set to widen.
    if sites.iter().any(|s| s.1.is_none()) {
        sites.retain(|s| s.1.is_none());
    }
    if sites.is_empty() {
        return None;
    }
    let (m, slot) = sites[rng.random_range(0..sites.len())];
    if kind == Mutation::LetterSwapped {
        let Letter::Tagged(g) = &c.word.letters[m] else { return None };
        let others: Vec<GroupId> = groups.ids().filter(|&h| h != g.group).collect();
        let replacement = if !others.is_empty() && rng.random_bool(0.5) {
            // A letter of another group, keeping its own set.
            let h = others[rng.random_range(0..others.len())];
            crate::gen::random_element(groups, h, 6, rng)
        } else {
            crate::gen::random_element(groups, g.group, 6, rng)
        };
        out.word.letters[m] = Letter::Tagged(replacement);
        return Some(out);
    }
    let target = match (&mut out.neighborhoods[m], slot) {
        (XNeighborhood::AwayFromIdentity(u), None) => u,
        (XNeighborhood::AroundIdentity(cs), Some(i)) => &mut cs[i],
        _ => unreachable!("sites match their variant"),
    };
    match (kind, &mut target.shape) {
        (Mutation::PunctureCleared, _) => target.punctured = false,
        (Mutation::RadiusDoubled, Shape::Interval { radius, .. }) => *radius = &*radius * Rational::from_integer(2.into()),
        (Mutation::LevelDecreased, Shape::PadicBall { level, .. }) => *level -= rng.random_range(1..=2),
        _ => unreachable!("sites match their mutation"),
    }
    Some(out)
}

/// Outcome of checking one tampered certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TamperOutcome {
    /// Rejected by the structural checks.
    Structural,
    /// Rejected because a selection reaches a forbidden value.
    Reaching,
    /// Accepted.
    Accepted,
}

pub fn judge_tampered(sep: &Separator, c: &SeparationCertificate) -> Result<TamperOutcome> {
    if sep.validate_certificate(c).is_err() {
        return Ok(TamperOutcome::Structural);
    }
    let r = sep.check_certificate(c, CheckMode::Symbolic, None)?;
    Ok(if r.passed() {
        TamperOutcome::Accepted
    } else {
        TamperOutcome::Reaching
    })
}

fn tamper(sep: &Separator, opts: &SuiteOptions, report: &mut SuiteReport) {
    let fp = sep.free_product();
    let shape = WordGen {
        max_len: 6.min(fp.cap()),
        identity_weight: 0.2,
        repeat_weight: 0.4,
        ..WordGen::default()
    };
    for case in 0..opts.k as u64 {
        let mut rng = case_rng(opts.seed, case);
        let Some(w) = shape.nonidentity_word(fp, &mut rng) else { continue };
        let Ok(c) = sep.separate_word_from_identity(&w) else {
            report.fail(|| format!("word `{}` could not be separated", fp.format_word(&w)));
            continue;
        };
        let first = rng.random_range(0..Mutation::ALL.len());
        let Some((kind, mutant)) = (0..Mutation::ALL.len())
            .map(|i| Mutation::ALL[(first + i) % Mutation::ALL.len()])
            .find_map(|kind| mutate_certificate(fp.groups(), &c, kind, &mut rng).map(|m| (kind, m)))
        else {
            continue;
        };
        report.cases += 1;
        report.bump(kind.name());
        let describe = || format!("{} mutant of `{}`", kind.name(), fp.format_word(&w));
        let outcome = match judge_tampered(sep, &mutant) {
            Ok(o) => o,
            Err(e) => {
                report.fail(|| format!("{}: {e}", describe()));
                continue;
            }
        };
        report.bump(match outcome {
            TamperOutcome::Structural => "rejected_structural",
            TamperOutcome::Reaching => "rejected_reaching",
            TamperOutcome::Accepted => "accepted",
        });
        if outcome == TamperOutcome::Accepted {
            // Independent evidence: an accepted mutant must survive exhaustive
            // or sampled checking too, and must still obey the placement rule.
            let mode = check_mode_for(sep, &mutant, opts.samples.max(1000), selection_seed(opts.seed, case));
            let reached = sep.check_certificate(&mutant, mode, None).map(|r| !r.passed()).unwrap_or(true);
            if reached || !placement_ok(&mutant) {
                report.fail(|| format!("{}: accepted but reaches a forbidden value", describe()));
            }
        }
    }
}

/// Shrinks equal-length words together while `fails` keeps holding: drops
/// a position from every word, or moves one rational toward 0.
pub fn shrink_words(fp: &FreeProduct, mut words: Vec<Word>, mut fails: impl FnMut(&[Word]) -> bool) -> Vec<Word> {
    let groups = fp.groups();
    'outer: loop {
        let len = words.first().map_or(0, |w| w.len());
        for i in 0..len {
            let candidate: Vec<Word> = words
                .iter()
                .map(|w| {
                    let mut w = w.clone();
                    w.letters.remove(i);
                    w
                })
                .collect();
            if fails(&candidate) {
                words = candidate;
                continue 'outer;
            }
        }
        for k in 0..words.len() {
            for i in 0..len {
                let Letter::Tagged(g) = &words[k].letters[i] else { continue };
                let Value::Rational(q) = &g.value else { continue };
                for smaller in simpler_rationals(q) {
                    let mut candidate = words.clone();
                    candidate[k].letters[i] = Letter::new(groups, GroupElement::rational(g.group, smaller));
                    if fails(&candidate) {
                        words = candidate;
                        continue 'outer;
                    }
                }
            }
        }
        return words;
    }
}

/// Rationals strictly simpler than `q` (smaller `|numerator| + denominator`), nearest 0 first.
fn simpler_rationals(q: &Rational) -> Vec<Rational> {
    let size = |r: &Rational| r.numer().abs() + r.denom();
    let n = q.numer();
    let d = q.denom();
    let half = |x: &BigInt| x.div_floor(&BigInt::from(2));
    let mut out = vec![
        Rational::zero(),
        Rational::from_integer(n.signum()),
        Rational::from_integer(q.trunc().to_integer()),
        Rational::new(half(n), d.clone()),
        Rational::new(n.clone(), half(d).max(BigInt::from(1))),
    ];
    out.retain(|r| size(r) < size(q));
    out.dedup();
    out
}

/// One reduced word per line, skipping blank lines and `#` comments.
pub fn parse_targets(fp: &FreeProduct, lines: &str) -> Result<Vec<ReducedWord>> {
    lines
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| fp.parse_reduced(l))
        .collect()
}
