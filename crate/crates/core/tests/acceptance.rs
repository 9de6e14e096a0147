//! Acceptance criteria, one line of output each. Run with
//! `cargo test -p freeprod-core --test acceptance`.
//!
//! The oracles here are deliberately separate from the library: a small
//! exponent-vector reducer for Z/2 ∗ Z/3, a subset-enumeration check of the
//! cancellation-lemma hypotheses, a direct valuation routine, and a plain
//! membership test for the set descriptors.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freeprod_core::gen::{uniform_rational_instance, WordGen};
use freeprod_core::suites::{
    case_rng, judge_tampered, lemma32_case, mutate_certificate, run_suite, Mutation, Suite, SuiteOptions,
    TamperOutcome,
};
use freeprod_core::{
    CheckMode, GroupElement, GroupKind, Groups, Letter, Neighborhood, Rational, SeparationCertificate, Separator,
    Shape, Value, Word, XNeighborhood,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// ---------- oracles ----------

/// p-adic valuation of a nonzero rational by repeated division.
fn vp(q: &Rational, p: u64) -> i64 {
    assert!(!q.is_zero());
    let p = BigInt::from(p);
    let count = |x: &BigInt| {
        let mut x = x.abs();
        let mut k = 0;
        while (&x % &p).is_zero() {
            x /= &p;
            k += 1;
        }
        k
    };
    count(q.numer()) - count(q.denom())
}

fn rational_of(g: &GroupElement) -> &Rational {
    match &g.value {
        Value::Rational(q) => q,
        Value::Table(_) => panic!("not a rational element"),
    }
}

fn is_identity(groups: &Groups, g: &GroupElement) -> bool {
    match (&g.value, groups.kind(g.group)) {
        (Value::Table(i), GroupKind::FiniteTable(t)) => *i == t.identity(),
        (Value::Rational(q), _) => q.is_zero(),
        _ => false,
    }
}

fn member(groups: &Groups, n: &Neighborhood, g: &GroupElement) -> bool {
    if n.group != g.group || (n.punctured && is_identity(groups, g)) {
        return false;
    }
    match (&n.shape, &g.value) {
        (Shape::FiniteSet(s), Value::Table(i)) => s.contains(i),
        (Shape::Interval { center, radius }, Value::Rational(y)) => (y - center).abs() < *radius,
        (Shape::PadicBall { center, level }, Value::Rational(y)) => {
            let GroupKind::RationalPadic { p } = groups.kind(n.group) else { return false };
            y == center || vp(&(y - center), *p) >= *level
        }
        _ => false,
    }
}

fn x_member(groups: &Groups, w: &XNeighborhood, l: &Letter) -> bool {
    match (w, l) {
        (XNeighborhood::AwayFromIdentity(_), Letter::Identity) => false,
        (XNeighborhood::AwayFromIdentity(u), Letter::Tagged(g)) => member(groups, u, g),
        (XNeighborhood::AroundIdentity(_), Letter::Identity) => true,
        (XNeighborhood::AroundIdentity(cs), Letter::Tagged(g)) => cs.iter().any(|c| member(groups, c, g)),
    }
}

/// Reduces a word over Z/2 ∗ Z/3 given as (group, exponent) pairs.
fn z2z3_reduce(letters: &[(usize, u32)]) -> Vec<(usize, u32)> {
    let modulus = [2, 3];
    let mut stack: Vec<(usize, u32)> = Vec::new();
    for &(g, e) in letters {
        let e = e % modulus[g];
        if e == 0 {
            continue;
        }
        match stack.last_mut() {
            Some((h, f)) if *h == g => {
                *f = (*f + e) % modulus[g];
                if *f == 0 {
                    stack.pop();
                }
            }
            _ => stack.push((g, e)),
        }
    }
    stack
}

/// Whether the ordered product of the letters at `mask` reduces to 1,
/// computed by merging through a plain stack on group values.
fn sub_is_one(groups: &Groups, w: &Word, mask: u32) -> bool {
    let mut acc: Option<GroupElement> = None;
    for (i, l) in w.letters.iter().enumerate() {
        if mask >> i & 1 == 0 {
            continue;
        }
        let Letter::Tagged(g) = l else { continue };
        acc = Some(match acc {
            None => g.clone(),
            Some(a) => match (&a.value, &g.value, groups.kind(g.group)) {
                (Value::Rational(x), Value::Rational(y), _) => GroupElement::rational(g.group, x + y),
                (Value::Table(x), Value::Table(y), GroupKind::FiniteTable(t)) => {
                    GroupElement::new(g.group, Value::Table(t.product(*x, *y)))
                }
                _ => unreachable!("uniform subsets share a group"),
            },
        });
    }
    acc.is_none_or(|a| is_identity(groups, &a))
}

fn uniform(w: &Word, mask: u32) -> bool {
    let mut seen = None;
    w.letters
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .all(|(_, l)| match l.group() {
            None => true,
            Some(g) => *seen.get_or_insert(g) == g,
        })
}

/// Both hypotheses by enumerating every position set.
fn lemma32_oracle(groups: &Groups, t: &Word, t2: &Word) -> (bool, bool) {
    let n = t.len();
    let (mut i_ok, mut ii_ok) = (true, true);
    for mask in 1..1u32 << n {
        let (ut, ut2) = (uniform(t, mask), uniform(t2, mask));
        if ut2 && !ut {
            i_ok = false;
        }
        if ut && ut2 && !sub_is_one(groups, t, mask) && sub_is_one(groups, t2, mask) {
            ii_ok = false;
        }
    }
    (i_ok, ii_ok)
}

/// Placement rule: non-identity letters get punctured sets of their own
/// group containing them; identity letters get around-identity sets.
fn placement_violations(groups: &Groups, c: &SeparationCertificate) -> usize {
    c.word
        .letters
        .iter()
        .zip(&c.neighborhoods)
        .filter(|(l, w)| match (l, w) {
            (Letter::Tagged(g), XNeighborhood::AwayFromIdentity(u)) => {
                !(u.group == g.group && u.punctured && member(groups, u, g))
            }
            (Letter::Identity, XNeighborhood::AroundIdentity(cs)) => {
                cs.len() != groups.len() || cs.iter().any(|c| c.punctured)
            }
            _ => true,
        })
        .count()
}

// ---------- criteria ----------

fn confluence(sep: &Separator) -> Outcome {
    let opts = SuiteOptions {
        k: 100_000,
        seed: 7,
        orders: 20,
        ..SuiteOptions::default()
    };
    let start = Instant::now();
    let r = run_suite(sep, Suite::Confluence, &opts).unwrap();
    let elapsed = start.elapsed();
    outcome(
        r.passed() && r.cases >= 100_000 && elapsed < Duration::from_secs(60),
        format!("{} words x 20 orders, {} failures, {:.1?}", r.cases, r.failures, elapsed),
    )
}

fn lemma31(sep: &Separator) -> Outcome {
    let fp = sep.free_product();
    let start = Instant::now();
    // Alphabet {1, s} ∪ {1, t, t2}; 1 appears once since both copies are the same letter.
    let alphabet: [(&str, Option<(usize, u32)>); 4] =
        [("1", None), ("z2:s", Some((0, 1))), ("z3:t", Some((1, 1))), ("z3:t2", Some((1, 2)))];
    let mut words = 0u64;
    let mut identities = 0u64;
    let mut violations = 0u64;
    for len in 0..=6u32 {
        for mut code in 0..4usize.pow(len) {
            let mut tokens = Vec::new();
            let mut oracle = Vec::new();
            for _ in 0..len {
                let (text, letter) = alphabet[code % 4];
                code /= 4;
                tokens.push(text);
                oracle.extend(letter);
            }
            let w = fp.parse_word(&tokens.join(" ")).unwrap();
            words += 1;
            let reduces_to_one = fp.reduce(&w).unwrap().is_empty();
            if reduces_to_one != z2z3_reduce(&oracle).is_empty() {
                violations += 1;
            }
            if reduces_to_one {
                identities += 1;
                let exp = |g: usize, m: u32| oracle.iter().filter(|l| l.0 == g).map(|l| l.1).sum::<u32>() % m;
                let per_group_trivial = exp(0, 2) == 0 && exp(1, 3) == 0;
                let report = fp.lemma31_check(&w).unwrap();
                if !per_group_trivial || !report.holds {
                    violations += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(5),
        format!("{words} words, {identities} reduce to 1, {violations} violations, {elapsed:.1?}"),
    )
}

fn lemma32(sep: &Separator) -> Outcome {
    let fp = sep.free_product();
    let groups = sep.groups();
    let start = Instant::now();
    let (mut satisfying, mut flagged, mut failures) = (0u64, 0u64, 0u64);
    let mut case = 0u64;
    while (satisfying < 10_000 || flagged < 1_000) && case < 200_000 {
        let mut rng = case_rng(3, case);
        case += 1;
        let (t, t2, mutant) = lemma32_case(sep, &mut rng);
        let r = fp.lemma32_conditions(&t, &t2).unwrap();
        let truth = lemma32_oracle(groups, &t, &t2);
        if (r.cond_i, r.cond_ii) != truth {
            failures += 1;
        }
        if truth == (true, true) {
            satisfying += 1;
            if !fp.reduce(&t).unwrap().is_empty() && fp.reduce(&t2).unwrap().is_empty() {
                failures += 1;
            }
        }
        if let Some(m) = mutant {
            let truth = lemma32_oracle(groups, &t, &m);
            if truth != (true, true) {
                let r = fp.lemma32_conditions(&t, &m).unwrap();
                if (r.cond_i, r.cond_ii) == truth {
                    flagged += 1;
                } else {
                    failures += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && satisfying >= 10_000 && flagged >= 1_000 && elapsed < Duration::from_secs(30),
        format!("{satisfying} satisfying pairs, {flagged} violating mutants flagged, {failures} failures, {elapsed:.1?}"),
    )
}

fn soundness(sep: &Separator, certificates: &mut Vec<SeparationCertificate>) -> Outcome {
    let fp = sep.free_product();
    let groups = sep.groups();
    let shape = WordGen {
        max_len: 8,
        identity_weight: 0.2,
        repeat_weight: 0.4,
        ..WordGen::default()
    };
    let start = Instant::now();
    let (mut with_identity, mut with_adjacent, mut exhaustive, mut failures) = (0, 0, 0, 0u64);
    let mut case = 0u64;
    while certificates.len() < 1_000 {
        let mut rng = case_rng(4, case);
        case += 1;
        let w = shape.word(groups, &mut rng);
        if w.is_empty() || fp.reduce(&w).unwrap().is_empty() {
            continue;
        }
        with_identity += usize::from(w.letters.iter().any(Letter::is_identity));
        with_adjacent += usize::from(
            w.letters
                .windows(2)
                .any(|p| p[0].group().is_some() && p[0].group() == p[1].group()),
        );
        let c = match sep.separate_word_from_identity(&w) {
            Ok(c) => c,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let all_finite = c.neighborhoods.iter().all(|n| groups.is_finite_x(n));
        let mode = if all_finite {
            exhaustive += 1;
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled { k: 1000, seed: case }
        };
        let r = sep.check_certificate(&c, mode, None).unwrap();
        // Independent sampling: members drawn by the library, membership and
        // product judged here.
        let mut local = ChaCha8Rng::seed_from_u64(case);
        for _ in 0..50 {
            let sel: Vec<Letter> = c
                .neighborhoods
                .iter()
                .map(|n| groups.sample_x(n, &mut local, 1).unwrap().remove(0))
                .collect();
            let inside = sel.iter().zip(&c.neighborhoods).all(|(l, n)| x_member(groups, n, l));
            if !inside || fp.reduce(&Word::new(sel)).unwrap().is_empty() {
                failures += 1;
            }
        }
        if !r.passed() {
            failures += 1;
        }
        certificates.push(c);
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(120),
        format!(
            "{} words ({with_identity} with identity letters, {with_adjacent} with same-group neighbours, {exhaustive} checked exhaustively), {failures} failures, {elapsed:.1?}",
            certificates.len()
        ),
    )
}

fn audit(sep: &Separator, certificates: &[SeparationCertificate]) -> Outcome {
    let groups = sep.groups();
    let positions: usize = certificates
        .iter()
        .map(|c| c.word.letters.iter().filter(|l| !l.is_identity()).count())
        .sum();
    let exceptions: usize = certificates.iter().map(|c| placement_violations(groups, c)).sum();
    outcome(
        exceptions == 0 && !certificates.is_empty(),
        format!("{positions} non-identity positions in {} certificates, {exceptions} exceptions", certificates.len()),
    )
}

fn hausdorff(sep: &Separator) -> Outcome {
    let fp = sep.free_product();
    let groups = sep.groups();
    let shape = WordGen {
        max_len: 6,
        ..WordGen::default()
    };
    let start = Instant::now();
    let (mut pairs, mut failures) = (0u64, 0u64);
    let mut case = 0u64;
    while pairs < 1_000 {
        let mut rng = case_rng(6, case);
        case += 1;
        let a = shape.reduced(fp, &mut rng);
        let b = shape.reduced(fp, &mut rng);
        if a == b {
            continue;
        }
        pairs += 1;
        let c = match sep.separate_from_point(&a.to_word(), &b) {
            Ok(c) => c,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let r = sep
            .check_certificate(&c, CheckMode::Sampled { k: 200, seed: case }, Some(std::slice::from_ref(&b)))
            .unwrap();
        if !r.passed() || placement_violations(groups, &c) > 0 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(60),
        format!("{pairs} pairs x 200 samples, {failures} violations, {elapsed:.1?}"),
    )
}

fn bounds(sep: &Separator) -> Outcome {
    let groups = sep.groups();
    let q = groups.lookup("q").unwrap();
    let q2 = groups.lookup("q2").unwrap();
    let start = Instant::now();
    let mut failures = 0u64;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..1_000 {
        let group = if i % 2 == 0 { q } else { q2 };
        let xs = uniform_rational_instance(group, 8, 12, &mut rng);
        let s: Rational = xs.iter().map(rational_of).sum();
        let ns = groups.separate_identity_uniform(&xs).unwrap();
        let ok = if group == q {
            let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
            for n in &ns {
                let Shape::Interval { center, radius } = &n.shape else { unreachable!() };
                lo += center - radius;
                hi += center + radius;
            }
            let zero = Rational::zero();
            lo < s && s < hi && (lo >= zero || hi <= zero)
        } else {
            let v = vp(&s, 2);
            let levels_ok = ns
                .iter()
                .zip(&xs)
                .all(|(n, x)| matches!(&n.shape, Shape::PadicBall { center, level } if center == rational_of(x) && *level > v));
            // Spot check: perturb every center inside its ball.
            let perturbed: Rational = ns
                .iter()
                .map(|n| {
                    let Shape::PadicBall { center, level } = &n.shape else { unreachable!() };
                    let u = Rational::from_integer(BigInt::from(rng.random_range(-5i64..=5)));
                    center + u * Rational::from_integer(BigInt::from(2)).pow(*level as i32)
                })
                .sum();
            levels_ok && !perturbed.is_zero() && vp(&perturbed, 2) == v
        };
        if !ok {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(5),
        format!("1000 instances (500 Euclidean, 500 2-adic), {failures} failures, {elapsed:.1?}"),
    )
}

fn tamper(sep: &Separator) -> Outcome {
    let fp = sep.free_product();
    let groups = sep.groups();
    let shape = WordGen {
        max_len: 6,
        identity_weight: 0.2,
        repeat_weight: 0.5,
        ..WordGen::default()
    };
    let start = Instant::now();
    let (mut mutants, mut reaching, mut structural, mut failures) = (0u64, 0u64, 0u64, 0u64);
    let mut case = 0u64;
    while mutants < 100 {
        let kind = Mutation::ALL[mutants as usize % Mutation::ALL.len()];
        let mut rng = case_rng(9, case);
        case += 1;
        let Some(w) = shape.nonidentity_word(fp, &mut rng) else { continue };
        let c = sep.separate_word_from_identity(&w).unwrap();
        let Some(m) = mutate_certificate(groups, &c, kind, &mut rng) else { continue };
        mutants += 1;
        let verdict = judge_tampered(sep, &m).unwrap();
        if placement_violations(groups, &m) > 0 {
            structural += 1;
            if verdict != TamperOutcome::Structural {
                failures += 1;
            }
            continue;
        }
        // Ground truth by enumeration when finite, else by dense sampling.
        let finite = m.neighborhoods.iter().all(|n| groups.is_finite_x(n));
        let mut reaches = false;
        if finite {
            let choices: Vec<Vec<Letter>> = m
                .neighborhoods
                .iter()
                .map(|n| groups.finite_points_x(n).unwrap())
                .collect();
            let mut index = vec![0usize; choices.len()];
            'enumerate: loop {
                let whole = Word::new(index.iter().zip(&choices).map(|(&i, cs)| cs[i].clone()).collect());
                if fp.reduce(&whole).unwrap().is_empty() {
                    reaches = true;
                    break;
                }
                for p in (0..index.len()).rev() {
                    index[p] += 1;
                    if index[p] < choices[p].len() {
                        continue 'enumerate;
                    }
                    index[p] = 0;
                }
                break;
            }
        } else {
            let mut local = ChaCha8Rng::seed_from_u64(case);
            for _ in 0..5_000 {
                let sel: Vec<Letter> = m
                    .neighborhoods
                    .iter()
                    .map(|n| groups.sample_x(n, &mut local, 1).unwrap().remove(0))
                    .collect();
                if fp.reduce(&Word::new(sel)).unwrap().is_empty() {
                    reaches = true;
                    break;
                }
            }
        }
        if verdict == TamperOutcome::Reaching {
            // The checker's witness must be genuine.
            let r = sep.check_certificate(&m, CheckMode::Symbolic, None).unwrap();
            let sel = &r.violations[0].selection;
            let genuine = sel.iter().zip(&m.neighborhoods).all(|(l, n)| x_member(groups, n, l))
                && fp.reduce(&Word::new(sel.clone())).unwrap().is_empty();
            if !genuine {
                failures += 1;
            }
            reaching += 1;
        } else if reaches {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && reaching > 0 && structural > 0,
        format!("{mutants} mutants: {structural} structurally invalid, {reaching} reach 1, {failures} missed, {elapsed:.1?}"),
    )
}

fn main() -> ExitCode {
    let sep = Separator::standard();
    let mut certificates = Vec::new();
    let results = [
        ("1 confluence and normal form", confluence(&sep)),
        ("2 per-group products of identity words (exhaustive)", lemma31(&sep)),
        ("3 cancellation hypotheses", lemma32(&sep)),
        ("4 separation soundness", soundness(&sep, &mut certificates)),
        ("5 placement audit", audit(&sep, &certificates)),
        ("6 distinct points separated", hausdorff(&sep)),
        ("7 analytic separation bounds", bounds(&sep)),
        ("8 tamper detection", tamper(&sep)),
    ];
    let mut all = true;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        all &= o.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
