//! Human-readable and JSON renderings of library values.

use serde_json::{json, Value as Json};

use freeprod_core::rational::format_rational;
use freeprod_core::separator::Violation;
use freeprod_core::suites::SuiteReport;
use freeprod_core::{
    CheckMode, FreeProduct, GroupKind, Groups, Neighborhood, ReducedWord, SeparationCertificate, Shape,
    VerificationReport, Word, XNeighborhood,
};

pub const REPORT_VERSION: u32 = 1;

pub fn tokens(fp: &FreeProduct, w: &Word) -> Vec<String> {
    w.letters.iter().map(|l| fp.format_letter(l)).collect()
}

pub fn reduced_tokens(fp: &FreeProduct, w: &ReducedWord) -> Vec<String> {
    tokens(fp, &w.to_word())
}

/// `q: (3/4, 9/4) minus 1`, `z3: {t}`, `q2: 1 + 2^2·Z_2`.
pub fn neighborhood(groups: &Groups, n: &Neighborhood) -> String {
    let body = match (&n.shape, groups.kind(n.group)) {
        (Shape::FiniteSet(members), GroupKind::FiniteTable(t)) => {
            let names: Vec<&str> = members.iter().map(|&i| t.name(i)).collect();
            format!("{{{}}}", names.join(", "))
        }
        (Shape::FiniteSet(members), _) => format!("{members:?}"),
        (Shape::Interval { center, radius }, _) => {
            format!("({}, {})", format_rational(&(center - radius)), format_rational(&(center + radius)))
        }
        (Shape::PadicBall { center, level }, GroupKind::RationalPadic { p }) => {
            format!("{} + {p}^{level}·Z_{p}", format_rational(center))
        }
        (Shape::PadicBall { center, level }, _) => format!("ball({}, {level})", format_rational(center)),
    };
    let punct = if n.punctured { " minus 1" } else { "" };
    format!("{}: {body}{punct}", groups.name(n.group))
}

pub fn x_neighborhood(groups: &Groups, w: &XNeighborhood) -> String {
    match w {
        XNeighborhood::AwayFromIdentity(n) => neighborhood(groups, n),
        XNeighborhood::AroundIdentity(cs) => {
            let parts: Vec<String> = cs.iter().map(|n| neighborhood(groups, n)).collect();
            format!("around 1 [{}]", parts.join("; "))
        }
    }
}

pub fn certificate_summary(fp: &FreeProduct, c: &SeparationCertificate) -> String {
    let groups = fp.groups();
    let mut out = format!("word: {}\n", fp.format_word(&c.word));
    let targets: Vec<String> = c.forbidden.iter().map(|f| fp.format_reduced(f)).collect();
    out.push_str(&format!("avoids: {}\n", targets.join(", ")));
    for (m, (l, w)) in c.word.letters.iter().zip(&c.neighborhoods).enumerate() {
        out.push_str(&format!(
            "  {m}: {} in {}  (subterms: {})\n",
            fp.format_letter(l),
            x_neighborhood(groups, w),
            c.provenance[m].len()
        ));
    }
    out
}

pub fn certificate_summary_json(fp: &FreeProduct, c: &SeparationCertificate) -> Json {
    let groups = fp.groups();
    json!({
        "version": REPORT_VERSION,
        "word": tokens(fp, &c.word),
        "forbidden": c.forbidden.iter().map(|f| reduced_tokens(fp, f)).collect::<Vec<_>>(),
        "positions": c.word.letters.iter().zip(&c.neighborhoods).zip(&c.provenance).map(|((l, w), p)| json!({
            "letter": fp.format_letter(l),
            "neighborhood": x_neighborhood(groups, w),
            "subterms": p.len(),
        })).collect::<Vec<_>>(),
    })
}

fn mode_json(mode: CheckMode) -> Json {
    match mode {
        CheckMode::Exhaustive => json!({"kind": "exhaustive"}),
        CheckMode::Sampled { k, seed } => json!({"kind": "sampled", "k": k, "seed": seed}),
        CheckMode::Symbolic => json!({"kind": "symbolic"}),
    }
}

fn mode_text(mode: CheckMode) -> String {
    match mode {
        CheckMode::Exhaustive => "exhaustive".into(),
        CheckMode::Sampled { k, seed } => format!("sampled (k = {k}, seed = {seed})"),
        CheckMode::Symbolic => "symbolic".into(),
    }
}

fn violation_text(fp: &FreeProduct, forbidden: &[ReducedWord], v: &Violation) -> String {
    format!(
        "violation: selection `{}` reduces to `{}`",
        fp.format_word(&Word::new(v.selection.clone())),
        fp.format_reduced(&forbidden[v.forbidden_index])
    )
}

pub fn report_text(fp: &FreeProduct, forbidden: &[ReducedWord], r: &VerificationReport) -> String {
    let mut out = format!(
        "mode: {}\nselections checked: {}\nviolations: {}\n",
        mode_text(r.mode),
        r.selections_checked,
        r.violations.len()
    );
    for v in r.violations.iter().take(10) {
        out.push_str(&violation_text(fp, forbidden, v));
        out.push('\n');
    }
    out.push_str(if r.passed() { "result: ok\n" } else { "result: FAILED\n" });
    out
}

pub fn report_json(fp: &FreeProduct, forbidden: &[ReducedWord], r: &VerificationReport) -> Json {
    json!({
        "version": REPORT_VERSION,
        "mode": mode_json(r.mode),
        "selections_checked": r.selections_checked,
        "violations": r.violations.iter().map(|v| json!({
            "selection": v.selection.iter().map(|l| fp.format_letter(l)).collect::<Vec<_>>(),
            "forbidden": reduced_tokens(fp, &forbidden[v.forbidden_index]),
        })).collect::<Vec<_>>(),
        "elapsed_ms": r.elapsed.as_secs_f64() * 1000.0,
        "passed": r.passed(),
    })
}

pub fn suite_text(r: &SuiteReport) -> String {
    let counts: Vec<String> = r.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut out = format!(
        "{}: {} cases, {} failures{}",
        r.suite,
        r.cases,
        r.failures,
        if counts.is_empty() { String::new() } else { format!(" [{}]", counts.join(", ")) }
    );
    if let Some(c) = &r.counterexample {
        out.push_str(&format!("\n  counterexample: {c}"));
    }
    out
}

pub fn suite_json(r: &SuiteReport) -> Json {
    json!({
        "suite": r.suite.name(),
        "cases": r.cases,
        "failures": r.failures,
        "counterexample": r.counterexample,
        "counts": r.counts,
        "elapsed_ms": r.elapsed.as_secs_f64() * 1000.0,
        "passed": r.passed(),
    })
}
