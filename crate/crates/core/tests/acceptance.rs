//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gvs_core::suites::{run_suite, CaseResult, SuiteConfig, SuiteResult};

struct Outcome {
    pass: bool,
    detail: String,
}

fn suites(ids: &[&str], cfg: &SuiteConfig) -> (Vec<SuiteResult>, Duration) {
    let start = Instant::now();
    let results = ids
        .iter()
        .map(|id| run_suite(id, cfg).unwrap_or_else(|e| panic!("suite {id} failed to run: {e}")))
        .collect();
    (results, start.elapsed())
}

fn summary(results: &[SuiteResult]) -> String {
    results
        .iter()
        .map(|r| {
            let ok = r.cases.iter().filter(|c| c.pass).count();
            let mut s = format!("{} {}/{}", r.suite_id, ok, r.cases.len());
            if let Some(bad) = r.cases.iter().find(|c| !c.pass) {
                s.push_str(&format!(
                    " (first failure {}: lhs {:.3e}, rhs {:.3e})",
                    bad.case_id, bad.lhs, bad.rhs
                ));
            }
            s
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn all_pass(results: &[SuiteResult]) -> bool {
    results.iter().all(|r| r.pass)
}

fn worst_ratio<'a>(cases: impl Iterator<Item = &'a CaseResult>) -> f64 {
    cases.map(|c| c.ratio).fold(0.0, f64::max)
}

fn criterion_suites(ids: &[&str], cfg: &SuiteConfig, limit: Option<Duration>) -> Outcome {
    let (results, elapsed) = suites(ids, cfg);
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let mut detail = format!("{} in {:.1} s", summary(&results), elapsed.as_secs_f64());
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {} s)", l.as_secs()));
    }
    Outcome {
        pass: all_pass(&results) && in_time,
        detail,
    }
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let criteria: Vec<Criterion> = vec![
        (
            "eigenrelations by kernel and subordination quadrature, rel err <= 1e-5, < 30 s",
            Box::new(|| criterion_suites(&["eigen-ou", "eigen-ph"], &cfg, Some(Duration::from_secs(30)))),
        ),
        ("moment constants, rel err <= 1e-8, C1 = 2 and C2 = 12", Box::new(|| criterion_suites(&["lemma-moment"], &cfg, None))),
        (
            "stable-derivative degrees 2j - i = k for k <= 8, finite differences within 1e-5",
            Box::new(|| criterion_suites(&["stable-derivatives"], &cfg, None)),
        ),
        (
            "t^k TV constant within 1%, maximal bound refinement-stable within 5%",
            Box::new(|| {
                let (results, _) = suites(&["corollary-tv", "lemma-maximal"], &cfg);
                let spread = worst_ratio(results[0].cases.iter());
                Outcome {
                    pass: all_pass(&results),
                    detail: format!("{}; largest TV max/min {:.6}", summary(&results), spread),
                }
            }),
        ),
        (
            "constant reduction <= 1e-8, (ln 2)^(1/q-) <= |chi| <= 1, Hoelder and Minkowski on 50 random cases each",
            Box::new(|| criterion_suites(&["norm-lemma-i-iv", "holder", "minkowski"], &cfg, None)),
        ),
        (
            "Hardy constants finite with < 2% drift under doubling, r in {0.25, 0.5, 1, 2}, 12 functions",
            Box::new(|| criterion_suites(&["hardy-lower", "hardy-upper"], &cfg, None)),
        ),
        (
            "seminorm equivalence bands drift < 5% under doubling on 10 functions, < 2 min",
            Box::new(|| {
                criterion_suites(&["besov-equivalence", "tl-equivalence"], &cfg, Some(Duration::from_secs(120)))
            }),
        ),
        (
            "B = F on eigenvectors within 1e-6, closed form within 1e-7",
            Box::new(|| {
                let (results, _) = suites(&["hermite-membership"], &cfg);
                let eigen: Vec<&CaseResult> = results[0]
                    .cases
                    .iter()
                    .filter(|c| c.case_id.ends_with(":b=f") || c.case_id.ends_with(":closed-form"))
                    .collect();
                let closed = eigen.iter().filter(|c| c.case_id.ends_with(":closed-form")).count();
                let worst = eigen.iter().map(|c| (c.ratio - 1.0).abs()).fold(0.0, f64::max);
                Outcome {
                    pass: !eigen.is_empty() && closed > 0 && eigen.iter().all(|c| c.pass),
                    detail: format!("{} eigen cases ({closed} closed form), worst rel err {worst:.2e}", eigen.len()),
                }
            }),
        ),
        (
            "inclusions: source finite implies target finite, hypothesis violations rejected",
            Box::new(|| {
                let (results, _) = suites(&["besov-inclusion", "tl-inclusion"], &cfg);
                let rejected = results
                    .iter()
                    .flat_map(|r| &r.cases)
                    .filter(|c| c.case_id.starts_with("reject") || c.case_id.contains(":reject"))
                    .count();
                Outcome {
                    pass: all_pass(&results) && rejected >= 4,
                    detail: format!("{}; {rejected} violating configurations rejected", summary(&results)),
                }
            }),
        ),
        (
            "power identity within 1e-7, log-convexity (constant 2), interpolation (constant 4) incl. variable (p, q)",
            Box::new(|| {
                let (results, _) = suites(&["power-identity", "log-convexity", "interpolation"], &cfg);
                let moment = results[0].cases.iter().any(|c| c.case_id == "h1^2:moment" && c.pass);
                let variable = results[2].cases.iter().any(|c| c.case_id.starts_with("variable-pq") && c.pass);
                Outcome {
                    pass: all_pass(&results) && moment && variable,
                    detail: format!(
                        "{}; |h1^2|_2 = sqrt 3: {moment}; variable (p, q) instance: {variable}",
                        summary(&results)
                    ),
                }
            }),
        ),
    ];

    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        if !out.pass {
            failures += 1;
        }
        println!(
            "[{tag}] criterion {:>2}: {name} | {} | {:.1} s",
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
