//! Acceptance gate: every release-blocking property runs here at its full
//! trial count, printing one pass/fail line per criterion.

use quiver_flow::verify::{run_verify_suite, VerifyConfig};

struct Criterion {
    number: usize,
    title: &'static str,
    suite: &'static str,
    trials: usize,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        number: 1,
        title: "adjointness pairings at 1e-9",
        suite: "adjointness",
        trials: 1000,
    },
    Criterion {
        number: 2,
        title: "exact linearisation of the relation map at 1e-12",
        suite: "linearise",
        trials: 500,
    },
    Criterion {
        number: 3,
        title: "index identity h0-h1+h2 with margin-gated samples",
        suite: "index",
        trials: 200,
    },
    Criterion {
        number: 4,
        title: "cokernel dimension formula on stable samples",
        suite: "cokernel",
        trials: 100,
    },
    Criterion {
        number: 5,
        title: "flow behaviour: worked start, monotonicity, drift, HN agreement",
        suite: "flow-jordan",
        trials: 100,
    },
    Criterion {
        number: 6,
        title: "adjacent slice directions flow to the adjacent label",
        suite: "adjacent-flow",
        trials: 50,
    },
    Criterion {
        number: 7,
        title: "hessian index equals twice the ambient slice dimension",
        suite: "hessian-slice",
        trials: 20,
    },
    Criterion {
        number: 8,
        title: "tubular bundle split rank_V = rank_D + rank_T",
        suite: "transversality",
        trials: 50,
    },
    Criterion {
        number: 9,
        title: "expansion/restriction calculus and restricted surjectivity",
        suite: "expansion",
        trials: 50,
    },
    Criterion {
        number: 10,
        title: "convolution ledger worked values, reproducible bytes",
        suite: "ledger-jordan",
        trials: 3,
    },
];

const ACCEPTANCE_SEED: u64 = 20250810;

#[test]
fn acceptance_criteria() {
    let mut failures = Vec::new();
    for c in CRITERIA {
        let mut cfg = VerifyConfig::new(c.suite, ACCEPTANCE_SEED);
        cfg.trials = Some(c.trials);
        let start = std::time::Instant::now();
        match run_verify_suite(&cfg) {
            Ok(report) => {
                let status = if report.ok() { "PASS" } else { "FAIL" };
                println!(
                    "criterion {:>2} {status} [{:>8.2?}] {} ({} trials)",
                    c.number,
                    start.elapsed(),
                    c.title,
                    c.trials
                );
                for check in &report.checks {
                    println!(
                        "              [{}] {}: {}",
                        if check.pass { "ok" } else { "XX" },
                        check.name,
                        check.detail
                    );
                }
                if !report.ok() {
                    failures.push(c.number);
                }
            }
            Err(e) => {
                println!("criterion {:>2} ERROR {}: {e}", c.number, c.title);
                failures.push(c.number);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
