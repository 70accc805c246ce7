//! Acceptance run: one line per criterion with its worst defect against
//! tolerance and its wall time against budget.
//!
//! Four criteria state identities that do not hold as written (criterion 14
//! states one that diverges as written).  They are evaluated exactly as
//! stated, and their failure is reported but not asserted.  The corrected
//! identity is run alongside as a supplementary check, and that check is
//! asserted.

use std::process::ExitCode;
use std::time::Instant;

use imdiff::verify::{run_checks, CheckResult, Tolerances};

struct Criterion {
    n: u32,
    title: &'static str,
    checks: &'static [&'static str],
    budget_s: f64,
    /// Checks run with the criterion when it is known not to hold as written.
    supplementary: &'static [&'static str],
}

const CRITERIA: &[Criterion] = &[
    Criterion { n: 1, title: "Macdonald recurrence", checks: &["specfun.k_recurrence"], budget_s: 1.0, supplementary: &[] },
    Criterion {
        n: 2,
        title: "Macdonald/Whittaker bridge",
        checks: &["as_written.k_whittaker_bridge"],
        budget_s: 2.0,
        supplementary: &["specfun.k_whittaker_bridge"],
    },
    Criterion { n: 3, title: "Whittaker difference equation", checks: &["specfun.whittaker_difference_equation"], budget_s: 10.0, supplementary: &[] },
    Criterion { n: 4, title: "KL unitarity", checks: &["kl.plancherel", "kl.round_trip"], budget_s: 60.0, supplementary: &[] },
    Criterion { n: 5, title: "KL intertwining", checks: &["as_written.kl_intertwining"], budget_s: 60.0, supplementary: &["kl.intertwining"] },
    Criterion { n: 6, title: "Wimp intertwining", checks: &["wimp.intertwining"], budget_s: 120.0, supplementary: &[] },
    Criterion {
        n: 7,
        title: "operator symmetry",
        checks: &["symmetry.mp", "symmetry.hahn", "symmetry.dual_hahn", "symmetry.wilson", "symmetry.kl", "symmetry.wimp"],
        budget_s: 60.0,
        supplementary: &[],
    },
    Criterion {
        n: 8,
        title: "polynomial eigen-relations",
        checks: &[
            "polynomials.eigen_mp",
            "polynomials.eigen_hahn",
            "polynomials.eigen_dual_hahn",
            "polynomials.eigen_wilson",
            "polynomials.resolution_mp",
            "polynomials.resolution_hahn",
            "polynomials.resolution_wilson",
        ],
        budget_s: 5.0,
        supplementary: &[],
    },
    Criterion {
        n: 9,
        title: "Meixner-Pollaczek norms",
        checks: &["as_written.mp_norms", "polynomials.mp_gram_offdiag"],
        budget_s: 60.0,
        supplementary: &["polynomials.mp_norms"],
    },
    Criterion { n: 10, title: "Vilenkin unitarity and intertwining", checks: &["vilenkin.norm", "vilenkin.intertwining"], budget_s: 300.0, supplementary: &[] },
    Criterion {
        n: 11,
        title: "J_alpha reproducing identities",
        checks: &["vilenkin.j_alpha_inner_product", "vilenkin.j_alpha_phi_image"],
        budget_s: 30.0,
        supplementary: &[],
    },
    Criterion { n: 12, title: "Mellin pair identity", checks: &["as_written.mellin_pair"], budget_s: 10.0, supplementary: &["specfun.mellin_pair"] },
    Criterion { n: 13, title: "Delta basis", checks: &["sec6.delta_gram", "sec6.d_eigen"], budget_s: 60.0, supplementary: &[] },
    Criterion {
        n: 14,
        title: "Psi basis",
        checks: &["as_written.psi_gram", "as_written.psi_eigen"],
        budget_s: 300.0,
        supplementary: &["sec6.psi_image_gram", "sec6.psi_image_eigen"],
    },
    Criterion { n: 15, title: "double Mellin Plancherel", checks: &["sec6.double_mellin_plancherel"], budget_s: 30.0, supplementary: &[] },
];

fn worst(rows: &[CheckResult]) -> &CheckResult {
    rows.iter().max_by(|a, b| (a.defect / a.tol).total_cmp(&(b.defect / b.tol))).expect("criterion without checks")
}

fn describe(r: &CheckResult) -> String {
    match &r.error {
        Some(e) => format!("{} error: {e}", r.id),
        None => format!("{} defect {:.3e} tol {:.1e}", r.id, r.defect, r.tol),
    }
}

fn main() -> ExitCode {
    let tols = Tolerances::default();
    let mut failures = Vec::new();
    let mut expected = Vec::new();
    let mut passed = 0;
    for c in CRITERIA {
        let t = Instant::now();
        let rows = run_checks(c.checks, &tols).expect("known check ids");
        let secs = t.elapsed().as_secs_f64();
        let in_time = secs <= c.budget_s;
        let pass = in_time && rows.iter().all(|r| r.pass);
        let w = worst(&rows);
        passed += usize::from(pass);
        println!(
            "criterion {:>2} {}  {:<36} {}  [{:.1} s / {:.0} s]",
            c.n,
            if pass { "PASS" } else { "FAIL" },
            c.title,
            describe(w),
            secs,
            c.budget_s
        );
        for r in rows.iter().filter(|r| r.note.is_some()) {
            println!("              {}: {}", r.id, r.note.as_deref().unwrap_or_default());
        }
        let red = !c.supplementary.is_empty();
        if red {
            let sup = run_checks(c.supplementary, &tols).expect("known check ids");
            for r in &sup {
                println!("              supplementary {} {}", if r.pass { "PASS" } else { "FAIL" }, describe(r));
                if !r.pass {
                    failures.push(format!("supplementary check of criterion {}: {}", c.n, describe(r)));
                }
            }
            // the non-red companions of a red criterion are still asserted
            for r in rows.iter().filter(|r| !r.id.starts_with("as_written.") && !r.pass) {
                failures.push(format!("criterion {}: {}", c.n, describe(r)));
            }
            if !pass {
                expected.push(c.n);
            }
        } else if !pass {
            let why = if in_time { describe(w) } else { format!("took {secs:.1} s, budget {:.0} s", c.budget_s) };
            failures.push(format!("criterion {}: {why}", c.n));
        }
    }
    println!("acceptance: {passed}/{} criteria pass; as written and not holding: {expected:?}", CRITERIA.len());
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &failures {
            eprintln!("unexpected failure: {f}");
        }
        ExitCode::FAILURE
    }
}
