//! Individual inequality checks and a small seeded suite.
use qot::fock::thermal_state;
use qot::lab::{check_lemma_rx, check_stam, run_suite, tally, wy_consistency, SuiteManifest};
use qot::states::{ginibre, random_hermitian, rng_from_seed};

fn main() -> qot::Result<()> {
    let d = 16;
    let r = check_stam(&thermal_state(0.5, d)?, &thermal_state(1.0, d)?, 0.5, d, 1e-4)?;
    println!("stam: lhs {:.6} rhs {:.6} pass {:?}", r.lhs, r.rhs, r.pass);

    let mut rng = rng_from_seed(3);
    let r = check_lemma_rx(&ginibre(4, 4, &mut rng), &random_hermitian(4, &mut rng), 1e-9)?;
    println!("lemma: margin {:.4e} pass {:?}", r.margin, r.pass);

    let r = wy_consistency(&thermal_state(0.8, 12)?, 1e-8, 1e-4)?;
    println!("wy: {:?}", r.pass);

    let reports = run_suite(&SuiteManifest::smoke(11), 0)?;
    let t = tally(&reports);
    println!("smoke suite: {} reports, {} passed, {} violations, {} inconclusive", t.total, t.passed, t.violations, t.inconclusive);
    Ok(())
}
