mod common;

use common::{oracle_instances, w2_vertex_enumeration};
use qot::classical::{w2_discrete, w2_discrete_with, PivotRule};

#[test]
fn network_simplex_matches_vertex_enumeration() {
    for (mu, nu) in oracle_instances(12, 6) {
        let exact = w2_vertex_enumeration(&mu, &nu);
        for rule in [PivotRule::BlockSearch, PivotRule::Bland] {
            let r = w2_discrete_with(&mu, &nu, rule).unwrap();
            assert!(
                (r.value - exact).abs() <= 1e-10,
                "{rule:?}: {} vs {exact} for {}x{}",
                r.value,
                mu.len(),
                nu.len()
            );
            assert!(r.plan.feasibility_error(&mu, &nu) <= 1e-10);
        }
    }
}

#[test]
fn oracle_on_a_hand_instance() {
    // two unit masses swapped along a line: the cheap plan keeps them in place
    let mu = qot::classical::DiscreteMeasure::uniform(vec![qot::C64::new(0.0, 0.0), qot::C64::new(1.0, 0.0)]).unwrap();
    let nu = qot::classical::DiscreteMeasure::uniform(vec![qot::C64::new(0.0, 1.0), qot::C64::new(1.0, 1.0)]).unwrap();
    assert!((w2_vertex_enumeration(&mu, &nu) - 1.0).abs() < 1e-14);
    assert!((w2_discrete(&mu, &nu).unwrap().value - 1.0).abs() < 1e-14);
}
