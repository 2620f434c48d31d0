//! Invariants as property tests. Strategies draw seeds and sizes; the
//! instances themselves come from the library's seeded generators.
mod common;

use proptest::prelude::*;
use qot::classical::{w2_discrete, DiscreteMeasure};
use qot::fock::{fock_mode, gaussian_channel, thermal_state, GaussianChannelKind};
use qot::lab::j_trace_fd;
use qot::linalg::{exp_antihermitian, hermitian_eig, partial_trace, psd_sqrt_default, Factor};
use qot::states::{
    apply_channel, channel_to_coupling, coupling_to_channel_default, ginibre, random_channel, random_density,
    random_density_seeded, random_hermitian, rng_from_seed, swap_transpose,
};
use qot::transport::{affine_project, solve_qot, ADMMConfig, CostOperator};
use qot::{ComplexMatrix, C64};
use rand::Rng;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(cases)
    }
}

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), d in 2usize..=64) {
        let m = random_hermitian(d, &mut rng_from_seed(seed));
        let e = hermitian_eig(&m).unwrap();
        prop_assert!(e.reconstruct().dist(&m) <= 1e-10 * m.frobenius_norm());
    }

    #[test]
    fn psd_sqrt_squares_back(seed in any::<u64>(), d in 1usize..=24, rank in 1usize..=24) {
        let rho = random_density_seeded(d, rank.min(d), seed).unwrap();
        let s = psd_sqrt_default(rho.matrix()).unwrap();
        prop_assert!(s.matmul(&s).dist(rho.matrix()) <= 1e-8 * rho.matrix().frobenius_norm());
    }

    #[test]
    fn partial_trace_is_linear(seed in any::<u64>(), d1 in 1usize..=5, d2 in 1usize..=5, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = rng_from_seed(seed);
        let n = d1 * d2;
        let (a, b) = (ginibre(n, n, &mut rng), ginibre(n, n, &mut rng));
        let mut comb = a.scale(alpha);
        comb.add_scaled(beta, &b);
        for f in [Factor::First, Factor::Second] {
            let lhs = partial_trace(&comb, d1, d2, f).unwrap();
            let mut rhs = partial_trace(&a, d1, d2, f).unwrap().scale(alpha);
            rhs.add_scaled(beta, &partial_trace(&b, d1, d2, f).unwrap());
            prop_assert!(lhs.dist(&rhs) <= 1e-13 * (1.0 + comb.frobenius_norm()));
        }
    }

    #[test]
    fn exp_inverse_pair(seed in any::<u64>(), d in 1usize..=16, scale in 0.01f64..5.0) {
        let h = random_hermitian(d, &mut rng_from_seed(seed)).scale(scale);
        let g = h.scale_c(C64::new(0.0, 1.0));
        let u = exp_antihermitian(&g).unwrap();
        let v = exp_antihermitian(&g.scale(-1.0)).unwrap();
        prop_assert!(u.matmul(&v).dist(&ComplexMatrix::identity(d)) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(cfg(50))]

    #[test]
    fn bijection_round_trips(seed in any::<u64>(), d in 2usize..=4, k in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(d, d, &mut rng).unwrap();
        let phi = random_channel(d, d, k, &mut rng).unwrap();
        let pi = channel_to_coupling(&phi, &rho).unwrap();
        let back = channel_to_coupling(&coupling_to_channel_default(&pi, &rho).unwrap(), &rho).unwrap();
        prop_assert!(back.matrix().dist(pi.matrix()) <= 1e-7);
        // channel side, compared through the Choi matrix
        let phi2 = coupling_to_channel_default(&pi, &rho).unwrap();
        prop_assert!(phi2.choi().dist(&phi.choi()) <= 1e-7);
    }

    #[test]
    fn couplings_from_channels_have_the_right_marginals(seed in any::<u64>(), d in 2usize..=4, rank in 1usize..=4, k in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(d, rank.min(d), &mut rng).unwrap();
        let phi = random_channel(d, d, k, &mut rng).unwrap();
        let pi = channel_to_coupling(&phi, &rho).unwrap();
        prop_assert!(pi.marginal_error().unwrap().max_marginal() <= 1e-10);
        let min = hermitian_eig(pi.matrix()).unwrap().min();
        prop_assert!(min >= -1e-9 * pi.matrix().frobenius_norm());
    }

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), din in 1usize..=4, dout in 1usize..=4, k in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        prop_assume!(k * dout >= din);
        let rho = random_density(din, din, &mut rng).unwrap();
        let phi = random_channel(din, dout, k, &mut rng).unwrap();
        let out = apply_channel(&phi, &rho).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(hermitian_eig(out.matrix()).unwrap().min() >= -1e-9 * out.matrix().frobenius_norm());
    }

    #[test]
    fn swap_exchanges_the_marginals(seed in any::<u64>(), d in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(d, d, &mut rng).unwrap();
        let phi = random_channel(d, d, 2, &mut rng).unwrap();
        let pi = channel_to_coupling(&phi, &rho).unwrap();
        let st = swap_transpose(&pi);
        prop_assert!(st.source().matrix().dist(pi.target().matrix()) <= 1e-12);
        prop_assert!(st.target().matrix().dist(pi.source().matrix()) <= 1e-12);
        prop_assert!(st.marginal_error().unwrap().max_marginal() <= 1e-10);
        prop_assert!(swap_transpose(&st).matrix().dist(pi.matrix()) <= 1e-14);
    }
}

proptest! {
    #![proptest_config(cfg(30))]

    #[test]
    fn ladder_commutator_on_interior(d in 2usize..=30) {
        let mode = fock_mode(d).unwrap();
        let c = mode.a().matmul(mode.adag());
        let mut comm = c.clone();
        comm.add_scaled(-1.0, &mode.adag().matmul(mode.a()));
        prop_assert!(comm.corner(d - 1, d - 1).dist(&ComplexMatrix::identity(d - 1)) <= 1e-13 * d as f64);
    }

    #[test]
    fn thermal_quadratures_are_isotropic(nu in 0.5f64..2.0, d in 8usize..=30) {
        let mode = fock_mode(d).unwrap();
        let rho = thermal_state(nu, d);
        prop_assume!(rho.is_ok());
        let rho = rho.unwrap();
        let [q, p] = mode.quadratures();
        let (q2, p2) = (rho.expectation(&q.matmul(&q)).re, rho.expectation(&p.matmul(&p)).re);
        prop_assert!((q2 - p2).abs() <= 1e-12);
    }

    #[test]
    fn attenuators_compose(nu in 0.5f64..1.2, e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0) {
        let d = 24;
        let rho = thermal_state(nu, d).unwrap();
        let att = |eta: f64, r: &qot::states::DensityMatrix| gaussian_channel(GaussianChannelKind::Attenuator { eta }, r, d).unwrap();
        let two = att(e1, &att(e2, &rho));
        let one = att(e1 * e2, &rho);
        prop_assert!(two.matrix().dist(one.matrix()) <= 1e-9);
        prop_assert!((one.matrix().trace().re - 1.0).abs() <= 1e-9);
        // mean photon number scales by the transmissivity
        let n = fock_mode(d).unwrap().number();
        let before = rho.expectation(&n).re;
        prop_assert!((one.expectation(&n).re - e1 * e2 * before).abs() <= 1e-9);
    }
}

fn random_cost(rng: &mut rand_chacha::ChaCha8Rng, d: usize) -> CostOperator {
    CostOperator::new(vec![random_hermitian(d, rng)], 1.0).unwrap()
}

proptest! {
    #![proptest_config(cfg(16))]

    #[test]
    fn value_dominates_the_self_distances(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let (rho, sigma) = (random_density(d, d, &mut rng).unwrap(), random_density(d, d, &mut rng).unwrap());
        let c = random_cost(&mut rng, d);
        let sol = solve_qot(&rho, &sigma, &c, &ADMMConfig::default()).unwrap();
        prop_assume!(sol.converged);
        let half = (c.self_distance(&rho).unwrap() + c.self_distance(&sigma).unwrap()) / 2.0;
        prop_assert!(sol.value >= half - 1e-6, "{} < {}", sol.value, half);
    }

    #[test]
    fn solve_is_symmetric(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let (rho, sigma) = (random_density(d, d, &mut rng).unwrap(), random_density(d, 2, &mut rng).unwrap());
        let c = random_cost(&mut rng, d);
        let cfg = ADMMConfig::default();
        let a = solve_qot(&rho, &sigma, &c, &cfg).unwrap();
        let b = solve_qot(&sigma, &rho, &c, &cfg).unwrap();
        prop_assume!(a.converged && b.converged);
        let tol = cfg.tol_primal.max(cfg.tol_dual) * (1.0 + a.value.abs());
        prop_assert!((a.value - b.value).abs() <= 2.0 * tol, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn affine_projection_hits_the_marginals(seed in any::<u64>(), d1 in 1usize..=5, d2 in 1usize..=5) {
        let mut rng = rng_from_seed(seed);
        let x = random_hermitian(d1 * d2, &mut rng);
        let a = random_density(d1, d1, &mut rng).unwrap();
        let b = random_density(d2, d2, &mut rng).unwrap();
        let p = affine_project(&x, a.matrix(), b.matrix()).unwrap();
        prop_assert!(partial_trace(&p, d1, d2, Factor::Second).unwrap().dist(a.matrix()) <= 1e-12);
        prop_assert!(partial_trace(&p, d1, d2, Factor::First).unwrap().dist(b.matrix()) <= 1e-12);
    }
}

fn measure(rng: &mut rand_chacha::ChaCha8Rng, max_atoms: usize) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms);
    let pts = (0..n).map(|_| C64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
    let w = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    DiscreteMeasure::new(pts, w).unwrap()
}

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn w2_is_a_metric(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (a, b, c) = (measure(&mut rng, 20), measure(&mut rng, 20), measure(&mut rng, 20));
        let w = |x: &DiscreteMeasure, y: &DiscreteMeasure| w2_discrete(x, y).unwrap().value;
        let (ab, ba) = (w(&a, &b), w(&b, &a));
        prop_assert!((ab - ba).abs() <= 1e-9);
        prop_assert!(ab.sqrt() <= w(&a, &c).sqrt() + w(&c, &b).sqrt() + 1e-9);
    }

    #[test]
    fn w2_plans_are_feasible_and_priced(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (a, b) = (measure(&mut rng, 20), measure(&mut rng, 20));
        let r = w2_discrete(&a, &b).unwrap();
        prop_assert!(r.plan.feasibility_error(&a, &b) <= 1e-10);
        prop_assert!(r.plan.entries.iter().all(|e| e.2 >= 0.0));
        let mut direct = 0.0;
        for (i, row) in r.plan.to_dense().iter().enumerate() {
            for (j, m) in row.iter().enumerate() {
                direct += m * (a.points()[i] - b.points()[j]).norm_sqr();
            }
        }
        prop_assert!((direct - r.value).abs() <= 1e-10 * (1.0 + r.value));
    }
}

#[test]
fn thermal_sdp_approaches_the_closed_form_with_cutoff() {
    let closed = qot::transport::thermal_qot(0.5, 1.0, 1).unwrap().value;
    let mut prev = f64::INFINITY;
    for d in [8, 12, 16, 20] {
        let c = CostOperator::gaussian(&fock_mode(d).unwrap()).unwrap();
        let sol = solve_qot(&thermal_state(0.5, d).unwrap(), &thermal_state(1.0, d).unwrap(), &c, &ADMMConfig::default())
            .unwrap();
        let gap = (sol.value - closed).abs();
        assert!(gap < prev, "d = {d}: gap {gap} did not shrink from {prev}");
        prev = gap;
    }
    assert!(prev < 3e-2);
}

#[test]
fn finite_difference_error_is_second_order() {
    let d = 10;
    let c = CostOperator::gaussian(&fock_mode(d).unwrap()).unwrap();
    for seed in [1, 2, 3] {
        let rho = random_density_seeded(d, 2, seed).unwrap();
        let exact = c.commutator_form(&rho).unwrap();
        let e1 = (j_trace_fd(&rho, &c, 2e-2).unwrap() - exact).abs();
        let e2 = (j_trace_fd(&rho, &c, 1e-2).unwrap() - exact).abs();
        assert!(e1 >= 3.0 * e2, "seed {seed}: {e1} then {e2}");
    }
}
