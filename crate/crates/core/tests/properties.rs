use num_complex::Complex64;
use proptest::prelude::*;

use qukit::coherent::generator_matrix;
use qukit::entanglement::project_product;
use qukit::operators::{commutator, DENSE_LIMIT};
use qukit::random::{gaussian, gaussian_vec, random_factors, random_perp, random_state, random_symmetric, rng_for};
use qukit::symmetric::{collective_apply_compressed, collective_matrix, multinomial, symmetric_dim};
use qukit::tensor::{decode_index, fidelity};
use qukit::*;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn dims(max_n: usize, max_k: usize) -> impl Strategy<Value = (usize, usize)> {
    (1..=max_n, 2..=max_k)
}

fn nonzero_scalar() -> impl Strategy<Value = Complex64> {
    (0.1f64..10.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn site_decompose_roundtrip_and_parseval((n, k) in dims(5, 4), seed in any::<u64>()) {
        let psi = random_state(&mut rng_for(seed, 0), n, k).unwrap().scaled(Complex64::new(1.7, -0.3));
        for site in 1..=n {
            let dec = site_decompose(&psi, site).unwrap();
            prop_assert_eq!(&dec.reassemble(n).unwrap(), &psi);
            let total: f64 = dec.partial_norms().iter().map(|x| x * x).sum();
            prop_assert!((total - psi.norm_sqr()).abs() <= 1e-12 * psi.norm_sqr().max(1.0));
        }
    }

    #[test]
    fn product_of_normalized_factors_has_unit_norm((n, k) in dims(6, 4), seed in any::<u64>()) {
        let psi = make_product_state(&random_factors(&mut rng_for(seed, 0), n, k).unwrap()).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn collective_operators_preserve_symmetry((n, k) in dims(5, 3), seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let sym = random_symmetric(&mut rng, n, k).unwrap();
        let op = SiteOperator::new(k, gaussian_vec(&mut rng, k * k)).unwrap();
        let out = collective_apply(&op, &expand(&sym).unwrap()).unwrap();
        let (projected, residual) = project_symmetric(&out).unwrap();
        prop_assert!(residual <= 1e-10 * out.norm().max(1.0));
        let compressed = collective_apply_compressed(&op, &sym).unwrap();
        prop_assert!(expand(&compressed).unwrap().distance(&out).unwrap() <= 1e-10);
        prop_assert!(expand(&projected).unwrap().distance(&out).unwrap() <= 1e-10);
    }

    #[test]
    fn projector_is_idempotent((n, k) in dims(5, 3), seed in any::<u64>()) {
        let psi = random_state(&mut rng_for(seed, 0), n, k).unwrap();
        let (once, _) = project_symmetric(&psi).unwrap();
        let (twice, residual) = project_symmetric(&expand(&once).unwrap()).unwrap();
        prop_assert!(residual <= 1e-12);
        let diff: f64 = once.coeffs().iter().zip(twice.coeffs()).map(|(a, b)| (a - b).norm_sqr()).sum();
        prop_assert!(diff.sqrt() <= 1e-12);
    }

    #[test]
    fn displacement_is_unitary((n, k) in (2..=5usize, 2..=4usize), seed in any::<u64>()) {
        let eta = gaussian_vec(&mut rng_for(seed, 0), k - 1);
        let psi = coherent_displace(&DisplacementParams::new(n, k, eta).unwrap()).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn coherent_normalization_identity((n, k) in (1..=8usize, 2..=5usize), seed in any::<u64>()) {
        let tau = gaussian_vec(&mut rng_for(seed, 0), k - 1);
        let sym = coherent_coefficients(&CoherentParams::new(n, k, tau).unwrap()).unwrap();
        let total: f64 = sym
            .basis()
            .occupations()
            .iter()
            .zip(sym.coeffs())
            .map(|(occ, c)| c.norm_sqr() * multinomial(occ.counts()) as f64)
            .sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn generator_is_anti_hermitian((n, k) in (1..=6usize, 2..=4usize), seed in any::<u64>()) {
        let eta = gaussian_vec(&mut rng_for(seed, 0), k - 1);
        let g = generator_matrix(&DisplacementParams::new(n, k, eta).unwrap()).unwrap();
        prop_assert_eq!(g.clone(), -g.adjoint());
    }

    #[test]
    fn three_routes_agree_via_recovered_tau((n, k) in (2..=5usize, 2..=4usize), seed in any::<u64>()) {
        let eta: Vec<Complex64> = gaussian_vec(&mut rng_for(seed, 0), k - 1).iter().map(|e| e * 0.4).collect();
        let disp = DisplacementParams::new(n, k, eta).unwrap();
        let params = tau_from_displacement(&disp).unwrap();
        let product = coherent_product(&params).unwrap();
        let formula = expand(&coherent_coefficients(&params).unwrap()).unwrap();
        let displaced = coherent_displace(&disp).unwrap();
        prop_assert!(fidelity(&product, &formula).unwrap() >= 1.0 - 1e-10);
        prop_assert!(fidelity(&product, &displaced).unwrap() >= 1.0 - 1e-10);
        prop_assert!(fidelity(&formula, &displaced).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn product_verdict_reconstructs((n, k) in dims(5, 3), seed in any::<u64>()) {
        let psi = make_product_state(&random_factors(&mut rng_for(seed, 0), n, k).unwrap()).unwrap();
        let cls = is_product(&psi, DEFAULT_TOL).unwrap();
        prop_assert_eq!(cls.verdict, Verdict::Product);
        let rebuilt = make_product_state(cls.factors.as_ref().unwrap()).unwrap();
        prop_assert!(fidelity(&psi, &rebuilt).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn verdicts_are_scale_invariant((n, k) in (2..=4usize, 2..=3usize), seed in any::<u64>(), c in nonzero_scalar()) {
        let mut rng = rng_for(seed, 0);
        let product = make_product_state(&random_factors(&mut rng, n, k).unwrap()).unwrap();
        let generic = random_state(&mut rng, n, k).unwrap();
        for psi in [product, generic] {
            prop_assert_eq!(
                is_product(&psi, DEFAULT_TOL).unwrap().verdict,
                is_product(&psi.scaled(c), DEFAULT_TOL).unwrap().verdict
            );
        }
        let params = CoherentParams::new(n, k, gaussian_vec(&mut rng, k - 1)).unwrap();
        for sym in [coherent_coefficients(&params).unwrap(), random_symmetric(&mut rng, n, k).unwrap()] {
            prop_assert_eq!(
                classify_symmetric(&sym, DEFAULT_TOL).unwrap().is_coherent(),
                classify_symmetric(&sym.scaled(c), DEFAULT_TOL).unwrap().is_coherent()
            );
        }
    }

    #[test]
    fn verdicts_are_chart_invariant(
        (n, k) in (2..=5usize, 2..=4usize),
        seed in any::<u64>(),
        relabel in Just((1..=4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let relabel: Vec<usize> = relabel.into_iter().filter(|&l| l <= k).collect();
        let mut rng = rng_for(seed, 0);
        let params = CoherentParams::new(n, k, gaussian_vec(&mut rng, k - 1)).unwrap();
        let coherent = coherent_coefficients(&params).unwrap();
        let generic = random_symmetric(&mut rng, n, k).unwrap();
        for sym in [coherent, generic] {
            let before = classify_symmetric(&sym, DEFAULT_TOL).unwrap();
            let after = classify_symmetric(&sym.relabeled(&relabel).unwrap(), DEFAULT_TOL).unwrap();
            prop_assert_eq!(before.is_coherent(), after.is_coherent());
        }
    }
}

#[test]
fn basis_index_is_a_bijection() {
    for n in 1..=4 {
        for k in 2..=3usize {
            for i in 0..k.pow(n as u32) {
                let word = decode_index(i, n, k).unwrap();
                assert_eq!(basis_index(&word, k).unwrap(), i);
            }
        }
    }
}

#[test]
fn matrix_free_matches_dense() {
    let mut rng = rng_for(11, 0);
    for draw in 0..100 {
        let n = 1 + draw % 4;
        let k = 2 + draw % 2;
        let op = SiteOperator::new(k, gaussian_vec(&mut rng, k * k)).unwrap();
        let psi = random_state(&mut rng, n, k).unwrap();
        let dense = collective_dense(&op, n).unwrap();
        let expected = &dense * nalgebra::DVector::from_column_slice(psi.amps());
        let got = collective_apply(&op, &psi).unwrap();
        let err: f64 = got.amps().iter().zip(expected.iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(err.sqrt() <= 1e-12, "draw {draw}: {}", err.sqrt());
    }
}

#[test]
fn dense_guard() {
    let op = SiteOperator::identity(2).unwrap();
    assert!(collective_dense(&op, 12).is_ok());
    assert!(2usize.pow(13) > DENSE_LIMIT);
    assert!(matches!(collective_dense(&op, 13), Err(Error::Size(_))));
}

#[test]
fn commutator_identity_for_all_pairs() {
    for k in 2..=4 {
        for i in 1..=k {
            for j in 1..i {
                let e = ladder(i, j, k).unwrap();
                assert_eq!(commutator(&e, &e.adjoint()), cartan(i, j, k).unwrap());
            }
        }
    }
}

#[test]
fn compressed_operator_matrix_matches_full_space() {
    let mut rng = rng_for(12, 0);
    for (n, k) in [(3, 2), (3, 3), (4, 3), (2, 4)] {
        let op = SiteOperator::new(k, gaussian_vec(&mut rng, k * k)).unwrap();
        let m = collective_matrix(&op, n).unwrap();
        let sym = random_symmetric(&mut rng, n, k).unwrap();
        let out = &m * nalgebra::DVector::from_vec(sym.to_orthonormal());
        let via_matrix = SymStateCompressed::from_orthonormal(n, k, out.iter().copied().collect()).unwrap();
        let direct = collective_apply(&op, &expand(&sym).unwrap()).unwrap();
        assert!(expand(&via_matrix).unwrap().distance(&direct).unwrap() <= 1e-10);
    }
}

#[test]
fn dicke_gram_is_identity() {
    for n in 1..=4 {
        for k in 2..=3 {
            let states: Vec<_> = enumerate_occupations(n, k).iter().map(|o| dicke_normalized(o).unwrap()).collect();
            for (a, x) in states.iter().enumerate() {
                for (b, y) in states.iter().enumerate() {
                    let g = inner_product(x, y).unwrap();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((g - Complex64::new(expected, 0.0)).norm() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn dicke_norms_sum_to_full_dimension() {
    for n in 1..=6 {
        for k in 2..=4usize {
            let total: u128 = enumerate_occupations(n, k).iter().map(|o| multinomial(o.counts())).sum();
            assert_eq!(total, (k as u128).pow(n as u32));
            assert_eq!(enumerate_occupations(n, k).len() as u128, symmetric_dim(n, k));
        }
    }
}

#[test]
fn oracle_agrees_with_is_product() {
    let mut rng = rng_for(13, 0);
    for draw in 0..500 {
        let n = 2 + draw % 3;
        let k = 2 + draw % 2;
        let product = make_product_state(&random_factors(&mut rng, n, k).unwrap()).unwrap();
        let generic = random_state(&mut rng, n, k).unwrap();
        for (psi, expected) in [(product, true), (generic, false)] {
            let fast = is_product(&psi, DEFAULT_TOL).unwrap().verdict == Verdict::Product;
            let oracle = brute_force_is_product(&psi, DEFAULT_TOL).unwrap();
            assert_eq!(fast, oracle, "draw {draw}");
            assert_eq!(fast, expected, "draw {draw}");
        }
    }
}

#[test]
fn perp_states_are_entangled_and_orthogonal_to_products() {
    let mut rng = rng_for(14, 0);
    for (n, k) in [(2, 2), (3, 2), (3, 3), (4, 2), (2, 4)] {
        for _ in 0..50 {
            let perp = random_perp(&mut rng, n, k).unwrap();
            let (sym, _) = project_symmetric(&perp).unwrap();
            assert!(sym.norm_sqr() <= 1e-24);
            assert_eq!(is_product(&perp, DEFAULT_TOL).unwrap().verdict, Verdict::Entangled);
            assert!(!brute_force_is_product(&perp, DEFAULT_TOL).unwrap());
        }
    }
}

#[test]
fn projected_product_matches_full_projection() {
    let mut rng = rng_for(15, 0);
    for (n, k) in [(2, 2), (3, 3), (4, 2), (3, 4)] {
        let factors = random_factors(&mut rng, n, k).unwrap();
        let (expected, _) = project_symmetric(&make_product_state(&factors).unwrap()).unwrap();
        let got = project_product(&factors).unwrap();
        for (a, b) in got.coeffs().iter().zip(expected.coeffs()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn planted_phases_do_not_hide_products() {
    let mut rng = rng_for(16, 0);
    let params = CoherentParams::new(4, 3, vec![gaussian(&mut rng), ZERO]).unwrap();
    let sym = coherent_coefficients(&params).unwrap().scaled(Complex64::new(0.0, -2.0));
    assert!(classify_symmetric(&sym, DEFAULT_TOL).unwrap().is_coherent());
}
