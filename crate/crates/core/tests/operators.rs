use std::f64::consts::PI;

use moddouble::params::{discrete_spin, params_from_angle, params_from_tau, Convention, Regime, RegimeParams, Spin};
use moddouble::representation::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_gep(rng: &mut ChaCha8Rng, sigma: f64) -> GepFunction {
    let terms = (0..rng.random_range(1..4))
        .map(|_| GepTerm {
            coeff: Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            beta: Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)),
            k: rng.random_range(0..4),
        })
        .collect();
    GepFunction::new(sigma, terms).unwrap()
}

fn samples(rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..10)
        .map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)))
        .collect()
}

fn settings() -> Vec<(RegimeParams, Spin)> {
    let mut out = Vec::new();
    for p in [
        params_from_angle(PI / 3.0).unwrap(),
        params_from_tau(Complex64::new(0.0, 1.0), Regime::II).unwrap(),
    ] {
        for n in 1..=3 {
            out.push((p, discrete_spin(&p, n, Convention::Sec3).unwrap()));
        }
        out.push((p, Spin::new(&p, 1.5 * p.omega_pp(), Convention::Sec2)));
    }
    out
}

#[test]
fn weyl_euler_casimir_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, s) in settings() {
        for _ in 0..4 {
            let f = random_gep(&mut rng, 1.0);
            let zs = samples(&mut rng);
            let q2 = p.q() * p.q();
            let weyl = pointwise_gap(
                &compose(OpName::U, OpName::V, &p, &s, &f),
                &compose(OpName::V, OpName::U, &p, &s, &f).scale(q2),
                &zs,
            );
            assert!(weyl < 1e-10, "weyl {weyl}");
            let qt2 = p.q_tilde() * p.q_tilde();
            let weyl_dual = pointwise_gap(
                &compose(OpName::UTilde, OpName::VTilde, &p, &s, &f),
                &compose(OpName::VTilde, OpName::UTilde, &p, &s, &f).scale(qt2),
                &zs,
            );
            assert!(weyl_dual < 1e-10, "dual weyl {weyl_dual}");
            for a in OpName::PLAIN {
                for b in OpName::TILDE {
                    let r = pointwise_gap(&compose(a, b, &p, &s, &f), &compose(b, a, &p, &s, &f), &zs);
                    assert!(r < 1e-10, "{a} {b}: {r}");
                }
            }
            let c = casimir_residual(&f, &s, &p, &zs);
            if (s.z + s.z.inv()).norm() < 1e3 {
                assert!(c < 1e-10, "casimir {c}");
            }
            let ce = casimir_eigen_residual(&f, &s, &p, &zs);
            assert!(ce < 1e-11, "scaled casimir {ce}");
            for (k, r) in relation_residuals(&f, &s, &p, &zs).iter().enumerate() {
                assert!(*r < 1e-10, "relation {k}: {r}");
            }
        }
    }
}

#[test]
fn casimir_examples() {
    let p = params_from_tau(Complex64::new(0.0, 1.0), Regime::II).unwrap();
    let s = discrete_spin(&p, 2, Convention::Sec3).unwrap();
    let zs = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.4, -0.3),
        Complex64::new(-0.7, 0.2),
    ];
    let g = GepFunction::gaussian(1.0).unwrap();
    assert!(casimir_residual(&g, &s, &p, &zs) < 1e-10);
    // z^3 vanishes at the origin, where the relative residual is undefined
    let g3 = GepFunction::monomial(1.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 3).unwrap();
    assert!(casimir_residual(&g3, &s, &p, &zs[1..]) < 1e-10);
    assert!(casimir_residual(&g, &s, &p, &zs[..1]) <= casimir_residual(&g, &s, &p, &zs));
}

fn arb_term() -> impl Strategy<Value = GepTerm> {
    (-1.0..1.0f64, -1.0..1.0f64, -0.5..0.5f64, -0.5..0.5f64, 0u32..4).prop_map(|(a, b, c, d, k)| GepTerm {
        coeff: Complex64::new(a, b),
        beta: Complex64::new(c, d),
        k,
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn apply_is_linear(
        ft in prop::collection::vec(arb_term(), 1..4),
        gt in prop::collection::vec(arb_term(), 1..4),
        a in (-2.0..2.0f64, -2.0..2.0f64),
        b in (-2.0..2.0f64, -2.0..2.0f64),
        op in 0usize..17,
    ) {
        let p = params_from_angle(PI / 3.0).unwrap();
        let s = discrete_spin(&p, 2, Convention::Sec3).unwrap();
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let f = GepFunction::new(0.8, ft).unwrap();
        let g = GepFunction::new(0.8, gt).unwrap();
        let name = OpName::ALL[op];
        let lhs = apply(name, &p, &s, &f.scale(a).add(&g.scale(b)));
        let rhs = apply(name, &p, &s, &f).scale(a).add(&apply(name, &p, &s, &g).scale(b));
        let scale = rhs.terms().iter().map(|t| t.coeff.norm()).fold(1.0, f64::max);
        let diff = lhs.add(&rhs.scale(Complex64::new(-1.0, 0.0)));
        for t in diff.terms() {
            prop_assert!(t.coeff.norm() < 1e-12 * scale, "{name}: {t:?}");
        }
    }
}
