use moddouble::weyl::*;
use proptest::prelude::*;

fn coeff(num: i64, den: i64, im: i64, qk: i64) -> QCoefficient {
    &QCoefficient::constant(gq_ratio((num, den), (im, den))) * &QCoefficient::q_pow(qk)
}

fn arb_element() -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec(
        (
            (-2i64..=2, -2i64..=2, -2i64..=2),
            (-3i64..=3, 1i64..=4, -3i64..=3, -2i64..=2),
        ),
        1..4,
    )
    .prop_map(|terms| {
        terms
            .into_iter()
            .fold(AlgebraElement::zero(), |acc, (exp, (n, d, im, qk))| {
                &acc + &AlgebraElement::monomial(exp, coeff(n, d, im, qk))
            })
    })
}

/// Normal-order a word of `u^{+-1}`, `v^{+-1}` by adjacent swaps, returning the
/// accumulated power of `q` and the exponents of `u` and `v`.
fn bubble(word: &[(char, i64)]) -> (i64, i64, i64) {
    let mut w = word.to_vec();
    let mut qexp = 0;
    loop {
        let mut swapped = false;
        for i in 0..w.len().saturating_sub(1) {
            if w[i].0 == 'v' && w[i + 1].0 == 'u' {
                // v^s u^r = q^{-2rs} u^r v^s
                qexp -= 2 * w[i].1 * w[i + 1].1;
                w.swap(i, i + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    let a = w.iter().filter(|l| l.0 == 'u').map(|l| l.1).sum();
    let b = w.iter().filter(|l| l.0 == 'v').map(|l| l.1).sum();
    (qexp, a, b)
}

#[test]
fn reordering_matches_single_swaps() {
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            let mut word: Vec<(char, i64)> = vec![('v', b.signum()); b.unsigned_abs() as usize];
            word.extend(vec![('u', a.signum()); a.unsigned_abs() as usize]);
            let (qexp, ua, vb) = bubble(&word);
            assert_eq!((ua, vb), (a, b));
            let got = AlgebraElement::v(b).multiply(&AlgebraElement::u(a));
            let want = AlgebraElement::monomial((a, b, 0), QCoefficient::q_pow(qexp));
            assert_eq!(got, want, "a={a} b={b}");
        }
    }
}

#[test]
fn small_products() {
    let (u, v) = (AlgebraElement::u(1), AlgebraElement::v(1));
    assert_eq!(
        v.multiply(&u),
        AlgebraElement::monomial((1, 1, 0), QCoefficient::q_pow(-2))
    );
    let uv = u.multiply(&v);
    assert_eq!(
        uv.multiply(&uv),
        AlgebraElement::monomial((2, 2, 0), QCoefficient::q_pow(-2))
    );
    let g = build_generators();
    assert_eq!(g.e.multiply(&AlgebraElement::one()), g.e);
    assert_eq!(g.k.multiply(&g.k_inv), AlgebraElement::one());
    assert_eq!(g.k, AlgebraElement::monomial((1, 1, 0), QCoefficient::q_pow(-1)));
    assert_eq!(g.e.len(), 2);
    assert!(!g.e.coefficient((0, 1, 0)).is_zero() && !g.e.coefficient((-1, 0, 1)).is_zero());
}

#[test]
fn relations_and_casimir_are_exact() {
    for r in relation_residuals() {
        assert!(r.is_zero(), "{r}");
    }
    let c = casimir();
    let central = &AlgebraElement::z(1) + &AlgebraElement::z(-1);
    assert!((&c + &central).is_zero());
    assert_eq!(c.coefficient((0, 0, 1)), QCoefficient::constant(gq(-1, 0)));
    let g = build_generators();
    for x in [&g.e, &g.f, &g.k] {
        assert!((&c.multiply(x) - &x.multiply(&c)).is_zero());
    }
}

#[test]
fn golden_text() {
    let g = build_generators();
    assert_eq!(
        g.e.canonical_text(),
        "(i*q)/(q^2 + -1) · u^-1 v^0 Z^1\n(i*q)/(q^2 + -1) · u^0 v^1 Z^0"
    );
    assert_eq!(casimir().canonical_text(), "(-1) · u^0 v^0 Z^-1\n(-1) · u^0 v^0 Z^1");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn associative(x in arb_element(), y in arb_element(), z in arb_element()) {
        prop_assert_eq!(x.multiply(&y).multiply(&z), x.multiply(&y.multiply(&z)));
    }

    #[test]
    fn distributive(x in arb_element(), y in arb_element(), z in arb_element()) {
        prop_assert_eq!(x.multiply(&(&y + &z)), &x.multiply(&y) + &x.multiply(&z));
    }
}
