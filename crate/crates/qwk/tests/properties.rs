use proptest::prelude::*;
use qwk::algebra::{coeff_extract, parse_rat, poly_mul, rat, GaussRat, MultiPoly, Truncation};
use qwk::qkdv::{hamiltonian_density, integrate_hamiltonian};
use qwk::special::{ehrhart_brute_force, ehrhart_convolution};
use qwk::symbols::{
    d_dp0, d_x, eval_string_point, from_diff_poly, slot_vars, sym_equal, symmetrize, to_diff_poly, DiffPoly,
    FourierSymbol, Kind, SymbolTerm,
};

const XYZ: [&str; 3] = ["x", "y", "z"];

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| GaussRat::new(rat(a, b), rat(c, d)))
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=3, 3), gauss()), 0..5).prop_map(|terms| {
        terms.into_iter().fold(MultiPoly::zero(), |acc, (e, c)| &acc + &MultiPoly::monomial(&XYZ, &e, c))
    })
}

fn symbol(kind: Kind) -> impl Strategy<Value = FourierSymbol> {
    let term = (0u32..=2, 1usize..=3).prop_flat_map(|(g, m)| {
        prop::collection::vec((prop::collection::vec(0u32..=2, m), -4i64..=4), 1..4).prop_map(move |monos| {
            let vars = slot_vars(m);
            let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
            let c = monos
                .into_iter()
                .fold(MultiPoly::zero(), |acc, (e, k)| &acc + &MultiPoly::monomial(&names, &e, GaussRat::int(k)));
            SymbolTerm::new(g, m, c).unwrap()
        })
    });
    prop::collection::vec(term, 1..3).prop_map(move |t| FourierSymbol::new(kind, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn gauss_norm_is_multiplicative(a in gauss(), b in gauss()) {
        let ab = &a * &b;
        prop_assert_eq!(&ab * &ab.conj(), &(&a * &a.conj()) * &(&b * &b.conj()));
        prop_assert_eq!(ab.norm_sq(), a.norm_sq() * b.norm_sq());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn product_is_dense_convolution(
        a in prop::collection::vec(prop::collection::vec(-5i64..=5, 4), 4),
        b in prop::collection::vec(prop::collection::vec(-5i64..=5, 4), 4),
    ) {
        let dense = |m: &Vec<Vec<i64>>| {
            let mut p = MultiPoly::zero();
            for (i, row) in m.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    p = &p + &MultiPoly::monomial(&["x", "y"], &[i as u32, j as u32], GaussRat::int(*c));
                }
            }
            p
        };
        let prod = poly_mul(&dense(&a), &dense(&b)).unwrap();
        for k in 0..7usize {
            for l in 0..7usize {
                let mut want = 0i64;
                for i in 0..4usize {
                    for j in 0..4usize {
                        if k >= i && l >= j && k - i < 4 && l - j < 4 {
                            want += a[i][j] * b[k - i][l - j];
                        }
                    }
                }
                let got = coeff_extract(&prod, &[("x", k as u32), ("y", l as u32)]).unwrap();
                prop_assert_eq!(got, GaussRat::int(want));
            }
        }
    }

    #[test]
    fn truncated_product_is_truncated_exact_product(a in poly(), b in poly(), bx in 0u32..4, tot in 0u32..7) {
        for t in [Truncation::per_var(&[("x", bx)]), Truncation::total(&["y", "z"], tot)] {
            let at = a.clone().with_truncation(t.clone());
            let bt = b.clone().with_truncation(t.clone());
            prop_assert_eq!(&at * &bt, (&a * &b).with_truncation(t));
        }
    }

    #[test]
    fn rationals_round_trip_through_text(a in gauss()) {
        prop_assert_eq!(parse_rat(&a.re.to_string()).unwrap(), a.re.clone());
        prop_assert_eq!(a.to_string().parse::<GaussRat>().unwrap(), a);
    }

    #[test]
    fn symmetrize_is_idempotent_and_invisible_at_the_string_point(s in symbol(Kind::Density)) {
        let once = symmetrize(&s);
        prop_assert_eq!(symmetrize(&once), once.clone());
        prop_assert!(sym_equal(&once, &s));
        prop_assert_eq!(eval_string_point(&once), eval_string_point(&s));
    }

    #[test]
    fn x_derivative_matches_p0_derivative_at_the_string_point(s in symbol(Kind::Density)) {
        prop_assert_eq!(eval_string_point(&d_x(&s).unwrap()), eval_string_point(&d_dp0(&s)));
    }

    #[test]
    fn diff_poly_round_trips(s in symbol(Kind::Density)) {
        let d = to_diff_poly(&s);
        prop_assert!(sym_equal(&from_diff_poly(&d), &s));
        prop_assert_eq!(to_diff_poly(&from_diff_poly(&d)), d);
    }

    #[test]
    fn ehrhart_matches_enumeration(r in prop::collection::vec(0u32..=3, 1..=4), n in 0i64..=20) {
        let e = ehrhart_convolution(&r).unwrap();
        prop_assume!(n >= 1 || r.iter().any(|x| *x > 0));
        prop_assert_eq!(e.eval(n), ehrhart_brute_force(&r, n));
        prop_assert_eq!(e.poly.degree_in("N"), Some(e.expected_degree()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn variational_derivative_matches_mode_derivative(seed in any::<u64>()) {
        let rep = qwk::identities::check_variational(seed, 8).unwrap();
        prop_assert!(rep.passed(), "{}", rep);
    }
}

#[test]
fn diff_poly_examples() {
    let u0sq = DiffPoly::monomial(0, &[0, 0], GaussRat::frac(1, 2));
    assert_eq!(to_diff_poly(&from_diff_poly(&u0sq)), u0sq);
    assert_eq!(from_diff_poly(&DiffPoly::monomial(0, &[0], GaussRat::int(1))), FourierSymbol::u0());
}

#[test]
fn string_lemma() {
    for d in 0..=6 {
        assert_eq!(d_dp0(&hamiltonian_density(d).unwrap()), hamiltonian_density(d - 1).unwrap(), "d = {d}");
    }
    let hbar = integrate_hamiltonian(&hamiltonian_density(2).unwrap()).unwrap();
    assert!(integrate_hamiltonian(&hbar).is_err());
}
