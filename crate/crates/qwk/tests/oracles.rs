use num_traits::Zero;
use qwk::algebra::{rat, GaussRat, MultiPoly, Truncation};
use qwk::correlators::{correlator, correlator_table, sorted_tuples, CorrelatorKey, Correlators};
use qwk::hurwitz::{hurwitz_correlator, mu_var, one_part_polynomial};
use qwk::qkdv::nested_bracket;
use qwk::special::{eulerian_numbers, s_scaled, s_series, series_inverse, sinh_series};
use qwk::suites::{dilaton, Grid};

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn eulerian_numbers_count_descents() {
    for n in 0..=7usize {
        let mut counts = vec![0u64; n.max(1)];
        for p in permutations(n) {
            counts[p.windows(2).filter(|w| w[0] > w[1]).count()] += 1;
        }
        let got: Vec<u64> = eulerian_numbers(n as u32).iter().map(|x| x.to_string().parse().unwrap()).collect();
        assert_eq!(got, counts, "n = {n}");
    }
}

#[test]
fn s_series_from_sinh() {
    // S(z) = 2 sh(z/2) / z, so c_{2l} = 2 [z^{2l+1}] sh(z/2).
    let half = MultiPoly::var("z").scale(&GaussRat::frac(1, 2));
    let sh = sinh_series(&half, &Truncation::per_var(&[("z", 17)])).unwrap();
    let s = s_series(16);
    for l in 0..=8u32 {
        let want = sh.coeff_of("z", 2 * l + 1).constant_term().scale(&rat(2, 1));
        assert_eq!(s.coeff_of("z", 2 * l).constant_term(), want, "l = {l}");
        assert!(s.coeff_of("z", 2 * l + 1).is_zero());
    }
}

/// `(Σμ)^{2g−3+n} [z^{2g}] Π S(μ_i z) / S(z)`, rebuilt from the series layer.
fn hurwitz_generating(g: u32, n: usize) -> MultiPoly {
    let order = 2 * g;
    let mut series = series_inverse(&s_series(order), "z", order).unwrap();
    let mut sum = MultiPoly::zero();
    for i in 0..n {
        let m = MultiPoly::var(&mu_var(i));
        series = &series * &s_scaled(&m, "z", order);
        sum = &sum + &m;
    }
    let vars: Vec<String> = (0..n).map(mu_var).collect();
    (&series.coeff_of("z", order) * &sum.pow(2 * g + n as u32 - 3)).align(&vars).unwrap()
}

#[test]
fn hurwitz_interval_and_parity() {
    for g in 0..=2u32 {
        for n in 1..=3usize {
            if 2 * g + (n as u32) < 3 {
                continue;
            }
            let p = hurwitz_generating(g, n);
            let (lo, hi) = (2 * g + n as u32 - 3, 4 * g + n as u32 - 3);
            for d in sorted_tuples(n, 12) {
                let s: u32 = d.iter().sum();
                let mono: Vec<(String, u32)> = d.iter().enumerate().map(|(i, x)| (mu_var(i), *x)).collect();
                let mono: Vec<(&str, u32)> = mono.iter().map(|(v, x)| (v.as_str(), *x)).collect();
                let raw = p.coeff(&mono).unwrap_or_else(|_| GaussRat::zero());
                let val = hurwitz_correlator(&d, g).unwrap();
                let inside = lo <= s && s <= hi && (s + n as u32) % 2 == 1;
                if !inside {
                    assert!(raw.is_zero() && val.is_zero(), "g={g} d={d:?}");
                } else {
                    assert_eq!(val.clone() * val, raw.re.clone() * raw.re, "g={g} d={d:?}");
                }
            }
        }
    }
}

#[test]
fn one_part_polynomial_divisible_by_degree() {
    for g in 0..=2u32 {
        for n in 1..=4usize {
            let Ok(h) = one_part_polynomial(g, n) else {
                assert!(g == 0 && n == 1);
                continue;
            };
            // With a single transposition the factor (Σμ)^{r−1} is 1.
            if g == 0 && n == 2 {
                assert_eq!(h.poly, MultiPoly::one());
                continue;
            }
            if n == 1 {
                assert!(h.poly.eval_var(&mu_var(0), &GaussRat::zero()).is_zero());
                continue;
            }
            let mut rest = MultiPoly::zero();
            for i in 1..n {
                rest = &rest + &MultiPoly::var(&mu_var(i));
            }
            assert!(h.poly.substitute(&mu_var(0), &-&rest).unwrap().is_zero(), "g={g} n={n}");
        }
    }
}

#[test]
fn nested_commutators_are_symmetric_in_their_insertions() {
    for (d, g) in [(vec![0u32, 2, 3], 1u32), (vec![1, 2, 4], 2), (vec![2, 5], 2), (vec![0, 1, 6], 2)] {
        let base = nested_bracket(&d, g).unwrap();
        for p in permutations(d.len()) {
            let e: Vec<u32> = p.iter().map(|&i| d[i]).collect();
            assert_eq!(nested_bracket(&e, g).unwrap(), base, "{e:?} at g = {g}");
        }
    }
    assert_eq!(correlator(&[3, 0, 1], 1).unwrap(), correlator(&[0, 1, 3], 1).unwrap());
}

#[test]
fn dilaton_on_the_grid() {
    let c = Correlators::new();
    let rep = dilaton(&c, Grid::default()).unwrap();
    assert!(rep.passed(), "{rep}");
    assert_eq!(c.correlator(&[1, 6], 2).unwrap(), rat(1, 640));
}

#[test]
fn leading_table_entries() {
    let t = correlator_table(2, 2, 8).unwrap();
    for (d, g, p, q) in [(&[6u32][..], 2u32, 1, 1920), (&[4], 2, 1, 576), (&[2], 2, 7, 5760), (&[2], 1, 1, 24)] {
        assert_eq!(t.entries[&CorrelatorKey::new(d, g)], rat(p, q));
    }
    assert!(correlator_table(0, 0, 0).unwrap().entries.is_empty());
}
