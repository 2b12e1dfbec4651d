//! `S(z)`, Eulerian polynomials and power-sum convolutions.

use crate::algebra::{rat, rat_int, GaussRat, MultiPoly, Rat, Truncation};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Coefficient `1 / (2^{2l} (2l+1)!)` of `z^{2l}` in `S(z)`.
pub fn s_coeff(l: u32) -> Rat {
    let mut den = BigInt::one();
    for k in 2..=(2 * l + 1) {
        den *= k;
    }
    den <<= 2 * l as usize;
    Rat::new(BigInt::one(), den)
}

/// `S(z) = sh(z/2)/(z/2)` truncated at degree `order` in `z`.
pub fn s_series(order: u32) -> MultiPoly {
    s_scaled(&MultiPoly::one(), "z", order)
}

/// `S(c·z)` for a polynomial `c` free of `z`, truncated at `z^order`.
pub fn s_scaled(c: &MultiPoly, z: &str, order: u32) -> MultiPoly {
    let trunc = Truncation::per_var(&[(z, order)]);
    let c2 = c * c;
    let mut cpow = MultiPoly::one();
    let mut acc = MultiPoly::zero();
    for l in 0..=order / 2 {
        let zl = MultiPoly::monomial(&[z], &[2 * l], GaussRat::real(s_coeff(l)));
        acc = &acc + &(&cpow * &zl);
        cpow = &cpow * &c2;
    }
    acc.with_truncation(trunc)
}

fn in_var(p: &MultiPoly, var: &str, order: u32) -> MultiPoly {
    p.clone().without_truncation().with_truncation(Truncation::per_var(&[(var, order)]))
}

/// Multiplicative inverse of `p` modulo `var^{order+1}`.
pub fn series_inverse(p: &MultiPoly, var: &str, order: u32) -> Result<MultiPoly> {
    if p.is_zero() || !p.coeff_of(var, 0).compact().vars().is_empty() {
        return Err(Error::NotInvertible);
    }
    in_var(p, var, order).inverse_series()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesMode {
    Exp,
    Log,
}

/// Truncated `exp` or `log` of `p` in `var`.
pub fn series_exp_log(p: &MultiPoly, var: &str, order: u32, mode: SeriesMode) -> Result<MultiPoly> {
    let q = in_var(p, var, order);
    match mode {
        SeriesMode::Exp => q.exp_series(),
        SeriesMode::Log => q.log_series(),
    }
}

/// Eulerian numbers `⟨n,k⟩`, `k = 0..n-1` (`[1]` for `n = 0`).
pub fn eulerian_numbers(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); m as usize];
        for k in 0..m as usize {
            let mut v = BigInt::zero();
            if k < row.len() {
                v += &row[k] * (k + 1);
            }
            if k >= 1 && k - 1 < row.len() {
                v += &row[k - 1] * (m as usize - k);
            }
            next[k] = v;
        }
        row = next;
    }
    row
}

/// `E_n(t) = Σ_k ⟨n,k⟩ t^k`.
pub fn eulerian_polynomial(n: u32) -> MultiPoly {
    let c: Vec<GaussRat> =
        eulerian_numbers(n).into_iter().map(|x| GaussRat::real(Rat::from_integer(x))).collect();
    MultiPoly::univariate("t", &c)
}

/// Rows `E_0..E_{n_max}`.
#[derive(Clone, Debug)]
pub struct EulerianTable {
    pub rows: Vec<MultiPoly>,
}

impl EulerianTable {
    pub fn new(n_max: u32) -> Self {
        EulerianTable { rows: (0..=n_max).map(eulerian_polynomial).collect() }
    }
}

/// Power-sum convolution `C^r(N) = Σ_{k_1+…+k_q=N, k_i≥1} Π k_i^{r_i}`,
/// as a polynomial in `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct EhrhartPoly {
    pub poly: MultiPoly,
    pub r: Vec<u32>,
}

impl EhrhartPoly {
    pub fn q(&self) -> usize {
        self.r.len()
    }

    pub fn eval(&self, n: i64) -> Rat {
        self.poly.eval_var("N", &GaussRat::int(n)).constant_term().re
    }

    /// Expected degree `q − 1 + Σr`.
    pub fn expected_degree(&self) -> u32 {
        self.q() as u32 - 1 + self.r.iter().sum::<u32>()
    }
}

/// Builds `C^r(N)` from Carlitz' identity: the generating function is
/// `P(t)/(1−t)^D` with `P = Π t·E_{r_i}(t)` and `D = q + Σr`, whose
/// `t^N` coefficient is `Σ_j P_j binom(N−j+D−1, D−1)`.
pub fn ehrhart_convolution(r: &[u32]) -> Result<EhrhartPoly> {
    if r.is_empty() {
        return Err(Error::InvalidArgument("empty exponent list".into()));
    }
    let q = r.len() as u32;
    let d = q + r.iter().sum::<u32>();
    let mut p = MultiPoly::monomial(&["t"], &[q], GaussRat::one());
    for &ri in r {
        p = &p * &eulerian_polynomial(ri);
    }
    let n = MultiPoly::var("N");
    let mut fact = Rat::one();
    for k in 1..d as i64 {
        fact *= rat_int(k);
    }
    let inv_fact = GaussRat::real(fact.recip());
    let mut out = MultiPoly::zero();
    for (e, c) in p.terms() {
        let j = e.first().copied().unwrap_or(0) as i64;
        // (N−j+1)(N−j+2)…(N−j+D−1)/(D−1)!
        let mut b = MultiPoly::constant(inv_fact.clone());
        for s in 1..d as i64 {
            b = &b * &(&n + &MultiPoly::constant(GaussRat::int(s - j)));
        }
        out = &out + &b.scale(c);
    }
    let out = out.align(&["N".to_string()]).unwrap_or(out);
    Ok(EhrhartPoly { poly: out, r: r.to_vec() })
}

/// Shared cache of `C^r(N)` polynomials for the bracket engine.
pub fn ehrhart_cached(r: &[u32]) -> MultiPoly {
    static CACHE: OnceLock<RwLock<HashMap<Vec<u32>, MultiPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().expect("cache lock").get(r) {
        return p.clone();
    }
    let p = ehrhart_convolution(r).expect("nonempty exponent list").poly;
    cache.write().expect("cache lock").insert(r.to_vec(), p.clone());
    p
}

/// Direct enumeration of the composition sum (0 when `N < q`).
pub fn ehrhart_brute_force(r: &[u32], n: i64) -> Rat {
    fn go(r: &[u32], n: i64) -> BigInt {
        match r {
            [] => {
                if n == 0 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }
            [ri, rest @ ..] => {
                let mut acc = BigInt::zero();
                for k in 1..=(n - rest.len() as i64) {
                    let sub = go(rest, n - k);
                    if !sub.is_zero() {
                        acc += BigInt::from(k).pow(*ri) * sub;
                    }
                }
                acc
            }
        }
    }
    if r.is_empty() || n < r.len() as i64 {
        return Rat::zero();
    }
    Rat::from_integer(go(r, n))
}

/// `sh` of a polynomial argument as a truncated series (the argument must be
/// nilpotent under `trunc`).
pub fn sinh_series(arg: &MultiPoly, trunc: &Truncation) -> Result<MultiPoly> {
    let (e, em) = exp_pair(arg, trunc)?;
    Ok((&e - &em).scale_rat(&rat(1, 2)))
}

/// `ch` of a polynomial argument as a truncated series.
pub fn cosh_series(arg: &MultiPoly, trunc: &Truncation) -> Result<MultiPoly> {
    let (e, em) = exp_pair(arg, trunc)?;
    Ok((&e + &em).scale_rat(&rat(1, 2)))
}

fn exp_pair(arg: &MultiPoly, trunc: &Truncation) -> Result<(MultiPoly, MultiPoly)> {
    let a = arg.clone().without_truncation().with_truncation(trunc.clone());
    Ok((a.exp_series()?, (-&a).exp_series()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(p: &MultiPoly, var: &str, upto: u32) -> Vec<GaussRat> {
        (0..=upto).map(|k| p.coeff_of(var, k).constant_term()).collect()
    }

    #[test]
    fn s_series_low_orders() {
        assert_eq!(
            coeffs(&s_series(4), "z", 4),
            vec![GaussRat::one(), GaussRat::zero(), GaussRat::frac(1, 24), GaussRat::zero(), GaussRat::frac(1, 1920)]
        );
        assert_eq!(s_series(0), MultiPoly::one());
    }

    #[test]
    fn inverse_of_s() {
        let inv = series_inverse(&s_series(6), "z", 6).unwrap();
        let prod = &inv * &s_series(6);
        assert_eq!(prod, MultiPoly::one());
        let inv4 = series_inverse(&s_series(4), "z", 4).unwrap();
        assert_eq!(
            coeffs(&inv4, "z", 4),
            vec![GaussRat::one(), GaussRat::zero(), GaussRat::frac(-1, 24), GaussRat::zero(), GaussRat::frac(7, 5760)]
        );
        assert!(series_inverse(&MultiPoly::var("z"), "z", 3).is_err());
        assert_eq!(series_inverse(&MultiPoly::one(), "z", 3).unwrap(), MultiPoly::one());
    }

    #[test]
    fn exp_and_log() {
        let e = series_exp_log(&MultiPoly::var("z"), "z", 3, SeriesMode::Exp).unwrap();
        assert_eq!(
            coeffs(&e, "z", 3),
            vec![GaussRat::one(), GaussRat::one(), GaussRat::frac(1, 2), GaussRat::frac(1, 6)]
        );
        let round = series_exp_log(
            &series_exp_log(&s_series(4), "z", 4, SeriesMode::Log).unwrap(),
            "z",
            4,
            SeriesMode::Exp,
        )
        .unwrap();
        assert_eq!(round, s_series(4));
    }

    #[test]
    fn eulerian_rows() {
        assert_eq!(eulerian_polynomial(0), MultiPoly::one());
        assert_eq!(
            eulerian_polynomial(3),
            MultiPoly::univariate("t", &[GaussRat::int(1), GaussRat::int(4), GaussRat::int(1)])
        );
        let e5 = eulerian_polynomial(5).eval_var("t", &GaussRat::one()).constant_term();
        assert_eq!(e5, GaussRat::int(120));
    }

    #[test]
    fn ehrhart_small_cases() {
        let c1 = ehrhart_convolution(&[1]).unwrap();
        assert_eq!(c1.poly, MultiPoly::var("N"));
        let c11 = ehrhart_convolution(&[1, 1]).unwrap();
        let n = MultiPoly::var("N");
        let expect = (&n.pow(3) - &n).scale(&GaussRat::frac(1, 6));
        assert_eq!(c11.poly, expect);
        let c00 = ehrhart_convolution(&[0, 0]).unwrap();
        assert_eq!(c00.poly, &n - &MultiPoly::one());
        assert!(ehrhart_convolution(&[]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(ehrhart_brute_force(&[1, 1], 4), rat_int(10));
        assert_eq!(ehrhart_brute_force(&[3, 2], 0), rat_int(0));
        assert_eq!(ehrhart_brute_force(&[2], 5), rat_int(25));
    }
}
