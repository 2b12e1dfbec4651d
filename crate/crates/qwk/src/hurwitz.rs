//! One-part double Hurwitz numbers: the closed formula, the derived
//! correlators, and a transposition-factorization oracle.

use crate::algebra::{rat_int, GaussRat, MultiPoly, Rat};
use crate::special::{s_scaled, s_series, series_inverse};
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::HashMap;

/// A partition `μ` of `d = Σμ` with positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: &[u32]) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidArgument(format!("not a partition: {parts:?}")));
        }
        let mut parts = parts.to_vec();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// All partitions of `d`, parts in decreasing order.
    pub fn all(d: u32) -> Vec<Partition> {
        fn go(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if left == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=max.min(left)).rev() {
                cur.push(p);
                go(left - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if d > 0 {
            go(d, d, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p: Vec<String> = self.parts.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", p.join(","))
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    /// Comma-separated positive integers.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|e| Error::Parse(format!("`{x}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(&parts)
    }
}

/// `H^g_{(d),μ}` as a polynomial in `μ_1..μ_n` (variables `m1..mn`).
#[derive(Clone, Debug, PartialEq)]
pub struct HurwitzPoly {
    pub g: u32,
    pub n: usize,
    pub poly: MultiPoly,
}

impl HurwitzPoly {
    /// Value at a concrete partition with `n` parts.
    pub fn eval(&self, mu: &Partition) -> Result<Rat> {
        if mu.len() != self.n {
            return Err(Error::InvalidArgument(format!("expected {} parts, got {}", self.n, mu.len())));
        }
        let vals = mu_vars(self.n)
            .into_iter()
            .zip(mu.parts())
            .map(|(v, p)| (v, GaussRat::int(*p as i64)))
            .collect();
        Ok(self.poly.eval(&vals)?.re)
    }
}

pub fn mu_var(i: usize) -> String {
    format!("m{}", i + 1)
}

fn mu_vars(n: usize) -> Vec<String> {
    (0..n).map(mu_var).collect()
}

fn factorial(m: u32) -> Rat {
    (2..=m as i64).fold(rat_int(1), |acc, k| acc * rat_int(k))
}

/// `(Σμ)^{p} · [z^{2g}] Π S(μ_i z) / S(z)`.
fn core_poly(g: u32, n: usize, p: u32) -> Result<MultiPoly> {
    let order = 2 * g;
    let mut series = series_inverse(&s_series(order), "z", order)?;
    let mut sum = MultiPoly::zero();
    for v in mu_vars(n) {
        let m = MultiPoly::var(&v);
        series = &series * &s_scaled(&m, "z", order);
        sum = &sum + &m;
    }
    Ok(&series.coeff_of("z", order) * &sum.pow(p))
}

/// `r! (Σμ)^{r−1} [z^{2g}] Π S(μ_i z)/S(z)` with `r = 2g − 1 + n`.
pub fn one_part_polynomial(g: u32, n: usize) -> Result<HurwitzPoly> {
    let r = 2 * g as i64 - 1 + n as i64;
    if r - 1 < 0 {
        return Err(Error::InvalidArgument(format!("2g − 2 + n < 0 for g = {g}, n = {n}")));
    }
    let poly = core_poly(g, n, (r - 1) as u32)?.scale_rat(&factorial(r as u32));
    Ok(HurwitzPoly { g, n, poly })
}

fn signed_coefficient(p: &MultiPoly, d: &[u32], sign_exp: i64) -> Result<Rat> {
    let mono: Vec<(String, u32)> = d.iter().enumerate().map(|(i, x)| (mu_var(i), *x)).collect();
    let mono: Vec<(&str, u32)> = mono.iter().map(|(v, x)| (v.as_str(), *x)).collect();
    let c = p.align(&mu_vars(d.len()))?.coeff(&mono)?;
    let sign = if sign_exp.rem_euclid(2) == 0 { rat_int(1) } else { rat_int(-1) };
    Ok(c.re * sign)
}

/// `⟨⟨τ_d⟩⟩_g = (−1)^{(4g−3+n−Σd)/2} [μ^d] (Σμ)^{2g−3+n} [z^{2g}] ΠS(μ_i z)/S(z)`.
pub fn hurwitz_correlator(d: &[u32], g: u32) -> Result<Rat> {
    let n = d.len() as i64;
    let lo = 2 * g as i64 - 3 + n;
    if lo < 0 {
        return Err(Error::InvalidArgument(format!("2g − 3 + n < 0 for g = {g}, n = {n}")));
    }
    let s: i64 = d.iter().map(|x| *x as i64).sum();
    let hi = 4 * g as i64 - 3 + n;
    if (s - n).rem_euclid(2) == 0 || s < lo || s > hi {
        return Ok(Rat::zero());
    }
    let p = core_poly(g, d.len(), lo as u32)?;
    signed_coefficient(&p, d, (hi - s) / 2)
}

/// `(−1)^{(−2+n−Σd)/2} [μ^d] (Σμ)^{2g−2+n} [z^{2g}] ΠS(μ_i z)/S(z)`, the
/// Hurwitz side of a correlator with an extra `τ_0`.
pub fn hurwitz_correlator_tau0(rest: &[u32], g: u32) -> Result<Rat> {
    let n = rest.len() as i64;
    let p = 2 * g as i64 - 2 + n;
    if p < 0 {
        return Err(Error::InvalidArgument(format!("2g − 2 + n < 0 for g = {g}, n = {n}")));
    }
    let s: i64 = rest.iter().map(|x| *x as i64).sum();
    if (s - n).rem_euclid(2) != 0 {
        return Ok(Rat::zero());
    }
    let poly = core_poly(g, rest.len(), p as u32)?;
    signed_coefficient(&poly, rest, (n - 2 - s) / 2)
}

/// `Π (multiplicity of each distinct part)!`.
pub fn aut_factor(mu: &Partition) -> u64 {
    let mut counts: HashMap<u32, u64> = HashMap::new();
    for p in mu.parts() {
        *counts.entry(*p).or_default() += 1;
    }
    counts.values().map(|&m| (1..=m).product::<u64>()).product()
}

/// Largest degree accepted by [`factorization_count`].
pub const ENUMERATION_CAP: u32 = 6;

/// Product convention for `σ_0 · τ_1 ⋯ τ_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composition {
    /// `(στ)(x) = σ(τ(x))`.
    RightToLeft,
    /// `(στ)(x) = τ(σ(x))`.
    LeftToRight,
}

fn compose(a: &[u8], b: &[u8], conv: Composition) -> Vec<u8> {
    match conv {
        Composition::RightToLeft => b.iter().map(|&x| a[x as usize]).collect(),
        Composition::LeftToRight => a.iter().map(|&x| b[x as usize]).collect(),
    }
}

fn cycle_type(p: &[u8]) -> Vec<u32> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x] as usize;
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// `(1/d) · #{(τ_1..τ_r) : σ_0 τ_1 ⋯ τ_r has cycle type μ}` with
/// `σ_0 = (1 2 … d)` and `r = 2g − 1 + n`.
pub fn factorization_count(g: u32, mu: &Partition) -> Result<Rat> {
    factorization_count_with(g, mu, Composition::LeftToRight)
}

/// [`factorization_count`] under an explicit product convention.
pub fn factorization_count_with(g: u32, mu: &Partition, conv: Composition) -> Result<Rat> {
    let d = mu.degree();
    if d > ENUMERATION_CAP {
        return Err(Error::InvalidArgument(format!("degree {d} above the enumeration cap {ENUMERATION_CAP}")));
    }
    let r = 2 * g as i64 - 1 + mu.len() as i64;
    if r < 0 {
        return Err(Error::InvalidArgument("negative number of simple branch points".into()));
    }
    let transpositions: Vec<Vec<u8>> = (0..d as u8)
        .flat_map(|i| (i + 1..d as u8).map(move |j| (i, j)))
        .map(|(i, j)| {
            let mut t: Vec<u8> = (0..d as u8).collect();
            t.swap(i as usize, j as usize);
            t
        })
        .collect();
    let sigma0: Vec<u8> = (0..d as u8).map(|x| (x + 1) % d as u8).collect();
    let target = mu.parts().to_vec();
    // Each transposition changes the number of cycles by ±1, so a product
    // with `c` cycles needs at least `|c − n|` more factors.
    let mut memo: HashMap<(Vec<u8>, u32), u64> = HashMap::new();
    fn count(
        p: Vec<u8>,
        left: u32,
        ts: &[Vec<u8>],
        target: &[u32],
        conv: Composition,
        memo: &mut HashMap<(Vec<u8>, u32), u64>,
    ) -> u64 {
        let ct = cycle_type(&p);
        if left == 0 {
            return u64::from(ct == target);
        }
        let gap = (ct.len() as i64 - target.len() as i64).unsigned_abs();
        if gap > left as u64 || (left as u64 - gap) % 2 == 1 {
            return 0;
        }
        if let Some(v) = memo.get(&(p.clone(), left)) {
            return *v;
        }
        let total = ts.iter().map(|t| count(compose(&p, t, conv), left - 1, ts, target, conv, memo)).sum();
        memo.insert((p, left), total);
        total
    }
    let n = count(sigma0, r as u32, &transpositions, &target, conv, &mut memo);
    Ok(rat_int(n as i64) / rat_int(d as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn mu(p: &[u32]) -> Partition {
        Partition::new(p).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(one_part_polynomial(0, 2).unwrap().poly, MultiPoly::one());
        let s3 = &(&MultiPoly::var("m1") + &MultiPoly::var("m2")) + &MultiPoly::var("m3");
        assert_eq!(one_part_polynomial(0, 3).unwrap().poly, s3.scale(&GaussRat::int(2)));
        let h = one_part_polynomial(1, 1).unwrap();
        assert_eq!(h.eval(&mu(&[3])).unwrap(), rat(2, 1));
        assert!(one_part_polynomial(0, 1).is_err());
    }

    #[test]
    fn correlator_examples() {
        assert_eq!(hurwitz_correlator(&[0, 0, 0], 0).unwrap(), rat(1, 1));
        assert_eq!(hurwitz_correlator(&[2], 1).unwrap(), rat(1, 24));
        assert_eq!(hurwitz_correlator(&[1, 2], 1).unwrap(), rat(1, 24));
        assert!(hurwitz_correlator(&[0], 0).is_err());
        assert_eq!(hurwitz_correlator_tau0(&[3], 1).unwrap(), rat(1, 24));
        assert_eq!(hurwitz_correlator_tau0(&[0, 0], 0).unwrap(), rat(1, 1));
        assert_eq!(hurwitz_correlator_tau0(&[7], 2).unwrap(), rat(1, 1920));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(factorization_count(0, &mu(&[2])).unwrap(), rat(1, 2));
        assert_eq!(factorization_count(0, &mu(&[1, 1])).unwrap(), rat(1, 2));
        // 6 of the 9 pairs leave (123)·τ1τ2 a 3-cycle: the 3 with τ1 = τ2 and 3 more.
        let c = factorization_count(1, &mu(&[3])).unwrap();
        assert_eq!(c, rat(2, 1));
        assert_eq!(factorization_count_with(1, &mu(&[3]), Composition::RightToLeft).unwrap(), c);
        assert!(factorization_count(0, &mu(&[7])).is_err());
    }

    #[test]
    fn aut_examples() {
        assert_eq!(aut_factor(&mu(&[1, 1])), 2);
        assert_eq!(aut_factor(&mu(&[2, 3])), 1);
        assert_eq!(aut_factor(&mu(&[2, 2, 2])), 6);
    }

    #[test]
    fn partitions() {
        assert_eq!(Partition::all(4).len(), 5);
        assert_eq!("2,1,1".parse::<Partition>().unwrap().parts(), &[2, 1, 1]);
        assert!("2,0".parse::<Partition>().is_err());
    }
}
