//! ε = 0 quantum correlators `⟨τ_{d_1}…τ_{d_n}⟩_{0,g}`.
//!
//! Correlators with a `τ_0` insertion come straight from nested commutators
//! evaluated at the string point; all others are obtained by inverting the
//! string equation, which terminates thanks to the vanishing bound
//! `Σd ≤ 4g − 3 + n`.

use crate::algebra::{rat_int, GaussRat, Rat};
use crate::qkdv::Engine;
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

/// Sorted insertion list plus genus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrelatorKey {
    pub g: u32,
    pub d: Vec<u32>,
}

impl CorrelatorKey {
    pub fn new(d: &[u32], g: u32) -> Self {
        let mut d = d.to_vec();
        d.sort_unstable();
        CorrelatorKey { g, d }
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn sum(&self) -> u32 {
        self.d.iter().sum()
    }

    /// `4g − 3 + n − Σd`, the distance below the top of the nonvanishing band.
    pub fn band(&self) -> i64 {
        4 * self.g as i64 - 3 + self.n() as i64 - self.sum() as i64
    }
}

/// Correlator values together with the bounds they were generated from.
#[derive(Clone, Debug, Default)]
pub struct CorrelatorTable {
    pub entries: BTreeMap<CorrelatorKey, Rat>,
    pub g_max: u32,
    pub n_max: usize,
    pub sum_max: u32,
}

/// Correlator calculator sharing one commutator engine and one memo table.
#[derive(Default)]
pub struct Correlators {
    engine: Engine,
    memo: RwLock<HashMap<CorrelatorKey, Rat>>,
}

fn top_of_band(g: u32, n: usize) -> i64 {
    4 * g as i64 - 3 + n as i64
}

impl Correlators {
    pub fn new() -> Self {
        Correlators::default()
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    /// `⟨τ_0 τ_{rest}⟩_{0,g} = (−1)^g i^{n−1} v_g`, where `v` is the nested
    /// commutator at the string point and `n = |rest|`.
    pub fn correlator_tau0(&self, rest: &[u32], g: u32) -> Result<Rat> {
        if rest.is_empty() {
            return Err(Error::InvalidArgument("correlator_tau0 needs at least one insertion".into()));
        }
        let mut rest = rest.to_vec();
        rest.sort_unstable();
        let v = self.engine.nested_bracket(&rest, g)?;
        let vg = v.get(&g).cloned().unwrap_or_else(GaussRat::zero);
        let sign = if g.is_multiple_of(2) { GaussRat::int(1) } else { GaussRat::int(-1) };
        let val = &(&sign * &GaussRat::i_pow(rest.len() as i64 - 1)) * &vg;
        if !val.is_real() {
            return Err(Error::NonReal(format!("τ0 with {rest:?} at genus {g}: {val}")));
        }
        Ok(val.re)
    }

    /// General correlator.  Conventions: the empty correlator is
    /// [`Correlators::constant_term`], and a single insertion `τ_d` is
    /// defined as `⟨τ_0 τ_{d+1}⟩`.
    pub fn correlator(&self, d: &[u32], g: u32) -> Result<Rat> {
        let key = CorrelatorKey::new(d, g);
        if let Some(v) = self.memo.read().expect("lock").get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(&key)?;
        self.memo.write().expect("lock").insert(key, v.clone());
        Ok(v)
    }

    fn compute(&self, key: &CorrelatorKey) -> Result<Rat> {
        let d = &key.d;
        let g = key.g;
        match d.len() {
            0 => return self.constant_term(g),
            1 => return self.correlator_tau0(&[d[0] + 1], g),
            _ => {}
        }
        if d[0] == 0 {
            return self.correlator_tau0(&d[1..], g);
        }
        if key.sum() as i64 > top_of_band(g, d.len()) {
            return Ok(Rat::zero());
        }
        // String equation at d + e_top, solved for the term with e_top removed.
        let top = d.len() - 1;
        let mut up = d.clone();
        up[top] += 1;
        let mut x = self.correlator_tau0(&up, g)?;
        for i in 0..top {
            let mut e = up.clone();
            e[i] -= 1;
            x -= self.correlator(&e, g)?;
        }
        Ok(x)
    }

    /// `correlator([1], g) / (2g − 2)`; undefined at `g = 1`.
    pub fn constant_term(&self, g: u32) -> Result<Rat> {
        if g == 1 {
            return Err(Error::InvalidArgument("the constant term is undefined at genus 1".into()));
        }
        Ok(self.correlator(&[1], g)? / rat_int(2 * g as i64 - 2))
    }

    /// Every correlator with `g ≤ g_max`, `n ≤ n_max`, `Σd ≤ sum_max`
    /// (the empty correlator excluded), computed in parallel per genus.
    pub fn table(&self, g_max: u32, n_max: usize, sum_max: u32) -> Result<CorrelatorTable> {
        use rayon::prelude::*;
        let keys = grid_keys(g_max, n_max, sum_max);
        let values: Vec<(CorrelatorKey, Rat)> = keys
            .into_par_iter()
            .map(|k| self.correlator(&k.d, k.g).map(|v| (k, v)))
            .collect::<Result<_>>()?;
        Ok(CorrelatorTable { entries: values.into_iter().collect(), g_max, n_max, sum_max })
    }
}

/// All sorted keys with `1 ≤ n ≤ n_max`, `g ≤ g_max`, `Σd ≤ sum_max`.
pub fn grid_keys(g_max: u32, n_max: usize, sum_max: u32) -> Vec<CorrelatorKey> {
    let mut out = Vec::new();
    for g in 0..=g_max {
        for n in 1..=n_max {
            for d in sorted_tuples(n, sum_max) {
                out.push(CorrelatorKey { g, d });
            }
        }
    }
    out
}

/// Nondecreasing `n`-tuples of nonnegative integers with sum `≤ max`.
pub fn sorted_tuples(n: usize, max: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, lo: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let slots = (n - cur.len()) as u32;
        let mut x = lo;
        while x * slots <= left {
            cur.push(x);
            go(n, x, left - x, cur, out);
            cur.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    go(n, 0, max, &mut Vec::new(), &mut out);
    out
}

fn shared() -> &'static Correlators {
    static SHARED: OnceLock<Correlators> = OnceLock::new();
    SHARED.get_or_init(Correlators::new)
}

/// [`Correlators::correlator_tau0`] on a process-wide cache.
pub fn correlator_tau0(rest: &[u32], g: u32) -> Result<Rat> {
    shared().correlator_tau0(rest, g)
}

/// [`Correlators::correlator`] on a process-wide cache.
pub fn correlator(d: &[u32], g: u32) -> Result<Rat> {
    shared().correlator(d, g)
}

/// [`Correlators::constant_term`] on a process-wide cache.
pub fn constant_term(g: u32) -> Result<Rat> {
    shared().constant_term(g)
}

/// [`Correlators::table`] on a process-wide cache.
pub fn correlator_table(g_max: u32, n_max: usize, sum_max: u32) -> Result<CorrelatorTable> {
    shared().table(g_max, n_max, sum_max)
}

/// Level-`l` vanishing predicate: `Σd > 4g − 3 + n − l` or
/// `Σd ≡ n − l (mod 2)`.
pub fn vanishes_by_level(d: &[u32], g: u32, l: u32) -> Result<bool> {
    if l > g {
        return Err(Error::InvalidArgument(format!("level {l} exceeds genus {g}")));
    }
    let n = d.len() as i64;
    let s: i64 = d.iter().map(|x| *x as i64).sum();
    let bound = top_of_band(g, d.len()) - l as i64;
    Ok(s > bound || (s - (n - l as i64)).rem_euclid(2) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn tau0_examples() {
        assert_eq!(correlator_tau0(&[0, 0], 0).unwrap(), rat(1, 1));
        assert_eq!(correlator_tau0(&[1], 1).unwrap(), rat(1, 24));
        assert_eq!(correlator_tau0(&[3], 1).unwrap(), rat(1, 24));
        assert_eq!(correlator_tau0(&[7], 2).unwrap(), rat(1, 1920));
        assert!(correlator_tau0(&[], 0).is_err());
    }

    #[test]
    fn general_examples() {
        assert_eq!(correlator(&[2], 1).unwrap(), rat(1, 24));
        assert_eq!(correlator(&[2], 2).unwrap(), rat(7, 5760));
        assert_eq!(correlator(&[1, 2], 1).unwrap(), rat(1, 24));
        assert_eq!(correlator(&[2, 1], 1).unwrap(), rat(1, 24));
    }

    #[test]
    fn constant_terms() {
        assert_eq!(constant_term(0).unwrap(), rat(0, 1));
        assert!(constant_term(1).is_err());
        assert_eq!(constant_term(2).unwrap(), correlator(&[1], 2).unwrap() / rat_int(2));
    }

    #[test]
    fn level_predicate() {
        assert!(vanishes_by_level(&[5], 1, 0).unwrap());
        assert!(vanishes_by_level(&[3], 1, 0).unwrap());
        assert!(!vanishes_by_level(&[1, 2], 1, 0).unwrap());
        assert!(vanishes_by_level(&[1], 0, 1).is_err());
    }

    #[test]
    fn small_tables() {
        let t = correlator_table(1, 2, 3).unwrap();
        assert_eq!(t.entries[&CorrelatorKey::new(&[2], 1)], rat(1, 24));
        assert_eq!(t.entries[&CorrelatorKey::new(&[0, 3], 1)], rat(1, 24));
        let t = correlator_table(0, 3, 0).unwrap();
        for (k, v) in &t.entries {
            if k.d == vec![0, 0, 0] {
                assert_eq!(*v, rat(1, 1));
            } else {
                assert!(v.is_zero(), "{k:?}");
            }
        }
    }

    #[test]
    fn tuples() {
        assert_eq!(sorted_tuples(2, 2), vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1]]);
        assert_eq!(sorted_tuples(0, 3), vec![Vec::<u32>::new()]);
    }
}
