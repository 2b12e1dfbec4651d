//! Exact numbers and sparse multivariate polynomials.
//!
//! [`Rat`] is an arbitrary-precision rational, [`GaussRat`] a Gaussian
//! rational `re + im·i`, and [`MultiPoly`] a sparse polynomial over
//! `GaussRat` in named variables.  A polynomial may carry a [`Truncation`],
//! in which case it behaves as a truncated power series: every operation
//! silently discards monomials beyond the cutoff.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

/// Reduced arbitrary-precision rational (denominator always positive).
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        None => Ok(Rat::from_integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Decimal expansion by long division, truncated after `digits` fractional
/// digits.  The result starts with `~` unless the expansion terminated.
pub fn to_decimal(r: &Rat, digits: usize) -> String {
    let neg = r.is_negative();
    let den = r.denom().clone();
    let num = r.numer().abs();
    let int = &num / &den;
    let mut rem = &num % &den;
    let mut frac = String::new();
    while !rem.is_zero() && frac.len() < digits {
        rem *= 10;
        frac.push_str(&(&rem / &den).to_string());
        rem = &rem % &den;
    }
    let mut out = String::new();
    if !rem.is_zero() {
        out.push('~');
    }
    if neg {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if !frac.is_empty() {
        out.push('.');
        out.push_str(&frac);
    }
    out
}

/// Exact Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rat) -> Self {
        GaussRat { re, im: Rat::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::real(rat_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(rat(n, d))
    }

    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => -Self::one(),
            _ => -Self::i(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// `re² + im²`.
    pub fn norm_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|re| + |im|`, the norm used for discrepancy reports.
    pub fn l1(&self) -> Rat {
        self.re.abs() + self.im.abs()
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if self.im.is_zero() {
            return Self::real(&self.re * r);
        }
        GaussRat { re: &self.re * r, im: &self.im * r }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        if self.im.is_zero() {
            return Ok(Self::real(self.re.recip()));
        }
        let n = self.norm_sq();
        Ok(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Zero for GaussRat {
    fn zero() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        GaussRat { re: Rat::one(), im: Rat::zero() }
    }
}

impl From<Rat> for GaussRat {
    fn from(r: Rat) -> Self {
        GaussRat::real(r)
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        GaussRat::int(n)
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        // Nearly every coefficient in the engine is real.
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &GaussRat) -> GaussRat {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re, im: -self.im }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl fmt::Display for GaussRat {
    /// `p/q` when real, otherwise `p/q+r/s*i` (or `p/q-r/s*i`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

impl FromStr for GaussRat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("*i") else {
            return Ok(GaussRat::real(parse_rat(s)?));
        };
        let cut = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last()
            .ok_or_else(|| Error::Parse(format!("not a Gaussian rational: `{s}`")))?;
        let re = parse_rat(&body[..cut])?;
        let im = parse_rat(body[cut..].trim_start_matches('+'))?;
        Ok(GaussRat { re, im })
    }
}

/// Truncation order attached to a [`MultiPoly`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Drop monomials whose exponent in a listed variable exceeds its bound.
    PerVar(BTreeMap<String, u32>),
    /// Drop monomials whose total degree in the listed variables exceeds `max`.
    Total { vars: BTreeSet<String>, max: u32 },
}

impl Truncation {
    pub fn per_var(bounds: &[(&str, u32)]) -> Self {
        Truncation::PerVar(bounds.iter().map(|(v, d)| (v.to_string(), *d)).collect())
    }

    pub fn total(vars: &[&str], max: u32) -> Self {
        Truncation::Total { vars: vars.iter().map(|v| v.to_string()).collect(), max }
    }

    fn plan(&self, vars: &[String]) -> Plan {
        match self {
            Truncation::PerVar(m) => Plan::PerVar(vars.iter().map(|v| m.get(v).copied()).collect()),
            Truncation::Total { vars: set, max } => {
                Plan::Total(vars.iter().map(|v| set.contains(v)).collect(), *max)
            }
        }
    }

    /// Upper bound on the nilpotency index of any series whose terms all have
    /// positive degree in some truncated variable.
    fn nilpotency_bound(&self) -> u32 {
        match self {
            Truncation::PerVar(m) => m.values().sum::<u32>() + 1,
            Truncation::Total { max, .. } => max + 1,
        }
    }
}

enum Plan {
    PerVar(Vec<Option<u32>>),
    Total(Vec<bool>, u32),
}

impl Plan {
    fn keeps(&self, e: &[u32]) -> bool {
        match self {
            Plan::PerVar(b) => e.iter().zip(b).all(|(x, b)| b.is_none_or(|b| *x <= b)),
            Plan::Total(mask, max) => {
                e.iter().zip(mask).filter(|(_, m)| **m).map(|(x, _)| *x).sum::<u32>() <= *max
            }
        }
    }

    /// True when the monomial has positive degree in some truncated variable.
    fn touches(&self, e: &[u32]) -> bool {
        match self {
            Plan::PerVar(b) => e.iter().zip(b).any(|(x, b)| b.is_some() && *x > 0),
            Plan::Total(mask, _) => e.iter().zip(mask).any(|(x, m)| *m && *x > 0),
        }
    }
}

/// Sparse multivariate polynomial over [`GaussRat`] in named variables.
///
/// Exponent vectors are indexed by position in `vars`; zero coefficients
/// are never stored.  Equality is semantic: variable order, unused
/// variables and the truncation setting are ignored.
#[derive(Clone, Debug)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, GaussRat>,
    trunc: Option<Truncation>,
}

fn insert_add(map: &mut BTreeMap<Vec<u32>, GaussRat>, e: Vec<u32>, c: GaussRat) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(e) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { vars: Vec::new(), terms: BTreeMap::new(), trunc: None }
    }

    pub fn one() -> Self {
        Self::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MultiPoly { vars: Vec::new(), terms, trunc: None }
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(&[name], &[1], GaussRat::one())
    }

    pub fn monomial(vars: &[&str], exps: &[u32], c: GaussRat) -> Self {
        assert_eq!(vars.len(), exps.len(), "exponent vector length mismatch");
        Self::from_terms(
            vars.iter().map(|v| v.to_string()).collect(),
            std::iter::once((exps.to_vec(), c)),
        )
    }

    /// Builds a polynomial from raw `(exponents, coefficient)` pairs; equal
    /// exponent vectors are summed.
    pub fn from_terms<I>(vars: Vec<String>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, GaussRat)>,
    {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length mismatch");
            insert_add(&mut map, e, c);
        }
        MultiPoly { vars, terms: map, trunc: None }
    }

    /// Univariate polynomial from a dense coefficient list.
    pub fn univariate(var: &str, coeffs: &[GaussRat]) -> Self {
        Self::from_terms(
            vec![var.to_string()],
            coeffs.iter().enumerate().map(|(k, c)| (vec![k as u32], c.clone())),
        )
    }

    /// Attaches a truncation and discards the monomials beyond it.
    pub fn with_truncation(mut self, t: Truncation) -> Self {
        let plan = t.plan(&self.vars);
        self.terms.retain(|e, _| plan.keeps(e));
        self.trunc = Some(t);
        self
    }

    pub fn without_truncation(mut self) -> Self {
        self.trunc = None;
        self
    }

    pub fn truncation(&self) -> Option<&Truncation> {
        self.trunc.as_ref()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussRat)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> (Vec<String>, BTreeMap<Vec<u32>, GaussRat>) {
        (self.vars, self.terms)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// The coefficient of the empty monomial.
    pub fn constant_term(&self) -> GaussRat {
        self.terms
            .iter()
            .find(|(e, _)| e.iter().all(|x| *x == 0))
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussRat::zero)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(GaussRat::is_real)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: &str) -> Option<u32> {
        match self.var_index(var) {
            None => self.terms.keys().next().map(|_| 0),
            Some(k) => self.terms.keys().map(|e| e[k]).max(),
        }
    }

    /// Re-expresses `self` over `vars`, which must contain every variable
    /// carrying a nonzero exponent.
    pub fn align(&self, vars: &[String]) -> Result<MultiPoly> {
        if vars == self.vars.as_slice() {
            return Ok(self.clone());
        }
        let mut map_idx = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            map_idx.push(vars.iter().position(|w| w == v));
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = vec![0u32; vars.len()];
            for (k, x) in e.iter().enumerate() {
                if *x == 0 {
                    continue;
                }
                match map_idx[k] {
                    Some(j) => f[j] = *x,
                    None => return Err(Error::UnknownVariable(self.vars[k].clone())),
                }
            }
            terms.insert(f, c.clone());
        }
        Ok(MultiPoly { vars: vars.to_vec(), terms, trunc: self.trunc.clone() })
    }

    /// Drops variables that appear with exponent zero in every term.
    pub fn compact(&self) -> MultiPoly {
        let used: Vec<usize> =
            (0..self.vars.len()).filter(|&k| self.terms.keys().any(|e| e[k] > 0)).collect();
        if used.len() == self.vars.len() {
            return self.clone();
        }
        let vars = used.iter().map(|&k| self.vars[k].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (used.iter().map(|&k| e[k]).collect(), c.clone()))
            .collect();
        MultiPoly { vars, terms, trunc: self.trunc.clone() }
    }

    fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut v = a.to_vec();
        for x in b {
            if !v.contains(x) {
                v.push(x.clone());
            }
        }
        v
    }

    fn merged_trunc(&self, o: &MultiPoly) -> Result<Option<Truncation>> {
        match (&self.trunc, &o.trunc) {
            (Some(a), Some(b)) if a != b => Err(Error::IncompatibleTruncation),
            (Some(a), _) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    fn pair(&self, o: &MultiPoly) -> Result<(MultiPoly, MultiPoly, Option<Truncation>)> {
        let t = self.merged_trunc(o)?;
        let vars = Self::union_vars(&self.vars, &o.vars);
        Ok((self.align(&vars)?, o.align(&vars)?, t))
    }

    pub fn try_add(&self, o: &MultiPoly) -> Result<MultiPoly> {
        let (mut a, b, t) = self.pair(o)?;
        for (e, c) in b.terms {
            insert_add(&mut a.terms, e, c);
        }
        a.trunc = None;
        Ok(match t {
            Some(t) => a.with_truncation(t),
            None => a,
        })
    }

    pub fn try_sub(&self, o: &MultiPoly) -> Result<MultiPoly> {
        self.try_add(&o.neg_ref())
    }

    fn neg_ref(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn scale(&self, k: &GaussRat) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly { vars: self.vars.clone(), terms: BTreeMap::new(), trunc: self.trunc.clone() };
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn scale_rat(&self, k: &Rat) -> MultiPoly {
        self.scale(&GaussRat::real(k.clone()))
    }

    /// Exact product, truncated when either operand carries a truncation.
    pub fn try_mul(&self, o: &MultiPoly) -> Result<MultiPoly> {
        let (a, b, t) = self.pair(o)?;
        let plan = t.as_ref().map(|t| t.plan(&a.vars));
        let mut acc: HashMap<Vec<u32>, GaussRat> = HashMap::new();
        let mut e = vec![0u32; a.vars.len()];
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                for k in 0..e.len() {
                    e[k] = ea[k] + eb[k];
                }
                if let Some(p) = &plan {
                    if !p.keeps(&e) {
                        continue;
                    }
                }
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(x) => *x += &c,
                    None => {
                        acc.insert(e.clone(), c);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(MultiPoly { vars: a.vars, terms, trunc: t })
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        acc.trunc = self.trunc.clone();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficient of the monomial given as `(variable, exponent)` pairs;
    /// variables not listed have exponent zero.
    pub fn coeff(&self, monomial: &[(&str, u32)]) -> Result<GaussRat> {
        let mut e = vec![0u32; self.vars.len()];
        for (v, x) in monomial {
            let k = self.var_index(v).ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
            e[k] = *x;
        }
        Ok(self.terms.get(&e).cloned().unwrap_or_else(GaussRat::zero))
    }

    /// Coefficient of the raw exponent vector over `self.vars()`.
    pub fn coeff_exps(&self, e: &[u32]) -> GaussRat {
        self.terms.get(e).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// `[var^k] self` as a polynomial in the remaining variables.
    pub fn coeff_of(&self, var: &str, k: u32) -> MultiPoly {
        let Some(idx) = self.var_index(var) else {
            return if k == 0 { self.clone() } else { MultiPoly::zero() };
        };
        let vars: Vec<String> =
            self.vars.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, v)| v.clone()).collect();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[idx] == k)
            .map(|(e, c)| {
                let mut f = e.clone();
                f.remove(idx);
                (f, c.clone())
            })
            .collect();
        MultiPoly { vars, terms, trunc: None }
    }

    /// Substitutes `var := value` for a scalar value.
    pub fn eval_var(&self, var: &str, value: &GaussRat) -> MultiPoly {
        self.substitute(var, &MultiPoly::constant(value.clone()))
            .expect("constant substitution never fails")
    }

    /// Evaluates at a full assignment; unassigned variables are an error.
    pub fn eval(&self, values: &HashMap<String, GaussRat>) -> Result<GaussRat> {
        let mut vals = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            vals.push(values.get(v));
        }
        let mut acc = GaussRat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, x) in e.iter().enumerate() {
                if *x > 0 {
                    let v = vals[k].ok_or_else(|| Error::UnknownVariable(self.vars[k].clone()))?;
                    t = &t * &v.pow(*x);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Polynomial substitution `var := replacement`, re-truncated if needed.
    pub fn substitute(&self, var: &str, replacement: &MultiPoly) -> Result<MultiPoly> {
        let Some(idx) = self.var_index(var) else {
            return Ok(self.clone());
        };
        let mut by_power: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        let rest_vars: Vec<String> =
            self.vars.iter().enumerate().filter(|(j, _)| *j != idx).map(|(_, v)| v.clone()).collect();
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f.remove(idx);
            let slot = by_power
                .entry(k)
                .or_insert_with(|| MultiPoly { vars: rest_vars.clone(), terms: BTreeMap::new(), trunc: None });
            insert_add(&mut slot.terms, f, c.clone());
        }
        let mut repl = replacement.clone();
        if repl.trunc.is_none() {
            repl.trunc = self.trunc.clone();
        }
        let mut out = MultiPoly::zero();
        out.trunc = self.merged_trunc(&repl)?;
        let mut power = MultiPoly::one();
        power.trunc = out.trunc.clone();
        let mut cur = 0u32;
        for (k, mut part) in by_power {
            while cur < k {
                power = power.try_mul(&repl)?;
                cur += 1;
            }
            part.trunc = out.trunc.clone();
            out = out.try_add(&part.try_mul(&power)?)?;
        }
        Ok(out)
    }

    /// Partial derivative with respect to `var`.
    pub fn derivative(&self, var: &str) -> MultiPoly {
        let Some(idx) = self.var_index(var) else {
            return MultiPoly { vars: self.vars.clone(), terms: BTreeMap::new(), trunc: self.trunc.clone() };
        };
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[idx] -= 1;
            insert_add(&mut terms, f, c.scale(&rat_int(e[idx] as i64)));
        }
        MultiPoly { vars: self.vars.clone(), terms, trunc: self.trunc.clone() }
    }

    /// Renames variables; names absent from the map are kept.
    pub fn rename(&self, map: &HashMap<String, String>) -> MultiPoly {
        let mut out = self.clone();
        for v in out.vars.iter_mut() {
            if let Some(w) = map.get(v) {
                *v = w.clone();
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&GaussRat) -> GaussRat) -> MultiPoly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            insert_add(&mut terms, e.clone(), f(c));
        }
        MultiPoly { vars: self.vars.clone(), terms, trunc: self.trunc.clone() }
    }

    /// Largest `|re| + |im|` over all coefficients (zero for the zero polynomial).
    pub fn max_l1(&self) -> Rat {
        self.terms.values().map(GaussRat::l1).max().unwrap_or_else(Rat::zero)
    }

    fn nilpotent_part(&self, what: &str) -> Result<(GaussRat, MultiPoly, Truncation)> {
        let t = self
            .trunc
            .clone()
            .ok_or_else(|| Error::SeriesDomain(format!("{what} needs a truncated series")))?;
        let plan = t.plan(&self.vars);
        let c0 = self.constant_term();
        let mut rest = self.clone();
        rest.terms.retain(|e, _| e.iter().any(|x| *x > 0));
        if rest.terms.keys().any(|e| !plan.touches(e)) {
            return Err(Error::SeriesDomain(format!(
                "{what}: non-constant part must have positive degree in a truncated variable"
            )));
        }
        Ok((c0, rest, t))
    }

    /// Multiplicative inverse as a truncated series.
    pub fn inverse_series(&self) -> Result<MultiPoly> {
        let (c0, x, t) = self.nilpotent_part("inverse")?;
        let c0inv = c0.inv()?;
        let y = x.scale(&-&c0inv);
        let mut acc = MultiPoly::one().with_truncation(t.clone());
        let mut term = acc.clone();
        for _ in 0..t.nilpotency_bound() {
            term = &term * &y;
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc.scale(&c0inv))
    }

    /// `exp(self)` as a truncated series; the constant term must vanish.
    pub fn exp_series(&self) -> Result<MultiPoly> {
        let (c0, x, t) = self.nilpotent_part("exp")?;
        if !c0.is_zero() {
            return Err(Error::SeriesDomain("exp needs a zero constant term".into()));
        }
        let mut acc = MultiPoly::one().with_truncation(t.clone());
        let mut term = acc.clone();
        for j in 1..=t.nilpotency_bound() {
            term = (&term * &x).scale_rat(&rat(1, j as i64));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// `log(self)` as a truncated series; the constant term must be 1.
    pub fn log_series(&self) -> Result<MultiPoly> {
        let (c0, x, t) = self.nilpotent_part("log")?;
        if !c0.is_one() {
            return Err(Error::SeriesDomain("log needs constant term 1".into()));
        }
        let mut acc = MultiPoly::zero().with_truncation(t.clone());
        let mut power = MultiPoly::one().with_truncation(t.clone());
        for j in 1..=t.nilpotency_bound() {
            power = &power * &x;
            if power.is_zero() {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc = &acc + &power.scale_rat(&rat(sign, j as i64));
        }
        Ok(acc)
    }
}

/// Free-function form of `a * b`; errors on incompatible truncations.
pub fn poly_mul(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
    a.try_mul(b)
}

/// Coefficient of a monomial given as `(variable, exponent)` pairs.
pub fn coeff_extract(p: &MultiPoly, monomial: &[(&str, u32)]) -> Result<GaussRat> {
    p.coeff(monomial)
}

/// Substitutes `var := replacement` for a replacement of degree at most one
/// in `var` itself (so rescalings such as `z := A·z` are allowed).
pub fn substitute_linear(p: &MultiPoly, var: &str, replacement: &MultiPoly) -> Result<MultiPoly> {
    if replacement.degree_in(var).unwrap_or(0) > 1 {
        return Err(Error::NotLinear(var.to_string()));
    }
    p.substitute(var, replacement)
}

impl PartialEq for MultiPoly {
    fn eq(&self, o: &MultiPoly) -> bool {
        let a = self.compact();
        let b = o.compact();
        if a.terms.len() != b.terms.len() {
            return false;
        }
        match b.align(&a.vars) {
            Ok(b) => a.terms == b.terms,
            Err(_) => false,
        }
    }
}

impl Eq for MultiPoly {}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    /// Panics on incompatible truncations; use [`MultiPoly::try_add`] to handle that case.
    fn add(self, o: &MultiPoly) -> MultiPoly {
        self.try_add(o).expect("incompatible truncation settings")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, o: &MultiPoly) -> MultiPoly {
        self.try_sub(o).expect("incompatible truncation settings")
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, o: &MultiPoly) -> MultiPoly {
        self.try_mul(o).expect("incompatible truncation settings")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.neg_ref()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, x)| **x > 0)
                .map(|(k, x)| if *x == 1 { self.vars[k].clone() } else { format!("{}^{}", self.vars[k], x) })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else if c.is_real() {
                write!(f, "{}*{}", c, mono.join("*"))?;
            } else {
                write!(f, "({})*{}", c, mono.join("*"))?;
            }
        }
        Ok(())
    }
}
