//! Fourier symbols of differential polynomials at ε = 0.
//!
//! A density symbol stands for
//! `Σ_m Σ_{a∈ℤ^m} φ_m(a) ĥ^g p_{a_1}…p_{a_m} e^{ix·Σa}`; an integrated one for
//! the same sum restricted to `Σa = 0`.  Each [`SymbolTerm`] stores one
//! `(g, m, φ)` with `φ` a polynomial in the slot variables `a1..am`; the usual
//! `1/m!` normalisations are folded into `φ`.

use crate::algebra::{rat, rat_int, GaussRat, MultiPoly, Rat};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Name of the `k`-th slot variable (zero-based).
pub fn slot_var(k: usize) -> String {
    format!("a{}", k + 1)
}

pub fn slot_vars(m: usize) -> Vec<String> {
    (0..m).map(slot_var).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Density,
    Integrated,
}

#[derive(Clone, Debug)]
pub struct SymbolTerm {
    pub grade: u32,
    pub slots: usize,
    pub coeff: MultiPoly,
}

impl SymbolTerm {
    /// Re-expresses `coeff` over exactly `a1..a_slots`.
    pub fn new(grade: u32, slots: usize, coeff: MultiPoly) -> Result<Self> {
        let coeff = coeff.without_truncation().align(&slot_vars(slots))?;
        Ok(SymbolTerm { grade, slots, coeff })
    }

    pub fn constant(grade: u32, slots: usize, c: GaussRat) -> Self {
        let coeff = MultiPoly::constant(c).align(&slot_vars(slots)).expect("constant aligns");
        SymbolTerm { grade, slots, coeff }
    }
}

#[derive(Clone, Debug)]
pub struct FourierSymbol {
    pub kind: Kind,
    pub terms: Vec<SymbolTerm>,
}

impl FourierSymbol {
    pub fn new(kind: Kind, terms: Vec<SymbolTerm>) -> Self {
        FourierSymbol { kind, terms }.normalized()
    }

    pub fn zero(kind: Kind) -> Self {
        FourierSymbol { kind, terms: Vec::new() }
    }

    /// The density symbol of `u_0`: one slot, coefficient 1.
    pub fn u0() -> Self {
        FourierSymbol::new(Kind::Density, vec![SymbolTerm::constant(0, 1, GaussRat::one())])
    }

    /// Merges terms with equal `(grade, slots)`, drops zeros, sorts.
    pub fn normalized(self) -> Self {
        let mut map: BTreeMap<(u32, usize), MultiPoly> = BTreeMap::new();
        for t in self.terms {
            let slot = map.entry((t.grade, t.slots)).or_insert_with(|| {
                MultiPoly::zero().align(&slot_vars(t.slots)).expect("zero aligns")
            });
            *slot = &*slot + &t.coeff;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((g, m), c)| SymbolTerm { grade: g, slots: m, coeff: c })
            .collect();
        FourierSymbol { kind: self.kind, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_zero())
    }

    pub fn max_grade(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.grade).max()
    }

    pub fn term(&self, grade: u32, slots: usize) -> Option<&SymbolTerm> {
        self.terms.iter().find(|t| t.grade == grade && t.slots == slots)
    }

    pub fn add(&self, o: &FourierSymbol) -> FourierSymbol {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        FourierSymbol { kind: self.kind, terms }.normalized()
    }

    pub fn scale(&self, k: &GaussRat) -> FourierSymbol {
        let terms = self
            .terms
            .iter()
            .map(|t| SymbolTerm { grade: t.grade, slots: t.slots, coeff: t.coeff.scale(k) })
            .collect();
        FourierSymbol { kind: self.kind, terms }.normalized()
    }

    /// JSON rendering for debugging: grade, slot count and coefficient text.
    pub fn to_json(&self) -> String {
        let kind = match self.kind {
            Kind::Density => "density",
            Kind::Integrated => "integrated",
        };
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("{{\"grade\":{},\"slots\":{},\"coeff\":\"{}\"}}", t.grade, t.slots, t.coeff))
            .collect();
        format!("{{\"kind\":\"{kind}\",\"terms\":[{}]}}", terms.join(","))
    }
}

impl PartialEq for FourierSymbol {
    fn eq(&self, o: &FourierSymbol) -> bool {
        let a = self.clone().normalized();
        let b = o.clone().normalized();
        a.kind == b.kind
            && a.terms.len() == b.terms.len()
            && a.terms.iter().zip(&b.terms).all(|(x, y)| x.grade == y.grade && x.slots == y.slots && x.coeff == y.coeff)
    }
}

/// Distinct permutations of a multiset, starting from its sorted form.
pub(crate) fn distinct_permutations(mut v: Vec<u32>) -> Vec<Vec<u32>> {
    v.sort_unstable();
    let mut out = vec![v.clone()];
    loop {
        let n = v.len();
        if n < 2 {
            return out;
        }
        let mut i = n - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = n - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        out.push(v.clone());
    }
}

/// Symmetrisation of a polynomial in `vars`: the average over all
/// permutations of the variables, computed orbit by orbit.
pub fn symmetrize_poly(p: &MultiPoly) -> MultiPoly {
    let mut orbits: BTreeMap<Vec<u32>, GaussRat> = BTreeMap::new();
    for (e, c) in p.terms() {
        let mut key = e.clone();
        key.sort_unstable();
        let slot = orbits.entry(key).or_insert_with(GaussRat::zero);
        *slot += c;
    }
    let mut terms = Vec::new();
    for (key, total) in orbits {
        if total.is_zero() {
            continue;
        }
        let perms = distinct_permutations(key);
        let share = total.scale(&rat(1, perms.len() as i64));
        for e in perms {
            terms.push((e, share.clone()));
        }
    }
    MultiPoly::from_terms(p.vars().to_vec(), terms)
}

/// Orbit sums of a polynomial: sorted exponent vector → summed coefficient.
/// Two polynomials have equal symmetrisations iff their orbit sums agree.
pub fn orbit_sums(p: &MultiPoly) -> BTreeMap<Vec<u32>, GaussRat> {
    let mut orbits: BTreeMap<Vec<u32>, GaussRat> = BTreeMap::new();
    for (e, c) in p.terms() {
        let mut key = e.clone();
        key.sort_unstable();
        let slot = orbits.entry(key).or_insert_with(GaussRat::zero);
        *slot += c;
    }
    orbits.retain(|_, c| !c.is_zero());
    orbits
}

/// Replaces every coefficient by its average over slot permutations.
pub fn symmetrize(s: &FourierSymbol) -> FourierSymbol {
    let terms = s
        .terms
        .iter()
        .map(|t| SymbolTerm { grade: t.grade, slots: t.slots, coeff: symmetrize_poly(&t.coeff) })
        .collect();
    FourierSymbol { kind: s.kind, terms }.normalized()
}

/// Equality after symmetrisation, without materialising the orbits.
pub fn sym_equal(a: &FourierSymbol, b: &FourierSymbol) -> bool {
    let key = |s: &FourierSymbol| -> BTreeMap<(u32, usize), BTreeMap<Vec<u32>, GaussRat>> {
        let mut m: BTreeMap<(u32, usize), MultiPoly> = BTreeMap::new();
        for t in &s.terms {
            let slot = m.entry((t.grade, t.slots)).or_insert_with(|| {
                MultiPoly::zero().align(&slot_vars(t.slots)).expect("zero aligns")
            });
            *slot = &*slot + &t.coeff;
        }
        m.into_iter().map(|(k, p)| (k, orbit_sums(&p))).filter(|(_, o)| !o.is_empty()).collect()
    };
    a.kind == b.kind && key(a) == key(b)
}

fn sum_of_slots(m: usize) -> MultiPoly {
    let mut s = MultiPoly::zero().align(&slot_vars(m)).expect("zero aligns");
    for v in slot_vars(m) {
        s = &s + &MultiPoly::var(&v);
    }
    s
}

/// `∂_x`: multiplies each coefficient by `i·(a_1+…+a_m)`.
pub fn d_x(s: &FourierSymbol) -> Result<FourierSymbol> {
    if s.kind != Kind::Density {
        return Err(Error::KindMismatch("d_x needs a density symbol".into()));
    }
    let terms = s
        .terms
        .iter()
        .map(|t| {
            let c = (&t.coeff * &sum_of_slots(t.slots)).scale(&GaussRat::i());
            SymbolTerm::new(t.grade, t.slots, c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierSymbol::new(Kind::Density, terms))
}

/// Moves slot `j` of an `m`-slot polynomial to a fresh variable `x`, renaming
/// the remaining slots to `a1..a_{m-1}` in order.
fn pull_slot(p: &MultiPoly, m: usize, j: usize, x: &str) -> MultiPoly {
    let mut names: Vec<String> = Vec::with_capacity(m);
    let mut next = 0;
    for k in 0..m {
        if k == j {
            names.push(x.to_string());
        } else {
            names.push(slot_var(next));
            next += 1;
        }
    }
    let (_, terms) = p.align(&slot_vars(m)).expect("slot polynomial").into_terms();
    MultiPoly::from_terms(names, terms)
}

/// `∂/∂p_0`: `(g, m, φ) ↦ (g, m−1, Σ_j φ|_{a_j=0})`, which is
/// `m·φ(a_1,…,a_{m−1},0)` for symmetric `φ`.
pub fn d_dp0(s: &FourierSymbol) -> FourierSymbol {
    let mut terms = Vec::new();
    for t in &s.terms {
        if t.slots == 0 {
            continue;
        }
        let mut acc = MultiPoly::zero();
        for j in 0..t.slots {
            acc = &acc + &pull_slot(&t.coeff, t.slots, j, "#x").eval_var("#x", &GaussRat::zero());
        }
        terms.push(SymbolTerm::new(t.grade, t.slots - 1, acc).expect("slot polynomial"));
    }
    FourierSymbol::new(s.kind, terms)
}

/// Evaluation at `u_i = δ_{i,1}`: per grade, `Σ (−i)^m [a_1⋯a_m] φ`.
/// Grades evaluating to zero are omitted.
pub fn eval_string_point(s: &FourierSymbol) -> BTreeMap<u32, GaussRat> {
    let mut out: BTreeMap<u32, GaussRat> = BTreeMap::new();
    for t in &s.terms {
        let c = t.coeff.coeff_exps(&vec![1; t.slots]);
        let v = &GaussRat::i_pow(-(t.slots as i64)) * &c;
        let slot = out.entry(t.grade).or_insert_with(GaussRat::zero);
        *slot += &v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Differential polynomial at ε = 0: `(ĥ-grade, sorted derivative orders)`
/// → coefficient, representing `ĥ^g u_{s_1}⋯u_{s_n}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffPoly {
    pub terms: BTreeMap<(u32, Vec<u32>), GaussRat>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn add_term(&mut self, grade: u32, mut orders: Vec<u32>, c: GaussRat) {
        orders.sort_unstable();
        let slot = self.terms.entry((grade, orders)).or_insert_with(GaussRat::zero);
        *slot += &c;
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn monomial(grade: u32, orders: &[u32], c: GaussRat) -> Self {
        let mut d = DiffPoly::zero();
        d.add_term(grade, orders.to_vec(), c);
        d
    }

    pub fn add(&self, o: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for ((g, s), c) in &o.terms {
            out.add_term(*g, s.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &GaussRat) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for ((g, s), c) in &self.terms {
            out.add_term(*g, s.clone(), c * k);
        }
        out
    }

    /// `∂_x` with `∂_x u_s = u_{s+1}` (Leibniz rule).
    pub fn d_x(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for ((g, s), c) in &self.terms {
            for j in 0..s.len() {
                let mut t = s.clone();
                t[j] += 1;
                out.add_term(*g, t, c.clone());
            }
        }
        out
    }

    /// `∂/∂u_s`.
    pub fn d_u(&self, order: u32) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for ((g, s), c) in &self.terms {
            let mult = s.iter().filter(|x| **x == order).count();
            if mult == 0 {
                continue;
            }
            let mut t = s.clone();
            let pos = t.iter().position(|x| *x == order).expect("present");
            t.remove(pos);
            out.add_term(*g, t, c.scale(&rat_int(mult as i64)));
        }
        out
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms.keys().flat_map(|(_, s)| s.iter().copied()).max()
    }
}

/// `u_{s_1}⋯u_{s_n} ↦` the symmetrisation of `Π_j (i a_j)^{s_j}` on `n` slots.
pub fn from_diff_poly(d: &DiffPoly) -> FourierSymbol {
    let mut terms = Vec::new();
    for ((g, s), c) in &d.terms {
        let n = s.len();
        let k: u32 = s.iter().sum();
        let mono = MultiPoly::from_terms(slot_vars(n), std::iter::once((s.clone(), GaussRat::one())));
        let coeff = symmetrize_poly(&mono).scale(&(&GaussRat::i_pow(k as i64) * c));
        terms.push(SymbolTerm { grade: *g, slots: n, coeff });
    }
    FourierSymbol::new(Kind::Density, terms)
}

/// Inverse of [`from_diff_poly`]; the symbol is symmetrised first.
pub fn to_diff_poly(s: &FourierSymbol) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for t in &s.terms {
        for (lambda, total) in orbit_sums(&t.coeff) {
            // total = c_λ·|orbit|; the u-monomial maps to (i^{|λ|}/|orbit|)·(orbit sum).
            let k: u32 = lambda.iter().sum();
            let c = &total * &GaussRat::i_pow(-(k as i64));
            out.add_term(t.grade, lambda, c);
        }
    }
    out
}

/// `Σ_s (−∂_x)^s ∂φ/∂u_s`, computed on differential polynomials and
/// converted to a symbol.
pub fn variational_derivative(d: &DiffPoly) -> FourierSymbol {
    let mut acc = DiffPoly::zero();
    let Some(top) = d.max_order() else {
        return FourierSymbol::zero(Kind::Density);
    };
    for s in 0..=top {
        let mut t = d.d_u(s);
        for _ in 0..s {
            t = t.d_x().scale(&GaussRat::int(-1));
        }
        acc = acc.add(&t);
    }
    from_diff_poly(&acc)
}

/// `Σ_b e^{−ibx} ∂φ̄/∂p_b` computed directly on the symbol: each slot in turn
/// is struck and set to minus the sum of the others.
pub fn mode_derivative(s: &FourierSymbol) -> FourierSymbol {
    let mut terms = Vec::new();
    for t in &s.terms {
        if t.slots == 0 {
            continue;
        }
        let m = t.slots;
        let minus_sum = -&sum_of_slots(m - 1);
        let mut acc = MultiPoly::zero();
        for j in 0..m {
            let p = pull_slot(&t.coeff, m, j, "#b");
            acc = &acc + &p.substitute("#b", &minus_sum).expect("polynomial substitution");
        }
        terms.push(SymbolTerm::new(t.grade, m - 1, acc).expect("slot polynomial"));
    }
    FourierSymbol::new(Kind::Density, terms)
}

/// Restriction of each (symmetrised) coefficient to the hyperplane
/// `a_m = −(a_1+…+a_{m−1})`; a symbol with zero zero-mode maps to zero.
pub fn zero_mode_residue(s: &FourierSymbol) -> FourierSymbol {
    let terms = symmetrize(s)
        .terms
        .into_iter()
        .map(|t| {
            if t.slots == 0 {
                return t;
            }
            let last = slot_var(t.slots - 1);
            let minus_sum = -&sum_of_slots(t.slots - 1);
            let c = t.coeff.substitute(&last, &minus_sum).expect("polynomial substitution");
            SymbolTerm::new(t.grade, t.slots, c).expect("slot polynomial")
        })
        .collect();
    FourierSymbol::new(s.kind, terms)
}

/// Helper for tests and oracles: builds `1/m!` as a Gaussian rational.
pub fn inv_factorial(m: usize) -> GaussRat {
    let mut f = Rat::one();
    for k in 2..=m {
        f *= rat_int(k as i64);
    }
    GaussRat::real(f.recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_term(grade: u32, slots: usize, c: MultiPoly) -> FourierSymbol {
        FourierSymbol::new(Kind::Density, vec![SymbolTerm::new(grade, slots, c).unwrap()])
    }

    fn a(k: usize) -> MultiPoly {
        MultiPoly::var(&slot_var(k))
    }

    #[test]
    fn symmetrize_examples() {
        let s = symmetrize(&one_term(0, 2, a(0).pow(2)));
        let expect = (&a(0).pow(2) + &a(1).pow(2)).scale(&GaussRat::frac(1, 2));
        assert_eq!(s, one_term(0, 2, expect));
        let ab = &a(0) * &a(1);
        assert_eq!(symmetrize(&one_term(0, 2, ab.clone())), one_term(0, 2, ab));
        assert!(symmetrize(&one_term(0, 2, &a(0) - &a(1))).is_zero());
    }

    #[test]
    fn d_x_examples() {
        let u1 = d_x(&FourierSymbol::u0()).unwrap();
        assert_eq!(u1, one_term(0, 1, a(0).scale(&GaussRat::i())));
        let u2 = d_x(&u1).unwrap();
        assert_eq!(u2, one_term(0, 1, a(0).pow(2).scale(&GaussRat::int(-1))));
        assert!(d_x(&FourierSymbol::new(Kind::Density, vec![SymbolTerm::constant(0, 0, GaussRat::one())]))
            .unwrap()
            .is_zero());
        let integ = FourierSymbol { kind: Kind::Integrated, terms: vec![] };
        assert!(d_x(&integ).is_err());
    }

    #[test]
    fn d_dp0_examples() {
        let c = FourierSymbol::new(Kind::Density, vec![SymbolTerm::constant(0, 0, GaussRat::one())]);
        assert!(d_dp0(&c).is_zero());
        let ab = (&a(0) * &a(1)).scale(&GaussRat::frac(1, 2));
        assert!(d_dp0(&one_term(0, 2, ab)).is_zero());
    }

    #[test]
    fn string_point_examples() {
        assert!(eval_string_point(&FourierSymbol::u0()).values().all(|v| v.is_zero()));
        let v = eval_string_point(&one_term(0, 1, a(0)));
        assert_eq!(v[&0], -GaussRat::i());
    }

    #[test]
    fn diff_poly_conversions() {
        let u0 = DiffPoly::monomial(0, &[0], GaussRat::one());
        assert_eq!(from_diff_poly(&u0), FourierSymbol::u0());
        assert_eq!(to_diff_poly(&FourierSymbol::u0()), u0);
        let u1u1 = DiffPoly::monomial(0, &[1, 1], GaussRat::one());
        assert_eq!(from_diff_poly(&u1u1), one_term(0, 2, (&a(0) * &a(1)).scale(&GaussRat::int(-1))));
        let mixed = DiffPoly::monomial(1, &[0, 2, 3], GaussRat::frac(3, 7))
            .add(&DiffPoly::monomial(0, &[1], GaussRat::i()))
            .add(&DiffPoly::monomial(2, &[], GaussRat::frac(-1, 24)));
        assert_eq!(to_diff_poly(&from_diff_poly(&mixed)), mixed);
    }

    #[test]
    fn variational_examples() {
        let half_u0_sq = DiffPoly::monomial(0, &[0, 0], GaussRat::frac(1, 2));
        assert_eq!(variational_derivative(&half_u0_sq), FourierSymbol::u0());
        assert_eq!(mode_derivative(&from_diff_poly(&half_u0_sq)), FourierSymbol::u0());
        let u0 = DiffPoly::monomial(0, &[0], GaussRat::one());
        let one = FourierSymbol::new(Kind::Density, vec![SymbolTerm::constant(0, 0, GaussRat::one())]);
        assert_eq!(variational_derivative(&u0), one);
        assert_eq!(mode_derivative(&from_diff_poly(&u0)), one);
        assert!(variational_derivative(&DiffPoly::zero()).is_zero());
    }
}
