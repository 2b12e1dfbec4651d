//! Quantum KdV Hamiltonian densities at ε = 0 and the star-product
//! commutator engine.
//!
//! The star product is `f ⋆ g = f exp(Σ_{k>0} ĥ k ∂←_{p_k} ∂→_{p_{−k}}) g`
//! with `ĥ = iℏ`.  A commutator of a density with an integrated symbol is
//! computed term by term: `q` slots of each side are contracted against
//! positive modes `k_1..k_q`, the zero-mode constraint of the integrated side
//! forces `Σk = B̃` (the sum of its surviving slots), and the resulting
//! power sums over compositions are replaced by their Ehrhart polynomials.

use crate::algebra::{rat_int, GaussRat, MultiPoly, Rat, Truncation};
use crate::special::{ehrhart_cached, s_scaled, s_series, series_inverse};
use crate::symbols::{eval_string_point, slot_var, slot_vars, FourierSymbol, Kind, SymbolTerm};
use crate::{Error, Result};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

/// Highest ĥ-grade kept by a commutator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BracketBudget {
    pub max_hbar_grade: u32,
}

impl BracketBudget {
    pub fn new(max_hbar_grade: u32) -> Self {
        BracketBudget { max_hbar_grade }
    }
}

fn factorial(m: usize) -> Rat {
    let mut f = Rat::one();
    for k in 2..=m {
        f *= rat_int(k as i64);
    }
    f
}

fn falling(m: usize, q: usize) -> Rat {
    let mut f = Rat::one();
    for j in 0..q {
        f *= rat_int((m - j) as i64);
    }
    f
}

/// `H_d` at ε = 0: for each `g` with `m = d + 2 − 2g ≥ 0`, the term
/// `(1/m!) [z^{2g}] Π S(a_i z) · S((Σa) z) / S(z)` at ĥ-grade `g`.
pub fn hamiltonian_density(d: i64) -> Result<FourierSymbol> {
    if d < -1 {
        return Err(Error::InvalidArgument(format!("Hamiltonian index {d} < -1")));
    }
    let mut terms = Vec::new();
    let mut g = 0i64;
    while d + 2 - 2 * g >= 0 {
        let m = (d + 2 - 2 * g) as usize;
        let order = 2 * g as u32;
        let mut series = series_inverse(&s_series(order), "z", order)?;
        let mut sum = MultiPoly::zero();
        for v in slot_vars(m) {
            let a = MultiPoly::var(&v);
            series = &series * &s_scaled(&a, "z", order);
            sum = &sum + &a;
        }
        series = &series * &s_scaled(&sum, "z", order);
        let coeff = series.coeff_of("z", order).scale_rat(&factorial(m).recip());
        terms.push(SymbolTerm::new(g as u32, m, coeff)?);
        g += 1;
    }
    Ok(FourierSymbol::new(Kind::Density, terms))
}

/// `H̄ = ∫ H dx`: same terms, flagged with the zero-total-mode constraint.
pub fn integrate_hamiltonian(h: &FourierSymbol) -> Result<FourierSymbol> {
    if h.kind != Kind::Density {
        return Err(Error::KindMismatch("only a density can be integrated".into()));
    }
    Ok(FourierSymbol { kind: Kind::Integrated, terms: h.terms.clone() })
}

fn k_var(j: usize) -> String {
    format!("#k{}", j + 1)
}

/// All increasing `q`-subsets of `0..m`.
fn subsets(m: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(q);
    fn go(start: usize, m: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for s in start..m {
            if m - s < q - cur.len() {
                break;
            }
            cur.push(s);
            go(s + 1, m, q, cur, out);
            cur.pop();
        }
    }
    go(0, m, q, &mut cur, &mut out);
    out
}

/// One contraction pattern between a density term and an integrated term.
struct Contraction<'a> {
    phi: &'a MultiPoly,
    psi: &'a MultiPoly,
    ml: usize,
    mr: usize,
    q: usize,
    out_trunc: Option<Truncation>,
}

impl Contraction<'_> {
    fn layout(&self) -> Vec<String> {
        let mout = self.ml + self.mr - 2 * self.q;
        (0..self.q).map(k_var).chain(slot_vars(mout)).collect()
    }

    /// `Σ_S φ_S · ψ` with L's struck slots set to `sl·k` and R's first `q`
    /// slots set to `sr·k`, `sl, sr ∈ {±1}`.
    fn product(&self, sl: i64, sr: i64) -> Result<MultiPoly> {
        let (q, ml, mr) = (self.q, self.ml, self.mr);
        let ol = ml - q;
        let width = q + ml + mr - 2 * q;
        let vars = self.layout();
        let mut phi_terms: Vec<(Vec<u32>, GaussRat)> = Vec::new();
        for s in subsets(ml, q) {
            let rest: Vec<usize> = (0..ml).filter(|i| !s.contains(i)).collect();
            for (e, c) in self.phi.terms() {
                let mut f = vec![0u32; width];
                let mut kdeg = 0;
                for (j, &slot) in s.iter().enumerate() {
                    f[j] = e[slot];
                    kdeg += e[slot];
                }
                for (i, &slot) in rest.iter().enumerate() {
                    f[q + i] = e[slot];
                }
                let c = if sl < 0 && kdeg % 2 == 1 { -c } else { c.clone() };
                phi_terms.push((f, c));
            }
        }
        let mut psi_terms: Vec<(Vec<u32>, GaussRat)> = Vec::new();
        for (e, c) in self.psi.terms() {
            let mut f = vec![0u32; width];
            let mut kdeg = 0;
            for j in 0..q {
                f[j] = e[j];
                kdeg += e[j];
            }
            for i in 0..mr - q {
                f[q + ol + i] = e[q + i];
            }
            let c = if sr < 0 && kdeg % 2 == 1 { -c } else { c.clone() };
            psi_terms.push((f, c));
        }
        let mut a = MultiPoly::from_terms(vars.clone(), phi_terms);
        let mut b = MultiPoly::from_terms(vars, psi_terms);
        if let Some(t) = &self.out_trunc {
            a = a.with_truncation(t.clone());
            b = b.with_truncation(t.clone());
        }
        a.try_mul(&b)
    }

    /// Multiplies by `Π k_j` and replaces each `Π k_j^{r_j}` by `C^r(N)`;
    /// returns a polynomial in the output slots and `N`.
    fn ehrhart(&self, p: &MultiPoly) -> MultiPoly {
        let q = self.q;
        let mout = self.ml + self.mr - 2 * q;
        let mut groups: BTreeMap<Vec<u32>, Vec<(Vec<u32>, GaussRat)>> = BTreeMap::new();
        for (e, c) in p.terms() {
            let r: Vec<u32> = e[..q].iter().map(|x| x + 1).collect();
            groups.entry(r).or_default().push((e[q..].to_vec(), c.clone()));
        }
        let mut out = MultiPoly::zero();
        if let Some(t) = &self.out_trunc {
            out = out.with_truncation(t.clone());
        }
        for (r, rest) in groups {
            let mut rest = MultiPoly::from_terms(slot_vars(mout), rest);
            if let Some(t) = &self.out_trunc {
                rest = rest.with_truncation(t.clone());
            }
            out = &out + &(&rest * &ehrhart_cached(&r));
        }
        out
    }
}

fn bracket_terms(
    tl: &SymbolTerm,
    tr: &SymbolTerm,
    q: usize,
    multilinear: bool,
) -> Result<MultiPoly> {
    let mout = tl.slots + tr.slots - 2 * q;
    let out_trunc = multilinear.then(|| {
        let names = slot_vars(mout);
        Truncation::PerVar(names.into_iter().map(|v| (v, 1)).collect())
    });
    let c = Contraction { phi: &tl.coeff, psi: &tr.coeff, ml: tl.slots, mr: tr.slots, q, out_trunc };
    // Forward branch L⋆R: L's slots get +k, R's get −k, N = B̃.
    let fwd = c.ehrhart(&c.product(1, -1)?);
    // Reverse branch R⋆L: signs swapped, N = −B̃.
    let rev = c.ehrhart(&c.product(-1, 1)?);
    let rev_neg = -&rev.substitute("N", &-&MultiPoly::var("N"))?;
    if fwd != rev_neg {
        return Err(Error::Invariant(format!(
            "forward and reverse Ehrhart branches differ (q = {q}, slots {}×{})",
            tl.slots, tr.slots
        )));
    }
    let mut btilde = MultiPoly::zero();
    for i in (tl.slots - q)..mout {
        btilde = &btilde + &MultiPoly::var(&slot_var(i));
    }
    let out = fwd.substitute("N", &btilde)?;
    Ok(out.scale_rat(&falling(tr.slots, q)))
}

fn bracket_impl(l: &FourierSymbol, r: &FourierSymbol, budget: u32, multilinear: bool) -> Result<FourierSymbol> {
    if l.kind != Kind::Density {
        return Err(Error::KindMismatch("left operand of a bracket must be a density".into()));
    }
    if r.kind != Kind::Integrated {
        return Err(Error::KindMismatch("right operand of a bracket must be integrated".into()));
    }
    let mut acc: BTreeMap<(u32, usize), MultiPoly> = BTreeMap::new();
    for tl in &l.terms {
        for tr in &r.terms {
            for q in 1..=tl.slots.min(tr.slots) {
                let grade = tl.grade + tr.grade + q as u32 - 1;
                if grade > budget {
                    break;
                }
                let c = bracket_terms(tl, tr, q, multilinear)?;
                if c.is_zero() {
                    continue;
                }
                let mout = tl.slots + tr.slots - 2 * q;
                let slot = acc.entry((grade, mout)).or_insert_with(MultiPoly::zero);
                *slot = slot.clone().without_truncation().try_add(&c.without_truncation())?;
            }
        }
    }
    let terms = acc
        .into_iter()
        .map(|((g, m), c)| SymbolTerm::new(g, m, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(FourierSymbol::new(Kind::Density, terms))
}

/// `(L⋆R − R⋆L)/ĥ` for a density `L` and an integrated `R`, dropping grades
/// above the budget.
///
/// `R`'s coefficients are assumed symmetric (true of every `H̄_d`); `L` may be
/// arbitrary, its contracted slots being summed over all subsets.  Each
/// contraction asserts that the forward and reverse Ehrhart branches are
/// the same polynomial, `E_fwd(N) = −E_rev(−N)`.
pub fn bracket(l: &FourierSymbol, r: &FourierSymbol, budget: BracketBudget) -> Result<FourierSymbol> {
    bracket_impl(l, r, budget.max_hbar_grade, false)
}

/// Like [`bracket`] but keeps only monomials of degree ≤ 1 in every output
/// slot, which is all that [`eval_string_point`] reads.
pub fn bracket_multilinear(l: &FourierSymbol, r: &FourierSymbol, budget: BracketBudget) -> Result<FourierSymbol> {
    bracket_impl(l, r, budget.max_hbar_grade, true)
}

fn drop_grades_above(s: &FourierSymbol, g: u32) -> FourierSymbol {
    FourierSymbol { kind: s.kind, terms: s.terms.iter().filter(|t| t.grade <= g).cloned().collect() }
}

/// Keyed by `(insertions, genus)`.
type Cache<T> = RwLock<HashMap<(Vec<u32>, u32), T>>;

/// Memoising front end for Hamiltonians and nested commutators.  Safe to
/// share between threads.
#[derive(Default)]
pub struct Engine {
    hams: RwLock<HashMap<i64, Arc<FourierSymbol>>>,
    prefixes: Cache<Arc<FourierSymbol>>,
    values: Cache<Arc<BTreeMap<u32, GaussRat>>>,
}

impl Engine {
    pub fn new() -> Self {
        Engine::default()
    }

    pub fn hamiltonian(&self, d: i64) -> Result<Arc<FourierSymbol>> {
        if let Some(h) = self.hams.read().expect("lock").get(&d) {
            return Ok(h.clone());
        }
        let h = Arc::new(hamiltonian_density(d)?);
        self.hams.write().expect("lock").insert(d, h.clone());
        Ok(h)
    }

    fn integrated(&self, d: i64) -> Result<FourierSymbol> {
        integrate_hamiltonian(&*self.hamiltonian(d)?)
    }

    /// `[…[H_{d_1−1}, H̄_{d_2}]…, H̄_{d_k}]` truncated at grade `g`.
    fn prefix(&self, d: &[u32], g: u32) -> Result<Arc<FourierSymbol>> {
        let key = (d.to_vec(), g);
        if let Some(s) = self.prefixes.read().expect("lock").get(&key) {
            return Ok(s.clone());
        }
        let s = if d.len() == 1 {
            drop_grades_above(&*self.hamiltonian(d[0] as i64 - 1)?, g)
        } else {
            let head = self.prefix(&d[..d.len() - 1], g)?;
            bracket(&head, &self.integrated(d[d.len() - 1] as i64)?, BracketBudget::new(g))?
        };
        let s = Arc::new(s);
        self.prefixes.write().expect("lock").insert(key, s.clone());
        Ok(s)
    }

    /// Nested commutator evaluated at the string point, per ĥ-grade `≤ g`.
    pub fn nested_bracket(&self, d: &[u32], g: u32) -> Result<Arc<BTreeMap<u32, GaussRat>>> {
        if d.is_empty() {
            return Err(Error::InvalidArgument("empty insertion list".into()));
        }
        let key = (d.to_vec(), g);
        if let Some(v) = self.values.read().expect("lock").get(&key) {
            return Ok(v.clone());
        }
        let sym = if d.len() == 1 {
            drop_grades_above(&*self.hamiltonian(d[0] as i64 - 1)?, g)
        } else {
            let head = self.prefix(&d[..d.len() - 1], g)?;
            bracket_multilinear(&head, &self.integrated(d[d.len() - 1] as i64)?, BracketBudget::new(g))?
        };
        let v = Arc::new(eval_string_point(&sym));
        self.values.write().expect("lock").insert(key, v.clone());
        Ok(v)
    }
}

/// One-shot [`Engine::nested_bracket`] without a shared cache.
pub fn nested_bracket(d: &[u32], g: u32) -> Result<BTreeMap<u32, GaussRat>> {
    Ok((*Engine::new().nested_bracket(d, g)?).clone())
}

/// Direct normal-ordered commutators in the Weyl algebra generated by
/// finitely many modes `p_a`, `|a| ≤ M`, with `[p_a, p_b] = ĥ a δ_{a+b,0}`.
/// Independent of the symbolic engine; used as its oracle.
pub mod weyl {
    use super::*;

    /// Normal-ordered operator: (sorted modes, ĥ-power) → coefficient.
    pub type Operator = BTreeMap<(Vec<i64>, u32), GaussRat>;

    fn add_to(op: &mut Operator, key: (Vec<i64>, u32), c: GaussRat) {
        let slot = op.entry(key).or_insert_with(GaussRat::zero);
        *slot += &c;
    }

    /// Normal form of a word: negative modes to the left of positive ones,
    /// via `p_x p_y = p_y p_x + ĥ x δ_{x+y,0}` for `x > 0 > y`.
    pub fn normal_order(word: &[i64]) -> Vec<(Vec<i64>, u32, i64)> {
        let zeros: Vec<i64> = word.iter().copied().filter(|x| *x == 0).collect();
        let nz: Vec<i64> = word.iter().copied().filter(|x| *x != 0).collect();
        let mut out = Vec::new();
        fn go(w: Vec<i64>, h: u32, c: i64, out: &mut Vec<(Vec<i64>, u32, i64)>) {
            let pos = (0..w.len().saturating_sub(1)).find(|&j| w[j] > 0 && w[j + 1] < 0);
            match pos {
                None => out.push((w, h, c)),
                Some(j) => {
                    let (x, y) = (w[j], w[j + 1]);
                    let mut swapped = w.clone();
                    swapped.swap(j, j + 1);
                    go(swapped, h, c, out);
                    if x + y == 0 {
                        let mut cut = w;
                        cut.drain(j..j + 2);
                        go(cut, h + 1, c * x, out);
                    }
                }
            }
        }
        go(nz, 0, 1, &mut out);
        for (w, _, _) in out.iter_mut() {
            w.extend(zeros.iter().copied());
            w.sort_unstable();
        }
        out
    }

    /// Normal-ordered product of two normal-ordered monomials.
    fn product(a: &[i64], b: &[i64]) -> Vec<(Vec<i64>, u32, i64)> {
        let mut w = a.to_vec();
        w.extend_from_slice(b);
        normal_order(&w)
    }

    fn tuples(m: usize, max: i64) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for _ in 0..m {
            let mut next = Vec::new();
            for t in &out {
                for a in -max..=max {
                    let mut u = t.clone();
                    u.push(a);
                    next.push(u);
                }
            }
            out = next;
        }
        out
    }

    fn eval_at(p: &MultiPoly, modes: &[i64]) -> GaussRat {
        let vals: HashMap<String, GaussRat> =
            modes.iter().enumerate().map(|(k, a)| (slot_var(k), GaussRat::int(*a))).collect();
        p.eval(&vals).expect("slot polynomial")
    }

    /// `(L R − R L)/ĥ` with `L = Σ_a φ(a) ĥ^g p_a` and `R` restricted to
    /// total mode zero, on modes `|a_i| ≤ max`.
    ///
    /// Exact on every output monomial with `Σ|c| ≤ max`: the contracted modes
    /// of `L` all have one sign and sum to minus the surviving modes of `R`,
    /// so only `L`-monomials with `Σ|a| ≤ max` and `R`-monomials with
    /// `Σ|b| ≤ 2·max` can reach such an output; the others are skipped.
    pub fn commutator(l: &FourierSymbol, r: &FourierSymbol, max: i64) -> Operator {
        let mut out = Operator::new();
        let mut lmonos: Vec<(Vec<i64>, u32, GaussRat)> = Vec::new();
        for t in &l.terms {
            for a in tuples(t.slots, max) {
                if a.iter().map(|x| x.abs()).sum::<i64>() > max {
                    continue;
                }
                let c = eval_at(&t.coeff, &a);
                if !c.is_zero() {
                    let mut s = a.clone();
                    s.sort_unstable();
                    lmonos.push((s, t.grade, c));
                }
            }
        }
        let mut rmonos: Vec<(Vec<i64>, u32, GaussRat)> = Vec::new();
        for t in &r.terms {
            for b in tuples(t.slots, max) {
                if b.iter().sum::<i64>() != 0 || b.iter().map(|x| x.abs()).sum::<i64>() > 2 * max {
                    continue;
                }
                let c = eval_at(&t.coeff, &b);
                if !c.is_zero() {
                    let mut s = b.clone();
                    s.sort_unstable();
                    rmonos.push((s, t.grade, c));
                }
            }
        }
        for (a, ga, ca) in &lmonos {
            for (b, gb, cb) in &rmonos {
                let c = ca * cb;
                for (w, h, k) in product(a, b) {
                    add_to(&mut out, (w, ga + gb + h), c.scale(&rat_int(k)));
                }
                for (w, h, k) in product(b, a) {
                    add_to(&mut out, (w, ga + gb + h), -c.scale(&rat_int(k)));
                }
            }
        }
        // Divide by ĥ: the ĥ^0 parts cancel between the two orderings.
        let mut divided = Operator::new();
        for ((w, h), c) in out {
            if c.is_zero() {
                continue;
            }
            assert!(h > 0, "commutator has an ĥ^0 part");
            divided.insert((w, h - 1), c);
        }
        divided
    }

    /// Multisets of `m` modes in `[−max, max]` with `Σ|c| ≤ max`.
    pub fn window(m: usize, max: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        fn go(m: usize, lo: i64, max: i64, budget: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if cur.len() == m {
                out.push(cur.clone());
                return;
            }
            for a in lo..=max {
                if a.abs() > budget {
                    continue;
                }
                cur.push(a);
                go(m, a, max, budget - a.abs(), cur, out);
                cur.pop();
            }
        }
        go(m, -max, max, max, &mut Vec::new(), &mut out);
        out
    }

    /// Operator coefficient of a density symbol on the monomial with
    /// multiset `c`: the sum of the slot coefficient over distinct orderings.
    pub fn symbol_coefficient(s: &FourierSymbol, grade: u32, c: &[i64]) -> GaussRat {
        let Some(t) = s.term(grade, c.len()) else {
            return GaussRat::zero();
        };
        let offset = c.iter().copied().min().unwrap_or(0).min(0);
        let shifted: Vec<u32> = c.iter().map(|x| (x - offset) as u32).collect();
        let mut acc = GaussRat::zero();
        for perm in crate::symbols::distinct_permutations(shifted) {
            let modes: Vec<i64> = perm.iter().map(|x| *x as i64 + offset).collect();
            acc += &eval_at(&t.coeff, &modes);
        }
        acc
    }

    /// `(modes, grade, symbolic value, direct value)`.
    pub type Mismatch = (Vec<i64>, u32, GaussRat, GaussRat);

    /// First disagreement between the symbolic bracket and the Weyl-algebra
    /// commutator on monomials with `Σ|c| ≤ max`, if any.
    pub fn compare(
        l: &FourierSymbol,
        r: &FourierSymbol,
        max: i64,
    ) -> Result<Option<Mismatch>> {
        let budget = l.max_grade().unwrap_or(0) + r.max_grade().unwrap_or(0) + 2 * max as u32;
        let sym = bracket(l, r, BracketBudget::new(budget))?;
        let direct = commutator(l, r, max);
        let max_out = l.terms.iter().map(|t| t.slots).max().unwrap_or(0)
            + r.terms.iter().map(|t| t.slots).max().unwrap_or(0);
        let max_grade = direct.keys().map(|(_, h)| *h).chain(sym.terms.iter().map(|t| t.grade)).max().unwrap_or(0);
        for m in 0..=max_out {
            for c in window(m, max) {
                for g in 0..=max_grade {
                    let want = direct.get(&(c.clone(), g)).cloned().unwrap_or_else(GaussRat::zero);
                    let got = symbol_coefficient(&sym, g, &c);
                    if want != got {
                        return Ok(Some((c, g, got, want)));
                    }
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{d_dp0, d_x, sym_equal};

    fn a(k: usize) -> MultiPoly {
        MultiPoly::var(&slot_var(k))
    }

    #[test]
    fn low_hamiltonians() {
        assert_eq!(hamiltonian_density(-1).unwrap(), FourierSymbol::u0());
        let h0 = hamiltonian_density(0).unwrap();
        let expect = FourierSymbol::new(
            Kind::Density,
            vec![SymbolTerm::constant(0, 2, GaussRat::frac(1, 2)), SymbolTerm::constant(1, 0, GaussRat::frac(-1, 24))],
        );
        assert_eq!(h0, expect);
        let h1 = hamiltonian_density(1).unwrap();
        assert_eq!(h1.term(0, 3).unwrap().coeff, MultiPoly::constant(GaussRat::frac(1, 6)));
        let g1 = (&a(0).pow(2).scale(&GaussRat::int(2)) - &MultiPoly::one()).scale(&GaussRat::frac(1, 24));
        assert_eq!(h1.term(1, 1).unwrap().coeff, g1);
        assert!(hamiltonian_density(-2).is_err());
    }

    #[test]
    fn integration_flag() {
        let h0 = hamiltonian_density(0).unwrap();
        let hb = integrate_hamiltonian(&h0).unwrap();
        assert_eq!(hb.kind, Kind::Integrated);
        assert!(integrate_hamiltonian(&hb).is_err());
    }

    #[test]
    fn string_lemma_low() {
        for d in 0..=4 {
            assert_eq!(d_dp0(&hamiltonian_density(d).unwrap()), hamiltonian_density(d - 1).unwrap());
        }
    }

    #[test]
    fn first_bracket() {
        let h = hamiltonian_density(-1).unwrap();
        let hb = integrate_hamiltonian(&hamiltonian_density(0).unwrap()).unwrap();
        let b = bracket(&h, &hb, BracketBudget::new(3)).unwrap();
        assert_eq!(b, FourierSymbol::new(Kind::Density, vec![SymbolTerm::new(0, 1, a(0)).unwrap()]));
        assert_eq!(eval_string_point(&b)[&0], -GaussRat::i());
        assert!(bracket(&hb, &hb, BracketBudget::new(1)).is_err());
    }

    #[test]
    fn bracket_with_h0_is_x_derivative() {
        let hb = integrate_hamiltonian(&hamiltonian_density(0).unwrap()).unwrap();
        let l = FourierSymbol::new(
            Kind::Density,
            vec![
                SymbolTerm::new(0, 2, &a(0).pow(3) + &a(1)).unwrap(),
                SymbolTerm::new(1, 3, &(&a(0) * &a(2)) - &MultiPoly::constant(GaussRat::frac(2, 3))).unwrap(),
            ],
        );
        let b = bracket(&l, &hb, BracketBudget::new(5)).unwrap();
        let dx = d_x(&l).unwrap().scale(&-GaussRat::i());
        assert!(sym_equal(&b, &dx));
    }

    #[test]
    fn nested_examples() {
        let v = nested_bracket(&[1], 1).unwrap();
        assert_eq!(v[&1], GaussRat::frac(-1, 24));
        let v = nested_bracket(&[0, 0], 0).unwrap();
        assert_eq!(v[&0], -GaussRat::i());
    }

    #[test]
    fn weyl_normal_order() {
        let out = weyl::normal_order(&[2, -2]);
        assert_eq!(out.len(), 2);
        assert!(out.contains(&(vec![-2, 2], 0, 1)));
        assert!(out.contains(&(vec![], 1, 2)));
        assert_eq!(weyl::normal_order(&[-1, 0, 3]), vec![(vec![-1, 0, 3], 0, 1)]);
    }

    #[test]
    fn weyl_oracle_small() {
        let l = FourierSymbol::new(Kind::Density, vec![SymbolTerm::new(0, 2, &a(0).pow(2) + &a(1)).unwrap()]);
        let r = integrate_hamiltonian(&hamiltonian_density(1).unwrap()).unwrap();
        assert_eq!(weyl::compare(&l, &r, 4).unwrap(), None);
    }
}
