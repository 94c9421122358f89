//! Adapted differential forms on the source of an adapted diagonal cover.
//!
//! Forms are written in the dlog basis: a p-form is a map from p-element
//! index sets `I` to polynomial coefficients of `e_I = dy_{i1}/y_{i1} ^ ... ^
//! dy_{ip}/y_{ip}`. In this basis the module of adapted p-forms is free with
//! monomial generators, and membership is an entrywise divisibility test
//! against a per-coordinate depth vector. The [`kernel_oracle`] recomputes the
//! same module directly from the defining residue and quotient maps, giving an
//! independent check of the depth formula.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::Result;
use crate::exactnum::{CyclotomicNumber, Rational};
use crate::orbifold::{require_adapted, DiagonalMap, Multiplicity, OrbifoldChart};
use crate::poly::{ExponentVector, SparsePoly};

/// All exponent vectors of length `n` with total degree at most `bound`,
/// in ascending lexicographic order.
pub fn compositions_up_to(n: usize, bound: u64) -> Vec<ExponentVector> {
    fn rec(n: usize, bound: u64, prefix: &mut Vec<u64>, out: &mut Vec<ExponentVector>) {
        if prefix.len() == n {
            out.push(ExponentVector(prefix.clone()));
            return;
        }
        for v in 0..=bound {
            prefix.push(v);
            rec(n, bound - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, bound, &mut Vec::new(), &mut out);
    out
}

/// All strictly increasing `k`-element subsets of `0..n`, lexicographically.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for i in start..n {
            prefix.push(i);
            rec(n, k, i + 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Sign of the shuffle merging two disjoint increasing index sets, together
/// with the merged set; `None` if the sets intersect.
fn shuffle_sign(left: &[usize], right: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut inversions = 0u64;
    for (pos, i) in left.iter().enumerate() {
        for j in right.iter() {
            if i == j {
                return None;
            }
            if i > j {
                inversions += 1;
            }
        }
        let _ = pos;
    }
    let mut merged: Vec<usize> = left.iter().chain(right.iter()).copied().collect();
    merged.sort_unstable();
    Some((merged, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// A p-form in the dlog basis with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogPForm {
    chart: Arc<OrbifoldChart>,
    degree: usize,
    components: std::collections::BTreeMap<Vec<usize>, SparsePoly>,
}

impl LogPForm {
    pub fn zero(chart: Arc<OrbifoldChart>, degree: usize) -> Self {
        LogPForm {
            chart,
            degree,
            components: Default::default(),
        }
    }

    /// The monomial form `c * y^e * e_I`.
    pub fn monomial(
        chart: Arc<OrbifoldChart>,
        index_set: Vec<usize>,
        exponent: ExponentVector,
        coeff: CyclotomicNumber,
    ) -> Self {
        let degree = index_set.len();
        let mut form = Self::zero(chart, degree);
        form.add_component(index_set, SparsePoly::monomial(exponent, coeff));
        form
    }

    /// A degree-zero form from a bare polynomial.
    pub fn from_function(chart: Arc<OrbifoldChart>, poly: SparsePoly) -> Self {
        let mut form = Self::zero(chart, 0);
        form.add_component(Vec::new(), poly);
        form
    }

    pub fn chart(&self) -> &Arc<OrbifoldChart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &SparsePoly)> {
        self.components.iter()
    }

    pub fn component(&self, index_set: &[usize]) -> Option<&SparsePoly> {
        self.components.get(index_set)
    }

    /// Accumulate a coefficient onto the component of `index_set`.
    pub fn add_component(&mut self, index_set: Vec<usize>, coeff: SparsePoly) {
        assert_eq!(index_set.len(), self.degree, "index set size must match degree");
        assert!(
            index_set.windows(2).all(|w| w[0] < w[1]),
            "index sets must be strictly increasing"
        );
        assert!(
            index_set.iter().all(|&i| i < self.chart.dim()),
            "index out of range for chart"
        );
        assert_eq!(coeff.nvars(), self.chart.dim(), "coefficient dimension mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.components.remove(&index_set) {
            None => {
                self.components.insert(index_set, coeff);
            }
            Some(old) => {
                let sum = old.add(&coeff);
                if !sum.is_zero() {
                    self.components.insert(index_set, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.chart, other.chart, "chart mismatch in form addition");
        assert_eq!(self.degree, other.degree, "degree mismatch in form addition");
        let mut out = self.clone();
        for (i, c) in other.components.iter() {
            out.add_component(i.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.components.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CyclotomicNumber) -> Self {
        let mut out = Self::zero(self.chart.clone(), self.degree);
        for (i, coeff) in self.components.iter() {
            out.add_component(i.clone(), coeff.scale(c));
        }
        out
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.chart.clone(), self.degree);
        for (i, coeff) in self.components.iter() {
            out.add_component(i.clone(), coeff.scale_rational(q));
        }
        out
    }

    /// For a single-term form, its `(index set, exponent, coefficient)` triple.
    pub fn as_monomial(&self) -> Option<(&Vec<usize>, &ExponentVector, &CyclotomicNumber)> {
        if self.components.len() != 1 {
            return None;
        }
        let (i, poly) = self.components.iter().next().unwrap();
        if poly.num_terms() != 1 {
            return None;
        }
        let (e, c) = poly.terms().next().unwrap();
        Some((i, e, c))
    }

    /// Largest coefficient degree over all components.
    pub fn coefficient_degree(&self) -> u64 {
        self.components
            .values()
            .map(SparsePoly::total_degree)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for LogPForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(i, c)| {
                let basis: Vec<String> = i
                    .iter()
                    .map(|&k| format!("dlog({})", self.chart.coords[k]))
                    .collect();
                if basis.is_empty() {
                    format!("{}", c)
                } else {
                    format!("({}) {}", c, basis.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Graded-commutative wedge product of two forms on a common chart.
pub fn wedge(alpha: &LogPForm, beta: &LogPForm) -> LogPForm {
    assert_eq!(alpha.chart, beta.chart, "chart mismatch in wedge");
    let mut out = LogPForm::zero(alpha.chart.clone(), alpha.degree + beta.degree);
    for (i, a) in alpha.components.iter() {
        for (j, b) in beta.components.iter() {
            if let Some((merged, sign)) = shuffle_sign(i, j) {
                let mut coeff = a.mul(b);
                if sign < 0 {
                    coeff = coeff.neg();
                }
                out.add_component(merged, coeff);
            }
        }
    }
    out
}

/// Pull a form back along a diagonal map into its source chart.
///
/// The dlog basis is stable under diagonal monomial maps: `e_I` pulls back to
/// `(prod_{i in I} c_i) e_I`, and scalars act only through the coefficient
/// substitution since dlog kills units.
pub fn pullback_form(f: &DiagonalMap, omega: &LogPForm) -> LogPForm {
    assert_eq!(
        omega.chart, f.target,
        "pullback: form does not live on the target chart of `{}`",
        f.name
    );
    let mut out = LogPForm::zero(f.source.clone(), omega.degree);
    for (i, c) in omega.components.iter() {
        let substituted = c.substitute_monomial(&f.scalars, &f.exps);
        let factor: BigInt = i.iter().map(|&k| BigInt::from(f.exps[k])).product();
        out.add_component(i.clone(), substituted.scale_rational(&Rational::from_integer(factor)));
    }
    out
}

/// The free module of adapted p-forms attached to an adapted cover.
///
/// The depth vector records, per coordinate, how divisible the coefficient of
/// a dlog basis vector must be: `a_i / m_i` for finite multiplicity, `0` for a
/// log pole, `a_i` where there is no boundary.
#[derive(Clone, Debug)]
pub struct AdaptedModule {
    gamma: DiagonalMap,
    degree: usize,
    depths: Vec<u64>,
}

impl AdaptedModule {
    pub fn new(gamma: DiagonalMap, degree: usize) -> Result<Self> {
        require_adapted(&gamma)?;
        assert!(
            degree <= gamma.dim(),
            "form degree exceeds chart dimension"
        );
        let depths = gamma
            .target
            .mults
            .iter()
            .zip(&gamma.exps)
            .map(|(m, &a)| match m {
                Multiplicity::Finite(mm) => a / mm,
                Multiplicity::Infinite => 0,
                Multiplicity::Trivial => a,
            })
            .collect();
        Ok(AdaptedModule {
            gamma,
            degree,
            depths,
        })
    }

    pub fn chart(&self) -> &Arc<OrbifoldChart> {
        &self.gamma.source
    }

    pub fn map(&self) -> &DiagonalMap {
        &self.gamma
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn depths(&self) -> &[u64] {
        &self.depths
    }

    /// Minimal coefficient exponents for the component of `index_set`.
    pub fn required_exponent(&self, index_set: &[usize]) -> ExponentVector {
        let mut e = vec![0u64; self.gamma.dim()];
        for &i in index_set {
            e[i] = self.depths[i];
        }
        ExponentVector(e)
    }

    /// The monomial generators, one per index set, in lexicographic order.
    pub fn generators(&self) -> Vec<LogPForm> {
        let n = self.gamma.dim();
        k_subsets(n, self.degree)
            .into_iter()
            .map(|i| {
                let e = self.required_exponent(&i);
                LogPForm::monomial(self.chart().clone(), i, e, CyclotomicNumber::one(1))
            })
            .collect()
    }

    /// Membership: every component coefficient must be divisible by the
    /// required monomial of its index set.
    pub fn is_section(&self, omega: &LogPForm) -> bool {
        assert_eq!(omega.chart(), self.chart(), "section chart mismatch");
        assert_eq!(omega.degree(), self.degree, "section degree mismatch");
        omega
            .components()
            .all(|(i, c)| c.divisible_by_monomial(&self.required_exponent(i)))
    }

    /// All monic monomial sections of coefficient degree at most `bound`, in
    /// (index set, exponent) lexicographic order.
    pub fn monomial_sections(&self, bound: u64) -> Vec<LogPForm> {
        let n = self.gamma.dim();
        let mut out = Vec::new();
        for i in k_subsets(n, self.degree) {
            let req = self.required_exponent(&i);
            let base = req.total_degree();
            if base > bound {
                continue;
            }
            for v in compositions_up_to(n, bound - base) {
                let u = req.add(&v);
                out.push(LogPForm::monomial(
                    self.chart().clone(),
                    i.clone(),
                    u,
                    CyclotomicNumber::one(1),
                ));
            }
        }
        out
    }
}

/// Drop all terms whose exponent in variable `var` is at least `power`: the
/// image of a polynomial in the quotient by the ideal `(y_var^power)`.
fn reduce_mod_power(p: &SparsePoly, var: usize, power: u64) -> SparsePoly {
    let mut out = SparsePoly::zero(p.nvars());
    for (e, c) in p.terms() {
        if e.0[var] < power {
            out.add_term(e.clone(), c.clone());
        }
    }
    out
}

/// Test whether the monomial 1-form `y^u * dlog(y_slot)` lies in the kernel
/// that defines adapted 1-forms, evaluated directly from the defining maps:
/// membership in the pulled-back logarithmic module, then vanishing of the
/// residue image in the quotient along each finite-multiplicity divisor.
fn oracle_accepts_one_form(gamma: &DiagonalMap, slot: usize, u: &ExponentVector) -> bool {
    let a = gamma.exps[slot];
    let coeff = SparsePoly::monomial(u.clone(), CyclotomicNumber::one(1));
    match gamma.target.mults[slot] {
        Multiplicity::Trivial => {
            // ambient basis vector is the pullback of dx_slot, whose dlog
            // expansion is a unit times y_slot^a * dlog(y_slot)
            let need = {
                let mut e = vec![0u64; u.len()];
                e[slot] = a;
                ExponentVector(e)
            };
            coeff.divisible_by_monomial(&need)
        }
        Multiplicity::Infinite => {
            // log component: inside the ambient module, and no residue
            // condition because the index lies outside I_0
            true
        }
        Multiplicity::Finite(m) => {
            // residue along the divisor, then the quotient onto
            // O / (y_slot^(a/m)); the form is adapted iff the image vanishes
            let k = a / m;
            reduce_mod_power(&coeff, slot, k).is_zero()
        }
    }
}

/// Brute-force evaluation of the defining kernel on the truncated monomial
/// basis, wedged up to the module's degree. Returns monic monomial forms of
/// coefficient degree at most `degree_bound`, in (index set, exponent) order;
/// this set must coincide with the monomials accepted by `is_section`.
pub fn kernel_oracle(module: &AdaptedModule, degree_bound: u64) -> Vec<LogPForm> {
    let gamma = module.map();
    let n = gamma.dim();
    let p = module.degree();
    let chart = module.chart().clone();

    if p == 0 {
        return compositions_up_to(n, degree_bound)
            .into_iter()
            .map(|u| LogPForm::monomial(chart.clone(), Vec::new(), u, CyclotomicNumber::one(1)))
            .collect();
    }

    let slot_monomials: Vec<Vec<ExponentVector>> = (0..n)
        .map(|slot| {
            compositions_up_to(n, degree_bound)
                .into_iter()
                .filter(|u| oracle_accepts_one_form(gamma, slot, u))
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    for index_set in k_subsets(n, p) {
        let mut sums: BTreeSet<ExponentVector> = BTreeSet::new();
        // wedge one kernel monomial from each slot of the index set
        fn rec(
            slots: &[Vec<ExponentVector>],
            pos: usize,
            acc: ExponentVector,
            bound: u64,
            sums: &mut BTreeSet<ExponentVector>,
        ) {
            if pos == slots.len() {
                sums.insert(acc);
                return;
            }
            for u in &slots[pos] {
                let next = acc.add(u);
                if next.total_degree() <= bound {
                    rec(slots, pos + 1, next, bound, sums);
                }
            }
        }
        let chosen: Vec<Vec<ExponentVector>> = index_set
            .iter()
            .map(|&i| slot_monomials[i].clone())
            .collect();
        rec(
            &chosen,
            0,
            ExponentVector::zero(n),
            degree_bound,
            &mut sums,
        );
        for u in sums {
            out.push(LogPForm::monomial(
                chart.clone(),
                index_set.clone(),
                u,
                CyclotomicNumber::one(1),
            ));
        }
    }
    out
}

/// Unit multiple test: `candidate = c * reference` for some nonzero scalar.
pub fn is_unit_multiple(candidate: &LogPForm, reference: &LogPForm) -> bool {
    if candidate.is_zero() || reference.is_zero() {
        return candidate.is_zero() && reference.is_zero();
    }
    let (ci, ce, cc) = match candidate.as_monomial() {
        Some(t) => t,
        None => return generic_unit_multiple(candidate, reference),
    };
    let (ri, re, rc) = match reference.as_monomial() {
        Some(t) => t,
        None => return generic_unit_multiple(candidate, reference),
    };
    ci == ri && ce == re && !cc.is_zero() && !rc.is_zero()
}

fn generic_unit_multiple(candidate: &LogPForm, reference: &LogPForm) -> bool {
    // find the ratio on the first shared term, then verify globally
    let (i, rpoly) = match reference.components().next() {
        Some(t) => t,
        None => return false,
    };
    let cpoly = match candidate.component(i) {
        Some(p) => p,
        None => return false,
    };
    let (e, rc) = rpoly.terms().next().unwrap();
    let cc = cpoly
        .terms()
        .find(|(ce, _)| *ce == e)
        .map(|(_, c)| c.clone());
    let ratio = match cc {
        Some(c) => c.mul(&rc.inverse()),
        None => return false,
    };
    if ratio.is_zero() {
        return false;
    }
    candidate == &reference.scale(&ratio)
}
