//! Diagonal finite-group actions on charts and Galois descent of forms.
//!
//! A generator scales each coordinate by a root of unity recorded as a
//! rational rotation number in `[0, 1)`. Since the dlog basis is invariant
//! under diagonal scaling, a monomial term transforms by the character
//! `<q, e> mod 1` alone; invariance is decided per term by an exact weight
//! congruence, never by averaging.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::adapted::{pullback_form, AdaptedModule, LogPForm};
use crate::error::{Error, Result};
use crate::exactnum::{rat_mod_one, root_of_unity, CyclotomicNumber, Rational};
use crate::orbifold::{galois_data, DiagonalMap, OrbifoldChart};
use crate::poly::{ExponentVector, SparsePoly};

/// A finite abelian group acting diagonally on a chart, presented by rotation
/// vectors: generator `t` scales coordinate `i` by `exp(2 pi i * q[t][i])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalAction {
    chart: Arc<OrbifoldChart>,
    generators: Vec<Vec<Rational>>,
}

/// Exponent vector over an action's generator list, reduced modulo the
/// generator orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement(pub Vec<u64>);

impl DiagonalAction {
    pub fn new(chart: Arc<OrbifoldChart>, generators: Vec<Vec<Rational>>) -> Self {
        let n = chart.dim();
        let generators: Vec<Vec<Rational>> = generators
            .into_iter()
            .map(|q| {
                assert_eq!(q.len(), n, "rotation vector length must match chart");
                q.iter().map(rat_mod_one).collect()
            })
            .collect();
        DiagonalAction { chart, generators }
    }

    pub fn chart(&self) -> &Arc<OrbifoldChart> {
        &self.chart
    }

    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    /// Order of each generator: the lcm of its rotation denominators.
    pub fn generator_orders(&self) -> Vec<u64> {
        self.generators
            .iter()
            .map(|q| {
                q.iter().fold(1u64, |acc, r| {
                    let d = r.denom().to_u64().expect("rotation denominator too large");
                    crate::exactnum::lcm_u64(acc, d)
                })
            })
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.generator_orders().iter().product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.generators.len()])
    }

    /// Reduce a raw exponent vector modulo the generator orders.
    pub fn element(&self, raw: &[u64]) -> GroupElement {
        let orders = self.generator_orders();
        assert_eq!(raw.len(), orders.len(), "group element length mismatch");
        GroupElement(raw.iter().zip(&orders).map(|(e, o)| e % o).collect())
    }

    /// Group law: add exponents modulo the generator orders.
    pub fn combine(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let raw: Vec<u64> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        self.element(&raw)
    }

    /// All group elements, identity first, in odometer order.
    pub fn elements(&self) -> Vec<GroupElement> {
        let orders = self.generator_orders();
        let mut out = Vec::new();
        let mut current = vec![0u64; orders.len()];
        loop {
            out.push(GroupElement(current.clone()));
            let mut pos = orders.len();
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                current[pos] += 1;
                if current[pos] < orders[pos] {
                    break;
                }
                current[pos] = 0;
            }
        }
    }

    /// The combined rotation vector of a group element, entries in `[0, 1)`.
    pub fn rotation(&self, g: &GroupElement) -> Vec<Rational> {
        let n = self.chart.dim();
        let mut q = vec![Rational::zero(); n];
        for (e, gen) in g.0.iter().zip(&self.generators) {
            let factor = Rational::from_integer(BigInt::from(*e));
            for (slot, r) in q.iter_mut().zip(gen) {
                *slot += r * &factor;
            }
        }
        q.iter().map(rat_mod_one).collect()
    }

    /// The automorphism of the chart realizing a group element: the diagonal
    /// map scaling each coordinate by the corresponding root of unity.
    pub fn automorphism(&self, g: &GroupElement) -> DiagonalMap {
        let rotation = self.rotation(g);
        let scalars: Vec<CyclotomicNumber> = rotation.iter().map(rotation_scalar).collect();
        let n = self.chart.dim();
        DiagonalMap::new(
            format!("phi[{:?}]", g.0),
            self.chart.clone(),
            self.chart.clone(),
            scalars,
            vec![1; n],
        )
    }
}

/// The root of unity `exp(2 pi i q)` for a rotation number `q` in `[0, 1)`.
fn rotation_scalar(q: &Rational) -> CyclotomicNumber {
    let num = q.numer().to_i64().expect("rotation numerator too large");
    let den = q.denom().to_u64().expect("rotation denominator too large");
    root_of_unity(num, den)
}

/// The eigencharacter `<q, e> mod 1` of a monomial exponent under a rotation
/// vector; a term is invariant iff its weight vanishes.
pub fn weight(rotation: &[Rational], exponent: &ExponentVector) -> Rational {
    assert_eq!(rotation.len(), exponent.len(), "weight dimension mismatch");
    let mut acc = Rational::zero();
    for (q, e) in rotation.iter().zip(&exponent.0) {
        acc += q * Rational::from_integer(BigInt::from(*e));
    }
    rat_mod_one(&acc)
}

/// Apply a group element to a form: every monomial term is scaled by the root
/// of unity attached to its weight. The dlog basis itself is fixed because
/// diagonal scalings die under dlog.
pub fn act(g: &GroupElement, action: &DiagonalAction, omega: &LogPForm) -> LogPForm {
    assert_eq!(omega.chart(), action.chart(), "action chart mismatch");
    let rotation = action.rotation(g);
    let mut out = LogPForm::zero(omega.chart().clone(), omega.degree());
    for (index_set, poly) in omega.components() {
        let mut scaled = SparsePoly::zero(poly.nvars());
        for (e, c) in poly.terms() {
            let w = weight(&rotation, e);
            scaled.add_term(e.clone(), c.mul(&rotation_scalar(&w)));
        }
        out.add_component(index_set.clone(), scaled);
    }
    out
}

/// All monic monomial sections of the module, up to the degree bound, whose
/// weight vanishes for every generator of the action.
pub fn invariant_monomials(
    action: &DiagonalAction,
    module: &AdaptedModule,
    degree_bound: u64,
) -> Vec<LogPForm> {
    assert_eq!(action.chart(), module.chart(), "action chart mismatch");
    module
        .monomial_sections(degree_bound)
        .into_iter()
        .filter(|form| {
            let (_, e, _) = form.as_monomial().expect("monomial sections are monomial");
            action.generators().iter().all(|q| weight(q, e).is_zero())
        })
        .collect()
}

fn describe_term(chart: &OrbifoldChart, index_set: &[usize], e: &ExponentVector) -> String {
    let mono: Vec<String> = e
        .0
        .iter()
        .enumerate()
        .map(|(i, k)| format!("{}^{}", chart.coords[i], k))
        .collect();
    let basis: Vec<String> = index_set
        .iter()
        .map(|&i| format!("dlog({})", chart.coords[i]))
        .collect();
    if basis.is_empty() {
        mono.join(" ")
    } else {
        format!("{} {}", mono.join(" "), basis.join("^"))
    }
}

/// Descend a form along a scalar-free cover: the unique form downstairs whose
/// pullback is the input. Works termwise; a monomial `w^e e_I` descends to
/// `(prod_{i in I} a_i)^{-1} y^(e/a) e_I`, the exponent division being
/// guaranteed by invariance under the deck group.
pub fn descend(omega: &LogPForm, f: &DiagonalMap) -> Result<LogPForm> {
    assert_eq!(
        omega.chart(),
        &f.source,
        "descend: form does not live on the source of `{}`",
        f.name
    );
    let action = galois_data(f)?;
    // map each generator back to the coordinate it rotates
    let generator_coords: Vec<usize> = action
        .generators()
        .iter()
        .map(|q| q.iter().position(|r| !r.is_zero()).unwrap())
        .collect();

    let n = f.dim();
    let mut out = LogPForm::zero(f.target.clone(), omega.degree());
    for (index_set, poly) in omega.components() {
        let inverse_factor = {
            let prod: BigInt = index_set.iter().map(|&i| BigInt::from(f.exps[i])).product();
            Rational::new(BigInt::one(), prod)
        };
        let mut descended = SparsePoly::zero(n);
        for (e, c) in poly.terms() {
            for (t, q) in action.generators().iter().enumerate() {
                let w = weight(q, e);
                if !w.is_zero() {
                    return Err(Error::NotInvariant {
                        term: describe_term(&f.source, index_set, e),
                        generator: generator_coords[t] + 1,
                        weight: w,
                    });
                }
            }
            let new_e = ExponentVector(
                e.0.iter()
                    .zip(&f.exps)
                    .map(|(u, a)| {
                        assert!(u % a == 0, "invariant exponent not divisible by cover degree");
                        u / a
                    })
                    .collect(),
            );
            descended.add_term(new_e, c.scale(&inverse_factor));
        }
        out.add_component(index_set.clone(), descended);
    }
    Ok(out)
}
