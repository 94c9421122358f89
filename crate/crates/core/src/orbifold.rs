//! Orbifold charts and diagonal monomial morphisms.
//!
//! A chart is an affine space with per-coordinate multiplicities encoding the
//! boundary divisor with coefficients `(m-1)/m`; morphisms are diagonal
//! monomial maps `x_i -> s_i * y_i^(a_i)` with root-of-unity scalars. This is
//! the snc local normal form: every module in sight stays free with monomial
//! generators, so membership tests are divisibility conditions.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{rat_int, root_of_unity, CyclotomicNumber, Rational};
use crate::galois::DiagonalAction;

/// Per-coordinate boundary multiplicity: none, finite `m >= 2`, or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    /// No boundary component along this coordinate (`m = 1`).
    Trivial,
    /// Finite multiplicity `m >= 2`.
    Finite(u64),
    /// Reduced log component; imposes no adaptedness divisibility.
    Infinite,
}

impl Multiplicity {
    /// The boundary coefficient `(m-1)/m`, with the convention `1` for infinity.
    pub fn boundary_coefficient(&self) -> Rational {
        match self {
            Multiplicity::Trivial => Rational::zero(),
            Multiplicity::Finite(m) => {
                assert!(*m >= 2, "finite multiplicity must be at least 2");
                Rational::new((*m as i64 - 1).into(), (*m as i64).into())
            }
            Multiplicity::Infinite => Rational::one(),
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Trivial => write!(f, "1"),
            Multiplicity::Finite(m) => write!(f, "{}", m),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

/// An affine chart with named coordinates and a boundary multiplicity on each
/// coordinate hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldChart {
    pub name: String,
    pub coords: Vec<String>,
    pub mults: Vec<Multiplicity>,
}

impl OrbifoldChart {
    pub fn new(
        name: impl Into<String>,
        coords: Vec<String>,
        mults: Vec<Multiplicity>,
    ) -> Arc<Self> {
        assert!(!coords.is_empty(), "chart must have at least one coordinate");
        assert_eq!(coords.len(), mults.len(), "one multiplicity per coordinate");
        for (i, c) in coords.iter().enumerate() {
            assert!(
                !coords[..i].contains(c),
                "duplicate coordinate name `{}`",
                c
            );
        }
        for m in &mults {
            if let Multiplicity::Finite(k) = m {
                assert!(*k >= 2, "finite multiplicity must be at least 2");
            }
        }
        Arc::new(OrbifoldChart {
            name: name.into(),
            coords,
            mults,
        })
    }

    /// A chart with trivial boundary on every coordinate.
    pub fn plain(name: impl Into<String>, coords: Vec<String>) -> Arc<Self> {
        let mults = vec![Multiplicity::Trivial; coords.len()];
        Self::new(name, coords, mults)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// A diagonal monomial morphism between charts of equal dimension: the `i`-th
/// target coordinate pulls back to `scalars[i] * y_i^(exps[i])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalMap {
    pub name: String,
    pub source: Arc<OrbifoldChart>,
    pub target: Arc<OrbifoldChart>,
    pub scalars: Vec<CyclotomicNumber>,
    pub exps: Vec<u64>,
}

impl DiagonalMap {
    pub fn new(
        name: impl Into<String>,
        source: Arc<OrbifoldChart>,
        target: Arc<OrbifoldChart>,
        scalars: Vec<CyclotomicNumber>,
        exps: Vec<u64>,
    ) -> Self {
        assert_eq!(source.dim(), target.dim(), "chart dimension mismatch");
        assert_eq!(scalars.len(), source.dim(), "one scalar per coordinate");
        assert_eq!(exps.len(), source.dim(), "one exponent per coordinate");
        assert!(exps.iter().all(|&a| a >= 1), "exponents must be positive");
        assert!(
            scalars.iter().all(|s| s.is_root_of_unity()),
            "scalars must be roots of unity"
        );
        DiagonalMap {
            name: name.into(),
            source,
            target,
            scalars,
            exps,
        }
    }

    /// The identity map of a chart.
    pub fn identity(chart: &Arc<OrbifoldChart>) -> Self {
        let n = chart.dim();
        DiagonalMap::new(
            format!("id_{}", chart.name),
            chart.clone(),
            chart.clone(),
            vec![CyclotomicNumber::one(1); n],
            vec![1; n],
        )
    }

    /// Scalar-free map given by exponents alone.
    pub fn monomial(
        name: impl Into<String>,
        source: Arc<OrbifoldChart>,
        target: Arc<OrbifoldChart>,
        exps: Vec<u64>,
    ) -> Self {
        let n = source.dim();
        DiagonalMap::new(name, source, target, vec![CyclotomicNumber::one(1); n], exps)
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn is_scalar_free(&self) -> bool {
        self.scalars.iter().all(|s| s.is_one())
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.is_scalar_free() && self.exps.iter().all(|&a| a == 1)
    }

    /// Structural equality as a morphism: same charts and the same coordinate
    /// action, regardless of the name given at construction.
    pub fn same_morphism(&self, other: &DiagonalMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.exps == other.exps
            && self.scalars == other.scalars
    }

    /// Textual description used in diagnostics.
    pub fn describe(&self) -> String {
        format!("{}: {} -> {}", self.name, self.source.name, self.target.name)
    }
}

/// Composite `g o f` of `f: Z -> Y` and `g: Y -> X`. The pullback of the
/// `i`-th coordinate of `X` is `gs_i * (fs_i)^(ge_i) * z_i^(fe_i * ge_i)`.
pub fn compose(f: &DiagonalMap, g: &DiagonalMap) -> DiagonalMap {
    assert_eq!(
        f.target, g.source,
        "compose: target of `{}` differs from source of `{}`",
        f.name, g.name
    );
    let n = f.dim();
    let mut scalars = Vec::with_capacity(n);
    let mut exps = Vec::with_capacity(n);
    for i in 0..n {
        scalars.push(g.scalars[i].mul(&f.scalars[i].pow(g.exps[i])));
        exps.push(
            f.exps[i]
                .checked_mul(g.exps[i])
                .expect("exponent overflow in composition"),
        );
    }
    DiagonalMap::new(
        format!("{}.{}", g.name, f.name),
        f.source.clone(),
        g.target.clone(),
        scalars,
        exps,
    )
}

/// Coefficients of the pulled-back boundary divisor: entry `i` is
/// `a_i * (m_i - 1)/m_i` for the hyperplane `{y_i = 0}` in the source.
pub fn pullback_divisor(g: &DiagonalMap) -> Vec<Rational> {
    g.target
        .mults
        .iter()
        .zip(&g.exps)
        .map(|(m, a)| m.boundary_coefficient() * rat_int(*a as i64))
        .collect()
}

/// Adaptedness: the pulled-back boundary divisor has integer coefficients,
/// equivalently `m_i` divides `a_i` for every finite multiplicity.
pub fn is_adapted(g: &DiagonalMap) -> bool {
    pullback_divisor(g).iter().all(|c| c.denom().is_one())
}

/// Check adaptedness, reporting the first fractional coefficient.
pub fn require_adapted(g: &DiagonalMap) -> Result<()> {
    for (i, c) in pullback_divisor(g).iter().enumerate() {
        if !c.denom().is_one() {
            return Err(Error::NotAdapted {
                map: g.describe(),
                index: i,
                coefficient: crate::exactnum::fmt_rational(c),
            });
        }
    }
    Ok(())
}

/// The deck group of a scalar-free diagonal cover: the product of the cyclic
/// groups of order `a_i`, with generator `i` scaling `y_i` by a primitive
/// `a_i`-th root of unity. The cover is the quotient map by this action.
pub fn galois_data(g: &DiagonalMap) -> Result<DiagonalAction> {
    if !g.is_scalar_free() {
        return Err(Error::NontrivialScalars { map: g.describe() });
    }
    let n = g.dim();
    let mut generators = Vec::new();
    for (i, &a) in g.exps.iter().enumerate() {
        if a >= 2 {
            let mut q = vec![Rational::zero(); n];
            q[i] = Rational::new(1.into(), (a as i64).into());
            generators.push(q);
        }
    }
    Ok(DiagonalAction::new(g.source.clone(), generators))
}

/// One normalized irreducible component of a fiber product, with its two
/// projections and the twist indices that select it.
#[derive(Clone, Debug)]
pub struct FiberComponent {
    pub chart: Arc<OrbifoldChart>,
    /// Projection to the source of the first map.
    pub to_left: DiagonalMap,
    /// Projection to the source of the second map.
    pub to_right: DiagonalMap,
    /// Per-coordinate component index `j_i` in `0..gcd(a_i, b_i)`.
    pub twist: Vec<u64>,
}

/// Decompose the normalization of the fiber product of two scalar-free maps
/// `f: Y -> X` and `g: Z -> X` into irreducible components.
///
/// Per coordinate with exponents `a`, `b` and `d = gcd(a, b)`, the components
/// are indexed by `j` in `0..d`; component `j` is parametrized by
/// `y = zeta_a^j * w^(b/d)`, `z = w^(a/d)`. The twist exponent `j` is the
/// smallest non-negative representative of its class modulo `d` (deck
/// transformations of the parametrization shift it by multiples of `d`).
/// The total component set is the product over coordinates.
pub fn normalize_fiber_product(f: &DiagonalMap, g: &DiagonalMap) -> Result<Vec<FiberComponent>> {
    assert_eq!(f.target, g.target, "fiber product needs a common target");
    for m in [f, g] {
        if !m.is_scalar_free() {
            return Err(Error::NontrivialScalars { map: m.describe() });
        }
    }
    let n = f.dim();
    let d: Vec<u64> = (0..n).map(|i| f.exps[i].gcd(&g.exps[i])).collect();
    let left_exps: Vec<u64> = (0..n).map(|i| g.exps[i] / d[i]).collect();
    let right_exps: Vec<u64> = (0..n).map(|i| f.exps[i] / d[i]).collect();

    let mut components = Vec::new();
    let mut twist = vec![0u64; n];
    loop {
        let coords: Vec<String> = (1..=n).map(|i| format!("w{}", i)).collect();
        let twist_label: Vec<String> = twist.iter().map(|j| j.to_string()).collect();
        let chart = OrbifoldChart::plain(
            format!("fp({},{})[{}]", f.source.name, g.source.name, twist_label.join(",")),
            coords,
        );
        let left_scalars: Vec<CyclotomicNumber> = (0..n)
            .map(|i| root_of_unity(twist[i] as i64, f.exps[i]))
            .collect();
        let to_left = DiagonalMap::new(
            format!("p[{}]", twist_label.join(",")),
            chart.clone(),
            f.source.clone(),
            left_scalars,
            left_exps.clone(),
        );
        let to_right = DiagonalMap::monomial(
            format!("q[{}]", twist_label.join(",")),
            chart.clone(),
            g.source.clone(),
            right_exps.clone(),
        );
        debug_assert!(compose(&to_left, f).same_morphism(&compose(&to_right, g)));
        components.push(FiberComponent {
            chart,
            to_left,
            to_right,
            twist: twist.clone(),
        });

        // odometer over the twist indices, first coordinate slowest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(components);
            }
            pos -= 1;
            twist[pos] += 1;
            if twist[pos] < d[pos] {
                break;
            }
            twist[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::SparsePoly;
    use proptest::prelude::*;

    fn chart1(name: &str, var: &str, m: Multiplicity) -> Arc<OrbifoldChart> {
        OrbifoldChart::new(name, vec![var.to_string()], vec![m])
    }

    #[test]
    fn compose_identity_is_neutral() {
        let x = chart1("X", "x", Multiplicity::Finite(3));
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let g = DiagonalMap::monomial("g", y.clone(), x.clone(), vec![3]);
        let left = compose(&DiagonalMap::identity(&y), &g);
        assert!(left.same_morphism(&g));
        let right = compose(&g, &DiagonalMap::identity(&x));
        assert!(right.same_morphism(&g));
    }

    #[test]
    fn compose_multiplies_exponents() {
        let x = chart1("X", "x", Multiplicity::Trivial);
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let z = chart1("Z", "z", Multiplicity::Trivial);
        let f = DiagonalMap::monomial("f", z.clone(), y.clone(), vec![2]);
        let g = DiagonalMap::monomial("g", y.clone(), x.clone(), vec![3]);
        let gf = compose(&f, &g);
        assert_eq!(gf.exps, vec![6]);
        assert!(gf.scalars[0].is_one());
    }

    #[test]
    fn compose_scalar_law_matches_successive_substitution() {
        // (y -> zeta_3 w) then (x -> y^3): the composite must act on
        // polynomials exactly as the two substitutions in sequence.
        let x = chart1("X", "x", Multiplicity::Trivial);
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let w = chart1("W", "w", Multiplicity::Trivial);
        let z3 = root_of_unity(1, 3);
        let f = DiagonalMap::new("f", w.clone(), y.clone(), vec![z3.clone()], vec![1]);
        let g = DiagonalMap::monomial("g", y.clone(), x.clone(), vec![3]);
        let gf = compose(&f, &g);

        let p = SparsePoly::variable(1, 0, 3); // coordinate x
        let via_g = p.substitute_monomial(&g.scalars, &g.exps);
        let two_steps = via_g.substitute_monomial(&f.scalars, &f.exps);
        let one_step = p.substitute_monomial(&gf.scalars, &gf.exps);
        assert_eq!(two_steps, one_step);
        // zeta_3^3 = 1, so the composite is scalar-free with exponent 3
        assert!(gf.scalars[0].is_one());
        assert_eq!(gf.exps, vec![3]);
    }

    #[test]
    fn pullback_divisor_examples() {
        // Delta = (2/3){x=0}, a = 3: coefficient 2
        let x = chart1("X", "x", Multiplicity::Finite(3));
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let g = DiagonalMap::monomial("g", y.clone(), x.clone(), vec![3]);
        assert_eq!(pullback_divisor(&g), vec![rat_int(2)]);

        // Delta = 0: all zeros
        let x0 = chart1("X0", "x", Multiplicity::Trivial);
        let g0 = DiagonalMap::monomial("g0", y.clone(), x0, vec![7]);
        assert_eq!(pullback_divisor(&g0), vec![rat_int(0)]);

        // m = infinity, a = 5: coefficient 5
        let xi = chart1("Xi", "x", Multiplicity::Infinite);
        let gi = DiagonalMap::monomial("gi", y, xi, vec![5]);
        assert_eq!(pullback_divisor(&gi), vec![rat_int(5)]);
    }

    #[test]
    fn adaptedness_examples() {
        let x = chart1("X", "x", Multiplicity::Finite(3));
        for m in 1u64..=30 {
            let y = chart1("Y", "y", Multiplicity::Trivial);
            let g = DiagonalMap::monomial("g", y, x.clone(), vec![m]);
            assert_eq!(is_adapted(&g), m % 3 == 0);
        }
        // identity on a chart with fractional boundary is not adapted
        assert!(!is_adapted(&DiagonalMap::identity(&x)));
        // Delta = 0: any exponents are adapted
        let x0 = chart1("X0", "x", Multiplicity::Trivial);
        let y = chart1("Y", "y", Multiplicity::Trivial);
        assert!(is_adapted(&DiagonalMap::monomial("g", y, x0, vec![11])));
    }

    #[test]
    fn galois_data_examples() {
        let x = chart1("X", "x", Multiplicity::Trivial);
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let g3 = DiagonalMap::monomial("g", y.clone(), x.clone(), vec![3]);
        let action = galois_data(&g3).unwrap();
        assert_eq!(action.generators().len(), 1);
        assert_eq!(action.generator_orders(), vec![3]);

        // a = (1,1): trivial group
        let x2 = OrbifoldChart::plain("X2", vec!["x1".into(), "x2".into()]);
        let y2 = OrbifoldChart::plain("Y2", vec!["y1".into(), "y2".into()]);
        let gid = DiagonalMap::monomial("h", y2.clone(), x2.clone(), vec![1, 1]);
        assert!(galois_data(&gid).unwrap().generators().is_empty());

        // a = (2,3): Z/2 x Z/3
        let g23 = DiagonalMap::monomial("k", y2, x2, vec![2, 3]);
        assert_eq!(galois_data(&g23).unwrap().generator_orders(), vec![2, 3]);

        // scalar-bearing maps are rejected
        let with_scalar = DiagonalMap::new(
            "s",
            y.clone(),
            x.clone(),
            vec![root_of_unity(1, 3)],
            vec![3],
        );
        assert!(matches!(
            galois_data(&with_scalar),
            Err(Error::NontrivialScalars { .. })
        ));
    }

    #[test]
    fn fiber_product_equal_exponents() {
        // y^3 - z^3 factors into three linear components y = zeta_3^j z
        let x = chart1("X", "x", Multiplicity::Trivial);
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let z = chart1("Z", "z", Multiplicity::Trivial);
        let f = DiagonalMap::monomial("f", y, x.clone(), vec![3]);
        let g = DiagonalMap::monomial("g", z, x, vec![3]);
        let comps = normalize_fiber_product(&f, &g).unwrap();
        assert_eq!(comps.len(), 3);
        for (j, c) in comps.iter().enumerate() {
            assert_eq!(c.twist, vec![j as u64]);
            assert_eq!(c.to_left.exps, vec![1]);
            assert_eq!(c.to_right.exps, vec![1]);
            assert_eq!(c.to_left.scalars[0], root_of_unity(j as i64, 3));
            assert!(compose(&c.to_left, &f).same_morphism(&compose(&c.to_right, &g)));
        }
    }

    #[test]
    fn fiber_product_with_degree_one_leg() {
        let x = chart1("X", "x", Multiplicity::Trivial);
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let z = chart1("Z", "z", Multiplicity::Trivial);
        let f = DiagonalMap::monomial("f", y, x.clone(), vec![1]);
        let g = DiagonalMap::monomial("g", z, x, vec![5]);
        let comps = normalize_fiber_product(&f, &g).unwrap();
        assert_eq!(comps.len(), 1);
        // the right projection is an isomorphism on coordinates
        assert_eq!(comps[0].to_right.exps, vec![1]);
        assert!(comps[0].to_right.scalars[0].is_one());
        assert_eq!(comps[0].to_left.exps, vec![5]);
    }

    #[test]
    fn fiber_product_four_six() {
        // y^4 - z^6 = (y^2 - z^3)(y^2 + z^3): two cuspidal components,
        // normalized by w -> (w^3, w^2) with a quarter twist on the second.
        let x = chart1("X", "x", Multiplicity::Trivial);
        let y = chart1("Y", "y", Multiplicity::Trivial);
        let z = chart1("Z", "z", Multiplicity::Trivial);
        let f = DiagonalMap::monomial("f", y, x.clone(), vec![4]);
        let g = DiagonalMap::monomial("g", z, x, vec![6]);
        let comps = normalize_fiber_product(&f, &g).unwrap();
        assert_eq!(comps.len(), 2);
        for (j, c) in comps.iter().enumerate() {
            assert_eq!(c.to_left.exps, vec![3]);
            assert_eq!(c.to_right.exps, vec![2]);
            assert_eq!(c.to_left.scalars[0], root_of_unity(j as i64, 4));
            assert!(compose(&c.to_left, &f).same_morphism(&compose(&c.to_right, &g)));
        }
        // the two components lie on distinct factors: the twists differ mod 2
        assert_ne!(comps[0].twist, comps[1].twist);
    }

    fn arb_mult() -> impl Strategy<Value = Multiplicity> {
        prop_oneof![
            Just(Multiplicity::Trivial),
            (2u64..=4).prop_map(Multiplicity::Finite),
            Just(Multiplicity::Infinite),
        ]
    }

    fn arb_tower() -> impl Strategy<Value = (DiagonalMap, DiagonalMap, DiagonalMap)> {
        (1usize..=3).prop_flat_map(|n| {
            (
                proptest::collection::vec(arb_mult(), n),
                proptest::collection::vec(1u64..=6, n),
                proptest::collection::vec(1u64..=6, n),
                proptest::collection::vec(1u64..=6, n),
            )
                .prop_map(move |(mults, ea, eb, ec)| {
                    let mk = |nm: &str| (1..=n).map(|i| format!("{}{}", nm, i)).collect();
                    let x = OrbifoldChart::new("X", mk("x"), mults);
                    let y = OrbifoldChart::plain("Y", mk("y"));
                    let z = OrbifoldChart::plain("Z", mk("z"));
                    let w = OrbifoldChart::plain("W", mk("w"));
                    let g = DiagonalMap::monomial("g", y.clone(), x, ea);
                    let f = DiagonalMap::monomial("f", z.clone(), y, eb);
                    let h = DiagonalMap::monomial("h", w, z, ec);
                    (h, f, g)
                })
        })
    }

    proptest! {
        #[test]
        fn compose_is_associative_and_unital((h, f, g) in arb_tower()) {
            let left = compose(&h, &compose(&f, &g));
            let right = compose(&compose(&h, &f), &g);
            prop_assert!(left.same_morphism(&right));
            let id_src = DiagonalMap::identity(&h.source);
            prop_assert!(compose(&id_src, &h).same_morphism(&h));
            let id_tgt = DiagonalMap::identity(&h.target);
            prop_assert!(compose(&h, &id_tgt).same_morphism(&h));
        }

        #[test]
        fn adapted_composition_is_stable((h, f, g) in arb_tower()) {
            // precompose an adapted map with anything: still adapted
            let g_adj = {
                // force adaptedness by scaling exponents up to multiples of m
                let exps = g.exps.iter().zip(&g.target.mults).map(|(a, m)| match m {
                    Multiplicity::Finite(k) => a * k,
                    _ => *a,
                }).collect();
                DiagonalMap::monomial("ga", g.source.clone(), g.target.clone(), exps)
            };
            prop_assert!(is_adapted(&g_adj));
            prop_assert!(is_adapted(&compose(&f, &g_adj)));
            prop_assert!(is_adapted(&compose(&compose(&h, &f), &g_adj)));
        }

        #[test]
        fn fiber_product_component_count((_h, f, g) in arb_tower()) {
            // reuse f, g over the same target by rebasing g's target to f's
            let g2 = DiagonalMap::monomial("g2", g.source.clone(), f.target.clone(), g.exps.clone());
            let comps = normalize_fiber_product(&f, &g2).unwrap();
            let expected: u64 = f.exps.iter().zip(&g2.exps).map(|(a, b)| a.gcd(b)).product();
            prop_assert_eq!(comps.len() as u64, expected);
            for c in &comps {
                prop_assert!(compose(&c.to_left, &f).same_morphism(&compose(&c.to_right, &g2)));
            }
        }
    }
}
