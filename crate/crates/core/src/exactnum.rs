//! Exact arithmetic: arbitrary-precision rationals and cyclotomic fields.
//!
//! A [`CyclotomicNumber`] is an element of the field obtained by adjoining a
//! primitive `N`-th root of unity to the rationals, stored in the power basis
//! `1, z, ..., z^(phi(N)-1)` modulo the `N`-th cyclotomic polynomial. Working
//! modulo the cyclotomic polynomial (rather than `t^N - 1`) keeps the
//! representation a field, so zero-testing and inversion are exact.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Rational from an integer numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Reduce a rational modulo 1 into the interval `[0, 1)`.
pub fn rat_mod_one(q: &Rational) -> Rational {
    let f = q.floor();
    q - f
}

/// Euler totient of `n`.
pub fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "euler_phi: n must be positive");
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Least common multiple of two positive integers.
pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers (dense, ascending coefficients).
// ---------------------------------------------------------------------------

fn int_poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Exact division of integer polynomials; the divisor must be monic and the
/// division must leave no remainder.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let ddeg = den.len() - 1;
    let qdeg = rem.len() - 1 - ddeg;
    let mut quo = vec![BigInt::zero(); qdeg + 1];
    for i in (0..=qdeg).rev() {
        let c = rem[i + ddeg].clone();
        if !c.is_zero() {
            quo[i] = c.clone();
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quo
}

static CYCLOTOMIC_CACHE: Lazy<Mutex<HashMap<u64, Vec<BigInt>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// The `N`-th cyclotomic polynomial, ascending integer coefficients, monic.
///
/// Computed by exact division of `t^N - 1` by the product of the cyclotomic
/// polynomials of the proper divisors of `N`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic_polynomial: N must be positive");
    if let Some(p) = CYCLOTOMIC_CACHE.lock().unwrap().get(&n) {
        return p.clone();
    }
    let result = if n == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        // t^N - 1
        let mut tn1 = vec![BigInt::zero(); (n + 1) as usize];
        tn1[0] = BigInt::from(-1);
        tn1[n as usize] = BigInt::from(1);
        let mut denom = vec![BigInt::one()];
        for d in 1..n {
            if n % d == 0 {
                denom = int_poly_mul(&denom, &cyclotomic_polynomial(d));
            }
        }
        int_poly_div_exact(&tn1, &denom)
    };
    CYCLOTOMIC_CACHE
        .lock()
        .unwrap()
        .insert(n, result.clone());
    result
}

// ---------------------------------------------------------------------------
// Rational polynomial helpers for reduction and inversion modulo Phi_N.
// ---------------------------------------------------------------------------

fn rat_poly_trim(p: &mut Vec<Rational>) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn rat_poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    rat_poly_trim(&mut out);
    out
}

fn rat_poly_sub_scaled(a: &mut Vec<Rational>, b: &[Rational], scale: &Rational, shift: usize) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, Rational::zero());
    }
    for (j, bj) in b.iter().enumerate() {
        a[j + shift] -= scale * bj;
    }
    rat_poly_trim(a);
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn rat_poly_rem(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let mut rem = a.to_vec();
    rat_poly_trim(&mut rem);
    let mdeg = m.len() - 1;
    while rem.len() > mdeg {
        let lead = rem.last().unwrap().clone();
        let shift = rem.len() - 1 - mdeg;
        rat_poly_sub_scaled(&mut rem, m, &lead, shift);
        // the leading term cancels exactly; trim handles it
        if rem.len() > mdeg + shift {
            rem.truncate(mdeg + shift);
            rat_poly_trim(&mut rem);
        }
    }
    rem
}

/// Extended Euclid: returns `(g, u)` with `u * a = g (mod m)` and `g` the gcd.
fn rat_poly_half_xgcd(a: &[Rational], m: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    rat_poly_trim(&mut r0);
    rat_poly_trim(&mut r1);
    let mut u0: Vec<Rational> = Vec::new();
    let mut u1 = vec![Rational::one()];
    while !r1.is_empty() {
        // division with remainder r0 = q * r1 + r
        let mut q: Vec<Rational> = Vec::new();
        let mut r = r0.clone();
        let lead1 = r1.last().unwrap().clone();
        while r.len() >= r1.len() && !r.is_empty() {
            let shift = r.len() - r1.len();
            let c = r.last().unwrap() / &lead1;
            if q.len() < shift + 1 {
                q.resize(shift + 1, Rational::zero());
            }
            q[shift] = c.clone();
            rat_poly_sub_scaled(&mut r, &r1, &c, shift);
        }
        let qu1 = rat_poly_mul(&q, &u1);
        let mut new_u = u0.clone();
        if new_u.len() < qu1.len() {
            new_u.resize(qu1.len(), Rational::zero());
        }
        for (i, c) in qu1.iter().enumerate() {
            new_u[i] -= c;
        }
        rat_poly_trim(&mut new_u);
        u0 = u1;
        u1 = new_u;
        r0 = r1;
        r1 = r;
    }
    (r0, u0)
}

// ---------------------------------------------------------------------------
// CyclotomicNumber
// ---------------------------------------------------------------------------

/// An element of the cyclotomic field of a fixed conductor, in the power basis
/// modulo the cyclotomic polynomial. Arithmetic between different conductors
/// lifts both operands to the least common multiple first.
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    conductor: u64,
    coords: Vec<Rational>,
}

impl CyclotomicNumber {
    fn phi_rat(n: u64) -> Vec<Rational> {
        cyclotomic_polynomial(n)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect()
    }

    fn from_poly(conductor: u64, poly: Vec<Rational>) -> Self {
        let modulus = Self::phi_rat(conductor);
        let mut coords = rat_poly_rem(&poly, &modulus);
        let dim = (modulus.len() - 1) as usize;
        coords.resize(dim, Rational::zero());
        CyclotomicNumber { conductor, coords }
    }

    /// The zero element at the given conductor.
    pub fn zero(conductor: u64) -> Self {
        let dim = euler_phi(conductor) as usize;
        CyclotomicNumber {
            conductor,
            coords: vec![Rational::zero(); dim],
        }
    }

    /// The unit element at the given conductor.
    pub fn one(conductor: u64) -> Self {
        Self::from_rational(Rational::one(), conductor)
    }

    /// A rational number regarded as a cyclotomic number.
    pub fn from_rational(q: Rational, conductor: u64) -> Self {
        let mut out = Self::zero(conductor);
        out.coords[0] = q;
        out
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Power-basis coordinates, length `phi(conductor)`.
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, if this element lies in the prime field.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// Express the same field element at conductor `m`; the current conductor
    /// must divide `m` (`zeta_N = zeta_M^(M/N)`). A non-divisible conductor is
    /// a caller bug.
    pub fn embed(&self, m: u64) -> Self {
        assert!(
            m % self.conductor == 0,
            "embed: conductor {} does not divide {}",
            self.conductor,
            m
        );
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut poly = vec![Rational::zero(); (self.coords.len() - 1) * step + 1];
        for (i, c) in self.coords.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Self::from_poly(m, poly)
    }

    /// Lift two elements to their common conductor.
    pub fn unify(a: &Self, b: &Self) -> (Self, Self) {
        if a.conductor == b.conductor {
            (a.clone(), b.clone())
        } else {
            let m = lcm_u64(a.conductor, b.conductor);
            (a.embed(m), b.embed(m))
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = Self::unify(self, other);
        for (x, y) in a.coords.iter_mut().zip(b.coords.iter()) {
            *x += y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coords.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::unify(self, other);
        if a.is_zero() || b.is_zero() {
            return Self::zero(a.conductor);
        }
        let prod = rat_poly_mul(&a.coords, &b.coords);
        Self::from_poly(a.conductor, prod)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = self.clone();
        for c in out.coords.iter_mut() {
            *c *= q;
        }
        out
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero cyclotomic number");
        let modulus = Self::phi_rat(self.conductor);
        let (g, u) = rat_poly_half_xgcd(&self.coords, &modulus);
        // Phi_N is irreducible, so the gcd is a nonzero constant.
        assert!(g.len() == 1 && !g[0].is_zero());
        let scale = g[0].clone().recip();
        let inv: Vec<Rational> = u.iter().map(|c| c * &scale).collect();
        Self::from_poly(self.conductor, inv)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// True if some positive power equals one. The roots of unity in the field
    /// of conductor `N` all satisfy `x^(2N) = 1`.
    pub fn is_root_of_unity(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let bound = if self.conductor % 2 == 0 {
            self.conductor
        } else {
            2 * self.conductor
        };
        self.pow(bound).is_one()
    }

    /// Smallest positive `t` with `self^t = 1`, if the element is a root of unity.
    pub fn multiplicative_order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let bound = if self.conductor % 2 == 0 {
            self.conductor
        } else {
            2 * self.conductor
        };
        let mut acc = Self::one(self.conductor);
        for t in 1..=bound {
            acc = acc.mul(self);
            if acc.is_one() {
                return Some(t);
            }
        }
        None
    }
}

/// The root of unity `zeta_N^k`, reduced modulo the cyclotomic polynomial.
pub fn root_of_unity(k: i64, n: u64) -> CyclotomicNumber {
    assert!(n >= 1, "root_of_unity: N must be positive");
    let k = k.rem_euclid(n as i64) as usize;
    let mut poly = vec![Rational::zero(); k + 1];
    poly[k] = Rational::one();
    CyclotomicNumber::from_poly(n, poly)
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::unify(self, other);
        a.coords == b.coords
    }
}

impl Eq for CyclotomicNumber {}

/// Render a rational in canonical `a/b` or `a` form.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for CyclotomicNumber {
    /// Canonical text at the stored conductor: rationals print bare, other
    /// elements as signed sums of `q*zN^i` terms in ascending power order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{}", fmt_rational(&q));
        }
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if i == 0 {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "z{}^{}", self.conductor, i)?;
            } else {
                write!(f, "{}*z{}^{}", fmt_rational(&mag), self.conductor, i)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Test-local long division of integer polynomials, written independently
    /// of the production division routine.
    fn oracle_div(num: &[i64], den: &[i64]) -> Vec<i64> {
        let mut rem: Vec<i64> = num.to_vec();
        let dd = den.len() - 1;
        assert_eq!(den[dd], 1);
        let qd = rem.len() - 1 - dd;
        let mut quo = vec![0i64; qd + 1];
        for i in (0..=qd).rev() {
            let c = rem[i + dd];
            quo[i] = c;
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
        assert!(rem.iter().all(|&c| c == 0));
        quo
    }

    fn oracle_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn as_i64(p: &[BigInt]) -> Vec<i64> {
        p.iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn cyclotomic_base_cases() {
        assert_eq!(as_i64(&cyclotomic_polynomial(1)), vec![-1, 1]);
        assert_eq!(as_i64(&cyclotomic_polynomial(2)), vec![1, 1]);
    }

    #[test]
    fn cyclotomic_12_against_division_oracle() {
        // Phi_12 = (t^12 - 1) / (Phi_1 Phi_2 Phi_3 Phi_4 Phi_6), with the
        // small factors frozen from their textbook forms.
        let phi1 = [-1, 1];
        let phi2 = [1, 1];
        let phi3 = [1, 1, 1];
        let phi4 = [1, 0, 1];
        let phi6 = [1, -1, 1];
        let mut den = oracle_mul(&phi1, &phi2);
        den = oracle_mul(&den, &phi3);
        den = oracle_mul(&den, &phi4);
        den = oracle_mul(&den, &phi6);
        let mut t12 = vec![0i64; 13];
        t12[0] = -1;
        t12[12] = 1;
        let expected = oracle_div(&t12, &den);
        assert_eq!(expected, vec![1, 0, -1, 0, 1]); // t^4 - t^2 + 1
        assert_eq!(as_i64(&cyclotomic_polynomial(12)), expected);
    }

    #[test]
    fn roots_of_unity_examples() {
        for n in [1u64, 2, 3, 4, 6, 8, 12] {
            assert!(root_of_unity(0, n).is_one());
        }
        // zeta_6^3 = -1: squaring gives 1, and the cube of zeta_6 is not 1.
        let z63 = root_of_unity(3, 6);
        assert_eq!(z63, CyclotomicNumber::from_rational(rat_int(-1), 6));
        assert!(z63.pow(2).is_one());
        assert!(!root_of_unity(1, 6).pow(3).is_one() || root_of_unity(1, 6).pow(3) == z63);
        // zeta_4 squares to -1.
        let i = root_of_unity(1, 4);
        assert_eq!(i.pow(2), CyclotomicNumber::from_rational(rat_int(-1), 4));
    }

    #[test]
    fn root_of_unity_orders_up_to_24() {
        for n in 1u64..=24 {
            for k in 1..=n {
                let z = root_of_unity(k as i64, n);
                assert!(z.pow(n).is_one(), "zeta_{}^{} to the {} not 1", n, k, n);
                let expected_order = n / k.gcd(&n);
                assert_eq!(z.multiplicative_order(), Some(expected_order));
            }
        }
    }

    #[test]
    fn embed_examples() {
        let one = CyclotomicNumber::one(1);
        assert!(one.embed(3).is_one());
        assert_eq!(one.embed(3).conductor(), 3);

        let minus_one = CyclotomicNumber::from_rational(rat_int(-1), 2);
        assert_eq!(minus_one.embed(6), root_of_unity(3, 6));

        let z3 = root_of_unity(1, 3);
        assert_eq!(z3.embed(6), root_of_unity(2, 6));
        assert_eq!(z3.embed(6).multiplicative_order(), Some(3));
    }

    #[test]
    #[should_panic(expected = "does not divide")]
    fn embed_rejects_non_divisible_conductor() {
        root_of_unity(1, 4).embed(6);
    }

    fn arb_cyclotomic(conductor: u64) -> impl Strategy<Value = CyclotomicNumber> {
        let dim = euler_phi(conductor) as usize;
        proptest::collection::vec((-4i64..=4, 1i64..=3), dim).prop_map(move |cs| {
            let mut z = CyclotomicNumber::zero(conductor);
            for (i, (n, d)) in cs.into_iter().enumerate() {
                z.coords[i] = rat(n, d);
            }
            z
        })
    }

    fn arb_triple() -> impl Strategy<Value = (CyclotomicNumber, CyclotomicNumber, CyclotomicNumber)>
    {
        prop::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12])
            .prop_flat_map(|n| (arb_cyclotomic(n), arb_cyclotomic(n), arb_cyclotomic(n)))
    }

    fn arb_embed_pair() -> impl Strategy<Value = (u64, CyclotomicNumber, CyclotomicNumber)> {
        prop::sample::select(vec![(1u64, 6u64), (2, 6), (3, 6), (3, 12), (4, 12), (6, 12)])
            .prop_flat_map(|(n, m)| (Just(m), arb_cyclotomic(n), arb_cyclotomic(n)))
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c) in arb_triple()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inverse()).is_one());
            }
        }

        #[test]
        fn embed_is_ring_homomorphism((m, x, y) in arb_embed_pair()) {
            prop_assert_eq!(x.embed(m).mul(&y.embed(m)), x.mul(&y).embed(m));
            prop_assert_eq!(x.embed(m).add(&y.embed(m)), x.add(&y).embed(m));
            // injectivity on sampled elements
            if x != y {
                prop_assert!(x.embed(m) != y.embed(m));
            }
        }
    }
}
