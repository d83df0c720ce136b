//! Exact arithmetic in `Z[zeta_p]` and integer polynomials built from
//! Galois orbits.
//!
//! A [`CycInt`] is stored in the power basis `1, zeta, .., zeta^{p-2}`, which
//! is a Z-basis, so a value is rational exactly when every coordinate past
//! the first vanishes.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("cyclotomic integers over different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("Galois exponent {i} is divisible by p = {p}")]
    NotCoprime { i: i64, p: u64 },
    #[error("coefficient of x^{index} is not rational")]
    NonRational { index: usize },
    #[error("no roots supplied")]
    NoRoots,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u64,
    coords: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(p: u64) -> Self {
        Self { p, coords: vec![BigInt::zero(); (p - 1) as usize] }
    }

    pub fn from_int(p: u64, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero(p);
        out.coords[0] = c.into();
        out
    }

    /// `zeta^k` for any integer `k`.
    pub fn zeta_pow(p: u64, k: i64) -> Self {
        let mut full = vec![BigInt::zero(); p as usize];
        full[k.rem_euclid(p as i64) as usize] = BigInt::one();
        Self::from_full(p, full)
    }

    /// Coordinates in the power basis; must have exactly `p - 1` entries.
    pub fn from_coords(p: u64, coords: Vec<BigInt>) -> Self {
        assert_eq!(coords.len() as u64, p - 1, "expected p-1 coordinates");
        Self { p, coords }
    }

    /// `sum_t counts[t] * zeta^t` over `t = 0..p`.
    pub fn from_exponent_counts<T: Into<BigInt> + Copy>(p: u64, counts: &[T]) -> Self {
        assert_eq!(counts.len() as u64, p);
        Self::from_full(p, counts.iter().map(|&c| c.into()).collect())
    }

    /// Reduces a length-`p` vector using `zeta^{p-1} = -(1 + .. + zeta^{p-2})`.
    fn from_full(p: u64, mut full: Vec<BigInt>) -> Self {
        let top = full.pop().expect("length p");
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        Self { p, coords: full }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn same_prime(&self, other: &Self) -> Result<(), CycloError> {
        if self.p != other.p {
            return Err(CycloError::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CycloError> {
        self.same_prime(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(Self { p: self.p, coords })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.same_prime(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(Self { p: self.p, coords })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, CycloError> {
        self.same_prime(other)?;
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                full[(i + j) % p] += a * b;
            }
        }
        Ok(Self::from_full(self.p, full))
    }

    pub fn neg(&self) -> Self {
        Self { p: self.p, coords: self.coords.iter().map(|c| -c).collect() }
    }

    /// The automorphism `zeta -> zeta^i`.
    pub fn galois_apply(&self, i: i64) -> Result<Self, CycloError> {
        let p = self.p as i64;
        let i = i.rem_euclid(p);
        if i == 0 {
            return Err(CycloError::NotCoprime { i, p: self.p });
        }
        let mut full = vec![BigInt::zero(); self.p as usize];
        for (k, c) in self.coords.iter().enumerate() {
            full[((k as i64 * i) % p) as usize] += c;
        }
        Ok(Self::from_full(self.p, full))
    }

    /// The rational integer this value equals, if it is one.
    pub fn as_rational(&self) -> Option<BigInt> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// Value under the complex embedding `zeta -> exp(2 pi i / p)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coords.iter().enumerate() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * k as f64 / self.p as f64;
            re += c * angle.cos();
            im += c * angle.sin();
        }
        (re, im)
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt(p={}, {})", self.p, self)
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

macro_rules! cyc_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&CycInt> for &CycInt {
            type Output = CycInt;
            /// Panics if the operands live over different primes.
            fn $method(self, rhs: &CycInt) -> CycInt {
                self.$checked(rhs).expect("cyclotomic operands over the same prime")
            }
        }
    };
}

cyc_binop!(Add, add, checked_add);
cyc_binop!(Sub, sub, checked_sub);
cyc_binop!(Mul, mul, checked_mul);

/// Polynomial with integer coefficients, constant term first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one() -> Self {
        Self { coeffs: vec![BigInt::one()] }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: &BigInt) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| mod_floor(c, m)).collect()
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_mag = k == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn mod_floor(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

/// Expands `prod (x - r)` over the roots and returns it as an integer
/// polynomial. Fails if any coefficient is irrational, which happens exactly
/// when the roots are not a union of full Galois orbits.
pub fn product_linear(roots: &[CycInt]) -> Result<IntPolynomial, CycloError> {
    let p = roots.first().ok_or(CycloError::NoRoots)?.p;
    // coefficients in Z[zeta], constant term first
    let mut acc = vec![CycInt::from_int(p, 1)];
    for r in roots {
        if r.p != p {
            return Err(CycloError::PrimeMismatch(p, r.p));
        }
        let neg_r = r.neg();
        let mut next = vec![CycInt::zero(p); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] = &next[k + 1] + c;
            next[k] = &next[k] + &(c * &neg_r);
        }
        acc = next;
    }
    let coeffs = acc
        .iter()
        .enumerate()
        .map(|(index, c)| c.as_rational().ok_or(CycloError::NonRational { index }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntPolynomial::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(p: u64, c: &[i64]) -> CycInt {
        CycInt::from_coords(p, c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn arithmetic_examples() {
        let one_plus_zeta = cyc(3, &[1, 1]);
        assert_eq!(&one_plus_zeta * &one_plus_zeta, cyc(3, &[0, 1]));
        let u = cyc(5, &[3, -1, 4, 2]);
        assert_eq!(&u + &CycInt::zero(5), u);
        let z3 = CycInt::zeta_pow(5, 3);
        let z2 = CycInt::zeta_pow(5, 2);
        assert_eq!(&z3 * &z2, cyc(5, &[1, 0, 0, 0]));
        assert_eq!(
            cyc(3, &[1, 0]).checked_add(&cyc(5, &[1, 0, 0, 0])),
            Err(CycloError::PrimeMismatch(3, 5))
        );
    }

    #[test]
    fn galois_examples() {
        let zeta3 = CycInt::zeta_pow(3, 1);
        assert_eq!(zeta3.galois_apply(1).unwrap(), zeta3);
        assert_eq!(zeta3.galois_apply(2).unwrap(), cyc(3, &[-1, -1]));
        assert_eq!(CycInt::zeta_pow(5, 1).galois_apply(2).unwrap(), cyc(5, &[0, 0, 1, 0]));
        assert_eq!(zeta3.galois_apply(3), Err(CycloError::NotCoprime { i: 0, p: 3 }));
    }

    #[test]
    fn rationality_examples() {
        assert_eq!(cyc(3, &[5, 0]).as_rational(), Some(BigInt::from(5)));
        assert_eq!(cyc(3, &[0, 1]).as_rational(), None);
        let all = CycInt::from_exponent_counts(5, &[1i64, 1, 1, 1, 1]);
        assert_eq!(all.as_rational(), Some(BigInt::zero()));
    }

    #[test]
    fn product_linear_examples() {
        let k = CycInt::from_int(3, -6);
        assert_eq!(product_linear(&[k]).unwrap(), IntPolynomial::from_i64(&[6, 1]));
        let roots = [CycInt::zeta_pow(3, 1), CycInt::zeta_pow(3, 2)];
        assert_eq!(product_linear(&roots).unwrap(), IntPolynomial::from_i64(&[1, 1, 1]));
        assert_eq!(
            product_linear(&[CycInt::zeta_pow(5, 1)]),
            Err(CycloError::NonRational { index: 0 })
        );
        assert_eq!(product_linear(&[]), Err(CycloError::NoRoots));
    }

    #[test]
    fn polynomial_display_and_power() {
        let f = IntPolynomial::from_i64(&[-5, 0, 1]);
        assert_eq!(f.to_string(), "x^2 - 5");
        assert_eq!(f.pow(2), IntPolynomial::from_i64(&[25, 0, -10, 0, 1]));
        assert_eq!(IntPolynomial::from_i64(&[0, 0]).degree(), None);
        assert_eq!(IntPolynomial::from_i64(&[3, -1]).to_string(), "-x + 3");
    }

    #[test]
    fn rational_iff_galois_fixed_small_exhaustive() {
        for p in [3u64, 5] {
            let range: Vec<i64> = (-1..=1).collect();
            let len = (p - 1) as usize;
            let total = range.len().pow(len as u32);
            for idx in 0..total {
                let mut k = idx;
                let c: Vec<i64> = (0..len)
                    .map(|_| {
                        let v = range[k % range.len()];
                        k /= range.len();
                        v
                    })
                    .collect();
                let u = cyc(p, &c);
                let fixed = (1..p as i64).all(|i| u.galois_apply(i).unwrap() == u);
                assert_eq!(u.as_rational().is_some(), fixed, "{u:?}");
            }
        }
    }

    fn arb_cyc(p: u64) -> impl Strategy<Value = CycInt> {
        prop::collection::vec(-50i64..50, (p - 1) as usize).prop_map(move |c| cyc(p, &c))
    }

    proptest! {
        #[test]
        fn galois_is_a_group_action(u in arb_cyc(7), i in 1i64..7, j in 1i64..7) {
            let lhs = u.galois_apply(j).unwrap().galois_apply(i).unwrap();
            prop_assert_eq!(lhs, u.galois_apply(i * j % 7).unwrap());
        }

        #[test]
        fn galois_is_a_ring_automorphism(u in arb_cyc(5), v in arb_cyc(5), i in 1i64..5) {
            let s = |w: &CycInt| w.galois_apply(i).unwrap();
            prop_assert_eq!(s(&(&u * &v)), &s(&u) * &s(&v));
            prop_assert_eq!(s(&(&u + &v)), &s(&u) + &s(&v));
            prop_assert_eq!(s(&(&u - &v)), &s(&u) - &s(&v));
        }

        #[test]
        fn multiplication_matches_complex_embedding(u in arb_cyc(7), v in arb_cyc(7)) {
            let (ar, ai) = u.to_complex();
            let (br, bi) = v.to_complex();
            let (cr, ci) = (&u * &v).to_complex();
            prop_assert!((ar * br - ai * bi - cr).abs() < 1e-6);
            prop_assert!((ar * bi + ai * br - ci).abs() < 1e-6);
        }

        #[test]
        fn product_linear_is_permutation_invariant(u in arb_cyc(5), shift in 0usize..4) {
            let mut orbit: Vec<CycInt> = (1..5).map(|i| u.galois_apply(i).unwrap()).collect();
            let base = product_linear(&orbit).unwrap();
            orbit.rotate_left(shift);
            orbit.swap(0, 3);
            prop_assert_eq!(product_linear(&orbit).unwrap(), base);
        }
    }
}
