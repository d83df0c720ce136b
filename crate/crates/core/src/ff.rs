//! Finite fields `F_{p^n}` in a polynomial basis.
//!
//! Elements are coordinate vectors of length `n`, constant coefficient first,
//! reduced modulo a fixed monic irreducible polynomial. Every field carries a
//! fixed generator of its multiplicative group; for the default modulus this
//! is the class of the indeterminate itself.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not an odd prime")]
    BadCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{n} does not fit in 64 bits")]
    TooLarge { p: u64, n: usize },
    #[error("modulus must have {expected} coefficients (monic of degree n), got {got}")]
    ModulusLength { expected: usize, got: usize },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus coefficient {index} = {value} is not a residue mod {p}")]
    ModulusCoefficient { index: usize, value: u64, p: u64 },
    #[error("modulus is reducible over F_{0}")]
    Reducible(u64),
    #[error("element has {got} coordinates, expected {expected}")]
    ElementLength { expected: usize, got: usize },
    #[error("coordinate {index} = {value} is not a residue mod {p}")]
    ElementCoordinate { index: usize, value: u64, p: u64 },
    #[error("subset kind {0:?} is only defined for p = 3")]
    SubsetNeedsTernary(SubsetKind),
    #[error("subset Y needs n >= 3, field has n = {0}")]
    SubsetNeedsDegree(usize),
    #[error("exponent {0} is outside [0, q-2]")]
    ExponentRange(u64),
    #[error("exponent set is not closed under s -> p*s mod (q-1): {0} maps outside")]
    NotFrobeniusClosed(u64),
    #[error("exponent set was built for q = {set_q}, field has q = {field_q}")]
    SubsetFieldMismatch { set_q: u64, field_q: u64 },
}

/// An element of `F_{p^n}`: polynomial-basis coordinates, constant term first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FFElem {
    coeffs: Vec<u64>,
}

impl FFElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FFElem{:?}", self.coeffs)
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// A finite field `F_p[x]/(modulus)` with a fixed multiplicative generator.
///
/// Immutable once built; share it freely between threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    n: usize,
    q: u64,
    modulus: Vec<u64>,
    generator: FFElem,
}

/// Builds `F_{p^n}`.
///
/// With no modulus, the monic degree-`n` polynomials are enumerated in
/// lexicographic order of their coefficient sequence (constant term first)
/// and the first irreducible one whose root generates `F_q^*` is taken. For
/// `n = 1` the modulus is `x` and the generator is the smallest primitive root.
pub fn make_field(p: u64, n: usize, modulus: Option<&[u64]>) -> Result<FieldCtx, FieldError> {
    if p == 2 || !arith::is_prime(p) {
        return Err(FieldError::BadCharacteristic(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = arith::checked_pow(p, n as u32).ok_or(FieldError::TooLarge { p, n })?;

    let modulus = match modulus {
        Some(m) => {
            if m.len() != n + 1 {
                return Err(FieldError::ModulusLength { expected: n + 1, got: m.len() });
            }
            for (index, &value) in m.iter().enumerate() {
                if value >= p {
                    return Err(FieldError::ModulusCoefficient { index, value, p });
                }
            }
            if m[n] != 1 {
                return Err(FieldError::NotMonic);
            }
            if !poly::is_irreducible(m, p) {
                return Err(FieldError::Reducible(p));
            }
            m.to_vec()
        }
        None if n == 1 => vec![0, 1],
        None => default_modulus(p, n, q),
    };

    let mut ctx = FieldCtx { p, n, q, modulus, generator: FFElem { coeffs: vec![0; n] } };
    ctx.generator = if n == 1 {
        let g = (2..p).find(|&g| ctx.is_primitive(&ctx.constant(g))).unwrap_or(1);
        ctx.constant(g)
    } else {
        let x = ctx.indeterminate();
        if ctx.is_primitive(&x) {
            x
        } else {
            ctx.elements()
                .find(|e| ctx.is_primitive(e))
                .expect("a finite field has a primitive element")
        }
    };
    Ok(ctx)
}

fn default_modulus(p: u64, n: usize, q: u64) -> Vec<u64> {
    // Odometer over (c_0, .., c_{n-1}) with c_0 the most significant position.
    let mut tail = vec![0u64; n];
    loop {
        let mut m = tail.clone();
        m.push(1);
        if poly::is_irreducible(&m, p) && poly::root_is_primitive(&m, p, q) {
            return m;
        }
        let mut pos = n;
        loop {
            pos -= 1;
            tail[pos] += 1;
            if tail[pos] < p {
                break;
            }
            tail[pos] = 0;
            assert!(pos > 0, "primitive polynomials exist in every degree");
        }
    }
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Field order `p^n`.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn q_big(&self) -> BigUint {
        BigUint::from(self.q)
    }

    /// Monic modulus, constant term first, `n + 1` entries.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> &FFElem {
        &self.generator
    }

    pub fn element(&self, coeffs: &[u64]) -> Result<FFElem, FieldError> {
        if coeffs.len() != self.n {
            return Err(FieldError::ElementLength { expected: self.n, got: coeffs.len() });
        }
        for (index, &value) in coeffs.iter().enumerate() {
            if value >= self.p {
                return Err(FieldError::ElementCoordinate { index, value, p: self.p });
            }
        }
        Ok(FFElem { coeffs: coeffs.to_vec() })
    }

    pub fn zero(&self) -> FFElem {
        FFElem { coeffs: vec![0; self.n] }
    }

    pub fn one(&self) -> FFElem {
        self.constant(1)
    }

    /// The prime-field element `c mod p`.
    pub fn constant(&self, c: u64) -> FFElem {
        let mut coeffs = vec![0; self.n];
        coeffs[0] = c % self.p;
        FFElem { coeffs }
    }

    /// Class of `x` in `F_p[x]/(modulus)`.
    pub fn indeterminate(&self) -> FFElem {
        let mut coeffs = vec![0; self.n];
        if self.n == 1 {
            coeffs[0] = (self.p - self.modulus[0]) % self.p;
        } else {
            coeffs[1] = 1;
        }
        FFElem { coeffs }
    }

    /// Index of an element: `sum c_i p^i`.
    pub fn index_of(&self, x: &FFElem) -> u64 {
        x.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// Inverse of [`FieldCtx::index_of`]. Panics if `index >= q`.
    pub fn from_index(&self, mut index: u64) -> FFElem {
        assert!(index < self.q, "element index {index} out of range for q = {}", self.q);
        let mut coeffs = vec![0; self.n];
        for c in coeffs.iter_mut() {
            *c = index % self.p;
            index /= self.p;
        }
        FFElem { coeffs }
    }

    /// All field elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FFElem> + '_ {
        (0..self.q).map(move |i| self.from_index(i))
    }

    pub fn add(&self, x: &FFElem, y: &FFElem) -> FFElem {
        let coeffs = x.coeffs.iter().zip(&y.coeffs).map(|(a, b)| (a + b) % self.p).collect();
        FFElem { coeffs }
    }

    pub fn sub(&self, x: &FFElem, y: &FFElem) -> FFElem {
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(a, b)| (a + self.p - b) % self.p)
            .collect();
        FFElem { coeffs }
    }

    pub fn neg(&self, x: &FFElem) -> FFElem {
        self.sub(&self.zero(), x)
    }

    /// `c * x` for a prime-field scalar `c`.
    pub fn scale(&self, c: u64, x: &FFElem) -> FFElem {
        let c = c % self.p;
        FFElem { coeffs: x.coeffs.iter().map(|a| a * c % self.p).collect() }
    }

    pub fn mul(&self, x: &FFElem, y: &FFElem) -> FFElem {
        let mut prod = poly::mul(&x.coeffs, &y.coeffs, self.p);
        poly::reduce_monic(&mut prod, &self.modulus, self.p);
        prod.resize(self.n, 0);
        FFElem { coeffs: prod }
    }

    pub fn pow(&self, x: &FFElem, mut e: u64) -> FFElem {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `x^{-1}`, with `0^{-1} = 0`.
    pub fn inv(&self, x: &FFElem) -> FFElem {
        // x^{q-2} is x^{-1} on F_q^* and sends 0 to 0.
        self.pow(x, self.q - 2)
    }

    pub fn frobenius(&self, x: &FFElem) -> FFElem {
        self.pow(x, self.p)
    }

    /// Absolute trace `x + x^p + ... + x^{p^{n-1}}`, as a residue mod `p`.
    pub fn trace(&self, x: &FFElem) -> u64 {
        let mut acc = self.zero();
        let mut conj = x.clone();
        for _ in 0..self.n {
            acc = self.add(&acc, &conj);
            conj = self.frobenius(&conj);
        }
        debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
        acc.coeffs[0]
    }

    /// Multiplicative order of a nonzero element equals `q - 1`.
    pub fn is_primitive(&self, x: &FFElem) -> bool {
        if x.is_zero() {
            return false;
        }
        let order = self.q - 1;
        if self.pow(x, order) != self.one() {
            return false;
        }
        arith::prime_divisors(order).into_iter().all(|r| self.pow(x, order / r) != self.one())
    }
}

/// Which of the named exponent sets a [`SubsetSpec`] is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubsetKind {
    /// `{p^i}`; the power sum is the absolute trace.
    W,
    /// `{3^i + 3^j}`, `i, j` not necessarily distinct.
    X,
    /// `{3^i + 3^j + 3^k}`, `i, j, k` distinct.
    Y,
    /// `{2*3^i + 3^j}`, `i != j`.
    Z,
    Custom,
}

/// A subset of `Z/(q-1)Z` closed under `s -> p*s`, defining `tau_S(c) = sum c^s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSpec {
    exponents: Vec<u64>,
    kind: SubsetKind,
    q: u64,
}

impl SubsetSpec {
    /// Validates a caller-supplied exponent set against `ctx`.
    pub fn custom(ctx: &FieldCtx, exponents: &[u64]) -> Result<Self, FieldError> {
        let modulus = ctx.q - 1;
        let mut exps = exponents.to_vec();
        exps.sort_unstable();
        exps.dedup();
        if let Some(&bad) = exps.iter().find(|&&s| s >= modulus) {
            return Err(FieldError::ExponentRange(bad));
        }
        for &s in &exps {
            let image = ((s as u128 * ctx.p as u128) % modulus as u128) as u64;
            if exps.binary_search(&image).is_err() {
                return Err(FieldError::NotFrobeniusClosed(s));
            }
        }
        Ok(Self { exponents: exps, kind: SubsetKind::Custom, q: ctx.q })
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn kind(&self) -> SubsetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, s: u64) -> bool {
        self.exponents.binary_search(&s).is_ok()
    }
}

/// Builds one of the sets `W`, `X`, `Y`, `Z` for the field.
pub fn build_subset(ctx: &FieldCtx, kind: SubsetKind) -> Result<SubsetSpec, FieldError> {
    let n = ctx.n;
    let p = ctx.p;
    if matches!(kind, SubsetKind::X | SubsetKind::Y | SubsetKind::Z) && p != 3 {
        return Err(FieldError::SubsetNeedsTernary(kind));
    }
    let pw: Vec<u64> = (0..n).map(|i| p.pow(i as u32)).collect();
    let mut raw = Vec::new();
    match kind {
        SubsetKind::W => raw.extend(pw.iter().copied()),
        SubsetKind::X => {
            for i in 0..n {
                for j in i..n {
                    raw.push(pw[i] + pw[j]);
                }
            }
        }
        SubsetKind::Y => {
            if n < 3 {
                return Err(FieldError::SubsetNeedsDegree(n));
            }
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        raw.push(pw[i] + pw[j] + pw[k]);
                    }
                }
            }
        }
        SubsetKind::Z => {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        raw.push(2 * pw[i] + pw[j]);
                    }
                }
            }
        }
        SubsetKind::Custom => {
            return SubsetSpec::custom(ctx, &[]);
        }
    }
    // Members are integers in [0, q-2]; only the degenerate n = 1 case drops any.
    raw.retain(|&r| r <= ctx.q - 2);
    let mut spec = SubsetSpec::custom(ctx, &raw)?;
    spec.kind = kind;
    Ok(spec)
}

/// `tau_S(a) = sum_{s in S} a^s`, which lies in the prime field.
///
/// Exponent `0` contributes `1` for every `a`, including `a = 0`.
pub fn tau(ctx: &FieldCtx, set: &SubsetSpec, a: &FFElem) -> Result<u64, FieldError> {
    if set.q != ctx.q {
        return Err(FieldError::SubsetFieldMismatch { set_q: set.q, field_q: ctx.q });
    }
    let mut acc = ctx.zero();
    for &s in &set.exponents {
        acc = ctx.add(&acc, &ctx.pow(a, s));
    }
    debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
    Ok(acc.coeffs[0])
}

/// Legendre symbol `(t/p)` for an odd prime `p`.
pub fn legendre(t: i64, p: u64) -> i8 {
    let r = t.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if arith::pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Dense polynomials over `F_p` as coefficient vectors, constant term first.
mod poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }

    /// Reduces `a` in place modulo the monic polynomial `m`.
    pub fn reduce_monic(a: &mut Vec<u64>, m: &[u64], p: u64) {
        let d = m.len() - 1;
        while a.len() > d {
            let lead = a.pop().unwrap();
            if lead == 0 {
                continue;
            }
            let shift = a.len() - d;
            for (k, &mk) in m[..d].iter().enumerate() {
                a[shift + k] = (a[shift + k] + (p - lead) * mk) % p;
            }
        }
    }

    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        trim(&mut a);
        let lead_inv = crate::arith::inv_mod(*b.last().unwrap(), p).unwrap();
        let db = b.len() - 1;
        while a.len() > db {
            let c = a.last().unwrap() * lead_inv % p;
            let shift = a.len() - 1 - db;
            for (k, &bk) in b.iter().enumerate() {
                a[shift + k] = (a[shift + k] + (p - c) * bk % p) % p;
            }
            trim(&mut a);
        }
        a
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = base.to_vec();
        reduce_monic(&mut b, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(&acc, &b, p);
                reduce_monic(&mut acc, m, p);
            }
            b = mul(&b, &b, p);
            reduce_monic(&mut b, m, p);
            e >>= 1;
        }
        trim(&mut acc);
        acc
    }

    /// Monic `m` of degree `n` is irreducible iff `gcd(x^{p^i} - x, m) = 1` for `i <= n/2`.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let n = m.len() - 1;
        if n == 1 {
            return true;
        }
        let x = vec![0, 1];
        let mut h = x.clone();
        for _ in 0..n / 2 {
            h = pow_mod(&h, p, m, p);
            let mut diff = h.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            let g = gcd(m, &diff, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// Whether `x` has order exactly `q - 1` modulo the irreducible `m`.
    pub fn root_is_primitive(m: &[u64], p: u64, q: u64) -> bool {
        let x = vec![0, 1];
        let order = q - 1;
        if m.len() == 2 && m[0] == 0 {
            return false;
        }
        crate::arith::prime_divisors(order)
            .into_iter()
            .all(|r| pow_mod(&x, order / r, m, p) != vec![1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: a monic polynomial of degree `n` is irreducible iff
    /// it has no monic factor of degree `1..=n/2`, checked by multiplying out
    /// every pair of candidate factors.
    fn brute_irreducible(m: &[u64], p: u64) -> bool {
        let n = m.len() - 1;
        let all_monic = |d: usize| -> Vec<Vec<u64>> {
            let count = p.pow(d as u32);
            (0..count)
                .map(|mut idx| {
                    let mut v: Vec<u64> = (0..d)
                        .map(|_| {
                            let c = idx % p;
                            idx /= p;
                            c
                        })
                        .collect();
                    v.push(1);
                    v
                })
                .collect()
        };
        for d in 1..=n / 2 {
            for f in all_monic(d) {
                for g in all_monic(n - d) {
                    if poly::mul(&f, &g, p) == m {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Brute-force order of `x` modulo `m` by repeated multiplication.
    fn brute_order_of_x(m: &[u64], p: u64) -> u64 {
        let mut cur = vec![0u64, 1];
        poly::reduce_monic(&mut cur, m, p);
        let mut k = 1;
        loop {
            let mut c = cur.clone();
            poly::trim(&mut c);
            if c == vec![1] {
                return k;
            }
            cur = poly::mul(&cur, &[0, 1], p);
            poly::reduce_monic(&mut cur, m, p);
            k += 1;
            if k > 10_000 {
                return 0;
            }
        }
    }

    #[test]
    fn prime_field_generator_is_smallest_primitive_root() {
        let f3 = make_field(3, 1, None).unwrap();
        assert_eq!(f3.generator().coeffs(), &[2]);
        let f7 = make_field(7, 1, None).unwrap();
        assert_eq!(f7.generator().coeffs(), &[3]);
        let f5 = make_field(5, 1, None).unwrap();
        assert_eq!(f5.generator().coeffs(), &[2]);
    }

    #[test]
    fn default_cubic_over_f3_matches_brute_force_search() {
        let mut expected = None;
        'outer: for c0 in 0..3u64 {
            for c1 in 0..3u64 {
                for c2 in 0..3u64 {
                    let m = vec![c0, c1, c2, 1];
                    if brute_irreducible(&m, 3) && brute_order_of_x(&m, 3) == 26 {
                        expected = Some(m);
                        break 'outer;
                    }
                }
            }
        }
        let expected = expected.unwrap();
        assert_eq!(expected, vec![1, 0, 2, 1]);
        let ctx = make_field(3, 3, None).unwrap();
        assert_eq!(ctx.modulus(), expected.as_slice());
        assert_eq!(ctx.generator(), &ctx.indeterminate());
    }

    #[test]
    fn default_moduli_are_primitive_for_sweep_fields() {
        for (p, n) in [(3, 2), (3, 4), (3, 5), (3, 6), (3, 7), (5, 2), (5, 3), (5, 4), (7, 2), (7, 3)] {
            let ctx = make_field(p, n, None).unwrap();
            assert!(brute_irreducible(ctx.modulus(), p), "({p},{n})");
            assert_eq!(ctx.generator(), &ctx.indeterminate());
            assert!(ctx.is_primitive(ctx.generator()));
        }
    }

    #[test]
    fn irreducibility_agrees_with_brute_force() {
        for p in [3u64, 5] {
            for n in 2..=4usize {
                let count = p.pow(n as u32);
                for idx in 0..count {
                    let mut m: Vec<u64> = (0..n).map(|i| idx / p.pow(i as u32) % p).collect();
                    m.push(1);
                    assert_eq!(poly::is_irreducible(&m, p), brute_irreducible(&m, p), "{m:?} mod {p}");
                }
            }
        }
    }

    #[test]
    fn field_construction_errors() {
        assert_eq!(make_field(4, 2, None), Err(FieldError::BadCharacteristic(4)));
        assert_eq!(make_field(2, 3, None), Err(FieldError::BadCharacteristic(2)));
        assert_eq!(make_field(9, 1, None), Err(FieldError::BadCharacteristic(9)));
        assert_eq!(make_field(3, 0, None), Err(FieldError::ZeroDegree));
        // x^3 + 1 = (x + 1)^3 over F_3.
        assert_eq!(make_field(3, 3, Some(&[1, 0, 0, 1])), Err(FieldError::Reducible(3)));
        assert_eq!(make_field(3, 3, Some(&[1, 2, 0, 2])), Err(FieldError::NotMonic));
        assert!(matches!(make_field(3, 3, Some(&[1, 2, 1])), Err(FieldError::ModulusLength { .. })));
    }

    #[test]
    fn user_modulus_with_nonprimitive_root_gets_a_generator() {
        // x^2 + 1 is irreducible over F_3 but x has order 4, not 8.
        let ctx = make_field(3, 2, Some(&[1, 0, 1])).unwrap();
        assert_ne!(ctx.generator(), &ctx.indeterminate());
        assert!(ctx.is_primitive(ctx.generator()));
    }

    #[test]
    fn make_field_is_deterministic() {
        assert_eq!(make_field(5, 3, None).unwrap(), make_field(5, 3, None).unwrap());
    }

    #[test]
    fn inverse_edge_cases() {
        let f3 = make_field(3, 1, None).unwrap();
        assert_eq!(f3.inv(&f3.zero()), f3.zero());
        assert_eq!(f3.inv(&f3.one()), f3.one());
        assert_eq!(f3.inv(&f3.constant(2)), f3.constant(2));
        let ctx = make_field(3, 3, None).unwrap();
        for x in ctx.elements() {
            let y = ctx.inv(&x);
            if x.is_zero() {
                assert!(y.is_zero());
            } else {
                assert_eq!(ctx.mul(&x, &y), ctx.one());
                assert_eq!(ctx.inv(&y), x);
            }
        }
    }

    #[test]
    fn trace_values() {
        for n in 1..=5 {
            let ctx = make_field(3, n, None).unwrap();
            assert_eq!(ctx.trace(&ctx.zero()), 0);
            assert_eq!(ctx.trace(&ctx.one()), n as u64 % 3);
        }
    }

    #[test]
    fn trace_matches_power_and_sum_oracle() {
        let ctx = make_field(3, 3, None).unwrap();
        for x in ctx.elements() {
            // Oracle: x^{1} + x^{3} + x^{9}, each power by repeated multiplication.
            let mut total = ctx.zero();
            for e in [1u64, 3, 9] {
                let mut pw = ctx.one();
                for _ in 0..e {
                    pw = ctx.mul(&pw, &x);
                }
                total = ctx.add(&total, &pw);
            }
            assert_eq!(total.coeffs()[1..], [0, 0]);
            assert_eq!(ctx.trace(&x), total.coeffs()[0]);
        }
    }

    #[test]
    fn trace_is_balanced_linear_and_frobenius_invariant() {
        for (p, n) in [(3, 3), (5, 2), (7, 2)] {
            let ctx = make_field(p, n, None).unwrap();
            let mut hits = vec![0u64; p as usize];
            for x in ctx.elements() {
                let t = ctx.trace(&x);
                hits[t as usize] += 1;
                assert_eq!(ctx.trace(&ctx.frobenius(&x)), t);
                assert_eq!(ctx.trace(&ctx.scale(2, &x)), 2 * t % p);
            }
            assert!(hits.iter().all(|&h| h == ctx.q() / p));
            let g = ctx.generator().clone();
            for x in ctx.elements().step_by(7) {
                assert_eq!(ctx.trace(&ctx.add(&x, &g)), (ctx.trace(&x) + ctx.trace(&g)) % p);
            }
        }
    }

    #[test]
    fn named_subsets_for_q27() {
        let ctx = make_field(3, 3, None).unwrap();
        let w = build_subset(&ctx, SubsetKind::W).unwrap();
        assert_eq!(w.exponents(), &[1, 3, 9]);
        let x = build_subset(&ctx, SubsetKind::X).unwrap();
        assert_eq!(x.exponents(), &[2, 4, 6, 10, 12, 18]);
        let z = build_subset(&ctx, SubsetKind::Z).unwrap();
        assert_eq!(z.exponents(), &[5, 7, 11, 15, 19, 21]);
        let y = build_subset(&ctx, SubsetKind::Y).unwrap();
        assert_eq!(y.exponents(), &[13]);
        assert_eq!(y.kind(), SubsetKind::Y);
    }

    #[test]
    fn named_subsets_match_enumeration_oracle() {
        for n in 3..=7usize {
            let ctx = make_field(3, n, None).unwrap();
            let pw: Vec<u64> = (0..n).map(|i| 3u64.pow(i as u32)).collect();
            let mut x = std::collections::BTreeSet::new();
            let mut y = std::collections::BTreeSet::new();
            let mut z = std::collections::BTreeSet::new();
            for i in 0..n {
                for j in 0..n {
                    x.insert(pw[i] + pw[j]);
                    if i != j {
                        z.insert(2 * pw[i] + pw[j]);
                    }
                    for k in 0..n {
                        if i != j && j != k && i != k {
                            y.insert(pw[i] + pw[j] + pw[k]);
                        }
                    }
                }
            }
            let as_vec = |s: std::collections::BTreeSet<u64>| s.into_iter().collect::<Vec<_>>();
            assert_eq!(build_subset(&ctx, SubsetKind::X).unwrap().exponents(), as_vec(x).as_slice());
            assert_eq!(build_subset(&ctx, SubsetKind::Y).unwrap().exponents(), as_vec(y).as_slice());
            assert_eq!(build_subset(&ctx, SubsetKind::Z).unwrap().exponents(), as_vec(z).as_slice());
        }
    }

    #[test]
    fn subset_errors() {
        let f25 = make_field(5, 2, None).unwrap();
        assert!(build_subset(&f25, SubsetKind::W).is_ok());
        assert_eq!(
            build_subset(&f25, SubsetKind::X),
            Err(FieldError::SubsetNeedsTernary(SubsetKind::X))
        );
        let f9 = make_field(3, 2, None).unwrap();
        assert_eq!(build_subset(&f9, SubsetKind::Y), Err(FieldError::SubsetNeedsDegree(2)));
        let f27 = make_field(3, 3, None).unwrap();
        assert_eq!(SubsetSpec::custom(&f27, &[1, 3]), Err(FieldError::NotFrobeniusClosed(3)));
        assert_eq!(SubsetSpec::custom(&f27, &[26]), Err(FieldError::ExponentRange(26)));
        let w9 = build_subset(&f9, SubsetKind::W).unwrap();
        assert!(matches!(tau(&f27, &w9, &f27.one()), Err(FieldError::SubsetFieldMismatch { .. })));
    }

    #[test]
    fn tau_examples_and_well_definedness() {
        let ctx = make_field(3, 3, None).unwrap();
        let sets: Vec<SubsetSpec> = [SubsetKind::W, SubsetKind::X, SubsetKind::Y, SubsetKind::Z]
            .into_iter()
            .map(|k| build_subset(&ctx, k).unwrap())
            .collect();
        for a in ctx.elements() {
            assert_eq!(tau(&ctx, &sets[0], &a).unwrap(), ctx.trace(&a));
        }
        for s in &sets {
            assert_eq!(tau(&ctx, s, &ctx.zero()).unwrap(), 0);
        }
        assert_eq!(tau(&ctx, &sets[1], &ctx.one()).unwrap(), 0);
        let with_zero = SubsetSpec::custom(&ctx, &[0]).unwrap();
        assert_eq!(tau(&ctx, &with_zero, &ctx.zero()).unwrap(), 1);
    }

    #[test]
    fn trace_times_tau_x_identity() {
        for n in 3..=6 {
            let ctx = make_field(3, n, None).unwrap();
            let x = build_subset(&ctx, SubsetKind::X).unwrap();
            let z = build_subset(&ctx, SubsetKind::Z).unwrap();
            for a in ctx.elements() {
                let t = ctx.trace(&a);
                let lhs = t * tau(&ctx, &x, &a).unwrap() % 3;
                let rhs = (t + 2 * tau(&ctx, &z, &a).unwrap()) % 3;
                assert_eq!(lhs, rhs, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn legendre_symbol() {
        assert_eq!(legendre(1, 3), 1);
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(0, 7), 0);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
        for p in [3u64, 5, 7, 11] {
            let squares: std::collections::BTreeSet<u64> = (1..p).map(|x| x * x % p).collect();
            for t in 1..p {
                let expected = if squares.contains(&t) { 1 } else { -1 };
                assert_eq!(legendre(t as i64, p), expected);
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let ctx = make_field(5, 2, None).unwrap();
        for (i, x) in ctx.elements().enumerate() {
            assert_eq!(ctx.index_of(&x), i as u64);
        }
    }
}
