//! Truncated p-adic arithmetic and the Gross-Koblitz route to Gauss sums.
//!
//! Everything here is computed modulo `p^K` for a fixed precision `K`:
//!
//! - [`PadicInt`] is an element of `Z_p / p^K`.
//! - [`UnramCtx`] models the unramified ring `Z_q / p^K` as
//!   `(Z/p^K)[x]/(F)`, where `F` is the field modulus lifted digit-wise.
//! - [`teich`] computes Teichmuller representatives by Frobenius iteration.
//! - [`gamma_p`] evaluates Morita's p-adic gamma function through the finite
//!   product formula, which is valid modulo `p^K` for odd `p`.
//! - [`gauss_gk`] returns `g(j) = pi^{wt_p(j)} prod_i Gamma_p(<p^i j/(q-1)>)`.
//!
//! None of this touches the cyclotomic layer; the two routes only meet in
//! the comparisons made by [`FourierCheck`].

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith;
use crate::ff::{build_subset, tau, FFElem, FieldCtx, FieldError, SubsetKind, SubsetSpec};
use crate::kloos::{CheckId, CongruenceReport, KloosEngine, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("denominator {den} is divisible by p = {p}")]
    NonUnitDenominator { den: i64, p: u64 },
    #[error("p^K = {p}^{precision} does not fit in 64 bits")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("precision must be at least {needed} digits, got {got}")]
    PrecisionTooLow { needed: u32, got: u32 },
    #[error("Gauss sum index {j} outside [1, {max}]")]
    IndexOutOfRange { j: u64, max: u64 },
    #[error("operation needs p = 3 and n >= 3, field is F_{{{p}^{n}}}")]
    NeedsTernaryCube { p: u64, n: usize },
    #[error("element {0} is not a unit")]
    NotUnit(u64),
    #[error("p-adic operands have different prime or precision")]
    Mismatch,
    #[error("value expected in Z_p has a nonzero x^{index} coordinate")]
    NotRational { index: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Digit sum of `j` in base `p`.
pub fn weight_p(j: u64, p: u64) -> u64 {
    arith::digits(j, p).iter().sum()
}

/// An element of `Z_p` known modulo `p^precision`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u64,
    precision: u32,
    residue: u64,
}

impl PadicInt {
    pub fn new(p: u64, precision: u32, value: i128) -> Result<Self, PadicError> {
        let m = arith::checked_pow(p, precision).ok_or(PadicError::PrecisionTooLarge { p, precision })?;
        Ok(Self { p, precision, residue: value.rem_euclid(m as i128) as u64 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    /// `p^precision`.
    pub fn modulus(&self) -> u64 {
        self.p.pow(self.precision)
    }

    fn with(&self, residue: u128) -> Self {
        Self { residue: (residue % self.modulus() as u128) as u64, ..*self }
    }

    fn check(&self, other: &Self) -> Result<(), PadicError> {
        if self.p != other.p || self.precision != other.precision {
            return Err(PadicError::Mismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        Ok(self.with(self.residue as u128 + other.residue as u128))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        Ok(self.with(self.residue as u128 + self.modulus() as u128 - other.residue as u128))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.check(other)?;
        Ok(self.with(self.residue as u128 * other.residue as u128))
    }

    pub fn neg(&self) -> Self {
        self.with(self.modulus() as u128 - self.residue as u128)
    }

    pub fn pow(&self, e: u64) -> Self {
        self.with(arith::pow_mod(self.residue, e, self.modulus()) as u128)
    }

    pub fn is_unit(&self) -> bool {
        !self.residue.is_multiple_of(self.p)
    }

    pub fn inv(&self) -> Result<Self, PadicError> {
        arith::inv_mod(self.residue, self.modulus())
            .map(|r| self.with(r as u128))
            .ok_or(PadicError::NotUnit(self.residue))
    }

    /// `p`-adic valuation, or `None` if the value is zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.residue == 0 {
            return None;
        }
        let mut v = 0;
        let mut r = self.residue;
        while r.is_multiple_of(self.p) {
            r /= self.p;
            v += 1;
        }
        Some(v)
    }

    /// Reduces to a lower precision.
    pub fn truncate(&self, precision: u32) -> Self {
        assert!(precision <= self.precision);
        let m = self.p.pow(precision);
        Self { p: self.p, precision, residue: self.residue % m }
    }
}

/// `num / den` in `Z_p / p^K`.
pub fn pad_from_rational(num: i64, den: i64, p: u64, precision: u32) -> Result<PadicInt, PadicError> {
    if den.rem_euclid(p as i64) == 0 {
        return Err(PadicError::NonUnitDenominator { den, p });
    }
    let d = PadicInt::new(p, precision, den as i128)?;
    PadicInt::new(p, precision, num as i128)?.mul(&d.inv()?)
}

/// `Gamma_p(k) = (-1)^k prod_{0 < t < k, p ∤ t} t`, reduced modulo `m`.
pub fn gamma_natural(k: u64, p: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    for t in 1..k {
        if t % p != 0 {
            acc = acc * (t % m) as u128 % m as u128;
        }
    }
    let acc = acc as u64 % m;
    if k % 2 == 1 {
        (m - acc) % m
    } else {
        acc
    }
}

/// Morita's `Gamma_p` at `x`, evaluated at the natural representative of
/// `x mod p^K`. The result is well defined modulo `p^K` because `Gamma_p` is
/// locally constant to that depth for odd `p`.
pub fn gamma_p(x: &PadicInt) -> PadicInt {
    let m = x.modulus();
    PadicInt { residue: gamma_natural(x.residue, x.p, m), ..*x }
}

/// `Gamma_p(k) mod p^K` for every `k` in `[0, p^K)`, by one running product.
#[derive(Clone, Debug)]
pub struct GammaTable {
    p: u64,
    precision: u32,
    values: Vec<u64>,
}

impl GammaTable {
    pub fn new(p: u64, precision: u32) -> Result<Self, PadicError> {
        let m = arith::checked_pow(p, precision).ok_or(PadicError::PrecisionTooLarge { p, precision })?;
        let mut values = Vec::with_capacity(m as usize);
        let mut prod: u128 = 1;
        for k in 0..m {
            if k >= 2 && (k - 1) % p != 0 {
                prod = prod * (k - 1) as u128 % m as u128;
            }
            let v = prod as u64 % m;
            values.push(if k % 2 == 1 { (m - v) % m } else { v });
        }
        Ok(Self { p, precision, values })
    }

    pub fn get(&self, x: &PadicInt) -> PadicInt {
        assert_eq!((x.p, x.precision), (self.p, self.precision));
        PadicInt { residue: self.values[x.residue as usize], ..*x }
    }
}

/// A fractional part `<num/den>` with `den` prime to `p`, and its residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaArg {
    pub num: u64,
    pub den: u64,
    pub residue: PadicInt,
}

impl GammaArg {
    /// `<m / den>` = `(m mod den) / den`.
    pub fn fractional(m: u64, den: u64, p: u64, precision: u32) -> Result<Self, PadicError> {
        let num = m % den;
        let residue = pad_from_rational(num as i64, den as i64, p, precision)?;
        Ok(Self { num, den, residue })
    }
}

/// `(Z/p^K)[x]/(F)` with `F` the field modulus lifted to integers in `[0, p)`.
#[derive(Clone, Debug)]
pub struct UnramCtx {
    p: u64,
    n: usize,
    q: u64,
    precision: u32,
    modulus_pk: u64,
    lifted: Vec<u64>,
    gamma: GammaTable,
}

/// Element of [`UnramCtx`]: `n` coordinates mod `p^K`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnramElem {
    coords: Vec<u64>,
}

impl UnramElem {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl UnramCtx {
    pub fn new(field: &FieldCtx, precision: u32) -> Result<Self, PadicError> {
        let p = field.p();
        let modulus_pk =
            arith::checked_pow(p, precision).ok_or(PadicError::PrecisionTooLarge { p, precision })?;
        if precision == 0 {
            return Err(PadicError::PrecisionTooLow { needed: 1, got: 0 });
        }
        Ok(Self {
            p,
            n: field.n(),
            q: field.q(),
            precision,
            modulus_pk,
            lifted: field.modulus().to_vec(),
            gamma: GammaTable::new(p, precision)?,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^K`.
    pub fn modulus(&self) -> u64 {
        self.modulus_pk
    }

    pub fn lifted_modulus(&self) -> &[u64] {
        &self.lifted
    }

    pub fn padic(&self, v: i128) -> PadicInt {
        PadicInt::new(self.p, self.precision, v).expect("precision validated at construction")
    }

    pub fn zero(&self) -> UnramElem {
        UnramElem { coords: vec![0; self.n] }
    }

    pub fn from_padic(&self, c: &PadicInt) -> UnramElem {
        let mut coords = vec![0; self.n];
        coords[0] = c.residue % self.modulus_pk;
        UnramElem { coords }
    }

    pub fn from_int(&self, c: i128) -> UnramElem {
        self.from_padic(&self.padic(c))
    }

    pub fn one(&self) -> UnramElem {
        self.from_int(1)
    }

    /// Digit-wise lift of a field element.
    pub fn naive_lift(&self, a: &FFElem) -> UnramElem {
        UnramElem { coords: a.coeffs().to_vec() }
    }

    /// Reduction modulo `p`, as field coordinates.
    pub fn reduce(&self, u: &UnramElem) -> Vec<u64> {
        u.coords.iter().map(|c| c % self.p).collect()
    }

    pub fn add(&self, a: &UnramElem, b: &UnramElem) -> UnramElem {
        let m = self.modulus_pk;
        UnramElem { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| (x + y) % m).collect() }
    }

    pub fn sub(&self, a: &UnramElem, b: &UnramElem) -> UnramElem {
        let m = self.modulus_pk;
        UnramElem { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| (x + m - y) % m).collect() }
    }

    pub fn neg(&self, a: &UnramElem) -> UnramElem {
        self.sub(&self.zero(), a)
    }

    pub fn scale(&self, c: &PadicInt, a: &UnramElem) -> UnramElem {
        let m = self.modulus_pk as u128;
        let c = c.residue as u128;
        UnramElem { coords: a.coords.iter().map(|&x| (x as u128 * c % m) as u64).collect() }
    }

    pub fn mul(&self, a: &UnramElem, b: &UnramElem) -> UnramElem {
        let n = self.n;
        let m = self.modulus_pk as u128;
        let mut prod = vec![0u128; 2 * n - 1];
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % m;
            }
        }
        // x^n = -(F_0 + .. + F_{n-1} x^{n-1})
        for top in (n..2 * n - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            let shift = top - n;
            for (k, &f) in self.lifted[..n].iter().enumerate() {
                prod[shift + k] = (prod[shift + k] + (m - c) * f as u128) % m;
            }
            prod[top] = 0;
        }
        UnramElem { coords: prod[..n].iter().map(|&c| c as u64).collect() }
    }

    pub fn pow(&self, a: &UnramElem, mut e: u64) -> UnramElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// The value as an element of `Z_p` when all non-constant coordinates vanish.
    pub fn as_padic(&self, u: &UnramElem) -> Result<PadicInt, PadicError> {
        if let Some(index) = u.coords.iter().skip(1).position(|&c| c != 0) {
            return Err(PadicError::NotRational { index: index + 1 });
        }
        Ok(self.padic(u.coords[0] as i128))
    }
}

/// Teichmuller representative `omega(a)`: the `(q-1)`-th root of unity
/// congruent to `a` mod `p`, with `omega(0) = 0`. Obtained from the naive
/// lift by `K` applications of `y -> y^q`; each one gains a `p`-adic digit.
pub fn teich(uctx: &UnramCtx, a: &FFElem) -> UnramElem {
    let mut y = uctx.naive_lift(a);
    for _ in 0..uctx.precision {
        y = uctx.pow(&y, uctx.q);
    }
    y
}

/// `sum_{s in S} omega(a)^s`.
pub fn lifted_tau(uctx: &UnramCtx, set: &SubsetSpec, a: &FFElem) -> UnramElem {
    lifted_tau_at(uctx, set, &teich(uctx, a))
}

/// [`lifted_tau`] with the Teichmuller representative already computed.
/// Exponent `0` contributes `1` even when `omega = 0`.
pub fn lifted_tau_at(uctx: &UnramCtx, set: &SubsetSpec, omega: &UnramElem) -> UnramElem {
    set.exponents()
        .iter()
        .fold(uctx.zero(), |acc, &s| uctx.add(&acc, &uctx.pow(omega, s)))
}

/// `pi^{pi_exponent} * (-p)^{p_power} * unit`, with `pi^{p-1} = -p`.
///
/// `pi_exponent` stays in `[0, p-2]`; whole multiples of `p - 1` are carried
/// in `p_power` so the unit keeps full precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EisNormal {
    pub pi_exponent: u32,
    pub p_power: u32,
    pub unit: UnramElem,
}

impl EisNormal {
    /// `pi^e * unit`, folding `e` into normal form.
    pub fn new(uctx: &UnramCtx, e: u64, unit: UnramElem) -> Self {
        let r = uctx.p - 1;
        Self { pi_exponent: (e % r) as u32, p_power: (e / r) as u32, unit }
    }

    /// Total valuation in powers of `pi`.
    pub fn pi_valuation(&self, p: u64) -> u64 {
        self.pi_exponent as u64 + (p - 1) * self.p_power as u64
    }

    pub fn mul(&self, uctx: &UnramCtx, other: &Self) -> Self {
        let r = (uctx.p - 1) as u32;
        let e = self.pi_exponent + other.pi_exponent;
        Self {
            pi_exponent: e % r,
            p_power: self.p_power + other.p_power + e / r,
            unit: uctx.mul(&self.unit, &other.unit),
        }
    }

    /// `(-p)^{p_power} * unit`, the coefficient of `pi^{pi_exponent}`.
    pub fn coefficient(&self, uctx: &UnramCtx) -> UnramElem {
        let minus_p = uctx.padic(-(uctx.p as i128));
        uctx.scale(&minus_p.pow(self.p_power as u64), &self.unit)
    }
}

fn check_index(uctx: &UnramCtx, j: u64) -> Result<(), PadicError> {
    let max = uctx.q - 2;
    if j == 0 || j > max {
        return Err(PadicError::IndexOutOfRange { j, max });
    }
    Ok(())
}

/// The `n` gamma arguments `<p^i j / (q-1)>`.
pub fn gauss_gamma_args(uctx: &UnramCtx, j: u64) -> Result<Vec<GammaArg>, PadicError> {
    check_index(uctx, j)?;
    let den = uctx.q - 1;
    let mut shifted = j;
    (0..uctx.n)
        .map(|_| {
            let arg = GammaArg::fractional(shifted, den, uctx.p, uctx.precision);
            shifted = (shifted as u128 * uctx.p as u128 % den as u128) as u64;
            arg
        })
        .collect()
}

/// Gauss sum `g(j)` in normal form via the Gross-Koblitz formula.
pub fn gauss_gk(uctx: &UnramCtx, j: u64) -> Result<EisNormal, PadicError> {
    let args = gauss_gamma_args(uctx, j)?;
    let unit = args
        .iter()
        .try_fold(uctx.padic(1), |acc, arg| acc.mul(&uctx.gamma.get(&arg.residue)))?;
    Ok(EisNormal::new(uctx, weight_p(j, uctx.p), uctx.from_padic(&unit)))
}

fn require_ternary_cube(uctx: &UnramCtx) -> Result<(), PadicError> {
    if uctx.p != 3 || uctx.n < 3 {
        return Err(PadicError::NeedsTernaryCube { p: uctx.p, n: uctx.n });
    }
    if uctx.precision < 3 {
        return Err(PadicError::PrecisionTooLow { needed: 3, got: uctx.precision });
    }
    Ok(())
}

/// `g(j)^2 mod 27` for `p = 3`, using `pi^2 = -3`.
pub fn gauss_sq_mod27(uctx: &UnramCtx, j: u64) -> Result<PadicInt, PadicError> {
    require_ternary_cube(uctx)?;
    let g = gauss_gk(uctx, j)?;
    let sq = g.mul(uctx, &g);
    // p = 3: pi_exponent of a square is 0, so the coefficient is the value.
    debug_assert_eq!(sq.pi_exponent, 0);
    let value = uctx.as_padic(&sq.coefficient(uctx))?;
    Ok(value.truncate(3))
}

/// The Stickelberger unit congruence
/// `prod_i Gamma_p(<p^i j/(q-1)>) == (j_0! ... j_{n-1}!)^{-1} (mod p)`.
pub fn stickelberger_check(uctx: &UnramCtx, j: u64) -> Result<CongruenceReport, PadicError> {
    let g = gauss_gk(uctx, j)?;
    let p = uctx.p;
    let unit = uctx.as_padic(&g.unit)?;
    let digit_factorials = arith::digits(j, p)
        .into_iter()
        .map(|d| (1..=d).product::<u64>() % p)
        .fold(1u64, |acc, f| acc * f % p);
    let rhs = arith::inv_mod(digit_factorials, p).expect("digit factorials are prime to p");
    Ok(CongruenceReport::new(
        CheckId::Stickelberger,
        (unit.residue % p) as i64,
        rhs as i64,
        Some(p),
        Witness::Exponent(j),
    ))
}

/// Expected `g(j)^2 mod 27` by `wt_3(j)`: 6, 9, or 0.
pub fn wt1_expected(weight: u64) -> u64 {
    match weight {
        1 => 6,
        2 => 9,
        _ => 0,
    }
}

pub fn wt1_check(uctx: &UnramCtx, j: u64) -> Result<CongruenceReport, PadicError> {
    let sq = gauss_sq_mod27(uctx, j)?;
    let expected = wt1_expected(weight_p(j, 3));
    Ok(CongruenceReport::new(CheckId::Wt1, sq.residue as i64, expected as i64, Some(27), Witness::Exponent(j)))
}

/// Precomputed data for the `p = 3` Fourier expansion
/// `K_q(a) == -sum_{j=1}^{q-2} g(j)^2 omega(a)^j (mod 27)`.
#[derive(Debug)]
pub struct FourierCheck<'a> {
    uctx: &'a UnramCtx,
    gauss_squares: Vec<PadicInt>,
    w: SubsetSpec,
    x: SubsetSpec,
}

impl<'a> FourierCheck<'a> {
    pub fn new(uctx: &'a UnramCtx, field: &FieldCtx) -> Result<Self, PadicError> {
        require_ternary_cube(uctx)?;
        let gauss_squares = (1..=uctx.q - 2)
            .map(|j| gauss_sq_mod27(uctx, j).map(|v| uctx.padic(v.residue as i128)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            uctx,
            gauss_squares,
            w: build_subset(field, SubsetKind::W)?,
            x: build_subset(field, SubsetKind::X)?,
        })
    }

    /// `-sum_j g(j)^2 omega(a)^j mod 27`, which must lie in `Z_3`.
    pub fn fourier_sum(&self, a: &FFElem) -> Result<u64, PadicError> {
        let uctx = self.uctx;
        let omega = teich(uctx, a);
        let mut power = omega.clone();
        let mut acc = uctx.zero();
        for g2 in &self.gauss_squares {
            acc = uctx.add(&acc, &uctx.scale(g2, &power));
            power = uctx.mul(&power, &omega);
        }
        let value = uctx.as_padic(&uctx.neg(&acc))?;
        Ok(value.truncate(3).residue)
    }

    /// `21 Tr^(a) + 18 tau^_X(a) mod 27` from the lifted power sums.
    pub fn lifted_formula(&self, a: &FFElem) -> Result<u64, PadicError> {
        let uctx = self.uctx;
        let omega = teich(uctx, a);
        let tr = uctx.as_padic(&lifted_tau_at(uctx, &self.w, &omega))?;
        let tx = uctx.as_padic(&lifted_tau_at(uctx, &self.x, &omega))?;
        let v = uctx.padic(21).mul(&tr)?.add(&uctx.padic(18).mul(&tx)?)?;
        Ok(v.truncate(3).residue)
    }
}

/// Compares the Fourier expansion at `a` against the exact Kloosterman sum
/// (first report) and against the lifted-trace formula (second report).
pub fn fourier_kloosterman_mod(
    check: &FourierCheck<'_>,
    exact: &KloosEngine<'_>,
    a: &FFElem,
) -> Result<[CongruenceReport; 2], PadicError> {
    let sum = check.fourier_sum(a)? as i64;
    let k = exact.kloosterman(a).as_integer().unwrap_or_default();
    let k27 = crate::cyclo::mod_floor(&k, &BigInt::from(27));
    let k27: i64 = k27.try_into().expect("residue below 27");
    let lifted = check.lifted_formula(a)? as i64;
    Ok([
        CongruenceReport::new(CheckId::Fourier, sum, k27, Some(27), Witness::element(a)),
        CongruenceReport::new(CheckId::Fourier, sum, lifted, Some(27), Witness::element(a)),
    ])
}

/// Algebraic identities between the power sums at `a` for `p = 3`, `n >= 3`:
/// the cube of the lifted trace, `Tr * tau_X = Tr + 2 tau_Z`, and reduction
/// of each lifted sum to its field counterpart. `lhs` counts violations.
pub fn identity_check(
    uctx: &UnramCtx,
    field: &FieldCtx,
    sets: &TernarySubsets,
    a: &FFElem,
) -> Result<CongruenceReport, PadicError> {
    require_ternary_cube(uctx)?;
    let omega = teich(uctx, a);
    let lifted: Vec<UnramElem> = sets.all().iter().map(|s| lifted_tau_at(uctx, s, &omega)).collect();
    let (tr_hat, y_hat, z_hat) = (&lifted[0], &lifted[2], &lifted[3]);
    let mut violations = 0;

    let cube = uctx.mul(&uctx.mul(tr_hat, tr_hat), tr_hat);
    let rhs = uctx.add(
        &uctx.add(tr_hat, &uctx.scale(&uctx.padic(3), z_hat)),
        &uctx.scale(&uctx.padic(6), y_hat),
    );
    violations += i64::from(cube != rhs);

    let tr = field.trace(a);
    let tx = tau(field, &sets.x, a)?;
    let tz = tau(field, &sets.z, a)?;
    violations += i64::from(tr * tx % 3 != (tr + 2 * tz) % 3);

    for (set, hat) in sets.all().iter().zip(&lifted) {
        let mut expected = vec![0; field.n()];
        expected[0] = tau(field, set, a)?;
        violations += i64::from(uctx.reduce(hat) != expected);
    }
    Ok(CongruenceReport::new(CheckId::Identities, violations, 0, None, Witness::element(a)))
}

/// The sets `W, X, Y, Z` for a ternary field with `n >= 3`.
#[derive(Clone, Debug)]
pub struct TernarySubsets {
    pub w: SubsetSpec,
    pub x: SubsetSpec,
    pub y: SubsetSpec,
    pub z: SubsetSpec,
}

impl TernarySubsets {
    pub fn new(field: &FieldCtx) -> Result<Self, FieldError> {
        Ok(Self {
            w: build_subset(field, SubsetKind::W)?,
            x: build_subset(field, SubsetKind::X)?,
            y: build_subset(field, SubsetKind::Y)?,
            z: build_subset(field, SubsetKind::Z)?,
        })
    }

    fn all(&self) -> [&SubsetSpec; 4] {
        [&self.w, &self.x, &self.y, &self.z]
    }
}

/// Teichmuller representatives of every field element, in index order.
pub fn teich_table(uctx: &UnramCtx, field: &FieldCtx) -> Vec<UnramElem> {
    field.elements().map(|a| teich(uctx, &a)).collect()
}

/// Teichmuller sanity at `a`: `omega(a)^{q-1} = 1` for `a != 0`,
/// `omega(a) == a (mod p)`, and `omega(a b) = omega(a) omega(b)` for every
/// `b`. `lhs` counts violations.
pub fn teich_check(
    uctx: &UnramCtx,
    field: &FieldCtx,
    table: &[UnramElem],
    a: &FFElem,
) -> CongruenceReport {
    let ia = field.index_of(a) as usize;
    let wa = &table[ia];
    let mut violations = 0i64;
    if !a.is_zero() && uctx.pow(wa, uctx.q - 1) != uctx.one() {
        violations += 1;
    }
    if uctx.reduce(wa) != a.coeffs() {
        violations += 1;
    }
    for (ib, wb) in table.iter().enumerate() {
        let b = field.from_index(ib as u64);
        let iab = field.index_of(&field.mul(a, &b)) as usize;
        if table[iab] != uctx.mul(wa, wb) {
            violations += 1;
        }
    }
    CongruenceReport::new(CheckId::Identities, violations, 0, None, Witness::element(a))
}
