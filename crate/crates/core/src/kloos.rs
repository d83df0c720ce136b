//! Kloosterman sums `K_q(a) = sum_x zeta^{Tr(x^{-1} + a x)}` as exact
//! cyclotomic integers, together with their conjugates, characteristic and
//! minimal polynomials, and the congruence checks stated in terms of them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::{mod_floor, product_linear, CycInt, CycloError, IntPolynomial};
use crate::ff::{build_subset, legendre, tau, FFElem, FieldCtx, FieldError, SubsetKind, SubsetSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KloosError {
    #[error("check `{check}` is not available for F_{{{p}^{n}}}: {reason}")]
    Unsupported { check: CheckId, p: u64, n: usize, reason: &'static str },
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Identifies one of the verifiable statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckId {
    Thm1,
    Mod9,
    Mod27,
    Stickelberger,
    Wt1,
    Fourier,
    Moisio,
    Wan,
    Weil,
    Identities,
    Spectrum,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        CheckId::Thm1,
        CheckId::Mod9,
        CheckId::Mod27,
        CheckId::Stickelberger,
        CheckId::Wt1,
        CheckId::Fourier,
        CheckId::Moisio,
        CheckId::Wan,
        CheckId::Weil,
        CheckId::Identities,
        CheckId::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Thm1 => "thm1",
            CheckId::Mod9 => "mod9",
            CheckId::Mod27 => "mod27",
            CheckId::Stickelberger => "stickelberger",
            CheckId::Wt1 => "wt1",
            CheckId::Fourier => "fourier",
            CheckId::Moisio => "moisio",
            CheckId::Wan => "wan",
            CheckId::Weil => "weil",
            CheckId::Identities => "identities",
            CheckId::Spectrum => "spectrum",
        }
    }
}

impl std::fmt::Display for CheckId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CheckId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check `{s}`"))
    }
}

/// What a report was evaluated at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    /// Field element coordinates, constant term first.
    Element(Vec<u64>),
    /// Gauss sum index `j`.
    Exponent(u64),
    /// A whole-field aggregate.
    Field,
}

impl Witness {
    pub fn element(a: &FFElem) -> Self {
        Witness::Element(a.coeffs().to_vec())
    }
}

/// One evaluated statement `lhs == rhs (mod modulus)`.
///
/// `modulus == None` means the two sides are compared as integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub subject: CheckId,
    pub lhs: i64,
    pub rhs: i64,
    pub modulus: Option<u64>,
    pub pass: bool,
    pub witness: Witness,
}

impl CongruenceReport {
    pub fn new(subject: CheckId, lhs: i64, rhs: i64, modulus: Option<u64>, witness: Witness) -> Self {
        Self { subject, lhs, rhs, modulus, pass: lhs == rhs, witness }
    }
}

/// Exponent frequencies `N_t = #{x : Tr(x^{-1} + a x) = t}` and the value
/// `sum_t N_t zeta^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KloostermanValue {
    counts: Vec<u64>,
    value: CycInt,
}

impl KloostermanValue {
    fn from_counts(p: u64, counts: Vec<u64>) -> Self {
        let value = CycInt::from_exponent_counts(p, &counts);
        Self { counts, value }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn value(&self) -> &CycInt {
        &self.value
    }

    /// The sum as a rational integer, when it is one (always for `p = 3`).
    pub fn as_integer(&self) -> Option<BigInt> {
        self.value.as_rational()
    }

    /// Real value under `zeta -> exp(2 pi i / p)`. Kloosterman sums are real.
    pub fn to_f64(&self) -> f64 {
        let p = self.counts.len() as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(t, &c)| c as f64 * (2.0 * std::f64::consts::PI * t as f64 / p).cos())
            .sum()
    }
}

/// Direct evaluation: one pass over `x` using the field inverse and trace.
pub fn kloosterman(ctx: &FieldCtx, a: &FFElem) -> KloostermanValue {
    let p = ctx.p();
    let mut counts = vec![0u64; p as usize];
    for x in ctx.elements() {
        let arg = ctx.add(&ctx.inv(&x), &ctx.mul(a, &x));
        counts[ctx.trace(&arg) as usize] += 1;
    }
    KloostermanValue::from_counts(p, counts)
}

/// Characteristic and minimal polynomial of `K_q(a)` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinPolyResult {
    pub min_poly: IntPolynomial,
    pub multiplicity: u32,
    pub char_poly: IntPolynomial,
}

/// Precomputed tables for evaluating many Kloosterman sums over one field.
///
/// Stores `Tr(x^{-1})` for every `x`; `Tr(a x)` is then assembled from the
/// `n` values `Tr(a x^i)` by linearity. Shareable across threads.
#[derive(Debug)]
pub struct KloosEngine<'a> {
    ctx: &'a FieldCtx,
    inv_trace: Vec<u8>,
    ternary_sets: Option<TernarySets>,
}

#[derive(Debug)]
struct TernarySets {
    x: SubsetSpec,
    y: SubsetSpec,
}

impl<'a> KloosEngine<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        assert!(ctx.p() < 256, "trace table stores residues as u8");
        let inv_trace = ctx.elements().map(|x| ctx.trace(&ctx.inv(&x)) as u8).collect();
        let ternary_sets = (ctx.p() == 3 && ctx.n() >= 3).then(|| TernarySets {
            x: build_subset(ctx, SubsetKind::X).expect("p = 3"),
            y: build_subset(ctx, SubsetKind::Y).expect("p = 3, n >= 3"),
        });
        Self { ctx, inv_trace, ternary_sets }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn kloosterman(&self, a: &FFElem) -> KloostermanValue {
        let ctx = self.ctx;
        let p = ctx.p();
        let n = ctx.n();
        // Tr(a * x^i) for the basis elements x^i
        let basis_traces: Vec<u64> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                ctx.trace(&ctx.mul(a, &ctx.element(&e).expect("basis element")))
            })
            .collect();
        let mut counts = vec![0u64; p as usize];
        let mut digits = vec![0u64; n];
        let mut lin = 0u64;
        for &it in &self.inv_trace {
            counts[((it as u64 + lin) % p) as usize] += 1;
            // advance the odometer, keeping lin = sum digits[i] * basis_traces[i]
            for (d, bt) in digits.iter_mut().zip(&basis_traces) {
                *d += 1;
                lin = (lin + bt) % p;
                if *d < p {
                    break;
                }
                *d = 0;
            }
        }
        KloostermanValue::from_counts(p, counts)
    }

    /// `K_q(i^2 a)` for `i = 1..=(p-1)/2`, each by its own summation.
    pub fn conjugate_family(&self, a: &FFElem) -> Vec<KloostermanValue> {
        let p = self.ctx.p();
        (1..=(p - 1) / 2).map(|i| self.kloosterman(&self.ctx.scale(i * i % p, a))).collect()
    }

    pub fn char_poly(&self, a: &FFElem) -> Result<IntPolynomial, KloosError> {
        let roots: Vec<CycInt> = self.conjugate_family(a).into_iter().map(|k| k.value).collect();
        Ok(product_linear(&roots)?)
    }

    pub fn min_poly(&self, a: &FFElem) -> Result<MinPolyResult, KloosError> {
        let family: Vec<CycInt> = self.conjugate_family(a).into_iter().map(|k| k.value).collect();
        let half = family.len();
        let char_poly = product_linear(&family)?;
        let mut distinct: Vec<CycInt> = Vec::new();
        for v in family {
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
        if !half.is_multiple_of(distinct.len()) {
            return Err(KloosError::Internal(format!(
                "{} distinct conjugates do not divide {half}",
                distinct.len()
            )));
        }
        let multiplicity = (half / distinct.len()) as u32;
        let min_poly = product_linear(&distinct)?;
        if min_poly.pow(multiplicity) != char_poly {
            return Err(KloosError::Internal(format!(
                "characteristic polynomial {char_poly} is not ({min_poly})^{multiplicity}"
            )));
        }
        Ok(MinPolyResult { min_poly, multiplicity, char_poly })
    }

    /// `prod_i K_q(i^2 a) == p * (Tr(a)/p)  (mod p^2)`.
    pub fn check_thm1(&self, a: &FFElem) -> Result<CongruenceReport, KloosError> {
        let p = self.ctx.p();
        let p2 = BigInt::from(p * p);
        let product = self
            .conjugate_family(a)
            .iter()
            .fold(CycInt::from_int(p, 1), |acc, k| &acc * k.value());
        let product = product
            .as_rational()
            .ok_or_else(|| KloosError::Internal("product of conjugates is not rational".into()))?;
        let lhs = residue_i64(&product, &p2);
        let symbol = legendre(self.ctx.trace(a) as i64, p);
        let rhs = residue_i64(&BigInt::from(p as i64 * symbol as i64), &p2);
        Ok(CongruenceReport::new(CheckId::Thm1, lhs, rhs, Some(p * p), Witness::element(a)))
    }

    /// Ternary table: `K ≡ 0, 3, 6 (mod 9)` for `Tr(a) = 0, 1, 2`.
    pub fn check_mod9(&self, a: &FFElem) -> Result<CongruenceReport, KloosError> {
        let ctx = self.ctx;
        if ctx.p() != 3 || ctx.n() < 2 {
            return Err(self.unsupported(CheckId::Mod9, "needs p = 3 and n > 1"));
        }
        let k = self.integer_value(a)?;
        let lhs = residue_i64(&k, &BigInt::from(9));
        let rhs = 3 * ctx.trace(a) as i64;
        Ok(CongruenceReport::new(CheckId::Mod9, lhs, rhs, Some(9), Witness::element(a)))
    }

    /// Ternary mod-27 characterisation: compares `K mod 27` against the
    /// polynomial expression in `Tr`, `tau_X`, `tau_Y` and, separately,
    /// against the nine-row case table.
    pub fn check_mod27(&self, a: &FFElem) -> Result<CongruenceReport, KloosError> {
        let ctx = self.ctx;
        let sets = match (&self.ternary_sets, ctx.p(), ctx.n()) {
            (Some(s), 3, n) if n >= 3 => s,
            _ => return Err(self.unsupported(CheckId::Mod27, "needs p = 3 and n >= 3")),
        };
        let k = self.integer_value(a)?;
        let lhs = residue_i64(&k, &BigInt::from(27));
        let tr = ctx.trace(a);
        let tx = tau(ctx, &sets.x, a)?;
        let ty = tau(ctx, &sets.y, a)?;
        let formula = mod27_formula(tr, tx, ty);
        let table = mod27_table(tr, tx, ty);
        if formula != table {
            return Err(KloosError::Internal(format!(
                "mod-27 formula gives {formula} but the case table gives {table} at Tr={tr}, tau_X={tx}, tau_Y={ty}"
            )));
        }
        Ok(CongruenceReport::new(CheckId::Mod27, lhs, formula as i64, Some(27), Witness::element(a)))
    }

    /// The minimal polynomial is `x^t` modulo `p`: lhs counts the non-leading
    /// coefficients not divisible by `p`.
    pub fn check_moisio(&self, a: &FFElem) -> Result<CongruenceReport, KloosError> {
        let p = BigInt::from(self.ctx.p());
        let m = self.min_poly(a)?.min_poly;
        let reduced = m.reduce_mod(&p);
        let bad = reduced[..reduced.len() - 1].iter().filter(|c| !c.is_zero()).count() as i64;
        Ok(CongruenceReport::new(CheckId::Moisio, bad, 0, None, Witness::element(a)))
    }

    /// `Tr(a) != 0` forces degree `(p-1)/2` and multiplicity 1. `lhs` is the
    /// degree of the minimal polynomial, or 0 if the multiplicity exceeds 1.
    /// For `Tr(a) = 0` nothing is claimed and `rhs` mirrors `lhs`.
    pub fn check_wan(&self, a: &FFElem) -> Result<CongruenceReport, KloosError> {
        let half = ((self.ctx.p() - 1) / 2) as i64;
        let r = self.min_poly(a)?;
        let degree = r.min_poly.degree().unwrap_or(0) as i64;
        let observed = if r.multiplicity == 1 { degree } else { 0 };
        let expected = if self.ctx.trace(a) != 0 { half } else { observed };
        Ok(CongruenceReport::new(CheckId::Wan, observed, expected, None, Witness::element(a)))
    }

    /// Weil bound; see [`weil_report`].
    pub fn check_weil(&self, a: &FFElem) -> CongruenceReport {
        let k = self.kloosterman(a);
        weil_report(self.ctx, &k, Witness::element(a))
    }

    fn integer_value(&self, a: &FFElem) -> Result<BigInt, KloosError> {
        self.kloosterman(a)
            .as_integer()
            .ok_or_else(|| KloosError::Internal("ternary Kloosterman sum is not rational".into()))
    }

    fn unsupported(&self, check: CheckId, reason: &'static str) -> KloosError {
        KloosError::Unsupported { check, p: self.ctx.p(), n: self.ctx.n(), reason }
    }

    /// Frequencies of each Kloosterman value over all `a in F_q`.
    pub fn spectrum(&self) -> BTreeMap<SpectrumKey, u64> {
        let mut out = BTreeMap::new();
        for a in self.ctx.elements() {
            *out.entry(SpectrumKey::of(self.kloosterman(&a).value())).or_insert(0) += 1;
        }
        out
    }
}

/// Weil-bound report for an already computed sum. `lhs` is 0 when the bound
/// holds and 1 when it fails.
///
/// The `x = 0` term contributes exactly 1, so the classical estimate reads
/// `|K - 1| <= 2 sqrt(q)`. For `p = 3` the sum is an integer and the sharper
/// `K^2 <= 4q` is also required.
pub fn weil_report(ctx: &FieldCtx, k: &KloostermanValue, witness: Witness) -> CongruenceReport {
    let q = ctx.q();
    let bound = 2.0 * (q as f64).sqrt();
    let mut holds = match k.as_integer() {
        Some(v) => {
            let shifted = &v - 1;
            &shifted * &shifted <= BigInt::from(4 * q)
        }
        None => (k.to_f64() - 1.0).abs() <= bound + 1e-9,
    };
    if ctx.p() == 3 {
        let v = k.as_integer().unwrap_or_default();
        holds &= &v * &v <= BigInt::from(4 * q);
    }
    CongruenceReport::new(CheckId::Weil, i64::from(!holds), 0, None, witness)
}

fn residue_i64(v: &BigInt, m: &BigInt) -> i64 {
    mod_floor(v, m).to_i64().expect("residue fits in i64")
}

/// `21 T^3 + 18 T + 18 X + 9 T X + 9 Y (mod 27)` with `T, X, Y` in `{0, 1, 2}`
/// read as integers.
pub fn mod27_formula(tr: u64, tau_x: u64, tau_y: u64) -> u64 {
    (21 * tr.pow(3) + 18 * tr + 18 * tau_x + 9 * tr * tau_x + 9 * tau_y) % 27
}

/// The nine-row case table for ternary sums modulo 27.
pub fn mod27_table(tr: u64, tau_x: u64, tau_y: u64) -> u64 {
    match tr {
        0 => match (tau_y + 2 * tau_x) % 3 {
            0 => 0,
            1 => 9,
            _ => 18,
        },
        1 => match tau_y % 3 {
            2 => 3,
            0 => 12,
            _ => 21,
        },
        _ => match (tau_y + tau_x) % 3 {
            2 => 6,
            0 => 15,
            _ => 24,
        },
    }
}

/// Key for [`KloosEngine::spectrum`]: the integer value when the sum is
/// rational, the basis coordinates otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpectrumKey {
    Integer(BigInt),
    Coords(Vec<BigInt>),
}

impl SpectrumKey {
    pub fn of(v: &CycInt) -> Self {
        match v.as_rational() {
            Some(r) if v.p() == 3 => SpectrumKey::Integer(r),
            _ => SpectrumKey::Coords(v.coords().to_vec()),
        }
    }

    pub fn to_cyc(&self, p: u64) -> CycInt {
        match self {
            SpectrumKey::Integer(r) => CycInt::from_int(p, r.clone()),
            SpectrumKey::Coords(c) => CycInt::from_coords(p, c.clone()),
        }
    }
}

impl std::fmt::Display for SpectrumKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectrumKey::Integer(r) => write!(f, "{r}"),
            SpectrumKey::Coords(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}

/// `sum_a K_q(a)` from a spectrum; equals `q` by orthogonality.
pub fn spectrum_checksum(p: u64, spectrum: &BTreeMap<SpectrumKey, u64>) -> CycInt {
    spectrum.iter().fold(CycInt::zero(p), |acc, (key, &count)| {
        &acc + &(&key.to_cyc(p) * &CycInt::from_int(p, count))
    })
}

pub fn conjugate_family(ctx: &FieldCtx, a: &FFElem) -> Vec<KloostermanValue> {
    KloosEngine::new(ctx).conjugate_family(a)
}

pub fn char_poly(ctx: &FieldCtx, a: &FFElem) -> Result<IntPolynomial, KloosError> {
    KloosEngine::new(ctx).char_poly(a)
}

pub fn min_poly(ctx: &FieldCtx, a: &FFElem) -> Result<MinPolyResult, KloosError> {
    KloosEngine::new(ctx).min_poly(a)
}

pub fn check_thm1(ctx: &FieldCtx, a: &FFElem) -> Result<CongruenceReport, KloosError> {
    KloosEngine::new(ctx).check_thm1(a)
}

pub fn check_mod9(ctx: &FieldCtx, a: &FFElem) -> Result<CongruenceReport, KloosError> {
    KloosEngine::new(ctx).check_mod9(a)
}

pub fn check_mod27(ctx: &FieldCtx, a: &FFElem) -> Result<CongruenceReport, KloosError> {
    KloosEngine::new(ctx).check_mod27(a)
}

pub fn spectrum(ctx: &FieldCtx) -> BTreeMap<SpectrumKey, u64> {
    KloosEngine::new(ctx).spectrum()
}
