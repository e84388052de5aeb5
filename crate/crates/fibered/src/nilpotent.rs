//! Finite p-group witnesses through the Magnus embedding: evaluation of free
//! group words in the truncated free associative algebra, lower-central-series
//! class detection, central elements of prescribed prime-power order, and the
//! central-split certificate for finite central fibers.
//!
//! The embedding sends `x_i` to `1 + X_i` and `x_i^-1` to the truncated
//! geometric series. Truncating at the class `c` of a word `g` leaves
//! `image(g) = 1 + u` with `u` homogeneous of top degree, so `u^2` vanishes,
//! powers are `1 + t u`, and the image is central among the generator images;
//! the order over `Z/p^m` is then exactly `p^(m - v)` where `v` is the least
//! p-adic valuation of the coefficients of `u`. All of these facts are
//! verified numerically on every constructed witness rather than assumed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seifert::{BaseKind, SeifertPresentation};
use crate::words::{free_reduce, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NilpotentError {
    #[error("trivial word rejected")]
    TrivialWord,
    #[error("word has no nonzero term up to degree {0}; raise the class cap")]
    ClassCapExceeded(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("order exponent k must be >= 1")]
    BadExponent,
    #[error("reduction target must satisfy 1 <= target_k <= {0}")]
    BadReductionTarget(u32),
    #[error("central split requires {0}")]
    SplitPrecondition(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

/// Parameters of a truncated group-algebra quotient: rank-many generators,
/// monomials of degree <= class, coefficients mod prime^exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagnusParams {
    pub rank: usize,
    pub class: usize,
    pub prime: u64,
    pub exponent: u32,
}

/// Sparse element of the truncated free associative algebra: coefficients
/// indexed by monomials (sequences of generator indices). Zero coefficients
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedPoly {
    coeffs: BTreeMap<Vec<u8>, BigInt>,
}

impl TruncatedPoly {
    pub fn zero() -> Self {
        TruncatedPoly { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(Vec::new(), BigInt::one());
        TruncatedPoly { coeffs }
    }

    pub fn from_terms(terms: Vec<(Vec<u8>, BigInt)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (m, c) in terms {
            if !c.is_zero() {
                *coeffs.entry(m).or_insert_with(BigInt::zero) += c;
            }
        }
        coeffs.retain(|_, c: &mut BigInt| !c.is_zero());
        TruncatedPoly { coeffs }
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&Vec::new()).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, monomial: &[u8]) -> BigInt {
        self.coeffs.get(monomial).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Least total degree with a nonzero coefficient, ignoring the constant
    /// term. `None` when the element is constant.
    pub fn min_positive_degree(&self) -> Option<usize> {
        self.coeffs.keys().filter(|m| !m.is_empty()).map(|m| m.len()).min()
    }

    /// The non-constant part.
    pub fn augmentation(&self) -> TruncatedPoly {
        let coeffs = self.coeffs.iter().filter(|(m, _)| !m.is_empty()).map(|(m, c)| (m.clone(), c.clone())).collect();
        TruncatedPoly { coeffs }
    }
}

/// Evaluation context: rank, truncation class, optional coefficient modulus.
#[derive(Debug, Clone)]
pub struct MagnusAlgebra {
    pub rank: usize,
    pub class: usize,
    pub modulus: Option<BigInt>,
}

impl MagnusAlgebra {
    /// Exact integer coefficients; used for class detection, where a modulus
    /// could produce false zeros.
    pub fn exact(rank: usize, class: usize) -> Self {
        MagnusAlgebra { rank, class, modulus: None }
    }

    pub fn modular(rank: usize, class: usize, prime: u64, exponent: u32) -> Self {
        let modulus = BigInt::from(prime).pow(exponent);
        MagnusAlgebra { rank, class, modulus: Some(modulus) }
    }

    pub fn for_params(params: &MagnusParams) -> Self {
        Self::modular(params.rank, params.class, params.prime, params.exponent)
    }

    fn reduce(&self, poly: &mut TruncatedPoly) {
        match &self.modulus {
            None => poly.coeffs.retain(|_, c| !c.is_zero()),
            Some(m) => {
                let mut out = BTreeMap::new();
                for (mono, c) in std::mem::take(&mut poly.coeffs) {
                    let r = c.mod_floor(m);
                    if !r.is_zero() {
                        out.insert(mono, r);
                    }
                }
                poly.coeffs = out;
            }
        }
    }

    pub fn mul(&self, a: &TruncatedPoly, b: &TruncatedPoly) -> TruncatedPoly {
        let mut coeffs: BTreeMap<Vec<u8>, BigInt> = BTreeMap::new();
        for (ma, ca) in &a.coeffs {
            for (mb, cb) in &b.coeffs {
                if ma.len() + mb.len() > self.class {
                    continue;
                }
                let mut mono = ma.clone();
                mono.extend_from_slice(mb);
                let term = ca * cb;
                *coeffs.entry(mono).or_insert_with(BigInt::zero) += term;
            }
        }
        let mut out = TruncatedPoly { coeffs };
        self.reduce(&mut out);
        out
    }

    pub fn add(&self, a: &TruncatedPoly, b: &TruncatedPoly) -> TruncatedPoly {
        let mut coeffs = a.coeffs.clone();
        for (m, c) in &b.coeffs {
            *coeffs.entry(m.clone()).or_insert_with(BigInt::zero) += c;
        }
        let mut out = TruncatedPoly { coeffs };
        self.reduce(&mut out);
        out
    }

    pub fn pow(&self, a: &TruncatedPoly, e: u64) -> TruncatedPoly {
        let mut out = TruncatedPoly::one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        out
    }

    /// Image of a single signed generator: `1 + X` or the truncated
    /// geometric series `1 - X + X^2 - ...`.
    pub fn letter_image(&self, l: Letter) -> TruncatedPoly {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(Vec::new(), BigInt::one());
        if !l.inverted {
            if self.class >= 1 {
                coeffs.insert(vec![l.index as u8], BigInt::one());
            }
        } else {
            for d in 1..=self.class {
                let sign = if d % 2 == 1 { BigInt::from(-1) } else { BigInt::one() };
                coeffs.insert(vec![l.index as u8; d], sign);
            }
        }
        let mut out = TruncatedPoly { coeffs };
        self.reduce(&mut out);
        out
    }

    /// The Magnus evaluation of a word; multiplicative by construction.
    pub fn eval(&self, w: &Word) -> TruncatedPoly {
        let mut out = TruncatedPoly::one();
        for &l in w.letters() {
            out = self.mul(&out, &self.letter_image(l));
        }
        out
    }

    pub fn commutes(&self, a: &TruncatedPoly, b: &TruncatedPoly) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Inverse of a unit `1 + n` with `n` of positive degree, via the
    /// truncated Neumann series `1 - n + n^2 - ...`.
    pub fn unit_inverse(&self, a: &TruncatedPoly) -> Option<TruncatedPoly> {
        if !a.coefficient(&[]).is_one() {
            return None;
        }
        let n = a.augmentation();
        let mut out = TruncatedPoly::one();
        let mut power = TruncatedPoly::one();
        for d in 1..=self.class {
            power = self.mul(&power, &n);
            let signed = if d % 2 == 1 { self.negate(&power) } else { power.clone() };
            out = self.add(&out, &signed);
        }
        Some(out)
    }

    pub fn negate(&self, a: &TruncatedPoly) -> TruncatedPoly {
        let coeffs = a.coeffs.iter().map(|(m, c)| (m.clone(), -c)).collect();
        let mut out = TruncatedPoly { coeffs };
        self.reduce(&mut out);
        out
    }

    /// Evaluates a word through explicit generator images (units of the
    /// algebra); inverse letters go through `unit_inverse`.
    pub fn eval_with(&self, images: &[TruncatedPoly], w: &Word) -> Option<TruncatedPoly> {
        let mut out = TruncatedPoly::one();
        for &l in w.letters() {
            let img = images.get(l.index as usize)?;
            let factor = if l.inverted { self.unit_inverse(img)? } else { img.clone() };
            out = self.mul(&out, &factor);
        }
        Some(out)
    }
}

/// Least `c <= cap` such that the exact Magnus image of `w` has a nonzero
/// term of degree `c`; equivalently the lower-central-series depth of `w`.
pub fn lcs_class(w: &Word, rank: usize, cap: usize) -> Result<usize, NilpotentError> {
    let reduced = free_reduce(w);
    if reduced.is_empty() {
        return Err(NilpotentError::TrivialWord);
    }
    let alg = MagnusAlgebra::exact(rank, cap);
    let image = alg.eval(&reduced);
    image.min_positive_degree().ok_or(NilpotentError::ClassCapExceeded(cap))
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn valuation(c: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut c = c.abs();
    let mut v = 0;
    while !c.is_zero() && (&c % &p).is_zero() {
        c /= &p;
        v += 1;
    }
    v
}

/// A finite quotient in which the image of `word` is central of order
/// exactly `prime^order_exponent`, realized in the unit group of a truncated
/// algebra. Both the order and the centrality are machine-verified at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderWitness {
    pub params: MagnusParams,
    pub word: Word,
    /// Least p-adic valuation over the top-degree coefficients.
    pub valuation: u32,
    pub order_exponent: u32,
    pub image: TruncatedPoly,
    pub verified_order: u64,
    pub centrality_checked: bool,
}

impl OrderWitness {
    pub fn algebra(&self) -> MagnusAlgebra {
        MagnusAlgebra::for_params(&self.params)
    }
}

/// Builds a witness that `g` maps to a central element of order exactly
/// `p^k` in a finite p-group quotient of the free group of the given rank.
pub fn order_witness(
    g: &Word,
    rank: usize,
    p: u64,
    k: u32,
    cap: usize,
) -> Result<OrderWitness, NilpotentError> {
    if !is_prime(p) {
        return Err(NilpotentError::NotPrime(p));
    }
    if k == 0 {
        return Err(NilpotentError::BadExponent);
    }
    let reduced = free_reduce(g);
    if reduced.is_empty() {
        return Err(NilpotentError::TrivialWord);
    }
    let class = lcs_class(&reduced, rank, cap)?;
    let exact = MagnusAlgebra::exact(rank, class).eval(&reduced);
    let u = exact.augmentation();
    debug_assert_eq!(u.min_positive_degree(), Some(class));
    let v = u.terms().map(|(_, c)| valuation(c, p)).min().expect("augmentation is nonzero");
    let m = k + v;
    let params = MagnusParams { rank, class, prime: p, exponent: m };
    let alg = MagnusAlgebra::for_params(&params);
    let image = alg.eval(&reduced);

    // executed checks: order exactly p^k, centrality against all generators
    let order: u64 = p.pow(k);
    if !alg.pow(&image, order).is_one() {
        return Err(NilpotentError::VerificationFailed(format!(
            "image^({p}^{k}) is not the identity"
        )));
    }
    if alg.pow(&image, p.pow(k - 1)).is_one() {
        return Err(NilpotentError::VerificationFailed(format!(
            "image already dies at {p}^{}",
            k - 1
        )));
    }
    for i in 0..rank {
        let gen = alg.letter_image(Letter::new(i, false));
        if !alg.commutes(&image, &gen) {
            return Err(NilpotentError::VerificationFailed(format!(
                "image does not commute with generator {i}"
            )));
        }
    }
    Ok(OrderWitness {
        params,
        word: reduced,
        valuation: v,
        order_exponent: k,
        image,
        verified_order: order,
        centrality_checked: true,
    })
}

/// Passes to a quotient where the central image has the smaller order
/// `p^target_k`; realized by lowering the coefficient modulus to
/// `p^(target_k + v)`, the concrete counterpart of quotienting out central
/// elements of order p.
pub fn reduce_central_order(
    witness: &OrderWitness,
    target_k: u32,
) -> Result<OrderWitness, NilpotentError> {
    if target_k == 0 || target_k > witness.order_exponent {
        return Err(NilpotentError::BadReductionTarget(witness.order_exponent));
    }
    order_witness(
        &witness.word,
        witness.params.rank,
        witness.params.prime,
        target_k,
        witness.params.class,
    )
}

/// CRT composite: one order witness per prime power of `n`; the image of the
/// word in the product group has order exactly `n`.
#[derive(Debug, Clone)]
pub struct CompositeWitness {
    pub order: u64,
    pub components: Vec<OrderWitness>,
}

fn prime_power_factors(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Builds the CRT composite for arbitrary `n >= 1` and verifies the order by
/// exponentiation in every component.
pub fn composite_witness(
    g: &Word,
    rank: usize,
    n: u64,
    cap: usize,
) -> Result<CompositeWitness, NilpotentError> {
    let mut components = Vec::new();
    for (p, k) in prime_power_factors(n) {
        components.push(order_witness(g, rank, p, k, cap)?);
    }
    let witness = CompositeWitness { order: n, components };
    witness.verify_order()?;
    Ok(witness)
}

impl CompositeWitness {
    pub fn is_trivial_quotient(&self) -> bool {
        self.components.is_empty()
    }

    /// True iff the word maps to the identity in every component.
    pub fn image_trivial(&self, w: &Word) -> bool {
        self.components.iter().all(|c| c.algebra().eval(w).is_one())
    }

    fn verify_order(&self) -> Result<(), NilpotentError> {
        for c in &self.components {
            let alg = c.algebra();
            if !alg.pow(&c.image, self.order).is_one() {
                return Err(NilpotentError::VerificationFailed(
                    "composite image does not die at n".into(),
                ));
            }
        }
        for (q, _) in prime_power_factors(self.order) {
            let e = self.order / q;
            let survives = self
                .components
                .iter()
                .any(|c| !c.algebra().pow(&c.image, e).is_one());
            if !survives {
                return Err(NilpotentError::VerificationFailed(format!(
                    "composite image dies at n/{q}"
                )));
            }
        }
        Ok(())
    }
}

/// Certificate for the finite-index subgroup splitting off a finite central
/// fiber: over a genus-g base with fiber modulus N and euler degree s, the
/// relator maps to a fiber element of order `n = N / gcd(N, s)`, and `Q` is
/// a finite quotient of the free group on the base generators in which the
/// relator is central of order exactly `n`. `Gamma_0`, the preimage of the
/// kernel `F_0 = ker(F -> Q)`, then meets the fiber trivially; the
/// membership test below realizes that: a base word trivial in both Q and H
/// must carry fiber bookkeeping `t = 0 mod N`.
#[derive(Debug, Clone)]
pub struct SplitCertificate {
    pub genus: usize,
    pub euler_degree: i64,
    pub fiber_modulus: u64,
    pub relator_order: u64,
    pub quotient: CompositeWitness,
}

/// Outcome of testing one sampled word against the certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitSample {
    /// The word is not trivial in the base group H; says nothing.
    NotTrivialInBase,
    /// Trivial in H but with nontrivial image in Q: outside Gamma_0.
    OutsideKernel,
    /// Trivial in H and in Q with fiber exponent 0 mod N: the claim holds.
    Consistent { fiber: i64 },
    /// Trivial in H and in Q but with nonzero fiber: Gamma_0 meets the
    /// fiber, the certificate is refuted.
    Violation { fiber: i64 },
}

pub fn central_split(p: &SeifertPresentation) -> Result<SplitCertificate, NilpotentError> {
    let genus = match p.base_kind() {
        BaseKind::Surface { genus } => genus,
        _ => {
            return Err(NilpotentError::SplitPrecondition(
                "a closed surface base".into(),
            ))
        }
    };
    if p.fiber_modulus() == 0 {
        return Err(NilpotentError::SplitPrecondition(
            "a finite fiber (fiber_modulus > 0)".into(),
        ));
    }
    if !p.epsilon_is_trivial() {
        return Err(NilpotentError::SplitPrecondition(
            "a central fiber (trivial orientation character)".into(),
        ));
    }
    let n_mod = p.fiber_modulus() as i64;
    let s = p.euler_degree();
    let order = (n_mod / n_mod.gcd(&s)) as u64;
    let relator = p.relator().expect("surface base has a relator");
    let quotient = if order == 1 {
        CompositeWitness { order: 1, components: Vec::new() }
    } else {
        composite_witness(&relator, 2 * genus, order, 8)?
    };
    Ok(SplitCertificate {
        genus,
        euler_degree: s,
        fiber_modulus: p.fiber_modulus(),
        relator_order: order,
        quotient,
    })
}

impl SplitCertificate {
    /// Tests one base word against the core claim of the certificate.
    pub fn check_sample(&self, p: &SeifertPresentation, w: &Word) -> SplitSample {
        let Some(t) = p.fiber_value(w) else {
            return SplitSample::NotTrivialInBase;
        };
        if !self.quotient.image_trivial(w) {
            return SplitSample::OutsideKernel;
        }
        let fiber = t.rem_euclid(self.fiber_modulus as i64);
        if fiber == 0 {
            SplitSample::Consistent { fiber: t }
        } else {
            SplitSample::Violation { fiber }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON shape for witnesses: params plus a sparse coefficient list.

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<(Vec<u8>, String)>,
}

impl Serialize for TruncatedPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            terms: self.coeffs.iter().map(|(m, c)| (m.clone(), c.to_string())).collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut coeffs = BTreeMap::new();
        for (m, c) in repr.terms {
            let value: BigInt = c.parse().map_err(serde::de::Error::custom)?;
            if !value.is_zero() {
                coeffs.insert(m, value);
            }
        }
        Ok(TruncatedPoly { coeffs })
    }
}

#[derive(Serialize, Deserialize)]
struct OrderWitnessRepr {
    params: MagnusParams,
    word: Word,
    valuation: u32,
    order_exponent: u32,
    image: TruncatedPoly,
    verified_order: u64,
    centrality_checked: bool,
}

impl Serialize for OrderWitness {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        OrderWitnessRepr {
            params: self.params.clone(),
            word: self.word.clone(),
            valuation: self.valuation,
            order_exponent: self.order_exponent,
            image: self.image.clone(),
            verified_order: self.verified_order,
            centrality_checked: self.centrality_checked,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrderWitness {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = OrderWitnessRepr::deserialize(deserializer)?;
        Ok(OrderWitness {
            params: r.params,
            word: r.word,
            valuation: r.valuation,
            order_exponent: r.order_exponent,
            image: r.image,
            verified_order: r.verified_order,
            centrality_checked: r.centrality_checked,
        })
    }
}
