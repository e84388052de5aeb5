//! The separability-witness pipeline: given a non-conjugate pair, pass to
//! the quotient by `<h^N>` (N the lambda invariant when it is positive, a
//! small sweep otherwise), then search homomorphisms onto finite targets
//! until a target separates the two conjugacy classes. The emitted
//! certificate carries the full target table, the generator images, the
//! relation checks and a replayable brute-force non-conjugacy record.
//!
//! The search is a budgeted semidecision: candidate targets are tried in a
//! fixed deterministic order (abelian quotients first, then unit groups of
//! truncated algebras, then dihedral fiber twists, then generic catalog
//! assignments) and budget exhaustion is a legal, explicitly reported
//! outcome.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extensions::{catalog, FiniteGroupTable};
use crate::nilpotent::{MagnusAlgebra, TruncatedPoly};
use crate::seifert::{FiberedElement, SeifertPresentation};
use crate::words::{Word, FIBER_NAME};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("presentation error: {0}")]
    Presentation(String),
    #[error("certificate replay failed: {0}")]
    Replay(String),
}

/// Resource limits for the homomorphism search. The seed only affects
/// sampling helpers; the search itself is deterministic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_target_order: usize,
    pub max_candidates: u64,
    pub time_limit_ms: Option<u64>,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_target_order: 256, max_candidates: 10_000, time_limit_ms: None, seed: 0 }
    }
}

/// A verified separating quotient for one non-conjugate pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCertificate {
    /// Fiber modulus of the stage-1 quotient the homomorphism factors
    /// through.
    pub stage1_modulus: u64,
    pub target_desc: String,
    pub target: FiniteGroupTable,
    /// Generator name (including `h`) to element index in the target.
    pub images: BTreeMap<String, usize>,
    pub g1_image: usize,
    pub g2_image: usize,
    /// Names of the presentation relations verified in the target.
    pub relation_checks: Vec<String>,
    pub candidates_tried: u64,
}

/// Result of the pipeline.
#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    /// The pair is conjugate; the witness conjugates g1 to g2.
    Conjugate { witness: FiberedElement },
    /// A finite quotient separates the conjugacy classes.
    Separated(Box<WitnessCertificate>),
    /// The budget ran out before a certificate was found. Not a refutation.
    BudgetExhausted { candidates_tried: u64 },
}

struct Hom<'a> {
    p: &'a SeifertPresentation,
    table: &'a FiniteGroupTable,
    gen_images: Vec<usize>,
    h_image: usize,
}

impl<'a> Hom<'a> {
    fn eval_word(&self, w: &Word) -> usize {
        let mut out = 0;
        for l in w.letters() {
            let img = self.gen_images[l.index as usize];
            let img = if l.inverted { self.table.inv(img) } else { img };
            out = self.table.mul(out, img);
        }
        out
    }

    fn eval_element(&self, g: &FiberedElement) -> usize {
        self.table.mul(self.eval_word(g.base()), self.table.power(self.h_image, g.fiber()))
    }

    /// Checks every relation of the stage-1 quotient presentation; returns
    /// the list of relation names on success.
    fn check_relations(&self, stage1_modulus: u64) -> Result<Vec<String>, String> {
        let mut checked = Vec::new();
        let s = self.p.euler_degree();
        if let Some(relator) = self.p.relator() {
            let lhs = self.eval_word(&relator);
            let rhs = self.table.power(self.h_image, s);
            if lhs != rhs {
                return Err("relator = h^s".to_string());
            }
            checked.push(format!("relator = {FIBER_NAME}^{s}"));
        }
        for i in 0..self.p.alphabet().rank() {
            let x = self.gen_images[i];
            let lhs = self.table.mul(self.table.mul(self.table.inv(x), self.h_image), x);
            let eps = self.p.epsilon_letter(crate::words::Letter::new(i, false));
            let rhs = self.table.power(self.h_image, eps);
            if lhs != rhs {
                return Err(format!("conjugation relation for generator {i}"));
            }
            checked.push(format!(
                "{}^-1 {FIBER_NAME} {} = {FIBER_NAME}^{eps}",
                self.p.alphabet().name(i),
                self.p.alphabet().name(i)
            ));
        }
        if self.table.power(self.h_image, stage1_modulus as i64) != 0 {
            return Err(format!("{FIBER_NAME}^{stage1_modulus} = 1"));
        }
        checked.push(format!("{FIBER_NAME}^{stage1_modulus} = 1"));
        Ok(checked)
    }
}

impl WitnessCertificate {
    /// Re-verifies the certificate from scratch: relation checks, image
    /// computation, and brute-force non-conjugacy over the whole target.
    pub fn replay(
        &self,
        p: &SeifertPresentation,
        g1: &FiberedElement,
        g2: &FiberedElement,
    ) -> Result<(), WitnessError> {
        let rank = p.alphabet().rank();
        let mut gen_images = Vec::with_capacity(rank);
        for i in 0..rank {
            let name = p.alphabet().name(i);
            let &img = self
                .images
                .get(name)
                .ok_or_else(|| WitnessError::Replay(format!("missing image for {name}")))?;
            gen_images.push(img);
        }
        let &h_image = self
            .images
            .get(FIBER_NAME)
            .ok_or_else(|| WitnessError::Replay("missing image for h".into()))?;
        if gen_images.iter().chain([&h_image]).any(|&i| i >= self.target.order()) {
            return Err(WitnessError::Replay("image index out of range".into()));
        }
        let hom = Hom { p, table: &self.target, gen_images, h_image };
        hom.check_relations(self.stage1_modulus)
            .map_err(|r| WitnessError::Replay(format!("relation failed: {r}")))?;
        let i1 = hom.eval_element(g1);
        let i2 = hom.eval_element(g2);
        if i1 != self.g1_image || i2 != self.g2_image {
            return Err(WitnessError::Replay("stored images do not match".into()));
        }
        if self.target.elements_conjugate(i1, i2) {
            return Err(WitnessError::Replay(
                "images are conjugate in the target".into(),
            ));
        }
        Ok(())
    }
}

/// Candidate target families, tried in order.
enum TargetSpec {
    /// `Z_q^rank x Z_d` with `d = gcd(N, s?, 2?)`: all base generators to
    /// unit vectors, `h` to the `Z_d` generator.
    Abelian { q: usize },
    /// Torus-base unit-group gadget in a truncated algebra mod `p^(e+j)`:
    /// the generators go to `1 + X` and `1 + p^j Y`, `h` to a central
    /// degree-2 solution of `z^s = image(relator)`; `j = val_p(s)`.
    CentralUnits { p: u64, e: u32 },
    /// Surface-base Heisenberg rerouting: one handle maps onto `H_3(Z_d)`
    /// so that its commutator realizes the relator as `h^s`, every other
    /// generator dies, and `h` maps to the central generator.
    RoutedHeisenberg { d: usize, route: usize },
    /// Dihedral twist `D_k`: `h` to the rotation, character -1 generators
    /// to a reflection.
    Dihedral { k: usize },
    /// Generic assignment search over one catalog table.
    Catalog { index: usize },
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for d in 1..=n {
        if n % d == 0 {
            out.push(d);
        }
    }
    out
}

fn prime_powers_dividing(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut k = 0;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            for e in 1..=k {
                out.push((p, e));
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out.sort_by_key(|&(p, e)| p.pow(e));
    out
}

fn specs_for_modulus(p: &SeifertPresentation, n_modulus: u64, budget: &SearchBudget) -> Vec<TargetSpec> {
    let mut specs = Vec::new();
    let rank = p.alphabet().rank() as u32;
    for q in [2usize, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 32] {
        if q.checked_pow(rank).is_some_and(|o| o <= budget.max_target_order) {
            specs.push(TargetSpec::Abelian { q });
        }
    }
    if p.epsilon_is_trivial() && p.euler_degree() != 0 {
        match p.base_kind() {
            crate::seifert::BaseKind::Torus => {
                for (prime, e) in prime_powers_dividing(n_modulus) {
                    specs.push(TargetSpec::CentralUnits { p: prime, e });
                }
            }
            crate::seifert::BaseKind::Surface { genus } => {
                for d in divisors(n_modulus) {
                    let d = d as usize;
                    if d >= 2 && d.pow(3) <= budget.max_target_order {
                        for route in 0..genus {
                            specs.push(TargetSpec::RoutedHeisenberg { d, route });
                        }
                    }
                }
            }
            crate::seifert::BaseKind::Free { .. } => {}
        }
    }
    if !p.epsilon_is_trivial() {
        for k in divisors(n_modulus) {
            if k >= 2 && 2 * k as usize <= budget.max_target_order {
                specs.push(TargetSpec::Dihedral { k: k as usize });
            }
        }
    }
    specs
}

/// Builds `Z_q^rank x Z_d` and the standard images, or `None` when the
/// family does not apply.
fn abelian_candidate(
    p: &SeifertPresentation,
    n_modulus: u64,
    q: usize,
    cap: usize,
) -> Option<(String, FiniteGroupTable, Vec<usize>, usize)> {
    // the h image must have order dividing gcd(N, s if a relator exists,
    // 2 if the character is nontrivial)
    let mut d = n_modulus as i64;
    if p.relator().is_some() {
        d = d.gcd(&p.euler_degree());
    }
    if !p.epsilon_is_trivial() {
        d = d.gcd(&2);
    }
    let d = d.unsigned_abs().max(1) as usize;
    let rank = p.alphabet().rank();
    let order = q.checked_pow(rank as u32)?.checked_mul(d)?;
    if order > cap {
        return None;
    }
    let mut table = FiniteGroupTable::cyclic(q);
    for _ in 1..rank {
        table = FiniteGroupTable::direct_product(&table, &FiniteGroupTable::cyclic(q));
    }
    table = FiniteGroupTable::direct_product(&table, &FiniteGroupTable::cyclic(d));
    // index arithmetic: component i has stride q^(rank-1-i) * d
    let mut gen_images = Vec::with_capacity(rank);
    for i in 0..rank {
        let stride = q.pow((rank - 1 - i) as u32) * d;
        gen_images.push(stride);
    }
    let h_image = if d > 1 { 1 } else { 0 };
    Some((format!("Z{q}^{rank} x Z{d}"), table, gen_images, h_image))
}

/// Closure of a generating set of algebra units into an explicit table.
fn closure_table(
    alg: &MagnusAlgebra,
    gens: &[TruncatedPoly],
    cap: usize,
) -> Option<(FiniteGroupTable, HashMap<TruncatedPoly, usize>)> {
    let mut elements: Vec<TruncatedPoly> = vec![TruncatedPoly::one()];
    let mut index: HashMap<TruncatedPoly, usize> = HashMap::new();
    index.insert(TruncatedPoly::one(), 0);
    let mut frontier = vec![0usize];
    let mut gen_pairs = Vec::new();
    for g in gens {
        gen_pairs.push(g.clone());
        gen_pairs.push(alg.unit_inverse(g)?);
    }
    while let Some(i) = frontier.pop() {
        let current = elements[i].clone();
        for g in &gen_pairs {
            let next = alg.mul(&current, g);
            if !index.contains_key(&next) {
                if elements.len() >= cap {
                    return None;
                }
                index.insert(next.clone(), elements.len());
                frontier.push(elements.len());
                elements.push(next);
            }
        }
    }
    let order = elements.len();
    let mut rows = vec![vec![0usize; order]; order];
    for a in 0..order {
        for b in 0..order {
            rows[a][b] = *index.get(&alg.mul(&elements[a], &elements[b]))?;
        }
    }
    let labels = (0..order).map(|i| format!("u{i}")).collect();
    let table = FiniteGroupTable::from_rows("units", labels, rows).ok()?;
    Some((table, index))
}

fn modular_inverse(a: i64, modulus: i64) -> Option<i64> {
    let e = i64::extended_gcd(&a.rem_euclid(modulus), &modulus);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(modulus))
}

/// The truncated-units gadget: images in the unit group of the rank-2
/// class-2 algebra mod `p^(e + val_p(s))`, with `h` mapping to the central
/// solution of `z^s = image(relator)` of order `p^e`.
fn central_units_candidate(
    p: &SeifertPresentation,
    n_modulus: u64,
    prime: u64,
    e: u32,
    cap: usize,
) -> Option<(String, FiniteGroupTable, Vec<usize>, usize)> {
    let s = p.euler_degree();
    if s == 0 || !p.epsilon_is_trivial() {
        return None;
    }
    // order of the h image will be p^e; it must die in the quotient
    if n_modulus % prime.pow(e) != 0 {
        return None;
    }
    let mut j = 0u32;
    let mut s_red = s;
    while s_red % (prime as i64) == 0 {
        s_red /= prime as i64;
        j += 1;
    }
    let alg = MagnusAlgebra::modular(2, 2, prime, e + j);
    let modulus = (prime as i64).pow(e + j);
    let pj = (prime as i64).pow(j);
    // handle generators: 1 + X and 1 + p^j Y; other generators map to 1
    let rank = p.alphabet().rank();
    let x_img = alg.letter_image(crate::words::Letter::new(0, false));
    let scaled_y = alg.add(&TruncatedPoly::one(), &monomial(vec![1], pj));
    let mut images_poly: Vec<TruncatedPoly> = vec![TruncatedPoly::one(); rank];
    images_poly[0] = x_img;
    images_poly[1] = scaled_y;
    let relator = p.relator()?;
    let rel_img = alg.eval_with(&images_poly, &relator)?;
    let u = rel_img.augmentation();
    // z = 1 + w with s w = u: divide each coefficient by p^j then by s'
    let s_inv = modular_inverse(s_red, modulus)?;
    let mut z = TruncatedPoly::one();
    for (mono, c) in u.terms() {
        let c: i64 = c.try_into().ok()?;
        if c % pj != 0 {
            return None;
        }
        let w_c = ((c / pj).rem_euclid(modulus) * s_inv).rem_euclid(modulus);
        z = alg.add(&z, &monomial(mono.clone(), w_c));
    }
    let mut gens: Vec<TruncatedPoly> = images_poly.clone();
    gens.push(z.clone());
    let (table, index) = closure_table(&alg, &gens, cap)?;
    let gen_images = images_poly.iter().map(|g| index[g]).collect();
    let h_image = index[&z];
    Some((
        format!("units(rank 2, class 2) mod {prime}^{}", e + j),
        table,
        gen_images,
        h_image,
    ))
}

fn monomial(mono: Vec<u8>, coeff: i64) -> TruncatedPoly {
    TruncatedPoly::from_terms(vec![(mono, num_bigint::BigInt::from(coeff))])
}

/// Surface-base rerouting into `H_3(Z_d)`: the generators of handle `route`
/// map to `x = (1,0,0)` and `y^(s mod d) = (0, s mod d, 0)`, every other
/// base generator to the identity, and `h` to the central `c = (0,0,1)`.
/// The relator then lands on `[x, y^s] = c^s = image(h)^s`, while elements
/// supported away from the routed handle map to central powers of `c`, for
/// which conjugacy is equality.
fn routed_heisenberg_candidate(
    p: &SeifertPresentation,
    n_modulus: u64,
    d: usize,
    route: usize,
    cap: usize,
) -> Option<(String, FiniteGroupTable, Vec<usize>, usize)> {
    if d < 2 || d.pow(3) > cap || n_modulus % d as u64 != 0 {
        return None;
    }
    let s = p.euler_degree().rem_euclid(d as i64) as usize;
    let table = FiniteGroupTable::heisenberg(d);
    let idx = |pp: usize, q: usize, t: usize| (pp * d + q) * d + t;
    let rank = p.alphabet().rank();
    let mut gen_images = vec![0usize; rank];
    gen_images[2 * route] = idx(1, 0, 0);
    gen_images[2 * route + 1] = idx(0, s, 0);
    let h_image = idx(0, 0, 1);
    Some((format!("H3(Z{d}) via handle {}", route + 1), table, gen_images, h_image))
}

/// Dihedral twist: `h` to the rotation of order k, character -1 generators
/// to a fixed reflection, the rest to the identity.
fn dihedral_candidate(
    p: &SeifertPresentation,
    k: usize,
    cap: usize,
) -> Option<(String, FiniteGroupTable, Vec<usize>, usize)> {
    if 2 * k > cap || k < 2 {
        return None;
    }
    let table = FiniteGroupTable::dihedral(k);
    let rank = p.alphabet().rank();
    let mut gen_images = Vec::with_capacity(rank);
    for i in 0..rank {
        let eps = p.epsilon_letter(crate::words::Letter::new(i, false));
        gen_images.push(if eps == -1 { k } else { 0 });
    }
    Some((format!("D{k}"), table, gen_images, 1))
}

/// Stage-1 moduli to try, most promising first. For an aligned pair with
/// fiber offset `n`, only moduli where `n` stays outside the lattice image
/// are kept: in the others the pair becomes conjugate and no target can
/// separate it.
fn stage1_moduli(
    p: &SeifertPresentation,
    g1: &FiberedElement,
    g2: &FiberedElement,
) -> Result<Vec<u64>, WitnessError> {
    if p.fiber_modulus() > 0 {
        return Ok(vec![p.fiber_modulus()]);
    }
    match align_offset(p, g1, g2) {
        Some((n, lambda_pair)) => {
            let lambda = lambda_pair.lambda;
            let candidates: Vec<u64> = if lambda > 0 {
                (1..=4).map(|k| (k * lambda) as u64).collect()
            } else {
                (2..=32).collect()
            };
            Ok(candidates
                .into_iter()
                .filter(|&m| !lambda_pair.image_mod(m).contains(&n.rem_euclid(m as i64)))
                .collect())
        }
        // bases already separate in H: any small modulus works
        None => Ok((2..=16).collect()),
    }
}

/// When the base images are conjugate in H: the fiber offset `n` with
/// `g1 ~ g2 h^n`-alignment, plus the lambda pair of `g2`.
fn align_offset(
    p: &SeifertPresentation,
    g1: &FiberedElement,
    g2: &FiberedElement,
) -> Option<(i64, crate::seifert::LambdaPair)> {
    let w = p.base_conjugate_in_h(g1.base(), g2.base())?;
    let c0 = p.element(w, 0);
    let g1a = p.conjugate_by(g1, &c0);
    let d = p.multiply(&p.inverse(g2), &g1a);
    let n = p.fiber_value(d.base())? + d.fiber();
    let lift = p.with_fiber_modulus(0);
    let pair = lift.lambda_invariants(&lift.element(g2.base().clone(), g2.fiber())).ok()?;
    Some((n, pair))
}

/// The full pipeline; see the module documentation.
pub fn find_witness(
    p: &SeifertPresentation,
    g1: &FiberedElement,
    g2: &FiberedElement,
    budget: &SearchBudget,
) -> Result<WitnessOutcome, WitnessError> {
    let start = Instant::now();
    if let Some(witness) = p
        .are_conjugate(g1, g2)
        .map_err(|e| WitnessError::Presentation(e.to_string()))?
    {
        return Ok(WitnessOutcome::Conjugate { witness });
    }
    let mut tried: u64 = 0;
    // cheap constructed families over every stage-1 modulus first; the
    // generic catalog-assignment search runs as a second pass so it cannot
    // starve the later moduli of budget
    let moduli = stage1_moduli(p, g1, g2)?;
    let mut passes: Vec<(u64, TargetSpec)> = Vec::new();
    for &n_modulus in &moduli {
        for spec in specs_for_modulus(p, n_modulus, budget) {
            passes.push((n_modulus, spec));
        }
    }
    for &n_modulus in &moduli {
        for index in 0..catalog().len() {
            passes.push((n_modulus, TargetSpec::Catalog { index }));
        }
    }
    for (n_modulus, spec) in passes {
        if tried >= budget.max_candidates {
            return Ok(WitnessOutcome::BudgetExhausted { candidates_tried: tried });
        }
        if let Some(limit) = budget.time_limit_ms {
            if start.elapsed().as_millis() as u64 > limit {
                return Ok(WitnessOutcome::BudgetExhausted { candidates_tried: tried });
            }
        }
        match spec {
            TargetSpec::Abelian { q } => {
                tried += 1;
                if let Some(cand) =
                    abelian_candidate(p, n_modulus, q, budget.max_target_order)
                {
                    if let Some(cert) = try_candidate(p, g1, g2, n_modulus, cand, tried) {
                        return Ok(WitnessOutcome::Separated(Box::new(cert)));
                    }
                }
            }
            TargetSpec::CentralUnits { p: prime, e } => {
                tried += 1;
                if let Some(cand) = central_units_candidate(
                    p,
                    n_modulus,
                    prime,
                    e,
                    budget.max_target_order,
                ) {
                    if let Some(cert) = try_candidate(p, g1, g2, n_modulus, cand, tried) {
                        return Ok(WitnessOutcome::Separated(Box::new(cert)));
                    }
                }
            }
            TargetSpec::RoutedHeisenberg { d, route } => {
                tried += 1;
                if let Some(cand) = routed_heisenberg_candidate(
                    p,
                    n_modulus,
                    d,
                    route,
                    budget.max_target_order,
                ) {
                    if let Some(cert) = try_candidate(p, g1, g2, n_modulus, cand, tried) {
                        return Ok(WitnessOutcome::Separated(Box::new(cert)));
                    }
                }
            }
            TargetSpec::Dihedral { k } => {
                tried += 1;
                if let Some(cand) = dihedral_candidate(p, k, budget.max_target_order) {
                    if let Some(cert) = try_candidate(p, g1, g2, n_modulus, cand, tried) {
                        return Ok(WitnessOutcome::Separated(Box::new(cert)));
                    }
                }
            }
            TargetSpec::Catalog { index } => {
                let entry = &catalog()[index];
                let table = &entry.group;
                if table.order() > budget.max_target_order {
                    continue;
                }
                let rank = p.alphabet().rank();
                // h first: elements whose order divides the modulus
                let h_candidates: Vec<usize> = (0..table.order())
                    .filter(|&x| n_modulus % table.element_order(x) as u64 == 0)
                    .collect();
                let mut assignment = vec![0usize; rank];
                'assignments: loop {
                    for &h_image in &h_candidates {
                        tried += 1;
                        if tried >= budget.max_candidates {
                            return Ok(WitnessOutcome::BudgetExhausted {
                                candidates_tried: tried,
                            });
                        }
                        let cand = (
                            format!("catalog {}", entry.name),
                            table.clone(),
                            assignment.clone(),
                            h_image,
                        );
                        if let Some(cert) = try_candidate(p, g1, g2, n_modulus, cand, tried) {
                            return Ok(WitnessOutcome::Separated(Box::new(cert)));
                        }
                    }
                    // next assignment in lexicographic order
                    let mut pos = 0;
                    loop {
                        if pos == rank {
                            break 'assignments;
                        }
                        assignment[pos] += 1;
                        if assignment[pos] < table.order() {
                            break;
                        }
                        assignment[pos] = 0;
                        pos += 1;
                    }
                }
            }
        }
    }
    Ok(WitnessOutcome::BudgetExhausted { candidates_tried: tried })
}

fn try_candidate(
    p: &SeifertPresentation,
    g1: &FiberedElement,
    g2: &FiberedElement,
    stage1_modulus: u64,
    candidate: (String, FiniteGroupTable, Vec<usize>, usize),
    tried: u64,
) -> Option<WitnessCertificate> {
    let (desc, table, gen_images, h_image) = candidate;
    let hom = Hom { p, table: &table, gen_images: gen_images.clone(), h_image };
    let relation_checks = hom.check_relations(stage1_modulus).ok()?;
    let i1 = hom.eval_element(g1);
    let i2 = hom.eval_element(g2);
    if table.elements_conjugate(i1, i2) {
        return None;
    }
    let mut images = BTreeMap::new();
    for (i, &img) in gen_images.iter().enumerate() {
        images.insert(p.alphabet().name(i).to_string(), img);
    }
    images.insert(FIBER_NAME.to_string(), h_image);
    Some(WitnessCertificate {
        stage1_modulus,
        target_desc: desc,
        target: table,
        images,
        g1_image: i1,
        g2_image: i2,
        relation_checks,
        candidates_tried: tried,
    })
}
