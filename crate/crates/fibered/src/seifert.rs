//! The cyclic extension `1 -> <h> -> G -> H -> 1` over a free, torus or
//! hyperbolic-surface base: element normal forms `(base word, fiber
//! exponent)`, equality, the lambda invariants describing which fiber offsets
//! preserve a conjugacy class, and the conjugacy decision with witnesses.
//!
//! The defining relations are `R = h^s` (surface/torus relator onto the
//! fiber, degree `s`) and `x^-1 h x = h^eps(x)` per base generator. A fiber
//! modulus `N > 0` means the quotient by `<h^N>`.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::SurfacePresentation;
use crate::words::{
    free_conjugate, free_reduce, primitive_root, Alphabet, Letter, Word, FIBER_NAME,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeifertError {
    #[error("invalid presentation: {0}")]
    BadPresentation(String),
    #[error("lambda invariants require an infinite fiber (fiber_modulus = 0); reduce mod N downstream")]
    FiberModulusMustBeZero,
    #[error("cone points are recorded as an extension point only; the decision procedures require a cone-point-free base")]
    ConePointsUnsupported,
    #[error(transparent)]
    Word(#[from] crate::words::WordError),
    #[error(transparent)]
    Surface(#[from] crate::surface::SurfaceError),
}

/// The base 2-orbifold group: free (surface with boundary), the torus, or a
/// closed hyperbolic surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseKind {
    Free { rank: usize },
    Torus,
    Surface { genus: usize },
}

/// One letter of a mixed word: a base generator or the fiber letter `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedLetter {
    Base(Letter),
    Fiber { inverted: bool },
}

/// Normal form `(base section of base_word) * h^fiber`: h-letters swept to
/// the right, base word freely reduced, fiber reduced mod N when N > 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiberedElement {
    base: Word,
    fiber: i64,
}

impl FiberedElement {
    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn fiber(&self) -> i64 {
        self.fiber
    }

    pub fn to_mixed(&self) -> Vec<MixedLetter> {
        let mut out: Vec<MixedLetter> = self.base.letters().iter().map(|&l| MixedLetter::Base(l)).collect();
        for _ in 0..self.fiber.unsigned_abs() {
            out.push(MixedLetter::Fiber { inverted: self.fiber < 0 });
        }
        out
    }
}

/// The fiber-offset lattice of an element: `{ n : g ~ g h^n }` equals
/// `lambda Z` when `lambda0` is absent and `lambda Z  u  (lambda Z + lambda0)`
/// when present. `lambda = 0` encodes the lattice `{0}` (plus the single
/// offset `lambda0` when present); `lambda0` is normalized to
/// `0 <= lambda0 < lambda` when `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaPair {
    pub lambda: i64,
    pub lambda0: Option<i64>,
}

impl LambdaPair {
    pub fn contains(&self, n: i64) -> bool {
        if self.lambda == 0 {
            n == 0 || self.lambda0 == Some(n)
        } else {
            n.rem_euclid(self.lambda) == 0
                || self.lambda0.is_some_and(|l0| (n - l0).rem_euclid(self.lambda) == 0)
        }
    }

    /// The lattice members inside `[-window, window]`.
    pub fn window(&self, window: i64) -> std::collections::BTreeSet<i64> {
        (-window..=window).filter(|&n| self.contains(n)).collect()
    }

    /// The image of the lattice in `Z/modulus`, by direct enumeration.
    pub fn image_mod(&self, modulus: u64) -> std::collections::BTreeSet<i64> {
        let m = modulus as i64;
        let mut out = std::collections::BTreeSet::new();
        if self.lambda == 0 {
            out.insert(0);
            if let Some(l0) = self.lambda0 {
                out.insert(l0.rem_euclid(m));
            }
        } else {
            for k in 0..m {
                out.insert((k * self.lambda).rem_euclid(m));
                if let Some(l0) = self.lambda0 {
                    out.insert((k * self.lambda + l0).rem_euclid(m));
                }
            }
        }
        out
    }
}

/// JSON descriptor for a presentation; see the crate README for the schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeifertDescriptor {
    pub base: BaseDescriptor,
    #[serde(default)]
    pub euler_degree: i64,
    #[serde(default)]
    pub epsilon: BTreeMap<String, i64>,
    #[serde(default)]
    pub fiber_modulus: u64,
    #[serde(default)]
    pub cone_points: Vec<(u64, i64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseDescriptor {
    Surface { genus: usize },
    Torus,
    Free { rank: usize },
}

#[derive(Debug, Clone)]
pub struct SeifertPresentation {
    base: BaseKind,
    alphabet: Alphabet,
    euler_degree: i64,
    /// Orientation character per generator, +1 or -1.
    epsilon: Vec<i8>,
    fiber_modulus: u64,
    surface: Option<SurfacePresentation>,
}

/// Internal: C+/C- generator data for the lambda computation. `contributors`
/// holds elements of C+ whose delta values generate the lambda lattice;
/// `negative` is a coset representative of C - C+ with its delta, if any.
struct CentralizerData {
    contributors: Vec<(FiberedElement, i64)>,
    negative: Option<(FiberedElement, i64)>,
}

impl SeifertPresentation {
    pub fn new(
        base: BaseKind,
        euler_degree: i64,
        epsilon: &BTreeMap<String, i64>,
        fiber_modulus: u64,
    ) -> Result<Self, SeifertError> {
        let (alphabet, surface) = match base {
            BaseKind::Free { rank } => {
                if rank < 1 {
                    return Err(SeifertError::BadPresentation("free base needs rank >= 1".into()));
                }
                if euler_degree != 0 {
                    return Err(SeifertError::BadPresentation(
                        "a free base has no relator; euler_degree must be 0".into(),
                    ));
                }
                (Alphabet::free(rank), None)
            }
            BaseKind::Torus => (Alphabet::free(2), None),
            BaseKind::Surface { genus } => {
                let sp = SurfacePresentation::new(genus)?;
                (sp.alphabet().clone(), Some(sp))
            }
        };
        let mut eps = vec![1i8; alphabet.rank()];
        for (name, value) in epsilon {
            let idx = alphabet.index_of(name).ok_or_else(|| {
                SeifertError::BadPresentation(format!("epsilon names unknown generator {name:?}"))
            })?;
            if *value != 1 && *value != -1 {
                return Err(SeifertError::BadPresentation(format!(
                    "epsilon value for {name:?} must be +1 or -1"
                )));
            }
            eps[idx] = *value as i8;
        }
        // the relator is a product of commutators, so its epsilon value is
        // automatically +1; assert rather than trust
        if let Some(relator) = match base {
            BaseKind::Torus => Some(commutator_word()),
            BaseKind::Surface { .. } => surface.as_ref().map(|sp| sp.relator().clone()),
            BaseKind::Free { .. } => None,
        } {
            let val: i64 = relator
                .letters()
                .iter()
                .map(|l| eps[l.index as usize] as i64)
                .product();
            if val != 1 {
                return Err(SeifertError::BadPresentation(
                    "orientation character must be +1 on the relator".into(),
                ));
            }
        }
        Ok(SeifertPresentation { base, alphabet, euler_degree, epsilon: eps, fiber_modulus, surface })
    }

    pub fn from_descriptor(d: &SeifertDescriptor) -> Result<Self, SeifertError> {
        if !d.cone_points.is_empty() {
            return Err(SeifertError::ConePointsUnsupported);
        }
        let base = match d.base {
            BaseDescriptor::Surface { genus } => BaseKind::Surface { genus },
            BaseDescriptor::Torus => BaseKind::Torus,
            BaseDescriptor::Free { rank } => BaseKind::Free { rank },
        };
        SeifertPresentation::new(base, d.euler_degree, &d.epsilon, d.fiber_modulus)
    }

    pub fn descriptor(&self) -> SeifertDescriptor {
        let base = match self.base {
            BaseKind::Surface { genus } => BaseDescriptor::Surface { genus },
            BaseKind::Torus => BaseDescriptor::Torus,
            BaseKind::Free { rank } => BaseDescriptor::Free { rank },
        };
        let mut epsilon = BTreeMap::new();
        for (i, &e) in self.epsilon.iter().enumerate() {
            if e == -1 {
                epsilon.insert(self.alphabet.name(i).to_string(), -1);
            }
        }
        SeifertDescriptor {
            base,
            euler_degree: self.euler_degree,
            epsilon,
            fiber_modulus: self.fiber_modulus,
            cone_points: Vec::new(),
        }
    }

    /// Free base with trivial orientation character: `F_rank x Z`.
    pub fn free(rank: usize) -> Self {
        SeifertPresentation::new(BaseKind::Free { rank }, 0, &BTreeMap::new(), 0).unwrap()
    }

    /// Torus base with euler degree `s`; `s = 1` is the Heisenberg group.
    pub fn torus(euler_degree: i64) -> Self {
        SeifertPresentation::new(BaseKind::Torus, euler_degree, &BTreeMap::new(), 0).unwrap()
    }

    /// Closed surface base of the given genus with euler degree `s`.
    pub fn surface(genus: usize, euler_degree: i64) -> Result<Self, SeifertError> {
        SeifertPresentation::new(BaseKind::Surface { genus }, euler_degree, &BTreeMap::new(), 0)
    }

    pub fn with_fiber_modulus(&self, fiber_modulus: u64) -> Self {
        let mut p = self.clone();
        p.fiber_modulus = fiber_modulus;
        p
    }

    pub fn with_epsilon(&self, epsilon: &BTreeMap<String, i64>) -> Result<Self, SeifertError> {
        SeifertPresentation::new(self.base, self.euler_degree, epsilon, self.fiber_modulus)
    }

    pub fn base_kind(&self) -> BaseKind {
        self.base
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn euler_degree(&self) -> i64 {
        self.euler_degree
    }

    pub fn fiber_modulus(&self) -> u64 {
        self.fiber_modulus
    }

    pub fn surface_presentation(&self) -> Option<&SurfacePresentation> {
        self.surface.as_ref()
    }

    /// The base relator (maps to `h^s`), if the base has one.
    pub fn relator(&self) -> Option<Word> {
        match self.base {
            BaseKind::Free { .. } => None,
            BaseKind::Torus => Some(commutator_word()),
            BaseKind::Surface { .. } => Some(self.surface.as_ref().unwrap().relator().clone()),
        }
    }

    pub fn epsilon_letter(&self, l: Letter) -> i64 {
        self.epsilon[l.index as usize] as i64
    }

    pub fn epsilon_word(&self, w: &Word) -> i64 {
        w.letters().iter().map(|&l| self.epsilon_letter(l)).product()
    }

    pub fn epsilon_is_trivial(&self) -> bool {
        self.epsilon.iter().all(|&e| e == 1)
    }

    fn normalize_fiber(&self, m: i64) -> i64 {
        if self.fiber_modulus > 0 {
            m.rem_euclid(self.fiber_modulus as i64)
        } else {
            m
        }
    }

    /// Builds the normal form of `(base section of w) * h^m`. Panics if the
    /// word uses letters outside the base alphabet.
    pub fn element(&self, base: Word, fiber: i64) -> FiberedElement {
        assert!(
            base.max_index().is_none_or(|i| i < self.alphabet.rank()),
            "word uses letters outside the base alphabet (rank {})",
            self.alphabet.rank()
        );
        FiberedElement { base: free_reduce(&base), fiber: self.normalize_fiber(fiber) }
    }

    pub fn identity(&self) -> FiberedElement {
        FiberedElement { base: Word::empty(), fiber: 0 }
    }

    /// Sweeps every h-letter to the right using `h x = x h^eps(x)`, sums the
    /// fiber exponents and freely reduces the base word.
    pub fn collect(&self, raw: &[MixedLetter]) -> FiberedElement {
        let mut base = Vec::new();
        let mut fiber: i64 = 0;
        for ml in raw {
            match *ml {
                MixedLetter::Base(l) => {
                    fiber *= self.epsilon_letter(l);
                    base.push(l);
                }
                MixedLetter::Fiber { inverted } => fiber += if inverted { -1 } else { 1 },
            }
        }
        self.element(Word::from_letters(base), fiber)
    }

    pub fn multiply(&self, a: &FiberedElement, b: &FiberedElement) -> FiberedElement {
        self.element(a.base.concat(&b.base), a.fiber * self.epsilon_word(&b.base) + b.fiber)
    }

    pub fn inverse(&self, a: &FiberedElement) -> FiberedElement {
        self.element(a.base.inverse(), -a.fiber * self.epsilon_word(&a.base))
    }

    /// `c^-1 g c`.
    pub fn conjugate_by(&self, g: &FiberedElement, c: &FiberedElement) -> FiberedElement {
        self.multiply(&self.multiply(&self.inverse(c), g), c)
    }

    pub fn power(&self, g: &FiberedElement, k: i64) -> FiberedElement {
        let base = if k < 0 { self.inverse(g) } else { g.clone() };
        let mut out = self.identity();
        for _ in 0..k.unsigned_abs() {
            out = self.multiply(&out, &base);
        }
        out
    }

    /// True iff the base word maps to the identity of the base group H.
    pub fn base_trivial(&self, w: &Word) -> bool {
        match self.base {
            BaseKind::Free { .. } => free_reduce(w).is_empty(),
            BaseKind::Torus => {
                let v = w.abelianized(2);
                v[0] == 0 && v[1] == 0
            }
            BaseKind::Surface { .. } => self.surface.as_ref().unwrap().is_trivial(w),
        }
    }

    /// For `w` trivial in H, the exact fiber exponent `t` with
    /// `section(w) = h^t`; `None` when `w` is nontrivial in H. This is the
    /// epsilon-weighted relator bookkeeping: each relator extraction
    /// `x (p^-1 R^d p) x^-1` contributes `s * d * eps(p) * eps(x)`.
    pub fn fiber_value(&self, w: &Word) -> Option<i64> {
        match self.base {
            BaseKind::Free { .. } => free_reduce(w).is_empty().then_some(0),
            BaseKind::Torus => {
                let (a, b, t) = self.torus_value(w);
                (a == 0 && b == 0).then_some(t)
            }
            BaseKind::Surface { .. } => {
                let sp = self.surface.as_ref().unwrap();
                let (reduced, trace) = sp.dehn_reduce(w);
                if !reduced.is_empty() {
                    return None;
                }
                let s = self.euler_degree;
                if self.epsilon_is_trivial() {
                    return Some(s * trace.total_degree());
                }
                let mut total = 0i64;
                sp.replay(w, &trace, |current, mv| {
                    let prefix = Word::from_letters(current.letters()[..mv.position].to_vec());
                    let rot = sp.variant_rotation_prefix(mv.variant);
                    total += s * mv.sign as i64 * self.epsilon_word(&prefix) * self.epsilon_word(&rot);
                });
                Some(total)
            }
        }
    }

    /// Torus normal form `x^a y^b h^t` of a base word, by letter-by-letter
    /// collection through the relations `[x,y] = h^s`, `h x = x h^eps(x)`.
    pub fn torus_value(&self, w: &Word) -> (i64, i64, i64) {
        debug_assert!(matches!(self.base, BaseKind::Torus));
        let s = self.euler_degree;
        let ex = self.epsilon[0] as i64;
        let ey = self.epsilon[1] as i64;
        let kappa = |sigma: i64, gamma: i64| -> i64 {
            match (sigma, gamma) {
                (1, 1) => -s * ex * ey,
                (-1, 1) => s * ex,
                (1, -1) => s * ey,
                (-1, -1) => -s,
                _ => unreachable!(),
            }
        };
        let (mut a, mut b, mut t) = (0i64, 0i64, 0i64);
        for &l in w.letters() {
            let sign = if l.inverted { -1 } else { 1 };
            if l.index == 1 {
                // y^sign: sweep past h^t, extend b
                t *= ey;
                b += sign;
            } else {
                // x^sign: sweep past h^t, then bubble left through y^b
                t *= ex;
                let sigma = if b >= 0 { 1 } else { -1 };
                let mut c = 0i64;
                for _ in 0..b.unsigned_abs() {
                    c = c * ey + kappa(sigma, sign);
                }
                t += c;
                a += sign;
            }
        }
        (a, b, t)
    }

    /// Word problem: true iff `g1 = g2` in the group (or its `<h^N>`
    /// quotient). Forms `g1 g2^-1 = (w, m)`; equal iff `w` is trivial in H
    /// and the total fiber exponent vanishes (mod N when N > 0).
    pub fn equal(&self, g1: &FiberedElement, g2: &FiberedElement) -> bool {
        let d = self.multiply(g1, &self.inverse(g2));
        match self.fiber_value(&d.base) {
            None => false,
            Some(t) => self.normalize_fiber(t + d.fiber) == 0,
        }
    }

    pub fn is_identity(&self, g: &FiberedElement) -> bool {
        self.equal(g, &self.identity())
    }

    /// `delta(c)`: the offset with `c^-1 g c = g h^delta(c)`, or `None` if
    /// `c` does not centralize the base image of `g` in H.
    fn delta(&self, g: &FiberedElement, c: &FiberedElement) -> Option<i64> {
        let conj = self.conjugate_by(g, c);
        let d = self.multiply(&self.inverse(g), &conj);
        Some(self.fiber_value(&d.base)? + d.fiber)
    }

    /// Generators of the preimage C of the centralizer of `base(g)` in H,
    /// with their delta values, split into C+ contributors and an optional
    /// representative of C - C+.
    ///
    /// C is generated by lifts of centralizer generators of the base image
    /// together with h. For a generating set `{c_i}` with a distinguished
    /// `c_0` of orientation character -1, the kernel C+ of the character is
    /// generated (up to delta-irrelevant conjugates) by the `c_i` with
    /// character +1 and the products `c_0 c_i` over the rest, whose delta is
    /// `delta(c_i) - delta(c_0)`.
    fn centralizer_data(&self, g: &FiberedElement) -> Result<CentralizerData, SeifertError> {
        let w = &g.base;
        let mut gens: Vec<FiberedElement> = Vec::new();
        if self.base_trivial(w) {
            // g = h^t: C is the whole group
            for i in 0..self.alphabet.rank() {
                gens.push(self.element(Word::gen(i), 0));
            }
        } else {
            match self.base {
                BaseKind::Free { .. } => {
                    let (root, _) = primitive_root(w)?;
                    gens.push(self.element(root, 0));
                }
                BaseKind::Torus => {
                    gens.push(self.element(Word::gen(0), 0));
                    gens.push(self.element(Word::gen(1), 0));
                }
                BaseKind::Surface { .. } => {
                    let root = self.surface.as_ref().unwrap().centralizer_root(w)?;
                    gens.push(self.element(root, 0));
                }
            }
        }
        gens.push(self.element(Word::empty(), 1)); // h itself

        let mut contributors = Vec::new();
        let mut negative: Option<(FiberedElement, i64)> = None;
        for c in gens {
            let d = self
                .delta(g, &c)
                .expect("centralizer generator must centralize the base image");
            if self.epsilon_word(&c.base) == 1 {
                contributors.push((c, d));
            } else if let Some((c0, d0)) = &negative {
                // c0 c lies in C+ with delta(c) - delta(c0)
                let prod = self.multiply(c0, &c);
                contributors.push((prod, d - d0));
            } else {
                negative = Some((c, d));
            }
        }
        Ok(CentralizerData { contributors, negative })
    }

    /// The lambda invariants of `g`: requires an infinite fiber.
    pub fn lambda_invariants(&self, g: &FiberedElement) -> Result<LambdaPair, SeifertError> {
        if self.fiber_modulus != 0 {
            return Err(SeifertError::FiberModulusMustBeZero);
        }
        let data = self.centralizer_data(g)?;
        let lambda = data.contributors.iter().fold(0i64, |acc, (_, d)| acc.gcd(d));
        let lambda0 = data.negative.as_ref().map(|(_, d0)| {
            if lambda > 0 {
                d0.rem_euclid(lambda)
            } else {
                *d0
            }
        });
        Ok(LambdaPair { lambda, lambda0 })
    }

    /// Builds `u` in C+ with `u^-1 g u = g h^target` from the contributor
    /// deltas, by iterated extended gcd. `None` if `target` is not a multiple
    /// of the contributor gcd.
    fn combine_contributors(
        &self,
        contributors: &[(FiberedElement, i64)],
        target: i64,
    ) -> Option<FiberedElement> {
        if target == 0 {
            return Some(self.identity());
        }
        // running (element, delta) realizing the gcd so far
        let mut real: Option<(FiberedElement, i64)> = None;
        for (c, d) in contributors {
            if *d == 0 {
                continue;
            }
            real = Some(match real {
                None => (c.clone(), *d),
                Some((e, g0)) => {
                    let ext = i64::extended_gcd(&g0, d);
                    let combined =
                        self.multiply(&self.power(&e, ext.x), &self.power(c, ext.y));
                    (combined, ext.gcd)
                }
            });
        }
        let (e, g0) = real?;
        if target % g0 != 0 {
            return None;
        }
        Some(self.power(&e, target / g0))
    }

    /// Conjugacy of two base words in the base group H, with a witness
    /// `c` such that `c^-1 w1 c = w2` in H.
    pub fn base_conjugate_in_h(&self, w1: &Word, w2: &Word) -> Option<Word> {
        match self.base {
            BaseKind::Free { .. } => free_conjugate(w1, w2),
            BaseKind::Torus => {
                // H is abelian: conjugate iff equal
                (w1.abelianized(2) == w2.abelianized(2)).then(Word::empty)
            }
            BaseKind::Surface { .. } => self.surface.as_ref().unwrap().are_conjugate(w1, w2),
        }
    }

    /// Decides conjugacy of `g1` and `g2`, returning a witness `c` with
    /// `c^-1 g1 c = g2` when conjugate. Works for both the infinite fiber
    /// (N = 0) and the finite quotients (N > 0).
    pub fn are_conjugate(
        &self,
        g1: &FiberedElement,
        g2: &FiberedElement,
    ) -> Result<Option<FiberedElement>, SeifertError> {
        // 1. conjugacy of base images in H, with witness
        let base_witness = match self.base_conjugate_in_h(&g1.base, &g2.base) {
            Some(c) => c,
            None => return Ok(None),
        };
        let c0 = self.element(base_witness, 0);
        let g1a = self.conjugate_by(g1, &c0);

        // 2. fiber offset n with g1a = g2 h^n
        let d = self.multiply(&self.inverse(g2), &g1a);
        let n = match self.fiber_value(&d.base) {
            Some(t) => self.normalize_fiber(t + d.fiber),
            None => return Ok(None),
        };

        // 3. lattice of g2, computed in the infinite-fiber lift
        let lift = self.with_fiber_modulus(0);
        let g2_lift = lift.element(g2.base.clone(), g2.fiber);
        let data = lift.centralizer_data(&g2_lift)?;
        let lambda = data.contributors.iter().fold(0i64, |acc, (_, dv)| acc.gcd(dv));

        // 4. find an exact offset n' congruent to n mod N in the lifted
        // lattice; for N > 0 scanning j in 0..lambda covers every residue of
        // j*N mod lambda, and the lambda = 0 branches solve exactly
        let modulus = self.fiber_modulus as i64;
        let mut exact: Option<(i64, bool)> = None; // (n', uses C - C+ branch)
        if lambda == 0 {
            if n == 0 {
                exact = Some((0, false));
            } else if let Some((_, d0)) = &data.negative {
                let hit = if modulus == 0 { n == *d0 } else { (d0 - n).rem_euclid(modulus) == 0 };
                if hit {
                    exact = Some((*d0, true));
                }
            }
        } else {
            let j_range = if modulus == 0 { 0..1 } else { 0..lambda.abs() };
            'outer: for j in j_range {
                let cand = n + j * modulus;
                if cand.rem_euclid(lambda) == 0 {
                    exact = Some((cand, false));
                    break 'outer;
                }
                if let Some((_, d0)) = &data.negative {
                    if (cand - d0).rem_euclid(lambda) == 0 {
                        exact = Some((cand, true));
                        break 'outer;
                    }
                }
            }
        }
        let Some((n_exact, use_negative)) = exact else {
            return Ok(None);
        };

        // 5. assemble u with u^-1 g2 u = g2 h^{n'} in the lift
        let u = if use_negative {
            let (y0, d0) = data.negative.as_ref().unwrap();
            match lift.combine_contributors(&data.contributors, n_exact - d0) {
                Some(plus) => lift.multiply(y0, &plus),
                None => return Ok(None),
            }
        } else {
            match lift.combine_contributors(&data.contributors, n_exact) {
                Some(u) => u,
                None => return Ok(None),
            }
        };
        // g1a = g2 h^{n'} = u^-1 g2 u, so (c0 u^-1) conjugates g1 to g2
        let u_in_self = self.element(u.base.clone(), u.fiber);
        let witness = self.multiply(&c0, &self.inverse(&u_in_self));
        debug_assert!(self.equal(&self.conjugate_by(g1, &witness), g2));
        if !self.equal(&self.conjugate_by(g1, &witness), g2) {
            return Err(SeifertError::BadPresentation(
                "internal error: assembled witness failed verification".into(),
            ));
        }
        Ok(Some(witness))
    }

    /// Renders an element as a mixed word, `1` for the identity.
    pub fn render(&self, g: &FiberedElement) -> String {
        let mut parts = Vec::new();
        if !g.base.is_empty() {
            parts.push(self.alphabet.render(&g.base));
        }
        match g.fiber {
            0 => {}
            1 => parts.push(FIBER_NAME.to_string()),
            m => parts.push(format!("{FIBER_NAME}^{m}")),
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

fn commutator_word() -> Word {
    let x = Letter::new(0, false);
    let y = Letter::new(1, false);
    Word::from_letters(vec![x, y, x.inverse(), y.inverse()])
}
