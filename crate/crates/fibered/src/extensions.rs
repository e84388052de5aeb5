//! Finite extensions made concrete: multiplication-table groups with
//! machine-checked axioms, virtually inner automorphisms, twisted conjugacy
//! classes, the star extension `<S, t | t^n = x, t^-1 g t = g phi>`, and
//! exhaustive verification of the two set identities that drive conjugacy
//! separability of finite extensions:
//!
//!  * the conjugacy class of `tg` equals `t [g]_phi`, and
//!  * a conjugacy class in G decomposes as a finite union `g_i [1]_{phi_i}`
//!    over coset representatives of a normal subgroup.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::surface::SurfacePresentation;
use crate::words::{free_reduce, reduced_product, Alphabet, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
    #[error("map is not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("subgroup check failed: {0}")]
    NotASubgroup(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// A finite group as an explicit multiplication table. Identity is element 0;
/// associativity, identity and inverses are machine-checked at construction.
/// Serializes as multiplication-table rows; deserialization re-runs the
/// group-axiom checks, so external catalogs cannot smuggle in a non-group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    pub name: String,
    order: usize,
    labels: Vec<String>,
    mul: Vec<usize>,
    inv: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    name: String,
    labels: Vec<String>,
    rows: Vec<Vec<usize>>,
}

impl Serialize for FiniteGroupTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = (0..self.order)
            .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
            .collect();
        TableRepr { name: self.name.clone(), labels: self.labels.clone(), rows }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteGroupTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = TableRepr::deserialize(deserializer)?;
        FiniteGroupTable::from_rows(&repr.name, repr.labels, repr.rows)
            .map_err(serde::de::Error::custom)
    }
}

impl FiniteGroupTable {
    pub fn from_rows(
        name: &str,
        labels: Vec<String>,
        rows: Vec<Vec<usize>>,
    ) -> Result<Self, ExtensionError> {
        let order = rows.len();
        if order == 0 {
            return Err(ExtensionError::NotAGroup("empty table".into()));
        }
        if labels.len() != order || rows.iter().any(|r| r.len() != order) {
            return Err(ExtensionError::NotAGroup("table is not square".into()));
        }
        let mut mul = Vec::with_capacity(order * order);
        for row in &rows {
            for &v in row {
                if v >= order {
                    return Err(ExtensionError::NotAGroup(format!("entry {v} out of range")));
                }
                mul.push(v);
            }
        }
        let at = |a: usize, b: usize| mul[a * order + b];
        for a in 0..order {
            if at(0, a) != a || at(a, 0) != a {
                return Err(ExtensionError::NotAGroup("element 0 is not an identity".into()));
            }
        }
        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if at(a, b) == 0 && at(b, a) == 0 {
                    inv[a] = b;
                }
            }
            if inv[a] == usize::MAX {
                return Err(ExtensionError::NotAGroup(format!("element {a} has no inverse")));
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(ExtensionError::NotAGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroupTable { name: name.to_string(), order, labels, mul, inv })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn conjugate(&self, g: usize, by: usize) -> usize {
        self.mul(self.mul(self.inv(by), g), by)
    }

    pub fn power(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut out = 0;
        for _ in 0..k.unsigned_abs() {
            out = self.mul(out, base);
        }
        out
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut out = a;
        let mut n = 1;
        while out != 0 {
            out = self.mul(out, a);
            n += 1;
        }
        n
    }

    pub fn conjugacy_class(&self, g: usize) -> BTreeSet<usize> {
        (0..self.order).map(|w| self.conjugate(g, w)).collect()
    }

    pub fn elements_conjugate(&self, g1: usize, g2: usize) -> bool {
        (0..self.order).any(|w| self.conjugate(g1, w) == g2)
    }

    pub fn is_subgroup(&self, s: &[usize]) -> bool {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        set.contains(&0)
            && set.iter().all(|&a| set.contains(&self.inv(a)))
            && set.iter().all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    pub fn is_normal(&self, s: &[usize]) -> bool {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        self.is_subgroup(s)
            && (0..self.order).all(|g| set.iter().all(|&a| set.contains(&self.conjugate(a, g))))
    }

    pub fn subgroup_generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = [0].into();
        let mut frontier: Vec<usize> = vec![0];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                for next in [self.mul(a, g), self.mul(a, self.inv(g))] {
                    if set.insert(next) {
                        frontier.push(next);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    /// Left coset representatives of a subgroup, first representative 0.
    pub fn coset_representatives(&self, s: &[usize]) -> Vec<usize> {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        let mut seen = vec![false; self.order];
        let mut reps = Vec::new();
        for x in 0..self.order {
            if seen[x] {
                continue;
            }
            reps.push(x);
            for &u in &set {
                seen[self.mul(x, u)] = true;
            }
        }
        reps
    }

    // -- constructors ------------------------------------------------------

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n).map(|a| format!("r{a}")).collect();
        Self::from_rows(&format!("Z{n}"), labels, rows).unwrap()
    }

    /// Split extension `Z_n x| Z_m` with the generator of `Z_m` acting by
    /// multiplication by `k` (so `t^-1 a t = a^k`); element `j*n + i` stands
    /// for `t^j a^i`. Dihedral groups are `k = n - 1, m = 2`.
    pub fn semidirect_cyclic(n: usize, m: usize, k: usize) -> Result<Self, ExtensionError> {
        if n < 1 || m < 1 {
            return Err(ExtensionError::NotAGroup("factors must be nontrivial".into()));
        }
        // the action must have order dividing m
        let mut pow = 1usize;
        for _ in 0..m {
            pow = pow * k % n;
        }
        if pow != 1 % n {
            return Err(ExtensionError::NotAGroup(format!(
                "{k}^{m} != 1 mod {n}: not an action of Z{m}"
            )));
        }
        let order = n * m;
        let idx = |j: usize, i: usize| j * n + i;
        let mut rows = vec![vec![0; order]; order];
        for j1 in 0..m {
            for i1 in 0..n {
                for j2 in 0..m {
                    for i2 in 0..n {
                        // (t^j1 a^i1)(t^j2 a^i2) = t^(j1+j2) a^(i1 k^j2 + i2)
                        let mut scaled = i1;
                        for _ in 0..j2 {
                            scaled = scaled * k % n;
                        }
                        rows[idx(j1, i1)][idx(j2, i2)] = idx((j1 + j2) % m, (scaled + i2) % n);
                    }
                }
            }
        }
        let labels = (0..order).map(|e| format!("t{}a{}", e / n, e % n)).collect();
        Self::from_rows(&format!("Z{n}:Z{m}(k={k})"), labels, rows)
    }

    pub fn dihedral(n: usize) -> Self {
        let mut g = Self::semidirect_cyclic(n, 2, n - 1).unwrap();
        g.name = format!("D{n}");
        g
    }

    pub fn symmetric3() -> Self {
        let mut g = Self::semidirect_cyclic(3, 2, 2).unwrap();
        g.name = "S3".to_string();
        g
    }

    pub fn quaternion8() -> Self {
        // 0:1 1:-1 2:i 3:-i 4:j 5:-j 6:k 7:-k
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
        // signed basis multiplication
        let base = |a: usize| (a / 2, a % 2); // (axis 0=1,1=i,2=j,3=k ; sign)
        let pack = |axis: usize, sign: usize| axis * 2 + sign;
        let mul_axes = |a: usize, b: usize| -> (usize, usize) {
            // returns (axis, sign) of product of basis units
            match (a, b) {
                (0, b) => (b, 0),
                (a, 0) => (a, 0),
                (1, 1) => (0, 1),
                (2, 2) => (0, 1),
                (3, 3) => (0, 1),
                (1, 2) => (3, 0),
                (2, 1) => (3, 1),
                (2, 3) => (1, 0),
                (3, 2) => (1, 1),
                (3, 1) => (2, 0),
                (1, 3) => (2, 1),
                _ => unreachable!(),
            }
        };
        let mut rows = vec![vec![0; 8]; 8];
        #[allow(clippy::needless_range_loop)]
        for a in 0..8 {
            for b in 0..8 {
                let (ax, sa) = base(a);
                let (bx, sb) = base(b);
                let (cx, sc) = mul_axes(ax, bx);
                rows[a][b] = pack(cx, (sa + sb + sc) % 2);
            }
        }
        Self::from_rows("Q8", labels.iter().map(|s| s.to_string()).collect(), rows).unwrap()
    }

    /// The Heisenberg group over `Z_d`: triples `(p, q, t)` with
    /// `(p,q,t)(p',q',t') = (p+p', q+q', t+t'+p q')`; order `d^3`, center
    /// generated by `c = (0,0,1)` and `[x, y] = c` for `x = (1,0,0)`,
    /// `y = (0,1,0)`.
    pub fn heisenberg(d: usize) -> Self {
        assert!(d >= 2);
        let order = d * d * d;
        let idx = |p: usize, q: usize, t: usize| (p * d + q) * d + t;
        let unpack = |e: usize| (e / (d * d), (e / d) % d, e % d);
        let mut rows = vec![vec![0; order]; order];
        let mut labels = vec![String::new(); order];
        for e1 in 0..order {
            let (p1, q1, t1) = unpack(e1);
            labels[e1] = format!("({p1},{q1},{t1})");
            for e2 in 0..order {
                let (p2, q2, t2) = unpack(e2);
                rows[e1][e2] = idx((p1 + p2) % d, (q1 + q2) % d, (t1 + t2 + p1 * q2) % d);
            }
        }
        Self::from_rows(&format!("H3(Z{d})"), labels, rows).unwrap()
    }

    pub fn direct_product(a: &Self, b: &Self) -> Self {
        let order = a.order * b.order;
        let idx = |i: usize, j: usize| i * b.order + j;
        let mut rows = vec![vec![0; order]; order];
        let mut labels = vec![String::new(); order];
        for i1 in 0..a.order {
            for j1 in 0..b.order {
                labels[idx(i1, j1)] = format!("({},{})", a.labels[i1], b.labels[j1]);
                for i2 in 0..a.order {
                    for j2 in 0..b.order {
                        rows[idx(i1, j1)][idx(i2, j2)] = idx(a.mul(i1, i2), b.mul(j1, j2));
                    }
                }
            }
        }
        Self::from_rows(&format!("{}x{}", a.name, b.name), labels, rows).unwrap()
    }
}

/// An automorphism of a finite table group, as the full element permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableAut {
    map: Vec<usize>,
}

impl TableAut {
    pub fn new(group: &FiniteGroupTable, map: Vec<usize>) -> Result<Self, ExtensionError> {
        let n = group.order();
        if map.len() != n {
            return Err(ExtensionError::NotAnAutomorphism("wrong length".into()));
        }
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(ExtensionError::NotAnAutomorphism("not a bijection".into()));
            }
            seen[v] = true;
        }
        for a in 0..n {
            for b in 0..n {
                if map[group.mul(a, b)] != group.mul(map[a], map[b]) {
                    return Err(ExtensionError::NotAnAutomorphism(format!(
                        "not multiplicative at ({a},{b})"
                    )));
                }
            }
        }
        Ok(TableAut { map })
    }

    pub fn identity(group: &FiniteGroupTable) -> Self {
        TableAut { map: (0..group.order()).collect() }
    }

    /// Conjugation `g -> x^-1 g x`.
    pub fn inner(group: &FiniteGroupTable, x: usize) -> Self {
        TableAut { map: (0..group.order()).map(|g| group.conjugate(g, x)).collect() }
    }

    /// Inversion on an abelian group.
    pub fn inversion(group: &FiniteGroupTable) -> Result<Self, ExtensionError> {
        Self::new(group, (0..group.order()).map(|g| group.inv(g)).collect())
    }

    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    pub fn compose(&self, then: &TableAut) -> TableAut {
        TableAut { map: self.map.iter().map(|&g| then.map[g]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// The permutation order of the automorphism.
    pub fn order(&self) -> usize {
        let mut acc = self.clone();
        let mut n = 1;
        while !acc.is_identity() {
            acc = acc.compose(self);
            n += 1;
        }
        n
    }

    /// A witness `x` with `phi(g) = x^-1 g x` for all g, if phi is inner.
    pub fn inner_witness(&self, group: &FiniteGroupTable) -> Option<usize> {
        (0..group.order())
            .find(|&x| (0..group.order()).all(|g| self.map[g] == group.conjugate(g, x)))
    }
}

/// A virtually inner automorphism of a finite table group: the least period
/// `n` with `phi^n` inner, plus the conjugating witness.
#[derive(Debug, Clone)]
pub struct VirtuallyInnerTableAut {
    pub aut: TableAut,
    pub period: usize,
    pub inner_witness: usize,
}

impl VirtuallyInnerTableAut {
    pub fn new(group: &FiniteGroupTable, aut: TableAut) -> Self {
        // phi has finite order o and phi^o = id is inner, so the least
        // period exists and is at most o
        let order = aut.order();
        let mut power = aut.clone();
        for n in 1..=order {
            if let Some(x) = power.inner_witness(group) {
                return VirtuallyInnerTableAut { aut, period: n, inner_witness: x };
            }
            power = power.compose(&aut);
        }
        unreachable!("phi^order is the identity and hence inner");
    }
}

/// One twisted-phi conjugacy class on a finite carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedClass {
    pub members: BTreeSet<usize>,
}

/// The twisted-phi class of `g`: `{ phi(h^-1) g h : h in S }`.
pub fn twisted_class_of(group: &FiniteGroupTable, phi: &TableAut, g: usize) -> TwistedClass {
    let members = (0..group.order())
        .map(|m| group.mul(group.mul(phi.apply(group.inv(m)), g), m))
        .collect();
    TwistedClass { members }
}

/// Partitions the carrier into twisted-phi conjugacy classes.
pub fn twisted_classes(group: &FiniteGroupTable, phi: &TableAut) -> Vec<TwistedClass> {
    let mut seen = vec![false; group.order()];
    let mut out = Vec::new();
    for g in 0..group.order() {
        if seen[g] {
            continue;
        }
        let class = twisted_class_of(group, phi, g);
        for &m in &class.members {
            seen[m] = true;
        }
        out.push(class);
    }
    out
}

/// Outcome of checking `class(tg) = t [g]_phi` for every g in S.
#[derive(Debug, Clone)]
pub struct TwistedIdentityReport {
    pub per_element: Vec<(usize, bool)>,
    pub all_pass: bool,
}

/// Exhaustively verifies, inside the finite extension `g_ext`, that the
/// conjugacy class of `t g` intersected with the coset `tS` equals
/// `t [g]_phi`, where `phi` is conjugation by `t` restricted to the normal
/// subgroup `S`; per the structure of the extension the class never leaves
/// the coset, which is asserted too.
pub fn verify_twisted_identity(
    g_ext: &FiniteGroupTable,
    s: &[usize],
    t: usize,
) -> Result<TwistedIdentityReport, ExtensionError> {
    let s_set: BTreeSet<usize> = s.iter().copied().collect();
    if !g_ext.is_normal(s) {
        return Err(ExtensionError::NotASubgroup("S must be normal".into()));
    }
    // t and S must generate, with the quotient generated by tS
    let mut with_t: Vec<usize> = s.to_vec();
    with_t.push(t);
    if g_ext.subgroup_generated(&with_t).len() != g_ext.order() {
        return Err(ExtensionError::Precondition("<S, t> must be the whole group".into()));
    }
    let covered: BTreeSet<usize> = (0..g_ext.order() / s_set.len().max(1))
        .flat_map(|j| {
            let tj = g_ext.power(t, j as i64);
            s_set.iter().map(move |&u| (tj, u))
        })
        .map(|(tj, u)| g_ext.mul(tj, u))
        .collect();
    if covered.len() != g_ext.order() {
        return Err(ExtensionError::Precondition(
            "the quotient by S must be cyclic, generated by tS".into(),
        ));
    }

    // phi = conjugation by t, restricted to S
    let sub = table_restriction(g_ext, s)?;
    let phi_map: Vec<usize> = (0..sub.order)
        .map(|i| sub.to_sub[&g_ext.conjugate(sub.to_full[i], t)])
        .collect();
    let phi = TableAut::new(&sub.table, phi_map)?;

    let mut per_element = Vec::new();
    let mut all_pass = true;
    for (gi, &g_full) in sub.to_full.iter().enumerate() {
        let tg = g_ext.mul(t, g_full);
        let class: BTreeSet<usize> = (0..g_ext.order()).map(|w| g_ext.conjugate(tg, w)).collect();
        // the class must stay inside tS
        let t_s: BTreeSet<usize> = s_set.iter().map(|&u| g_ext.mul(t, u)).collect();
        let inside = class.iter().all(|m| t_s.contains(m));
        let twisted = twisted_class_of(&sub.table, &phi, gi);
        let expected: BTreeSet<usize> =
            twisted.members.iter().map(|&m| g_ext.mul(t, sub.to_full[m])).collect();
        let pass = inside && class == expected;
        all_pass &= pass;
        per_element.push((g_full, pass));
    }
    Ok(TwistedIdentityReport { per_element, all_pass })
}

/// A subgroup re-indexed as a standalone table.
struct SubgroupTable {
    table: FiniteGroupTable,
    order: usize,
    to_full: Vec<usize>,
    to_sub: BTreeMap<usize, usize>,
}

fn table_restriction(group: &FiniteGroupTable, s: &[usize]) -> Result<SubgroupTable, ExtensionError> {
    if !group.is_subgroup(s) {
        return Err(ExtensionError::NotASubgroup("not closed".into()));
    }
    let mut to_full: Vec<usize> = s.to_vec();
    to_full.sort_unstable();
    to_full.dedup();
    // identity must come first for the table convention
    to_full.retain(|&x| x != 0);
    to_full.insert(0, 0);
    let to_sub: BTreeMap<usize, usize> =
        to_full.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let order = to_full.len();
    let rows: Vec<Vec<usize>> = (0..order)
        .map(|a| (0..order).map(|b| to_sub[&group.mul(to_full[a], to_full[b])]).collect())
        .collect();
    let labels = to_full.iter().map(|&x| group.label(x).to_string()).collect();
    let table = FiniteGroupTable::from_rows(&format!("{}|sub", group.name), labels, rows)?;
    Ok(SubgroupTable { table, order, to_full, to_sub })
}

/// The decomposition of a conjugacy class over a normal subgroup: coset
/// representatives `x_i`, the conjugates `g_i = x_i^-1 g x_i`, the induced
/// automorphisms `phi_i`, and whether the class equals the union of the
/// translated twisted classes `g_i [1]_{phi_i}`.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub representatives: Vec<usize>,
    pub parts: Vec<BTreeSet<usize>>,
    pub class: BTreeSet<usize>,
    pub matches: bool,
}

pub fn conjugacy_decomposition(
    group: &FiniteGroupTable,
    s: &[usize],
    g: usize,
) -> Result<DecompositionReport, ExtensionError> {
    if !group.is_normal(s) {
        return Err(ExtensionError::NotASubgroup("S must be normal".into()));
    }
    let sub = table_restriction(group, s)?;
    let representatives = group.coset_representatives(s);
    let mut parts = Vec::new();
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for &x in &representatives {
        let gi = group.conjugate(g, x);
        // conjugation by g_i restricted to S
        let phi_map: Vec<usize> = (0..sub.order)
            .map(|i| sub.to_sub[&group.conjugate(sub.to_full[i], gi)])
            .collect();
        let phi = TableAut::new(&sub.table, phi_map)?;
        let twisted = twisted_class_of(&sub.table, &phi, 0);
        let part: BTreeSet<usize> =
            twisted.members.iter().map(|&m| group.mul(gi, sub.to_full[m])).collect();
        union.extend(part.iter().copied());
        parts.push(part);
    }
    let class = group.conjugacy_class(g);
    let matches = union == class;
    Ok(DecompositionReport { representatives, parts, class, matches })
}

// ---------------------------------------------------------------------------
// Automorphisms of presented carriers (free and surface groups).

/// A free or closed-surface carrier for word-level automorphisms.
#[derive(Debug, Clone)]
pub enum PresCarrier {
    Free(Alphabet),
    Surface(SurfacePresentation),
}

impl PresCarrier {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            PresCarrier::Free(a) => a,
            PresCarrier::Surface(sp) => sp.alphabet(),
        }
    }

    pub fn equal(&self, u: &Word, v: &Word) -> bool {
        match self {
            PresCarrier::Free(_) => free_reduce(u) == free_reduce(v),
            PresCarrier::Surface(sp) => sp.is_trivial(&u.concat(&v.inverse())),
        }
    }

    pub fn relator(&self) -> Option<Word> {
        match self {
            PresCarrier::Free(_) => None,
            PresCarrier::Surface(sp) => Some(sp.relator().clone()),
        }
    }
}

/// An automorphism of a presented carrier given by generator images, with a
/// declared virtually-inner period and witness. Construction checks that the
/// relator maps to a trivial word and that `phi^period = conjugation by
/// witness` holds on every generator; minimality of the period on presented
/// carriers is certified only up to these checks.
#[derive(Debug, Clone)]
pub struct WordAut {
    images: Vec<Word>,
    pub period: usize,
    pub inner_witness: Word,
}

impl WordAut {
    pub fn new(
        carrier: &PresCarrier,
        images: Vec<Word>,
        period: usize,
        inner_witness: Word,
    ) -> Result<Self, ExtensionError> {
        let rank = carrier.alphabet().rank();
        if images.len() != rank {
            return Err(ExtensionError::NotAnAutomorphism(format!(
                "need {rank} generator images, got {}",
                images.len()
            )));
        }
        if period == 0 {
            return Err(ExtensionError::NotAnAutomorphism("period must be positive".into()));
        }
        let aut = WordAut { images: images.iter().map(free_reduce).collect(), period, inner_witness };
        if let Some(r) = carrier.relator() {
            // the endomorphism must respect the single relation
            if !carrier.equal(&aut.apply(&r), &Word::empty()) {
                return Err(ExtensionError::NotAnAutomorphism(
                    "relator does not map to a trivial word".into(),
                ));
            }
        }
        for i in 0..rank {
            let mut image = Word::gen(i);
            for _ in 0..period {
                image = aut.apply(&image);
            }
            let conj = reduced_product(&[
                &aut.inner_witness.inverse(),
                &Word::gen(i),
                &aut.inner_witness,
            ]);
            if !carrier.equal(&image, &conj) {
                return Err(ExtensionError::NotAnAutomorphism(format!(
                    "phi^{period} is not conjugation by the witness on generator {i}"
                )));
            }
        }
        Ok(aut)
    }

    pub fn identity(carrier: &PresCarrier) -> Self {
        let rank = carrier.alphabet().rank();
        WordAut {
            images: (0..rank).map(Word::gen).collect(),
            period: 1,
            inner_witness: Word::empty(),
        }
    }

    pub fn image(&self, i: usize) -> &Word {
        &self.images[i]
    }

    /// Substitutes generator images and freely reduces.
    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Vec::new();
        for l in w.letters() {
            let img = &self.images[l.index as usize];
            if l.inverted {
                out.extend_from_slice(img.inverse().letters());
            } else {
                out.extend_from_slice(img.letters());
            }
        }
        free_reduce(&Word::from_letters(out))
    }
}

/// A finitely presented group: generator names plus relator words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

/// The extension `<S, t | t^n = x, t^-1 g t = g phi>`: appends the generator
/// `t` (the last index) and emits the relators `t^n x^-1` and
/// `t^-1 g_i t phi(g_i)^-1` on top of the carrier's relator.
pub fn star_extension(carrier: &PresCarrier, aut: &WordAut) -> Result<Presentation, ExtensionError> {
    let alphabet = carrier.alphabet();
    let rank = alphabet.rank();
    let t = Letter::new(rank, false);
    let mut generators: Vec<String> = alphabet.names().to_vec();
    generators.push("t".to_string());
    let mut relators = Vec::new();
    if let Some(r) = carrier.relator() {
        relators.push(r);
    }
    // t^n x^-1
    let mut tn: Vec<Letter> = vec![t; aut.period];
    tn.extend_from_slice(aut.inner_witness.inverse().letters());
    relators.push(free_reduce(&Word::from_letters(tn)));
    // t^-1 g t (g phi)^-1
    for i in 0..rank {
        let mut w: Vec<Letter> = vec![t.inverse(), Letter::new(i, false), t];
        w.extend_from_slice(aut.apply(&Word::gen(i)).inverse().letters());
        relators.push(free_reduce(&Word::from_letters(w)));
    }
    Ok(Presentation { generators, relators })
}

/// Bounded search for a twisted conjugator: `h` with `phi(h^-1) g1 h = g2`
/// and `|h| <= bound`. Exhausting the bound is explicitly not a refutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistedSearch {
    Witness(Word),
    NotFoundWithin(usize),
}

pub fn twisted_search(
    carrier: &PresCarrier,
    aut: &WordAut,
    g1: &Word,
    g2: &Word,
    bound: usize,
) -> TwistedSearch {
    let rank = carrier.alphabet().rank();
    let mut layer = vec![Word::empty()];
    for depth in 0..=bound {
        for hcand in &layer {
            let lhs = reduced_product(&[&aut.apply(&hcand.inverse()), g1, hcand]);
            if carrier.equal(&lhs, g2) {
                return TwistedSearch::Witness(hcand.clone());
            }
        }
        if depth == bound {
            break;
        }
        let mut next = Vec::new();
        for hcand in &layer {
            for i in 0..rank {
                for inv in [false, true] {
                    let l = Letter::new(i, inv);
                    if hcand.letters().last().is_some_and(|t| t.cancels(l)) {
                        continue;
                    }
                    let mut ext = hcand.letters().to_vec();
                    ext.push(l);
                    next.push(Word::from_letters(ext));
                }
            }
        }
        layer = next;
    }
    TwistedSearch::NotFoundWithin(bound)
}

// ---------------------------------------------------------------------------
// Catalog of finite extensions for the exhaustive identity checks.

/// One catalog entry: a finite group with a distinguished normal subgroup S
/// and an element t with `<S, t> = G` and cyclic quotient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub group: FiniteGroupTable,
    pub subgroup: Vec<usize>,
    pub t: usize,
}

/// The built-in catalog: cyclic-by-cyclic and dihedral extensions, products
/// with Z2, the quaternion group and two Frobenius-type twists, all of order
/// at most 64.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    let z2 = FiniteGroupTable::cyclic(2);

    let s3 = FiniteGroupTable::symmetric3();
    out.push(CatalogEntry {
        name: "S3 x Z2 over S3".into(),
        group: FiniteGroupTable::direct_product(&s3, &z2),
        subgroup: (0..6).map(|i| i * 2).collect(),
        t: 1,
    });
    out.push(CatalogEntry {
        name: "S3 over A3".into(),
        group: s3,
        subgroup: vec![0, 1, 2],
        t: 3,
    });
    for n in [4usize, 6, 8] {
        out.push(CatalogEntry {
            name: format!("D{n} over Z{n}"),
            group: FiniteGroupTable::dihedral(n),
            subgroup: (0..n).collect(),
            t: n,
        });
    }
    out.push(CatalogEntry {
        name: "Z4 x Z2 over Z4".into(),
        group: FiniteGroupTable::direct_product(&FiniteGroupTable::cyclic(4), &z2),
        subgroup: (0..4).map(|i| i * 2).collect(),
        t: 1,
    });
    out.push(CatalogEntry {
        name: "Z8 x Z2 over Z8".into(),
        group: FiniteGroupTable::direct_product(&FiniteGroupTable::cyclic(8), &z2),
        subgroup: (0..8).map(|i| i * 2).collect(),
        t: 1,
    });
    out.push(CatalogEntry {
        name: "Z6 over Z3".into(),
        group: FiniteGroupTable::cyclic(6),
        subgroup: vec![0, 2, 4],
        t: 1,
    });
    out.push(CatalogEntry {
        name: "Q8 over Z4".into(),
        group: FiniteGroupTable::quaternion8(),
        subgroup: vec![0, 1, 2, 3],
        t: 4,
    });
    out.push(CatalogEntry {
        name: "D4 x Z2 over D4".into(),
        group: FiniteGroupTable::direct_product(&FiniteGroupTable::dihedral(4), &z2),
        subgroup: (0..8).map(|i| i * 2).collect(),
        t: 1,
    });
    out.push(CatalogEntry {
        name: "F20 over Z5".into(),
        group: FiniteGroupTable::semidirect_cyclic(5, 4, 2).unwrap(),
        subgroup: (0..5).collect(),
        t: 5,
    });
    out.push(CatalogEntry {
        name: "Z7:Z3 over Z7".into(),
        group: FiniteGroupTable::semidirect_cyclic(7, 3, 2).unwrap(),
        subgroup: (0..7).collect(),
        t: 7,
    });
    out
}
