//! Word and conjugacy problem in closed orientable hyperbolic surface groups
//! of genus g >= 2, via Dehn reduction over the one-relator presentation
//! `< a1, b1, .., ag, bg | [a1,b1]...[ag,bg] >`.
//!
//! The relator satisfies C'(1/6): pieces shared by distinct relator variants
//! have length 1, which is machine-checked at construction. By Greendlinger's
//! lemma a freely reduced word represents the identity iff Dehn reduction
//! (replacing any subword longer than half a relator variant by the inverse
//! of the complement) reaches the empty word.

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::words::{cyclic_reduce, free_reduce, Alphabet, CyclicWord, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),
    #[error("presentation is not C'(1/6): variants {0} and {1} share a piece of length {2}")]
    PieceTooLong(usize, usize, usize),
    #[error("word is not trivial in the surface group")]
    NotTrivial,
    #[error("word is trivial in the surface group")]
    Trivial,
}

/// One cyclic rotation of the relator or of its inverse.
#[derive(Debug, Clone)]
struct Variant {
    word: Word,
    /// +1 for rotations of the relator, -1 for rotations of its inverse.
    sign: i8,
    /// Rotation offset: this variant equals `prefix^-1 r^sign prefix` where
    /// `prefix` is the first `rotation` letters of `r^sign`.
    rotation: usize,
}

/// A single Dehn replacement: at `position`, a prefix of `variants[variant]`
/// of length `matched` was replaced by the inverse of its complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DehnMove {
    pub position: usize,
    pub variant: usize,
    pub matched: usize,
    /// Relator degree of the extracted variant, +1 or -1.
    pub sign: i8,
}

/// Replay record of a Dehn reduction. Between consecutive moves the word is
/// fully freely reduced, so replaying the moves on the input deterministically
/// reproduces the output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DehnTrace {
    pub moves: Vec<DehnMove>,
}

impl DehnTrace {
    /// Sum of signed relator degrees over all replacements.
    pub fn total_degree(&self) -> i64 {
        self.moves.iter().map(|m| m.sign as i64).sum()
    }
}

/// The genus-g one-relator surface presentation with its symmetrized relator
/// table.
#[derive(Debug, Clone)]
pub struct SurfacePresentation {
    genus: usize,
    alphabet: Alphabet,
    relator: Word,
    variants: Vec<Variant>,
}

/// `[a, b] = a b a^-1 b^-1` over generator indices.
fn commutator(a: Letter, b: Letter) -> Vec<Letter> {
    vec![a, b, a.inverse(), b.inverse()]
}

impl SurfacePresentation {
    pub fn new(genus: usize) -> Result<Self, SurfaceError> {
        if genus < 2 {
            return Err(SurfaceError::GenusTooSmall(genus));
        }
        let alphabet = Alphabet::surface(genus);
        let mut letters = Vec::with_capacity(4 * genus);
        for i in 0..genus {
            letters.extend(commutator(Letter::new(2 * i, false), Letter::new(2 * i + 1, false)));
        }
        let relator = Word::from_letters(letters);
        let mut variants = Vec::with_capacity(8 * genus);
        for (base, sign) in [(relator.clone(), 1i8), (relator.inverse(), -1i8)] {
            let ls = base.letters();
            for k in 0..ls.len() {
                let mut rotated = ls[k..].to_vec();
                rotated.extend_from_slice(&ls[..k]);
                variants.push(Variant { word: Word::from_letters(rotated), sign, rotation: k });
            }
        }
        let p = SurfacePresentation { genus, alphabet, relator, variants };
        p.check_small_cancellation()?;
        Ok(p)
    }

    /// Pieces between distinct variants must have length <= 1 (< |r|/6).
    fn check_small_cancellation(&self) -> Result<(), SurfaceError> {
        for i in 0..self.variants.len() {
            for j in 0..self.variants.len() {
                if i == j {
                    continue;
                }
                let a = self.variants[i].word.letters();
                let b = self.variants[j].word.letters();
                let common = a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count();
                if common > 1 {
                    return Err(SurfaceError::PieceTooLong(i, j, common));
                }
            }
        }
        Ok(())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relator(&self) -> &Word {
        &self.relator
    }

    /// Half the relator length; replacements need matches strictly longer.
    pub fn half_length(&self) -> usize {
        2 * self.genus
    }

    pub fn variant_count(&self) -> usize {
        self.variants.len()
    }

    pub fn variant_word(&self, index: usize) -> &Word {
        &self.variants[index].word
    }

    pub fn variant_sign(&self, index: usize) -> i8 {
        self.variants[index].sign
    }

    /// The rotation prefix `p` with `variant = p^-1 r^sign p` as group
    /// elements.
    pub fn variant_rotation_prefix(&self, index: usize) -> Word {
        let v = &self.variants[index];
        let base = if v.sign > 0 { self.relator.clone() } else { self.relator.inverse() };
        Word::from_letters(base.letters()[..v.rotation].to_vec())
    }

    fn match_length(&self, word: &[Letter], pos: usize, variant: &Variant) -> usize {
        word[pos..]
            .iter()
            .zip(variant.word.letters().iter())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// All Dehn-applicable matches on `word`: triples (position, variant,
    /// matched length > half).
    fn candidate_moves(&self, word: &[Letter]) -> Vec<(usize, usize, usize)> {
        let half = self.half_length();
        let mut out = Vec::new();
        if word.len() <= half {
            return out;
        }
        for pos in 0..word.len() - half {
            for (vi, variant) in self.variants.iter().enumerate() {
                let m = self.match_length(word, pos, variant);
                if m > half {
                    out.push((pos, vi, m));
                }
            }
        }
        out
    }

    fn apply_move(&self, word: &[Letter], pos: usize, vi: usize, matched: usize) -> Word {
        let variant = &self.variants[vi];
        let mut out: Vec<Letter> = word[..pos].to_vec();
        let complement = Word::from_letters(variant.word.letters()[matched..].to_vec());
        out.extend_from_slice(complement.inverse().letters());
        out.extend_from_slice(&word[pos + matched..]);
        free_reduce(&Word::from_letters(out))
    }

    fn dehn_reduce_with<F>(&self, w: &Word, mut pick: F) -> (Word, DehnTrace)
    where
        F: FnMut(&[(usize, usize, usize)]) -> usize,
    {
        let mut current = free_reduce(w).letters().to_vec();
        let mut trace = DehnTrace::default();
        loop {
            let candidates = self.candidate_moves(&current);
            if candidates.is_empty() {
                break;
            }
            let (pos, vi, matched) = candidates[pick(&candidates)];
            trace.moves.push(DehnMove {
                position: pos,
                variant: vi,
                matched,
                sign: self.variants[vi].sign,
            });
            current = self.apply_move(&current, pos, vi, matched).letters().to_vec();
        }
        (Word::from_letters(current), trace)
    }

    /// Greedy deterministic Dehn reduction: leftmost match, longest first,
    /// lowest variant index as tie-break. The result is freely reduced and
    /// contains no subword longer than half of any relator variant; it is
    /// empty iff `w` represents the identity.
    pub fn dehn_reduce(&self, w: &Word) -> (Word, DehnTrace) {
        self.dehn_reduce_with(w, |cands| {
            let mut best = 0;
            for (i, c) in cands.iter().enumerate() {
                let b = &cands[best];
                if c.0 < b.0 || (c.0 == b.0 && (c.2 > b.2 || (c.2 == b.2 && c.1 < b.1))) {
                    best = i;
                }
            }
            best
        })
    }

    /// Dehn reduction under a seeded random move schedule. Validation aid:
    /// the emptiness of the result and the relator-degree bookkeeping must
    /// not depend on the schedule.
    pub fn dehn_reduce_seeded(&self, w: &Word, seed: u64) -> (Word, DehnTrace) {
        let mut rng = StdRng::seed_from_u64(seed);
        self.dehn_reduce_with(w, |cands| rng.gen_range(0..cands.len()))
    }

    /// Re-applies a trace to `input`, invoking `f` with the current (freely
    /// reduced) word before each replacement. Panics if the trace does not
    /// match, which indicates a corrupted trace.
    pub fn replay<F>(&self, input: &Word, trace: &DehnTrace, mut f: F) -> Word
    where
        F: FnMut(&Word, &DehnMove),
    {
        let mut current = free_reduce(input);
        for mv in &trace.moves {
            let m = self.match_length(current.letters(), mv.position, &self.variants[mv.variant]);
            assert!(m >= mv.matched, "trace does not replay against this input");
            f(&current, mv);
            current = self.apply_move(current.letters(), mv.position, mv.variant, mv.matched);
        }
        current
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.dehn_reduce(w).0.is_empty()
    }

    /// The signed number of relator occurrences when a trivial word is
    /// written as a product of conjugates of `r^(+-1)`; free reduction steps
    /// contribute 0. Rejects words that are not trivial.
    pub fn r_degree(&self, w: &Word) -> Result<i64, SurfaceError> {
        let (reduced, trace) = self.dehn_reduce(w);
        if !reduced.is_empty() {
            return Err(SurfaceError::NotTrivial);
        }
        Ok(trace.total_degree())
    }

    /// Cyclically Dehn-reduces `w`: returns a cyclic word of minimal length
    /// in the conjugacy class together with `t` such that
    /// `t^-1 w t = minimal` as group elements.
    pub fn cyclic_minimize(&self, w: &Word) -> (CyclicWord, Word) {
        let mut conj = Word::empty();
        let mut current = free_reduce(w);
        loop {
            let (reduced, _) = self.dehn_reduce(&current);
            let (core, c) = cyclic_reduce(&reduced);
            conj = free_reduce(&conj.concat(&c));
            // look for a shortening Dehn move on some rotation of the core
            let n = core.len();
            let letters = core.letters();
            let mut shortened = None;
            'outer: for k in 0..n {
                let mut rotated = letters[k..].to_vec();
                rotated.extend_from_slice(&letters[..k]);
                if !self.candidate_moves(&rotated).is_empty() {
                    // rotation by k is conjugation by the length-k prefix
                    let prefix = Word::from_letters(letters[..k].to_vec());
                    shortened = Some((Word::from_letters(rotated), prefix));
                    break 'outer;
                }
            }
            match shortened {
                Some((rotated, prefix)) => {
                    conj = free_reduce(&conj.concat(&prefix));
                    current = rotated;
                }
                None => return (core, conj),
            }
        }
    }

    /// The finite closure of a minimal cyclic word under rotations and
    /// exactly-half relator replacements. Maps each member to a conjugator
    /// `c` with `c^-1 start c = member` as group elements.
    pub fn conjugacy_closure(&self, start: &CyclicWord) -> HashMap<CyclicWord, Word> {
        let half = self.half_length();
        let mut members: HashMap<CyclicWord, Word> = HashMap::new();
        members.insert(start.clone(), Word::empty());
        let mut queue = vec![start.clone()];
        while let Some(cw) = queue.pop() {
            let base_conj = members[&cw].clone();
            let n = cw.len();
            if n < half {
                continue;
            }
            let letters = cw.letters();
            for k in 0..n {
                let mut rotated = letters[k..].to_vec();
                rotated.extend_from_slice(&letters[..k]);
                let rot_prefix = Word::from_letters(letters[..k].to_vec());
                for (vi, variant) in self.variants.iter().enumerate() {
                    let m = self.match_length(&rotated, 0, variant);
                    if m < half {
                        continue;
                    }
                    // replace the matched prefix (at least half) by the
                    // inverse of the complement; exactly-half moves preserve
                    // length, longer ones shorten, both stay in the class
                    let replaced = self.apply_move(&rotated, 0, vi, half.min(m));
                    let (core, extra) = cyclic_reduce(&replaced);
                    assert!(
                        core.len() == n,
                        "closure found a representative of different length; input was not minimal"
                    );
                    if !members.contains_key(&core) {
                        let conj =
                            free_reduce(&base_conj.concat(&rot_prefix).concat(&extra));
                        members.insert(core.clone(), conj);
                        queue.push(core);
                    }
                }
            }
        }
        members
    }

    /// Decides conjugacy and returns a witness `c` with `c^-1 u c = v` in the
    /// surface group when conjugate.
    pub fn are_conjugate(&self, u: &Word, v: &Word) -> Option<Word> {
        let (mu, tu) = self.cyclic_minimize(u);
        let (mv, tv) = self.cyclic_minimize(v);
        if mu.len() != mv.len() {
            return None;
        }
        let closure = self.conjugacy_closure(&mu);
        let s = closure.get(&mv)?;
        // u = tu mu tu^-1, s^-1 mu s = mv, v = tv mv tv^-1
        Some(free_reduce(&tu.concat(s).concat(&tv.inverse())))
    }

    /// Maximal root up to conjugacy: returns `(z, k)` with `z^k = w` exactly
    /// in the group and `k` maximal. Found as the finest literal cyclic
    /// period over the conjugacy closure of the minimal form: a cyclically
    /// Dehn-minimal word has cyclically Dehn-minimal literal powers (relator
    /// variants repeat no letter, so periodic words admit no long matches),
    /// hence every root is visible as a literal period of some member.
    pub fn maximal_root(&self, w: &Word) -> Result<(Word, u32), SurfaceError> {
        let (mu, t) = self.cyclic_minimize(w);
        if mu.is_empty() {
            return Err(SurfaceError::Trivial);
        }
        let closure = self.conjugacy_closure(&mu);
        let mut best: Option<(usize, &CyclicWord, &Word)> = None;
        for (member, conj) in &closure {
            let d = member.smallest_period();
            let k = member.len() / d;
            if best.is_none() || k > best.unwrap().0 {
                best = Some((k, member, conj));
            }
        }
        let (k, member, conj) = best.unwrap();
        let d = member.len() / k;
        let root_core = Word::from_letters(member.letters()[..d].to_vec());
        let outer = free_reduce(&t.concat(conj));
        let root = free_reduce(&outer.concat(&root_core).concat(&outer.inverse()));
        Ok((root, k as u32))
    }

    /// Generator of the centralizer of a nontrivial `w`: hyperbolic surface
    /// groups have cyclic centralizers generated by the maximal root.
    pub fn centralizer_root(&self, w: &Word) -> Result<Word, SurfaceError> {
        Ok(self.maximal_root(w)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::reduced_product;

    fn genus2() -> SurfacePresentation {
        SurfacePresentation::new(2).unwrap()
    }

    fn word(p: &SurfacePresentation, s: &str) -> Word {
        crate::parse::parse_word(p.alphabet(), s).unwrap()
    }

    #[test]
    fn construction_enforces_genus_and_small_cancellation() {
        assert!(SurfacePresentation::new(1).is_err());
        for g in 2..=4 {
            let p = SurfacePresentation::new(g).unwrap();
            assert_eq!(p.relator().len(), 4 * g);
            assert_eq!(p.variant_count(), 8 * g);
        }
    }

    #[test]
    fn relator_reduces_to_empty_with_degree_one() {
        let p = genus2();
        let (reduced, trace) = p.dehn_reduce(p.relator());
        assert!(reduced.is_empty());
        assert_eq!(trace.total_degree(), 1);
        let (reduced, trace) = p.dehn_reduce(&p.relator().inverse());
        assert!(reduced.is_empty());
        assert_eq!(trace.total_degree(), -1);
    }

    #[test]
    fn short_words_are_untouched() {
        let p = genus2();
        let w = word(&p, "a1 b1");
        let (reduced, trace) = p.dehn_reduce(&w);
        assert_eq!(reduced, w);
        assert!(trace.moves.is_empty());
        assert!(!p.is_trivial(&w));
    }

    #[test]
    fn single_commutator_is_nontrivial_in_genus_two() {
        let p = genus2();
        let w = word(&p, "a1 b1 a1^-1 b1^-1");
        let (reduced, _) = p.dehn_reduce(&w);
        assert!(!reduced.is_empty());
        assert!(!p.is_trivial(&w));
    }

    #[test]
    fn conjugates_of_relator_are_trivial() {
        let p = genus2();
        let r = p.relator().clone();
        for s in ["a1", "b2 a1", "a2 b1 a1", "b1^-1 a2 b2^-1 a1 b1"] {
            let u = word(&p, s);
            let w = reduced_product(&[&u, &r, &u.inverse()]);
            assert!(p.is_trivial(&w));
            assert_eq!(p.r_degree(&w).unwrap(), 1);
        }
        assert!(!p.is_trivial(&word(&p, "a1")));
    }

    #[test]
    fn r_degree_examples() {
        let p = genus2();
        assert_eq!(p.r_degree(p.relator()).unwrap(), 1);
        assert_eq!(p.r_degree(&Word::empty()).unwrap(), 0);
        let u = word(&p, "b2 a1^-1");
        let conj = reduced_product(&[&u, p.relator(), &u.inverse()]);
        let w = reduced_product(&[&conj, p.relator()]);
        assert_eq!(p.r_degree(&w).unwrap(), 2);
        assert_eq!(p.r_degree(&w.inverse()).unwrap(), -2);
        assert_eq!(p.r_degree(&word(&p, "a1")), Err(SurfaceError::NotTrivial));
    }

    #[test]
    fn r_degree_is_schedule_independent() {
        let p = genus2();
        let u = word(&p, "a2 b1");
        let v = word(&p, "b2^-1");
        let w = reduced_product(&[
            &u,
            p.relator(),
            &u.inverse(),
            &v,
            &p.relator().inverse(),
            &v.inverse(),
            p.relator(),
        ]);
        let expect = p.r_degree(&w).unwrap();
        assert_eq!(expect, 1);
        for seed in 0..20 {
            let (reduced, trace) = p.dehn_reduce_seeded(&w, seed);
            assert!(reduced.is_empty());
            assert_eq!(trace.total_degree(), expect, "seed {seed}");
        }
    }

    #[test]
    fn explicit_conjugate_detected_with_witness() {
        let p = genus2();
        let u = word(&p, "a1");
        let v = word(&p, "b1^-1 a1 b1");
        let c = p.are_conjugate(&u, &v).expect("conjugate");
        let check = reduced_product(&[&c.inverse(), &u, &c, &v.inverse()]);
        assert!(p.is_trivial(&check));
        assert!(p.are_conjugate(&word(&p, "a1"), &word(&p, "b1")).is_none());
    }

    #[test]
    fn trivial_elements_are_conjugate_to_empty() {
        let p = genus2();
        let u = word(&p, "a1 b2");
        let w = reduced_product(&[&u, p.relator(), &u.inverse()]);
        let c = p.are_conjugate(&w, &Word::empty()).expect("conjugate to identity");
        assert!(p.is_trivial(&reduced_product(&[&c.inverse(), &w, &c])));
    }

    #[test]
    fn centralizer_root_examples() {
        let p = genus2();
        // frozen from the bounded-commutation scan in the integration suite
        assert_eq!(p.centralizer_root(&word(&p, "a1")).unwrap(), word(&p, "a1"));
        assert_eq!(p.centralizer_root(&word(&p, "a1 a1")).unwrap(), word(&p, "a1"));
        let (root, k) = p.maximal_root(&word(&p, "a1 a1")).unwrap();
        assert_eq!((root, k), (word(&p, "a1"), 2));
        let (root, k) = p.maximal_root(&word(&p, "a1 b1")).unwrap();
        assert_eq!((root, k), (word(&p, "a1 b1"), 1));
        assert!(p.centralizer_root(&Word::empty()).is_err());
    }

    #[test]
    fn centralizer_root_commutes() {
        let p = genus2();
        for s in ["a1", "a1 b1", "a2 a2 b1", "a1 b1 a1"] {
            let w = word(&p, s);
            let z = p.centralizer_root(&w).unwrap();
            let comm = reduced_product(&[&z.inverse(), &w.inverse(), &z, &w]);
            assert!(p.is_trivial(&comm), "root of {s} must commute");
        }
    }

    #[test]
    fn root_of_conjugated_square_found() {
        let p = genus2();
        let c = word(&p, "b2 a1");
        let z = word(&p, "a1 b1");
        let w = reduced_product(&[&c, &z, &z, &c.inverse()]);
        let (root, k) = p.maximal_root(&w).unwrap();
        assert_eq!(k, 2);
        // root^2 = w in the group
        let check = reduced_product(&[&root, &root, &w.inverse()]);
        assert!(p.is_trivial(&check));
    }

    #[test]
    fn replay_reproduces_reduction() {
        let p = genus2();
        let u = word(&p, "a1 a2");
        let w = reduced_product(&[&u, p.relator(), &u.inverse(), p.relator()]);
        let (reduced, trace) = p.dehn_reduce(&w);
        let mut seen = 0;
        let replayed = p.replay(&w, &trace, |_, _| seen += 1);
        assert_eq!(replayed, reduced);
        assert_eq!(seen, trace.moves.len());
    }
}
