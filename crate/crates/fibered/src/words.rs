//! Free-group words over a signed generator alphabet: free and cyclic
//! reduction, conjugacy and primitive roots.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The reserved name of the fiber generator; never a base generator.
pub const FIBER_NAME: &str = "h";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet error: {0}")]
    BadAlphabet(String),
    #[error("empty word rejected")]
    EmptyWord,
    #[error("letter index {0} out of range for alphabet of rank {1}")]
    LetterOutOfRange(usize, usize),
}

/// A finite set of named generators. Names are distinct, lowercase and never
/// collide with the reserved fiber letter `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self, WordError> {
        if names.is_empty() {
            return Err(WordError::BadAlphabet("alphabet must be nonempty".into()));
        }
        for name in &names {
            if name.is_empty() {
                return Err(WordError::BadAlphabet("generator name is empty".into()));
            }
            if name == FIBER_NAME {
                return Err(WordError::BadAlphabet(format!(
                    "generator name {name:?} collides with the reserved fiber letter"
                )));
            }
            if !name.chars().next().unwrap().is_ascii_lowercase()
                || !name.chars().all(|c| c.is_ascii_alphanumeric())
            {
                return Err(WordError::BadAlphabet(format!(
                    "generator name {name:?} must be lowercase alphanumeric"
                )));
            }
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(WordError::BadAlphabet("generator names must be distinct".into()));
        }
        Ok(Alphabet { names })
    }

    /// Free alphabet of the given rank: `x, y, z, w` for small ranks,
    /// `x1..xr` beyond that.
    pub fn free(rank: usize) -> Self {
        assert!(rank >= 1, "free alphabet needs rank >= 1");
        let names = if rank <= 4 {
            ["x", "y", "z", "w"][..rank].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=rank).map(|i| format!("x{i}")).collect()
        };
        Alphabet { names }
    }

    /// Surface alphabet `a1, b1, ..., ag, bg` of rank `2g`.
    pub fn surface(genus: usize) -> Self {
        assert!(genus >= 1);
        let mut names = Vec::with_capacity(2 * genus);
        for i in 1..=genus {
            names.push(format!("a{i}"));
            names.push(format!("b{i}"));
        }
        Alphabet { names }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Renders a word as whitespace-separated tokens, `name^-1` for inverses.
    pub fn render(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.letters()
            .iter()
            .map(|l| {
                let name = self.name(l.index as usize);
                if l.inverted {
                    format!("{name}^-1")
                } else {
                    name.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A signed generator. Ordering is generator index first, then plain before
/// inverted; cyclic-word canonicalization relies on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub index: u16,
    pub inverted: bool,
}

impl Letter {
    pub fn new(index: usize, inverted: bool) -> Self {
        Letter { index: index as u16, inverted }
    }

    pub fn inverse(self) -> Self {
        Letter { index: self.index, inverted: !self.inverted }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.index == other.index && self.inverted != other.inverted
    }
}

/// A word over an alphabet. Not necessarily freely reduced; see
/// [`free_reduce`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    /// Single-generator word.
    pub fn gen(index: usize) -> Self {
        Word { letters: vec![Letter::new(index, false)] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Plain concatenation, no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// `self^k`, reduced. Negative exponents invert.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = free_reduce(&out.concat(&base));
        }
        out
    }

    pub fn max_index(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.index as usize).max()
    }

    /// Exponent-sum vector over `rank` generators.
    pub fn abelianized(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.letters {
            v[l.index as usize] += if l.inverted { -1 } else { 1 };
        }
        v
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                if l.inverted {
                    format!("g{}^-1", l.index)
                } else {
                    format!("g{}", l.index)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The unique freely reduced word equal to `w` in the free group. Idempotent
/// and length-nonincreasing.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        match stack.last() {
            Some(&top) if top.cancels(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word { letters: stack }
}

/// Reduced product of a sequence of words.
pub fn reduced_product(words: &[&Word]) -> Word {
    let mut out = Word::empty();
    for w in words {
        out = free_reduce(&out.concat(w));
    }
    out
}

/// A cyclically reduced word held in its canonical rotation: the
/// lexicographically least among all rotations. Cyclic-word equality is then
/// plain sequence comparison.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// The canonical rotation as a linear word.
    pub fn as_word(&self) -> Word {
        Word { letters: self.letters.clone() }
    }

    /// Smallest cyclic period `d` (divides the length); the word is a literal
    /// `len/d`-th power of its first `d` letters. Empty words have period 0.
    pub fn smallest_period(&self) -> usize {
        let n = self.len();
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            if (0..n).all(|i| self.letters[i] == self.letters[i % d]) {
                return d;
            }
        }
        0
    }
}

fn canonical_rotation_index(letters: &[Letter]) -> usize {
    let n = letters.len();
    let mut best = 0;
    for k in 1..n {
        for i in 0..n {
            let a = letters[(k + i) % n];
            let b = letters[(best + i) % n];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => {
                    best = k;
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    best
}

/// Splits a freely reduced `w` as `conjugator * core * conjugator^-1` with
/// `core` cyclically reduced and canonically rotated.
pub fn cyclic_reduce(w: &Word) -> (CyclicWord, Word) {
    let reduced = free_reduce(w);
    let mut letters = reduced.letters;
    let mut conj: Vec<Letter> = Vec::new();
    while letters.len() >= 2 && letters[0].cancels(*letters.last().unwrap()) {
        conj.push(letters[0]);
        letters.remove(0);
        letters.pop();
    }
    if letters.is_empty() {
        return (CyclicWord::default(), Word { letters: conj });
    }
    let k = canonical_rotation_index(&letters);
    // rotation by k is conjugation by the length-k prefix
    conj.extend_from_slice(&letters[..k]);
    let mut rotated = letters[k..].to_vec();
    rotated.extend_from_slice(&letters[..k]);
    (CyclicWord { letters: rotated }, free_reduce(&Word { letters: conj }))
}

/// Decides conjugacy in the free group and returns a witness `c` with
/// `c^-1 u c = v` when conjugate. Two elements are conjugate iff their cyclic
/// cores agree.
pub fn free_conjugate(u: &Word, v: &Word) -> Option<Word> {
    let (cu, pu) = cyclic_reduce(u);
    let (cv, pv) = cyclic_reduce(v);
    if cu != cv {
        return None;
    }
    // u = pu cu pu^-1 and v = pv cu pv^-1, so (pu pv^-1)^-1 u (pu pv^-1) = v.
    Some(free_reduce(&pu.concat(&pv.inverse())))
}

/// Maximal root: `w = root^exponent` with `root` not a proper power. In a
/// free group the centralizer of `w` is generated by this root.
pub fn primitive_root(w: &Word) -> Result<(Word, u32), WordError> {
    let reduced = free_reduce(w);
    if reduced.is_empty() {
        return Err(WordError::EmptyWord);
    }
    let (core, conj) = cyclic_reduce(&reduced);
    let d = core.smallest_period();
    let exponent = (core.len() / d) as u32;
    let root_core = Word { letters: core.letters()[..d].to_vec() };
    let root = reduced_product(&[&conj, &root_core, &conj.inverse()]);
    Ok((root, exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        // tiny test helper: 'a'..'z' are generators 0..25, uppercase inverts
        Word::from_letters(
            s.chars()
                .map(|c| {
                    if c.is_ascii_uppercase() {
                        Letter::new((c as u8 - b'A') as usize, true)
                    } else {
                        Letter::new((c as u8 - b'a') as usize, false)
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn free_reduce_forced_cancellations() {
        assert_eq!(free_reduce(&w("aA")), Word::empty());
        // "x y y^-1 x^-1 x" -> "x"
        assert_eq!(free_reduce(&w("abBAa")), w("a"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        // x y x^-1 -> core y, conjugator x
        let (core, conj) = cyclic_reduce(&w("abA"));
        assert_eq!(core.as_word(), w("b"));
        assert_eq!(conj, w("a"));
        // already cyclically reduced
        let (core, conj) = cyclic_reduce(&w("b"));
        assert_eq!(core.as_word(), w("b"));
        assert!(conj.is_empty());
    }

    #[test]
    fn conjugate_rotation_witness() {
        // (xy, yx) are conjugate; verify the witness by substitution
        let u = w("ab");
        let v = w("ba");
        let c = free_conjugate(&u, &v).expect("conjugate");
        let check = reduced_product(&[&c.inverse(), &u, &c]);
        assert_eq!(check, v);
        assert!(free_conjugate(&w("a"), &w("b")).is_none());
    }

    #[test]
    fn primitive_root_examples() {
        let (root, e) = primitive_root(&w("aa")).unwrap();
        assert_eq!((root, e), (w("a"), 2));
        let (root, e) = primitive_root(&w("abab")).unwrap();
        assert_eq!((root, e), (w("ab"), 2));
        let (root, e) = primitive_root(&w("ab")).unwrap();
        assert_eq!((root, e), (w("ab"), 1));
        assert_eq!(primitive_root(&Word::empty()), Err(WordError::EmptyWord));
    }

    #[test]
    fn primitive_root_of_conjugated_power() {
        // (c a c^-1)^3 has root c a c^-1
        let c = w("ba");
        let z = reduced_product(&[&c, &w("a"), &c.inverse()]);
        let cube = z.pow(3);
        let (root, e) = primitive_root(&cube).unwrap();
        assert_eq!(e, 3);
        assert_eq!(root.pow(3), cube);
        // the extracted root is itself primitive
        assert_eq!(primitive_root(&root).unwrap().1, 1);
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new(vec!["a1".into(), "b1".into()]).is_ok());
        assert!(Alphabet::new(vec!["a".into(), "a".into()]).is_err());
        assert!(Alphabet::new(vec!["h".into()]).is_err());
        assert!(Alphabet::new(vec!["X".into()]).is_err());
        assert!(Alphabet::new(vec![]).is_err());
    }

    /// Brute-force conjugacy: search all reduced conjugators of length <= bound
    /// over the given rank. Test-side oracle, independent of the cyclic-core
    /// decision above.
    fn brute_conjugate(u: &Word, v: &Word, rank: usize, bound: usize) -> Option<Word> {
        let mut frontier = vec![Word::empty()];
        for _ in 0..=bound {
            let mut next = Vec::new();
            for c in &frontier {
                if reduced_product(&[&c.inverse(), u, c]) == free_reduce(v) {
                    return Some(c.clone());
                }
                for i in 0..rank {
                    for inv in [false, true] {
                        let l = Letter::new(i, inv);
                        if c.letters().last().is_some_and(|t| t.cancels(l)) {
                            continue;
                        }
                        let mut ext = c.letters().to_vec();
                        ext.push(l);
                        next.push(Word::from_letters(ext));
                    }
                }
            }
            frontier = next;
        }
        None
    }

    #[test]
    fn conjugacy_agrees_with_brute_force_exhaustive() {
        // all pairs of reduced rank-2 words of length <= 3, conjugators <= 6
        let mut all = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for word in &layer {
                for i in 0..2 {
                    for inv in [false, true] {
                        let l = Letter::new(i, inv);
                        if word.letters().last().is_some_and(|t| t.cancels(l)) {
                            continue;
                        }
                        let mut ext = word.letters().to_vec();
                        ext.push(l);
                        next.push(Word::from_letters(ext));
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        let mut checked = 0usize;
        for u in &all {
            for v in &all {
                let fast = free_conjugate(u, v);
                let brute = brute_conjugate(u, v, 2, 6);
                assert_eq!(fast.is_some(), brute.is_some(), "disagree on {u} ~ {v}");
                if let Some(c) = fast {
                    assert_eq!(reduced_product(&[&c.inverse(), u, &c]), free_reduce(v));
                }
                checked += 1;
            }
        }
        assert!(checked > 2000);
    }

    fn arb_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
            .prop_map(|ls| Word::from_letters(ls.into_iter().map(|(i, v)| Letter::new(i, v)).collect()))
    }

    proptest! {
        #[test]
        fn reduce_idempotent_and_nonincreasing(word in arb_word(3, 20)) {
            let r = free_reduce(&word);
            prop_assert!(r.len() <= word.len());
            prop_assert!(r.is_reduced());
            prop_assert_eq!(free_reduce(&r.clone()), r);
        }

        #[test]
        fn word_times_inverse_is_trivial(word in arb_word(3, 20)) {
            prop_assert!(free_reduce(&word.concat(&word.inverse())).is_empty());
        }

        #[test]
        fn cyclic_reduce_reassembles(word in arb_word(3, 14)) {
            let reduced = free_reduce(&word);
            let (core, conj) = cyclic_reduce(&reduced);
            let back = reduced_product(&[&conj, &core.as_word(), &conj.inverse()]);
            prop_assert_eq!(back, reduced);
        }

        #[test]
        fn constructed_conjugates_are_detected(word in arb_word(2, 8), c in arb_word(2, 5)) {
            let v = reduced_product(&[&c.inverse(), &word, &c]);
            let witness = free_conjugate(&word, &v);
            prop_assert!(witness.is_some());
            let cw = witness.unwrap();
            prop_assert_eq!(reduced_product(&[&cw.inverse(), &word, &cw]), free_reduce(&v));
        }

        #[test]
        fn primitive_root_reassembles(word in arb_word(2, 8), e in 1u32..4) {
            let reduced = free_reduce(&word);
            if !reduced.is_empty() {
                let p = reduced.pow(e as i64);
                let (root, k) = primitive_root(&p).unwrap();
                prop_assert_eq!(root.pow(k as i64), p);
                prop_assert_eq!(k % e, 0);
            }
        }
    }
}
