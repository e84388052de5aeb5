//! Brute-force oracles shared by the integration suites. These deliberately
//! avoid the library's decision paths: the word-problem oracle explores every
//! applicable replacement schedule instead of the greedy one, and the
//! conjugacy oracles enumerate bounded conjugators exhaustively.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use fibered::seifert::{FiberedElement, SeifertPresentation};
use fibered::surface::SurfacePresentation;
use fibered::words::{free_reduce, Letter, Word};

use rand::rngs::StdRng;
use rand::Rng;

/// Word-problem oracle: breadth-first search over every word reachable from
/// `w` by free reduction plus any longer-than-half relator replacement at any
/// position. Greendlinger's lemma guarantees such a path to the empty word
/// exists whenever `w` is trivial, so reaching empty is both sound and
/// complete; the search order is exhaustive rather than greedy.
pub fn bfs_trivial_oracle(p: &SurfacePresentation, w: &Word) -> bool {
    let start = free_reduce(w);
    if start.is_empty() {
        return true;
    }
    let half = p.half_length();
    let mut visited: HashSet<Word> = HashSet::new();
    let mut queue: VecDeque<Word> = VecDeque::new();
    visited.insert(start.clone());
    queue.push_back(start);
    while let Some(current) = queue.pop_front() {
        let letters = current.letters();
        for pos in 0..letters.len() {
            for vi in 0..p.variant_count() {
                let variant = p.variant_word(vi);
                let matched = letters[pos..]
                    .iter()
                    .zip(variant.letters())
                    .take_while(|(a, b)| a == b)
                    .count();
                if matched <= half {
                    continue;
                }
                // replace the matched prefix by the inverse of the remainder
                let mut next: Vec<Letter> = letters[..pos].to_vec();
                let complement = Word::from_letters(variant.letters()[matched..].to_vec());
                next.extend_from_slice(complement.inverse().letters());
                next.extend_from_slice(&letters[pos + matched..]);
                let next = free_reduce(&Word::from_letters(next));
                if next.is_empty() {
                    return true;
                }
                if visited.insert(next.clone()) {
                    assert!(visited.len() < 200_000, "oracle state space blew up");
                    queue.push_back(next);
                }
            }
        }
    }
    false
}

/// Exhaustive bounded conjugacy search in the surface group: looks for `c`
/// with `|c| <= bound` and `c^-1 u c = v`. States are the freely reduced
/// forms of the conjugates, deduplicated (the transition is a function of
/// the reduced word, so deduplication loses nothing); equality against `v`
/// goes through triviality of `s v^-1`. Exponent sums are conjugation
/// invariants, giving a sound early rejection.
pub fn brute_conjugate_surface(
    p: &SurfacePresentation,
    u: &Word,
    v: &Word,
    bound: usize,
) -> Option<Word> {
    let rank = p.alphabet().rank();
    if free_reduce(u).abelianized(rank) != free_reduce(v).abelianized(rank) {
        return None;
    }
    let start = free_reduce(u);
    let target = free_reduce(v);
    let mut seen: HashMap<Word, Word> = HashMap::new(); // state -> conjugator
    seen.insert(start.clone(), Word::empty());
    let mut frontier = vec![start];
    for _ in 0..=bound {
        let mut next_frontier = Vec::new();
        for state in &frontier {
            let conj = seen[state].clone();
            if p.is_trivial(&state.concat(&target.inverse())) {
                return Some(conj);
            }
            for i in 0..rank {
                for inv in [false, true] {
                    let l = Letter::new(i, inv);
                    let mut w = vec![l.inverse()];
                    w.extend_from_slice(state.letters());
                    w.push(l);
                    let next = free_reduce(&Word::from_letters(w));
                    if !seen.contains_key(&next) {
                        let mut c = conj.letters().to_vec();
                        c.push(l);
                        seen.insert(next.clone(), free_reduce(&Word::from_letters(c)));
                        next_frontier.push(next);
                    }
                }
            }
        }
        frontier = next_frontier;
    }
    None
}

/// Bounded conjugator oracle for the fibered groups: the set of offsets
/// `n` in `[-window, window]` for which conjugating `g` by some product of
/// at most `depth` generator letters (base letters, plus `h` when the
/// orientation character is nontrivial) provably yields `g h^n`. Every
/// returned offset carries a conjugator that has been re-verified through
/// `equal`.
pub fn conjugate_offsets_oracle(
    p: &SeifertPresentation,
    g: &FiberedElement,
    depth: usize,
    window: i64,
) -> BTreeSet<i64> {
    let rank = p.alphabet().rank();
    let mut letters: Vec<FiberedElement> = Vec::new();
    for i in 0..rank {
        letters.push(p.element(Word::gen(i), 0));
        letters.push(p.element(Word::gen(i).inverse(), 0));
    }
    if !p.epsilon_is_trivial() {
        // h acts nontrivially by conjugation only in the twisted case
        letters.push(p.element(Word::empty(), 1));
        letters.push(p.element(Word::empty(), -1));
    }
    let mut seen: HashMap<FiberedElement, FiberedElement> = HashMap::new(); // state -> conjugator
    seen.insert(g.clone(), p.identity());
    let mut frontier = vec![g.clone()];
    let mut out = BTreeSet::new();
    let record = |state: &FiberedElement, conj: &FiberedElement, out: &mut BTreeSet<i64>| {
        // state = conj^-1 g conj; does it equal g h^n for some n in range?
        let d = p.multiply(&p.inverse(g), state);
        if let Some(t) = p.fiber_value(d.base()) {
            let n = t + d.fiber();
            if n.abs() <= window {
                let target = p.multiply(g, &p.element(Word::empty(), n));
                assert!(
                    p.equal(&p.conjugate_by(g, conj), &target),
                    "oracle witness failed re-verification"
                );
                out.insert(n);
            }
        }
    };
    record(g, &p.identity(), &mut out);
    for _ in 0..depth {
        let mut next_frontier = Vec::new();
        for state in &frontier {
            let conj = seen[state].clone();
            for l in &letters {
                let next = p.conjugate_by(state, l);
                if !seen.contains_key(&next) {
                    let next_conj = p.multiply(&conj, l);
                    record(&next, &next_conj, &mut out);
                    seen.insert(next.clone(), next_conj);
                    next_frontier.push(next);
                }
            }
        }
        frontier = next_frontier;
    }
    out
}

/// Uniformly random freely reduced word of exactly the given length.
pub fn random_reduced_word(rng: &mut StdRng, rank: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::new();
    while letters.len() < len {
        let l = Letter::new(rng.gen_range(0..rank), rng.gen());
        if letters.last().is_some_and(|t| t.cancels(l)) {
            continue;
        }
        letters.push(l);
    }
    Word::from_letters(letters)
}

/// All freely reduced words over `rank` generators with length at most
/// `max_len`.
pub fn all_reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut all = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..rank {
                for inv in [false, true] {
                    let l = Letter::new(i, inv);
                    if w.letters().last().is_some_and(|t| t.cancels(l)) {
                        continue;
                    }
                    let mut ext = w.letters().to_vec();
                    ext.push(l);
                    next.push(Word::from_letters(ext));
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// The presentation matrix exercised by the lambda and pipeline criteria:
/// free bases of rank 1 and 2 with every orientation character, torus bases
/// with euler degree 0, 1, 2, and genus-2 surface bases with degree 0, 1, 3.
pub fn presentation_matrix() -> Vec<(String, SeifertPresentation)> {
    let mut out = Vec::new();
    for (rank, patterns) in [(1usize, vec![vec![1], vec![-1]]), (
        2,
        vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]],
    )] {
        for pattern in patterns {
            let mut eps = std::collections::BTreeMap::new();
            for (i, &e) in pattern.iter().enumerate() {
                if e == -1 {
                    let name = fibered::words::Alphabet::free(rank).name(i).to_string();
                    eps.insert(name, -1i64);
                }
            }
            let p = SeifertPresentation::new(
                fibered::seifert::BaseKind::Free { rank },
                0,
                &eps,
                0,
            )
            .unwrap();
            out.push((format!("free rank {rank} eps {pattern:?}"), p));
        }
    }
    for s in [0i64, 1, 2] {
        out.push((format!("torus s={s}"), SeifertPresentation::torus(s)));
    }
    for s in [0i64, 1, 3] {
        out.push((format!("surface genus 2 s={s}"), SeifertPresentation::surface(2, s).unwrap()));
    }
    out
}
