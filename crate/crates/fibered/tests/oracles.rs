//! Oracle-backed module invariants beyond the acceptance criteria: deeper
//! word-problem agreement, centralizer scans, relator-degree schedule
//! independence, and conjugacy congruence.

mod common;

use common::*;
use fibered::seifert::SeifertPresentation;
use fibered::surface::SurfacePresentation;
use fibered::words::{free_conjugate, free_reduce, reduced_product, Letter, Word};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn word_problem_agreement_out_to_length_ten() {
    let p = SurfacePresentation::new(2).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..400 {
        let len = rng.gen_range(0..=10usize);
        let w = random_reduced_word(&mut rng, 4, len);
        assert_eq!(p.is_trivial(&w), bfs_trivial_oracle(&p, &w), "word {w}");
    }
    // trivial words of length 10 and 12: conjugated/padded relators
    for _ in 0..100 {
        let clen = rng.gen_range(1..=2usize);
        let c = random_reduced_word(&mut rng, 4, clen);
        let w = reduced_product(&[&c, p.relator(), &c.inverse()]);
        assert!(p.is_trivial(&w));
        assert!(bfs_trivial_oracle(&p, &w));
    }
}

/// Group-level membership in the cyclic subgroup generated by `z`: a word of
/// length L equal to z^k has |k| <= L since powers of a generator are
/// Dehn-minimal.
fn in_cyclic_subgroup(p: &SurfacePresentation, c: &Word, z: &Word) -> bool {
    (-(c.len() as i64)..=c.len() as i64)
        .any(|k| p.is_trivial(&c.concat(&z.pow(-k))))
}

/// Frozen example oracle: within the commutation ball of radius 6, the only
/// elements commuting with a1 lie in <a1>; the radius-8 scan that freezes
/// the centralizer examples runs under `--ignored`.
#[test]
fn centralizer_of_a1_scan_radius_six() {
    let p = SurfacePresentation::new(2).unwrap();
    let a1 = Word::gen(0);
    let mut outside = 0usize;
    for c in all_reduced_words(4, 6) {
        let commutator = reduced_product(&[&c.inverse(), &a1.inverse(), &c, &a1]);
        if p.is_trivial(&commutator) {
            assert!(
                in_cyclic_subgroup(&p, &c, &a1),
                "{c} commutes with a1 but lies outside <a1>"
            );
        } else {
            outside += 1;
        }
    }
    assert!(outside > 100_000);
}

#[test]
#[ignore = "exhaustive radius-8 commutation scan, a few minutes; freezes the centralizer examples"]
fn centralizer_of_a1_scan_radius_eight() {
    let p = SurfacePresentation::new(2).unwrap();
    let a1 = Word::gen(0);
    for c in all_reduced_words(4, 8) {
        let commutator = reduced_product(&[&c.inverse(), &a1.inverse(), &c, &a1]);
        if p.is_trivial(&commutator) {
            assert!(
                in_cyclic_subgroup(&p, &c, &a1),
                "{c} commutes with a1 but lies outside <a1>"
            );
        }
    }
}

/// Same bounded-commutation scan for the second frozen example: nothing of
/// length <= 6 outside <a1 b1> commutes with a1 b1.
#[test]
fn centralizer_of_a1b1_scan_radius_six() {
    let p = SurfacePresentation::new(2).unwrap();
    let z = reduced_product(&[&Word::gen(0), &Word::gen(1)]);
    for c in all_reduced_words(4, 6) {
        let commutator = reduced_product(&[&c.inverse(), &z.inverse(), &c, &z]);
        if p.is_trivial(&commutator) {
            assert!(
                in_cyclic_subgroup(&p, &c, &z),
                "{c} commutes with a1 b1 but lies outside <a1 b1>"
            );
        }
    }
}

#[test]
fn constructed_surface_conjugates_carry_verified_witnesses() {
    // 100 pairs (w, c^-1 w c) with |w| <= 6, |c| <= 4; the returned witness
    // re-verifies through triviality of c^-1 u c v^-1
    let p = SurfacePresentation::new(2).unwrap();
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..100 {
        let wlen = rng.gen_range(1..=6usize);
        let w = random_reduced_word(&mut rng, 4, wlen);
        let clen = rng.gen_range(0..=4usize);
        let c = random_reduced_word(&mut rng, 4, clen);
        let v = reduced_product(&[&c.inverse(), &w, &c]);
        let witness = p.are_conjugate(&w, &v).expect("constructed conjugates");
        let check = reduced_product(&[&witness.inverse(), &w, &witness, &v.inverse()]);
        assert!(p.is_trivial(&check));
    }
}

#[test]
fn r_degree_schedule_independence_on_random_trivial_words() {
    let p = SurfacePresentation::new(2).unwrap();
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..60 {
        let mut w = Word::empty();
        let mut expected = 0i64;
        for _ in 0..rng.gen_range(1..=3usize) {
            let clen = rng.gen_range(0..=3usize);
            let c = random_reduced_word(&mut rng, 4, clen);
            let inverted = rng.gen::<bool>();
            expected += if inverted { -1 } else { 1 };
            let r = if inverted { p.relator().inverse() } else { p.relator().clone() };
            w = reduced_product(&[&w, &c, &r, &c.inverse()]);
        }
        assert_eq!(p.r_degree(&w).unwrap(), expected, "greedy schedule on {w}");
        for seed in 0..5 {
            let (reduced, trace) = p.dehn_reduce_seeded(&w, seed);
            assert!(reduced.is_empty());
            assert_eq!(trace.total_degree(), expected, "seed {seed} on {w}");
        }
    }
}

#[test]
fn r_degree_additive_and_conjugation_invariant() {
    let p = SurfacePresentation::new(2).unwrap();
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..40 {
        let c1len = rng.gen_range(0..=3usize);
        let c1 = random_reduced_word(&mut rng, 4, c1len);
        let c2len = rng.gen_range(0..=3usize);
        let c2 = random_reduced_word(&mut rng, 4, c2len);
        let w1 = reduced_product(&[&c1, p.relator(), &c1.inverse()]);
        let w2 = reduced_product(&[&c2, &p.relator().inverse(), &c2.inverse(), &w1]);
        let d1 = p.r_degree(&w1).unwrap();
        let d2 = p.r_degree(&w2).unwrap();
        assert_eq!(p.r_degree(&reduced_product(&[&w1, &w2])).unwrap(), d1 + d2);
        let ulen = rng.gen_range(0..=3usize);
        let u = random_reduced_word(&mut rng, 4, ulen);
        let conj = reduced_product(&[&u, &w2, &u.inverse()]);
        assert_eq!(p.r_degree(&conj).unwrap(), d2);
        assert_eq!(p.r_degree(&w2.inverse()).unwrap(), -d2);
    }
}

/// Free-group conjugacy against the exhaustive bounded search, sampled at
/// lengths up to 6 with the conjugator bound |u| + |v| from the contract.
#[test]
fn free_conjugacy_sampled_against_brute_force() {
    let mut rng = StdRng::seed_from_u64(41);
    let mut positives = 0usize;
    for case in 0..400 {
        let ulen = rng.gen_range(1..=6usize);
        let u = random_reduced_word(&mut rng, 2, ulen);
        let v = if case % 2 == 0 {
            let clen = rng.gen_range(0..=3usize);
            let c = random_reduced_word(&mut rng, 2, clen);
            reduced_product(&[&c.inverse(), &u, &c])
        } else {
            let vlen = rng.gen_range(1..=6usize);
            random_reduced_word(&mut rng, 2, vlen)
        };
        let fast = free_conjugate(&u, &v);
        let brute = brute_conjugate_free(&u, &v, 2, u.len() + v.len());
        assert_eq!(fast.is_some(), brute.is_some(), "{u} vs {v}");
        if let Some(c) = fast {
            positives += 1;
            assert_eq!(reduced_product(&[&c.inverse(), &u, &c]), free_reduce(&v));
        }
    }
    assert!(positives >= 200);
}

/// Exhaustive state-deduplicated conjugator search in the free group.
fn brute_conjugate_free(u: &Word, v: &Word, rank: usize, bound: usize) -> Option<Word> {
    if free_reduce(u).abelianized(rank) != free_reduce(v).abelianized(rank) {
        return None;
    }
    let target = free_reduce(v);
    let start = free_reduce(u);
    let mut seen = std::collections::HashSet::new();
    seen.insert(start.clone());
    let mut frontier = vec![start];
    for _ in 0..=bound {
        let mut next_frontier = Vec::new();
        for state in &frontier {
            if *state == target {
                return Some(Word::empty()); // existence is all we check here
            }
            for i in 0..rank {
                for inv in [false, true] {
                    let l = Letter::new(i, inv);
                    let mut w = vec![l.inverse()];
                    w.extend_from_slice(state.letters());
                    w.push(l);
                    let next = free_reduce(&Word::from_letters(w));
                    if seen.insert(next.clone()) {
                        next_frontier.push(next);
                    }
                }
            }
        }
        frontier = next_frontier;
    }
    None
}

#[test]
fn seifert_conjugacy_is_a_congruence() {
    let mut rng = StdRng::seed_from_u64(51);
    for (name, p) in presentation_matrix() {
        let rank = p.alphabet().rank();
        for _ in 0..15 {
            let l1 = rng.gen_range(0..=3usize);
            let g1 = p.element(random_reduced_word(&mut rng, rank, l1), rng.gen_range(-2..=2));
            let g2 = if rng.gen() {
                let lc = rng.gen_range(0..=2usize);
                let c = p.element(random_reduced_word(&mut rng, rank, lc), rng.gen_range(-1..=1));
                let off = rng.gen_range(-2..=2);
                p.multiply(&p.conjugate_by(&g1, &c), &p.element(Word::empty(), off))
            } else {
                let l2 = rng.gen_range(0..=3usize);
                p.element(random_reduced_word(&mut rng, rank, l2), rng.gen_range(-2..=2))
            };
            let before = p.are_conjugate(&g1, &g2).unwrap().is_some();
            let la = rng.gen_range(0..=2usize);
            let a = p.element(random_reduced_word(&mut rng, rank, la), rng.gen_range(-1..=1));
            let lb = rng.gen_range(0..=2usize);
            let b = p.element(random_reduced_word(&mut rng, rank, lb), rng.gen_range(-1..=1));
            let after = p
                .are_conjugate(&p.conjugate_by(&g1, &a), &p.conjugate_by(&g2, &b))
                .unwrap()
                .is_some();
            assert_eq!(before, after, "{name}: congruence broken");
        }
    }
}

#[test]
fn lambda_lattices_are_stable_under_conjugation_up_to_sign() {
    // conjugation by c maps the offset lattice of g to eps(c) times it
    // (c h^n c^-1 = h^{eps(c) n}), so the window is invariant up to
    // negation, exactly when the conjugator reverses orientation
    let mut rng = StdRng::seed_from_u64(61);
    for (name, p) in presentation_matrix() {
        let rank = p.alphabet().rank();
        for _ in 0..10 {
            let lg = rng.gen_range(0..=3usize);
            let g = p.element(random_reduced_word(&mut rng, rank, lg), rng.gen_range(-2..=2));
            let lc = rng.gen_range(0..=2usize);
            let c = p.element(random_reduced_word(&mut rng, rank, lc), rng.gen_range(-1..=1));
            let conj = p.conjugate_by(&g, &c);
            let a = p.lambda_invariants(&g).unwrap();
            let b = p.lambda_invariants(&conj).unwrap();
            let expect: std::collections::BTreeSet<i64> = if p.epsilon_word(c.base()) == 1 {
                a.window(8)
            } else {
                a.window(8).into_iter().map(|n| -n).collect()
            };
            assert_eq!(expect, b.window(8), "{name}: lattice not invariant up to sign");
        }
    }
}

#[test]
#[ignore = "deep soak: long conjugators and roots beyond the bounded-oracle range, ~1 minute"]
fn surface_conjugacy_soak_with_long_conjugators() {
    let p = SurfacePresentation::new(2).unwrap();
    let mut rng = StdRng::seed_from_u64(83);
    for _ in 0..300 {
        let wlen = rng.gen_range(1..=8usize);
        let w = random_reduced_word(&mut rng, 4, wlen);
        let clen = rng.gen_range(5..=10usize);
        let c = random_reduced_word(&mut rng, 4, clen);
        let v = reduced_product(&[&c.inverse(), &w, &c]);
        let witness = p
            .are_conjugate(&w, &v)
            .unwrap_or_else(|| panic!("missed conjugacy with long conjugator: {w} by {c}"));
        let check = reduced_product(&[&witness.inverse(), &w, &witness, &v.inverse()]);
        assert!(p.is_trivial(&check));
    }
    // roots of conjugated powers at exponents 2 and 3
    for _ in 0..60 {
        let zlen = rng.gen_range(1..=4usize);
        let z = random_reduced_word(&mut rng, 4, zlen);
        if p.is_trivial(&z) {
            continue;
        }
        let clen = rng.gen_range(0..=5usize);
        let c = random_reduced_word(&mut rng, 4, clen);
        let k = rng.gen_range(2..=3i64);
        let power = reduced_product(&[&c, &z.pow(k), &c.inverse()]);
        let (root, e) = p.maximal_root(&power).unwrap();
        assert_eq!(e as i64 % k, 0, "power {k} of {z} conjugated by {c}");
        let check = reduced_product(&[&root.pow(e as i64), &power.inverse()]);
        assert!(p.is_trivial(&check), "root^e != power for {z}^{k}");
    }
}

#[test]
fn seifert_decision_agrees_with_bounded_search_on_random_pairs() {
    // random pairs, not just aligned ones: whenever the exhaustive bounded
    // conjugator search connects g1 to g2, the decision must say conjugate
    // (its own witness is verified internally); and whenever the decision
    // says conjugate, re-verify its witness here
    let mut rng = StdRng::seed_from_u64(71);
    let mut positives = 0usize;
    for (name, p) in presentation_matrix() {
        let rank = p.alphabet().rank();
        for _ in 0..12 {
            let l1 = rng.gen_range(0..=3usize);
            let g1 = p.element(random_reduced_word(&mut rng, rank, l1), rng.gen_range(-2..=2));
            let l2 = rng.gen_range(0..=3usize);
            let g2 = p.element(random_reduced_word(&mut rng, rank, l2), rng.gen_range(-2..=2));
            let decided = p.are_conjugate(&g1, &g2).unwrap();
            if let Some(w) = &decided {
                assert!(p.equal(&p.conjugate_by(&g1, w), &g2), "{name}: witness fails");
            }
            // bounded search: conjugate g1 around and look for g2
            let mut found = false;
            let mut seen = std::collections::HashSet::new();
            let mut frontier = vec![g1.clone()];
            seen.insert(g1.clone());
            let mut letters = Vec::new();
            for i in 0..rank {
                letters.push(p.element(fibered::words::Word::gen(i), 0));
                letters.push(p.element(fibered::words::Word::gen(i).inverse(), 0));
            }
            letters.push(p.element(fibered::words::Word::empty(), 1));
            letters.push(p.element(fibered::words::Word::empty(), -1));
            'search: for _ in 0..4 {
                let mut next_frontier = Vec::new();
                for state in &frontier {
                    if p.equal(state, &g2) {
                        found = true;
                        break 'search;
                    }
                    for l in &letters {
                        let next = p.conjugate_by(state, l);
                        if seen.insert(next.clone()) {
                            next_frontier.push(next);
                        }
                    }
                }
                frontier = next_frontier;
            }
            if !found {
                found = frontier.iter().any(|s| p.equal(s, &g2));
            }
            if found {
                assert!(decided.is_some(), "{name}: oracle found a conjugator, decision says no");
                positives += 1;
            }
        }
    }
    assert!(positives > 0, "sample must contain some conjugate pairs");
}

#[test]
fn twisted_torus_windows_match_the_oracle() {
    // torus bases with a nontrivial orientation character sit outside the
    // main matrix; spot-check window exactness there too
    for pattern in [vec![("x", -1)], vec![("x", -1), ("y", -1)]] {
        for s in [0i64, 1, 2] {
            let mut eps = std::collections::BTreeMap::new();
            for (name, v) in &pattern {
                eps.insert(name.to_string(), *v);
            }
            let p = SeifertPresentation::new(fibered::seifert::BaseKind::Torus, s, &eps, 0)
                .unwrap();
            for w in all_reduced_words(2, 3) {
                for m in -1..=1 {
                    let g = p.element(w.clone(), m);
                    let pair = p.lambda_invariants(&g).unwrap();
                    let found = conjugate_offsets_oracle(&p, &g, 6, 6);
                    assert_eq!(
                        found,
                        pair.window(6),
                        "torus s={s} eps={pattern:?}: ({w}, {m}) pair {pair:?}"
                    );
                }
            }
        }
    }
}

#[test]
fn genus_three_smoke() {
    let p = SeifertPresentation::surface(3, 1).unwrap();
    let sp = p.surface_presentation().unwrap();
    assert_eq!(sp.relator().len(), 12);
    assert!(sp.is_trivial(sp.relator()));
    // the relator equals h, and a generator has lattice {0}
    let lhs = p.element(sp.relator().clone(), 0);
    assert!(p.equal(&lhs, &p.element(fibered::words::Word::empty(), 1)));
    let pair = p.lambda_invariants(&p.element(fibered::words::Word::gen(2), 0)).unwrap();
    assert_eq!((pair.lambda, pair.lambda0), (0, None));
    let c = p.element(fibered::words::Word::gen(5), 1);
    let g = p.element(fibered::words::Word::gen(0), -1);
    let g2 = p.conjugate_by(&g, &c);
    let w = p.are_conjugate(&g, &g2).unwrap().expect("constructed conjugates");
    assert!(p.equal(&p.conjugate_by(&g, &w), &g2));
}

#[test]
fn quotient_conjugacy_is_the_lattice_image() {
    // membership mod N agrees with the infinite-fiber lattice image
    let p = SeifertPresentation::torus(2);
    let g = p.element(Word::gen(0), 0);
    let pair = p.lambda_invariants(&g).unwrap();
    assert_eq!(pair.lambda, 2);
    for n_mod in [2u64, 3, 4, 6] {
        let q = p.with_fiber_modulus(n_mod);
        let image = pair.image_mod(n_mod);
        for n in 0..n_mod as i64 {
            let g1 = q.element(Word::gen(0), 0);
            let g2 = q.element(Word::gen(0), n);
            let got = q.are_conjugate(&g1, &g2).unwrap();
            assert_eq!(got.is_some(), image.contains(&n), "N={n_mod}, n={n}");
            if let Some(w) = got {
                assert!(q.equal(&q.conjugate_by(&g1, &w), &g2));
            }
        }
    }
}
