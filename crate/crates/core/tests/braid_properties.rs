//! Group-theoretic invariants of braid words, norms and quasimorphisms.

use braidflow::braid::{
    band_expression, band_word, default_max_depth, extract_braid, extract_loop_braid, word_norm, word_norm_bounds,
    BraidWord, PureBraid,
};
use braidflow::mc::Seed;
use braidflow::quasimorphism::{
    homogenize_value, qm_lower_bound_word_norm, random_pure_braid, ExponentSum, LinkingNumber, LkCombination,
    Quasimorphism,
};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() }
}

fn word_strategy(n: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
    let g = (n - 1) as i32;
    prop::collection::vec((1..=g, any::<bool>()), 0..max_len)
        .prop_map(move |ls| BraidWord::new(n, ls.into_iter().map(|(k, s)| if s { k } else { -k }).collect()).unwrap())
}

fn pure_strategy(n: usize, max_len: usize) -> impl Strategy<Value = PureBraid> {
    (any::<u64>(), 0..max_len).prop_map(move |(seed, len)| random_pure_braid(n, len, &mut Seed(seed).rng()))
}

// applies one braid relation or a cancelling insertion at a position
fn rewrite(word: &BraidWord, pos: usize, kind: u8) -> BraidWord {
    let n = word.n_strands();
    let mut l = word.letters().to_vec();
    let p = pos % (l.len() + 1);
    match kind % 3 {
        0 if n >= 3 => {
            let k = (pos % (n - 2)) as i32 + 1;
            // sigma_k sigma_{k+1} sigma_k -> sigma_{k+1} sigma_k sigma_{k+1}, as an inserted identity
            l.splice(p..p, [k, k + 1, k, -(k + 1), -k, -(k + 1)]);
        }
        1 if n >= 4 => {
            l.splice(p..p, [1, 3, -1, -3]);
        }
        _ => {
            let k = (pos % (n - 1)) as i32 + 1;
            l.splice(p..p, [k, -k]);
        }
    }
    BraidWord::new(n, l).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn free_reduction_is_idempotent_and_sound(w in word_strategy(4, 30)) {
        let r = w.free_reduce();
        prop_assert_eq!(r.free_reduce(), r.clone());
        prop_assert!(r.group_eq(&w));
        prop_assert_eq!(r.permutation(), w.permutation());
    }

    #[test]
    fn linking_is_additive(a in pure_strategy(4, 8), b in pure_strategy(4, 8)) {
        let ab = a.concat(&b).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                prop_assert_eq!(ab.lk(i, j), a.lk(i, j) + b.lk(i, j));
            }
        }
    }

    #[test]
    fn linking_survives_rewrites(p in pure_strategy(4, 8), pos in 0usize..64, kind in any::<u8>()) {
        let w = rewrite(p.word(), pos, kind);
        prop_assert!(w.group_eq(p.word()));
        let q = PureBraid::new(w).unwrap();
        prop_assert_eq!(q.linking_numbers(), p.linking_numbers());
        let reduced = PureBraid::new(q.word().free_reduce()).unwrap();
        prop_assert_eq!(reduced.linking_numbers(), p.linking_numbers());
    }

    #[test]
    fn linking_is_conjugation_invariant(x in pure_strategy(3, 6), w in pure_strategy(3, 6)) {
        let c = w.concat(&x).unwrap().concat(&w.inverse()).unwrap();
        prop_assert_eq!(c.linking_numbers(), x.linking_numbers());
    }

    #[test]
    fn two_strand_norms_are_linking_numbers(w in word_strategy(2, 40)) {
        let sq = w.pow(2);
        let p = PureBraid::new(sq).unwrap();
        let e = word_norm(&p, 0).unwrap();
        prop_assert_eq!(e.exact, Some(p.lk(0, 1).unsigned_abs()));
    }

    #[test]
    fn norm_bounds_bracket_and_dominate_quasimorphisms(p in pure_strategy(3, 7)) {
        let e = word_norm_bounds(&p, default_max_depth(3)).unwrap();
        prop_assert!(e.lower <= e.upper);
        let expr = band_expression(&p).unwrap();
        prop_assert!(band_word(3, &expr).group_eq(p.word()));
        prop_assert!(expr.len() as u64 >= e.lower);
        if let Some(exact) = e.exact {
            prop_assert!(exact <= expr.len() as u64);
            let qms: Vec<Box<dyn Quasimorphism>> = vec![
                Box::new(LinkingNumber { i: 0, j: 1 }),
                Box::new(LinkingNumber { i: 1, j: 2 }),
                Box::new(LkCombination::new(3, vec![1, -2, 1])),
                Box::new(ExponentSum),
            ];
            for qm in &qms {
                prop_assert!(qm.evaluate(&p).abs() <= exact as f64 * (qm.declared_defect().unwrap() + qm.generator_max(3)));
                let lb = qm_lower_bound_word_norm(qm.as_ref(), &p, qm.generator_max(3)).unwrap();
                prop_assert!(lb <= exact);
            }
        }
    }

    #[test]
    fn four_strand_rewrites_are_faithful(p in pure_strategy(4, 6)) {
        let expr = band_expression(&p).unwrap();
        prop_assert!(band_word(4, &expr).group_eq(p.word()));
        let e = word_norm_bounds(&p, default_max_depth(4)).unwrap();
        prop_assert!(e.lower <= e.upper && e.upper <= expr.len() as u64);
    }

    #[test]
    fn homogenization_is_consistent_on_powers(p in pure_strategy(3, 5), k in 4usize..8) {
        let lk = LinkingNumber { i: 0, j: 2 };
        let a = homogenize_value(&lk, &p, k);
        let b = homogenize_value(&lk, &p, 2 * k);
        prop_assert!((b.value * 2.0 * k as f64 - a.value * k as f64 * 2.0).abs() <= 2.0 * lk.declared_defect().unwrap() + 1e-9);
    }
}

fn circling(n_orbit: usize, steps: usize, phase: f64) -> Vec<Vec<[f64; 2]>> {
    // strand 0 orbits strand 1 n_orbit times; strand 2 idles nearby
    let mut s = vec![Vec::new(), Vec::new(), Vec::new()];
    for k in 0..=steps {
        let a = phase + std::f64::consts::TAU * n_orbit as f64 * k as f64 / steps as f64;
        s[0].push([0.05 + 0.3 * a.cos(), -0.1 + 0.3 * a.sin()]);
        s[1].push([0.05, -0.1]);
        s[2].push([0.55 + 0.02 * (3.0 * a).sin(), 0.6]);
    }
    s
}

#[test]
fn refinement_leaves_words_unchanged() {
    for orbits in 1..=3 {
        let coarse = circling(orbits, 60 * orbits, 0.0);
        let fine = circling(orbits, 120 * orbits, 0.0);
        for angle in [0.2, 1.0] {
            assert_eq!(extract_braid(&coarse, angle).unwrap().word, extract_braid(&fine, angle).unwrap().word);
        }
    }
}

#[test]
fn projections_agree_in_the_group() {
    let s = circling(2, 200, 0.0);
    let reference = extract_loop_braid(&s, 0.0).unwrap();
    let p0 = reference.pure().unwrap();
    for angle in [0.35, 1.7, -2.4] {
        let e = extract_loop_braid(&s, angle).unwrap();
        let p = e.pure().unwrap();
        assert!(e.word.group_eq(&reference.word));
        assert_eq!(p.linking_numbers(), p0.linking_numbers());
        assert_eq!(e.word.permutation(), reference.word.permutation());
        assert_eq!(word_norm(&p, 10).unwrap(), word_norm(&p0, 10).unwrap());
        // the raw word changes with the angle only by conjugation
        let raw = extract_braid(&s, angle).unwrap().pure().unwrap();
        assert_eq!(raw.linking_numbers().iter().sum::<i64>(), p0.linking_numbers().iter().sum::<i64>());
    }
}
