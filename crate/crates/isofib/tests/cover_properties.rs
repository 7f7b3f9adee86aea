mod common;

use common::*;
use isofib::atlas::abelian_groups_up_to;
use isofib::cover::{enumerate_covers, CoverConstraints, Dedup};
use isofib::CoverData;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(n: usize, seed: u64) -> Vec<CoverData> {
    let groups = abelian_groups_up_to(16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_cover(&mut rng, &groups)).collect()
}

#[test]
fn genus_from_characters_equals_riemann_hurwitz() {
    let covers = sample(1200, 7);
    for c in &covers {
        let rh = rh_genus(c);
        assert_eq!(cw_genus(c) as i64, rh, "{c}");
        assert_eq!(c.genus().unwrap() as i64, rh, "{c}");
        assert_eq!(c.profile().total() as i64, rh, "{c}");
    }
}

#[test]
fn eigenspace_dims_match_oracle() {
    for c in sample(300, 11) {
        for chi in all_tuples(c.group().factors()) {
            let idx = character(c.group(), &chi);
            assert_eq!(
                c.bundle_degree(&idx),
                if chi.iter().all(|&x| x == 0) {
                    0
                } else {
                    degree(&c, &chi)
                }
            );
            assert_eq!(c.eigen_dim(&idx), cw_dim(&c, &chi), "{c} at {idx}");
        }
    }
}

#[test]
fn carry_relation_for_all_character_pairs() {
    for c in sample(1000, 13) {
        let g = c.group();
        let chars = all_tuples(g.factors());
        for x in &chars {
            for y in &chars {
                let sum: Vec<u32> = x
                    .iter()
                    .zip(y)
                    .zip(g.factors())
                    .map(|((&a, &b), &n)| (a + b) % n)
                    .collect();
                let (cx, cy, cs) = (character(g, x), character(g, y), character(g, &sum));
                let lhs = c.bundle_degree(&cx) as i64 + c.bundle_degree(&cy) as i64 - c.bundle_degree(&cs) as i64;
                let e = exponent(g);
                let carries: i64 = c
                    .branch()
                    .iter()
                    .map(|b| {
                        let o = order(g, b.elem.coords());
                        let rx = pairing(g, x, b.elem.coords()) * o / e;
                        let ry = pairing(g, y, b.elem.coords()) * o / e;
                        if rx + ry >= o {
                            b.mult as i64
                        } else {
                            0
                        }
                    })
                    .sum();
                assert_eq!(lhs, carries, "{c} at {x:?}, {y:?}");
            }
        }
    }
}

#[test]
fn enumeration_output_is_valid_and_sorted() {
    let g = group(&[2, 4]);
    let constraints = CoverConstraints {
        genus: Some(3),
        ..Default::default()
    };
    let covers = enumerate_covers(&g, 0, &constraints).unwrap();
    assert!(!covers.is_empty());
    for c in &covers {
        assert_eq!(rh_genus(c), 3);
        assert_eq!(cw_genus(c), 3);
    }
    let again = enumerate_covers(&g, 0, &constraints).unwrap();
    assert_eq!(covers, again);
}

#[test]
fn automorphism_dedup_leaves_one_per_orbit() {
    let g = group(&[2, 2]);
    let all = enumerate_covers(
        &g,
        0,
        &CoverConstraints {
            genus: Some(2),
            ..Default::default()
        },
    )
    .unwrap();
    let reduced = enumerate_covers(
        &g,
        0,
        &CoverConstraints {
            genus: Some(2),
            dedup: Dedup::Automorphisms,
            ..Default::default()
        },
    )
    .unwrap();
    let auts = g.automorphisms().unwrap();
    assert!(reduced.len() < all.len());
    // every cover is the image of exactly one representative
    for c in &all {
        let hits = reduced
            .iter()
            .filter(|r| auts.iter().any(|a| r.transform(a).branch() == c.branch()))
            .count();
        assert_eq!(hits, 1, "{c}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dims_invariant_under_automorphisms(seed in any::<u64>()) {
        let c = sample(1, seed).pop().unwrap();
        let g = c.group();
        let auts = g.automorphisms().unwrap();
        let a = &auts[(seed as usize) % auts.len()];
        let moved = c.transform(a);
        for chi in g.characters() {
            prop_assert_eq!(c.eigen_dim(&chi), moved.eigen_dim(&a.apply_character(g, &chi)));
        }
    }

    #[test]
    fn spec_roundtrip(seed in any::<u64>()) {
        let c = sample(1, seed).pop().unwrap();
        let text = serde_json::to_string(&c.to_spec()).unwrap();
        let back = CoverData::from_spec(c.group(), &serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
