//! Lattice closure properties of orders and Shannon inequalities of the
//! plug-in entropies.

use groupcast_core::info::{assemble_joint, AdmissibleSpec};
use groupcast_core::{EntropyAssignment, Family, Label, LabelSet, Order, SymSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_order(k: u8, keep: u8, pair_bits: u64) -> Order {
    let all = Family::full(k).unwrap();
    let labels: Vec<Label> =
        all.labels().iter().enumerate().filter(|(i, _)| keep >> i & 1 == 1).map(|(_, l)| *l).collect();
    let f = Family::new(k, if labels.is_empty() { all.labels().to_vec() } else { labels }).unwrap();
    let mut pairs = Vec::new();
    let mut bit = 0;
    for &a in f.labels() {
        for &b in f.labels() {
            if a.is_proper_subset(b) {
                if pair_bits >> (bit % 64) & 1 == 1 {
                    pairs.push((a, b));
                }
                bit += 1;
            }
        }
    }
    Order::explicit(f, &pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn up_and_down_sets_form_complementary_lattices(k in 2u8..=3, keep in any::<u8>(), bits in any::<u64>()) {
        let order = random_order(k, keep, bits);
        let ground = order.family().all();
        let ups = order.up_sets(ground).unwrap();
        let downs = order.down_sets(ground).unwrap();
        prop_assert_eq!(ups.members.len(), downs.members.len());
        for &u in &ups.members {
            prop_assert!(order.is_up_set(u));
            prop_assert!(downs.members.contains(&ground.difference(u)));
            prop_assert_eq!(order.up_closure(u), u);
            for &v in &ups.members {
                prop_assert!(ups.members.contains(&u.union(v)));
                prop_assert!(ups.members.contains(&u.intersection(v)));
            }
        }
        prop_assert!(ups.members.contains(&LabelSet::EMPTY));
        prop_assert!(ups.members.contains(&ground));
    }

    #[test]
    fn order_extends_only_inclusion(k in 2u8..=3, keep in any::<u8>(), bits in any::<u64>()) {
        let order = random_order(k, keep, bits);
        let labels = order.family().labels().to_vec();
        for &a in &labels {
            prop_assert!(order.le(a, a));
            for &b in &labels {
                if order.le(a, b) && a != b {
                    prop_assert!(a.is_proper_subset(b));
                    prop_assert!(!order.le(b, a));
                }
                for &c in &labels {
                    if order.le(a, b) && order.le(b, c) {
                        prop_assert!(order.le(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn entropies_are_submodular(seed in any::<u64>(), masks in prop::collection::vec((any::<u8>(), any::<u8>()), 8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = Order::inclusion(Family::parse(2, &["1", "2", "12"]).unwrap());
        let spec = AdmissibleSpec::random(order, 2, &[2, 3, 2], 3, &mut rng).unwrap();
        let dist = assemble_joint(&spec).unwrap();
        let syms = dist.universe().symbols().to_vec();
        let pick = |m: u8| SymSet::new(syms.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, s)| *s));
        let h = |s: &SymSet| dist.entropy(s).unwrap();
        for (a, b) in masks {
            let (sa, sb) = (pick(a), pick(b));
            let both = pick(a | b);
            let common = pick(a & b);
            prop_assert!(h(&sa) + h(&sb) + 1e-9 >= h(&both) + h(&common));
            prop_assert!(h(&both) + 1e-9 >= h(&sa));
            prop_assert!(h(&sa) >= -1e-12);
        }
    }
}
