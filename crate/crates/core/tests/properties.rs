//! Structural properties of allocations and distributed estimates.

use csit_core::allocation::tightly_feasible_allocation;
use csit_core::csit::{build_distributed_csit, CsitAllocation, CsitSource, Precision, QuantizerKind};
use csit_core::ia::is_proper_network;
use csit_core::model::{gen_channel, AntennaConfig, Topology};
use proptest::prelude::*;

fn precision() -> impl Strategy<Value = Precision> {
    prop_oneof![Just(Precision::Exact), (0u32..12).prop_map(Precision::Bits), Just(Precision::None)]
}

fn allocation(users: usize) -> impl Strategy<Value = CsitAllocation> {
    proptest::collection::vec(precision(), users * users).prop_map(move |p| {
        let c = AntennaConfig::symmetric(users, 2, 1, 1).unwrap();
        CsitAllocation::from_fn(&c, |j, i| p[j * users + i])
    })
}

proptest! {
    #[test]
    fn union_of_disjoint_allocations_adds_sizes(a in allocation(3), mask in proptest::collection::vec(any::<bool>(), 9)) {
        let c = a.config().clone();
        let pick = |keep: bool| CsitAllocation::from_fn(&c, |j, i| {
            if mask[j * 3 + i] == keep { a.entry(j, i).precision } else { Precision::None }
        });
        let (x, y) = (pick(true), pick(false));
        let u = x.union(&y).unwrap();
        prop_assert_eq!(u.size(), x.size() + y.size());
        prop_assert_eq!(u.size(), a.size());
    }

    #[test]
    fn unknown_flags_match_uninformative_entries(a in allocation(3), seed in any::<u64>()) {
        let h = gen_channel(a.config(), Topology::IidRayleigh, 100.0, seed).unwrap();
        let d = build_distributed_csit(&h, CsitSource::Allocation(&a), QuantizerKind::Surrogate, seed).unwrap();
        let c = a.config();
        for j in 0..3 {
            for i in 0..3 {
                let informative = a.entry(j, i).precision.is_informative();
                for col in 0..c.total_tx() {
                    prop_assert_eq!(d.estimate(j).is_known(c.rx_offset(i), col), informative);
                }
            }
        }
    }

    #[test]
    fn table_format_round_trips(a in allocation(3)) {
        let back = CsitAllocation::from_table(a.config(), &a.to_table()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn relabeling_users_permutes_the_allocation(
        n in proptest::collection::vec((1usize..=3, 1usize..=3), 3),
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let n_tx: Vec<usize> = n.iter().map(|p| p.0).collect();
        let n_rx: Vec<usize> = n.iter().map(|p| p.1).collect();
        let a = AntennaConfig::new(n_tx.clone(), n_rx.clone(), vec![1; 3]).unwrap();
        prop_assume!(is_proper_network(&a).unwrap());
        // User u of the relabeled network is user perm[u] of the original.
        let b = AntennaConfig::new(
            perm.iter().map(|&p| n_tx[p]).collect(),
            perm.iter().map(|&p| n_rx[p]).collect(),
            vec![1; 3],
        ).unwrap();
        let (x, y) = (tightly_feasible_allocation(&a).unwrap(), tightly_feasible_allocation(&b).unwrap());
        for u in 0..3 {
            prop_assert_eq!(y.csit.size_at(u), x.csit.size_at(perm[u]));
        }
    }
}
