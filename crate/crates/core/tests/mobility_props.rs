mod common;

use common::{random_events, window};
use hiernet::mobility::{build_panel, measures, taxonomy, TaxonomyConfig};
use hiernet::{pearson, spearman, Correlation, DegreeMode, EventStore, NodeId, RoleClass};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn series(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-50i32..50, n), prop::collection::vec(-50i32..50, n))
        .prop_map(|(a, b)| (a.into_iter().map(f64::from).collect(), b.into_iter().map(f64::from).collect()))
}

fn class_by_name(n: NodeId) -> RoleClass {
    [RoleClass::Rp, RoleClass::Wgc, RoleClass::Ad, RoleClass::Unclassified][n.index() % 4]
}

proptest! {
    #[test]
    fn correlation_in_range_and_symmetric((xs, ys) in (2usize..40).prop_flat_map(series)) {
        for f in [pearson, spearman] {
            let r = f(&xs, &ys).unwrap();
            prop_assert_eq!(r, f(&ys, &xs).unwrap());
            if let Some(r) = r {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }
    }

    #[test]
    fn pearson_affine_invariance((xs, ys) in (3usize..40).prop_flat_map(series), a in -5i32..5, b in -100i32..100) {
        prop_assume!(a != 0);
        let (a, b) = (f64::from(a), f64::from(b));
        let scaled: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        match (pearson(&xs, &ys).unwrap(), pearson(&scaled, &ys).unwrap()) {
            (Some(r), Some(s)) => prop_assert!((s - a.signum() * r).abs() < 1e-9),
            (r, s) => prop_assert_eq!(r.is_none(), s.is_none()),
        }
    }

    #[test]
    fn spearman_monotone_invariance((xs, ys) in (3usize..40).prop_flat_map(series)) {
        let cubed: Vec<f64> = xs.iter().map(|x| x * x * x + 7.0).collect();
        prop_assert_eq!(spearman(&xs, &ys).unwrap(), spearman(&cubed, &ys).unwrap());
    }

    #[test]
    fn panel_partitions_by_class(seed in any::<u64>(), events in 0usize..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = EventStore::build(random_events(&mut rng, 25, events, 365)).unwrap();
        let w = window(0, 365);
        let (w1, w2) = w.split().unwrap();
        let panel = build_panel(&store, w1, w2, DegreeMode::DirectedPairs);
        let rows = taxonomy(&store, w, class_by_name, TaxonomyConfig::default()).unwrap();
        let classified = panel.iter().filter(|r| class_by_name(r.node).is_classified()).count();
        prop_assert_eq!(rows.iter().map(|r| r.n).sum::<usize>(), classified);
        for row in &rows {
            let sub: Vec<_> = panel.iter().copied().filter(|r| class_by_name(r.node) == row.class).collect();
            let m = measures(&sub, Correlation::Pearson);
            prop_assert_eq!([row.mobility, row.neighbour_mobility, row.philanthropy, row.community], m);
        }
    }

    #[test]
    fn panel_rows_are_first_half_active(seed in any::<u64>(), events in 0usize..300) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = EventStore::build(random_events(&mut rng, 25, events, 365)).unwrap();
        let (w1, w2) = window(0, 365).split().unwrap();
        let panel = build_panel(&store, w1, w2, DegreeMode::DistinctNeighbours);
        for r in &panel {
            prop_assert!(r.deg1 >= 1.0 && r.nd1 >= 1.0);
            prop_assert!(store.in_window(w1).iter().any(|e| e.touches(r.node)));
        }
        let active = store.in_window(w1).iter().flat_map(|e| [e.sender, e.receiver]).collect::<std::collections::BTreeSet<_>>();
        prop_assert_eq!(panel.len(), active.len());
    }
}
