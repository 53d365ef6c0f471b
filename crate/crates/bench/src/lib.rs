//! Shared fixtures for the criterion benches.

use hiernet::ingest::synth_generate;
use hiernet::{EventStore, SynthConfig, TimeWindow};

/// Store generated from the IETF-like preset scaled to `per_day` events per
/// day over `years` years.
pub fn synthetic_store(per_day: f64, years: u32, seed: u64) -> EventStore {
    let mut cfg = SynthConfig::ietf_like(seed);
    cfg.end = hiernet::time::add_months(cfg.start, 12 * years);
    let total: f64 = cfg.rates.iter().flatten().sum();
    for r in cfg.rates.iter_mut().flatten() {
        *r *= per_day / total;
    }
    cfg.origin_rates = [0.0; 3];
    let (bundle, _) = synth_generate(&cfg).expect("valid preset");
    EventStore::build(bundle.edges).expect("generated events are valid")
}

/// First twelve-month window of a store built by [`synthetic_store`].
pub fn first_year(store: &EventStore) -> TimeWindow {
    let (start, _) = store.extent().expect("non-empty store");
    TimeWindow::new(start, hiernet::time::add_months(start, 12)).unwrap()
}
