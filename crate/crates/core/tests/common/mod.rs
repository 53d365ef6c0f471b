#![allow(dead_code)]

use chrono::{Duration, NaiveDate};
use hiernet::roles::{RoleInterval, RoleKind};
use hiernet::store::EdgeEvent;
use hiernet::{EventStore, TimeWindow};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn base() -> NaiveDate {
    NaiveDate::from_ymd_opt(2014, 1, 1).unwrap()
}

pub fn day(n: i64) -> NaiveDate {
    base() + Duration::days(n)
}

/// Random events over `nodes` nodes on days `0..span_days`, with shuffled
/// sequence numbers so `seq` order differs from generation order.
pub fn random_events(rng: &mut impl Rng, nodes: usize, events: usize, span_days: i64) -> Vec<EdgeEvent> {
    let mut seqs: Vec<u64> = (0..events as u64).collect();
    seqs.shuffle(rng);
    (0..events)
        .map(|i| {
            let s = rng.random_range(0..nodes);
            let mut r = rng.random_range(0..nodes - 1);
            if r >= s {
                r += 1;
            }
            EdgeEvent::new(format!("n{s}"), format!("n{r}"), day(rng.random_range(0..span_days)), seqs[i])
        })
        .collect()
}

pub fn random_store(rng: &mut impl Rng, max_nodes: usize, max_events: usize, span_days: i64) -> EventStore {
    let nodes = rng.random_range(2..=max_nodes);
    let events = rng.random_range(0..=max_events);
    EventStore::build(random_events(rng, nodes, events, span_days)).unwrap()
}

/// Random role table over persons `p0..p{persons}` on days `0..span_days`.
pub fn random_role_table(rng: &mut impl Rng, persons: usize, span_days: i64) -> Vec<RoleInterval> {
    let mut out = Vec::new();
    for p in 0..persons {
        for _ in 0..rng.random_range(0..4) {
            let kind = if rng.random_bool(0.3) { RoleKind::Ad } else { RoleKind::Wgc };
            let start = rng.random_range(0..span_days);
            let end = (!rng.random_bool(0.2)).then(|| start + rng.random_range(1..span_days));
            out.push(RoleInterval {
                person: format!("p{p}"),
                kind,
                group: (kind == RoleKind::Wgc).then(|| format!("g{}", rng.random_range(0..3))),
                start: day(start),
                end: end.map(day),
            });
        }
    }
    out
}

pub fn window(from: i64, to: i64) -> TimeWindow {
    TimeWindow::new(day(from), day(to)).unwrap()
}
