//! Delta-bounded three-edge temporal motifs.
//!
//! A motif instance is an ordered triple of distinct events `e1 < e2 < e3`
//! under `(time, seq)` order, inside one window, with `t3 - t1 <= delta` and
//! at most three distinct nodes. Instances are counted combinatorially: one
//! event may take part in many instances.

mod brute;
mod fast;
mod signature;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::roles::RoleClass;
use crate::store::{EventStore, NodeId};
use crate::time::TimeWindow;

pub use brute::{brute_force_events, brute_force_motifs};
pub use fast::{count_motifs, enumerate_motifs};
pub use signature::{MotifCategory, MotifSignature};

/// Default look-ahead: one month.
pub const DEFAULT_DELTA_DAYS: u32 = 30;

/// Which node(s) an instance is credited to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchoring {
    /// Stars to their centre, triangles to all three nodes, two-node motifs
    /// to both nodes.
    #[default]
    Participants,
    /// Every instance to the sender of its first edge.
    FirstSender,
}

pub type CategoryCounts = [u64; 5];

/// Per-anchor, per-category instance counts in one window. Anchors with all
/// zero counts are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifTally {
    pub window: TimeWindow,
    pub counts: BTreeMap<NodeId, CategoryCounts>,
}

impl MotifTally {
    pub fn new(window: TimeWindow) -> Self {
        Self {
            window,
            counts: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, anchor: NodeId, category: MotifCategory, n: u64) {
        if n > 0 {
            self.counts.entry(anchor).or_default()[category.index()] += n;
        }
    }

    pub fn get(&self, anchor: NodeId, category: MotifCategory) -> u64 {
        self.counts
            .get(&anchor)
            .map_or(0, |c| c[category.index()])
    }

    /// Sum over anchors.
    pub fn totals(&self) -> CategoryCounts {
        let mut out = [0u64; 5];
        for c in self.counts.values() {
            for (o, v) in out.iter_mut().zip(c) {
                *o += v;
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Category counts of one role class, with four-way proportions over the
/// three-node categories when that total is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMotifs {
    pub class: RoleClass,
    pub counts: CategoryCounts,
    pub proportions: Option<[f64; 4]>,
}

impl ClassMotifs {
    pub fn three_node_total(&self) -> u64 {
        MotifCategory::THREE_NODE
            .iter()
            .map(|c| self.counts[c.index()])
            .sum()
    }

    pub fn proportion(&self, category: MotifCategory) -> Option<f64> {
        let i = MotifCategory::THREE_NODE.iter().position(|c| *c == category)?;
        self.proportions.map(|p| p[i])
    }
}

/// Aggregate a tally by anchor role class. Unclassified anchors are dropped;
/// two-node counts are carried but not normalised.
pub fn role_motif_proportions(
    tally: &MotifTally,
    class_of: impl Fn(NodeId) -> RoleClass,
) -> Vec<ClassMotifs> {
    let mut by_class: BTreeMap<RoleClass, CategoryCounts> = RoleClass::CLASSIFIED
        .iter()
        .map(|c| (*c, [0u64; 5]))
        .collect();
    for (node, counts) in &tally.counts {
        let class = class_of(*node);
        if let Some(acc) = by_class.get_mut(&class) {
            for (a, v) in acc.iter_mut().zip(counts) {
                *a += v;
            }
        }
    }
    by_class
        .into_iter()
        .map(|(class, counts)| {
            let mut out = ClassMotifs {
                class,
                counts,
                proportions: None,
            };
            let total = out.three_node_total();
            if total > 0 {
                let mut p = [0.0; 4];
                for (slot, c) in p.iter_mut().zip(MotifCategory::THREE_NODE) {
                    *slot = counts[c.index()] as f64 / total as f64;
                }
                out.proportions = Some(p);
            }
            out
        })
        .collect()
}

/// Convenience: tally for a store window with the default anchoring.
pub fn window_motifs(store: &EventStore, w: TimeWindow, delta_days: u32) -> MotifTally {
    enumerate_motifs(store, w, delta_days, Anchoring::default())
}
