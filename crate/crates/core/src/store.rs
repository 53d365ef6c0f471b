//! Immutable edge-event store, window graphs, degree and activity.

use std::collections::{BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::{from_day, to_day, Day, TimeWindow};

/// One directed, timestamped interaction as read from an interchange file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEvent {
    pub sender: String,
    pub receiver: String,
    pub date: NaiveDate,
    pub list: Option<String>,
    pub message_id: Option<String>,
    pub seq: u64,
}

impl EdgeEvent {
    pub fn new(sender: impl Into<String>, receiver: impl Into<String>, date: NaiveDate, seq: u64) -> Self {
        Self {
            sender: sender.into(),
            receiver: receiver.into(),
            date,
            list: None,
            message_id: None,
            seq,
        }
    }

    pub fn with_list(mut self, list: impl Into<String>) -> Self {
        self.list = Some(list.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ListId(pub u32);

/// Interned event as held by the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub sender: NodeId,
    pub receiver: NodeId,
    pub day: Day,
    pub list: Option<ListId>,
    pub seq: u64,
}

impl Event {
    pub fn touches(&self, n: NodeId) -> bool {
        self.sender == n || self.receiver == n
    }

    pub fn date(&self) -> NaiveDate {
        from_day(self.day)
    }
}

/// Events sorted by `(time, seq)`. Node and list identifiers are interned in
/// lexicographic order, so ids do not depend on input order.
#[derive(Debug, Clone, Default)]
pub struct EventStore {
    events: Vec<Event>,
    nodes: Vec<String>,
    node_index: HashMap<String, NodeId>,
    lists: Vec<String>,
    list_index: HashMap<String, ListId>,
}

impl EventStore {
    pub fn build(events: Vec<EdgeEvent>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(events.len());
        for e in &events {
            if e.sender == e.receiver {
                return Err(Error::SelfLoop {
                    seq: e.seq,
                    node: e.sender.clone(),
                });
            }
            if !seen.insert(e.seq) {
                return Err(Error::DuplicateSeq(e.seq));
            }
        }

        let names: BTreeSet<&str> = events
            .iter()
            .flat_map(|e| [e.sender.as_str(), e.receiver.as_str()])
            .collect();
        let nodes: Vec<String> = names.into_iter().map(str::to_owned).collect();
        let node_index: HashMap<String, NodeId> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), NodeId(i as u32)))
            .collect();

        let list_names: BTreeSet<&str> = events.iter().filter_map(|e| e.list.as_deref()).collect();
        let lists: Vec<String> = list_names.into_iter().map(str::to_owned).collect();
        let list_index: HashMap<String, ListId> = lists
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), ListId(i as u32)))
            .collect();

        let mut interned: Vec<Event> = events
            .iter()
            .map(|e| Event {
                sender: node_index[&e.sender],
                receiver: node_index[&e.receiver],
                day: to_day(e.date),
                list: e.list.as_ref().map(|l| list_index[l]),
                seq: e.seq,
            })
            .collect();
        interned.sort_unstable_by_key(|e| (e.day, e.seq));

        Ok(Self {
            events: interned,
            nodes,
            node_index,
            lists,
            list_index,
        })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// First and last event dates, `None` when empty.
    pub fn extent(&self) -> Option<(NaiveDate, NaiveDate)> {
        Some((self.events.first()?.date(), self.events.last()?.date()))
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Events with `start <= date < end`, in `(time, seq)` order.
    pub fn in_window(&self, w: TimeWindow) -> &[Event] {
        let (lo, hi) = (w.start_day(), w.end_day());
        let a = self.events.partition_point(|e| e.day < lo);
        let b = self.events.partition_point(|e| e.day < hi);
        &self.events[a..b]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.nodes[id.index()]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn list_name(&self, id: ListId) -> &str {
        &self.lists[id.0 as usize]
    }

    pub fn list_id(&self, name: &str) -> Option<ListId> {
        self.list_index.get(name).copied()
    }

    pub fn list_names(&self) -> &[String] {
        &self.lists
    }

    /// Back to interchange form (ids resolved, message ids dropped).
    pub fn to_edge_events(&self) -> Vec<EdgeEvent> {
        self.events
            .iter()
            .map(|e| EdgeEvent {
                sender: self.node_name(e.sender).to_owned(),
                receiver: self.node_name(e.receiver).to_owned(),
                date: e.date(),
                list: e.list.map(|l| self.list_name(l).to_owned()),
                message_id: None,
                seq: e.seq,
            })
            .collect()
    }
}

pub fn build_store(events: Vec<EdgeEvent>) -> Result<EventStore> {
    EventStore::build(events)
}

/// How node degree is counted in a window graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// Distinct ordered pairs incident to the node; `a->b` and `b->a` are two.
    #[default]
    DirectedPairs,
    /// Distinct neighbours regardless of direction.
    DistinctNeighbours,
}

/// Aggregation of all events in a window into distinct directed edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowedGraph {
    pub window: TimeWindow,
    /// Sorted, distinct.
    pub nodes: Vec<NodeId>,
    /// Sorted by pair; every multiplicity is at least one.
    pub edges: Vec<((NodeId, NodeId), u32)>,
}

impl WindowedGraph {
    pub fn from_events(window: TimeWindow, events: &[Event]) -> Self {
        let mut pairs: Vec<(NodeId, NodeId)> =
            events.iter().map(|e| (e.sender, e.receiver)).collect();
        pairs.sort_unstable();
        let mut edges: Vec<((NodeId, NodeId), u32)> = Vec::new();
        for p in pairs {
            match edges.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => edges.push((p, 1)),
            }
        }
        let mut nodes: Vec<NodeId> = edges.iter().flat_map(|((a, b), _)| [*a, *b]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        Self {
            window,
            nodes,
            edges,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn multiplicity(&self, from: NodeId, to: NodeId) -> u32 {
        self.edges
            .binary_search_by_key(&(from, to), |(p, _)| *p)
            .map(|i| self.edges[i].1)
            .unwrap_or(0)
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.edges.iter().map(|(_, m)| *m as u64).sum()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.nodes.binary_search(&n).is_ok()
    }

    pub fn degree(&self, n: NodeId, mode: DegreeMode) -> u32 {
        match mode {
            DegreeMode::DirectedPairs => self
                .edges
                .iter()
                .filter(|((a, b), _)| *a == n || *b == n)
                .count() as u32,
            DegreeMode::DistinctNeighbours => self.neighbours(n).len() as u32,
        }
    }

    /// Degree of every node in the graph.
    pub fn degrees(&self, mode: DegreeMode) -> HashMap<NodeId, u32> {
        let mut out: HashMap<NodeId, u32> = HashMap::with_capacity(self.nodes.len());
        match mode {
            DegreeMode::DirectedPairs => {
                for ((a, b), _) in &self.edges {
                    *out.entry(*a).or_default() += 1;
                    *out.entry(*b).or_default() += 1;
                }
            }
            DegreeMode::DistinctNeighbours => {
                for (n, nbrs) in self.adjacency() {
                    out.insert(n, nbrs.len() as u32);
                }
            }
        }
        out
    }

    /// Undirected neighbour sets, each sorted.
    pub fn adjacency(&self) -> HashMap<NodeId, Vec<NodeId>> {
        let mut adj: HashMap<NodeId, Vec<NodeId>> = HashMap::with_capacity(self.nodes.len());
        for ((a, b), _) in &self.edges {
            adj.entry(*a).or_default().push(*b);
            adj.entry(*b).or_default().push(*a);
        }
        for v in adj.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        adj
    }

    pub fn neighbours(&self, n: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .filter_map(|((a, b), _)| {
                if *a == n {
                    Some(*b)
                } else if *b == n {
                    Some(*a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn window_graph(store: &EventStore, w: TimeWindow) -> WindowedGraph {
    WindowedGraph::from_events(w, store.in_window(w))
}

/// Distinct ordered pairs incident to `n`; 0 when absent.
pub fn degree(g: &WindowedGraph, n: NodeId) -> u32 {
    g.degree(n, DegreeMode::DirectedPairs)
}

/// Events in `w` with `n` as sender or receiver, duplicates included.
pub fn activity(store: &EventStore, w: TimeWindow, n: NodeId) -> u64 {
    store.in_window(w).iter().filter(|e| e.touches(n)).count() as u64
}

/// Activity of every node appearing in `w`.
pub fn activity_counts(store: &EventStore, w: TimeWindow) -> HashMap<NodeId, u64> {
    let mut out = HashMap::new();
    for e in store.in_window(w) {
        *out.entry(e.sender).or_default() += 1;
        *out.entry(e.receiver).or_default() += 1;
    }
    out
}

pub fn active_nodes(store: &EventStore, w: TimeWindow) -> BTreeSet<NodeId> {
    store
        .in_window(w)
        .iter()
        .flat_map(|e| [e.sender, e.receiver])
        .collect()
}
