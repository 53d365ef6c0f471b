//! Linear-scan motif counter.
//!
//! Every instance has exactly one first event, so each family is counted by
//! walking candidate first events in order and sizing the set of valid
//! `(e2, e3)` completions inside the look-ahead `(e1, t1 + delta]`:
//!
//! * stars, per centre node, from running per-neighbour direction counts;
//! * two-node motifs, per node pair, as `C(window, 2)`;
//! * triangles, per static triangle, from running counts of the three sides.

use std::collections::HashMap;

use super::{Anchoring, MotifCategory, MotifTally};
use crate::store::{Event, EventStore, NodeId};
use crate::time::{Day, TimeWindow};

const OUT: usize = 0;
const IN: usize = 1;

pub fn enumerate_motifs(
    store: &EventStore,
    w: TimeWindow,
    delta_days: u32,
    anchoring: Anchoring,
) -> MotifTally {
    count_motifs(w, store.in_window(w), delta_days, anchoring)
}

/// Count motifs over a sorted event run (all events assumed inside `w`).
pub fn count_motifs(
    w: TimeWindow,
    events: &[Event],
    delta_days: u32,
    anchoring: Anchoring,
) -> MotifTally {
    let mut tally = MotifTally::new(w);
    if events.len() < 3 {
        return tally;
    }
    let ctx = Context::new(events, delta_days as Day);
    let mut acc = vec![[0u64; 5]; ctx.nodes.len()];
    ctx.stars(anchoring, &mut acc);
    ctx.two_node(anchoring, &mut acc);
    ctx.triangles(anchoring, &mut acc);
    for (local, counts) in acc.into_iter().enumerate() {
        if counts.iter().any(|c| *c > 0) {
            tally.counts.insert(ctx.nodes[local], counts);
        }
    }
    tally
}

struct Context<'a> {
    events: &'a [Event],
    delta: Day,
    /// local index -> node
    nodes: Vec<NodeId>,
    /// per event: (local sender, local receiver)
    ends: Vec<(u32, u32)>,
    /// per local node: incident event indices, ascending
    incident: Vec<Vec<u32>>,
    /// unordered local pair (lo, hi) -> event indices, ascending
    pairs: HashMap<(u32, u32), Vec<u32>>,
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

impl<'a> Context<'a> {
    fn new(events: &'a [Event], delta: Day) -> Self {
        let mut local: HashMap<NodeId, u32> = HashMap::new();
        let mut nodes = Vec::new();
        let mut intern = |n: NodeId| -> u32 {
            *local.entry(n).or_insert_with(|| {
                nodes.push(n);
                nodes.len() as u32 - 1
            })
        };
        let ends: Vec<(u32, u32)> = events
            .iter()
            .map(|e| (intern(e.sender), intern(e.receiver)))
            .collect();
        let mut incident = vec![Vec::new(); nodes.len()];
        let mut pairs: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        for (i, &(s, r)) in ends.iter().enumerate() {
            incident[s as usize].push(i as u32);
            incident[r as usize].push(i as u32);
            pairs.entry((s.min(r), s.max(r))).or_default().push(i as u32);
        }
        Self {
            events,
            delta,
            nodes,
            ends,
            incident,
            pairs,
        }
    }

    fn day(&self, i: u32) -> Day {
        self.events[i as usize].day
    }

    fn sender(&self, i: u32) -> u32 {
        self.ends[i as usize].0
    }

    /// Three-node stars, counted at each centre.
    fn stars(&self, anchoring: Anchoring, acc: &mut [[u64; 5]]) {
        // per-neighbour direction counts inside the look-ahead, reset per centre
        let mut nb_cnt: Vec<[u64; 2]> = vec![[0; 2]; self.nodes.len()];
        for (centre, list) in self.incident.iter().enumerate() {
            if list.len() < 3 {
                continue;
            }
            let centre = centre as u32;
            let view: Vec<(u32, usize, Day)> = list
                .iter()
                .map(|&i| {
                    let (s, r) = self.ends[i as usize];
                    if s == centre {
                        (r, OUT, self.day(i))
                    } else {
                        (s, IN, self.day(i))
                    }
                })
                .collect();

            let mut look = Lookahead::default();
            let mut end = 0usize;
            for (i, &(x, d1, t1)) in view.iter().enumerate() {
                if end > i {
                    look.pop(&mut nb_cnt, view[i].0, view[i].1);
                } else {
                    end = i + 1;
                }
                while end < view.len() && view[end].2 - t1 <= self.delta {
                    look.push(&mut nb_cnt, view[end].0, view[end].1);
                    end += 1;
                }
                let a = nb_cnt[x as usize];
                let b = [look.cnt[OUT] - a[OUT], look.cnt[IN] - a[IN]];
                // (e2, e3) share a neighbour other than x, or exactly one is on x
                let oo = look.same[0] - choose2(a[OUT]) + a[OUT] * b[OUT];
                let ii = look.same[1] - choose2(a[IN]) + a[IN] * b[IN];
                let mix = look.same[2] - a[OUT] * a[IN] + a[OUT] * b[IN] + a[IN] * b[OUT];
                let (outward, inward, mixed) = if d1 == OUT {
                    (oo, 0, ii + mix)
                } else {
                    (0, ii, oo + mix)
                };
                let anchor = match anchoring {
                    Anchoring::Participants => centre,
                    Anchoring::FirstSender if d1 == OUT => centre,
                    Anchoring::FirstSender => x,
                };
                let slot = &mut acc[anchor as usize];
                slot[MotifCategory::OutwardStar.index()] += outward;
                slot[MotifCategory::InwardStar.index()] += inward;
                slot[MotifCategory::MixedStar.index()] += mixed;
            }
            // reset for the next centre
            for &(x, _, _) in &view {
                nb_cnt[x as usize] = [0; 2];
            }
        }
    }

    fn two_node(&self, anchoring: Anchoring, acc: &mut [[u64; 5]]) {
        let idx = MotifCategory::TwoNode.index();
        for (&(u, v), list) in &self.pairs {
            if list.len() < 3 {
                continue;
            }
            let mut end = 0usize;
            for (i, &e) in list.iter().enumerate() {
                end = end.max(i + 1);
                let t1 = self.day(e);
                while end < list.len() && self.day(list[end]) - t1 <= self.delta {
                    end += 1;
                }
                let n = choose2((end - i - 1) as u64);
                if n == 0 {
                    continue;
                }
                match anchoring {
                    Anchoring::Participants => {
                        acc[u as usize][idx] += n;
                        acc[v as usize][idx] += n;
                    }
                    Anchoring::FirstSender => acc[self.sender(e) as usize][idx] += n,
                }
            }
        }
    }

    fn triangles(&self, anchoring: Anchoring, acc: &mut [[u64; 5]]) {
        let n = self.nodes.len();
        // undirected static adjacency, oriented from lower to higher rank
        let mut deg = vec![0usize; n];
        for &(u, v) in self.pairs.keys() {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let rank = |x: u32| (deg[x as usize], x);
        let mut higher: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in self.pairs.keys() {
            if rank(u) < rank(v) {
                higher[u as usize].push(v);
            } else {
                higher[v as usize].push(u);
            }
        }
        for h in &mut higher {
            h.sort_unstable();
        }

        let idx = MotifCategory::Triangle.index();
        let mut mark = vec![false; n];
        let mut merged: Vec<(u32, u8)> = Vec::new();
        for u in 0..n as u32 {
            for &v in &higher[u as usize] {
                mark[v as usize] = true;
            }
            for &v in &higher[u as usize] {
                for &x in &higher[v as usize] {
                    if !mark[x as usize] {
                        continue;
                    }
                    let sides = [
                        &self.pairs[&(u.min(v), u.max(v))],
                        &self.pairs[&(v.min(x), v.max(x))],
                        &self.pairs[&(u.min(x), u.max(x))],
                    ];
                    merge3(sides, &mut merged);
                    let mut total = 0u64;
                    let mut cnt = [0u64; 3];
                    let mut end = 0usize;
                    for i in 0..merged.len() {
                        let (e1, side) = merged[i];
                        if end > i {
                            cnt[merged[i].1 as usize] -= 1;
                        } else {
                            end = i + 1;
                        }
                        let t1 = self.day(e1);
                        while end < merged.len() && self.day(merged[end].0) - t1 <= self.delta {
                            cnt[merged[end].1 as usize] += 1;
                            end += 1;
                        }
                        let k = match side {
                            0 => cnt[1] * cnt[2],
                            1 => cnt[0] * cnt[2],
                            _ => cnt[0] * cnt[1],
                        };
                        if k == 0 {
                            continue;
                        }
                        match anchoring {
                            Anchoring::Participants => total += k,
                            Anchoring::FirstSender => acc[self.sender(e1) as usize][idx] += k,
                        }
                    }
                    if total > 0 {
                        for node in [u, v, x] {
                            acc[node as usize][idx] += total;
                        }
                    }
                }
            }
            for &v in &higher[u as usize] {
                mark[v as usize] = false;
            }
        }
    }
}

/// Running counts of the events strictly after the current first event and
/// within its look-ahead, at one star centre.
#[derive(Default)]
struct Lookahead {
    cnt: [u64; 2],
    /// same-neighbour unordered pairs by direction multiset: out/out, in/in, mixed
    same: [u64; 3],
}

impl Lookahead {
    fn push(&mut self, nb_cnt: &mut [[u64; 2]], nb: u32, dir: usize) {
        let c = &mut nb_cnt[nb as usize];
        if dir == OUT {
            self.same[0] += c[OUT];
            self.same[2] += c[IN];
        } else {
            self.same[1] += c[IN];
            self.same[2] += c[OUT];
        }
        c[dir] += 1;
        self.cnt[dir] += 1;
    }

    fn pop(&mut self, nb_cnt: &mut [[u64; 2]], nb: u32, dir: usize) {
        let c = &mut nb_cnt[nb as usize];
        c[dir] -= 1;
        self.cnt[dir] -= 1;
        if dir == OUT {
            self.same[0] -= c[OUT];
            self.same[2] -= c[IN];
        } else {
            self.same[1] -= c[IN];
            self.same[2] -= c[OUT];
        }
    }
}

/// Merge three ascending index lists, tagging each entry with its side.
fn merge3(sides: [&Vec<u32>; 3], out: &mut Vec<(u32, u8)>) {
    out.clear();
    out.reserve(sides.iter().map(|s| s.len()).sum());
    let mut pos = [0usize; 3];
    loop {
        let mut best: Option<(u32, u8)> = None;
        for (tag, side) in sides.iter().enumerate() {
            if let Some(&e) = side.get(pos[tag]) {
                if best.is_none_or(|(b, _)| e < b) {
                    best = Some((e, tag as u8));
                }
            }
        }
        match best {
            Some((e, tag)) => {
                out.push((e, tag));
                pos[tag as usize] += 1;
            }
            None => break,
        }
    }
}
