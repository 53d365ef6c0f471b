use super::{Anchoring, MotifCategory, MotifSignature, MotifTally};
use crate::store::{Event, EventStore, NodeId};
use crate::time::TimeWindow;

/// Reference counter: literal enumeration of every event triple.
///
/// Cubic in the number of window events; meant as a test oracle for stores
/// of a few hundred events.
pub fn brute_force_motifs(
    store: &EventStore,
    w: TimeWindow,
    delta_days: u32,
    anchoring: Anchoring,
) -> MotifTally {
    brute_force_events(w, store.in_window(w), delta_days, anchoring)
}

/// Same as [`brute_force_motifs`] over an already-sliced, sorted event run.
pub fn brute_force_events(
    w: TimeWindow,
    events: &[Event],
    delta_days: u32,
    anchoring: Anchoring,
) -> MotifTally {
    let mut tally = MotifTally::new(w);
    let delta = delta_days as i64;
    let m = events.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (e1, e2, e3) = (&events[i], &events[j], &events[k]);
                if (e3.day as i64) - (e1.day as i64) > delta {
                    // events are day-sorted: no later k can qualify
                    break;
                }
                let triple = [
                    (e1.sender, e1.receiver),
                    (e2.sender, e2.receiver),
                    (e3.sender, e3.receiver),
                ];
                let Some(sig) = MotifSignature::of(triple) else {
                    continue;
                };
                let category = sig.category();
                for anchor in anchors(&sig, &triple, category, anchoring) {
                    tally.add(anchor, category, 1);
                }
            }
        }
    }
    tally
}

fn anchors(
    sig: &MotifSignature,
    triple: &[(NodeId, NodeId); 3],
    category: MotifCategory,
    anchoring: Anchoring,
) -> Vec<NodeId> {
    if anchoring == Anchoring::FirstSender {
        return vec![triple[0].0];
    }
    // slot -> node, in first-appearance order
    let mut slots: Vec<NodeId> = Vec::with_capacity(3);
    for (a, b) in triple {
        for n in [*a, *b] {
            if !slots.contains(&n) {
                slots.push(n);
            }
        }
    }
    match category {
        MotifCategory::TwoNode | MotifCategory::Triangle => slots,
        _ => vec![slots[sig.centre().expect("star has a centre") as usize]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{EdgeEvent, EventStore};
    use chrono::NaiveDate;

    fn day(n: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2014, 1, 1).unwrap() + chrono::Duration::days(n)
    }

    fn store(evs: &[(&str, &str, i64)]) -> EventStore {
        EventStore::build(
            evs.iter()
                .enumerate()
                .map(|(i, (s, r, t))| EdgeEvent::new(*s, *r, day(*t), i as u64))
                .collect(),
        )
        .unwrap()
    }

    fn year() -> TimeWindow {
        TimeWindow::new(day(0), day(365)).unwrap()
    }

    #[test]
    fn zero_delta_on_distinct_days() {
        let s = store(&[("a", "b", 1), ("a", "c", 2), ("a", "b", 3)]);
        assert!(brute_force_motifs(&s, year(), 0, Anchoring::Participants).is_empty());
    }

    #[test]
    fn first_sender_anchoring() {
        let s = store(&[("b", "a", 1), ("a", "c", 2), ("a", "b", 3)]);
        let t = brute_force_motifs(&s, year(), 5, Anchoring::FirstSender);
        let b = s.node_id("b").unwrap();
        assert_eq!(t.get(b, MotifCategory::MixedStar), 1);
        assert_eq!(t.counts.len(), 1);
    }
}
