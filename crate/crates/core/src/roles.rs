//! Hierarchy roles: interval tables, per-window role resolution and edge
//! direction labels.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::EventStore;
use crate::time::TimeWindow;

/// Earliest date with reliable chair data in the upstream role source.
pub const DEFAULT_ROLES_VALID_FROM: (i32, u32, u32) = (2012, 6, 21);

pub fn default_roles_valid_from() -> NaiveDate {
    let (y, m, d) = DEFAULT_ROLES_VALID_FROM;
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RoleKind {
    #[serde(rename = "WGC")]
    Wgc,
    #[serde(rename = "AD")]
    Ad,
}

impl fmt::Display for RoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoleKind::Wgc => "WGC",
            RoleKind::Ad => "AD",
        })
    }
}

impl FromStr for RoleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "WGC" | "wgc" => Ok(RoleKind::Wgc),
            "AD" | "ad" => Ok(RoleKind::Ad),
            other => Err(format!("unknown role kind {other:?} (expected WGC or AD)")),
        }
    }
}

/// Role class of a node within one window. Ordered by rank, `Unclassified` last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RoleClass {
    #[serde(rename = "RP")]
    Rp,
    #[serde(rename = "WGC")]
    Wgc,
    #[serde(rename = "AD")]
    Ad,
    #[serde(rename = "UNCLASSIFIED")]
    Unclassified,
}

impl RoleClass {
    pub const CLASSIFIED: [RoleClass; 3] = [RoleClass::Rp, RoleClass::Wgc, RoleClass::Ad];
    pub const ALL: [RoleClass; 4] = [
        RoleClass::Rp,
        RoleClass::Wgc,
        RoleClass::Ad,
        RoleClass::Unclassified,
    ];

    /// RP < WGC < AD; `None` for unclassified.
    pub fn rank(self) -> Option<u8> {
        match self {
            RoleClass::Rp => Some(0),
            RoleClass::Wgc => Some(1),
            RoleClass::Ad => Some(2),
            RoleClass::Unclassified => None,
        }
    }

    pub fn is_classified(self) -> bool {
        self.rank().is_some()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RoleClass::Rp => "RP",
            RoleClass::Wgc => "WGC",
            RoleClass::Ad => "AD",
            RoleClass::Unclassified => "UNCLASSIFIED",
        }
    }
}

impl fmt::Display for RoleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One person holding one role over `[start, end)`; `end = None` is open.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RoleInterval {
    pub person: String,
    pub kind: RoleKind,
    pub group: Option<String>,
    pub start: NaiveDate,
    pub end: Option<NaiveDate>,
}

impl RoleInterval {
    pub fn covers_date(&self, t: NaiveDate) -> bool {
        self.start <= t && self.end.is_none_or(|e| t < e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleAssignment {
    pub person: String,
    pub window: TimeWindow,
    pub class: RoleClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeDirectionLabel {
    Up,
    Down,
    Lateral,
    Unclassified,
}

pub fn label_edge(src: RoleClass, dst: RoleClass) -> EdgeDirectionLabel {
    match (src.rank(), dst.rank()) {
        (Some(a), Some(b)) if a < b => EdgeDirectionLabel::Up,
        (Some(a), Some(b)) if a > b => EdgeDirectionLabel::Down,
        (Some(_), Some(_)) => EdgeDirectionLabel::Lateral,
        _ => EdgeDirectionLabel::Unclassified,
    }
}

/// Refuse role-stratified metrics on windows starting before the role horizon.
pub fn check_role_horizon(w: TimeWindow, valid_from: NaiveDate) -> Result<()> {
    if w.start() < valid_from {
        Err(Error::BeforeRoleHorizon {
            start: w.start(),
            valid_from,
        })
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Group events → chair intervals

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupEventKind {
    ChairAdded,
    ChairRemoved,
    GroupCreated,
    GroupConcluded,
    GroupActivated,
}

impl GroupEventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupEventKind::ChairAdded => "chair_added",
            GroupEventKind::ChairRemoved => "chair_removed",
            GroupEventKind::GroupCreated => "group_created",
            GroupEventKind::GroupConcluded => "group_concluded",
            GroupEventKind::GroupActivated => "group_activated",
        }
    }

    pub fn needs_person(self) -> bool {
        matches!(self, GroupEventKind::ChairAdded | GroupEventKind::ChairRemoved)
    }
}

impl FromStr for GroupEventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "chair_added" => GroupEventKind::ChairAdded,
            "chair_removed" => GroupEventKind::ChairRemoved,
            "group_created" => GroupEventKind::GroupCreated,
            "group_concluded" => GroupEventKind::GroupConcluded,
            "group_activated" => GroupEventKind::GroupActivated,
            other => return Err(format!("unknown group event kind {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupEvent {
    pub group: String,
    pub person: Option<String>,
    pub kind: GroupEventKind,
    pub date: NaiveDate,
}

/// Lifetime of a group, `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpan {
    pub group: String,
    pub start: NaiveDate,
    pub end: Option<NaiveDate>,
}

impl GroupSpan {
    pub fn covers(&self, t: NaiveDate) -> bool {
        self.start <= t && self.end.is_none_or(|e| t < e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleWarning {
    pub group: String,
    pub person: Option<String>,
    pub date: NaiveDate,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ChairTable {
    pub intervals: Vec<RoleInterval>,
    pub warnings: Vec<RoleWarning>,
}

fn group_event_rank(kind: GroupEventKind) -> u8 {
    // lifecycle first on a shared date, so a same-day chair_added sees the group
    match kind {
        GroupEventKind::GroupCreated | GroupEventKind::GroupActivated => 0,
        GroupEventKind::ChairAdded => 1,
        GroupEventKind::ChairRemoved => 2,
        GroupEventKind::GroupConcluded => 3,
    }
}

fn by_group(events: &[GroupEvent]) -> BTreeMap<&str, Vec<&GroupEvent>> {
    let mut grouped: BTreeMap<&str, Vec<&GroupEvent>> = BTreeMap::new();
    for e in events {
        grouped.entry(e.group.as_str()).or_default().push(e);
    }
    for evs in grouped.values_mut() {
        // stable: file order survives among equal keys
        evs.sort_by_key(|e| (e.date, group_event_rank(e.kind)));
    }
    grouped
}

/// Chair intervals from group events.
///
/// `chair_added` opens, `chair_removed` closes. The earliest chair start in a
/// group is pulled back to the group's creation/activation and the latest
/// chair end is pushed out to its conclusion. Chairs still open at conclusion
/// end there; chairs in unconcluded groups stay open.
pub fn role_table_from_group_events(events: &[GroupEvent]) -> ChairTable {
    let mut table = ChairTable::default();
    let spans: HashMap<String, GroupSpan> = group_spans(events)
        .into_iter()
        .map(|s| (s.group.clone(), s))
        .collect();

    for (group, evs) in by_group(events) {
        let mut open: BTreeMap<&str, NaiveDate> = BTreeMap::new();
        let mut closed: Vec<(String, NaiveDate, Option<NaiveDate>)> = Vec::new();
        for e in evs {
            let Some(person) = e.person.as_deref() else {
                if e.kind.needs_person() {
                    table.warnings.push(RoleWarning {
                        group: group.to_owned(),
                        person: None,
                        date: e.date,
                        message: format!("{} without a person, dropped", e.kind.as_str()),
                    });
                }
                continue;
            };
            match e.kind {
                GroupEventKind::ChairAdded => {
                    if open.contains_key(person) {
                        table.warnings.push(RoleWarning {
                            group: group.to_owned(),
                            person: Some(person.to_owned()),
                            date: e.date,
                            message: "chair_added for a chair already open, dropped".into(),
                        });
                    } else {
                        open.insert(person, e.date);
                    }
                }
                GroupEventKind::ChairRemoved => match open.remove(person) {
                    Some(start) if start < e.date => {
                        closed.push((person.to_owned(), start, Some(e.date)))
                    }
                    // zero-length tenure: nothing to record
                    Some(_) => {}
                    None => table.warnings.push(RoleWarning {
                        group: group.to_owned(),
                        person: Some(person.to_owned()),
                        date: e.date,
                        message: "chair_removed without matching chair_added, dropped".into(),
                    }),
                },
                _ => {}
            }
        }
        let span = spans.get(group);
        let conclusion = span.and_then(|s| s.end);
        for (person, start) in open {
            let end = conclusion.filter(|c| *c > start);
            closed.push((person.to_owned(), start, end));
        }
        if closed.is_empty() {
            continue;
        }
        if let Some(span) = span {
            let first = closed.iter().map(|c| c.1).min().unwrap();
            if span.start < first {
                for c in closed.iter_mut().filter(|c| c.1 == first) {
                    c.1 = span.start;
                }
            }
            if let Some(end) = span.end {
                let all_closed = closed.iter().all(|c| c.2.is_some());
                if all_closed {
                    let last = closed.iter().filter_map(|c| c.2).max().unwrap();
                    if last < end {
                        for c in closed.iter_mut().filter(|c| c.2 == Some(last)) {
                            c.2 = Some(end);
                        }
                    }
                }
            }
        }
        for (person, start, end) in closed {
            table.intervals.push(RoleInterval {
                person,
                kind: RoleKind::Wgc,
                group: Some(group.to_owned()),
                start,
                end,
            });
        }
    }
    table.intervals.sort();
    table
}

/// Group lifetimes from creation/activation to conclusion. Groups with no
/// lifecycle event start at their first chair event.
pub fn group_spans(events: &[GroupEvent]) -> Vec<GroupSpan> {
    let mut out = Vec::new();
    for (group, evs) in by_group(events) {
        let start = evs
            .iter()
            .filter(|e| {
                matches!(
                    e.kind,
                    GroupEventKind::GroupCreated | GroupEventKind::GroupActivated
                )
            })
            .map(|e| e.date)
            .min()
            .or_else(|| evs.iter().map(|e| e.date).min());
        let Some(start) = start else { continue };
        let end = evs
            .iter()
            .filter(|e| e.kind == GroupEventKind::GroupConcluded)
            .map(|e| e.date)
            .max()
            .filter(|e| *e > start);
        out.push(GroupSpan {
            group: group.to_owned(),
            start,
            end,
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Window role resolution

type Span = (NaiveDate, Option<NaiveDate>);

/// Per-person merged role spans, ready for repeated window queries.
#[derive(Debug, Clone, Default)]
pub struct RoleIndex {
    people: HashMap<String, PersonRoles>,
}

#[derive(Debug, Clone, Default)]
struct PersonRoles {
    wgc: Vec<Span>,
    ad: Vec<Span>,
}

/// Union of overlapping or touching spans, sorted by start.
fn merge_spans(mut spans: Vec<Span>) -> Vec<Span> {
    spans.sort();
    let mut out: Vec<Span> = Vec::with_capacity(spans.len());
    for (s, e) in spans {
        match out.last_mut() {
            Some((_, last_end)) if last_end.is_none_or(|le| s <= le) => {
                *last_end = match (*last_end, e) {
                    (None, _) | (_, None) => None,
                    (Some(a), Some(b)) => Some(a.max(b)),
                };
            }
            _ => out.push((s, e)),
        }
    }
    out
}

impl RoleIndex {
    pub fn new(table: &[RoleInterval]) -> Self {
        let mut raw: HashMap<&str, (Vec<Span>, Vec<Span>)> = HashMap::new();
        for r in table {
            let entry = raw.entry(r.person.as_str()).or_default();
            match r.kind {
                RoleKind::Wgc => entry.0.push((r.start, r.end)),
                RoleKind::Ad => entry.1.push((r.start, r.end)),
            }
        }
        let people = raw
            .into_iter()
            .map(|(p, (wgc, ad))| {
                (
                    p.to_owned(),
                    PersonRoles {
                        wgc: merge_spans(wgc),
                        ad: merge_spans(ad),
                    },
                )
            })
            .collect();
        Self { people }
    }

    pub fn has_any_role(&self, person: &str) -> bool {
        self.people.contains_key(person)
    }

    /// AD if held for the whole window, else WGC if held for the whole window,
    /// else UNCLASSIFIED if any role touches the window or the person holds a
    /// role at some other time, else RP.
    pub fn resolve(&self, person: &str, w: TimeWindow) -> RoleClass {
        let Some(roles) = self.people.get(person) else {
            return RoleClass::Rp;
        };
        if roles.ad.iter().any(|(s, e)| w.within(*s, *e)) {
            RoleClass::Ad
        } else if roles.wgc.iter().any(|(s, e)| w.within(*s, *e)) {
            RoleClass::Wgc
        } else {
            RoleClass::Unclassified
        }
    }

    /// Role class for every node of `store`, indexed by `NodeId`.
    pub fn classes_for_store(&self, store: &EventStore, w: TimeWindow) -> Vec<RoleClass> {
        store
            .node_names()
            .iter()
            .map(|n| self.resolve(n, w))
            .collect()
    }

    /// Does any merged span touch `w` without covering it?
    pub fn partially_overlaps(&self, person: &str, w: TimeWindow) -> bool {
        self.people.get(person).is_some_and(|r| {
            r.wgc
                .iter()
                .chain(&r.ad)
                .any(|(s, e)| w.overlaps(*s, *e) && !w.within(*s, *e))
        })
    }
}

pub fn resolve_roles<'a>(
    table: &[RoleInterval],
    w: TimeWindow,
    nodes: impl IntoIterator<Item = &'a str>,
) -> BTreeMap<String, RoleAssignment> {
    let index = RoleIndex::new(table);
    nodes
        .into_iter()
        .map(|n| {
            (
                n.to_owned(),
                RoleAssignment {
                    person: n.to_owned(),
                    window: w,
                    class: index.resolve(n, w),
                },
            )
        })
        .collect()
}

/// Earliest start of `kind` per person.
pub fn first_role_start(table: &[RoleInterval], kind: RoleKind) -> BTreeMap<String, NaiveDate> {
    let mut out: BTreeMap<String, NaiveDate> = BTreeMap::new();
    for r in table.iter().filter(|r| r.kind == kind) {
        out.entry(r.person.clone())
            .and_modify(|d| *d = (*d).min(r.start))
            .or_insert(r.start);
    }
    out
}

/// AD intervals from meeting-granularity listings `(person, meeting date)`.
///
/// The meeting calendar is the sorted set of all listing dates. Each run of
/// consecutive meetings at which a person is listed becomes
/// `[first meeting of run, next meeting after run)`; a run reaching the last
/// meeting stays open.
pub fn ad_intervals_from_listings(listings: &[(String, NaiveDate)]) -> Vec<RoleInterval> {
    let mut meetings: Vec<NaiveDate> = listings.iter().map(|(_, d)| *d).collect();
    meetings.sort_unstable();
    meetings.dedup();
    let pos: HashMap<NaiveDate, usize> = meetings.iter().enumerate().map(|(i, d)| (*d, i)).collect();

    let mut per_person: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (p, d) in listings {
        per_person.entry(p.as_str()).or_default().push(pos[d]);
    }
    let mut out = Vec::new();
    for (person, mut idx) in per_person {
        idx.sort_unstable();
        idx.dedup();
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && idx[j + 1] == idx[j] + 1 {
                j += 1;
            }
            out.push(RoleInterval {
                person: person.to_owned(),
                kind: RoleKind::Ad,
                group: None,
                start: meetings[idx[i]],
                end: meetings.get(idx[j] + 1).copied(),
            });
            i = j + 1;
        }
    }
    out
}
