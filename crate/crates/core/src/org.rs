//! Role-stratified organisational metrics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::roles::{first_role_start, GroupSpan, RoleClass, RoleInterval, RoleKind};
use crate::store::{active_nodes, EventStore, ListId, NodeId};
use crate::time::{add_months, from_day, sub_months, to_day, TimeWindow, WindowPlan};

/// A thread-starting message sent to a list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginEvent {
    pub sender: String,
    pub list: Option<String>,
    pub date: NaiveDate,
    pub message_id: Option<String>,
    pub seq: u64,
}

/// List id → whether the list belongs to a working group.
pub type ListMetadata = BTreeMap<String, bool>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassShare {
    pub class: RoleClass,
    pub count: u64,
    pub total: u64,
    /// `None` when `total == 0`.
    pub proportion: Option<f64>,
}

/// Shares of RP, WGC and AD (in that order) over classified members only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Proportions {
    pub shares: [ClassShare; 3],
}

impl Proportions {
    fn from_counts(counts: [u64; 3]) -> Self {
        let total: u64 = counts.iter().sum();
        let share = |i: usize| ClassShare {
            class: RoleClass::CLASSIFIED[i],
            count: counts[i],
            total,
            proportion: (total > 0).then(|| counts[i] as f64 / total as f64),
        };
        Self {
            shares: [share(0), share(1), share(2)],
        }
    }

    pub fn total(&self) -> u64 {
        self.shares[0].total
    }

    pub fn is_defined(&self) -> bool {
        self.total() > 0
    }

    pub fn get(&self, class: RoleClass) -> Option<f64> {
        self.shares
            .iter()
            .find(|s| s.class == class)
            .and_then(|s| s.proportion)
    }
}

fn slot(class: RoleClass) -> Option<usize> {
    class.rank().map(usize::from)
}

/// Active nodes per class over active classified nodes.
pub fn population_proportions(
    store: &EventStore,
    w: TimeWindow,
    class_of: impl Fn(NodeId) -> RoleClass,
) -> Proportions {
    let mut counts = [0u64; 3];
    for n in active_nodes(store, w) {
        if let Some(i) = slot(class_of(n)) {
            counts[i] += 1;
        }
    }
    Proportions::from_counts(counts)
}

/// Sent events per class over events sent by classified nodes.
pub fn activity_proportions(
    store: &EventStore,
    w: TimeWindow,
    class_of: impl Fn(NodeId) -> RoleClass,
) -> Proportions {
    let mut counts = [0u64; 3];
    for e in store.in_window(w) {
        if let Some(i) = slot(class_of(e.sender)) {
            counts[i] += 1;
        }
    }
    Proportions::from_counts(counts)
}

/// Origin messages per sender class among classified senders.
pub fn origin_proportions(
    origins: &[OriginEvent],
    w: TimeWindow,
    class_of: impl Fn(&str) -> RoleClass,
) -> Proportions {
    let mut counts = [0u64; 3];
    for o in origins.iter().filter(|o| w.contains(o.date)) {
        if let Some(i) = slot(class_of(&o.sender)) {
            counts[i] += 1;
        }
    }
    Proportions::from_counts(counts)
}

/// Inter-level pair, lower level first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FlowPair {
    RpWgc,
    RpAd,
    WgcAd,
}

impl FlowPair {
    pub const ALL: [FlowPair; 3] = [FlowPair::RpWgc, FlowPair::RpAd, FlowPair::WgcAd];

    pub fn levels(self) -> (RoleClass, RoleClass) {
        match self {
            FlowPair::RpWgc => (RoleClass::Rp, RoleClass::Wgc),
            FlowPair::RpAd => (RoleClass::Rp, RoleClass::Ad),
            FlowPair::WgcAd => (RoleClass::Wgc, RoleClass::Ad),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FlowPair::RpWgc => "RP->WGC",
            FlowPair::RpAd => "RP->AD",
            FlowPair::WgcAd => "WGC->AD",
        }
    }
}

impl fmt::Display for FlowPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowRatio {
    pub pair: FlowPair,
    pub window: TimeWindow,
    pub upward: u64,
    pub downward: u64,
    /// `upward / (upward + downward)`, `None` when both are zero.
    pub proportion_up: Option<f64>,
}

pub fn flow_ratios(
    store: &EventStore,
    w: TimeWindow,
    class_of: impl Fn(NodeId) -> RoleClass,
) -> Vec<FlowRatio> {
    // [sender rank][receiver rank]
    let mut m = [[0u64; 3]; 3];
    for e in store.in_window(w) {
        if let (Some(s), Some(r)) = (slot(class_of(e.sender)), slot(class_of(e.receiver))) {
            m[s][r] += 1;
        }
    }
    FlowPair::ALL
        .iter()
        .map(|&pair| {
            let (lo, hi) = pair.levels();
            let (lo, hi) = (slot(lo).unwrap(), slot(hi).unwrap());
            let (upward, downward) = (m[lo][hi], m[hi][lo]);
            let total = upward + downward;
            FlowRatio {
                pair,
                window: w,
                upward,
                downward,
                proportion_up: (total > 0).then(|| upward as f64 / total as f64),
            }
        })
        .collect()
}

/// Open WGC roles at `t` and the distinct people holding them.
pub fn wgc_roles_vs_individuals(table: &[RoleInterval], t: NaiveDate) -> (usize, usize) {
    let open: Vec<&RoleInterval> = table
        .iter()
        .filter(|r| r.kind == RoleKind::Wgc && r.covers_date(t))
        .collect();
    let people: BTreeSet<&str> = open.iter().map(|r| r.person.as_str()).collect();
    (open.len(), people.len())
}

pub fn wg_count_from_group_events(spans: &[GroupSpan], t: NaiveDate) -> usize {
    spans.iter().filter(|s| s.covers(t)).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WgListCount {
    Count(usize),
    /// Past the truncation date; the estimate is not reported.
    Truncated,
}

impl WgListCount {
    pub fn count(self) -> Option<usize> {
        match self {
            WgListCount::Count(n) => Some(n),
            WgListCount::Truncated => None,
        }
    }
}

/// First and last event date of every working-group list with events.
#[derive(Debug, Clone, Default)]
pub struct ListActivity {
    spans: BTreeMap<String, (NaiveDate, NaiveDate)>,
}

impl ListActivity {
    pub fn new(store: &EventStore, meta: &ListMetadata) -> Self {
        let mut spans: BTreeMap<String, (NaiveDate, NaiveDate)> = BTreeMap::new();
        let mut seen: HashMap<ListId, (i32, i32)> = HashMap::new();
        for e in store.events() {
            if let Some(l) = e.list {
                seen.entry(l)
                    .and_modify(|(_, last)| *last = e.day)
                    .or_insert((e.day, e.day));
            }
        }
        for (l, (first, last)) in seen {
            let name = store.list_name(l);
            if meta.get(name).copied().unwrap_or(false) {
                spans.insert(name.to_owned(), (from_day(first), from_day(last)));
            }
        }
        Self { spans }
    }

    pub fn span(&self, list: &str) -> Option<(NaiveDate, NaiveDate)> {
        self.spans.get(list).copied()
    }

    /// WG lists with `first <= t <= last`, or `Truncated` when `t` is at or
    /// past `truncate_from`.
    pub fn count(&self, t: NaiveDate, truncate_from: Option<NaiveDate>) -> WgListCount {
        if truncate_from.is_some_and(|c| t >= c) {
            return WgListCount::Truncated;
        }
        WgListCount::Count(
            self.spans
                .values()
                .filter(|(first, last)| *first <= t && t <= *last)
                .count(),
        )
    }
}

pub fn wg_count_from_list_activity(
    store: &EventStore,
    meta: &ListMetadata,
    t: NaiveDate,
    truncate_from: Option<NaiveDate>,
) -> WgListCount {
    ListActivity::new(store, meta).count(t, truncate_from)
}

/// Default cut-off for the list-activity estimator.
pub fn default_list_truncation() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 1, 1).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WgSeriesPoint {
    pub date: NaiveDate,
    pub wgc_roles: usize,
    pub wgc_individuals: usize,
    pub wg_from_group_events: usize,
    pub wg_from_list_activity: WgListCount,
    pub wgcs_per_wg_group_events: Option<f64>,
    pub wgcs_per_wg_list_activity: Option<f64>,
}

/// WGC role count divided by each working-group estimate.
pub fn wgcs_per_wg(
    table: &[RoleInterval],
    spans: &[GroupSpan],
    lists: &ListActivity,
    t: NaiveDate,
    truncate_from: Option<NaiveDate>,
) -> WgSeriesPoint {
    let (roles, people) = wgc_roles_vs_individuals(table, t);
    let by_groups = wg_count_from_group_events(spans, t);
    let by_lists = lists.count(t, truncate_from);
    let ratio = |d: usize| (d > 0).then(|| roles as f64 / d as f64);
    WgSeriesPoint {
        date: t,
        wgc_roles: roles,
        wgc_individuals: people,
        wg_from_group_events: by_groups,
        wg_from_list_activity: by_lists,
        wgcs_per_wg_group_events: ratio(by_groups),
        wgcs_per_wg_list_activity: by_lists.count().and_then(ratio),
    }
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Some(Self {
            mean,
            sd: var.sqrt(),
        })
    }
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeforeAfter {
    pub kind: RoleKind,
    pub persons: usize,
    pub sent_before: MeanSd,
    pub received_before: MeanSd,
    pub sent_after: MeanSd,
    pub received_after: MeanSd,
}

/// Sent/received events in the year before and the year after each person
/// first takes `kind`. Persons need a full year of data on both sides of
/// their first start within `extent` (default: the store's extent).
pub fn before_after_role_activity(
    store: &EventStore,
    table: &[RoleInterval],
    kind: RoleKind,
    extent: Option<TimeWindow>,
) -> Option<BeforeAfter> {
    let extent = match extent {
        Some(e) => e,
        None => {
            let (first, last) = store.extent()?;
            TimeWindow::new(first, from_day(to_day(last) + 1)).ok()?
        }
    };
    let mut cols: [Vec<f64>; 4] = Default::default();
    for (person, start) in first_role_start(table, kind) {
        let before = sub_months(start, 12);
        let after = add_months(start, 12);
        if before < extent.start() || after > extent.end() {
            continue;
        }
        let counts = |from: NaiveDate, to: NaiveDate| -> (f64, f64) {
            let Some(n) = store.node_id(&person) else {
                return (0.0, 0.0);
            };
            let w = TimeWindow::new(from, to).expect("year window");
            let evs = store.in_window(w);
            let sent = evs.iter().filter(|e| e.sender == n).count();
            let recv = evs.iter().filter(|e| e.receiver == n).count();
            (sent as f64, recv as f64)
        };
        let (sb, rb) = counts(before, start);
        let (sa, ra) = counts(start, after);
        for (col, v) in cols.iter_mut().zip([sb, rb, sa, ra]) {
            col.push(v);
        }
    }
    Some(BeforeAfter {
        kind,
        persons: cols[0].len(),
        sent_before: MeanSd::of(&cols[0])?,
        received_before: MeanSd::of(&cols[1])?,
        sent_after: MeanSd::of(&cols[2])?,
        received_after: MeanSd::of(&cols[3])?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifecycleRow {
    pub age_years: u32,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub n_lists: usize,
}

/// Reply counts per year of list life. A list contributes to age `k` only
/// when its active span (first to last event) covers `k + 1` full years.
pub fn wg_lifecycle_profile(store: &EventStore, meta: &ListMetadata) -> Vec<LifecycleRow> {
    let mut per_list: BTreeMap<ListId, Vec<i32>> = BTreeMap::new();
    for e in store.events() {
        if let Some(l) = e.list {
            if meta.get(store.list_name(l)).copied().unwrap_or(false) {
                per_list.entry(l).or_default().push(e.day);
            }
        }
    }
    let mut by_age: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for days in per_list.values() {
        let first = from_day(days[0]);
        let last = from_day(*days.last().unwrap());
        for k in 0u32.. {
            let year_end = add_months(first, 12 * (k + 1));
            if year_end > last {
                break;
            }
            let lo = to_day(add_months(first, 12 * k));
            let hi = to_day(year_end);
            let n = days.partition_point(|d| *d < hi) - days.partition_point(|d| *d < lo);
            by_age.entry(k).or_default().push(n as f64);
        }
    }
    by_age
        .into_iter()
        .map(|(age, xs)| {
            let ms = MeanSd::of(&xs).expect("non-empty");
            LifecycleRow {
                age_years: age,
                mean: ms.mean,
                median: median(&xs).expect("non-empty"),
                sd: ms.sd,
                n_lists: xs.len(),
            }
        })
        .collect()
}

/// Active participants in each window of the plan.
pub fn active_participant_series(store: &EventStore, plan: &WindowPlan) -> Vec<(TimeWindow, usize)> {
    plan.windows()
        .into_iter()
        .map(|w| (w, active_nodes(store, w).len()))
        .collect()
}
