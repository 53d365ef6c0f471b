//! Window-plan report runner and tidy CSV output.

pub mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{DatasetBundle, ParseMode};
use crate::mobility::{taxonomy, Measure, TaxonomyConfig, TaxonomyResult};
use crate::motifs::{enumerate_motifs, role_motif_proportions, Anchoring, ClassMotifs, MotifCategory, DEFAULT_DELTA_DAYS};
use crate::org::{
    activity_proportions, before_after_role_activity, default_list_truncation, flow_ratios,
    origin_proportions, population_proportions, wg_lifecycle_profile, wgcs_per_wg, BeforeAfter,
    FlowRatio, ListActivity, Proportions, WgListCount,
};
use crate::roles::{
    check_role_horizon, default_roles_valid_from, group_spans, RoleClass, RoleIndex, RoleKind,
};
use crate::store::{active_nodes, EventStore};
use crate::time::{add_months, to_day, from_day, TimeWindow, WindowPlan};

use schema::GAP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ActivitySeries,
    Proportions,
    Motifs,
    Taxonomy,
    Flows,
    WgSeries,
    Lifecycle,
    BeforeAfter,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::ActivitySeries,
        Metric::Proportions,
        Metric::Motifs,
        Metric::Taxonomy,
        Metric::Flows,
        Metric::WgSeries,
        Metric::Lifecycle,
        Metric::BeforeAfter,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::ActivitySeries => "activity_series",
            Metric::Proportions => "proportions",
            Metric::Motifs => "motifs",
            Metric::Taxonomy => "taxonomy",
            Metric::Flows => "flows",
            Metric::WgSeries => "wg_series",
            Metric::Lifecycle => "lifecycle",
            Metric::BeforeAfter => "before_after",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.as_str())
    }

    pub fn needs_roles(self) -> bool {
        !matches!(self, Metric::ActivitySeries | Metric::Lifecycle)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// Comma-separated metric names, or `all`.
pub fn parse_metrics(s: &str) -> std::result::Result<BTreeSet<Metric>, String> {
    if s.trim() == "all" {
        return Ok(Metric::ALL.into_iter().collect());
    }
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}

/// Panels smaller than this are flagged `low_n`.
pub const LOW_N: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub plan: WindowPlan,
    pub metrics: BTreeSet<Metric>,
    pub motif_delta_days: u32,
    pub anchoring: Anchoring,
    pub taxonomy: TaxonomyConfig,
    /// Emit AD taxonomy rows (small panels, always flagged `low_n`).
    pub taxonomy_include_ad: bool,
    pub roles_valid_from: NaiveDate,
    /// The list-activity working-group estimate is not reported from here on.
    pub list_truncation: Option<NaiveDate>,
    pub parse_mode: ParseMode,
    pub seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[serde(skip)]
    pub threads: usize,
}

impl ReportConfig {
    pub fn new(plan: WindowPlan) -> Self {
        Self {
            plan,
            metrics: Metric::ALL.into_iter().collect(),
            motif_delta_days: DEFAULT_DELTA_DAYS,
            anchoring: Anchoring::default(),
            taxonomy: TaxonomyConfig::default(),
            taxonomy_include_ad: false,
            roles_valid_from: default_roles_valid_from(),
            list_truncation: Some(default_list_truncation()),
            parse_mode: ParseMode::default(),
            seed: None,
            threads: 1,
        }
    }

    pub fn with_metrics(mut self, metrics: impl IntoIterator<Item = Metric>) -> Self {
        self.metrics = metrics.into_iter().collect();
        self
    }

    fn wants(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }

    /// Refusals that do not depend on data.
    fn check(&self, bundle: &DatasetBundle) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::Config("no metrics requested".into()));
        }
        let role_metrics: Vec<&str> = self
            .metrics
            .iter()
            .filter(|m| m.needs_roles())
            .map(|m| m.as_str())
            .collect();
        if !role_metrics.is_empty() {
            if !bundle.has_role_data() {
                return Err(Error::Config(format!(
                    "metrics {} need role data (roles, group events or AD listings)",
                    role_metrics.join(",")
                )));
            }
            if let Some(w) = self.plan.windows().first() {
                check_role_horizon(*w, self.roles_valid_from)?;
            } else {
                check_role_horizon(
                    TimeWindow::new(self.plan.span_start, self.plan.span_end)?,
                    self.roles_valid_from,
                )?;
            }
        }
        if self.wants(Metric::Motifs) && self.motif_delta_days == 0 {
            return Err(Error::Config("motif delta must be at least one day".into()));
        }
        if self.wants(Metric::Taxonomy) && !self.plan.length_months.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "taxonomy needs an even window length, got {} months",
                self.plan.length_months
            )));
        }
        Ok(())
    }
}

/// Everything computed for one window.
#[derive(Debug, Clone)]
struct WindowResult {
    window: TimeWindow,
    active: usize,
    events: usize,
    proportions: Vec<(&'static str, Proportions)>,
    motifs: Vec<ClassMotifs>,
    taxonomy: Option<Vec<TaxonomyResult>>,
    flows: Vec<FlowRatio>,
}

struct Inputs<'a> {
    store: &'a EventStore,
    index: &'a RoleIndex,
    bundle: &'a DatasetBundle,
}

fn compute_window(cfg: &ReportConfig, inp: &Inputs<'_>, w: TimeWindow) -> WindowResult {
    let store = inp.store;
    let mut out = WindowResult {
        window: w,
        active: 0,
        events: store.in_window(w).len(),
        proportions: Vec::new(),
        motifs: Vec::new(),
        taxonomy: None,
        flows: Vec::new(),
    };
    if cfg.wants(Metric::ActivitySeries) {
        out.active = active_nodes(store, w).len();
    }
    let needs_classes = cfg.metrics.iter().any(|m| {
        matches!(
            m,
            Metric::Proportions | Metric::Motifs | Metric::Taxonomy | Metric::Flows
        )
    });
    if !needs_classes {
        return out;
    }
    let classes = inp.index.classes_for_store(store, w);
    let class_of = |n: crate::store::NodeId| classes[n.index()];
    if cfg.wants(Metric::Proportions) {
        out.proportions.push(("population", population_proportions(store, w, class_of)));
        out.proportions.push(("activity", activity_proportions(store, w, class_of)));
        if !inp.bundle.origins.is_empty() {
            let origins = origin_proportions(&inp.bundle.origins, w, |p| inp.index.resolve(p, w));
            out.proportions.push(("origin", origins));
        }
    }
    if cfg.wants(Metric::Motifs) {
        let tally = enumerate_motifs(store, w, cfg.motif_delta_days, cfg.anchoring);
        out.motifs = role_motif_proportions(&tally, class_of);
    }
    if cfg.wants(Metric::Taxonomy) {
        // a clamped window may not split evenly; its rows become gaps
        out.taxonomy = taxonomy(store, w, class_of, cfg.taxonomy).ok();
    }
    if cfg.wants(Metric::Flows) {
        out.flows = flow_ratios(store, w, class_of);
    }
    out
}

/// A finished report: file name to contents, in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub files: BTreeMap<String, String>,
}

impl Report {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::FileIo {
            path: dir.to_owned(),
            source: e,
        })?;
        for (name, text) in &self.files {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| Error::FileIo { path: p, source: e })?;
        }
        Ok(())
    }

    pub fn lint(&self) -> Vec<schema::LintIssue> {
        self.files
            .iter()
            .filter(|(n, _)| schema::header_for(n).is_some())
            .flat_map(|(n, t)| schema::lint_file(n, t))
            .collect()
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| GAP.to_owned(), num)
}

struct Csv(csv::Writer<Vec<u8>>);

impl Csv {
    fn new(header: &[&str]) -> Self {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Self(w)
    }

    fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.0.write_record(fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        String::from_utf8(self.0.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn decisions(cfg: &ReportConfig) -> Vec<String> {
    let mut d = vec![
        format!("gap marker: {GAP}"),
        "windows: both ends anchored at span start; month ends clamp".to_owned(),
        "roles: AD over WGC; a role must cover the whole window, partial coverage is UNCLASSIFIED; persons with no role anywhere are RP".to_owned(),
        "role-stratified metrics drop UNCLASSIFIED nodes".to_owned(),
        "activity proportions count sent events only".to_owned(),
        "standard deviations are population form (divide by n)".to_owned(),
        format!(
            "degree: {} across both halves",
            match cfg.taxonomy.degree_mode {
                crate::store::DegreeMode::DirectedPairs => "distinct directed pairs",
                crate::store::DegreeMode::DistinctNeighbours => "distinct neighbours",
            }
        ),
        format!(
            "taxonomy correlation: {} on raw degrees",
            match cfg.taxonomy.correlation {
                crate::mobility::Correlation::Pearson => "pearson",
                crate::mobility::Correlation::Spearman => "spearman",
            }
        ),
        format!("taxonomy rows flagged low_n below {LOW_N} nodes"),
        "motifs: combinatorial counting over (day, seq) order with t3 - t1 <= delta".to_owned(),
        format!(
            "motif anchoring: {}",
            match cfg.anchoring {
                Anchoring::Participants => "stars to centre, triangles and two-node motifs to every participant",
                Anchoring::FirstSender => "first edge sender",
            }
        ),
        "motif proportions over the four three-node categories; TWO_NODE counted only".to_owned(),
        "before/after activity counts events on all lists".to_owned(),
        "before/after eligibility needs a full year of data on both sides inside [max(first event, roles_valid_from), last event]".to_owned(),
        "lifecycle: a list counts at age k only if its first-to-last span covers k + 1 years".to_owned(),
    ];
    if !cfg.taxonomy_include_ad {
        d.push("taxonomy AD rows omitted".to_owned());
    }
    d
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ReportConfig,
    parse_mode: &'static str,
    inputs: BTreeMap<&'static str, usize>,
    windows: usize,
    files: Vec<String>,
    decisions: Vec<String>,
    notes: Vec<String>,
}

/// Sample dates for the working-group series: span start, then every
/// stride, up to but excluding the span end.
fn series_dates(plan: &WindowPlan) -> Vec<NaiveDate> {
    (0u32..)
        .map(|k| add_months(plan.span_start, k * plan.stride_months))
        .take_while(|d| *d < plan.span_end)
        .collect()
}

/// Runs every requested metric over the plan. Output is byte-identical for
/// the same bundle and config, whatever `threads` is.
pub fn run_report(bundle: &DatasetBundle, cfg: &ReportConfig) -> Result<Report> {
    cfg.check(bundle)?;
    let store = EventStore::build(bundle.edges.clone())?;
    let (table, role_warnings) = bundle.role_table();
    let index = RoleIndex::new(&table);
    let windows = cfg.plan.windows();
    let inputs = Inputs {
        store: &store,
        index: &index,
        bundle,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let per_window: Vec<WindowResult> = pool.install(|| {
        windows
            .par_iter()
            .map(|w| compute_window(cfg, &inputs, *w))
            .collect()
    });

    let mut files = BTreeMap::new();
    let mut notes: Vec<String> = bundle.notes.clone();
    notes.extend(role_warnings.iter().map(|w| {
        format!(
            "role warning: group {} {} on {}: {}",
            w.group,
            w.person.as_deref().unwrap_or("-"),
            w.date,
            w.message
        )
    }));
    let ws = |w: &TimeWindow| (w.start().to_string(), w.end().to_string());

    if cfg.wants(Metric::ActivitySeries) {
        let mut c = Csv::new(schema::ACTIVITY_SERIES);
        for r in &per_window {
            let (a, b) = ws(&r.window);
            c.row([a, b, r.active.to_string(), r.events.to_string()]);
        }
        files.insert(Metric::ActivitySeries.file_name(), c.finish());
    }

    if cfg.wants(Metric::Proportions) {
        if bundle.origins.is_empty() {
            notes.push("no origin events: origin proportions omitted".into());
        }
        let mut c = Csv::new(schema::PROPORTIONS);
        for r in &per_window {
            let (a, b) = ws(&r.window);
            for (family, p) in &r.proportions {
                for s in &p.shares {
                    c.row([
                        a.clone(),
                        b.clone(),
                        family.to_string(),
                        s.class.to_string(),
                        s.count.to_string(),
                        s.total.to_string(),
                        opt(s.proportion),
                    ]);
                }
            }
        }
        files.insert(Metric::Proportions.file_name(), c.finish());
    }

    if cfg.wants(Metric::Motifs) {
        let mut c = Csv::new(schema::MOTIFS);
        for r in &per_window {
            let (a, b) = ws(&r.window);
            for cm in &r.motifs {
                let total = cm.three_node_total();
                for cat in MotifCategory::ALL {
                    c.row([
                        a.clone(),
                        b.clone(),
                        cm.class.to_string(),
                        cat.as_str().to_owned(),
                        cm.counts[cat.index()].to_string(),
                        total.to_string(),
                        opt(cm.proportion(cat)),
                    ]);
                }
            }
        }
        files.insert(Metric::Motifs.file_name(), c.finish());
    }

    if cfg.wants(Metric::Taxonomy) {
        let mut c = Csv::new(schema::TAXONOMY);
        let classes: Vec<RoleClass> = RoleClass::CLASSIFIED
            .into_iter()
            .filter(|c| cfg.taxonomy_include_ad || *c != RoleClass::Ad)
            .collect();
        for r in &per_window {
            let (a, b) = ws(&r.window);
            let mid = r.window.midpoint().to_string();
            for class in &classes {
                let res = r
                    .taxonomy
                    .as_ref()
                    .and_then(|t| t.iter().find(|x| x.class == *class));
                let n = res.map_or(0, |x| x.n);
                let low = n < LOW_N || *class == RoleClass::Ad;
                for m in Measure::ALL {
                    c.row([
                        a.clone(),
                        b.clone(),
                        mid.clone(),
                        class.to_string(),
                        m.as_str().to_owned(),
                        opt(res.and_then(|x| x.get(m))),
                        n.to_string(),
                        low.to_string(),
                    ]);
                }
            }
        }
        files.insert(Metric::Taxonomy.file_name(), c.finish());
    }

    if cfg.wants(Metric::Flows) {
        let mut c = Csv::new(schema::FLOWS);
        for r in &per_window {
            let (a, b) = ws(&r.window);
            for f in &r.flows {
                c.row([
                    a.clone(),
                    b.clone(),
                    f.pair.as_str().to_owned(),
                    f.upward.to_string(),
                    f.downward.to_string(),
                    opt(f.proportion_up),
                ]);
            }
        }
        files.insert(Metric::Flows.file_name(), c.finish());
    }

    if cfg.wants(Metric::WgSeries) {
        let spans = group_spans(&bundle.group_events);
        let lists = ListActivity::new(&store, &bundle.lists);
        if bundle.lists.is_empty() {
            notes.push("no list metadata: list-activity working-group counts are zero".into());
        }
        let mut c = Csv::new(schema::WG_SERIES);
        for t in series_dates(&cfg.plan) {
            let p = wgcs_per_wg(&table, &spans, &lists, t, cfg.list_truncation);
            c.row([
                t.to_string(),
                p.wgc_roles.to_string(),
                p.wgc_individuals.to_string(),
                p.wg_from_group_events.to_string(),
                match p.wg_from_list_activity {
                    WgListCount::Count(n) => n.to_string(),
                    WgListCount::Truncated => "TRUNCATED".to_owned(),
                },
                opt(p.wgcs_per_wg_group_events),
                opt(p.wgcs_per_wg_list_activity),
            ]);
        }
        files.insert(Metric::WgSeries.file_name(), c.finish());
    }

    if cfg.wants(Metric::Lifecycle) {
        if bundle.lists.is_empty() {
            notes.push("no list metadata: lifecycle profile is empty".into());
        }
        let mut c = Csv::new(schema::LIFECYCLE);
        for row in wg_lifecycle_profile(&store, &bundle.lists) {
            c.row([
                row.age_years.to_string(),
                num(row.mean),
                num(row.median),
                num(row.sd),
                row.n_lists.to_string(),
            ]);
        }
        files.insert(Metric::Lifecycle.file_name(), c.finish());
    }

    if cfg.wants(Metric::BeforeAfter) {
        let extent = store.extent().and_then(|(first, last)| {
            let start = first.max(cfg.roles_valid_from);
            TimeWindow::new(start, from_day(to_day(last) + 1)).ok()
        });
        let mut c = Csv::new(schema::BEFORE_AFTER);
        for kind in [RoleKind::Wgc, RoleKind::Ad] {
            let ba = extent.and_then(|e| before_after_role_activity(&store, &table, kind, Some(e)));
            let cols: [(&str, Option<crate::org::MeanSd>); 4] = match &ba {
                Some(BeforeAfter {
                    sent_before,
                    received_before,
                    sent_after,
                    received_after,
                    ..
                }) => [
                    ("sent_before", Some(*sent_before)),
                    ("received_before", Some(*received_before)),
                    ("sent_after", Some(*sent_after)),
                    ("received_after", Some(*received_after)),
                ],
                None => [
                    ("sent_before", None),
                    ("received_before", None),
                    ("sent_after", None),
                    ("received_after", None),
                ],
            };
            let persons = ba.map_or(0, |b| b.persons);
            for (measure, v) in cols {
                c.row([
                    kind.to_string(),
                    persons.to_string(),
                    measure.to_owned(),
                    opt(v.map(|m| m.mean)),
                    opt(v.map(|m| m.sd)),
                ]);
            }
        }
        files.insert(Metric::BeforeAfter.file_name(), c.finish());
    }

    let mut inputs_count = BTreeMap::new();
    inputs_count.insert("edges", bundle.edges.len());
    inputs_count.insert("origins", bundle.origins.len());
    inputs_count.insert("role_intervals", table.len());
    inputs_count.insert("group_events", bundle.group_events.len());
    inputs_count.insert("lists", bundle.lists.len());
    inputs_count.insert("nodes", store.node_count());
    let meta = Metadata {
        tool: "hiernet",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        parse_mode: cfg.parse_mode.as_str(),
        inputs: inputs_count,
        windows: windows.len(),
        files: files.keys().cloned().collect(),
        decisions: decisions(cfg),
        notes,
    };
    let mut json = serde_json::to_string_pretty(&meta)?;
    json.push('\n');
    files.insert(schema::METADATA_FILE.to_owned(), json);
    Ok(Report { files })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roles::RoleInterval;
    use crate::store::EdgeEvent;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn bundle() -> DatasetBundle {
        let mut edges = Vec::new();
        for i in 0..6 {
            edges.push(EdgeEvent::new("r", "w", d("2014-03-01"), i));
        }
        for i in 0..12 {
            edges.push(EdgeEvent::new("w", "r", d("2014-04-01"), 10 + i));
        }
        DatasetBundle {
            edges,
            roles: Some(vec![RoleInterval {
                person: "w".into(),
                kind: RoleKind::Wgc,
                group: Some("g".into()),
                start: d("2013-01-01"),
                end: None,
            }]),
            ..Default::default()
        }
    }

    fn plan() -> WindowPlan {
        WindowPlan::new(d("2014-01-01"), d("2015-01-01"), 12, 1).unwrap()
    }

    #[test]
    fn flows_file_has_worked_ratio() {
        let cfg = ReportConfig::new(plan()).with_metrics([Metric::Flows]);
        let r = run_report(&bundle(), &cfg).unwrap();
        let flows = r.file("flows.csv").unwrap();
        assert!(flows.contains(&format!("RP->WGC,6,12,{}", 1.0 / 3.0)), "{flows}");
        assert!(flows.contains("RP->AD,0,0,NA"));
        assert!(r.lint().is_empty());
    }

    #[test]
    fn refuses_before_role_horizon() {
        let p = WindowPlan::new(d("2011-01-01"), d("2015-01-01"), 12, 1).unwrap();
        let cfg = ReportConfig::new(p).with_metrics([Metric::Flows]);
        assert!(matches!(run_report(&bundle(), &cfg), Err(Error::BeforeRoleHorizon { .. })));
        let cfg = ReportConfig::new(p).with_metrics([Metric::ActivitySeries]);
        assert!(run_report(&bundle(), &cfg).is_ok());
    }

    #[test]
    fn role_metric_without_roles_is_refused() {
        let mut b = bundle();
        b.roles = None;
        let cfg = ReportConfig::new(plan()).with_metrics([Metric::Proportions]);
        assert!(matches!(run_report(&b, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn full_report_lints_clean_and_threads_do_not_matter() {
        let mut cfg = ReportConfig::new(plan());
        let a = run_report(&bundle(), &cfg).unwrap();
        cfg.threads = 3;
        let b = run_report(&bundle(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.lint().is_empty(), "{:?}", a.lint());
        assert_eq!(a.files.len(), 9);
        assert!(!a.file(schema::METADATA_FILE).unwrap().contains("threads"));
    }

    #[test]
    fn metric_names() {
        assert_eq!(parse_metrics("flows,motifs").unwrap().len(), 2);
        assert_eq!(parse_metrics("all").unwrap().len(), 8);
        assert!(parse_metrics("flows,bogus").is_err());
    }

    #[test]
    fn series_dates_follow_stride() {
        let p = WindowPlan::new(d("2014-01-31"), d("2014-05-01"), 12, 1).unwrap();
        let ds: Vec<String> = series_dates(&p).iter().map(|d| d.to_string()).collect();
        assert_eq!(ds, ["2014-01-31", "2014-02-28", "2014-03-31", "2014-04-30"]);
    }
}
