//! Degree and neighbourhood-degree correlations across adjoining half-windows.

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roles::RoleClass;
use crate::store::{window_graph, DegreeMode, EventStore, NodeId};
use crate::time::TimeWindow;

/// One node active in the first half-window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRow {
    pub node: NodeId,
    pub deg1: f64,
    pub deg2: f64,
    /// Mean first-half degree of the first-half neighbours.
    pub nd1: f64,
    /// Mean second-half degree of the same neighbours.
    pub nd2: f64,
}

/// Panel over the nodes active in `w1`, sorted by node id.
pub fn build_panel(
    store: &EventStore,
    w1: TimeWindow,
    w2: TimeWindow,
    mode: DegreeMode,
) -> Vec<PanelRow> {
    let g1 = window_graph(store, w1);
    let g2 = window_graph(store, w2);
    let deg1 = g1.degrees(mode);
    let deg2 = g2.degrees(mode);
    let adj = g1.adjacency();
    let d2 = |n: &NodeId| deg2.get(n).copied().unwrap_or(0) as f64;
    g1.nodes
        .iter()
        .map(|&n| {
            let nbrs = &adj[&n];
            let k = nbrs.len() as f64;
            let nd1 = nbrs.iter().map(|m| deg1[m] as f64).sum::<f64>() / k;
            let nd2 = nbrs.iter().map(d2).sum::<f64>() / k;
            PanelRow {
                node: n,
                deg1: deg1[&n] as f64,
                deg2: d2(&n),
                nd1,
                nd2,
            }
        })
        .collect()
}

/// Product-moment correlation; `None` when `n < 2` or either series is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    let n = xs.len();
    if n < 2 {
        return Ok(None);
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

/// Average ranks (1-based), ties sharing their mean rank.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    pearson(&ranks(xs), &ranks(ys))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correlation {
    #[default]
    Pearson,
    Spearman,
}

impl Correlation {
    pub fn apply(self, xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
        match self {
            Correlation::Pearson => pearson(xs, ys),
            Correlation::Spearman => spearman(xs, ys),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    Mobility,
    NeighbourMobility,
    Philanthropy,
    Community,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Mobility,
        Measure::NeighbourMobility,
        Measure::Philanthropy,
        Measure::Community,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Mobility => "mobility",
            Measure::NeighbourMobility => "neighbour_mobility",
            Measure::Philanthropy => "philanthropy",
            Measure::Community => "community",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaxonomyResult {
    pub window: TimeWindow,
    /// Plot position: the window's calendar midpoint.
    pub midpoint: NaiveDate,
    pub class: RoleClass,
    pub mobility: Option<f64>,
    pub neighbour_mobility: Option<f64>,
    pub philanthropy: Option<f64>,
    pub community: Option<f64>,
    pub n: usize,
}

impl TaxonomyResult {
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Mobility => self.mobility,
            Measure::NeighbourMobility => self.neighbour_mobility,
            Measure::Philanthropy => self.philanthropy,
            Measure::Community => self.community,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyConfig {
    pub degree_mode: DegreeMode,
    pub correlation: Correlation,
}

/// The four measures over an arbitrary set of panel rows.
pub fn measures(rows: &[PanelRow], corr: Correlation) -> [Option<f64>; 4] {
    let col = |f: fn(&PanelRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let (deg1, deg2, nd1, nd2) = (
        col(|r| r.deg1),
        col(|r| r.deg2),
        col(|r| r.nd1),
        col(|r| r.nd2),
    );
    let c = |a: &[f64], b: &[f64]| corr.apply(a, b).expect("equal-length columns");
    [
        c(&deg1, &deg2),
        c(&nd1, &nd2),
        c(&deg1, &nd2),
        c(&nd1, &deg2),
    ]
}

/// Taxonomy per classified role class (RP, WGC, AD) for window `w`, whose
/// halves come from [`TimeWindow::split`]. `class_of` gives the whole-window
/// role of each node.
pub fn taxonomy(
    store: &EventStore,
    w: TimeWindow,
    class_of: impl Fn(NodeId) -> RoleClass,
    config: TaxonomyConfig,
) -> Result<Vec<TaxonomyResult>> {
    let (w1, w2) = w.split()?;
    let panel = build_panel(store, w1, w2, config.degree_mode);
    let mut by_class: HashMap<RoleClass, Vec<PanelRow>> = HashMap::new();
    for row in panel {
        by_class.entry(class_of(row.node)).or_default().push(row);
    }
    Ok(RoleClass::CLASSIFIED
        .iter()
        .map(|&class| {
            let rows = by_class.get(&class).map(Vec::as_slice).unwrap_or(&[]);
            let [mobility, neighbour_mobility, philanthropy, community] =
                measures(rows, config.correlation);
            TaxonomyResult {
                window: w,
                midpoint: w.midpoint(),
                class,
                mobility,
                neighbour_mobility,
                philanthropy,
                community,
                n: rows.len(),
            }
        })
        .collect())
}
