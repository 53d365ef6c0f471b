//! Seeded synthetic bundles with planted role structure and flow bias.

use chrono::NaiveDate;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Poisson};
use serde::{Deserialize, Serialize};

use super::DatasetBundle;
use crate::error::{Error, Result};
use crate::org::{ListMetadata, OriginEvent};
use crate::roles::{GroupEvent, GroupEventKind, RoleInterval, RoleKind};
use crate::store::EdgeEvent;
use crate::time::{add_months, to_day, TimeWindow};

/// Upward share per level pair. `None` keeps the split given by the rate
/// matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelRates {
    pub rp_wgc: Option<f64>,
    pub rp_ad: Option<f64>,
    pub wgc_ad: Option<f64>,
}

impl LevelRates {
    fn pairs(&self) -> [((usize, usize), Option<f64>); 3] {
        [((0, 1), self.rp_wgc), ((0, 2), self.rp_ad), ((1, 2), self.wgc_ad)]
    }
}

/// Class order everywhere below: RP, WGC, AD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub n_rp: usize,
    pub n_wgc: usize,
    pub n_ad: usize,
    pub n_groups: usize,
    /// Expected events per day, `rates[sender class][receiver class]`.
    pub rates: [[f64; 3]; 3],
    pub upward_bias: LevelRates,
    /// Expected origin messages per day by sender class.
    pub origin_rates: [f64; 3],
    /// Generate the first half of the horizon and replay it, shifted by half
    /// the horizon, as the second half.
    pub repeat_halves: bool,
    /// Gamma shape of per-node activity weights; 0 gives equal weights.
    pub activity_shape: f64,
    /// Redraw activity weights at every epoch of this many months.
    pub activity_epoch_months: Option<u32>,
    /// Share of events posted to a working-group list rather than the
    /// general list.
    pub wg_list_share: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self::ietf_like(42)
    }
}

impl SynthConfig {
    /// Nine years at about 304 events per day: roughly 10^6 events.
    pub fn ietf_like(seed: u64) -> Self {
        let d = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).unwrap();
        Self {
            seed,
            start: d(2013, 1, 1),
            end: d(2022, 1, 1),
            n_rp: 9000,
            n_wgc: 600,
            n_ad: 15,
            n_groups: 300,
            rates: [[142.0, 40.0, 5.0], [50.0, 40.0, 10.0], [5.0, 10.0, 2.0]],
            upward_bias: LevelRates::default(),
            origin_rates: [30.0, 20.0, 3.0],
            repeat_halves: false,
            activity_shape: 1.0,
            activity_epoch_months: None,
            wg_list_share: 2.0 / 3.0,
        }
    }

    fn class_sizes(&self) -> [usize; 3] {
        [self.n_rp, self.n_wgc, self.n_ad]
    }

    /// Rate matrix after applying the upward bias.
    pub fn effective_rates(&self) -> [[f64; 3]; 3] {
        let mut r = self.rates;
        for ((lo, hi), p) in self.upward_bias.pairs() {
            if let Some(p) = p {
                let total = r[lo][hi] + r[hi][lo];
                r[lo][hi] = p * total;
                r[hi][lo] = (1.0 - p) * total;
            }
        }
        r
    }

    fn generated_until(&self) -> Result<NaiveDate> {
        if !self.repeat_halves {
            return Ok(self.end);
        }
        let w = TimeWindow::new(self.start, self.end)?;
        match w.whole_months() {
            Some(m) if m % 2 == 0 => Ok(add_months(self.start, m / 2)),
            _ => Err(Error::InfeasibleConfig(
                "repeat_halves needs a horizon of an even number of whole months".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleConfig(m));
        if self.start >= self.end {
            return bad(format!("start {} is not before end {}", self.start, self.end));
        }
        if self.n_wgc > 0 && self.n_groups == 0 {
            return bad("n_wgc > 0 needs at least one group".into());
        }
        let sizes = self.class_sizes();
        for (s, row) in self.rates.iter().enumerate() {
            for (r, &x) in row.iter().enumerate() {
                if !(x.is_finite() && x >= 0.0) {
                    return bad(format!("rate[{s}][{r}] = {x} is not a non-negative number"));
                }
                if s == r && x > 0.0 && sizes[s] == 1 {
                    return bad(format!("positive within-class rate for class {s} with one member"));
                }
            }
        }
        for (_, p) in self.upward_bias.pairs() {
            if p.is_some_and(|p| !(0.0..=1.0).contains(&p)) {
                return bad(format!("upward bias {} outside [0, 1]", p.unwrap()));
            }
        }
        if self.origin_rates.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return bad("origin rates must be non-negative".into());
        }
        if !(self.activity_shape.is_finite() && self.activity_shape >= 0.0) {
            return bad("activity_shape must be non-negative".into());
        }
        if self.activity_epoch_months == Some(0) {
            return bad("activity_epoch_months must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.wg_list_share) {
            return bad("wg_list_share outside [0, 1]".into());
        }
        self.generated_until()?;
        Ok(())
    }

    /// Expected number of edge events over the horizon.
    pub fn expected_events(&self) -> f64 {
        let days = (to_day(self.end) - to_day(self.start)) as f64;
        let sizes = self.class_sizes();
        let r = self.effective_rates();
        let mut per_day = 0.0;
        for s in 0..3 {
            for t in 0..3 {
                if sizes[s] > 0 && sizes[t] > 0 {
                    per_day += r[s][t];
                }
            }
        }
        per_day * days
    }
}

/// Planted parameters and what was generated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSummary {
    pub seed: u64,
    pub events: usize,
    pub origins: usize,
    pub expected_events: f64,
    pub effective_rates: [[f64; 3]; 3],
    pub upward_bias: LevelRates,
    pub repeat_halves: bool,
    pub notes: Vec<String>,
}

const CLASS_PREFIX: [&str; 3] = ["rp", "wgc", "ad"];

fn node_name(class: usize, i: usize) -> String {
    format!("{}{i:05}", CLASS_PREFIX[class])
}

fn group_name(g: usize) -> String {
    format!("wg{g:04}")
}

const GENERAL_LIST: &str = "general";

struct Sampler {
    pickers: [Option<WeightedIndex<f64>>; 3],
}

impl Sampler {
    fn draw(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Self {
        let gamma = (cfg.activity_shape > 0.0)
            .then(|| Gamma::new(cfg.activity_shape, 1.0).expect("validated shape"));
        let pick = |n: usize, rng: &mut ChaCha8Rng| {
            if n == 0 {
                return None;
            }
            let w: Vec<f64> = (0..n)
                .map(|_| match &gamma {
                    // floor keeps every weight positive
                    Some(g) => g.sample(rng).max(1e-9),
                    None => 1.0,
                })
                .collect();
            Some(WeightedIndex::new(w).expect("positive weights"))
        };
        let [a, b, c] = cfg.class_sizes();
        Self {
            pickers: [pick(a, rng), pick(b, rng), pick(c, rng)],
        }
    }

    fn node(&self, class: usize, rng: &mut ChaCha8Rng) -> usize {
        self.pickers[class].as_ref().expect("non-empty class").sample(rng)
    }
}

fn pick_list(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> String {
    if cfg.n_groups > 0 && rng.random::<f64>() < cfg.wg_list_share {
        group_name(rng.random_range(0..cfg.n_groups))
    } else {
        GENERAL_LIST.to_owned()
    }
}

fn poisson(lambda: f64, rng: &mut ChaCha8Rng) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("positive rate").sample(rng) as u64
}

/// Deterministic in `cfg`: the same config always yields the same bundle.
pub fn synth_generate(cfg: &SynthConfig) -> Result<(DatasetBundle, SynthSummary)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sizes = cfg.class_sizes();
    let rates = cfg.effective_rates();
    let until = cfg.generated_until()?;
    let mut notes = Vec::new();
    for s in 0..3 {
        for t in 0..3 {
            if rates[s][t] > 0.0 && (sizes[s] == 0 || sizes[t] == 0) {
                notes.push(format!(
                    "rate {}->{} ignored: empty class",
                    CLASS_PREFIX[s].to_uppercase(),
                    CLASS_PREFIX[t].to_uppercase()
                ));
            }
        }
    }

    let epoch_start = |k: u32| cfg.activity_epoch_months.map(|m| add_months(cfg.start, m * k));
    let mut epoch = 0u32;
    let mut next_epoch = epoch_start(1);
    let mut sampler = Sampler::draw(cfg, &mut rng);

    let mut edges: Vec<EdgeEvent> = Vec::new();
    let mut origins: Vec<OriginEvent> = Vec::new();
    let mut date = cfg.start;
    while date < until {
        if next_epoch.is_some_and(|n| date >= n) {
            epoch += 1;
            next_epoch = epoch_start(epoch + 1);
            sampler = Sampler::draw(cfg, &mut rng);
        }
        for s in 0..3 {
            for t in 0..3 {
                if sizes[s] == 0 || sizes[t] == 0 {
                    continue;
                }
                for _ in 0..poisson(rates[s][t], &mut rng) {
                    let a = sampler.node(s, &mut rng);
                    let mut b = sampler.node(t, &mut rng);
                    while s == t && a == b {
                        b = sampler.node(t, &mut rng);
                    }
                    let list = pick_list(cfg, &mut rng);
                    edges.push(EdgeEvent {
                        sender: node_name(s, a),
                        receiver: node_name(t, b),
                        date,
                        list: Some(list),
                        message_id: None,
                        seq: edges.len() as u64,
                    });
                }
            }
        }
        for (c, &rate) in cfg.origin_rates.iter().enumerate() {
            if sizes[c] == 0 {
                continue;
            }
            for _ in 0..poisson(rate, &mut rng) {
                let a = sampler.node(c, &mut rng);
                let list = pick_list(cfg, &mut rng);
                origins.push(OriginEvent {
                    sender: node_name(c, a),
                    list: Some(list),
                    date,
                    message_id: None,
                    seq: origins.len() as u64,
                });
            }
        }
        date = date.succ_opt().expect("date overflow");
    }

    if cfg.repeat_halves {
        let months = TimeWindow::new(cfg.start, cfg.end)?.whole_months().unwrap() / 2;
        let n = edges.len();
        for i in 0..n {
            let mut e = edges[i].clone();
            e.date = add_months(e.date, months);
            e.seq = (n + i) as u64;
            edges.push(e);
        }
        let n = origins.len();
        for i in 0..n {
            let mut o = origins[i].clone();
            o.date = add_months(o.date, months);
            o.seq = (n + i) as u64;
            origins.push(o);
        }
        notes.push(format!("second half replays the first, shifted by {months} months"));
    }

    let mut roles = Vec::new();
    let mut group_events = Vec::new();
    for g in 0..cfg.n_groups {
        group_events.push(GroupEvent {
            group: group_name(g),
            person: None,
            kind: GroupEventKind::GroupCreated,
            date: cfg.start,
        });
    }
    for i in 0..cfg.n_wgc {
        let group = group_name(i % cfg.n_groups);
        group_events.push(GroupEvent {
            group: group.clone(),
            person: Some(node_name(1, i)),
            kind: GroupEventKind::ChairAdded,
            date: cfg.start,
        });
        roles.push(RoleInterval {
            person: node_name(1, i),
            kind: RoleKind::Wgc,
            group: Some(group),
            start: cfg.start,
            end: None,
        });
    }
    for i in 0..cfg.n_ad {
        roles.push(RoleInterval {
            person: node_name(2, i),
            kind: RoleKind::Ad,
            group: None,
            start: cfg.start,
            end: None,
        });
    }
    let mut lists: ListMetadata = (0..cfg.n_groups).map(|g| (group_name(g), true)).collect();
    lists.insert(GENERAL_LIST.to_owned(), false);

    let summary = SynthSummary {
        seed: cfg.seed,
        events: edges.len(),
        origins: origins.len(),
        expected_events: cfg.expected_events(),
        effective_rates: rates,
        upward_bias: cfg.upward_bias,
        repeat_halves: cfg.repeat_halves,
        notes: notes.clone(),
    };
    let mut bundle_notes = vec![format!("synthetic bundle, seed {}", cfg.seed)];
    bundle_notes.extend(notes);
    let bundle = DatasetBundle {
        edges,
        origins,
        roles: Some(roles),
        group_events,
        lists,
        ad_listings: Vec::new(),
        notes: bundle_notes,
    };
    Ok((bundle, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SynthConfig {
        let d = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).unwrap();
        SynthConfig {
            seed,
            start: d(2014, 1, 1),
            end: d(2015, 1, 1),
            n_rp: 40,
            n_wgc: 6,
            n_ad: 2,
            n_groups: 3,
            rates: [[4.0, 2.0, 0.5], [2.0, 1.0, 0.5], [0.5, 0.5, 0.0]],
            origin_rates: [1.0, 0.5, 0.1],
            ..SynthConfig::ietf_like(seed)
        }
    }

    #[test]
    fn same_seed_same_bundle() {
        let (a, _) = synth_generate(&small(7)).unwrap();
        let (b, _) = synth_generate(&small(7)).unwrap();
        let (c, _) = synth_generate(&small(8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn no_ad_rows_without_ads() {
        let cfg = SynthConfig { n_ad: 0, ..small(1) };
        let (b, s) = synth_generate(&cfg).unwrap();
        assert!(b.roles.unwrap().iter().all(|r| r.kind != RoleKind::Ad));
        assert!(!s.notes.is_empty());
    }

    #[test]
    fn infeasible_configs() {
        assert!(synth_generate(&SynthConfig { n_groups: 0, ..small(1) }).is_err());
        let mut c = small(1);
        c.upward_bias.rp_wgc = Some(1.5);
        assert!(synth_generate(&c).is_err());
        let mut c = small(1);
        c.end = NaiveDate::from_ymd_opt(2014, 12, 1).unwrap();
        c.repeat_halves = true;
        assert!(synth_generate(&c).is_err());
    }

    #[test]
    fn full_upward_bias() {
        let mut c = small(3);
        c.upward_bias.rp_wgc = Some(1.0);
        let (b, _) = synth_generate(&c).unwrap();
        assert!(b
            .edges
            .iter()
            .all(|e| !(e.sender.starts_with("wgc") && e.receiver.starts_with("rp"))));
    }

    #[test]
    fn repeated_halves_mirror() {
        let c = SynthConfig { repeat_halves: true, ..small(5) };
        let (b, _) = synth_generate(&c).unwrap();
        let n = b.edges.len() / 2;
        for i in 0..n {
            let (x, y) = (&b.edges[i], &b.edges[n + i]);
            assert_eq!((&x.sender, &x.receiver), (&y.sender, &y.receiver));
            assert_eq!(add_months(x.date, 6), y.date);
        }
    }

    #[test]
    fn config_serde_round_trip() {
        let c = small(9);
        let json = serde_json::to_string(&c).unwrap();
        let back: SynthConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
