//! Report file layouts and a linter that checks them.
//!
//! Every report file is a headed CSV in long format. Undefined statistics are
//! written as [`GAP`], never as `0`, empty, `NaN` or `inf`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

pub const GAP: &str = "NA";

pub const ACTIVITY_SERIES: &[&str] = &["window_start", "window_end", "active_participants", "events"];
pub const PROPORTIONS: &[&str] = &[
    "window_start",
    "window_end",
    "family",
    "role_class",
    "count",
    "total",
    "proportion",
];
pub const MOTIFS: &[&str] = &[
    "window_start",
    "window_end",
    "role_class",
    "category",
    "count",
    "total",
    "proportion",
];
pub const TAXONOMY: &[&str] = &[
    "window_start",
    "window_end",
    "window_midpoint",
    "role_class",
    "measure",
    "value",
    "n",
    "low_n",
];
pub const FLOWS: &[&str] = &["window_start", "window_end", "pair", "upward", "downward", "proportion_up"];
pub const WG_SERIES: &[&str] = &[
    "date",
    "wgc_roles",
    "wgc_individuals",
    "wg_from_group_events",
    "wg_from_list_activity",
    "wgcs_per_wg_group_events",
    "wgcs_per_wg_list_activity",
];
pub const LIFECYCLE: &[&str] = &["age_years", "mean", "median", "sd", "n_lists"];
pub const BEFORE_AFTER: &[&str] = &["role_kind", "persons", "measure", "mean", "sd"];

pub const METADATA_FILE: &str = "run_metadata.json";

/// Header for a report file name, if it is one.
pub fn header_for(file: &str) -> Option<&'static [&'static str]> {
    Some(match file {
        "activity_series.csv" => ACTIVITY_SERIES,
        "proportions.csv" => PROPORTIONS,
        "motifs.csv" => MOTIFS,
        "taxonomy.csv" => TAXONOMY,
        "flows.csv" => FLOWS,
        "wg_series.csv" => WG_SERIES,
        "lifecycle.csv" => LIFECYCLE,
        "before_after.csv" => BEFORE_AFTER,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintIssue {
    pub file: String,
    /// 1-based line, header is line 1; 0 for file-level problems.
    pub line: usize,
    pub message: String,
}

const SUM_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell {
    Gap,
    Num(f64),
}

fn cell(s: &str) -> Result<Cell, String> {
    if s == GAP {
        return Ok(Cell::Gap);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Cell::Num(v)),
        _ => Err(format!("{s:?} is neither a finite number nor {GAP}")),
    }
}

fn int(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))
}

struct Table {
    file: String,
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn parse(file: &str, text: &str) -> Result<Self, LintIssue> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(text.as_bytes());
        let issue = |line, message: String| LintIssue {
            file: file.to_owned(),
            line,
            message,
        };
        let header = rdr
            .headers()
            .map_err(|e| issue(1, e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for r in rdr.records() {
            let r = r.map_err(|e| issue(0, e.to_string()))?;
            let line = r.position().map_or(0, |p| p.line() as usize);
            rows.push((line, r.iter().map(str::to_owned).collect()));
        }
        Ok(Self {
            file: file.to_owned(),
            header,
            rows,
        })
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).expect("header checked")
    }
}

/// Checks one report file's text. `file` is its base name.
pub fn lint_file(file: &str, text: &str) -> Vec<LintIssue> {
    let Some(expected) = header_for(file) else {
        return vec![LintIssue {
            file: file.to_owned(),
            line: 0,
            message: "not a report file".into(),
        }];
    };
    let table = match Table::parse(file, text) {
        Ok(t) => t,
        Err(e) => return vec![e],
    };
    let mut out = Vec::new();
    if table.header.iter().map(String::as_str).ne(expected.iter().copied()) {
        out.push(LintIssue {
            file: file.to_owned(),
            line: 1,
            message: format!("header {} != {}", table.header.join(","), expected.join(",")),
        });
        return out;
    }
    for (line, r) in &table.rows {
        if r.len() != expected.len() {
            out.push(LintIssue {
                file: file.to_owned(),
                line: *line,
                message: format!("{} fields, expected {}", r.len(), expected.len()),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let check: fn(&Table) -> Vec<(usize, String)> = match file {
        "proportions.csv" => lint_proportions,
        "motifs.csv" => lint_motifs,
        "taxonomy.csv" => lint_taxonomy,
        "flows.csv" => lint_flows,
        "wg_series.csv" => lint_wg_series,
        "lifecycle.csv" => lint_lifecycle,
        "before_after.csv" => lint_before_after,
        _ => lint_activity,
    };
    out.extend(check(&table).into_iter().map(|(line, message)| LintIssue {
        file: table.file.clone(),
        line,
        message,
    }));
    out
}

/// Lints every report file present in `dir`.
pub fn lint_report_dir(dir: &Path) -> std::io::Result<Vec<LintIssue>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| header_for(n).is_some())
        .collect();
    names.sort();
    let mut out = Vec::new();
    for n in names {
        let text = std::fs::read_to_string(dir.join(&n))?;
        out.extend(lint_file(&n, &text));
    }
    Ok(out)
}

type Found = Vec<(usize, String)>;

/// Row checks on one column set; `f` returns an error message.
fn each_row(t: &Table, mut f: impl FnMut(&[String]) -> Result<(), String>) -> Found {
    t.rows
        .iter()
        .filter_map(|(line, r)| f(r).err().map(|m| (*line, m)))
        .collect()
}

fn lint_activity(t: &Table) -> Found {
    let (a, e) = (t.col("active_participants"), t.col("events"));
    each_row(t, |r| {
        int(&r[a])?;
        int(&r[e])?;
        Ok(())
    })
}

/// `value` must be a gap exactly when `defined` is false and must equal
/// `num / den` otherwise.
fn ratio_cell(value: &str, num: u64, den: u64) -> Result<Cell, String> {
    let c = cell(value)?;
    match (c, den) {
        (Cell::Gap, 0) => Ok(c),
        (Cell::Gap, _) => Err(format!("gap with nonzero denominator {den}")),
        (Cell::Num(_), 0) => Err(format!("value {value} with zero denominator")),
        (Cell::Num(v), _) => {
            let want = num as f64 / den as f64;
            if (v - want).abs() > RATIO_TOL {
                Err(format!("value {v} != {num}/{den}"))
            } else {
                Ok(c)
            }
        }
    }
}

/// Families whose members must all be gaps or sum to one.
fn family_sums(groups: BTreeMap<Vec<String>, Vec<(usize, Cell)>>) -> Found {
    let mut out = Vec::new();
    for (key, cells) in groups {
        let line = cells.first().map_or(0, |c| c.0);
        let gaps = cells.iter().filter(|c| c.1 == Cell::Gap).count();
        if gaps == cells.len() {
            continue;
        }
        if gaps > 0 {
            out.push((line, format!("family {} mixes gaps and values", key.join("/"))));
            continue;
        }
        let sum: f64 = cells
            .iter()
            .map(|c| match c.1 {
                Cell::Num(v) => v,
                Cell::Gap => 0.0,
            })
            .sum();
        if (sum - 1.0).abs() > SUM_TOL {
            out.push((line, format!("family {} sums to {sum}", key.join("/"))));
        }
    }
    out
}

fn lint_proportions(t: &Table) -> Found {
    let (ws, we, fam) = (t.col("window_start"), t.col("window_end"), t.col("family"));
    let (c, n, p) = (t.col("count"), t.col("total"), t.col("proportion"));
    let mut groups: BTreeMap<Vec<String>, Vec<(usize, Cell)>> = BTreeMap::new();
    let mut out = Vec::new();
    for (line, r) in &t.rows {
        let res = (|| {
            let cnt = int(&r[c])?;
            let tot = int(&r[n])?;
            if cnt > tot {
                return Err(format!("count {cnt} exceeds total {tot}"));
            }
            ratio_cell(&r[p], cnt, tot)
        })();
        match res {
            Ok(v) => groups
                .entry(vec![r[ws].clone(), r[we].clone(), r[fam].clone()])
                .or_default()
                .push((*line, v)),
            Err(m) => out.push((*line, m)),
        }
    }
    out.extend(family_sums(groups));
    out
}

fn lint_motifs(t: &Table) -> Found {
    let (ws, we, rc, cat) = (
        t.col("window_start"),
        t.col("window_end"),
        t.col("role_class"),
        t.col("category"),
    );
    let (c, n, p) = (t.col("count"), t.col("total"), t.col("proportion"));
    let mut groups: BTreeMap<Vec<String>, Vec<(usize, Cell)>> = BTreeMap::new();
    let mut out = Vec::new();
    for (line, r) in &t.rows {
        let res = (|| {
            let cnt = int(&r[c])?;
            let tot = int(&r[n])?;
            if r[cat] == "TWO_NODE" {
                // counted but outside the normalised family
                return match cell(&r[p])? {
                    Cell::Gap => Ok(None),
                    Cell::Num(_) => Err("TWO_NODE proportion must be a gap".into()),
                };
            }
            if cnt > tot {
                return Err(format!("count {cnt} exceeds total {tot}"));
            }
            ratio_cell(&r[p], cnt, tot).map(Some)
        })();
        match res {
            Ok(Some(v)) => groups
                .entry(vec![r[ws].clone(), r[we].clone(), r[rc].clone()])
                .or_default()
                .push((*line, v)),
            Ok(None) => {}
            Err(m) => out.push((*line, m)),
        }
    }
    out.extend(family_sums(groups));
    out
}

fn lint_taxonomy(t: &Table) -> Found {
    let (v, n) = (t.col("value"), t.col("n"));
    let low = t.col("low_n");
    each_row(t, |r| {
        let n = int(&r[n])?;
        if r[low] != "true" && r[low] != "false" {
            return Err(format!("low_n {:?} is not a boolean", r[low]));
        }
        match cell(&r[v])? {
            Cell::Num(_) if n < 2 => Err(format!("value with panel size {n}")),
            Cell::Num(x) if !(-1.0..=1.0).contains(&x) => Err(format!("correlation {x} outside [-1, 1]")),
            _ => Ok(()),
        }
    })
}

fn lint_flows(t: &Table) -> Found {
    let (u, d, p) = (t.col("upward"), t.col("downward"), t.col("proportion_up"));
    each_row(t, |r| {
        let (up, down) = (int(&r[u])?, int(&r[d])?);
        ratio_cell(&r[p], up, up + down).map(|_| ())
    })
}

fn lint_wg_series(t: &Table) -> Found {
    let roles = t.col("wgc_roles");
    let people = t.col("wgc_individuals");
    let by_groups = t.col("wg_from_group_events");
    let by_lists = t.col("wg_from_list_activity");
    let r_groups = t.col("wgcs_per_wg_group_events");
    let r_lists = t.col("wgcs_per_wg_list_activity");
    each_row(t, |r| {
        let n_roles = int(&r[roles])?;
        if int(&r[people])? > n_roles {
            return Err("more individuals than roles".into());
        }
        let g = int(&r[by_groups])?;
        check_per_wg(&r[r_groups], n_roles, g)?;
        if r[by_lists] == "TRUNCATED" {
            return match cell(&r[r_lists])? {
                Cell::Gap => Ok(()),
                Cell::Num(_) => Err("ratio on a truncated list count".into()),
            };
        }
        check_per_wg(&r[r_lists], n_roles, int(&r[by_lists])?)
    })
}

fn check_per_wg(value: &str, roles: u64, wgs: u64) -> Result<(), String> {
    match (cell(value)?, wgs) {
        (Cell::Gap, 0) => Ok(()),
        (Cell::Gap, _) => Err(format!("gap with {wgs} working groups")),
        (Cell::Num(_), 0) => Err("ratio with zero working groups".into()),
        (Cell::Num(v), _) if (v - roles as f64 / wgs as f64).abs() > RATIO_TOL => {
            Err(format!("ratio {v} != {roles}/{wgs}"))
        }
        _ => Ok(()),
    }
}

fn lint_lifecycle(t: &Table) -> Found {
    let (mean, med, sd, n) = (t.col("mean"), t.col("median"), t.col("sd"), t.col("n_lists"));
    each_row(t, |r| {
        if int(&r[n])? == 0 {
            return Err("age with no lists".into());
        }
        for c in [mean, med, sd] {
            if cell(&r[c])? == Cell::Gap {
                return Err("gap in a populated age row".into());
            }
        }
        Ok(())
    })
}

fn lint_before_after(t: &Table) -> Found {
    let (p, mean, sd) = (t.col("persons"), t.col("mean"), t.col("sd"));
    each_row(t, |r| {
        let persons = int(&r[p])?;
        for c in [mean, sd] {
            match (cell(&r[c])?, persons) {
                (Cell::Gap, 0) | (Cell::Num(_), 1..) => {}
                (Cell::Gap, _) => return Err(format!("gap with {persons} persons")),
                (Cell::Num(_), 0) => return Err("value with no eligible persons".into()),
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROP_HEAD: &str = "window_start,window_end,family,role_class,count,total,proportion\n";

    #[test]
    fn clean_proportions() {
        let text = format!(
            "{PROP_HEAD}2014-01-01,2015-01-01,population,RP,9,10,0.9\n\
             2014-01-01,2015-01-01,population,WGC,1,10,0.1\n\
             2014-01-01,2015-01-01,population,AD,0,10,0\n\
             2015-01-01,2016-01-01,population,RP,0,0,NA\n\
             2015-01-01,2016-01-01,population,WGC,0,0,NA\n"
        );
        assert!(lint_file("proportions.csv", &text).is_empty());
    }

    #[test]
    fn fabricated_zero_is_caught() {
        let text = format!("{PROP_HEAD}2015-01-01,2016-01-01,population,RP,0,0,0\n");
        assert_eq!(lint_file("proportions.csv", &text).len(), 1);
    }

    #[test]
    fn bad_sum_is_caught() {
        let text = format!(
            "{PROP_HEAD}2014-01-01,2015-01-01,activity,RP,3,4,0.75\n\
             2014-01-01,2015-01-01,activity,WGC,1,4,0.3\n"
        );
        let issues = lint_file("proportions.csv", &text);
        assert!(issues.iter().any(|i| i.message.contains("1/4")));
        assert!(issues.iter().any(|i| i.message.contains("sums to")));
    }

    #[test]
    fn nan_and_header_problems() {
        let text = format!("{PROP_HEAD}2014-01-01,2015-01-01,activity,RP,1,1,NaN\n");
        assert_eq!(lint_file("proportions.csv", &text).len(), 1);
        assert_eq!(lint_file("proportions.csv", "a,b\n").len(), 1);
        assert_eq!(lint_file("other.csv", "").len(), 1);
    }

    #[test]
    fn two_node_must_be_gap() {
        let head = MOTIFS.join(",");
        let text = format!(
            "{head}\n2014-01-01,2015-01-01,RP,TWO_NODE,5,4,0.5\n\
             2014-01-01,2015-01-01,RP,OUTWARD_STAR,4,4,1\n\
             2014-01-01,2015-01-01,RP,INWARD_STAR,0,4,0\n"
        );
        let issues = lint_file("motifs.csv", &text);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].line, 2);
    }

    #[test]
    fn flows_and_taxonomy() {
        let f = format!("{}\nw,x,RP->WGC,6,12,{}\nw,x,RP->AD,0,0,NA\n", FLOWS.join(","), 1.0 / 3.0);
        assert!(lint_file("flows.csv", &f).is_empty());
        let t = format!(
            "{}\na,b,c,RP,mobility,1.5,10,false\na,b,c,AD,mobility,0.5,1,true\na,b,c,WGC,community,NA,1,true\n",
            TAXONOMY.join(",")
        );
        assert_eq!(lint_file("taxonomy.csv", &t).len(), 2);
    }

    #[test]
    fn wg_series_truncation() {
        let t = format!(
            "{}\n2014-01-01,4,3,2,TRUNCATED,2,NA\n2014-02-01,4,3,0,2,2,2\n",
            WG_SERIES.join(",")
        );
        let issues = lint_file("wg_series.csv", &t);
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].line, 3);
    }
}
