//! Input files, validation and synthetic datasets.

mod parse;
mod synth;

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::org::{ListMetadata, OriginEvent};
use crate::roles::{
    ad_intervals_from_listings, role_table_from_group_events, GroupEvent, RoleInterval, RoleWarning,
};
use crate::store::EdgeEvent;

pub use parse::*;
pub use synth::{synth_generate, LevelRates, SynthConfig, SynthSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A problem with one input row (or the header, line 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub source: String,
    pub line: u64,
    pub severity: Severity,
    pub message: String,
}

impl Issue {
    pub fn error(source: &str, line: u64, message: impl Into<String>) -> Self {
        Self {
            source: source.to_owned(),
            line,
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub fn warning(source: &str, line: u64, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::error(source, line, message)
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.source, self.line, self.message)
    }
}

/// Strict aborts on any row error; lenient drops bad rows and reports them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

impl ParseMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseMode::Strict => "strict",
            ParseMode::Lenient => "lenient",
        }
    }
}

/// Valid rows plus every issue found. Invalid rows are never in `rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub rows: Vec<T>,
    pub issues: Vec<Issue>,
}

impl<T> Default for Parsed<T> {
    fn default() -> Self {
        Self {
            rows: Vec::new(),
            issues: Vec::new(),
        }
    }
}

impl<T> Parsed<T> {
    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    /// In strict mode, fail when any row error was recorded.
    pub fn check(self, mode: ParseMode, source: &str) -> Result<Self> {
        check_issues(&self.issues, mode, source)?;
        Ok(self)
    }
}

fn check_issues(issues: &[Issue], mode: ParseMode, source: &str) -> Result<()> {
    let errors: Vec<Issue> = issues
        .iter()
        .filter(|i| i.severity == Severity::Error)
        .cloned()
        .collect();
    if mode == ParseMode::Strict && !errors.is_empty() {
        return Err(Error::Invalid {
            source_name: source.to_owned(),
            issues: errors,
        });
    }
    Ok(())
}

/// Everything one analysis run reads.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetBundle {
    pub edges: Vec<EdgeEvent>,
    pub origins: Vec<OriginEvent>,
    /// Explicit role table; when absent, roles are derived from group events
    /// and AD listings.
    pub roles: Option<Vec<RoleInterval>>,
    pub group_events: Vec<GroupEvent>,
    pub lists: ListMetadata,
    pub ad_listings: Vec<(String, NaiveDate)>,
    pub notes: Vec<String>,
}

impl DatasetBundle {
    /// The role table in force plus any warnings from deriving it.
    pub fn role_table(&self) -> (Vec<RoleInterval>, Vec<RoleWarning>) {
        if let Some(roles) = &self.roles {
            return (roles.clone(), Vec::new());
        }
        let chairs = role_table_from_group_events(&self.group_events);
        let mut table = chairs.intervals;
        table.extend(ad_intervals_from_listings(&self.ad_listings));
        (table, chairs.warnings)
    }

    pub fn has_role_data(&self) -> bool {
        self.roles.is_some() || !self.group_events.is_empty() || !self.ad_listings.is_empty()
    }

    /// Writes edges, origins, roles, group events and lists (and AD listings
    /// when present) as interchange files under `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| io_at(dir, e))?;
        let create = |name: &str| -> Result<BufWriter<File>> {
            let p = dir.join(name);
            Ok(BufWriter::new(File::create(&p).map_err(|e| io_at(&p, e))?))
        };
        write_edge_events(create("edges.csv")?, &self.edges)?;
        write_origin_events(create("origins.csv")?, &self.origins)?;
        write_role_intervals(create("roles.csv")?, self.roles.as_deref().unwrap_or(&[]))?;
        write_group_events(create("group_events.csv")?, &self.group_events)?;
        write_list_metadata(create("lists.csv")?, &self.lists)?;
        if !self.ad_listings.is_empty() {
            write_ad_listings(create("ad_listings.csv")?, &self.ad_listings)?;
        }
        Ok(())
    }
}

fn io_at(path: &Path, source: std::io::Error) -> Error {
    Error::FileIo {
        path: path.to_owned(),
        source,
    }
}

/// Paths of the input files; only `edges` is required.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BundlePaths {
    pub edges: PathBuf,
    pub origins: Option<PathBuf>,
    pub roles: Option<PathBuf>,
    pub group_events: Option<PathBuf>,
    pub lists: Option<PathBuf>,
    pub ad_listings: Option<PathBuf>,
}

impl BundlePaths {
    /// The conventional file names inside `dir`, keeping only those that exist.
    pub fn in_dir(dir: &Path) -> Self {
        let opt = |name: &str| {
            let p = dir.join(name);
            p.exists().then_some(p)
        };
        Self {
            edges: dir.join("edges.csv"),
            origins: opt("origins.csv"),
            roles: opt("roles.csv"),
            group_events: opt("group_events.csv"),
            lists: opt("lists.csv"),
            ad_listings: opt("ad_listings.csv"),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| io_at(path, e))?))
}

/// Loaded bundle and all issues (warnings, plus dropped-row errors in
/// lenient mode).
#[derive(Debug, Clone)]
pub struct Loaded {
    pub bundle: DatasetBundle,
    pub issues: Vec<Issue>,
}

/// Parses every file, collecting issues across files. Header and I/O
/// failures abort immediately; row errors abort after all files are read in
/// strict mode.
pub fn validate_bundle(paths: &BundlePaths) -> Result<Loaded> {
    let name = |p: &Path| p.display().to_string();
    let mut issues = Vec::new();
    let mut bundle = DatasetBundle::default();

    let p = parse_edge_events(open(&paths.edges)?, &name(&paths.edges))?;
    issues.extend(p.issues);
    bundle.edges = p.rows;
    if let Some(path) = &paths.origins {
        let p = parse_origin_events(open(path)?, &name(path))?;
        issues.extend(p.issues);
        bundle.origins = p.rows;
    }
    if let Some(path) = &paths.roles {
        let p = parse_role_intervals(open(path)?, &name(path))?;
        issues.extend(p.issues);
        bundle.roles = Some(p.rows);
    }
    if let Some(path) = &paths.group_events {
        let p = parse_group_events(open(path)?, &name(path))?;
        issues.extend(p.issues);
        bundle.group_events = p.rows;
    }
    if let Some(path) = &paths.lists {
        let (m, is) = parse_list_metadata(open(path)?, &name(path))?;
        issues.extend(is);
        bundle.lists = m;
    }
    if let Some(path) = &paths.ad_listings {
        let p = parse_ad_listings(open(path)?, &name(path))?;
        issues.extend(p.issues);
        bundle.ad_listings = p.rows;
    }
    Ok(Loaded { bundle, issues })
}

/// [`validate_bundle`] followed by the parse-mode check.
pub fn load_bundle(paths: &BundlePaths, mode: ParseMode) -> Result<Loaded> {
    let mut loaded = validate_bundle(paths)?;
    check_issues(&loaded.issues, mode, "input bundle")?;
    loaded
        .bundle
        .notes
        .push(format!("parsed in {} mode", mode.as_str()));
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn issue_display() {
        let i = Issue::error("edges.csv", 3, "self-loop a -> a");
        assert_eq!(i.to_string(), "edges.csv:3: error: self-loop a -> a");
    }

    #[test]
    fn strict_vs_lenient() {
        let text = "sender,receiver,date,list,message_id\na,a,2014-01-02,,\nb,c,2014-01-02,,\n";
        let p = parse_edge_events(text.as_bytes(), "e").unwrap();
        assert!(p.clone().check(ParseMode::Strict, "e").is_err());
        let p = p.check(ParseMode::Lenient, "e").unwrap();
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.rows[0].seq, 1);
    }

    #[test]
    fn bundle_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = |s: &str| s.parse::<NaiveDate>().unwrap();
        let bundle = DatasetBundle {
            edges: vec![EdgeEvent::new("a", "b", d("2014-01-01"), 0).with_list("wg")],
            roles: Some(vec![]),
            lists: [("wg".to_owned(), true)].into_iter().collect(),
            ad_listings: vec![("x".into(), d("2014-03-01"))],
            ..Default::default()
        };
        bundle.write_dir(dir.path()).unwrap();
        let loaded = load_bundle(&BundlePaths::in_dir(dir.path()), ParseMode::Strict).unwrap();
        assert!(loaded.issues.is_empty());
        let mut back = loaded.bundle;
        back.notes.clear();
        assert_eq!(back, bundle);
    }

    #[test]
    fn missing_file_names_the_path() {
        let paths = BundlePaths {
            edges: PathBuf::from("/nonexistent/edges.csv"),
            ..Default::default()
        };
        let err = load_bundle(&paths, ParseMode::Strict).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/edges.csv"));
    }

    #[test]
    fn derived_roles_without_table() {
        let d = |s: &str| s.parse::<NaiveDate>().unwrap();
        let bundle = DatasetBundle {
            ad_listings: vec![("x".into(), d("2014-03-01")), ("y".into(), d("2014-07-01"))],
            ..Default::default()
        };
        let (table, warnings) = bundle.role_table();
        assert_eq!(table.len(), 2);
        assert!(warnings.is_empty());
        assert!(bundle.has_role_data());
    }
}
