//! Role-stratified temporal network analysis of hierarchical communication
//! data: windowed graphs, role resolution, temporal motifs, degree-mobility
//! correlations and organisational metrics, with tidy report output.

pub mod error;
pub mod ingest;
pub mod mobility;
pub mod motifs;
pub mod org;
pub mod report;
pub mod roles;
pub mod store;
pub mod time;

pub use error::{Error, Result};
pub use ingest::{DatasetBundle, Issue, ParseMode, SynthConfig};
pub use mobility::{pearson, spearman, Correlation, Measure, TaxonomyResult};
pub use motifs::{Anchoring, MotifCategory, MotifSignature, MotifTally};
pub use org::{FlowPair, FlowRatio, ListMetadata, OriginEvent};
pub use roles::{RoleClass, RoleIndex, RoleInterval, RoleKind};
pub use store::{DegreeMode, EdgeEvent, EventStore, NodeId};
pub use time::{TimeWindow, WindowPlan};
pub use report::{run_report, Metric, Report, ReportConfig};
