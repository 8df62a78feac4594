//! Balanced student selection under ranked diversity quotas.
//!
//! A school with capacity `q` admits students who may hold several
//! protected types. Seats are reserved per type and rank; the general type
//! takes `q` seats at the last rank. The selection computed here is rank
//! maximal, non-wasteful, free of justified envy and maximizes the minimum
//! fraction of every group (students sharing one type set) that gets in.
//!
//! Two interchangeable backends compute it: [`flow`] works on a compact
//! network over groups and is insensitive to the number of students, and
//! [`graph`] performs alternating-path surgery on the student/seat graph.
//! [`oracle`] enumerates everything on small instances for cross-checks.

pub mod baseline;
pub mod bench;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod gda;
pub mod gen;
pub mod graph;
pub mod io;
pub mod model;
pub mod oracle;
pub mod search;
pub mod solve;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ChoiceResult, Instance, Quota, Ratio, Signature, StudentIdx, StudentRecord, TargetVector};
pub use solve::{solve, Backend};
