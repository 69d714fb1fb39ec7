//! Mode construction from annotated entity-relationship diagrams.
//!
//! [`er`] holds the diagram model and its JSON form, [`paths`] finds
//! relationship paths between features, [`modes`] compiles paths into mode
//! declarations and [`clauses`] measures the clause space a mode set admits.

pub mod clauses;
pub mod er;
pub mod fixtures;
pub mod modes;
pub mod paths;
