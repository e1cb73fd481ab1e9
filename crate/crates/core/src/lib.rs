//! A dataspace engine: one catalog describing CSV tables, JSON/XML documents
//! and text files, and one query language over all of them.
//!
//! The usual path through the crate:
//!
//! 1. register files with [`agent::discover`], which infers their structure
//!    and records it in a [`catalog::Catalog`];
//! 2. [`metalang::parse`] a query such as `Se(sales.amount Agg SUM)` and
//!    [`metalang::validate`] it against the catalog;
//! 3. [`engine::execute`] it, or turn it into SQL with [`sqlgen::translate`].
//!
//! ```no_run
//! use dataspace::{agent, catalog::Catalog, engine, metalang};
//!
//! let catalog = agent::discover("data/sales.csv", &Catalog::new())?;
//! let query = metalang::validate(&metalang::parse("Se(sales.amount Agg SUM)")?, &catalog)?;
//! let rs = engine::execute(&query, &catalog, &mut engine::Session::new("me"))?;
//! print!("{}", rs.render_table());
//! # Ok::<(), dataspace::Error>(())
//! ```

pub mod adapters;
pub mod agent;
pub mod catalog;
pub mod cli;
pub mod engine;
pub mod metalang;
pub mod sqlgen;
pub mod value;

pub use value::{Column, ColumnType, ResultSet, Value};

/// Any error the crate reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] metalang::SyntaxError),
    #[error(transparent)]
    Validate(#[from] metalang::ValidateError),
    #[error(transparent)]
    Catalog(#[from] catalog::CatalogError),
    #[error(transparent)]
    Adapter(#[from] adapters::AdapterError),
    #[error(transparent)]
    Discovery(#[from] agent::DiscoveryError),
    #[error(transparent)]
    Engine(#[from] engine::EngineError),
    #[error(transparent)]
    Sql(#[from] sqlgen::SqlError),
}
