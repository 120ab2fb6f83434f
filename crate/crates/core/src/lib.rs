//! Job-ad text measurement: ingestion, dictionary matching, embedding
//! retrieval, title/firm/wage extraction, tagging and aggregation.

pub mod aggregate;
pub mod corpus;
pub mod embed_store;
pub mod error;
pub mod firm_match;
pub mod job_tag;
pub mod knowledge_map;
pub mod month;
pub mod stage_pipeline;
pub mod text;
pub mod title_match;
pub mod validate;
pub mod wage_extract;

pub use error::{Error, Result};
pub use month::YearMonth;
