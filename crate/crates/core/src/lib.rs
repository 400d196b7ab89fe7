//! Mining app-market reviews that mention red-packet rewards.
//!
//! The pipeline runs import → keyword filter → translation → embedding →
//! sentiment classification → clustering → summarisation → reports. Each
//! stage lives in its own module and exchanges plain JSON-lines or CSV
//! files, so stages can be run and inspected independently.

pub mod artifacts;
pub mod cluster;
pub mod corpus;
pub mod embed;
pub mod filter;
pub mod percent;
pub mod popdetect;
pub mod provider;
pub mod report;
pub mod sentiment;
pub mod summarize;
pub mod synth;
pub mod text;
pub mod translate;
