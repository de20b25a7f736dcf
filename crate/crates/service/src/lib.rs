//! Hosts engine sessions for editors and the browser UI.
//!
//! [`lines`] speaks the newline-delimited protocol over any byte stream
//! (stdio, TCP); [`http`] exposes the same sessions plus stateless queries
//! over HTTP/JSON. Every connection or HTTP session owns an independent
//! [`wandercode_core::protocol::Session`] over one shared engine.

pub mod http;
pub mod lines;

pub use http::{router, serve_http};
pub use lines::{serve_lines, serve_stdio, serve_tcp};
