use std::fmt;

use serde::{Deserialize, Serialize};

use crate::span::Span;

/// Identity of a method: `Class.method/arity`, with an `@path/stem` suffix
/// when the class name is declared in more than one file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethodId(String);

impl MethodId {
    pub fn new(class_name: &str, method_name: &str, arity: usize, disambiguator: Option<&str>) -> Self {
        match disambiguator {
            Some(stem) => Self(format!("{class_name}.{method_name}/{arity}@{stem}")),
            None => Self(format!("{class_name}.{method_name}/{arity}")),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `Class.method` without arity or disambiguator.
    pub fn qualified_name(&self) -> &str {
        self.0.split('/').next().unwrap_or(&self.0)
    }
}

impl From<&str> for MethodId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

impl From<String> for MethodId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for MethodId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodDecl {
    pub id: MethodId,
    pub class_name: String,
    pub method_name: String,
    pub arity: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub varargs: bool,
    pub file: String,
    /// Signature through closing brace (or `;` for bodiless declarations).
    pub span: Span,
    /// Further bodies collapsed into this id (same-arity overloads).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overloads: Vec<Span>,
}

impl MethodDecl {
    pub fn spans(&self) -> impl Iterator<Item = &Span> {
        std::iter::once(&self.span).chain(self.overloads.iter())
    }

    pub fn contains_site(&self, offset: usize) -> bool {
        self.spans().any(|s| s.contains(offset))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RawCallSite {
    pub caller: MethodId,
    pub callee_name: String,
    /// `None` when the argument list could not be delimited.
    pub arg_count: Option<usize>,
    /// Receiver identifier written before the `.` (`Foo` in `Foo.bar()`).
    pub qualifier: Option<String>,
    pub file: String,
    pub site: usize,
}

/// All resolved call sites from one method to another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CallEdge {
    pub caller: MethodId,
    pub callee: MethodId,
    pub site_count: usize,
    pub sites: Vec<usize>,
}
