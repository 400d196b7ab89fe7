//! Static bearer-token table.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Claims tasks and submits labels.
    Annotator,
    /// Resolves disagreements.
    Adjudicator,
    /// Read-only access to reports, clusters and the export.
    Viewer,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Annotator => "annotator",
            Role::Adjudicator => "adjudicator",
            Role::Viewer => "viewer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principal {
    pub user: String,
    pub role: Role,
}

/// Maps bearer tokens to users.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenTable(pub BTreeMap<String, Principal>);

impl TokenTable {
    pub fn insert(&mut self, token: impl Into<String>, user: impl Into<String>, role: Role) {
        self.0.insert(
            token.into(),
            Principal {
                user: user.into(),
                role,
            },
        );
    }

    pub fn lookup(&self, token: &str) -> Option<&Principal> {
        self.0.get(token)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
