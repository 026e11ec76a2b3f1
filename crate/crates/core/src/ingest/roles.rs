use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Conversation, WindowConfig};

/// Groups speakers into parties and sets per-party dominance thresholds.
///
/// ```json
/// {"parties": {"lawyer_1": "lawyers", "justice_a": "justices"},
///  "thresholds": {"lawyers": 0.8, "justices": 0.4},
///  "expected_primary": "lawyers"}
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleMap {
    #[serde(default)]
    pub parties: BTreeMap<String, String>,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    pub expected_primary: Option<String>,
}

impl RoleMap {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let map: RoleMap = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            key: e.path().to_string(),
            message: e.into_inner().to_string(),
        })?;
        for (party, t) in &map.thresholds {
            if !(*t > 0.0 && *t <= 1.0) {
                return Err(Error::Config {
                    key: format!("thresholds.{party}"),
                    message: format!("must be in (0, 1], got {t}"),
                });
            }
        }
        Ok(map)
    }

    /// Every party the map knows about.
    pub fn declared_parties(&self) -> impl Iterator<Item = &String> {
        self.parties
            .values()
            .chain(self.expected_primary.iter())
    }

    /// Re-groups the conversation's speakers. With an empty `parties` map the
    /// conversation keeps its identity grouping; speakers the map does not
    /// cover stay unmapped and fail validation.
    pub fn apply(&self, conv: Conversation) -> Conversation {
        let mut conv = if self.parties.is_empty() {
            conv
        } else {
            let party_of = conv
                .utterances
                .iter()
                .filter_map(|u| {
                    self.parties
                        .get(&u.speaker)
                        .map(|p| (u.speaker.clone(), p.clone()))
                })
                .collect();
            let mut conv = conv.with_party_map(party_of);
            conv.parties
                .extend(self.parties.values().cloned());
            conv
        };
        if let Some(p) = &self.expected_primary {
            conv.parties.insert(p.clone());
        }
        conv
    }

    pub fn apply_thresholds(&self, cfg: &mut WindowConfig) {
        for (party, t) in &self.thresholds {
            cfg.party_thresholds.insert(party.clone(), *t);
        }
    }

    pub fn party_of<'a>(&'a self, speaker: &'a str) -> &'a str {
        self.parties.get(speaker).map(String::as_str).unwrap_or(speaker)
    }
}

pub fn load_role_map(path: impl AsRef<Path>) -> Result<RoleMap> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RoleMap::from_json_str(&text)
}
