//! JSON game files.
//!
//! ```json
//! { "n": 3, "big_boss": 1, "values": [0, 56, 0, 111, 0, 136, 0, 140] }
//! { "n": 3, "values": { "1": 56, "1,2": 111, "1,3": 136, "1,2,3": 140 } }
//! ```
//!
//! `values` is either the dense table in bitmask order or a map from
//! comma-joined ascending player labels to worth. Unlisted coalitions in the
//! map form are worth 0. Output always uses the dense form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Game, GameError};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed game file: {0}")]
    Parse(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Worths {
    Dense(Vec<f64>),
    Map(BTreeMap<String, f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_boss: Option<usize>,
    pub values: Worths,
}

fn parse_label(key: &str) -> Result<Vec<usize>, FileError> {
    let key = key.trim();
    if key.is_empty() {
        return Ok(Vec::new());
    }
    let members = key
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| FileError::Parse(format!("bad coalition key {key:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if members.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FileError::Parse(format!(
            "coalition key {key:?} must list players in ascending order"
        )));
    }
    Ok(members)
}

impl GameFile {
    pub fn into_game(self) -> Result<Game, FileError> {
        let game = match self.values {
            Worths::Dense(values) => Game::from_table(self.n, values)?,
            Worths::Map(map) => {
                let entries = map
                    .iter()
                    .map(|(k, &w)| parse_label(k).map(|m| (m, w)))
                    .collect::<Result<Vec<_>, _>>()?;
                Game::from_entries(self.n, entries)?
            }
        };
        match self.big_boss {
            Some(b) => Ok(game.with_big_boss(b)?),
            None => Ok(game),
        }
    }

    pub fn from_game(g: &Game) -> Self {
        GameFile {
            n: g.n(),
            big_boss: g.big_boss(),
            values: Worths::Dense(g.values().to_vec()),
        }
    }
}

pub fn parse_game(text: &str) -> Result<Game, FileError> {
    let file: GameFile = serde_json::from_str(text).map_err(|e| FileError::Parse(e.to_string()))?;
    file.into_game()
}

/// Dense JSON form. Floats use the shortest representation that parses back
/// to the same value.
pub fn serialize_game(g: &Game) -> String {
    serde_json::to_string_pretty(&GameFile::from_game(g)).expect("finite worths serialize")
}

pub fn read_game(path: &Path) -> Result<Game, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_game(&text)
}
