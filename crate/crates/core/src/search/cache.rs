//! Append-only JSONL store for search results.
//!
//! One record per line, flat fields, keyed by (n, m, h).  The file is never
//! rewritten: precedence is resolved at load time — the last exact record
//! for a key wins, and a budget-exhausted record never displaces an exact
//! one.  This makes concurrent-append corruption impossible to mistake for
//! data (a torn line fails to parse loudly) and keeps resumed runs cheap.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Outcome quality of one search cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// The full candidate space was covered; rho_hat is the true minimum.
    Exact,
    /// The node budget ran out; rho_hat is only an upper bound.
    BudgetExhausted,
}

/// One (n, m, h) cell: the minimal restricted h-fold sumset size over
/// m-subsets of Z_n, a canonical witness attaining it, and how much work
/// the search did.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchRecord {
    pub n: u32,
    pub m: u32,
    pub h: u32,
    pub rho_hat: u32,
    /// Sorted residues of one minimizer, in canonical (affine-minimal) form.
    pub witness: Vec<u32>,
    /// Element placements explored by the DFS (0 when no search was needed).
    pub nodes: u64,
    pub status: SearchStatus,
    pub tool_version: String,
}

impl SearchRecord {
    pub fn key(&self) -> (u32, u32, u32) {
        (self.n, self.m, self.h)
    }
}

/// In-memory view of the cache plus an optional backing file.
pub struct ResultsCache {
    map: BTreeMap<(u32, u32, u32), SearchRecord>,
    file: Option<File>,
    path: Option<PathBuf>,
}

// an incoming record replaces the held one unless it would downgrade an
// exact result to a budget bound
fn supersedes(new: &SearchRecord, old: &SearchRecord) -> bool {
    new.status == SearchStatus::Exact || old.status != SearchStatus::Exact
}

impl ResultsCache {
    /// A cache with no backing file; inserts stay in memory.
    pub fn in_memory() -> Self {
        ResultsCache { map: BTreeMap::new(), file: None, path: None }
    }

    /// Opens (creating if absent) a JSONL cache file and loads its records.
    pub fn open(path: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: SearchRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::CacheParse { line: idx + 1, msg: e.to_string() })?;
                match map.get(&rec.key()) {
                    Some(old) if !supersedes(&rec, old) => {}
                    _ => {
                        map.insert(rec.key(), rec);
                    }
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ResultsCache { map, file: Some(file), path: Some(path.to_path_buf()) })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, n: u32, m: u32, h: u32) -> Option<&SearchRecord> {
        self.map.get(&(n, m, h))
    }

    /// True when the cell already holds an exact result.
    pub fn has_exact(&self, n: u32, m: u32, h: u32) -> bool {
        self.get(n, m, h).is_some_and(|r| r.status == SearchStatus::Exact)
    }

    /// Appends the record to the backing file (if any) and folds it into the
    /// in-memory view under the same precedence rules as loading.
    pub fn insert(&mut self, rec: SearchRecord) -> Result<()> {
        if let Some(file) = &mut self.file {
            let mut line = serde_json::to_string(&rec).expect("record serializes");
            line.push('\n');
            file.write_all(line.as_bytes())?;
        }
        match self.map.get(&rec.key()) {
            Some(old) if !supersedes(&rec, old) => {}
            _ => {
                self.map.insert(rec.key(), rec);
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Records in (n, m, h) key order.
    pub fn records(&self) -> impl Iterator<Item = &SearchRecord> {
        self.map.values()
    }
}
