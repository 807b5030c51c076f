//! Writes oracle value tables for fixtures and regression goldens.

use std::io::Write;
use std::str::FromStr;

use anyhow::{bail, Result};
use mcts_core::{minimax_solve, soft_value_iterate, value_iterate, ValueTables};

use crate::env::Env;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    Standard,
    Soft(f64),
    Minimax,
}

impl FromStr for OracleKind {
    type Err = anyhow::Error;

    /// `standard`, `minimax`, or `soft` / `soft:<alpha>` (alpha defaults to 1).
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "standard" => OracleKind::Standard,
            "minimax" => OracleKind::Minimax,
            "soft" => OracleKind::Soft(1.0),
            _ => match s.strip_prefix("soft:").map(str::parse::<f64>) {
                Some(Ok(alpha)) if alpha > 0.0 && alpha.is_finite() => OracleKind::Soft(alpha),
                _ => bail!("unknown oracle kind {s:?}; expected standard, minimax, soft or soft:<alpha>"),
            },
        })
    }
}

pub fn solve(env: &Env, kind: OracleKind) -> Result<ValueTables> {
    Ok(match kind {
        OracleKind::Standard => value_iterate(env),
        OracleKind::Soft(alpha) => soft_value_iterate(env, alpha)?,
        OracleKind::Minimax => minimax_solve(env),
    })
}

/// One line per `(state, t)`: `state,t,v,q_0;q_1;...`, sorted by `(t, state)`.
pub fn write_table<W: Write>(tables: &ValueTables, mut out: W) -> Result<()> {
    writeln!(out, "state,t,v,q")?;
    for ((s, t), e) in tables.sorted_entries() {
        let q: Vec<String> = e.q.iter().map(|q| q.to_string()).collect();
        writeln!(out, "{s},{t},{},{}", e.v, q.join(";"))?;
    }
    Ok(())
}
