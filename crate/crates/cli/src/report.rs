//! Run reports: one JSON object, or a stream of line-delimited records.

use std::io::Write;
use std::time::Duration;

use anyhow::Result;
use serde_json::{json, Map, Value};

use concur_graph::hash::mix2;
use concur_graph::reach::SearchStats;

pub const SCHEMA: &str = "concur-graph/report/v1";

pub struct Report {
    pub command: &'static str,
    pub engine: String,
    pub threads: usize,
    pub graph: Value,
    pub params: Value,
    /// Deterministic for fixed inputs and seeds.
    pub result: Value,
    pub rounds: Value,
    pub timings: Value,
    /// Per-round detail, only emitted in stream mode.
    rounds_detail: Vec<Value>,
}

impl Report {
    pub fn new(command: &'static str, engine: &str, threads: usize) -> Self {
        Self {
            command,
            engine: engine.to_string(),
            threads,
            graph: Value::Null,
            params: Value::Null,
            result: Value::Null,
            rounds: Value::Null,
            timings: Value::Object(Map::new()),
            rounds_detail: Vec::new(),
        }
    }

    pub fn timing(&mut self, phase: &str, d: Duration) {
        self.timings[phase] = json!(secs(d));
    }

    pub fn round_records(&mut self, run: &str, search: &str, stats: &SearchStats) {
        for (i, r) in stats.per_round.iter().enumerate() {
            self.rounds_detail.push(json!({
                "run": run,
                "search": search,
                "round": i,
                "frontier": r.frontier,
                "mode": r.mode.as_str(),
            }));
        }
    }

    fn params_with_threads(&self) -> Value {
        let mut p = self.params.clone();
        if let Value::Object(m) = &mut p {
            m.insert("threads".into(), json!(self.threads));
        } else {
            p = json!({"threads": self.threads});
        }
        p
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "engine": self.engine,
            "graph": self.graph,
            "params": self.params_with_threads(),
            "result": self.result,
            "rounds": self.rounds,
            "timings": self.timings,
        })
    }

    pub fn emit(&self, stream: bool) -> Result<()> {
        let out = std::io::stdout();
        let mut out = out.lock();
        if !stream {
            writeln!(out, "{}", serde_json::to_string(&self.to_json())?)?;
            return Ok(());
        }
        let mut records = vec![json!({
            "record": "header",
            "command": self.command,
            "engine": self.engine,
            "graph": self.graph,
            "params": self.params_with_threads(),
        })];
        records.extend(self.rounds_detail.iter().map(|r| {
            let mut r = r.clone();
            r["record"] = json!("round");
            r
        }));
        records.push(json!({"record": "rounds", "rounds": self.rounds}));
        records.push(json!({"record": "result", "result": self.result}));
        records.push(json!({"record": "timings", "timings": self.timings}));
        for mut r in records {
            r["schema"] = json!(SCHEMA);
            writeln!(out, "{}", serde_json::to_string(&r)?)?;
        }
        Ok(())
    }
}

pub fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Order-sensitive 64-bit fingerprint, printed as hex.
pub fn digest(items: impl IntoIterator<Item = u64>) -> String {
    let mut acc = 0x6a09_e667_f3bc_c908u64;
    let mut len = 0u64;
    for x in items {
        acc = mix2(acc, x);
        len += 1;
    }
    format!("{:016x}", mix2(acc, len))
}
