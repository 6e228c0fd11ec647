//! Machine-readable campaign output: one JSON line per verified bound,
//! followed by one summary line, byte-stable for a fixed configuration.

use seqmeas::bounds::BoundReport;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

/// One verified bound tagged with the instance that produced it.
#[derive(Debug, Clone)]
pub struct Record {
    pub family: String,
    pub d: usize,
    pub instance: usize,
    pub seed: u64,
    pub bound: BoundReport,
}

impl Record {
    pub fn to_json_line(&self) -> String {
        let mut m = Map::new();
        m.insert("family".into(), Value::String(self.family.clone()));
        m.insert("d".into(), json!(self.d));
        m.insert("instance".into(), json!(self.instance));
        m.insert("seed".into(), json!(self.seed));
        m.insert("bound".into(), self.bound.to_json());
        Value::Object(m).to_string()
    }
}

/// Failure counts per family plus the grand totals.
#[derive(Debug, Default)]
pub struct Summary {
    pub total: usize,
    pub failed: usize,
    pub by_family: BTreeMap<String, (usize, usize)>,
    /// `family/d/instance: bound-name` lines for the stderr digest.
    pub failures: Vec<String>,
}

impl Summary {
    pub fn absorb(&mut self, record: &Record) {
        self.total += 1;
        let entry = self.by_family.entry(record.family.clone()).or_insert((0, 0));
        entry.0 += 1;
        if !record.bound.holds {
            self.failed += 1;
            entry.1 += 1;
            self.failures.push(format!(
                "{}/d={}/instance={}: {} (lhs={}, rhs={}, slack={:?})",
                record.family,
                record.d,
                record.instance,
                record.bound.name,
                record.bound.lhs,
                record.bound.rhs,
                record.bound.slack,
            ));
        }
    }

    pub fn all_hold(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json_line(&self) -> String {
        let mut fams = Map::new();
        for (name, (total, failed)) in &self.by_family {
            fams.insert(name.clone(), json!({ "total": total, "failed": failed }));
        }
        let mut m = Map::new();
        m.insert(
            "summary".into(),
            json!({ "total": self.total, "failed": self.failed, "by_family": Value::Object(fams) }),
        );
        Value::Object(m).to_string()
    }
}
