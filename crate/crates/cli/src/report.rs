//! Human-readable and JSON renderings of command results.
//!
//! Point-set reports keep everything except the points on `#` comment lines,
//! so the text form can be read back as a set file. The JSON form carries the
//! set in a `points` field for the same reason.

use std::fmt::Write;

use freeze_core::{DigitalImage, Point, SearchStats, SelfMap};
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub struct Report {
    pub text: String,
    pub json: Value,
}

impl Report {
    fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("tool".into(), json!("freeze"));
        json.insert("version".into(), json!(VERSION));
        json.insert("command".into(), json!(command));
        Report {
            text: String::new(),
            json: Value::Object(json),
        }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.json
            .as_object_mut()
            .expect("report is an object")
            .insert(key.into(), value);
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
            s.push('\n');
            s
        } else {
            self.text.clone()
        }
    }
}

fn coords(p: &Point) -> Value {
    json!(p.coords())
}

fn point_list(points: &[Point]) -> Value {
    Value::Array(points.iter().map(coords).collect())
}

fn assignment(w: &SelfMap) -> Value {
    Value::Array(
        w.pairs()
            .map(|(x, y)| json!({ "from": x.coords(), "to": y.coords() }))
            .collect(),
    )
}

/// Only the points a witness actually moves.
fn moves(w: &SelfMap) -> String {
    let moved: Vec<String> = w
        .pairs()
        .filter(|(x, y)| x != y)
        .map(|(x, y)| format!("{x} -> {y}"))
        .collect();
    moved.join(", ")
}

fn stats_json(stats: &SearchStats) -> Value {
    let pruned: Map<String, Value> = stats
        .rule_removals()
        .map(|(r, n)| (r.name().to_string(), json!(n)))
        .collect();
    json!({
        "nodes": stats.nodes,
        "seeds": stats.seeds,
        "arc_removals": stats.arc_removals,
        "pruned": pruned,
    })
}

fn stats_text(stats: &SearchStats) -> String {
    let mut s = format!(
        "nodes: {}, seeds: {}, arc removals: {}",
        stats.nodes, stats.seeds, stats.arc_removals
    );
    for (r, n) in stats.rule_removals() {
        let _ = write!(s, ", {r}: {n}");
    }
    s
}

pub fn info(image: &DigitalImage, boundary: usize, mandatory: usize) -> Report {
    let mut r = Report::new("info");
    let connected = image.is_connected();
    r.line(format!("points: {}", image.len()));
    r.line(format!("dim: {}", image.dim()));
    r.line(format!("adjacency: c{}", image.u()));
    r.line(format!("connected: {connected}"));
    r.line(format!("boundary: {boundary}"));
    r.line(format!("mandatory: {mandatory}"));
    r.set("points", json!(image.len()));
    r.set("dim", json!(image.dim()));
    r.set("adjacency", json!(image.u()));
    r.set("connected", json!(connected));
    r.set("boundary", json!(boundary));
    r.set("mandatory", json!(mandatory));
    r
}

pub fn construct(method: &str, source: &str, points: &[Point]) -> Report {
    let mut r = Report::new("construct");
    r.line(format!("# method: {method}"));
    r.line(format!("# decomposition: {source}"));
    r.line(format!("# size: {}", points.len()));
    for p in points {
        r.line(p.to_string());
    }
    r.set("method", json!(method));
    r.set("decomposition", json!(source));
    r.set("size", json!(points.len()));
    r.set("points", point_list(points));
    r
}

pub fn frozen(stats: &SearchStats) -> Report {
    let mut r = Report::new("verify");
    r.line("status: frozen");
    r.line(format!("stats: {}", stats_text(stats)));
    r.set("status", json!("frozen"));
    r.set("witness", Value::Null);
    r.set("stats", stats_json(stats));
    r
}

pub fn not_frozen(command: &str, witness: &SelfMap, stats: Option<&SearchStats>) -> Report {
    let mut r = Report::new(command);
    r.line("status: not-frozen");
    if let Some(stats) = stats {
        r.line(format!("stats: {}", stats_text(stats)));
    }
    r.line("witness:");
    for (x, y) in witness.pairs() {
        r.line(format!("  {x} -> {y}"));
    }
    r.set("status", json!("not-frozen"));
    r.set("witness", assignment(witness));
    if let Some(stats) = stats {
        r.set("stats", stats_json(stats));
    }
    r
}

pub fn inconclusive(command: &str, nodes: u64, budget: u64) -> Report {
    let mut r = Report::new(command);
    r.line("status: inconclusive");
    r.line(format!("stats: nodes: {nodes}, budget: {budget}"));
    r.set("status", json!("inconclusive"));
    r.set("witness", Value::Null);
    r.set("stats", json!({ "nodes": nodes, "budget": budget }));
    r
}

pub fn minimize(
    input: usize,
    set: &[Point],
    removed: &[Point],
    certificates: &[(Point, SelfMap)],
) -> Report {
    let mut r = Report::new("minimize");
    let minimal = removed.is_empty();
    r.line("# status: frozen");
    r.line(format!("# input size: {input}"));
    r.line(format!("# minimal as given: {minimal}"));
    for p in removed {
        r.line(format!("# removed: {p}"));
    }
    for (p, w) in certificates {
        r.line(format!("# kept {p}: {}", moves(w)));
    }
    r.line(format!("# size: {}", set.len()));
    for p in set {
        r.line(p.to_string());
    }
    r.set("status", json!("frozen"));
    r.set("minimal", json!(minimal));
    r.set("size", json!(set.len()));
    r.set("points", point_list(set));
    r.set("removed", point_list(removed));
    r.set(
        "certificates",
        Value::Array(
            certificates
                .iter()
                .map(|(p, w)| json!({ "point": p.coords(), "witness": assignment(w) }))
                .collect(),
        ),
    );
    r
}
