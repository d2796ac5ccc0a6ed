//! Deterministic report rendering: a plain text form and a structured
//! (JSON) form mirroring it one-to-one.

use std::collections::BTreeMap;

use strsem_core::accept::{Check, Status};

pub struct Report {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("SUITE {}\n", self.suite));
        for (k, v) in &self.params {
            out.push_str(&format!("PARAM {k}={v}\n"));
        }
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            out.push_str(&format!("{status} {} - {}\n", c.name, c.details));
        }
        out.push_str(&format!(
            "RESULT {}\n",
            if self.passed() { "pass" } else { "fail" }
        ));
        out
    }

    pub fn render_structured(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"suite\": {},\n", json_string(&self.suite)));
        out.push_str("  \"params\": {");
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{}: {}", json_string(k), json_string(v)))
            .collect();
        out.push_str(&params.join(", "));
        out.push_str("},\n");
        out.push_str("  \"checks\": [\n");
        for (i, c) in self.checks.iter().enumerate() {
            out.push_str(&format!(
                "    {{\"name\": {}, \"status\": {}, \"details\": {}}}{}\n",
                json_string(&c.name),
                json_string(match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                }),
                json_string(&c.details),
                if i + 1 < self.checks.len() { "," } else { "" }
            ));
        }
        out.push_str("  ],\n");
        out.push_str(&format!(
            "  \"result\": {}\n",
            json_string(if self.passed() { "pass" } else { "fail" })
        ));
        out.push_str("}\n");
        out
    }
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
