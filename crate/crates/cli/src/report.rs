//! Command reports. The JSON and text renderings carry the same fields.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Report {
    /// The command line, minus the program name.
    pub command: String,
    /// `None` for commands that compute rather than decide.
    pub verdict: Option<bool>,
    pub values: Vec<Entry>,
    pub witnesses: Vec<Entry>,
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            verdict: None,
            values: Vec::new(),
            witnesses: Vec::new(),
            elapsed_us: 0,
        }
    }

    pub fn value(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.values.push(Entry {
            key: key.into(),
            value: value.to_string(),
        });
        self
    }

    pub fn witness(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.witnesses.push(Entry {
            key: key.into(),
            value: value.to_string(),
        });
        self
    }

    pub fn verdict(&mut self, holds: bool) -> &mut Self {
        self.verdict = Some(holds);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.iter().find(|e| e.key == key).map(|e| e.value.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("plain data") + "\n",
            Format::Text => self.to_text(),
        }
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        match self.verdict {
            Some(v) => {
                let _ = writeln!(out, "verdict: {v}");
            }
            None => out.push_str("verdict: -\n"),
        }
        for e in &self.values {
            let _ = writeln!(out, "{} = {}", e.key, e.value);
        }
        for e in &self.witnesses {
            let _ = writeln!(out, "witness {} = {}", e.key, e.value);
        }
        let _ = writeln!(out, "elapsed: {}us", self.elapsed_us);
        out
    }
}
