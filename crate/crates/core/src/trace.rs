//! Decision log: one line per construction decision.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Step1,
    Step2,
    Step3,
    LuneA,
    LuneB,
    LuneC,
    LuneD,
    HalfLune,
    Retry,
    Case1,
    Case21,
    Case221,
    Case222,
    RowChoice,
    Fallback,
    Repair,
}

impl Label {
    pub const ALL: [Label; 16] = [
        Label::Step1,
        Label::Step2,
        Label::Step3,
        Label::LuneA,
        Label::LuneB,
        Label::LuneC,
        Label::LuneD,
        Label::HalfLune,
        Label::Retry,
        Label::Case1,
        Label::Case21,
        Label::Case221,
        Label::Case222,
        Label::RowChoice,
        Label::Fallback,
        Label::Repair,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Step1 => "step1",
            Label::Step2 => "step2",
            Label::Step3 => "step3",
            Label::LuneA => "lune-a",
            Label::LuneB => "lune-b",
            Label::LuneC => "lune-c",
            Label::LuneD => "lune-d",
            Label::HalfLune => "half-lune",
            Label::Retry => "retry",
            Label::Case1 => "case1",
            Label::Case21 => "case2.1",
            Label::Case221 => "case2.2(1)",
            Label::Case222 => "case2.2(2)",
            Label::RowChoice => "row-choice",
            Label::Fallback => "fallback",
            Label::Repair => "repair",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        Label::ALL.iter().copied().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    entries: Vec<(Label, String)>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, label: Label, detail: impl Into<String>) {
        self.entries.push((label, detail.into()));
    }

    pub fn entries(&self) -> &[(Label, String)] {
        &self.entries
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.entries.iter().map(|(l, _)| *l).collect()
    }

    pub fn count(&self, label: Label) -> usize {
        self.entries.iter().filter(|(l, _)| *l == label).count()
    }

    pub fn extend(&mut self, other: Trace) {
        self.entries.extend(other.entries);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (label, detail) in &self.entries {
            out.push_str(label.as_str());
            if !detail.is_empty() {
                out.push(' ');
                out.push_str(detail);
            }
            out.push('\n');
        }
        out
    }
}
