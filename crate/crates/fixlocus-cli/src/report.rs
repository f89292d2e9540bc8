//! Result reports with two renderings: a human listing and a line-based
//! machine form that parses back to the identical report.
//!
//! Machine form:
//!
//! ```text
//! fixlocus-report 1
//! kind count
//! row element=(1 2)|order=2|count=4
//! assume merge = discrete (assumed)
//! end
//! ```
//!
//! Row fields are ordered `key=value` pairs joined by `|`; keys are bare
//! idents, values carry any characters except `|` and newline (writers
//! sanitize those on construction).

use std::fmt;

use fixlocus_core::Rational64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub fields: Vec<(String, String)>,
}

impl ReportRow {
    pub fn new() -> ReportRow {
        ReportRow { fields: Vec::new() }
    }

    /// Appends a field, replacing `|` and newlines in the value so the
    /// machine rendering stays parseable.
    pub fn push(mut self, key: &str, value: impl fmt::Display) -> ReportRow {
        debug_assert!(key.chars().all(|c| c.is_alphanumeric() || c == '_'));
        let sanitized: String = value
            .to_string()
            .chars()
            .map(|c| if c == '|' || c == '\n' { '/' } else { c })
            .collect();
        self.fields.push((key.to_string(), sanitized));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl Default for ReportRow {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub kind: String,
    pub rows: Vec<ReportRow>,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ReportParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ReportParseError {}

impl Report {
    pub fn new(kind: &str) -> Report {
        Report {
            kind: kind.to_string(),
            rows: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    /// Adds an assumption line unless an identical one is present.
    pub fn assume(&mut self, text: &str) {
        let sanitized: String = text
            .chars()
            .map(|c| if c == '\n' { ' ' } else { c })
            .collect();
        if !self.assumptions.contains(&sanitized) {
            self.assumptions.push(sanitized);
        }
    }

    pub fn render_machine(&self) -> String {
        let mut s = String::from("fixlocus-report 1\n");
        s.push_str(&format!("kind {}\n", self.kind));
        for row in &self.rows {
            let fields: Vec<String> = row.fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
            s.push_str(&format!("row {}\n", fields.join("|")));
        }
        for a in &self.assumptions {
            s.push_str(&format!("assume {a}\n"));
        }
        s.push_str("end\n");
        s
    }

    pub fn parse_machine(text: &str) -> Result<Report, ReportParseError> {
        let fail = |line: usize, message: &str| ReportParseError {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "fixlocus-report 1")) => {}
            _ => return Err(fail(1, "missing `fixlocus-report 1` header")),
        }
        let kind = match lines.next() {
            Some((_, l)) if l.starts_with("kind ") => l["kind ".len()..].to_string(),
            _ => return Err(fail(2, "missing `kind` line")),
        };
        let mut report = Report::new(&kind);
        let mut ended = false;
        for (i, line) in lines {
            let number = i + 1;
            if ended {
                return Err(fail(number, "content after `end`"));
            }
            if line == "end" {
                ended = true;
            } else if let Some(body) = line.strip_prefix("row ") {
                let mut row = ReportRow::new();
                for field in body.split('|') {
                    match field.split_once('=') {
                        Some((k, v)) => row.fields.push((k.to_string(), v.to_string())),
                        None => return Err(fail(number, "row field without `=`")),
                    }
                }
                report.rows.push(row);
            } else if let Some(body) = line.strip_prefix("assume ") {
                report.assumptions.push(body.to_string());
            } else {
                return Err(fail(number, "expected `row`, `assume`, or `end`"));
            }
        }
        if !ended {
            return Err(fail(text.lines().count(), "missing `end`"));
        }
        Ok(report)
    }

    pub fn render_human(&self) -> String {
        let mut s = format!(
            "{} report, {} row{}\n",
            self.kind,
            self.rows.len(),
            if self.rows.len() == 1 { "" } else { "s" }
        );
        for row in &self.rows {
            let fields: Vec<String> = row.fields.iter().map(|(k, v)| format!("{k} {v}")).collect();
            s.push_str(&format!("  {}\n", fields.join(", ")));
        }
        if !self.assumptions.is_empty() {
            s.push_str("assumptions:\n");
            for a in &self.assumptions {
                s.push_str(&format!("  - {a}\n"));
            }
        }
        s
    }
}

/// `p/q`, or just `p` when the value is integral.
pub fn render_rational(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Report {
        let mut r = Report::new("count");
        r.rows.push(
            ReportRow::new()
                .push("element", "(1 2)(3 4)")
                .push("order", 2)
                .push("count", 4),
        );
        r.rows
            .push(ReportRow::new().push("element", "()").push("count", 0));
        r.assume("merge = discrete (assumed)");
        r
    }

    #[test]
    fn machine_rendering_round_trips() {
        let r = sample();
        assert_eq!(Report::parse_machine(&r.render_machine()).unwrap(), r);
    }

    #[test]
    fn sanitizer_strips_delimiters() {
        let row = ReportRow::new().push("detail", "a|b\nc");
        assert_eq!(row.get("detail"), Some("a/b/c"));
    }

    #[test]
    fn duplicate_assumptions_collapse() {
        let mut r = Report::new("count");
        r.assume("x");
        r.assume("x");
        assert_eq!(r.assumptions.len(), 1);
    }

    #[test]
    fn parse_rejects_malformed_documents() {
        assert!(Report::parse_machine("").is_err());
        assert!(Report::parse_machine("fixlocus-report 1\n").is_err());
        assert!(Report::parse_machine("fixlocus-report 1\nkind x\n").is_err());
        assert!(Report::parse_machine("fixlocus-report 1\nkind x\nrow a\nend\n").is_err());
        assert!(Report::parse_machine("fixlocus-report 1\nkind x\nend\nrow a=1\n").is_err());
    }

    #[test]
    fn rational_rendering() {
        assert_eq!(render_rational(Rational64::new(4, 1)), "4");
        assert_eq!(render_rational(Rational64::new(7, 2)), "7/2");
        assert_eq!(render_rational(Rational64::new(6, 4)), "3/2");
    }

    fn field_value() -> impl Strategy<Value = String> {
        "[ -~]{0,16}".prop_map(|s| s.replace('|', "/"))
    }

    proptest! {
        #[test]
        fn round_trip_over_generated_reports(
            kind in "[a-z]{1,8}",
            keys in proptest::collection::vec("[a-z_]{1,6}", 1..5),
            values in proptest::collection::vec(field_value(), 1..5),
            assumptions in proptest::collection::vec("[ -~]{0,24}", 0..3),
        ) {
            let mut r = Report::new(&kind);
            let mut row = ReportRow::new();
            for (k, v) in keys.iter().zip(values.iter()) {
                row.fields.push((k.clone(), v.clone()));
            }
            r.rows.push(row);
            for a in assumptions {
                r.assumptions.push(a);
            }
            prop_assert_eq!(Report::parse_machine(&r.render_machine()).unwrap(), r);
        }
    }
}
