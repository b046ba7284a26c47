use std::fmt::Write as _;

/// Key-value report, printed in insertion order.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<(String, String)>,
    pub mismatches: Vec<String>,
}

impl Report {
    pub fn put(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    /// Appends a verbatim multi-line block under `key`.
    pub fn block(&mut self, key: &str, body: &str) {
        self.lines.push((key.to_string(), format!("|\n{}", body.trim_end())));
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl ToString) {
        let d = detail.to_string();
        self.put(&format!("check.{name}"), if ok { "pass".to_string() } else { format!("FAIL {d}") });
        if !ok {
            self.mismatches.push(format!("{name}: {d}"));
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }
}

pub fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
