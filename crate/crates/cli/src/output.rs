use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// `key = value` lines.
    Text,
    /// `key=value` lines.
    Kv,
}

/// Round to 12 significant digits; tiny and huge magnitudes use exponent form.
pub fn number(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    let magnitude = rounded.abs();
    if (1e-4..1e15).contains(&magnitude) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Ordered key/value report shared by both output formats.
pub struct Report {
    format: Format,
    out: String,
}

impl Report {
    pub fn new(format: Format) -> Self {
        Report { format, out: String::new() }
    }

    pub fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = match self.format {
            Format::Text => writeln!(self.out, "{key} = {value}"),
            Format::Kv => writeln!(self.out, "{key}={value}"),
        };
    }

    pub fn num(&mut self, key: &str, x: f64) {
        self.put(key, number(x));
    }

    pub fn flag(&mut self, key: &str, b: bool) {
        self.put(key, b);
    }

    pub fn finish(self) -> String {
        self.out
    }
}
