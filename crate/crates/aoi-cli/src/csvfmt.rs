//! CSV output with reproducibility metadata.
//!
//! Conventions: LF line endings, '.' decimal separator, floats at 17
//! significant digits so files round-trip bit-exactly, '#'-prefixed comment
//! lines carrying tool version, the resolved parameter document, the seed,
//! and any summary values.

use std::fmt::Write as _;

/// 17 significant digits; unbounded ages print as `inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Missing statistics become empty cells.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Builder for one CSV document.
pub struct Csv {
    buf: String,
}

impl Csv {
    /// Start a document with the standard metadata header. `seed` is `None`
    /// for purely analytic outputs.
    pub fn new(spec_json: &str, seed: Option<u64>) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# tool: aoi {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(buf, "# spec: {spec_json}");
        match seed {
            Some(s) => {
                let _ = writeln!(buf, "# seed: {s}");
            }
            None => buf.push_str("# seed: none\n"),
        }
        Csv { buf }
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.buf, "# {text}");
    }

    pub fn summary(&mut self, key: &str, value: &str) {
        let _ = writeln!(self.buf, "# {key}: {value}");
    }

    pub fn row<I>(&mut self, cells: I)
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let mut first = true;
        for cell in cells {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(cell.as_ref());
            first = false;
        }
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
