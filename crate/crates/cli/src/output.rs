use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::args::Format;

/// Shortest round-trip rendering, always with a decimal point or `inf`.
pub fn number(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

/// Rewrites CSV text in the requested format.
pub fn render(csv_text: &[u8], format: Format) -> anyhow::Result<Vec<u8>> {
    if format == Format::Csv {
        return Ok(csv_text.to_vec());
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(csv_text);
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out.into_bytes())
}

pub fn emit(bytes: &[u8], output: Option<&Path>) -> io::Result<()> {
    match output {
        Some(path) => File::create(path)?.write_all(bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}
