//! Fixed-schema CSV emission: `bound,n,m,k,param,value,stderr,provenance,seed`
//! with values serialized to 12 significant digits so outputs diff cleanly.

use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub bound: String,
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub param: String,
    pub value: f64,
    pub stderr: f64,
    pub provenance: &'static str,
    pub seed: u64,
}

pub const HEADER: &str = "bound,n,m,k,param,value,stderr,provenance,seed";

fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.11e}")
    }
}

pub fn render(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.bound,
            r.n,
            r.m,
            r.k,
            r.param,
            fmt_sig(r.value),
            fmt_sig(r.stderr),
            r.provenance,
            r.seed
        ));
    }
    out
}

pub fn write_output(rows: &[ResultRow], out: Option<&Path>) -> Result<(), String> {
    let text = render(rows);
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| format!("failed to write {}: {e}", path.display())),
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| format!("failed to write stdout: {e}"))
        }
    }
}
