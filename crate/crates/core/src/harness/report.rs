use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::ExperimentReport;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "param,n,trials,sim_mean,sim_std,ci95,theory_lower,theory_upper,excluded";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One CSV line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub param: f64,
    pub n: usize,
    pub trials: usize,
    pub sim_mean: f64,
    pub sim_std: f64,
    pub ci95: f64,
    pub theory_lower: f64,
    pub theory_upper: f64,
    pub excluded: usize,
}

impl ReportRow {
    pub fn from_report(param: f64, r: &ExperimentReport) -> Self {
        Self {
            param,
            n: r.spec.shape.n,
            trials: r.spec.trials,
            sim_mean: r.mean_over_sqrt_n,
            sim_std: r.std_over_sqrt_n,
            ci95: r.ci95_halfwidth,
            theory_lower: r.theory_lower,
            theory_upper: r.theory_upper,
            excluded: r.trials_excluded,
        }
    }

    fn rounded(&self) -> Self {
        let r = |v: f64| format_g6(v).parse::<f64>().unwrap_or(v);
        Self {
            param: r(self.param),
            sim_mean: r(self.sim_mean),
            sim_std: r(self.sim_std),
            ci95: r(self.ci95),
            theory_lower: r(self.theory_lower),
            theory_upper: r(self.theory_upper),
            ..*self
        }
    }
}

/// Six significant digits, shortest form, in the style of C's `%.6g`.
pub fn format_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn render_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            format_g6(r.param),
            r.n.to_string(),
            r.trials.to_string(),
            format_g6(r.sim_mean),
            format_g6(r.sim_std),
            format_g6(r.ci95),
            format_g6(r.theory_lower),
            format_g6(r.theory_upper),
            r.excluded.to_string(),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// JSON array of rows, floats rounded as in the CSV. Non-finite values
/// become `null`.
pub fn render_json(rows: &[ReportRow]) -> String {
    let rounded: Vec<ReportRow> = rows.iter().map(ReportRow::rounded).collect();
    let mut s = serde_json::to_string_pretty(&rounded).expect("rows serialize");
    s.push('\n');
    s
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn emit_report(rows: &[ReportRow], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => render_csv(rows),
        OutputFormat::Json => render_json(rows),
    };
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::io(Path::new("<stdout>"), e))
        }
    }
}
