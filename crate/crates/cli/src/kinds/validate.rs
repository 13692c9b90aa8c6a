//! `validate`: regime checks reported as diagnostics, never as errors.

use std::fmt;

use tailind::config::ConfigDoc;
use tailind::numerics::dependence_summary;
use tailind::panelgen::{DependenceModel, PanelSpec};
use tailind::Error;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Config line, 0 when the value came from a flag or a default.
    pub line: usize,
    pub check: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match self.line {
            0 => write!(f, "{sev}: [{}] {}", self.check, self.message),
            l => write!(f, "config:{l}: {sev}: [{}] {}", self.check, self.message),
        }
    }
}

fn line_of(doc: &ConfigDoc, section: &str, key: &str) -> usize {
    doc.get(section, key).map_or(0, |e| e.line)
}

fn from_error(check: &'static str, fallback_line: usize, e: Error) -> Diagnostic {
    let (line, message) = match e {
        Error::Config { line, message } => (if line == 0 { fallback_line } else { line }, message),
        other => (fallback_line, other.to_string()),
    };
    Diagnostic { severity: Severity::Error, line, check, message }
}

/// Every regime constraint that can be checked on a configuration.
pub fn diagnostics(doc: &ConfigDoc) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut warn = |line, check, message| out.push(Diagnostic { severity: Severity::Warning, line, check, message });
    let ratio_limit = match doc.parsed::<f64>("validate", "log_p_ratio") {
        Ok(r) => r.unwrap_or(0.25),
        Err(e) => {
            drop(warn);
            return vec![from_error("config", 0, e)];
        }
    };
    let mut errors = Vec::new();
    if let Err(e) = ExperimentConfig::from_doc(doc.clone()) {
        errors.push(from_error("config", 0, e));
    }
    if let Some(r) = doc.parsed::<f64>("level", "rho_max").ok().flatten() {
        if let Err(e) = dependence_summary(r) {
            errors.push(from_error("rho", line_of(doc, "level", "rho_max"), e));
        }
    }
    if doc.get("panel", "p").is_some() {
        match PanelSpec::parse_config(doc) {
            Err(e) => errors.push(from_error("panel", line_of(doc, "panel", "p"), e)),
            Ok(spec) => {
                let p_line = line_of(doc, "panel", "p");
                let log_p = (spec.p as f64).ln();
                let ratio = log_p / spec.n as f64;
                if ratio > ratio_limit {
                    warn(
                        line_of(doc, "panel", "n"),
                        "log-p-regime",
                        format!(
                            "log p / n = {ratio:.4} exceeds {ratio_limit} (p = {}, n = {}); the log p = o(n) regime is doubtful",
                            spec.p, spec.n
                        ),
                    );
                }
                let ma_variant = doc.get("level", "variant").is_some_and(|e| e.value == "moving-average");
                if matches!(spec.model, DependenceModel::MovingAverage { .. }) || ma_variant {
                    let kappa = spec.model.kappa();
                    if kappa as f64 > log_p {
                        warn(
                            line_of(doc, "panel", "kappa"),
                            "ma-kappa",
                            format!("kappa = {kappa} exceeds log p = {log_p:.3}"),
                        );
                    }
                }
                if let Err(e) = spec.model.filter() {
                    errors.push(from_error("dependence", line_of(doc, "panel", "rho").max(line_of(doc, "panel", "model")), e));
                } else if let Err(e) = dependence_summary(spec.model.rho_max()) {
                    errors.push(from_error("rho", line_of(doc, "panel", "rho"), e));
                }
                if let Err(e) = spec.law.validate() {
                    errors.push(from_error("law", line_of(doc, "panel", "law"), e));
                }
                if let Some(w) = &spec.weights {
                    if let Err(e) = w.check(spec.p, |i| spec.size(i)) {
                        errors.push(from_error("weights", line_of(doc, "panel", "weights"), e));
                    }
                }
                if let Err(e) = spec.validate() {
                    let msg = e.to_string();
                    if !errors.iter().any(|d| msg.contains(&d.message)) {
                        errors.push(from_error("panel", p_line, e));
                    }
                }
            }
        }
    }
    drop(warn);
    // The config check repeats the first panel error; keep one copy.
    let mut seen: Vec<String> = Vec::new();
    for d in errors {
        if !seen.iter().any(|m| m.contains(&d.message) || d.message.contains(m.as_str())) {
            seen.push(d.message.clone());
            out.push(d);
        }
    }
    out.sort_by_key(|d| (std::cmp::Reverse(d.severity), d.line));
    out
}
