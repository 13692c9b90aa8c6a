//! Experiment configuration: a [`ConfigDoc`] merged from a file and flags,
//! checked section by section before any work starts.

use std::path::PathBuf;

use tailind::config::ConfigDoc;
use tailind::numerics::{dependence_summary, threshold_regime, MarginalLaw, ThresholdVariant, DEFAULT_MA_CONSTANT};
use tailind::panelgen::{InnovationLaw, PanelSpec};
use tailind::{Error, Result};

use crate::args::{Format, RunArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Calibrate,
    Tails,
    Coupling,
    Cluster,
    Mtc,
    PaperTable,
    Validate,
}

impl Kind {
    pub const ALL: [Kind; 7] =
        [Kind::Calibrate, Kind::Tails, Kind::Coupling, Kind::Cluster, Kind::Mtc, Kind::PaperTable, Kind::Validate];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Calibrate => "calibrate",
            Kind::Tails => "tails",
            Kind::Coupling => "coupling",
            Kind::Cluster => "cluster",
            Kind::Mtc => "mtc",
            Kind::PaperTable => "paper-table",
            Kind::Validate => "validate",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Keys accepted in each section.
const SECTIONS: &[(&str, &[&str])] = &[
    ("run", &["kind", "reps", "jobs", "out", "format"]),
    ("panel", PanelSpec::CONFIG_KEYS),
    ("level", &["t", "eta", "rho_max", "variant", "ma_constant"]),
    ("calibrate", &["p", "n"]),
    ("paper-table", &["p", "n", "p0", "rho_max"]),
    ("tails", &["s", "rows", "pairs"]),
    ("coupling", &["s", "ell", "se_cap", "draws"]),
    ("cluster", &["ell", "marginal"]),
    ("mtc", &["q", "a", "t", "marginal", "beta", "k"]),
    ("validate", &["log_p_ratio"]),
];

/// How the working level is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelPolicy {
    Explicit(f64),
    /// `t = (1+η)√(2γ⁻¹ log p)`, or the refined moving-average level.
    Regime { eta: f64, moving_average: bool },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Effective configuration (file plus flags), recorded in the manifest.
    pub doc: ConfigDoc,
    pub panel: Option<PanelSpec>,
    pub level: LevelPolicy,
    pub rho_max: Option<f64>,
    pub ma_constant: f64,
    pub reps: u64,
    pub jobs: usize,
    pub out: PathBuf,
    pub format: Format,
}

fn flag_error(message: String) -> Error {
    Error::Config { line: 0, message }
}

/// Merges a config file with flag overrides into one document.
pub fn effective_doc(kind: Kind, args: &RunArgs) -> Result<ConfigDoc> {
    let mut doc = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::arg(format!("cannot read config {}: {e}", path.display())))?;
            ConfigDoc::parse(&text)?
        }
        None => ConfigDoc::default(),
    };
    doc.set("run", "kind", kind.name());
    let mut set = |section: &str, key: &str, value: Option<String>| {
        if let Some(v) = value {
            doc.set(section, key, v);
        }
    };
    set("panel", "p", args.p.map(|v| v.to_string()));
    set("panel", "n", args.n.map(|v| v.to_string()));
    set("panel", "kappa", args.kappa.map(|v| v.to_string()));
    set("panel", "model", args.model.clone());
    set("panel", "law", args.law.clone());
    set("panel", "seed", args.seed.map(|v| v.to_string()));
    set("level", "rho_max", args.rho_max.map(|v| v.to_string()));
    set("level", "eta", args.eta.map(|v| v.to_string()));
    set("level", "t", args.level.map(|v| v.to_string()));
    set("run", "reps", args.reps.map(|v| v.to_string()));
    set("run", "jobs", args.jobs.map(|v| v.to_string()));
    set("run", "out", args.out.as_ref().map(|v| v.display().to_string()));
    set("run", "format", args.format.map(|f| f.name().to_string()));
    for item in &args.set {
        let parsed = item.split_once('=').and_then(|(path, value)| {
            let (section, key) = path.rsplit_once('.')?;
            Some((section.trim().to_string(), key.trim().to_string(), value.trim().to_string()))
        });
        match parsed {
            Some((section, key, value)) => doc.set(&section, &key, value),
            None => return Err(flag_error(format!("--set expects SECTION.KEY=VALUE, got `{item}`"))),
        }
    }
    // A flat gaussian-kdep correlation can come from --rho-max alone.
    if let Some(r) = args.rho_max {
        let kdep = doc.get("panel", "model").is_some_and(|e| e.value == "gaussian-kdep");
        if kdep && doc.get("panel", "rho").is_none() {
            doc.set("panel", "rho", r.to_string());
        }
    }
    Ok(doc)
}

impl ExperimentConfig {
    pub fn from_doc(doc: ConfigDoc) -> Result<Self> {
        for e in doc.entries() {
            match SECTIONS.iter().find(|(name, _)| *name == e.section) {
                None => {
                    return Err(Error::Config { line: e.line, message: format!("unknown section [{}]", e.section) })
                }
                Some((_, keys)) => doc.reject_unknown(&e.section, keys)?,
            }
        }
        let kind_entry = doc.get("run", "kind").ok_or_else(|| flag_error("no experiment kind".into()))?;
        let kind = Kind::parse(&kind_entry.value).ok_or_else(|| Error::Config {
            line: kind_entry.line,
            message: format!("unknown experiment kind `{}`", kind_entry.value),
        })?;
        // The analytic kinds only need p, so a panel without n is left unbuilt.
        let analytic = matches!(kind, Kind::Calibrate | Kind::PaperTable);
        let panel = if doc.get("panel", "p").is_some() && !(analytic && doc.get("panel", "n").is_none()) {
            Some(if kind == Kind::Validate { PanelSpec::parse_config(&doc)? } else { PanelSpec::from_config(&doc)? })
        } else {
            None
        };
        let level = match (doc.parsed::<f64>("level", "t")?, doc.parsed::<f64>("level", "eta")?) {
            (Some(t), _) => {
                if !(t.is_finite()) {
                    return Err(line_error(&doc, "level", "t", format!("level must be finite, got {t}")));
                }
                LevelPolicy::Explicit(t)
            }
            (None, eta) => {
                let eta = eta.unwrap_or(0.05);
                if !(eta >= 0.0) {
                    return Err(line_error(&doc, "level", "eta", format!("eta must be nonnegative, got {eta}")));
                }
                let variant = doc.get("level", "variant").map_or("standard", |e| e.value.as_str());
                let moving_average = match variant {
                    "standard" => false,
                    "moving-average" => true,
                    other => {
                        return Err(line_error(&doc, "level", "variant", format!("unknown threshold variant `{other}`")))
                    }
                };
                LevelPolicy::Regime { eta, moving_average }
            }
        };
        let rho_max = doc.parsed::<f64>("level", "rho_max")?;
        if let Some(r) = rho_max {
            dependence_summary(r).map_err(|e| line_error(&doc, "level", "rho_max", e.to_string()))?;
        }
        let ma_constant = doc.parsed::<f64>("level", "ma_constant")?.unwrap_or(DEFAULT_MA_CONSTANT);
        let reps = doc.count("run", "reps")?.unwrap_or(1000);
        if reps == 0 {
            return Err(line_error(&doc, "run", "reps", "replicate count must be at least 1".into()));
        }
        let jobs = match doc.count("run", "jobs")? {
            Some(0) => return Err(line_error(&doc, "run", "jobs", "jobs must be at least 1".into())),
            Some(j) => j as usize,
            None => tailind::montecarlo::default_jobs(),
        };
        let out = doc
            .get("run", "out")
            .map_or_else(|| PathBuf::from(format!("tailind-{}", kind.name())), |e| PathBuf::from(&e.value));
        let format = match doc.get("run", "format").map(|e| (e.value.as_str(), e.line)) {
            None | Some(("csv", _)) => Format::Csv,
            Some(("json", _)) => Format::Json,
            Some((other, line)) => {
                return Err(Error::Config { line, message: format!("unknown format `{other}` (csv or json)") })
            }
        };
        Ok(Self { kind, doc, panel, level, rho_max, ma_constant, reps, jobs, out, format })
    }

    pub fn panel(&self) -> Result<&PanelSpec> {
        self.panel.as_ref().ok_or_else(|| flag_error(format!("{} needs a panel: set `p` in [panel] or --p", self.kind.name())))
    }

    /// `ρ_max` from [level] if given, else from the panel's model.
    pub fn rho_max(&self) -> f64 {
        self.rho_max.or_else(|| self.panel.as_ref().map(|p| p.model.rho_max())).unwrap_or(0.0)
    }

    pub fn gamma(&self) -> Result<f64> {
        Ok(dependence_summary(self.rho_max())?.gamma)
    }

    /// Lower end `t_min` of the threshold regime for `p` tests.
    pub fn t_min(&self, p: u64) -> Result<f64> {
        let eta = match self.level {
            LevelPolicy::Regime { eta, .. } => eta,
            LevelPolicy::Explicit(_) => self.doc.parsed("level", "eta")?.unwrap_or(0.05),
        };
        Ok(threshold_regime(p, eta, self.gamma()?, ThresholdVariant::Standard)?.t_min)
    }

    /// The working level `t` for `p` tests.
    pub fn level_t(&self, p: u64) -> Result<f64> {
        match self.level {
            LevelPolicy::Explicit(t) => Ok(t),
            LevelPolicy::Regime { eta, moving_average: false } => {
                Ok(threshold_regime(p, eta, self.gamma()?, ThresholdVariant::Standard)?.t_min)
            }
            LevelPolicy::Regime { eta, moving_average: true } => {
                let variant = ThresholdVariant::MovingAverage { a: self.ma_constant };
                Ok(threshold_regime(p, eta, self.gamma()?, variant)?.t_ma.expect("moving-average variant"))
            }
        }
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.doc.parsed(section, key)?.unwrap_or(default))
    }

    pub fn count_or(&self, section: &str, key: &str, default: u64) -> Result<u64> {
        Ok(self.doc.count(section, key)?.unwrap_or(default))
    }

    /// Marginal law named in `section.marginal`; `default` when absent.
    pub fn marginal(&self, section: &str, n: usize, default: &str) -> Result<MarginalLaw> {
        let (name, line) = self.doc.get(section, "marginal").map_or((default, 0), |e| (e.value.as_str(), e.line));
        let law = match name {
            "student-t" => MarginalLaw::student_for(n),
            "exact" | "exact-studentized" => MarginalLaw::ExactStudentized { n },
            "normal" => MarginalLaw::Normal,
            other => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown marginal `{other}` (student-t, exact or normal)"),
                })
            }
        };
        law.validate().map_err(|e| Error::Config { line, message: e.to_string() })?;
        Ok(law)
    }

    /// Reference law of `T` for a panel: exact for normal innovations.
    pub fn default_marginal_name(&self) -> &'static str {
        match self.panel.as_ref().map(|p| p.law) {
            Some(InnovationLaw::StandardNormal) => "exact",
            _ => "student-t",
        }
    }

    pub fn check_level_positive(&self, what: &str, x: f64) -> Result<()> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(flag_error(format!("{what} must be positive and finite, got {x}")));
        }
        Ok(())
    }
}

pub fn line_error(doc: &ConfigDoc, section: &str, key: &str, message: String) -> Error {
    Error::Config { line: doc.get(section, key).map_or(0, |e| e.line), message }
}
