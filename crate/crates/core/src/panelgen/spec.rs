use serde::{Deserialize, Serialize};

use super::law::InnovationLaw;
use super::model::DependenceModel;
use crate::config::ConfigDoc;
use crate::error::{Error, Result};

/// Constants `C₁, C₂, C₃` of the weight conditions: `sup |w| ≤ C₁` and, in
/// every row, at least a fraction `C₃` of the weights satisfy `|w| ≥ C₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightBounds {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for WeightBounds {
    fn default() -> Self {
        Self { c1: 10.0, c2: 0.1, c3: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightPattern {
    /// `w_ij = pattern[j % len]` for every row.
    Cyclic(Vec<f64>),
    /// Row-major `p × n` matrix.
    Matrix { n: usize, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub pattern: WeightPattern,
    pub bounds: WeightBounds,
}

impl Weights {
    pub fn cyclic(pattern: Vec<f64>, bounds: WeightBounds) -> Self {
        Self { pattern: WeightPattern::Cyclic(pattern), bounds }
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match &self.pattern {
            WeightPattern::Cyclic(w) => w[j % w.len()],
            WeightPattern::Matrix { n, values } => values[i * n + j],
        }
    }

    /// Checks the weight conditions on rows `0..p` with sizes from `size_of`.
    /// The error lists every offending row.
    pub fn check(&self, p: usize, size_of: impl Fn(usize) -> usize) -> Result<()> {
        let WeightBounds { c1, c2, c3 } = self.bounds;
        if !(c1 > 0.0 && c2 > 0.0 && c3 > 0.0) {
            return Err(Error::spec(format!("weight constants must be positive, got ({c1}, {c2}, {c3})")));
        }
        match &self.pattern {
            WeightPattern::Cyclic(w) if w.is_empty() => return Err(Error::spec("empty weight pattern")),
            WeightPattern::Matrix { n, values } if values.len() < p * n => {
                return Err(Error::spec(format!("weight matrix has {} cells, need {}", values.len(), p * n)))
            }
            _ => {}
        }
        let mut rows = Vec::new();
        for i in 0..p {
            let n_i = size_of(i);
            let mut big = 0usize;
            let mut bad = false;
            for j in 0..n_i {
                let w = self.weight(i, j).abs();
                if !(w <= c1) {
                    bad = true;
                }
                if w >= c2 {
                    big += 1;
                }
            }
            if bad || (big as f64) < c3 * n_i as f64 {
                rows.push(i);
            }
        }
        if rows.is_empty() {
            Ok(())
        } else {
            Err(Error::WeightConstraint { rows })
        }
    }
}

/// Full generative description of a `p × n` panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelSpec {
    pub p: usize,
    /// Group size, or the largest group size when `sizes` is set.
    pub n: usize,
    /// Per-row group sizes `n_i`.
    pub sizes: Option<Vec<usize>>,
    pub model: DependenceModel,
    pub law: InnovationLaw,
    /// Sparse mean offsets `(row, d_i)`; unlisted rows have `d_i = 0`.
    pub offsets: Vec<(usize, f64)>,
    pub weights: Option<Weights>,
    pub seed: u64,
    pub replicate: u64,
}

impl PanelSpec {
    pub fn new(p: usize, n: usize, model: DependenceModel, law: InnovationLaw) -> Self {
        Self { p, n, sizes: None, model, law, offsets: Vec::new(), weights: None, seed: 0, replicate: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_replicate(mut self, replicate: u64) -> Self {
        self.replicate = replicate;
        self
    }

    pub fn with_offsets(mut self, offsets: Vec<(usize, f64)>) -> Self {
        self.offsets = offsets;
        self
    }

    pub fn with_sizes(mut self, sizes: Vec<usize>) -> Self {
        self.n = sizes.iter().copied().max().unwrap_or(0);
        self.sizes = Some(sizes);
        self
    }

    pub fn with_weights(mut self, weights: Weights) -> Self {
        self.weights = Some(weights);
        self
    }

    #[inline]
    pub fn size(&self, i: usize) -> usize {
        self.sizes.as_ref().map_or(self.n, |s| s[i])
    }

    pub fn offset(&self, i: usize) -> f64 {
        self.offsets.iter().rev().find(|(k, _)| *k == i).map_or(0.0, |(_, d)| *d)
    }

    pub fn dense_offsets(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.p];
        for &(i, v) in &self.offsets {
            if i < self.p {
                d[i] = v;
            }
        }
        d
    }

    /// `true` for rows with `d_i = 0` (the null hypothesis holds).
    pub fn null_mask(&self) -> Vec<bool> {
        self.dense_offsets().iter().map(|&d| d == 0.0).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n == 0 {
            return Err(Error::spec(format!("panel must be non-empty, got {} × {}", self.p, self.n)));
        }
        if let Some(sizes) = &self.sizes {
            if sizes.len() != self.p {
                return Err(Error::spec(format!("{} group sizes for {} rows", sizes.len(), self.p)));
            }
            if let Some(i) = sizes.iter().position(|&s| s == 0 || s > self.n) {
                return Err(Error::spec(format!("group size of row {i} must lie in 1..={}", self.n)));
            }
        }
        self.law.validate()?;
        // Solving the filter also checks that the correlations are realizable.
        self.model.filter()?;
        for &(i, d) in &self.offsets {
            if i >= self.p {
                return Err(Error::spec(format!("offset row {i} outside 0..{}", self.p)));
            }
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::spec(format!("offset d_{i} must be finite and nonnegative, got {d}")));
            }
        }
        if let Some(w) = &self.weights {
            w.check(self.p, |i| self.size(i))?;
        }
        Ok(())
    }

    pub const CONFIG_KEYS: &'static [&'static str] = &[
        "p", "n", "sizes", "model", "kappa", "rho", "law", "tail_exponent", "delta", "offsets",
        "weights", "weight_bounds", "seed", "replicate",
    ];

    /// Reads and validates the `[panel]` section. Missing keys take library
    /// defaults (iid standard-normal, seed 0). Offset rows are one-based.
    pub fn from_config(doc: &ConfigDoc) -> Result<Self> {
        let spec = Self::parse_config(doc)?;
        let line_of = |key: &str| doc.get("panel", key).map_or(0, |e| e.line);
        let model_line = [line_of("rho"), line_of("kappa"), line_of("model")].into_iter().find(|&l| l > 0).unwrap_or(0);
        spec.model.filter().map_err(|e| Error::Config { line: model_line, message: e.to_string() })?;
        let line = line_of("p");
        spec.validate().map_err(|e| Error::Config { line, message: e.to_string() })?;
        Ok(spec)
    }

    /// Like [`PanelSpec::from_config`] but without the final validation.
    pub fn parse_config(doc: &ConfigDoc) -> Result<Self> {
        const S: &str = "panel";
        doc.reject_unknown(S, Self::CONFIG_KEYS)?;
        let line_of = |key: &str| doc.get(S, key).map_or(0, |e| e.line);
        let p = doc.count(S, "p")?.ok_or_else(|| Error::Config {
            line: 0,
            message: "missing required key `p` in [panel]".into(),
        })? as usize;
        let n = doc.count(S, "n")?.unwrap_or(0) as usize;
        let kappa: Option<usize> = doc.parsed(S, "kappa")?;
        let rho: Option<Vec<f64>> = doc.list(S, "rho")?;
        let model_name = doc.get(S, "model").map_or("iid", |e| e.value.as_str());
        let model = match model_name {
            "iid" => DependenceModel::Iid,
            "gaussian-kdep" => {
                let rho = rho.unwrap_or_default();
                match (kappa, rho.len()) {
                    (Some(k), 1) => DependenceModel::flat_kdep(k, rho[0]),
                    (Some(k), len) if len != k => {
                        return Err(Error::Config {
                            line: line_of("rho"),
                            message: format!("kappa = {k} but {len} lag correlations given"),
                        })
                    }
                    _ => DependenceModel::GaussianKdep { rho },
                }
            }
            "moving-average" => DependenceModel::MovingAverage {
                kappa: kappa.ok_or_else(|| Error::Config {
                    line: line_of("model"),
                    message: "moving-average needs `kappa`".into(),
                })?,
            },
            other => {
                return Err(Error::Config { line: line_of("model"), message: format!("unknown model `{other}`") })
            }
        };
        let law_name = doc.get(S, "law").map_or("standard-normal", |e| e.value.as_str());
        let law = match law_name {
            "standard-normal" | "normal" => InnovationLaw::StandardNormal,
            "standardized-pareto" | "pareto" => InnovationLaw::StandardizedPareto {
                tail_exponent: doc.parsed(S, "tail_exponent")?.unwrap_or(4.0),
            },
            "standardized-rademacher" | "rademacher" => InnovationLaw::StandardizedRademacher,
            "two-point-with-atom" | "atom" => {
                InnovationLaw::TwoPointWithAtom { delta: doc.parsed(S, "delta")?.unwrap_or(0.5) }
            }
            other => {
                return Err(Error::Config { line: line_of("law"), message: format!("unknown law `{other}`") })
            }
        };
        let mut spec = PanelSpec::new(p, n, model, law);
        if let Some(sizes) = doc.list::<usize>(S, "sizes")? {
            spec = spec.with_sizes(sizes);
        }
        if let Some(e) = doc.get(S, "offsets") {
            let mut offsets = Vec::new();
            for item in e.value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let parsed = item
                    .split_once(':')
                    .and_then(|(i, d)| Some((i.trim().parse::<usize>().ok()?.checked_sub(1)?, d.trim().parse().ok()?)));
                match parsed {
                    Some(pair) => offsets.push(pair),
                    None => {
                        return Err(Error::Config {
                            line: e.line,
                            message: format!("offset `{item}` is not `row:value` with a one-based row"),
                        })
                    }
                }
            }
            spec.offsets = offsets;
        }
        if let Some(pattern) = doc.list::<f64>(S, "weights")? {
            let bounds = match doc.list::<f64>(S, "weight_bounds")? {
                None => WeightBounds::default(),
                Some(b) if b.len() == 3 => WeightBounds { c1: b[0], c2: b[1], c3: b[2] },
                Some(_) => {
                    return Err(Error::Config {
                        line: line_of("weight_bounds"),
                        message: "weight_bounds needs three values C1, C2, C3".into(),
                    })
                }
            };
            spec.weights = Some(Weights::cyclic(pattern, bounds));
        }
        spec.seed = doc.parsed(S, "seed")?.unwrap_or(0);
        spec.replicate = doc.parsed(S, "replicate")?.unwrap_or(0);
        Ok(spec)
    }

    /// Writes the `[panel]` section into `doc`. Matrix weights have no text
    /// form and are rejected.
    pub fn write_config(&self, doc: &mut ConfigDoc) -> Result<()> {
        const S: &str = "panel";
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(", ");
        doc.set(S, "p", self.p.to_string());
        doc.set(S, "n", self.n.to_string());
        if let Some(sizes) = &self.sizes {
            doc.set(S, "sizes", join(&mut sizes.iter().map(|s| s.to_string())));
        }
        doc.set(S, "model", self.model.name());
        match &self.model {
            DependenceModel::Iid => {}
            DependenceModel::GaussianKdep { rho } => {
                doc.set(S, "kappa", rho.len().to_string());
                doc.set(S, "rho", join(&mut rho.iter().map(|r| r.to_string())));
            }
            DependenceModel::MovingAverage { kappa } => doc.set(S, "kappa", kappa.to_string()),
        }
        doc.set(S, "law", self.law.name());
        match self.law {
            InnovationLaw::StandardizedPareto { tail_exponent } => {
                doc.set(S, "tail_exponent", tail_exponent.to_string())
            }
            InnovationLaw::TwoPointWithAtom { delta } => doc.set(S, "delta", delta.to_string()),
            _ => {}
        }
        if !self.offsets.is_empty() {
            doc.set(S, "offsets", join(&mut self.offsets.iter().map(|(i, d)| format!("{}:{d}", i + 1))));
        }
        if let Some(w) = &self.weights {
            match &w.pattern {
                WeightPattern::Cyclic(pattern) => {
                    doc.set(S, "weights", join(&mut pattern.iter().map(|x| x.to_string())));
                    let b = w.bounds;
                    doc.set(S, "weight_bounds", format!("{}, {}, {}", b.c1, b.c2, b.c3));
                }
                WeightPattern::Matrix { .. } => {
                    return Err(Error::spec("matrix weights cannot be written to a text config"))
                }
            }
        }
        doc.set(S, "seed", self.seed.to_string());
        doc.set(S, "replicate", self.replicate.to_string());
        Ok(())
    }

    pub fn to_config_text(&self) -> Result<String> {
        let mut doc = ConfigDoc::default();
        self.write_config(&mut doc)?;
        Ok(doc.to_text())
    }
}
