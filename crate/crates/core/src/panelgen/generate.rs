use serde::{Deserialize, Serialize};

use super::spec::PanelSpec;
use crate::error::Result;
use crate::rng::{stream, Purpose};

/// One realized `p × n` data matrix. Row `i` holds the sample for test `i`;
/// with unequal group sizes, cells past a row's size are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub p: usize,
    pub n: usize,
    pub sizes: Option<Vec<usize>>,
    pub seed: u64,
    pub replicate: u64,
    /// Row-major cells.
    pub data: Vec<f64>,
    /// Generating spec; `None` for panels read back from disk.
    pub spec: Option<PanelSpec>,
}

impl Panel {
    #[inline]
    pub fn size(&self, i: usize) -> usize {
        self.sizes.as_ref().map_or(self.n, |s| s[i])
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..i * self.n + self.size(i)]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// Sufficient statistics of one row: size, `Σ y_j` and `Σ y_j²`, where
/// `y_j = w_ij U_ij` (or `U_ij` without weights).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RowMoments {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

/// Reusable buffers for streaming generation.
#[derive(Debug, Default)]
pub struct Workspace {
    drivers: Vec<f64>,
    column: Vec<f64>,
}

/// A validated spec with its filter coefficients solved once.
#[derive(Debug, Clone)]
pub struct PanelGenerator {
    spec: PanelSpec,
    filter: Vec<f64>,
    offsets: Option<Vec<f64>>,
}

impl PanelGenerator {
    pub fn new(spec: PanelSpec) -> Result<Self> {
        spec.validate()?;
        let filter = spec.model.filter()?;
        let offsets = (!spec.offsets.is_empty()).then(|| spec.dense_offsets());
        Ok(Self { spec, filter, offsets })
    }

    pub fn spec(&self) -> &PanelSpec {
        &self.spec
    }

    pub fn filter(&self) -> &[f64] {
        &self.filter
    }

    /// Column `j` of the dependent panel into `ws.column[..p]`.
    fn column(&self, replicate: u64, j: usize, ws: &mut Workspace) {
        let p = self.spec.p;
        let k = self.filter.len();
        ws.drivers.resize(p + k - 1, 0.0);
        ws.column.resize(p, 0.0);
        let mut rng = stream(self.spec.seed, replicate, j as u64, Purpose::Drivers);
        self.spec.law.fill(&mut rng, &mut ws.drivers);
        if k == 1 {
            ws.column.copy_from_slice(&ws.drivers[..p]);
        } else {
            let filter = &self.filter[..];
            for (i, out) in ws.column.iter_mut().enumerate() {
                let window = &ws.drivers[i..i + k];
                let mut acc = 0.0;
                for (c, z) in filter.iter().zip(window) {
                    acc += c * z;
                }
                *out = acc;
            }
        }
        self.add_offsets(&mut ws.column);
    }

    /// Column `j` of the matched independent panel: every cell gets its own
    /// drivers, so rows are independent with the same marginal law.
    fn column_independent(&self, replicate: u64, j: usize, ws: &mut Workspace) {
        let p = self.spec.p;
        let k = self.filter.len();
        ws.column.resize(p, 0.0);
        let mut rng = stream(self.spec.seed, replicate, j as u64, Purpose::Independent);
        if k == 1 || self.spec.law.is_normal() {
            // A unit-norm filter of standard normals is standard normal.
            self.spec.law.fill(&mut rng, &mut ws.column);
        } else {
            ws.drivers.resize(k, 0.0);
            for out in ws.column.iter_mut() {
                self.spec.law.fill(&mut rng, &mut ws.drivers[..k]);
                *out = self.filter.iter().zip(&ws.drivers).map(|(c, z)| c * z).sum();
            }
        }
        self.add_offsets(&mut ws.column);
    }

    fn add_offsets(&self, column: &mut [f64]) {
        if let Some(d) = &self.offsets {
            for (u, d) in column.iter_mut().zip(d) {
                *u += d;
            }
        }
    }

    fn build(&self, replicate: u64, independent: bool) -> Panel {
        let PanelSpec { p, n, .. } = self.spec;
        let mut data = vec![f64::NAN; p * n];
        let mut ws = Workspace::default();
        for j in 0..n {
            if independent {
                self.column_independent(replicate, j, &mut ws);
            } else {
                self.column(replicate, j, &mut ws);
            }
            for (i, &u) in ws.column.iter().enumerate() {
                if j < self.spec.size(i) {
                    data[i * n + j] = u;
                }
            }
        }
        Panel {
            p,
            n,
            sizes: self.spec.sizes.clone(),
            seed: self.spec.seed,
            replicate,
            data,
            spec: Some(self.spec.clone().with_replicate(replicate)),
        }
    }

    pub fn generate(&self, replicate: u64) -> Panel {
        self.build(replicate, false)
    }

    pub fn generate_independent(&self, replicate: u64) -> Panel {
        self.build(replicate, true)
    }

    /// Row moments of a replicate without materializing the panel. Sums run
    /// over `j` in order, so they match a row-wise pass over
    /// [`PanelGenerator::generate`] bit for bit.
    pub fn moments_into(&self, replicate: u64, independent: bool, ws: &mut Workspace, out: &mut Vec<RowMoments>) {
        let p = self.spec.p;
        out.clear();
        out.extend((0..p).map(|i| RowMoments { n: self.spec.size(i), sum: 0.0, sum_sq: 0.0 }));
        let uniform_size = self.spec.sizes.is_none();
        for j in 0..self.spec.n {
            if independent {
                self.column_independent(replicate, j, ws);
            } else {
                self.column(replicate, j, ws);
            }
            match (&self.spec.weights, uniform_size) {
                (None, true) => {
                    for (m, &u) in out.iter_mut().zip(&ws.column) {
                        m.sum += u;
                        m.sum_sq += u * u;
                    }
                }
                (weights, _) => {
                    for (i, (m, &u)) in out.iter_mut().zip(&ws.column).enumerate() {
                        if j < m.n {
                            let y = weights.as_ref().map_or(u, |w| w.weight(i, j) * u);
                            m.sum += y;
                            m.sum_sq += y * y;
                        }
                    }
                }
            }
        }
    }

    pub fn moments(&self, replicate: u64) -> Vec<RowMoments> {
        let mut out = Vec::new();
        self.moments_into(replicate, false, &mut Workspace::default(), &mut out);
        out
    }
}

/// Generates the panel described by `spec` (using `spec.replicate`).
pub fn generate(spec: &PanelSpec) -> Result<Panel> {
    Ok(PanelGenerator::new(spec.clone())?.generate(spec.replicate))
}
