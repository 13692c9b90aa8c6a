//! Synthetic data panels with κ-dependent rows.
//!
//! Column `j` of a panel is one realization of the dependent sequence
//! `U_{1j}, U_{2j}, …`; columns are independent. Each column is drawn from its
//! own keyed stream `(seed, replicate, j)`, so panels are bitwise reproducible
//! and any replicate can be produced on any thread. Generation is also
//! prefix-stable: the first `p'` rows of a `p`-row panel equal the `p'`-row
//! panel with the same seed.

mod format;
mod generate;
mod law;
mod model;
mod spec;

pub use format::{read_panel, write_panel, MAGIC, VERSION};
pub use generate::{generate, Panel, PanelGenerator, RowMoments, Workspace};
pub use law::{standardized_law_moments, InnovationLaw, LawMoments};
pub use model::DependenceModel;
pub use spec::{PanelSpec, WeightBounds, WeightPattern, Weights};
