//! Run configuration (TOML) and its translation into core types.
//!
//! ```toml
//! n = 3
//! metric = "euclidean"          # "minkowski" or a row-major matrix
//!
//! [field]
//! vector = [0.0, 0.0, 1.0]      # or matrix = [[...], ...]
//!
//! [gauge]
//! kind = "antisymmetric"        # or "triangular"; or matrix = [[...]]
//!
//! [particle]
//! m = 1.0
//! q = 1.0
//!
//! [initial]
//! x = [0.0, 0.0, 0.0]
//! p = [1.0, 0.0, 0.5]
//!
//! [integration]
//! dt = 0.01
//! steps = 1000
//! method = "exact"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::DMatrix;
use ncyclo_core::{
    check_radiation_gauge, field_from_3d_vector, field_from_gauge, gauge_antisymmetric,
    gauge_triangular, FieldTensor, GammaTensor, GaugeMatrix, MetricTensor, ParticleState,
    PhysicalConstants,
};
use serde::{Deserialize, Serialize};

/// Field/gauge consistency tolerance when both are given.
pub const CONSISTENCY_TOL: f64 = 1e-12;
/// Radiation-gauge residual above which a warning is emitted.
pub const RADIATION_WARN_TOL: f64 = 1e-10;

pub type Rows = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Matrix(Rows),
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::Named("euclidean".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeKind {
    Antisymmetric,
    Triangular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<GaugeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Rows>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub q: f64,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

impl Default for ParticleSpec {
    fn default() -> Self {
        Self {
            m: 1.0,
            q: 1.0,
            c: 1.0,
            hbar: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Exact,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSpec {
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(default)]
    pub metric: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeSpec>,
    #[serde(default)]
    pub particle: ParticleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<IntegrationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).context("invalid configuration")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing configuration")
    }
}

/// Everything a command needs, validated.
#[derive(Debug, Clone)]
pub struct System {
    pub n: usize,
    pub field: FieldTensor,
    pub gauge: GaugeMatrix,
    pub metric: MetricTensor,
    pub gamma: GammaTensor,
    pub constants: PhysicalConstants,
    pub radiation_residual: f64,
    pub warnings: Vec<String>,
}

fn matrix_from_rows(rows: &Rows, n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n {
        bail!("{what}: expected {n} rows, found {}", rows.len());
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            bail!("{what}: row {} has {} entries, expected {n}", i + 1, row.len());
        }
    }
    Ok(DMatrix::from_fn(n, n, |j, k| rows[j][k]))
}

pub fn rows_of(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl RunConfig {
    pub fn system(&self) -> Result<System> {
        let n = self.n;
        if n == 0 {
            bail!("n must be at least 1");
        }
        let metric = match &self.metric {
            MetricSpec::Named(name) => match name.as_str() {
                "euclidean" => MetricTensor::euclidean(n),
                "minkowski" => MetricTensor::minkowski(n),
                other => bail!("unknown metric {other:?} (expected \"euclidean\" or \"minkowski\")"),
            },
            MetricSpec::Matrix(rows) => MetricTensor::new(matrix_from_rows(rows, n, "metric")?)
                .context("metric")?,
        };
        let gamma = match &self.gamma {
            Some(rows) => GammaTensor::new(matrix_from_rows(rows, n, "gamma")?).context("gamma")?,
            None => GammaTensor::identity(n),
        };
        let p = self.particle;
        let constants = PhysicalConstants::new(p.m, p.q, p.c, p.hbar).context("particle")?;

        let field = match &self.field {
            None => None,
            Some(FieldSpec {
                matrix: Some(_),
                vector: Some(_),
            }) => bail!("field: give either `matrix` or `vector`, not both"),
            Some(FieldSpec {
                matrix: Some(rows),
                ..
            }) => Some(FieldTensor::new(matrix_from_rows(rows, n, "field.matrix")?).context("field.matrix")?),
            Some(FieldSpec {
                vector: Some(v), ..
            }) => {
                if n != 3 {
                    bail!("field.vector requires n = 3, found n = {n}");
                }
                Some(field_from_3d_vector(*v))
            }
            Some(_) => bail!("field: expected `matrix` or `vector`"),
        };

        let gauge_spec = self.gauge.clone().unwrap_or(GaugeSpec {
            kind: None,
            matrix: None,
        });
        let (gauge, field) = match (gauge_spec.kind, &gauge_spec.matrix, field) {
            (Some(_), Some(_), _) => bail!("gauge: give either `kind` or `matrix`, not both"),
            (None, Some(rows), field) => {
                let a = GaugeMatrix::new(matrix_from_rows(rows, n, "gauge.matrix")?)
                    .context("gauge.matrix")?;
                let from_gauge = field_from_gauge(&a);
                if let Some(h) = field {
                    let residual = (h.matrix() - from_gauge.matrix()).amax();
                    if residual > CONSISTENCY_TOL {
                        bail!("field is inconsistent with gauge.matrix (residual {residual:e})");
                    }
                }
                (a, from_gauge)
            }
            (kind, None, Some(h)) => {
                let a = match kind.unwrap_or(GaugeKind::Antisymmetric) {
                    GaugeKind::Antisymmetric => gauge_antisymmetric(&h),
                    GaugeKind::Triangular => gauge_triangular(&h),
                };
                (a, h)
            }
            (_, None, None) => bail!("a field (with optional gauge kind) or gauge.matrix is required"),
        };

        let radiation_residual = check_radiation_gauge(&gauge, &metric)?;
        let mut warnings = Vec::new();
        if radiation_residual > RADIATION_WARN_TOL {
            warnings.push(format!(
                "gauge violates the radiation condition g^jk A_jk = 0 (residual {radiation_residual:e})"
            ));
        }
        Ok(System {
            n,
            field,
            gauge,
            metric,
            gamma,
            constants,
            radiation_residual,
            warnings,
        })
    }

    pub fn initial_state(&self) -> Result<ParticleState> {
        let init = self
            .initial
            .as_ref()
            .ok_or_else(|| anyhow!("[initial] with x and p is required"))?;
        if init.x.len() != self.n || init.p.len() != self.n {
            bail!(
                "initial: x and p must have {} entries (found {} and {})",
                self.n,
                init.x.len(),
                init.p.len()
            );
        }
        Ok(ParticleState::new(init.x.clone(), init.p.clone())?)
    }

    pub fn integration(&self) -> Result<&IntegrationSpec> {
        let spec = self
            .integration
            .as_ref()
            .ok_or_else(|| anyhow!("[integration] with dt and steps is required"))?;
        if !(spec.dt.is_finite() && spec.dt > 0.0) {
            bail!("integration.dt must be positive, found {}", spec.dt);
        }
        if spec.steps == 0 {
            bail!("integration.steps must be at least 1");
        }
        Ok(spec)
    }
}
