//! JSON flat-file format for states, state vectors, and observables.
//!
//! Complex entries are `[re, im]` pairs; numbers are serialized with
//! round-trip decimal precision, so save → load reproduces every `f64`
//! bit-exactly. Matrices are row-major nested arrays.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use twinobs::operator::{default_cluster_tol, spectral_decompose, HermitianOperator};
use twinobs::{CMatrix, CVector, DensityOperator, SpectralForm, C64};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Core(#[from] twinobs::Error),
}

type Result<T> = std::result::Result<T, FixtureError>;

/// What the file describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// A density operator (Hermitian, unit-trace, positive matrix).
    Density,
    /// A normalized state vector; with two dims, a bipartite one.
    Pure,
    /// A Hermitian operator to be measured.
    Observable,
}

/// Matrix or vector payload with `[re, im]` complex entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Data {
    Matrix(Vec<Vec<[f64; 2]>>),
    Vector(Vec<[f64; 2]>),
}

/// One state, vector, or observable on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub kind: Kind,
    /// One entry for a single system, two (`[d1, d2]`) for a bipartite one.
    pub dims: Vec<usize>,
    pub data: Data,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<BTreeMap<String, serde_json::Value>>,
}

fn matrix_to_data(m: &CMatrix) -> Data {
    Data::Matrix(
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect(),
    )
}

fn vector_to_data(v: &CVector) -> Data {
    Data::Vector(v.iter().map(|z| [z.re, z.im]).collect())
}

impl StateFile {
    pub fn from_density(rho: &DensityOperator) -> Self {
        let dims = match rho.bipartite_dims() {
            Some((d1, d2)) => vec![d1, d2],
            None => vec![rho.dim()],
        };
        StateFile {
            kind: Kind::Density,
            dims,
            data: matrix_to_data(rho.matrix()),
            meta: None,
        }
    }

    pub fn from_pure(psi: &CVector, dims: &[usize]) -> Self {
        StateFile {
            kind: Kind::Pure,
            dims: dims.to_vec(),
            data: vector_to_data(psi),
            meta: None,
        }
    }

    /// Store an observable by its full Hermitian matrix (the spectral form
    /// is recovered on load).
    pub fn from_observable(a: &SpectralForm, dims: &[usize]) -> Self {
        StateFile {
            kind: Kind::Observable,
            dims: dims.to_vec(),
            data: matrix_to_data(a.to_operator().matrix()),
            meta: None,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn validate_shape(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.len() > 2 {
            return Err(FixtureError::Shape(format!(
                "dims must list 1 or 2 positive integers, got {:?}",
                self.dims
            )));
        }
        if self.dims.contains(&0) {
            return Err(FixtureError::Shape("dims must be positive".into()));
        }
        let n = self.total_dim();
        match (&self.kind, &self.data) {
            (Kind::Pure, Data::Vector(v)) => {
                if v.len() != n {
                    return Err(FixtureError::Shape(format!(
                        "pure state needs {n} entries, found {}",
                        v.len()
                    )));
                }
            }
            (Kind::Pure, Data::Matrix(_)) => {
                return Err(FixtureError::Shape(
                    "pure states are stored as a flat vector".into(),
                ));
            }
            (Kind::Density | Kind::Observable, Data::Matrix(rows)) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(FixtureError::Shape(format!(
                        "operator needs an {n}x{n} matrix, found {} rows of lengths {:?}",
                        rows.len(),
                        rows.iter().map(Vec::len).take(4).collect::<Vec<_>>()
                    )));
                }
            }
            (Kind::Density | Kind::Observable, Data::Vector(_)) => {
                return Err(FixtureError::Shape(
                    "operators are stored as a nested matrix".into(),
                ));
            }
        }
        Ok(())
    }

    fn matrix(&self) -> Result<CMatrix> {
        match &self.data {
            Data::Matrix(rows) => {
                let n = rows.len();
                Ok(CMatrix::from_fn(n, n, |i, j| {
                    C64::new(rows[i][j][0], rows[i][j][1])
                }))
            }
            Data::Vector(_) => Err(FixtureError::Shape("expected a matrix".into())),
        }
    }

    fn vector(&self) -> Result<CVector> {
        match &self.data {
            Data::Vector(entries) => Ok(CVector::from_iterator(
                entries.len(),
                entries.iter().map(|e| C64::new(e[0], e[1])),
            )),
            Data::Matrix(_) => Err(FixtureError::Shape("expected a vector".into())),
        }
    }

    /// Interpret as a state: densities load directly, pure vectors become
    /// their projector. Hermiticity, trace, positivity, and normalization
    /// are all enforced.
    pub fn into_density(&self) -> Result<DensityOperator> {
        self.validate_shape()?;
        match self.kind {
            Kind::Density => {
                let m = self.matrix()?;
                Ok(match self.dims.as_slice() {
                    [d1, d2] => DensityOperator::bipartite(m, *d1, *d2)?,
                    _ => DensityOperator::new(m)?,
                })
            }
            Kind::Pure => {
                let v = self.vector()?;
                Ok(match self.dims.as_slice() {
                    [d1, d2] => DensityOperator::bipartite_from_pure(&v, *d1, *d2)?,
                    _ => DensityOperator::from_pure(&v)?,
                })
            }
            Kind::Observable => Err(FixtureError::Shape(
                "file holds an observable, not a state".into(),
            )),
        }
    }

    /// Interpret as a pure state vector (kind must be `pure`).
    pub fn into_vector(&self) -> Result<CVector> {
        self.validate_shape()?;
        match self.kind {
            Kind::Pure => self.vector(),
            _ => Err(FixtureError::Shape(
                "file does not hold a pure state vector".into(),
            )),
        }
    }

    /// Interpret as an observable: the matrix must be Hermitian; its
    /// spectral form is computed with the default eigenvalue clustering.
    pub fn into_observable(&self) -> Result<SpectralForm> {
        self.validate_shape()?;
        if self.kind != Kind::Observable {
            return Err(FixtureError::Shape(
                "file does not hold an observable".into(),
            ));
        }
        let h = HermitianOperator::new(self.matrix()?)?;
        let tol = default_cluster_tol(&h);
        Ok(spectral_decompose(&h, tol)?)
    }

    pub fn load(path: &Path) -> Result<StateFile> {
        let text = fs::read_to_string(path).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: StateFile = serde_json::from_str(&text).map_err(|source| FixtureError::Json {
            path: path.display().to_string(),
            source,
        })?;
        file.validate_shape()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate_shape()?;
        let text = serde_json::to_string_pretty(self).expect("fixture types always serialize");
        fs::write(path, text).map_err(|source| FixtureError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
