use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Frame operators with a condition number above this are rejected as degenerate.
pub const DEGENERATE_CONDITION: f64 = 1e12;

/// A truncated element of a Hilbert space in a fixed reference orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub coeffs: Vec<f64>,
    pub space: String,
}

impl CoefficientVector {
    pub fn new(coeffs: Vec<f64>, space: impl Into<String>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("coefficient vector has non-finite entries"));
        }
        Ok(Self { coeffs, space: space.into() })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// A finite family of vectors stored as the columns of a `J x K` matrix in
/// reference coordinates.
#[derive(Clone, Debug)]
pub struct Frame {
    vectors: DMatrix<f64>,
    riesz: bool,
    enumeration: Option<Vec<Vec<usize>>>,
    dual: OnceLock<Box<Frame>>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.vectors == other.vectors && self.riesz == other.riesz && self.enumeration == other.enumeration
    }
}

impl Frame {
    pub fn new(vectors: DMatrix<f64>) -> Result<Self> {
        if vectors.ncols() == 0 || vectors.nrows() == 0 {
            return Err(Error::input("frame must contain at least one vector of positive dimension"));
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("frame vectors must be finite"));
        }
        Ok(Self { vectors, riesz: false, enumeration: None, dual: OnceLock::new() })
    }

    /// Builds a frame from a list of vectors, each of length `ref_dim`.
    pub fn from_columns(ref_dim: usize, columns: &[Vec<f64>]) -> Result<Self> {
        for c in columns {
            check_dim(ref_dim, c.len())?;
        }
        let m = DMatrix::from_fn(ref_dim, columns.len(), |i, j| columns[j][i]);
        Self::new(m)
    }

    /// The standard orthonormal basis of the `k`-dimensional reference space.
    pub fn identity(k: usize) -> Self {
        let mut f = Self::new(DMatrix::identity(k, k)).expect("identity frame is valid");
        f.riesz = true;
        f
    }

    /// Marks the frame as a Riesz basis after checking it is square and invertible.
    pub fn into_riesz(mut self) -> Result<Self> {
        if self.vectors.nrows() != self.vectors.ncols() {
            return Err(Error::input("a Riesz basis of the truncated space must be square"));
        }
        let (lo, _) = self.bounds();
        if lo <= 0.0 {
            return Err(Error::input("Riesz basis vectors are linearly dependent"));
        }
        self.riesz = true;
        Ok(self)
    }

    pub fn with_enumeration(mut self, enumeration: Vec<Vec<usize>>) -> Result<Self> {
        check_dim(self.len(), enumeration.len())?;
        self.enumeration = Some(enumeration);
        Ok(self)
    }

    pub fn is_riesz(&self) -> bool {
        self.riesz
    }

    pub fn enumeration(&self) -> Option<&[Vec<usize>]> {
        self.enumeration.as_deref()
    }

    /// Dimension of the reference space.
    pub fn ref_dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of frame vectors.
    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k).iter().copied().collect()
    }

    /// Inner products of `x` with every frame vector.
    pub fn analysis(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.ref_dim(), x.len())?;
        let x = DVector::from_column_slice(x);
        Ok(self.vectors.tr_mul(&x).iter().copied().collect())
    }

    /// `sum_k c_k v_k`; shorter coefficient vectors use the leading frame vectors.
    pub fn synthesis(&self, c: &[f64]) -> Result<Vec<f64>> {
        if c.len() > self.len() {
            return Err(Error::Dimension { expected: self.len(), got: c.len() });
        }
        let mut out = vec![0.0; self.ref_dim()];
        for (k, &ck) in c.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.vectors.column(k).iter()) {
                *o += ck * v;
            }
        }
        Ok(out)
    }

    /// The frame operator `T = F'F` acting on the reference space.
    pub fn frame_operator(&self) -> DMatrix<f64> {
        &self.vectors * self.vectors.transpose()
    }

    fn operator_spectrum(&self) -> (f64, f64) {
        let eig = SymmetricEigen::new(self.frame_operator());
        let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Lower and upper frame bounds: extreme singular values of the analysis map.
    pub fn bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.operator_spectrum();
        (lo.max(0.0).sqrt(), hi.max(0.0).sqrt())
    }

    /// The canonical dual frame `T^{-1} v_k`, computed once and cached.
    pub fn dual(&self) -> Result<&Frame> {
        if let Some(d) = self.dual.get() {
            return Ok(d);
        }
        let d = self.compute_dual()?;
        Ok(self.dual.get_or_init(|| Box::new(d)))
    }

    fn compute_dual(&self) -> Result<Frame> {
        let (lo, hi) = self.operator_spectrum();
        let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(cond <= DEGENERATE_CONDITION) {
            return Err(Error::DegenerateFrame(cond));
        }
        let chol = self
            .frame_operator()
            .cholesky()
            .ok_or(Error::DegenerateFrame(cond))?;
        let dual_vectors = chol.solve(&self.vectors);
        Ok(Frame {
            vectors: dual_vectors,
            riesz: self.riesz,
            enumeration: self.enumeration.clone(),
            dual: OnceLock::new(),
        })
    }

    pub fn to_data(&self) -> FrameData {
        let (rows, cols) = self.vectors.shape();
        let mut values = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                values.push(self.vectors[(i, j)]);
            }
        }
        FrameData { rows, cols, vectors: values, riesz: self.riesz, enumeration: self.enumeration.clone() }
    }

    pub fn from_data(data: &FrameData) -> Result<Self> {
        check_dim(data.rows * data.cols, data.vectors.len())?;
        let m = DMatrix::from_row_slice(data.rows, data.cols, &data.vectors);
        let mut f = Frame::new(m)?;
        if data.riesz {
            f = f.into_riesz()?;
        }
        if let Some(e) = &data.enumeration {
            f = f.with_enumeration(e.clone())?;
        }
        Ok(f)
    }
}

/// Serialized form of a [`Frame`]: row-major matrix plus enumeration metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameData {
    pub rows: usize,
    pub cols: usize,
    pub vectors: Vec<f64>,
    pub riesz: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<Vec<Vec<usize>>>,
}

impl Serialize for Frame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_data().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let data = FrameData::deserialize(d)?;
        Frame::from_data(&data).map_err(serde::de::Error::custom)
    }
}
