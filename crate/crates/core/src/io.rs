//! JSON encodings of matrices, states, channels and antisymmetrizers.
//!
//! Matrices are `{rows, cols, re, im}` with row-major entry lists; states add
//! `dims`; channels are `{dimIn, dimOut, kraus}`.

use serde::{Deserialize, Serialize};

use crate::antisym::{indexed_antisymmetrizer, Antisymmetrizer, WedgeIndex};
use crate::channel::{CpMap, KrausChannel};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, StateVector, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }
}

fn zip_complex(re: &[f64], im: &[f64]) -> Result<Vec<C64>> {
    if re.len() != im.len() {
        return Err(Error::InvalidShape(format!(
            "{} real parts and {} imaginary parts",
            re.len(),
            im.len()
        )));
    }
    Ok(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect())
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<Self> {
        ComplexMatrix::new(j.rows, j.cols, zip_complex(&j.re, &j.im)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&StateVector> for StateJson {
    fn from(v: &StateVector) -> Self {
        Self {
            dims: v.dims().to_vec(),
            re: v.amplitudes().iter().map(|z| z.re).collect(),
            im: v.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<&StateJson> for StateVector {
    type Error = Error;

    /// Requires unit norm within the state tolerance.
    fn try_from(j: &StateJson) -> Result<Self> {
        StateVector::new(j.dims.clone(), zip_complex(&j.re, &j.im)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl From<&CpMap> for ChannelJson {
    fn from(c: &CpMap) -> Self {
        Self {
            dim_in: c.dim_in(),
            dim_out: c.dim_out(),
            kraus: c.kraus().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<&ChannelJson> for KrausChannel {
    type Error = Error;

    fn try_from(j: &ChannelJson) -> Result<Self> {
        let kraus = j
            .kraus
            .iter()
            .map(ComplexMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(j.dim_in, j.dim_out, kraus)
    }
}

/// Antisymmetrizer matrix with its parameters; `indices` are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntisymDump {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub indices: Vec<usize>,
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

impl From<&Antisymmetrizer> for AntisymDump {
    fn from(a: &Antisymmetrizer) -> Self {
        Self {
            d: a.d(),
            n: a.n(),
            m: a.m(),
            indices: (0..a.d()).collect(),
            matrix: MatrixJson::from(a.matrix()),
        }
    }
}

impl AntisymDump {
    pub fn indexed(d: usize, n: usize, m: usize, w: &WedgeIndex) -> Result<Self> {
        let matrix = indexed_antisymmetrizer(d, n, m, w)?;
        Ok(Self {
            d,
            n,
            m,
            indices: w.indices().to_vec(),
            matrix: MatrixJson::from(&matrix),
        })
    }
}
