use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::operator::DenseOperator;
use crate::scalar::{cx, Cx, Real};

/// Matrix interchange form: rows of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl MatrixJson {
    pub fn from_operator<T: Real>(m: &DenseOperator<T>) -> Self {
        MatrixJson(
            (0..m.rows())
                .map(|r| {
                    m.row(r)
                        .iter()
                        .map(|z: &Cx<T>| [z.re.to_f64_lossy(), z.im.to_f64_lossy()])
                        .collect()
                })
                .collect(),
        )
    }

    pub fn to_operator<T: Real>(&self) -> Result<DenseOperator<T>> {
        if self.0.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        if self.0.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite matrix entry".into()));
        }
        DenseOperator::from_rows(
            self.0
                .iter()
                .map(|row| row.iter().map(|&[re, im]| cx(re, im)).collect())
                .collect(),
        )
        .map_err(|e| Error::Parse(e.to_string()))
    }
}
