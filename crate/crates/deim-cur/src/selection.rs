//! Ordered row/column index selections with provenance.
//!
//! Indices are 1-based, matching the Matrix Market convention and the index
//! files written by the CLI. Order is selection order and is significant for
//! greedy selectors.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionSource {
    Deim,
    LeverageTop,
    LeverageSample,
    QrPivot,
    Manual,
}

impl fmt::Display for SelectionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SelectionSource::Deim => "deim",
            SelectionSource::LeverageTop => "leverage-top",
            SelectionSource::LeverageSample => "leverage-sample",
            SelectionSource::QrPivot => "qr-pivot",
            SelectionSource::Manual => "manual",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSelection {
    indices: Vec<usize>,
    source: SelectionSource,
}

impl IndexSelection {
    /// Validates that the 1-based `indices` are distinct and within `bound`.
    pub fn new(indices: Vec<usize>, bound: usize, source: SelectionSource) -> Result<Self> {
        let mut seen = vec![false; bound + 1];
        for &ix in &indices {
            if ix == 0 || ix > bound {
                return Err(Error::IndexOutOfRange { index: ix, bound });
            }
            if seen[ix] {
                return Err(Error::DuplicateIndex(ix));
            }
            seen[ix] = true;
        }
        Ok(Self { indices, source })
    }

    pub(crate) fn from_zero_based(
        indices: impl IntoIterator<Item = usize>,
        source: SelectionSource,
    ) -> Self {
        Self {
            indices: indices.into_iter().map(|i| i + 1).collect(),
            source,
        }
    }

    /// 1-based indices in selection order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// 0-based copy for internal matrix indexing.
    pub fn zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|&i| i - 1).collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn source(&self) -> SelectionSource {
        self.source
    }
}
