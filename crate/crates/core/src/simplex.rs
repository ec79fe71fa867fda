//! Simplexes as ascending vertex tuples.

use crate::error::{BettiError, Result};

/// An abstract simplex identified by its strictly increasing vertex tuple.
/// Orientation bookkeeping lives entirely in boundary-matrix signs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Canonicalize a vertex list. Rejects repeated vertices and empty input.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(BettiError::Validation("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(BettiError::Validation(format!(
                "repeated vertex in simplex {:?}",
                vertices
            )));
        }
        Ok(Simplex { vertices })
    }

    /// Construct from a tuple already known to be strictly increasing.
    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Dimension r = (number of vertices) - 1.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The r+1 faces of codimension one, ordered by omitted-vertex position.
    /// The i-th face omits the i-th vertex, matching the alternating-sign
    /// convention of the boundary operator.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.vertices.len()).map(move |i| {
            let mut v = self.vertices.clone();
            v.remove(i);
            Simplex::from_sorted(v)
        })
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}
