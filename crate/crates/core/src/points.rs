use std::fmt;

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// A sorted, duplicate-free list of 0/1 points of a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet01 {
    dim: usize,
    points: Vec<Vec<bool>>,
}

impl PointSet01 {
    pub fn new(dim: usize, mut points: Vec<Vec<bool>>) -> Result<PointSet01> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: p.len(),
            });
        }
        points.sort();
        points.dedup();
        Ok(PointSet01 { dim, points })
    }

    /// Every point of `{0,1}^n`, lexicographic with `x1` most significant.
    pub fn cube_points(n: usize) -> impl Iterator<Item = Vec<bool>> {
        assert!(n < 64);
        (0u64..1 << n).map(move |m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
    }

    pub fn full(n: usize) -> PointSet01 {
        PointSet01 {
            dim: n,
            points: Self::cube_points(n).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<bool>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &[bool]) -> bool {
        self.points.binary_search_by(|p| p.as_slice().cmp(x)).is_ok()
    }

    pub fn rational_points(&self) -> Vec<Vec<Rational>> {
        self.points.iter().map(|p| to_rational(p)).collect()
    }
}

pub fn to_rational(p: &[bool]) -> Vec<Rational> {
    p.iter().map(|&b| int(i64::from(b))).collect()
}

pub fn bit_string(p: &[bool]) -> String {
    p.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for PointSet01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.points.iter().map(|p| bit_string(p)).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}
