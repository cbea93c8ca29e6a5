use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Integer box `lower <= x <= upper`, strict in every coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    lower: Vec<i64>,
    upper: Vec<i64>,
}

impl Bounds {
    /// Fails on length mismatch or any `lower[i] >= upper[i]`. Constant
    /// variables have to be removed by the caller.
    pub fn new(lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Empty);
        }
        for (index, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l >= u {
                return Err(Error::DegenerateBounds {
                    index,
                    lower: l,
                    upper: u,
                });
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: i64, upper: i64) -> Result<Self> {
        Self::new(alloc::vec![lower; dim], alloc::vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    /// Integer width `u_i - l_i` per coordinate.
    pub fn widths(&self) -> impl Iterator<Item = i64> + '_ {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| l <= v && v <= u)
    }

    pub fn contains_real(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&l, &u))| l as f64 <= v && v <= u as f64)
    }

    /// Number of lattice points in the box, as a float (it overflows quickly).
    pub fn lattice_size(&self) -> f64 {
        self.widths().map(|w| (w + 1) as f64).product()
    }

    pub(crate) fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: len,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_non_strict() {
        assert_eq!(
            Bounds::new(vec![2], vec![2]),
            Err(Error::DegenerateBounds {
                index: 0,
                lower: 2,
                upper: 2
            })
        );
        assert!(Bounds::new(vec![0, 1], vec![1]).is_err());
    }

    #[test]
    fn lattice_size_is_product_of_widths() {
        let b = Bounds::new(vec![1, 1], vec![3, 2]).unwrap();
        assert_eq!(b.lattice_size(), 6.0);
        assert!(b.contains(&[3, 2]));
        assert!(!b.contains(&[0, 2]));
    }
}
