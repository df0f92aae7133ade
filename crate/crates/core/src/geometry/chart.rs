use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A coordinate chart restricted to an axis-aligned sampling box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub coordinates: Vec<String>,
    pub bounds: Vec<(f64, f64)>,
}

impl Chart {
    pub fn new(coordinates: Vec<String>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        let c = Chart { coordinates, bounds };
        c.validate()?;
        Ok(c)
    }

    /// Same box on every axis.
    pub fn cube(coordinates: Vec<String>, lo: f64, hi: f64) -> Result<Self> {
        let bounds = vec![(lo, hi); coordinates.len()];
        Self::new(coordinates, bounds)
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.dim();
        if m < 3 || m.is_multiple_of(2) {
            return Err(Error::validation("chart", format!("dimension must be odd and at least 3, got {m}")));
        }
        if self.bounds.len() != m {
            return Err(Error::validation(
                "chart",
                format!("{} coordinates but {} box intervals", m, self.bounds.len()),
            ));
        }
        for (i, name) in self.coordinates.iter().enumerate() {
            if self.coordinates[..i].contains(name) {
                return Err(Error::validation("chart", format!("duplicate coordinate `{name}`")));
            }
        }
        for (name, &(lo, hi)) in self.coordinates.iter().zip(&self.bounds) {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::validation("chart", format!("box interval for `{name}` is empty or unbounded")));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(&self.bounds).all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }
}
