use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};

/// Atoms closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Weight normalization tolerance.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Finitely supported probability measure on the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<C64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Drops zero-weight atoms, merges coincident ones and rescales to unit mass.
    pub fn new(points: Vec<C64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(QotError::Dimension(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite())
            || points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(QotError::InvalidInput("negative or non-finite atom".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(QotError::InvalidInput("measure has no mass".into()));
        }
        let mut atoms: Vec<(C64, f64)> = points
            .into_iter()
            .zip(weights)
            .filter(|&(_, w)| w > 0.0)
            .collect();
        atoms.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        let mut merged: Vec<(C64, f64)> = Vec::with_capacity(atoms.len());
        for (z, w) in atoms {
            // candidates share the real part up to MERGE_TOL
            let hit = merged
                .iter_mut()
                .rev()
                .take_while(|(p, _)| z.re - p.re <= MERGE_TOL)
                .find(|(p, _)| (z - *p).norm() <= MERGE_TOL);
            match hit {
                Some((_, acc)) => *acc += w,
                None => merged.push((z, w)),
            }
        }
        let (points, weights): (Vec<_>, Vec<_>) = merged.into_iter().map(|(z, w)| (z, w / total)).unzip();
        Ok(Self { points, weights })
    }

    pub fn dirac(z: C64) -> Self {
        Self {
            points: vec![z],
            weights: vec![1.0],
        }
    }

    pub fn uniform(points: Vec<C64>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn mean(&self) -> C64 {
        self.atoms().map(|(z, w)| z * w).sum()
    }

    /// Largest `|z|` over the support.
    pub fn radius(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureJson {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl Serialize for DiscreteMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureJson {
            points: self.points.iter().map(|z| [z.re, z.im]).collect(),
            weights: self.weights.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MeasureJson::deserialize(d)?;
        let sum: f64 = j.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(serde::de::Error::custom(format!("weights sum to {sum}, expected 1")));
        }
        let points = j.points.iter().map(|p| C64::new(p[0], p[1])).collect();
        DiscreteMeasure::new(points, j.weights).map_err(serde::de::Error::custom)
    }
}
