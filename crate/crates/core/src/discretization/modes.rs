use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Geometry;

/// Regular temporal modes `ℛ` (stored as positive representatives) inside `[-K, K]`.
///
/// The singular set `𝔖` is everything else in `[-K, K]`, including `0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSet {
    k_max: usize,
    geometry: Geometry,
    regular: Vec<usize>,
}

impl ModeSet {
    pub fn new(k_max: usize, geometry: Geometry, mut regular: Vec<usize>) -> Result<Self> {
        regular.sort_unstable();
        regular.dedup();
        if regular.is_empty() {
            return Err(Error::EmptyRegularSet);
        }
        if regular[0] == 0 || *regular.last().unwrap() > k_max {
            return Err(Error::InvalidConfig(format!(
                "regular modes must lie in 1..={k_max}, got {regular:?}"
            )));
        }
        if let Some(&k) = regular.iter().find(|&&k| !geometry.admits_mode(k)) {
            return Err(Error::InvalidConfig(format!("mode {k} is not admissible in {geometry} geometry")));
        }
        Ok(Self {
            k_max,
            geometry,
            regular,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn regular(&self) -> &[usize] {
        &self.regular
    }

    pub fn regular_list(&self) -> Arc<[usize]> {
        self.regular.as_slice().into()
    }

    pub fn contains(&self, k: i64) -> bool {
        self.regular.binary_search(&(k.unsigned_abs() as usize)).is_ok()
    }

    /// Positive singular modes up to `up_to` that the geometry admits (odd only for cylinders).
    pub fn singular(&self, up_to: usize) -> Vec<usize> {
        (1..=up_to)
            .filter(|&k| self.geometry.admits_mode(k) && !self.contains(k as i64))
            .collect()
    }

    /// Lowest regular mode, the default starting channel of the solver.
    pub fn lowest(&self) -> usize {
        self.regular[0]
    }
}
