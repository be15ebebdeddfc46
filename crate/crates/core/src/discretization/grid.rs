use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::Geometry;
use crate::scalar::Real;

/// Minimum number of cells for either geometry.
pub const MIN_CELLS: usize = 8;

/// Truncated spatial domain with homogeneous boundary values.
///
/// * slab: `[-L, L]` split into `N` cells; unknowns at the interior nodes
///   `x_j = -L + jΔx`, `j = 1..N-1`, weights `Δx`.
/// * cylindrical: `[0, R]` split into `N` cells; unknowns at cell centres
///   `r_j = (j + ½)Δr`, `j = 0..N-1`, weights `r_j Δr` (the exact cell volume of `r dr`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceGrid<T> {
    geometry: Geometry,
    cells: usize,
    extent: T,
    spacing: T,
    nodes: Vec<T>,
    weights: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub geometry: Geometry,
    pub cells: usize,
    pub extent: f64,
}

impl<T: Real> SpaceGrid<T> {
    pub fn new(geometry: Geometry, cells: usize, extent: T) -> Result<Self> {
        match geometry {
            Geometry::Slab => Self::slab(cells, extent),
            Geometry::Cylindrical => Self::cylindrical(cells, extent),
        }
    }

    pub fn from_spec(spec: &GridSpec) -> Result<Self> {
        Self::new(spec.geometry, spec.cells, T::lit(spec.extent))
    }

    pub fn slab(cells: usize, half_width: T) -> Result<Self> {
        Self::check(cells, half_width)?;
        let dx = (half_width + half_width) / T::from_usize_lossy(cells);
        let nodes: Vec<T> = (1..cells).map(|j| -half_width + T::from_usize_lossy(j) * dx).collect();
        let weights = vec![dx; nodes.len()];
        Ok(Self {
            geometry: Geometry::Slab,
            cells,
            extent: half_width,
            spacing: dx,
            nodes,
            weights,
        })
    }

    pub fn cylindrical(cells: usize, r_max: T) -> Result<Self> {
        Self::check(cells, r_max)?;
        let dr = r_max / T::from_usize_lossy(cells);
        let half = T::lit(0.5);
        let nodes: Vec<T> = (0..cells).map(|j| (T::from_usize_lossy(j) + half) * dr).collect();
        let weights = nodes.iter().map(|&r| r * dr).collect();
        Ok(Self {
            geometry: Geometry::Cylindrical,
            cells,
            extent: r_max,
            spacing: dr,
            nodes,
            weights,
        })
    }

    fn check(cells: usize, extent: T) -> Result<()> {
        if cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!("need at least {MIN_CELLS} cells, got {cells}")));
        }
        if !(extent > T::zero()) || !extent.is_finite() {
            return Err(Error::InvalidGrid(format!("extent {extent} must be positive and finite")));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// `L` (slab half-width) or `R_max`.
    pub fn extent(&self) -> T {
        self.extent
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// Number of unknowns per profile.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn nodes_f64(&self) -> Vec<f64> {
        self.nodes.iter().map(|x| x.to_f64_lossy()).collect()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Distance of each node from the domain centre (slab) or axis (cylinder).
    pub fn radius(&self, j: usize) -> T {
        self.nodes[j].abs()
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            geometry: self.geometry,
            cells: self.cells,
            extent: self.extent.to_f64_lossy(),
        }
    }

    /// Same domain with twice as many cells.
    pub fn refined(&self) -> Self {
        Self::new(self.geometry, 2 * self.cells, self.extent).expect("refining a valid grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_nodes_and_weights() {
        let g = SpaceGrid::<f64>::slab(8, 2.0).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.nodes()[0], -1.5);
        assert_eq!(g.nodes()[6], 1.5);
        assert!(g.weights().iter().all(|&w| w == 0.5));
    }

    #[test]
    fn cylindrical_weights_are_cell_volumes() {
        let g = SpaceGrid::<f64>::cylindrical(10, 5.0).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 12.5).abs() < 1e-12);
        assert_eq!(g.nodes()[0], 0.25);
    }

    #[test]
    fn rejects_small_or_degenerate_grids() {
        assert!(SpaceGrid::<f64>::slab(4, 1.0).is_err());
        assert!(SpaceGrid::<f64>::cylindrical(16, -1.0).is_err());
    }
}
