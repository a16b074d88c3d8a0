//! Sampling grids, sampled fields, and the Hermite–Gauss coordinate projection.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::TwoModeState;

/// Rectangular sampling domain. `y` doubles as momentum `p` on Wigner grids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        let grid = Self { x_min, x_max, y_min, y_max, nx, ny };
        grid.validate()?;
        Ok(grid)
    }

    /// Square grid `[−half, half]²` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, -half, half, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Grid("bounds must be finite".into()));
        }
        if self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::Grid(format!(
                "need x_min < x_max and y_min < y_max, got [{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Grid(format!("need at least 2 points per axis, got {}x{}", self.nx, self.ny)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.y_max
        } else {
            self.y_min + j as f64 * self.dy()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Evaluates `f(x, y)` on every node, rows in parallel. `values[(i, j)]`
    /// holds `f(x_i, y_j)`.
    pub fn sample<T, F>(&self, f: F) -> Array2<T>
    where
        T: Send + Clone + Default,
        F: Fn(f64, f64) -> T + Sync,
    {
        let ys = self.ys();
        let rows: Vec<Vec<T>> = (0..self.nx)
            .into_par_iter()
            .map(|i| {
                let x = self.x(i);
                ys.iter().map(|&y| f(x, y)).collect()
            })
            .collect();
        let mut out = Array2::<T>::default((self.nx, self.ny));
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Intensity,
    Wigner,
    Wavefunction,
}

/// A function sampled on a [`GridSpec`]; `values[(i, j)]` is the sample at
/// `(x_i, y_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    pub grid: GridSpec,
    pub kind: FieldKind,
    pub values: Array2<T>,
}

impl<T> ScalarField<T> {
    pub fn new(grid: GridSpec, kind: FieldKind, values: Array2<T>) -> Result<Self> {
        if values.dim() != (grid.nx, grid.ny) {
            return Err(Error::Grid(format!("values are {:?} but grid is {}x{}", values.dim(), grid.nx, grid.ny)));
        }
        Ok(Self { grid, kind, values })
    }
}

fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

impl ScalarField<f64> {
    /// Trapezoid-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        let (nx, ny) = self.values.dim();
        let mut acc = 0.0;
        for ((i, j), v) in self.values.indexed_iter() {
            acc += trapezoid_weight(i, nx) * trapezoid_weight(j, ny) * v;
        }
        acc * self.grid.dx() * self.grid.dy()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rescales so that [`Self::integral`] is one.
    pub fn normalized(mut self) -> Result<Self> {
        let total = self.integral();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::ZeroNorm);
        }
        self.values.mapv_inplace(|v| v / total);
        Ok(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(other.values.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Samples along the row closest to `y = y0`.
    pub fn cut_at_y(&self, y0: f64) -> Vec<f64> {
        let j = (0..self.grid.ny)
            .min_by(|&a, &b| (self.grid.y(a) - y0).abs().total_cmp(&(self.grid.y(b) - y0).abs()))
            .unwrap_or(0);
        self.values.column(j).to_vec()
    }
}

impl ScalarField<C64> {
    /// `|Ψ|²` as an intensity field.
    pub fn intensity(&self) -> ScalarField<f64> {
        ScalarField { grid: self.grid, kind: FieldKind::Intensity, values: self.values.mapv(|c| c.norm_sqr()) }
    }
}

/// Normalized Hermite–Gauss functions `u_0(x) … u_{n_max}(x)` of waist `sigma`,
/// `u_n(x) = (πσ²)^{−1/4} (2ⁿ n!)^{−1/2} H_n(x/σ) e^{−x²/(2σ²)}`.
///
/// Uses the normalized recurrence
/// `u_{n+1} = √(2/(n+1)) ξ u_n − √(n/(n+1)) u_{n−1}` with `ξ = x/σ`.
pub fn hermite_functions(n_max: usize, x: f64, sigma: f64) -> Vec<f64> {
    let xi = x / sigma;
    let mut out = Vec::with_capacity(n_max + 1);
    let u0 = (std::f64::consts::PI * sigma * sigma).powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(u0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * xi * u0);
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// `Ψ(x, y) = Σ c_{nm} u_n(x) u_m(y)` on the grid.
pub fn coordinate_wavefunction(state: &TwoModeState, grid: &GridSpec) -> Result<ScalarField<C64>> {
    grid.validate()?;
    let (na, nb) = state.dims();
    let sigma = state.sigma();
    let coeffs = state.coeffs();
    let ux: Vec<Vec<f64>> = grid.xs().iter().map(|&x| hermite_functions(na - 1, x, sigma)).collect();
    let uy: Vec<Vec<f64>> = grid.ys().iter().map(|&y| hermite_functions(nb - 1, y, sigma)).collect();
    // contract the a index first: g[i][m] = Σ_n c_{nm} u_n(x_i)
    let partial: Vec<Vec<C64>> =
        ux.iter().map(|u| (0..nb).map(|m| (0..na).map(|n| coeffs[(n, m)] * u[n]).sum()).collect()).collect();
    let mut values = Array2::zeros((grid.nx, grid.ny));
    for (i, g) in partial.iter().enumerate() {
        for (j, u) in uy.iter().enumerate() {
            values[(i, j)] = (0..nb).map(|m| g[m] * u[m]).sum();
        }
    }
    ScalarField::new(*grid, FieldKind::Wavefunction, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 2, 2).is_ok());
        assert!(GridSpec::new(1.0, 1.0, 0.0, 1.0, 2, 2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, -1.0, 2, 2).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 1, 2).is_err());
        assert!(GridSpec::new(0.0, f64::NAN, 0.0, 1.0, 3, 3).is_err());
        let g = GridSpec::square(6.0, 241).unwrap();
        assert_eq!(g.x(0), -6.0);
        assert_eq!(g.x(240), 6.0);
        assert!((g.x(120)).abs() < 1e-14);
    }

    #[test]
    fn hermite_functions_low_order() {
        let x = 0.8;
        let sigma = 1.3;
        let u = hermite_functions(3, x, sigma);
        let xi = x / sigma;
        let g = (std::f64::consts::PI * sigma * sigma).powf(-0.25) * (-0.5 * xi * xi).exp();
        // H_2 = 4ξ² − 2, H_3 = 8ξ³ − 12ξ
        assert!((u[0] - g).abs() < 1e-15);
        assert!((u[1] - g * 2.0 * xi / 2f64.sqrt()).abs() < 1e-15);
        assert!((u[2] - g * (4.0 * xi * xi - 2.0) / 8f64.sqrt()).abs() < 1e-15);
        assert!((u[3] - g * (8.0 * xi.powi(3) - 12.0 * xi) / 48f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn vacuum_wavefunction_peak() {
        let vac = TwoModeState::vacuum(3, 2, 1.0).unwrap();
        let grid = GridSpec::square(2.0, 5).unwrap();
        let field = coordinate_wavefunction(&vac, &grid).unwrap();
        let centre = field.values[(2, 2)];
        assert!((centre.re - 0.564_189_583_547_756_3).abs() < 1e-15);
        assert_eq!(centre.im, 0.0);
    }

    #[test]
    fn odd_mode_has_node() {
        let one = TwoModeState::fock(3, 2, 1.0, 1, 0).unwrap();
        let grid = GridSpec::new(-1.0, 1.0, -3.0, 3.0, 3, 13).unwrap();
        let field = coordinate_wavefunction(&one, &grid).unwrap();
        for j in 0..13 {
            assert!(field.values[(1, j)].norm() < 1e-16);
        }
    }

    #[test]
    fn field_shape_checked() {
        let grid = GridSpec::square(1.0, 3).unwrap();
        assert!(ScalarField::new(grid, FieldKind::Wigner, Array2::<f64>::zeros((3, 4))).is_err());
    }
}
