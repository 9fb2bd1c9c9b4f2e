use ndarray::Array2;

use crate::error::{Error, Result};

/// Uniform staggered mesh over a rectangle.
///
/// Pressure-like quantities live at cell centers, `u` at vertical-edge
/// midpoints and `v` at horizontal-edge midpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells per axis, got {nx}x{ny}"
            )));
        }
        if !(x1 > x0 && y1 > y0) || ![x0, y0, x1, y1].iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "degenerate extents ({x0}, {y0}) - ({x1}, {y1})"
            )));
        }
        Ok(Self {
            nx,
            ny,
            x0,
            y0,
            x1,
            y1,
            hx: (x1 - x0) / nx as f64,
            hy: (y1 - y0) / ny as f64,
        })
    }

    /// `n x n` cells on (0,1)^2.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 0.0, 0.0, 1.0, 1.0)
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.hx,
            self.y0 + (j as f64 + 0.5) * self.hy,
        )
    }

    pub fn u_point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + i as f64 * self.hx,
            self.y0 + (j as f64 + 0.5) * self.hy,
        )
    }

    pub fn v_point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.hx,
            self.y0 + j as f64 * self.hy,
        )
    }

    pub fn cell_shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn u_shape(&self) -> (usize, usize) {
        (self.nx + 1, self.ny)
    }

    pub fn v_shape(&self) -> (usize, usize) {
        (self.nx, self.ny + 1)
    }
}

fn check_shape(a: &Array2<f64>, expected: (usize, usize)) -> Result<()> {
    if a.dim() != expected {
        return Err(Error::Shape {
            expected,
            got: a.dim(),
        });
    }
    Ok(())
}

/// Scalar samples at cell centers, indexed `[i, j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField {
    pub grid: Grid,
    pub values: Array2<f64>,
}

impl CellField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: Array2::zeros(grid.cell_shape()),
        }
    }

    pub fn from_array(grid: Grid, values: Array2<f64>) -> Result<Self> {
        check_shape(&values, grid.cell_shape())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn(grid.cell_shape(), |(i, j)| {
            let (x, y) = grid.center(i, j);
            f(x, y)
        });
        Self { grid, values }
    }

    pub fn mean(&self) -> f64 {
        self.values.sum() / (self.grid.nx * self.grid.ny) as f64
    }

    /// Subtracts the discrete mean in place.
    pub fn recenter(&mut self) {
        let m = self.mean();
        self.values.mapv_inplace(|x| x - m);
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            values: &self.values * a,
        }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &CellField) {
        assert_eq!(self.grid, other.grid, "cell fields live on different grids");
        self.values.scaled_add(a, &other.values);
    }
}

/// Edge-centered velocity: `u` on vertical edges `[i, j]`, `i in 0..=nx`,
/// `v` on horizontal edges `[i, j]`, `j in 0..=ny`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub grid: Grid,
    pub u: Array2<f64>,
    pub v: Array2<f64>,
}

impl VelocityField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            u: Array2::zeros(grid.u_shape()),
            v: Array2::zeros(grid.v_shape()),
        }
    }

    pub fn from_arrays(grid: Grid, u: Array2<f64>, v: Array2<f64>) -> Result<Self> {
        check_shape(&u, grid.u_shape())?;
        check_shape(&v, grid.v_shape())?;
        Ok(Self { grid, u, v })
    }

    /// Samples `f(x, y) -> (u, v)` at the staggered points.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let u = Array2::from_shape_fn(grid.u_shape(), |(i, j)| {
            let (x, y) = grid.u_point(i, j);
            f(x, y).0
        });
        let v = Array2::from_shape_fn(grid.v_shape(), |(i, j)| {
            let (x, y) = grid.v_point(i, j);
            f(x, y).1
        });
        Self { grid, u, v }
    }

    /// Zeroes the boundary-normal edges (`u` on x-walls, `v` on y-walls).
    pub fn pin_boundary(&mut self) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for j in 0..ny {
            self.u[[0, j]] = 0.0;
            self.u[[nx, j]] = 0.0;
        }
        for i in 0..nx {
            self.v[[i, 0]] = 0.0;
            self.v[[i, ny]] = 0.0;
        }
    }

    pub fn has_no_penetration(&self) -> bool {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        (0..ny).all(|j| self.u[[0, j]] == 0.0 && self.u[[nx, j]] == 0.0)
            && (0..nx).all(|i| self.v[[i, 0]] == 0.0 && self.v[[i, ny]] == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.u
            .iter()
            .chain(self.v.iter())
            .fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            u: &self.u * a,
            v: &self.v * a,
        }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &VelocityField) {
        assert_eq!(
            self.grid, other.grid,
            "velocity fields live on different grids"
        );
        self.u.scaled_add(a, &other.u);
        self.v.scaled_add(a, &other.v);
    }

    /// `a * x + b * y`
    pub fn lin_comb(a: f64, x: &VelocityField, b: f64, y: &VelocityField) -> Self {
        let mut out = x.scaled(a);
        out.axpy(b, y);
        out
    }
}
