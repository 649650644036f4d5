use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::kernel::cell_kernel_integral;
use crate::linalg::{DenseMatrix, LinearOperator};
use crate::{par, Cell, Error, Grid, Result, Vec3};

type C64 = Complex64;

/// `u ↦ u + K M u` on a grid, where `K_ij = ∫_{cell j} g(c_i, y) dy` and `M`
/// is a diagonal multiplier.
///
/// Cells are congruent, so `K_ij` depends only on the index offset `i − j`
/// and is tabulated once over all `(2n_x − 1)(2n_y − 1)(2n_z − 1)` offsets.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: Grid,
    k: f64,
    multiplier: Vec<C64>,
    table: Vec<C64>,
    table_dims: [usize; 3],
}

impl DiscreteOperator {
    pub fn new(grid: Grid, k: f64, multiplier: Vec<C64>) -> Result<Self> {
        if multiplier.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if !(k >= 0.0) {
            return Err(Error::invalid("wavenumber must be nonnegative"));
        }
        let n = grid.cells_per_axis();
        let table_dims = [2 * n[0] - 1, 2 * n[1] - 1, 2 * n[2] - 1];
        let h = grid.spacing();
        let origin = Cell {
            center: Vec3::ZERO,
            half: h * 0.5,
        };
        let mut table = vec![C64::new(0.0, 0.0); table_dims[0] * table_dims[1] * table_dims[2]];
        par::for_each_row(&mut table, |t, v| {
            let i = t % table_dims[0];
            let rest = t / table_dims[0];
            let (j, l) = (rest % table_dims[1], rest / table_dims[1]);
            let offset = Vec3::new(
                (i as f64 - (n[0] - 1) as f64) * h[0],
                (j as f64 - (n[1] - 1) as f64) * h[1],
                (l as f64 - (n[2] - 1) as f64) * h[2],
            );
            *v = cell_kernel_integral(offset, &origin, k);
        });
        Ok(DiscreteOperator {
            grid,
            k,
            multiplier,
            table,
            table_dims,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn multiplier(&self) -> &[C64] {
        &self.multiplier
    }

    /// `K_ij`.
    #[inline]
    pub fn weight(&self, target: usize, source: usize) -> C64 {
        let n = self.grid.cells_per_axis();
        let a = self.grid.ijk(target);
        let b = self.grid.ijk(source);
        let t = [
            a[0] + n[0] - 1 - b[0],
            a[1] + n[1] - 1 - b[1],
            a[2] + n[2] - 1 - b[2],
        ];
        self.table[t[0] + self.table_dims[0] * (t[1] + self.table_dims[1] * t[2])]
    }

    /// `(K M v)_i`.
    fn row_product(&self, target: usize, v: &[C64]) -> C64 {
        let n = self.grid.cells_per_axis();
        let a = self.grid.ijk(target);
        let mut acc = C64::new(0.0, 0.0);
        let mut src = 0;
        for l in 0..n[2] {
            let tl = a[2] + n[2] - 1 - l;
            for j in 0..n[1] {
                let tj = a[1] + n[1] - 1 - j;
                let base = self.table_dims[0] * (tj + self.table_dims[1] * tl) + a[0] + n[0] - 1;
                for i in 0..n[0] {
                    let m = self.multiplier[src];
                    if m.re != 0.0 || m.im != 0.0 {
                        acc += self.table[base - i] * m * v[src];
                    }
                    src += 1;
                }
            }
        }
        acc
    }

    /// `Σ_j (∫_{cell j} g(x, y) dy) m_j v_j` at an arbitrary point.
    pub fn potential_at(&self, x: Vec3, v: &[C64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, (m, vj)) in self.multiplier.iter().zip(v).enumerate() {
            if m.re != 0.0 || m.im != 0.0 {
                acc += cell_kernel_integral(x, &self.grid.cell(j), self.k) * m * vj;
            }
        }
        acc
    }

    /// `∫_{cell j} g(x, y) dy` for every cell.
    pub fn cell_integrals_at(&self, x: Vec3) -> Vec<C64> {
        (0..self.grid.len())
            .map(|j| cell_kernel_integral(x, &self.grid.cell(j), self.k))
            .collect()
    }

    /// Dense `I + K M`.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.grid.len();
        DenseMatrix::from_rows(n, |i, row| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.weight(i, j) * self.multiplier[j];
            }
            row[i] += C64::new(1.0, 0.0);
        })
    }

    /// `K M v` on the grid.
    pub fn apply_kernel(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        par::for_each_row(&mut out, |i, o| *o = self.row_product(i, v));
        out
    }
}

impl LinearOperator for DiscreteOperator {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        par::for_each_row(y, |i, yi| *yi = x[i] + self.row_product(i, x));
    }
}
