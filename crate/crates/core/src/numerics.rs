//! Uniform grids, sampled complex fields and the differentiation / integration
//! primitives shared by the rest of the crate.

use crate::{Error, Result, C64};

/// Relative slack (in units of `dx`) used when matching a coordinate to a
/// grid point.
pub const GRID_SNAP: f64 = 1e-6;

/// Uniform grid `x_min = x_0 < x_1 < … < x_{n-1} = x_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {n_points}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Grid starting at `x_min` with (approximately) the requested spacing,
    /// ending at the first point at or beyond `x_max`.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if dx.is_nan() || dx <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "spacing must be positive, got {dx}"
            )));
        }
        let intervals = ((x_max - x_min) / dx - 1e-9).ceil().max(2.0) as usize;
        Self::new(x_min, x_min + intervals as f64 * dx, intervals + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Index of the grid point nearest to `x`, if `x` lies on the grid to
    /// within [`GRID_SNAP`]·dx.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let dx = self.dx();
        let s = (x - self.x_min) / dx;
        let i = s.round();
        if i < 0.0 || i > (self.n_points - 1) as f64 {
            return None;
        }
        ((s - i).abs() <= GRID_SNAP).then_some(i as usize)
    }

    pub fn contains(&self, x: f64) -> bool {
        let slack = GRID_SNAP * self.dx();
        x >= self.x_min - slack && x <= self.x_max + slack
    }

    /// Inclusive index range of the grid points inside `[a, b]`.
    pub fn index_range(&self, a: f64, b: f64) -> Option<(usize, usize)> {
        let dx = self.dx();
        let lo = ((a - self.x_min) / dx - GRID_SNAP).ceil().max(0.0);
        let hi = ((b - self.x_min) / dx + GRID_SNAP)
            .floor()
            .min((self.n_points - 1) as f64);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    /// The points of this grid lying in `[a, b]`, as a grid of their own.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Grid> {
        let (lo, hi) = self.index_range(a, b).ok_or(Error::EmptyDomain { a, b })?;
        if hi - lo + 1 < 3 {
            return Err(Error::InsufficientResolution {
                needed: 3,
                have: hi - lo + 1,
            });
        }
        Grid::new(self.point(lo), self.point(hi), hi - lo + 1)
    }

    /// True when both grids share spacing and their points interleave exactly.
    pub fn is_aligned_with(&self, other: &Grid) -> bool {
        let dx = self.dx();
        let shift = (other.x_min - self.x_min) / dx;
        (dx - other.dx()).abs() <= 1e-9 * dx && (shift - shift.round()).abs() <= GRID_SNAP
    }
}

/// Complex samples of a field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<C64>,
}

impl ComplexField {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-point grid",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "non-finite field value at x = {}",
                grid.point(i)
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// Sample at the grid point sitting at `x`.
    pub fn at(&self, x: f64) -> Result<C64> {
        self.grid
            .index_of(x)
            .map(|i| self.values[i])
            .ok_or(Error::OffGrid { x })
    }

    /// The samples on the points in `[a, b]`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<ComplexField> {
        let sub = self.grid.restrict(a, b)?;
        let lo = self
            .grid
            .index_of(sub.x_min())
            .expect("restricted grid is aligned");
        Ok(ComplexField {
            grid: sub,
            values: self.values[lo..lo + sub.len()].to_vec(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `∫|f|² dx` by the trapezoid rule.
    pub fn norm_sqr(&self) -> f64 {
        trapezoid(&self.grid, self.values.iter().map(|v| v.norm_sqr()))
    }
}

/// Trapezoid-rule integral of the samples `f` over `grid`.
pub fn trapezoid(grid: &Grid, f: impl IntoIterator<Item = f64>) -> f64 {
    let n = grid.len();
    let sum: f64 = f
        .into_iter()
        .enumerate()
        .map(|(i, v)| if i == 0 || i + 1 == n { 0.5 * v } else { v })
        .sum();
    sum * grid.dx()
}

/// Fourth-order derivative of uniformly spaced samples: centered five-point
/// stencil inside, one-sided five-point stencils on the two outer points at
/// each end.
fn fd4(f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    debug_assert!(n >= 5);
    let s = 1.0 / (12.0 * h);
    let mut d = vec![C64::new(0.0, 0.0); n];
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    }
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * s;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4]
        + 3.0 * f[n - 5])
        * s;
    d
}

/// Fourth-order finite-difference derivative of a sampled field.
pub fn derivative(field: &ComplexField) -> Result<ComplexField> {
    let n = field.grid.len();
    if n < 5 {
        return Err(Error::InsufficientResolution { needed: 5, have: n });
    }
    Ok(ComplexField {
        grid: field.grid,
        values: fd4(&field.values, field.grid.dx()),
    })
}

/// Like [`derivative`], but never lets a stencil straddle one of `cuts`.
///
/// Fields whose higher derivatives jump at known positions (breakpoints of a
/// piecewise potential) are differentiated piece by piece. A grid point lying
/// exactly on a cut takes its value from the piece to its right.
pub fn derivative_piecewise(field: &ComplexField, cuts: &[f64]) -> Result<ComplexField> {
    let grid = field.grid;
    let h = grid.dx();
    let slack = GRID_SNAP * h;
    let mut interior: Vec<f64> = cuts
        .iter()
        .copied()
        .filter(|&c| c > grid.x_min() + slack && c < grid.x_max() - slack)
        .collect();
    interior.sort_by(f64::total_cmp);
    interior.dedup();

    let mut edges = Vec::with_capacity(interior.len() + 2);
    edges.push(grid.x_min());
    edges.extend(interior);
    edges.push(grid.x_max());

    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for (k, w) in edges.windows(2).enumerate() {
        let (lo, hi) = grid
            .index_range(w[0], w[1])
            .ok_or(Error::EmptyDomain { a: w[0], b: w[1] })?;
        if hi - lo + 1 < 5 {
            return Err(Error::InsufficientResolution {
                needed: 5,
                have: hi - lo + 1,
            });
        }
        let d = fd4(&field.values[lo..=hi], h);
        // A point sitting on the right edge belongs to the next piece.
        let last_piece = k + 2 == edges.len();
        let on_edge = !last_piece && grid.index_of(w[1]) == Some(hi);
        let end = if on_edge { hi } else { hi + 1 };
        out[lo..end].copy_from_slice(&d[..end - lo]);
    }
    Ok(ComplexField { grid, values: out })
}

/// Anything that can be evaluated as a real potential `V(x)`.
pub trait Potential {
    fn value(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Potential for F {
    fn value(&self, x: f64) -> f64 {
        self(x)
    }
}

const OVERFLOW_LIMIT: f64 = 1e200;

/// Integrate `−½Φ'' + V(x)Φ = EΦ` across `grid` with the Numerov recurrence,
/// starting from `Φ(x_min) = initial_value`, `Φ'(x_min) = initial_derivative`.
///
/// The second sample comes from a sub-stepped RK4 step so the start-up error
/// stays below the O(dx⁴) global error of the recurrence.
pub fn numerov_integrate<P: Potential + ?Sized>(
    potential: &P,
    energy: f64,
    grid: &Grid,
    initial_value: C64,
    initial_derivative: C64,
) -> Result<ComplexField> {
    let n = grid.len();
    let h = grid.dx();
    let g = |x: f64| 2.0 * (energy - potential.value(x));

    let mut y = Vec::with_capacity(n);
    y.push(initial_value);
    y.push(rk4_start(
        &g,
        grid.x_min(),
        h,
        initial_value,
        initial_derivative,
    ));

    let h2 = h * h;
    let f = |gx: f64| 1.0 + h2 * gx / 12.0;
    let g0 = g(grid.point(0));
    let mut g_cur = g(grid.point(1));
    let mut z_cur = f(g_cur) * y[1];
    let mut dz = z_cur - f(g0) * y[0];
    for i in 1..n - 1 {
        let x_next = grid.point(i + 1);
        let g_next = g(x_next);
        dz -= h2 * g_cur * y[i];
        z_cur += dz;
        let next = z_cur / f(g_next);
        if next.norm().is_nan() || next.norm() >= OVERFLOW_LIMIT {
            return Err(Error::IntegrationOverflow { x: x_next });
        }
        y.push(next);
        g_cur = g_next;
    }
    ComplexField::new(*grid, y)
}

fn rk4_start(g: &impl Fn(f64) -> f64, x0: f64, h: f64, y0: C64, dy0: C64) -> C64 {
    const SUBSTEPS: usize = 8;
    let s = h / SUBSTEPS as f64;
    let rhs = |x: f64, y: C64| -g(x) * y;
    let (mut y, mut p) = (y0, dy0);
    for j in 0..SUBSTEPS {
        let x = x0 + j as f64 * s;
        let k1y = p;
        let k1p = rhs(x, y);
        let k2y = p + 0.5 * s * k1p;
        let k2p = rhs(x + 0.5 * s, y + 0.5 * s * k1y);
        let k3y = p + 0.5 * s * k2p;
        let k3p = rhs(x + 0.5 * s, y + 0.5 * s * k2y);
        let k4y = p + s * k3p;
        let k4p = rhs(x + s, y + s * k3y);
        y += s / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += s / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    }
    y
}
