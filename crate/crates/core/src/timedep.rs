//! Crank–Nicolson evolution of wave packets and the discrete residual of the
//! two-field continuity equation
//! `∂t(Ψ1Ψ2*) + ∂x J = i(V2 − V1) Ψ1Ψ2*`.

use serde::{Deserialize, Serialize};

use crate::numerics::{trapezoid, ComplexField, Grid};
use crate::potentials::PotentialProfile;
use crate::sun::pair_count;
use crate::{Error, Result, C64};

/// Largest boundary amplitude tolerated for an initial packet.
pub const BOUNDARY_TAIL: f64 = 1e-12;
/// Relative norm drift that flags a broken evolution.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

/// Gaussian packet parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub x0: f64,
    pub k0: f64,
    pub width: f64,
}

impl GaussianPacket {
    pub fn sample(&self, grid: &Grid) -> Result<ComplexField> {
        initial_gaussian(grid, self.x0, self.k0, self.width)
    }
}

/// `(π w²)^(−1/4) exp(−(x − x0)²/(2w²) + i k0 x)`.
pub fn initial_gaussian(grid: &Grid, x0: f64, k0: f64, width: f64) -> Result<ComplexField> {
    if width.is_nan() || width <= 0.0 || !x0.is_finite() || !k0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "packet needs finite x0, k0 and width > 0, got ({x0}, {k0}, {width})"
        )));
    }
    let amp = (std::f64::consts::PI * width * width).powf(-0.25);
    let psi = |x: f64| {
        let u = (x - x0) / width;
        C64::from_polar(amp * (-0.5 * u * u).exp(), k0 * x)
    };
    let tail = psi(grid.x_min()).norm().max(psi(grid.x_max()).norm());
    if tail >= BOUNDARY_TAIL {
        return Err(Error::PacketTouchesBoundary(tail));
    }
    ComplexField::from_fn(*grid, psi)
}

/// A wave field at one instant, together with the landscape and time step
/// that drive it.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    field: ComplexField,
    time: f64,
    potential: PotentialProfile,
    dt: f64,
    sampled: Vec<f64>,
}

impl EvolutionState {
    /// Starts at `t = 0`; the two boundary samples are pinned to zero.
    pub fn new(field: ComplexField, potential: PotentialProfile, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let grid = *field.grid();
        let mut values = field.into_values();
        let n = values.len();
        values[0] = C64::new(0.0, 0.0);
        values[n - 1] = C64::new(0.0, 0.0);
        let sampled = potential.sample_cell_averaged(&grid);
        Ok(Self {
            field: ComplexField::new(grid, values)?,
            time: 0.0,
            potential,
            dt,
            sampled,
        })
    }

    pub fn field(&self) -> &ComplexField {
        &self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn potential(&self) -> &PotentialProfile {
        &self.potential
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The potential as seen by the scheme (cell averages on the nodes).
    pub fn sampled_potential(&self) -> &[f64] {
        &self.sampled
    }

    pub fn norm_sqr(&self) -> f64 {
        self.field.norm_sqr()
    }

    /// `∫ x |Ψ|² dx / ∫ |Ψ|² dx`.
    pub fn mean_position(&self) -> f64 {
        let g = self.grid();
        let w = trapezoid(
            g,
            g.points()
                .zip(self.field.values())
                .map(|(x, v)| x * v.norm_sqr()),
        );
        w / self.norm_sqr()
    }

    /// `∫ |Ψ|² dx` over `[a, b]`.
    pub fn norm_between(&self, a: f64, b: f64) -> Result<f64> {
        Ok(self.field.restrict(a, b)?.norm_sqr())
    }
}

/// Factorised Crank–Nicolson step `(I + i dt H/2) Ψ' = (I − i dt H/2) Ψ` for
/// the three-point Hamiltonian with Dirichlet walls.
#[derive(Debug, Clone)]
pub struct Propagator {
    /// Diagonal of `I − i dt H/2` on interior nodes.
    rhs_diag: Vec<C64>,
    /// Off-diagonal of `I + i dt H/2`.
    off: C64,
    /// Thomas elimination: modified super-diagonal and inverse pivots.
    c_prime: Vec<C64>,
    inv_pivot: Vec<C64>,
}

impl Propagator {
    pub fn new(grid: &Grid, potential: &[f64], dt: f64) -> Self {
        let m = grid.len() - 2;
        let h = grid.dx();
        let kin = 1.0 / (h * h);
        let half = C64::new(0.0, 0.5 * dt);
        let off = half * (-0.5 * kin);
        let lhs_diag: Vec<C64> = potential[1..=m]
            .iter()
            .map(|v| 1.0 + half * (kin + v))
            .collect();
        let rhs_diag = potential[1..=m]
            .iter()
            .map(|v| 1.0 - half * (kin + v))
            .collect();
        let mut c_prime = vec![C64::new(0.0, 0.0); m];
        let mut inv_pivot = vec![C64::new(0.0, 0.0); m];
        let mut prev = C64::new(0.0, 0.0);
        for i in 0..m {
            let pivot = lhs_diag[i] - off * prev;
            inv_pivot[i] = 1.0 / pivot;
            c_prime[i] = off * inv_pivot[i];
            prev = c_prime[i];
        }
        Self {
            rhs_diag,
            off,
            c_prime,
            inv_pivot,
        }
    }

    /// Advances `psi` (full grid, zero end samples) by one step in place.
    pub fn step(&self, psi: &mut [C64], scratch: &mut Vec<C64>) {
        let m = self.rhs_diag.len();
        scratch.clear();
        scratch.extend(
            (1..=m).map(|i| self.rhs_diag[i - 1] * psi[i] - self.off * (psi[i - 1] + psi[i + 1])),
        );
        let d = scratch;
        d[0] *= self.inv_pivot[0];
        for i in 1..m {
            d[i] = (d[i] - self.off * d[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..m - 1).rev() {
            let next = d[i + 1];
            d[i] -= self.c_prime[i] * next;
        }
        psi[1..=m].copy_from_slice(d);
    }
}

/// Evolves `state` by `steps` Crank–Nicolson steps.
pub fn propagate(state: &EvolutionState, steps: usize) -> Result<EvolutionState> {
    let mut out = state.clone();
    advance(&mut out, steps)?;
    Ok(out)
}

fn advance(state: &mut EvolutionState, steps: usize) -> Result<()> {
    let prop = Propagator::new(state.grid(), &state.sampled, state.dt);
    advance_with(&prop, state, steps)
}

fn advance_with(prop: &Propagator, state: &mut EvolutionState, steps: usize) -> Result<()> {
    let n0 = state.norm_sqr();
    let grid = *state.grid();
    let mut psi = std::mem::replace(
        &mut state.field,
        ComplexField::new(grid, vec![C64::new(0.0, 0.0); grid.len()])?,
    )
    .into_values();
    let mut scratch = Vec::with_capacity(psi.len());
    for s in 0..steps {
        prop.step(&mut psi, &mut scratch);
        let norm = trapezoid(&grid, psi.iter().map(|v| v.norm_sqr()));
        let drift = if n0 > 0.0 {
            (norm - n0).abs() / n0
        } else {
            norm
        };
        if drift.is_nan() || drift > MAX_NORM_DRIFT {
            return Err(Error::Unstable { step: s + 1, drift });
        }
    }
    state.field = ComplexField::new(grid, psi)?;
    state.time += steps as f64 * state.dt;
    Ok(())
}

/// Pointwise imbalance of the discrete two-field continuity equation over
/// one time step.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    #[serde(skip)]
    pub grid: Grid,
    #[serde(skip)]
    pub residual_field: Vec<C64>,
    /// `(∫ |R|² dx)^½`.
    pub l2_norm: f64,
    pub linf_norm: f64,
    /// `(∫ (Re R)² dx)^½`.
    pub re_part_norm: f64,
    /// `(∫ (Im R)² dx)^½`.
    pub im_part_norm: f64,
}

impl ResidualReport {
    fn from_field(grid: Grid, residual_field: Vec<C64>) -> Self {
        let l2 = |f: &dyn Fn(&C64) -> f64| trapezoid(&grid, residual_field.iter().map(f)).sqrt();
        let l2_norm = l2(&|r| r.norm_sqr());
        let re_part_norm = l2(&|r| r.re * r.re);
        let im_part_norm = l2(&|r| r.im * r.im);
        let linf_norm = residual_field.iter().map(|r| r.norm()).fold(0.0, f64::max);
        Self {
            grid,
            residual_field,
            l2_norm,
            linf_norm,
            re_part_norm,
            im_part_norm,
        }
    }
}

/// Central first difference; zero on the two end nodes.
fn central_difference(f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    let mut d = vec![C64::new(0.0, 0.0); n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d
}

/// `(1/2i) ∂x(Ψ2* ∂xΨ1 − Ψ1 ∂xΨ2*) − i(V2 − V1) Ψ1Ψ2*` at one time level.
fn spatial_terms(p1: &[C64], p2: &[C64], v1: &[f64], v2: &[f64], h: f64) -> Vec<C64> {
    let d1 = central_difference(p1, h);
    let c2: Vec<C64> = p2.iter().map(|z| z.conj()).collect();
    let d2 = central_difference(&c2, h);
    let j: Vec<C64> = (0..p1.len())
        .map(|i| (c2[i] * d1[i] - p1[i] * d2[i]) / C64::new(0.0, 2.0))
        .collect();
    let dj = central_difference(&j, h);
    (0..p1.len())
        .map(|i| dj[i] - C64::new(0.0, v2[i] - v1[i]) * p1[i] * c2[i])
        .collect()
}

/// Discrete residual of the continuity equation between two time levels:
/// forward time difference of `Ψ1Ψ2*` plus the spatial terms averaged over
/// both levels. Nodes within two points of the walls are excluded.
pub fn continuity_residual(
    state1: &EvolutionState,
    state1_next: &EvolutionState,
    state2: &EvolutionState,
    state2_next: &EvolutionState,
) -> Result<ResidualReport> {
    let grid = *state1.grid();
    for s in [state1_next, state2, state2_next] {
        if *s.grid() != grid {
            return Err(Error::GridMismatch(
                "all four states must share one grid".into(),
            ));
        }
    }
    let dt = state1_next.time - state1.time;
    let dt2 = state2_next.time - state2.time;
    let tol = 1e-9 * state1.dt;
    if state1.dt != state2.dt
        || (dt - state1.dt).abs() > tol
        || (dt2 - state1.dt).abs() > tol
        || (state1.time - state2.time).abs() > tol
    {
        return Err(Error::InvalidArgument(
            "states must be one common time step apart at a common time".into(),
        ));
    }
    let h = grid.dx();
    let (v1, v2) = (state1.sampled_potential(), state2.sampled_potential());
    let (a1, a2) = (state1.field.values(), state2.field.values());
    let (b1, b2) = (state1_next.field.values(), state2_next.field.values());
    let now = spatial_terms(a1, a2, v1, v2, h);
    let next = spatial_terms(b1, b2, v1, v2, h);
    let n = grid.len();
    let residual = (0..n)
        .map(|i| {
            if i < 2 || i + 2 >= n {
                return C64::new(0.0, 0.0);
            }
            let drho = (b1[i] * b2[i].conj() - a1[i] * a2[i].conj()) / state1.dt;
            drho + 0.5 * (now[i] + next[i])
        })
        .collect();
    Ok(ResidualReport::from_field(grid, residual))
}

/// Residual norms of one channel pair at one time.
#[derive(Debug, Clone, Serialize)]
pub struct PairResidual {
    /// Time at the end of the step.
    pub t: f64,
    /// 1-based channel labels, `i < j`.
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub report: ResidualReport,
}

/// Co-evolution of one field per landscape from a shared initial field.
#[derive(Debug, Clone)]
pub struct Channels {
    states: Vec<EvolutionState>,
    propagators: Vec<Propagator>,
}

impl Channels {
    pub fn new(potentials: &[PotentialProfile], initial: &ComplexField, dt: f64) -> Result<Self> {
        if potentials.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least two landscapes, got {}",
                potentials.len()
            )));
        }
        let states: Vec<EvolutionState> = potentials
            .iter()
            .map(|p| EvolutionState::new(initial.clone(), p.clone(), dt))
            .collect::<Result<_>>()?;
        let propagators = states
            .iter()
            .map(|s| Propagator::new(s.grid(), s.sampled_potential(), dt))
            .collect();
        Ok(Self {
            states,
            propagators,
        })
    }

    pub fn states(&self) -> &[EvolutionState] {
        &self.states
    }

    pub fn time(&self) -> f64 {
        self.states[0].time
    }

    /// Advances every channel by `steps` steps.
    pub fn advance(&mut self, steps: usize) -> Result<()> {
        for (c, (s, p)) in self.states.iter_mut().zip(&self.propagators).enumerate() {
            advance_with(p, s, steps).map_err(|e| Error::Channel {
                channel: c + 1,
                source: Box::new(e),
            })?;
        }
        Ok(())
    }

    /// Takes one step and returns the residual of every pair over it.
    pub fn step_with_residuals(&mut self) -> Result<Vec<PairResidual>> {
        let before = self.states.clone();
        self.advance(1)?;
        let n = self.states.len();
        let mut out = Vec::with_capacity(pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                let report =
                    continuity_residual(&before[i], &self.states[i], &before[j], &self.states[j])?;
                out.push(PairResidual {
                    t: self.time(),
                    i: i + 1,
                    j: j + 1,
                    report,
                });
            }
        }
        Ok(out)
    }
}

/// Evolves one field per landscape for `steps` steps and returns the residual
/// of every pair `(i, j)`, `i < j`, over the final step, in lexicographic
/// order.
pub fn pairwise_residual_suite(
    potentials: &[PotentialProfile],
    initial: &ComplexField,
    dt: f64,
    steps: usize,
) -> Result<Vec<ResidualReport>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let mut ch = Channels::new(potentials, initial, dt)?;
    ch.advance(steps - 1)?;
    Ok(ch
        .step_with_residuals()?
        .into_iter()
        .map(|p| p.report)
        .collect())
}

/// Residual l2 norms of one pair across refinement levels.
#[derive(Debug, Clone, Serialize)]
pub struct PairConvergence {
    pub i: usize,
    pub j: usize,
    pub l2: Vec<f64>,
    /// `l2[m] / l2[m + 1]`.
    pub ratios: Vec<f64>,
}

/// Grid and step of refinement level `level`: `n → 2n − 1`, `dt → dt/2`.
pub fn refine(grid: &Grid, dt: f64, level: u32) -> Result<(Grid, f64)> {
    let f = 1usize << level;
    let g = Grid::new(grid.x_min(), grid.x_max(), (grid.len() - 1) * f + 1)?;
    Ok((g, dt / f as f64))
}

/// Runs [`pairwise_residual_suite`] up to `t_final` on `levels` successively
/// halved `(dx, dt)` and reports the residual ratios per pair.
pub fn convergence_study(
    potentials: &[PotentialProfile],
    packet: GaussianPacket,
    base_grid: &Grid,
    base_dt: f64,
    t_final: f64,
    levels: u32,
) -> Result<Vec<PairConvergence>> {
    let base_steps = t_final / base_dt;
    if base_steps.is_nan()
        || base_steps < 1.0
        || (base_steps - base_steps.round()).abs() > 1e-9 * base_steps
    {
        return Err(Error::InvalidArgument(format!(
            "t_final = {t_final} is not a whole number of steps of {base_dt}"
        )));
    }
    let n = pair_count(potentials.len());
    let mut l2 = vec![Vec::with_capacity(levels as usize); n];
    for level in 0..levels {
        let (grid, dt) = refine(base_grid, base_dt, level)?;
        let steps = base_steps.round() as usize * (1 << level);
        let reports = pairwise_residual_suite(potentials, &packet.sample(&grid)?, dt, steps)?;
        for (acc, r) in l2.iter_mut().zip(reports) {
            acc.push(r.l2_norm);
        }
    }
    let m = potentials.len();
    let pairs = (1..=m).flat_map(|i| (i + 1..=m).map(move |j| (i, j)));
    Ok(pairs
        .zip(l2)
        .map(|((i, j), l2)| PairConvergence {
            i,
            j,
            ratios: l2.windows(2).map(|w| w[0] / w[1]).collect(),
            l2,
        })
        .collect())
}
