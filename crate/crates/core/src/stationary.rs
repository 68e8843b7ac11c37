//! Stationary scattering states of piecewise-constant potentials.
//!
//! Within a segment of constant `V` the pair `(Φ, Φ')` is carried across a
//! distance `s` by the exact 2×2 propagator
//!
//! ```text
//! ⎡ cos ks        sin(ks)/k ⎤
//! ⎣ −k sin ks     cos ks    ⎦ ,   k² = 2(E − V)
//! ```
//!
//! which is even in `k`, so evanescent segments (`k² < 0`) and the threshold
//! case `E = V` (`k = 0`, linear solutions) need no branch choice. Scattering
//! states are propagated from the transmitted side towards the incident side,
//! the numerically stable direction through barriers.

use serde::{Deserialize, Serialize};

use crate::numerics::{ComplexField, Grid};
use crate::potentials::{PotentialProfile, SymmetryDomain};
use crate::{Error, Result, C64};

/// Side from which the unit-amplitude wave comes in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Incidence {
    #[default]
    Left,
    Right,
}

/// Which stored breakpoint state a point is evaluated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchor {
    /// Nearest breakpoint at or to the right of `x` (backward propagation).
    Right,
    /// Nearest breakpoint at or to the left of `x` (forward propagation).
    Left,
}

/// Carry `(ψ, ψ')` a signed distance `s` through constant potential with
/// `k² = k2`.
fn propagate((psi, dpsi): (C64, C64), k2: f64, s: f64) -> (C64, C64) {
    let (c, sin_over_k, k_sin) = if k2 > 0.0 {
        let k = k2.sqrt();
        let (sn, cs) = (k * s).sin_cos();
        (cs, sn / k, k * sn)
    } else if k2 < 0.0 {
        let kappa = (-k2).sqrt();
        let sh = (kappa * s).sinh();
        ((kappa * s).cosh(), sh / kappa, -kappa * sh)
    } else {
        (1.0, s, 0.0)
    };
    (psi * c + dpsi * sin_over_k, -psi * k_sin + dpsi * c)
}

/// An exact solution at fixed energy, stored as `(Φ, Φ')` at each breakpoint.
#[derive(Debug, Clone)]
struct PiecewiseWave {
    energy: f64,
    cuts: Vec<f64>,
    /// `values[j]` holds on `[cuts[j-1], cuts[j])`; first and last are open.
    values: Vec<f64>,
    states: Vec<(C64, C64)>,
    anchor: Anchor,
}

impl PiecewiseWave {
    fn layout(profile: &PotentialProfile, extra: Option<f64>) -> (Vec<f64>, Vec<f64>) {
        let mut cuts = profile.breakpoints();
        match extra {
            Some(x) => cuts.push(x),
            None if cuts.is_empty() => cuts.push(0.0),
            None => {}
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut values = Vec::with_capacity(cuts.len() + 1);
        values.push(0.0);
        values.extend(cuts.iter().map(|&c| profile.evaluate(c)));
        (cuts, values)
    }

    fn k2(&self, interval: usize) -> f64 {
        2.0 * (self.energy - self.values[interval])
    }

    /// Fills `states` outwards from breakpoint `start` in both directions.
    fn sweep(&mut self, start: usize, state: (C64, C64)) {
        let n = self.cuts.len();
        self.states = vec![(C64::default(), C64::default()); n];
        self.states[start] = state;
        for j in (1..=start).rev() {
            let s = self.cuts[j - 1] - self.cuts[j];
            self.states[j - 1] = propagate(self.states[j], self.k2(j), s);
        }
        for j in start..n - 1 {
            let s = self.cuts[j + 1] - self.cuts[j];
            self.states[j + 1] = propagate(self.states[j], self.k2(j + 1), s);
        }
    }

    fn from_state(
        profile: &PotentialProfile,
        energy: f64,
        extra: Option<f64>,
        at: usize,
        state: (C64, C64),
        anchor: Anchor,
    ) -> Self {
        let (cuts, values) = Self::layout(profile, extra);
        let mut wave = Self {
            energy,
            cuts,
            values,
            states: Vec::new(),
            anchor,
        };
        let at = at.min(wave.cuts.len() - 1);
        wave.sweep(at, state);
        wave
    }

    /// Solution with the given value and derivative at `x0`.
    fn initial_value(profile: &PotentialProfile, energy: f64, x0: f64, state: (C64, C64)) -> Self {
        let (cuts, _) = Self::layout(profile, Some(x0));
        let at = cuts.iter().position(|&c| c == x0).expect("x0 was inserted");
        Self::from_state(profile, energy, Some(x0), at, state, Anchor::Left)
    }

    fn eval(&self, x: f64) -> (C64, C64) {
        let n = self.cuts.len();
        match self.anchor {
            Anchor::Right => {
                let j = self.cuts.partition_point(|&c| c < x);
                let from = j.min(n - 1);
                propagate(self.states[from], self.k2(j), x - self.cuts[from])
            }
            Anchor::Left => {
                let j = self.cuts.partition_point(|&c| c <= x);
                let from = j.saturating_sub(1);
                propagate(self.states[from], self.k2(j), x - self.cuts[from])
            }
        }
    }

    fn scale(&mut self, factor: C64) {
        for (p, d) in &mut self.states {
            *p *= factor;
            *d *= factor;
        }
    }

    fn sample(&self, grid: &Grid) -> Result<(ComplexField, ComplexField)> {
        let (field, deriv): (Vec<C64>, Vec<C64>) = grid.points().map(|x| self.eval(x)).unzip();
        Ok((
            ComplexField::new(*grid, field)?,
            ComplexField::new(*grid, deriv)?,
        ))
    }
}

fn plane((x, k): (f64, f64), sign: f64) -> (C64, C64) {
    let e = C64::new(0.0, sign * k * x).exp();
    (e, C64::new(0.0, sign * k) * e)
}

/// Incident / reflected coefficients of `(ψ, ψ')` at `x` in free space, for a
/// wave travelling in direction `sign`.
pub(crate) fn split_free((psi, dpsi): (C64, C64), x: f64, k: f64, sign: f64) -> (C64, C64) {
    let ratio = dpsi / C64::new(0.0, sign * k);
    let incoming = 0.5 * (psi + ratio) * C64::new(0.0, -sign * k * x).exp();
    let outgoing = 0.5 * (psi - ratio) * C64::new(0.0, sign * k * x).exp();
    (incoming, outgoing)
}

fn scattering_wave(
    profile: &PotentialProfile,
    energy: f64,
    incidence: Incidence,
) -> Result<(PiecewiseWave, C64, C64)> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let k = (2.0 * energy).sqrt();
    let (cuts, _) = PiecewiseWave::layout(profile, None);
    let (first, last) = (cuts[0], cuts[cuts.len() - 1]);

    let (mut wave, incoming, outgoing) = match incidence {
        Incidence::Left => {
            let wave = PiecewiseWave::from_state(
                profile,
                energy,
                None,
                cuts.len() - 1,
                plane((last, k), 1.0),
                Anchor::Right,
            );
            let (a, b) = split_free(wave.states[0], first, k, 1.0);
            (wave, a, b)
        }
        Incidence::Right => {
            let wave = PiecewiseWave::from_state(
                profile,
                energy,
                None,
                0,
                plane((first, k), -1.0),
                Anchor::Left,
            );
            let (a, b) = split_free(*wave.states.last().unwrap(), last, k, -1.0);
            (wave, a, b)
        }
    };
    let t = incoming.inv();
    let r = outgoing * t;
    wave.scale(t);
    Ok((wave, r, t))
}

/// Reflection and transmission amplitudes `(r, t)` for a unit incident wave.
pub fn scattering_amplitudes(
    profile: &PotentialProfile,
    energy: f64,
    incidence: Incidence,
) -> Result<(C64, C64)> {
    scattering_wave(profile, energy, incidence).map(|(_, r, t)| (r, t))
}

/// Stationary scattering state `Φ` at energy `E > 0`.
///
/// For left incidence `Φ = e^{ikx} + r e^{−ikx}` left of the support and
/// `Φ = t e^{ikx}` right of it; right incidence is the mirror image.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    energy: f64,
    k: f64,
    incidence: Incidence,
    r: C64,
    t: C64,
    field: ComplexField,
    derivative_field: ComplexField,
    profile: PotentialProfile,
    wave: PiecewiseWave,
}

impl ScatteringSolution {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn incidence(&self) -> Incidence {
        self.incidence
    }

    pub fn r(&self) -> C64 {
        self.r
    }

    pub fn t(&self) -> C64 {
        self.t
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn field(&self) -> &ComplexField {
        &self.field
    }

    pub fn derivative_field(&self) -> &ComplexField {
        &self.derivative_field
    }

    pub fn profile(&self) -> &PotentialProfile {
        &self.profile
    }

    /// `|r|² + |t|²`.
    pub fn unitarity(&self) -> f64 {
        self.r.norm_sqr() + self.t.norm_sqr()
    }

    /// Exact `(Φ(x), Φ'(x))` at any `x`, on or off the grid.
    pub fn value_at(&self, x: f64) -> (C64, C64) {
        self.wave.eval(x)
    }
}

/// Solve the scattering problem for `profile` at energy `E` on `grid`.
pub fn solve_scattering(
    profile: &PotentialProfile,
    energy: f64,
    grid: &Grid,
    incidence: Incidence,
) -> Result<ScatteringSolution> {
    if let Some((left, right)) = profile.support() {
        if !(grid.x_min() < left && grid.x_max() > right) {
            return Err(Error::GridInsideSupport {
                x_min: grid.x_min(),
                x_max: grid.x_max(),
                left,
                right,
            });
        }
    }
    let (wave, r, t) = scattering_wave(profile, energy, incidence)?;
    let (field, derivative_field) = wave.sample(grid)?;
    Ok(ScatteringSolution {
        energy,
        k: (2.0 * energy).sqrt(),
        incidence,
        r,
        t,
        field,
        derivative_field,
        profile: profile.clone(),
        wave,
    })
}

/// A solution `χ₂` on a sub-domain, independent of the primary scattering state.
#[derive(Debug, Clone)]
pub struct SecondSolution {
    domain: SymmetryDomain,
    field: ComplexField,
    derivative_field: ComplexField,
    wronskian_with_primary: C64,
    wave: PiecewiseWave,
}

impl SecondSolution {
    pub fn domain(&self) -> SymmetryDomain {
        self.domain
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn field(&self) -> &ComplexField {
        &self.field
    }

    pub fn derivative_field(&self) -> &ComplexField {
        &self.derivative_field
    }

    /// `W = Φ₁χ₂' − χ₂Φ₁'` at the left edge of the domain.
    pub fn wronskian_with_primary(&self) -> C64 {
        self.wronskian_with_primary
    }

    pub fn value_at(&self, x: f64) -> (C64, C64) {
        self.wave.eval(x)
    }

    /// Stand-in built from arbitrary samples, for exercising degenerate inputs.
    #[cfg(test)]
    pub(crate) fn from_samples(
        domain: SymmetryDomain,
        field: ComplexField,
        derivative_field: ComplexField,
        template: &SecondSolution,
    ) -> Self {
        Self {
            domain,
            field,
            derivative_field,
            wronskian_with_primary: template.wronskian_with_primary,
            wave: template.wave.clone(),
        }
    }

    /// `Φ₁χ₂' − χ₂Φ₁'` on every grid point of the domain.
    pub fn wronskian_series(&self, primary: &ScatteringSolution) -> Result<ComplexField> {
        let values = self
            .grid()
            .points()
            .zip(
                self.field
                    .values()
                    .iter()
                    .zip(self.derivative_field.values()),
            )
            .map(|(x, (chi, dchi))| {
                let phi = primary.field.at(x)?;
                let dphi = primary.derivative_field.at(x)?;
                Ok(phi * dchi - chi * dphi)
            })
            .collect::<Result<Vec<_>>>()?;
        ComplexField::new(*self.grid(), values)
    }
}

/// Second solution on `d` by initial-value propagation from `d.a()` with
/// `χ₂ = 0, χ₂' = 1`.
pub fn second_solution(
    profile: &PotentialProfile,
    energy: f64,
    d: SymmetryDomain,
    primary: &ScatteringSolution,
) -> Result<SecondSolution> {
    if energy != primary.energy {
        return Err(Error::EnergyMismatch(energy, primary.energy));
    }
    if profile != &primary.profile {
        return Err(Error::InvalidArgument(
            "primary solution belongs to a different profile".into(),
        ));
    }
    let grid = primary.grid().restrict(d.a(), d.b())?;
    let phi = primary.field.restrict(d.a(), d.b())?;
    if phi.max_abs() == 0.0 {
        return Err(Error::DegeneratePrimary { a: d.a(), b: d.b() });
    }
    let wave = PiecewiseWave::initial_value(
        profile,
        energy,
        d.a(),
        (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
    );
    let (field, derivative_field) = wave.sample(&grid)?;
    let (phi_a, _) = primary.value_at(d.a());
    if phi_a == C64::new(0.0, 0.0) {
        return Err(Error::DegeneratePrimary { a: d.a(), b: d.b() });
    }
    Ok(SecondSolution {
        domain: d,
        field,
        derivative_field,
        wronskian_with_primary: phi_a,
        wave,
    })
}

/// Coefficients of `Φ₂ = c₁Φ₁ + c₂χ₂` and the worst mismatch over the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Combination {
    #[serde(with = "crate::cjson")]
    pub c1: C64,
    #[serde(with = "crate::cjson")]
    pub c2: C64,
    pub residual: f64,
}

/// Match value and derivative of `phi2` at the grid point `x0` of `chi2`'s
/// domain, then report `max |Φ₂ − c₁Φ₁ − c₂χ₂|` over that domain.
pub fn fit_combination(
    phi2: &ComplexField,
    phi2_derivative: &ComplexField,
    primary: &ScatteringSolution,
    chi2: &SecondSolution,
    x0: f64,
) -> Result<Combination> {
    if !chi2.domain.contains(x0) {
        return Err(Error::InvalidArgument(format!(
            "x0 = {x0} outside [{}, {}]",
            chi2.domain.a(),
            chi2.domain.b()
        )));
    }
    let i0 = chi2.grid().index_of(x0).ok_or(Error::OffGrid { x: x0 })?;
    let x0 = chi2.grid().point(i0);
    let (p, dp) = (primary.field.at(x0)?, primary.derivative_field.at(x0)?);
    let (c, dc) = (chi2.field.values()[i0], chi2.derivative_field.values()[i0]);
    let (f, df) = (phi2.at(x0)?, phi2_derivative.at(x0)?);

    let det = p * dc - c * dp;
    let scale = (p * dc).norm() + (c * dp).norm();
    if det.norm().is_nan() || det.norm() <= 1e-14 * scale {
        return Err(Error::DependentBasis(det.norm()));
    }
    let c1 = (f * dc - c * df) / det;
    let c2 = (p * df - f * dp) / det;

    let mut residual = 0.0f64;
    for (x, chi) in chi2.grid().points().zip(chi2.field.values()) {
        let r = phi2.at(x)? - c1 * primary.field.at(x)? - c2 * chi;
        residual = residual.max(r.norm());
    }
    Ok(Combination { c1, c2, residual })
}
