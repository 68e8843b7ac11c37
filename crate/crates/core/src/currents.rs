//! Two-field currents, their non-local invariant forms, and the amplitude
//! reconstruction for two landscapes sharing a leading domain.
//!
//! All currents share the bilinear form
//!
//! ```text
//! J[f, g](x) = (1/2i) (g*(x) f'(x) − f(x) g*'(x))
//! ```
//!
//! with `J12 = J[Φ1, Φ2]`, `Jχ = J[Φ1, χ2]`, and `Q̃`, `Q` obtained by pairing `Φ`
//! with its image `Φ(F(x))` (conjugated or not). Where the two fields solve the
//! same stationary equation on a domain, the form is constant there.

use std::io::{self, Write};

use serde::Serialize;

use crate::numerics::{derivative_piecewise, ComplexField, Grid, GRID_SNAP};
use crate::potentials::{
    check_local_symmetry, PotentialProfile, SymmetryDomain, SymmetryTransform,
};
use crate::stationary::{
    fit_combination, second_solution, solve_scattering, split_free, Combination, Incidence,
    ScatteringSolution, SecondSolution,
};
use crate::{cjson, Error, Result, C64};

/// Relative (or, for vanishing means, absolute) deviation allowed by default
/// on exact transfer-matrix fields.
pub const DEFAULT_CONSTANCY_TOL: f64 = 1e-8;

/// Means smaller than this are judged on absolute deviation.
const ABSOLUTE_FLOOR: f64 = 1e-12;

fn bilinear(f: C64, df: C64, g: C64, dg: C64) -> C64 {
    (g.conj() * df - f * dg.conj()) / C64::new(0.0, 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurrentKind {
    J12,
    Jchi,
    Q,
    Qtilde,
    Standard,
}

/// A current sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentSeries {
    grid: Grid,
    values: Vec<C64>,
    label: CurrentKind,
}

impl CurrentSeries {
    pub fn new(grid: Grid, values: Vec<C64>, label: CurrentKind) -> Result<Self> {
        // Reuse the field checks on length and finiteness.
        let values = ComplexField::new(grid, values)?.into_values();
        Ok(Self {
            grid,
            values,
            label,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn label(&self) -> CurrentKind {
        self.label
    }

    /// How constant the current is on the grid points inside `d`.
    pub fn constancy(&self, d: SymmetryDomain, tolerance: f64) -> Result<ConstancyReport> {
        let (lo, hi) = self
            .grid
            .index_range(d.a(), d.b())
            .ok_or(Error::EmptyDomain { a: d.a(), b: d.b() })?;
        let window = &self.values[lo..=hi];
        let mean = window.iter().sum::<C64>() / window.len() as f64;
        let max_abs_deviation = window.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        let relative_deviation = max_abs_deviation / mean.norm().max(1e-300);
        let passed = if mean.norm() < ABSOLUTE_FLOOR {
            max_abs_deviation <= tolerance
        } else {
            relative_deviation <= tolerance
        };
        Ok(ConstancyReport {
            domain: d,
            mean_value: mean,
            max_abs_deviation,
            relative_deviation,
            tolerance,
            samples: window.len(),
            passed,
        })
    }

    /// Constancy over the whole grid.
    pub fn constancy_everywhere(&self, tolerance: f64) -> ConstancyReport {
        let d = SymmetryDomain::new(self.grid.x_min(), self.grid.x_max())
            .expect("grid bounds are ordered");
        self.constancy(d, tolerance).expect("a grid is never empty")
    }

    /// `x,re,im,abs` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,re,im,abs")?;
        for (x, v) in self.grid.points().zip(&self.values) {
            writeln!(
                w,
                "{},{},{},{}",
                cjson::fmt_real(x),
                cjson::fmt_real(v.re),
                cjson::fmt_real(v.im),
                cjson::fmt_real(v.norm())
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstancyReport {
    pub domain: SymmetryDomain,
    #[serde(with = "cjson")]
    pub mean_value: C64,
    pub max_abs_deviation: f64,
    pub relative_deviation: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
}

fn same_problem(a: &ScatteringSolution, b: &ScatteringSolution) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch(
            "solutions live on different grids".into(),
        ));
    }
    if a.energy() != b.energy() {
        return Err(Error::EnergyMismatch(a.energy(), b.energy()));
    }
    Ok(())
}

/// `J12 = (1/2i)(Φ2* Φ1' − Φ1 Φ2*')` on the shared grid.
pub fn current_j12(sol1: &ScatteringSolution, sol2: &ScatteringSolution) -> Result<CurrentSeries> {
    same_problem(sol1, sol2)?;
    let values = (0..sol1.grid().len())
        .map(|i| {
            bilinear(
                sol1.field().values()[i],
                sol1.derivative_field().values()[i],
                sol2.field().values()[i],
                sol2.derivative_field().values()[i],
            )
        })
        .collect();
    CurrentSeries::new(*sol1.grid(), values, CurrentKind::J12)
}

/// The probability current of a single state, `J12` with `Φ2 = Φ1`.
pub fn standard_current(sol: &ScatteringSolution) -> CurrentSeries {
    let mut j = current_j12(sol, sol).expect("a solution matches itself");
    j.label = CurrentKind::Standard;
    j
}

/// `Jχ = (1/2i)(χ2* Φ1' − Φ1 χ2*')` on the domain of `chi2`.
pub fn current_jchi(primary: &ScatteringSolution, chi2: &SecondSolution) -> Result<CurrentSeries> {
    if !primary.grid().is_aligned_with(chi2.grid()) {
        return Err(Error::GridMismatch(
            "second solution is not sampled on the primary grid".into(),
        ));
    }
    let values = chi2
        .grid()
        .points()
        .zip(
            chi2.field()
                .values()
                .iter()
                .zip(chi2.derivative_field().values()),
        )
        .map(|(x, (&c, &dc))| {
            Ok(bilinear(
                primary.field().at(x)?,
                primary.derivative_field().at(x)?,
                c,
                dc,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    CurrentSeries::new(*chi2.grid(), values, CurrentKind::Jchi)
}

/// Currents of a landscape pair on one of their equality domains.
#[derive(Debug, Clone, Serialize)]
pub struct EqualityDomainCurrents {
    pub domain: SymmetryDomain,
    pub j12: ConstancyReport,
    pub jchi: ConstancyReport,
    /// `Φ2 = c1 Φ1 + c2 χ2` on the domain.
    pub fit: Combination,
    /// `|⟨J12⟩ − (c1* J11 + c2* ⟨Jχ⟩)|`.
    pub decomposition_error: f64,
}

impl EqualityDomainCurrents {
    pub fn passed(&self, fit_tolerance: f64) -> bool {
        self.j12.passed && self.jchi.passed && self.fit.residual <= fit_tolerance
    }
}

/// Builds `χ2` on `d` from the first landscape, fits `Φ2` against `(Φ1, χ2)`
/// and checks `J12` and `Jχ` for constancy on `d`.
pub fn equality_domain_currents(
    sol1: &ScatteringSolution,
    sol2: &ScatteringSolution,
    d: SymmetryDomain,
    tolerance: f64,
) -> Result<EqualityDomainCurrents> {
    let j12 = current_j12(sol1, sol2)?;
    let chi = second_solution(sol1.profile(), sol1.energy(), d, sol1)?;
    let jchi = current_jchi(sol1, &chi)?;
    let fit = fit_combination(
        sol2.field(),
        sol2.derivative_field(),
        sol1,
        &chi,
        chi.grid().x_min(),
    )?;
    let j12_report = j12.constancy(d, tolerance)?;
    let jchi_report = jchi.constancy(d, tolerance)?;
    let (phi, dphi) = sol1.value_at(d.a());
    let j11 = bilinear(phi, dphi, phi, dphi);
    let predicted = fit.c1.conj() * j11 + fit.c2.conj() * jchi_report.mean_value;
    Ok(EqualityDomainCurrents {
        domain: d,
        j12: j12_report,
        jchi: jchi_report,
        fit,
        decomposition_error: (j12_report.mean_value - predicted).norm(),
    })
}

/// `Q` and `Q̃` on a domain, with the local-symmetry verdict for that domain.
#[derive(Debug, Clone)]
pub struct NonLocalCurrents {
    pub q: CurrentSeries,
    pub q_tilde: CurrentSeries,
    /// `V(F(x)) = V(x)` on the domain; if false the currents need not be
    /// constant.
    pub symmetry_holds: bool,
}

/// Non-local currents pairing `Φ(x)` with `Φ̄(x) = Φ(F(x))`:
///
/// ```text
/// Q̃ = (1/2i)(Φ̄* Φ' − Φ dΦ̄*/dx),   Q = (1/2i)(Φ̄ Φ' − Φ dΦ̄/dx),
/// ```
///
/// where `dΦ̄/dx = σ Φ'(F(x))`. `F` must carry the grid points of `d` onto grid
/// points.
pub fn current_q(
    sol: &ScatteringSolution,
    f: SymmetryTransform,
    d: SymmetryDomain,
) -> Result<NonLocalCurrents> {
    let grid = sol.grid().restrict(d.a(), d.b())?;
    let sigma = f.sigma();
    let mut q = Vec::with_capacity(grid.len());
    let mut q_tilde = Vec::with_capacity(grid.len());
    for x in grid.points() {
        let image = f.apply(x);
        if !sol.grid().contains(image) {
            return Err(Error::ImageOutsideGrid { x, image });
        }
        let j = sol
            .grid()
            .index_of(image)
            .ok_or(Error::OffGrid { x: image })?;
        let phi = sol.field().at(x)?;
        let dphi = sol.derivative_field().at(x)?;
        let bar = sol.field().values()[j];
        let dbar = sol.derivative_field().values()[j] * sigma;
        q_tilde.push(bilinear(phi, dphi, bar, dbar));
        // Q pairs with Φ̄ itself; feed the conjugate so the form conjugates back.
        q.push(bilinear(phi, dphi, bar.conj(), dbar.conj()));
    }
    let symmetry_holds = check_local_symmetry(sol.profile(), f, d, 0.0);
    Ok(NonLocalCurrents {
        q: CurrentSeries::new(grid, q, CurrentKind::Q)?,
        q_tilde: CurrentSeries::new(grid, q_tilde, CurrentKind::Qtilde)?,
        symmetry_holds,
    })
}

/// `d/dx J12`, differentiated piece by piece between the breakpoints of both
/// landscapes.
pub fn current_divergence(
    sol1: &ScatteringSolution,
    sol2: &ScatteringSolution,
) -> Result<ComplexField> {
    let j = current_j12(sol1, sol2)?;
    let field = ComplexField::new(j.grid, j.values)?;
    let mut cuts = sol1.profile().breakpoints();
    cuts.extend(sol2.profile().breakpoints());
    derivative_piecewise(&field, &cuts)
}

/// Pointwise imbalance of the stationary two-field balance law,
/// `R = d/dx J12 − i(V2 − V1) Φ1 Φ2*`.
pub fn stationary_residual(
    sol1: &ScatteringSolution,
    sol2: &ScatteringSolution,
    p1: &PotentialProfile,
    p2: &PotentialProfile,
) -> Result<ComplexField> {
    if sol1.profile() != p1 || sol2.profile() != p2 {
        return Err(Error::InvalidArgument(
            "solutions do not belong to the given profiles".into(),
        ));
    }
    let div = current_divergence(sol1, sol2)?;
    let grid = *sol1.grid();
    // Nodes within snapping distance of a breakpoint take the right-hand value,
    // as the piecewise derivative does.
    let nudge = 0.5 * GRID_SNAP * grid.dx();
    let values = grid
        .points()
        .enumerate()
        .map(|(i, x)| {
            let x = x + nudge;
            let source = C64::new(0.0, p2.evaluate(x) - p1.evaluate(x))
                * sol1.field().values()[i]
                * sol2.field().values()[i].conj();
            div.values()[i] - source
        })
        .collect();
    ComplexField::new(grid, values)
}

/// Reading of the region-I / region-II current balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeConvention {
    /// `A = (1 − r1* r2) / t1*`.
    ConjugatedT1,
    /// `A = (1 − r1 r2*) / t1`.
    PlainT1,
}

/// Everything computed for one two-landscape reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioResult {
    pub energy: f64,
    pub k: f64,
    #[serde(with = "cjson")]
    pub r1: C64,
    #[serde(with = "cjson")]
    pub t1: C64,
    #[serde(with = "cjson")]
    pub r2: C64,
    #[serde(with = "cjson")]
    pub t2: C64,
    /// Free interval between the shared domain and the extra structure of `V2`.
    pub region_two: SymmetryDomain,
    /// `A = (1 − r1* r2) / t1*`.
    #[serde(with = "cjson")]
    pub a_predicted: C64,
    /// `(1 − r1 r2*) / t1`, the complex conjugate of `a_predicted` when
    /// `|A| = 1`, kept for comparison.
    #[serde(with = "cjson")]
    pub a_alternative: C64,
    pub a_alternative_error: f64,
    /// Reading closer to the directly computed `A`.
    pub a_convention: AmplitudeConvention,
    pub b_modulus_predicted: f64,
    /// `|A|² − (1 − |r2|²)` before the square root; tiny negatives are
    /// clamped when forming `|B|`.
    pub b_radicand: f64,
    #[serde(with = "cjson")]
    pub a_direct: C64,
    #[serde(with = "cjson")]
    pub b_direct: C64,
    /// Phase of `B` from the direct solve; not predicted by the current balance.
    pub b_phase_direct: f64,
    /// `J12` evaluated from the fields in region I and in region II.
    #[serde(with = "cjson")]
    pub j12_region_one: C64,
    #[serde(with = "cjson")]
    pub j12_region_two: C64,
    /// `1 − |A|²`.
    pub transparency_radicand: f64,
    /// `| |r2| − √(1 − |A|²) |`, present when the radicand is non-negative.
    pub transparency_residual: Option<f64>,
    /// `|A_direct|² − |B_direct|² − (1 − |r2|²)`.
    pub flux_balance_error: f64,
}

impl ScenarioResult {
    pub fn a_error(&self) -> f64 {
        (self.a_predicted - self.a_direct).norm()
    }

    pub fn b_modulus_error(&self) -> f64 {
        (self.b_modulus_predicted - self.b_direct.norm()).abs()
    }
}

/// Locate the free gap ("region II") between the shared domain of `p1`, `p2`
/// and the extra structure of `p2`.
pub fn region_two(
    p1: &PotentialProfile,
    p2: &PotentialProfile,
    grid: &Grid,
) -> Result<SymmetryDomain> {
    let invalid = |msg: &str| Error::GeometryInvalid(msg.to_string());
    let (shared_left, shared_right) = match p1.support() {
        Some(s) => s,
        None => {
            let right = p2.support().map_or(grid.x_max(), |(l, _)| l);
            return SymmetryDomain::new(grid.x_min(), right)
                .map_err(|_| invalid("no free region in front of the second landscape"));
        }
    };
    if !crate::potentials::find_difference_domains(p1, p2, shared_left, shared_right).is_empty() {
        return Err(invalid(
            "the two landscapes differ inside the shared domain",
        ));
    }
    if p2.segments().iter().any(|s| s.left < shared_left) {
        return Err(invalid(
            "the second landscape extends left of the shared domain",
        ));
    }
    let extra_left = p2
        .segments()
        .iter()
        .filter(|s| s.right > shared_right)
        .map(|s| s.left.max(shared_right))
        .fold(f64::INFINITY, f64::min);
    let right = if extra_left.is_finite() {
        extra_left
    } else {
        grid.x_max()
    };
    if right <= shared_right {
        return Err(invalid(
            "no free region II separates the shared domain from the rest of V2",
        ));
    }
    SymmetryDomain::new(shared_right, right)
        .map_err(|_| invalid("no free region II separates the shared domain from the rest of V2"))
}

/// Reconstruct the region-II amplitudes `A`, `|B|` of the `p2` scattering state
/// from `r1`, `t1`, `r2`, and compare against a direct solve.
///
/// `p1` must vanish outside a domain `D1` on which `p2` agrees with it; `p2`
/// may carry further structure right of a free gap.
pub fn run_fig1_scenario(
    p1: &PotentialProfile,
    p2: &PotentialProfile,
    energy: f64,
    grid: &Grid,
) -> Result<ScenarioResult> {
    let region = region_two(p1, p2, grid)?;
    let s1 = solve_scattering(p1, energy, grid, Incidence::Left)?;
    let s2 = solve_scattering(p2, energy, grid, Incidence::Left)?;
    let k = s1.k();
    let (r1, t1, r2, t2) = (s1.r(), s1.t(), s2.r(), s2.t());
    let one = C64::new(1.0, 0.0);

    let mid = 0.5 * (region.a() + region.b());
    let (a_direct, b_direct) = split_free(s2.value_at(mid), mid, k, 1.0);

    let a_predicted = (one - r1.conj() * r2) / t1.conj();
    let a_alternative = (one - r1 * r2.conj()) / t1;

    let b_radicand = a_predicted.norm_sqr() - (1.0 - r2.norm_sqr());
    let transparency_radicand = 1.0 - a_predicted.norm_sqr();
    let transparency_residual =
        (transparency_radicand >= 0.0).then(|| (r2.norm() - transparency_radicand.sqrt()).abs());

    let j_at = |x: f64| {
        let (f, df) = s1.value_at(x);
        let (g, dg) = s2.value_at(x);
        bilinear(f, df, g, dg)
    };

    Ok(ScenarioResult {
        energy,
        k,
        r1,
        t1,
        r2,
        t2,
        region_two: region,
        a_predicted,
        a_alternative,
        a_alternative_error: (a_alternative - a_direct).norm(),
        a_convention: if (a_predicted - a_direct).norm() <= (a_alternative - a_direct).norm() {
            AmplitudeConvention::ConjugatedT1
        } else {
            AmplitudeConvention::PlainT1
        },
        b_modulus_predicted: b_radicand.max(0.0).sqrt(),
        b_radicand,
        a_direct,
        b_direct,
        b_phase_direct: b_direct.arg(),
        j12_region_one: j_at(grid.x_min()),
        j12_region_two: j_at(mid),
        transparency_radicand,
        transparency_residual,
        flux_balance_error: a_direct.norm_sqr() - b_direct.norm_sqr() - (1.0 - r2.norm_sqr()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Segment;

    fn grid() -> Grid {
        Grid::with_spacing(-12.0, 12.0, 1e-3).unwrap()
    }

    fn solve(p: &PotentialProfile, e: f64) -> ScatteringSolution {
        solve_scattering(p, e, &grid(), Incidence::Left).unwrap()
    }

    #[test]
    fn unit_plane_wave_carries_unit_current() {
        let s = solve(&PotentialProfile::empty(), 0.5);
        let j = current_j12(&s, &s).unwrap();
        assert!(j.values().iter().all(|v| (v - 1.0).norm() < 1e-14));
    }

    #[test]
    fn region_one_value_is_the_literal_operand_order() {
        let p1 = PotentialProfile::barrier(0.0, 1.0, 0.8).unwrap();
        let p2 = PotentialProfile::new(vec![Segment::new(-0.5, 2.0, 1.3)]).unwrap();
        let (s1, s2) = (solve(&p1, 0.5), solve(&p2, 0.5));
        let j = current_j12(&s1, &s2).unwrap();
        let literal = s1.k() * (1.0 - s1.r() * s2.r().conj());
        let printed = s1.k() * (1.0 - s1.r().conj() * s2.r());
        let region = SymmetryDomain::new(-12.0, -0.5).unwrap();
        let rep = j.constancy(region, 1e-10).unwrap();
        assert!(rep.passed);
        assert!((rep.mean_value - literal).norm() < 1e-12);
        assert!((rep.mean_value.conj() - printed).norm() < 1e-12);
    }

    #[test]
    fn identical_landscapes_give_a_constant_current() {
        let p = PotentialProfile::new(vec![
            Segment::new(-1.0, 0.0, 1.1),
            Segment::new(0.3, 0.9, -0.6),
        ])
        .unwrap();
        let (s1, s2) = (solve(&p, 0.5), solve(&p, 0.5));
        assert!(
            current_j12(&s1, &s2)
                .unwrap()
                .constancy_everywhere(1e-10)
                .passed
        );
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let p = PotentialProfile::empty();
        let a = solve(&p, 0.5);
        let b = solve(&p, 0.6);
        assert!(matches!(
            current_j12(&a, &b),
            Err(Error::EnergyMismatch(..))
        ));
        let c = solve_scattering(
            &p,
            0.5,
            &Grid::new(-5.0, 5.0, 101).unwrap(),
            Incidence::Left,
        )
        .unwrap();
        assert!(matches!(current_j12(&a, &c), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn jchi_of_free_pair_is_constant() {
        let p = PotentialProfile::empty();
        let s = solve(&p, 0.5);
        let d = SymmetryDomain::new(-3.0, 4.0).unwrap();
        let chi = second_solution(&p, 0.5, d, &s).unwrap();
        let j = current_jchi(&s, &chi).unwrap();
        // Φ = e^{ix}, χ = sin(x + 3): J = (1/2i)(sin(x+3) i e^{ix} − e^{ix} cos(x+3)) = e^{-3i}/2i · i ... closed form:
        // (1/2i) e^{ix} (i sin(x+3) − cos(x+3)) = −(1/2i) e^{ix} e^{−i(x+3)} = i e^{−3i}/2.
        let expect = C64::new(0.0, 0.5) * C64::new(0.0, -3.0).exp();
        assert!(j.values().iter().all(|v| (v - expect).norm() < 1e-12));
    }

    #[test]
    fn jchi_collapses_to_standard_current() {
        let p = PotentialProfile::barrier(0.0, 1.0, 1.0).unwrap();
        let s = solve(&p, 0.5);
        let d = SymmetryDomain::new(-2.0, 2.0).unwrap();
        let chi = second_solution(&p, 0.5, d, &s).unwrap();
        let chi = SecondSolution::from_samples(
            d,
            s.field().restrict(-2.0, 2.0).unwrap(),
            s.derivative_field().restrict(-2.0, 2.0).unwrap(),
            &chi,
        );
        let j = current_jchi(&s, &chi).unwrap();
        let std = standard_current(&s);
        for (x, v) in j.grid().points().zip(j.values()) {
            assert_eq!(*v, std.values()[std.grid().index_of(x).unwrap()]);
        }
    }

    #[test]
    fn jchi_on_constant_potential_domain() {
        let p = PotentialProfile::barrier(-4.0, 4.0, 0.3).unwrap();
        let s = solve(&p, 0.5);
        let d = SymmetryDomain::new(-3.0, 3.0).unwrap();
        let chi = second_solution(&p, 0.5, d, &s).unwrap();
        assert!(
            current_jchi(&s, &chi)
                .unwrap()
                .constancy(d, 1e-8)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn equality_domain_pipeline() {
        let shared = [Segment::new(-1.0, 0.0, 0.6), Segment::new(0.0, 1.0, -0.3)];
        let p1 = PotentialProfile::new(shared.to_vec()).unwrap();
        let p2 = p1.with_segment(Segment::new(2.0, 3.0, 1.1)).unwrap();
        let (s1, s2) = (solve(&p1, 0.7), solve(&p2, 0.7));
        let d = SymmetryDomain::new(-12.0, 2.0).unwrap();
        let out = equality_domain_currents(&s1, &s2, d, 1e-8).unwrap();
        assert!(out.passed(1e-8), "{out:?}");
        assert!(out.decomposition_error < 1e-10);
        let beyond = SymmetryDomain::new(1.5, 3.5).unwrap();
        let j = current_j12(&s1, &s2).unwrap();
        assert!(!j.constancy(beyond, 1e-8).unwrap().passed);
    }

    #[test]
    fn identity_transform_degenerates() {
        let p = PotentialProfile::new(vec![
            Segment::new(-1.0, 0.2, 0.9),
            Segment::new(1.0, 1.7, 0.4),
        ])
        .unwrap();
        let s = solve(&p, 0.5);
        let d = SymmetryDomain::new(-5.0, 5.0).unwrap();
        let nl = current_q(&s, SymmetryTransform::identity(), d).unwrap();
        assert!(nl.symmetry_holds);
        assert!(nl.q.values().iter().all(|v| *v == C64::new(0.0, 0.0)));
        let std = standard_current(&s);
        for (x, v) in nl.q_tilde.grid().points().zip(nl.q_tilde.values()) {
            let i = std.grid().index_of(x).unwrap();
            assert_eq!(*v, std.values()[i]);
        }
    }

    #[test]
    fn image_outside_grid_is_an_error() {
        let s = solve(&PotentialProfile::empty(), 0.5);
        let d = SymmetryDomain::new(-1.0, 1.0).unwrap();
        assert!(matches!(
            current_q(&s, SymmetryTransform::translation(20.0), d),
            Err(Error::ImageOutsideGrid { .. })
        ));
        assert!(matches!(
            current_q(&s, SymmetryTransform::translation(0.0004), d),
            Err(Error::OffGrid { .. })
        ));
    }

    #[test]
    fn parity_symmetric_barrier_has_constant_invariants() {
        let p = PotentialProfile::new(vec![
            Segment::new(-2.0, -1.0, 1.0),
            Segment::new(-1.0, 1.0, 0.2),
            Segment::new(1.0, 2.0, 1.0),
        ])
        .unwrap();
        let s = solve(&p, 0.5);
        let d = SymmetryDomain::new(-2.0, 2.0).unwrap();
        let nl = current_q(&s, SymmetryTransform::reflection(0.0), d).unwrap();
        assert!(nl.symmetry_holds);
        assert!(nl.q.constancy(d, 1e-8).unwrap().passed);
        assert!(nl.q_tilde.constancy(d, 1e-8).unwrap().passed);
    }

    #[test]
    fn translated_bumps_constant_only_inside_symmetry_domain() {
        let p = PotentialProfile::new(vec![
            Segment::new(0.0, 1.0, 0.9),
            Segment::new(2.0, 3.0, 0.9),
            Segment::new(5.0, 5.5, 0.4),
        ])
        .unwrap();
        let s = solve(&p, 0.5);
        let f = SymmetryTransform::translation(2.0);
        let d = SymmetryDomain::new(0.0, 1.0).unwrap();
        let nl = current_q(&s, f, d).unwrap();
        assert!(nl.q.constancy(d, 1e-8).unwrap().passed);
        assert!(nl.q_tilde.constancy(d, 1e-8).unwrap().passed);

        let wide = SymmetryDomain::new(0.0, 2.6).unwrap();
        let nl = current_q(&s, f, wide).unwrap();
        assert!(!nl.symmetry_holds);
        assert!(nl.q_tilde.constancy(wide, 1e-3).unwrap().relative_deviation > 1e-3);
    }

    #[test]
    fn free_residual_vanishes() {
        let p = PotentialProfile::empty();
        let s = solve(&p, 0.5);
        let r = stationary_residual(&s, &s, &p, &p).unwrap();
        assert!(r.max_abs() < 1e-12, "{:e}", r.max_abs());
    }

    #[test]
    fn source_free_inside_equality_domain() {
        let p1 = PotentialProfile::barrier(0.0, 1.0, 0.8).unwrap();
        let p2 = p1.with_segment(Segment::new(3.0, 4.0, 1.5)).unwrap();
        let (s1, s2) = (solve(&p1, 0.6), solve(&p2, 0.6));
        let div = current_divergence(&s1, &s2).unwrap();
        let inside = div.restrict(-11.0, 2.9).unwrap();
        assert!(inside.max_abs() < 1e-9, "{:e}", inside.max_abs());
        let across = div.restrict(3.1, 3.9).unwrap();
        assert!(across.max_abs() > 1e-3);
        let r = stationary_residual(&s1, &s2, &p1, &p2).unwrap();
        assert!(r.max_abs() < 1e-9, "{:e}", r.max_abs());
    }

    fn residual_at(dx: f64) -> f64 {
        let p1 = PotentialProfile::new(vec![
            Segment::new(-1.0, -0.2, 0.7),
            Segment::new(0.4, 1.1, -0.5),
        ])
        .unwrap();
        let p2 = PotentialProfile::new(vec![
            Segment::new(-0.6, 0.3, 1.2),
            Segment::new(0.8, 1.6, 0.3),
        ])
        .unwrap();
        let g = Grid::with_spacing(-4.0, 4.0, dx).unwrap();
        let s1 = solve_scattering(&p1, 1.3, &g, Incidence::Left).unwrap();
        let s2 = solve_scattering(&p2, 1.3, &g, Incidence::Left).unwrap();
        stationary_residual(&s1, &s2, &p1, &p2).unwrap().max_abs()
    }

    #[test]
    fn residual_converges_at_fourth_order() {
        let errs: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&dx| residual_at(dx))
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((12.0..=20.0).contains(&ratio), "errs {errs:?}");
        }
    }

    #[test]
    fn fig1_with_empty_first_landscape() {
        let p2 = PotentialProfile::barrier(1.0, 2.0, 0.9).unwrap();
        let r = run_fig1_scenario(&PotentialProfile::empty(), &p2, 0.5, &grid()).unwrap();
        assert!((r.a_predicted - 1.0).norm() < 1e-14);
        assert!((r.a_direct - 1.0).norm() < 1e-12);
        assert!((r.b_direct - r.r2).norm() < 1e-12);
    }

    #[test]
    fn fig1_with_identical_landscapes() {
        let p = PotentialProfile::new(vec![
            Segment::new(-2.0, -1.0, 1.1),
            Segment::new(-1.0, 0.0, 0.3),
        ])
        .unwrap();
        let r = run_fig1_scenario(&p, &p, 0.5, &grid()).unwrap();
        assert!((r.a_predicted - r.t1).norm() < 1e-12);
        assert!((r.a_direct - r.t1).norm() < 1e-12);
        assert!(r.b_direct.norm() < 1e-12);
        // |A|² = 1 − |r1|²: the radicand vanishes to rounding; the square root
        // only amplifies that rounding.
        assert!(r.b_radicand.abs() < 1e-14);
        assert!(r.b_modulus_predicted < 1e-7);
    }

    #[test]
    fn fig1_generic_barriers() {
        let p1 = PotentialProfile::new(vec![
            Segment::new(-2.0, -1.2, 0.9),
            Segment::new(-1.2, -0.5, 0.2),
        ])
        .unwrap();
        let p2 = p1
            .with_segment(Segment::new(1.0, 1.8, 1.4))
            .unwrap()
            .with_segment(Segment::new(2.1, 2.4, -0.5))
            .unwrap();
        let r = run_fig1_scenario(&p1, &p2, 0.5, &grid()).unwrap();
        assert!(r.a_alternative_error > 1e-3);
        assert_eq!(r.a_convention, AmplitudeConvention::ConjugatedT1);
        assert!(r.a_error() < 1e-8 && r.b_modulus_error() < 1e-8);
        assert!(r.flux_balance_error.abs() < 1e-8);
        // The field current matches the region-I value k(1 − r1 r2*).
        let literal = r.k * (1.0 - r.r1 * r.r2.conj());
        assert!((r.j12_region_one - literal).norm() < 1e-12);
        assert!((r.j12_region_two - r.j12_region_one).norm() < 1e-12);
    }

    #[test]
    fn fig1_rejects_missing_gap() {
        let p1 = PotentialProfile::barrier(0.0, 1.0, 0.9).unwrap();
        let p2 = p1.with_segment(Segment::new(1.0, 2.0, 0.4)).unwrap();
        assert!(matches!(
            run_fig1_scenario(&p1, &p2, 0.5, &grid()),
            Err(Error::GeometryInvalid(_))
        ));
        let p3 = PotentialProfile::barrier(0.0, 1.0, 0.3).unwrap();
        assert!(matches!(
            run_fig1_scenario(&p1, &p3, 0.5, &grid()),
            Err(Error::GeometryInvalid(_))
        ));
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let g = Grid::new(0.0, 1.0, 3).unwrap();
        let c =
            CurrentSeries::new(g, vec![C64::new(1.0 / 3.0, -0.5); 3], CurrentKind::J12).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,re,im,abs"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[1], "3.3333333333333331e-1");
        assert_eq!(row[1].parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn constancy_report_uses_absolute_floor() {
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let vals = vec![
            C64::new(1e-14, 0.0),
            C64::new(-1e-14, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ];
        let c = CurrentSeries::new(g, vals, CurrentKind::Q).unwrap();
        let rep = c.constancy_everywhere(1e-12);
        assert!(rep.passed);
        assert!(rep.relative_deviation > 1.0);
    }
}
