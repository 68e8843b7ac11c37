//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! Runs with a custom harness so the lines are always printed; the process
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gencont::currents::{
    current_j12, current_q, equality_domain_currents, run_fig1_scenario, AmplitudeConvention,
    ScenarioResult,
};
use gencont::numerics::Grid;
use gencont::potentials::{
    find_difference_domains, find_equality_domains, PotentialProfile, Segment, SymmetryDomain,
    SymmetryTransform,
};
use gencont::stationary::{solve_scattering, Incidence};
use gencont::sun::{build_basis, coefficient_table, commutator_check_in, decompose_in};
use gencont::timedep::{convergence_study, pairwise_residual_suite, Channels, GaussianPacket};
use gencont::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNITARITY_TOL: f64 = 1e-10;
const CONSTANCY_TOL: f64 = 1e-8;
const NON_EQUALITY_MIN_DEVIATION: f64 = 1e-3;
const AMPLITUDE_TOL: f64 = 1e-8;
const TRANSPARENCY_TOL: f64 = 1e-6;
const CONVERGENCE_BAND: (f64, f64) = (3.5, 4.5);
const ALGEBRA_TOL: f64 = 1e-13;
const FREE_TOL: f64 = 1e-12;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{}; {:.2} s", out.detail, elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            out.passed = false;
            out.detail = format!("{} exceeds {} s", out.detail, limit.as_secs());
        }
    }
    out
}

fn random_segments(
    rng: &mut ChaCha8Rng,
    lo: f64,
    hi: f64,
    max_pieces: usize,
    values: (f64, f64),
) -> Vec<Segment> {
    let pieces = rng.random_range(1..=max_pieces);
    let mut cuts: Vec<f64> = (0..=pieces).map(|_| rng.random_range(lo..hi)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts[0] = lo;
    cuts[pieces] = hi;
    let mut segments = Vec::new();
    for w in cuts.windows(2) {
        if w[1] - w[0] < 0.05 {
            continue;
        }
        // Leave occasional gaps between pieces.
        if segments.is_empty() || rng.random_bool(0.8) {
            segments.push(Segment::new(
                w[0],
                w[1],
                rng.random_range(values.0..values.1),
            ));
        }
    }
    if segments.is_empty() {
        segments.push(Segment::new(lo, hi, rng.random_range(values.0..values.1)));
    }
    segments
}

fn unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let grid = Grid::with_spacing(-6.0, 6.0, 1e-2).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = rng.random_range(-5.0..-1.0);
        let b = rng.random_range(1.0..5.0);
        let p = PotentialProfile::new(random_segments(&mut rng, a, b, 6, (-2.0, 4.0))).unwrap();
        for _ in 0..10 {
            let e = rng.random_range(0.05..6.0);
            let s = solve_scattering(&p, e, &grid, Incidence::Left).unwrap();
            worst = worst.max((s.unitarity() - 1.0).abs());
        }
    }
    Outcome::new(
        worst < UNITARITY_TOL,
        format!("max ||r|^2 + |t|^2 - 1| = {worst:.2e} over 1000 solves (< {UNITARITY_TOL:e})"),
    )
}

/// Two landscapes sharing a random block on `[-4, -0.5]` and differing on
/// `[0.5, 4]`.
fn shared_pair(rng: &mut ChaCha8Rng) -> (PotentialProfile, PotentialProfile) {
    let shared = random_segments(rng, -4.0, -0.5, 3, (-1.5, 2.5));
    let a = rng.random_range(0.5..1.5);
    let b = a + rng.random_range(0.4..1.2);
    let u1 = rng.random_range(-1.0..2.0);
    let u2 = u1 + rng.random_range(0.5..1.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let p1 = PotentialProfile::new(shared.clone())
        .unwrap()
        .with_segment(Segment::new(a, b, u1))
        .unwrap();
    let mut p2 = PotentialProfile::new(shared)
        .unwrap()
        .with_segment(Segment::new(a, b, u2))
        .unwrap();
    if rng.random_bool(0.5) {
        let c = b + rng.random_range(0.3..1.0);
        let d = c + rng.random_range(0.3..1.0);
        p2 = p2
            .with_segment(Segment::new(c, d, rng.random_range(-1.0..2.0)))
            .unwrap();
    }
    (p1, p2)
}

struct PairSuite {
    equality_domains: usize,
    worst_j12: f64,
    worst_jchi: f64,
    worst_fit: f64,
    non_equality_failing: usize,
    min_non_equality_deviation: f64,
}

fn pair_suite() -> PairSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let grid = Grid::with_spacing(-6.0, 6.0, 1e-3).unwrap();
    let mut suite = PairSuite {
        equality_domains: 0,
        worst_j12: 0.0,
        worst_jchi: 0.0,
        worst_fit: 0.0,
        non_equality_failing: 0,
        min_non_equality_deviation: f64::INFINITY,
    };
    for _ in 0..50 {
        let (p1, p2) = shared_pair(&mut rng);
        let e = rng.random_range(0.3..3.0);
        let s1 = solve_scattering(&p1, e, &grid, Incidence::Left).unwrap();
        let s2 = solve_scattering(&p2, e, &grid, Incidence::Left).unwrap();
        for d in find_equality_domains(&p1, &p2, grid.x_min(), grid.x_max()) {
            let r = equality_domain_currents(&s1, &s2, d, CONSTANCY_TOL).unwrap();
            suite.equality_domains += 1;
            let worst_j12 = if r.j12.passed {
                r.j12.relative_deviation
            } else {
                f64::INFINITY
            };
            let worst_jchi = if r.jchi.passed {
                r.jchi.relative_deviation
            } else {
                f64::INFINITY
            };
            suite.worst_j12 = suite.worst_j12.max(worst_j12);
            suite.worst_jchi = suite.worst_jchi.max(worst_jchi);
            suite.worst_fit = suite.worst_fit.max(r.fit.residual);
        }
        let j12 = current_j12(&s1, &s2).unwrap();
        let region = find_difference_domains(&p1, &p2, grid.x_min(), grid.x_max())[0];
        let dev = j12
            .constancy(region, CONSTANCY_TOL)
            .unwrap()
            .relative_deviation;
        suite.min_non_equality_deviation = suite.min_non_equality_deviation.min(dev);
        if dev > NON_EQUALITY_MIN_DEVIATION {
            suite.non_equality_failing += 1;
        }
    }
    suite
}

fn j12_constancy(suite: &PairSuite) -> Outcome {
    Outcome::new(
        suite.worst_j12 < CONSTANCY_TOL && suite.non_equality_failing >= 45,
        format!(
            "worst relative deviation {:.2e} on {} equality domains (< {CONSTANCY_TOL:e}); \
             {}/50 non-equality regions deviate > {NON_EQUALITY_MIN_DEVIATION:e} (need 45), smallest {:.2e}",
            suite.worst_j12,
            suite.equality_domains,
            suite.non_equality_failing,
            suite.min_non_equality_deviation
        ),
    )
}

fn jchi_constancy(suite: &PairSuite) -> Outcome {
    Outcome::new(
        suite.worst_jchi < CONSTANCY_TOL && suite.worst_fit < CONSTANCY_TOL,
        format!(
            "worst Jchi relative deviation {:.2e}, worst fit residual {:.2e} on {} domains (< {CONSTANCY_TOL:e})",
            suite.worst_jchi, suite.worst_fit, suite.equality_domains
        ),
    )
}

/// Worst relative deviation of `Q` and `Q̃` on `d`.
fn q_deviation(p: &PotentialProfile, f: SymmetryTransform, d: SymmetryDomain, grid: &Grid) -> f64 {
    let s = solve_scattering(p, 0.7, grid, Incidence::Left).unwrap();
    let q = current_q(&s, f, d).unwrap();
    let a = q.q.constancy(d, CONSTANCY_TOL).unwrap().relative_deviation;
    let b = q
        .q_tilde
        .constancy(d, CONSTANCY_TOL)
        .unwrap()
        .relative_deviation;
    a.max(b)
}

fn invariants() -> Outcome {
    let grid = Grid::with_spacing(-8.0, 8.0, 1e-3).unwrap();
    let bumps = |right: f64, extra: Segment| {
        PotentialProfile::new(vec![
            Segment::new(-2.0, -1.0, 1.0),
            Segment::new(1.0, 2.0, right),
            extra,
        ])
        .unwrap()
    };
    let parity = SymmetryTransform::reflection(0.0);
    let inside = SymmetryDomain::new(-2.5, 2.5).unwrap();
    let beyond = SymmetryDomain::new(-2.5, 3.3).unwrap();
    let tail = Segment::new(3.0, 3.6, 0.7);
    let parity_in = q_deviation(&bumps(1.0, tail), parity, inside, &grid);
    let parity_beyond = q_deviation(&bumps(1.0, tail), parity, beyond, &grid);
    let parity_broken = q_deviation(&bumps(1.2, tail), parity, inside, &grid);

    let pair = |second: f64| {
        PotentialProfile::new(vec![
            Segment::new(-3.0, -2.0, 0.8),
            Segment::new(1.0, 2.0, second),
            Segment::new(4.0, 4.5, -0.6),
        ])
        .unwrap()
    };
    let shift = SymmetryTransform::translation(4.0);
    let cell = SymmetryDomain::new(-3.5, -1.5).unwrap();
    let wide = SymmetryDomain::new(-3.5, 0.3).unwrap();
    let translation_in = q_deviation(&pair(0.8), shift, cell, &grid);
    let translation_beyond = q_deviation(&pair(0.8), shift, wide, &grid);
    let translation_broken = q_deviation(&pair(1.0), shift, cell, &grid);

    let controls = [
        parity_beyond,
        parity_broken,
        translation_beyond,
        translation_broken,
    ];
    let weakest_control = controls.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome::new(
        parity_in < CONSTANCY_TOL && translation_in < CONSTANCY_TOL && weakest_control > CONSTANCY_TOL,
        format!(
            "parity {parity_in:.2e}, translation {translation_in:.2e} inside (< {CONSTANCY_TOL:e}); \
             controls: parity beyond {parity_beyond:.2e}, parity broken {parity_broken:.2e}, \
             translation beyond {translation_beyond:.2e}, translation broken {translation_broken:.2e}"
        ),
    )
}

fn fig1_geometry(rng: &mut ChaCha8Rng) -> (PotentialProfile, PotentialProfile) {
    let p1 = PotentialProfile::new(random_segments(rng, -3.0, 0.0, 3, (-1.0, 2.0))).unwrap();
    let gap = rng.random_range(0.3..1.5);
    let len = rng.random_range(0.5..3.0);
    let mut p2 = p1.clone();
    for s in random_segments(rng, gap, gap + len, 3, (-1.0, 2.0)) {
        p2 = p2.with_segment(s).unwrap();
    }
    (p1, p2)
}

fn fig1_suite() -> Vec<ScenarioResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let grid = Grid::with_spacing(-8.0, 8.0, 1e-2).unwrap();
    let mut out = Vec::new();
    for _ in 0..20 {
        let (p1, p2) = fig1_geometry(&mut rng);
        for _ in 0..5 {
            let e = rng.random_range(0.2..3.0);
            out.push(run_fig1_scenario(&p1, &p2, e, &grid).unwrap());
        }
    }
    out
}

fn fig1_reproduction(results: &[ScenarioResult]) -> Outcome {
    let a = results
        .iter()
        .map(ScenarioResult::a_error)
        .fold(0.0, f64::max);
    let b = results
        .iter()
        .map(ScenarioResult::b_modulus_error)
        .fold(0.0, f64::max);
    let alt = results
        .iter()
        .map(|r| r.a_alternative_error)
        .fold(0.0, f64::max);
    let conjugated = results
        .iter()
        .filter(|r| r.a_convention == AmplitudeConvention::ConjugatedT1)
        .count();
    Outcome::new(
        a < AMPLITUDE_TOL && b < AMPLITUDE_TOL && conjugated == results.len(),
        format!(
            "{} cases: max |A_pred - A_direct| = {a:.2e}, max ||B|_pred - |B_direct|| = {b:.2e} \
             (< {AMPLITUDE_TOL:e}); conjugated-t1 reading selected in {conjugated}, \
             unconjugated reading misses by up to {alt:.2e}",
            results.len()
        ),
    )
}

fn transparency(generic: &[ScenarioResult]) -> Outcome {
    // A barrier of height V0 < E and width π/q, q = √(2(E − V0)), reflects nothing.
    let (e, v0): (f64, f64) = (1.0, 0.5);
    let width = std::f64::consts::PI / (2.0 * (e - v0)).sqrt();
    let p1 = PotentialProfile::new(vec![
        Segment::new(-1.5, -0.5, 0.6),
        Segment::new(-0.5, 0.0, 1.3),
    ])
    .unwrap();
    let p2 = p1.with_segment(Segment::new(1.0, 1.0 + width, v0)).unwrap();
    let grid = Grid::with_spacing(-8.0, 8.0, 1e-2).unwrap();
    let tuned = run_fig1_scenario(&p1, &p2, e, &grid).unwrap();
    let tuned_residual = tuned.transparency_residual.unwrap_or(f64::INFINITY);
    let reported: Vec<f64> = generic
        .iter()
        .filter_map(|r| r.transparency_residual)
        .collect();
    let smallest = reported.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome::new(
        tuned_residual < TRANSPARENCY_TOL && !reported.is_empty() && smallest > 0.0,
        format!(
            "tuned residual {tuned_residual:.2e} (< {TRANSPARENCY_TOL:e}, |r2| = {:.4}); \
             {} generic residuals reported, smallest {smallest:.2e}",
            tuned.r2.norm(),
            reported.len()
        ),
    )
}

fn plateau_landscapes(n: usize) -> Vec<PotentialProfile> {
    [
        (-10.005, 10.005, 0.8),
        (-8.005, 12.005, 0.3),
        (-12.005, 9.005, 1.1),
    ]
    .iter()
    .take(n)
    .map(|&(a, b, v)| PotentialProfile::barrier(a, b, v).unwrap())
    .collect()
}

const PACKET: GaussianPacket = GaussianPacket {
    x0: -1.0,
    k0: 1.5,
    width: 1.0,
};

fn baseline_grid() -> Grid {
    Grid::new(-20.475, 20.475, 4096).unwrap()
}

fn in_band(r: f64) -> bool {
    (CONVERGENCE_BAND.0..=CONVERGENCE_BAND.1).contains(&r)
}

fn ratio_text(ratios: &[f64]) -> String {
    ratios
        .iter()
        .map(|r| format!("{r:.4}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Packet running through the barrier edges; printed for reference only.
fn edge_crossing_note() {
    let potentials = [
        PotentialProfile::barrier(-1.0, 1.0, 0.6).unwrap(),
        PotentialProfile::barrier(0.0, 2.0, 1.0).unwrap(),
    ];
    let packet = GaussianPacket {
        x0: -4.0,
        k0: 2.0,
        width: 1.0,
    };
    let grid = Grid::new(-12.8, 12.8, 1281).unwrap();
    let study = convergence_study(&potentials, packet, &grid, 4e-3, 1.6, 3).unwrap();
    println!(
        "    note: packet crossing the barrier edges gives ratios [{}] (not gated)",
        ratio_text(&study[0].ratios)
    );
}

fn dynamics_convergence() -> Outcome {
    edge_crossing_note();
    let study = convergence_study(
        &plateau_landscapes(2),
        PACKET,
        &baseline_grid(),
        2e-3,
        1.0,
        3,
    )
    .unwrap();
    let ratios = &study[0].ratios;
    Outcome::new(
        ratios.len() == 2 && ratios.iter().all(|&r| in_band(r)),
        format!(
            "4096-point baseline, l2 = [{}], ratios [{}] (band [{}, {}])",
            study[0]
                .l2
                .iter()
                .map(|v| format!("{v:.3e}"))
                .collect::<Vec<_>>()
                .join(", "),
            ratio_text(ratios),
            CONVERGENCE_BAND.0,
            CONVERGENCE_BAND.1
        ),
    )
}

fn random_vectors(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect()
}

fn commutators() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst = 0.0f64;
    let mut checks = 0usize;
    for n in 2..=6 {
        let basis = build_basis(n).unwrap();
        for v in random_vectors(&mut rng, n, 100) {
            for i in 1..=n {
                for j in i + 1..=n {
                    let (e1, e2) = commutator_check_in(&basis, &v, i, j).unwrap();
                    worst = worst.max(e1).max(e2);
                    checks += 1;
                }
            }
        }
    }
    Outcome::new(
        worst < ALGEBRA_TOL,
        format!(
            "max commutator error {worst:.2e} over {checks} pairs, N = 2..6 (< {ALGEBRA_TOL:e})"
        ),
    )
}

fn print_table(values: &[f64]) {
    println!("    coefficient table for V = {values:?}");
    println!(
        "    {:>3} {:>12} {:>12} {:>12} {:>8} {:>8}",
        "k", "projection", "printed", "as average", "printed", "average"
    );
    for row in coefficient_table(values, ALGEBRA_TOL).unwrap() {
        println!(
            "    {:>3} {:>12.6} {:>12.6} {:>12.6} {:>8} {:>8}",
            row.k,
            row.projection,
            row.printed,
            row.printed_as_average,
            row.printed_agrees,
            row.average_agrees
        );
    }
}

fn decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst = 0.0f64;
    for n in 2..=6 {
        let basis = build_basis(n).unwrap();
        for v in random_vectors(&mut rng, n, 1000) {
            worst = worst.max(decompose_in(&basis, &v).unwrap().reconstruction_error);
        }
    }
    print_table(&[0.3, 1.7]);
    print_table(&[0.3, 1.7, -0.4, 2.2]);
    Outcome::new(
        worst < ALGEBRA_TOL,
        format!("max reconstruction error {worst:.2e} over 1000 vectors per N = 2..6 (< {ALGEBRA_TOL:e})"),
    )
}

fn three_channel_suite() -> Outcome {
    let potentials = plateau_landscapes(3);
    let grid = baseline_grid();
    let reports =
        pairwise_residual_suite(&potentials, &PACKET.sample(&grid).unwrap(), 2e-3, 500).unwrap();
    let study = convergence_study(&potentials, PACKET, &grid, 2e-3, 1.0, 3).unwrap();
    let ok = reports.len() == 3
        && study.len() == 3
        && study
            .iter()
            .all(|p| p.ratios.len() == 2 && p.ratios.iter().all(|&r| in_band(r)));
    let detail = study
        .iter()
        .map(|p| format!("({},{}): [{}]", p.i, p.j, ratio_text(&p.ratios)))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome::new(ok, format!("{} reports; ratios {detail}", reports.len()))
}

/// `∂t|ψ|² + ∂x Im(ψ* ∂xψ)` with the same stencils, written out for one field.
fn standard_residual(before: &[C64], after: &[C64], dx: f64, dt: f64) -> Vec<f64> {
    let flux = |psi: &[C64]| -> Vec<f64> {
        let n = psi.len();
        let mut j = vec![0.0; n];
        for i in 1..n - 1 {
            let d = (psi[i + 1] - psi[i - 1]) / (2.0 * dx);
            j[i] = (psi[i].conj() * d).im;
        }
        j
    };
    let (j0, j1) = (flux(before), flux(after));
    let n = before.len();
    (0..n)
        .map(|i| {
            if i < 2 || i + 2 >= n {
                return 0.0;
            }
            let drho = (after[i].norm_sqr() - before[i].norm_sqr()) / dt;
            let div = |j: &[f64]| (j[i + 1] - j[i - 1]) / (2.0 * dx);
            drho + 0.5 * (div(&j0) + div(&j1))
        })
        .collect()
}

fn degenerations() -> Outcome {
    let free = PotentialProfile::empty();
    let grid = Grid::with_spacing(-5.0, 5.0, 1e-2).unwrap();
    let mut free_err = 0.0f64;
    for e in [0.01, 0.3, 1.0, 4.5, 20.0] {
        for inc in [Incidence::Left, Incidence::Right] {
            let s = solve_scattering(&free, e, &grid, inc).unwrap();
            free_err = free_err
                .max(s.r().norm())
                .max((s.t() - C64::new(1.0, 0.0)).norm());
        }
    }

    let bumps = PotentialProfile::new(vec![
        Segment::new(-2.0, -1.0, 1.0),
        Segment::new(0.5, 2.0, -0.4),
    ])
    .unwrap();
    let s = solve_scattering(&bumps, 0.9, &grid, Incidence::Left).unwrap();
    let whole = SymmetryDomain::new(-4.0, 4.0).unwrap();
    let q = current_q(&s, SymmetryTransform::identity(), whole).unwrap();
    let q_zero = q.q.values().iter().all(|z| *z == C64::new(0.0, 0.0));

    let barrier = PotentialProfile::barrier(-1.0, 1.0, 0.6).unwrap();
    let evo_grid = Grid::new(-12.8, 12.8, 2049).unwrap();
    let dt = 2e-3;
    let mut ch = Channels::new(
        &[barrier.clone(), barrier],
        &PACKET.sample(&evo_grid).unwrap(),
        dt,
    )
    .unwrap();
    ch.advance(99).unwrap();
    let before = ch.states()[0].field().values().to_vec();
    let pair = ch.step_with_residuals().unwrap().remove(0);
    let after = ch.states()[0].field().values();
    let reference = standard_residual(&before, after, evo_grid.dx(), dt);
    let scale = reference
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()))
        .max(1e-300);
    let mismatch = pair
        .report
        .residual_field
        .iter()
        .zip(&reference)
        .map(|(r, s)| (r - s).norm())
        .fold(0.0, f64::max)
        / scale;
    let channels_agree = ch.states()[0].field().values() == ch.states()[1].field().values();
    let continuity_ok = channels_agree && mismatch < 1e-10 && pair.report.im_part_norm == 0.0;

    Outcome::new(
        free_err < FREE_TOL && q_zero && continuity_ok,
        format!(
            "free |r|, |t - 1| <= {free_err:.2e} (< {FREE_TOL:e}); Q identically zero: {q_zero}; \
             equal channels reproduce the single-field continuity residual to {mismatch:.2e} relative, \
             imaginary part {:.1e}",
            pair.report.im_part_norm
        ),
    )
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut record = |name, outcome: Outcome| {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", outcome.detail);
        results.push((name, outcome));
    };

    record("1 unitarity", timed(secs(5), unitarity));

    let start = Instant::now();
    let suite = pair_suite();
    let suite_time = start.elapsed();
    let mut j12 = j12_constancy(&suite);
    j12.detail = format!("{}; {:.2} s", j12.detail, suite_time.as_secs_f64());
    if suite_time > Duration::from_secs(10) {
        j12.passed = false;
        j12.detail.push_str(" exceeds 10 s");
    }
    record("2 two-field current constancy", j12);
    record("3 sub-domain Wronskian constancy", jchi_constancy(&suite));

    record("4 non-local invariants", timed(None, invariants));

    let start = Instant::now();
    let fig1 = fig1_suite();
    let fig1_time = start.elapsed();
    let mut repro = fig1_reproduction(&fig1);
    repro.detail = format!("{}; {:.2} s", repro.detail, fig1_time.as_secs_f64());
    if fig1_time > Duration::from_secs(10) {
        repro.passed = false;
        repro.detail.push_str(" exceeds 10 s");
    }
    record("5 region-II amplitude reconstruction", repro);
    record(
        "6 transparency condition",
        timed(None, || transparency(&fig1)),
    );

    record(
        "7 continuity residual convergence",
        timed(secs(60), dynamics_convergence),
    );
    record("8 SU(N) commutators", timed(secs(5), commutators));
    record("9 Cartan decomposition", timed(None, decomposition));
    record(
        "10 three-landscape residual suite",
        timed(None, three_channel_suite),
    );
    record("11 degenerations", timed(None, degenerations));

    let failed = results.iter().filter(|(_, o)| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
