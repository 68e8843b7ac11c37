//! JSON scenario files: parsing with full validation, dispatch to the
//! computations, and CSV / JSON output.
//!
//! A scenario is one JSON object. Every field except `kind` is optional at the
//! syntax level; which ones are required depends on the kind:
//!
//! | kind             | potentials | also required                    |
//! |------------------|------------|----------------------------------|
//! | `scatter`        | ≥ 1        | `energy`                         |
//! | `currents`       | 2          | `energy`                         |
//! | `local-symmetry` | 1          | `energy`, `transform`, `domain`  |
//! | `evolve`         | ≥ 2        | `evolve`                         |
//! | `sun-check`      | none       | `sun`                            |
//! | `fig1`           | 2          | `energy`                         |
//!
//! When `grid` is omitted, or only partly given, the missing bounds pad the
//! union of all potential supports (and any packet, domain and image) by
//! [`DEFAULT_PADDING`], and the spacing defaults to [`DEFAULT_DX`].

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::cjson::fmt_real;
use crate::currents::{
    current_j12, current_q, equality_domain_currents, region_two, run_fig1_scenario,
    ConstancyReport, EqualityDomainCurrents, ScenarioResult, DEFAULT_CONSTANCY_TOL,
};
use crate::numerics::Grid;
use crate::potentials::{
    find_difference_domains, find_equality_domains, PotentialProfile, SymmetryDomain,
    SymmetryTransform,
};
use crate::stationary::{solve_scattering, Incidence};
use crate::sun::{
    build_basis, coefficient_table, commutator_check_in, decompose_in, CoefficientRow,
};
use crate::timedep::{convergence_study, Channels, GaussianPacket, PairConvergence, PairResidual};
use crate::{cjson, Error, C64};

pub const DEFAULT_PADDING: f64 = 10.0;
pub const DEFAULT_DX: f64 = 1e-3;
/// Random potential vectors drawn by `sun-check` when none are listed.
pub const DEFAULT_SUN_SAMPLES: usize = 100;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Scatter,
    Currents,
    LocalSymmetry,
    Evolve,
    SunCheck,
    Fig1,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Scatter => "scatter",
            Self::Currents => "currents",
            Self::LocalSymmetry => "local-symmetry",
            Self::Evolve => "evolve",
            Self::SunCheck => "sun-check",
            Self::Fig1 => "fig1",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Pass/fail thresholds. `--tol` on the command line replaces the primary
/// one of the scenario's kind (see [`Tolerances::override_primary`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// `| |r|² + |t|² − 1 |`.
    pub unitarity: f64,
    /// Relative deviation of a current from its mean.
    pub constancy: f64,
    /// Max mismatch of `Φ2 = c1 Φ1 + c2 χ2`.
    pub fit: f64,
    /// Predicted versus direct `A` and `|B|`.
    pub amplitude: f64,
    pub commutator: f64,
    pub reconstruction: f64,
    /// Accumulated relative norm drift of an evolved field.
    pub norm_drift: f64,
    /// Accepted range of residual ratios under `(dx, dt)` halving.
    pub convergence_band: [f64; 2],
    /// Optional bound on the last residual l2 norm of every pair.
    pub residual_max: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-10,
            constancy: DEFAULT_CONSTANCY_TOL,
            fit: 1e-8,
            amplitude: 1e-8,
            commutator: 1e-13,
            reconstruction: 1e-13,
            norm_drift: 1e-10,
            convergence_band: [3.5, 4.5],
            residual_max: None,
        }
    }
}

impl Tolerances {
    /// scatter: unitarity; currents: constancy and fit; local-symmetry:
    /// constancy; evolve: residual bound; sun-check: commutator and
    /// reconstruction; fig1: amplitude.
    pub fn override_primary(&mut self, kind: ScenarioKind, tol: f64) {
        match kind {
            ScenarioKind::Scatter => self.unitarity = tol,
            ScenarioKind::Currents => {
                self.constancy = tol;
                self.fit = tol;
            }
            ScenarioKind::LocalSymmetry => self.constancy = tol,
            ScenarioKind::Evolve => self.residual_max = Some(tol),
            ScenarioKind::SunCheck => {
                self.commutator = tol;
                self.reconstruction = tol;
            }
            ScenarioKind::Fig1 => self.amplitude = tol,
        }
    }

    fn validate(&self, errors: &mut Vec<ValidationError>) {
        let scalars = [
            ("unitarity", self.unitarity),
            ("constancy", self.constancy),
            ("fit", self.fit),
            ("amplitude", self.amplitude),
            ("commutator", self.commutator),
            ("reconstruction", self.reconstruction),
            ("norm_drift", self.norm_drift),
        ];
        for (name, v) in scalars {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(ValidationError::new(
                    format!("tolerances.{name}"),
                    format!("must be positive, got {v}"),
                ));
            }
        }
        if let Some(v) = self.residual_max {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(ValidationError::new(
                    "tolerances.residual_max",
                    format!("must be positive, got {v}"),
                ));
            }
        }
        let [lo, hi] = self.convergence_band;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            errors.push(ValidationError::new(
                "tolerances.convergence_band",
                format!("need 0 < lo < hi, got [{lo}, {hi}]"),
            ));
        }
    }
}

/// Grid bounds and spacing as written in a scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub dx: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSpec {
    pub packet: GaussianPacket,
    pub dt: f64,
    pub steps: usize,
    /// Residual rows are written every this many steps (and at the end).
    #[serde(default)]
    pub sample_every: Option<usize>,
    /// Number of `(dx, dt)` levels for the convergence study; none to skip.
    #[serde(default)]
    pub convergence_levels: Option<u32>,
}

impl EvolveSpec {
    pub fn sample_every(&self) -> usize {
        self.sample_every.unwrap_or((self.steps / 100).max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSun {
    n: usize,
    #[serde(default)]
    values: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    random_samples: Option<usize>,
    #[serde(default)]
    seed: u64,
}

/// Resolved `sun-check` input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SunSpec {
    pub n: usize,
    /// Every `(i, j)` with `1 ≤ i < j ≤ n`.
    pub pairs: Vec<(usize, usize)>,
    /// Potential vectors, listed or drawn uniformly from `[−5, 5)`.
    pub vectors: Vec<Vec<f64>>,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub potentials: Vec<PotentialProfile>,
    pub energy: Option<f64>,
    pub incidence: Incidence,
    pub grid: Grid,
    pub transform: Option<SymmetryTransform>,
    pub domain: Option<SymmetryDomain>,
    pub evolve: Option<EvolveSpec>,
    pub sun: Option<SunSpec>,
    pub tolerances: Tolerances,
    /// Output directory named in the file, if any.
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    /// Dotted path of the offending field, e.g. `potentials[1].segments`.
    pub path: String,
    pub message: String,
}

impl ValidationError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    /// Not JSON, or not a JSON object.
    Malformed(String),
    /// Every semantic problem found.
    Invalid(Vec<ValidationError>),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Malformed(m) => write!(f, "malformed scenario: {m}"),
            Self::Invalid(errs) => {
                write!(
                    f,
                    "invalid scenario ({} problem{}):",
                    errs.len(),
                    if errs.len() == 1 { "" } else { "s" }
                )?;
                for e in errs {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ScenarioError {}

const KNOWN_FIELDS: [&str; 11] = [
    "kind",
    "potentials",
    "energy",
    "incidence",
    "grid",
    "transform",
    "domain",
    "evolve",
    "sun",
    "tolerances",
    "output",
];

/// Pulls typed fields out of the scenario object, recording failures.
struct Fields {
    map: Map<String, Value>,
    errors: Vec<ValidationError>,
}

impl Fields {
    fn take<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        let v = self.map.remove(key)?;
        self.convert(key, v)
    }

    fn convert<T: DeserializeOwned>(&mut self, path: &str, v: Value) -> Option<T> {
        match serde_json::from_value(v) {
            Ok(t) => Some(t),
            Err(e) => {
                self.errors.push(ValidationError::new(path, e.to_string()));
                None
            }
        }
    }

    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ValidationError::new(path, message));
    }
}

/// Parses a scenario whose `kind` is given in the file.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    parse_scenario_as(text, None)
}

/// Parses a scenario; `kind` (from a subcommand) fills in or must agree with
/// the file's own `kind`.
pub fn parse_scenario_as(
    text: &str,
    kind: Option<ScenarioKind>,
) -> Result<Scenario, ScenarioError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ScenarioError::Malformed(e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(ScenarioError::Malformed(
            "top level must be a JSON object".into(),
        ));
    };
    let mut f = Fields {
        map,
        errors: Vec::new(),
    };

    let unknown: Vec<String> = f
        .map
        .keys()
        .filter(|k| !KNOWN_FIELDS.contains(&k.as_str()))
        .cloned()
        .collect();
    for k in unknown {
        f.error(k, "unknown field");
    }

    let file_kind: Option<ScenarioKind> = f.take("kind");
    let kind = match (kind, file_kind) {
        (Some(a), Some(b)) if a != b => {
            f.error("kind", format!("file says `{b}` but `{a}` was requested"));
            Some(a)
        }
        (Some(a), _) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => {
            if !f.errors.iter().any(|e| e.path == "kind") {
                f.error("kind", "missing");
            }
            None
        }
    };

    let potentials: Vec<PotentialProfile> = match f.map.remove("potentials") {
        None => Vec::new(),
        Some(Value::Array(items)) => items
            .into_iter()
            .enumerate()
            .filter_map(|(i, v)| f.convert(&format!("potentials[{i}]"), v))
            .collect(),
        Some(_) => {
            f.error("potentials", "must be an array of profiles");
            Vec::new()
        }
    };
    let energy: Option<f64> = f.take("energy");
    let incidence: Incidence = f.take("incidence").unwrap_or_default();
    let grid_spec: GridSpec = f.take("grid").unwrap_or_default();
    let transform: Option<SymmetryTransform> = f.take("transform");
    let domain: Option<SymmetryDomain> = f.take("domain");
    let evolve: Option<EvolveSpec> = f.take("evolve");
    let raw_sun: Option<RawSun> = f.take("sun");
    let tolerances: Tolerances = f.take("tolerances").unwrap_or_default();
    let output: Option<PathBuf> = f.take("output");
    tolerances.validate(&mut f.errors);

    let Some(kind) = kind else {
        return Err(ScenarioError::Invalid(f.errors));
    };

    if let Some(e) = energy {
        if !(e > 0.0 && e.is_finite()) {
            f.error("energy", format!("must be positive, got {e}"));
        }
    }
    let need_energy = matches!(
        kind,
        ScenarioKind::Scatter
            | ScenarioKind::Currents
            | ScenarioKind::LocalSymmetry
            | ScenarioKind::Fig1
    );
    if need_energy && energy.is_none() && !f.errors.iter().any(|e| e.path == "energy") {
        f.error("energy", format!("required for `{kind}`"));
    }
    let count_ok = match kind {
        ScenarioKind::Scatter => !potentials.is_empty(),
        ScenarioKind::Currents | ScenarioKind::Fig1 => potentials.len() == 2,
        ScenarioKind::LocalSymmetry => potentials.len() == 1,
        ScenarioKind::Evolve => potentials.len() >= 2,
        ScenarioKind::SunCheck => true,
    };
    if !count_ok && !f.errors.iter().any(|e| e.path.starts_with("potentials")) {
        let want = match kind {
            ScenarioKind::Scatter => "at least one profile",
            ScenarioKind::Currents | ScenarioKind::Fig1 => "exactly two profiles",
            ScenarioKind::LocalSymmetry => "exactly one profile",
            _ => "at least two profiles",
        };
        f.error(
            "potentials",
            format!("`{kind}` needs {want}, got {}", potentials.len()),
        );
    }

    if kind == ScenarioKind::LocalSymmetry {
        if transform.is_none() && !f.errors.iter().any(|e| e.path == "transform") {
            f.error("transform", "required for `local-symmetry`");
        }
        if domain.is_none() && !f.errors.iter().any(|e| e.path == "domain") {
            f.error("domain", "required for `local-symmetry`");
        }
    }

    if kind == ScenarioKind::Evolve {
        match &evolve {
            None => {
                if !f.errors.iter().any(|e| e.path == "evolve") {
                    f.error("evolve", "required for `evolve`");
                }
            }
            Some(spec) => validate_evolve(spec, &mut f.errors),
        }
    }

    let sun = match (kind, raw_sun) {
        (ScenarioKind::SunCheck, Some(raw)) => resolve_sun(raw, &mut f.errors),
        (ScenarioKind::SunCheck, None) => {
            if !f.errors.iter().any(|e| e.path == "sun") {
                f.error("sun", "required for `sun-check`");
            }
            None
        }
        _ => None,
    };

    let grid = resolve_grid(
        grid_spec,
        &potentials,
        transform.zip(domain),
        evolve.map(|e| e.packet),
        &mut f.errors,
    );

    if let Some(grid) = grid {
        if kind == ScenarioKind::Fig1 && potentials.len() == 2 {
            if let Err(e) = region_two(&potentials[0], &potentials[1], &grid) {
                f.error("potentials", e.to_string());
            }
        }
        if let (ScenarioKind::LocalSymmetry, Some(t), Some(d)) = (kind, transform, domain) {
            validate_images(&grid, t, d, &mut f.errors);
        }
        if let (ScenarioKind::Evolve, Some(spec)) = (kind, evolve) {
            if let Err(e) = spec.packet.sample(&grid) {
                f.error("evolve.packet", e.to_string());
            }
        }
    }

    match (f.errors.is_empty(), grid) {
        (true, Some(grid)) => Ok(Scenario {
            kind,
            potentials,
            energy,
            incidence,
            grid,
            transform,
            domain,
            evolve,
            sun,
            tolerances,
            output,
        }),
        _ => Err(ScenarioError::Invalid(f.errors)),
    }
}

fn validate_evolve(spec: &EvolveSpec, errors: &mut Vec<ValidationError>) {
    if !(spec.dt > 0.0 && spec.dt.is_finite()) {
        errors.push(ValidationError::new(
            "evolve.dt",
            format!("must be positive, got {}", spec.dt),
        ));
    }
    if spec.steps == 0 {
        errors.push(ValidationError::new("evolve.steps", "must be at least 1"));
    }
    if spec.sample_every == Some(0) {
        errors.push(ValidationError::new(
            "evolve.sample_every",
            "must be at least 1",
        ));
    }
    if let Some(l) = spec.convergence_levels {
        if l < 2 {
            errors.push(ValidationError::new(
                "evolve.convergence_levels",
                format!("need at least 2 levels for a ratio, got {l}"),
            ));
        }
    }
    let p = spec.packet;
    if !(p.width > 0.0 && p.width.is_finite()) {
        errors.push(ValidationError::new(
            "evolve.packet.width",
            format!("must be positive, got {}", p.width),
        ));
    }
}

fn resolve_sun(raw: RawSun, errors: &mut Vec<ValidationError>) -> Option<SunSpec> {
    let before = errors.len();
    if raw.n < 2 {
        errors.push(ValidationError::new(
            "sun.n",
            format!("need n >= 2, got {}", raw.n),
        ));
    }
    if raw.values.is_some() && raw.random_samples.is_some() {
        errors.push(ValidationError::new(
            "sun",
            "give either `values` or `random_samples`, not both",
        ));
    }
    if let Some(vs) = &raw.values {
        if vs.is_empty() {
            errors.push(ValidationError::new("sun.values", "must not be empty"));
        }
        for (i, v) in vs.iter().enumerate() {
            if v.len() != raw.n {
                errors.push(ValidationError::new(
                    format!("sun.values[{i}]"),
                    format!("has {} entries, expected n = {}", v.len(), raw.n),
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                errors.push(ValidationError::new(
                    format!("sun.values[{i}]"),
                    "non-finite entry",
                ));
            }
        }
    }
    if raw.random_samples == Some(0) {
        errors.push(ValidationError::new(
            "sun.random_samples",
            "must be at least 1",
        ));
    }
    if errors.len() > before {
        return None;
    }
    let n = raw.n;
    let pairs = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let vectors = raw.values.unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(raw.seed);
        (0..raw.random_samples.unwrap_or(DEFAULT_SUN_SAMPLES))
            .map(|_| (0..n).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect()
    });
    Some(SunSpec { n, pairs, vectors })
}

fn resolve_grid(
    spec: GridSpec,
    potentials: &[PotentialProfile],
    symmetry: Option<(SymmetryTransform, SymmetryDomain)>,
    packet: Option<GaussianPacket>,
    errors: &mut Vec<ValidationError>,
) -> Option<Grid> {
    let dx = spec.dx.unwrap_or(DEFAULT_DX);
    if !(dx > 0.0 && dx.is_finite()) {
        errors.push(ValidationError::new(
            "grid.dx",
            format!("must be positive, got {dx}"),
        ));
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut cover = |a: f64, b: f64| {
        lo = lo.min(a);
        hi = hi.max(b);
    };
    for p in potentials {
        if let Some((a, b)) = p.support() {
            cover(a, b);
        }
    }
    if let Some((t, d)) = symmetry {
        let img = d.image(t);
        cover(d.a(), d.b());
        cover(img.a(), img.b());
    }
    if let Some(p) = packet {
        cover(p.x0, p.x0);
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 0.0);
    }
    let mut x_min = spec.x_min.unwrap_or(lo - DEFAULT_PADDING);
    let x_max = spec.x_max.unwrap_or(hi + DEFAULT_PADDING);
    // A reflection maps nodes to nodes only on a grid symmetric about its
    // fixed point; shift a defaulted lower bound onto that lattice.
    if let (None, Some((t, _))) = (spec.x_min, symmetry) {
        if t.sigma() < 0.0 {
            let centre = 0.5 * t.rho();
            x_min = centre - ((centre - x_min) / dx).ceil() * dx;
        }
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
        errors.push(ValidationError::new(
            "grid",
            format!("need x_min < x_max, got [{x_min}, {x_max}]"),
        ));
        return None;
    }
    match Grid::with_spacing(x_min, x_max, dx) {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push(ValidationError::new("grid", e.to_string()));
            None
        }
    }
}

fn validate_images(
    grid: &Grid,
    t: SymmetryTransform,
    d: SymmetryDomain,
    errors: &mut Vec<ValidationError>,
) {
    let img = d.image(t);
    if !(grid.contains(d.a()) && grid.contains(d.b())) {
        errors.push(ValidationError::new(
            "domain",
            "domain extends beyond the grid",
        ));
        return;
    }
    if !(grid.contains(img.a()) && grid.contains(img.b())) {
        errors.push(ValidationError::new(
            "transform",
            format!(
                "image [{}, {}] of the domain leaves the grid",
                img.a(),
                img.b()
            ),
        ));
        return;
    }
    if let Some((lo, _)) = grid.index_range(d.a(), d.b()) {
        if grid.index_of(t.apply(grid.point(lo))).is_none() {
            errors.push(ValidationError::new(
                "transform",
                "F does not carry grid points onto grid points; choose rho (and the grid) on the dx lattice",
            ));
        }
    }
}

/// One pass/fail gate of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    fn flag(name: impl Into<String>, passed: bool, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed,
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub kind: ScenarioKind,
    pub checks: Vec<Check>,
    pub outputs: Vec<PathBuf>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    kind: ScenarioKind,
    passed: bool,
    checks: &'a [Check],
    result: T,
}

struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl Outputs<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn io(path: &Path, e: std::io::Error) -> Error {
        Error::Io {
            path: path.to_path_buf(),
            source: e,
        }
    }

    fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
    ) -> crate::Result<()> {
        let path = self.path(name);
        let file = File::create(&path).map_err(|e| Self::io(&path, e))?;
        let mut w = BufWriter::new(file);
        write(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Self::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(
        &mut self,
        name: &str,
        kind: ScenarioKind,
        checks: &[Check],
        result: T,
    ) -> crate::Result<()> {
        let env = Envelope {
            kind,
            passed: checks.iter().all(|c| c.passed),
            checks,
            result,
        };
        let mut text = serde_json::to_string_pretty(&env)
            .map_err(|e| Error::InvalidArgument(format!("serialising {name}: {e}")))?;
        text.push('\n');
        let path = self.path(name);
        fs::write(&path, text).map_err(|e| Self::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

/// Runs a validated scenario, writing its outputs into `out_dir` (created if
/// needed). Failed checks are reported in the returned [`RunReport`]; errors
/// are reserved for I/O and computational failures.
pub fn run(scenario: &Scenario, out_dir: &Path) -> crate::Result<RunReport> {
    fs::create_dir_all(out_dir).map_err(|e| Outputs::io(out_dir, e))?;
    let mut out = Outputs {
        dir: out_dir,
        written: Vec::new(),
    };
    let checks = match scenario.kind {
        ScenarioKind::Scatter => run_scatter(scenario, &mut out)?,
        ScenarioKind::Currents => run_currents(scenario, &mut out)?,
        ScenarioKind::LocalSymmetry => run_local_symmetry(scenario, &mut out)?,
        ScenarioKind::Evolve => run_evolve(scenario, &mut out)?,
        ScenarioKind::SunCheck => run_sun(scenario, &mut out)?,
        ScenarioKind::Fig1 => run_fig1(scenario, &mut out)?,
    };
    Ok(RunReport {
        kind: scenario.kind,
        checks,
        outputs: out.written,
    })
}

/// [`run`] reduced to the process exit code.
pub fn run_exit_code(scenario: &Scenario, out_dir: &Path) -> i32 {
    match run(scenario, out_dir) {
        Ok(r) => r.exit_code(),
        Err(_) => EXIT_INVALID,
    }
}

fn energy(s: &Scenario) -> f64 {
    s.energy.expect("validated")
}

#[derive(Serialize)]
struct ScatterRow {
    index: usize,
    #[serde(with = "cjson")]
    r: C64,
    #[serde(with = "cjson")]
    t: C64,
    unitarity_error: f64,
}

#[derive(Serialize)]
struct ScatterResult {
    energy: f64,
    k: f64,
    incidence: Incidence,
    profiles: Vec<ScatterRow>,
}

fn run_scatter(s: &Scenario, out: &mut Outputs) -> crate::Result<Vec<Check>> {
    let e = energy(s);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (i, p) in s.potentials.iter().enumerate() {
        let sol = solve_scattering(p, e, &s.grid, s.incidence)?;
        let err = (sol.unitarity() - 1.0).abs();
        checks.push(Check::at_most(
            format!("unitarity[{i}]"),
            err,
            s.tolerances.unitarity,
        ));
        out.csv(&format!("wave_{i}.csv"), |w| write_field(w, &sol))?;
        rows.push(ScatterRow {
            index: i,
            r: sol.r(),
            t: sol.t(),
            unitarity_error: err,
        });
    }
    let result = ScatterResult {
        energy: e,
        k: (2.0 * e).sqrt(),
        incidence: s.incidence,
        profiles: rows,
    };
    out.json("scatter.json", s.kind, &checks, result)?;
    Ok(checks)
}

fn write_field(
    w: &mut dyn Write,
    sol: &crate::stationary::ScatteringSolution,
) -> std::io::Result<()> {
    writeln!(w, "x,re,im,abs,d_re,d_im")?;
    for (x, (v, d)) in sol.grid().points().zip(
        sol.field()
            .values()
            .iter()
            .zip(sol.derivative_field().values()),
    ) {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_real(x),
            fmt_real(v.re),
            fmt_real(v.im),
            fmt_real(v.norm()),
            fmt_real(d.re),
            fmt_real(d.im)
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CurrentsResult {
    energy: f64,
    equality_domains: Vec<EqualityDomainCurrents>,
    /// J12 on the regions where the landscapes differ; not expected to be
    /// constant.
    difference_domains: Vec<ConstancyReport>,
}

fn run_currents(s: &Scenario, out: &mut Outputs) -> crate::Result<Vec<Check>> {
    let e = energy(s);
    let (p1, p2) = (&s.potentials[0], &s.potentials[1]);
    let s1 = solve_scattering(p1, e, &s.grid, s.incidence)?;
    let s2 = solve_scattering(p2, e, &s.grid, s.incidence)?;
    let j12 = current_j12(&s1, &s2)?;
    out.csv("j12.csv", |w| j12.write_csv(w))?;
    let (x_min, x_max) = (s.grid.x_min(), s.grid.x_max());
    let tol = s.tolerances;
    let mut checks = Vec::new();
    let mut equality = Vec::new();
    for (n, d) in find_equality_domains(p1, p2, x_min, x_max)
        .into_iter()
        .enumerate()
    {
        let r = equality_domain_currents(&s1, &s2, d, tol.constancy)?;
        checks.push(Check::flag(
            format!("j12_constant[{n}]"),
            r.j12.passed,
            r.j12.relative_deviation,
            tol.constancy,
        ));
        checks.push(Check::flag(
            format!("jchi_constant[{n}]"),
            r.jchi.passed,
            r.jchi.relative_deviation,
            tol.constancy,
        ));
        checks.push(Check::at_most(
            format!("fit_residual[{n}]"),
            r.fit.residual,
            tol.fit,
        ));
        equality.push(r);
    }
    let difference = find_difference_domains(p1, p2, x_min, x_max)
        .into_iter()
        .map(|d| j12.constancy(d, tol.constancy))
        .collect::<crate::Result<Vec<_>>>()?;
    out.json(
        "currents.json",
        s.kind,
        &checks,
        CurrentsResult {
            energy: e,
            equality_domains: equality,
            difference_domains: difference,
        },
    )?;
    Ok(checks)
}

#[derive(Serialize)]
struct LocalSymmetryResult {
    energy: f64,
    transform: SymmetryTransform,
    domain: SymmetryDomain,
    symmetry_holds: bool,
    q: ConstancyReport,
    q_tilde: ConstancyReport,
}

fn run_local_symmetry(s: &Scenario, out: &mut Outputs) -> crate::Result<Vec<Check>> {
    let e = energy(s);
    let (t, d) = (
        s.transform.expect("validated"),
        s.domain.expect("validated"),
    );
    let sol = solve_scattering(&s.potentials[0], e, &s.grid, s.incidence)?;
    let nl = current_q(&sol, t, d)?;
    out.csv("q.csv", |w| nl.q.write_csv(w))?;
    out.csv("q_tilde.csv", |w| nl.q_tilde.write_csv(w))?;
    let tol = s.tolerances.constancy;
    let q = nl.q.constancy(d, tol)?;
    let q_tilde = nl.q_tilde.constancy(d, tol)?;
    // Constancy is only promised where the landscape is locally symmetric.
    let checks = if nl.symmetry_holds {
        vec![
            Check::flag("q_constant", q.passed, q.relative_deviation, tol),
            Check::flag(
                "q_tilde_constant",
                q_tilde.passed,
                q_tilde.relative_deviation,
                tol,
            ),
        ]
    } else {
        Vec::new()
    };
    out.json(
        "local_symmetry.json",
        s.kind,
        &checks,
        LocalSymmetryResult {
            energy: e,
            transform: t,
            domain: d,
            symmetry_holds: nl.symmetry_holds,
            q,
            q_tilde,
        },
    )?;
    Ok(checks)
}

#[derive(Serialize)]
struct EvolveResult {
    packet: GaussianPacket,
    dt: f64,
    steps: usize,
    dx: f64,
    points: usize,
    norm_drift: Vec<f64>,
    final_residuals: Vec<PairResidual>,
    convergence: Option<Vec<PairConvergence>>,
}

fn write_residual_rows(w: &mut dyn Write, rows: &[PairResidual]) -> std::io::Result<()> {
    writeln!(w, "t,i,j,l2,linf,re_part,im_part")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_real(r.t),
            r.i,
            r.j,
            fmt_real(r.report.l2_norm),
            fmt_real(r.report.linf_norm),
            fmt_real(r.report.re_part_norm),
            fmt_real(r.report.im_part_norm)
        )?;
    }
    Ok(())
}

fn run_evolve(s: &Scenario, out: &mut Outputs) -> crate::Result<Vec<Check>> {
    let spec = s.evolve.expect("validated");
    let initial = spec.packet.sample(&s.grid)?;
    let mut ch = Channels::new(&s.potentials, &initial, spec.dt)?;
    let n0: Vec<f64> = ch.states().iter().map(|st| st.norm_sqr()).collect();
    let every = spec.sample_every();
    let mut rows = Vec::new();
    let mut last = Vec::new();
    let mut done = 0;
    while done < spec.steps {
        let chunk = every.min(spec.steps - done);
        ch.advance(chunk - 1)?;
        last = ch.step_with_residuals()?;
        rows.extend(last.iter().cloned());
        done += chunk;
    }
    out.csv("residuals.csv", |w| write_residual_rows(w, &rows))?;

    let tol = s.tolerances;
    let norm_drift: Vec<f64> = ch
        .states()
        .iter()
        .zip(&n0)
        .map(|(st, n0)| (st.norm_sqr() - n0).abs() / n0)
        .collect();
    let mut checks: Vec<Check> = norm_drift
        .iter()
        .enumerate()
        .map(|(c, &d)| Check::at_most(format!("norm_drift[{}]", c + 1), d, tol.norm_drift))
        .collect();
    if let Some(max) = tol.residual_max {
        for r in &last {
            checks.push(Check::at_most(
                format!("residual_l2[{},{}]", r.i, r.j),
                r.report.l2_norm,
                max,
            ));
        }
    }
    let convergence = match spec.convergence_levels {
        Some(levels) => {
            let t_final = spec.steps as f64 * spec.dt;
            let study = convergence_study(
                &s.potentials,
                spec.packet,
                &s.grid,
                spec.dt,
                t_final,
                levels,
            )?;
            let [lo, hi] = tol.convergence_band;
            for pc in &study {
                for (m, &ratio) in pc.ratios.iter().enumerate() {
                    checks.push(Check::flag(
                        format!("convergence_ratio[{},{}][{m}]", pc.i, pc.j),
                        (lo..=hi).contains(&ratio),
                        ratio,
                        hi,
                    ));
                }
            }
            Some(study)
        }
        None => None,
    };
    out.json(
        "evolve.json",
        s.kind,
        &checks,
        EvolveResult {
            packet: spec.packet,
            dt: spec.dt,
            steps: spec.steps,
            dx: s.grid.dx(),
            points: s.grid.len(),
            norm_drift,
            final_residuals: last,
            convergence,
        },
    )?;
    Ok(checks)
}

#[derive(Serialize)]
struct PairErrors {
    i: usize,
    j: usize,
    max_err1: f64,
    max_err2: f64,
}

#[derive(Serialize)]
struct SunResult {
    n: usize,
    pair_count: usize,
    vectors: usize,
    max_reconstruction_error: f64,
    pairs: Vec<PairErrors>,
    /// Projection coefficients of the first vector next to the literal and
    /// averaged sum formulas.
    coefficient_table: Vec<CoefficientRow>,
    /// The same table for `(V1, V2) = (first two entries)` at `N = 2`.
    coefficient_table_su2: Vec<CoefficientRow>,
}

fn run_sun(s: &Scenario, out: &mut Outputs) -> crate::Result<Vec<Check>> {
    let spec = s.sun.as_ref().expect("validated");
    let tol = s.tolerances;
    let basis = build_basis(spec.n)?;
    let mut max_rec = 0.0f64;
    let mut pairs: Vec<PairErrors> = spec
        .pairs
        .iter()
        .map(|&(i, j)| PairErrors {
            i,
            j,
            max_err1: 0.0,
            max_err2: 0.0,
        })
        .collect();
    for v in &spec.vectors {
        max_rec = max_rec.max(decompose_in(&basis, v)?.reconstruction_error);
        for p in &mut pairs {
            let (e1, e2) = commutator_check_in(&basis, v, p.i, p.j)?;
            p.max_err1 = p.max_err1.max(e1);
            p.max_err2 = p.max_err2.max(e2);
        }
    }
    let max_comm = pairs
        .iter()
        .map(|p| p.max_err1.max(p.max_err2))
        .fold(0.0, f64::max);
    let checks = vec![
        Check::at_most("reconstruction", max_rec, tol.reconstruction),
        Check::at_most("commutators", max_comm, tol.commutator),
    ];
    let first = &spec.vectors[0];
    let result = SunResult {
        n: spec.n,
        pair_count: spec.pairs.len(),
        vectors: spec.vectors.len(),
        max_reconstruction_error: max_rec,
        pairs,
        coefficient_table: coefficient_table(first, tol.reconstruction)?,
        coefficient_table_su2: coefficient_table(&first[..2], tol.reconstruction)?,
    };
    out.json("sun_check.json", s.kind, &checks, result)?;
    Ok(checks)
}

#[derive(Serialize)]
struct Fig1Result {
    #[serde(flatten)]
    result: ScenarioResult,
    a_error: f64,
    b_modulus_error: f64,
}

fn run_fig1(s: &Scenario, out: &mut Outputs) -> crate::Result<Vec<Check>> {
    let r = run_fig1_scenario(&s.potentials[0], &s.potentials[1], energy(s), &s.grid)?;
    let tol = s.tolerances.amplitude;
    let checks = vec![
        Check::at_most("a_prediction", r.a_error(), tol),
        Check::at_most("b_modulus_prediction", r.b_modulus_error(), tol),
    ];
    let (a_error, b_modulus_error) = (r.a_error(), r.b_modulus_error());
    out.json(
        "fig1.json",
        s.kind,
        &checks,
        Fig1Result {
            result: r,
            a_error,
            b_modulus_error,
        },
    )?;
    Ok(checks)
}
