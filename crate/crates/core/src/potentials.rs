//! Piecewise-constant potential landscapes and the linear maps `F(x) = σx + ρ`
//! relating them.

use serde::{Deserialize, Serialize};

use crate::numerics::{Grid, Potential};
use crate::{Error, Result};

/// A constant value on the half-open interval `[left, right)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub left: f64,
    pub right: f64,
    pub value: f64,
}

impl Segment {
    pub fn new(left: f64, right: f64, value: f64) -> Self {
        Self { left, right, value }
    }
}

/// Compactly supported piecewise-constant potential, zero outside its segments.
///
/// Segments are sorted, non-overlapping and left-closed / right-open, so the
/// value at a breakpoint is the value of the segment starting there.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct PotentialProfile {
    segments: Vec<Segment>,
}

#[derive(Deserialize)]
struct RawProfile {
    #[serde(default)]
    segments: Vec<Segment>,
}

impl TryFrom<RawProfile> for PotentialProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        Self::new(raw.segments)
    }
}

impl PotentialProfile {
    /// Builds a profile, sorting the segments by their left edge.
    pub fn new(mut segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            if !(s.left.is_finite() && s.right.is_finite() && s.value.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite segment {s:?}")));
            }
            if s.left >= s.right {
                return Err(Error::InvalidArgument(format!(
                    "segment [{}, {}) is empty",
                    s.left, s.right
                )));
            }
        }
        segments.sort_by(|a, b| a.left.total_cmp(&b.left));
        if let Some(w) = segments.windows(2).find(|w| w[1].left < w[0].right) {
            return Err(Error::InvalidArgument(format!(
                "segments [{}, {}) and [{}, {}) overlap",
                w[0].left, w[0].right, w[1].left, w[1].right
            )));
        }
        Ok(Self { segments })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// A single rectangular barrier (or well) on `[left, right)`.
    pub fn barrier(left: f64, right: f64, value: f64) -> Result<Self> {
        Self::new(vec![Segment::new(left, right, value)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let i = self.segments.partition_point(|s| s.left <= x);
        match i.checked_sub(1).map(|j| &self.segments[j]) {
            Some(s) if x < s.right => s.value,
            _ => 0.0,
        }
    }

    /// `[leftmost edge, rightmost edge]`, or `None` for the free particle.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.segments.first()?;
        let right = self
            .segments
            .iter()
            .map(|s| s.right)
            .fold(f64::MIN, f64::max);
        Some((first.left, right))
    }

    /// Sorted, de-duplicated segment edges.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut cuts: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.left, s.right])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }

    /// `(cuts, values)` with `values[j]` the constant value on the j-th
    /// interval of `(-∞, c₀), [c₀, c₁), …, [c_last, ∞)`.
    pub fn intervals(&self) -> (Vec<f64>, Vec<f64>) {
        let cuts = self.breakpoints();
        let mut values = Vec::with_capacity(cuts.len() + 1);
        values.push(0.0);
        values.extend(cuts.iter().map(|&c| self.evaluate(c)));
        (cuts, values)
    }

    /// Exact average of `V` over `[x − h/2, x + h/2]`.
    pub fn cell_average(&self, x: f64, h: f64) -> f64 {
        let (lo, hi) = (x - 0.5 * h, x + 0.5 * h);
        let integral: f64 = self
            .segments
            .iter()
            .map(|s| (hi.min(s.right) - lo.max(s.left)).max(0.0) * s.value)
            .sum();
        integral / h
    }

    /// Cell averages on every grid point; a breakpoint landing on a node
    /// contributes the mean of the two adjacent values.
    pub fn sample_cell_averaged(&self, grid: &Grid) -> Vec<f64> {
        let h = grid.dx();
        grid.points().map(|x| self.cell_average(x, h)).collect()
    }

    /// The profile `W(x) = V(F(x))`.
    pub fn transformed(&self, f: SymmetryTransform) -> PotentialProfile {
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let (a, b) = (f.inverse(s.left), f.inverse(s.right));
                Segment::new(a.min(b), a.max(b), s.value)
            })
            .collect();
        PotentialProfile::new(segments).expect("an affine bijection preserves disjointness")
    }

    /// Appends a segment, keeping the profile valid.
    pub fn with_segment(&self, segment: Segment) -> Result<PotentialProfile> {
        let mut segments = self.segments.clone();
        segments.push(segment);
        PotentialProfile::new(segments)
    }
}

impl Potential for PotentialProfile {
    fn value(&self, x: f64) -> f64 {
        self.evaluate(x)
    }
}

/// `F(x) = σx + ρ` with `σ = ±1`: a translation or a reflection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTransform")]
pub struct SymmetryTransform {
    sigma: i8,
    rho: f64,
}

#[derive(Deserialize)]
struct RawTransform {
    sigma: i8,
    #[serde(default)]
    rho: f64,
}

impl TryFrom<RawTransform> for SymmetryTransform {
    type Error = Error;

    fn try_from(raw: RawTransform) -> Result<Self> {
        Self::new(raw.sigma, raw.rho)
    }
}

impl SymmetryTransform {
    pub fn new(sigma: i8, rho: f64) -> Result<Self> {
        if sigma != 1 && sigma != -1 {
            return Err(Error::InvalidArgument(format!(
                "sigma must be ±1, got {sigma}"
            )));
        }
        if !rho.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rho must be finite, got {rho}"
            )));
        }
        Ok(Self { sigma, rho })
    }

    pub fn identity() -> Self {
        Self { sigma: 1, rho: 0.0 }
    }

    /// `x ↦ −x + rho`; `rho = 0` is the parity about the origin.
    pub fn reflection(rho: f64) -> Self {
        Self { sigma: -1, rho }
    }

    pub fn translation(rho: f64) -> Self {
        Self { sigma: 1, rho }
    }

    pub fn sigma(&self) -> f64 {
        f64::from(self.sigma)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.sigma() * x + self.rho
    }

    pub fn inverse(&self, y: f64) -> f64 {
        self.sigma() * (y - self.rho)
    }
}

/// A finite interval `[a, b]` of coordinate space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDomain")]
pub struct SymmetryDomain {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawDomain {
    a: f64,
    b: f64,
}

impl TryFrom<RawDomain> for SymmetryDomain {
    type Error = Error;

    fn try_from(raw: RawDomain) -> Result<Self> {
        Self::new(raw.a, raw.b)
    }
}

impl SymmetryDomain {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidArgument(format!(
                "domain needs finite a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    /// `F([a, b])`.
    pub fn image(&self, f: SymmetryTransform) -> SymmetryDomain {
        let (p, q) = (f.apply(self.a), f.apply(self.b));
        SymmetryDomain {
            a: p.min(q),
            b: p.max(q),
        }
    }
}

/// Splits `[lo, hi]` at every cut strictly inside it.
fn pieces(lo: f64, hi: f64, cuts: impl IntoIterator<Item = f64>) -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = cuts.into_iter().filter(|&c| c > lo && c < hi).collect();
    edges.push(lo);
    edges.push(hi);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Maximal sub-intervals of `[x_min, x_max]` on which `p1` and `p2` coincide.
///
/// Both profiles are constant between consecutive breakpoints, so comparing
/// one interior point per piece is exact.
pub fn find_equality_domains(
    p1: &PotentialProfile,
    p2: &PotentialProfile,
    x_min: f64,
    x_max: f64,
) -> Vec<SymmetryDomain> {
    let cuts = p1.breakpoints().into_iter().chain(p2.breakpoints());
    let mut out: Vec<SymmetryDomain> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for (a, b) in pieces(x_min, x_max, cuts) {
        let mid = 0.5 * (a + b);
        if p1.evaluate(mid) == p2.evaluate(mid) {
            open = Some(match open {
                Some((start, _)) => (start, b),
                None => (a, b),
            });
        } else if let Some((start, end)) = open.take() {
            out.push(SymmetryDomain { a: start, b: end });
        }
    }
    if let Some((start, end)) = open {
        out.push(SymmetryDomain { a: start, b: end });
    }
    out
}

/// Complement of [`find_equality_domains`] within `[x_min, x_max]`.
pub fn find_difference_domains(
    p1: &PotentialProfile,
    p2: &PotentialProfile,
    x_min: f64,
    x_max: f64,
) -> Vec<SymmetryDomain> {
    let mut out = Vec::new();
    let mut cursor = x_min;
    for d in find_equality_domains(p1, p2, x_min, x_max) {
        if d.a > cursor {
            out.push(SymmetryDomain { a: cursor, b: d.a });
        }
        cursor = d.b;
    }
    if cursor < x_max {
        out.push(SymmetryDomain {
            a: cursor,
            b: x_max,
        });
    }
    out
}

/// Whether `|V(F(x)) − V(x)| ≤ tol` on `d`.
///
/// `V` and `V∘F` are both piecewise constant, so the comparison runs over the
/// common refinement of their breakpoints. Isolated breakpoints, where the
/// half-open convention alone decides the value, do not count.
pub fn check_local_symmetry(
    profile: &PotentialProfile,
    f: SymmetryTransform,
    d: SymmetryDomain,
    tol: f64,
) -> bool {
    let own = profile.breakpoints();
    let pulled = own.iter().map(|&c| f.inverse(c)).collect::<Vec<_>>();
    pieces(d.a, d.b, own.into_iter().chain(pulled))
        .into_iter()
        .all(|(a, b)| {
            let mid = 0.5 * (a + b);
            (profile.evaluate(f.apply(mid)) - profile.evaluate(mid)).abs() <= tol
        })
}
