//! Geodesic-convexity testing of scalar functions.
//!
//! A function `u` is geodetically convex when `u` composed with every
//! geodesic is convex as a real function. The tests here are sampling-based:
//! convexity along one geodesic is probed by the midpoint inequality on all
//! index triples of a uniform grid (no smoothness assumed, so no second
//! differences), and [`scan_for_witness`] hunts for a violating geodesic
//! among random endpoint pairs drawn from a fixed box with a documented,
//! seedable generator. A reported witness `(s1, s2, lambda)` replays exactly:
//! re-evaluating `u` along the stored geodesic reproduces `lhs` and `rhs`.
//!
//! The only continuous geodetically convex functions are the constants, so
//! every continuous non-constant built-in is expected to yield a witness;
//! the discontinuous indicator of the line `L = {x = y, t = 0}` in `H^1` is
//! the classical example of a non-constant geodetically convex function, and
//! the scanner finds no violation for it along geodesics inside `L`.

use std::sync::Arc as StdArc;

use serde::{Deserialize, Serialize};

use crate::error::{HeisError, Result};
use crate::geodesic::{cc_distance, connect, GeodesicArc};
use crate::group::HPoint;
use crate::rng::SplitMix64;

/// Slack added to the midpoint inequality before declaring a violation, so
/// rounding noise is never flagged as nonconvexity.
pub const VIOLATION_SLACK: f64 = 1e-9;

/// Membership tolerance for the line `L = {x = y, t = 0}` in `H^1`. The line
/// has measure zero, so membership is decided by an essentially exact
/// predicate rather than a fuzzy one.
pub const EXAMPLE1_LINE_TOL: f64 = 1e-12;

/// Sampling box `[-2, 2]` per coordinate used by the randomized scans.
pub const SCAN_BOX: f64 = 2.0;

const SCAN_GRID: usize = 65;
const REJECTION_CAP: usize = 10_000;

/// A named total scalar function on `H^n`.
#[derive(Clone)]
pub enum ScalarField {
    /// Constant function.
    Const(f64),
    /// The vertical coordinate `t`.
    TCoord,
    /// Carnot-Caratheodory distance to the origin.
    CcDistOrigin,
    /// Indicator of the complement of `L = {x = y, t = 0}` in `H^1`: zero on
    /// `L`, one elsewhere. Discontinuous, non-constant, yet geodetically
    /// convex. Defined only for `n = 1`.
    Example1Indicator,
    /// Caller-supplied pure function.
    Custom {
        name: String,
        f: StdArc<dyn Fn(&HPoint) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ScalarField({})", self.name())
    }
}

impl ScalarField {
    pub fn eval(&self, p: &HPoint) -> f64 {
        match self {
            ScalarField::Const(k) => *k,
            ScalarField::TCoord => p.t(),
            ScalarField::CcDistOrigin => cc_distance(&HPoint::origin(p.dim()), p)
                .expect("origin shares the point's dimension"),
            ScalarField::Example1Indicator => {
                assert_eq!(p.dim(), 1, "example1-indicator is defined on H^1 only");
                let on_line =
                    (p.x()[0] - p.y()[0]).abs() <= EXAMPLE1_LINE_TOL && p.t().abs() <= EXAMPLE1_LINE_TOL;
                if on_line {
                    0.0
                } else {
                    1.0
                }
            }
            ScalarField::Custom { f, .. } => f(p),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ScalarField::Const(k) => format!("const:{k}"),
            ScalarField::TCoord => "t-coord".into(),
            ScalarField::CcDistOrigin => "cc-dist-origin".into(),
            ScalarField::Example1Indicator => "example1-indicator".into(),
            ScalarField::Custom { name, .. } => name.clone(),
        }
    }

    /// Parses a CLI name: `const`, `const:<k>`, `t-coord`, `cc-dist-origin`,
    /// `example1-indicator`.
    pub fn parse(name: &str) -> Result<ScalarField> {
        let name = name.trim();
        if name == "const" {
            return Ok(ScalarField::Const(0.0));
        }
        if let Some(rest) = name.strip_prefix("const:") {
            let k: f64 = rest
                .parse()
                .map_err(|_| HeisError::Parse(format!("bad constant in {name:?}")))?;
            if !k.is_finite() {
                return Err(HeisError::Parse("constant must be finite".into()));
            }
            return Ok(ScalarField::Const(k));
        }
        match name {
            "t-coord" => Ok(ScalarField::TCoord),
            "cc-dist-origin" => Ok(ScalarField::CcDistOrigin),
            "example1-indicator" => Ok(ScalarField::Example1Indicator),
            other => Err(HeisError::Parse(format!(
                "unknown function {other:?}; expected const[:k], t-coord, cc-dist-origin or example1-indicator"
            ))),
        }
    }

    /// Dimension the field is pinned to, if any.
    pub fn declared_dim(&self) -> Option<usize> {
        match self {
            ScalarField::Example1Indicator => Some(1),
            _ => None,
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        match self.declared_dim() {
            Some(d) if d != n => Err(HeisError::DimensionMismatch { left: d, right: n }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "convex-on-samples")]
    ConvexOnSamples,
    #[serde(rename = "violation")]
    Violation,
}

/// A replayable convexity violation: `u(gamma(lambda s1 + (1-lambda) s2))`
/// exceeds `lambda u(gamma(s1)) + (1-lambda) u(gamma(s2))` by more than
/// [`VIOLATION_SLACK`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityWitness {
    pub s1: f64,
    pub s2: f64,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub geodesic: GeodesicArc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub verdict: Verdict,
    pub witness: Option<ConvexityWitness>,
}

impl ConvexityReport {
    fn convex() -> Self {
        ConvexityReport {
            verdict: Verdict::ConvexOnSamples,
            witness: None,
        }
    }
}

/// Midpoint-convexity audit of `u` along one geodesic.
///
/// Samples `u` on a uniform `grid >= 3` and checks, for every index triple
/// `i < j < k`, the inequality at the combination weight
/// `lambda = (s_k - s_j) / (s_k - s_i)`. The first failing triple (scanned in
/// lexicographic order) is re-evaluated at the exact replay parameter
/// `lambda s_i + (1 - lambda) s_k` and returned as the witness.
pub fn convexity_along(u: &ScalarField, g: &GeodesicArc, grid: usize) -> Result<ConvexityReport> {
    u.check_dim(g.dim())?;
    if grid < 3 {
        return Err(HeisError::InvalidArgument("grid must be >= 3".into()));
    }
    let end = g.param_end();
    let denom = (grid - 1) as f64;
    let mut params = Vec::with_capacity(grid);
    let mut values = Vec::with_capacity(grid);
    for i in 0..grid {
        let s = if i + 1 == grid {
            end
        } else {
            end * i as f64 / denom
        };
        params.push(s);
        values.push(u.eval(&g.eval_unchecked(s)));
    }
    for i in 0..grid {
        for j in i + 1..grid {
            for k in j + 1..grid {
                let lambda = (params[k] - params[j]) / (params[k] - params[i]);
                let rhs = lambda * values[i] + (1.0 - lambda) * values[k];
                if values[j] > rhs + VIOLATION_SLACK {
                    // re-evaluate at the replay parameter so the witness is
                    // bit-for-bit reproducible from (s1, s2, lambda)
                    let s_mid = (lambda * params[i] + (1.0 - lambda) * params[k])
                        .clamp(0.0, end);
                    let lhs = u.eval(&g.eval_unchecked(s_mid));
                    if lhs > rhs + VIOLATION_SLACK {
                        return Ok(ConvexityReport {
                            verdict: Verdict::Violation,
                            witness: Some(ConvexityWitness {
                                s1: params[i],
                                s2: params[k],
                                lambda,
                                lhs,
                                rhs,
                                geodesic: g.clone(),
                            }),
                        });
                    }
                }
            }
        }
    }
    Ok(ConvexityReport::convex())
}

fn draw_point(rng: &mut SplitMix64, n: usize) -> HPoint {
    let x = (0..n).map(|_| rng.uniform(-SCAN_BOX, SCAN_BOX)).collect();
    let y = (0..n).map(|_| rng.uniform(-SCAN_BOX, SCAN_BOX)).collect();
    let t = rng.uniform(-SCAN_BOX, SCAN_BOX);
    HPoint::new(x, y, t).expect("box draws are finite")
}

/// Randomized hunt for a convexity violation of `u` on `H^n`.
///
/// Each trial draws an endpoint pair from the box `[-2, 2]^{2n+1}` using the
/// per-trial stream `SplitMix64::stream(seed, trial)`, connects the pair, and
/// audits every connecting geodesic with a 65-point grid. Returns the first
/// violation found, in deterministic trial order.
///
/// ```
/// use heis_geo::{scan_for_witness, ScalarField, Verdict};
///
/// // the vertical coordinate is continuous and non-constant, so a witness
/// // geodesic shows up quickly
/// let report = scan_for_witness(&ScalarField::TCoord, 1, 20, 7)?;
/// assert_eq!(report.verdict, Verdict::Violation);
/// # Ok::<(), heis_geo::HeisError>(())
/// ```
pub fn scan_for_witness(
    u: &ScalarField,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    u.check_dim(n)?;
    if trials < 1 {
        return Err(HeisError::InvalidArgument("trials must be >= 1".into()));
    }
    for trial in 0..trials {
        let mut rng = SplitMix64::stream(seed, trial as u64);
        let p = draw_point(&mut rng, n);
        let mut q = draw_point(&mut rng, n);
        let mut redraws = 0;
        while q == p && redraws < 32 {
            q = draw_point(&mut rng, n);
            redraws += 1;
        }
        let Ok(arcs) = connect(&p, &q) else {
            continue;
        };
        for arc in &arcs {
            let report = convexity_along(u, arc, SCAN_GRID)?;
            if report.verdict == Verdict::Violation {
                return Ok(report);
            }
        }
    }
    Ok(ConvexityReport::convex())
}

/// A geodesic sample that left the strict sublevel set.
#[derive(Debug, Clone, Serialize)]
pub struct SublevelExit {
    pub pair_index: usize,
    pub p1: HPoint,
    pub p2: HPoint,
    /// Parameter of the first exiting sample on the connecting geodesic.
    pub s: f64,
    /// Value of `u` there; at least the level.
    pub value: f64,
}

/// Outcome of [`sublevel_probe`].
#[derive(Debug, Clone, Serialize)]
pub struct SublevelReport {
    /// `u(p0)`, the strict level defining `S = {u < level}`.
    pub level: f64,
    pub pairs_requested: usize,
    /// Pairs successfully rejection-sampled inside `S`.
    pub pairs_sampled: usize,
    pub exits: Vec<SublevelExit>,
}

/// Contrapositive probe of the sublevel-set law: for a geodetically convex
/// `u`, the strict sublevel set `S = {p : u(p) < u(p0)}` is geodetically
/// convex, so no geodesic between points of `S` may leave `S`. Any exiting
/// sample is therefore a convexity-violation certificate for `u`.
///
/// Pairs are rejection-sampled from the scan box (up to a fixed cap per
/// point, so a thin or empty `S` yields fewer sampled pairs, never an error).
pub fn sublevel_probe(
    u: &ScalarField,
    p0: &HPoint,
    pairs: usize,
    seed: u64,
) -> Result<SublevelReport> {
    let n = p0.dim();
    u.check_dim(n)?;
    if pairs < 1 {
        return Err(HeisError::InvalidArgument("pairs must be >= 1".into()));
    }
    let level = u.eval(p0);
    let mut report = SublevelReport {
        level,
        pairs_requested: pairs,
        pairs_sampled: 0,
        exits: Vec::new(),
    };
    for pair in 0..pairs {
        let mut rng = SplitMix64::stream(seed, pair as u64);
        let Some(p1) = draw_in_sublevel(u, level, n, &mut rng) else {
            continue;
        };
        let Some(p2) = draw_in_sublevel(u, level, n, &mut rng) else {
            continue;
        };
        if p1 == p2 {
            continue;
        }
        report.pairs_sampled += 1;
        report
            .exits
            .extend(check_pair_exits(u, level, &p1, &p2, SCAN_GRID, pair)?);
    }
    Ok(report)
}

fn draw_in_sublevel(
    u: &ScalarField,
    level: f64,
    n: usize,
    rng: &mut SplitMix64,
) -> Option<HPoint> {
    for _ in 0..REJECTION_CAP {
        let p = draw_point(rng, n);
        if u.eval(&p) < level {
            return Some(p);
        }
    }
    None
}

/// Samples every geodesic between two given points of `S = {u < level}` on a
/// uniform grid and reports the first exiting sample per geodesic.
pub fn check_pair_exits(
    u: &ScalarField,
    level: f64,
    p1: &HPoint,
    p2: &HPoint,
    grid: usize,
    pair_index: usize,
) -> Result<Vec<SublevelExit>> {
    if p1.dim() != p2.dim() {
        return Err(HeisError::DimensionMismatch {
            left: p1.dim(),
            right: p2.dim(),
        });
    }
    u.check_dim(p1.dim())?;
    if grid < 2 {
        return Err(HeisError::InvalidArgument("grid must be >= 2".into()));
    }
    if u.eval(p1) >= level || u.eval(p2) >= level {
        return Err(HeisError::InvalidArgument(
            "both endpoints must lie in the sublevel set".into(),
        ));
    }
    let arcs = connect(p1, p2)?;
    let mut exits = Vec::new();
    for arc in &arcs {
        let end = arc.param_end();
        let denom = (grid - 1) as f64;
        for i in 0..grid {
            let s = if i + 1 == grid {
                end
            } else {
                end * i as f64 / denom
            };
            let value = u.eval(&arc.eval_unchecked(s));
            if value >= level {
                exits.push(SublevelExit {
                    pair_index,
                    p1: p1.clone(),
                    p2: p2.clone(),
                    s,
                    value,
                });
                break;
            }
        }
    }
    Ok(exits)
}
