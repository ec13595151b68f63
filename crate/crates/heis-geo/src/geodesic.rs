//! Geodesics of the Carnot-Caratheodory metric on `H^n`.
//!
//! Every geodesic leaving a base point `p` is either a straight horizontal
//! segment or the left translate by `p` of a spiral
//!
//! ```text
//! s -> ( (1 - e^{-i c s}) W,  2 c |W|^2 (s - sin s) ),   s in [0, s_end],
//! ```
//!
//! where `W` in `C^n` is the center of the circle traced by the xy-projection,
//! `c = +/-1` is the chirality (sign of the vertical drift), and
//! `s_end <= 2 pi`. The xy-projection moves with constant speed `|W|`, so the
//! metric length of an arc is `s_end * |W|`, and the full turn `s_end = 2 pi`
//! climbs from the origin to `(0, 4 pi |W|^2)` on the t-axis.
//!
//! Connecting the origin to a target `(z, t)` with `z != 0`, `t != 0` reduces
//! to one transcendental equation: the ratio `|t| / (2 |z|^2)` equals
//! `mu(s1) = (s1 - sin s1) / (2 (1 - cos s1))`, which is strictly increasing
//! on `(0, 2 pi)`. [`solve_mu`] inverts it by bisection-safeguarded Newton
//! iteration, and the circle center follows by one complex division,
//! `W = z / (1 - e^{-i c s1})`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::TAU;

use crate::error::{HeisError, Result};
use crate::group::{HPoint, TorusAngle};
use crate::polyline::Polyline;

/// Default residual bound used by [`connect`] when inverting `mu`.
pub const DEFAULT_MU_TOL: f64 = 1e-13;

/// Absolute tolerance on the translated vertical gap below which a straight
/// segment counts as horizontal.
pub const SEGMENT_HORIZONTALITY_TOL: f64 = 1e-10;

const MAX_SOLVE_ITERS: usize = 200;

/// `1 - cos s` computed as `2 sin^2(s/2)`; accurate near `s = 0` and `s = 2 pi`.
pub(crate) fn one_minus_cos(s: f64) -> f64 {
    let h = (0.5 * s).sin();
    2.0 * h * h
}

/// `s - sin s`; the direct difference loses every significant digit for small
/// `s`, so switch to the Taylor series below `|s| = 0.01`.
pub(crate) fn s_minus_sin(s: f64) -> f64 {
    if s.abs() < 1e-2 {
        let s2 = s * s;
        (s * s2 / 6.0) * (1.0 - s2 / 20.0 * (1.0 - s2 / 42.0))
    } else {
        s - s.sin()
    }
}

/// Sign choice in the geodesic family. `Up` spirals with increasing `t` and
/// phase factor `1 - e^{-is}`; `Down` is its mirror image. Serialized as
/// `+1` / `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chirality {
    Up,
    Down,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Up => 1.0,
            Chirality::Down => -1.0,
        }
    }

    /// Chirality matching the sign of a vertical displacement.
    pub fn from_sign(v: f64) -> Result<Self> {
        if v > 0.0 {
            Ok(Chirality::Up)
        } else if v < 0.0 {
            Ok(Chirality::Down)
        } else {
            Err(HeisError::InvalidArgument(
                "chirality is undefined for zero vertical displacement".into(),
            ))
        }
    }
}

impl Serialize for Chirality {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(match self {
            Chirality::Up => 1,
            Chirality::Down => -1,
        })
    }
}

impl<'de> Deserialize<'de> for Chirality {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match i64::deserialize(deserializer)? {
            1 => Ok(Chirality::Up),
            -1 => Ok(Chirality::Down),
            other => Err(D::Error::custom(format!(
                "chirality must be 1 or -1, got {other}"
            ))),
        }
    }
}

/// Spiral geodesic arc: left translate by `base` of the canonical family with
/// circle center `W = center_re + i center_im`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArcRepr", into = "ArcRepr")]
pub struct ArcData {
    base: HPoint,
    center_re: Vec<f64>,
    center_im: Vec<f64>,
    chirality: Chirality,
    s_end: f64,
}

#[derive(Serialize, Deserialize)]
struct ArcRepr {
    base: HPoint,
    #[serde(rename = "W_re")]
    w_re: Vec<f64>,
    #[serde(rename = "W_im")]
    w_im: Vec<f64>,
    chirality: Chirality,
    s_end: f64,
}

impl From<ArcData> for ArcRepr {
    fn from(a: ArcData) -> Self {
        ArcRepr {
            base: a.base,
            w_re: a.center_re,
            w_im: a.center_im,
            chirality: a.chirality,
            s_end: a.s_end,
        }
    }
}

impl TryFrom<ArcRepr> for ArcData {
    type Error = HeisError;

    fn try_from(r: ArcRepr) -> Result<Self> {
        ArcData::new(r.base, r.w_re, r.w_im, r.chirality, r.s_end)
    }
}

impl ArcData {
    pub fn new(
        base: HPoint,
        center_re: Vec<f64>,
        center_im: Vec<f64>,
        chirality: Chirality,
        s_end: f64,
    ) -> Result<Self> {
        if center_re.len() != center_im.len() {
            return Err(HeisError::DimensionMismatch {
                left: center_re.len(),
                right: center_im.len(),
            });
        }
        if base.dim() != center_re.len() {
            return Err(HeisError::DimensionMismatch {
                left: base.dim(),
                right: center_re.len(),
            });
        }
        if center_re
            .iter()
            .chain(center_im.iter())
            .any(|v| !v.is_finite())
        {
            return Err(HeisError::InvalidArgument(
                "arc center must be finite".into(),
            ));
        }
        if !(s_end > 0.0 && s_end <= TAU) {
            return Err(HeisError::OutOfRange {
                what: "arc parameter s_end",
                value: s_end,
            });
        }
        let arc = ArcData {
            base,
            center_re,
            center_im,
            chirality,
            s_end,
        };
        if arc.center_norm_sq() <= 0.0 {
            return Err(HeisError::InvalidArgument(
                "arc center must be nonzero".into(),
            ));
        }
        Ok(arc)
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn center_re(&self) -> &[f64] {
        &self.center_re
    }

    pub fn center_im(&self) -> &[f64] {
        &self.center_im
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn s_end(&self) -> f64 {
        self.s_end
    }

    /// `|W|^2`, the squared radius of the projected circle.
    pub fn center_norm_sq(&self) -> f64 {
        self.center_re.iter().map(|v| v * v).sum::<f64>()
            + self.center_im.iter().map(|v| v * v).sum::<f64>()
    }

    fn eval_unchecked(&self, s: f64) -> HPoint {
        let c = self.chirality.sign();
        let re = one_minus_cos(s);
        let im = c * s.sin();
        let n = self.base.dim();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for j in 0..n {
            let (wr, wi) = (self.center_re[j], self.center_im[j]);
            x.push(re * wr - im * wi);
            y.push(re * wi + im * wr);
        }
        let t = c * 2.0 * self.center_norm_sq() * s_minus_sin(s);
        let rel = HPoint::new(x, y, t).expect("arc evaluation is finite");
        self.base.mul_unchecked(&rel)
    }
}

/// Straight horizontal segment between two points whose left-translated
/// vertical gap vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SegmentRepr", into = "SegmentRepr")]
pub struct SegmentData {
    a: HPoint,
    b: HPoint,
}

#[derive(Serialize, Deserialize)]
struct SegmentRepr {
    a: HPoint,
    b: HPoint,
}

impl From<SegmentData> for SegmentRepr {
    fn from(s: SegmentData) -> Self {
        SegmentRepr { a: s.a, b: s.b }
    }
}

impl TryFrom<SegmentRepr> for SegmentData {
    type Error = HeisError;

    fn try_from(r: SegmentRepr) -> Result<Self> {
        SegmentData::new(r.a, r.b)
    }
}

impl SegmentData {
    pub fn new(a: HPoint, b: HPoint) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(HeisError::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        let gap = a.inverse().mul_unchecked(&b).t();
        if gap.abs() > SEGMENT_HORIZONTALITY_TOL {
            return Err(HeisError::InvalidArgument(format!(
                "segment is not horizontal: translated vertical gap {gap:e}"
            )));
        }
        Ok(SegmentData { a, b })
    }

    pub fn a(&self) -> &HPoint {
        &self.a
    }

    pub fn b(&self) -> &HPoint {
        &self.b
    }

    fn eval_unchecked(&self, s: f64) -> HPoint {
        let n = self.a.dim();
        let u = 1.0 - s;
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for j in 0..n {
            x.push(u * self.a.x()[j] + s * self.b.x()[j]);
            y.push(u * self.a.y()[j] + s * self.b.y()[j]);
        }
        let t = u * self.a.t() + s * self.b.t();
        HPoint::new(x, y, t).expect("segment evaluation is finite")
    }
}

/// A parametrized geodesic: circular-spiral arc or straight horizontal
/// segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeodesicArc {
    Arc(ArcData),
    Segment(SegmentData),
}

impl GeodesicArc {
    pub fn dim(&self) -> usize {
        match self {
            GeodesicArc::Arc(a) => a.base.dim(),
            GeodesicArc::Segment(s) => s.a.dim(),
        }
    }

    /// End of the parameter interval: `s_end` for arcs, `1` for segments.
    pub fn param_end(&self) -> f64 {
        match self {
            GeodesicArc::Arc(a) => a.s_end,
            GeodesicArc::Segment(_) => 1.0,
        }
    }

    /// Evaluates the geodesic at parameter `s` in `[0, param_end]`.
    pub fn eval(&self, s: f64) -> Result<HPoint> {
        let end = self.param_end();
        if !s.is_finite() || !(0.0..=end).contains(&s) {
            return Err(HeisError::OutOfRange {
                what: "geodesic parameter s",
                value: s,
            });
        }
        Ok(self.eval_unchecked(s))
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> HPoint {
        match self {
            GeodesicArc::Arc(a) => a.eval_unchecked(s),
            GeodesicArc::Segment(seg) => seg.eval_unchecked(s),
        }
    }

    pub fn start(&self) -> HPoint {
        match self {
            GeodesicArc::Arc(a) => a.base.clone(),
            GeodesicArc::Segment(s) => s.a.clone(),
        }
    }

    pub fn end(&self) -> HPoint {
        match self {
            GeodesicArc::Arc(a) => a.eval_unchecked(a.s_end),
            GeodesicArc::Segment(s) => s.b.clone(),
        }
    }

    /// Metric length: the Euclidean length of the xy-projection. Constant
    /// speed makes this `s_end * |W|` for arcs.
    pub fn length(&self) -> f64 {
        match self {
            GeodesicArc::Arc(a) => a.s_end * a.center_norm_sq().sqrt(),
            GeodesicArc::Segment(s) => {
                let mut acc = 0.0;
                for j in 0..s.a.dim() {
                    acc += (s.b.x()[j] - s.a.x()[j]).powi(2);
                    acc += (s.b.y()[j] - s.a.y()[j]).powi(2);
                }
                acc.sqrt()
            }
        }
    }

    /// Samples the geodesic at `count >= 2` uniformly spaced parameters,
    /// hitting both endpoints exactly.
    pub fn sample(&self, count: usize) -> Result<Polyline> {
        if count < 2 {
            return Err(HeisError::InvalidArgument(
                "need at least 2 samples".into(),
            ));
        }
        let end = self.param_end();
        let denom = (count - 1) as f64;
        let mut params = Vec::with_capacity(count);
        let mut points = Vec::with_capacity(count);
        for i in 0..count {
            let s = if i + 1 == count {
                end
            } else {
                end * i as f64 / denom
            };
            params.push(s);
            points.push(self.eval_unchecked(s));
        }
        Polyline::new(params, points)
    }

    /// Rotates the whole arc about the t-axis. Rotation is a group
    /// automorphism preserving the geodesic family, so the result is again a
    /// geodesic with the same length.
    pub fn rotate(&self, theta: &TorusAngle) -> Result<GeodesicArc> {
        match self {
            GeodesicArc::Arc(a) => {
                let base = a.base.rotate(theta)?;
                let n = a.center_re.len();
                let mut re = Vec::with_capacity(n);
                let mut im = Vec::with_capacity(n);
                for j in 0..n {
                    let (sin, cos) = theta.angles()[j].sin_cos();
                    re.push(cos * a.center_re[j] - sin * a.center_im[j]);
                    im.push(sin * a.center_re[j] + cos * a.center_im[j]);
                }
                Ok(GeodesicArc::Arc(ArcData::new(
                    base,
                    re,
                    im,
                    a.chirality,
                    a.s_end,
                )?))
            }
            GeodesicArc::Segment(s) => Ok(GeodesicArc::Segment(SegmentData::new(
                s.a.rotate(theta)?,
                s.b.rotate(theta)?,
            )?)),
        }
    }
}

/// The canonical geodesic from the origin to `(0, T)` on the t-axis: circle
/// center `R = (sqrt|T| / (2 sqrt(n pi)), ..., same)` in `R^n`, so
/// `|R|^2 = |T| / (4 pi)`, traversed over the full turn `s in [0, 2 pi]`.
pub fn generating_geodesic(t_height: f64, n: usize) -> Result<GeodesicArc> {
    if n == 0 {
        return Err(HeisError::InvalidArgument("dimension must be >= 1".into()));
    }
    if t_height == 0.0 || !t_height.is_finite() {
        return Err(HeisError::InvalidArgument(
            "generating geodesic needs a nonzero finite vertical height; use a segment for targets in the plane t = 0".into(),
        ));
    }
    let comp = t_height.abs().sqrt() / (2.0 * (n as f64 * std::f64::consts::PI).sqrt());
    Ok(GeodesicArc::Arc(ArcData::new(
        HPoint::origin(n),
        vec![comp; n],
        vec![0.0; n],
        Chirality::from_sign(t_height)?,
        TAU,
    )?))
}

fn mu_raw(s: f64) -> f64 {
    s_minus_sin(s) / (2.0 * one_minus_cos(s))
}

fn mu_deriv(s: f64) -> f64 {
    let d = one_minus_cos(s);
    0.5 - s_minus_sin(s) * s.sin() / (2.0 * d * d)
}

/// The vertical-gap profile `mu(s) = (s - sin s) / (2 (1 - cos s))` on
/// `(0, 2 pi)`.
///
/// For an arc reaching its endpoint at parameter `s`, the endpoint satisfies
/// `|t| / (2 |z|^2) = mu(s)`; `mu` is strictly increasing, tends to `0` as
/// `s -> 0+` (like `s/6`) and to infinity as `s -> 2 pi -`.
pub fn mu(s: f64) -> Result<f64> {
    if !s.is_finite() || s <= 0.0 || s >= TAU {
        return Err(HeisError::OutOfRange {
            what: "mu argument s",
            value: s,
        });
    }
    Ok(mu_raw(s))
}

/// Inverts [`mu`]: returns `s1` in `(0, 2 pi)` with `|mu(s1) - k| <= tol`.
///
/// Bracketed bisection refined by Newton steps; a Newton step that would
/// leave the current bracket falls back to its midpoint. `mu` has unbounded
/// derivative near `2 pi`, so the bracket safeguard is what makes the
/// iteration unconditionally convergent. Deterministic: the same `k` always
/// returns the same `s1`.
///
/// ```
/// use std::f64::consts::{FRAC_PI_4, PI};
///
/// // mu(pi) = pi/4
/// let s = heis_geo::solve_mu(FRAC_PI_4, 1e-12)?;
/// assert!((s - PI).abs() < 1e-10);
/// # Ok::<(), heis_geo::HeisError>(())
/// ```
///
/// For large `k` the slope of `mu` at the solution can exceed `tol` per ulp
/// of `s`; once the bracket collapses to adjacent floats the best
/// representable inverse is returned even if its residual is above `tol`
/// (the residual is then within one `mu`-granule of zero, the f64 optimum).
pub fn solve_mu(k: f64, tol: f64) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 {
        return Err(HeisError::InvalidArgument(format!(
            "mu is positive; cannot invert at k = {k}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(HeisError::InvalidArgument("tolerance must be > 0".into()));
    }

    let mut lo = 1e-9;
    let mut hi = TAU - 1e-9;
    // Below mu(lo) the series inverse s = 6k is already exact to O(k^3).
    if k <= mu_raw(lo) {
        return Ok(6.0 * k);
    }
    if k >= mu_raw(hi) {
        return Err(HeisError::NoConvergence {
            iterations: 0,
            residual: k - mu_raw(hi),
        });
    }

    let mut s = 0.5 * (lo + hi);
    let mut best_s = s;
    let mut best_res = f64::INFINITY;
    let mut polish = 0;
    let mut stagnated = false;
    for _ in 0..MAX_SOLVE_ITERS {
        let g = mu_raw(s) - k;
        if g.abs() < best_res {
            best_res = g.abs();
            best_s = s;
        }
        if g == 0.0 {
            break;
        }
        if g.abs() <= tol {
            // a couple of extra Newton steps to polish toward machine level
            polish += 1;
            if polish > 2 {
                break;
            }
        }
        if g < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - g / mu_deriv(s);
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == s {
            stagnated = true;
            break;
        }
        s = next;
    }

    if best_res <= tol || stagnated {
        Ok(best_s)
    } else {
        Err(HeisError::NoConvergence {
            iterations: MAX_SOLVE_ITERS,
            residual: best_res,
        })
    }
}

/// Geodesics from the origin to `q`, with the `mu` inversion carried to
/// residual `mu_tol`.
///
/// * `z != 0, t != 0`: the unique connecting geodesic (singleton arc).
/// * `t = 0`: the straight segment through the origin (horizontal since every
///   line through the origin in the plane `t = 0` is). For `n >= 2` other
///   geodesics inside the plane may exist between generic planar points; no
///   exhaustiveness is claimed in that stratum.
/// * `z = 0`: the canonical generating geodesic; the full family of
///   connecting geodesics is its orbit under rotations about the t-axis, all
///   of the same length, so one canonical representative is returned.
pub fn connect_origin_with_tol(q: &HPoint, mu_tol: f64) -> Result<Vec<GeodesicArc>> {
    if q.is_origin() {
        return Err(HeisError::CoincidentPoints);
    }
    let n = q.dim();
    let z_sq = q.z_norm_sq();
    if z_sq == 0.0 {
        return Ok(vec![generating_geodesic(q.t(), n)?]);
    }
    if q.t() == 0.0 {
        return Ok(vec![GeodesicArc::Segment(SegmentData::new(
            HPoint::origin(n),
            q.clone(),
        )?)]);
    }

    let k = q.t().abs() / (2.0 * z_sq);
    let s1 = solve_mu(k, mu_tol)?;
    let chirality = Chirality::from_sign(q.t())?;
    let c = chirality.sign();
    // W = z / (1 - e^{-i c s1}), componentwise
    let re = one_minus_cos(s1);
    let im = c * s1.sin();
    let denom = 2.0 * re; // |1 - e^{-i c s1}|^2 = 2 (1 - cos s1)
    let mut w_re = Vec::with_capacity(n);
    let mut w_im = Vec::with_capacity(n);
    for j in 0..n {
        let (zx, zy) = (q.x()[j], q.y()[j]);
        w_re.push((zx * re + zy * im) / denom);
        w_im.push((zy * re - zx * im) / denom);
    }
    Ok(vec![GeodesicArc::Arc(ArcData::new(
        HPoint::origin(n),
        w_re,
        w_im,
        chirality,
        s1,
    )?)])
}

/// [`connect_origin_with_tol`] at the default solver tolerance.
pub fn connect_origin(q: &HPoint) -> Result<Vec<GeodesicArc>> {
    connect_origin_with_tol(q, DEFAULT_MU_TOL)
}

/// Geodesics from `p` to `q`: the origin-based family for `p^{-1} * q`, left
/// translated by `p`.
///
/// ```
/// use heis_geo::{connect, HPoint};
///
/// let p = HPoint::h1(1.0, 0.0, 0.0)?;
/// let q = HPoint::h1(0.0, 1.0, 0.0)?;
/// let arcs = connect(&p, &q)?;
/// assert_eq!(arcs.len(), 1);
/// assert!(arcs[0].end().max_abs_diff(&q) < 1e-9);
/// # Ok::<(), heis_geo::HeisError>(())
/// ```
pub fn connect_with_tol(p: &HPoint, q: &HPoint, mu_tol: f64) -> Result<Vec<GeodesicArc>> {
    if p.dim() != q.dim() {
        return Err(HeisError::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    if p == q {
        return Err(HeisError::CoincidentPoints);
    }
    let delta = p.inverse().mul_unchecked(q);
    let arcs = connect_origin_with_tol(&delta, mu_tol)?;
    arcs.into_iter()
        .map(|arc| match arc {
            GeodesicArc::Arc(a) => Ok(GeodesicArc::Arc(ArcData::new(
                p.clone(),
                a.center_re,
                a.center_im,
                a.chirality,
                a.s_end,
            )?)),
            GeodesicArc::Segment(_) => Ok(GeodesicArc::Segment(SegmentData::new(
                p.clone(),
                q.clone(),
            )?)),
        })
        .collect()
}

/// [`connect_with_tol`] at the default solver tolerance.
pub fn connect(p: &HPoint, q: &HPoint) -> Result<Vec<GeodesicArc>> {
    connect_with_tol(p, q, DEFAULT_MU_TOL)
}

/// Carnot-Caratheodory distance: `0` for coincident points, otherwise the
/// shortest connecting geodesic length. Symmetric and invariant under left
/// translation and rotation about the t-axis.
pub fn cc_distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    cc_distance_with_tol(p, q, DEFAULT_MU_TOL)
}

pub fn cc_distance_with_tol(p: &HPoint, q: &HPoint, mu_tol: f64) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(HeisError::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    if p == q {
        return Ok(0.0);
    }
    let arcs = connect_with_tol(p, q, mu_tol)?;
    Ok(arcs
        .iter()
        .map(GeodesicArc::length)
        .fold(f64::INFINITY, f64::min))
}

/// Whether the straight segment from `a` to `b` is horizontal: after left
/// translating `a` to the origin the vertical gap
/// `t(b) - t(a) - 2 * skew_form(xy(a), xy(b))` must vanish (to
/// [`SEGMENT_HORIZONTALITY_TOL`]).
pub fn is_horizontal_segment(a: &HPoint, b: &HPoint) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(HeisError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let gap = a.inverse().mul_unchecked(b).t();
    Ok(gap.abs() <= SEGMENT_HORIZONTALITY_TOL)
}

/// Maximum finite-difference defect of the horizontality law
/// `t' = 2 sum_j (x_j' y_j - y_j' x_j)` over the interior samples of a
/// polyline, using central differences. A smooth horizontal curve sampled at
/// step `h` yields a residual of order `h^2`.
pub fn horizontality_residual(curve: &Polyline) -> Result<f64> {
    let m = curve.len();
    if m < 3 {
        return Err(HeisError::InvalidArgument(
            "horizontality residual needs at least 3 samples".into(),
        ));
    }
    let params = curve.params();
    let points = curve.points();
    let n = points[0].dim();
    let mut worst = 0.0_f64;
    for i in 1..m - 1 {
        let h2 = params[i + 1] - params[i - 1];
        let td = (points[i + 1].t() - points[i - 1].t()) / h2;
        let mut sum = 0.0;
        for j in 0..n {
            let xd = (points[i + 1].x()[j] - points[i - 1].x()[j]) / h2;
            let yd = (points[i + 1].y()[j] - points[i - 1].y()[j]) / h2;
            sum += xd * points[i].y()[j] - yd * points[i].x()[j];
        }
        worst = worst.max((td - 2.0 * sum).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    const R1_SQ: f64 = 1.0 / (4.0 * PI);

    #[test]
    fn helper_accuracy() {
        // series and direct branches agree around the crossover, and both stay
        // close to the leading term s^3/6
        for &s in &[1e-6, 1e-3, 9e-3, 1.1e-2, 0.1] {
            let got = s_minus_sin(s);
            if s >= 0.05 {
                assert!((got - (s - s.sin())).abs() <= 1e-18 + 1e-13 * got);
            }
            assert!((got - s * s * s / 6.0).abs() < 0.05 * (s * s * s / 6.0));
        }
        // near 2 pi the naive 1 - cos collapses to a handful of digits; the
        // half-angle form keeps full relative precision: 2 sin^2(5e-8) ~ 5e-15
        let v = one_minus_cos(TAU - 1e-7);
        assert!(v > 4.9e-15 && v < 5.1e-15, "got {v:e}");
    }

    #[test]
    fn mu_closed_values() {
        // mu(pi) = pi/4 since sin pi = 0, cos pi = -1
        assert!((mu(PI).unwrap() - FRAC_PI_4).abs() < 1e-15);
        // Taylor: mu(s) = s/6 + s^3/180 + O(s^5) for small s
        let v = mu(0.01).unwrap();
        assert!(v < 1e-2);
        assert!((v - (0.01 / 6.0 + 0.01_f64.powi(3) / 180.0)).abs() < 1e-13);
    }

    #[test]
    fn mu_domain() {
        assert!(mu(0.0).is_err());
        assert!(mu(TAU).is_err());
        assert!(mu(-1.0).is_err());
        assert!(mu(f64::NAN).is_err());
        assert!(mu(1e-12).is_ok());
        assert!(mu(TAU - 1e-12).is_ok());
    }

    #[test]
    fn mu_strictly_increasing_on_grid() {
        let m = 10_000;
        let mut prev = f64::NEG_INFINITY;
        for i in 1..m {
            let s = TAU * i as f64 / m as f64;
            let v = mu(s).unwrap();
            assert!(v > prev, "mu not increasing at s = {s}");
            prev = v;
        }
    }

    #[test]
    fn mu_deriv_matches_finite_differences() {
        for &s in &[0.05, 0.5, 1.5, PI, 4.0, 5.5, 6.0] {
            let h = 1e-6;
            let fd = (mu_raw(s + h) - mu_raw(s - h)) / (2.0 * h);
            let an = mu_deriv(s);
            assert!(
                (fd - an).abs() < 1e-6 * an.abs().max(1.0),
                "s={s}: fd={fd}, analytic={an}"
            );
        }
    }

    #[test]
    fn solve_mu_round_trips() {
        // inverse of mu(pi) = pi/4
        let s = solve_mu(FRAC_PI_4, 1e-13).unwrap();
        assert!((s - PI).abs() < 1e-10);
        for &k in &[1e-6, 1e-3, 0.1, 1.0, 10.0, 100.0] {
            let s = solve_mu(k, 1e-13).unwrap();
            assert!((mu_raw(s) - k).abs() <= 1e-12, "k = {k}");
        }
        // huge k: the slope of mu at the solution exceeds the tolerance per
        // ulp of s, so only a relative residual is achievable
        let k = 1e6;
        let s = solve_mu(k, 1e-13).unwrap();
        assert!((mu_raw(s) - k).abs() <= 1e-11 * k, "residual {}", mu_raw(s) - k);
        // monotone in k
        let mut prev = 0.0;
        for i in 1..200 {
            let k = i as f64 * 0.05;
            let s = solve_mu(k, 1e-12).unwrap();
            assert!(s > prev);
            prev = s;
        }
        assert!(solve_mu(0.0, 1e-12).is_err());
        assert!(solve_mu(-1.0, 1e-12).is_err());
        assert!(solve_mu(1.0, 0.0).is_err());
    }

    #[test]
    fn generating_geodesic_radius_and_endpoint() {
        let g = generating_geodesic(1.0, 1).unwrap();
        let GeodesicArc::Arc(a) = &g else {
            panic!("expected arc")
        };
        assert!((a.center_norm_sq() - R1_SQ).abs() < 1e-15);
        assert_eq!(a.s_end(), TAU);
        assert_eq!(a.chirality(), Chirality::Up);

        // endpoint (0, T) for several heights
        for &t in &[0.5, 1.0, 2.0] {
            let g = generating_geodesic(t, 1).unwrap();
            let end = g.eval(TAU).unwrap();
            let target = HPoint::h1(0.0, 0.0, t).unwrap();
            assert!(end.max_abs_diff(&target) < 1e-12, "T = {t}");
        }

        // each component sqrt|T| / (2 sqrt(n pi)); T = 4 pi, n = 4 gives 1/2
        let g = generating_geodesic(4.0 * PI, 4).unwrap();
        let GeodesicArc::Arc(a) = &g else {
            panic!("expected arc")
        };
        for &v in a.center_re() {
            assert!((v - 0.5).abs() < 1e-15);
        }

        assert!(generating_geodesic(0.0, 1).is_err());
        assert!(generating_geodesic(1.0, 0).is_err());
    }

    #[test]
    fn eval_at_zero_is_base_and_midpoint_matches_substitution() {
        let g = generating_geodesic(1.0, 1).unwrap();
        assert!(g.eval(0.0).unwrap().is_origin());

        // independent substitution at s = pi: phase 1 - e^{-i pi} = 2, so
        // z = 2R (pure real), and t = (|T|/2pi)(pi - sin pi) = 1/2
        let p = g.eval(PI).unwrap();
        let r = R1_SQ.sqrt();
        assert!((p.x()[0] - 2.0 * r).abs() < 1e-15);
        assert!(p.y()[0].abs() < 1e-15);
        assert!((p.t() - 0.5).abs() < 1e-15);

        assert!(g.eval(-0.1).is_err());
        assert!(g.eval(TAU + 0.1).is_err());
        assert!(g.eval(f64::NAN).is_err());
    }

    #[test]
    fn unit_interval_parametrization_agrees_after_rescaling() {
        // the same family written over [0, 1] with phase e^{-2 pi i u} and
        // height 2|W|^2 (2 pi u - sin 2 pi u) must match eval at s = 2 pi u
        let g = generating_geodesic(1.0, 1).unwrap();
        let GeodesicArc::Arc(a) = &g else {
            panic!("expected arc")
        };
        let r = a.center_re()[0];
        for i in 0..=16 {
            let u = i as f64 / 16.0;
            let su = TAU * u;
            let x = (1.0 - su.cos()) * r;
            let y = su.sin() * r;
            let t = 2.0 * a.center_norm_sq() * (su - su.sin());
            let via_unit = HPoint::h1(x, y, t).unwrap();
            let via_arc = g.eval(su).unwrap();
            assert!(via_arc.max_abs_diff(&via_unit) < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn connect_origin_t_axis_target() {
        let q = HPoint::h1(0.0, 0.0, 2.0).unwrap();
        let arcs = connect_origin(&q).unwrap();
        assert_eq!(arcs.len(), 1);
        let GeodesicArc::Arc(a) = &arcs[0] else {
            panic!("expected arc")
        };
        assert!((a.center_norm_sq() - 2.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(arcs[0].end().max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn connect_origin_planar_target_is_segment() {
        let q = HPoint::h1(3.0, 4.0, 0.0).unwrap();
        let arcs = connect_origin(&q).unwrap();
        assert_eq!(arcs.len(), 1);
        assert!(matches!(arcs[0], GeodesicArc::Segment(_)));
        assert_eq!(arcs[0].length(), 5.0);
        assert_eq!(arcs[0].end(), q);
    }

    #[test]
    fn connect_origin_generic_target_round_trips() {
        let q = HPoint::h1(1.0, 0.0, 1.0).unwrap();
        let arcs = connect_origin(&q).unwrap();
        assert_eq!(arcs.len(), 1);
        let err = arcs[0].end().max_abs_diff(&q);
        assert!(err < 1e-9, "endpoint error {err}");
        assert!(connect_origin(&HPoint::origin(1)).is_err());
    }

    #[test]
    fn connect_origin_nearly_planar_target() {
        // tiny vertical part: the solver takes the series inverse and the
        // arc degenerates toward the straight segment, still hitting the
        // target
        for &t in &[1e-6, 1e-9, 1e-12, -1e-9] {
            let q = HPoint::h1(1.0, 0.5, t).unwrap();
            let arcs = connect_origin(&q).unwrap();
            let err = arcs[0].end().max_abs_diff(&q);
            assert!(err < 1e-12, "t = {t}: endpoint error {err:e}");
            // length approaches the planar distance from above
            let planar = q.z_norm_sq().sqrt();
            assert!(arcs[0].length() >= planar - 1e-12, "t = {t}");
            assert!(arcs[0].length() < planar + 1e-3, "t = {t}");
        }
    }

    #[test]
    fn connect_translates_the_origin_family() {
        let p = HPoint::h1(1.0, 0.0, 0.0).unwrap();
        let q = HPoint::h1(0.0, 1.0, 0.0).unwrap();
        // p^{-1} q = (-1, 1, 2): off the plane and off the axis, unique arc
        let delta = p.inverse().group_mul(&q).unwrap();
        assert_eq!(delta, HPoint::h1(-1.0, 1.0, 2.0).unwrap());

        let arcs = connect(&p, &q).unwrap();
        assert_eq!(arcs.len(), 1);
        assert!(matches!(arcs[0], GeodesicArc::Arc(_)));
        assert!(arcs[0].start().max_abs_diff(&p) < 1e-12);
        assert!(arcs[0].end().max_abs_diff(&q) < 1e-9);

        // translation covariance against the origin family
        let origin_arcs = connect_origin(&delta).unwrap();
        for i in 0..=8 {
            let s = arcs[0].param_end() * i as f64 / 8.0;
            let lhs = arcs[0].eval(s).unwrap();
            let rhs = p.group_mul(&origin_arcs[0].eval(s).unwrap()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        assert!(connect(&p, &p).is_err());
        assert!(connect(&p, &HPoint::origin(2)).is_err());
    }

    #[test]
    fn arc_length_of_generating_geodesic() {
        for &t in &[0.5, 1.0, 2.0] {
            let g = generating_geodesic(t, 1).unwrap();
            assert!((g.length() - (PI * t).sqrt()).abs() < 1e-14, "T = {t}");
        }
    }

    #[test]
    fn arc_has_constant_speed() {
        let q = HPoint::h1(0.7, -0.4, 1.3).unwrap();
        let arcs = connect_origin(&q).unwrap();
        let line = arcs[0].sample(1000).unwrap();
        let mut speeds = Vec::new();
        for i in 1..line.len() {
            let ds = line.params()[i] - line.params()[i - 1];
            let a = &line.points()[i - 1];
            let b = &line.points()[i];
            let mut chord = 0.0;
            for j in 0..a.dim() {
                chord += (b.x()[j] - a.x()[j]).powi(2) + (b.y()[j] - a.y()[j]).powi(2);
            }
            speeds.push(chord.sqrt() / ds);
        }
        let lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = speeds.iter().cloned().fold(0.0_f64, f64::max);
        assert!(hi - lo < 1e-6, "speed spread {}", hi - lo);
    }

    #[test]
    fn cc_distance_basic_values() {
        let o = HPoint::origin(1);
        let top = HPoint::h1(0.0, 0.0, 1.0).unwrap();
        assert!((cc_distance(&o, &top).unwrap() - PI.sqrt()).abs() < 1e-12);

        let planar = HPoint::h1(3.0, 4.0, 0.0).unwrap();
        assert_eq!(cc_distance(&o, &planar).unwrap(), 5.0);

        assert_eq!(cc_distance(&o, &o).unwrap(), 0.0);

        // symmetry
        let p = HPoint::h1(0.3, 0.2, -0.4).unwrap();
        let q = HPoint::h1(-0.9, 1.1, 0.6).unwrap();
        let d1 = cc_distance(&p, &q).unwrap();
        let d2 = cc_distance(&q, &p).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn reflection_identity_of_generating_geodesic() {
        // t(G_T(2 pi - s)) = T - t(G_T(s)) and the xy parts are complex
        // conjugates of each other
        for &t_height in &[1.0, 2.0] {
            let g = generating_geodesic(t_height, 1).unwrap();
            for i in 1..32 {
                let s = TAU * i as f64 / 32.0;
                let a = g.eval(s).unwrap();
                let b = g.eval(TAU - s).unwrap();
                assert!((b.t() - (t_height - a.t())).abs() < 1e-12);
                let conj = a.conj_j();
                assert!((b.x()[0] - conj.x()[0]).abs() < 1e-12);
                assert!((b.y()[0] - conj.y()[0]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn horizontal_segment_predicate() {
        let o = HPoint::origin(1);
        let planar = HPoint::h1(2.0, 1.0, 0.0).unwrap();
        assert!(is_horizontal_segment(&o, &planar).unwrap());

        let a = HPoint::h1(1.0, 0.0, 0.0).unwrap();
        let b = HPoint::h1(0.0, 1.0, 0.0).unwrap();
        assert!(!is_horizontal_segment(&a, &b).unwrap());

        // antipodal pair in the plane t = 0
        let p = HPoint::h1(0.7, -1.3, 0.0).unwrap();
        assert!(is_horizontal_segment(&p, &p.inverse()).unwrap());

        // a left translate of a line through the origin: the endpoints have
        // unequal t, compensated exactly by the group twist
        let a = HPoint::h1(1.0, 0.0, 0.0).unwrap();
        let b = HPoint::h1(2.0, 1.0, -2.0).unwrap();
        assert!(is_horizontal_segment(&a, &b).unwrap());
        let c = HPoint::h1(2.0, 1.0, -1.9).unwrap();
        assert!(!is_horizontal_segment(&a, &c).unwrap());
    }

    #[test]
    fn distance_between_vertically_aligned_points() {
        // pairs differing only in t reduce exactly to the t-axis case after
        // translation, so d = sqrt(pi |dt|)
        let p = HPoint::h1(0.8, -1.1, 0.4).unwrap();
        let q = HPoint::h1(0.8, -1.1, 2.4).unwrap();
        let d = cc_distance(&p, &q).unwrap();
        assert!((d - (PI * 2.0).sqrt()).abs() < 1e-12);
        // and the connecting arc is a full turn
        let arcs = connect(&p, &q).unwrap();
        assert_eq!(arcs[0].param_end(), TAU);
        assert!(arcs[0].end().max_abs_diff(&q) < 1e-12);
    }

    #[test]
    fn horizontality_residual_cases() {
        // vertical line: t' = 1, integrand 0, residual exactly 1
        let params: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let points: Vec<HPoint> = params
            .iter()
            .map(|&s| HPoint::h1(0.0, 0.0, s).unwrap())
            .collect();
        let line = Polyline::new(params, points).unwrap();
        assert_eq!(horizontality_residual(&line).unwrap(), 1.0);

        // straight horizontal segment through the origin
        let seg = GeodesicArc::Segment(
            SegmentData::new(HPoint::origin(1), HPoint::h1(1.0, 2.0, 0.0).unwrap()).unwrap(),
        );
        let line = seg.sample(100).unwrap();
        assert!(horizontality_residual(&line).unwrap() < 1e-12);

        // generating geodesic at 10^3 samples
        let g = generating_geodesic(1.0, 1).unwrap();
        let line = g.sample(1001).unwrap();
        let res = horizontality_residual(&line).unwrap();
        assert!(res < 1e-4, "residual {res}");

        let short = Polyline::new(
            vec![0.0, 1.0],
            vec![HPoint::origin(1), HPoint::h1(1.0, 0.0, 0.0).unwrap()],
        )
        .unwrap();
        assert!(horizontality_residual(&short).is_err());
    }

    #[test]
    fn arc_json_schema() {
        let g = generating_geodesic(1.0, 1).unwrap();
        let js = serde_json::to_string(&g).unwrap();
        assert!(js.starts_with(r#"{"kind":"arc","base":{"n":1,"#), "{js}");
        assert!(js.contains(r#""W_re":["#));
        assert!(js.contains(r#""W_im":[0.0]"#));
        assert!(js.contains(r#""chirality":1"#));
        let back: GeodesicArc = serde_json::from_str(&js).unwrap();
        assert_eq!(back, g);

        let seg = GeodesicArc::Segment(
            SegmentData::new(HPoint::origin(1), HPoint::h1(1.0, 2.0, 0.0).unwrap()).unwrap(),
        );
        let js = serde_json::to_string(&seg).unwrap();
        assert!(js.starts_with(r#"{"kind":"segment","a":"#), "{js}");
        let back: GeodesicArc = serde_json::from_str(&js).unwrap();
        assert_eq!(back, seg);
    }

    #[test]
    fn arc_json_rejects_invalid_payloads() {
        // chirality must be +1/-1
        let bad = r#"{"kind":"arc","base":{"n":1,"x":[0.0],"y":[0.0],"t":0.0},"W_re":[1.0],"W_im":[0.0],"chirality":0,"s_end":3.0}"#;
        assert!(serde_json::from_str::<GeodesicArc>(bad).is_err());
        // s_end beyond 2 pi
        let bad = r#"{"kind":"arc","base":{"n":1,"x":[0.0],"y":[0.0],"t":0.0},"W_re":[1.0],"W_im":[0.0],"chirality":1,"s_end":7.0}"#;
        assert!(serde_json::from_str::<GeodesicArc>(bad).is_err());
        // zero center
        let bad = r#"{"kind":"arc","base":{"n":1,"x":[0.0],"y":[0.0],"t":0.0},"W_re":[0.0],"W_im":[0.0],"chirality":1,"s_end":3.0}"#;
        assert!(serde_json::from_str::<GeodesicArc>(bad).is_err());
        // non-horizontal segment
        let bad = r#"{"kind":"segment","a":{"n":1,"x":[1.0],"y":[0.0],"t":0.0},"b":{"n":1,"x":[0.0],"y":[1.0],"t":0.0}}"#;
        assert!(serde_json::from_str::<GeodesicArc>(bad).is_err());
    }

    #[test]
    fn rotation_preserves_arc_length_and_endpoints() {
        let q = HPoint::h1(1.1, -0.3, 0.8).unwrap();
        let arcs = connect_origin(&q).unwrap();
        let theta = TorusAngle::new(vec![2.1]).unwrap();
        let rotated = arcs[0].rotate(&theta).unwrap();
        assert!((rotated.length() - arcs[0].length()).abs() < 1e-14);
        let want = q.rotate(&theta).unwrap();
        assert!(rotated.end().max_abs_diff(&want) < 1e-9);
    }

    #[test]
    fn sampling_hits_both_endpoints() {
        let g = generating_geodesic(1.0, 2).unwrap();
        let line = g.sample(33).unwrap();
        assert_eq!(line.len(), 33);
        assert_eq!(line.params()[0], 0.0);
        assert_eq!(*line.params().last().unwrap(), TAU);
        assert!(g.sample(1).is_err());
    }
}
