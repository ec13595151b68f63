//! The Heisenberg group `H^n = R^n x R^n x R` and its elementary symmetries.
//!
//! A point is written `(x, y, t)` with `x, y` in `R^n`; the pair `(x, y)` is
//! identified with `z = x + iy` in `C^n`. The group product twists the
//! vertical coordinate by a symplectic correction:
//!
//! ```text
//! (x, y, t) * (u, v, s) = (x + u, y + v, t + s + 2 * sum_i (u_i y_i - x_i v_i))
//! ```
//!
//! The dimension `n` is a runtime value carried by every point and checked at
//! operation boundaries, so one code path serves all `n >= 1`.

use serde::{Deserialize, Serialize};

use crate::error::{HeisError, Result};

/// A point of `H^n`.
///
/// Invariants (enforced on construction and deserialization): `x` and `y`
/// have equal length `n >= 1` and every entry, including `t`, is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HPointRepr", into = "HPointRepr")]
pub struct HPoint {
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
}

/// Wire format: `{"n": int, "x": [...], "y": [...], "t": real}`.
#[derive(Serialize, Deserialize)]
struct HPointRepr {
    n: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
}

impl From<HPoint> for HPointRepr {
    fn from(p: HPoint) -> Self {
        HPointRepr {
            n: p.x.len(),
            x: p.x,
            y: p.y,
            t: p.t,
        }
    }
}

impl TryFrom<HPointRepr> for HPoint {
    type Error = HeisError;

    fn try_from(r: HPointRepr) -> Result<Self> {
        if r.n != r.x.len() {
            return Err(HeisError::InvalidPoint(format!(
                "declared n = {} but x has {} entries",
                r.n,
                r.x.len()
            )));
        }
        HPoint::new(r.x, r.y, r.t)
    }
}

impl HPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, t: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(HeisError::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.is_empty() {
            return Err(HeisError::InvalidPoint("dimension must be >= 1".into()));
        }
        if !t.is_finite() || x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(HeisError::InvalidPoint("coordinates must be finite".into()));
        }
        Ok(HPoint { x, y, t })
    }

    /// The identity element of `H^n`.
    pub fn origin(n: usize) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        HPoint {
            x: vec![0.0; n],
            y: vec![0.0; n],
            t: 0.0,
        }
    }

    /// Convenience constructor for `H^1`.
    pub fn h1(x: f64, y: f64, t: f64) -> Result<Self> {
        HPoint::new(vec![x], vec![y], t)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `|z|^2 = |x|^2 + |y|^2`, the squared norm of the complex part.
    pub fn z_norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>() + self.y.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn is_origin(&self) -> bool {
        self.t == 0.0 && self.x.iter().all(|&v| v == 0.0) && self.y.iter().all(|&v| v == 0.0)
    }

    fn check_dim(&self, other: &HPoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(HeisError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Heisenberg product `self * q`.
    pub fn group_mul(&self, q: &HPoint) -> Result<HPoint> {
        self.check_dim(q)?;
        Ok(self.mul_unchecked(q))
    }

    /// Product without the dimension check, for internal call sites where
    /// dimensions agree by construction.
    pub(crate) fn mul_unchecked(&self, q: &HPoint) -> HPoint {
        debug_assert_eq!(self.dim(), q.dim());
        let n = self.dim();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        let mut twist = 0.0;
        for i in 0..n {
            x.push(self.x[i] + q.x[i]);
            y.push(self.y[i] + q.y[i]);
            twist += q.x[i] * self.y[i] - self.x[i] * q.y[i];
        }
        HPoint {
            x,
            y,
            t: self.t + q.t + 2.0 * twist,
        }
    }

    /// Group inverse `(-x, -y, -t)`.
    pub fn inverse(&self) -> HPoint {
        HPoint {
            x: self.x.iter().map(|v| -v).collect(),
            y: self.y.iter().map(|v| -v).collect(),
            t: -self.t,
        }
    }

    /// Left translation `tau_p(q) = p * q`; an isometry of `H^n`.
    pub fn left_translate(&self, q: &HPoint) -> Result<HPoint> {
        self.group_mul(q)
    }

    /// Rotation about the t-axis: each `z_j` is multiplied by `e^{i theta_j}`,
    /// `t` is unchanged.
    pub fn rotate(&self, theta: &TorusAngle) -> Result<HPoint> {
        if self.dim() != theta.dim() {
            return Err(HeisError::DimensionMismatch {
                left: self.dim(),
                right: theta.dim(),
            });
        }
        let n = self.dim();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let (sin, cos) = theta.angles()[i].sin_cos();
            x.push(cos * self.x[i] - sin * self.y[i]);
            y.push(sin * self.x[i] + cos * self.y[i]);
        }
        Ok(HPoint { x, y, t: self.t })
    }

    /// Complex conjugation `J: (z, t) -> (conj z, t)`, i.e. `(x, -y, t)`.
    pub fn conj_j(&self) -> HPoint {
        HPoint {
            x: self.x.clone(),
            y: self.y.iter().map(|v| -v).collect(),
            t: self.t,
        }
    }

    /// The involution `(x, y, t) -> (x, -y, -t)`.
    pub fn flip(&self) -> HPoint {
        HPoint {
            x: self.x.clone(),
            y: self.y.iter().map(|v| -v).collect(),
            t: -self.t,
        }
    }

    /// Projection onto the subspace `{y = 0}`: `(x + iy, t) -> (x + i0, t)`.
    /// Idempotent.
    pub fn tau_project(&self) -> HPoint {
        HPoint {
            x: self.x.clone(),
            y: vec![0.0; self.dim()],
            t: self.t,
        }
    }

    /// Projection onto the first `2n` coordinates, returned as `(x, y)`
    /// concatenated.
    pub fn xy_project(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.dim());
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out
    }

    /// Largest absolute coordinate difference to another point.
    pub fn max_abs_diff(&self, other: &HPoint) -> f64 {
        let mut m: f64 = (self.t - other.t).abs();
        for i in 0..self.dim().min(other.dim()) {
            m = m.max((self.x[i] - other.x[i]).abs());
            m = m.max((self.y[i] - other.y[i]).abs());
        }
        m
    }
}

/// The skew-symmetric bilinear form `((x,y),(u,v)) = sum_i (u_i y_i - x_i v_i)`
/// on `R^{2n}`; both arguments are `(x, y)` concatenated.
///
/// This is exactly the correction appearing in the group product:
/// `t(p * q) - t(p) - t(q) = 2 * skew_form(xy(p), xy(q))`.
pub fn skew_form(z: &[f64], w: &[f64]) -> Result<f64> {
    if z.len() != w.len() {
        return Err(HeisError::DimensionMismatch {
            left: z.len(),
            right: w.len(),
        });
    }
    if !z.len().is_multiple_of(2) || z.is_empty() {
        return Err(HeisError::InvalidArgument(format!(
            "skew_form needs vectors of even positive length, got {}",
            z.len()
        )));
    }
    let n = z.len() / 2;
    let (x, y) = z.split_at(n);
    let (u, v) = w.split_at(n);
    let mut acc = 0.0;
    for i in 0..n {
        acc += u[i] * y[i] - x[i] * v[i];
    }
    Ok(acc)
}

/// An element of the torus `T^n = [0, 2pi)^n` acting on `H^n` by rotation
/// about the t-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusAngle {
    theta: Vec<f64>,
}

impl TorusAngle {
    /// Builds a torus angle, reducing every entry modulo `2pi` into `[0, 2pi)`.
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(HeisError::InvalidArgument("torus angle needs n >= 1".into()));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(HeisError::InvalidArgument("torus angle must be finite".into()));
        }
        let tau = std::f64::consts::TAU;
        let theta = theta
            .into_iter()
            .map(|v| {
                let r = v.rem_euclid(tau);
                if r >= tau {
                    0.0
                } else {
                    r
                }
            })
            .collect();
        Ok(TorusAngle { theta })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        TorusAngle { theta: vec![0.0; n] }
    }

    /// Same angle in every coordinate.
    pub fn diagonal(n: usize, angle: f64) -> Result<Self> {
        TorusAngle::new(vec![angle; n])
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    /// Pointwise negation on the torus.
    pub fn neg(&self) -> TorusAngle {
        TorusAngle::new(self.theta.iter().map(|v| -v).collect()).expect("finite")
    }

    /// Pointwise sum on the torus.
    pub fn add(&self, other: &TorusAngle) -> Result<TorusAngle> {
        if self.dim() != other.dim() {
            return Err(HeisError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        TorusAngle::new(
            self.theta
                .iter()
                .zip(other.theta.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}
