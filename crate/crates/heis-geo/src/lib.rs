//! Computational sub-Riemannian geometry on the Heisenberg group `H^n`.
//!
//! The crate provides, for every dimension `n >= 1`:
//!
//! * the group structure and its symmetries ([`group`]): product, inverse,
//!   rotations about the t-axis, conjugation, flip, projections;
//! * geodesics of the Carnot-Caratheodory metric ([`geodesic`]): the
//!   two-parameter spiral family and straight horizontal segments, connection
//!   of arbitrary point pairs through a bracketed-Newton inversion of the
//!   vertical-gap profile, exact arc lengths and distances, horizontality
//!   diagnostics for sampled curves;
//! * the iterated geodetic-hull trajectory ([`hull`]): the radius recursion
//!   whose geometric divergence certifies that repeated geodesic closures of
//!   two vertically aligned points exhaust the whole group, with a dual-route
//!   (closed form vs. group operations) consistency check, plus sampling and
//!   symmetry audits of the geodesic bubble;
//! * geodesic-convexity testing of scalar functions ([`convexity`]):
//!   midpoint-inequality audits along geodesics, a seeded randomized witness
//!   scanner, and a sublevel-set probe, with replayable violation witnesses.
//!
//! Everything is plain data and pure functions: no global state, all
//! operations safe to call concurrently, all randomized procedures seeded and
//! deterministic.
//!
//! ```
//! use heis_geo::{cc_distance, HPoint};
//!
//! let origin = HPoint::origin(1);
//! let top = HPoint::h1(0.0, 0.0, 1.0).unwrap();
//! let d = cc_distance(&origin, &top).unwrap();
//! assert!((d - std::f64::consts::PI.sqrt()).abs() < 1e-12);
//! ```

pub mod convexity;
pub mod error;
pub mod fmt;
pub mod geodesic;
pub mod group;
pub mod hull;
pub mod parse;
pub mod polyline;
pub mod rng;

pub use convexity::{
    check_pair_exits, convexity_along, scan_for_witness, sublevel_probe, ConvexityReport,
    ConvexityWitness, ScalarField, SublevelExit, SublevelReport, Verdict,
};
pub use error::{HeisError, Result};
pub use fmt::fmt_f64;
pub use geodesic::{
    cc_distance, cc_distance_with_tol, connect, connect_origin, connect_origin_with_tol,
    connect_with_tol, generating_geodesic, horizontality_residual, is_horizontal_segment, mu,
    solve_mu, ArcData, Chirality, GeodesicArc, SegmentData, DEFAULT_MU_TOL,
};
pub use group::{skew_form, HPoint, TorusAngle};
pub use hull::{
    bubble_point, bubble_symmetry_check, radius_recursion, BubbleSymmetryReport,
    GrowthCertificate, GrowthRow, HullSequence, GROWTH_CONSTANT,
};
pub use parse::{parse_arc_json, parse_hpoint_json, parse_point};
pub use polyline::Polyline;
pub use rng::SplitMix64;
