//! Property-based invariants for the group operations and geodesics.

use proptest::prelude::*;

use heis_geo::{
    cc_distance, connect_origin, horizontality_residual, is_horizontal_segment, skew_form,
    GeodesicArc, HPoint, TorusAngle,
};

const ALG_TOL: f64 = 1e-12;

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn point(n: usize) -> impl Strategy<Value = HPoint> {
    (
        prop::collection::vec(coord(), n),
        prop::collection::vec(coord(), n),
        coord(),
    )
        .prop_map(|(x, y, t)| HPoint::new(x, y, t).unwrap())
}

fn angle(n: usize) -> impl Strategy<Value = TorusAngle> {
    prop::collection::vec(-20.0..20.0f64, n).prop_map(|v| TorusAngle::new(v).unwrap())
}

/// Product in the complex picture: `(z, t) * (w, s)` adds the complex parts
/// and twists `t` by `2 Im<z, w>` with the Hermitian pairing. Independent of
/// the split-real implementation path.
fn mul_complex_oracle(p: &HPoint, q: &HPoint) -> HPoint {
    let n = p.dim();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut im = 0.0;
    for j in 0..n {
        x.push(p.x()[j] + q.x()[j]);
        y.push(p.y()[j] + q.y()[j]);
        // Im(z_j * conj(w_j)) = y_j u_j - x_j v_j
        im += p.y()[j] * q.x()[j] - p.x()[j] * q.y()[j];
    }
    HPoint::new(x, y, p.t() + q.t() + 2.0 * im).unwrap()
}

macro_rules! group_props {
    ($mod_name:ident, $n:expr) => {
        mod $mod_name {
            use super::*;

            proptest! {
                #[test]
                fn associativity(p in point($n), q in point($n), r in point($n)) {
                    let lhs = p.group_mul(&q).unwrap().group_mul(&r).unwrap();
                    let rhs = p.group_mul(&q.group_mul(&r).unwrap()).unwrap();
                    prop_assert!(lhs.max_abs_diff(&rhs) < ALG_TOL);
                }

                #[test]
                fn identity_and_inverse(p in point($n)) {
                    let id = HPoint::origin($n);
                    prop_assert_eq!(&id.group_mul(&p).unwrap(), &p);
                    prop_assert_eq!(&p.group_mul(&id).unwrap(), &p);
                    let prod = p.group_mul(&p.inverse()).unwrap();
                    prop_assert!(prod.max_abs_diff(&id) < ALG_TOL);
                }

                #[test]
                fn product_matches_complex_oracle(p in point($n), q in point($n)) {
                    let got = p.group_mul(&q).unwrap();
                    let want = mul_complex_oracle(&p, &q);
                    prop_assert!(got.max_abs_diff(&want) < ALG_TOL);
                }

                #[test]
                fn skew_form_antisymmetric_and_bilinear(
                    p in point($n),
                    q in point($n),
                    r in point($n),
                    a in -3.0..3.0f64,
                ) {
                    let (zp, zq, zr) = (p.xy_project(), q.xy_project(), r.xy_project());
                    let pq = skew_form(&zp, &zq).unwrap();
                    let qp = skew_form(&zq, &zp).unwrap();
                    prop_assert!((pq + qp).abs() < ALG_TOL);
                    prop_assert_eq!(skew_form(&zp, &zp).unwrap(), 0.0);
                    // linear in the first slot: (a p + r, q)
                    let combo: Vec<f64> = zp.iter().zip(zr.iter()).map(|(u, v)| a * u + v).collect();
                    let lhs = skew_form(&combo, &zq).unwrap();
                    let rhs = a * pq + skew_form(&zr, &zq).unwrap();
                    prop_assert!((lhs - rhs).abs() < 1e-10);
                }

                #[test]
                fn rotation_preserves_t_and_moduli(p in point($n), th in angle($n)) {
                    let r = p.rotate(&th).unwrap();
                    prop_assert_eq!(r.t(), p.t());
                    for j in 0..$n {
                        let before = (p.x()[j].powi(2) + p.y()[j].powi(2)).sqrt();
                        let after = (r.x()[j].powi(2) + r.y()[j].powi(2)).sqrt();
                        prop_assert!((before - after).abs() < ALG_TOL);
                    }
                }

                #[test]
                fn involutions_and_projection(p in point($n)) {
                    prop_assert_eq!(&p.conj_j().conj_j(), &p);
                    prop_assert_eq!(&p.flip().flip(), &p);
                    let tp = p.tau_project();
                    prop_assert_eq!(&tp.tau_project(), &tp);
                }

                #[test]
                fn connect_origin_round_trip(q in point($n)) {
                    // keep the target away from the degenerate loci so the
                    // unique-arc branch is the one exercised
                    prop_assume!(q.z_norm_sq() > 0.05);
                    prop_assume!(q.t().abs() > 0.05);
                    let arcs = connect_origin(&q).unwrap();
                    prop_assert_eq!(arcs.len(), 1);
                    let err = arcs[0].end().max_abs_diff(&q);
                    prop_assert!(err < 1e-9, "endpoint error {}", err);
                }

                #[test]
                fn distance_is_symmetric(p in point($n), q in point($n)) {
                    prop_assume!(p != q);
                    let d1 = cc_distance(&p, &q).unwrap();
                    let d2 = cc_distance(&q, &p).unwrap();
                    prop_assert!((d1 - d2).abs() < 1e-10 * d1.max(1.0));
                    prop_assert!(d1 > 0.0);
                }

                #[test]
                fn arcs_are_horizontal_when_sampled(q in point($n)) {
                    prop_assume!(q.z_norm_sq() > 0.05);
                    prop_assume!(q.t().abs() > 0.05);
                    let arcs = connect_origin(&q).unwrap();
                    let line = arcs[0].sample(1001).unwrap();
                    let res = horizontality_residual(&line).unwrap();
                    // O(h^2) times the curve scale; the box keeps scales modest
                    prop_assert!(res < 1e-2, "residual {}", res);
                }
            }
        }
    };
}

group_props!(h1, 1);
group_props!(h2, 2);
group_props!(h3, 3);

proptest! {
    /// Antipodal planar points are joined horizontally, and segment-ness is
    /// decided by the translated vertical gap.
    #[test]
    fn antipodal_segments_are_horizontal(x in coord(), y in coord()) {
        prop_assume!(x.abs() + y.abs() > 1e-6);
        let p = HPoint::h1(x, y, 0.0).unwrap();
        prop_assert!(is_horizontal_segment(&p, &p.inverse()).unwrap());
    }

    /// JSON round trip preserves points bit for bit.
    #[test]
    fn hpoint_json_round_trip(p in point(2)) {
        let js = serde_json::to_string(&p).unwrap();
        let back: HPoint = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, p);
    }

    /// JSON round trip preserves connecting geodesics bit for bit.
    #[test]
    fn arc_json_round_trip(q in point(2)) {
        prop_assume!(q.z_norm_sq() > 0.05);
        prop_assume!(q.t().abs() > 0.05);
        let arcs = connect_origin(&q).unwrap();
        let js = serde_json::to_string(&arcs[0]).unwrap();
        let back: GeodesicArc = serde_json::from_str(&js).unwrap();
        prop_assert_eq!(back, arcs[0].clone());
    }
}
