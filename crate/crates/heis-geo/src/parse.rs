//! Parsers for the external text interfaces.
//!
//! All parsers are total: any byte sequence yields `Ok` or a [`HeisError`],
//! never a panic. They are the entry points exercised by the fuzz targets.

use crate::error::{HeisError, Result};
use crate::geodesic::GeodesicArc;
use crate::group::HPoint;

/// Parses the JSON form `{"n": int, "x": [...], "y": [...], "t": real}`,
/// enforcing the point invariants.
pub fn parse_hpoint_json(input: &str) -> Result<HPoint> {
    serde_json::from_str(input).map_err(|e| HeisError::Parse(e.to_string()))
}

/// Parses a geodesic in its JSON form (`"kind": "arc" | "segment"`),
/// enforcing the arc and segment invariants.
pub fn parse_arc_json(input: &str) -> Result<GeodesicArc> {
    serde_json::from_str(input).map_err(|e| HeisError::Parse(e.to_string()))
}

/// Parses a point from one of three forms:
///
/// * `origin` — the identity, with dimension `dim_hint` (default 1);
/// * a JSON object in the `parse_hpoint_json` schema;
/// * a tuple literal `x1,..,xn,y1,..,yn,t` (parentheses optional) with an odd
///   number `2n + 1 >= 3` of comma-separated floats.
pub fn parse_point(input: &str, dim_hint: Option<usize>) -> Result<HPoint> {
    let s = input.trim();
    if s.eq_ignore_ascii_case("origin") {
        let n = dim_hint.unwrap_or(1);
        if n == 0 {
            return Err(HeisError::Parse("origin needs dimension >= 1".into()));
        }
        return Ok(HPoint::origin(n));
    }
    if s.starts_with('{') {
        return parse_hpoint_json(s);
    }
    let inner = s
        .strip_prefix('(')
        .and_then(|rest| rest.strip_suffix(')'))
        .unwrap_or(s);
    let values: Vec<f64> = inner
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| HeisError::Parse(format!("bad coordinate {:?}", tok.trim())))
        })
        .collect::<Result<_>>()?;
    if values.len() < 3 || values.len().is_multiple_of(2) {
        return Err(HeisError::Parse(format!(
            "point literal needs an odd number (2n+1 >= 3) of coordinates, got {}",
            values.len()
        )));
    }
    let n = values.len() / 2;
    let t = values[2 * n];
    HPoint::new(values[..n].to_vec(), values[n..2 * n].to_vec(), t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_forms() {
        let p = parse_point("(1,0,0)", None).unwrap();
        assert_eq!(p, HPoint::h1(1.0, 0.0, 0.0).unwrap());
        let p = parse_point(" 1, 0.5 , -2e-1 ", None).unwrap();
        assert_eq!(p, HPoint::h1(1.0, 0.5, -0.2).unwrap());
        let p = parse_point("(1,2,0.5,-1,3)", None).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.x(), &[1.0, 2.0]);
        assert_eq!(p.y(), &[0.5, -1.0]);
        assert_eq!(p.t(), 3.0);
    }

    #[test]
    fn origin_uses_hint() {
        assert_eq!(parse_point("origin", None).unwrap(), HPoint::origin(1));
        assert_eq!(parse_point("ORIGIN", Some(3)).unwrap(), HPoint::origin(3));
        assert!(parse_point("origin", Some(0)).is_err());
    }

    #[test]
    fn json_form() {
        let p = parse_point(r#"{"n":1,"x":[0.0],"y":[0.0],"t":1.0}"#, None).unwrap();
        assert_eq!(p, HPoint::h1(0.0, 0.0, 1.0).unwrap());
        assert!(parse_point(r#"{"n":2,"x":[0.0],"y":[0.0],"t":1.0}"#, None).is_err());
    }

    #[test]
    fn rejects_garbage_without_panicking() {
        for bad in [
            "",
            "(",
            ")",
            "(1,2)",
            "1,2",
            "1,2,3,4",
            "a,b,c",
            "(1,,3)",
            "nan,0,0",
            "inf,0,0",
            "1,0,inf",
            "{\"n\":1}",
            "{broken",
            "origin extra",
        ] {
            assert!(parse_point(bad, None).is_err(), "{bad:?}");
        }
    }
}
