//! Deterministic serialization: JSON with sorted keys and floats rounded
//! to 12 significant digits, plus fixed-column CSV for plot-ready data.
//! Two runs over the same config must produce byte-identical files, no
//! matter how many workers computed them.

use serde::Serialize;
use serde_json::Value;

use crate::detect::ReturnSet;
use crate::error::{Error, Result};
use crate::space::Point;

pub const FLOAT_DIGITS: i32 = 12;

/// Round to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let places = (digits - 1).max(0) as usize;
    format!("{x:.places$e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    let rounded = round_sig(f, FLOAT_DIGITS);
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *v = Value::Number(num);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                round_value(item);
            }
        }
        Value::Object(map) => {
            for (_, item) in map.iter_mut() {
                round_value(item);
            }
        }
        _ => {}
    }
}

/// Serialize with sorted keys (serde_json's map is ordered) and rounded
/// floats; the output is canonical for a given value.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Config(e.to_string()))?;
    round_value(&mut v);
    serde_json::to_string_pretty(&v).map_err(|e| Error::Config(e.to_string()))
}

/// Plot coordinates for a point: two numbers and a component tag.
pub fn plot_coords(p: &Point) -> (f64, f64, String) {
    match p {
        Point::Circle { angle } => (*angle, 0.0, "circle".into()),
        Point::Annulus { radial, angle } => (radial.radius(), *angle, "annulus".into()),
        Point::Torus { a, b } => (*a, *b, "torus".into()),
        Point::Stack { ring, angle } => (ring.radius(), *angle, ring.describe()),
        Point::UnionTorus { a, b } => (*a, *b, "torus-part".into()),
        Point::UnionCircle { angle } => (*angle, 0.0, "circle-part".into()),
        Point::Seq(s) => (s.offset() as f64, 0.0, s.window(8)),
    }
}

fn fmt_cell(x: f64) -> String {
    format!("{}", round_sig(x, FLOAT_DIGITS))
}

/// Orbit rows: t, coord1, coord2, tag.
pub fn orbit_csv(rows: &[(i64, Point)]) -> String {
    let mut out = String::from("t,coord1,coord2,tag\n");
    for (t, p) in rows {
        let (a, b, tag) = plot_coords(p);
        out.push_str(&format!("{t},{},{},{tag}\n", fmt_cell(a), fmt_cell(b)));
    }
    out
}

/// Distance profile rows: t, distance.
pub fn profile_csv(rows: &[(i64, f64)]) -> String {
    let mut out = String::from("t,distance\n");
    for (t, d) in rows {
        out.push_str(&format!("{t},{}\n", fmt_cell(*d)));
    }
    out
}

/// Hits of a return set with the entourage radius they satisfied.
pub fn return_set_csv(rs: &ReturnSet) -> String {
    let mut out = String::from("t,epsilon\n");
    for t in &rs.hits {
        out.push_str(&format!("{t},{}\n", fmt_cell(rs.epsilon)));
    }
    out
}

/// Square distance matrix, row-major, bare numbers.
pub fn matrix_csv(m: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| fmt_cell(*x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SeqPoint;
    use std::collections::BTreeMap;

    #[test]
    fn rounding_clips_to_twelve_significant_digits() {
        assert_eq!(round_sig(0.1234567890123456, 12), 0.123456789012);
        assert_eq!(round_sig(-987654.3210987654, 12), -987654.321099);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(round_sig(1e-300, 12), 1e-300);
    }

    #[test]
    fn canonical_json_sorts_keys_and_rounds() {
        let mut m = BTreeMap::new();
        m.insert("zeta", 0.30000000000000004);
        m.insert("alpha", 1.0);
        let s = canonical_json(&m).unwrap();
        let za = s.find("\"zeta\"").unwrap();
        let aa = s.find("\"alpha\"").unwrap();
        assert!(aa < za);
        assert!(s.contains("0.3"));
        assert!(!s.contains("0.30000000000000004"));
    }

    #[test]
    fn csv_layouts_are_fixed() {
        let rows = vec![(0i64, Point::circle(0.25)), (1, Point::circle(0.5))];
        let csv = orbit_csv(&rows);
        assert!(csv.starts_with("t,coord1,coord2,tag\n"));
        assert!(csv.contains("0,0.25,0,circle\n"));

        let seq = Point::Seq(SeqPoint::block(crate::space::Fill::Zeros, &[1], 3));
        let (a, _, tag) = plot_coords(&seq);
        assert_eq!(a, 3.0);
        assert_eq!(tag.len(), 17);

        let prof = profile_csv(&[(0, 0.5), (1, 0.1234567890123456)]);
        assert!(prof.contains("1,0.123456789012\n"));
    }
}
