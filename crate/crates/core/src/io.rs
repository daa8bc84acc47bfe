//! Coverage-curve CSV.
//!
//! ```text
//! # key=value          (any number of comment lines)
//! beta_db,p_c,std_err,label[,gap]
//! -10,0.93,0.0008,mhc[,]
//! ```
//!
//! `std_err` is empty for analytic curves. The optional `gap` column holds
//! `reference - p_c` against a simulated reference curve. Numbers are written
//! in shortest round-trip form, so reading a file back is exact.

use std::fmt::Write;

use crate::coverage::CoverageCurve;
use crate::error::{Error, Result};

pub const CURVE_HEADER: &str = "beta_db,p_c,std_err,label";

fn write_rows(out: &mut String, curve: &CoverageCurve, gap: Option<&[f64]>, with_gap_column: bool) {
    for (i, (&b, &p)) in curve.beta_db().iter().zip(curve.p_c()).enumerate() {
        let se = curve
            .std_err()
            .map_or_else(String::new, |s| s[i].to_string());
        let _ = write!(out, "{b},{p},{se},{}", curve.label());
        if with_gap_column {
            out.push(',');
            if let Some(g) = gap {
                let _ = write!(out, "{}", g[i]);
            }
        }
        out.push('\n');
    }
}

/// `header` (already `#`-prefixed, possibly empty) followed by every curve.
pub fn write_curves(header: &str, curves: &[CoverageCurve]) -> String {
    let mut out = String::from(header);
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for c in curves {
        write_rows(&mut out, c, None, false);
    }
    out
}

/// Like [`write_curves`], adding `gap = reference - p_c` for every curve
/// other than `reference` itself, which is written first.
pub fn write_curves_with_gap(
    header: &str,
    reference: &CoverageCurve,
    curves: &[CoverageCurve],
) -> Result<String> {
    let mut out = String::from(header);
    out.push_str(CURVE_HEADER);
    out.push_str(",gap\n");
    write_rows(&mut out, reference, None, true);
    for c in curves {
        if c.beta_db() != reference.beta_db() {
            return Err(Error::Data(format!(
                "curve `{}` and reference `{}` use different thresholds",
                c.label(),
                reference.label()
            )));
        }
        let gap: Vec<f64> = reference
            .p_c()
            .iter()
            .zip(c.p_c())
            .map(|(r, p)| r - p)
            .collect();
        write_rows(&mut out, c, Some(&gap), true);
    }
    Ok(out)
}

/// Parses every curve in `text`, in order of first appearance of its label.
pub fn read_curves(text: &str) -> Result<Vec<CoverageCurve>> {
    struct Partial {
        label: String,
        beta: Vec<f64>,
        p: Vec<f64>,
        se: Vec<Option<f64>>,
    }
    let mut partials: Vec<Partial> = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if !line.starts_with(CURVE_HEADER) {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected header `{CURVE_HEADER}`"),
                });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !(4..=5).contains(&fields.len()) {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 4 or 5 fields, found {}", fields.len()),
            });
        }
        let num = |s: &str, what: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad {what} `{s}`"),
            })
        };
        let beta = num(fields[0], "beta_db")?;
        let p = num(fields[1], "p_c")?;
        let se = if fields[2].is_empty() {
            None
        } else {
            Some(num(fields[2], "std_err")?)
        };
        let label = fields[3];
        let part = match partials.iter_mut().position(|c| c.label == label) {
            Some(i) => &mut partials[i],
            None => {
                partials.push(Partial {
                    label: label.to_string(),
                    beta: Vec::new(),
                    p: Vec::new(),
                    se: Vec::new(),
                });
                partials.last_mut().expect("just pushed")
            }
        };
        part.beta.push(beta);
        part.p.push(p);
        part.se.push(se);
    }
    if !seen_header {
        return Err(Error::Data("no curve header found".into()));
    }
    partials
        .into_iter()
        .map(|c| {
            let se = if c.se.iter().all(Option::is_some) {
                Some(c.se.into_iter().flatten().collect())
            } else if c.se.iter().all(Option::is_none) {
                None
            } else {
                return Err(Error::Data(format!(
                    "curve `{}` has std_err on some rows only",
                    c.label
                )));
            };
            CoverageCurve::new(c.beta, c.p, se, c.label)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves() -> Vec<CoverageCurve> {
        vec![
            CoverageCurve::new(
                vec![-10.0, 0.0, 10.0],
                vec![0.9, 0.1 + 0.2, 1.0 / 3.0],
                Some(vec![0.001, 0.002, 1e-17]),
                "mhc",
            )
            .unwrap(),
            CoverageCurve::new(
                vec![-10.0, 0.0, 10.0],
                vec![0.8, 0.25, 0.0],
                None,
                "theorem1",
            )
            .unwrap(),
        ]
    }

    #[test]
    fn round_trip_is_exact() {
        let text = write_curves("# seed=3\n", &curves());
        assert!(text.starts_with("# seed=3\nbeta_db,p_c,std_err,label\n"));
        assert_eq!(read_curves(&text).unwrap(), curves());
    }

    #[test]
    fn gap_column() {
        let c = curves();
        let text = write_curves_with_gap("", &c[0], &c[1..]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "beta_db,p_c,std_err,label,gap");
        assert!(lines[1].ends_with(",mhc,"));
        assert!(lines[4].starts_with("-10,0.8,,theorem1,"));
        let gap: f64 = lines[4].rsplit(',').next().unwrap().parse().unwrap();
        assert!((gap - 0.1).abs() < 1e-12);
        assert_eq!(read_curves(&text).unwrap(), c);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = read_curves("beta_db,p_c,std_err,label\n0,0.5,,a\n1,x,,a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(read_curves("x,y\n").is_err());
        assert!(read_curves("# only comments\n").is_err());
        assert!(read_curves("beta_db,p_c,std_err,label\n0,0.5,0.1,a\n1,0.4,,a\n").is_err());
    }
}
