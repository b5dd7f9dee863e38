//! Text forms of sets, lines and viewports shared by the command line and
//! the HTTP service, and the JSON writer used for all output.
//!
//! ```text
//! ellipse:b=2    psphere:p=0.5    circle
//! slope=2        slope=2,intercept=-1    normal=1,0,0.5   (a x + b y = c)
//! -4:4:-3:3      (xmin:xmax:ymin:ymax)
//! 256x128        (width x height)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConstraintSet, Ellipse, GeometryError, Line, PSphere, Point2};
use crate::Region;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ParseError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

fn num(s: &str, what: &str) -> Result<f64, ParseError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(format!("{what}: expected a finite number, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetSpec {
    Ellipse { b: f64 },
    Psphere { p: f64 },
    Circle,
}

impl SetSpec {
    pub fn build(&self) -> Result<ConstraintSet<f64>, GeometryError> {
        Ok(match *self {
            Self::Ellipse { b } => Ellipse::new(b)?.into(),
            Self::Psphere { p } => PSphere::new(p)?.into(),
            Self::Circle => PSphere::new(2.0)?.into(),
        })
    }
}

impl FromStr for SetSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        if s == "circle" {
            return Ok(Self::Circle);
        }
        let spec = if let Some(v) = s.strip_prefix("ellipse:b=") {
            Self::Ellipse { b: num(v, "ellipse b")? }
        } else if let Some(v) = s.strip_prefix("psphere:p=") {
            Self::Psphere { p: num(v, "psphere p")? }
        } else {
            return err(format!(
                "unknown set {s:?}; expected ellipse:b=<b>, psphere:p=<p> or circle"
            ));
        };
        spec.build().map_err(|e| ParseError(e.to_string()))?;
        Ok(spec)
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ellipse { b } => write!(f, "ellipse:b={b}"),
            Self::Psphere { p } => write!(f, "psphere:p={p}"),
            Self::Circle => f.write_str("circle"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LineSpec {
    /// `y = slope * x + intercept`.
    Slope { slope: f64, intercept: f64 },
    /// `a x + b y = c`.
    Normal { a: f64, b: f64, c: f64 },
}

impl LineSpec {
    pub fn build(&self) -> Result<Line<f64>, GeometryError> {
        match *self {
            Self::Slope { slope, intercept } => Ok(Line::from_slope_intercept(slope, intercept)),
            Self::Normal { a, b, c } => Line::from_normal(a, b, c),
        }
    }
}

impl FromStr for LineSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("normal=") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 3 {
                return err("normal form needs three numbers: normal=a,b,c");
            }
            let spec = Self::Normal {
                a: num(parts[0], "normal a")?,
                b: num(parts[1], "normal b")?,
                c: num(parts[2], "normal c")?,
            };
            spec.build().map_err(|e| ParseError(e.to_string()))?;
            return Ok(spec);
        }
        let mut slope = None;
        let mut intercept = 0.0;
        for part in s.split(',') {
            match part.trim().split_once('=') {
                Some(("slope", v)) => slope = Some(num(v, "slope")?),
                Some(("intercept", v)) => intercept = num(v, "intercept")?,
                _ => return err(format!("unknown line {s:?}; expected slope=<m>[,intercept=<c>] or normal=a,b,c")),
            }
        }
        match slope {
            Some(slope) => Ok(Self::Slope { slope, intercept }),
            None => err("line needs slope=<m> or normal=a,b,c"),
        }
    }
}

impl fmt::Display for LineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Slope { slope, intercept } => write!(f, "slope={slope},intercept={intercept}"),
            Self::Normal { a, b, c } => write!(f, "normal={a},{b},{c}"),
        }
    }
}

pub fn parse_region(s: &str) -> Result<Region<f64>, ParseError> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if parts.len() != 4 {
        return err("region must be xmin:xmax:ymin:ymax");
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| num(p, "region"))
        .collect::<Result<_, _>>()?;
    Region::new(v[0], v[1], v[2], v[3]).map_err(|e| ParseError(e.into()))
}

pub fn format_region(r: &Region<f64>) -> String {
    format!("{}:{}:{}:{}", r.xmin, r.xmax, r.ymin, r.ymax)
}

pub fn parse_resolution(s: &str) -> Result<(usize, usize), ParseError> {
    let (w, h) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| ParseError("resolution must be <width>x<height>".into()))?;
    let parse = |v: &str| match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => err(format!("resolution: expected a positive integer, got {v:?}")),
    };
    Ok((parse(w)?, parse(h)?))
}

pub fn parse_point(s: &str) -> Result<Point2<f64>, ParseError> {
    let (x, y) = s
        .trim()
        .split_once(',')
        .ok_or_else(|| ParseError("point must be x,y".into()))?;
    Ok(Point2::new(num(x, "point x")?, num(y, "point y")?))
}

/// JSON with every float written with 17 significant digits.
pub mod json {
    use serde::Serialize;
    use serde_json::ser::{Formatter, Serializer};
    use std::io;

    struct Digits17;

    impl Formatter for Digits17 {
        fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
            write!(w, "{v:.16e}")
        }

        fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
            self.write_f64(w, v as f64)
        }
    }

    pub fn to_vec<S: Serialize + ?Sized>(value: &S) -> serde_json::Result<Vec<u8>> {
        let mut out = Vec::new();
        let mut ser = Serializer::with_formatter(&mut out, Digits17);
        value.serialize(&mut ser)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn to_string<S: Serialize + ?Sized>(value: &S) -> serde_json::Result<String> {
        to_vec(value).map(|v| String::from_utf8(v).expect("JSON output is UTF-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_specs() {
        assert_eq!("ellipse:b=2".parse(), Ok(SetSpec::Ellipse { b: 2.0 }));
        assert_eq!("psphere:p=0.5".parse(), Ok(SetSpec::Psphere { p: 0.5 }));
        assert_eq!("circle".parse(), Ok(SetSpec::Circle));
        assert!("ellipse:b=-1".parse::<SetSpec>().is_err());
        assert!("ellipse:b=nan".parse::<SetSpec>().is_err());
        assert!("square".parse::<SetSpec>().is_err());
        let s = SetSpec::Psphere { p: 1.0 / 3.0 };
        assert_eq!(s.to_string().parse(), Ok(s));
    }

    #[test]
    fn line_specs() {
        assert_eq!(
            "slope=2".parse(),
            Ok(LineSpec::Slope { slope: 2.0, intercept: 0.0 })
        );
        assert_eq!(
            "slope=1,intercept=10".parse(),
            Ok(LineSpec::Slope { slope: 1.0, intercept: 10.0 })
        );
        assert_eq!(
            "normal=1,0,0.5".parse(),
            Ok(LineSpec::Normal { a: 1.0, b: 0.0, c: 0.5 })
        );
        assert!("normal=0,0,1".parse::<LineSpec>().is_err());
        assert!("intercept=3".parse::<LineSpec>().is_err());
        let l = LineSpec::Slope { slope: -0.1, intercept: 3.25 };
        assert_eq!(l.to_string().parse(), Ok(l));
    }

    #[test]
    fn viewport_and_resolution() {
        let r = parse_region("-4:4:-3:3").unwrap();
        assert_eq!((r.xmin, r.xmax, r.ymin, r.ymax), (-4.0, 4.0, -3.0, 3.0));
        assert_eq!(parse_region(&format_region(&r)), Ok(r));
        assert!(parse_region("1:1:0:1").is_err());
        assert_eq!(parse_resolution("256x128"), Ok((256, 128)));
        assert!(parse_resolution("0x5").is_err());
        assert_eq!(parse_point("0.5,-1"), Ok(Point2::new(0.5, -1.0)));
    }

    #[test]
    fn json_digits() {
        let s = json::to_string(&[0.1f64, -2.0, 1.0 / 3.0]).unwrap();
        assert_eq!(
            s,
            "[1.0000000000000001e-1,-2.0000000000000000e0,3.3333333333333331e-1]\n"
        );
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, -2.0, 1.0 / 3.0]);
    }
}
