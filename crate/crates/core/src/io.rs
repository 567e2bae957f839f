//! Text formats: point files and result files.
//!
//! A point file starts with the line `bpst v1` followed by one point per
//! line, `x y C` with decimal coordinates and `C` either `R` or `B`. Blank
//! lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::{Color, Point};
use crate::instance::Instance;
use crate::verify::TreeReport;

pub const POINT_HEADER: &str = "bpst v1";
pub const RESULT_HEADER: &str = "bpst-result v1";

/// Most fractional digits a coordinate may carry.
const MAX_DIGITS: u32 = 15;

/// Parses a plain decimal (`-12.5`, `3`, `.25`) into a mantissa and its
/// number of fractional digits.
pub fn parse_decimal(s: &str) -> Option<(i128, u32)> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let frac = frac.trim_end_matches('0');
    let digits = u32::try_from(frac.len()).ok()?;
    if digits > MAX_DIGITS || int.len() > 30 {
        return None;
    }
    let mut m: i128 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        m = m.checked_mul(10)?.checked_add(i128::from(b - b'0'))?;
    }
    Some((if neg { -m } else { m }, digits))
}

/// `v / 10^scale` with no trailing zeros.
pub fn format_decimal(v: i128, scale: u32) -> String {
    let neg = v < 0;
    let digits = v.unsigned_abs().to_string();
    let scale = scale as usize;
    let (int, frac) = if digits.len() > scale {
        (digits[..digits.len() - scale].to_string(), digits[digits.len() - scale..].to_string())
    } else {
        ("0".to_string(), format!("{digits:0>scale$}"))
    };
    let frac = frac.trim_end_matches('0');
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&int);
    if !frac.is_empty() {
        out.push('.');
        out.push_str(frac);
    }
    out
}

pub fn parse_points(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, POINT_HEADER)) => {}
        Some((line, other)) => {
            return Err(Error::Parse { line, message: format!("expected header `{POINT_HEADER}`, found `{other}`") })
        }
        None => return Err(Error::Parse { line: 1, message: format!("missing header `{POINT_HEADER}`") }),
    }
    let mut raw: Vec<(i128, u32, i128, u32, Color, usize)> = Vec::new();
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [x, y, c] = toks.as_slice() else {
            return Err(Error::Parse { line, message: format!("expected `x y color`, found {} fields", toks.len()) });
        };
        let bad = |t: &str| Error::Parse { line, message: format!("bad coordinate `{t}`") };
        let (xm, xd) = parse_decimal(x).ok_or_else(|| bad(x))?;
        let (ym, yd) = parse_decimal(y).ok_or_else(|| bad(y))?;
        let color = match *c {
            "R" => Color::Red,
            "B" => Color::Blue,
            other => return Err(Error::Parse { line, message: format!("bad color `{other}`, expected R or B") }),
        };
        raw.push((xm, xd, ym, yd, color, line));
    }
    let scale = raw.iter().map(|r| r.1.max(r.3)).max().unwrap_or(0);
    let mut pts = Vec::with_capacity(raw.len());
    for (xm, xd, ym, yd, color, line) in raw {
        let lift = |m: i128, d: u32| -> Result<i64> {
            m.checked_mul(10i128.pow(scale - d))
                .and_then(|v| i64::try_from(v).ok())
                .ok_or_else(|| Error::Parse { line, message: "coordinate out of range".into() })
        };
        pts.push((Point::new(lift(xm, xd)?, lift(ym, yd)?), color));
    }
    Instance::new(pts, scale)
}

pub fn render_points(inst: &Instance) -> String {
    let mut out = String::with_capacity(16 * inst.len() + 8);
    out.push_str(POINT_HEADER);
    out.push('\n');
    for p in inst.points() {
        let _ = writeln!(
            out,
            "{} {} {}",
            format_decimal(p.pos.x.into(), inst.scale()),
            format_decimal(p.pos.y.into(), inst.scale()),
            p.color.tag()
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Exact,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Exact => "exact",
        }
    }
}

/// Everything `solve` or `exact` reports. Squared lengths are exact
/// decimals in the instance's units; the plain lengths are rounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultFile {
    pub mode: Mode,
    pub n: usize,
    pub scale: u32,
    pub lambda2: i128,
    pub bottleneck2: i128,
    pub ratio_bound_ok: bool,
    pub spanning: bool,
    pub bichromatic: bool,
    pub planar: bool,
    pub components: usize,
    pub edges: Vec<(usize, usize)>,
}

impl ResultFile {
    pub fn new(mode: Mode, inst: &Instance, lambda2: i128, edges: Vec<(usize, usize)>, report: &TreeReport) -> Self {
        Self {
            mode,
            n: inst.len(),
            scale: inst.scale(),
            lambda2,
            bottleneck2: report.bottleneck2,
            ratio_bound_ok: report.bottleneck2 <= 128 * lambda2,
            spanning: report.is_spanning,
            bichromatic: report.is_bichromatic,
            planar: report.is_planar,
            components: report.component_count,
            edges,
        }
    }

    pub fn verified(&self) -> bool {
        self.spanning && self.bichromatic && self.planar
    }

    fn length(&self, sq: i128) -> String {
        let unit = 10f64.powi(self.scale as i32);
        format!("{:.9}", (sq as f64).sqrt() / unit)
    }

    pub fn render(&self) -> String {
        let s2 = 2 * self.scale;
        let mut out = String::new();
        let _ = writeln!(out, "{RESULT_HEADER}");
        let _ = writeln!(out, "mode {}", self.mode.as_str());
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "scale {}", self.scale);
        let _ = writeln!(out, "lambda2 {}", format_decimal(self.lambda2, s2));
        let _ = writeln!(out, "lambda {}", self.length(self.lambda2));
        let _ = writeln!(out, "bottleneck2 {}", format_decimal(self.bottleneck2, s2));
        let _ = writeln!(out, "bottleneck {}", self.length(self.bottleneck2));
        let _ = writeln!(out, "ratio_bound_ok {}", self.ratio_bound_ok);
        let _ = writeln!(out, "spanning {}", self.spanning);
        let _ = writeln!(out, "bichromatic {}", self.bichromatic);
        let _ = writeln!(out, "planar {}", self.planar);
        let _ = writeln!(out, "components {}", self.components);
        let _ = writeln!(out, "edges {}", self.edges.len());
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Reader { lines: text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect(), next: 0 };
        match r.lines.first() {
            Some((_, RESULT_HEADER)) => r.next = 1,
            _ => return Err(Error::Parse { line: 1, message: format!("expected header `{RESULT_HEADER}`") }),
        }
        let (line, mode) = r.field("mode")?;
        let mode = match mode {
            "solve" => Mode::Solve,
            "exact" => Mode::Exact,
            _ => return Err(Error::Parse { line, message: format!("bad mode `{mode}`") }),
        };
        let n = r.value("n")?;
        let scale: u32 = r.value("scale")?;
        let lambda2 = r.squared("lambda2", scale)?;
        r.field("lambda")?;
        let bottleneck2 = r.squared("bottleneck2", scale)?;
        r.field("bottleneck")?;
        let ratio_bound_ok = r.value("ratio_bound_ok")?;
        let spanning = r.value("spanning")?;
        let bichromatic = r.value("bichromatic")?;
        let planar = r.value("planar")?;
        let components = r.value("components")?;
        let m: usize = r.value("edges")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, l) = r.line()?;
            let (a, b) =
                l.split_once(' ').ok_or_else(|| Error::Parse { line, message: "expected `a b`".into() })?;
            edges.push((parse_num(line, a)?, parse_num(line, b)?));
        }
        Ok(Self { mode, n, scale, lambda2, bottleneck2, ratio_bound_ok, spanning, bichromatic, planar, components, edges })
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, message: format!("bad value `{v}`") })
}

struct Reader<'t> {
    lines: Vec<(usize, &'t str)>,
    next: usize,
}

impl<'t> Reader<'t> {
    fn line(&mut self) -> Result<(usize, &'t str)> {
        let l = self.lines.get(self.next).copied();
        self.next += 1;
        l.ok_or(Error::Parse { line: self.next, message: "unexpected end of file".into() })
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'t str)> {
        let (line, l) = self.line()?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok((line, v)),
            _ => Err(Error::Parse { line, message: format!("expected `{key}`") }),
        }
    }

    fn value<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, v) = self.field(key)?;
        parse_num(line, v)
    }

    fn squared(&mut self, key: &str, scale: u32) -> Result<i128> {
        let (line, v) = self.field(key)?;
        match parse_decimal(v) {
            Some((m, d)) if d <= 2 * scale => Ok(m * 10i128.pow(2 * scale - d)),
            _ => Err(Error::Parse { line, message: format!("bad value `{v}`") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_tree;

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("-12.50"), Some((-125, 1)));
        assert_eq!(parse_decimal("3"), Some((3, 0)));
        assert_eq!(parse_decimal(".25"), Some((25, 2)));
        assert_eq!(parse_decimal("1e3"), None);
        assert_eq!(parse_decimal("-"), None);
        assert_eq!(parse_decimal("."), None);
        assert_eq!(format_decimal(-125, 1), "-12.5");
        assert_eq!(format_decimal(5, 3), "0.005");
        assert_eq!(format_decimal(1000, 3), "1");
        assert_eq!(format_decimal(0, 2), "0");
    }

    #[test]
    fn point_file_round_trip() {
        let text = "bpst v1\n0 0 R\n1.5 -2.25 B\n3 0.001 R\n";
        let inst = parse_points(text).unwrap();
        assert_eq!(inst.scale(), 3);
        assert_eq!(inst.pos(1), Point::new(1500, -2250));
        assert_eq!(render_points(&inst), text);
        assert_eq!(parse_points(&render_points(&inst)).unwrap(), inst);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = parse_points("bpst v1\n0 0 R\n1 1 G\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, message: "bad color `G`, expected R or B".into() });
        assert!(matches!(parse_points("0 0 R\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_points("bpst v1\n0 x R\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_points("bpst v1\n0 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_points("bpst v1\n"), Err(Error::EmptyInstance)));
        assert!(matches!(parse_points("bpst v1\n1 1 R\n1.0 1 B\n"), Err(Error::DuplicatePoint { first: 0, second: 1 })));
    }

    #[test]
    fn result_round_trip() {
        let inst = parse_points("bpst v1\n0 0 R\n0.5 0 B\n").unwrap();
        let rep = verify_tree(&inst, &[(0, 1)]);
        let r = ResultFile::new(Mode::Solve, &inst, 25, vec![(0, 1)], &rep);
        let text = r.render();
        assert!(text.contains("lambda2 0.25\n"));
        assert!(text.contains("bottleneck 0.500000000\n"));
        assert_eq!(ResultFile::parse(&text).unwrap(), r);
    }
}
