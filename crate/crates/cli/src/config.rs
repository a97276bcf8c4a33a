//! Run configuration: a line-oriented `[section]` / `key = value` format.
//!
//! ```text
//! alpha = 0.5
//!
//! [potential]
//! both = disk(radius=1, amp=-1)
//! # or separately: v11 = ..., v22 = ...
//!
//! [sweep]
//! eps_start = 1e-3
//! eps_stop = 1e-1
//! points = 10
//! log = true
//! w_correction = false
//! bound_states = true
//!
//! [numerics]
//! r_max = 12
//! n_r = 96
//! n_theta = 64
//! m_max = 12
//! quad_tol = 1e-12
//! phi_eps = 1e-6
//!
//! [output]
//! stem = sweep
//! formats = csv, json
//! ```
//!
//! Potential terms are joined by `+`:
//! `disk(radius=R, amp=A)`, `gaussian(width=W, amp=A)` and
//! `annulus(center=C, width=W, amp=A)`. Amplitudes may be complex (`-1+0.2i`).
//! `#` starts a comment.

use std::collections::HashMap;
use std::str::FromStr;

use abpauli::bsolver::{
    GridSettings, PotentialComponent, PotentialMoments, PotentialSpec, RadialTerm, SearchSettings, Shape,
};
use abpauli::greenfn::GreenOptions;
use abpauli::weakcoupling::ImplicitSettings;
use abpauli::{Complex64, FluxAlpha};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line: Some(line), message: message.into() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub eps_start: f64,
    pub eps_stop: f64,
    pub points: usize,
    pub log_scale: bool,
    /// Solve the implicit equation with `W(eps)` instead of `U`.
    pub w_correction: bool,
    pub bound_states: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { eps_start: 1e-3, eps_stop: 1e-1, points: 10, log_scale: true, w_correction: false, bound_states: true }
    }
}

impl SweepConfig {
    pub fn eps_values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.eps_start],
            n => (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    let (a, b) = (self.eps_start, self.eps_stop);
                    let e = if i == 0 {
                        a
                    } else if i == n - 1 {
                        b
                    } else if self.log_scale {
                        (a.ln() + (b.ln() - a.ln()) * t).exp()
                    } else {
                        a + (b - a) * t
                    };
                    e.clamp(a, b)
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub m_max: usize,
    pub quad_tol: f64,
    pub phi_eps: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        let g = GridSettings::default();
        let o = GreenOptions::default();
        Self {
            r_max: g.r_max,
            n_r: g.n_r,
            n_theta: g.n_theta,
            m_max: g.m_max,
            quad_tol: o.quad_tol,
            phi_eps: o.phi_eps,
        }
    }
}

impl Numerics {
    pub fn grid(&self) -> GridSettings {
        GridSettings {
            n_r: self.n_r,
            n_theta: self.n_theta,
            r_max: self.r_max,
            m_max: self.m_max,
            ..GridSettings::default()
        }
    }

    pub fn green(&self) -> GreenOptions {
        GreenOptions { quad_tol: self.quad_tol, phi_eps: self.phi_eps }
    }

    pub fn search(&self) -> SearchSettings {
        SearchSettings { grid: self.grid(), green: self.green(), ..SearchSettings::default() }
    }

    pub fn implicit(&self) -> ImplicitSettings {
        ImplicitSettings { grid: self.grid(), ..ImplicitSettings::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    /// File name without extension; files land in the `--out` directory.
    pub stem: String,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { stem: "sweep".into(), formats: vec![Format::Csv, Format::Json] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: FluxAlpha,
    pub potential: PotentialSpec,
    /// The `[potential]` lines as written.
    pub potential_source: Vec<(String, String)>,
    pub sweep: SweepConfig,
    pub numerics: Numerics,
    pub output: OutputConfig,
    pub moments: PotentialMoments,
}

struct Entry {
    value: String,
    line: usize,
}

type Sections = HashMap<String, HashMap<String, Entry>>;

const KEYS: &[(&str, &[&str])] = &[
    ("", &["alpha"]),
    ("potential", &["both", "v11", "v22"]),
    ("sweep", &["eps_start", "eps_stop", "points", "log", "w_correction", "bound_states"]),
    ("numerics", &["r_max", "n_r", "n_theta", "m_max", "quad_tol", "phi_eps"]),
    ("output", &["stem", "formats"]),
];

fn tokenize(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = HashMap::new();
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return err(n, format!("malformed section header `{line}`"));
            };
            let name = name.trim().to_ascii_lowercase();
            if !KEYS.iter().any(|(s, _)| *s == name) || name.is_empty() {
                return err(n, format!("unknown section `[{name}]`"));
            }
            current = name;
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(n, format!("expected `key = value`, got `{line}`"));
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        let allowed = KEYS.iter().find(|(s, _)| *s == current).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            let place = if current.is_empty() { "at top level".to_string() } else { format!("in [{current}]") };
            return err(n, format!("unknown key `{key}` {place}"));
        }
        if value.is_empty() {
            return err(n, format!("`{key}` has no value"));
        }
        let table = sections.entry(current.clone()).or_default();
        if let Some(first) = table.get(&key) {
            return err(n, format!("duplicate key `{key}` (first defined on line {})", first.line));
        }
        table.insert(key, Entry { value, line: n });
    }
    Ok(sections)
}

fn get<'a>(s: &'a Sections, section: &str, key: &str) -> Option<&'a Entry> {
    s.get(section).and_then(|t| t.get(key))
}

fn parse_value<T: FromStr>(e: &Entry, key: &str, what: &str) -> Result<T, ConfigError> {
    e.value.parse().or_else(|_| err(e.line, format!("`{key}` must be {what}, got `{}`", e.value)))
}

fn positive(s: &Sections, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
    match get(s, section, key) {
        None => Ok(default),
        Some(e) => {
            let v: f64 = parse_value(e, key, "a number")?;
            if !(v > 0.0 && v.is_finite()) {
                return err(e.line, format!("`{key}` must be positive and finite, got {v}"));
            }
            Ok(v)
        }
    }
}

fn count(s: &Sections, section: &str, key: &str, default: usize, min: usize) -> Result<usize, ConfigError> {
    match get(s, section, key) {
        None => Ok(default),
        Some(e) => {
            let v: usize = parse_value(e, key, "a non-negative integer")?;
            if v < min {
                return err(e.line, format!("`{key}` must be at least {min}, got {v}"));
            }
            Ok(v)
        }
    }
}

fn flag(s: &Sections, section: &str, key: &str, default: bool) -> Result<bool, ConfigError> {
    match get(s, section, key) {
        None => Ok(default),
        Some(e) => match e.value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            _ => err(e.line, format!("`{key}` must be true or false, got `{}`", e.value)),
        },
    }
}

/// Splits `a + b(x=1+2i) + c` at `+` signs outside parentheses.
fn split_terms(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

fn parse_term(text: &str, line: usize) -> Result<RadialTerm, ConfigError> {
    let Some((name, rest)) = text.split_once('(') else {
        return err(line, format!("expected `shape(key=value, ...)`, got `{text}`"));
    };
    let Some(args) = rest.trim_end().strip_suffix(')') else {
        return err(line, format!("missing `)` in `{text}`"));
    };
    let mut amp = None;
    let mut width = None;
    let mut center = None;
    for arg in args.split(',').map(str::trim).filter(|a| !a.is_empty()) {
        let Some((k, v)) = arg.split_once('=') else {
            return err(line, format!("expected `key=value` in `{text}`, got `{arg}`"));
        };
        let (k, v) = (k.trim(), v.trim());
        let real = || v.parse::<f64>().or_else(|_| err(line, format!("`{k}` must be a number, got `{v}`")));
        match k {
            "amp" => {
                let z = Complex64::from_str(v)
                    .or_else(|_| err(line, format!("`amp` must be a real or complex number, got `{v}`")))?;
                amp = Some(z);
            }
            "radius" | "width" => width = Some(real()?),
            "center" => center = Some(real()?),
            _ => return err(line, format!("unknown parameter `{k}` in `{text}`")),
        }
    }
    let Some(amp) = amp else {
        return err(line, format!("`{text}` needs an `amp`"));
    };
    let shape = match name.trim() {
        "disk" => Shape::DiskIndicator,
        "gaussian" => Shape::Gaussian,
        "annulus" => Shape::AnnularGaussian,
        other => return err(line, format!("unknown shape `{other}` (disk, gaussian, annulus)")),
    };
    let Some(width) = width else {
        let what = if shape == Shape::DiskIndicator { "radius" } else { "width" };
        return err(line, format!("`{text}` needs a `{what}`"));
    };
    let center = match (shape, center) {
        (Shape::AnnularGaussian, None) => return err(line, format!("`{text}` needs a `center`")),
        (Shape::AnnularGaussian, Some(c)) => c,
        (_, Some(_)) => return err(line, format!("`center` only applies to `annulus`, in `{text}`")),
        (_, None) => 0.0,
    };
    RadialTerm::new(shape, amp, width, center).or_else(|e| err(line, e.to_string()))
}

pub fn parse_potential(text: &str, line: usize) -> Result<PotentialComponent, ConfigError> {
    let terms = split_terms(text)
        .into_iter()
        .map(|t| if t.is_empty() { err(line, format!("empty term in `{text}`")) } else { parse_term(t, line) })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PotentialComponent::new(terms))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let s = tokenize(text)?;

    let Some(a) = get(&s, "", "alpha") else {
        return Err(ConfigError { line: None, message: "missing `alpha`".into() });
    };
    let alpha_raw: f64 = parse_value(a, "alpha", "a number")?;
    if !(alpha_raw > 0.0 && alpha_raw < 1.0) {
        return err(a.line, format!("alpha = {alpha_raw} is outside the open interval (0, 1)"));
    }
    let alpha = FluxAlpha::new(alpha_raw).or_else(|e| err(a.line, e.to_string()))?;

    let both = get(&s, "potential", "both");
    let v11 = get(&s, "potential", "v11");
    let v22 = get(&s, "potential", "v22");
    let mut potential_source = Vec::new();
    let potential = match (both, v11, v22) {
        (Some(b), None, None) => {
            potential_source.push(("both".to_string(), b.value.clone()));
            PotentialSpec::both(parse_potential(&b.value, b.line)?)
        }
        (Some(b), _, _) => return err(b.line, "`both` cannot be combined with `v11` or `v22`"),
        (None, p, m) => {
            let mut part = |e: Option<&Entry>, key: &str| -> Result<PotentialComponent, ConfigError> {
                match e {
                    None => Ok(PotentialComponent::zero()),
                    Some(e) => {
                        potential_source.push((key.to_string(), e.value.clone()));
                        parse_potential(&e.value, e.line)
                    }
                }
            };
            let v11 = part(p, "v11")?;
            let v22 = part(m, "v22")?;
            PotentialSpec::new(v11, v22)
        }
    };
    if potential.is_zero() {
        let line = both.or(v11).or(v22).map(|e| e.line);
        return Err(ConfigError {
            line,
            message: "the potential is empty; set `both`, `v11` or `v22` in [potential]".into(),
        });
    }
    let moments = potential.moments(alpha).map_err(|e| ConfigError { line: None, message: e.to_string() })?;
    if !moments.assumption_ok {
        log::warn!("potential moments are not finite: {moments:?}");
    }

    let d = SweepConfig::default();
    let sweep = SweepConfig {
        eps_start: positive(&s, "sweep", "eps_start", d.eps_start)?,
        eps_stop: positive(&s, "sweep", "eps_stop", d.eps_stop)?,
        points: count(&s, "sweep", "points", d.points, 0)?,
        log_scale: flag(&s, "sweep", "log", d.log_scale)?,
        w_correction: flag(&s, "sweep", "w_correction", d.w_correction)?,
        bound_states: flag(&s, "sweep", "bound_states", d.bound_states)?,
    };
    if sweep.eps_stop < sweep.eps_start {
        let line = get(&s, "sweep", "eps_stop").or(get(&s, "sweep", "eps_start")).map(|e| e.line).unwrap_or(0);
        return err(line, format!("eps_stop = {} is below eps_start = {}", sweep.eps_stop, sweep.eps_start));
    }

    let d = Numerics::default();
    let numerics = Numerics {
        r_max: positive(&s, "numerics", "r_max", d.r_max)?,
        n_r: count(&s, "numerics", "n_r", d.n_r, 4)?,
        n_theta: count(&s, "numerics", "n_theta", d.n_theta, 4)?,
        m_max: count(&s, "numerics", "m_max", d.m_max, 1)?,
        quad_tol: positive(&s, "numerics", "quad_tol", d.quad_tol)?,
        phi_eps: positive(&s, "numerics", "phi_eps", d.phi_eps)?,
    };
    if numerics.n_theta % 2 != 0 {
        let line = get(&s, "numerics", "n_theta").map(|e| e.line).unwrap_or(0);
        return err(line, format!("n_theta must be even, got {}", numerics.n_theta));
    }

    let mut output = OutputConfig::default();
    if let Some(e) = get(&s, "output", "stem") {
        if e.value.contains(['/', '\\']) {
            return err(e.line, "`stem` is a file name, not a path; use --out for the directory");
        }
        output.stem = e.value.clone();
    }
    if let Some(e) = get(&s, "output", "formats") {
        output.formats.clear();
        for f in e.value.split(',').map(str::trim) {
            let f = match f.to_ascii_lowercase().as_str() {
                "csv" => Format::Csv,
                "json" => Format::Json,
                _ => return err(e.line, format!("unknown format `{f}` (csv, json)")),
            };
            if !output.formats.contains(&f) {
                output.formats.push(f);
            }
        }
    }

    Ok(RunConfig { alpha, potential, potential_source, sweep, numerics, output, moments })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_splitting_respects_parentheses() {
        let t = split_terms("disk(radius=1, amp=-1+0.2i) + gaussian(width=2, amp=-1)");
        assert_eq!(t, vec!["disk(radius=1, amp=-1+0.2i)", "gaussian(width=2, amp=-1)"]);
    }

    #[test]
    fn complex_amplitude() {
        let c = parse_potential("disk(radius=1, amp=-1+0.2i)", 1).unwrap();
        assert_eq!(c.terms[0].amplitude, Complex64::new(-1.0, 0.2));
        assert_eq!(c.terms[0].shape, Shape::DiskIndicator);
    }

    #[test]
    fn annulus_needs_center() {
        let e = parse_potential("annulus(width=0.5, amp=-1)", 4).unwrap_err();
        assert_eq!(e.line, Some(4));
        assert!(e.message.contains("center"));
        let c = parse_potential("annulus(center=2, width=0.5, amp=-1)", 4).unwrap();
        assert_eq!(c.terms[0].center_radius, 2.0);
    }

    #[test]
    fn eps_grid() {
        let s = SweepConfig { eps_start: 1e-3, eps_stop: 1e-1, points: 3, ..SweepConfig::default() };
        let e = s.eps_values();
        assert!((e[1] - 1e-2).abs() < 1e-15);
        assert_eq!(e[2], 1e-1);
        let lin = SweepConfig { log_scale: false, ..s };
        assert!((lin.eps_values()[1] - 0.0505).abs() < 1e-15);
    }

    #[test]
    fn unknown_key_and_section() {
        let e = parse_config("alpha = 0.3\n[sweep]\nfoo = 1\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = parse_config("alpha = 0.3\n[nope]\n").unwrap_err();
        assert!(e.message.contains("unknown section"));
    }

    #[test]
    fn both_conflicts_with_components() {
        let e = parse_config("alpha = 0.3\n[potential]\nboth = disk(radius=1, amp=-1)\nv11 = disk(radius=1, amp=-1)\n")
            .unwrap_err();
        assert_eq!(e.line, Some(3));
    }
}
