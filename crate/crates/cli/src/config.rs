//! Experiment configuration: flat `key = value` lines under `[section]`
//! headers. `#` starts a comment. Lists are comma separated; numbers may be
//! written with `pi` (`pi/20`, `2pi`, `-0.5*pi`) and a list may be given as
//! `linspace(a, b, n)`. Unknown sections and keys are errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    TwoLevel,
    Oscillator,
    Wpi,
}

impl System {
    pub fn is_grid(self) -> bool {
        matches!(self, System::Oscillator | System::Wpi)
    }
}

impl FromStr for System {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "twolevel" => Ok(System::TwoLevel),
            "oscillator" => Ok(System::Oscillator),
            "wpi" => Ok(System::Wpi),
            _ => Err(format!("unknown system `{s}` (twolevel, oscillator, wpi)")),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::TwoLevel => "twolevel",
            System::Oscillator => "oscillator",
            System::Wpi => "wpi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ito,
    Cheb,
    Split,
    Rk4,
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ito" => Ok(Method::Ito),
            "cheb" => Ok(Method::Cheb),
            "split" => Ok(Method::Split),
            "rk4" => Ok(Method::Rk4),
            _ => Err(format!("unknown method `{s}` (ito, cheb, split, rk4)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ito => "ito",
            Method::Cheb => "cheb",
            Method::Split => "split",
            Method::Rk4 => "rk4",
        })
    }
}

/// Where the standard Chebyshev stepper samples the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Freeze {
    Start,
    Midpoint,
}

/// A pulse amplitude given explicitly or derived from the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Amplitude {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSection {
    pub system: System,
    pub method: Method,
    /// Methods for `compare`.
    pub methods: Vec<Method>,
    pub dt: Vec<f64>,
    /// One value for all points, or one per `dt`.
    pub n_t: Vec<usize>,
    pub eps: f64,
    pub t_final: Option<f64>,
    /// Time between recorded points; every step when absent.
    pub record_interval: Option<f64>,
    pub freeze: Freeze,
    pub k_cap: usize,
    pub m_cap: usize,
    pub n_cheby_cap: usize,
    pub n_t_max: usize,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoLevelSection {
    pub mu: f64,
    /// `auto` is the π-pulse amplitude.
    pub e0: Amplitude,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatorSection {
    pub carrier: f64,
    /// `auto` depletes the ground state down to `depletion`.
    pub e0: Amplitude,
    pub depletion: f64,
    pub mass: f64,
    pub omega: f64,
    pub n_grid: usize,
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WpiSection {
    pub area: Vec<f64>,
    pub phase: Vec<f64>,
    pub duration: f64,
    pub delay: f64,
    /// Vertical gap at the origin when absent.
    pub carrier: Option<f64>,
    pub r_e: f64,
    pub mass: f64,
    pub omega_g: f64,
    pub omega_e: f64,
    pub mu: f64,
    pub control_scale: f64,
    pub n_grid: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub reference_dt: f64,
    pub reference_eps: f64,
    pub reference_n_t: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub run: RunSection,
    pub twolevel: TwoLevelSection,
    pub oscillator: OscillatorSection,
    pub wpi: WpiSection,
    /// Per-method `dt` lists for `compare` (`dt.<method>` keys).
    pub compare_dt: BTreeMap<Method, Vec<f64>>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut sections = split_sections(text)?;
        let mut run = sections.remove("run").unwrap_or_default();
        let mut two = sections.remove("twolevel").unwrap_or_default();
        let mut osc = sections.remove("oscillator").unwrap_or_default();
        let mut wpi = sections.remove("wpi").unwrap_or_default();
        let mut cmp = sections.remove("compare").unwrap_or_default();
        if let Some((name, sec)) = sections.into_iter().next() {
            return Err(CliError::Config(format!(
                "unknown section [{name}] at line {}",
                sec.line
            )));
        }

        let system: System = run.required("system")?;
        let method = run.parse_or("method", Method::Ito)?;
        let run_section = RunSection {
            system,
            method,
            methods: run.list_or("methods", vec![method])?,
            dt: run.list_or("dt", Vec::new())?,
            n_t: run.list_or("n_t", vec![8])?,
            eps: run.parse_or("eps", 1e-12)?,
            t_final: run.optional("t_final")?,
            record_interval: run.optional("record_interval")?,
            freeze: match run.take("freeze") {
                None => Freeze::Start,
                Some((v, line)) => match v.as_str() {
                    "start" => Freeze::Start,
                    "midpoint" => Freeze::Midpoint,
                    _ => return Err(bad("freeze", &v, line, "expected start or midpoint")),
                },
            },
            k_cap: run.parse_or("k_cap", 25)?,
            m_cap: run.parse_or("m_cap", 60)?,
            n_cheby_cap: run.parse_or("n_cheby_cap", 1024)?,
            n_t_max: run.parse_or("n_t_max", 128)?,
            strict: run.parse_or("strict", false)?,
        };
        run.finish()?;

        let twolevel = TwoLevelSection {
            mu: two.parse_or("mu", 1.0)?,
            e0: two.amplitude("e0")?,
        };
        two.finish()?;

        let oscillator = OscillatorSection {
            carrier: osc.parse_or("carrier", 1.0)?,
            e0: osc.amplitude("e0")?,
            depletion: osc.parse_or("depletion", itoprop::models::DEFAULT_DEPLETION)?,
            mass: osc.parse_or("mass", 1.0)?,
            omega: osc.parse_or("omega", 1.0)?,
            n_grid: osc.parse_or("n_grid", 128)?,
            r_min: osc.parse_or("r_min", -10.0)?,
            r_max: osc.parse_or("r_max", 10.0)?,
        };
        osc.finish()?;

        let d = itoprop::models::WpiSpec::default();
        let wpi_section = WpiSection {
            area: wpi.list_or("area", vec![d.area])?,
            phase: wpi.list_or("phase", vec![0.0, PI])?,
            duration: wpi.parse_or("duration", d.duration)?,
            delay: wpi.parse_or("delay", d.delay)?,
            carrier: wpi.optional("carrier")?,
            r_e: wpi.parse_or("r_e", d.r_e)?,
            mass: wpi.parse_or("mass", d.mass)?,
            omega_g: wpi.parse_or("omega_g", d.omega_g)?,
            omega_e: wpi.parse_or("omega_e", d.omega_e)?,
            mu: wpi.parse_or("mu", d.mu)?,
            control_scale: wpi.parse_or("control_scale", d.control_scale)?,
            n_grid: wpi.parse_or("n_grid", d.n_grid)?,
            r_min: wpi.parse_or("r_min", d.r_min)?,
            r_max: wpi.parse_or("r_max", d.r_max)?,
            reference_dt: wpi.parse_or("reference_dt", 0.01)?,
            reference_eps: wpi.parse_or("reference_eps", 1e-14)?,
            reference_n_t: wpi.parse_or("reference_n_t", 8)?,
        };
        wpi.finish()?;

        let mut compare_dt = BTreeMap::new();
        for key in cmp.keys() {
            let method = key
                .strip_prefix("dt.")
                .and_then(|m| m.parse::<Method>().ok())
                .ok_or_else(|| CliError::Config(format!("unknown key `{key}` in [compare]; expected dt.<method>")))?;
            compare_dt.insert(method, cmp.list_or(&key, Vec::new())?);
        }
        cmp.finish()?;

        let cfg = ExperimentConfig {
            run: run_section,
            twolevel,
            oscillator,
            wpi: wpi_section,
            compare_dt,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        let r = &self.run;
        let err = |m: String| Err(CliError::Config(m));
        if r.methods.is_empty() {
            return err("`methods` must not be empty".into());
        }
        for &m in r.methods.iter().chain(std::iter::once(&r.method)) {
            if m == Method::Split && !r.system.is_grid() {
                return err(format!("method split needs a grid system, not {}", r.system));
            }
        }
        for (m, dts) in &self.compare_dt {
            if dts.is_empty() {
                return err(format!("dt.{m} must not be empty"));
            }
        }
        let all_dt = r.dt.iter().chain(self.compare_dt.values().flatten());
        for &dt in all_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return err(format!("time steps must be positive, got {dt}"));
            }
        }
        if r.n_t.is_empty() || r.n_t.iter().any(|&n| n < 2) {
            return err("n_t values must be at least 2".into());
        }
        if r.n_t.len() != 1 {
            let lists = std::iter::once(&r.dt).chain(self.compare_dt.values());
            for dts in lists.filter(|d| !d.is_empty()) {
                if dts.len() != r.n_t.len() {
                    return err(format!(
                        "n_t has {} entries; give one or one per dt ({})",
                        r.n_t.len(),
                        dts.len()
                    ));
                }
            }
        }
        if !(r.eps > 0.0) {
            return err(format!("eps must be positive, got {}", r.eps));
        }
        if let Some(t) = r.t_final {
            if !(t > 0.0) {
                return err(format!("t_final must be positive, got {t}"));
            }
        }
        if let Some(i) = r.record_interval {
            if !(i > 0.0) {
                return err(format!("record_interval must be positive, got {i}"));
            }
        }
        if r.system == System::Wpi && (self.wpi.area.is_empty() || self.wpi.phase.is_empty()) {
            return err("wpi area and phase lists must not be empty".into());
        }
        let o = &self.oscillator;
        if !(o.depletion > 0.0 && o.depletion < 1.0) {
            return err(format!("depletion must lie in (0, 1), got {}", o.depletion));
        }
        Ok(())
    }

    /// `dt` list for `method` under `compare`, falling back to `[run] dt`.
    pub fn dt_for(&self, method: Method) -> &[f64] {
        self.compare_dt.get(&method).map(Vec::as_slice).unwrap_or(&self.run.dt)
    }

    /// Initial `N_t` for each of `count` sweep points.
    pub fn n_t_list(&self, count: usize) -> Vec<usize> {
        if self.run.n_t.len() == 1 {
            vec![self.run.n_t[0]; count]
        } else {
            self.run.n_t.clone()
        }
    }
}

fn bad(key: &str, value: &str, line: usize, why: &str) -> CliError {
    CliError::Config(format!("line {line}: bad value `{value}` for `{key}`: {why}"))
}

#[derive(Debug, Default)]
struct Section {
    name: String,
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn keys(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    fn required<T: ParseValue>(&mut self, key: &str) -> Result<T, CliError> {
        match self.take(key) {
            Some((v, line)) => T::parse_value(&v).map_err(|e| bad(key, &v, line, &e)),
            None => Err(CliError::Config(format!("missing required key `{key}` in [run]"))),
        }
    }

    fn optional<T: ParseValue>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.take(key) {
            Some((v, line)) => T::parse_value(&v).map(Some).map_err(|e| bad(key, &v, line, &e)),
            None => Ok(None),
        }
    }

    fn parse_or<T: ParseValue>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.optional(key)?.unwrap_or(default))
    }

    fn list_or<T: ParseValue>(&mut self, key: &str, default: Vec<T>) -> Result<Vec<T>, CliError> {
        match self.take(key) {
            Some((v, line)) => parse_list(&v).map_err(|e| bad(key, &v, line, &e)),
            None => Ok(default),
        }
    }

    fn amplitude(&mut self, key: &str) -> Result<Amplitude, CliError> {
        match self.take(key) {
            None => Ok(Amplitude::Auto),
            Some((v, _)) if v == "auto" => Ok(Amplitude::Auto),
            Some((v, line)) => parse_number(&v)
                .map(Amplitude::Value)
                .map_err(|e| bad(key, &v, line, &e)),
        }
    }

    fn finish(self) -> Result<(), CliError> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((key, (_, line))) => Err(CliError::Config(format!(
                "line {line}: unknown key `{key}` in [{}]",
                self.name
            ))),
        }
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>, CliError> {
    let mut out: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config(format!("line {line_no}: malformed section header `{line}`")))?
                .trim()
                .to_string();
            if out.contains_key(&name) {
                return Err(CliError::Config(format!("line {line_no}: section [{name}] repeated")));
            }
            out.insert(
                name.clone(),
                Section {
                    name: name.clone(),
                    line: line_no,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        let section = current
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("line {line_no}: `{key}` appears before any [section]")))?;
        let sec = out.get_mut(section).expect("section was inserted");
        if sec.entries.insert(key.clone(), (value, line_no)).is_some() {
            return Err(CliError::Config(format!(
                "line {line_no}: `{key}` repeated in [{section}]"
            )));
        }
    }
    Ok(out)
}

trait ParseValue: Sized {
    fn parse_value(s: &str) -> Result<Self, String>;
}

impl ParseValue for f64 {
    fn parse_value(s: &str) -> Result<Self, String> {
        parse_number(s)
    }
}

impl ParseValue for usize {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse().map_err(|_| "expected a non-negative integer".to_string())
    }
}

impl ParseValue for bool {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse().map_err(|_| "expected true or false".to_string())
    }
}

impl ParseValue for System {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse()
    }
}

impl ParseValue for Method {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse()
    }
}

/// A number, optionally a multiple or fraction of `pi`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = if let Some(p) = s.find("pi") {
        let (head, tail) = (s[..p].trim(), s[p + 2..].trim());
        let coeff = match head.trim_end_matches('*').trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| format!("bad coefficient `{c}`"))?,
        };
        let div = match tail.strip_prefix('/') {
            None if tail.is_empty() => 1.0,
            None => return Err(format!("unexpected `{tail}` after pi")),
            Some(d) => d.trim().parse::<f64>().map_err(|_| format!("bad divisor `{d}`"))?,
        };
        coeff * PI / div
    } else {
        s.parse::<f64>().map_err(|_| "expected a number".to_string())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err("number must be finite".into())
    }
}

fn parse_list<T: ParseValue>(s: &str) -> Result<Vec<T>, String> {
    if let Some(inner) = s.trim().strip_prefix("linspace(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err("linspace takes (start, stop, count)".into());
        }
        let (a, b) = (parse_number(parts[0])?, parse_number(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| "linspace count must be an integer")?;
        if n < 2 {
            return Err("linspace count must be at least 2".into());
        }
        return (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .map(|x| T::parse_value(&format!("{x:e}")))
            .collect();
    }
    let items: Vec<&str> = s.split(',').map(str::trim).collect();
    if items.iter().any(|i| i.is_empty()) {
        return Err("empty list entry".into());
    }
    items.into_iter().map(T::parse_value).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_expressions() {
        assert_eq!(parse_number("pi").unwrap(), PI);
        assert_eq!(parse_number("pi/20").unwrap(), PI / 20.0);
        assert_eq!(parse_number("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_number("-0.5*pi").unwrap(), -0.5 * PI);
        assert_eq!(parse_number("1e-4").unwrap(), 1e-4);
        assert!(parse_number("pi*2").is_err());
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn linspace_includes_both_ends() {
        let v: Vec<f64> = parse_list("linspace(0, 2pi, 17)").unwrap();
        assert_eq!(v.len(), 17);
        assert_eq!(v[0], 0.0);
        assert!((v[16] - 2.0 * PI).abs() < 1e-15);
        assert!((v[8] - PI).abs() < 1e-15);
    }
}
