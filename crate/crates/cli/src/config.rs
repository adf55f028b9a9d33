//! Flat `key = value` run configuration.
//!
//! Lines starting with `#` are comments. Model keys override the chosen
//! preset; run keys override the scenario defaults. Unknown keys are errors.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use optomech::spectral::Window;
use optomech::{Error, ModelParams, Result, StateKind, UnitSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Bloch,
    RxEvolution,
    Purity,
    Spectrum,
    QfiTime,
    CfiVsQfi,
    PhaseSweep,
    TemperatureSweep,
    OracleCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Bloch,
        Scenario::RxEvolution,
        Scenario::Purity,
        Scenario::Spectrum,
        Scenario::QfiTime,
        Scenario::CfiVsQfi,
        Scenario::PhaseSweep,
        Scenario::TemperatureSweep,
        Scenario::OracleCheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Bloch => "bloch",
            Scenario::RxEvolution => "rx-evolution",
            Scenario::Purity => "purity",
            Scenario::Spectrum => "spectrum",
            Scenario::QfiTime => "qfi-time",
            Scenario::CfiVsQfi => "cfi-vs-qfi",
            Scenario::PhaseSweep => "phase-sweep",
            Scenario::TemperatureSweep => "temperature-sweep",
            Scenario::OracleCheck => "oracle-check",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}

/// Which period `samples_per_period` counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeriodBasis {
    Fast,
    Slow,
}

impl PeriodBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            PeriodBasis::Fast => "fast",
            PeriodBasis::Slow => "slow",
        }
    }
}

impl FromStr for PeriodBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fast" => Ok(PeriodBasis::Fast),
            "slow" => Ok(PeriodBasis::Slow),
            other => Err(Error::Config(format!(
                "period_basis must be fast or slow, got '{other}'"
            ))),
        }
    }
}

const MODEL_KEYS: [&str; 9] = [
    "hbar",
    "mass",
    "Omega",
    "omega_c",
    "g1",
    "g2",
    "n_th",
    "temperature",
    "unit_system",
];
const RUN_KEYS: [&str; 21] = [
    "preset",
    "scenario",
    "s",
    "state",
    "start_periods",
    "periods",
    "samples_per_period",
    "period_basis",
    "phi",
    "step",
    "nmech",
    "oracle_points",
    "window",
    "zero_pad",
    "peak_threshold",
    "time",
    "phase_points",
    "temperature_min",
    "temperature_max",
    "temperature_points",
    "recurrences",
];

/// Largest time grid a run will build.
pub const MAX_GRID: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: String,
    pub params: ModelParams<f64>,
    pub scenario: Scenario,
    pub state: StateKind,
    pub s: f64,
    /// Grid start and length, in slow periods 2π/Δ.
    pub start_periods: f64,
    pub periods: f64,
    pub samples_per_period: usize,
    pub period_basis: PeriodBasis,
    pub phi: f64,
    /// Relative derivative step; `None` picks it per point.
    pub step: Option<f64>,
    pub nmech: usize,
    pub oracle_points: usize,
    pub window: Window,
    pub zero_pad: usize,
    pub peak_threshold: f64,
    /// Evaluation time for the phase sweep; defaults to 2π(1/Δ + 1/δ).
    pub time: Option<f64>,
    pub phase_points: usize,
    pub temperature_min: f64,
    pub temperature_max: f64,
    pub temperature_points: usize,
    /// Slow-period counts N at which the temperature sweep is evaluated.
    pub recurrences: Vec<u32>,
}

/// Parsed but unresolved `key = value` pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let key = key.trim();
            if !MODEL_KEYS.contains(&key) && !RUN_KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(KeyValues(map))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<()> {
        if !MODEL_KEYS.contains(&key) && !RUN_KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("invalid value '{v}' for '{key}'"))),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.parsed::<f64>(key)
    }
}

struct Defaults {
    state: StateKind,
    start_periods: f64,
    periods: f64,
    samples_per_period: usize,
}

fn scenario_defaults(sc: Scenario) -> Defaults {
    let d = |state, start_periods, periods, samples_per_period| Defaults {
        state,
        start_periods,
        periods,
        samples_per_period,
    };
    match sc {
        Scenario::Bloch => d(StateKind::Pure, 0.0, 1.0, 20),
        Scenario::RxEvolution => d(StateKind::Pure, 0.0, 3.0, 20),
        Scenario::Purity => d(StateKind::Pure, 0.0, 4.0, 20),
        Scenario::Spectrum => d(StateKind::Pure, 0.0, 4.0, 20),
        Scenario::QfiTime => d(StateKind::Pure, 0.0, 3.5, 20),
        Scenario::CfiVsQfi => d(StateKind::Mixed, 0.97, 0.06, 40),
        Scenario::PhaseSweep => d(StateKind::Mixed, 0.0, 0.0, 1),
        Scenario::TemperatureSweep => d(StateKind::Mixed, 0.0, 0.0, 1),
        Scenario::OracleCheck => d(StateKind::Pure, 0.0, 1.0, 1),
    }
}

fn preset_params(name: &str) -> Result<ModelParams<f64>> {
    ModelParams::preset(name)
}

impl RunConfig {
    /// Resolves preset, model overrides and scenario defaults.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let preset = kv.get("preset").unwrap_or("unitless").to_string();
        let mut p = preset_params(&preset)?;
        if let Some(u) = kv.parsed::<UnitSystem>("unit_system")? {
            p.unit_system = u;
        }
        let model_number = |key: &str, target: &mut f64| -> Result<()> {
            if let Some(v) = kv.number(key)? {
                *target = v;
            }
            Ok(())
        };
        model_number("hbar", &mut p.hbar)?;
        model_number("mass", &mut p.mass)?;
        model_number("Omega", &mut p.omega)?;
        model_number("omega_c", &mut p.omega_c)?;
        model_number("g1", &mut p.g1)?;
        model_number("g2", &mut p.g2)?;
        let n_th = kv.number("n_th")?;
        match kv.get("temperature") {
            Some("none") => p.temperature = None,
            Some(_) => {
                let temp = kv.number("temperature")?.unwrap_or_default();
                match n_th {
                    Some(n) => {
                        p.n_th = n;
                        p.temperature = Some(temp);
                        log::info!("both n_th and temperature given; n_th = {n} is used");
                    }
                    None => {
                        p = p.with_temperature(temp);
                        log::info!("temperature {temp} K gives n_th = {:e}", p.n_th);
                    }
                }
            }
            None => {
                if let Some(n) = n_th {
                    p.n_th = n;
                }
            }
        }
        p.validate().map_err(|e| Error::Config(e.to_string()))?;

        let scenario: Scenario = kv
            .parsed("scenario")?
            .ok_or_else(|| Error::Config("missing field 'scenario'".into()))?;
        let d = scenario_defaults(scenario);
        let recurrences = match kv.get("recurrences") {
            None => vec![1, 10, 100],
            Some(v) => v
                .split(',')
                .map(|x| x.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Config(format!("invalid value '{v}' for 'recurrences'")))?,
        };
        let cfg = RunConfig {
            preset,
            params: p,
            scenario,
            state: kv.parsed("state")?.unwrap_or(d.state),
            s: kv.number("s")?.unwrap_or(0.2),
            start_periods: kv.number("start_periods")?.unwrap_or(d.start_periods),
            periods: kv.number("periods")?.unwrap_or(d.periods),
            samples_per_period: kv.parsed("samples_per_period")?.unwrap_or(d.samples_per_period),
            period_basis: kv.parsed("period_basis")?.unwrap_or(PeriodBasis::Fast),
            phi: kv.number("phi")?.unwrap_or(0.0),
            step: match kv.get("step") {
                None | Some("auto") => None,
                Some(_) => kv.number("step")?,
            },
            nmech: kv.parsed("nmech")?.unwrap_or(120),
            oracle_points: kv.parsed("oracle_points")?.unwrap_or(50),
            window: kv.parsed("window")?.unwrap_or_default(),
            zero_pad: kv.parsed("zero_pad")?.unwrap_or(1),
            peak_threshold: kv.number("peak_threshold")?.unwrap_or(1e-3),
            time: match kv.get("time") {
                None | Some("auto") => None,
                Some(_) => kv.number("time")?,
            },
            phase_points: kv.parsed("phase_points")?.unwrap_or(361),
            temperature_min: kv.number("temperature_min")?.unwrap_or(0.1),
            temperature_max: kv.number("temperature_max")?.unwrap_or(3000.0),
            temperature_points: kv.parsed("temperature_points")?.unwrap_or(41),
            recurrences,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_key_values(&KeyValues::parse(text)?)
    }

    fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::Config(format!("field '{field}' {why}")));
        if !(0.0..=1.0).contains(&self.s) {
            return bad("s", "must lie in [0, 1]");
        }
        if let Some(h) = self.step {
            if !(h > 0.0) {
                return bad("step", "must be positive");
            }
        }
        match self.scenario {
            Scenario::PhaseSweep => {
                if self.phase_points == 0 {
                    return bad("phase_points", "is zero: empty phase grid");
                }
            }
            Scenario::TemperatureSweep => {
                if self.temperature_points == 0 {
                    return bad("temperature_points", "is zero: empty temperature grid");
                }
                if !(self.temperature_min > 0.0 && self.temperature_max > self.temperature_min) {
                    return bad("temperature_min", "must be positive and below temperature_max");
                }
                if self.recurrences.is_empty() || self.recurrences.contains(&0) {
                    return bad("recurrences", "must list positive period counts");
                }
            }
            Scenario::OracleCheck => {
                if self.oracle_points == 0 {
                    return bad("oracle_points", "is zero: empty time grid");
                }
                if !(self.periods > 0.0) {
                    return bad("periods", "must be positive: empty time grid");
                }
            }
            _ => {
                if !(self.periods > 0.0) || !self.periods.is_finite() {
                    return bad("periods", "must be positive: empty time grid");
                }
                if self.samples_per_period == 0 {
                    return bad("samples_per_period", "is zero: empty time grid");
                }
                if self.start_periods < 0.0 {
                    return bad("start_periods", "must be non-negative");
                }
            }
        }
        if self.scenario == Scenario::Spectrum && self.zero_pad == 0 {
            return bad("zero_pad", "must be at least 1");
        }
        if self.nmech < 2 {
            return bad("nmech", "must be at least 2");
        }
        Ok(())
    }

    /// Fully resolved configuration in the input format; running it again
    /// reproduces the outputs exactly.
    pub fn manifest(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("preset", self.preset.clone());
        kv("scenario", self.scenario.to_string());
        kv("unit_system", p.unit_system.as_str().to_ascii_lowercase());
        kv("hbar", format!("{:?}", p.hbar));
        kv("mass", format!("{:?}", p.mass));
        kv("Omega", format!("{:?}", p.omega));
        kv("omega_c", format!("{:?}", p.omega_c));
        kv("g1", format!("{:?}", p.g1));
        kv("g2", format!("{:?}", p.g2));
        kv("n_th", format!("{:?}", p.n_th));
        kv("temperature", p.temperature.map_or("none".into(), |t| format!("{t:?}")));
        kv("state", self.state.to_string());
        kv("s", format!("{:?}", self.s));
        kv("start_periods", format!("{:?}", self.start_periods));
        kv("periods", format!("{:?}", self.periods));
        kv("samples_per_period", self.samples_per_period.to_string());
        kv("period_basis", self.period_basis.as_str().into());
        kv("phi", format!("{:?}", self.phi));
        kv("step", self.step.map_or("auto".into(), |h| format!("{h:?}")));
        kv("nmech", self.nmech.to_string());
        kv("oracle_points", self.oracle_points.to_string());
        kv("window", self.window.as_str().into());
        kv("zero_pad", self.zero_pad.to_string());
        kv("peak_threshold", format!("{:?}", self.peak_threshold));
        kv("time", self.time.map_or("auto".into(), |t| format!("{t:?}")));
        kv("phase_points", self.phase_points.to_string());
        kv("temperature_min", format!("{:?}", self.temperature_min));
        kv("temperature_max", format!("{:?}", self.temperature_max));
        kv("temperature_points", self.temperature_points.to_string());
        let rec: Vec<String> = self.recurrences.iter().map(u32::to_string).collect();
        kv("recurrences", rec.join(","));
        s
    }
}

/// Text form of a preset, usable as a config file.
pub fn preset_text(name: &str) -> Result<String> {
    let p = preset_params(name)?;
    let mut s = format!("# preset {name}\n");
    let _ = writeln!(s, "unit_system = {}", p.unit_system.as_str().to_ascii_lowercase());
    for (k, v) in [
        ("hbar", p.hbar),
        ("mass", p.mass),
        ("Omega", p.omega),
        ("omega_c", p.omega_c),
        ("g1", p.g1),
        ("g2", p.g2),
        ("n_th", p.n_th),
    ] {
        let _ = writeln!(s, "{k} = {v:?}");
    }
    if let Some(t) = p.temperature {
        let _ = writeln!(s, "# temperature used for reference only: {t:?} K");
    }
    Ok(s)
}
