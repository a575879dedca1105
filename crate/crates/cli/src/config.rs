//! Experiment configuration: TOML parsing, scenario defaults and
//! cross-field validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use spinchain::chain::DEFAULT_SEED;
use spinchain::feynman::{CircuitLayout, RegisterLabel, Spin};
use spinchain::lindblad::BathSpec;

pub const SEED_ENV: &str = "SPINCHAIN_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Ballistic,
    Localized,
    Bloch,
    DissipativeTransport,
    CnotClassical,
    CnotSuperposed,
    PeakScaling,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Ballistic,
        Scenario::Localized,
        Scenario::Bloch,
        Scenario::DissipativeTransport,
        Scenario::CnotClassical,
        Scenario::CnotSuperposed,
        Scenario::PeakScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Ballistic => "ballistic",
            Scenario::Localized => "localized",
            Scenario::Bloch => "bloch",
            Scenario::DissipativeTransport => "dissipative-transport",
            Scenario::CnotClassical => "cnot-classical",
            Scenario::CnotSuperposed => "cnot-superposed",
            Scenario::PeakScaling => "peak-scaling",
        }
    }

    pub fn is_cnot(self) -> bool {
        matches!(self, Scenario::CnotClassical | Scenario::CnotSuperposed)
    }

    /// Scenario defaults:
    /// `(s, sigma, g, t_max, dt)`.
    fn defaults(self) -> (usize, f64, f64, f64, f64) {
        match self {
            Scenario::Ballistic => (20, 0.0, 0.0, 40.0, 0.1),
            Scenario::Localized => (20, 0.5, 0.0, 200.0, 0.1),
            Scenario::Bloch => (20, 0.5, 2.0, 100.0, 0.1),
            Scenario::DissipativeTransport => (20, 0.5, 2.0, 1000.0, 1.0),
            Scenario::CnotClassical => (22, 0.5, 2.0, 1000.0, 1.0),
            Scenario::CnotSuperposed => (22, 0.5, 2.0, 2000.0, 1.0),
            Scenario::PeakScaling => (20, 0.0, 0.0, f64::NAN, spinchain::unitary::DEFAULT_PEAK_DT),
        }
    }

    fn bath_required(self) -> bool {
        self == Scenario::DissipativeTransport
    }

    fn bath_allowed(self) -> bool {
        self.bath_required() || self.is_cnot()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                format!(
                    "unknown scenario '{s}', expected one of {}",
                    names.join(", ")
                )
            })
    }
}

/// One failed check, naming the offending field by its dotted path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every violation found in a config, never just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<Violation>);

impl ConfigErrors {
    pub fn single(field: &str, message: impl Into<String>) -> Self {
        ConfigErrors(vec![Violation {
            field: field.to_string(),
            message: message.into(),
        }])
    }

    pub fn mentions(&self, field: &str) -> bool {
        self.0.iter().any(|v| v.field == field)
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<String>,
    seed: Option<u64>,
    ensemble_size: Option<i64>,
    output: Option<PathBuf>,
    #[serde(default)]
    chain: RawChain,
    bath: Option<RawBath>,
    layout: Option<RawLayout>,
    time: Option<RawTime>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    s: Option<i64>,
    sigma: Option<f64>,
    g: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    beta: Option<f64>,
    zeta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    a: Option<i64>,
    register_input: Option<String>,
    target: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_max: Option<f64>,
    dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainParams {
    pub s: usize,
    pub sigma: f64,
    pub g: f64,
}

/// Bath fields as given; both must be present for a bath to exist.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BathParams {
    pub beta: Option<f64>,
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayoutParams {
    pub a: usize,
    /// Classical register input, used by `cnot-classical`.
    #[serde(serialize_with = "serialize_label")]
    pub register_input: RegisterLabel,
    /// Controlled-qubit state, used by `cnot-superposed`.
    #[serde(serialize_with = "serialize_spin")]
    pub target: Spin,
}

fn serialize_label<S: serde::Serializer>(l: &RegisterLabel, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_label(*l))
}

fn serialize_spin<S: serde::Serializer>(v: &Spin, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(format_spin(*v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeParams {
    /// Unused (NaN) for `peak-scaling`, whose window is `[0, 1.5 s]`.
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    pub ensemble_size: usize,
    pub output: PathBuf,
    pub chain: ChainParams,
    pub bath: Option<BathParams>,
    pub layout: Option<LayoutParams>,
    pub time: TimeParams,
}

fn format_spin(s: Spin) -> &'static str {
    match s {
        Spin::Up => "+1",
        Spin::Down => "-1",
    }
}

pub fn format_label(l: RegisterLabel) -> String {
    format!("{},{}", format_spin(l.control), format_spin(l.target))
}

pub fn parse_spin(text: &str) -> Option<Spin> {
    match text.trim() {
        "+1" | "1" => Some(Spin::Up),
        "-1" => Some(Spin::Down),
        _ => None,
    }
}

/// Accepts `+1,-1` or `|+1,-1>`.
pub fn parse_label(text: &str) -> Option<RegisterLabel> {
    let t = text.trim();
    let t = t
        .strip_prefix('|')
        .and_then(|t| t.strip_suffix('>'))
        .unwrap_or(t);
    let (c, p) = t.split_once(',')?;
    Some(RegisterLabel::new(parse_spin(c)?, parse_spin(p)?))
}

struct Checker(Vec<Violation>);

impl Checker {
    fn fail(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Violation {
            field: field.to_string(),
            message: message.into(),
        });
    }

    fn finite(&mut self, field: &str, v: f64) -> bool {
        let ok = v.is_finite();
        if !ok {
            self.fail(field, format!("must be finite, got {v}"));
        }
        ok
    }
}

/// Parses and validates a config file's text, reporting all violations.
/// `seed_override` replaces the file's seed (see [`SEED_ENV`]).
pub fn validate_config(
    text: &str,
    seed_override: Option<u64>,
) -> Result<ExperimentConfig, ConfigErrors> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| ConfigErrors::single("config", e.message().to_string()))?;
    let mut ck = Checker(Vec::new());

    let scenario = match raw.scenario.as_deref() {
        None => {
            ck.fail("scenario", "required");
            None
        }
        Some(name) => match name.parse::<Scenario>() {
            Ok(s) => Some(s),
            Err(e) => {
                ck.fail("scenario", e);
                None
            }
        },
    };
    let Some(scenario) = scenario else {
        return Err(ConfigErrors(ck.0));
    };
    let (s0, sigma0, g0, t_max0, dt0) = scenario.defaults();

    let s = match raw.chain.s {
        None => s0,
        Some(v) if v >= 1 => v as usize,
        Some(v) => {
            ck.fail("chain.s", format!("must be >= 1, got {v}"));
            s0
        }
    };
    let ensemble_size = match raw.ensemble_size {
        None => 1,
        Some(v) if v >= 1 => v as usize,
        Some(v) => {
            ck.fail("ensemble_size", format!("must be >= 1, got {v}"));
            1
        }
    };

    let bath = raw.bath.map(|b| BathParams {
        beta: b.beta,
        zeta: b.zeta,
    });

    let layout = if scenario.is_cnot() {
        let l = raw.layout.unwrap_or_default();
        let a = match l.a {
            None => 9,
            Some(v) if v >= 1 => v as usize,
            Some(v) => {
                ck.fail("layout.a", format!("must be >= 1, got {v}"));
                9
            }
        };
        let register_input = match l.register_input.as_deref() {
            None => RegisterLabel::new(Spin::Up, Spin::Down),
            Some(t) => parse_label(t).unwrap_or_else(|| {
                ck.fail(
                    "layout.register_input",
                    format!("expected a label like \"+1,-1\", got \"{t}\""),
                );
                RegisterLabel::new(Spin::Up, Spin::Down)
            }),
        };
        let target = match l.target.as_deref() {
            None => Spin::Down,
            Some(t) => parse_spin(t).unwrap_or_else(|| {
                ck.fail(
                    "layout.target",
                    format!("expected \"+1\" or \"-1\", got \"{t}\""),
                );
                Spin::Down
            }),
        };
        if scenario == Scenario::CnotClassical && l.target.is_some() {
            ck.fail(
                "layout.target",
                "not used by cnot-classical; set register_input",
            );
        }
        if scenario == Scenario::CnotSuperposed && l.register_input.is_some() {
            ck.fail(
                "layout.register_input",
                "not used by cnot-superposed; set target",
            );
        }
        Some(LayoutParams {
            a,
            register_input,
            target,
        })
    } else {
        if raw.layout.is_some() {
            ck.fail("layout", format!("not used by scenario {scenario}"));
        }
        None
    };

    let raw_time = raw.time.unwrap_or_default();
    if scenario == Scenario::PeakScaling && raw_time.t_max.is_some() {
        ck.fail(
            "time.t_max",
            "not used by peak-scaling, whose window is [0, 1.5 s]",
        );
    }
    let time = TimeParams {
        t_max: if scenario == Scenario::PeakScaling {
            f64::NAN
        } else {
            raw_time.t_max.unwrap_or(t_max0)
        },
        dt: raw_time.dt.unwrap_or(dt0),
    };

    let config = ExperimentConfig {
        scenario,
        seed: seed_override.or(raw.seed).unwrap_or(DEFAULT_SEED),
        ensemble_size,
        output: raw
            .output
            .unwrap_or_else(|| PathBuf::from("out").join(scenario.name())),
        chain: ChainParams {
            s,
            sigma: raw.chain.sigma.unwrap_or(sigma0),
            g: raw.chain.g.unwrap_or(g0),
        },
        bath,
        layout,
        time,
    };
    ck.0.extend(config.violations());
    if ck.0.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(ck.0))
    }
}

impl ExperimentConfig {
    /// Cross-field checks on an already-typed config.
    pub fn violations(&self) -> Vec<Violation> {
        let mut ck = Checker(Vec::new());
        let sc = self.scenario;
        let ChainParams { s, sigma, g } = self.chain;
        if s < 2 {
            ck.fail("chain.s", format!("must be >= 2, got {s}"));
        }
        if ck.finite("chain.sigma", sigma) && sigma < 0.0 {
            ck.fail("chain.sigma", format!("must be >= 0, got {sigma}"));
        }
        ck.finite("chain.g", g);

        match (&self.bath, sc.bath_allowed()) {
            (Some(_), false) => ck.fail("bath", format!("not used by scenario {sc}")),
            (None, _) if sc.bath_required() => {
                ck.fail("bath.beta", format!("required by scenario {sc}"));
                ck.fail("bath.zeta", format!("required by scenario {sc}"));
            }
            (Some(b), true) => {
                match b.beta {
                    None => ck.fail("bath.beta", "required when a bath is configured"),
                    Some(beta) => {
                        if ck.finite("bath.beta", beta) && beta <= 0.0 {
                            ck.fail("bath.beta", format!("must be > 0, got {beta}"));
                        }
                    }
                }
                match b.zeta {
                    None => ck.fail("bath.zeta", "required when a bath is configured"),
                    Some(zeta) => {
                        if ck.finite("bath.zeta", zeta) && zeta < 0.0 {
                            ck.fail("bath.zeta", format!("must be >= 0, got {zeta}"));
                        }
                    }
                }
            }
            _ => {}
        }

        if let Some(l) = &self.layout {
            if let Err(e) = CircuitLayout::new(s, l.a) {
                ck.fail("layout.a", e.to_string());
            }
        }

        let TimeParams { t_max, dt } = self.time;
        if !(dt > 0.0) || !dt.is_finite() {
            ck.fail("time.dt", format!("must be > 0, got {dt}"));
        }
        if sc != Scenario::PeakScaling {
            if !(t_max >= 0.0) || !t_max.is_finite() {
                ck.fail("time.t_max", format!("must be >= 0, got {t_max}"));
            } else if dt > 0.0 && t_max / dt > 1e7 {
                ck.fail(
                    "time.dt",
                    format!("grid of {:.0} points is too large", t_max / dt),
                );
            }
        }
        if self.ensemble_size == 0 {
            ck.fail("ensemble_size", "must be >= 1");
        }
        ck.0
    }

    pub fn bath_spec(&self) -> Option<BathSpec> {
        let b = self.bath?;
        BathSpec::new(b.beta?, b.zeta?).ok()
    }

    pub fn circuit_layout(&self) -> Option<CircuitLayout> {
        CircuitLayout::new(self.chain.s, self.layout?.a).ok()
    }

    /// Sets a sweepable parameter and revalidates.
    pub fn with_parameter(
        &self,
        param: SweepParam,
        value: f64,
    ) -> Result<ExperimentConfig, ConfigErrors> {
        let mut c = self.clone();
        match param {
            SweepParam::S => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(ConfigErrors::single(
                        "chain.s",
                        format!("sweep value must be a positive integer, got {value}"),
                    ));
                }
                c.chain.s = value as usize;
            }
            SweepParam::Sigma => c.chain.sigma = value,
            SweepParam::G => c.chain.g = value,
            SweepParam::Zeta => c.bath.get_or_insert_with(BathParams::default).zeta = Some(value),
            SweepParam::Beta => c.bath.get_or_insert_with(BathParams::default).beta = Some(value),
        }
        let v = c.violations();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(ConfigErrors(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    S,
    Sigma,
    G,
    Zeta,
    Beta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::S => "s",
            SweepParam::Sigma => "sigma",
            SweepParam::G => "g",
            SweepParam::Zeta => "zeta",
            SweepParam::Beta => "beta",
        }
    }
}

impl FromStr for SweepParam {
    type Err = ConfigErrors;

    fn from_str(s: &str) -> Result<Self, ConfigErrors> {
        Ok(match s {
            "s" => SweepParam::S,
            "sigma" => SweepParam::Sigma,
            "g" => SweepParam::G,
            "zeta" => SweepParam::Zeta,
            "beta" => SweepParam::Beta,
            _ => {
                return Err(ConfigErrors::single(
                    "vary",
                    format!("unknown parameter '{s}', expected one of s, sigma, g, zeta, beta"),
                ))
            }
        })
    }
}

/// Seed from the environment override, if set.
pub fn seed_from_env() -> Result<Option<u64>, ConfigErrors> {
    match std::env::var(SEED_ENV) {
        Err(_) => Ok(None),
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            ConfigErrors::single(
                SEED_ENV,
                format!("expected an unsigned integer, got \"{v}\""),
            )
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GATE_RUN: &str = r#"
scenario = "cnot-classical"
[chain]
s = 22
sigma = 0.5
g = 2.0
[bath]
zeta = 0.05
beta = 1.0
[layout]
a = 9
"#;

    #[test]
    fn gate_run_config_is_accepted() {
        let c = validate_config(GATE_RUN, None).unwrap();
        assert_eq!(
            c.chain,
            ChainParams {
                s: 22,
                sigma: 0.5,
                g: 2.0
            }
        );
        assert_eq!(c.circuit_layout().unwrap().b(), 14);
        assert_eq!(c.bath_spec().unwrap(), BathSpec::new(1.0, 0.05).unwrap());
        assert_eq!(c.seed, DEFAULT_SEED);
    }

    #[test]
    fn missing_beta_is_named() {
        let e = validate_config(
            "scenario = \"dissipative-transport\"\n[bath]\nzeta = 0.05\n",
            None,
        )
        .unwrap_err();
        assert!(e.mentions("bath.beta"));
        assert!(!e.mentions("bath.zeta"));
        let e = validate_config("scenario = \"dissipative-transport\"\n", None).unwrap_err();
        assert!(e.mentions("bath.beta"));
    }

    #[test]
    fn all_violations_are_reported() {
        let text = "scenario = \"ballistic\"\nensemble_size = 0\n[chain]\nsigma = -1.0\n[time]\ndt = 0.0\n[bath]\nbeta = 1.0\nzeta = 0.1\n";
        let e = validate_config(text, None).unwrap_err();
        for f in ["ensemble_size", "chain.sigma", "time.dt", "bath"] {
            assert!(e.mentions(f), "{f} missing from {e}");
        }
    }

    #[test]
    fn dt_must_be_positive() {
        for dt in ["0.0", "-0.1"] {
            let e = validate_config(
                &format!("scenario = \"ballistic\"\n[time]\ndt = {dt}\n"),
                None,
            )
            .unwrap_err();
            assert!(e.mentions("time.dt"));
        }
    }

    #[test]
    fn scenario_defaults_and_overrides() {
        let c = validate_config("scenario = \"ballistic\"\nseed = 5\n", None).unwrap();
        assert_eq!((c.chain.s, c.time.t_max, c.time.dt), (20, 40.0, 0.1));
        assert_eq!(c.seed, 5);
        assert_eq!(
            validate_config("scenario = \"ballistic\"\nseed = 5\n", Some(9))
                .unwrap()
                .seed,
            9
        );
        assert!(validate_config("scenario = \"teleport\"\n", None)
            .unwrap_err()
            .mentions("scenario"));
        assert!(
            validate_config("scenario = \"ballistic\"\n[chain]\nhopping = 1.0\n", None)
                .unwrap_err()
                .mentions("config")
        );
    }

    #[test]
    fn cnot_geometry_is_checked() {
        let e = validate_config(
            "scenario = \"cnot-superposed\"\n[chain]\ns = 12\n[layout]\na = 9\n",
            None,
        )
        .unwrap_err();
        assert!(e.mentions("layout.a"));
        let e = validate_config(
            "scenario = \"cnot-classical\"\n[layout]\nregister_input = \"+1,0\"\n",
            None,
        )
        .unwrap_err();
        assert!(e.mentions("layout.register_input"));
        assert!(
            validate_config("scenario = \"bloch\"\n[layout]\na = 3\n", None)
                .unwrap_err()
                .mentions("layout")
        );
    }

    #[test]
    fn labels() {
        let l = RegisterLabel::new(Spin::Up, Spin::Down);
        assert_eq!(parse_label("+1,-1"), Some(l));
        assert_eq!(parse_label("|+1,-1>"), Some(l));
        assert_eq!(format_label(l), "+1,-1");
        assert_eq!(parse_label("+1"), None);
    }

    #[test]
    fn sweep_edits_revalidate() {
        let c = validate_config(GATE_RUN, None).unwrap();
        assert_eq!(c.with_parameter(SweepParam::G, 1.0).unwrap().chain.g, 1.0);
        assert!(c
            .with_parameter(SweepParam::S, 10.0)
            .unwrap_err()
            .mentions("layout.a"));
        assert!(c
            .with_parameter(SweepParam::Beta, -1.0)
            .unwrap_err()
            .mentions("bath.beta"));
        assert!("hbar".parse::<SweepParam>().is_err());
        let ballistic = validate_config("scenario = \"ballistic\"\n", None).unwrap();
        assert!(ballistic
            .with_parameter(SweepParam::Zeta, 0.1)
            .unwrap_err()
            .mentions("bath"));
    }
}
