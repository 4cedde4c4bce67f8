//! Experiment configuration files.
//!
//! A config is one JSON object: a `scenario` name, the scenario's parameters
//! at top level, and the optional keys `schema` (currently 1), `subcommand`,
//! `out` and `tolerance`. Validation keeps going after the first problem and
//! reports every issue with the path of the offending field.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use ergowalk::crystal::PeriodicGraph;
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Lattice,
    Crystal,
    Torus,
    Sphere,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Lattice => "lattice",
            Subcommand::Crystal => "crystal",
            Subcommand::Torus => "torus",
            Subcommand::Sphere => "sphere",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Subcommand::Lattice, Subcommand::Crystal, Subcommand::Torus, Subcommand::Sphere]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every scenario name with the subcommand it belongs to.
pub const SCENARIOS: [(&str, Subcommand); 11] = [
    ("slow-mode", Subcommand::Lattice),
    ("fourier-bound", Subcommand::Lattice),
    ("fixed-time", Subcommand::Lattice),
    ("oscillation", Subcommand::Lattice),
    ("crystal-weights", Subcommand::Crystal),
    ("cell-uniform", Subcommand::Crystal),
    ("flatband", Subcommand::Crystal),
    ("torus-rate", Subcommand::Torus),
    ("revival", Subcommand::Torus),
    ("box-states", Subcommand::Torus),
    ("sphere-gap", Subcommand::Sphere),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn list_issues(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path} is not valid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("invalid config:\n{}", list_issues(.0))]
    Invalid(Vec<Issue>),
}

impl ConfigError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            ConfigError::Invalid(issues) => issues,
            _ => &[],
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    pub scenario: Scenario,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug)]
pub enum Scenario {
    SlowMode(SlowMode),
    FourierBound(BoundSweep),
    FixedTime(FixedTime),
    Oscillation(Oscillation),
    CrystalWeights(CrystalWeights),
    CellUniform(CellUniform),
    FlatBand(FlatBand),
    TorusRate(TorusRate),
    Revival(Revival),
    BoxStates(BoxStates),
    SphereGap(SphereGap),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        let i = match self {
            Scenario::SlowMode(_) => 0,
            Scenario::FourierBound(_) => 1,
            Scenario::FixedTime(_) => 2,
            Scenario::Oscillation(_) => 3,
            Scenario::CrystalWeights(_) => 4,
            Scenario::CellUniform(_) => 5,
            Scenario::FlatBand(_) => 6,
            Scenario::TorusRate(_) => 7,
            Scenario::Revival(_) => 8,
            Scenario::BoxStates(_) => 9,
            Scenario::SphereGap(_) => 10,
        };
        SCENARIOS[i].0
    }

    pub fn subcommand(&self) -> Subcommand {
        SCENARIOS.iter().find(|(n, _)| *n == self.name()).map(|(_, s)| *s).expect("scenario is listed")
    }
}

/// Deviation of the slow-mode observable from its mean, against the closed
/// form, along a sweep of side lengths.
#[derive(Clone, Debug)]
pub struct SlowMode {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub site: usize,
}

/// Random band-limited observables `a(n) = f(n/N)` against the `(2/N) Σ|f̂|`
/// bound.
#[derive(Clone, Debug)]
pub struct BoundSweep {
    pub dims: Vec<usize>,
    pub sizes: Vec<usize>,
    pub cutoff: i64,
    pub instances: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Start {
    Origin,
    Best,
}

/// Fixed-time expectations of `f(x) = 1 - x₁` as `N` grows.
#[derive(Clone, Debug)]
pub struct FixedTime {
    pub sizes: Vec<usize>,
    pub times: Vec<f64>,
    pub start: Start,
    pub horizon: f64,
}

/// The plane wave `e^{2πi x/N}` seen from a point mass, sampled over a tail
/// window.
#[derive(Clone, Debug)]
pub struct Oscillation {
    pub side: usize,
    pub site: usize,
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

#[derive(Clone, Debug)]
pub struct WeightCase {
    pub file: PathBuf,
    pub graph: PeriodicGraph,
    pub vertex: usize,
    pub expected: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct CrystalWeights {
    pub side: usize,
    pub cases: Vec<WeightCase>,
}

#[derive(Clone, Debug)]
pub struct UniformCase {
    pub file: PathBuf,
    pub graph: PeriodicGraph,
    pub averages: Vec<f64>,
    pub expected: f64,
}

#[derive(Clone, Debug)]
pub struct CellUniform {
    pub side: usize,
    pub cases: Vec<UniformCase>,
}

/// A state supported on one cell, evolved on `Γ_N`, plus the Floquet ratio
/// along a sweep.
#[derive(Clone, Debug)]
pub struct FlatBand {
    pub file: PathBuf,
    pub graph: PeriodicGraph,
    pub sizes: Vec<usize>,
    pub evolution_side: usize,
    pub cell: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub end: f64,
    pub step: f64,
}

/// Averages from truncated Dirac states along an energy sweep.
#[derive(Clone, Debug)]
pub struct TorusRate {
    pub energies: Vec<f64>,
    pub horizon: f64,
    pub cutoff: i64,
    pub point: f64,
}

/// Instantaneous values at `t = n/(4π)` for `E = π²(2L+1)²`.
#[derive(Clone, Debug)]
pub struct Revival {
    pub half_widths: Vec<u64>,
    pub steps: Vec<i64>,
    pub point: f64,
}

/// Shrinking box states on the circle.
#[derive(Clone, Debug)]
pub struct BoxStates {
    pub widths: Vec<f64>,
    pub corner: f64,
    pub frequency: i64,
    pub disjoint: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct SphereGap {
    pub max_degree: usize,
    pub degree: usize,
    pub max_steps: usize,
    pub gap_steps: usize,
    pub peak_steps: Vec<usize>,
    pub dixon_steps: usize,
}

type Conv<T> = fn(&Value) -> Result<T, String>;

fn count(v: &Value) -> Result<usize, String> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| "expected a nonnegative integer".into())
}

fn positive_count(v: &Value) -> Result<usize, String> {
    match count(v)? {
        0 => Err("expected a positive integer".into()),
        n => Ok(n),
    }
}

fn integer(v: &Value) -> Result<i64, String> {
    v.as_i64().ok_or_else(|| "expected an integer".into())
}

fn seed(v: &Value) -> Result<u64, String> {
    v.as_u64().ok_or_else(|| "expected a nonnegative integer".into())
}

fn real(v: &Value) -> Result<f64, String> {
    v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| "expected a finite number".into())
}

fn positive(v: &Value) -> Result<f64, String> {
    let x = real(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("expected a positive number, got {x}"))
    }
}

/// A point of the unit circle, `[0, 1)`.
fn unit(v: &Value) -> Result<f64, String> {
    let x = real(v)?;
    if (0.0..1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("expected a number in [0, 1), got {x}"))
    }
}

fn text(v: &Value) -> Result<String, String> {
    v.as_str().map(str::to_owned).ok_or_else(|| "expected a string".into())
}

/// One JSON object being read, with the keys consumed so far.
struct Fields<'a> {
    obj: &'a Map<String, Value>,
    prefix: String,
    used: BTreeSet<String>,
}

impl<'a> Fields<'a> {
    fn new(obj: &'a Map<String, Value>, prefix: String) -> Self {
        Self { obj, prefix, used: BTreeSet::new() }
    }

    fn path(&self, key: &str) -> String {
        format!("{}{key}", self.prefix)
    }

    fn take(&mut self, key: &str) -> Option<&'a Value> {
        self.used.insert(key.to_owned());
        self.obj.get(key)
    }
}

struct Parser {
    issues: Vec<Issue>,
    base: PathBuf,
}

impl Parser {
    fn fail(&mut self, path: String, message: impl Into<String>) {
        self.issues.push(Issue { path, message: message.into() });
    }

    fn convert<T>(&mut self, path: String, v: &Value, conv: Conv<T>) -> Option<T> {
        conv(v).map_err(|m| self.fail(path, m)).ok()
    }

    fn required<T>(&mut self, f: &mut Fields, key: &str, conv: Conv<T>) -> Option<T> {
        match f.take(key) {
            Some(v) => self.convert(f.path(key), v, conv),
            None => {
                self.fail(f.path(key), "missing field");
                None
            }
        }
    }

    fn optional<T>(&mut self, f: &mut Fields, key: &str, conv: Conv<T>, default: T) -> Option<T> {
        match f.take(key) {
            Some(v) => self.convert(f.path(key), v, conv),
            None => Some(default),
        }
    }

    fn array<'v>(&mut self, f: &mut Fields<'v>, key: &str) -> Option<&'v Vec<Value>> {
        match f.take(key) {
            Some(Value::Array(items)) => Some(items),
            Some(_) => {
                self.fail(f.path(key), "expected an array");
                None
            }
            None => {
                self.fail(f.path(key), "missing field");
                None
            }
        }
    }

    fn list<T>(&mut self, f: &mut Fields, key: &str, conv: Conv<T>) -> Option<Vec<T>> {
        let items = self.array(f, key)?;
        let path = f.path(key);
        if items.is_empty() {
            self.fail(path.clone(), "must not be empty");
        }
        let parsed: Vec<Option<T>> =
            items.iter().enumerate().map(|(i, v)| self.convert(format!("{path}[{i}]"), v, conv)).collect();
        if items.is_empty() || parsed.iter().any(Option::is_none) {
            return None;
        }
        Some(parsed.into_iter().map(Option::unwrap).collect())
    }

    /// A list that must be strictly increasing.
    fn sweep<T: PartialOrd>(&mut self, f: &mut Fields, key: &str, conv: Conv<T>) -> Option<Vec<T>> {
        let values = self.list(f, key, conv)?;
        if let Some(i) = values.windows(2).position(|w| w[0] >= w[1]) {
            self.fail(format!("{}[{}]", f.path(key), i + 1), "sweep must be strictly increasing");
            return None;
        }
        Some(values)
    }

    fn ensure(&mut self, ok: bool, path: String, message: impl Into<String>) {
        if !ok {
            self.fail(path, message);
        }
    }

    fn graph(&mut self, f: &mut Fields, key: &str) -> Option<(PathBuf, PeriodicGraph)> {
        let name = self.required(f, key, text)?;
        let file = self.base.join(&name);
        if !file.is_file() {
            self.fail(f.path(key), format!("file not found: {}", file.display()));
            return None;
        }
        match PeriodicGraph::from_path(&file) {
            Ok(g) => Some((file, g)),
            Err(e) => {
                self.fail(f.path(key), format!("cannot load graph: {e}"));
                None
            }
        }
    }

    fn objects<'v>(&mut self, f: &mut Fields<'v>, key: &str) -> Vec<Fields<'v>> {
        let path = f.path(key);
        let Some(items) = self.array(f, key) else { return Vec::new() };
        if items.is_empty() {
            self.fail(path.clone(), "must not be empty");
        }
        let mut out = Vec::new();
        for (i, item) in items.iter().enumerate() {
            match item.as_object() {
                Some(obj) => out.push(Fields::new(obj, format!("{path}[{i}]."))),
                None => self.fail(format!("{path}[{i}]"), "expected an object"),
            }
        }
        out
    }

    fn unknown_keys(&mut self, f: &Fields) {
        for key in f.obj.keys() {
            if !f.used.contains(key) {
                self.fail(f.path(key), "unknown field");
            }
        }
    }
}

/// Reads and validates a config file. Graph paths are resolved relative to
/// the directory holding the config.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
    let value: Value =
        serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: path.into(), source })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_value(&value, &base)
}

/// Validates an already parsed config.
pub fn parse_value(value: &Value, base: &Path) -> Result<ExperimentConfig, ConfigError> {
    let Some(obj) = value.as_object() else {
        return Err(ConfigError::Invalid(vec![Issue { path: "$".into(), message: "expected an object".into() }]));
    };
    let mut p = Parser { issues: Vec::new(), base: base.to_path_buf() };
    let mut f = Fields::new(obj, String::new());

    if let Some(version) = p.optional(&mut f, "schema", seed, SCHEMA_VERSION) {
        p.ensure(version == SCHEMA_VERSION, "schema".into(), format!("unsupported schema version {version}"));
    }
    let out = p.optional(&mut f, "out", text, String::new()).filter(|s| !s.is_empty()).map(PathBuf::from);
    let tolerance = match f.take("tolerance") {
        Some(v) => p.convert("tolerance".into(), v, positive),
        None => None,
    };
    let declared = match f.take("subcommand") {
        Some(v) => match p.convert("subcommand".into(), v, text) {
            Some(s) => match Subcommand::parse(&s) {
                Some(c) => Some(c),
                None => {
                    p.fail("subcommand".into(), format!("unknown subcommand {s:?}"));
                    None
                }
            },
            None => None,
        },
        None => None,
    };
    let scenario = match p.required(&mut f, "scenario", text) {
        Some(name) => match SCENARIOS.iter().find(|(n, _)| *n == name) {
            Some((n, _)) => scenario(&mut p, &mut f, n),
            None => {
                let known: Vec<&str> = SCENARIOS.iter().map(|(n, _)| *n).collect();
                p.fail("scenario".into(), format!("unknown scenario {name:?}; expected one of {}", known.join(", ")));
                None
            }
        },
        None => None,
    };
    if let (Some(s), Some(c)) = (&scenario, declared) {
        p.ensure(
            s.subcommand() == c,
            "subcommand".into(),
            format!("scenario {} belongs to {}, not {c}", s.name(), s.subcommand()),
        );
    }
    // unknown keys are only meaningful once the scenario is known
    if scenario.is_some() {
        p.unknown_keys(&f);
    }
    match scenario {
        Some(scenario) if p.issues.is_empty() => {
            Ok(ExperimentConfig { subcommand: scenario.subcommand(), scenario, out, tolerance })
        }
        _ => Err(ConfigError::Invalid(p.issues)),
    }
}

fn scenario(p: &mut Parser, f: &mut Fields, name: &str) -> Option<Scenario> {
    match name {
        "slow-mode" => {
            let dim = p.optional(f, "d", positive_count, 1);
            let sizes = p.sweep(f, "N", count);
            let site = p.optional(f, "site", count, 0);
            if let Some(sizes) = &sizes {
                p.ensure(sizes[0] >= 3, "N[0]".into(), "sizes must be at least 3");
            }
            if let (Some(sizes), Some(site)) = (&sizes, site) {
                p.ensure(site < sizes[0], "site".into(), "site must lie on the smallest torus");
            }
            Some(Scenario::SlowMode(SlowMode { dim: dim?, sizes: sizes?, site: site? }))
        }
        "fourier-bound" => {
            let dims = p.sweep(f, "d", positive_count);
            let sizes = p.sweep(f, "N", count);
            let cutoff = p.optional(f, "K", integer, 16);
            let instances = p.optional(f, "instances", positive_count, 4);
            let seed = p.optional(f, "seed", seed, 1);
            if let Some(sizes) = &sizes {
                p.ensure(sizes[0] >= 2, "N[0]".into(), "sizes must be at least 2");
            }
            if let Some(k) = cutoff {
                p.ensure(k >= 1, "K".into(), "frequency cutoff must be positive");
            }
            Some(Scenario::FourierBound(BoundSweep {
                dims: dims?,
                sizes: sizes?,
                cutoff: cutoff?,
                instances: instances?,
                seed: seed?,
            }))
        }
        "fixed-time" => {
            let sizes = p.sweep(f, "N", count);
            let times = p.sweep(f, "t", positive);
            let start = match p.optional(f, "start", text, "best".into()) {
                Some(s) if s == "best" => Some(Start::Best),
                Some(s) if s == "origin" => Some(Start::Origin),
                Some(s) => {
                    p.fail(f.path("start"), format!("expected \"best\" or \"origin\", got {s:?}"));
                    None
                }
                None => None,
            };
            let horizon = p.optional(f, "horizon", positive, 1e4);
            if let Some(sizes) = &sizes {
                p.ensure(sizes[0] >= 2, "N[0]".into(), "sizes must be at least 2");
            }
            Some(Scenario::FixedTime(FixedTime { sizes: sizes?, times: times?, start: start?, horizon: horizon? }))
        }
        "oscillation" => {
            let side = p.required(f, "N", count);
            let site = p.optional(f, "site", count, 0);
            let start = p.required(f, "t_start", positive);
            let end = p.required(f, "t_end", positive);
            let samples = p.optional(f, "samples", positive_count, 3001);
            if let Some(n) = side {
                p.ensure(n >= 2, "N".into(), "side must be at least 2");
                if let Some(v) = site {
                    p.ensure(v < n, "site".into(), "site must lie on the torus");
                }
            }
            if let (Some(a), Some(b)) = (start, end) {
                p.ensure(a < b, "t_end".into(), "window end must exceed its start");
                p.ensure(a >= 1.0, "t_start".into(), "the unit window needs t_start >= 1");
            }
            if let Some(s) = samples {
                p.ensure(s >= 2, "samples".into(), "need at least 2 samples");
            }
            Some(Scenario::Oscillation(Oscillation { side: side?, site: site?, start: start?, end: end?, samples: samples? }))
        }
        "crystal-weights" => {
            let side = p.optional(f, "N", count, 8);
            let mut cases = Vec::new();
            let mut complete = true;
            for mut case in p.objects(f, "cases") {
                let graph = p.graph(&mut case, "graph");
                let vertex = p.required(&mut case, "vertex", count);
                let expected = p.list(&mut case, "expected", real);
                if let Some((_, g)) = &graph {
                    if let Some(v) = vertex {
                        p.ensure(v < g.vertices(), case.path("vertex"), "vertex is outside the cell");
                    }
                    if let Some(e) = &expected {
                        p.ensure(e.len() == g.vertices(), case.path("expected"), "need one weight per cell vertex");
                    }
                }
                p.unknown_keys(&case);
                match (graph, vertex, expected) {
                    (Some((file, graph)), Some(vertex), Some(expected)) => {
                        cases.push(WeightCase { file, graph, vertex, expected })
                    }
                    _ => complete = false,
                }
            }
            if let Some(n) = side {
                p.ensure(n >= 2, "N".into(), "grid side must be at least 2");
            }
            (complete && !cases.is_empty()).then_some(())?;
            Some(Scenario::CrystalWeights(CrystalWeights { side: side?, cases }))
        }
        "cell-uniform" => {
            let side = p.optional(f, "N", count, 8);
            let mut cases = Vec::new();
            let mut complete = true;
            for mut case in p.objects(f, "cases") {
                let graph = p.graph(&mut case, "graph");
                let averages = p.list(&mut case, "averages", real);
                let expected = p.required(&mut case, "expected", real);
                if let (Some((_, g)), Some(a)) = (&graph, &averages) {
                    p.ensure(a.len() == g.vertices(), case.path("averages"), "need one average per cell vertex");
                }
                p.unknown_keys(&case);
                match (graph, averages, expected) {
                    (Some((file, graph)), Some(averages), Some(expected)) => {
                        cases.push(UniformCase { file, graph, averages, expected })
                    }
                    _ => complete = false,
                }
            }
            if let Some(n) = side {
                p.ensure(n >= 2, "N".into(), "grid side must be at least 2");
            }
            (complete && !cases.is_empty()).then_some(())?;
            Some(Scenario::CellUniform(CellUniform { side: side?, cases }))
        }
        "flatband" => {
            let graph = p.graph(f, "graph");
            let sizes = p.sweep(f, "N", count);
            let evolution_side = p.optional(f, "evolution_N", count, 8);
            let cell = p.list(f, "cell", count);
            let amplitudes = p.list(f, "amplitudes", real);
            let end = p.optional(f, "t_end", positive, 10.0);
            let step = p.optional(f, "t_step", positive, 0.5);
            if let Some(sizes) = &sizes {
                p.ensure(sizes[0] >= 2, "N[0]".into(), "grid side must be at least 2");
            }
            if let Some((_, g)) = &graph {
                if let Some(c) = &cell {
                    p.ensure(c.len() == g.dim(), "cell".into(), "cell needs one coordinate per lattice direction");
                    if let Some(n) = evolution_side {
                        p.ensure(c.iter().all(|&x| x < n), "cell".into(), "cell lies outside the evolution torus");
                    }
                }
                if let Some(a) = &amplitudes {
                    p.ensure(a.len() == g.vertices(), "amplitudes".into(), "need one amplitude per cell vertex");
                    p.ensure(a.iter().any(|&x| x != 0.0), "amplitudes".into(), "state must be nonzero");
                }
            }
            let (file, graph) = graph?;
            Some(Scenario::FlatBand(FlatBand {
                file,
                graph,
                sizes: sizes?,
                evolution_side: evolution_side?,
                cell: cell?,
                amplitudes: amplitudes?,
                end: end?,
                step: step?,
            }))
        }
        "torus-rate" => {
            let energies = p.sweep(f, "E", positive);
            let horizon = p.optional(f, "T", positive, 1.0);
            let cutoff = p.optional(f, "K", integer, 8);
            let point = p.optional(f, "y", unit, 0.3);
            if let Some(k) = cutoff {
                p.ensure(k >= 1, "K".into(), "frequency cutoff must be positive");
            }
            Some(Scenario::TorusRate(TorusRate { energies: energies?, horizon: horizon?, cutoff: cutoff?, point: point? }))
        }
        "revival" => {
            let half_widths = p.sweep(f, "L", seed);
            let steps = p.sweep(f, "n", integer);
            let point = p.optional(f, "y", unit, 0.0);
            Some(Scenario::Revival(Revival { half_widths: half_widths?, steps: steps?, point: point? }))
        }
        "box-states" => {
            let widths = p.sweep(f, "eps", positive);
            let corner = p.optional(f, "corner", unit, 0.4);
            let frequency = p.optional(f, "frequency", integer, 2);
            let disjoint = match f.take("disjoint") {
                Some(v) => match v.as_array().map(|a| a.iter().map(unit).collect::<Result<Vec<_>, _>>()) {
                    Some(Ok(pair)) if pair.len() == 2 => Some([pair[0], pair[1]]),
                    _ => {
                        p.fail(f.path("disjoint"), "expected two corners in [0, 1)");
                        None
                    }
                },
                None => Some([0.1, 0.6]),
            };
            if let Some(w) = &widths {
                p.ensure(w.iter().all(|&x| x < 1.0), "eps".into(), "box widths must be below 1");
            }
            if let Some(m) = frequency {
                p.ensure(m != 0, "frequency".into(), "observable frequency must be nonzero");
            }
            if let (Some(w), Some([x, y])) = (&widths, disjoint) {
                let gap = (x - y).rem_euclid(1.0).min((y - x).rem_euclid(1.0));
                p.ensure(gap >= w[0], "disjoint".into(), "boxes at the smallest width overlap");
            }
            Some(Scenario::BoxStates(BoxStates {
                widths: widths?,
                corner: corner?,
                frequency: frequency?,
                disjoint: disjoint?,
            }))
        }
        "sphere-gap" => {
            let max_degree = p.optional(f, "k_max", count, 200);
            let degree = p.optional(f, "k", count, 50);
            let max_steps = p.optional(f, "n_max", count, 500);
            let gap_steps = p.optional(f, "n_gap", count, 200);
            let peak_steps = p.sweep(f, "peak_n", positive_count);
            let dixon_steps = p.optional(f, "dixon_n", positive_count, 500);
            if let (Some(k), Some(kmax)) = (degree, max_degree) {
                p.ensure(k <= kmax, "k".into(), "degree must not exceed k_max");
            }
            if let Some(peaks) = &peak_steps {
                p.ensure(peaks.len() >= 3, "peak_n".into(), "need at least 3 points to fit a slope");
            }
            Some(Scenario::SphereGap(SphereGap {
                max_degree: max_degree?,
                degree: degree?,
                max_steps: max_steps?,
                gap_steps: gap_steps?,
                peak_steps: peak_steps?,
                dixon_steps: dixon_steps?,
            }))
        }
        _ => unreachable!("scenario names come from SCENARIOS"),
    }
}
