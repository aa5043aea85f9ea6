//! Reproducible runs: construct a generating set from a named recipe, build
//! its graph, run the requested certificates and assemble a report. A run
//! is a pure function of its [`RunConfig`] apart from `runtime_ms`.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cayley::{build_cayley, build_schreier, export_edges, GraphError, GraphKind, SparseGraph};
use crate::decomp::{
    alt_product_cover, block_factors, default_windows, elementary_word_length_max, product_cover_depth,
    root_factors, subset_factors, DecompError, DecompositionReport,
};
use crate::ffield::{is_prime, Field, FieldError};
use crate::gensets::{
    cube_embeddings, elementary_set, nonsplit_torus, power_generators, search_conjugator,
    sl2_over_extension_plus_conjugator, sl2_standard, sl3k_point_action, alt_generators,
    ConjugatorSearch, CubeSpec, GeneratingSet, GensetError, SearchOptions,
};
use crate::groups::{enumerate_group, GroupHandle, GroupKind, GroupTable, PointDomain, DEFAULT_CAP};
use crate::spectral::{
    class_average_spectrum, diameter, expansion_exact, lambda2_auto, ClassAverageReport,
    DiameterReport, ExpansionReport, LanczosOptions, SpectralError, SpectralReport,
    CLASS_AVERAGE_LIMIT, EXACT_LIMIT,
};

pub const REPORT_VERSION: u32 = 1;
pub const CSV_VERSION_LINE: &str = "# forge scan csv v1";
pub const CSV_COLUMNS: [&str; 10] = [
    "recipe", "params", "n", "degree", "lambda2", "gap", "diameter", "runtime_ms", "seed", "error",
];

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Genset(#[from] GensetError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recipe {
    #[serde(rename = "sl2-standard")]
    Sl2Standard,
    #[serde(rename = "torus-conj")]
    TorusConj,
    #[serde(rename = "ros-sl2")]
    RosSl2,
    #[serde(rename = "elementary")]
    Elementary,
    #[serde(rename = "cube")]
    Cube,
    #[serde(rename = "el3-power")]
    El3Power,
}

impl Recipe {
    pub const ALL: [Recipe; 6] = [
        Recipe::Sl2Standard,
        Recipe::TorusConj,
        Recipe::RosSl2,
        Recipe::Elementary,
        Recipe::Cube,
        Recipe::El3Power,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recipe::Sl2Standard => "sl2-standard",
            Recipe::TorusConj => "torus-conj",
            Recipe::RosSl2 => "ros-sl2",
            Recipe::Elementary => "elementary",
            Recipe::Cube => "cube",
            Recipe::El3Power => "el3-power",
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recipe {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        Recipe::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| PipelineError::Config(format!("unknown recipe {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cert {
    #[serde(rename = "spectrum")]
    Spectrum,
    #[serde(rename = "expansion")]
    Expansion,
    #[serde(rename = "diameter")]
    Diameter,
    #[serde(rename = "decompose")]
    Decompose,
    #[serde(rename = "schreier")]
    Schreier,
    #[serde(rename = "class-average")]
    ClassAverage,
}

impl Cert {
    pub const ALL: [Cert; 6] = [
        Cert::Spectrum,
        Cert::Expansion,
        Cert::Diameter,
        Cert::Decompose,
        Cert::Schreier,
        Cert::ClassAverage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Cert::Spectrum => "spectrum",
            Cert::Expansion => "expansion",
            Cert::Diameter => "diameter",
            Cert::Decompose => "decompose",
            Cert::Schreier => "schreier",
            Cert::ClassAverage => "class-average",
        }
    }
}

impl FromStr for Cert {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        Cert::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| PipelineError::Config(format!("unknown certificate {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub recipe: Recipe,
    pub p: Option<u64>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub m: Option<usize>,
    pub s: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub cert: Vec<Cert>,
    pub assert_lambda_below: Option<f64>,
    pub cap: usize,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub export_edges: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            recipe: Recipe::Sl2Standard,
            p: None,
            k: None,
            d: None,
            m: None,
            s: None,
            trials: 16,
            seed: 0,
            tol: 1e-10,
            max_iter: 20_000,
            cert: vec![Cert::Spectrum],
            assert_lambda_below: None,
            cap: DEFAULT_CAP,
            csv: None,
            json: None,
            export_edges: None,
        }
    }
}

impl RunConfig {
    fn lanczos(&self) -> LanczosOptions {
        LanczosOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            ..Default::default()
        }
    }

    fn search(&self) -> SearchOptions {
        SearchOptions {
            trials: self.trials,
            seed: self.seed,
            cap: self.cap,
            lanczos: self.lanczos(),
        }
    }

    fn wants(&self, c: Cert) -> bool {
        self.cert.contains(&c)
    }

    fn require_p(&self) -> Result<u64> {
        let p = self
            .p
            .ok_or_else(|| PipelineError::Config(format!("recipe {} needs --p", self.recipe)))?;
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p).into());
        }
        Ok(p)
    }

    fn field(&self) -> Result<Field> {
        let p = self.require_p()?;
        Ok(Field::with_degree(p, self.k.unwrap_or(1))?)
    }

    /// Parameter string used in CSV rows, e.g. `p=5;k=1`.
    pub fn params_string(&self) -> String {
        let mut parts = Vec::new();
        for (name, v) in [
            ("p", self.p.map(|v| v as usize)),
            ("k", self.k),
            ("d", self.d),
            ("m", self.m),
            ("s", self.s),
        ] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        parts.join(";")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSummary {
    pub count: usize,
    pub symmetric: bool,
    pub has_identity: bool,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub degree: usize,
    pub kind: GraphKind,
    pub connected: bool,
    pub self_loops: bool,
}

impl GraphSummary {
    fn of(g: &SparseGraph) -> Self {
        GraphSummary {
            n: g.n(),
            degree: g.degree(),
            kind: g.kind(),
            connected: g.is_connected(),
            self_loops: g.has_self_loops(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub torus_order: usize,
    pub trials: usize,
    pub best_trial: usize,
    pub lambda2: f64,
    pub lambdas: Vec<f64>,
    pub ramanujan_bound: f64,
    pub below_ramanujan: bool,
    pub below_19_20: bool,
}

impl SearchSummary {
    fn of(s: &ConjugatorSearch, torus_order: usize) -> Self {
        SearchSummary {
            torus_order,
            trials: s.lambdas.len(),
            best_trial: s.best_trial,
            lambda2: s.lambda2,
            lambdas: s.lambdas.clone(),
            ramanujan_bound: s.ramanujan_bound,
            below_ramanujan: s.below_ramanujan,
            below_19_20: s.below_19_20,
        }
    }
}

/// A certificate result or the reason it was not computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Done(T),
    Skipped { skipped: String },
}

impl<T> Outcome<T> {
    fn skipped(reason: impl Into<String>) -> Self {
        Outcome::Skipped {
            skipped: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchreierSummary {
    pub graph: GraphSummary,
    pub spectrum: SpectralReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub threshold: f64,
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub recipe: Recipe,
    pub params: String,
    pub seed: u64,
    pub group: GroupHandle,
    /// Order of the group generated by the set (Cayley graphs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_order: Option<usize>,
    pub generators: GeneratorSummary,
    pub graph: GraphSummary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub searches: Vec<SearchSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectralReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expansion: Option<Outcome<ExpansionReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter: Option<Outcome<DiameterReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decompose: Option<Outcome<DecompositionReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schreier: Option<Outcome<SchreierSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class_average: Option<Outcome<ClassAverageReport>>,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
    pub passed: bool,
    pub runtime_ms: u64,
}

impl RunReport {
    /// Pretty JSON with `runtime_ms` zeroed, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.runtime_ms = 0;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }
}

struct Built {
    set: GeneratingSet,
    graph: SparseGraph,
    table: Option<GroupTable>,
    searches: Vec<SearchSummary>,
}

fn cayley(set: GeneratingSet, cap: usize, searches: Vec<SearchSummary>) -> Result<Built> {
    let c = build_cayley(&set, cap)?;
    Ok(Built {
        set: c.set,
        graph: c.graph,
        table: Some(c.table),
        searches,
    })
}

fn build(cfg: &RunConfig) -> Result<Built> {
    match cfg.recipe {
        Recipe::Sl2Standard => cayley(sl2_standard(&cfg.field()?), cfg.cap, Vec::new()),
        Recipe::TorusConj => {
            let field = cfg.field()?;
            let d = cfg.d.unwrap_or(2);
            let torus = nonsplit_torus(&field, d, cfg.cap)?;
            let search = search_conjugator(&torus, &field, &cfg.search())?;
            let summary = SearchSummary::of(&search, torus.order());
            cayley(search.set, cfg.cap, vec![summary])
        }
        Recipe::RosSl2 => {
            let base = cfg.field()?;
            let m = cfg.m.unwrap_or(2);
            let gens = sl2_over_extension_plus_conjugator(&base, m, &cfg.search())?;
            let p = base.p() as usize;
            let mut searches = vec![SearchSummary::of(&gens.c_search, p + 1)];
            if let Some(ds) = &gens.d_search {
                let q = base.order() as usize;
                let order = (q.pow(2 * m as u32) - 1) / (q - 1);
                searches.push(SearchSummary::of(ds, order));
            }
            cayley(gens.set, cfg.cap, searches)
        }
        Recipe::Elementary => {
            let d = cfg.d.unwrap_or(3);
            cayley(elementary_set(d, &cfg.field()?), cfg.cap, Vec::new())
        }
        Recipe::Cube => {
            let k = cfg.k.unwrap_or(1);
            let spec = match cfg.m {
                None => CubeSpec::paper(k)?,
                Some(m) => CubeSpec::reduced(cfg.d.unwrap_or((1 << (3 * k)) - 1), m)?,
            };
            let base = if spec.d + 1 == 1 << (3 * k) {
                sl3k_point_action(k)?
            } else {
                alt_generators(spec.d)
            };
            let cube = cube_embeddings(&spec, &base)?;
            let graph = build_schreier(&cube.set, &PointDomain::Points { n: spec.n })?;
            Ok(Built {
                set: cube.set,
                graph,
                table: None,
                searches: Vec::new(),
            })
        }
        Recipe::El3Power => {
            let pres = power_generators(cfg.k.unwrap_or(1), cfg.s.unwrap_or(1))?;
            cayley(pres.set, cfg.cap, Vec::new())
        }
    }
}

fn sl_params(h: &GroupHandle) -> Option<(usize, Field)> {
    match &h.kind {
        GroupKind::SL { d, field } => Some((*d, Field::new(field.clone()))),
        _ => None,
    }
}

/// Executes a run and writes the requested outputs. Certification
/// failures are reported through `passed`, not as errors.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let built = build(cfg)?;
    let g = &built.graph;
    let mut warnings = Vec::new();
    if built.set.has_identity() {
        warnings.push("generating set contains the identity; graph has self-loops".to_string());
    }

    let need_spectrum = cfg.wants(Cert::Spectrum) || cfg.assert_lambda_below.is_some();
    let spectrum = if need_spectrum {
        Some(lambda2_auto(g, &cfg.lanczos())?)
    } else {
        None
    };

    let expansion = cfg.wants(Cert::Expansion).then(|| {
        if g.n() > EXACT_LIMIT {
            Ok(Outcome::skipped(format!("n = {} exceeds {EXACT_LIMIT}", g.n())))
        } else {
            expansion_exact(g).map(Outcome::Done)
        }
    });
    let expansion = expansion.transpose()?;

    let diameter = cfg.wants(Cert::Diameter).then(|| match diameter(g, cfg.seed) {
        Ok(d) => Ok(Outcome::Done(d)),
        Err(SpectralError::Disconnected) => Ok(Outcome::skipped("Disconnected")),
        Err(e) => Err(e),
    });
    let diameter = diameter.transpose()?;

    let sl = sl_params(built.set.ambient());
    let decompose = if cfg.wants(Cert::Decompose) {
        Some(match &sl {
            Some((d, field)) => match elementary_word_length_max(*d, field, cfg.cap) {
                Ok(r) => Outcome::Done(r),
                Err(DecompError::CapExceeded(c)) => Outcome::skipped(format!("CapExceeded({c})")),
                Err(e) => return Err(e.into()),
            },
            None => Outcome::skipped("elementary decomposition needs an SL ambient group"),
        })
    } else {
        None
    };

    let schreier = if cfg.wants(Cert::Schreier) {
        Some(match (&sl, g.kind()) {
            (_, GraphKind::Schreier) => Outcome::Done(SchreierSummary {
                graph: GraphSummary::of(g),
                spectrum: match &spectrum {
                    Some(s) => s.clone(),
                    None => lambda2_auto(g, &cfg.lanczos())?,
                },
            }),
            (Some((d, field)), _) => {
                let domain = PointDomain::NonzeroVectors {
                    field: field.clone(),
                    d: *d,
                };
                let sg = build_schreier(&built.set, &domain)?;
                Outcome::Done(SchreierSummary {
                    graph: GraphSummary::of(&sg),
                    spectrum: lambda2_auto(&sg, &cfg.lanczos())?,
                })
            }
            _ => Outcome::skipped("no natural point action"),
        })
    } else {
        None
    };

    let class_average = if cfg.wants(Cert::ClassAverage) {
        Some(match &built.table {
            Some(t) if t.order() <= CLASS_AVERAGE_LIMIT => Outcome::Done(class_average_spectrum(
                t,
                &built.set.generators()[0].element,
            )?),
            Some(t) => Outcome::skipped(format!("group order {} exceeds {CLASS_AVERAGE_LIMIT}", t.order())),
            None => Outcome::skipped("group not enumerated"),
        })
    } else {
        None
    };

    let mut assertions = Vec::new();
    if let (Some(th), Some(s)) = (cfg.assert_lambda_below, &spectrum) {
        assertions.push(Assertion {
            name: "lambda2_below".into(),
            threshold: th,
            value: s.lambda2,
            passed: s.lambda2 < th,
        });
    }
    let passed = assertions.iter().all(|a| a.passed);

    if let Some(path) = &cfg.export_edges {
        export_edges(g, path)?;
    }

    let report = RunReport {
        version: REPORT_VERSION,
        recipe: cfg.recipe,
        params: cfg.params_string(),
        seed: cfg.seed,
        group: built.set.ambient().clone(),
        generated_order: built.table.as_ref().map(|t| t.order()),
        generators: GeneratorSummary {
            count: built.set.len(),
            symmetric: built.set.is_symmetric(),
            has_identity: built.set.has_identity(),
            labels: built.set.labels().iter().map(|s| s.to_string()).collect(),
        },
        graph: GraphSummary::of(g),
        searches: built.searches,
        spectrum,
        expansion,
        diameter,
        decompose,
        schreier,
        class_average,
        assertions,
        warnings,
        passed,
        runtime_ms: start.elapsed().as_millis() as u64,
    };

    if let Some(path) = &cfg.json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    if let Some(path) = &cfg.csv {
        let row = ScanRow::from_report(cfg, &report);
        write_csv(std::fs::File::create(path)?, &[row])?;
    }
    Ok(report)
}

/// A family of runs: the cartesian product of the listed parameter values
/// (in the order p, k, d, m, s). An absent list leaves that parameter unset;
/// an empty list yields no rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ScanConfig {
    pub base: RunConfig,
    pub p: Option<Vec<u64>>,
    pub k: Option<Vec<usize>>,
    pub d: Option<Vec<usize>>,
    pub m: Option<Vec<usize>>,
    pub s: Option<Vec<usize>>,
}

fn values<T: Copy>(list: &Option<Vec<T>>) -> Vec<Option<T>> {
    match list {
        None => vec![None],
        Some(v) => v.iter().map(|&x| Some(x)).collect(),
    }
}

impl ScanConfig {
    pub fn members(&self) -> Vec<RunConfig> {
        let mut out = Vec::new();
        for p in values(&self.p) {
            for k in values(&self.k) {
                for d in values(&self.d) {
                    for m in values(&self.m) {
                        for s in values(&self.s) {
                            out.push(RunConfig {
                                p: p.or(self.base.p),
                                k: k.or(self.base.k),
                                d: d.or(self.base.d),
                                m: m.or(self.base.m),
                                s: s.or(self.base.s),
                                csv: None,
                                json: None,
                                export_edges: None,
                                ..self.base.clone()
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub recipe: String,
    pub params: String,
    pub n: Option<usize>,
    pub degree: Option<usize>,
    pub lambda2: Option<f64>,
    pub gap: Option<f64>,
    pub diameter: Option<usize>,
    pub runtime_ms: u64,
    pub seed: u64,
    pub error: String,
}

impl ScanRow {
    fn from_report(cfg: &RunConfig, r: &RunReport) -> Self {
        let mut params = r.params.clone();
        if let Some(s) = r.searches.first() {
            params.push_str(&format!(";torus={}", s.torus_order));
        }
        ScanRow {
            recipe: cfg.recipe.to_string(),
            params,
            n: Some(r.graph.n),
            degree: Some(r.graph.degree),
            lambda2: r.spectrum.as_ref().map(|s| s.lambda2),
            gap: r.spectrum.as_ref().map(|s| s.gap),
            diameter: match &r.diameter {
                Some(Outcome::Done(d)) => Some(d.diameter),
                _ => None,
            },
            runtime_ms: r.runtime_ms,
            seed: cfg.seed,
            error: String::new(),
        }
    }

    fn failed(cfg: &RunConfig, err: &PipelineError, runtime_ms: u64) -> Self {
        ScanRow {
            recipe: cfg.recipe.to_string(),
            params: cfg.params_string(),
            n: None,
            degree: None,
            lambda2: None,
            gap: None,
            diameter: None,
            runtime_ms,
            seed: cfg.seed,
            error: err.to_string(),
        }
    }
}

/// Runs every family member (in parallel) and returns rows in family order.
/// A failing member produces a row with the error text.
pub fn scan(cfg: &ScanConfig) -> Vec<ScanRow> {
    cfg.members()
        .par_iter()
        .map(|m| {
            let start = Instant::now();
            match run(m) {
                Ok(r) => ScanRow::from_report(m, &r),
                Err(e) => ScanRow::failed(m, &e, start.elapsed().as_millis() as u64),
            }
        })
        .collect()
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// CSV with a version comment line, a fixed header and one line per row.
pub fn write_csv<W: Write>(mut out: W, rows: &[ScanRow]) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.recipe.clone(),
            r.params.clone(),
            fmt_opt(&r.n),
            fmt_opt(&r.degree),
            fmt_opt(&r.lambda2),
            fmt_opt(&r.gap),
            fmt_opt(&r.diameter),
            r.runtime_ms.to_string(),
            r.seed.to_string(),
            r.error.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecomposeTarget {
    Sl,
    Alt,
}

/// Factor family for `decompose`: `subsets:<b>`, `blocks:<b>`,
/// `windows:<n_k>` or `elementary`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorFamily {
    Subsets(usize),
    Blocks(usize),
    Windows(usize),
    Elementary,
}

impl FromStr for FactorFamily {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || PipelineError::Config(format!("bad factor family {s:?}"));
        if s == "elementary" {
            return Ok(FactorFamily::Elementary);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let b: usize = arg.parse().map_err(|_| bad())?;
        match kind {
            "subsets" => Ok(FactorFamily::Subsets(b)),
            "blocks" => Ok(FactorFamily::Blocks(b)),
            "windows" => Ok(FactorFamily::Windows(b)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeConfig {
    pub target: DecomposeTarget,
    pub d: usize,
    pub n: usize,
    pub p: u64,
    pub k: usize,
    pub factors: FactorFamily,
    pub max_rounds: usize,
    pub cap: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig {
            target: DecomposeTarget::Sl,
            d: 3,
            n: 5,
            p: 2,
            k: 1,
            factors: FactorFamily::Subsets(2),
            max_rounds: 12,
            cap: DEFAULT_CAP,
        }
    }
}

/// Product-cover depth of the target by the chosen factor family.
pub fn decompose(cfg: &DecomposeConfig) -> Result<DecompositionReport> {
    match cfg.target {
        DecomposeTarget::Alt => {
            let FactorFamily::Windows(n_k) = cfg.factors else {
                return Err(PipelineError::Config("alt targets take windows:<n_k>".into()));
            };
            let windows = default_windows(cfg.n, n_k);
            Ok(alt_product_cover(cfg.n, &windows, cfg.max_rounds, cfg.cap)?)
        }
        DecomposeTarget::Sl => {
            if !is_prime(cfg.p) {
                return Err(FieldError::NotPrime(cfg.p).into());
            }
            let field = Field::with_degree(cfg.p, cfg.k)?;
            let factors = match cfg.factors {
                FactorFamily::Subsets(b) => subset_factors(&field, cfg.d, b),
                FactorFamily::Blocks(b) => block_factors(&field, cfg.d, b),
                FactorFamily::Elementary => root_factors(&field, cfg.d),
                FactorFamily::Windows(_) => {
                    return Err(PipelineError::Config("windows apply to alt targets".into()))
                }
            };
            let target = GroupHandle::sl(cfg.d, field.spec());
            let table = enumerate_group(&elementary_set(cfg.d, &field).group_elements(), cfg.cap)
                .map_err(GensetError::from)?;
            Ok(product_cover_depth(&table, &target, &factors, cfg.max_rounds, cfg.cap)?)
        }
    }
}
