//! Scene ingestion, method dispatch, calibration and cross-checking for the
//! `holink` command-line tool.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use holink::gauss::{crossing_linking_auto, gauss_linking, line_gauss_closed, line_vectors, Polyline3};
use holink::geometry::{
    constants_from_json, constants_to_json, CurveKind, NormalizationConstants, OneForm, ParamCurve, Scene,
};
use holink::holo::{complex_linking_number, holo_linking_integral, BmContext, LineData};
use holink::quadrature::{QuadConfig, QuadResult};
use holink::residue::{atiyah_p3, lift_theta, residue_linking, MAX_MULTIPLIER_DEGREE};
use holink::{Complex64, Error};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Vertices per curve when a closed curve is replaced by a polyline.
pub const POLYLINE_VERTICES: usize = 1024;

/// Reference radii of the calibration runs.
pub const CALIBRATION_RADII: [f64; 2] = [40.0, 80.0];

/// Relative disagreement between the two calibration radii that is tolerated.
pub const CALIBRATION_SPREAD: f64 = 0.01;

/// Relative rounding allowance in cross-checks, so that two exact routes
/// agreeing to the last few bits still compare equal.
pub const XCHECK_ROUNDING: f64 = 1e-12;

pub const DEFAULT_CONSTANTS_PATH: &str = "holink-constants.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Method {
    GaussIntegral,
    GaussCrossing,
    GaussClosed,
    HoloIntegral,
    HoloClosed,
    HoloPv,
    ComplexLink,
    Residue,
    Atiyah,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::GaussIntegral,
        Method::GaussCrossing,
        Method::GaussClosed,
        Method::HoloIntegral,
        Method::HoloClosed,
        Method::HoloPv,
        Method::ComplexLink,
        Method::Residue,
        Method::Atiyah,
    ];

    /// Methods that compute the same linking value and so take part in a
    /// cross-check. The complex linking number and the P³ comparison are
    /// different quantities.
    pub fn comparable(self) -> bool {
        !matches!(self, Method::ComplexLink | Method::Atiyah)
    }

    fn needs_kappa(self) -> bool {
        matches!(self, Method::HoloClosed | Method::Residue)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("method serializes");
        f.write_str(s.as_str().expect("unit variant"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Clone, Debug, PartialEq, clap::Args)]
pub struct Flags {
    /// Relative tolerance target.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 24)]
    pub max_depth: u32,
    /// Gauss–Legendre points per panel per axis.
    #[arg(long, default_value_t = 8)]
    pub panel_order: usize,
    /// Truncation radius for non-compact curves.
    #[arg(long, default_value_t = 40.0)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Constants file; calibrated and written when missing.
    #[arg(long, default_value = DEFAULT_CONSTANTS_PATH)]
    pub constants: PathBuf,
    /// Seed for perturbing a degenerate crossing direction.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Drop the C₃ prefactor of the kernel.
    #[arg(long)]
    pub no_cn: bool,
    /// Worker threads for quadrature (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            tol: 1e-6,
            max_depth: 24,
            panel_order: 8,
            radius: 40.0,
            format: Format::Json,
            constants: PathBuf::from(DEFAULT_CONSTANTS_PATH),
            seed: 0,
            no_cn: false,
            workers: None,
        }
    }
}

impl Flags {
    pub fn quad_config(&self) -> QuadConfig {
        QuadConfig {
            tol: self.tol,
            max_depth: self.max_depth,
            panel_order: self.panel_order,
            truncation_radius: self.radius,
            workers: self.workers,
            ..QuadConfig::default()
        }
    }

    pub fn context(&self) -> BmContext {
        BmContext {
            include_cn: !self.no_cn,
            ..BmContext::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("method {method} is not applicable: {reason}")]
    MethodInapplicable { method: Method, reason: String },

    #[error("calibration unstable: {0}")]
    CalibrationUnstable(String),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    /// 2 for problems with the input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_scene_error() => 2,
            CliError::Core(Error::CurvesTooClose { .. }) => 2,
            CliError::Core(_) => 3,
            CliError::MethodInapplicable { .. } | CliError::Io { .. } => 2,
            CliError::CalibrationUnstable(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsSnapshot {
    #[serde(rename = "C3")]
    pub c3: f64,
    pub kappa_line: Option<[f64; 2]>,
    pub kappa_xmethod: Option<[f64; 2]>,
}

impl From<&NormalizationConstants> for ConstantsSnapshot {
    fn from(k: &NormalizationConstants) -> Self {
        ConstantsSnapshot {
            c3: k.c3,
            kappa_line: k.kappa_line.map(pair),
            kappa_xmethod: k.kappa_xmethod.map(pair),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub tol: f64,
    pub max_depth: u32,
    pub panel_order: usize,
    pub truncation_radius: f64,
    pub pv_epsilons: Vec<f64>,
    pub include_cn: bool,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl ConfigSnapshot {
    fn new(cfg: &QuadConfig, flags: &Flags) -> Self {
        ConfigSnapshot {
            tol: cfg.tol,
            max_depth: cfg.max_depth,
            panel_order: cfg.panel_order,
            truncation_radius: cfg.truncation_radius,
            pv_epsilons: cfg.pv_epsilons.clone(),
            include_cn: !flags.no_cn,
            seed: flags.seed,
            workers: cfg.workers,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scene_id: String,
    pub method: Method,
    pub value: [f64; 2],
    pub err_estimate: f64,
    pub tail_estimate: f64,
    pub converged: bool,
    pub constants: ConstantsSnapshot,
    pub config: ConfigSnapshot,
    /// Method-specific extras (crossing direction, extrapolation data, …).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

/// What one method produced, before it is wrapped into a report.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub value: Complex64,
    pub err_estimate: f64,
    pub tail_estimate: f64,
    pub converged: bool,
    pub details: BTreeMap<String, serde_json::Value>,
}

impl Outcome {
    fn exact(value: Complex64) -> Self {
        Outcome {
            value,
            err_estimate: 0.0,
            tail_estimate: 0.0,
            converged: true,
            details: BTreeMap::new(),
        }
    }

    fn from_quad(r: QuadResult) -> Self {
        let mut details = BTreeMap::new();
        details.insert("panels_evaluated".into(), json!(r.panels_evaluated));
        if let Some(t) = &r.truncation {
            details.insert("radius".into(), json!(t.radius));
            details.insert("at_radius".into(), json!(pair(t.at_radius)));
            details.insert("at_double_radius".into(), json!(pair(t.at_double)));
        }
        if let Some(pv) = &r.pv {
            details.insert("pv_epsilons".into(), json!(pv.epsilons));
            details.insert(
                "pv_extrapolants".into(),
                json!(pv.extrapolants.iter().copied().map(pair).collect::<Vec<_>>()),
            );
        }
        Outcome {
            value: r.value,
            err_estimate: r.err_estimate,
            tail_estimate: r.tail_estimate,
            converged: r.converged,
            details,
        }
    }
}

pub fn scene_id(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn load_scene(path: &Path) -> CliResult<Scene> {
    Ok(Scene::from_path(path)?)
}

struct Query<'a> {
    c1: (&'a str, &'a ParamCurve),
    c2: (&'a str, &'a ParamCurve),
}

impl<'a> Query<'a> {
    fn new(scene: &'a Scene) -> Result<Self, String> {
        let (a, b) = scene
            .linking_pair()
            .ok_or_else(|| "the scene needs two curves".to_string())?;
        Ok(Query {
            c1: (&a.name, &a.value),
            c2: (&b.name, &b.value),
        })
    }

    fn kinds(&self) -> (CurveKind, CurveKind) {
        (self.c1.1.kind, self.c2.1.kind)
    }

    fn both(&self, kind: CurveKind) -> Result<(), String> {
        if self.kinds() == (kind, kind) {
            Ok(())
        } else {
            Err(format!("needs two {kind:?} curves, got {:?}", self.kinds()))
        }
    }

    fn forms(&self, scene: &'a Scene) -> Result<(&'a OneForm, &'a OneForm), String> {
        let form = |(name, _): (&str, &ParamCurve)| {
            scene
                .form_on(name)
                .ok_or_else(|| format!("no form declared on curve `{name}`"))
        };
        Ok((form(self.c1)?, form(self.c2)?))
    }

    fn marked(&self) -> bool {
        !(self.c1.1.marked_points.is_empty() && self.c2.1.marked_points.is_empty())
    }

    fn lines(&self) -> Result<(), String> {
        if self.c1.1.line_data().is_some() && self.c2.1.line_data().is_some() {
            Ok(())
        } else {
            Err("both curves must be lines".into())
        }
    }
}

/// Whether the scene carries what `method` needs; the reason when not.
pub fn applicable(scene: &Scene, method: Method) -> Result<(), String> {
    if method == Method::Atiyah {
        return scene
            .atiyah
            .as_ref()
            .map(|_| ())
            .ok_or_else(|| "the scene has no `atiyah` section".into());
    }
    let q = Query::new(scene)?;
    match method {
        Method::GaussIntegral => q
            .both(CurveKind::RealClosed)
            .or_else(|_| q.both(CurveKind::RealOpen))
            .map_err(|_| format!("needs two closed real curves or two real lines, got {:?}", q.kinds())),
        Method::GaussCrossing => q.both(CurveKind::RealClosed),
        Method::GaussClosed => q.both(CurveKind::RealOpen).and_then(|_| q.lines()),
        Method::ComplexLink => q.both(CurveKind::ComplexAffine),
        Method::HoloIntegral | Method::HoloPv | Method::HoloClosed | Method::Residue => {
            q.both(CurveKind::ComplexAffine)?;
            q.forms(scene)?;
            match method {
                Method::HoloIntegral if q.marked() => Err("curves carry marked points; use holo_pv".into()),
                Method::HoloPv if !q.marked() => Err("no marked points to take a principal value around".into()),
                Method::HoloClosed if q.marked() => Err("marked points are not allowed on lines".into()),
                Method::HoloClosed => q.lines(),
                Method::Residue => scene
                    .cuts_for(q.c1.0)
                    .find(|c| c.f2.is_some())
                    .map(|_| ())
                    .ok_or_else(|| format!("no complete-intersection cut contains `{}`", q.c1.0)),
                _ => Ok(()),
            }
        }
        Method::Atiyah => unreachable!(),
    }
}

/// Runs one method. `constants` must be calibrated for methods that use
/// kappa; they are read in the canonical (C₃ included) convention.
pub fn evaluate(
    scene: &Scene,
    method: Method,
    flags: &Flags,
    constants: &NormalizationConstants,
) -> CliResult<Outcome> {
    applicable(scene, method).map_err(|reason| CliError::MethodInapplicable { method, reason })?;
    let cfg = flags.quad_config();
    cfg.validate()?;
    let ctx = flags.context();
    let scaled = ctx.constants(constants);
    if method == Method::Atiyah {
        let a = scene.atiyah.as_ref().expect("checked by applicable");
        let r = atiyah_p3(&a.l, &a.p)?;
        let mut out = Outcome::exact(r.atiyah);
        out.details.insert("holomorphic".into(), json!(pair(r.holomorphic)));
        out.details.insert("ratio".into(), json!(r.ratio.map(pair)));
        return Ok(out);
    }
    let q = Query::new(scene).expect("checked by applicable");
    let (c1, c2) = (q.c1.1, q.c2.1);
    let out = match method {
        Method::GaussIntegral => Outcome::from_quad(gauss_linking(c1, c2, &cfg)?),
        Method::GaussCrossing => {
            let p1 = Polyline3::from_curve(c1, POLYLINE_VERTICES)?;
            let p2 = Polyline3::from_curve(c2, POLYLINE_VERTICES)?;
            let (lk, dir) = crossing_linking_auto(&p1, &p2, flags.seed)?;
            let mut out = Outcome::exact(Complex64::new(lk as f64, 0.0));
            out.details.insert("direction".into(), json!(dir));
            out
        }
        Method::GaussClosed => {
            let (e1, e2, e3) = line_vectors(c1, c2)?;
            Outcome::exact(Complex64::new(line_gauss_closed(&e1, &e2, &e3)?, 0.0))
        }
        Method::ComplexLink => Outcome::from_quad(complex_linking_number(c1, c2, &ctx, &cfg)?),
        _ => {
            let (f1, f2) = q.forms(scene).expect("checked by applicable");
            match method {
                Method::HoloIntegral | Method::HoloPv => {
                    Outcome::from_quad(holo_linking_integral((c1, f1), (c2, f2), &ctx, &cfg)?)
                }
                Method::HoloClosed => {
                    require_kappa(&scaled)?;
                    Outcome::exact(LineData::from_scene((c1, f1), (c2, f2))?.closed(&scaled)?)
                }
                Method::Residue => {
                    let cut = scene
                        .cuts_for(q.c1.0)
                        .find(|c| c.f2.is_some())
                        .expect("checked by applicable");
                    let lift = lift_theta(cut, &scene.ambient, f1, c1, MAX_MULTIPLIER_DEGREE)?;
                    let v = residue_linking(&lift, (c2, f2), &scene.ambient)?;
                    let mut out = Outcome::exact(v);
                    if let Some(k) = scaled.kappa_xmethod {
                        out.details.insert("times_kappa_xmethod".into(), json!(pair(v * k)));
                    }
                    out
                }
                _ => unreachable!(),
            }
        }
    };
    Ok(out)
}

fn require_kappa(k: &NormalizationConstants) -> CliResult<()> {
    if k.kappa_line.is_none() || k.kappa_xmethod.is_none() {
        return Err(CliError::Core(Error::InvalidConfig(
            "constants are not calibrated".into(),
        )));
    }
    Ok(())
}

fn report(scene_id: &str, method: Method, flags: &Flags, k: &NormalizationConstants, out: Outcome, ms: f64) -> Report {
    Report {
        scene_id: scene_id.to_string(),
        method,
        value: pair(out.value),
        err_estimate: out.err_estimate,
        tail_estimate: out.tail_estimate,
        converged: out.converged,
        constants: k.into(),
        config: ConfigSnapshot::new(&flags.quad_config(), flags),
        details: out.details,
        wall_time_ms: ms,
    }
}

/// Runs `method` and wraps the outcome; unconverged quadrature is an error.
pub fn run_scene(
    scene: &Scene,
    scene_id: &str,
    method: Method,
    flags: &Flags,
    constants: &NormalizationConstants,
) -> CliResult<Report> {
    let start = Instant::now();
    let out = evaluate(scene, method, flags, constants)?;
    if !out.converged {
        return Err(CliError::Core(Error::MaxDepthExceeded {
            err_estimate: out.err_estimate,
        }));
    }
    Ok(report(
        scene_id,
        method,
        flags,
        constants,
        out,
        start.elapsed().as_secs_f64() * 1e3,
    ))
}

/// Result of calibrating on the reference scene.
#[derive(Clone, Debug, PartialEq)]
pub struct Calibration {
    pub constants: NormalizationConstants,
    /// Extrapolated integrals started at each of `CALIBRATION_RADII`.
    pub runs: [QuadResult; 2],
    pub residue: Complex64,
}

/// Measures kappa_line and kappa_xmethod on the reference scene, always with
/// the C₃ prefactor so the stored constants have one meaning.
pub fn calibrate(flags: &Flags) -> CliResult<Calibration> {
    let scene = Scene::l0();
    let (s1, s2) = (&scene.curves[0].value, &scene.curves[1].value);
    let (f1, f2) = (&scene.forms[0].value, &scene.forms[1].value);
    let ctx = BmContext::default();
    let at = |radius: f64| {
        let cfg = QuadConfig {
            truncation_radius: radius,
            ..flags.quad_config()
        };
        holo_linking_integral((s1, f1), (s2, f2), &ctx, &cfg)
    };
    let runs = [at(CALIBRATION_RADII[0])?, at(CALIBRATION_RADII[1])?];
    if let Some(r) = runs.iter().find(|r| !r.converged) {
        return Err(CliError::CalibrationUnstable(format!(
            "integral at R = {} did not converge (err {:e})",
            r.truncation.as_ref().map_or(f64::NAN, |t| t.radius),
            r.err_estimate
        )));
    }
    let (v40, v80) = (runs[0].value, runs[1].value);
    let spread = (v40 - v80).norm() / v80.norm();
    if !(spread <= CALIBRATION_SPREAD) {
        return Err(CliError::CalibrationUnstable(format!(
            "R = 40 gives {v40}, R = 80 gives {v80} (relative spread {spread:e})"
        )));
    }
    let cut = &scene.cuts[0].value;
    let lift = lift_theta(cut, &scene.ambient, f1, s1, MAX_MULTIPLIER_DEGREE)?;
    let residue = residue_linking(&lift, (s2, f2), &scene.ambient)?;
    let constants = NormalizationConstants {
        kappa_line: Some(v80),
        kappa_xmethod: Some(v80 / residue),
        ..NormalizationConstants::default()
    };
    constants.validate()?;
    Ok(Calibration {
        constants,
        runs,
        residue,
    })
}

pub fn save_constants(path: &Path, k: &NormalizationConstants) -> CliResult<()> {
    std::fs::write(path, constants_to_json(k) + "\n").map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_constants(path: &Path) -> CliResult<NormalizationConstants> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(constants_from_json(&text)?)
}

fn complete(k: &NormalizationConstants) -> bool {
    k.kappa_line.is_some() && k.kappa_xmethod.is_some()
}

/// Constants for a run: the scene's own when complete, else the constants
/// file, else (only if `needed`) a fresh calibration written to that file.
/// Warnings go to the returned list.
pub fn resolve_constants(
    scene: Option<&Scene>,
    flags: &Flags,
    needed: bool,
    warnings: &mut Vec<String>,
) -> CliResult<NormalizationConstants> {
    if let Some(k) = scene.and_then(|s| s.constants.clone()).filter(complete) {
        return Ok(k);
    }
    if flags.constants.exists() {
        return load_constants(&flags.constants);
    }
    if !needed {
        return Ok(NormalizationConstants::default());
    }
    warnings.push(format!(
        "constants file {} not found; calibrating on the reference scene",
        flags.constants.display()
    ));
    let k = calibrate(flags)?.constants;
    save_constants(&flags.constants, &k)?;
    Ok(k)
}

/// Outcome of a cross-check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: String,
    pub methods: Vec<Method>,
    pub diagnostics: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }
}

/// The value on the common scale of the kernel integral.
fn comparable_value(r: &Report, k: &NormalizationConstants, ctx: &BmContext) -> Complex64 {
    match r.method {
        Method::Residue => r.value() * ctx.constants(k).kappa_xmethod.unwrap_or(Complex64::new(f64::NAN, 0.0)),
        _ => r.value(),
    }
}

/// Runs every applicable comparable method and compares all pairs: PASS iff
/// |a − b| ≤ 3·(summed error and tail estimates), up to rounding.
pub fn xcheck(
    scene: &Scene,
    scene_id: &str,
    flags: &Flags,
    warnings: &mut Vec<String>,
) -> CliResult<(Vec<Report>, Verdict)> {
    let methods: Vec<Method> = Method::ALL
        .into_iter()
        .filter(|m| m.comparable() && applicable(scene, *m).is_ok())
        .collect();
    if methods.len() < 2 {
        return Err(CliError::MethodInapplicable {
            method: methods.first().copied().unwrap_or(Method::GaussIntegral),
            reason: format!("a cross-check needs two applicable methods, found {methods:?}"),
        });
    }
    let needed = methods.iter().any(|m| m.needs_kappa());
    let constants = resolve_constants(Some(scene), flags, needed, warnings)?;
    let mut reports = Vec::new();
    let mut diagnostics = Vec::new();
    for &m in &methods {
        match run_scene(scene, scene_id, m, flags, &constants) {
            Ok(r) => reports.push(r),
            Err(e) => diagnostics.push(format!("{m}: {e}")),
        }
    }
    let ctx = flags.context();
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            let (va, vb) = (
                comparable_value(a, &constants, &ctx),
                comparable_value(b, &constants, &ctx),
            );
            let bound = 3.0 * (a.err_estimate + a.tail_estimate + b.err_estimate + b.tail_estimate)
                + XCHECK_ROUNDING * va.norm().max(vb.norm());
            let diff = (va - vb).norm();
            if !(diff <= bound) {
                diagnostics.push(format!(
                    "{} = {va} and {} = {vb} differ by {diff:e} > {bound:e}",
                    a.method, b.method
                ));
            }
        }
    }
    let verdict = Verdict {
        verdict: if diagnostics.is_empty() { "PASS" } else { "FAIL" }.into(),
        methods,
        diagnostics,
    };
    Ok((reports, verdict))
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scene_id: &'a str,
    method: Method,
    value_re: f64,
    value_im: f64,
    err_estimate: f64,
    tail_estimate: f64,
    converged: bool,
    c3: f64,
    kappa_line_re: Option<f64>,
    kappa_line_im: Option<f64>,
    kappa_xmethod_re: Option<f64>,
    kappa_xmethod_im: Option<f64>,
    tol: f64,
    max_depth: u32,
    panel_order: usize,
    truncation_radius: f64,
    include_cn: bool,
    seed: u64,
    workers: Option<usize>,
    wall_time_ms: f64,
}

/// Reports as CSV with a header row.
pub fn to_csv(reports: &[Report]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        let k = &r.constants;
        w.serialize(CsvRow {
            scene_id: &r.scene_id,
            method: r.method,
            value_re: r.value[0],
            value_im: r.value[1],
            err_estimate: r.err_estimate,
            tail_estimate: r.tail_estimate,
            converged: r.converged,
            c3: k.c3,
            kappa_line_re: k.kappa_line.map(|v| v[0]),
            kappa_line_im: k.kappa_line.map(|v| v[1]),
            kappa_xmethod_re: k.kappa_xmethod.map(|v| v[0]),
            kappa_xmethod_im: k.kappa_xmethod.map(|v| v[1]),
            tol: r.config.tol,
            max_depth: r.config.max_depth,
            panel_order: r.config.panel_order,
            truncation_radius: r.config.truncation_radius,
            include_cn: r.config.include_cn,
            seed: r.config.seed,
            workers: r.config.workers,
            wall_time_ms: r.wall_time_ms,
        })
        .expect("csv row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

pub fn render(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => reports.iter().map(|r| r.to_json() + "\n").collect(),
        Format::Csv => to_csv(reports),
    }
}
