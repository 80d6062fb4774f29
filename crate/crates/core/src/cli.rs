//! Command-line front end shared by the `akc` binary and tests.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::contour::Window;
use crate::error::{Error, Result};
use crate::focal::{
    focal_determinant, focal_radii_closed_form, germ_focal_radii, multiset_distance, simultaneous_eigen, FocalReport,
};
use crate::linalg::CMat;
use crate::orbit::{self, OrbitGermRequest, FLAG_NAMES};
use crate::report::{to_sorted_json, write_atomic, Report};
use crate::space::SymmetricSpace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

const DEFAULT_SPACE: &str = "sl2c";
const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "akc", about = "Anti-Kaehler complexifications: verification suites, complex focal radii, orbit verdicts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and write its JSON report.
    Verify(Flags),
    /// Complex focal radii of an orbit germ (closed form and argument principle).
    Focal(Flags),
    /// Classify the G-orbit through exp(√−1 w).
    Orbit(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    AntiKaehler,
    ExpHolomorphic,
    Polar,
    Dual,
    MetricExtension,
}

impl Suite {
    fn default_samples(self) -> usize {
        match self {
            Suite::AntiKaehler => 1000,
            Suite::Polar => 200,
            Suite::ExpHolomorphic | Suite::MetricExtension => 100,
            Suite::Dual => 10,
        }
    }

    fn default_tol(self) -> f64 {
        match self {
            Suite::AntiKaehler => 1e-10,
            Suite::ExpHolomorphic => 1e-6,
            Suite::Polar => 1e-9,
            Suite::Dual | Suite::MetricExtension => 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by all subcommands; each may also come from `--config`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Half-width of the square focal window.
    #[arg(long)]
    pub window: Option<f64>,
    /// Points per side of the |F̂| plot grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Orbit displacement: JSON array of p or algebra coordinates, or 0.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// Orbit displacement of the focal germ (same syntax as --w).
    #[arg(long = "orbit-w", allow_hyphen_values = true)]
    #[serde(rename = "orbit-w", alias = "orbit_w")]
    pub orbit_w: Option<String>,
    /// Output file (verify, orbit) or directory (focal).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Comma-separated orbit flags that must hold for exit 0.
    #[arg(long)]
    pub require: Option<String>,
    /// JSON file with any of the above keys; flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fill unset flags from `other`.
    fn or(self, other: Flags) -> Flags {
        Flags {
            space: self.space.or(other.space),
            suite: self.suite.or(other.suite),
            samples: self.samples.or(other.samples),
            seed: self.seed.or(other.seed),
            tol: self.tol.or(other.tol),
            window: self.window.or(other.window),
            grid: self.grid.or(other.grid),
            w: self.w.or(other.w),
            orbit_w: self.orbit_w.or(other.orbit_w),
            out: self.out.or(other.out),
            format: self.format.or(other.format),
            require: self.require.or(other.require),
            config: self.config,
        }
    }
}

/// Resolved configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub space: SymmetricSpace,
    pub space_name: String,
    pub suite: Option<Suite>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub window: f64,
    pub grid: usize,
    pub w: Option<Vec<f64>>,
    pub out: PathBuf,
    pub format: Format,
    pub require: Vec<String>,
}

/// Parse a displacement: a JSON number (only `0`) or an array of numbers.
pub fn parse_w(text: &str) -> Result<Vec<f64>> {
    let v: serde_json::Value =
        serde_json::from_str(text.trim()).map_err(|e| Error::Config(format!("cannot parse w '{text}': {e}")))?;
    let bad = || Error::Config(format!("w must be 0 or an array of numbers, got '{text}'"));
    match v {
        serde_json::Value::Number(n) => {
            let x = n.as_f64().ok_or_else(bad)?;
            if x == 0.0 {
                Ok(vec![0.0])
            } else {
                Err(bad())
            }
        }
        serde_json::Value::Array(a) => a.iter().map(|x| x.as_f64().ok_or_else(bad)).collect(),
        _ => Err(bad()),
    }
}

impl RunConfig {
    pub fn resolve(command: &'static str, flags: Flags) -> Result<RunConfig> {
        let flags = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("config {}: {e}", p.display())))?;
                let file: Flags = serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", p.display())))?;
                flags.or(file)
            }
            None => flags,
        };
        let space_name = flags.space.clone().unwrap_or_else(|| DEFAULT_SPACE.into());
        let space = catalog::space(&space_name)?;
        let suite = match command {
            "verify" => Some(flags.suite.unwrap_or(Suite::AntiKaehler)),
            _ => flags.suite,
        };
        let samples = flags.samples.unwrap_or(match (command, suite) {
            ("verify", Some(s)) => s.default_samples(),
            _ => 10,
        });
        if samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        let tol = flags.tol.unwrap_or(match (command, suite) {
            ("verify", Some(s)) => s.default_tol(),
            _ => orbit::ORBIT_TOL,
        });
        if !(tol >= 0.0) {
            return Err(Error::Config("tol must be a nonnegative number".into()));
        }
        let window = flags.window.unwrap_or(crate::focal::DEFAULT_WINDOW);
        if !(window.is_finite() && window >= 0.0) {
            return Err(Error::Config("window must be a nonnegative number".into()));
        }
        let grid = flags.grid.unwrap_or(64);
        if grid == 0 {
            return Err(Error::Config("grid must be positive".into()));
        }
        let w_text = match command {
            "focal" => flags.orbit_w.clone().or(flags.w.clone()),
            _ => flags.w.clone(),
        };
        let w = w_text.as_deref().map(parse_w).transpose()?;
        let require = flags
            .require
            .as_deref()
            .map(|r| r.split(',').map(|s| s.trim().replace('-', "_")).filter(|s| !s.is_empty()).collect::<Vec<_>>())
            .unwrap_or_default();
        for f in &require {
            if !FLAG_NAMES.contains(&f.as_str()) {
                return Err(Error::Config(format!("unknown orbit flag '{f}'; known: {}", FLAG_NAMES.join(", "))));
            }
        }
        let out = flags.out.clone().unwrap_or_else(|| match (command, suite) {
            ("verify", Some(s)) => PathBuf::from(format!("verify-{}-{space_name}.json", suite_name(s))),
            ("focal", _) => PathBuf::from(format!("focal-{space_name}")),
            _ => PathBuf::from(format!("orbit-{space_name}.json")),
        });
        Ok(RunConfig {
            command,
            space,
            space_name,
            suite,
            samples,
            seed: flags.seed.unwrap_or(DEFAULT_SEED),
            tol,
            window,
            grid,
            w,
            out,
            format: flags.format.unwrap_or_default(),
            require,
        })
    }

    /// Complexified space and `p^c` coordinates of `√−1 u` for the real `u`
    /// given by `w`.
    fn orbit_request(&self) -> Result<OrbitGermRequest> {
        let cx = self.space.complexification();
        let vals = self.w.clone().unwrap_or_else(|| vec![0.0]);
        let u = orbit::parse_p_vector(&cx, &vals)?;
        let mut req = OrbitGermRequest::through_polar(cx, &u, self.samples.max(2), self.seed)?;
        req.window = self.window;
        Ok(req)
    }
}

pub fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::AntiKaehler => "anti-kaehler",
        Suite::ExpHolomorphic => "exp-holomorphic",
        Suite::Polar => "polar",
        Suite::Dual => "dual",
        Suite::MetricExtension => "metric-extension",
    }
}

/// Outcome of a command: exit code and the files written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<PathBuf>,
    pub message: String,
}

fn report_csv(r: &Report) -> String {
    let mut s = String::from("check,residual,tolerance,pass\n");
    for (k, v) in &r.residuals {
        s.push_str(&format!("{k},{v:e},{:e},{}\n", r.tolerance, v.is_finite() && *v <= r.tolerance));
    }
    s
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let suite = cfg.suite.unwrap_or(Suite::AntiKaehler);
    let cx = cfg.space.complexification();
    let (n, seed, tol) = (cfg.samples, cfg.seed, cfg.tol);
    let report = match suite {
        Suite::AntiKaehler => crate::verify::verify_anti_kaehler(&cx, n, seed, tol)?,
        Suite::ExpHolomorphic => crate::verify::verify_exp_holomorphic(&cx, n, seed, 1e-5, tol)?,
        Suite::Polar => orbit::verify_polar(&cx, n, seed, tol)?,
        Suite::Dual => orbit::verify_dual(&cx, n, seed, tol)?,
        Suite::MetricExtension => crate::holo::geodesic_circle_isometry_check(&cx, n, seed, tol)?,
    };
    let body = match cfg.format {
        Format::Json => report.to_json()?,
        Format::Csv => report_csv(&report),
    };
    write_atomic(&cfg.out, &body)?;
    let code = if report.pass { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome {
        code,
        files: vec![cfg.out.clone()],
        message: format!(
            "{} on {}: {} (max residual {:.3e}, tol {:.1e})",
            suite_name(suite),
            report.space,
            if report.pass { "pass" } else { "FAIL" },
            report.max_residual(),
            tol
        ),
    })
}

/// Cross-method comparison written next to the focal reports.
#[derive(Debug, Clone, Serialize)]
pub struct FocalDiff {
    pub closed_form_available: bool,
    pub closed_form_count: u32,
    pub argument_principle_count: u32,
    /// Multiset distance; `null` when the counts differ or no closed form.
    pub distance: Option<f64>,
    pub winding_count: Option<i64>,
    pub notes: Vec<String>,
}

fn write_report(dir: &Path, stem: &str, r: &FocalReport, format: Format) -> Result<PathBuf> {
    let (name, body) = match format {
        Format::Json => (format!("{stem}.json"), r.to_json()?),
        Format::Csv => (format!("{stem}.csv"), r.to_csv()),
    };
    let path = dir.join(name);
    write_atomic(&path, &body)?;
    Ok(path)
}

pub fn cmd_focal(cfg: &RunConfig) -> Result<Outcome> {
    let req = cfg.orbit_request()?;
    let base = orbit::orbit_base(&req)?;
    let size = req.space.pair().algebra().matrix_size();
    let (germ, v, _) = orbit::orbit_germ_at(&req.space, &base, &CMat::identity(size, size))?;
    let window = Window::square(cfg.window);
    let generic = germ_focal_radii(&germ, &v, window, 1)?;
    let mut diff_notes = Vec::new();
    let closed = match simultaneous_eigen(&germ, &v) {
        Ok(pairs) => Some(focal_radii_closed_form(&pairs, window)),
        Err(e) => {
            diff_notes.push(format!("closed form unavailable: {e}"));
            None
        }
    };
    let dir = &cfg.out;
    let mut files = Vec::new();
    if let Some(cf) = &closed {
        files.push(write_report(dir, "closed_form", cf, cfg.format)?);
    }
    files.push(write_report(dir, "argument_principle", &generic, cfg.format)?);
    let distance = closed.as_ref().and_then(|cf| multiset_distance(cf, &generic));
    let diff = FocalDiff {
        closed_form_available: closed.is_some(),
        closed_form_count: closed.as_ref().map(|r| r.total_multiplicity()).unwrap_or(0),
        argument_principle_count: generic.total_multiplicity(),
        distance,
        winding_count: generic.winding_count,
        notes: diff_notes,
    };
    let diff_path = dir.join("diff.json");
    write_atomic(&diff_path, &to_sorted_json(&diff)?)?;
    files.push(diff_path);
    // |F̂| on the plot grid
    let mut plot = String::from("re,im,value\n");
    for z in orbit::z_grid(&window, cfg.grid) {
        let f = focal_determinant(&germ, &v, z)?;
        plot.push_str(&format!("{:e},{:e},{:e}\n", z.re, z.im, f.norm()));
    }
    let plot_path = dir.join("abs_det_grid.csv");
    write_atomic(&plot_path, &plot)?;
    files.push(plot_path);
    let agree = match (&closed, distance) {
        (None, _) => true,
        (Some(_), Some(d)) => d <= 1e-8,
        (Some(_), None) => false,
    };
    Ok(Outcome {
        code: if agree { EXIT_OK } else { EXIT_FAIL },
        files,
        message: format!(
            "{} focal radii (counted with multiplicity) in |Re z|, |Im z| <= {}; methods {}",
            generic.total_multiplicity(),
            cfg.window,
            if agree { "agree" } else { "DISAGREE" }
        ),
    })
}

pub fn cmd_orbit(cfg: &RunConfig) -> Result<Outcome> {
    let req = cfg.orbit_request()?;
    let verdict = orbit::classify_orbit(&req)?;
    let mut files = Vec::new();
    match cfg.format {
        Format::Json => {
            write_atomic(&cfg.out, &verdict.to_json()?)?;
            files.push(cfg.out.clone());
        }
        Format::Csv => {
            let mut s = String::from("sample,re,im,multiplicity,method,residual\n");
            for (k, r) in verdict.focal.iter().enumerate() {
                for line in r.to_csv().lines().skip(1) {
                    s.push_str(&format!("{k},{line}\n"));
                }
            }
            write_atomic(&cfg.out, &s)?;
            files.push(cfg.out.clone());
        }
    }
    let failed: Vec<&str> = cfg.require.iter().filter(|f| !verdict.flag(f)).map(|s| s.as_str()).collect();
    let flags: Vec<String> = verdict.flags.iter().map(|(k, v)| format!("{k}={v}")).collect();
    Ok(Outcome {
        code: if failed.is_empty() { EXIT_OK } else { EXIT_FAIL },
        files,
        message: if failed.is_empty() {
            format!("orbit of dimension {}: {}", verdict.orbit_dim, flags.join(" "))
        } else {
            format!("required flags failed: {}; {}", failed.join(", "), flags.join(" "))
        },
    })
}

/// Exit code for an error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::UnknownSpace { .. } | Error::Precondition(_) => EXIT_CONFIG,
        Error::Degenerate(_) => EXIT_DEGENERATE,
        _ => EXIT_FAIL,
    }
}

/// Run a parsed command line.
pub fn run(cli: Cli) -> Result<Outcome> {
    let (name, flags) = match cli.command {
        Command::Verify(f) => ("verify", f),
        Command::Focal(f) => ("focal", f),
        Command::Orbit(f) => ("orbit", f),
    };
    let cfg = RunConfig::resolve(name, flags)?;
    match name {
        "verify" => cmd_verify(&cfg),
        "focal" => cmd_focal(&cfg),
        _ => cmd_orbit(&cfg),
    }
}

/// Entry point for argument vectors (including the program name); prints a
/// one-line summary or the error and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(o) => {
            println!("{}", o.message);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            o.code
        }
        Err(e) => {
            let code = error_code(&e);
            eprintln!("error: {e}");
            if code == EXIT_DEGENERATE {
                eprintln!("hint: rerun with a different --seed or a nearby --w to resample the orbit points");
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_w_syntax() {
        assert_eq!(parse_w("[0.7,0,0.2]").unwrap(), vec![0.7, 0.0, 0.2]);
        assert_eq!(parse_w("0").unwrap(), vec![0.0]);
        assert!(parse_w("1").is_err());
        assert!(parse_w("[1,\"a\"]").is_err());
    }

    #[test]
    fn unknown_space_lists_catalog() {
        let f = Flags { space: Some("nosuch".into()), ..Default::default() };
        let e = RunConfig::resolve("verify", f).unwrap_err();
        assert_eq!(error_code(&e), EXIT_CONFIG);
        assert!(e.to_string().contains("sl2c"));
    }

    #[test]
    fn config_file_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"space":"so3c","samples":7,"seed":5,"orbit-w":"[1,2]"}"#).unwrap();
        let f = Flags { samples: Some(3), config: Some(p), ..Default::default() };
        let cfg = RunConfig::resolve("focal", f).unwrap();
        assert_eq!(cfg.space_name, "so3c");
        assert_eq!(cfg.samples, 3);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.w, Some(vec![1.0, 2.0]));
    }

    #[test]
    fn unknown_require_flag_rejected() {
        let f = Flags { require: Some("principal,bogus".into()), ..Default::default() };
        assert_eq!(error_code(&RunConfig::resolve("orbit", f).unwrap_err()), EXIT_CONFIG);
    }
}
