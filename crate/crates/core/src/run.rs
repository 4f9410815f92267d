//! Batch pipelines behind the command line: run configurations, domain
//! specifications, reports and replay.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::fem2d::{self, BoundaryCurve, ConformalModel, DomainMesh, MeshOptions, SpectrumResult};
use crate::geometry::Space;
use crate::radial::{solve_annulus, solve_ball_with, BallEig, BallOptions};
use crate::verifier::{
    check_chain, check_chain_annulus, check_lemmas, check_main_inequality, content_hash, polygon_area,
    trial_bound_check, ChainInputs, Check, CheckInputs, LemmaGrids, Provenance, Summary, TrialSetup,
};
use crate::{Error, Result};

/// Default space set for the lemma checks: `(k, n)` in
/// `{(1,2..8), (2,1..4), (4,1..2), (8,2)}`, compact and noncompact.
pub fn default_lemma_spaces() -> Vec<Space> {
    let mut kn = Vec::new();
    kn.extend((2..=8).map(|n| (1, n)));
    kn.extend((1..=4).map(|n| (2, n)));
    kn.extend((1..=2).map(|n| (4, n)));
    kn.push((8, 2));
    let mut out = Vec::new();
    for (k, n) in kn {
        for compact in [true, false] {
            out.push(Space::new(k, n, compact).expect("default spaces are valid"));
        }
    }
    out
}

/// Domain descriptions accepted by `verify`.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// Geodesic ball about the model origin.
    Ball { radius: f64 },
    /// Geodesic disk about a chart point (two-dimensional spaces).
    Disk { center: [f64; 2], radius: f64 },
    /// Chart ellipse offset by `center`, then rotated about the chart origin.
    Ellipse { semi_axes: [f64; 2], rotation: f64, center: [f64; 2] },
    Peanut { scale: f64, waist: f64, rotation: f64 },
    Polyline { path: PathBuf },
    Annulus { r_in: f64, r_out: f64 },
}

fn numbers(s: &str, min: usize, max: usize, what: &str) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| Error::Parse(format!("{what}: {e} in '{s}'")))?;
    if v.len() < min || v.len() > max || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse(format!("{what} expects {min}..={max} finite numbers, got '{s}'")));
    }
    Ok(v)
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("domain '{s}' must look like kind:params")))?;
        Ok(match kind {
            "ball" => DomainSpec::Ball { radius: numbers(rest, 1, 1, "ball:R")?[0] },
            "disk" => {
                let v = numbers(rest, 3, 3, "disk:x,y,R")?;
                DomainSpec::Disk { center: [v[0], v[1]], radius: v[2] }
            }
            "ellipse" => {
                let v = numbers(rest, 2, 5, "ellipse:a,b[,rot[,cx,cy]]")?;
                if v.len() == 4 {
                    return Err(Error::Parse("ellipse center needs both cx and cy".into()));
                }
                DomainSpec::Ellipse {
                    semi_axes: [v[0], v[1]],
                    rotation: v.get(2).copied().unwrap_or(0.0),
                    center: if v.len() == 5 { [v[3], v[4]] } else { [0.0, 0.0] },
                }
            }
            "peanut" => {
                let v = numbers(rest, 2, 3, "peanut:c,eps[,rot]")?;
                DomainSpec::Peanut { scale: v[0], waist: v[1], rotation: v.get(2).copied().unwrap_or(0.0) }
            }
            "polyline" => DomainSpec::Polyline { path: PathBuf::from(rest) },
            "annulus" => {
                let v = numbers(rest, 2, 2, "annulus:r_in,r_out")?;
                DomainSpec::Annulus { r_in: v[0], r_out: v[1] }
            }
            other => return Err(Error::Parse(format!("unknown domain kind '{other}'"))),
        })
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Ball { radius } => write!(f, "ball:{radius}"),
            DomainSpec::Disk { center, radius } => write!(f, "disk:{},{},{radius}", center[0], center[1]),
            DomainSpec::Ellipse { semi_axes, rotation, center } => write!(
                f,
                "ellipse:{},{},{rotation},{},{}",
                semi_axes[0], semi_axes[1], center[0], center[1]
            ),
            DomainSpec::Peanut { scale, waist, rotation } => write!(f, "peanut:{scale},{waist},{rotation}"),
            DomainSpec::Polyline { path } => write!(f, "polyline:{}", path.display()),
            DomainSpec::Annulus { r_in, r_out } => write!(f, "annulus:{r_in},{r_out}"),
        }
    }
}

impl DomainSpec {
    /// Boundary curve for planar (two-dimensional) domains.
    pub fn curve(&self) -> Result<Option<BoundaryCurve>> {
        Ok(Some(match self {
            DomainSpec::Ball { radius } => BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: *radius },
            DomainSpec::Disk { center, radius } => BoundaryCurve::GeodesicDisk { center: *center, radius: *radius },
            DomainSpec::Ellipse { semi_axes, rotation, center } => BoundaryCurve::Ellipse {
                center: *center,
                semi_axes: *semi_axes,
                rotation: *rotation,
            },
            DomainSpec::Peanut { scale, waist, rotation } => BoundaryCurve::Peanut {
                scale: *scale,
                waist: *waist,
                rotation: *rotation,
            },
            DomainSpec::Polyline { path } => BoundaryCurve::Polyline { points: read_polyline(path)? },
            DomainSpec::Annulus { .. } => return Ok(None),
        }))
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, DomainSpec::Ball { .. } | DomainSpec::Disk { .. })
    }
}

/// Reads `x y` (or `x,y`) pairs, one per line; `#` starts a comment.
pub fn read_polyline(path: &Path) -> Result<Vec<[f64; 2]>> {
    let text = fs::read_to_string(path)?;
    let mut pts = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        if v.len() != 2 {
            return Err(Error::Parse(format!("{}:{}: expected two coordinates", path.display(), no + 1)));
        }
        let p = [
            v[0].parse::<f64>().map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), no + 1)))?,
            v[1].parse::<f64>().map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), no + 1)))?,
        ];
        pts.push(p);
    }
    if pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    Ok(pts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ball,
    CheckLemmas,
    Verify,
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Space strings such as `K1_n2_nc`; empty means the default set for `check-lemmas`.
    pub spaces: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    /// Target mesh size in the model metric.
    pub target_h: f64,
    /// Shooting tolerance.
    pub tol: f64,
    pub grid_size: usize,
    /// Number of FEM eigenpairs, constant mode included.
    pub eigen_count: usize,
    pub lemma_points: usize,
    pub lemma_radii: usize,
    pub seed: u64,
    /// Interior lattice jitter as a fraction of the spacing.
    pub jitter: f64,
    #[doc(hidden)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub corrupt_count: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            spaces: Vec::new(),
            radius: None,
            domain: None,
            target_h: 0.03,
            tol: 1e-10,
            grid_size: 2000,
            eigen_count: 4,
            lemma_points: 1000,
            lemma_radii: 20,
            seed: 0,
            jitter: 0.0,
            corrupt_count: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.spaces {
            Space::from_str(s)?;
        }
        let positive = [("target_h", self.target_h), ("tol", self.tol)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(Error::InvalidArgument(format!("jitter must lie in [0, 1), got {}", self.jitter)));
        }
        match self.command {
            Command::Ball | Command::Verify if self.spaces.len() != 1 => {
                Err(Error::InvalidArgument("exactly one space is required".into()))
            }
            Command::Ball if self.radius.is_none() => Err(Error::InvalidArgument("ball needs a radius".into())),
            Command::Verify if self.domain.is_none() => Err(Error::InvalidArgument("verify needs a domain".into())),
            _ => Ok(()),
        }
    }

    /// Reads `key = value` lines (`#` comments) on top of the defaults.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg: Option<RunConfig> = None;
        let mut pending = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "command" {
                let c = match v {
                    "ball" => Command::Ball,
                    "check-lemmas" => Command::CheckLemmas,
                    "verify" => Command::Verify,
                    _ => return Err(Error::Parse(format!("unknown command '{v}'"))),
                };
                cfg = Some(RunConfig::new(c));
            } else {
                pending.push((no + 1, k.to_string(), v.to_string()));
            }
        }
        let mut cfg = cfg.ok_or_else(|| Error::Parse("config needs a command".into()))?;
        for (no, k, v) in pending {
            cfg.set(&k, &v).map_err(|e| Error::Parse(format!("config line {no}: {e}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse(format!("bad value '{v}' for {key}")))
        }
        match key {
            "space" | "spaces" => self.spaces = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            "radius" => self.radius = Some(num(key, value)?),
            "domain" => self.domain = Some(value.to_string()),
            "h" | "target_h" => self.target_h = num(key, value)?,
            "tol" => self.tol = num(key, value)?,
            "grid_size" => self.grid_size = num(key, value)?,
            "eigs" | "eigen_count" => self.eigen_count = num(key, value)?,
            "points" | "lemma_points" => self.lemma_points = num(key, value)?,
            "radii" | "lemma_radii" => self.lemma_radii = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "jitter" => self.jitter = num(key, value)?,
            _ => return Err(Error::Parse(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn hash(&self) -> String {
        content_hash(&serde_json::to_vec(self).expect("config serializes"))
    }

    fn space(&self) -> Result<Space> {
        Space::from_str(&self.spaces[0])
    }
}

/// Self-contained result of a `check-lemmas` or `verify` run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool: String,
    pub config: RunConfig,
    pub config_hash: String,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    pub timestamp: String,
    pub checks: Vec<Check>,
    pub summary: Summary,
    #[serde(default)]
    pub details: serde_json::Value,
}

impl VerificationReport {
    fn new(config: &RunConfig, checks: Vec<Check>, details: serde_json::Value) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_default();
        Self {
            tool: format!("rank1-neumann {}", env!("CARGO_PKG_VERSION")),
            config: config.clone(),
            config_hash: config.hash(),
            timestamp,
            summary: Summary::of(&checks),
            checks,
            details,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// JSON with the timestamp blanked, for byte comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.timestamp.clear();
        r.to_json()
    }
}

/// Files produced alongside a report.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub ball: Option<BallEig>,
    pub mesh: Option<DomainMesh>,
    pub spectrum: Option<SpectrumResult>,
}

impl Artifacts {
    /// Writes `ball.json`, `g.csv`, `mesh.txt` and `spectrum.json` where present.
    /// The text files carry the hash on a trailing `#` line, which both
    /// readers skip.
    pub fn write(&self, dir: &Path, config_hash: &str) -> Result<()> {
        fs::create_dir_all(dir)?;
        let stamp = format!("# config_hash {config_hash}\n");
        if let Some(b) = &self.ball {
            let mut v = serde_json::to_value(b)?;
            v["config_hash"] = config_hash.into();
            fs::write(dir.join("ball.json"), serde_json::to_string_pretty(&v)? + "\n")?;
            fs::write(dir.join("g.csv"), b.g.to_csv() + &stamp)?;
        }
        if let Some(m) = &self.mesh {
            fs::write(dir.join("mesh.txt"), m.mesh.to_text() + &stamp)?;
        }
        if let Some(s) = &self.spectrum {
            let mut v = serde_json::to_value(s)?;
            v["config_hash"] = config_hash.into();
            fs::write(dir.join("spectrum.json"), serde_json::to_string_pretty(&v)? + "\n")?;
        }
        Ok(())
    }
}

/// `ball`: shooting solution with its profile.
pub fn run_ball(config: &RunConfig) -> Result<BallEig> {
    config.validate()?;
    let space = config.space()?;
    solve_ball_with(
        &space,
        config.radius.unwrap(),
        BallOptions { tol: config.tol, grid_size: config.grid_size },
    )
}

/// `check-lemmas`: pointwise identities and ball lemmas over a space set.
pub fn run_check_lemmas(config: &RunConfig) -> Result<VerificationReport> {
    config.validate()?;
    let spaces: Vec<Space> = if config.spaces.is_empty() {
        default_lemma_spaces()
    } else {
        config.spaces.iter().map(|s| Space::from_str(s)).collect::<Result<_>>()?
    };
    let grids = LemmaGrids {
        radial_points: config.lemma_points,
        radii: config.lemma_radii,
        corrupt_count: config.corrupt_count,
        ..LemmaGrids::default()
    };
    let checks = check_lemmas(&spaces, &grids)?;
    let details = serde_json::json!({ "spaces": spaces.iter().map(|s| s.to_string()).collect::<Vec<_>>() });
    Ok(VerificationReport::new(config, checks, details))
}

/// `verify`: the full pipeline on one domain.
pub fn run_verify(config: &RunConfig) -> Result<(VerificationReport, Artifacts)> {
    config.validate()?;
    let space = config.space()?;
    let domain: DomainSpec = config.domain.as_deref().unwrap().parse()?;
    match (&domain, space.m()) {
        (DomainSpec::Annulus { r_in, r_out }, _) => verify_annulus(config, &space, *r_in, *r_out),
        (DomainSpec::Ball { radius }, m) if m != 2 => verify_radial_ball(config, &space, *radius),
        (_, 2) => verify_planar(config, &space, &domain),
        _ => Err(Error::Unsupported(format!(
            "domain '{domain}' needs a two-dimensional space; {space} has m = {}",
            space.m()
        ))),
    }
}

fn verify_planar(config: &RunConfig, space: &Space, domain: &DomainSpec) -> Result<(VerificationReport, Artifacts)> {
    let model = ConformalModel::new(*space)?;
    let curve = domain.curve()?.expect("planar domain");
    let opts = MeshOptions {
        target_h: config.target_h,
        jitter: config.jitter,
        seed: config.seed,
        ..MeshOptions::new(config.target_h)
    };
    let dm = fem2d::mesh_domain_with(&model, &curve, opts)?;
    let (system, spectrum) = fem2d::domain_spectrum(&dm, config.eigen_count.max(3))?;
    let volume = polygon_area(&model, &dm.mesh);
    let h = spectrum.h_max;
    let inputs = CheckInputs {
        space: space.to_string(),
        domain_hash: content_hash(dm.mesh.to_text().as_bytes()),
        h,
        solver_tags: vec!["fem_p1".into(), "subspace_shift_invert".into(), "shooting".into()],
    };
    let (main, info) = check_main_inequality(space, volume, &spectrum.eigenvalues[1..], Provenance::Fem, domain.is_ball(), &inputs)?;
    let ball = info.ball.clone().expect("main check keeps its ball");
    let setup = TrialSetup::build(&model, &dm.mesh, &system, &spectrum, &ball, volume)?;
    let mut checks = vec![main];
    checks.extend(trial_bound_check(&setup, &system, &spectrum, &inputs));
    checks.extend(check_chain(&ChainInputs {
        model: &model,
        mesh: &dm.mesh,
        system: &system,
        setup: &setup,
        mu: [spectrum.eigenvalues[1], spectrum.eigenvalues[2]],
        inputs: &inputs,
    }));
    let details = serde_json::json!({
        "domain": domain.to_string(),
        "mesh": dm.mesh.stats(&model),
        "spectrum": &spectrum,
        "main_inequality": &info,
        "trial_setup": &setup,
        "discretization": "P1 elements on a polygonal domain with straight boundary edges; boundary error O(h²)",
    });
    let report = VerificationReport::new(config, checks, details);
    Ok((report, Artifacts { ball: Some(ball), mesh: Some(dm), spectrum: Some(spectrum) }))
}

fn verify_radial_ball(config: &RunConfig, space: &Space, radius: f64) -> Result<(VerificationReport, Artifacts)> {
    let volume = space.ball_volume(radius)?;
    let inputs = CheckInputs {
        space: space.to_string(),
        domain_hash: content_hash(format!("ball:{radius:.17e}").as_bytes()),
        h: None,
        solver_tags: vec!["shooting".into()],
    };
    let ball = solve_ball_with(space, radius, BallOptions { tol: config.tol, grid_size: config.grid_size })?;
    // μ₁ = … = μ_m on a ball, with the radial eigenfunctions g(r)ω_i
    let mus = vec![ball.mu1; space.m() as usize];
    let (main, info) = check_main_inequality(space, volume, &mus, Provenance::Ball, true, &inputs)?;
    let details = serde_json::json!({ "domain": format!("ball:{radius}"), "ball": &ball, "main_inequality": &info });
    Ok((VerificationReport::new(config, vec![main], details), Artifacts { ball: Some(ball), ..Default::default() }))
}

fn verify_annulus(config: &RunConfig, space: &Space, r_in: f64, r_out: f64) -> Result<(VerificationReport, Artifacts)> {
    let c = space.theorem_count();
    let ann = solve_annulus(space, r_in, r_out, &[0, 1], c + 2)?;
    let candidates = ann.candidate_spectrum();
    let volume = ann.volume()?;
    let inputs = CheckInputs {
        space: space.to_string(),
        domain_hash: content_hash(format!("annulus:{r_in:.17e},{r_out:.17e}").as_bytes()),
        h: None,
        solver_tags: vec!["pruefer".into(), "shooting".into()],
    };
    let (main, info) = check_main_inequality(space, volume, &candidates, Provenance::AnnulusCandidate, false, &inputs)?;
    let ball = info.ball.clone().expect("main check keeps its ball");
    let mut checks = vec![main];
    checks.extend(check_chain_annulus(space, r_in, r_out, &ball.extended(), info.radius, ball.mu1, &inputs));
    let details = serde_json::json!({
        "domain": format!("annulus:{r_in},{r_out}"),
        "annulus": &ann,
        "main_inequality": &info,
        "center": "annulus center (center condition holds by symmetry)",
    });
    Ok((VerificationReport::new(config, checks, details), Artifacts { ball: Some(ball), ..Default::default() }))
}

/// Runs the configuration embedded in a report.
pub fn run_report(config: &RunConfig) -> Result<VerificationReport> {
    match config.command {
        Command::CheckLemmas => run_check_lemmas(config),
        Command::Verify => Ok(run_verify(config)?.0),
        Command::Ball => Err(Error::InvalidArgument("ball runs produce no report to replay".into())),
    }
}

/// Reruns a report's configuration and returns the new report with the
/// largest absolute margin difference over matching check ids.
pub fn replay(report: &VerificationReport) -> Result<(VerificationReport, f64)> {
    if report.config.hash() != report.config_hash {
        return Err(Error::InvalidArgument("embedded config does not match its hash".into()));
    }
    let fresh = run_report(&report.config)?;
    if fresh.checks.len() != report.checks.len() {
        return Err(Error::Convergence(format!(
            "replay produced {} checks, report has {}",
            fresh.checks.len(),
            report.checks.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for (a, b) in report.checks.iter().zip(&fresh.checks) {
        if a.id != b.id {
            return Err(Error::Convergence(format!("check order changed: {} vs {}", a.id, b.id)));
        }
        let d = (a.margin - b.margin).abs();
        worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
    }
    Ok((fresh, worst))
}
