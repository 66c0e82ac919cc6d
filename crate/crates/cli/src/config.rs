//! Run-configuration grammar: flat TOML sections with typed keys.
//!
//! Sections: `[system]` (optional; N-level molecule), `[pair.<n>.<m>]` (one
//! per coherent pair) or a bare `[pair]` single-pair shorthand, `[grid]`,
//! `[volterra]`, `[mc]`, and `[output]`. Unknown keys are rejected and every
//! range error names the offending key and its constraint.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rtn_dephase::{
    backend::BackendSpec, molecule::MoleculeSpec, MemoryKernel, RtnPairParams,
};
use toml::{Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: Option<SystemConfig>,
    pub pairs: BTreeMap<(usize, usize), PairConfig>,
    /// True when the config used the bare `[pair]` shorthand.
    pub shorthand: bool,
    pub grid: GridConfig,
    pub backends: Vec<BackendChoice>,
    pub volterra: VolterraSettings,
    pub mc: McSettings,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub omegas: Vec<f64>,
    pub rho0_re: Vec<Vec<f64>>,
    pub rho0_im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    pub nu: f64,
    pub lambda: f64,
    pub a: f64,
    pub kernel: KernelConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelConfig {
    Memoryless,
    Exponential { kappa: f64 },
    Composite { w: f64, kappa: f64 },
    Modulated { kappa: f64, omega: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub t_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Closed,
    Rational,
    Contour,
    Volterra,
    Mc,
}

impl BackendChoice {
    pub fn label(&self) -> &'static str {
        match self {
            BackendChoice::Closed => "closed",
            BackendChoice::Rational => "rational",
            BackendChoice::Contour => "contour",
            BackendChoice::Volterra => "volterra",
            BackendChoice::Mc => "mc",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "closed" => BackendChoice::Closed,
            "rational" => BackendChoice::Rational,
            "contour" => BackendChoice::Contour,
            "volterra" => BackendChoice::Volterra,
            "mc" => BackendChoice::Mc,
            other => bail!(
                "unknown backend `{other}`: expected one of closed, rational, contour, \
                 volterra, mc"
            ),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraSettings {
    pub step: f64,
}

impl Default for VolterraSettings {
    fn default() -> Self {
        Self { step: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub n_traj: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            n_traj: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("."),
            prefix: String::new(),
        }
    }
}

impl KernelConfig {
    pub fn build(&self) -> Result<MemoryKernel> {
        Ok(match *self {
            KernelConfig::Memoryless => MemoryKernel::memoryless(),
            KernelConfig::Exponential { kappa } => MemoryKernel::exponential(kappa)?,
            KernelConfig::Composite { w, kappa } => MemoryKernel::composite(w, kappa)?,
            KernelConfig::Modulated { kappa, omega } => {
                MemoryKernel::modulated_cosine(kappa, omega)?
            }
        })
    }
}

impl PairConfig {
    pub fn to_params(&self) -> Result<RtnPairParams> {
        Ok(RtnPairParams::new(
            self.nu,
            self.lambda,
            self.a,
            self.kernel.build()?,
        )?)
    }
}

impl RunConfig {
    /// Backend spec for one run, carrying the configured solver knobs.
    pub fn backend_spec(&self, choice: BackendChoice) -> BackendSpec {
        match choice {
            BackendChoice::Closed => BackendSpec::ClosedForm,
            BackendChoice::Rational => BackendSpec::Rational,
            BackendChoice::Contour => BackendSpec::Contour {
                nodes: rtn_dephase::backend::DEFAULT_CONTOUR_NODES,
            },
            BackendChoice::Volterra => BackendSpec::Volterra {
                step: self.volterra.step,
            },
            BackendChoice::Mc => BackendSpec::MonteCarlo {
                n_traj: self.mc.n_traj,
                seed: self.mc.seed,
            },
        }
    }

    /// Assemble the molecule when a `[system]` section is present.
    pub fn molecule(&self) -> Result<Option<MoleculeSpec>> {
        let Some(system) = &self.system else {
            return Ok(None);
        };
        let n = system.omegas.len();
        let mut rho0 = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let re = system.rho0_re[i][j];
                let im = system.rho0_im.as_ref().map_or(0.0, |m| m[i][j]);
                rho0[(i, j)] = Complex64::new(re, im);
            }
        }
        let mut pairs = BTreeMap::new();
        for (&key, pc) in &self.pairs {
            pairs.insert(key, pc.to_params()?);
        }
        Ok(Some(MoleculeSpec::new(system.omegas.clone(), rho0, pairs)?))
    }
}

// ---------------------------------------------------------------------------
// parsing

fn known_keys(section: &str, table: &Table, allowed: &[&str]) -> Result<()> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            bail!(
                "unknown key `{key}` in [{section}] (expected one of: {})",
                allowed.join(", ")
            );
        }
    }
    Ok(())
}

fn require<'a>(table: &'a Table, section: &str, key: &str) -> Result<&'a Value> {
    table
        .get(key)
        .ok_or_else(|| anyhow!("missing required key `{key}` in [{section}]"))
}

fn as_f64(value: &Value, section: &str, key: &str) -> Result<f64> {
    match value {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        other => bail!("key `{key}` in [{section}] must be a number, got {other}"),
    }
}

fn get_f64(table: &Table, section: &str, key: &str) -> Result<f64> {
    as_f64(require(table, section, key)?, section, key)
}

fn get_usize(table: &Table, section: &str, key: &str) -> Result<usize> {
    match require(table, section, key)? {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => bail!("key `{key}` in [{section}] must be a non-negative integer, got {other}"),
    }
}

fn float_matrix(value: &Value, section: &str, key: &str) -> Result<Vec<Vec<f64>>> {
    let rows = value
        .as_array()
        .ok_or_else(|| anyhow!("key `{key}` in [{section}] must be an array of rows"))?;
    rows.iter()
        .map(|row| {
            let cols = row
                .as_array()
                .ok_or_else(|| anyhow!("rows of `{key}` in [{section}] must be arrays"))?;
            cols.iter().map(|v| as_f64(v, section, key)).collect()
        })
        .collect()
}

fn parse_pair_body(section: &str, table: &Table) -> Result<PairConfig> {
    known_keys(section, table, &["nu", "lambda", "a", "kernel", "w", "kappa", "omega"])?;
    let nu = get_f64(table, section, "nu")?;
    let lambda = get_f64(table, section, "lambda")?;
    let a = get_f64(table, section, "a")?;
    if !(-1.0..=1.0).contains(&a) {
        bail!("key `a` in [{section}] is {a}: must lie in [-1, 1]");
    }
    if nu < 0.0 {
        bail!("key `nu` in [{section}] is {nu}: must be >= 0");
    }
    if lambda <= 0.0 {
        bail!("key `lambda` in [{section}] is {lambda}: must be > 0");
    }

    let kernel_name = require(table, section, "kernel")?
        .as_str()
        .ok_or_else(|| anyhow!("key `kernel` in [{section}] must be a string"))?;
    let has = |k: &str| table.contains_key(k);
    let kernel = match kernel_name {
        "memoryless" => {
            for k in ["w", "kappa", "omega"] {
                if has(k) {
                    bail!("key `{k}` in [{section}] is not valid for kernel = \"memoryless\"");
                }
            }
            KernelConfig::Memoryless
        }
        "exponential" => {
            for k in ["w", "omega"] {
                if has(k) {
                    bail!("key `{k}` in [{section}] is not valid for kernel = \"exponential\"");
                }
            }
            KernelConfig::Exponential {
                kappa: get_f64(table, section, "kappa")?,
            }
        }
        "composite" => {
            if has("omega") {
                bail!("key `omega` in [{section}] is not valid for kernel = \"composite\"");
            }
            KernelConfig::Composite {
                w: get_f64(table, section, "w")?,
                kappa: get_f64(table, section, "kappa")?,
            }
        }
        "modulated" => {
            if has("w") {
                bail!("key `w` in [{section}] is not valid for kernel = \"modulated\"");
            }
            KernelConfig::Modulated {
                kappa: get_f64(table, section, "kappa")?,
                omega: get_f64(table, section, "omega")?,
            }
        }
        other => bail!(
            "kernel = \"{other}\" in [{section}]: expected one of memoryless, exponential, \
             composite, modulated"
        ),
    };
    let pc = PairConfig {
        nu,
        lambda,
        a,
        kernel,
    };
    // surface kernel-parameter range errors (kappa > 0 etc.) now
    pc.to_params()
        .with_context(|| format!("in [{section}]"))?;
    Ok(pc)
}

/// Parsed pair table plus whether the shorthand form was used.
type ParsedPairs = (BTreeMap<(usize, usize), PairConfig>, bool);

fn parse_pair_section(value: &Value) -> Result<ParsedPairs> {
    let table = value
        .as_table()
        .ok_or_else(|| anyhow!("[pair] must be a table"))?;
    let nested = table.values().all(|v| v.is_table());
    if !nested || table.is_empty() {
        // single-pair shorthand
        let body = parse_pair_body("pair", table)?;
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 1), body);
        return Ok((pairs, true));
    }
    let mut pairs = BTreeMap::new();
    for (n_key, inner) in table {
        let n: usize = n_key
            .parse()
            .map_err(|_| anyhow!("pair index `{n_key}` is not an integer"))?;
        let inner = inner
            .as_table()
            .ok_or_else(|| anyhow!("[pair.{n_key}] must contain [pair.{n_key}.<m>] tables"))?;
        for (m_key, body) in inner {
            let m: usize = m_key
                .parse()
                .map_err(|_| anyhow!("pair index `{m_key}` is not an integer"))?;
            if n >= m {
                bail!("pair ({n}, {m}): indices must satisfy n < m");
            }
            let section = format!("pair.{n}.{m}");
            let body = body
                .as_table()
                .ok_or_else(|| anyhow!("[{section}] must be a table"))?;
            pairs.insert((n, m), parse_pair_body(&section, body)?);
        }
    }
    Ok((pairs, false))
}

/// Parse and validate a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let root: Table = toml::from_str(text).context("TOML syntax error")?;
    known_keys(
        "config root",
        &root,
        &["system", "pair", "grid", "volterra", "mc", "output"],
    )?;

    let (pairs, shorthand) = parse_pair_section(
        root.get("pair")
            .ok_or_else(|| anyhow!("missing required section [pair]"))?,
    )?;

    let system = match root.get("system") {
        None => None,
        Some(value) => {
            let table = value
                .as_table()
                .ok_or_else(|| anyhow!("[system] must be a table"))?;
            known_keys("system", table, &["omegas", "rho0_re", "rho0_im"])?;
            let omegas: Vec<f64> = require(table, "system", "omegas")?
                .as_array()
                .ok_or_else(|| anyhow!("key `omegas` in [system] must be an array"))?
                .iter()
                .map(|v| as_f64(v, "system", "omegas"))
                .collect::<Result<_>>()?;
            let rho0_re = float_matrix(require(table, "system", "rho0_re")?, "system", "rho0_re")?;
            let rho0_im = table
                .get("rho0_im")
                .map(|v| float_matrix(v, "system", "rho0_im"))
                .transpose()?;
            let n = omegas.len();
            if n < 2 {
                bail!("key `omegas` in [system] needs at least 2 levels, got {n}");
            }
            for (name, m) in [("rho0_re", Some(&rho0_re)), ("rho0_im", rho0_im.as_ref())] {
                if let Some(m) = m {
                    if m.len() != n || m.iter().any(|row| row.len() != n) {
                        bail!("key `{name}` in [system] must be an {n}x{n} matrix");
                    }
                }
            }
            Some(SystemConfig {
                omegas,
                rho0_re,
                rho0_im,
            })
        }
    };

    if shorthand && system.is_some() {
        bail!("the single-pair [pair] shorthand cannot be combined with [system]; use [pair.<n>.<m>]");
    }
    if !shorthand && system.is_none() {
        bail!("indexed [pair.<n>.<m>] sections require a [system] section");
    }

    let grid_table = root
        .get("grid")
        .and_then(Value::as_table)
        .ok_or_else(|| anyhow!("missing required section [grid]"))?;
    known_keys("grid", grid_table, &["t_max", "n_points"])?;
    let grid = GridConfig {
        t_max: get_f64(grid_table, "grid", "t_max")?,
        n_points: get_usize(grid_table, "grid", "n_points")?,
    };
    if grid.t_max <= 0.0 {
        bail!("key `t_max` in [grid] is {}: must be > 0", grid.t_max);
    }
    if grid.n_points < 2 {
        bail!("key `n_points` in [grid] is {}: must be >= 2", grid.n_points);
    }

    let volterra = match root.get("volterra").and_then(Value::as_table) {
        None => VolterraSettings::default(),
        Some(t) => {
            known_keys("volterra", t, &["step"])?;
            let step = get_f64(t, "volterra", "step")?;
            if step <= 0.0 || step > grid.t_max {
                bail!("key `step` in [volterra] is {step}: must satisfy 0 < step <= t_max");
            }
            VolterraSettings { step }
        }
    };

    let mc = match root.get("mc").and_then(Value::as_table) {
        None => McSettings::default(),
        Some(t) => {
            known_keys("mc", t, &["n_traj", "seed"])?;
            let n_traj = get_usize(t, "mc", "n_traj")?;
            if n_traj == 0 {
                bail!("key `n_traj` in [mc] is 0: must be >= 1");
            }
            let seed = match t.get("seed") {
                None => 0,
                Some(Value::Integer(i)) => *i as u64,
                Some(other) => bail!("key `seed` in [mc] must be an integer, got {other}"),
            };
            McSettings { n_traj, seed }
        }
    };

    let output_table = root
        .get("output")
        .and_then(Value::as_table)
        .ok_or_else(|| anyhow!("missing required section [output]"))?;
    known_keys("output", output_table, &["dir", "prefix", "backends"])?;
    let backends: Vec<BackendChoice> = require(output_table, "output", "backends")?
        .as_array()
        .ok_or_else(|| anyhow!("key `backends` in [output] must be an array of strings"))?
        .iter()
        .map(|v| {
            v.as_str()
                .ok_or_else(|| anyhow!("entries of `backends` in [output] must be strings"))
                .and_then(BackendChoice::parse)
        })
        .collect::<Result<_>>()?;
    if backends.is_empty() {
        bail!("key `backends` in [output] must list at least one backend");
    }
    let output = OutputConfig {
        dir: output_table
            .get("dir")
            .map(|v| {
                v.as_str()
                    .map(PathBuf::from)
                    .ok_or_else(|| anyhow!("key `dir` in [output] must be a string"))
            })
            .transpose()?
            .unwrap_or_else(|| PathBuf::from(".")),
        prefix: output_table
            .get("prefix")
            .map(|v| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| anyhow!("key `prefix` in [output] must be a string"))
            })
            .transpose()?
            .unwrap_or_default(),
    };

    let cfg = RunConfig {
        system,
        pairs,
        shorthand,
        grid,
        backends,
        volterra,
        mc,
        output,
    };
    validate_backend_support(&cfg)?;
    // molecule invariants (hermiticity, trace, positivity, pair coverage)
    cfg.molecule()?;
    Ok(cfg)
}

/// Every requested backend must support every configured kernel.
fn validate_backend_support(cfg: &RunConfig) -> Result<()> {
    for (&(n, m), pc) in &cfg.pairs {
        let params = pc.to_params()?;
        for &choice in &cfg.backends {
            let spec = cfg.backend_spec(choice);
            if !spec.supports(&params) {
                bail!(
                    "backend `{}` does not support the kernel of [pair.{n}.{m}] ({}); \
                     see the backend/kernel support table in the README",
                    choice.label(),
                    params.kernel()
                );
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// serialization (round-trip support)

fn pair_body_table(pc: &PairConfig) -> Table {
    let mut t = Table::new();
    t.insert("nu".into(), Value::Float(pc.nu));
    t.insert("lambda".into(), Value::Float(pc.lambda));
    t.insert("a".into(), Value::Float(pc.a));
    match pc.kernel {
        KernelConfig::Memoryless => {
            t.insert("kernel".into(), Value::String("memoryless".into()));
        }
        KernelConfig::Exponential { kappa } => {
            t.insert("kernel".into(), Value::String("exponential".into()));
            t.insert("kappa".into(), Value::Float(kappa));
        }
        KernelConfig::Composite { w, kappa } => {
            t.insert("kernel".into(), Value::String("composite".into()));
            t.insert("w".into(), Value::Float(w));
            t.insert("kappa".into(), Value::Float(kappa));
        }
        KernelConfig::Modulated { kappa, omega } => {
            t.insert("kernel".into(), Value::String("modulated".into()));
            t.insert("kappa".into(), Value::Float(kappa));
            t.insert("omega".into(), Value::Float(omega));
        }
    }
    t
}

/// Render a config back to the TOML grammar; `parse_config` of the result
/// reproduces the config exactly.
pub fn to_toml_string(cfg: &RunConfig) -> String {
    let mut root = Table::new();

    if let Some(system) = &cfg.system {
        let mut t = Table::new();
        t.insert(
            "omegas".into(),
            Value::Array(system.omegas.iter().map(|&x| Value::Float(x)).collect()),
        );
        let matrix = |m: &Vec<Vec<f64>>| {
            Value::Array(
                m.iter()
                    .map(|row| Value::Array(row.iter().map(|&x| Value::Float(x)).collect()))
                    .collect(),
            )
        };
        t.insert("rho0_re".into(), matrix(&system.rho0_re));
        if let Some(im) = &system.rho0_im {
            t.insert("rho0_im".into(), matrix(im));
        }
        root.insert("system".into(), Value::Table(t));
    }

    if cfg.shorthand {
        let (_, pc) = cfg.pairs.iter().next().expect("shorthand has one pair");
        root.insert("pair".into(), Value::Table(pair_body_table(pc)));
    } else {
        let mut pair_table = Table::new();
        for (&(n, m), pc) in &cfg.pairs {
            let outer = pair_table
                .entry(n.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            outer
                .as_table_mut()
                .unwrap()
                .insert(m.to_string(), Value::Table(pair_body_table(pc)));
        }
        root.insert("pair".into(), Value::Table(pair_table));
    }

    let mut grid = Table::new();
    grid.insert("t_max".into(), Value::Float(cfg.grid.t_max));
    grid.insert("n_points".into(), Value::Integer(cfg.grid.n_points as i64));
    root.insert("grid".into(), Value::Table(grid));

    let mut volterra = Table::new();
    volterra.insert("step".into(), Value::Float(cfg.volterra.step));
    root.insert("volterra".into(), Value::Table(volterra));

    let mut mc = Table::new();
    mc.insert("n_traj".into(), Value::Integer(cfg.mc.n_traj as i64));
    mc.insert("seed".into(), Value::Integer(cfg.mc.seed as i64));
    root.insert("mc".into(), Value::Table(mc));

    let mut output = Table::new();
    output.insert(
        "dir".into(),
        Value::String(cfg.output.dir.to_string_lossy().into_owned()),
    );
    output.insert("prefix".into(), Value::String(cfg.output.prefix.clone()));
    output.insert(
        "backends".into(),
        Value::Array(
            cfg.backends
                .iter()
                .map(|b| Value::String(b.label().into()))
                .collect(),
        ),
    );
    root.insert("output".into(), Value::Table(output));

    toml::to_string(&Value::Table(root)).expect("config serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [pair]
        nu = 1.0
        lambda = 1.0
        a = 0.0
        kernel = "memoryless"

        [grid]
        t_max = 10.0
        n_points = 101

        [output]
        backends = ["closed"]
    "#;

    #[test]
    fn minimal_shorthand_config_parses() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert!(cfg.shorthand);
        assert_eq!(cfg.pairs.len(), 1);
        assert_eq!(cfg.grid.n_points, 101);
        assert_eq!(cfg.backends, vec![BackendChoice::Closed]);
        assert_eq!(cfg.volterra, VolterraSettings::default());
        assert_eq!(cfg.mc, McSettings::default());
    }

    #[test]
    fn out_of_range_a_names_key_and_interval() {
        let text = MINIMAL.replace("a = 0.0", "a = 1.5");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains('a') && err.contains("[-1, 1]"), "{err}");
    }

    #[test]
    fn backend_kernel_mismatch_is_rejected() {
        let text = MINIMAL.replace(
            "kernel = \"memoryless\"",
            "kernel = \"exponential\"\nkappa = 1.0",
        );
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(
            err.contains("closed") && err.contains("does not support"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("nu = 1.0", "nu = 1.0\nnuu = 2.0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("nuu"), "{err}");

        let text = format!("{MINIMAL}\n[grid2]\nx = 1\n");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("grid2"), "{err}");
    }

    #[test]
    fn kernel_grammar_variants() {
        for (kernel, ok) in [
            ("kernel = \"composite\"\nw = 0.5\nkappa = 1.0", true),
            ("kernel = \"modulated\"\nkappa = 1.0\nomega = 2.0", true),
            ("kernel = \"composite\"\nkappa = 1.0", false), // missing w
            ("kernel = \"memoryless\"\nkappa = 1.0", false), // stray key
            ("kernel = \"modulated\"\nkappa = 1.0\nomega = 2.0\nw = 0.1", false),
            ("kernel = \"gaussian\"", false),
        ] {
            let text = MINIMAL
                .replace("kernel = \"memoryless\"", kernel)
                .replace("backends = [\"closed\"]", "backends = [\"rational\"]");
            assert_eq!(parse_config(&text).is_ok(), ok, "{kernel}");
        }
    }

    #[test]
    fn kernel_parameter_ranges_are_validated() {
        let text = MINIMAL
            .replace(
                "kernel = \"memoryless\"",
                "kernel = \"composite\"\nw = 1.5\nkappa = 1.0",
            )
            .replace("backends = [\"closed\"]", "backends = [\"rational\"]");
        let err = format!("{:#}", parse_config(&text).unwrap_err());
        assert!(err.contains('w'), "{err}");
    }

    #[test]
    fn molecule_config_parses_and_builds() {
        let text = r#"
            [system]
            omegas = [1.0, 0.0, -0.5]
            rho0_re = [[0.4, 0.1, 0.1], [0.1, 0.3, 0.0], [0.1, 0.0, 0.3]]

            [pair.0.1]
            nu = 1.0
            lambda = 1.0
            a = 0.0
            kernel = "memoryless"

            [pair.0.2]
            nu = 2.0
            lambda = 1.0
            a = 0.5
            kernel = "composite"
            w = 0.5
            kappa = 1.0

            [grid]
            t_max = 5.0
            n_points = 11

            [output]
            backends = ["rational"]
        "#;
        let cfg = parse_config(text).unwrap();
        assert!(!cfg.shorthand);
        assert_eq!(cfg.pairs.len(), 2);
        let molecule = cfg.molecule().unwrap().unwrap();
        assert_eq!(molecule.n_levels(), 3);
    }

    #[test]
    fn missing_pair_params_for_coherent_element() {
        // rho0 couples (0,1) and (0,2) but only (0,1) gets noise parameters
        let text = r#"
            [system]
            omegas = [0.0, 0.0, 0.0]
            rho0_re = [[0.4, 0.2, 0.1], [0.2, 0.3, 0.0], [0.1, 0.0, 0.3]]

            [pair.0.1]
            nu = 1.0
            lambda = 1.0
            a = 0.0
            kernel = "memoryless"

            [grid]
            t_max = 1.0
            n_points = 3

            [output]
            backends = ["closed"]
        "#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("(0, 2)"), "{err}");
    }

    #[test]
    fn roundtrip_shorthand() {
        let cfg = parse_config(MINIMAL).unwrap();
        let text = to_toml_string(&cfg);
        let again = parse_config(&text).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn roundtrip_full_molecule() {
        let text = r#"
            [system]
            omegas = [1.0, 0.0]
            rho0_re = [[0.5, 0.25], [0.25, 0.5]]
            rho0_im = [[0.0, 0.1], [-0.1, 0.0]]

            [pair.0.1]
            nu = 2.0
            lambda = 0.8
            a = -0.3
            kernel = "modulated"
            kappa = 1.5
            omega = 0.7

            [grid]
            t_max = 8.0
            n_points = 33

            [volterra]
            step = 0.002

            [mc]
            n_traj = 5000
            seed = 7

            [output]
            dir = "out"
            prefix = "run1_"
            backends = ["rational", "contour", "volterra"]
        "#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&to_toml_string(&cfg)).unwrap();
        assert_eq!(cfg, again);

        // mc needs a kernel with a trajectory representation
        let text = text
            .replace(
                "kernel = \"modulated\"\n            kappa = 1.5\n            omega = 0.7",
                "kernel = \"exponential\"\n            kappa = 4.0",
            )
            .replace(
                "backends = [\"rational\", \"contour\", \"volterra\"]",
                "backends = [\"rational\", \"mc\"]",
            );
        let cfg = parse_config(&text).unwrap();
        let again = parse_config(&to_toml_string(&cfg)).unwrap();
        assert_eq!(cfg, again);
    }
}
