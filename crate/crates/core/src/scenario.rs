//! Scenario files for the command-line runner: parsing, validation, and
//! evaluation into output tables.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cft::{self, FermionCount, Method, SubnetParams};
use crate::error::{Error, Result};
use crate::geometry::{Geometry, MultiInterval};
use crate::kernel::{k0_trace, KernelConfig};
use crate::lattice::convergence_study;
use crate::oracles::{run_audit, Inequality};
use crate::quadrature::QuadratureConfig;

/// Audit gaps below this count as violations.
pub const AUDIT_VIOLATION: f64 = -1e-9;
/// Allowed `|KernelTrace - ClosedForm|`.
pub const KERNEL_TOL: f64 = 1e-6;
/// Allowed relative deviation of the lattice value.
pub const LATTICE_REL_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Lattice,
    KernelTrace,
    Audit,
    Scan,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Lattice => "lattice",
            Mode::KernelTrace => "kernel_trace",
            Mode::Audit => "audit",
            Mode::Scan => "scan",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeParams {
    pub scales: Vec<usize>,
}

fn default_trials() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditParams {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Subset to run; all when absent.
    #[serde(default)]
    pub inequalities: Option<Vec<Inequality>>,
}

impl Default for AuditParams {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            seed: 0,
            inequalities: None,
        }
    }
}

fn default_etas() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    #[serde(default = "default_etas")]
    pub etas: Vec<f64>,
}

fn default_r() -> u32 {
    1
}

type RawRegion = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub id: Option<String>,
    pub mode: Mode,
    #[serde(rename = "A", default)]
    pub a: Option<RawRegion>,
    #[serde(rename = "B", default)]
    pub b: Option<RawRegion>,
    #[serde(rename = "C", default)]
    pub c: Option<RawRegion>,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub geometry: Geometry,
    #[serde(default)]
    pub lattice: Option<LatticeParams>,
    #[serde(default)]
    pub quad: Option<QuadratureConfig>,
    #[serde(default)]
    pub eps0: Option<f64>,
    #[serde(default)]
    pub audit: Option<AuditParams>,
    #[serde(default)]
    pub scan: Option<ScanParams>,
    /// Methods for `compare`; every applicable one when absent.
    #[serde(default)]
    pub methods: Option<Vec<Method>>,
}

/// Command-line overrides applied on top of every scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

/// A validated scenario with its identifier and parsed regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub id: String,
    pub scenario: Scenario,
    pub r: FermionCount,
    pub sub: SubnetParams,
    pub a: Option<MultiInterval>,
    pub b: Option<MultiInterval>,
    pub c: Option<MultiInterval>,
    pub quad: QuadratureConfig,
    pub audit: AuditParams,
}

/// Parses a single scenario object or a list of them.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::domain("parse", format!("invalid JSON: {e}")))?;
    let items = match value {
        Value::Array(items) => items,
        other => vec![other],
    };
    if items.is_empty() {
        return Err(Error::domain("parse", "scenario list is empty"));
    }
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            serde_json::from_value(v)
                .map_err(|e| Error::domain("parse", format!("scenario {i}: {e}")))
        })
        .collect()
}

fn region(raw: &Option<RawRegion>, geometry: Geometry) -> Result<Option<MultiInterval>> {
    raw.as_ref()
        .map(|parts| {
            let pairs: Vec<(f64, f64)> = parts.iter().map(|p| (p[0], p[1])).collect();
            MultiInterval::new(&pairs, geometry)
        })
        .transpose()
}

fn require<'a>(
    field: &'a Option<MultiInterval>,
    name: &str,
    id: &str,
    mode: Mode,
) -> Result<&'a MultiInterval> {
    field.as_ref().ok_or_else(|| {
        Error::domain("validate", format!("scenario {id}: mode {mode} needs field {name}"))
    })
}

fn require_line(p: &Prepared) -> Result<()> {
    if p.scenario.geometry != Geometry::Line {
        return Err(Error::domain(
            "validate",
            format!("scenario {}: mode {} needs line geometry", p.id, p.scenario.mode),
        ));
    }
    Ok(())
}

impl Prepared {
    fn new(index: usize, scenario: Scenario, overrides: Overrides) -> Result<Self> {
        let id = scenario.id.clone().unwrap_or_else(|| format!("s{index:03}"));
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(Error::domain(
                "validate",
                format!("scenario id {id:?} must be nonempty ASCII letters, digits, '_' or '-'"),
            ));
        }
        let r = FermionCount::new(scenario.r)?;
        let sub = match scenario.mu {
            Some(mu) => SubnetParams::from_mu(mu)?,
            None => SubnetParams::TRIVIAL,
        };
        let mut quad = scenario.quad.unwrap_or_default();
        if let Some(tol) = overrides.tol {
            quad.abs_tol = tol;
        }
        quad.validate()?;
        let mut audit = scenario.audit.clone().unwrap_or_default();
        if let Some(seed) = overrides.seed {
            audit.seed = seed;
        }
        let geometry = scenario.geometry;
        let p = Self {
            id,
            r,
            sub,
            a: region(&scenario.a, geometry)?,
            b: region(&scenario.b, geometry)?,
            c: region(&scenario.c, geometry)?,
            quad,
            audit,
            scenario,
        };
        p.validate()?;
        Ok(p)
    }

    fn pair(&self) -> Result<(&MultiInterval, &MultiInterval)> {
        let mode = self.scenario.mode;
        let a = require(&self.a, "A", &self.id, mode)?;
        let b = require(&self.b, "B", &self.id, mode)?;
        Ok((a, b))
    }

    fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        match s.mode {
            Mode::Exact => {
                let (a, b) = self.pair()?;
                match &self.c {
                    Some(c) => {
                        a.union_disjoint(b)?.union_disjoint(c)?;
                    }
                    None => {
                        a.union_disjoint(b)?;
                    }
                }
            }
            Mode::Lattice => {
                require_line(self)?;
                let (a, b) = self.pair()?;
                a.union_disjoint(b)?;
                let scales = s.lattice.as_ref().map(|l| &l.scales);
                match scales {
                    Some(sc) if !sc.is_empty() && sc.iter().all(|&x| x > 0) => {}
                    _ => {
                        return Err(Error::domain(
                            "validate",
                            format!("scenario {}: lattice mode needs positive lattice.scales", self.id),
                        ))
                    }
                }
            }
            Mode::KernelTrace => {
                require_line(self)?;
                let (a, b) = self.pair()?;
                if a.is_empty() || b.is_empty() {
                    return Err(Error::domain("validate", format!("scenario {}: A and B must be nonempty", self.id)));
                }
                KernelConfig::from_split(a, b, s.eps0.unwrap_or(0.0), self.quad)?;
            }
            Mode::Audit => {
                if self.audit.trials == 0 {
                    return Err(Error::domain("validate", format!("scenario {}: audit.trials must be positive", self.id)));
                }
            }
            Mode::Scan => {
                let etas = s.scan.clone().map_or_else(default_etas, |p| p.etas);
                if etas.is_empty() || etas.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                    return Err(Error::domain(
                        "validate",
                        format!("scenario {}: scan etas must be nonempty and inside (0, 1)", self.id),
                    ));
                }
            }
        }
        if let Some(methods) = &s.methods {
            if methods.is_empty() {
                return Err(Error::domain("validate", format!("scenario {}: methods is empty", self.id)));
            }
            if methods.contains(&Method::Lattice) && s.lattice.is_none() {
                return Err(Error::domain(
                    "validate",
                    format!("scenario {}: Lattice comparison needs lattice.scales", self.id),
                ));
            }
        }
        Ok(())
    }
}

/// Validates every scenario before anything runs; ids must be unique.
pub fn prepare(scenarios: Vec<Scenario>, overrides: Overrides) -> Result<Vec<Prepared>> {
    let prepared: Vec<Prepared> = scenarios
        .into_iter()
        .enumerate()
        .map(|(i, s)| Prepared::new(i, s, overrides))
        .collect::<Result<_>>()?;
    let mut ids: Vec<&str> = prepared.iter().map(|p| p.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::domain("validate", format!("duplicate scenario id {:?}", w[0])));
    }
    Ok(prepared)
}

/// One output cell; floats print in shortest round-trip form, switching to
/// exponent notation for very large or small magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
    Bool(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Int(i) => write!(f, "{i}"),
            // Adding 0.0 turns -0.0 into 0.0.
            Cell::Float(x) => write!(f, "{:?}", x + 0.0),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as u64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Rows as JSON objects keyed by column name.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), serde_json::to_value(c).expect("cell serializes")))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    /// Stable sort by the first column (the scenario id).
    pub fn sort_by_scenario(&mut self) {
        self.rows.sort_by(|x, y| x[0].to_string().cmp(&y[0].to_string()));
    }
}

/// Output of one scenario item.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemOutput {
    pub id: String,
    pub mode: Mode,
    pub table: Table,
    /// Set when an audit gap or a comparison deviation exceeds its tolerance.
    pub violation: bool,
}

fn region_text(m: &Option<MultiInterval>) -> String {
    m.as_ref().map_or_else(String::new, |m| {
        m.pairs()
            .iter()
            .map(|(a, b)| format!("({a};{b})"))
            .collect::<Vec<_>>()
            .join(" ")
    })
}

fn run_exact(p: &Prepared) -> Result<Table> {
    let (a, b) = p.pair()?;
    let mut t = Table::new(vec![
        "scenario_id", "method", "geometry", "A", "B", "C", "r", "mu", "eta", "value", "index_limit",
    ]);
    let (value, eta) = match &p.c {
        Some(c) => (cft::extended_mi(a, b, c, p.r)?, None),
        None => {
            let rep = cft::mutual_information_exact(a, b, p.r)?;
            (rep.value, rep.diagnostics.eta)
        }
    };
    let geometry = match p.scenario.geometry {
        Geometry::Line => "line",
        Geometry::Circle => "circle",
    };
    t.push(vec![
        p.id.clone().into(),
        Method::ClosedForm.to_string().into(),
        geometry.into(),
        region_text(&p.a).into(),
        region_text(&p.b).into(),
        region_text(&p.c).into(),
        (p.r.get() as u64).into(),
        p.sub.mu().into(),
        eta.map_or(Cell::Text(String::new()), Cell::Float),
        value.into(),
        cft::index_limit(p.sub).into(),
    ]);
    Ok(t)
}

fn run_lattice(p: &Prepared) -> Result<Table> {
    let (a, b) = p.pair()?;
    let scales = &p.scenario.lattice.as_ref().expect("validated").scales;
    let rows = convergence_study(a, b, scales)?;
    // r independent copies multiply every entropy by r.
    let r = p.r.get() as f64;
    let mut t = Table::new(vec![
        "scenario_id", "scale", "sites_A", "sites_B", "S_A", "S_B", "S_AB", "mi_lattice", "mi_closed", "rel_error",
    ]);
    for row in rows {
        t.push(vec![
            p.id.clone().into(),
            row.scale.into(),
            row.sites_a.into(),
            row.sites_b.into(),
            (r * row.s_a).into(),
            (r * row.s_b).into(),
            (r * row.s_ab).into(),
            (r * row.mi_lattice).into(),
            (r * row.mi_closed).into(),
            row.rel_error.into(),
        ]);
    }
    Ok(t)
}

/// Kernel traces for both role assignments and their sum.
pub fn kernel_traces(p: &Prepared) -> Result<[(String, f64, f64, f64, usize); 3]> {
    let (a, b) = p.pair()?;
    let cfg = KernelConfig::from_split(a, b, p.scenario.eps0.unwrap_or(0.0), p.quad)?;
    let r = p.r.get() as f64;
    let ta = k0_trace(&cfg)?;
    let tb = k0_trace(&cfg.swapped()?)?;
    let closed = cft::mutual_information_exact(a, b, p.r)?.value;
    Ok([
        ("A".into(), r * ta.numeric, r * ta.closed_form, r * ta.abs_err, ta.subdivisions),
        ("B".into(), r * tb.numeric, r * tb.closed_form, r * tb.abs_err, tb.subdivisions),
        (
            "total".into(),
            r * (ta.numeric + tb.numeric),
            closed,
            r * (ta.abs_err + tb.abs_err),
            ta.subdivisions + tb.subdivisions,
        ),
    ])
}

fn run_kernel(p: &Prepared) -> Result<Table> {
    let mut t = Table::new(vec![
        "scenario_id", "role", "numeric", "closed_form", "deviation", "abs_err", "subdivisions",
    ]);
    for (role, numeric, closed, err, subs) in kernel_traces(p)? {
        t.push(vec![
            p.id.clone().into(),
            role.into(),
            numeric.into(),
            closed.into(),
            (numeric - closed).abs().into(),
            err.into(),
            subs.into(),
        ]);
    }
    Ok(t)
}

fn run_audit_mode(p: &Prepared) -> Result<(Table, bool)> {
    let list = p.audit.inequalities.clone().unwrap_or_else(|| Inequality::ALL.to_vec());
    let mut t = Table::new(vec!["scenario_id", "inequality_name", "trials", "min_gap", "argmin_seed"]);
    let mut violation = false;
    for ineq in list {
        let row = run_audit(ineq, p.audit.trials, p.audit.seed)?;
        violation |= row.min_gap < AUDIT_VIOLATION;
        t.push(vec![
            p.id.clone().into(),
            row.inequality_name.into(),
            row.trials.into(),
            row.min_gap.into(),
            row.argmin_seed.into(),
        ]);
    }
    Ok((t, violation))
}

fn run_scan(p: &Prepared) -> Result<Table> {
    let etas = p.scenario.scan.clone().map_or_else(default_etas, |s| s.etas);
    let mut t = Table::new(vec!["scenario_id", "eta", "f_eta", "f_complement", "duality_gap"]);
    for row in cft::duality_scan(&etas, p.r)? {
        t.push(vec![
            p.id.clone().into(),
            row.eta.into(),
            row.f_eta.into(),
            row.f_complement.into(),
            row.duality_gap.into(),
        ]);
    }
    Ok(t)
}

/// Evaluates one prepared scenario in its own mode.
pub fn run_item(p: &Prepared) -> Result<ItemOutput> {
    let (table, violation) = match p.scenario.mode {
        Mode::Exact => (run_exact(p)?, false),
        Mode::Lattice => (run_lattice(p)?, false),
        Mode::KernelTrace => (run_kernel(p)?, false),
        Mode::Audit => run_audit_mode(p)?,
        Mode::Scan => (run_scan(p)?, false),
    };
    Ok(ItemOutput {
        id: p.id.clone(),
        mode: p.scenario.mode,
        table,
        violation,
    })
}

/// Runs all items concurrently; results come back in input order.
pub fn run_all(items: &[Prepared]) -> Result<Vec<ItemOutput>> {
    items.par_iter().map(run_item).collect()
}

fn applicable_methods(p: &Prepared) -> Vec<Method> {
    if let Some(m) = &p.scenario.methods {
        let mut m = m.clone();
        m.sort();
        m.dedup();
        return m;
    }
    let mut m = vec![Method::ClosedForm];
    if p.scenario.geometry == Geometry::Line {
        m.push(Method::KernelTrace);
        if p.scenario.lattice.is_some() {
            m.push(Method::Lattice);
        }
    }
    m
}

/// One row per method with its deviation from the closed form; the closed
/// form is the reference whenever it is among the methods, otherwise the
/// first listed method is.
pub fn compare_item(p: &Prepared) -> Result<(Table, bool)> {
    let (a, b) = p.pair()?;
    if p.c.is_some() {
        return Err(Error::domain("compare", format!("scenario {}: compare takes only A and B", p.id)));
    }
    let methods = applicable_methods(p);
    let mut values = Vec::new();
    for &m in &methods {
        let v = match m {
            Method::ClosedForm => cft::mutual_information_exact(a, b, p.r)?.value,
            Method::KernelTrace => {
                require_line(p)?;
                kernel_traces(p)?[2].1
            }
            Method::Lattice => {
                require_line(p)?;
                let scales = &p.scenario.lattice.as_ref().expect("validated").scales;
                let finest = *scales.iter().max().expect("validated nonempty");
                let rows = convergence_study(a, b, &[finest])?;
                p.r.get() as f64 * rows[0].mi_lattice
            }
        };
        values.push((m, v));
    }
    let reference = values[0].1;
    let mut t = Table::new(vec![
        "scenario_id", "method", "value", "deviation", "tolerance", "within_tolerance",
    ]);
    let mut violation = false;
    for (i, &(m, v)) in values.iter().enumerate() {
        let (dev, tol) = if i == 0 || methods.len() == 1 {
            (Cell::Text(String::new()), Cell::Text(String::new()))
        } else {
            let (dev, tol) = match m {
                Method::Lattice => ((v - reference).abs() / reference.abs(), LATTICE_REL_TOL),
                _ => ((v - reference).abs(), KERNEL_TOL),
            };
            let ok = dev < tol;
            violation |= !ok;
            (Cell::Float(dev), Cell::Float(tol))
        };
        let within = match &dev {
            Cell::Float(d) => match &tol {
                Cell::Float(tl) => Cell::Bool(d < tl),
                _ => Cell::Text(String::new()),
            },
            _ => Cell::Text(String::new()),
        };
        t.push(vec![p.id.clone().into(), m.to_string().into(), v.into(), dev, tol, within]);
    }
    Ok((t, violation))
}

/// Compares all items concurrently and merges their rows sorted by scenario id.
pub fn compare_all(items: &[Prepared]) -> Result<(Table, bool)> {
    let parts: Vec<(Table, bool)> = items.par_iter().map(compare_item).collect::<Result<_>>()?;
    let mut merged = Table::new(vec![
        "scenario_id", "method", "value", "deviation", "tolerance", "within_tolerance",
    ]);
    let mut violation = false;
    for (t, v) in parts {
        merged.rows.extend(t.rows);
        violation |= v;
    }
    merged.sort_by_scenario();
    Ok((merged, violation))
}
