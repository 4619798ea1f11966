use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::diagnostics::Case;
use crate::error::{Error, Result};
use crate::models::{Bump, DampingField, DampingShape, EndStates, Grid1D, PressureLaw};
use crate::solver::{Boundary, InitialKind, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureSection {
    pub p_ref: f64,
    pub gamma_p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Constant,
    GaussianBump,
    DoubleBump,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampingSection {
    pub alpha_bar: f64,
    pub shape: ShapeKind,
    pub a: f64,
    pub w: f64,
    pub x_c: f64,
    /// Second bump, used by `double_bump` only.
    pub a2: f64,
    pub w2: f64,
    pub x_c2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSection {
    pub half_length: f64,
    pub n_cells: usize,
    pub boundary: Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSection {
    pub t_final: f64,
    pub cfl: f64,
    pub snapshot_stride: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitSection {
    pub kind: InitialKind,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    pub velocity_amplitude: f64,
    /// Gaussian mass of the base diffusion wave the perturbation sits on (equal ends only).
    pub profile_mass: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSection {
    pub xi_max: f64,
    pub n_nodes: usize,
    pub tol: f64,
    pub mollifier_width: f64,
    pub mollifier_center: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySection {
    pub gamma_w: f64,
    pub fit_window_lo: Option<f64>,
    pub fit_window_hi: Option<f64>,
    /// Slope tolerance per series column, overriding the defaults.
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSection {
    pub directory: String,
    /// Write every `stride`-th snapshot to disk.
    pub stride: usize,
}

/// One experiment, fully validated.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub case: Case,
    pub pressure: PressureSection,
    pub damping: DampingSection,
    pub end_states: EndStates,
    pub grid: GridSection,
    pub time: TimeSection,
    pub init: InitSection,
    pub profile: ProfileSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

fn shape_name(s: ShapeKind) -> &'static str {
    match s {
        ShapeKind::Constant => "constant",
        ShapeKind::GaussianBump => "gaussian_bump",
        ShapeKind::DoubleBump => "double_bump",
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::FarfieldDecay => "farfield_decay",
        Boundary::Extrapolation => "extrapolation",
    }
}

fn kind_name(k: InitialKind) -> &'static str {
    match k {
        InitialKind::ProfilePlusPerturbation => "profile_plus_perturbation",
        InitialKind::GaussianHump => "gaussian_hump",
        InitialKind::CustomTable => "custom_table",
    }
}

/// Collects every problem found while reading a document.
#[derive(Default)]
struct Reader {
    errors: Vec<String>,
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    seen: Vec<&'static str>,
}

impl Reader {
    fn section<'a>(&mut self, doc: &'a Table, name: &'static str, required: bool) -> Section<'a> {
        let table = match doc.get(name) {
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.errors.push(format!("[{name}] must be a table"));
                None
            }
            None => {
                if required {
                    self.errors.push(format!("missing section [{name}]"));
                }
                None
            }
        };
        Section { name, table, seen: Vec::new() }
    }

    fn raw<'a>(&mut self, s: &mut Section<'a>, key: &'static str) -> Option<&'a Value> {
        s.seen.push(key);
        s.table.and_then(|t| t.get(key))
    }

    fn float(&mut self, s: &mut Section, key: &'static str, default: Option<f64>) -> f64 {
        let name = s.name;
        match self.raw(s, key) {
            Some(Value::Float(f)) => *f,
            Some(Value::Integer(i)) => *i as f64,
            Some(other) => {
                self.errors.push(format!("{name}.{key} must be a number, got {other}"));
                f64::NAN
            }
            None => default.unwrap_or_else(|| {
                if s.table.is_some() {
                    self.errors.push(format!("missing key {name}.{key}"));
                }
                f64::NAN
            }),
        }
    }

    fn opt_float(&mut self, s: &mut Section, key: &'static str) -> Option<f64> {
        let present = s.table.is_some_and(|t| t.contains_key(key));
        let v = self.float(s, key, Some(f64::NAN));
        present.then_some(v)
    }

    fn count(&mut self, s: &mut Section, key: &'static str, default: Option<usize>) -> usize {
        let name = s.name;
        match self.raw(s, key) {
            Some(Value::Integer(i)) if *i >= 0 => *i as usize,
            Some(other) => {
                self.errors.push(format!("{name}.{key} must be a non-negative integer, got {other}"));
                0
            }
            None => default.unwrap_or_else(|| {
                if s.table.is_some() {
                    self.errors.push(format!("missing key {name}.{key}"));
                }
                0
            }),
        }
    }

    fn string(&mut self, s: &mut Section, key: &'static str, default: &str) -> String {
        let name = s.name;
        match self.raw(s, key) {
            Some(Value::String(v)) => v.clone(),
            Some(other) => {
                self.errors.push(format!("{name}.{key} must be a string, got {other}"));
                default.to_string()
            }
            None => default.to_string(),
        }
    }

    fn choice<T: Copy>(&mut self, s: &mut Section, key: &'static str, default: T, options: &[(&str, T)]) -> T {
        let name = s.name;
        let Some(v) = self.raw(s, key) else { return default };
        let text = v.as_str().unwrap_or_default();
        match options.iter().find(|(n, _)| *n == text) {
            Some((_, t)) => *t,
            None => {
                let names: Vec<&str> = options.iter().map(|o| o.0).collect();
                self.errors.push(format!("{name}.{key} = {v} is not one of {}", names.join(", ")));
                default
            }
        }
    }

    fn finish(&mut self, s: Section, nested: &[&str]) {
        if let Some(t) = s.table {
            for key in t.keys() {
                if !s.seen.contains(&key.as_str()) && !nested.contains(&key.as_str()) {
                    self.errors.push(format!("unknown key {}.{key}", s.name));
                }
            }
        }
    }
}

/// Columns with a default slope expectation.
pub const FITTED_COLUMNS: [&str; 3] = ["L2_v_err", "L2_u_err", "Linf_v_err"];

const SECTIONS: [&str; 9] = ["pressure", "damping", "end_states", "grid", "time", "init", "profile", "verify", "output"];

/// Parse and validate a TOML experiment document; every violation is reported at once.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Validation(vec![format!("malformed document: {}", e.message())]))?;
    let mut r = Reader::default();
    for key in doc.keys() {
        if key != "case" && !SECTIONS.contains(&key.as_str()) {
            r.errors.push(format!("unknown key {key}"));
        }
    }
    let case = match doc.get("case") {
        Some(Value::String(s)) => s.parse::<Case>().unwrap_or_else(|_| {
            r.errors.push(format!("case = {s:?} is not one of const_state, similarity"));
            Case::ConstState
        }),
        Some(other) => {
            r.errors.push(format!("case must be a string, got {other}"));
            Case::ConstState
        }
        None => {
            r.errors.push("missing key case".into());
            Case::ConstState
        }
    };

    let mut s = r.section(&doc, "pressure", true);
    let pressure = PressureSection {
        p_ref: r.float(&mut s, "p_ref", None),
        gamma_p: r.float(&mut s, "gamma_p", None),
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "damping", true);
    let shape_opts = [ShapeKind::Constant, ShapeKind::GaussianBump, ShapeKind::DoubleBump].map(|k| (shape_name(k), k));
    let damping = DampingSection {
        alpha_bar: r.float(&mut s, "alpha_bar", None),
        shape: r.choice(&mut s, "shape", ShapeKind::Constant, &shape_opts),
        a: r.float(&mut s, "a", Some(0.0)),
        w: r.float(&mut s, "w", Some(1.0)),
        x_c: r.float(&mut s, "x_c", Some(0.0)),
        a2: r.float(&mut s, "a2", Some(0.0)),
        w2: r.float(&mut s, "w2", Some(1.0)),
        x_c2: r.float(&mut s, "x_c2", Some(0.0)),
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "end_states", true);
    let end_states = EndStates {
        v_minus: r.float(&mut s, "v_minus", None),
        v_plus: r.float(&mut s, "v_plus", None),
        u_minus: r.float(&mut s, "u_minus", Some(0.0)),
        u_plus: r.float(&mut s, "u_plus", Some(0.0)),
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "grid", true);
    let boundary_opts = [Boundary::FarfieldDecay, Boundary::Extrapolation].map(|b| (boundary_name(b), b));
    let grid = GridSection {
        half_length: r.float(&mut s, "half_length", None),
        n_cells: r.count(&mut s, "n_cells", None),
        boundary: r.choice(&mut s, "boundary", Boundary::FarfieldDecay, &boundary_opts),
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "time", true);
    let time = TimeSection {
        t_final: r.float(&mut s, "t_final", None),
        cfl: r.float(&mut s, "cfl", Some(0.45)),
        snapshot_stride: r.float(&mut s, "snapshot_stride", Some(1.0)),
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "init", false);
    let kind_opts = [InitialKind::ProfilePlusPerturbation, InitialKind::GaussianHump].map(|k| (kind_name(k), k));
    let init = InitSection {
        kind: r.choice(&mut s, "kind", InitialKind::ProfilePlusPerturbation, &kind_opts),
        amplitude: r.float(&mut s, "amplitude", Some(0.0)),
        width: r.float(&mut s, "width", Some(1.0)),
        center: r.float(&mut s, "center", Some(0.0)),
        velocity_amplitude: r.float(&mut s, "velocity_amplitude", Some(0.0)),
        profile_mass: r.float(&mut s, "profile_mass", Some(0.0)),
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "profile", false);
    let profile = ProfileSection {
        xi_max: r.float(&mut s, "xi_max", Some(12.0)),
        n_nodes: r.count(&mut s, "n_nodes", Some(4096)),
        tol: r.float(&mut s, "tol", Some(1e-8)),
        mollifier_width: r.float(&mut s, "mollifier_width", Some(1.0)),
        mollifier_center: r.float(&mut s, "mollifier_center", Some(0.0)),
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "verify", false);
    let mut tolerances = BTreeMap::new();
    match r.raw(&mut s, "tolerances") {
        Some(Value::Table(t)) => {
            for (k, v) in t {
                match v.as_float().or(v.as_integer().map(|i| i as f64)) {
                    Some(x) => {
                        tolerances.insert(k.clone(), x);
                    }
                    None => r.errors.push(format!("verify.tolerances.{k} must be a number")),
                }
            }
        }
        Some(_) => r.errors.push("verify.tolerances must be a table".into()),
        None => {}
    }
    let verify = VerifySection {
        gamma_w: r.float(&mut s, "gamma_w", Some(0.75)),
        fit_window_lo: r.opt_float(&mut s, "fit_window_lo"),
        fit_window_hi: r.opt_float(&mut s, "fit_window_hi"),
        tolerances,
    };
    r.finish(s, &[]);

    let mut s = r.section(&doc, "output", false);
    let output = OutputSection {
        directory: r.string(&mut s, "directory", "out"),
        stride: r.count(&mut s, "stride", Some(1)),
    };
    r.finish(s, &[]);

    let config = ExperimentConfig {
        case,
        pressure,
        damping,
        end_states,
        grid,
        time,
        init,
        profile,
        verify,
        output,
    };
    r.errors.extend(config.violations());
    if r.errors.is_empty() {
        Ok(config)
    } else {
        Err(Error::Validation(r.errors))
    }
}

fn collect<T>(errors: &mut Vec<String>, r: Result<T>) -> Option<T> {
    match r {
        Ok(t) => Some(t),
        Err(Error::Validation(v)) => {
            errors.extend(v);
            None
        }
        Err(e) => {
            errors.push(e.to_string());
            None
        }
    }
}

impl ExperimentConfig {
    /// Every constraint violation; empty when the configuration is usable.
    pub fn violations(&self) -> Vec<String> {
        let mut e = Vec::new();
        let ends = &self.end_states;
        match self.case {
            Case::ConstState if ends.v_minus != ends.v_plus => e.push(format!(
                "case const_state requires v_minus = v_plus (equal far-field volumes), got {} and {}",
                ends.v_minus, ends.v_plus
            )),
            Case::Similarity if ends.v_minus == ends.v_plus => {
                e.push("case similarity requires v_minus != v_plus".into())
            }
            Case::Similarity if !(self.verify.gamma_w > 0.5 && self.verify.gamma_w < 1.0) => e.push(format!(
                "verify.gamma_w = {} must satisfy 1/2 < gamma < 1 in the similarity case",
                self.verify.gamma_w
            )),
            _ => {}
        }
        collect(&mut e, self.law());
        collect(&mut e, self.field());
        collect(&mut e, EndStates::new(ends.v_minus, ends.v_plus, ends.u_minus, ends.u_plus));
        if self.grid.n_cells < 3 {
            e.push(format!("grid.n_cells must be at least 3, got {}", self.grid.n_cells));
        }
        collect(&mut e, Grid1D::new(self.grid.half_length, self.grid.n_cells.max(1)));
        collect(&mut e, self.solver_config().validate());
        if !(self.init.width > 0.0) {
            e.push(format!("init.width must be positive, got {}", self.init.width));
        }
        if !(self.init.amplitude.is_finite() && self.init.velocity_amplitude.is_finite()) {
            e.push("init amplitudes must be finite".into());
        }
        if self.init.kind == InitialKind::GaussianHump && ends.v_minus != ends.v_plus {
            e.push("init.kind gaussian_hump requires v_minus = v_plus".into());
        }
        if self.case == Case::Similarity && self.init.profile_mass != 0.0 {
            e.push("init.profile_mass applies to the const_state case only".into());
        }
        let p = &self.profile;
        if !(p.xi_max > 0.0) {
            e.push(format!("profile.xi_max must be positive, got {}", p.xi_max));
        }
        if p.n_nodes < 16 {
            e.push(format!("profile.n_nodes must be at least 16, got {}", p.n_nodes));
        }
        if !(p.tol > 0.0) {
            e.push(format!("profile.tol must be positive, got {}", p.tol));
        }
        if !(p.mollifier_width > 0.0 && p.mollifier_center.is_finite()) {
            e.push(format!("profile.mollifier_width must be positive, got {}", p.mollifier_width));
        }
        let (lo, hi) = self.fit_window();
        if self.verify.fit_window_lo.is_some() && !(lo >= 1.0) {
            e.push(format!("verify.fit_window_lo must be at least 1, got {lo}"));
        }
        if (self.verify.fit_window_lo.is_some() || self.verify.fit_window_hi.is_some()) && !(hi > lo) {
            e.push(format!("verify fit window [{lo}, {hi}] is empty"));
        }
        for (k, v) in &self.verify.tolerances {
            if !FITTED_COLUMNS.contains(&k.as_str()) {
                e.push(format!("verify.tolerances.{k}: no slope expectation for this column"));
            }
            if !(*v >= 0.0) {
                e.push(format!("verify.tolerances.{k} must be non-negative, got {v}"));
            }
        }
        if self.output.stride == 0 {
            e.push("output.stride must be at least 1".into());
        }
        e
    }

    pub fn law(&self) -> Result<PressureLaw> {
        PressureLaw::new(self.pressure.p_ref, self.pressure.gamma_p)
    }

    pub fn field(&self) -> Result<DampingField> {
        let d = &self.damping;
        let first = Bump { a: d.a, w: d.w, x_c: d.x_c };
        let shape = match d.shape {
            ShapeKind::Constant => DampingShape::Constant,
            ShapeKind::GaussianBump => DampingShape::GaussianBump(first),
            ShapeKind::DoubleBump => DampingShape::DoubleBump([first, Bump { a: d.a2, w: d.w2, x_c: d.x_c2 }]),
        };
        DampingField::new(d.alpha_bar, shape)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.grid.half_length, self.grid.n_cells)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            cfl: self.time.cfl,
            t_final: self.time.t_final,
            snapshot_stride: self.time.snapshot_stride,
            boundary: self.grid.boundary,
        }
    }

    /// Configured fit window, defaulting to `[max(1, t_final / 10), t_final]`.
    pub fn fit_window(&self) -> (f64, f64) {
        let t = self.time.t_final;
        (
            self.verify.fit_window_lo.unwrap_or((t / 10.0).max(1.0)),
            self.verify.fit_window_hi.unwrap_or(t),
        )
    }

    /// Canonical TOML text; `parse_config(emit())` reproduces `self`.
    pub fn emit(&self) -> String {
        let f = |x: f64| format!("{x:?}");
        let mut out = format!("case = \"{}\"\n", self.case.name());
        let p = &self.pressure;
        out += &format!("\n[pressure]\np_ref = {}\ngamma_p = {}\n", f(p.p_ref), f(p.gamma_p));
        let d = &self.damping;
        out += &format!(
            "\n[damping]\nalpha_bar = {}\nshape = \"{}\"\na = {}\nw = {}\nx_c = {}\n",
            f(d.alpha_bar),
            shape_name(d.shape),
            f(d.a),
            f(d.w),
            f(d.x_c)
        );
        if d.shape == ShapeKind::DoubleBump || d.a2 != 0.0 || d.w2 != 1.0 || d.x_c2 != 0.0 {
            out += &format!("a2 = {}\nw2 = {}\nx_c2 = {}\n", f(d.a2), f(d.w2), f(d.x_c2));
        }
        let e = &self.end_states;
        out += &format!(
            "\n[end_states]\nv_minus = {}\nv_plus = {}\nu_minus = {}\nu_plus = {}\n",
            f(e.v_minus),
            f(e.v_plus),
            f(e.u_minus),
            f(e.u_plus)
        );
        let g = &self.grid;
        out += &format!(
            "\n[grid]\nhalf_length = {}\nn_cells = {}\nboundary = \"{}\"\n",
            f(g.half_length),
            g.n_cells,
            boundary_name(g.boundary)
        );
        let t = &self.time;
        out += &format!(
            "\n[time]\nt_final = {}\ncfl = {}\nsnapshot_stride = {}\n",
            f(t.t_final),
            f(t.cfl),
            f(t.snapshot_stride)
        );
        let i = &self.init;
        out += &format!(
            "\n[init]\nkind = \"{}\"\namplitude = {}\nwidth = {}\ncenter = {}\nvelocity_amplitude = {}\nprofile_mass = {}\n",
            kind_name(i.kind),
            f(i.amplitude),
            f(i.width),
            f(i.center),
            f(i.velocity_amplitude),
            f(i.profile_mass)
        );
        let p = &self.profile;
        out += &format!(
            "\n[profile]\nxi_max = {}\nn_nodes = {}\ntol = {}\nmollifier_width = {}\nmollifier_center = {}\n",
            f(p.xi_max),
            p.n_nodes,
            f(p.tol),
            f(p.mollifier_width),
            f(p.mollifier_center)
        );
        let v = &self.verify;
        out += &format!("\n[verify]\ngamma_w = {}\n", f(v.gamma_w));
        if let Some(lo) = v.fit_window_lo {
            out += &format!("fit_window_lo = {}\n", f(lo));
        }
        if let Some(hi) = v.fit_window_hi {
            out += &format!("fit_window_hi = {}\n", f(hi));
        }
        if !v.tolerances.is_empty() {
            out += "\n[verify.tolerances]\n";
            for (k, tol) in &v.tolerances {
                out += &format!("{k} = {}\n", f(*tol));
            }
        }
        let o = &self.output;
        out += &format!(
            "\n[output]\ndirectory = {}\nstride = {}\n",
            Value::String(o.directory.clone()),
            o.stride
        );
        out
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.emit().as_bytes()))
    }
}
