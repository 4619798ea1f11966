use std::collections::VecDeque;
use std::path::Path;

use super::energy::{energy_functional, Case, EnergyParts, EnergySeries};
use super::forcing::{forcing_f, forcing_g, ForcingNorms};
use super::norms::{linf, sq_l2};
use super::phi::{deviations, stencil};
use crate::error::{Error, Result};
use crate::math::quad::{centered_difference, cumulative_trapezoid, three_point_derivative, trapezoid};
use crate::models::{FlowState, Grid1D, PressureLaw};
use crate::profiles::{Profile, ReferenceSolution};

const HEAD: [&str; 8] = ["t", "L2_v_err", "Linf_v_err", "L2_u_err", "L2_phi", "L2_phix", "L2_phit", "L2_phixx"];
const F_COLUMNS: [&str; 4] = ["F_norm", "Fx_norm", "Ft_norm", "Ftx_norm"];
const G_COLUMNS: [&str; 3] = ["G_norm", "Gt_norm", "Gtx_norm"];
const TAIL: [&str; 5] = ["E_energy", "mass_defect", "E_integral", "delta_sup", "flux_mismatch"];

/// Column names of a series for `case`, in file order.
pub fn series_columns(case: Case) -> Vec<String> {
    let forcing: &[&str] = match case {
        Case::ConstState => &F_COLUMNS,
        Case::Similarity => &G_COLUMNS,
    };
    HEAD.iter().chain(forcing).chain(TAIL.iter()).map(|s| s.to_string()).collect()
}

/// Per-snapshot diagnostics, one row per snapshot time.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsSeries {
    pub case: Case,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// `key=value` header records.
    pub meta: Vec<(String, String)>,
}

impl DiagnosticsSeries {
    pub fn new(case: Case) -> Self {
        Self {
            case,
            columns: series_columns(case),
            rows: Vec::new(),
            meta: vec![("case".into(), case.name().into())],
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Schema(format!("series has no column {name:?}")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    /// Times strictly increasing and every norm non-negative.
    pub fn check_invariants(&self) -> Result<()> {
        let mut problems = Vec::new();
        let t = self.times();
        if let Some(k) = t.windows(2).position(|w| !(w[1] > w[0])) {
            problems.push(format!("times not strictly increasing at row {}", k + 1));
        }
        for (j, name) in self.columns.iter().enumerate() {
            if name == "t" || name == "mass_defect" || name == "flux_mismatch" {
                continue;
            }
            if let Some(k) = self.rows.iter().position(|r| !(r[j] >= 0.0)) {
                problems.push(format!("column {name} is negative or NaN at row {k}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out += &format!("# {k}={v}\n");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        let body = w.into_inner().map_err(|e| Error::Data(e.to_string()))?;
        out += &String::from_utf8(body).map_err(|e| Error::Data(e.to_string()))?;
        Ok(out)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()?).map_err(|e| Error::io(path, e))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let meta: Vec<(String, String)> = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .filter_map(|l| l.trim().split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let columns: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
        if columns.first().map(String::as_str) != Some("t") {
            return Err(Error::Schema("first series column must be t".into()));
        }
        let case = match meta.iter().find(|(k, _)| k == "case") {
            Some((_, v)) => v.parse().map_err(|_| Error::Schema(format!("unknown case {v:?}")))?,
            None if columns.iter().any(|c| c == "G_norm") => Case::Similarity,
            None => Case::ConstState,
        };
        let mut rows = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::Schema(format!("row {k}: {e}")))?;
            if row.len() != columns.len() {
                return Err(Error::Schema(format!("row {k} has {} fields, header has {}", row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Self { case, columns, rows, meta })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }
}

struct Window {
    t: f64,
    phi: Vec<f64>,
    phi_x: Vec<f64>,
    phi_t: Vec<f64>,
}

/// Builds a [`DiagnosticsSeries`] one snapshot at a time, keeping only the
/// three snapshots needed for `phi_tt`.
pub struct SeriesBuilder {
    reference: ReferenceSolution,
    law: PressureLaw,
    grid: Grid1D,
    case: Case,
    gamma_w: f64,
    delta_1: f64,
    with_forcing: bool,
    series: DiagnosticsSeries,
    window: VecDeque<Window>,
    parts: Vec<(f64, EnergyParts)>,
    reference_mass_0: Option<f64>,
    count: usize,
}

impl SeriesBuilder {
    pub fn new(reference: ReferenceSolution, law: PressureLaw, grid: Grid1D, gamma_w: f64, delta_1: f64) -> Self {
        let case = if reference.profile.is_similarity() { Case::Similarity } else { Case::ConstState };
        Self {
            reference,
            law,
            grid,
            case,
            gamma_w,
            delta_1,
            with_forcing: true,
            series: DiagnosticsSeries::new(case),
            window: VecDeque::with_capacity(3),
            parts: Vec::new(),
            reference_mass_0: None,
            count: 0,
        }
    }

    /// Skip the closed-form forcing columns (left at zero).
    pub fn without_forcing(mut self) -> Self {
        self.with_forcing = false;
        self
    }

    pub fn case(&self) -> Case {
        self.case
    }

    fn forcing_norms(&self, t: f64) -> Result<ForcingNorms> {
        if !self.with_forcing {
            return Ok(ForcingNorms::default());
        }
        let corr = &self.reference.correction;
        let fields = match &self.reference.profile {
            Profile::Diffusion(w) => forcing_f(t, &self.grid, w, corr, &self.law)?,
            Profile::Similarity(p) => forcing_g(t, &self.grid, p, corr, &self.law)?,
        };
        Ok(fields.norms(self.grid.dx()))
    }

    /// Record one snapshot; `boundary_flux` is the accumulated boundary flux of `v` since `t = 0`.
    pub fn push(&mut self, state: &FlowState, boundary_flux: f64) -> Result<()> {
        if state.len() != self.grid.n_cells() {
            return Err(Error::State(format!(
                "snapshot has {} cells, grid has {}",
                state.len(),
                self.grid.n_cells()
            )));
        }
        if let Some(last) = self.series.rows.last() {
            if !(state.t > last[0]) {
                return Err(Error::Data(format!("snapshot time {} does not increase", state.t)));
            }
        }
        let dx = self.grid.dx();
        let sample = self.reference.sample(state.t, &self.grid);
        let (phi_x, phi_t) = deviations(state, &sample);
        let phi = cumulative_trapezoid(&phi_x, dx);
        let v_err: Vec<f64> = state.v.iter().zip(&sample.v_profile).map(|(v, p)| v - p).collect();
        let reference_mass: f64 = sample.v_profile.iter().zip(&sample.v_hat).map(|(a, b)| a + b).sum::<f64>() * dx;
        let m0 = *self.reference_mass_0.get_or_insert(reference_mass);
        let forcing = self.forcing_norms(state.t)?;

        let mut row = vec![
            state.t,
            sq_l2(&v_err, dx).sqrt(),
            linf(&v_err),
            sq_l2(&phi_t, dx).sqrt(),
            sq_l2(&phi, dx).sqrt(),
            sq_l2(&phi_x, dx).sqrt(),
            sq_l2(&phi_t, dx).sqrt(),
            sq_l2(&centered_difference(&phi_x, dx), dx).sqrt(),
        ];
        match self.case {
            Case::ConstState => row.extend([forcing.value, forcing.x, forcing.t, forcing.tx]),
            Case::Similarity => row.extend([forcing.value, forcing.t, forcing.tx]),
        }
        row.extend([
            0.0,
            trapezoid(&phi_x, dx),
            0.0,
            0.0,
            boundary_flux - (reference_mass - m0),
        ]);
        self.series.rows.push(row);

        if self.window.len() == 3 {
            self.window.pop_front();
        }
        self.window.push_back(Window { t: state.t, phi, phi_x, phi_t });
        self.count += 1;
        match self.count {
            3 => {
                self.finalize(0)?;
                self.finalize(1)?;
            }
            n if n > 3 => self.finalize(1)?,
            _ => {}
        }
        Ok(())
    }

    /// Energy parts of the window entry `at`, using all three window entries.
    fn finalize(&mut self, at: usize) -> Result<()> {
        let ts = [0, 1, 2].map(|j| self.window[j].t);
        let n = self.grid.n_cells();
        let phi_tt: Vec<f64> = (0..n)
            .map(|i| three_point_derivative(ts, [0, 1, 2].map(|j| self.window[j].phi_t[i]), at))
            .collect();
        let w = &self.window[at];
        let parts = EnergyParts::compute(&w.phi, &w.phi_x, &w.phi_t, &phi_tt, self.grid.dx());
        self.parts.push((w.t, parts));
        Ok(())
    }

    /// Close the series: last `phi_tt`, energy columns and metadata.
    pub fn finish(mut self) -> Result<(DiagnosticsSeries, EnergySeries)> {
        let dx = self.grid.dx();
        if self.count >= 3 {
            let (_, at) = stencil(&[0.0; 3], 2);
            self.finalize(at)?;
        } else {
            // too few snapshots for phi_tt: evaluate without it
            for w in &self.window {
                let zeros = vec![0.0; w.phi.len()];
                let mut p = EnergyParts::compute(&w.phi, &w.phi_x, &w.phi_t, &zeros, dx);
                p.phitt2 = 0.0;
                p.phittx2 = 0.0;
                self.parts.push((w.t, p));
            }
            self.series.set_meta("phi_tt", "unavailable");
        }
        let energy = energy_functional(&self.parts, self.case, self.gamma_w, self.delta_1)?;
        let [je, ji, jd] = ["E_energy", "E_integral", "delta_sup"].map(|c| self.series.column_index(c).unwrap());
        for (k, row) in self.series.rows.iter_mut().enumerate() {
            row[je] = energy.e[k];
            row[ji] = energy.e_integral[k];
            row[jd] = energy.delta_sup[k];
        }
        let s = &mut self.series;
        s.set_meta("energy_family", energy.family.name());
        s.set_meta("delta_1", format!("{:?}", energy.delta_1));
        s.set_meta("I0", format!("{:?}", energy.i0));
        s.set_meta("delta_cap", format!("{:?}", energy.delta_cap()));
        if self.case == Case::Similarity {
            s.set_meta("gamma_w", format!("{:?}", self.gamma_w));
        }
        Ok((self.series, energy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::DampingField;
    use crate::profiles::{CorrectionFunction, DiffusionWave, Mollifier};

    fn reference() -> ReferenceSolution {
        ReferenceSolution::new(
            Profile::Diffusion(DiffusionWave::new(1.0, 2.0, 0.3).unwrap()),
            CorrectionFunction::new(Mollifier::default(), 0.0, 0.1, DampingField::constant(1.0).unwrap()),
        )
    }

    fn exact(r: &ReferenceSolution, t: f64, grid: &Grid1D) -> FlowState {
        let s = r.sample(t, grid);
        let v = s.v_profile.iter().zip(&s.v_hat).map(|(a, b)| a + b).collect();
        let u = s.u_profile.iter().zip(&s.u_hat).map(|(a, b)| a + b).collect();
        FlowState::new(t, v, u).unwrap()
    }

    #[test]
    fn columns_follow_case() {
        let c = series_columns(Case::ConstState);
        assert_eq!(c[..14].join(","), "t,L2_v_err,Linf_v_err,L2_u_err,L2_phi,L2_phix,L2_phit,L2_phixx,F_norm,Fx_norm,Ft_norm,Ftx_norm,E_energy,mass_defect");
        let g = series_columns(Case::Similarity);
        assert!(g.contains(&"G_norm".to_string()) && !g.contains(&"F_norm".to_string()));
    }

    #[test]
    fn exact_reference_has_zero_energy() {
        let grid = Grid1D::new(40.0, 800).unwrap();
        let r = reference();
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        let mut b = SeriesBuilder::new(r.clone(), law, grid, 0.75, 0.1);
        for k in 0..6 {
            b.push(&exact(&r, k as f64 * 0.5, &grid), 0.0).unwrap();
        }
        let (s, e) = b.finish().unwrap();
        assert_eq!(s.len(), 6);
        assert!(e.e.iter().all(|&v| v.abs() < 1e-20));
        assert_eq!(e.i0, 0.1);
        s.check_invariants().unwrap();
        let ff = s.column("F_norm").unwrap();
        assert!(ff.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn single_snapshot_series() {
        let grid = Grid1D::new(40.0, 400).unwrap();
        let r = reference();
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        let mut b = SeriesBuilder::new(r.clone(), law, grid, 0.75, 0.0).without_forcing();
        b.push(&exact(&r, 0.0, &grid), 0.0).unwrap();
        let (s, _) = b.finish().unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.meta("phi_tt"), Some("unavailable"));
    }

    #[test]
    fn csv_round_trip() {
        let mut s = DiagnosticsSeries::new(Case::Similarity);
        s.rows.push((0..s.columns.len()).map(|k| k as f64 * 0.1).collect());
        s.rows.push((0..s.columns.len()).map(|k| 1.0 + k as f64 / 3.0).collect());
        s.set_meta("config_hash", "abc");
        let back = DiagnosticsSeries::from_csv_str(&s.to_csv_string().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(matches!(back.column("F_norm"), Err(Error::Schema(_))));
    }

    #[test]
    fn phi_tt_matches_windowed_differences() {
        // phi_t = exp(-t) g(x) with u_hat = 0 and U = 0 gives phi_tt = -exp(-t) g
        let grid = Grid1D::new(10.0, 400).unwrap();
        let r = ReferenceSolution::new(
            Profile::Diffusion(DiffusionWave::new(1.0, 2.0, 0.0).unwrap()),
            CorrectionFunction::new(Mollifier::default(), 0.0, 0.0, DampingField::constant(1.0).unwrap()),
        );
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        let g = grid.sample(|x| (-x * x).exp());
        let dt = 0.01;
        let mut b = SeriesBuilder::new(r, law, grid, 0.75, 0.0).without_forcing();
        for k in 0..5 {
            let t = k as f64 * dt;
            let u = g.iter().map(|v| (-t).exp() * v).collect();
            b.push(&FlowState::new(t, vec![1.0; 400], u).unwrap(), 0.0).unwrap();
        }
        let parts = b.parts.clone();
        assert_eq!(parts.len(), 4);
        let norm_g2 = sq_l2(&g, grid.dx());
        for (t, p) in &parts {
            let exact = (-2.0 * t).exp() * norm_g2;
            assert!((p.phitt2 - exact).abs() < 1e-3 * exact, "t = {t}");
        }
    }
}
