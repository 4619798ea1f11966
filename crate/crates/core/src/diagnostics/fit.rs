use crate::error::{Error, Result};

/// Least-squares fit of `ln y` against `ln(1 + t)`; returns `(slope, intercept, r^2)`.
pub fn fit_power_law(ts: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if ts.len() != ys.len() {
        return Err(Error::Argument(format!("{} times but {} values", ts.len(), ys.len())));
    }
    if ts.len() < 2 {
        return Err(Error::InsufficientData("a fit needs at least 2 samples".into()));
    }
    if let Some(bad) = ys.iter().find(|y| !(**y > 0.0 && y.is_finite())) {
        return Err(Error::Data(format!("non-positive or non-finite value {bad} in fit window")));
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln_1p()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ls.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ls) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Data("all fit times coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok((slope, intercept, r2))
}

/// Fitted power law `y ~ exp(intercept) (1 + t)^slope` of one series column.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub column: String,
    pub window: (f64, f64),
    pub n_samples: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub const MIN_FIT_SAMPLES: usize = 10;

/// Fit `values` over the samples with `t` in `window`. The window must start at
/// `max(1, t_final / 10)` or later and hold at least ten positive samples.
pub fn decay_fit(column: &str, ts: &[f64], values: &[f64], window: (f64, f64)) -> Result<DecayFit> {
    if ts.len() != values.len() {
        return Err(Error::Argument(format!("{} times but {} values", ts.len(), values.len())));
    }
    let (lo, hi) = window;
    let t_final = ts.last().copied().unwrap_or(0.0);
    let earliest = (t_final / 10.0).max(1.0);
    if !(lo >= earliest) || !(hi > lo) {
        return Err(Error::Argument(format!(
            "fit window [{lo}, {hi}] must satisfy {earliest} <= lo < hi"
        )));
    }
    let (wt, wy): (Vec<f64>, Vec<f64>) = ts
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if wt.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "column {column}: {} samples in [{lo}, {hi}], need {MIN_FIT_SAMPLES}",
            wt.len()
        )));
    }
    let (slope, intercept, r_squared) =
        fit_power_law(&wt, &wy).map_err(|e| match e {
            Error::Data(m) => Error::Data(format!("column {column}: {m}")),
            other => other,
        })?;
    Ok(DecayFit {
        column: column.to_string(),
        window,
        n_samples: wt.len(),
        slope,
        intercept,
        r_squared,
    })
}

/// Expected bound on a fitted slope: pass iff `slope <= expected + tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    pub column: String,
    pub slope: f64,
    pub tol: f64,
}

impl Expectation {
    pub fn new(column: impl Into<String>, slope: f64, tol: f64) -> Self {
        Self {
            column: column.into(),
            slope,
            tol,
        }
    }

    pub fn passes(&self, fit: &DecayFit) -> bool {
        fit.slope <= self.slope + self.tol
    }
}

impl std::str::FromStr for Expectation {
    type Err = Error;

    /// `column=slope:tol`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("expectation {s:?} is not of the form column=slope:tol"));
        let (column, rest) = s.split_once('=').ok_or_else(bad)?;
        let (slope, tol) = rest.split_once(':').ok_or_else(bad)?;
        let slope: f64 = slope.trim().parse().map_err(|_| bad())?;
        let tol: f64 = tol.trim().parse().map_err(|_| bad())?;
        if column.trim().is_empty() || !(tol >= 0.0) {
            return Err(bad());
        }
        Ok(Self::new(column.trim(), slope, tol))
    }
}

/// One verdict line.
#[derive(Clone, Debug, PartialEq)]
pub struct FitVerdict {
    pub fit: DecayFit,
    pub expected: Expectation,
    pub pass: bool,
}

/// Plain-text table of verdicts.
pub fn format_report(verdicts: &[FitVerdict]) -> String {
    let mut out = format!(
        "{:<14} {:>10} {:>10} {:>8} {:>8} {:>10} {:>10}  verdict\n",
        "column", "slope", "bound", "r2", "samples", "window_lo", "window_hi"
    );
    for v in verdicts {
        out += &format!(
            "{:<14} {:>10.4} {:>10.4} {:>8.4} {:>8} {:>10.3} {:>10.3}  {}\n",
            v.fit.column,
            v.fit.slope,
            v.expected.slope + v.expected.tol,
            v.fit.r_squared,
            v.fit.n_samples,
            v.fit.window.0,
            v.fit.window.1,
            if v.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

/// Machine-readable `column,slope,r2,window_lo,window_hi,pass`.
pub fn write_report_csv<W: std::io::Write>(verdicts: &[FitVerdict], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["column", "slope", "r2", "window_lo", "window_hi", "pass"])?;
    for v in verdicts {
        w.write_record([
            v.fit.column.clone(),
            format!("{:?}", v.fit.slope),
            format!("{:?}", v.fit.r_squared),
            format!("{:?}", v.fit.window.0),
            format!("{:?}", v.fit.window.1),
            v.pass.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<report>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn pure_power_law_is_exact() {
        let ts = grid(0.0, 400.0, 401);
        let ys: Vec<f64> = ts.iter().map(|t| (1.0 + t).powf(-0.5)).collect();
        let fit = decay_fit("y", &ts, &ys, (40.0, 400.0)).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let ys: Vec<f64> = ts.iter().map(|t| 7.0 * (1.0 + t).powf(-1.37)).collect();
        let fit = decay_fit("y", &ts, &ys, (40.0, 400.0)).unwrap();
        assert!((fit.slope + 1.37).abs() < 1e-12);
        assert!((fit.intercept - 7f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn oscillating_perturbation() {
        let ts = grid(0.0, 400.0, 801);
        let ys: Vec<f64> = ts.iter().map(|t| 3.0 / (1.0 + t) * (1.0 + 0.01 * t.sin())).collect();
        let fit = decay_fit("y", &ts, &ys, (40.0, 400.0)).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.02);
    }

    #[test]
    fn window_rules() {
        let ts = grid(0.0, 400.0, 401);
        let ys: Vec<f64> = ts.iter().map(|t| 1.0 / (1.0 + t)).collect();
        assert!(matches!(decay_fit("y", &ts, &ys, (10.0, 400.0)), Err(Error::Argument(_))));
        assert!(matches!(decay_fit("y", &ts, &ys, (40.0, 45.0)), Err(Error::InsufficientData(_))));
        let mut zeros = ys.clone();
        zeros[100] = 0.0;
        assert!(matches!(decay_fit("y", &ts, &zeros, (40.0, 400.0)), Err(Error::Data(_))));
    }

    #[test]
    fn expectation_parsing() {
        let e: Expectation = "L2_v_err=-0.5:0.15".parse().unwrap();
        assert_eq!(e, Expectation::new("L2_v_err", -0.5, 0.15));
        assert!("L2_v_err=-0.5".parse::<Expectation>().is_err());
        assert!("=1:0".parse::<Expectation>().is_err());
    }

    #[test]
    fn report_csv_header() {
        let fit = DecayFit {
            column: "c".into(),
            window: (1.0, 2.0),
            n_samples: 10,
            slope: -1.0,
            intercept: 0.0,
            r_squared: 1.0,
        };
        let v = FitVerdict { fit, expected: Expectation::new("c", -1.0, 0.1), pass: true };
        let mut buf = Vec::new();
        write_report_csv(&[v.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("column,slope,r2,window_lo,window_hi,pass\n"));
        assert!(format_report(&[v]).contains("PASS"));
    }
}
