use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Diffusivity, SimilarityProfile};
use crate::error::{Error, Result};
use crate::models::PressureLaw;

impl SimilarityProfile {
    /// `# key=value` metadata followed by `xi,V,dV,residual`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let mut meta = vec![
            ("v_minus", format!("{:?}", self.v_minus())),
            ("v_plus", format!("{:?}", self.v_plus())),
            ("xi_max", format!("{:?}", self.xi_max())),
            ("n_nodes", self.n_nodes().to_string()),
            ("x0", format!("{:?}", self.x0())),
            ("boundary_mismatch", format!("{:e}", self.boundary_mismatch())),
        ];
        match *self.diffusivity() {
            Diffusivity::Pressure { law, alpha_bar } => {
                meta.push(("diffusivity", "pressure".into()));
                meta.push(("p_ref", format!("{:?}", law.p_ref())));
                meta.push(("gamma_p", format!("{:?}", law.gamma_p())));
                meta.push(("alpha_bar", format!("{:?}", alpha_bar)));
            }
            Diffusivity::Constant(mu) => {
                meta.push(("diffusivity", "constant".into()));
                meta.push(("mu", format!("{:?}", mu)));
            }
        }
        for (k, v) in meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str("xi,V,dV,residual\n");
        for i in 0..self.n_nodes() {
            out.push_str(&format!(
                "{:?},{:?},{:?},{:e}\n",
                self.node(i),
                self.values()[i],
                self.slopes()[i],
                self.residual()[i]
            ));
        }
        out
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn import(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut meta = BTreeMap::new();
        for line in text.lines().filter_map(|l| l.strip_prefix('#')) {
            if let Some((k, v)) = line.trim().split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let num = |key: &str| -> Result<f64> {
            meta.get(key)
                .ok_or_else(|| Error::Schema(format!("profile metadata lacks `{key}`")))?
                .parse::<f64>()
                .map_err(|e| Error::Schema(format!("profile metadata `{key}`: {e}")))
        };
        let diffusivity = match meta.get("diffusivity").map(String::as_str) {
            Some("pressure") => Diffusivity::Pressure {
                law: PressureLaw::new(num("p_ref")?, num("gamma_p")?)?,
                alpha_bar: num("alpha_bar")?,
            },
            Some("constant") => Diffusivity::Constant(num("mu")?),
            other => return Err(Error::Schema(format!("unknown diffusivity kind {other:?}"))),
        };

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("profile table lacks column `{name}`")))
        };
        let (iv, idv) = (col("V")?, col("dV")?);
        let mut values = Vec::new();
        let mut slopes = Vec::new();
        for record in reader.records() {
            let record = record?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .unwrap_or("")
                    .parse()
                    .map_err(|e| Error::Data(format!("bad profile entry: {e}")))
            };
            values.push(field(iv)?);
            slopes.push(field(idv)?);
        }
        let expected = num("n_nodes")? as usize;
        if values.len() != expected {
            return Err(Error::Data(format!(
                "profile table has {} rows, metadata says {expected}",
                values.len()
            )));
        }
        let mut profile =
            SimilarityProfile::from_table(diffusivity, num("v_minus")?, num("v_plus")?, num("xi_max")?, values, slopes)?
                .with_shift(num("x0")?);
        if let Ok(m) = num("boundary_mismatch") {
            profile.set_boundary_mismatch(m);
        }
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::super::SimilarityOptions;
    use super::*;

    #[test]
    fn csv_round_trip() {
        let law = PressureLaw::new(1.0, 2.0).unwrap();
        let p = SimilarityProfile::solve(
            Diffusivity::Pressure { law, alpha_bar: 1.0 },
            1.0,
            1.1,
            SimilarityOptions {
                n_nodes: 257,
                ..SimilarityOptions::default()
            },
        )
        .unwrap()
        .with_shift(0.25);
        let back = SimilarityProfile::from_csv_str(&p.to_csv_string()).unwrap();
        assert_eq!(back.values(), p.values());
        assert_eq!(back.slopes(), p.slopes());
        assert_eq!(back.x0(), 0.25);
        assert_eq!(back.diffusivity(), p.diffusivity());
        assert!(SimilarityProfile::from_csv_str("xi,V\n0,1\n").is_err());
    }
}
