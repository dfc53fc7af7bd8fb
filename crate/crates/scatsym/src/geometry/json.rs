use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::expr::Expr;

use super::{Chart, Graded, GeometryError, Side};

/// On-disk form: `{ chart, degree, terms: [{k, coeff, index}] }`, with
/// coefficients as S-expressions and indices as coordinate names.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormFile {
    pub chart: Chart,
    pub degree: usize,
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermFile {
    pub k: i64,
    pub coeff: Expr,
    pub index: Vec<String>,
}

impl<S: Side> Graded<S> {
    pub fn to_file(&self) -> FormFile {
        let chart = self.chart();
        FormFile {
            chart: (**chart).clone(),
            degree: self.degree(),
            terms: self
                .terms()
                .iter()
                .map(|((idx, k), c)| TermFile {
                    k: *k,
                    coeff: c.clone(),
                    index: idx.iter().map(|i| chart.name_of(*i).to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &FormFile) -> Result<Self, GeometryError> {
        file.chart.validate()?;
        let chart = Arc::new(file.chart.clone());
        let mut out = Self::zero(&chart, file.degree);
        for t in &file.terms {
            if t.index.len() != file.degree {
                return Err(GeometryError::DegreeMismatch(t.index.len(), file.degree));
            }
            let names: Vec<&str> = t.index.iter().map(String::as_str).collect();
            out = out.add(&Self::monomial(&chart, t.k, t.coeff.clone(), &names)?)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("form serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, GeometryError> {
        let file: FormFile =
            serde_json::from_str(s).map_err(|e| GeometryError::Expr(crate::expr::ExprError::Parse(e.to_string())))?;
        Self::from_file(&file)
    }
}
