//! Job files: the JSON description of a ring, a filtration family, windows,
//! weight vectors, and optional toric blocks that every command consumes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use multirees::filtration::QuotientRing;
use multirees::gradedla::{DegreeSlice, SliceFrame, SparseVec};
use multirees::polycore::{parse_polynomial, parse_rat};
use multirees::rees::SubspaceWindow;
use multirees::toric::ToricModel;
use multirees::{
    Budget, FiltrationFamily, Ideal, IndexWindow, LatticeBox, PolyRing, Polynomial, Rational,
    ReesWindow, TermOrder, ToricDivisor, WeightVector,
};

use crate::Failure;

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RingSpec {
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct WindowSpec {
    #[serde(rename = "N")]
    pub degree_bound: u64,
    #[serde(rename = "W")]
    pub bounds: Vec<u64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct MultSpec {
    pub pairs: usize,
    pub max_degree: u64,
    pub bounds: Vec<u64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RawCell {
    pub n: u64,
    pub m: Vec<u64>,
    pub ncols: u32,
    pub rows: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct RawTable {
    pub rank: usize,
    pub cells: Vec<RawCell>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum BoxSpec {
    Symmetric(i64),
    Explicit { lo: Vec<i64>, hi: Vec<i64> },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ToricSpec {
    pub rays: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlattice: Option<Vec<Vec<String>>>,
    pub divisors: Vec<Vec<i64>>,
    pub alphas: Vec<Vec<i64>>,
    pub lambdas: Vec<i64>,
    #[serde(rename = "box")]
    pub bounds: BoxSpec,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct JobSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub cutters: Vec<String>,
    #[serde(default)]
    pub alphas: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_degree: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult: Option<MultSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toric: Option<ToricSpec>,
    #[serde(default)]
    pub seed: u64,
}

impl JobSpec {
    pub fn from_text(text: &str) -> Result<JobSpec, Failure> {
        serde_json::from_str(text)
            .map_err(|e| Failure::Input(format!("malformed job file: {e}")))
    }

    /// The spec with every applied default made explicit, for the report echo.
    pub fn resolved(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("job specs serialize");
        let object = value.as_object_mut().expect("job spec is an object");
        object.insert("seed".into(), json!(self.seed));
        value
    }

    pub fn ring(&self) -> Result<Arc<PolyRing>, Failure> {
        let spec = self
            .ring
            .as_ref()
            .ok_or_else(|| Failure::Input("job is missing the `ring` block".into()))?;
        let vars: Vec<&str> = spec.vars.iter().map(|s| s.as_str()).collect();
        let ring = match &spec.grading {
            None => PolyRing::new(&vars)?,
            Some(grading) => PolyRing::with_grading(&vars, grading)?,
        };
        Ok(ring)
    }

    pub fn relations(&self, ring: &Arc<PolyRing>) -> Result<Vec<Polynomial>, Failure> {
        let mut out = Vec::with_capacity(self.relations.len());
        for text in &self.relations {
            out.push(parse_polynomial(ring, text)?);
        }
        Ok(out)
    }

    pub fn ideal(&self, ring: &Arc<PolyRing>) -> Result<Ideal, Failure> {
        Ok(Ideal::new(ring, self.relations(ring)?)?)
    }

    /// Fill derivable defaults so the report echo is self-describing: the
    /// domain-test degree from the window, and the initial-ideal weight from
    /// alphas[0] when every cutter is a plain variable.
    pub fn normalize(&mut self) {
        if self.domain_degree.is_none() {
            if let Some(window) = &self.window {
                self.domain_degree = Some((window.degree_bound / 2).min(2));
            }
        }
        if self.weight.is_none() && !self.cutters.is_empty() {
            let (Ok(ring), Some(alpha)) = (self.ring(), self.alphas.first()) else {
                return;
            };
            if alpha.len() != self.cutters.len() {
                return;
            }
            let mut entries = vec![0i64; ring.num_vars()];
            for (cutter, &weight) in self.cutters.iter().zip(alpha) {
                match ring.vars().iter().position(|v| v == cutter) {
                    Some(position) => entries[position] = weight,
                    None => return,
                }
            }
            self.weight = Some(entries);
        }
    }

    pub fn weight(&self, ring: &Arc<PolyRing>) -> Result<WeightVector, Failure> {
        let entries = self
            .weight
            .as_ref()
            .ok_or_else(|| Failure::Input("job is missing the `weight` vector".into()))?;
        if entries.len() != ring.num_vars() {
            return Err(Failure::Input(format!(
                "weight vector has {} entries for {} variables",
                entries.len(),
                ring.num_vars()
            )));
        }
        Ok(WeightVector::from_ints(entries)?)
    }

    pub fn family(&self, budget: &Budget) -> Result<FiltrationFamily, Failure> {
        let ring = self.ring()?;
        let ideal = self.ideal(&ring)?;
        let quotient = QuotientRing::new(ideal, TermOrder::GrevLex, budget)?;
        if self.cutters.is_empty() {
            return Err(Failure::Input("job declares no cutters".into()));
        }
        let mut cutters = Vec::with_capacity(self.cutters.len());
        for text in &self.cutters {
            cutters.push(parse_polynomial(&ring, text)?);
        }
        Ok(FiltrationFamily::new(quotient, cutters, budget)?)
    }

    pub fn window(&self) -> Result<&WindowSpec, Failure> {
        self.window
            .as_ref()
            .ok_or_else(|| Failure::Input("job is missing the `window` block".into()))
    }

    pub fn rees_window(&self, budget: &Budget) -> Result<ReesWindow, Failure> {
        let family = self.family(budget)?;
        let window = self.window()?;
        Ok(ReesWindow::build(
            &family,
            window.degree_bound,
            IndexWindow::new(window.bounds.clone())?,
            budget,
        )?)
    }

    /// Injected subspace table with anonymous coordinates, for the synthetic
    /// flatness path.
    pub fn raw_window(&self, budget: &Budget) -> Result<SubspaceWindow, Failure> {
        let raw = self
            .raw
            .as_ref()
            .ok_or_else(|| Failure::Input("job is missing the `raw` table".into()))?;
        let window = self.window()?;
        let mut cells = Vec::with_capacity(raw.cells.len());
        for cell in &raw.cells {
            let slice = DegreeSlice::from_rows(
                SliceFrame::Anonymous { ncols: cell.ncols },
                cell.rows.iter().map(|r| SparseVec::from_ints(r)),
                budget,
            )?;
            cells.push((cell.n, cell.m.clone(), slice));
        }
        Ok(SubspaceWindow::from_raw(
            raw.rank,
            window.degree_bound,
            IndexWindow::new(window.bounds.clone())?,
            cells,
            budget,
        )?)
    }

    pub fn weight_vectors(&self) -> Result<Vec<WeightVector>, Failure> {
        if self.alphas.is_empty() {
            return Err(Failure::Input("job lists no `alphas`".into()));
        }
        let mut out = Vec::with_capacity(self.alphas.len());
        for entries in &self.alphas {
            out.push(WeightVector::from_ints(entries)?);
        }
        Ok(out)
    }

    pub fn toric(&self) -> Result<&ToricSpec, Failure> {
        self.toric
            .as_ref()
            .ok_or_else(|| Failure::Input("job is missing the `toric` block".into()))
    }
}

impl ToricSpec {
    pub fn model(&self) -> Result<ToricModel, Failure> {
        match &self.overlattice {
            None => Ok(ToricModel::new(self.rays.clone())?),
            Some(rows) => {
                let mut generators: Vec<Vec<Rational>> = Vec::with_capacity(rows.len());
                for row in rows {
                    let mut entries = Vec::with_capacity(row.len());
                    for text in row {
                        entries.push(parse_rat(text)?);
                    }
                    generators.push(entries);
                }
                Ok(ToricModel::with_overlattice(self.rays.clone(), generators)?)
            }
        }
    }

    pub fn divisors(&self) -> Vec<ToricDivisor> {
        self.divisors
            .iter()
            .map(|c| ToricDivisor::new(c.clone()))
            .collect()
    }

    pub fn weight_vectors(&self) -> Result<Vec<WeightVector>, Failure> {
        let mut out = Vec::with_capacity(self.alphas.len());
        for entries in &self.alphas {
            out.push(WeightVector::from_ints(entries)?);
        }
        Ok(out)
    }

    pub fn lattice_box(&self, rank: usize) -> Result<LatticeBox, Failure> {
        match &self.bounds {
            BoxSpec::Symmetric(b) => Ok(LatticeBox::symmetric(rank, *b)),
            BoxSpec::Explicit { lo, hi } => Ok(LatticeBox::new(lo.clone(), hi.clone())?),
        }
    }
}
