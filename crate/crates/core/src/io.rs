//! JSON file formats.
//!
//! Full state: `{ "n_sites": N, "local_dim": K, "amps": [[re, im], ...] }` in
//! basis-index order. Compressed symmetric state:
//! `{ "n_sites": N, "local_dim": K, "convention": "unnormalized",
//!    "coeffs": [ { "occ": [n_1, ..., n_K], "c": [re, im] }, ... ] }` in
//! canonical occupation order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{Classification, SymClassification, SymVerdict, Verdict};
use crate::error::{Error, Result};
use crate::symmetric::{SymStateCompressed, SymmetricBasis};
use crate::tensor::{ProductFactors, StateVector};

pub const UNNORMALIZED: &str = "unnormalized";

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn complex([re, im]: [f64; 2]) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n_sites: usize,
    pub local_dim: usize,
    pub amps: Vec<[f64; 2]>,
}

impl From<&StateVector> for StateFile {
    fn from(psi: &StateVector) -> Self {
        StateFile {
            n_sites: psi.n_sites(),
            local_dim: psi.local_dim(),
            amps: psi.amps().iter().copied().map(pair).collect(),
        }
    }
}

impl TryFrom<StateFile> for StateVector {
    type Error = Error;

    fn try_from(file: StateFile) -> Result<StateVector> {
        StateVector::new(file.n_sites, file.local_dim, file.amps.into_iter().map(complex).collect())
            .map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffEntry {
    pub occ: Vec<usize>,
    pub c: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymStateFile {
    pub n_sites: usize,
    pub local_dim: usize,
    pub convention: String,
    pub coeffs: Vec<CoeffEntry>,
}

impl From<&SymStateCompressed> for SymStateFile {
    fn from(sym: &SymStateCompressed) -> Self {
        let basis = sym.basis();
        SymStateFile {
            n_sites: sym.n_sites(),
            local_dim: sym.local_dim(),
            convention: UNNORMALIZED.to_string(),
            coeffs: basis
                .occupations()
                .iter()
                .zip(sym.coeffs())
                .map(|(occ, &c)| CoeffEntry { occ: occ.counts().to_vec(), c: pair(c) })
                .collect(),
        }
    }
}

impl TryFrom<SymStateFile> for SymStateCompressed {
    type Error = Error;

    fn try_from(file: SymStateFile) -> Result<SymStateCompressed> {
        if file.convention != UNNORMALIZED {
            return Err(Error::Format(format!("unsupported convention {:?}", file.convention)));
        }
        let basis = SymmetricBasis::new(file.n_sites, file.local_dim).map_err(|e| Error::Format(e.to_string()))?;
        if file.coeffs.len() != basis.dim() {
            return Err(Error::Format(format!("expected {} coefficients, got {}", basis.dim(), file.coeffs.len())));
        }
        let mut coeffs = Vec::with_capacity(basis.dim());
        for (expected, entry) in basis.occupations().iter().zip(file.coeffs) {
            if entry.occ != expected.counts() {
                return Err(Error::Format(format!(
                    "occupation {:?} out of canonical order (expected {expected})",
                    entry.occ
                )));
            }
            coeffs.push(complex(entry.c));
        }
        SymStateCompressed::new(file.n_sites, file.local_dim, coeffs)
    }
}

/// Either file kind, told apart by its fields.
#[derive(Debug)]
pub enum AnyState {
    Full(StateVector),
    Symmetric(SymStateCompressed),
}

pub fn parse_any(text: &str) -> Result<AnyState> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("amps").is_some() {
        let file: StateFile = serde_json::from_value(value)?;
        Ok(AnyState::Full(file.try_into()?))
    } else if value.get("coeffs").is_some() {
        let file: SymStateFile = serde_json::from_value(value)?;
        Ok(AnyState::Symmetric(file.try_into()?))
    } else {
        Err(Error::Format("neither \"amps\" nor \"coeffs\" present".into()))
    }
}

pub fn state_to_json(psi: &StateVector) -> String {
    serde_json::to_string_pretty(&StateFile::from(psi)).expect("state serializes")
}

pub fn state_from_json(text: &str) -> Result<StateVector> {
    let file: StateFile = serde_json::from_str(text)?;
    file.try_into()
}

pub fn sym_to_json(sym: &SymStateCompressed) -> String {
    serde_json::to_string_pretty(&SymStateFile::from(sym)).expect("state serializes")
}

pub fn sym_from_json(text: &str) -> Result<SymStateCompressed> {
    let file: SymStateFile = serde_json::from_str(text)?;
    file.try_into()
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ClassificationReport {
    pub verdict: String,
    pub defect: f64,
    pub factors: Option<Vec<Vec<[f64; 2]>>>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chart: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<Vec<[f64; 2]>>,
}

fn factor_pairs(factors: &ProductFactors) -> Vec<Vec<[f64; 2]>> {
    factors.factors().iter().map(|f| f.iter().copied().map(pair).collect()).collect()
}

impl ClassificationReport {
    pub fn from_full(cls: &Classification, tolerance: f64) -> Self {
        ClassificationReport {
            verdict: match cls.verdict {
                Verdict::Product => "product",
                Verdict::Entangled => "entangled",
            }
            .to_string(),
            defect: cls.defect,
            factors: cls.factors.as_ref().map(factor_pairs),
            tolerance,
            chart: None,
            tau: None,
        }
    }

    pub fn from_symmetric(cls: &SymClassification, n_sites: usize, tolerance: f64) -> Self {
        let (verdict, chart, tau) = match &cls.verdict {
            SymVerdict::Coherent { params, chart } => {
                ("product", Some(*chart), Some(params.tau().iter().copied().map(pair).collect()))
            }
            SymVerdict::Entangled => ("entangled", None, None),
        };
        let factors = cls.site_state().map(|site| vec![site.into_iter().map(pair).collect(); n_sites]);
        ClassificationReport { verdict: verdict.to_string(), defect: cls.defect, factors, tolerance, chart, tau }
    }

    pub fn is_product(&self) -> bool {
        self.verdict == "product"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_file_rejects_wrong_length() {
        let text = r#"{"n_sites": 2, "local_dim": 2, "amps": [[1,0],[0,0],[0,0]]}"#;
        assert!(matches!(state_from_json(text), Err(Error::Format(_))));
    }

    #[test]
    fn state_file_field_names() {
        let psi = StateVector::basis(&[1, 2], 2).unwrap();
        let value: serde_json::Value = serde_json::from_str(&state_to_json(&psi)).unwrap();
        assert_eq!(value["n_sites"], 2);
        assert_eq!(value["local_dim"], 2);
        assert_eq!(value["amps"][1], serde_json::json!([1.0, 0.0]));
        assert_eq!(state_from_json(&state_to_json(&psi)).unwrap(), psi);
    }

    #[test]
    fn sym_file_layout() {
        let sym = SymStateCompressed::new(2, 2, vec![Complex64::new(0.5, 0.0); 3]).unwrap();
        let value: serde_json::Value = serde_json::from_str(&sym_to_json(&sym)).unwrap();
        assert_eq!(value["convention"], "unnormalized");
        assert_eq!(value["coeffs"][0]["occ"], serde_json::json!([2, 0]));
        assert_eq!(value["coeffs"][2]["occ"], serde_json::json!([0, 2]));
        assert_eq!(sym_from_json(&sym_to_json(&sym)).unwrap(), sym);
    }

    #[test]
    fn sym_file_rejects_bad_order_and_convention() {
        let text = r#"{"n_sites":1,"local_dim":2,"convention":"unnormalized",
            "coeffs":[{"occ":[0,1],"c":[1,0]},{"occ":[1,0],"c":[0,0]}]}"#;
        assert!(matches!(sym_from_json(text), Err(Error::Format(_))));
        let text = r#"{"n_sites":1,"local_dim":2,"convention":"orthonormal",
            "coeffs":[{"occ":[1,0],"c":[1,0]},{"occ":[0,1],"c":[0,0]}]}"#;
        assert!(matches!(sym_from_json(text), Err(Error::Format(_))));
    }

    #[test]
    fn parse_any_dispatch() {
        let psi = StateVector::basis(&[1], 2).unwrap();
        assert!(matches!(parse_any(&state_to_json(&psi)).unwrap(), AnyState::Full(_)));
        let sym = SymStateCompressed::zeros(1, 2).unwrap();
        assert!(matches!(parse_any(&sym_to_json(&sym)).unwrap(), AnyState::Symmetric(_)));
        assert!(parse_any("{\"n_sites\": 1").is_err());
        assert!(parse_any("{}").is_err());
    }
}
