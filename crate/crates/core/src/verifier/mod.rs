//! Numerical reconstruction of the isoperimetric argument: center selection,
//! orthogonalized trial functions, the main inequality and the intermediate
//! integral estimates, collected into a JSON report.

mod chain;
mod lemmas;
mod main_ineq;
mod trial;

pub use chain::{ball_integrals, check_chain, check_chain_annulus, mesh_integrals, polygon_area, BallIntegrals, ChainInputs};
pub use lemmas::{check_lemmas, LemmaGrids};
pub use main_ineq::{check_main_inequality, MainInequality};
pub use trial::{orthogonalize, select_center, trial_bound_check, trial_functions, CenterResult, Orthogonalization, TrialSetup};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// How `lhs` and `rhs` are meant to compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs`, margin `rhs − lhs`.
    Le,
    /// `lhs ≥ rhs`, margin `lhs − rhs`.
    Ge,
    /// `lhs = rhs` within `tol`, margin `lhs − rhs`.
    Eq,
}

/// Where the eigenvalues behind a check came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Fem,
    AnnulusCandidate,
    Ball,
    Radial,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A candidate-spectrum check that did not pass; says nothing about the claim.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckInputs {
    pub space: String,
    pub domain_hash: String,
    pub h: Option<f64>,
    pub solver_tags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub claim: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed margin, positive when the claim holds with room to spare,
    /// divided by `scale`.
    pub margin: f64,
    /// Normalization applied to the margin (1 for absolute margins).
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
    pub status: Status,
    pub provenance: Provenance,
    pub inputs: CheckInputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: impl Into<String>,
        claim: impl Into<String>,
        relation: Relation,
        lhs: f64,
        rhs: f64,
        scale: f64,
        tol: f64,
        provenance: Provenance,
        inputs: &CheckInputs,
    ) -> Self {
        let raw = match relation {
            Relation::Le => rhs - lhs,
            Relation::Ge | Relation::Eq => lhs - rhs,
        };
        let margin = raw / scale;
        let pass = match relation {
            Relation::Eq => margin.abs() <= tol,
            _ => margin >= -tol,
        } && margin.is_finite();
        let status = if pass {
            Status::Pass
        } else if provenance == Provenance::AnnulusCandidate {
            Status::Inconclusive
        } else {
            Status::Fail
        };
        Self {
            id: id.into(),
            claim: claim.into(),
            relation,
            lhs,
            rhs,
            margin,
            scale,
            tol,
            pass,
            status,
            provenance,
            inputs: inputs.clone(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

impl Summary {
    pub fn of(checks: &[Check]) -> Self {
        let mut s = Summary::default();
        for c in checks {
            match c.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Inconclusive => s.inconclusive += 1,
            }
        }
        s
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.inconclusive == 0
    }
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn content_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
