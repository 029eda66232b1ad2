//! Code records: everything needed to rebuild and re-check an EACWS code,
//! plus the shipped fixtures.

use serde::{Deserialize, Serialize};

use crate::construction::{
    build_encoding_map, encoded_generators, EncodingMap, GeneratorSet, GraphFile, GraphSpec,
};
use crate::effective::{build_error_catalog, correctable_error_set, ErrorCatalog};
use crate::equivalence::{CheckMatrix, CheckMatrixFile};
use crate::error::{Error, Result};
use crate::kl::{
    apply_word_operators, base_state, certify_distance, encode_state, gram_deviation, kl_check,
    DistanceReport, KLViolation, MAX_DENSE_QUBITS,
};
use crate::pauli::{PauliOperator, QubitLayout};
use crate::search::{
    build_conflict_set, build_degenerate_safe_conflict_set, verify_code, ClassicalCode,
    ConflictSet, Violation,
};
use crate::word_ops::{word_operator_table, WordOperatorPair, WordOperatorRow};

pub const SCHEMA_VERSION: u32 = 1;

/// Which differences the classical code has to avoid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConflictModel {
    /// Pairwise differences of effective errors.
    #[default]
    Effective,
    /// Also the parity masks from errors that share an effective error.
    DegenerateSafe,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorStrings {
    pub g: Vec<String>,
    pub h: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Passed,
    Failed,
    /// Too large for the dense oracle; only the classical check ran.
    Unchecked,
}

/// Outcome of [`verify_record`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub status: Status,
    pub classical_valid: bool,
    pub classical_violation: Option<Violation>,
    /// Whether the stored word operators equal the synthesized ones up to phase.
    pub operators_match: Option<bool>,
    pub first_operator_mismatch: Option<usize>,
    pub kl_pass: Option<bool>,
    pub kl_violation: Option<KLViolation>,
    pub gram_deviation: Option<f64>,
    pub distance: Option<DistanceReport>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeRecord {
    pub schema: u32,
    pub name: String,
    pub n: usize,
    pub c: usize,
    #[serde(rename = "K")]
    pub k: usize,
    /// Target distance; the error set is every Pauli of weight up to `(d-1)/2`.
    pub d: usize,
    pub graph: GraphFile,
    pub generators: GeneratorStrings,
    pub codewords: Vec<String>,
    #[serde(default)]
    pub word_operators: Vec<WordOperatorRow>,
    #[serde(default)]
    pub conflict_model: ConflictModel,
    /// `None` when the codewords did not come from a search.
    pub exact: Option<bool>,
    /// Last verifier run; `None` means never verified.
    pub verification: Option<Verification>,
    pub provenance: String,
}

impl CodeRecord {
    pub fn layout(&self) -> Result<QubitLayout> {
        QubitLayout::new(self.n, self.c)
    }

    pub fn graph_spec(&self) -> Result<GraphSpec> {
        let g = GraphSpec::from_file(&self.graph)?;
        if g.n() != self.n {
            return Err(Error::InvalidGraph(format!(
                "graph has {} vertices, record has n={}",
                g.n(),
                self.n
            )));
        }
        Ok(g)
    }

    pub fn code(&self) -> Result<ClassicalCode> {
        let code = ClassicalCode::parse(self.n, self.n + self.c, &self.codewords)?;
        if code.k() != self.k {
            return Err(Error::Invalid(format!(
                "record says K={} but lists {} codewords",
                self.k,
                code.k()
            )));
        }
        Ok(code)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: CodeRecord =
            serde_json::from_str(text).map_err(|e| Error::parse("code record", e.to_string()))?;
        if rec.schema != SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported record schema {}",
                rec.schema
            )));
        }
        Ok(rec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    /// A record for `code` with operators synthesized and no verification yet.
    pub fn new(
        name: impl Into<String>,
        instance: &Instance,
        code: &ClassicalCode,
        exact: Option<bool>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let table = instance.word_operators(code)?;
        let (g, h) = instance.gens.strings();
        Ok(CodeRecord {
            schema: SCHEMA_VERSION,
            name: name.into(),
            n: instance.layout.n,
            c: instance.layout.c,
            k: code.k(),
            d: instance.d,
            graph: instance.graph.to_file(),
            generators: GeneratorStrings { g, h },
            codewords: code.bitstrings(),
            word_operators: table.iter().map(WordOperatorPair::row).collect(),
            conflict_model: instance.model,
            exact,
            verification: None,
            provenance: provenance.into(),
        })
    }
}

/// The objects derived from `(n, c, graph, d)`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub layout: QubitLayout,
    pub graph: GraphSpec,
    pub d: usize,
    pub model: ConflictModel,
    pub gens: GeneratorSet,
    pub map: EncodingMap,
    pub catalog: ErrorCatalog,
    pub conflicts: ConflictSet,
}

impl Instance {
    pub fn new(layout: QubitLayout, graph: GraphSpec, d: usize, model: ConflictModel) -> Result<Self> {
        if graph.n() != layout.n {
            return Err(Error::InvalidGraph(format!(
                "graph has {} vertices for n={}",
                graph.n(),
                layout.n
            )));
        }
        if d == 0 {
            return Err(Error::Invalid("distance must be at least 1".into()));
        }
        let gens = encoded_generators(layout, &graph)?;
        let map = build_encoding_map(layout, &graph)?;
        let catalog = build_error_catalog(layout, &gens, &correctable_error_set(layout, d))?;
        let conflicts = match model {
            ConflictModel::Effective => build_conflict_set(&catalog)?,
            ConflictModel::DegenerateSafe => build_degenerate_safe_conflict_set(&catalog, &gens)?,
        };
        Ok(Instance {
            layout,
            graph,
            d,
            model,
            gens,
            map,
            catalog,
            conflicts,
        })
    }

    pub fn for_record(rec: &CodeRecord) -> Result<Self> {
        Self::new(rec.layout()?, rec.graph_spec()?, rec.d, rec.conflict_model)
    }

    pub fn word_operators(&self, code: &ClassicalCode) -> Result<Vec<WordOperatorPair>> {
        word_operator_table(code, &self.gens, &self.map)
    }
}

fn operator_matches(stored: &WordOperatorRow, pair: &WordOperatorPair) -> bool {
    let layout = pair.post.layout();
    let same = |s: &str, p: &PauliOperator| {
        PauliOperator::parse_in(s, layout).is_ok_and(|q| q.eq_mod_phase(p))
    };
    same(&stored.pre, &pair.pre) && same(&stored.post, &pair.post)
}

/// Rebuilds the instance, checks the stored generators and operators against
/// fresh ones, then runs the classical check and (when small enough) the
/// dense-state oracle.
pub fn verify_record(rec: &CodeRecord) -> Result<Verification> {
    let inst = Instance::for_record(rec)?;
    let (g, h) = inst.gens.strings();
    if g != rec.generators.g || h != rec.generators.h {
        return Err(Error::Invalid(format!(
            "stored generators of {} differ from the ones the graph produces",
            rec.name
        )));
    }
    let code = rec.code()?;
    let check = verify_code(&code, &inst.conflicts)?;
    let table = inst.word_operators(&code)?;

    let (operators_match, first_operator_mismatch) = if rec.word_operators.is_empty() {
        (None, None)
    } else if rec.word_operators.len() != table.len() {
        (Some(false), Some(rec.word_operators.len().min(table.len())))
    } else {
        let bad = rec
            .word_operators
            .iter()
            .zip(&table)
            .position(|(s, p)| !operator_matches(s, p));
        (Some(bad.is_none()), bad)
    };

    let mut out = Verification {
        status: Status::Unchecked,
        classical_valid: check.valid,
        classical_violation: check.first_violation,
        operators_match,
        first_operator_mismatch,
        kl_pass: None,
        kl_violation: None,
        gram_deviation: None,
        distance: None,
    };
    if inst.layout.total() <= MAX_DENSE_QUBITS {
        let encoded = encode_state(&base_state(inst.layout)?, &inst.map)?;
        let states = apply_word_operators(&table, &encoded)?;
        let report = kl_check(&states, &correctable_error_set(inst.layout, inst.d))?;
        let distance = certify_distance(&states, inst.d)?;
        out.gram_deviation = Some(gram_deviation(&states));
        out.kl_pass = Some(report.pass);
        out.kl_violation = report.first_violation;
        let reaches_d = distance.lower_bound >= inst.d;
        out.distance = Some(distance);
        out.status = if out.classical_valid
            && report.pass
            && reaches_d
            && operators_match != Some(false)
        {
            Status::Passed
        } else {
            Status::Failed
        };
    } else if !out.classical_valid || operators_match == Some(false) {
        out.status = Status::Failed;
    }
    Ok(out)
}

/// Shipped fixtures: the three published codes.
pub const FIXTURE_RECORDS: [&str; 3] = ["paper-7-9-3-2", "paper-9-20-3-1", "paper-6-4-3-1"];

/// Shipped check matrices.
pub const FIXTURE_MATRICES: [&str; 2] = ["bowen-5-1-3", "steane-7-1-3"];

fn fixture_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "paper-7-9-3-2" => include_str!("../fixtures/paper-7-9-3-2.json"),
        "paper-9-20-3-1" => include_str!("../fixtures/paper-9-20-3-1.json"),
        "paper-6-4-3-1" => include_str!("../fixtures/paper-6-4-3-1.json"),
        "bowen-5-1-3" => include_str!("../fixtures/bowen-5-1-3.json"),
        "steane-7-1-3" => include_str!("../fixtures/steane-7-1-3.json"),
        _ => return None,
    })
}

pub fn fixture_record(name: &str) -> Result<CodeRecord> {
    match fixture_text(name) {
        Some(text) if FIXTURE_RECORDS.contains(&name) => CodeRecord::from_json(text),
        _ => Err(Error::Invalid(format!("no code fixture named {name:?}"))),
    }
}

pub fn fixture_check_matrix(name: &str) -> Result<CheckMatrix> {
    match fixture_text(name) {
        Some(text) if FIXTURE_MATRICES.contains(&name) => {
            let file: CheckMatrixFile = serde_json::from_str(text)
                .map_err(|e| Error::parse(name, e.to_string()))?;
            CheckMatrix::from_file(&file)
        }
        _ => Err(Error::Invalid(format!("no check-matrix fixture named {name:?}"))),
    }
}
