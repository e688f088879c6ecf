//! One-shot end-to-end run: setup, key ceremony, ingestion, a legitimate
//! search and all four attacks, summarized as a pass/fail matrix.
//!
//! The report is a pure function of the seed.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::{
    attack_index_kga, attack_public_key_decrypt, attack_trapdoor_kga, demo_mismatched_r_failure,
    demo_shared_r_forgery, AttackError, AttackId, AttackReport, Dictionary, TrapdoorRandomness,
};
use crate::group::Scalar;
use crate::hardened::{h_enroll_owner, h_keygen_user, h_search, h_setup, h_trapdoor_gen};
use crate::prmkr::{
    index_gen, keygen_owner, keygen_user, search, setup, trapdoor_gen, Ciphertext, DocId, DocKey,
    KeywordUniverse, OwnerId, Postings, RPolicy, SchemeError, SecurityLevel, SetupConfig, UserId,
};
use crate::store::{doc_id, ingest, retrieve, Document, DocumentRecord, IngestScheme, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

pub const DEMO_SCHEMA: &str = "kga-lab/demo-v1";

/// Keyword universe of the fixture corpus.
pub const FIXTURE_UNIVERSE: [&str; 8] = [
    "invoice", "salary", "tax", "audit", "payroll", "contract", "merger", "lawsuit",
];

const DEMO_DICTIONARY_SIZE: usize = 256;
const DEMO_TRIALS: u64 = 10;
const QUERY_KEYWORD: &str = "salary";
const FORGED_KEYWORD: &str = "merger";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemoMode {
    Vulnerable,
    Hardened,
    Both,
}

/// The fixed document collection used by the demo and the examples.
pub fn fixture_corpus() -> Vec<Document> {
    let docs: [(&str, &[&str]); 5] = [
        ("Q3 invoice batch for ACME, net 30.", &["invoice", "tax"]),
        (
            "Salary bands and payroll calendar 2024.",
            &["salary", "payroll"],
        ),
        (
            "Draft merger agreement, strictly confidential.",
            &["merger", "contract"],
        ),
        (
            "Annual audit findings: payroll tax discrepancies.",
            &["audit", "tax", "payroll", "salary"],
        ),
        (
            "Pending lawsuit over contract breach.",
            &["lawsuit", "contract"],
        ),
    ];
    docs.iter()
        .map(|(text, kws)| Document {
            plaintext: text.as_bytes().to_vec(),
            keywords: kws.iter().map(|k| k.to_string()).collect(),
        })
        .collect()
}

/// `size` candidates: the fixture universe followed by synthetic filler.
pub fn fixture_dictionary(size: usize) -> Dictionary {
    let words = FIXTURE_UNIVERSE
        .iter()
        .map(|w| w.to_string())
        .chain((0..).map(|i| format!("term-{i:04}")))
        .take(size);
    Dictionary::new(words).expect("fixture words are distinct")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoMatrix {
    pub legitimate_search: bool,
    pub attack_i: bool,
    pub attack_ii: bool,
    /// `None` when the run does not hand `r_i` to users.
    pub attack_iii_case1: Option<bool>,
    /// Correctness failure under mismatched randomness demonstrated.
    pub attack_iii_case2: bool,
    pub attack_iv: bool,
}

impl DemoMatrix {
    fn expected(mode: DemoMode) -> DemoMatrix {
        let vulnerable = mode == DemoMode::Vulnerable;
        DemoMatrix {
            legitimate_search: true,
            attack_i: vulnerable,
            attack_ii: vulnerable,
            attack_iii_case1: vulnerable.then_some(true),
            attack_iii_case2: true,
            attack_iv: vulnerable,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoRun {
    pub mode: DemoMode,
    pub matrix: DemoMatrix,
    pub expectations_met: bool,
    pub retrieved_documents: usize,
    pub reports: Vec<AttackReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack_iv_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoReport {
    pub schema: String,
    pub seed: u64,
    pub runs: Vec<DemoRun>,
}

impl DemoReport {
    pub fn all_expectations_met(&self) -> bool {
        self.runs.iter().all(|r| r.expectations_met)
    }
}

fn plaintext_oracle(corpus: &[Document], keyword: &str) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = corpus
        .iter()
        .filter(|d| d.keywords.iter().any(|k| k == keyword))
        .map(|d| d.plaintext.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn sorted_plaintexts(found: Vec<(DocId, Vec<u8>)>) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = found.into_iter().map(|(_, p)| p).collect();
    out.sort();
    out
}

fn ciphertexts(records: &[DocumentRecord]) -> Vec<Ciphertext> {
    records.iter().map(|r| r.ciphertext.clone()).collect()
}

fn run_vulnerable(rng: &mut ChaCha20Rng) -> Result<DemoRun, DemoError> {
    let params = setup(SetupConfig::default(), rng);
    let universe = KeywordUniverse::new(FIXTURE_UNIVERSE)?;
    let owner = keygen_owner(&params, OwnerId(1), &universe, rng)?;
    let user = keygen_user(&params, UserId(1), universe.len(), rng)?;
    let insider = keygen_user(&params, UserId(2), universe.len(), rng)?;
    let corpus = fixture_corpus();

    let (records, index) = ingest(
        &params,
        &universe,
        &corpus,
        &owner.secret,
        &user.public,
        IngestScheme::Vulnerable,
        rng,
    )?;
    let key = params.doc_key.clone().expect("vulnerable params carry k");

    // The published trapdoor algorithm takes r_i as input.
    let trapdoor = trapdoor_gen(
        &params,
        &universe,
        &[QUERY_KEYWORD],
        &user.secret,
        &owner.public,
        &owner.secret.r,
    )?;
    let result = search(&index, &trapdoor)?;
    let found = retrieve(&result, &records, &key).unwrap_or_default();
    let retrieved = found.len();
    let legitimate =
        result.matched && sorted_plaintexts(found) == plaintext_oracle(&corpus, QUERY_KEYWORD);

    let dict = fixture_dictionary(DEMO_DICTIONARY_SIZE).prepare(&params);
    let r1 = attack_index_kga(&index, &owner.public, &dict);
    let r2 = attack_trapdoor_kga(&trapdoor, &user.public, &dict);

    let insider_postings: Postings = index
        .entries
        .iter()
        .map(|(p, e)| {
            (
                universe.keyword(*p).expect("indexed position").to_string(),
                e.postings.clone(),
            )
        })
        .collect();
    let insider_index = index_gen(
        &params,
        &universe,
        &insider_postings,
        &owner.secret,
        &insider.public,
        RPolicy::OwnerShared,
        rng,
    )?;
    let r3 = demo_shared_r_forgery(
        &params,
        &universe,
        &owner.secret.r,
        &owner.public,
        &insider,
        FORGED_KEYWORD,
        &insider_index,
    )?;
    let r4 = demo_mismatched_r_failure(
        &params,
        &universe,
        &owner,
        &user,
        QUERY_KEYWORD,
        DEMO_TRIALS,
        TrapdoorRandomness::Independent,
        rng,
    )?;
    let recovery = attack_public_key_decrypt(&params, &ciphertexts(&records))?;
    let all_recovered = recovery
        .plaintexts
        .iter()
        .zip(&records)
        .all(|(p, r)| p.as_ref().is_some_and(|p| doc_id(p) == r.id));

    let matrix = DemoMatrix {
        legitimate_search: legitimate,
        attack_i: r1.succeeded,
        attack_ii: r2.succeeded,
        attack_iii_case1: Some(r3.succeeded),
        attack_iii_case2: r4.succeeded,
        attack_iv: recovery.report.succeeded && all_recovered,
    };
    Ok(DemoRun {
        mode: DemoMode::Vulnerable,
        expectations_met: matrix == DemoMatrix::expected(DemoMode::Vulnerable),
        matrix,
        retrieved_documents: retrieved,
        reports: vec![r1, r2, r3, r4, recovery.report],
        attack_iv_error: None,
    })
}

fn run_hardened(rng: &mut ChaCha20Rng) -> Result<DemoRun, DemoError> {
    let (params, mut msk) = h_setup(SecurityLevel::Bits128, false, rng);
    let universe = KeywordUniverse::new(FIXTURE_UNIVERSE)?;
    let owner = keygen_owner(&params, OwnerId(1), &universe, rng)?;
    msk.register_owner(&owner.secret);
    let user = h_keygen_user(&msk, &params, UserId(1), universe.len(), rng)?;
    let credential = h_enroll_owner(&msk, &owner.public)?;
    let doc_key = DocKey::random(rng);
    let corpus = fixture_corpus();
    let alpha = msk.alpha_share();

    let (records, index) = ingest(
        &params,
        &universe,
        &corpus,
        &owner.secret,
        &user.public,
        IngestScheme::Hardened {
            alpha: &alpha,
            doc_key: &doc_key,
        },
        rng,
    )?;

    let trapdoor = h_trapdoor_gen(&params, &universe, &[QUERY_KEYWORD], &user, &credential)?;
    let result = h_search(&index, &trapdoor)?;
    let found = retrieve(&result, &records, &doc_key).unwrap_or_default();
    let retrieved = found.len();
    let legitimate =
        result.matched && sorted_plaintexts(found) == plaintext_oracle(&corpus, QUERY_KEYWORD);

    let dict = fixture_dictionary(DEMO_DICTIONARY_SIZE).prepare(&params);
    let r1 = attack_index_kga(&index, &owner.public, &dict);
    let r2 = attack_trapdoor_kga(&trapdoor, &user.public, &dict);

    // Mismatched randomness: the authority's registry holds a different r*
    // than the one folded into the index.
    let mut mismatched = 0u64;
    for _ in 0..DEMO_TRIALS {
        let mut rogue = msk.clone();
        let mut other = owner.secret.clone();
        other.r = Scalar::random_nonzero(rng);
        rogue.register_owner(&other);
        let cred = h_enroll_owner(&rogue, &owner.public)?;
        let td = h_trapdoor_gen(&params, &universe, &[QUERY_KEYWORD], &user, &cred)?;
        if h_search(&index, &td)?.matched {
            mismatched += 1;
        }
    }
    let mut r4 = AttackReport::empty(AttackId::MismatchedR);
    r4.trials = Some(DEMO_TRIALS);
    r4.matches = Some(mismatched);
    r4.pairings_evaluated = 2 * DEMO_TRIALS;
    r4.succeeded = mismatched == 0;

    let (attack_iv, attack_iv_error) =
        match attack_public_key_decrypt(&params, &ciphertexts(&records)) {
            Ok(rec) => (rec.report.succeeded, None),
            Err(e) => (false, Some(e.to_string())),
        };

    let matrix = DemoMatrix {
        legitimate_search: legitimate,
        attack_i: r1.succeeded,
        attack_ii: r2.succeeded,
        attack_iii_case1: None,
        attack_iii_case2: r4.succeeded,
        attack_iv,
    };
    Ok(DemoRun {
        mode: DemoMode::Hardened,
        expectations_met: matrix == DemoMatrix::expected(DemoMode::Hardened),
        matrix,
        retrieved_documents: retrieved,
        reports: vec![r1, r2, r4],
        attack_iv_error,
    })
}

pub fn run_demo(mode: DemoMode, seed: u64) -> Result<DemoReport, DemoError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut runs = Vec::new();
    if matches!(mode, DemoMode::Vulnerable | DemoMode::Both) {
        runs.push(run_vulnerable(&mut rng)?);
    }
    if matches!(mode, DemoMode::Hardened | DemoMode::Both) {
        runs.push(run_hardened(&mut rng)?);
    }
    Ok(DemoReport {
        schema: DEMO_SCHEMA.to_string(),
        seed,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vulnerable_matrix() {
        let report = run_demo(DemoMode::Vulnerable, 1).unwrap();
        let run = &report.runs[0];
        assert_eq!(run.matrix, DemoMatrix::expected(DemoMode::Vulnerable));
        assert!(run.expectations_met);
        assert_eq!(run.retrieved_documents, 2);
    }

    #[test]
    fn hardened_matrix() {
        let report = run_demo(DemoMode::Hardened, 1).unwrap();
        let run = &report.runs[0];
        assert_eq!(run.matrix, DemoMatrix::expected(DemoMode::Hardened));
        assert_eq!(
            run.attack_iv_error.as_deref(),
            Some("no key in public parameters")
        );
    }

    #[test]
    fn fixture_dictionary_has_requested_size() {
        let d = fixture_dictionary(300);
        assert_eq!(d.len(), 300);
        assert_eq!(d.words()[0], "invoice");
        assert_eq!(fixture_dictionary(3).len(), 3);
    }
}
