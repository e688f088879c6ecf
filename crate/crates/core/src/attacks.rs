//! Executable attacks against [`crate::prmkr`].
//!
//! Attacks I and II are offline keyword guessing: given only public data, a
//! candidate `w*` is accepted for an index entry iff
//! `e(C1, g) = e(g^{H(w*)}, PK_DO)` and for a trapdoor entry iff
//! `e(T1, g) = e(g^{H(w*)}, PK_U)`. The left side is paired once per target
//! and every candidate costs one more pairing, so a scan over a dictionary of
//! size `D` evaluates exactly `1 + D` pairings per target. All satisfying
//! candidates are reported, not just the first.

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::group::{exp, pair, pair_prepared, target_equal, GroupElement, PreparedElement, Scalar};
use crate::prmkr::{
    decrypt_document, index_gen, search, trapdoor_gen, Ciphertext, EncryptedIndex, KeywordUniverse,
    OwnerKeyMaterial, OwnerPublicKey, Postings, PublicParams, RPolicy, SchemeError, Trapdoor,
    UserKeyMaterial, UserPublicKey,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AttackError {
    #[error("no key in public parameters")]
    NoKeyInPublicParams,
    #[error("dictionary contains {0:?} twice")]
    DuplicateCandidate(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttackId {
    #[serde(rename = "I")]
    IndexKeywordGuess,
    #[serde(rename = "II")]
    TrapdoorKeywordGuess,
    #[serde(rename = "III-case1")]
    SharedRForgery,
    #[serde(rename = "III-case2")]
    MismatchedR,
    #[serde(rename = "IV")]
    PublicKeyDecrypt,
}

/// Candidate keywords for a guessing attack, without duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dictionary {
    words: Vec<String>,
}

impl Dictionary {
    pub fn new<I, S>(words: I) -> Result<Self, AttackError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        let mut seen = HashSet::with_capacity(words.len());
        for w in &words {
            if !seen.insert(w.as_str()) {
                return Err(AttackError::DuplicateCandidate(w.clone()));
            }
        }
        Ok(Dictionary { words })
    }

    /// One candidate per non-empty line, surrounding whitespace trimmed.
    pub fn from_lines(text: &str) -> Result<Self, AttackError> {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Hashes every candidate into `g^{H(w*)}` once, so the table can be
    /// reused across any number of targets.
    pub fn prepare(&self, params: &PublicParams) -> PreparedDictionary {
        let candidates = self
            .words
            .iter()
            .map(|w| (w.clone(), exp(params.g(), &params.hash_keyword(w))))
            .collect();
        PreparedDictionary {
            params_g: *params.g(),
            candidates,
        }
    }
}

/// A dictionary with each candidate lifted to `g^{H(w*)}`.
pub struct PreparedDictionary {
    params_g: GroupElement,
    candidates: Vec<(String, GroupElement)>,
}

impl PreparedDictionary {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetOutcome {
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
    /// Recovered values; empty when nothing was recovered.
    pub recovered: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackReport {
    pub attack: AttackId,
    /// Whether the vulnerability was demonstrated.
    pub succeeded: bool,
    pub targets: Vec<TargetOutcome>,
    pub candidates_tested: u64,
    pub pairings_evaluated: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<u64>,
    /// Named boolean observations backing the verdict.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub findings: BTreeMap<String, bool>,
    /// Wall time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl AttackReport {
    /// A report with nothing recorded yet.
    pub fn empty(attack: AttackId) -> Self {
        AttackReport {
            attack,
            succeeded: false,
            targets: Vec::new(),
            candidates_tested: 0,
            pairings_evaluated: 0,
            trials: None,
            matches: None,
            findings: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn recovered_count(&self) -> usize {
        self.targets.iter().map(|t| t.recovered.len()).sum()
    }
}

/// Scans the dictionary against one target component: the left pairing
/// `e(component, g)` is computed once, each candidate costs one pairing
/// against the prepared public key.
fn scan(
    component: &GroupElement,
    public_key: &GroupElement,
    dict: &PreparedDictionary,
    report: &mut AttackReport,
) -> Vec<String> {
    let left = pair(component, &dict.params_g);
    let prepared = PreparedElement::new(public_key);
    report.pairings_evaluated += 1;
    let mut hits = Vec::new();
    for (word, lifted) in &dict.candidates {
        let right = pair_prepared(lifted, &prepared);
        report.pairings_evaluated += 1;
        report.candidates_tested += 1;
        if target_equal(&left, &right) {
            hits.push(word.clone());
        }
    }
    hits
}

/// Attack I: recover indexed keywords from `C1` and the owner's public key.
pub fn attack_index_kga(
    index: &EncryptedIndex,
    owner_pub: &OwnerPublicKey,
    dict: &PreparedDictionary,
) -> AttackReport {
    let start = Instant::now();
    let mut report = AttackReport::empty(AttackId::IndexKeywordGuess);
    for (&position, entry) in &index.entries {
        let mut outcome = TargetOutcome {
            target: format!("index[{position}].C1"),
            position: Some(position),
            ..Default::default()
        };
        match owner_pub.pk_at(position) {
            Ok(pk) => outcome.recovered = scan(&entry.c1, pk, dict, &mut report),
            Err(e) => outcome.error = Some(e.to_string()),
        }
        report.targets.push(outcome);
    }
    report.succeeded = report.recovered_count() > 0;
    report.elapsed = start.elapsed();
    report
}

/// Attack II: recover queried keywords from `T1` and the user's public key.
pub fn attack_trapdoor_kga(
    trapdoor: &Trapdoor,
    user_pub: &UserPublicKey,
    dict: &PreparedDictionary,
) -> AttackReport {
    let start = Instant::now();
    let mut report = AttackReport::empty(AttackId::TrapdoorKeywordGuess);
    for (&position, entry) in &trapdoor.entries {
        let mut outcome = TargetOutcome {
            target: format!("trapdoor[{position}].T1"),
            position: Some(position),
            ..Default::default()
        };
        match user_pub.pk_at(position) {
            Ok(pk) => outcome.recovered = scan(&entry.t1, pk, dict, &mut report),
            Err(e) => outcome.error = Some(e.to_string()),
        }
        report.targets.push(outcome);
    }
    report.succeeded = report.recovered_count() > 0;
    report.elapsed = start.elapsed();
    report
}

/// Attack III, case 1: a user who was handed the owner's `r_i` builds a
/// trapdoor for any keyword on their own, without the owner taking part.
///
/// Besides the forged search, the report records that `C2 = PK_U^{r_i}` and
/// `T2 = PK_DO^{r_i}` are recomputable from public keys plus `r_i`, and that
/// the search then reduces to `e(C1, PK_U) = e(T1, PK_DO)`.
pub fn demo_shared_r_forgery(
    params: &PublicParams,
    universe: &KeywordUniverse,
    r_i: &Scalar,
    owner_pub: &OwnerPublicKey,
    malicious_user: &UserKeyMaterial,
    forged_keyword: &str,
    index: &EncryptedIndex,
) -> Result<AttackReport, AttackError> {
    let start = Instant::now();
    let mut report = AttackReport::empty(AttackId::SharedRForgery);
    let forged = trapdoor_gen(
        params,
        universe,
        &[forged_keyword],
        &malicious_user.secret,
        owner_pub,
        r_i,
    )?;
    let result = search(index, &forged)?;
    report.pairings_evaluated += 2 * result.positions.len() as u64;

    let mut c2_public = true;
    let mut t2_public = true;
    let mut reduced_agrees = true;
    for (&position, t) in &forged.entries {
        let pk_owner = owner_pub.pk_at(position)?;
        t2_public &= t.t2 == exp(pk_owner, r_i);
        let Some(c) = index.entries.get(&position) else {
            continue;
        };
        let pk_user = malicious_user.public.pk_at(position)?;
        c2_public &= c.c2 == exp(pk_user, r_i);
        let reduced = target_equal(&pair(&c.c1, pk_user), &pair(&t.t1, pk_owner));
        report.pairings_evaluated += 2;
        reduced_agrees &= reduced == result.positions[&position];
    }

    report.targets.push(TargetOutcome {
        target: format!("forged trapdoor for {forged_keyword:?}"),
        position: forged.entries.keys().next().copied(),
        recovered: if result.matched {
            vec![forged_keyword.to_string()]
        } else {
            Vec::new()
        },
        error: None,
    });
    report
        .findings
        .insert("forged_search_matched".into(), result.matched);
    report
        .findings
        .insert("c2_recomputable_from_public".into(), c2_public);
    report
        .findings
        .insert("t2_recomputable_from_public".into(), t2_public);
    report
        .findings
        .insert("reduced_equation_agrees".into(), reduced_agrees);
    report.trials = Some(1);
    report.matches = Some(u64::from(result.matched));
    report.succeeded = result.matched;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Trapdoor randomness used by [`demo_mismatched_r_failure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrapdoorRandomness {
    /// A fresh `r*` per trial, independent of the owner's `r_i`.
    Independent,
    /// `r* = r_i` (control).
    EqualToOwner,
}

/// Attack III, case 2: the index uses the owner's `r_i`, the trapdoor an
/// independent `r*` for the same keyword. The success verdict means the
/// correctness failure was demonstrated: zero matches over all trials.
#[allow(clippy::too_many_arguments)]
pub fn demo_mismatched_r_failure<R: RngCore + CryptoRng + ?Sized>(
    params: &PublicParams,
    universe: &KeywordUniverse,
    owner: &OwnerKeyMaterial,
    user: &UserKeyMaterial,
    keyword: &str,
    trials: u64,
    randomness: TrapdoorRandomness,
    rng: &mut R,
) -> Result<AttackReport, AttackError> {
    let start = Instant::now();
    let mut report = AttackReport::empty(AttackId::MismatchedR);
    let postings: Postings = [(keyword.to_string(), Default::default())].into();
    let index = index_gen(
        params,
        universe,
        &postings,
        &owner.secret,
        &user.public,
        RPolicy::OwnerShared,
        rng,
    )?;
    let position = universe.position(keyword)?;
    let mut matches = 0u64;
    let mut exponents_differ = true;
    for _ in 0..trials {
        let r_star = match randomness {
            TrapdoorRandomness::Independent => Scalar::random_nonzero(rng),
            TrapdoorRandomness::EqualToOwner => owner.secret.r,
        };
        let td = trapdoor_gen(
            params,
            universe,
            &[keyword],
            &user.secret,
            &owner.public,
            &r_star,
        )?;
        let result = search(&index, &td)?;
        report.pairings_evaluated += 2;
        if result.matched {
            matches += 1;
        } else {
            let c = &index.entries[&position];
            let t = &td.entries[&position];
            let lhs = pair(&c.c1, &c.c2).transcript();
            let rhs = pair(&t.t1, &t.t2).transcript();
            if let (Some(a), Some(b)) = (lhs, rhs) {
                exponents_differ &= a != b;
            }
        }
    }
    report.targets.push(TargetOutcome {
        target: format!("keyword {keyword:?}"),
        position: Some(position),
        recovered: Vec::new(),
        error: None,
    });
    report.trials = Some(trials);
    report.matches = Some(matches);
    if params.g().transcript().is_some() {
        report.findings.insert(
            "failed_trials_have_distinct_exponents".into(),
            exponents_differ,
        );
    }
    report.succeeded = trials > 0 && matches == 0;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Result of [`attack_public_key_decrypt`]: the report plus every recovered
/// plaintext, `None` where decryption failed.
#[derive(Clone, Debug)]
pub struct KeyRecovery {
    pub report: AttackReport,
    pub plaintexts: Vec<Option<Vec<u8>>>,
}

/// Attack IV: decrypt documents with the key published in the parameters.
pub fn attack_public_key_decrypt(
    params: &PublicParams,
    ciphertexts: &[Ciphertext],
) -> Result<KeyRecovery, AttackError> {
    let start = Instant::now();
    let key = params
        .doc_key
        .as_ref()
        .ok_or(AttackError::NoKeyInPublicParams)?;
    let mut report = AttackReport::empty(AttackId::PublicKeyDecrypt);
    let mut plaintexts = Vec::with_capacity(ciphertexts.len());
    for (i, ct) in ciphertexts.iter().enumerate() {
        let mut outcome = TargetOutcome {
            target: format!("ciphertext[{i}]"),
            ..Default::default()
        };
        match decrypt_document(key, ct) {
            Ok(pt) => {
                outcome.recovered = vec![format!("sha256:{}", hex::encode(Sha256::digest(&pt)))];
                plaintexts.push(Some(pt));
            }
            Err(e) => {
                outcome.error = Some(e.to_string());
                plaintexts.push(None);
            }
        }
        report.targets.push(outcome);
    }
    report.candidates_tested = ciphertexts.len() as u64;
    report.succeeded = plaintexts.iter().any(Option::is_some);
    report.elapsed = start.elapsed();
    Ok(KeyRecovery { report, plaintexts })
}
