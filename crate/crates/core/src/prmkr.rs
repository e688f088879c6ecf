//! The multi-owner keyword-search scheme in its original form.
//!
//! This module deliberately keeps the scheme's weaknesses: the document key
//! lives in the public parameters, the keyword components `C1`/`T1` are built
//! from public values only, and the trapdoor needs the owner's randomness
//! `r_i`. The [`crate::attacks`] module exploits each of them.
//!
//! Keyword positions are global: a [`KeywordUniverse`] fixes the 1-based
//! position of every keyword, owner and user secrets are indexed by that
//! position, and search compares index and trapdoor entries at equal
//! positions only.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{XChaCha20Poly1305, XNonce};
use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::group::{
    exp, hash_to_scalar, pair, target_equal, GroupElement, HashSpec, Scalar, TargetElement,
    CURVE_ID, GROUP_ORDER_HEX,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("keyword universe is empty")]
    EmptyUniverse,
    #[error("keyword {0:?} appears twice in the universe")]
    DuplicateKeyword(String),
    #[error("number of queried keywords must be at least 1")]
    NoQueryPositions,
    #[error("keyword {0:?} is not part of the keyword universe")]
    UnknownKeyword(String),
    #[error("position {position} has no key material (key covers {available} positions)")]
    PositionOutOfRange { position: usize, available: usize },
    #[error("degenerate exponent: {0} is zero")]
    DegenerateExponent(&'static str),
    #[error("index is for owner {index_owner}/user {index_user}, trapdoor for owner {trapdoor_owner}/user {trapdoor_user}")]
    PartyMismatch {
        index_owner: OwnerId,
        index_user: UserId,
        trapdoor_owner: OwnerId,
        trapdoor_user: UserId,
    },
    #[error("query contains no keywords")]
    EmptyQuery,
    #[error("public parameters carry no document key")]
    MissingDocKey,
    #[error("ciphertext failed authentication")]
    Authentication,
    #[error("ciphertext too short")]
    MalformedCiphertext,
    #[error("owner {0} is not registered with the key authority")]
    UnregisteredOwner(OwnerId),
    #[error("key or credential belongs to owner {found}, expected {expected}")]
    WrongOwner { expected: OwnerId, found: OwnerId },
    #[error("unsupported public parameters: {0}")]
    UnsupportedParams(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OwnerId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(pub u32);

impl fmt::Display for OwnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Content-derived document identifier (16 hex characters).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocId(pub String);

impl fmt::Display for DocId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Keyword to posting list, the plaintext input of [`index_gen`].
pub type Postings = BTreeMap<String, BTreeSet<DocId>>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SecurityLevel {
    #[default]
    Bits128,
}

impl SecurityLevel {
    pub fn bits(self) -> u32 {
        match self {
            SecurityLevel::Bits128 => 128,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ParamsMode {
    /// Document key embedded in the public parameters.
    #[default]
    Vulnerable,
    /// No document key in the public parameters.
    Hardened,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SetupConfig {
    pub level: SecurityLevel,
    pub mode: ParamsMode,
    /// Attach exponent transcripts to the generator so every derived element
    /// can be checked with scalar arithmetic. Test use only.
    pub transcripts: bool,
}

/// 32-byte symmetric document key.
#[derive(Clone, PartialEq, Eq)]
pub struct DocKey([u8; 32]);

impl DocKey {
    pub fn random<R: RngCore + CryptoRng + ?Sized>(rng: &mut R) -> Self {
        let mut k = [0u8; 32];
        rng.fill_bytes(&mut k);
        DocKey(k)
    }

    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        DocKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Debug for DocKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DocKey(..)")
    }
}

impl Serialize for DocKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for DocKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let s = String::deserialize(d)?;
        let bytes: [u8; 32] = hex::decode(s)
            .map_err(D::Error::custom)?
            .try_into()
            .map_err(|_| D::Error::custom("document key must be 32 bytes"))?;
        Ok(DocKey(bytes))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PublicParams {
    pub curve: String,
    pub security_level: u32,
    /// Group order, big-endian hex.
    pub order: String,
    pub generator: GroupElement,
    pub hash: HashSpec,
    /// Present only in vulnerable mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_key: Option<DocKey>,
}

impl PublicParams {
    pub fn g(&self) -> &GroupElement {
        &self.generator
    }

    pub fn mode(&self) -> ParamsMode {
        if self.doc_key.is_some() {
            ParamsMode::Vulnerable
        } else {
            ParamsMode::Hardened
        }
    }

    pub fn hash_keyword(&self, keyword: &str) -> Scalar {
        hash_to_scalar(&self.hash, keyword.as_bytes())
    }

    /// Checks a deserialized parameter set against the supported group.
    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.curve != CURVE_ID {
            return Err(SchemeError::UnsupportedParams(format!(
                "curve {:?}",
                self.curve
            )));
        }
        if self.order != GROUP_ORDER_HEX {
            return Err(SchemeError::UnsupportedParams("group order".into()));
        }
        if self.security_level != SecurityLevel::Bits128.bits() {
            return Err(SchemeError::UnsupportedParams(format!(
                "security level {}",
                self.security_level
            )));
        }
        if *self.g() != GroupElement::generator() {
            return Err(SchemeError::UnsupportedParams("generator".into()));
        }
        Ok(())
    }
}

pub fn setup<R: RngCore + CryptoRng + ?Sized>(config: SetupConfig, rng: &mut R) -> PublicParams {
    let generator = if config.transcripts {
        GroupElement::generator_with_transcript()
    } else {
        GroupElement::generator()
    };
    let doc_key = match config.mode {
        ParamsMode::Vulnerable => Some(DocKey::random(rng)),
        ParamsMode::Hardened => None,
    };
    PublicParams {
        curve: CURVE_ID.to_string(),
        security_level: config.level.bits(),
        order: GROUP_ORDER_HEX.to_string(),
        generator,
        hash: HashSpec::default(),
        doc_key,
    }
}

/// Ordered keyword dictionary shared by all parties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct KeywordUniverse {
    keywords: Vec<String>,
    positions: HashMap<String, usize>,
}

impl KeywordUniverse {
    pub fn new<I, S>(keywords: I) -> Result<Self, SchemeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let keywords: Vec<String> = keywords.into_iter().map(Into::into).collect();
        let mut positions = HashMap::with_capacity(keywords.len());
        for (i, kw) in keywords.iter().enumerate() {
            if positions.insert(kw.clone(), i + 1).is_some() {
                return Err(SchemeError::DuplicateKeyword(kw.clone()));
            }
        }
        Ok(KeywordUniverse {
            keywords,
            positions,
        })
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    /// 1-based position.
    pub fn position(&self, keyword: &str) -> Result<usize, SchemeError> {
        self.positions
            .get(keyword)
            .copied()
            .ok_or_else(|| SchemeError::UnknownKeyword(keyword.to_string()))
    }

    pub fn keyword(&self, position: usize) -> Option<&str> {
        position
            .checked_sub(1)
            .and_then(|i| self.keywords.get(i))
            .map(String::as_str)
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }
}

impl TryFrom<Vec<String>> for KeywordUniverse {
    type Error = SchemeError;
    fn try_from(v: Vec<String>) -> Result<Self, SchemeError> {
        KeywordUniverse::new(v)
    }
}

impl From<KeywordUniverse> for Vec<String> {
    fn from(u: KeywordUniverse) -> Self {
        u.keywords
    }
}

fn key_at<T>(items: &[T], position: usize) -> Result<&T, SchemeError> {
    position
        .checked_sub(1)
        .and_then(|i| items.get(i))
        .ok_or(SchemeError::PositionOutOfRange {
            position,
            available: items.len(),
        })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OwnerSecretKey {
    pub owner: OwnerId,
    /// `x_{i,t}`, one per universe position.
    pub x: Vec<Scalar>,
    /// The owner's randomness `r_i`.
    pub r: Scalar,
}

impl OwnerSecretKey {
    pub fn x_at(&self, position: usize) -> Result<&Scalar, SchemeError> {
        key_at(&self.x, position)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OwnerPublicKey {
    pub owner: OwnerId,
    /// `PK_{DO_i,t} = g^{x_{i,t}}`.
    pub pk: Vec<GroupElement>,
}

impl OwnerPublicKey {
    pub fn pk_at(&self, position: usize) -> Result<&GroupElement, SchemeError> {
        key_at(&self.pk, position)
    }
}

#[derive(Clone, Debug)]
pub struct OwnerKeyMaterial {
    pub secret: OwnerSecretKey,
    pub public: OwnerPublicKey,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UserSecretKey {
    pub user: UserId,
    /// `y_{j,l}`.
    pub y: Vec<Scalar>,
}

impl UserSecretKey {
    pub fn y_at(&self, position: usize) -> Result<&Scalar, SchemeError> {
        key_at(&self.y, position)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UserPublicKey {
    pub user: UserId,
    /// `PK_{U_j,l} = g^{y_{j,l}}`.
    pub pk: Vec<GroupElement>,
}

impl UserPublicKey {
    pub fn pk_at(&self, position: usize) -> Result<&GroupElement, SchemeError> {
        key_at(&self.pk, position)
    }
}

#[derive(Clone, Debug)]
pub struct UserKeyMaterial {
    pub secret: UserSecretKey,
    pub public: UserPublicKey,
}

fn keypairs<R: RngCore + CryptoRng + ?Sized>(
    params: &PublicParams,
    n: usize,
    rng: &mut R,
) -> (Vec<Scalar>, Vec<GroupElement>) {
    let secrets: Vec<Scalar> = (0..n).map(|_| Scalar::random_nonzero(rng)).collect();
    let publics = secrets.iter().map(|s| exp(params.g(), s)).collect();
    (secrets, publics)
}

pub fn keygen_owner<R: RngCore + CryptoRng + ?Sized>(
    params: &PublicParams,
    owner: OwnerId,
    universe: &KeywordUniverse,
    rng: &mut R,
) -> Result<OwnerKeyMaterial, SchemeError> {
    if universe.is_empty() {
        return Err(SchemeError::EmptyUniverse);
    }
    let (x, pk) = keypairs(params, universe.len(), rng);
    let r = Scalar::random_nonzero(rng);
    Ok(OwnerKeyMaterial {
        secret: OwnerSecretKey { owner, x, r },
        public: OwnerPublicKey { owner, pk },
    })
}

pub fn keygen_user<R: RngCore + CryptoRng + ?Sized>(
    params: &PublicParams,
    user: UserId,
    q: usize,
    rng: &mut R,
) -> Result<UserKeyMaterial, SchemeError> {
    if q == 0 {
        return Err(SchemeError::NoQueryPositions);
    }
    let (y, pk) = keypairs(params, q, rng);
    Ok(UserKeyMaterial {
        secret: UserSecretKey { user, y },
        public: UserPublicKey { user, pk },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub c1: GroupElement,
    pub c2: GroupElement,
    pub postings: BTreeSet<DocId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncryptedIndex {
    pub owner: OwnerId,
    pub user: UserId,
    /// Keyed by universe position.
    pub entries: BTreeMap<usize, IndexEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapdoorEntry {
    pub t1: GroupElement,
    pub t2: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trapdoor {
    pub user: UserId,
    pub owner: OwnerId,
    pub entries: BTreeMap<usize, TrapdoorEntry>,
}

/// Where the index's `C2` randomness comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RPolicy {
    /// The owner's long-term `r_i`, which a trapdoor must reuse to match.
    OwnerShared,
    /// A fresh random value per index.
    Fresh,
}

pub(crate) fn nonzero(s: Scalar, what: &'static str) -> Result<Scalar, SchemeError> {
    if s.is_zero() {
        Err(SchemeError::DegenerateExponent(what))
    } else {
        Ok(s)
    }
}

/// Builds `C1 = g^{H(w)·x·blind}` and `C2 = PK_U^r` for every keyword.
pub(crate) fn build_index(
    params: &PublicParams,
    universe: &KeywordUniverse,
    keywords: &Postings,
    owner: &OwnerSecretKey,
    user_pub: &UserPublicKey,
    r: Scalar,
    blind: Scalar,
) -> Result<EncryptedIndex, SchemeError> {
    let r = nonzero(r, "index randomness r")?;
    let blind = nonzero(blind, "blinding factor")?;
    let mut entries = BTreeMap::new();
    for (keyword, postings) in keywords {
        let position = universe.position(keyword)?;
        let x = nonzero(*owner.x_at(position)?, "owner secret x")?;
        let pk_user = user_pub.pk_at(position)?;
        let h = params.hash_keyword(keyword);
        entries.insert(
            position,
            IndexEntry {
                c1: exp(params.g(), &(h * x * blind)),
                c2: exp(pk_user, &r),
                postings: postings.clone(),
            },
        );
    }
    Ok(EncryptedIndex {
        owner: owner.owner,
        user: user_pub.user,
        entries,
    })
}

pub fn index_gen<R: RngCore + CryptoRng + ?Sized>(
    params: &PublicParams,
    universe: &KeywordUniverse,
    keywords: &Postings,
    owner: &OwnerSecretKey,
    user_pub: &UserPublicKey,
    policy: RPolicy,
    rng: &mut R,
) -> Result<EncryptedIndex, SchemeError> {
    let r = match policy {
        RPolicy::OwnerShared => owner.r,
        RPolicy::Fresh => Scalar::random_nonzero(rng),
    };
    build_index(
        params,
        universe,
        keywords,
        owner,
        user_pub,
        r,
        Scalar::one(),
    )
}

/// Resolves a query to sorted, de-duplicated universe positions.
pub(crate) fn query_positions<S: AsRef<str>>(
    universe: &KeywordUniverse,
    query: &[S],
) -> Result<BTreeMap<usize, String>, SchemeError> {
    if query.is_empty() {
        return Err(SchemeError::EmptyQuery);
    }
    query
        .iter()
        .map(|w| {
            let w = w.as_ref();
            universe.position(w).map(|p| (p, w.to_string()))
        })
        .collect()
}

/// `T1 = g^{H(w')·y}`, `T2 = PK_DO^r` for every query keyword.
pub fn trapdoor_gen<S: AsRef<str>>(
    params: &PublicParams,
    universe: &KeywordUniverse,
    query: &[S],
    user: &UserSecretKey,
    owner_pub: &OwnerPublicKey,
    r: &Scalar,
) -> Result<Trapdoor, SchemeError> {
    let r = nonzero(*r, "trapdoor randomness r")?;
    let mut entries = BTreeMap::new();
    for (position, keyword) in query_positions(universe, query)? {
        let y = nonzero(*user.y_at(position)?, "user secret y")?;
        let pk_owner = owner_pub.pk_at(position)?;
        let h = params.hash_keyword(&keyword);
        entries.insert(
            position,
            TrapdoorEntry {
                t1: exp(params.g(), &(h * y)),
                t2: exp(pk_owner, &r),
            },
        );
    }
    Ok(Trapdoor {
        user: user.user,
        owner: owner_pub.owner,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub owner: OwnerId,
    pub user: UserId,
    /// Per queried position.
    pub positions: BTreeMap<usize, bool>,
    pub matched: bool,
    /// Intersection of matched postings; empty unless `matched`.
    pub documents: Vec<DocId>,
}

/// `e(C1, C2) / e(T1, T2)`; the search test holds iff this is the identity.
pub fn search_ratio(index: &IndexEntry, trapdoor: &TrapdoorEntry) -> TargetElement {
    pair(&index.c1, &index.c2).ratio(&pair(&trapdoor.t1, &trapdoor.t2))
}

/// Equality form of the search test: `e(C1, C2) == e(T1, T2)`.
pub fn entry_matches(index: &IndexEntry, trapdoor: &TrapdoorEntry) -> bool {
    target_equal(
        &pair(&index.c1, &index.c2),
        &pair(&trapdoor.t1, &trapdoor.t2),
    )
}

/// Conjunctive search: documents are released only when every queried
/// position matches.
pub fn search(index: &EncryptedIndex, trapdoor: &Trapdoor) -> Result<MatchResult, SchemeError> {
    if index.owner != trapdoor.owner || index.user != trapdoor.user {
        return Err(SchemeError::PartyMismatch {
            index_owner: index.owner,
            index_user: index.user,
            trapdoor_owner: trapdoor.owner,
            trapdoor_user: trapdoor.user,
        });
    }
    if trapdoor.entries.is_empty() {
        return Err(SchemeError::EmptyQuery);
    }
    let positions: BTreeMap<usize, bool> = trapdoor
        .entries
        .iter()
        .map(|(&position, t)| {
            let hit = index
                .entries
                .get(&position)
                .is_some_and(|c| entry_matches(c, t));
            (position, hit)
        })
        .collect();
    let matched = positions.values().all(|&m| m);
    let documents = if matched {
        let mut lists = positions.keys().map(|p| &index.entries[p].postings);
        let first = lists.next().cloned().unwrap_or_default();
        lists
            .fold(first, |acc, l| acc.intersection(l).cloned().collect())
            .into_iter()
            .collect()
    } else {
        Vec::new()
    };
    Ok(MatchResult {
        owner: index.owner,
        user: index.user,
        positions,
        matched,
        documents,
    })
}

const NONCE_BYTES: usize = 24;

/// Authenticated document ciphertext: `nonce || XChaCha20-Poly1305 output`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext(pub Vec<u8>);

impl Serialize for Ciphertext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(&self.0))
    }
}

impl<'de> Deserialize<'de> for Ciphertext {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let s = String::deserialize(d)?;
        hex::decode(s).map(Ciphertext).map_err(D::Error::custom)
    }
}

pub fn encrypt_document<R: RngCore + CryptoRng + ?Sized>(
    key: &DocKey,
    plaintext: &[u8],
    rng: &mut R,
) -> Ciphertext {
    let cipher = XChaCha20Poly1305::new(key.as_bytes().into());
    let mut nonce = [0u8; NONCE_BYTES];
    rng.fill_bytes(&mut nonce);
    let body = cipher
        .encrypt(XNonce::from_slice(&nonce), plaintext)
        .expect("plaintext length within AEAD limits");
    let mut out = nonce.to_vec();
    out.extend_from_slice(&body);
    Ciphertext(out)
}

pub fn decrypt_document(key: &DocKey, ciphertext: &Ciphertext) -> Result<Vec<u8>, SchemeError> {
    if ciphertext.0.len() < NONCE_BYTES {
        return Err(SchemeError::MalformedCiphertext);
    }
    let (nonce, body) = ciphertext.0.split_at(NONCE_BYTES);
    XChaCha20Poly1305::new(key.as_bytes().into())
        .decrypt(XNonce::from_slice(nonce), body)
        .map_err(|_| SchemeError::Authentication)
}
