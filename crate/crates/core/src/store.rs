//! Encrypted document store and the on-disk cloud directory.
//!
//! Layout of a [`CloudDirectory`]:
//!
//! ```text
//! <root>/public/            params, public keys, indexes, trapdoors
//! <root>/public/docs/       one encrypted DocumentRecord per document
//! <root>/private/<role>/    secret keys, credentials, document keys
//! ```
//!
//! Nothing tagged secret is ever written under `public/`. Writes go to a
//! temporary file in the target directory and are renamed into place.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::envelope::{self, Artifact, Envelope, EnvelopeError};
use crate::hardened::{h_index_gen, AlphaShare};
use crate::prmkr::{
    decrypt_document, encrypt_document, index_gen, Ciphertext, DocId, DocKey, EncryptedIndex,
    KeywordUniverse, MatchResult, OwnerSecretKey, Postings, PublicParams, RPolicy, SchemeError,
    UserPublicKey,
};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("refusing to write secret artifact {0:?} into the public directory")]
    SecretInPublic(&'static str),
    #[error("matched document {0} is not in the store")]
    MissingDocument(DocId),
    #[error("invalid artifact name {0:?}")]
    InvalidName(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A plaintext document with its keyword annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub plaintext: Vec<u8>,
    pub keywords: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: DocId,
    pub ciphertext: Ciphertext,
    /// Universe positions of the document's keywords.
    pub positions: BTreeSet<usize>,
}

/// First 16 hex characters of SHA-256 over the plaintext.
pub fn doc_id(plaintext: &[u8]) -> DocId {
    let digest = hex::encode(Sha256::digest(plaintext));
    DocId(digest[..16].to_string())
}

/// Which index construction and document key [`ingest`] uses.
#[derive(Clone, Copy, Debug)]
pub enum IngestScheme<'a> {
    /// Index via `index_gen` with the owner's `r_i`; documents encrypted
    /// under the key in the public parameters.
    Vulnerable,
    /// Blinded index; documents encrypted under an owner-held key.
    Hardened {
        alpha: &'a AlphaShare,
        doc_key: &'a DocKey,
    },
}

pub fn ingest<R: RngCore + CryptoRng + ?Sized>(
    params: &PublicParams,
    universe: &KeywordUniverse,
    docs: &[Document],
    owner: &OwnerSecretKey,
    user_pub: &UserPublicKey,
    scheme: IngestScheme<'_>,
    rng: &mut R,
) -> Result<(Vec<DocumentRecord>, EncryptedIndex), StoreError> {
    let key = match scheme {
        IngestScheme::Vulnerable => params.doc_key.as_ref().ok_or(SchemeError::MissingDocKey)?,
        IngestScheme::Hardened { doc_key, .. } => doc_key,
    };
    let mut records: BTreeMap<DocId, DocumentRecord> = BTreeMap::new();
    let mut postings = Postings::new();
    for doc in docs {
        let id = doc_id(&doc.plaintext);
        let mut positions = BTreeSet::new();
        for kw in &doc.keywords {
            positions.insert(universe.position(kw)?);
            postings.entry(kw.clone()).or_default().insert(id.clone());
        }
        if let Some(existing) = records.get_mut(&id) {
            existing.positions.extend(positions);
            continue;
        }
        let ciphertext = encrypt_document(key, &doc.plaintext, rng);
        records.insert(
            id.clone(),
            DocumentRecord {
                id,
                ciphertext,
                positions,
            },
        );
    }
    let index = match scheme {
        IngestScheme::Vulnerable => index_gen(
            params,
            universe,
            &postings,
            owner,
            user_pub,
            RPolicy::OwnerShared,
            rng,
        )?,
        IngestScheme::Hardened { alpha, .. } => {
            h_index_gen(params, universe, &postings, owner, user_pub, alpha)?
        }
    };
    Ok((records.into_values().collect(), index))
}

/// Decrypts every matched document, ordered by id.
pub fn retrieve(
    result: &MatchResult,
    records: &[DocumentRecord],
    key: &DocKey,
) -> Result<Vec<(DocId, Vec<u8>)>, StoreError> {
    let by_id: BTreeMap<&DocId, &DocumentRecord> = records.iter().map(|r| (&r.id, r)).collect();
    let wanted: BTreeSet<&DocId> = result.documents.iter().collect();
    wanted
        .into_iter()
        .map(|id| {
            let record = by_id
                .get(id)
                .ok_or_else(|| StoreError::MissingDocument(id.clone()))?;
            Ok((id.clone(), decrypt_document(key, &record.ciphertext)?))
        })
        .collect()
}

fn check_name(name: &str) -> Result<(), StoreError> {
    let ok = !name.is_empty()
        && name != "."
        && name != ".."
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidName(name.to_string()))
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, StoreError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(contents.as_bytes()).map_err(io_err(&path))?;
    tmp.persist(&path).map_err(|e| StoreError::Io {
        path: path.clone(),
        source: e.error,
    })?;
    Ok(path)
}

fn read_envelope(path: &Path) -> Result<Envelope, StoreError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(Envelope::parse(&text)?)
}

/// File-backed store shared by all roles.
#[derive(Clone, Debug)]
pub struct CloudDirectory {
    root: PathBuf,
}

impl CloudDirectory {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = CloudDirectory { root: root.into() };
        for d in [dir.public_dir(), dir.root.join("private")] {
            fs::create_dir_all(&d).map_err(io_err(&d))?;
        }
        Ok(dir)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn public_dir(&self) -> PathBuf {
        self.root.join("public")
    }

    pub fn docs_dir(&self) -> PathBuf {
        self.public_dir().join("docs")
    }

    pub fn private_dir(&self, role: &str) -> Result<PathBuf, StoreError> {
        check_name(role)?;
        Ok(self.root.join("private").join(role))
    }

    /// Read access to `public/` only, as handed to the cloud/attacker role.
    pub fn public_view(&self) -> PublicView {
        PublicView {
            public: self.public_dir(),
        }
    }

    pub fn write_public<T: Artifact>(
        &self,
        schema: &str,
        name: &str,
        value: &T,
    ) -> Result<PathBuf, StoreError> {
        check_name(name)?;
        if T::SECRET {
            return Err(StoreError::SecretInPublic(T::TYPE));
        }
        write_atomic(&self.public_dir(), name, &envelope::encode(schema, value)?)
    }

    pub fn write_private<T: Artifact>(
        &self,
        schema: &str,
        role: &str,
        name: &str,
        value: &T,
    ) -> Result<PathBuf, StoreError> {
        check_name(name)?;
        write_atomic(
            &self.private_dir(role)?,
            name,
            &envelope::encode(schema, value)?,
        )
    }

    pub fn read_private<T: Artifact>(&self, role: &str, name: &str) -> Result<T, StoreError> {
        check_name(name)?;
        Ok(read_envelope(&self.private_dir(role)?.join(name))?.open()?)
    }

    pub fn read_public<T: Artifact>(&self, name: &str) -> Result<T, StoreError> {
        self.public_view().read(name)
    }

    pub fn write_records(
        &self,
        schema: &str,
        records: &[DocumentRecord],
    ) -> Result<(), StoreError> {
        let docs = self.docs_dir();
        for r in records {
            write_atomic(
                &docs,
                &format!("{}.json", r.id),
                &envelope::encode(schema, r)?,
            )?;
        }
        Ok(())
    }

    pub fn read_records(&self) -> Result<Vec<DocumentRecord>, StoreError> {
        self.public_view().records()
    }
}

/// Read-only view of `public/`; refuses anything tagged secret.
#[derive(Clone, Debug)]
pub struct PublicView {
    public: PathBuf,
}

impl PublicView {
    pub fn read<T: Artifact>(&self, name: &str) -> Result<T, StoreError> {
        check_name(name)?;
        Ok(read_envelope(&self.public.join(name))?.open()?)
    }

    /// All document records, sorted by id.
    pub fn records(&self) -> Result<Vec<DocumentRecord>, StoreError> {
        let docs = self.public.join("docs");
        if !docs.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for entry in fs::read_dir(&docs).map_err(io_err(&docs))? {
            let path = entry.map_err(io_err(&docs))?.path();
            if path.extension().is_some_and(|e| e == "json") {
                out.push(read_envelope(&path)?.open::<DocumentRecord>()?);
            }
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }

    pub fn ciphertexts(&self) -> Result<Vec<Ciphertext>, StoreError> {
        Ok(self.records()?.into_iter().map(|r| r.ciphertext).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::SCHEMA_V1;
    use crate::prmkr::{
        keygen_owner, keygen_user, search, setup, trapdoor_gen, OwnerId, SetupConfig, UserId,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn doc(text: &str, kws: &[&str]) -> Document {
        Document {
            plaintext: text.as_bytes().to_vec(),
            keywords: kws.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn doc_ids_are_stable() {
        let a = doc_id(b"same");
        assert_eq!(a, doc_id(b"same"));
        assert_eq!(a.0.len(), 16);
        assert_ne!(a, doc_id(b"other"));
    }

    #[test]
    fn ingest_search_retrieve() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let params = setup(SetupConfig::default(), &mut rng);
        let universe = KeywordUniverse::new(["tax", "invoice", "salary"]).unwrap();
        let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng).unwrap();
        let user = keygen_user(&params, UserId(1), universe.len(), &mut rng).unwrap();
        let docs = vec![
            doc("a", &["tax"]),
            doc("b", &["tax", "invoice"]),
            doc("c", &["tax"]),
            doc("b", &["tax", "invoice"]),
        ];
        let (records, index) = ingest(
            &params,
            &universe,
            &docs,
            &owner.secret,
            &user.public,
            IngestScheme::Vulnerable,
            &mut rng,
        )
        .unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(index.entries[&1].postings.len(), 3);

        let td = trapdoor_gen(
            &params,
            &universe,
            &["tax"],
            &user.secret,
            &owner.public,
            &owner.secret.r,
        )
        .unwrap();
        let result = search(&index, &td).unwrap();
        let key = params.doc_key.as_ref().unwrap();
        let plain = retrieve(&result, &records, key).unwrap();
        let mut texts: Vec<_> = plain.iter().map(|(_, p)| p.clone()).collect();
        texts.sort();
        assert_eq!(texts, vec![b"a".to_vec(), b"b".to_vec(), b"c".to_vec()]);
        // Ordered by id.
        assert!(plain.windows(2).all(|w| w[0].0 < w[1].0));

        let mut rng2 = ChaCha20Rng::seed_from_u64(2);
        let wrong = DocKey::random(&mut rng2);
        assert!(matches!(
            retrieve(&result, &records, &wrong),
            Err(StoreError::Scheme(SchemeError::Authentication))
        ));
        let none = MatchResult {
            documents: vec![],
            matched: false,
            ..result
        };
        assert!(retrieve(&none, &records, key).unwrap().is_empty());
    }

    #[test]
    fn ingest_rejects_unknown_keywords() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let params = setup(SetupConfig::default(), &mut rng);
        let universe = KeywordUniverse::new(["tax"]).unwrap();
        let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng).unwrap();
        let user = keygen_user(&params, UserId(1), 1, &mut rng).unwrap();
        let err = ingest(
            &params,
            &universe,
            &[doc("x", &["vat"])],
            &owner.secret,
            &user.public,
            IngestScheme::Vulnerable,
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            StoreError::Scheme(SchemeError::UnknownKeyword(_))
        ));
    }

    #[test]
    fn directory_refuses_secrets_in_public() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = CloudDirectory::open(tmp.path()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let key = DocKey::random(&mut rng);
        assert!(matches!(
            dir.write_public(SCHEMA_V1, "doc_key.json", &key),
            Err(StoreError::SecretInPublic("doc_key"))
        ));
        dir.write_private(SCHEMA_V1, "owner_1", "doc_key.json", &key)
            .unwrap();
        let back: DocKey = dir.read_private("owner_1", "doc_key.json").unwrap();
        assert_eq!(back, key);
        assert!(dir.private_dir("../escape").is_err());
        assert!(dir.read_public::<DocKey>("missing.json").is_err());

        // A secret envelope smuggled into public/ is not readable as a
        // public artifact.
        let text = envelope::encode(SCHEMA_V1, &key).unwrap();
        fs::write(dir.public_dir().join("leak.json"), text).unwrap();
        let universe: Result<KeywordUniverse, _> = dir.read_public("leak.json");
        assert!(universe.is_err());
    }
}
