//! Typed JSON envelopes for every on-disk artifact:
//! `{"schema": ..., "type": ..., "secret": ..., "body": ...}`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::hardened::{AlphaShare, HardenedUserKey, MasterSecret, OwnerSearchCredential};
use crate::prmkr::{
    DocKey, EncryptedIndex, KeywordUniverse, MatchResult, OwnerPublicKey, OwnerSecretKey,
    PublicParams, Trapdoor, UserPublicKey, UserSecretKey,
};
use crate::store::DocumentRecord;

pub const SCHEMA_V1: &str = "kga-lab/v1";
pub const SCHEMA_V1_HARDENED: &str = "kga-lab/v1-hardened";

#[derive(Debug, thiserror::Error)]
pub enum EnvelopeError {
    #[error("malformed envelope: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown schema {0:?}")]
    UnknownSchema(String),
    #[error("expected artifact type {expected:?}, found {found:?}")]
    WrongType {
        expected: &'static str,
        found: String,
    },
    #[error("artifact {kind:?} has secret={found}, expected secret={expected}")]
    SecretFlag {
        kind: &'static str,
        expected: bool,
        found: bool,
    },
}

/// A serializable artifact with a fixed envelope type and secrecy.
pub trait Artifact: Serialize + DeserializeOwned {
    const TYPE: &'static str;
    const SECRET: bool;
}

macro_rules! artifact {
    ($ty:ty, $name:literal, $secret:literal) => {
        impl Artifact for $ty {
            const TYPE: &'static str = $name;
            const SECRET: bool = $secret;
        }
    };
}

artifact!(PublicParams, "params", false);
artifact!(KeywordUniverse, "universe", false);
artifact!(OwnerSecretKey, "owner_sk", true);
artifact!(OwnerPublicKey, "owner_pk", false);
artifact!(UserSecretKey, "user_sk", true);
artifact!(UserPublicKey, "user_pk", false);
artifact!(EncryptedIndex, "index", false);
artifact!(Trapdoor, "trapdoor", false);
artifact!(MatchResult, "match_result", false);
artifact!(DocKey, "doc_key", true);
artifact!(DocumentRecord, "document", false);
artifact!(MasterSecret, "master_secret", true);
artifact!(AlphaShare, "alpha_share", true);
artifact!(HardenedUserKey, "hardened_user_sk", true);
artifact!(OwnerSearchCredential, "owner_credential", true);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub schema: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub secret: bool,
    pub body: serde_json::Value,
}

impl Envelope {
    pub fn wrap<T: Artifact>(schema: &str, value: &T) -> Result<Self, EnvelopeError> {
        Ok(Envelope {
            schema: schema.to_string(),
            kind: T::TYPE.to_string(),
            secret: T::SECRET,
            body: serde_json::to_value(value)?,
        })
    }

    pub fn parse(text: &str) -> Result<Self, EnvelopeError> {
        let env: Envelope = serde_json::from_str(text)?;
        if env.schema != SCHEMA_V1 && env.schema != SCHEMA_V1_HARDENED {
            return Err(EnvelopeError::UnknownSchema(env.schema));
        }
        Ok(env)
    }

    pub fn open<T: Artifact>(self) -> Result<T, EnvelopeError> {
        if self.kind != T::TYPE {
            return Err(EnvelopeError::WrongType {
                expected: T::TYPE,
                found: self.kind,
            });
        }
        if self.secret != T::SECRET {
            return Err(EnvelopeError::SecretFlag {
                kind: T::TYPE,
                expected: T::SECRET,
                found: self.secret,
            });
        }
        Ok(serde_json::from_value(self.body)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}

/// Parses and opens an envelope in one step.
pub fn decode<T: Artifact>(text: &str) -> Result<T, EnvelopeError> {
    Envelope::parse(text)?.open()
}

pub fn encode<T: Artifact>(schema: &str, value: &T) -> Result<String, EnvelopeError> {
    Ok(Envelope::wrap(schema, value)?.to_json())
}
