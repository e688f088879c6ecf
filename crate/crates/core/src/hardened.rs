//! Master-secret blinded variant of the scheme.
//!
//! A key authority samples a master secret `α` and keeps a registry of every
//! owner's randomness `r_i`. The algebra:
//!
//! - index: `C1 = g^{H(w)·x·α}`, `C2 = PK_U^{r_i}`
//! - user key: `ŷ = y·α` (the user never sees `y` or `α` separately)
//! - owner credential: `V_t = PK_{DO,t}^{r_i} = g^{x_t·r_i}`
//! - trapdoor: `T1 = g^{H(w')·ŷ}`, `T2 = V`
//!
//! Both sides of the unchanged search test then carry `H(w)·x·α·y·r_i`,
//! while the public-data pairing checks `e(C1, g) = e(g^{H(w*)}, PK_DO)` and
//! `e(T1, g) = e(g^{H(w*)}, PK_U)` fail because of the extra `α`.
//! Owners receive `α` (they already handle plaintext keywords); users never
//! do. No security proof is claimed: an adversary holding matching
//! index/trapdoor pairs for known keywords can still try quotient-style
//! guessing.

use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use crate::group::{exp, GroupElement, Scalar};
use crate::prmkr::{
    self, build_index, nonzero, query_positions, EncryptedIndex, KeywordUniverse, MatchResult,
    OwnerId, OwnerPublicKey, OwnerSecretKey, ParamsMode, Postings, PublicParams, SchemeError,
    SecurityLevel, SetupConfig, Trapdoor, TrapdoorEntry, UserId, UserPublicKey,
};

/// Authority-held secret: `α` and the per-owner `r_i` registry.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MasterSecret {
    alpha: Scalar,
    registry: BTreeMap<OwnerId, Scalar>,
}

impl MasterSecret {
    /// Records the owner's `r_i`, replacing any earlier value.
    pub fn register_owner(&mut self, owner: &OwnerSecretKey) {
        self.registry.insert(owner.owner, owner.r);
    }

    pub fn owner_randomness(&self, owner: OwnerId) -> Option<&Scalar> {
        self.registry.get(&owner)
    }

    pub fn is_registered(&self, owner: OwnerId) -> bool {
        self.registry.contains_key(&owner)
    }

    /// The `α` share handed to trusted data owners.
    pub fn alpha_share(&self) -> AlphaShare {
        AlphaShare(self.alpha)
    }

    /// Negative-control hook: a master secret with a chosen `α`, e.g. `1`,
    /// which turns the blinded index back into the vulnerable one.
    #[doc(hidden)]
    pub fn insecure_with_alpha(alpha: Scalar) -> Self {
        MasterSecret {
            alpha,
            registry: BTreeMap::new(),
        }
    }

    #[cfg(test)]
    pub(crate) fn alpha(&self) -> Scalar {
        self.alpha
    }
}

/// `α` as delivered to an owner for index generation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlphaShare(Scalar);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardenedUserKey {
    pub user: UserId,
    /// `ŷ_l = y_l·α`.
    pub blinded: Vec<Scalar>,
    pub public: UserPublicKey,
}

/// `V_t = g^{x_t·r_i}`, delivered to authorized users only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OwnerSearchCredential {
    pub owner: OwnerId,
    pub v: Vec<GroupElement>,
}

pub fn h_setup<R: RngCore + CryptoRng + ?Sized>(
    level: SecurityLevel,
    transcripts: bool,
    rng: &mut R,
) -> (PublicParams, MasterSecret) {
    let params = prmkr::setup(
        SetupConfig {
            level,
            mode: ParamsMode::Hardened,
            transcripts,
        },
        rng,
    );
    let msk = MasterSecret {
        alpha: Scalar::random_nonzero(rng),
        registry: BTreeMap::new(),
    };
    (params, msk)
}

pub fn h_keygen_user<R: RngCore + CryptoRng + ?Sized>(
    msk: &MasterSecret,
    params: &PublicParams,
    user: UserId,
    q: usize,
    rng: &mut R,
) -> Result<HardenedUserKey, SchemeError> {
    if q == 0 {
        return Err(SchemeError::NoQueryPositions);
    }
    let mut blinded = Vec::with_capacity(q);
    let mut pk = Vec::with_capacity(q);
    for _ in 0..q {
        let y = Scalar::random_nonzero(rng);
        blinded.push(y * msk.alpha);
        pk.push(exp(params.g(), &y));
    }
    Ok(HardenedUserKey {
        user,
        blinded,
        public: UserPublicKey { user, pk },
    })
}

pub fn h_enroll_owner(
    msk: &MasterSecret,
    owner: &OwnerPublicKey,
) -> Result<OwnerSearchCredential, SchemeError> {
    let r = msk
        .owner_randomness(owner.owner)
        .ok_or(SchemeError::UnregisteredOwner(owner.owner))?;
    Ok(OwnerSearchCredential {
        owner: owner.owner,
        v: owner.pk.iter().map(|pk| exp(pk, r)).collect(),
    })
}

pub fn h_index_gen(
    params: &PublicParams,
    universe: &KeywordUniverse,
    keywords: &Postings,
    owner: &OwnerSecretKey,
    user_pub: &UserPublicKey,
    alpha: &AlphaShare,
) -> Result<EncryptedIndex, SchemeError> {
    build_index(
        params, universe, keywords, owner, user_pub, owner.r, alpha.0,
    )
}

pub fn h_trapdoor_gen<S: AsRef<str>>(
    params: &PublicParams,
    universe: &KeywordUniverse,
    query: &[S],
    user_key: &HardenedUserKey,
    credential: &OwnerSearchCredential,
) -> Result<Trapdoor, SchemeError> {
    let mut entries = BTreeMap::new();
    for (position, keyword) in query_positions(universe, query)? {
        let y_hat = position
            .checked_sub(1)
            .and_then(|i| user_key.blinded.get(i))
            .ok_or(SchemeError::PositionOutOfRange {
                position,
                available: user_key.blinded.len(),
            })?;
        let y_hat = nonzero(*y_hat, "blinded user secret")?;
        let v = position
            .checked_sub(1)
            .and_then(|i| credential.v.get(i))
            .ok_or(SchemeError::PositionOutOfRange {
                position,
                available: credential.v.len(),
            })?;
        let h = params.hash_keyword(&keyword);
        entries.insert(
            position,
            TrapdoorEntry {
                t1: exp(params.g(), &(h * y_hat)),
                t2: *v,
            },
        );
    }
    Ok(Trapdoor {
        user: user_key.user,
        owner: credential.owner,
        entries,
    })
}

/// The search test is unchanged.
pub fn h_search(index: &EncryptedIndex, trapdoor: &Trapdoor) -> Result<MatchResult, SchemeError> {
    prmkr::search(index, trapdoor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prmkr::{keygen_owner, DocId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct World {
        params: PublicParams,
        msk: MasterSecret,
        universe: KeywordUniverse,
        owner: prmkr::OwnerKeyMaterial,
        user: HardenedUserKey,
    }

    fn world(seed: u64) -> World {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (params, mut msk) = h_setup(SecurityLevel::Bits128, true, &mut rng);
        let universe = KeywordUniverse::new(["invoice", "salary", "tax"]).unwrap();
        let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng).unwrap();
        msk.register_owner(&owner.secret);
        let user = h_keygen_user(&msk, &params, UserId(2), universe.len(), &mut rng).unwrap();
        World {
            params,
            msk,
            universe,
            owner,
            user,
        }
    }

    fn kw(words: &[&str]) -> Postings {
        words
            .iter()
            .map(|w| (w.to_string(), [DocId(format!("doc-{w}"))].into()))
            .collect()
    }

    #[test]
    fn setup_has_no_doc_key_and_nonzero_alpha() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (p1, m1) = h_setup(SecurityLevel::Bits128, false, &mut rng);
        let (_, m2) = h_setup(SecurityLevel::Bits128, false, &mut rng);
        assert!(serde_json::to_value(&p1).unwrap().get("doc_key").is_none());
        assert!(!m1.alpha().is_zero());
        assert_ne!(m1.alpha(), m2.alpha());
    }

    #[test]
    fn user_key_unblinds_to_public_key() {
        let w = world(2);
        let inv = w.msk.alpha().inverse().unwrap();
        for (y_hat, pk) in w.user.blinded.iter().zip(&w.user.public.pk) {
            assert_eq!(exp(w.params.g(), &(*y_hat * inv)), *pk);
        }
        let json = serde_json::to_string(&w.user).unwrap();
        assert!(!json.contains("alpha"));
        assert!(!json.contains(&w.msk.alpha().to_hex()));
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let one = h_keygen_user(&w.msk, &w.params, UserId(3), 1, &mut rng).unwrap();
        assert_eq!(one.blinded.len(), 1);
    }

    #[test]
    fn credential_transcripts_and_registration() {
        let w = world(4);
        let cred = h_enroll_owner(&w.msk, &w.owner.public).unwrap();
        for (v, x) in cred.v.iter().zip(&w.owner.secret.x) {
            assert_eq!(v.transcript(), Some(*x * w.owner.secret.r));
        }
        let json = serde_json::to_string(&cred).unwrap();
        assert!(!json.contains(&w.owner.secret.r.to_hex()));

        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let stranger = keygen_owner(&w.params, OwnerId(9), &w.universe, &mut rng).unwrap();
        assert_eq!(
            h_enroll_owner(&w.msk, &stranger.public).unwrap_err(),
            SchemeError::UnregisteredOwner(OwnerId(9))
        );
        let mut msk = w.msk.clone();
        msk.register_owner(&stranger.secret);
        let other = h_enroll_owner(&msk, &stranger.public).unwrap();
        assert_ne!(other.v, cred.v);
    }

    #[test]
    fn index_and_trapdoor_transcripts() {
        let w = world(6);
        let alpha = w.msk.alpha();
        let idx = h_index_gen(
            &w.params,
            &w.universe,
            &kw(&["salary"]),
            &w.owner.secret,
            &w.user.public,
            &w.msk.alpha_share(),
        )
        .unwrap();
        let h = w.params.hash_keyword("salary");
        let x = w.owner.secret.x[1];
        assert_eq!(idx.entries[&2].c1.transcript(), Some(h * x * alpha));

        let cred = h_enroll_owner(&w.msk, &w.owner.public).unwrap();
        let td = h_trapdoor_gen(&w.params, &w.universe, &["salary"], &w.user, &cred).unwrap();
        let y = w.user.blinded[1] * alpha.inverse().unwrap();
        assert_eq!(td.entries[&2].t1.transcript(), Some(h * y * alpha));
        assert_eq!(td.entries[&2].t2.transcript(), Some(x * w.owner.secret.r));
        let again = h_trapdoor_gen(&w.params, &w.universe, &["salary"], &w.user, &cred).unwrap();
        assert_eq!(again, td);

        let empty = h_index_gen(
            &w.params,
            &w.universe,
            &Postings::new(),
            &w.owner.secret,
            &w.user.public,
            &w.msk.alpha_share(),
        )
        .unwrap();
        assert!(empty.entries.is_empty());
    }

    #[test]
    fn alpha_one_reproduces_vulnerable_index() {
        let w = world(7);
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let forced = MasterSecret::insecure_with_alpha(Scalar::one());
        let words = kw(&["tax"]);
        let blinded = h_index_gen(
            &w.params,
            &w.universe,
            &words,
            &w.owner.secret,
            &w.user.public,
            &forced.alpha_share(),
        )
        .unwrap();
        let plain = prmkr::index_gen(
            &w.params,
            &w.universe,
            &words,
            &w.owner.secret,
            &w.user.public,
            prmkr::RPolicy::OwnerShared,
            &mut rng,
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&blinded).unwrap(),
            serde_json::to_string(&plain).unwrap()
        );
    }

    #[test]
    fn search_correctness() {
        let w = world(9);
        let idx = h_index_gen(
            &w.params,
            &w.universe,
            &kw(&["invoice", "tax"]),
            &w.owner.secret,
            &w.user.public,
            &w.msk.alpha_share(),
        )
        .unwrap();
        let cred = h_enroll_owner(&w.msk, &w.owner.public).unwrap();
        let hit = h_search(
            &idx,
            &h_trapdoor_gen(&w.params, &w.universe, &["tax"], &w.user, &cred).unwrap(),
        )
        .unwrap();
        assert!(hit.matched);
        assert_eq!(hit.documents, vec![DocId("doc-tax".into())]);
        let miss = h_search(
            &idx,
            &h_trapdoor_gen(&w.params, &w.universe, &["salary"], &w.user, &cred).unwrap(),
        )
        .unwrap();
        assert!(!miss.matched);

        let short = OwnerSearchCredential {
            owner: cred.owner,
            v: cred.v[..1].to_vec(),
        };
        assert!(matches!(
            h_trapdoor_gen(&w.params, &w.universe, &["tax"], &w.user, &short),
            Err(SchemeError::PositionOutOfRange { .. })
        ));
    }
}
