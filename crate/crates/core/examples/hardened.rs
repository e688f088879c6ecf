//! The blinded variant: an authority's secret `alpha` enters both the index
//! and the user keys, so the public pairing checks behind Attacks I and II
//! stop matching while the search still works. Forcing `alpha = 1` shows the
//! blinding is what makes the difference.
//!
//! cargo run --example hardened

use std::collections::BTreeSet;

use kga_lab::attacks::{attack_index_kga, attack_trapdoor_kga};
use kga_lab::demo::fixture_dictionary;
use kga_lab::group::Scalar;
use kga_lab::hardened::{
    h_enroll_owner, h_index_gen, h_keygen_user, h_search, h_setup, h_trapdoor_gen, MasterSecret,
};
use kga_lab::prmkr::{keygen_owner, KeywordUniverse, OwnerId, Postings, SecurityLevel, UserId};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let universe = KeywordUniverse::new(["invoice", "salary", "tax", "audit"])?;
    let postings: Postings = [("salary".to_string(), BTreeSet::new())].into();

    let (params, real) = h_setup(SecurityLevel::Bits128, false, &mut rng);
    let dict = fixture_dictionary(300).prepare(&params);
    let forced = MasterSecret::insecure_with_alpha(Scalar::one());

    for (label, mut msk) in [("alpha random", real), ("alpha = 1", forced)] {
        let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng)?;
        msk.register_owner(&owner.secret);
        let user = h_keygen_user(&msk, &params, UserId(1), universe.len(), &mut rng)?;
        let credential = h_enroll_owner(&msk, &owner.public)?;

        let index = h_index_gen(
            &params,
            &universe,
            &postings,
            &owner.secret,
            &user.public,
            &msk.alpha_share(),
        )?;
        let trapdoor = h_trapdoor_gen(&params, &universe, &["salary"], &user, &credential)?;

        println!("{label}:");
        println!(
            "  search matched:      {}",
            h_search(&index, &trapdoor)?.matched
        );
        println!(
            "  attack I recovered:  {}",
            attack_index_kga(&index, &owner.public, &dict).recovered_count()
        );
        println!(
            "  attack II recovered: {}",
            attack_trapdoor_kga(&trapdoor, &user.public, &dict).recovered_count()
        );
    }
    Ok(())
}
