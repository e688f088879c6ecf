//! Attack III, case 1: once the owner hands `r_i` to its users, any user can
//! mint trapdoors for the owner's index on their own.
//!
//! cargo run --example shared_r_forgery

use std::collections::BTreeSet;

use kga_lab::attacks::demo_shared_r_forgery;
use kga_lab::prmkr::{
    index_gen, keygen_owner, keygen_user, setup, KeywordUniverse, OwnerId, Postings, RPolicy,
    SetupConfig, UserId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let params = setup(SetupConfig::default(), &mut rng);
    let universe = KeywordUniverse::new(["invoice", "salary", "merger"])?;
    let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng)?;
    let mallory = keygen_user(&params, UserId(66), universe.len(), &mut rng)?;

    let postings: Postings = [("merger".to_string(), BTreeSet::new())].into();
    let index = index_gen(
        &params,
        &universe,
        &postings,
        &owner.secret,
        &mallory.public,
        RPolicy::OwnerShared,
        &mut rng,
    )?;

    let leaked_r = owner.secret.r;
    let report = demo_shared_r_forgery(
        &params,
        &universe,
        &leaked_r,
        &owner.public,
        &mallory,
        "merger",
        &index,
    )?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
