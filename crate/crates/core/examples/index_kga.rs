//! Attack I: the cloud server recovers indexed keywords from an index and
//! the owner's public key with an offline dictionary scan.
//!
//! cargo run --example index_kga

use std::collections::BTreeSet;

use kga_lab::attacks::attack_index_kga;
use kga_lab::demo::fixture_dictionary;
use kga_lab::prmkr::{
    index_gen, keygen_owner, keygen_user, setup, KeywordUniverse, OwnerId, Postings, RPolicy,
    SetupConfig, UserId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let params = setup(SetupConfig::default(), &mut rng);
    let universe = KeywordUniverse::new(["invoice", "salary", "tax", "audit", "merger"])?;
    let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng)?;
    let user = keygen_user(&params, UserId(1), universe.len(), &mut rng)?;

    let postings: Postings = ["salary", "merger"]
        .into_iter()
        .map(|k| (k.to_string(), BTreeSet::new()))
        .collect();
    let index = index_gen(
        &params,
        &universe,
        &postings,
        &owner.secret,
        &user.public,
        RPolicy::OwnerShared,
        &mut rng,
    )?;

    let dict = fixture_dictionary(500).prepare(&params);
    let report = attack_index_kga(&index, &owner.public, &dict);
    for target in &report.targets {
        println!("{:<14} -> {:?}", target.target, target.recovered);
    }
    println!(
        "{} candidates, {} pairings, {:.2}s",
        report.candidates_tested,
        report.pairings_evaluated,
        report.elapsed.as_secs_f64()
    );
    Ok(())
}
