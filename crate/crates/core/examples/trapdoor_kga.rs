//! Attack II: anyone holding a trapdoor and the user's public key learns the
//! queried keywords.
//!
//! cargo run --example trapdoor_kga

use kga_lab::attacks::attack_trapdoor_kga;
use kga_lab::demo::fixture_dictionary;
use kga_lab::prmkr::{
    keygen_owner, keygen_user, setup, trapdoor_gen, KeywordUniverse, OwnerId, SetupConfig, UserId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let params = setup(SetupConfig::default(), &mut rng);
    let universe = KeywordUniverse::new(["invoice", "salary", "tax", "audit", "lawsuit"])?;
    let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng)?;
    let user = keygen_user(&params, UserId(2), universe.len(), &mut rng)?;

    let query = ["tax", "lawsuit"];
    let trapdoor = trapdoor_gen(
        &params,
        &universe,
        &query,
        &user.secret,
        &owner.public,
        &owner.secret.r,
    )?;

    let dict = fixture_dictionary(500).prepare(&params);
    let report = attack_trapdoor_kga(&trapdoor, &user.public, &dict);
    println!("query {query:?}");
    for target in &report.targets {
        println!("{:<17} -> {:?}", target.target, target.recovered);
    }
    println!("succeeded: {}", report.succeeded);
    Ok(())
}
