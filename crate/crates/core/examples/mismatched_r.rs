//! Attack III, case 2: if the trapdoor is built with randomness independent
//! of the owner's `r_i`, the search equation can never hold.
//!
//! cargo run --example mismatched_r

use kga_lab::attacks::{demo_mismatched_r_failure, TrapdoorRandomness};
use kga_lab::prmkr::{
    keygen_owner, keygen_user, setup, KeywordUniverse, OwnerId, SetupConfig, UserId,
};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let params = setup(
        SetupConfig {
            transcripts: true,
            ..SetupConfig::default()
        },
        &mut rng,
    );
    let universe = KeywordUniverse::new(["invoice", "salary", "tax"])?;
    let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng)?;
    let user = keygen_user(&params, UserId(1), universe.len(), &mut rng)?;

    for randomness in [
        TrapdoorRandomness::Independent,
        TrapdoorRandomness::EqualToOwner,
    ] {
        let report = demo_mismatched_r_failure(
            &params, &universe, &owner, &user, "salary", 25, randomness, &mut rng,
        )?;
        println!(
            "{randomness:?}: {}/{} matches, findings {:?}",
            report.matches.unwrap_or(0),
            report.trials.unwrap_or(0),
            report.findings
        );
    }
    Ok(())
}
