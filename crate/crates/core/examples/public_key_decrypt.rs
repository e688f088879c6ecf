//! Attack IV: the document key ships inside the public parameters, so an
//! observer of the cloud's public directory reads every document.
//!
//! cargo run --example public_key_decrypt

use kga_lab::attacks::attack_public_key_decrypt;
use kga_lab::demo::fixture_corpus;
use kga_lab::envelope::SCHEMA_V1;
use kga_lab::prmkr::{
    keygen_owner, keygen_user, setup, KeywordUniverse, OwnerId, PublicParams, SetupConfig, UserId,
};
use kga_lab::store::{ingest, CloudDirectory, IngestScheme};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let tmp = tempfile::tempdir()?;
    let cloud = CloudDirectory::open(tmp.path())?;

    let corpus = fixture_corpus();
    let universe = KeywordUniverse::new([
        "invoice", "salary", "tax", "audit", "payroll", "contract", "merger", "lawsuit",
    ])?;
    let params = setup(SetupConfig::default(), &mut rng);
    let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng)?;
    let user = keygen_user(&params, UserId(1), universe.len(), &mut rng)?;
    let (records, _) = ingest(
        &params,
        &universe,
        &corpus,
        &owner.secret,
        &user.public,
        IngestScheme::Vulnerable,
        &mut rng,
    )?;
    cloud.write_public(SCHEMA_V1, "params.json", &params)?;
    cloud.write_records(SCHEMA_V1, &records)?;

    // The attacker sees public/ and nothing else.
    let view = cloud.public_view();
    let leaked: PublicParams = view.read("params.json")?;
    let recovery = attack_public_key_decrypt(&leaked, &view.ciphertexts()?)?;
    for pt in recovery.plaintexts.iter().flatten() {
        println!("{}", String::from_utf8_lossy(pt));
    }
    Ok(())
}
