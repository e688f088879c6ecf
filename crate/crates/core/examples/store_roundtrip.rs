//! Encrypted store: ingest documents into a cloud directory, run a
//! conjunctive search and decrypt the matches.
//!
//! cargo run --example store_roundtrip

use kga_lab::demo::fixture_corpus;
use kga_lab::envelope::SCHEMA_V1;
use kga_lab::prmkr::{
    keygen_owner, keygen_user, search, setup, trapdoor_gen, KeywordUniverse, OwnerId, SetupConfig,
    UserId,
};
use kga_lab::store::{ingest, retrieve, CloudDirectory, IngestScheme};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    let tmp = tempfile::tempdir()?;
    let cloud = CloudDirectory::open(tmp.path())?;

    let universe = KeywordUniverse::new([
        "invoice", "salary", "tax", "audit", "payroll", "contract", "merger", "lawsuit",
    ])?;
    let params = setup(SetupConfig::default(), &mut rng);
    let owner = keygen_owner(&params, OwnerId(1), &universe, &mut rng)?;
    let user = keygen_user(&params, UserId(1), universe.len(), &mut rng)?;

    let (records, index) = ingest(
        &params,
        &universe,
        &fixture_corpus(),
        &owner.secret,
        &user.public,
        IngestScheme::Vulnerable,
        &mut rng,
    )?;
    cloud.write_records(SCHEMA_V1, &records)?;
    cloud.write_public(SCHEMA_V1, "index_1_1.json", &index)?;
    println!(
        "stored {} documents under {}",
        records.len(),
        cloud.docs_dir().display()
    );

    let query = ["payroll", "tax"];
    let trapdoor = trapdoor_gen(
        &params,
        &universe,
        &query,
        &user.secret,
        &owner.public,
        &owner.secret.r,
    )?;
    let result = search(&cloud.read_public("index_1_1.json")?, &trapdoor)?;
    let key = params
        .doc_key
        .as_ref()
        .expect("vulnerable parameters carry the key");
    for (id, plaintext) in retrieve(&result, &cloud.read_records()?, key)? {
        println!("{id}: {}", String::from_utf8_lossy(&plaintext));
    }
    Ok(())
}
