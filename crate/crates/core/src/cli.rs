//! `kga-lab` command-line harness.
//!
//! Every party is a directory under the cloud root (`--dir`, or
//! `KGA_LAB_DIR`): `public/` is what the cloud and any attacker see,
//! `private/<role>/` holds a role's secrets. Artifacts are JSON envelopes.
//!
//! Exit codes: `0` success (for `search`: match; for `attack`: vulnerability
//! demonstrated), `1` search without match, `2` error, `3` attack failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;
use serde_json::json;

use crate::attacks::{
    attack_index_kga, attack_public_key_decrypt, attack_trapdoor_kga, demo_mismatched_r_failure,
    demo_shared_r_forgery, AttackReport, Dictionary, TrapdoorRandomness,
};
use crate::demo::{run_demo, DemoMode};
use crate::envelope::{Artifact, Envelope, SCHEMA_V1, SCHEMA_V1_HARDENED};
use crate::group::Scalar;
use crate::hardened::{
    h_enroll_owner, h_index_gen, h_keygen_user, h_setup, h_trapdoor_gen, AlphaShare,
    HardenedUserKey, MasterSecret, OwnerSearchCredential,
};
use crate::prmkr::{
    index_gen, keygen_owner, keygen_user, search, setup, trapdoor_gen, DocKey, EncryptedIndex,
    KeywordUniverse, MatchResult, OwnerId, OwnerKeyMaterial, OwnerPublicKey, OwnerSecretKey,
    ParamsMode, Postings, PublicParams, RPolicy, SecurityLevel, SetupConfig, Trapdoor, UserId,
    UserKeyMaterial, UserPublicKey, UserSecretKey,
};
use crate::store::{ingest, retrieve, CloudDirectory, Document, DocumentRecord, IngestScheme};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO_MATCH: u8 = 1;
pub const EXIT_ERROR: u8 = 2;
pub const EXIT_ATTACK_FAILED: u8 = 3;

const AUTHORITY: &str = "authority";
const PARAMS_FILE: &str = "params.json";
const UNIVERSE_FILE: &str = "universe.json";
const MSK_FILE: &str = "msk.json";

#[derive(Parser, Debug)]
#[command(
    name = "kga-lab",
    version,
    about = "Keyword-guessing lab for pairing-based multi-owner search"
)]
pub struct Cli {
    /// Cloud directory root.
    #[arg(long, env = "KGA_LAB_DIR", default_value = ".", global = true)]
    pub dir: PathBuf,
    /// Seed for a deterministic generator; system entropy when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate public parameters (and the master secret in hardened mode).
    Setup {
        #[arg(long, value_enum, default_value_t = ModeArg::Vulnerable)]
        mode: ModeArg,
    },
    /// Generate an owner key pair over a keyword universe (one word per line).
    KeygenOwner {
        #[arg(long)]
        id: u32,
        #[arg(long)]
        universe: PathBuf,
    },
    /// Generate a user key pair (blinded by the master secret in hardened mode).
    KeygenUser {
        #[arg(long)]
        id: u32,
        /// Number of key positions; defaults to the universe size.
        #[arg(long)]
        q: Option<usize>,
    },
    /// Hardened mode: register an owner's r_i, hand the owner its alpha share
    /// and issue a search credential to a user.
    Enroll {
        #[arg(long)]
        owner: u32,
        #[arg(long)]
        user: u32,
    },
    /// Build an index over keywords with empty posting lists.
    Index {
        #[arg(long)]
        owner: u32,
        #[arg(long)]
        user: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        keywords: Vec<String>,
        #[arg(long, value_enum, default_value_t = RPolicyArg::Owner)]
        r_policy: RPolicyArg,
    },
    /// Build a trapdoor for query keywords.
    Trapdoor {
        #[arg(long)]
        user: u32,
        #[arg(long)]
        owner: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        keywords: Vec<String>,
        /// Vulnerable mode: use the owner's r_i or a fresh value.
        #[arg(long, value_enum, default_value_t = RPolicyArg::Owner)]
        r: RPolicyArg,
    },
    /// Run the search test of a trapdoor against an index.
    Search {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        trapdoor: PathBuf,
        /// Also write the match result envelope here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encrypt documents from a manifest and build their index.
    Ingest {
        #[arg(long)]
        owner: u32,
        #[arg(long)]
        user: u32,
        /// JSON list of {"path": ..., "keywords": [...]}; paths relative to
        /// the manifest.
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Decrypt the documents of a match result.
    Retrieve {
        #[arg(long)]
        result: PathBuf,
        /// Document key file; defaults to the key in the public parameters.
        #[arg(long)]
        key: Option<PathBuf>,
    },
    /// Run one of the attacks.
    Attack(AttackArgs),
    /// End-to-end demonstration report.
    Demo {
        #[arg(long, value_enum, default_value_t = DemoModeArg::Both)]
        mode: DemoModeArg,
    },
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[command(subcommand)]
    pub attack: AttackCommand,
}

#[derive(Subcommand, Debug)]
pub enum AttackCommand {
    /// Offline keyword guessing against an index.
    I {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        owner_pk: PathBuf,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Offline keyword guessing against a trapdoor.
    Ii {
        #[arg(long)]
        trapdoor: PathBuf,
        #[arg(long)]
        user_pk: PathBuf,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Case 1: trapdoor forgery with a shared r_i. Case 2: mismatched r.
    Iii {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        case: u8,
        #[arg(long)]
        owner: u32,
        #[arg(long)]
        user: u32,
        #[arg(long)]
        keyword: String,
        /// Case 2 only.
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Case 2 control: reuse the owner's r_i in every trapdoor.
        #[arg(long)]
        equal_r: bool,
    },
    /// Decrypt documents with the key found in the public parameters.
    Iv {
        #[arg(long)]
        params: PathBuf,
        /// Document record files; defaults to everything in public/docs.
        #[arg(long, num_args = 1..)]
        ct: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Vulnerable,
    Hardened,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RPolicyArg {
    Owner,
    Fresh,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DemoModeArg {
    Vulnerable,
    Hardened,
    Both,
}

struct Ctx {
    dir: CloudDirectory,
    rng: ChaCha20Rng,
}

fn owner_role(id: u32) -> String {
    format!("owner_{id}")
}

fn user_role(id: u32) -> String {
    format!("user_{id}")
}

fn schema_for(params: &PublicParams) -> &'static str {
    match params.mode() {
        ParamsMode::Vulnerable => SCHEMA_V1,
        ParamsMode::Hardened => SCHEMA_V1_HARDENED,
    }
}

/// Loads a public artifact from an arbitrary path, refusing secret files.
fn load_public<T: Artifact>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let env = Envelope::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    if env.secret {
        anyhow::bail!(
            "{}: refusing to read secret artifact {:?} in a public role",
            path.display(),
            env.kind
        );
    }
    env.open()
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, value: &impl serde::Serialize) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

impl Ctx {
    fn params(&self) -> anyhow::Result<PublicParams> {
        let params: PublicParams = self.dir.read_public(PARAMS_FILE)?;
        params.validate()?;
        Ok(params)
    }

    fn universe(&self) -> anyhow::Result<KeywordUniverse> {
        Ok(self.dir.read_public(UNIVERSE_FILE)?)
    }

    fn msk(&self) -> anyhow::Result<MasterSecret> {
        Ok(self.dir.read_private(AUTHORITY, MSK_FILE)?)
    }

    fn owner_sk(&self, id: u32) -> anyhow::Result<OwnerSecretKey> {
        Ok(self
            .dir
            .read_private(&owner_role(id), &format!("owner_{id}.sk.json"))?)
    }

    fn owner_pk(&self, id: u32) -> anyhow::Result<OwnerPublicKey> {
        Ok(self.dir.read_public(&format!("owner_{id}.pk.json"))?)
    }

    fn user_sk(&self, id: u32) -> anyhow::Result<UserSecretKey> {
        Ok(self
            .dir
            .read_private(&user_role(id), &format!("user_{id}.sk.json"))?)
    }

    fn hardened_user_sk(&self, id: u32) -> anyhow::Result<HardenedUserKey> {
        Ok(self
            .dir
            .read_private(&user_role(id), &format!("user_{id}.sk.json"))?)
    }

    fn user_pk(&self, id: u32) -> anyhow::Result<UserPublicKey> {
        Ok(self.dir.read_public(&format!("user_{id}.pk.json"))?)
    }

    fn alpha(&self, owner: u32) -> anyhow::Result<AlphaShare> {
        Ok(self.dir.read_private(&owner_role(owner), "alpha.json")?)
    }
}

fn index_name(owner: u32, user: u32) -> String {
    format!("index_{owner}_{user}.json")
}

fn trapdoor_name(user: u32, owner: u32) -> String {
    format!("trapdoor_{user}_{owner}.json")
}

fn attack_exit(report: &AttackReport) -> u8 {
    if report.succeeded {
        EXIT_OK
    } else {
        EXIT_ATTACK_FAILED
    }
}

#[derive(Deserialize)]
struct ManifestEntry {
    path: PathBuf,
    keywords: Vec<String>,
}

fn execute(cli: Cli, out: &mut dyn Write) -> anyhow::Result<u8> {
    let rng = match cli.seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_entropy(),
    };
    if let Command::Demo { mode } = cli.command {
        let mode = match mode {
            DemoModeArg::Vulnerable => DemoMode::Vulnerable,
            DemoModeArg::Hardened => DemoMode::Hardened,
            DemoModeArg::Both => DemoMode::Both,
        };
        let report = run_demo(mode, cli.seed.unwrap_or(1))?;
        emit(out, &report)?;
        return Ok(if report.all_expectations_met() {
            EXIT_OK
        } else {
            EXIT_ATTACK_FAILED
        });
    }
    if let Command::Search {
        index,
        trapdoor,
        out: result_path,
    } = &cli.command
    {
        let index: EncryptedIndex = load_public(index)?;
        let trapdoor: Trapdoor = load_public(trapdoor)?;
        let result = search(&index, &trapdoor)?;
        if let Some(path) = result_path {
            fs::write(path, crate::envelope::encode(SCHEMA_V1, &result)?)?;
        }
        emit(out, &result)?;
        return Ok(if result.matched {
            EXIT_OK
        } else {
            EXIT_NO_MATCH
        });
    }

    let mut ctx = Ctx {
        dir: CloudDirectory::open(&cli.dir)?,
        rng,
    };
    match cli.command {
        Command::Setup { mode } => {
            let written = match mode {
                ModeArg::Vulnerable => {
                    let params = setup(SetupConfig::default(), &mut ctx.rng);
                    vec![ctx.dir.write_public(SCHEMA_V1, PARAMS_FILE, &params)?]
                }
                ModeArg::Hardened => {
                    let (params, msk) = h_setup(SecurityLevel::Bits128, false, &mut ctx.rng);
                    vec![
                        ctx.dir
                            .write_public(SCHEMA_V1_HARDENED, PARAMS_FILE, &params)?,
                        ctx.dir
                            .write_private(SCHEMA_V1_HARDENED, AUTHORITY, MSK_FILE, &msk)?,
                    ]
                }
            };
            emit(out, &json!({ "written": written }))?;
        }
        Command::KeygenOwner { id, universe } => {
            let params = ctx.params()?;
            let schema = schema_for(&params);
            let text = fs::read_to_string(&universe)
                .map_err(|e| anyhow::anyhow!("{}: {e}", universe.display()))?;
            let universe =
                KeywordUniverse::new(text.lines().map(str::trim).filter(|l| !l.is_empty()))?;
            match ctx.universe() {
                Ok(existing) if existing != universe => {
                    anyhow::bail!("universe differs from the one already in public/")
                }
                Ok(_) => {}
                Err(_) => {
                    ctx.dir.write_public(schema, UNIVERSE_FILE, &universe)?;
                }
            }
            let OwnerKeyMaterial { secret, public } =
                keygen_owner(&params, OwnerId(id), &universe, &mut ctx.rng)?;
            let sk = ctx.dir.write_private(
                schema,
                &owner_role(id),
                &format!("owner_{id}.sk.json"),
                &secret,
            )?;
            let pk = ctx
                .dir
                .write_public(schema, &format!("owner_{id}.pk.json"), &public)?;
            emit(out, &json!({ "written": [sk, pk] }))?;
        }
        Command::KeygenUser { id, q } => {
            let params = ctx.params()?;
            let schema = schema_for(&params);
            let q = match q {
                Some(q) => q,
                None => ctx.universe()?.len(),
            };
            let (sk, pk) = match params.mode() {
                ParamsMode::Vulnerable => {
                    let UserKeyMaterial { secret, public } =
                        keygen_user(&params, UserId(id), q, &mut ctx.rng)?;
                    let sk = ctx.dir.write_private(
                        schema,
                        &user_role(id),
                        &format!("user_{id}.sk.json"),
                        &secret,
                    )?;
                    (
                        sk,
                        ctx.dir
                            .write_public(schema, &format!("user_{id}.pk.json"), &public)?,
                    )
                }
                ParamsMode::Hardened => {
                    let msk = ctx.msk()?;
                    let key = h_keygen_user(&msk, &params, UserId(id), q, &mut ctx.rng)?;
                    let sk = ctx.dir.write_private(
                        schema,
                        &user_role(id),
                        &format!("user_{id}.sk.json"),
                        &key,
                    )?;
                    (
                        sk,
                        ctx.dir
                            .write_public(schema, &format!("user_{id}.pk.json"), &key.public)?,
                    )
                }
            };
            emit(out, &json!({ "written": [sk, pk] }))?;
        }
        Command::Enroll { owner, user } => {
            let params = ctx.params()?;
            if params.mode() != ParamsMode::Hardened {
                anyhow::bail!("enroll requires hardened parameters");
            }
            let schema = schema_for(&params);
            let mut msk = ctx.msk()?;
            msk.register_owner(&ctx.owner_sk(owner)?);
            let credential = h_enroll_owner(&msk, &ctx.owner_pk(owner)?)?;
            let written = vec![
                ctx.dir.write_private(schema, AUTHORITY, MSK_FILE, &msk)?,
                ctx.dir.write_private(
                    schema,
                    &owner_role(owner),
                    "alpha.json",
                    &msk.alpha_share(),
                )?,
                ctx.dir.write_private(
                    schema,
                    &user_role(user),
                    &format!("owner_{owner}.credential.json"),
                    &credential,
                )?,
            ];
            emit(out, &json!({ "written": written }))?;
        }
        Command::Index {
            owner,
            user,
            keywords,
            r_policy,
        } => {
            let params = ctx.params()?;
            let universe = ctx.universe()?;
            let sk = ctx.owner_sk(owner)?;
            let user_pub = ctx.user_pk(user)?;
            let postings: Postings = keywords
                .into_iter()
                .map(|k| (k, Default::default()))
                .collect();
            let index = match params.mode() {
                ParamsMode::Vulnerable => {
                    let policy = match r_policy {
                        RPolicyArg::Owner => RPolicy::OwnerShared,
                        RPolicyArg::Fresh => RPolicy::Fresh,
                    };
                    index_gen(
                        &params,
                        &universe,
                        &postings,
                        &sk,
                        &user_pub,
                        policy,
                        &mut ctx.rng,
                    )?
                }
                ParamsMode::Hardened => h_index_gen(
                    &params,
                    &universe,
                    &postings,
                    &sk,
                    &user_pub,
                    &ctx.alpha(owner)?,
                )?,
            };
            let path =
                ctx.dir
                    .write_public(schema_for(&params), &index_name(owner, user), &index)?;
            emit(out, &json!({ "written": [path] }))?;
        }
        Command::Trapdoor {
            user,
            owner,
            keywords,
            r,
        } => {
            let params = ctx.params()?;
            let universe = ctx.universe()?;
            let trapdoor = match params.mode() {
                ParamsMode::Vulnerable => {
                    let r = match r {
                        RPolicyArg::Owner => ctx.owner_sk(owner)?.r,
                        RPolicyArg::Fresh => Scalar::random_nonzero(&mut ctx.rng),
                    };
                    trapdoor_gen(
                        &params,
                        &universe,
                        &keywords,
                        &ctx.user_sk(user)?,
                        &ctx.owner_pk(owner)?,
                        &r,
                    )?
                }
                ParamsMode::Hardened => {
                    let credential: OwnerSearchCredential = ctx.dir.read_private(
                        &user_role(user),
                        &format!("owner_{owner}.credential.json"),
                    )?;
                    h_trapdoor_gen(
                        &params,
                        &universe,
                        &keywords,
                        &ctx.hardened_user_sk(user)?,
                        &credential,
                    )?
                }
            };
            let path = ctx.dir.write_public(
                schema_for(&params),
                &trapdoor_name(user, owner),
                &trapdoor,
            )?;
            emit(out, &json!({ "written": [path] }))?;
        }
        Command::Ingest {
            owner,
            user,
            manifest,
        } => {
            let params = ctx.params()?;
            let schema = schema_for(&params);
            let universe = ctx.universe()?;
            let text = fs::read_to_string(&manifest)
                .map_err(|e| anyhow::anyhow!("{}: {e}", manifest.display()))?;
            let entries: Vec<ManifestEntry> = serde_json::from_str(&text)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let docs = entries
                .into_iter()
                .map(|e| {
                    let path = base.join(&e.path);
                    let plaintext = fs::read(&path)
                        .map_err(|err| anyhow::anyhow!("{}: {err}", path.display()))?;
                    Ok(Document {
                        plaintext,
                        keywords: e.keywords,
                    })
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let sk = ctx.owner_sk(owner)?;
            let user_pub = ctx.user_pk(user)?;
            let (records, index) = match params.mode() {
                ParamsMode::Vulnerable => ingest(
                    &params,
                    &universe,
                    &docs,
                    &sk,
                    &user_pub,
                    IngestScheme::Vulnerable,
                    &mut ctx.rng,
                )?,
                ParamsMode::Hardened => {
                    let role = owner_role(owner);
                    let doc_key = match ctx.dir.read_private::<DocKey>(&role, "doc_key.json") {
                        Ok(k) => k,
                        Err(_) => {
                            let k = DocKey::random(&mut ctx.rng);
                            ctx.dir.write_private(schema, &role, "doc_key.json", &k)?;
                            k
                        }
                    };
                    let alpha = ctx.alpha(owner)?;
                    ingest(
                        &params,
                        &universe,
                        &docs,
                        &sk,
                        &user_pub,
                        IngestScheme::Hardened {
                            alpha: &alpha,
                            doc_key: &doc_key,
                        },
                        &mut ctx.rng,
                    )?
                }
            };
            ctx.dir.write_records(schema, &records)?;
            let path = ctx
                .dir
                .write_public(schema, &index_name(owner, user), &index)?;
            let ids: Vec<_> = records.iter().map(|r| &r.id).collect();
            emit(out, &json!({ "documents": ids, "index": path }))?;
        }
        Command::Retrieve { result, key } => {
            let result: MatchResult = load_public(&result)?;
            let key = match key {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
                    crate::envelope::decode::<DocKey>(&text)?
                }
                None => ctx.params()?.doc_key.ok_or_else(|| {
                    anyhow::anyhow!("no document key given and none in public parameters")
                })?,
            };
            let records = ctx.dir.read_records()?;
            let docs = retrieve(&result, &records, &key)?;
            let docs: Vec<_> = docs
                .into_iter()
                .map(|(id, pt)| json!({ "id": id, "plaintext": String::from_utf8_lossy(&pt) }))
                .collect();
            emit(out, &json!({ "documents": docs }))?;
        }
        Command::Attack(args) => return run_attack(&mut ctx, args.attack, out),
        Command::Demo { .. } | Command::Search { .. } => unreachable!("handled above"),
    }
    Ok(EXIT_OK)
}

fn run_attack(ctx: &mut Ctx, attack: AttackCommand, out: &mut dyn Write) -> anyhow::Result<u8> {
    let report = match attack {
        AttackCommand::I {
            index,
            owner_pk,
            dict,
        } => {
            let params = ctx.params()?;
            let index: EncryptedIndex = load_public(&index)?;
            let owner_pk: OwnerPublicKey = load_public(&owner_pk)?;
            let dict = Dictionary::from_lines(&fs::read_to_string(&dict)?)?.prepare(&params);
            attack_index_kga(&index, &owner_pk, &dict)
        }
        AttackCommand::Ii {
            trapdoor,
            user_pk,
            dict,
        } => {
            let params = ctx.params()?;
            let trapdoor: Trapdoor = load_public(&trapdoor)?;
            let user_pk: UserPublicKey = load_public(&user_pk)?;
            let dict = Dictionary::from_lines(&fs::read_to_string(&dict)?)?.prepare(&params);
            attack_trapdoor_kga(&trapdoor, &user_pk, &dict)
        }
        AttackCommand::Iii {
            case,
            owner,
            user,
            keyword,
            trials,
            equal_r,
        } => {
            let params = ctx.params()?;
            let universe = ctx.universe()?;
            let owner_pub = ctx.owner_pk(owner)?;
            let user_material = UserKeyMaterial {
                secret: ctx.user_sk(user)?,
                public: ctx.user_pk(user)?,
            };
            if case == 1 {
                // The case-1 premise: the owner's r_i was handed to users.
                let r_i = ctx.owner_sk(owner)?.r;
                let index: EncryptedIndex = ctx.dir.read_public(&index_name(owner, user))?;
                demo_shared_r_forgery(
                    &params,
                    &universe,
                    &r_i,
                    &owner_pub,
                    &user_material,
                    &keyword,
                    &index,
                )?
            } else {
                let owner_material = OwnerKeyMaterial {
                    secret: ctx.owner_sk(owner)?,
                    public: owner_pub,
                };
                let randomness = if equal_r {
                    TrapdoorRandomness::EqualToOwner
                } else {
                    TrapdoorRandomness::Independent
                };
                demo_mismatched_r_failure(
                    &params,
                    &universe,
                    &owner_material,
                    &user_material,
                    &keyword,
                    trials,
                    randomness,
                    &mut ctx.rng,
                )?
            }
        }
        AttackCommand::Iv { params, ct } => {
            let params: PublicParams = load_public(&params)?;
            let records: Vec<DocumentRecord> = if ct.is_empty() {
                ctx.dir.public_view().records()?
            } else {
                ct.iter()
                    .map(|p| load_public(p))
                    .collect::<anyhow::Result<_>>()?
            };
            let cts: Vec<_> = records.iter().map(|r| r.ciphertext.clone()).collect();
            match attack_public_key_decrypt(&params, &cts) {
                Ok(recovery) => {
                    let plaintexts: Vec<_> = recovery
                        .plaintexts
                        .iter()
                        .map(|p| p.as_ref().map(|p| String::from_utf8_lossy(p).into_owned()))
                        .collect();
                    emit(
                        out,
                        &json!({ "report": recovery.report, "plaintexts": plaintexts }),
                    )?;
                    return Ok(attack_exit(&recovery.report));
                }
                Err(e) => {
                    emit(
                        out,
                        &json!({ "attack": "IV", "succeeded": false, "error": e.to_string() }),
                    )?;
                    return Ok(EXIT_ATTACK_FAILED);
                }
            }
        }
    };
    eprintln!("attack finished in {:.3}s", report.elapsed.as_secs_f64());
    emit(out, &report)?;
    Ok(attack_exit(&report))
}

/// Parses `args` and runs the command, writing JSON to `out` and
/// diagnostics to stderr. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
