use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const UNIVERSE: &str = "invoice\nsalary\ntax\naudit\n";
const DICT: &str = "invoice\nsalary\ntax\naudit\npayroll\nmerger\n";

struct Lab {
    dir: TempDir,
}

impl Lab {
    fn new() -> Lab {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("words.txt"), UNIVERSE).unwrap();
        fs::write(dir.path().join("dict.txt"), DICT).unwrap();
        Lab { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.path().join(rel)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_kga-lab"))
            .current_dir(self.dir.path())
            .env("KGA_LAB_DIR", self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> Output {
        let out = self.run(args);
        assert!(
            out.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }

    /// setup, keygen for owner 1 and user 2, enrollment when hardened.
    fn ceremony(&self, mode: &str) {
        self.ok(&["--seed", "1", "setup", "--mode", mode]);
        self.ok(&[
            "--seed",
            "2",
            "keygen-owner",
            "--id",
            "1",
            "--universe",
            "words.txt",
        ]);
        self.ok(&["--seed", "3", "keygen-user", "--id", "2"]);
        if mode == "hardened" {
            self.ok(&["enroll", "--owner", "1", "--user", "2"]);
        }
    }

    fn index_and_trapdoor(&self, indexed: &str, queried: &str) {
        self.ok(&[
            "--seed",
            "4",
            "index",
            "--owner",
            "1",
            "--user",
            "2",
            "--keywords",
            indexed,
        ]);
        self.ok(&[
            "--seed",
            "5",
            "trapdoor",
            "--user",
            "2",
            "--owner",
            "1",
            "--keywords",
            queried,
        ]);
    }

    fn search_code(&self) -> i32 {
        self.code(&[
            "search",
            "--index",
            "public/index_1_2.json",
            "--trapdoor",
            "public/trapdoor_2_1.json",
        ])
    }

    fn attack_i_code(&self) -> i32 {
        self.code(&[
            "attack",
            "i",
            "--index",
            "public/index_1_2.json",
            "--owner-pk",
            "public/owner_1.pk.json",
            "--dict",
            "dict.txt",
        ])
    }
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path);
            }
        }
    }
    out.sort();
    out
}

fn secret_flag(path: &Path) -> bool {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v["secret"]
        .as_bool()
        .expect("envelope carries a secret flag")
}

#[test]
fn keygen_owner_writes_key_pair() {
    let lab = Lab::new();
    lab.ceremony("vulnerable");
    let sk = lab.path("private/owner_1/owner_1.sk.json");
    let pk = lab.path("public/owner_1.pk.json");
    assert!(secret_flag(&sk));
    assert!(!secret_flag(&pk));
    assert!(!secret_flag(&lab.path("public/universe.json")));
}

#[test]
fn search_exit_codes() {
    let lab = Lab::new();
    lab.ceremony("vulnerable");
    lab.index_and_trapdoor("salary,tax", "tax");
    assert_eq!(lab.search_code(), 0);
    lab.index_and_trapdoor("salary,tax", "audit");
    assert_eq!(lab.search_code(), 1);
    fs::write(
        lab.path("public/trapdoor_2_1.json"),
        "{\"schema\":\"other/v9\"}",
    )
    .unwrap();
    assert_eq!(lab.search_code(), 2);
}

#[test]
fn fresh_r_trapdoor_does_not_match() {
    let lab = Lab::new();
    lab.ceremony("vulnerable");
    lab.ok(&[
        "--seed",
        "4",
        "index",
        "--owner",
        "1",
        "--user",
        "2",
        "--keywords",
        "tax",
    ]);
    lab.ok(&[
        "--seed",
        "5",
        "trapdoor",
        "--user",
        "2",
        "--owner",
        "1",
        "--keywords",
        "tax",
        "--r",
        "fresh",
    ]);
    assert_eq!(lab.search_code(), 1);
}

#[test]
fn attack_i_exit_codes_follow_the_mode() {
    let vulnerable = Lab::new();
    vulnerable.ceremony("vulnerable");
    vulnerable.index_and_trapdoor("salary", "salary");
    assert_eq!(vulnerable.attack_i_code(), 0);

    let hardened = Lab::new();
    hardened.ceremony("hardened");
    hardened.index_and_trapdoor("salary", "salary");
    assert_eq!(hardened.search_code(), 0);
    assert_eq!(hardened.attack_i_code(), 3);
}

#[test]
fn attacks_refuse_secret_files() {
    let lab = Lab::new();
    lab.ceremony("vulnerable");
    lab.index_and_trapdoor("salary", "salary");
    let out = lab.run(&[
        "attack",
        "i",
        "--index",
        "public/index_1_2.json",
        "--owner-pk",
        "private/owner_1/owner_1.sk.json",
        "--dict",
        "dict.txt",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("secret"));
}

#[test]
fn attack_iv_depends_on_published_key() {
    let manifest =
        r#"[{"path":"a.txt","keywords":["salary"]},{"path":"b.txt","keywords":["tax","audit"]}]"#;
    for (mode, expected) in [("vulnerable", 0), ("hardened", 3)] {
        let lab = Lab::new();
        fs::write(lab.path("a.txt"), "payroll run").unwrap();
        fs::write(lab.path("b.txt"), "audit memo").unwrap();
        fs::write(lab.path("manifest.json"), manifest).unwrap();
        lab.ceremony(mode);
        lab.ok(&[
            "--seed",
            "6",
            "ingest",
            "--owner",
            "1",
            "--user",
            "2",
            "--manifest",
            "manifest.json",
        ]);
        let out = lab.run(&["attack", "iv", "--params", "public/params.json"]);
        assert_eq!(out.status.code(), Some(expected), "{mode}");
        let text = String::from_utf8_lossy(&out.stdout);
        if expected == 0 {
            assert!(text.contains("payroll run") && text.contains("audit memo"));
        } else {
            assert!(text.contains("no key in public parameters"));
        }
    }
}

#[test]
fn ingest_search_retrieve_round_trip() {
    let lab = Lab::new();
    fs::write(lab.path("a.txt"), "first").unwrap();
    fs::write(lab.path("b.txt"), "second").unwrap();
    fs::write(
        lab.path("manifest.json"),
        r#"[{"path":"a.txt","keywords":["tax"]},{"path":"b.txt","keywords":["tax","salary"]}]"#,
    )
    .unwrap();
    lab.ceremony("hardened");
    lab.ok(&[
        "--seed",
        "6",
        "ingest",
        "--owner",
        "1",
        "--user",
        "2",
        "--manifest",
        "manifest.json",
    ]);
    lab.ok(&[
        "trapdoor",
        "--user",
        "2",
        "--owner",
        "1",
        "--keywords",
        "tax,salary",
    ]);
    lab.ok(&[
        "search",
        "--index",
        "public/index_1_2.json",
        "--trapdoor",
        "public/trapdoor_2_1.json",
        "--out",
        "result.json",
    ]);
    let out = lab.ok(&[
        "retrieve",
        "--result",
        "result.json",
        "--key",
        "private/owner_1/doc_key.json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let docs = v["documents"].as_array().unwrap();
    assert_eq!(docs.len(), 1);
    assert_eq!(docs[0]["plaintext"], "second");
}

#[test]
fn public_directory_holds_no_secrets() {
    for mode in ["vulnerable", "hardened"] {
        let lab = Lab::new();
        fs::write(lab.path("a.txt"), "doc").unwrap();
        fs::write(
            lab.path("manifest.json"),
            r#"[{"path":"a.txt","keywords":["tax"]}]"#,
        )
        .unwrap();
        lab.ceremony(mode);
        lab.ok(&[
            "--seed",
            "6",
            "ingest",
            "--owner",
            "1",
            "--user",
            "2",
            "--manifest",
            "manifest.json",
        ]);
        lab.ok(&[
            "trapdoor",
            "--user",
            "2",
            "--owner",
            "1",
            "--keywords",
            "tax",
        ]);
        let public = files_under(&lab.path("public"));
        assert!(public.len() >= 7, "{mode}: {public:?}");
        for file in &public {
            assert!(!secret_flag(file), "{mode}: {} is secret", file.display());
        }
        for file in files_under(&lab.path("private")) {
            assert!(
                secret_flag(&file),
                "{mode}: {} is not secret",
                file.display()
            );
        }
    }
}

#[test]
fn seeded_commands_are_reproducible() {
    let a = Lab::new();
    let b = Lab::new();
    for lab in [&a, &b] {
        lab.ceremony("vulnerable");
        lab.index_and_trapdoor("salary,tax", "tax");
    }
    let files = files_under(&a.path("public"));
    for fa in files {
        let rel = fa.strip_prefix(a.dir.path()).unwrap();
        assert_eq!(
            fs::read(&fa).unwrap(),
            fs::read(b.dir.path().join(rel)).unwrap(),
            "{}",
            rel.display()
        );
    }
}

#[test]
fn help_lists_every_command() {
    let lab = Lab::new();
    let out = lab.ok(&["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in [
        "setup",
        "keygen-owner",
        "keygen-user",
        "enroll",
        "index",
        "trapdoor",
        "search",
        "ingest",
        "retrieve",
        "attack",
        "demo",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from --help");
    }
}
