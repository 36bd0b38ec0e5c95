use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn phonfeat(args: &[&str], stdin: &str) -> Output {
    phonfeat_env(args, stdin, None)
}

fn phonfeat_env(args: &[&str], stdin: &str, env_data: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_phonfeat"));
    cmd.args(args)
        .arg("--data-dir")
        .arg(data_dir())
        .env_remove("PHONFEAT_DATA")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some(d) = env_data {
        cmd.env("PHONFEAT_DATA", d);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn validate_shipped_data() {
    let o = phonfeat(&["validate"], "");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("en\tok\t38 phonemes (24 consonantal, 14 vocalic)"), "{s}");
    assert!(s.contains("cmn\tok\t37 phonemes (21 consonantal, 16 vocalic), 3 allophones"), "{s}");
    let o = phonfeat(&["validate", "--lang", "cmn"], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("en\t"));
}

fn copy_data(to: &Path) {
    for f in ["en.tsv", "cmn.tsv", "arpabet_to_sampa.tsv", "pinyin_to_sampa.tsv"] {
        std::fs::copy(data_dir().join(f), to.join(f)).unwrap();
    }
}

#[test]
fn validate_reports_seeded_fault() {
    let dir = tempfile::tempdir().unwrap();
    copy_data(dir.path());
    let cmn = std::fs::read_to_string(dir.path().join("cmn.tsv")).unwrap();
    let faulty: String = cmn
        .lines()
        .map(|l| {
            if l.starts_with("p\t") {
                l.replacen("OBSTRUENT", "OBSTRUENT+VOICE", 1)
            } else {
                l.to_string()
            }
        })
        .map(|l| l + "\n")
        .collect();
    std::fs::write(dir.path().join("cmn.tsv"), faulty).unwrap();
    let o = phonfeat_env(&["validate"], "", Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.contains("cmn\tFAIL\t/p/: "), "{s}");
    assert!(s.contains("en\tok"), "{s}");
}

#[test]
fn env_overrides_flag() {
    let o = phonfeat_env(&["table", "--from", "en", "--to", "cmn"], "", Some(Path::new("/nonexistent-phonfeat")));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonexistent-phonfeat"));
}

#[test]
fn features_command() {
    let o = phonfeat(&["features", "cmn", "p_h"], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "CONSONANTAL OBSTRUENT SPREAD_GLOTTIS PLOSIVE LABIAL\n");
    let o = phonfeat(&["features", "en", "k"], "");
    assert_eq!(stdout(&o), "CONSONANTAL OBSTRUENT PLOSIVE DORSAL (HIGH)\n");
    let o = phonfeat(&["--format", "json", "features", "en", "m"], "");
    assert_eq!(
        stdout(&o),
        "{\"sampa\":\"m\",\"lang\":\"en\",\"features\":[\"CONSONANTAL\",\"SONORANT\",\"VOICE\",\"NASAL\",\"LABIAL\"],\"optional\":[],\"allophone_of\":null}\n"
    );
    assert_eq!(phonfeat(&["features", "en", "q"], "").status.code(), Some(3));
    assert_eq!(phonfeat(&["features", "xx", "p"], "").status.code(), Some(1));
}

#[test]
fn encode_tsv_and_json() {
    let input = "en: M AH0\n\ncmn: ni3 hao3 .\n";
    let o = phonfeat(&["encode", "-"], input);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let blocks: Vec<&str> = s.split("\n\n").collect();
    assert_eq!(blocks.len(), 2);
    assert_eq!(blocks[0].lines().count(), 3);
    assert_eq!(blocks[1].lines().count(), 7);
    assert!(blocks[0].lines().nth(1).unwrap().starts_with("0\tm\ten\t0\t0\t0\t1\t0\t1\t0\t1\t"));

    let o = phonfeat(&["--format", "json", "encode", "--mode", "phonemic"], "cmn: xi1\n");
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 1);
    assert!(s.contains("\"symbol\":\"s\""), "{s}");

    let o = phonfeat(&["encode"], "cmn: xi1\n");
    assert!(stdout(&o).contains("\ts\\\tcmn\t"));
}

#[test]
fn encode_from_file_and_errors() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "en: HH AY1 !").unwrap();
    let o = phonfeat(&["encode", f.path().to_str().unwrap()], "");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 4);

    for bad in ["ni3 hao3\n", "cmn: ni\n", "en: QQ\n"] {
        let o = phonfeat(&["encode"], bad);
        assert_eq!(o.status.code(), Some(3), "{bad}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    }
    assert_eq!(phonfeat(&["encode", "/no/such/file"], "").status.code(), Some(3));
    assert_eq!(phonfeat(&["encode", "--mode", "loud"], "").status.code(), Some(1));
}

#[test]
fn embed_is_stable() {
    let a = phonfeat(&["embed", "--seed", "9"], "en: M AH0 .\n");
    let b = phonfeat(&["embed", "--seed", "9"], "en: M AH0 .\n");
    let c = phonfeat(&["embed", "--seed", "10"], "en: M AH0 .\n");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let s = stdout(&a);
    let rows: Vec<&str> = s.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split('\t').count() == 2 + 256));
}

#[test]
fn per_command() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("ref.txt");
    let h = dir.path().join("hyp.txt");
    std::fs::write(&r, "a b c d\ne f\n").unwrap();
    std::fs::write(&h, "a b d\ne f g\n").unwrap();
    let rs = r.to_str().unwrap();
    let o = phonfeat(&["per", rs, rs], "");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("corpus\t6\t0\t0\t0\t0.000000\n"));
    let o = phonfeat(&["per", rs, h.to_str().unwrap()], "");
    assert_eq!(
        stdout(&o),
        "line\tentries\tdeletions\tinsertions\tsubstitutions\tper\n\
         1\t4\t1\t0\t0\t0.250000\n\
         2\t2\t0\t1\t0\t0.500000\n\
         corpus\t6\t1\t1\t0\t0.333333\n\
         mean\t-\t-\t-\t-\t0.375000\n"
    );
    std::fs::write(&h, "a\n").unwrap();
    assert_eq!(phonfeat(&["per", rs, h.to_str().unwrap()], "").status.code(), Some(3));
}

#[test]
fn project_and_table() {
    let o = phonfeat(&["project", "--from", "cmn", "--to", "en"], "cmn: ni3 hao3\n");
    assert_eq!(o.status.code(), Some(0));
    let tgt: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split('\t').nth(2).unwrap().to_string()).collect();
    assert_eq!(tgt, ["n", "i", "h", "A", "u"]);

    let o = phonfeat(
        &["--format", "json", "project", "--from", "cmn", "--to", "en", "--tone-policy", "preserve"],
        "cmn: ma1\n",
    );
    let s = stdout(&o);
    assert!(s.contains("\"tone_policy_applied\":\"preserve\""), "{s}");
    assert!(s.contains("\"tone_id\":1"), "{s}");

    assert_eq!(phonfeat(&["project", "--from", "cmn", "--to", "en"], "en: HH\n").status.code(), Some(3));

    let o = phonfeat(&["table", "--from", "en", "--to", "cmn"], "");
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 1 + 38 * 3);
    assert!(s.starts_with("src_sampa\trank\ttgt_sampa\tmatches\tmismatches\tno_mismatches\tscore\n"));
    let again = phonfeat(&["table", "--from", "en", "--to", "cmn"], "");
    assert_eq!(o.stdout, again.stdout);
    let o = phonfeat(&["--w-match", "0", "table", "--from", "en", "--to", "cmn"], "");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(phonfeat(&["frobnicate"], "").status.code(), Some(1));
    assert_eq!(phonfeat(&[], "").status.code(), Some(1));
    assert_eq!(phonfeat(&["--help"], "").status.code(), Some(0));
    assert_eq!(phonfeat(&["--version"], "").status.code(), Some(0));
}
