use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use sobolev_curves::measure::WeightForm;
use sobolev_curves_cli::doc::{parse_document, AtomDoc, ComponentDoc, CurveDoc, Document, MeasureDoc, Num, PieceDoc};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sobolev-curves"))
}

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("SOBOLEV_CURVE_THREADS").output().unwrap()
}

fn envelope(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn reparse(mu: &sobolev_curves::VectorialMeasure) -> sobolev_curves::VectorialMeasure {
    let text = serde_json::to_string(&MeasureDoc::from_measure(mu)).unwrap();
    parse_document(&text).unwrap().build(None).unwrap().measure
}

#[test]
fn heuristic_example_verdict_is_unbounded_with_two_dimensional_kernel() {
    let path = corpus("heuristic_example.json");
    let env = envelope(&run(&["verdict", path.to_str().unwrap()]));
    assert_eq!(env["result"]["verdict"], "unbounded");
    assert_eq!(env["result"]["kernelDim"], 2);
    assert_eq!(env["command"]["name"], "verdict");
    assert!(env["wallTime"].is_number());
    assert_eq!(env["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn heuristic_example_kernel_matches_exact_solver() {
    let path = corpus("heuristic_example.json");
    let env = envelope(&run(&["kernel", path.to_str().unwrap()]));
    let r = &env["result"];
    assert_eq!(r["dim"], 2);
    assert_eq!(r["exact"]["dim"], 2);
    assert_eq!(r["exact"]["agrees"], true);
    assert!(r["exact"]["spanResidual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn legendre_bound_holds() {
    let path = corpus("legendre_k0.json");
    let env = envelope(&run(&["verify-bound", path.to_str().unwrap(), "--n-max", "20", "--N", "64"]));
    assert_eq!(env["result"]["boundOk"], true);
    let s = env["result"]["sigmaMax"].as_f64().unwrap();
    assert!((0.995..=1.0 + 1e-10).contains(&s), "{s}");
}

#[test]
fn csv_lists_zeros_and_sigma_history() {
    let path = corpus("legendre_k0.json");
    let out = run(&["verify-bound", path.to_str().unwrap(), "--n-max", "3", "--N", "16", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["series", "n", "re", "im", "value"]);
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.iter().filter(|x| &x[0] == "zero").count(), 6);
    let sigma: Vec<&csv::StringRecord> = rows.iter().filter(|x| &x[0] == "sigma").collect();
    assert_eq!(sigma.iter().map(|x| x[1].parse::<usize>().unwrap()).collect::<Vec<_>>(), [8, 16]);
}

#[test]
fn csv_is_refused_for_reports_without_tables() {
    let path = corpus("legendre_k0.json");
    let out = run(&["verdict", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn payloads_are_deterministic() {
    for (cmd, file) in
        [("verdict", "heuristic_example.json"), ("verify-bound", "circle_atom_k1.json"), ("kernel", "dyadic_open.json")]
    {
        let path = corpus(file);
        let mut a = envelope(&run(&[cmd, path.to_str().unwrap()]));
        let mut b = envelope(&run(&[cmd, path.to_str().unwrap()]));
        a.as_object_mut().unwrap().remove("wallTime");
        b.as_object_mut().unwrap().remove("wallTime");
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap(), "{cmd} {file}");
    }
}

#[test]
fn output_file_receives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let path = corpus("atom_k1.json");
    let out = run(&["classify", path.to_str().unwrap(), "-o", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["result"]["classification"]["typeA"]["isTypeA"], "yes");
}

#[test]
fn strict_mode_exits_2_on_unknown_verdicts() {
    let path = corpus("top_order_atom_k1.json");
    let relaxed = run(&["verdict", path.to_str().unwrap()]);
    assert_eq!(relaxed.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&relaxed.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "unknown");
    assert!(v["warnings"].as_array().unwrap().iter().any(|w| w == "verdict is unknown"));
    assert_eq!(run(&["verdict", "--strict", path.to_str().unwrap()]).status.code(), Some(2));
    let bounded = corpus("atom_k1.json");
    assert_eq!(run(&["verdict", "--strict", bounded.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn input_errors_exit_1_with_locations() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let syntax = write("syntax.json", "{\n  \"p\": 2,\n  \"k\": \n");
    let out = run(&["verdict", syntax.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let good = std::fs::read_to_string(corpus("atom_k1.json")).unwrap();
    let field = write("field.json", &good.replace("\"1/2\"", "\"half\""));
    let out = run(&["verdict", field.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("components[0].atoms[0].t"));

    let unknown = write("unknown.json", &good.replace("\"k\": 1", "\"k\": 1, \"q\": 3"));
    let out = run(&["verdict", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field `q`"));

    let mut v: Value = serde_json::from_str(&good).unwrap();
    v["components"][1]["pieces"][0]["arc"][1] = Value::from("1/2");
    let gap = write("gap.json", &v.to_string());
    let out = run(&["verdict", gap.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("components[j=1].pieces[0]"));

    assert_eq!(run(&["verdict", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn flags_are_validated() {
    let path = corpus("legendre_k0.json");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["zeros", p, "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["zeros", p, "--n-max", "0"]).status.code(), Some(1));
    assert_eq!(run(&["verify-bound", p, "--N", "1000"]).status.code(), Some(1));
    assert_eq!(run(&["verify-bound", p, "--tol", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["muckenhoupt", p, "--arc", "1:0"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate", p]).status.code(), Some(1));
    let out = bin().args(["zeros", p, "--n-max", "2"]).env("SOBOLEV_CURVE_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["zeros", p, "--n-max", "2"]).env("SOBOLEV_CURVE_THREADS", "2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn muckenhoupt_reports_lebesgue_constant_and_divergence() {
    let p = corpus("lebesgue_k1.json");
    let env = envelope(&run(&["muckenhoupt", p.to_str().unwrap(), "--arc", "0:1"]));
    let lambda = env["result"]["lambda"].as_f64().unwrap();
    assert!((lambda - 0.25).abs() < 1e-4, "{lambda}");
    assert_eq!(env["result"]["report"]["status"], "finite");
    let cubic = corpus("cubic_weight_k1.json");
    let env = envelope(&run(&["muckenhoupt", cubic.to_str().unwrap()]));
    assert_eq!(env["result"]["lambda"], "inf");
    assert_eq!(env["result"]["report"]["status"], "infinite");
}

#[test]
fn generator_depth_flag_overrides_the_document() {
    let p = corpus("dyadic_closed.json");
    let env = envelope(&run(&["kernel", p.to_str().unwrap(), "--depth", "1"]));
    assert_eq!(env["result"]["dim"], 0);
    let restricted = envelope(&run(&["kernel", p.to_str().unwrap(), "--region", "0.0625:1"]));
    assert!(restricted["result"]["dim"].as_u64().unwrap() >= 1);
}

#[test]
fn analyze_summarises_sets_and_verdict() {
    let p = corpus("heuristic_example.json");
    let env = envelope(&run(&["analyze", p.to_str().unwrap()]));
    let r = &env["result"];
    assert_eq!(r["k"], 3);
    assert_eq!(r["masses"], serde_json::json!([1.0, 0.0, 1.0, 1.0]));
    assert_eq!(r["omega"][2]["components"][0]["t1"], 1.0);
    assert_eq!(r["verdict"], "unbounded");
}

#[test]
fn orthopoly_reports_both_constructions() {
    let p = corpus("legendre_k0.json");
    let env = envelope(&run(&["orthopoly", p.to_str().unwrap(), "--n-max", "6"]));
    assert!(env["result"]["choleskyDifference"].as_f64().unwrap() < 1e-8);
    assert_eq!(env["result"]["basis"]["polys"].as_array().unwrap().len(), 7);
    assert!(env["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn corpus_documents_round_trip() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let loaded = parse_document(&text).unwrap().build(None).unwrap();
        let again = reparse(&loaded.measure);
        assert_eq!(again, loaded.measure, "{}", path.display());
        n += 1;
    }
    assert!(n >= 20);
}

#[test]
fn exact_strings_survive_round_trip() {
    let text = std::fs::read_to_string(corpus("rational_k2.json")).unwrap();
    let mu = parse_document(&text).unwrap().build(None).unwrap().measure;
    let doc = MeasureDoc::from_measure(&mu);
    assert_eq!(doc.components[1].atoms[0].t, Num::Text("3/8".into()));
    assert_eq!(mu.exact_param(0.375).to_string(), "3/8");
}

#[test]
fn decimal_strings_are_exact() {
    use sobolev_curves_cli::doc::parse_rational;
    assert_eq!(parse_rational("0.1").unwrap().to_string(), "1/10");
    assert_eq!(parse_rational("-2.5e-1").unwrap().to_string(), "-1/4");
    assert_eq!(parse_rational("12E2").unwrap().to_string(), "1200");
    assert_eq!(parse_rational(" 6/8 ").unwrap().to_string(), "3/4");
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational(".").is_err());
    assert!(parse_rational("1.2.3").is_err());
}

fn piece_form() -> impl Strategy<Value = WeightForm> {
    prop_oneof![
        Just(WeightForm::Zero),
        (0.1f64..5.0, prop::sample::select(vec![0.0, 0.5, -0.5, 1.0, 2.0]), prop::sample::select(vec![0.0, 0.25, 1.5]))
            .prop_map(|(c, a, b)| {
                WeightForm::Power {
                    c,
                    alpha_left: a,
                    alpha_right: b,
                    anchor_left: None,
                    anchor_right: None,
                    smooth: None,
                }
            }),
    ]
}

fn arb_doc() -> impl Strategy<Value = MeasureDoc> {
    let comp = (
        prop::collection::vec((1u32..8, piece_form()), 0..4),
        prop::collection::vec((0u32..=64, 1u32..5, any::<bool>()), 0..4),
    );
    (0usize..3, prop::collection::vec(comp, 3)).prop_map(|(k, comps)| {
        let components = comps
            .into_iter()
            .take(k + 1)
            .enumerate()
            .map(|(j, (cuts, atoms))| {
                let total: u32 = cuts.iter().map(|c| c.0).sum();
                let mut acc = 0;
                let pieces = cuts
                    .into_iter()
                    .map(|(w, form)| {
                        let a = format!("{acc}/{total}");
                        acc += w;
                        PieceDoc { arc: [Num::Text(a), Num::Text(format!("{acc}/{total}"))], form }
                    })
                    .collect();
                let atoms = atoms
                    .into_iter()
                    .map(|(t, m, exact)| AtomDoc {
                        t: if exact { Num::Text(format!("{t}/64")) } else { Num::Float(t as f64 / 64.0) },
                        mass: Num::Float(m as f64 * 0.5),
                    })
                    .collect();
                ComponentDoc { j, pieces, atoms }
            })
            .collect();
        let mut params = serde_json::Map::new();
        params.insert("a".into(), serde_json::json!([0.0, 0.0]));
        params.insert("b".into(), serde_json::json!([1.0, 0.0]));
        MeasureDoc { curve: CurveDoc { kind: "segment".into(), params }, p: Num::Float(2.0), k, components }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_serialize_parse_is_identity(doc in arb_doc()) {
        let text = serde_json::to_string(&doc).unwrap();
        let parsed = match parse_document(&text).unwrap() {
            Document::Measure(m) => m,
            Document::Generator(_) => unreachable!(),
        };
        prop_assert_eq!(&parsed, &doc);
        if let Ok(mu) = parsed.build() {
            let again = reparse(&mu);
            prop_assert_eq!(&again, &mu);
            let doc2 = MeasureDoc::from_measure(&again);
            prop_assert_eq!(doc2, MeasureDoc::from_measure(&mu));
        }
    }
}
