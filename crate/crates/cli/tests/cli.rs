use std::path::PathBuf;
use std::process::{Command, Output};

use wgg_core::coloring::{count_proper_bruteforce, ideal_filter, lists_of};
use wgg_core::io::{parse_arrangement, parse_graph, AnyWeighted, Semigroup};
use wgg_core::orthotope::{count_lists_bounded_bruteforce, count_matrix_bruteforce, count_orthotope_bruteforce};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn wgg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgg")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8").trim_end().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8")
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn count(args: &[&str]) -> String {
    let out = wgg(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    stdout(&out)
}

#[test]
fn qpoly_reproduces_the_worked_example() {
    let out = wgg(&["qpoly", "--input", &path("phi_star.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Q = u[(-1,3)]*u[(2,0)] + 2*u[(2,3)] + u[(4,3)] + 3*z + v*z");

    let sum = count(&["qpoly", "--input", &path("phi_star.json"), "--semigroup", "sum-zd"]);
    for key in ["u[(1,3)#2]", "u[(3,3)#2]", "u[(2,5)#2]"] {
        assert!(sum.contains(key), "{sum}");
    }
}

#[test]
fn machine_output_is_stable_json() {
    let args = ["qpoly", "--input", &path("phi_star.json"), "--format", "machine"];
    let first = count(&args);
    assert_eq!(first, count(&args));
    let value: serde_json::Value = serde_json::from_str(&first).expect("valid JSON");
    assert_eq!(value["polynomial"]["semigroup"], "max-zd");
    assert_eq!(value["polynomial"]["terms"].as_array().map(Vec::len), Some(5));
}

#[test]
fn diagonal_count_is_nine() {
    assert_eq!(count(&["count-orthotope", "--input", &path("diagonal.json"), "--m", "2,3"]), "9");
}

#[test]
fn counts_agree_with_enumeration_on_fixtures() {
    let diagonal = parse_arrangement(&std::fs::read_to_string(fixture("diagonal.json")).unwrap()).unwrap();
    let brute = count_orthotope_bruteforce(&diagonal.arrangement, &[2, 3]).unwrap();
    assert_eq!(count(&["count-orthotope", "--input", &path("diagonal.json"), "--check"]), brute.to_string());
    let brute = count_lists_bounded_bruteforce(&diagonal.arrangement, diagonal.lists.as_ref().unwrap(), &[2, 3]).unwrap();
    assert_eq!(count(&["count-lists", "--input", &path("diagonal.json"), "--check"]), brute.to_string());

    let order2 = parse_arrangement(&std::fs::read_to_string(fixture("order2_arrangement.json")).unwrap()).unwrap();
    let brute =
        count_matrix_bruteforce(&order2.arrangement, order2.h.as_ref().unwrap(), order2.m.as_ref().unwrap()).unwrap();
    assert_eq!(count(&["count-matrix", "--input", &path("order2_arrangement.json"), "--check"]), brute.to_string());

    for (name, semigroup) in [("triangle.json", Semigroup::FiniteList), ("k2.json", Semigroup::ConeMinusFinite)] {
        let input = parse_graph(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        let lists = match input.weighted(semigroup).unwrap() {
            AnyWeighted::FiniteList(wg) => lists_of(&wg),
            AnyWeighted::ConeMinusFinite(wg) => lists_of(&wg),
            _ => unreachable!(),
        };
        let filter = match &input.m {
            Some(m) => ideal_filter(m),
            None => wgg_core::coloring::full_filter(input.graph.vertex_count(), input.graph.dim()),
        };
        let brute = count_proper_bruteforce(&input.graph, &lists, &filter).unwrap();
        assert_eq!(count(&["chi", "--input", &path(name), "--check"]), brute.to_string());
    }
    assert_eq!(count(&["chi", "--input", &path("triangle.json")]), "6");
}

#[test]
fn piecewise_matches_the_exact_count() {
    let text = count(&["piecewise", "--input", &path("order2.json"), "--format", "machine"]);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["value"], value["exact"]);
    assert_eq!(value["above_threshold"], true);

    let common = count(&["piecewise", "--input", &path("k2.json"), "--common", "4"]);
    assert!(common.contains("value = 20") && common.contains("polynomial = m^2 + m"), "{common}");
}

#[test]
fn forest_and_mobius() {
    let forest = count(&["forest", "--input", &path("phi_star.json"), "--order", "3,1,2"]);
    assert_eq!(forest, "F(u,y) = u[(-1,3)]*u[(2,0)] + 2*u[(2,3)] + u[(4,3)]");
    let triangle = count(&["forest", "--input", &path("triangle.json")]);
    assert!(triangle.contains('y'), "{triangle}");

    let mobius = count(&["mobius", "--input", &path("triangle.json")]);
    let lines: Vec<&str> = mobius.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "{}\tmu = 1");
    assert_eq!(lines[4], "{e1,e2,e3}\tmu = 2");
}

#[test]
fn exit_codes() {
    let bad = std::env::temp_dir().join("wgg_bad_input.json");
    std::fs::write(&bad, "{\"n\": 2,\n \"d\": 1, \"edges\": [}").unwrap();
    let out = wgg(&["qpoly", "--input", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let missing = std::env::temp_dir().join("wgg_missing_field.json");
    std::fs::write(&missing, r#"{"n": 2, "d": 1, "edges": [{"tail": 1, "head": 3, "gain": [0]}]}"#).unwrap();
    let out = wgg(&["mobius", "--input", &missing.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("edges[0].head"), "{}", stderr(&out));

    let out = wgg(&["chi", "--input", &path("k2.json"), "--m", "x"]);
    assert_eq!(out.status.code(), Some(1));

    let infinite = std::env::temp_dir().join("wgg_infinite.json");
    std::fs::write(
        &infinite,
        r#"{"n": 1, "d": 1, "edges": [], "semigroup": "cone-minus-finite", "weights": [{"apex": [0]}]}"#,
    )
    .unwrap();
    let out = wgg(&["chi", "--input", &infinite.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(wgg(&["piecewise", "--input", &path("phi_star.json")]).status.code(), Some(2));
    assert_eq!(wgg(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn verify_with_defaults_passes() {
    let out = wgg(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).ends_with("0 failed (seed 20070101)"));
}
