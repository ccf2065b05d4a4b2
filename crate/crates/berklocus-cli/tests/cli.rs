//! End-to-end tests of the binary: exit codes, schema, output formats.

use std::process::Command;

fn berklocus(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_berklocus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn analyze_reports_connected_quadratic() {
    let out = berklocus(&["analyze", "(z^2+1)/(z+1)", "-p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], "berklocus/1");
    assert_eq!(v["result"]["connected"], true);
    assert_eq!(v["result"]["finite"], false);
    assert_eq!(v["result"]["census"]["count"], 1);
    assert_eq!(v["result"]["good_reduction"], true);
}

#[test]
fn analyze_reports_power_map() {
    let out = berklocus(&["analyze", "z^3", "-p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["finite"], true);
    assert_eq!(v["result"]["census"]["count"], 5);
}

#[test]
fn census_subcommand() {
    let out = berklocus(&["census", "z^2", "-p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["result"]["count"], 3);
}

#[test]
fn verify_subcommand_runs_the_oracle() {
    let out = berklocus(&["verify", "z^2", "-p", "3", "--grid-step", "1/2", "--grid-depth", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["mismatches"], 0);
    assert_eq!(v["result"]["step"], "1/2");
}

#[test]
fn parse_errors_exit_2() {
    let out = berklocus(&["analyze", "z^^2", "-p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "PARSE");
    // non-prime modulus is a config error
    let out = berklocus(&["analyze", "z^2", "-p", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precision_starvation_exits_3() {
    let out = berklocus(&[
        "analyze",
        "(z^2+z+p^2)/(z^2+1)",
        "-p",
        "3",
        "--precision",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "PRECISION");
}

#[test]
fn inconclusive_exits_4() {
    // a map with a repelling fixed point is certified not potential good
    // reduction
    let out = berklocus(&["analyze", "z^2+1/p", "-p", "3"]);
    assert_eq!(out.status.code(), Some(4));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "INCONCLUSIVE");
}

#[test]
fn dot_output_has_stable_ids() {
    let out = berklocus(&["sketch", "z^2", "-p", "3", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("gauss"));
    assert!(dot.contains("\"dir:"));
    assert!(dot.contains("\"iso:"));
}

#[test]
fn text_format_renders() {
    let out = berklocus(&["reduce", "(z^2+p)/z", "-p", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("good_reduction: false"));
}

#[test]
fn conjugate_flag() {
    let out = berklocus(&[
        "reduce",
        "(z^2+z+p^2)/(z^2+1)",
        "-p",
        "3",
        "--conjugate",
        "z/p",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["identity"], true);
    assert_eq!(v["result"]["good_reduction"], false);
}

#[test]
fn verdicts_do_not_depend_on_the_ambient_tower() {
    // the locus is a property of the map; enlarging the coefficient tower
    // must not change any verdict
    let mut base = None;
    for extra in [
        vec![],
        vec!["--ram", "2"],
        vec!["--unram", "2"],
        vec!["--unram", "2", "--ram", "2"],
    ] {
        let mut args = vec!["analyze", "z^2", "-p", "3"];
        args.extend(extra.iter());
        let out = berklocus(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let v = json_of(&out);
        let key = (
            v["result"]["connected"].clone(),
            v["result"]["finite"].clone(),
            v["result"]["census"]["count"].clone(),
        );
        match &base {
            None => base = Some(key),
            Some(b) => assert_eq!(&key, b, "{args:?}"),
        }
    }
}

#[test]
fn reports_never_contain_floats() {
    fn no_floats(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Number(n) => n.is_i64() || n.is_u64(),
            serde_json::Value::Array(a) => a.iter().all(no_floats),
            serde_json::Value::Object(o) => o.values().all(no_floats),
            _ => true,
        }
    }
    for args in [
        vec!["analyze", "(z^2+1)/(z+1)", "-p", "3"],
        vec!["fixed-points", "z^2", "-p", "2"],
        vec!["verify", "z^3", "-p", "3"],
        vec!["census", "(z^2+p)/z", "-p", "3"],
    ] {
        let out = berklocus(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(no_floats(&json_of(&out)), "{args:?}");
    }
}
