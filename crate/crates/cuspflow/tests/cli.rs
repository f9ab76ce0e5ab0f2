use cuspflow::cli::main_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["cuspflow"];
    full.extend_from_slice(args);
    let code = main_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

#[test]
fn targets_table() {
    assert_eq!(ok(&["targets", "k=2", "n=2"]), "k,n,B,D\n2,2,1.5,5.5\n");
    assert_eq!(ok(&["targets", "k=1", "n=2"]), "k,n,B,D\n1,2,0.5,2.5\n");
}

#[test]
fn json_rows_use_csv_field_names() {
    let csv = ok(&["count", "t_min=3", "t_max=5", "t_step=1"]);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let json = ok(&["count", "t_min=3", "t_max=5", "t_step=1", "format=json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    for r in rows {
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, header);
    }
}

#[test]
fn spectrum_of_a_rational_ends_at_it() {
    let out = ok(&["spectrum", "x=2/7"]);
    let last = out.lines().last().unwrap();
    assert!(last.starts_with("2,7,"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["spectrum", "x=1/3", "theta=-1"]).0, 2);
    assert_eq!(run(&["targets", "bogus=1"]).0, 2);
    assert_eq!(run(&["spectrum", "model=gaussian", "x=1/3"]).0, 2);
    assert_eq!(run(&["count", "t_min=20", "t_max=20", "budget=10"]).0, 3);
}

#[test]
fn flags_override_config_file() {
    let path = std::env::temp_dir().join(format!("cuspflow-cli-{}.cfg", std::process::id()));
    std::fs::write(&path, "# comment\nformat = json\nk = 1\nn = 2\n").unwrap();
    let p = path.to_str().unwrap();
    assert!(ok(&["targets", "--config", p]).trim_start().starts_with('['));
    assert_eq!(ok(&["targets", "--config", p, "format=csv"]), "k,n,B,D\n1,2,0.5,2.5\n");
    std::fs::write(&path, "nonsense = 3\n").unwrap();
    assert_eq!(run(&["targets", "--config", p]).0, 2);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn output_does_not_depend_on_worker_count() {
    for args in [
        &["count", "t_min=4", "t_max=8", "t_step=0.5"][..],
        &["dimbox", "set=pair"][..],
        &["cover", "mode=sum", "truncation=2000"][..],
    ] {
        let one = ok(&[args, &["workers=1"]].concat());
        let four = ok(&[args, &["workers=4"]].concat());
        assert_eq!(one, four, "{args:?}");
    }
}
