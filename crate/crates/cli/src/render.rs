//! Human-readable rendering of the JSON reports.

use std::fmt::Write;

use serde_json::Value;

pub fn text(report: &Value) -> String {
    let mut out = String::new();
    match report["command"].as_str() {
        Some("list-presets") => presets(&mut out, report),
        Some("verify") => verify(&mut out, report),
        Some("matrix") => matrix(&mut out, report),
        _ => {
            out.push_str(&serde_json::to_string_pretty(&report["spec"]).unwrap_or_default());
            out.push('\n');
        }
    }
    out
}

fn num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.3e}"),
        None if v.is_null() => "NaN".into(),
        None => v.to_string(),
    }
}

fn verdict(pass: &Value) -> &'static str {
    if pass.as_bool() == Some(true) {
        "PASS"
    } else {
        "FAIL"
    }
}

fn coeffs(v: &Value) -> String {
    let parts: Vec<&str> = v.as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    format!("({})", parts.join(", "))
}

fn presets(out: &mut String, r: &Value) {
    let _ = writeln!(out, "T-curvature presets at n = {}", r["dimension"]);
    let _ = writeln!(out, "{:<8} {:<66} values", "name", "a0 .. a7");
    for row in r["presets"].as_array().into_iter().flatten() {
        let formulas = coeffs(&row["formulas"]);
        let values = match row["error"].as_str() {
            Some(e) => format!("error: {e}"),
            None => coeffs(&row["values"]),
        };
        let default = if row["defaultFree"].as_bool() == Some(true) {
            "  [free a0, a1 set to built-in defaults]"
        } else {
            ""
        };
        let _ = writeln!(out, "{:<8} {:<66} {values}{default}", row["name"].as_str().unwrap_or(""), formulas);
        let _ = writeln!(out, "         {}", row["title"].as_str().unwrap_or(""));
    }
}

fn check_line(out: &mut String, indent: &str, c: &Value) {
    let note = c["note"].as_str().map(|n| format!("  ({n})")).unwrap_or_default();
    let _ = writeln!(
        out,
        "{indent}{}  {:<28} [{}]  max {}  tol {}{note}",
        verdict(&c["pass"]),
        c["id"].as_str().unwrap_or(""),
        c["paperEq"].as_str().unwrap_or(""),
        num(&c["maxResidual"]),
        num(&c["tol"]),
    );
}

fn verify(out: &mut String, r: &Value) {
    let m = &r["manifold"];
    let k = if m["kEstimated"].as_bool() == Some(true) {
        format!("k = {} (estimated)", m["workingK"])
    } else {
        format!("k = {}", m["workingK"])
    };
    let _ = writeln!(
        out,
        "manifold {} (n = {}, epsilon = {}, {k}), hypothesis {}",
        m["name"].as_str().unwrap_or(""),
        m["dimension"],
        m["epsilon"],
        if m["hypothesisSatisfied"].as_bool() == Some(true) { "satisfied" } else { "not satisfied" },
    );
    let s = &r["samples"];
    let _ = writeln!(
        out,
        "samples: {} {}, seed {}",
        s["points"].as_array().map_or(0, Vec::len),
        s["strategy"].as_str().unwrap_or(""),
        s["seed"]
    );
    for (label, key) in [("a", "presetA"), ("b", "presetB")] {
        let sel = &r[key];
        let name = sel["preset"].as_str().unwrap_or("custom");
        let _ = writeln!(out, "{label} = {name} {}", coeffs(&sel["coeffs"]));
    }
    let _ = writeln!(out, "suite: {}", r["suite"].as_str().unwrap_or(""));
    check_line(out, "", &r["structureGate"]);
    let nl = &r["nullity"];
    let _ = writeln!(out, "nullity fit: k = {} residual {}", num(&nl["estimatedK"]), num(&nl["residual"]));

    let checks = r["checks"].as_array().into_iter().flatten().collect::<Vec<_>>();
    if !checks.is_empty() {
        let _ = writeln!(out, "\nchecks");
        checks.into_iter().for_each(|c| check_line(out, "  ", c));
    }
    let derivations = r["derivations"].as_array().into_iter().flatten().collect::<Vec<_>>();
    if !derivations.is_empty() {
        let _ = writeln!(out, "\nderivation residuals");
        for d in derivations {
            let _ = writeln!(
                out,
                "  {}  {:<28} max {}  tol {}",
                verdict(&d["pass"]),
                d["id"].as_str().unwrap_or(""),
                num(&d["residual"]["maxResidual"]),
                num(&d["tol"])
            );
        }
    }
    let theorems = r["theorems"].as_array().into_iter().flatten().collect::<Vec<_>>();
    if !theorems.is_empty() {
        let _ = writeln!(out, "\ntheorems");
        for t in theorems {
            theorem(out, t);
        }
    }
    let _ = writeln!(out, "\nresult: {}", verdict(&r["pass"]));
}

fn theorem(out: &mut String, t: &Value) {
    let case = t["case"].as_str().map(|c| format!(", case {c}")).unwrap_or_default();
    let hyp = if t["hypothesisSatisfied"].as_bool() == Some(true) {
        "holds"
    } else {
        "fails"
    };
    let _ = writeln!(
        out,
        "  {}: hypothesis {hyp} (residual {}){case}",
        t["theoremId"].as_str().unwrap_or(""),
        num(&t["hypothesisResidual"])
    );
    if let Some(consts) = t["constants"].as_object() {
        for (name, vals) in consts {
            let vals: Vec<f64> = vals.as_array().into_iter().flatten().filter_map(Value::as_f64).collect();
            if let (Some(lo), Some(hi)) = (vals.iter().copied().reduce(f64::min), vals.iter().copied().reduce(f64::max)) {
                let _ = writeln!(out, "      {name} in [{lo:.6}, {hi:.6}]");
            }
        }
    }
    for c in t["checks"].as_array().into_iter().flatten() {
        check_line(out, "    ", c);
    }
    let withheld: Vec<&str> = t["withheld"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    if !withheld.is_empty() {
        let _ = writeln!(out, "    withheld: {}", withheld.join(", "));
    }
}

fn grid(out: &mut String, names: &[&str], rows: &[Value]) {
    let _ = write!(out, "{:>8} ", "");
    for n in names {
        let _ = write!(out, "{:>7}", n);
    }
    out.push('\n');
    for (name, row) in names.iter().zip(rows) {
        let _ = write!(out, "{name:>8} ");
        for cell in row.as_array().into_iter().flatten() {
            let mark = if cell["pass"].as_bool() == Some(true) { "." } else { "x" };
            let _ = write!(out, "{mark:>7}");
        }
        out.push('\n');
    }
}

fn matrix(out: &mut String, r: &Value) {
    let m = &r["matrix"];
    let names: Vec<&str> = m["presets"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    let _ = writeln!(
        out,
        "matrix {} (n = {}), {} samples, seed {}",
        m["manifold"].as_str().unwrap_or(""),
        m["dim"],
        r["samples"]["points"].as_array().map_or(0, Vec::len),
        r["samples"]["seed"]
    );
    let _ = writeln!(out, "'.' passes, 'x' fails; rows a, columns b\n");
    let _ = writeln!(out, "(T_a, T_b), tol {}", num(&m["tensorTol"]));
    grid(out, &names, m["tensor"].as_array().map_or(&[], Vec::as_slice));
    let _ = writeln!(out, "\n(T_a, S), tol {}", num(&m["ricciTol"]));
    let _ = write!(out, "{:>8} ", "");
    for n in &names {
        let _ = write!(out, "{:>7}", n);
    }
    let _ = write!(out, "\n{:>8} ", "S");
    for cell in m["ricci"].as_array().into_iter().flatten() {
        let mark = if cell["pass"].as_bool() == Some(true) { "." } else { "x" };
        let _ = write!(out, "{mark:>7}");
    }
    let _ = writeln!(out, "\n\n(T_a, S_Tb), tol {}", num(&m["ricciTol"]));
    grid(out, &names, m["ricciT"].as_array().map_or(&[], Vec::as_slice));
    let _ = writeln!(out, "\n{} of {} cells pass", m["passed"], m["cells"]);
    let _ = writeln!(out, "result: {}", verdict(&r["pass"]));
}
