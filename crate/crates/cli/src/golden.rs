//! Worked examples replayed through the request path, with their expected
//! outcomes.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{run, CommandResult, Defaults, Failure, Request, Status};

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub tag: String,
    pub cmd: String,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&Result<CommandResult, Failure>) -> Result<String, String>;

struct Case {
    tag: &'static str,
    request: Value,
    check: Check,
}

fn ok_payload(r: &Result<CommandResult, Failure>) -> Result<&Value, String> {
    match r {
        Ok(c) if c.status == Status::Ok => Ok(&c.payload),
        Ok(c) => Err(format!("status {} ({})", c.status.as_str(), c.clause.as_deref().unwrap_or(""))),
        Err(f) => Err(format!("{f:?}")),
    }
}

fn status_is(r: &Result<CommandResult, Failure>, want: Status) -> Result<String, String> {
    match r {
        Ok(c) if c.status == want => Ok(format!("status {}", want.as_str())),
        Ok(c) => Err(format!("status {}", c.status.as_str())),
        Err(f) => Err(format!("{f:?}")),
    }
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .map(|a| {
            a.iter()
                .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                .collect()
        })
        .unwrap_or_default()
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_array().map(|a| a.iter().filter_map(Value::as_i64).collect()).unwrap_or_default()
}

fn expect(cond: bool, detail: String) -> Result<String, String> {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spectrum_is(r: &Result<CommandResult, Failure>, key: &str, want: &[&str]) -> Result<String, String> {
    let got = strings(&ok_payload(r)?[key]);
    expect(got == want, format!("{key} = {got:?}"))
}

fn has_quasi_lattice(spectra: &Value, finite: &[&str], period: &str) -> bool {
    spectra
        .as_array()
        .into_iter()
        .flatten()
        .any(|s| strings(&s["finite"]) == finite && s["period"] == period)
}

fn cases() -> Vec<Case> {
    vec![
        Case {
            tag: "finite-pair-0-2",
            request: json!({"cmd": "certify-finite", "A": [0, 2], "L": ["0", "1/4"]}),
            check: |r| ok_payload(r).map(|p| format!("max gram {}", p["certificate"]["max_offdiag_gram"])),
        },
        Case {
            tag: "finite-pair-interval-5",
            request: json!({"cmd": "certify-finite", "A": [0, 1, 2, 3, 4], "L": ["0", "1/5", "2/5", "3/5", "4/5"]}),
            check: |r| ok_payload(r).map(|_| "certified".into()),
        },
        Case {
            tag: "finite-pair-0-1-8-9",
            request: json!({"cmd": "certify-finite", "A": [0, 1, 8, 9], "L": ["0", "1/16", "1/2", "9/16"]}),
            check: |r| ok_payload(r).map(|_| "certified".into()),
        },
        Case {
            tag: "finite-pair-refuted",
            request: json!({"cmd": "certify-finite", "A": [0, 2, 4], "L": ["0", "1/2", "1/3"]}),
            check: |r| status_is(r, Status::Refuted),
        },
        Case {
            tag: "spectra-0-2-4",
            request: json!({"cmd": "enumerate-spectra", "A": [0, 2, 4]}),
            check: |r| {
                let p = ok_payload(r)?;
                let got: Vec<Vec<String>> = p["spectra"].as_array().unwrap().iter().map(strings).collect();
                let mut want: Vec<Vec<String>> = [
                    ["0", "1/6", "1/3"],
                    ["0", "1/6", "5/6"],
                    ["0", "1/3", "2/3"],
                    ["0", "2/3", "5/6"],
                ]
                .iter()
                .map(|s| s.iter().map(|x| x.to_string()).collect())
                .collect();
                let mut sorted = got.clone();
                sorted.sort();
                want.sort();
                expect(sorted == want, format!("{got:?}"))
            },
        },
        Case {
            tag: "spectra-singleton",
            request: json!({"cmd": "enumerate-spectra", "A": [0]}),
            check: |r| {
                let got = &ok_payload(r)?["spectra"];
                expect(*got == json!([["0"]]), got.to_string())
            },
        },
        Case {
            tag: "decompose-0-1-8-9",
            request: json!({"cmd": "decompose", "A": [0, 1, 8, 9]}),
            check: |r| {
                let c = &ok_payload(r)?["chain"];
                expect(*c == json!({"base_length": 2, "steps": [["II", 4], ["I", 2]]}), c.to_string())
            },
        },
        Case {
            tag: "decompose-0-1-4-5",
            request: json!({"cmd": "decompose", "A": [0, 1, 4, 5]}),
            check: |r| {
                let c = &ok_payload(r)?["chain"];
                expect(*c == json!({"base_length": 2, "steps": [["II", 2], ["I", 2]]}), c.to_string())
            },
        },
        Case {
            tag: "decompose-interval",
            request: json!({"cmd": "decompose", "A": [0, 1, 2]}),
            check: |r| {
                let c = &ok_payload(r)?["chain"];
                expect(*c == json!({"base_length": 3, "steps": []}), c.to_string())
            },
        },
        Case {
            tag: "chain-spectrum-0-1-8-9",
            request: json!({"cmd": "spectrum-from-chain", "A": [0, 1, 8, 9]}),
            check: |r| spectrum_is(r, "spectrum", &["0", "1/16", "1/2", "9/16"]),
        },
        Case {
            tag: "chain-spectrum-0-1-4-5",
            request: json!({"cmd": "spectrum-from-chain", "chain": {"base_length": 2, "steps": [["II", 2], ["I", 2]]}}),
            check: |r| spectrum_is(r, "spectrum", &["0", "1/8", "1/2", "5/8"]),
        },
        Case {
            tag: "chain-spectrum-interval",
            request: json!({"cmd": "spectrum-from-chain", "chain": {"base_length": 3, "steps": []}}),
            check: |r| spectrum_is(r, "spectrum", &["0", "1/3", "2/3"]),
        },
        Case {
            tag: "complement-0-2-mod-4",
            request: json!({"cmd": "find-complement", "A": [0, 2], "n": 4}),
            check: |r| {
                let c = &ok_payload(r)?["certificate"];
                expect(ints(&c["complement"]) == [0, 1], c.to_string())
            },
        },
        Case {
            tag: "complement-0-1-8-9-mod-16",
            request: json!({"cmd": "find-complement", "A": [0, 1, 8, 9], "n": 16}),
            check: |r| {
                let b = ints(&ok_payload(r)?["certificate"]["complement"]);
                let mut hits = [0; 16];
                for x in [0, 1, 8, 9] {
                    for y in &b {
                        hits[(x + y).rem_euclid(16) as usize] += 1;
                    }
                }
                expect(hits.iter().all(|&h| h == 1), format!("B = {b:?}"))
            },
        },
        Case {
            tag: "interval-spectra-0-2",
            request: json!({"cmd": "interval-spectra", "A": [0, 2]}),
            check: |r| {
                let s = &ok_payload(r)?["spectra"];
                expect(has_quasi_lattice(s, &["0", "1/4"], "1"), s.to_string())
            },
        },
        Case {
            tag: "interval-spectra-0-2-4",
            request: json!({"cmd": "interval-spectra", "A": [0, 2, 4]}),
            check: |r| {
                let s = &ok_payload(r)?["spectra"];
                expect(
                    has_quasi_lattice(s, &["0"], "1/3") && has_quasi_lattice(s, &["0", "1/6", "1/3"], "1"),
                    format!("{} spectra", s.as_array().map_or(0, Vec::len)),
                )
            },
        },
        Case {
            tag: "interval-spectra-0-3",
            request: json!({"cmd": "interval-spectra", "A": [0, 3]}),
            check: |r| {
                let s = &ok_payload(r)?["spectra"];
                expect(has_quasi_lattice(s, &["0", "1/6"], "1"), s.to_string())
            },
        },
        Case {
            tag: "tiles-0-2",
            request: json!({"cmd": "tiles-line", "A": [0, 2]}),
            check: |r| {
                let c = &ok_payload(r)?["certificate"];
                expect(*c == json!({"complement": [0, 1], "modulus": 4}), c.to_string())
            },
        },
        Case {
            tag: "tiles-unit-interval",
            request: json!({"cmd": "tiles-line", "A": [0]}),
            check: |r| {
                let c = &ok_payload(r)?["certificate"];
                expect(*c == json!({"complement": [0], "modulus": 1}), c.to_string())
            },
        },
        Case {
            tag: "as-ifs-0-2",
            request: json!({"cmd": "as-ifs", "A": [0, 2]}),
            check: |r| {
                let p = ok_payload(r)?;
                expect(p["n"] == 4 && ints(&p["C"]) == [0, 1] && ints(&p["B"]) == [0, 1, 8, 9], p.to_string())
            },
        },
        Case {
            tag: "as-ifs-unit-interval",
            request: json!({"cmd": "as-ifs", "A": [0]}),
            check: |r| {
                let p = ok_payload(r)?;
                expect(p["n"] == 2 && ints(&p["B"]) == [0, 1], p.to_string())
            },
        },
        Case {
            tag: "invariant-ft-4-0-2",
            request: json!({"cmd": "invariant-ft", "A": 4, "B": [0, 2], "x": [0.0, 1.0]}),
            check: |r| {
                let v = &ok_payload(r)?["values"];
                let a0 = v[0]["abs"].as_f64().unwrap_or(-1.0);
                let a1 = v[1]["abs"].as_f64().unwrap_or(-1.0);
                expect((a0 - 1.0).abs() < 1e-12 && a1 < 1e-12, format!("|μ̂(0)| = {a0}, |μ̂(1)| = {a1}"))
            },
        },
        Case {
            tag: "factor-4-0-1-8-9",
            request: json!({"cmd": "factor", "A": 4, "B": [0, 1, 8, 9], "a": 2, "p": 2}),
            check: |r| {
                let p = ok_payload(r)?;
                let f = &p["factorization"];
                let res = p["max_residual"].as_f64().unwrap_or(1.0);
                expect(
                    ints(&f["F"]) == [0, 2] && f["reduced_base"] == json!({"A": 2, "B": [0, 1]}) && res < 1e-10,
                    format!("F = {}, residual {res}", f["F"]),
                )
            },
        },
        Case {
            tag: "cycle-spectrum-4-0-2",
            request: json!({"cmd": "cycle-spectrum", "A": 4, "B": [0, 2], "L": [0, 1], "radius": 64}),
            check: |r| spectrum_is(r, "elements", &["0", "1", "4", "5", "16", "17", "20", "21"]),
        },
        Case {
            tag: "cycle-spectrum-4-0-1",
            request: json!({"cmd": "cycle-spectrum", "A": 4, "B": [0, 1], "L": [0, 2], "radius": 64}),
            check: |r| {
                let p = ok_payload(r)?;
                let cycles = &p["spectrum"]["cycles"];
                let got = strings(&p["elements"]);
                expect(
                    *cycles == json!([["0"]]) && got == ["0", "2", "8", "10", "32", "34", "40", "42"],
                    format!("cycles {cycles}, elements {got:?}"),
                )
            },
        },
        Case {
            tag: "twisted-product-0-1-8-9",
            request: json!({"cmd": "twisted-product", "a": 2, "p": 2, "n": [0, 1], "C": [[0, 1], [0, 1]], "L": [[0, 1], [0, 1]], "radius": 3}),
            check: |r| {
                let p = ok_payload(r)?;
                let want: Vec<String> = (-3..3)
                    .flat_map(|k| [k.to_string(), format!("{}/4", 4 * k + 1)])
                    .filter(|s| s != "-3")
                    .collect();
                let got = strings(&p["elements"]);
                expect(
                    ints(&p["B"]) == [0, 1, 8, 9] && strings(&p["atom_spectrum"]) == ["0", "1/4"] && got == want,
                    format!("B = {}, elements {got:?}", p["B"]),
                )
            },
        },
        Case {
            tag: "twisted-product-0-1-32-33",
            request: json!({"cmd": "twisted-product", "a": 2, "p": 2, "n": [0, 2], "C": [[0, 1], [0, 1]], "L": [[0, 1], [0, 1]]}),
            check: |r| {
                let p = ok_payload(r)?;
                expect(ints(&p["B"]) == [0, 1, 32, 33], format!("B = {}", p["B"]))
            },
        },
        Case {
            tag: "compose-0-1-8-9",
            request: json!({"cmd": "compose", "parts": [
                {"b": 1, "C": [0, 1], "a": 2, "L": [0, 1]},
                {"b": 8, "C": [0, 1], "a": 2, "L": [0, 1]}
            ]}),
            check: |r| spectrum_is(r, "spectrum", &["0", "1/16", "1/2", "9/16"]),
        },
        Case {
            tag: "compose-interval",
            request: json!({"cmd": "compose", "parts": [{"b": 1, "C": [0, 1, 2, 3], "a": 4, "L": [0, 1, 2, 3]}]}),
            check: |r| spectrum_is(r, "spectrum", &["0", "1/4", "1/2", "3/4"]),
        },
        Case {
            tag: "transform-translation",
            request: json!({"cmd": "transform",
                "measure": {"kind": "ifs", "A": 4, "B": [0, 2]},
                "spectrum": {"kind": "quasi-lattice", "finite": [0, "1/4"], "period": 1},
                "map": {"linear": [[1]], "shift": ["1/3"]}}),
            check: |r| {
                let s = &ok_payload(r)?["spectrum"];
                expect(strings(&s["finite"]) == ["0", "1/4"] && s["period"] == "1", s.to_string())
            },
        },
        Case {
            tag: "new-spectrum-4-0-2-0-3",
            request: json!({"cmd": "new-spectrum", "A": 4, "B": [0, 2], "L": [0, 1], "L_new": [0, 3], "radius": 16}),
            check: |r| spectrum_is(r, "elements", &["0", "3", "4", "7"]),
        },
        Case {
            tag: "infinite-family-4-0-1",
            request: json!({"cmd": "infinite-family", "A": 4, "B": [0, 1], "L": [0, 2], "count": 3, "radius": 4096}),
            check: |r| {
                let p = ok_payload(r)?;
                let pairs = &p["coinciding_pairs"];
                expect(
                    p["members"].as_array().map_or(0, Vec::len) == 3 && *pairs == json!([]),
                    format!("coinciding pairs {pairs}"),
                )
            },
        },
        Case {
            tag: "parseval-lebesgue",
            request: json!({"cmd": "parseval", "measure": {"kind": "interval-union", "A": [0]},
                "spectrum": {"kind": "quasi-lattice", "finite": [0], "period": 1}, "radius": 200, "tol": 0.005}),
            check: |r| ok_payload(r).map(|p| format!("min sum {}", p["report"]["min_sum"])),
        },
        Case {
            tag: "parseval-interval-union-0-2",
            request: json!({"cmd": "parseval", "measure": {"kind": "interval-union", "A": [0, 2]},
                "spectrum": {"kind": "quasi-lattice", "finite": [0, "1/4"], "period": 1}, "radius": 500}),
            check: |r| ok_payload(r).map(|p| format!("min sum {}", p["report"]["min_sum"])),
        },
        Case {
            tag: "parseval-ifs-0-1-8-9",
            request: json!({"cmd": "parseval", "measure": {"kind": "ifs", "A": 4, "B": [0, 1, 8, 9]},
                "spectrum": {"kind": "quasi-lattice", "finite": [0, "1/4"], "period": 1}, "radius": 500}),
            check: |r| ok_payload(r).map(|p| format!("min sum {}", p["report"]["min_sum"])),
        },
        Case {
            tag: "parseval-cycle-4-0-2",
            request: json!({"cmd": "parseval", "measure": {"kind": "ifs", "A": 4, "B": [0, 2]},
                "spectrum": {"kind": "cycle", "A": 4, "B": [0, 2], "L": [0, 1]}, "radius": 4096, "tol": 0.02}),
            check: |r| ok_payload(r).map(|p| format!("min sum {}", p["report"]["min_sum"])),
        },
        Case {
            tag: "orthogonal-family-0-1-4-5",
            request: json!({"cmd": "orthogonal-family", "measure": {"kind": "ifs", "A": 4, "B": [0, 1, 4, 5]}, "radius": 256}),
            check: |r| {
                let n = ok_payload(r)?["family"]["size"].as_u64().unwrap_or(0);
                expect(n >= 20, format!("size {n}"))
            },
        },
        Case {
            tag: "orthogonal-family-cap-1",
            request: json!({"cmd": "orthogonal-family", "measure": {"kind": "ifs", "A": 4, "B": [0, 2]}, "cap": 1}),
            check: |r| {
                let f = &ok_payload(r)?["family"]["frequencies"];
                expect(*f == json!(["0"]), f.to_string())
            },
        },
        Case {
            tag: "deficiency-0-1-4-5",
            request: json!({"cmd": "deficiency", "A": 4, "B": [0, 1, 4, 5], "x": 0.3, "radius": 256}),
            check: |r| {
                let w = &ok_payload(r)?["witness"];
                let gap = w["gap"].as_f64().unwrap_or(0.0);
                expect(gap >= 0.01, format!("gap {gap}"))
            },
        },
        Case {
            tag: "deficiency-origin",
            request: json!({"cmd": "deficiency", "A": 4, "B": [0, 1, 4, 5], "x": 0.0, "radius": 64}),
            check: |r| match r {
                Ok(c) if c.status == Status::None => {
                    let w = &c.payload["witness"];
                    expect(w["best_sum"] == 1.0 && w["gap"] == 0.0, w.to_string())
                }
                other => status_is(other, Status::None),
            },
        },
        Case {
            tag: "product-unit-square",
            request: json!({"cmd": "product-spectrum", "region": {"kind": "unit-cube", "dim": 2}, "radius": 50}),
            check: |r| {
                let f = &ok_payload(r)?["factors"];
                let z = json!({"kind": "quasi-lattice", "finite": ["0"], "period": "1"});
                expect(*f == json!([z, z]), f.to_string())
            },
        },
        Case {
            tag: "product-staircase",
            request: json!({"cmd": "product-spectrum", "region": {"kind": "staircase"}, "order": [1, 0, 2], "radius": 50}),
            check: |r| {
                let p = ok_payload(r)?;
                let f = &p["factors"];
                let want = json!([
                    {"kind": "quasi-lattice", "finite": ["0"], "period": "1/3"},
                    {"kind": "quasi-lattice", "finite": ["0"], "period": "1/2"},
                    {"kind": "quasi-lattice", "finite": ["0", "1/4"], "period": "1"},
                ]);
                expect(*f == want, format!("min sum {}", p["report"]["min_sum"]))
            },
        },
        Case {
            tag: "tiling-staircase",
            request: json!({"cmd": "check-tiling", "region": {"kind": "staircase"},
                "translations": {"basis": [[3, 0, 0], [0, 2, 0], [0, 0, 4]], "offsets": [[0, 0, 0], [0, 0, 1]]},
                "box": [3, 2, 4]}),
            check: |r| ok_payload(r).map(|p| format!("grid {}", p["grid"])),
        },
        Case {
            tag: "tiling-staircase-lattice-only",
            request: json!({"cmd": "check-tiling", "region": {"kind": "staircase"},
                "translations": {"basis": [[3, 0, 0], [0, 2, 0], [0, 0, 4]]}, "box": [3, 2, 4]}),
            check: |r| status_is(r, Status::Refuted),
        },
        Case {
            tag: "tiling-unit-cube",
            request: json!({"cmd": "check-tiling", "region": {"kind": "unit-cube", "dim": 3},
                "translations": {"basis": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}, "box": [1, 1, 1]}),
            check: |r| status_is(r, Status::Ok),
        },
        Case {
            tag: "lattice-search-staircase",
            request: json!({"cmd": "lattice-search", "region": {"kind": "staircase"}, "bound": 4}),
            check: |r| status_is(r, Status::None),
        },
        Case {
            tag: "lattice-search-unit-cube",
            request: json!({"cmd": "lattice-search", "region": {"kind": "unit-cube", "dim": 3}, "bound": 2}),
            check: |r| {
                let l = &ok_payload(r)?["lattices"];
                let z3 = json!([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
                expect(l.as_array().is_some_and(|a| a.contains(&z3)), format!("{} lattices", l.as_array().map_or(0, Vec::len)))
            },
        },
        Case {
            tag: "lattice-search-0-2",
            request: json!({"cmd": "lattice-search", "region": {"kind": "interval-union", "A": [0, 2]}, "bound": 4}),
            check: |r| status_is(r, Status::None),
        },
        Case {
            tag: "rearranged-cube-1",
            request: json!({"cmd": "rearranged-cube", "p": 1}),
            check: |r| {
                let p = ok_payload(r)?;
                expect(
                    p["fold"]["congruent"] == true
                        && p["upper_fold"]["congruent"] == false
                        && p["lower_fold"]["congruent"] == false,
                    "pieces fold onto the square, neither alone does".into(),
                )
            },
        },
        Case {
            tag: "rearranged-cube-0",
            request: json!({"cmd": "rearranged-cube", "p": 0}),
            check: |r| match r {
                Err(Failure::Malformed(m)) => Ok(m.clone()),
                other => Err(format!("{other:?}")),
            },
        },
    ]
}

/// Runs every case in parallel; results keep the table order.
pub fn run_all() -> Vec<CaseResult> {
    let defaults = Defaults::default();
    cases()
        .into_par_iter()
        .map(|case| {
            let outcome = serde_json::from_value::<Request>(case.request.clone())
                .map_err(|e| Failure::Malformed(e.to_string()))
                .and_then(|req| run(&req, &defaults));
            let cmd = case.request["cmd"].as_str().unwrap_or("").to_string();
            let (passed, detail) = match (case.check)(&outcome) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CaseResult {
                tag: case.tag.to_string(),
                cmd,
                passed,
                detail,
            }
        })
        .collect()
}

/// Fixed-width text table of case results.
pub fn table(results: &[CaseResult]) -> String {
    let width = results.iter().map(|r| r.tag.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let mark = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{mark}  {:width$}  {}\n", r.tag, r.detail));
    }
    out
}
