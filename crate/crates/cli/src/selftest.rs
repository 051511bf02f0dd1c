//! Fixture replay: bundled JSON cases plus the catalog-wide suites.

use std::io::IsTerminal;
use std::path::Path;

use serde::Deserialize;

use pya_core::catalog::{bad_open_grid, bad_open_group, bad_open_m0, catalog};
use pya_core::duality::{az_bad, pyasetskii_dual};
use pya_core::enumerate::{build_poset, enum_parameters, DEFAULT_CAP};
use pya_core::oracle::{verify_dual, OracleConfig};
use pya_core::{closure_leq, rank_matrices, LParameter, MultiSegment, Segment};

use crate::doc::Document;
use crate::{color_enabled, Failure};

const BUNDLED: &[(&str, &str)] = &[
    ("bad-parity-example.json", include_str!("../fixtures/bad-parity-example.json")),
    ("small-cases.json", include_str!("../fixtures/small-cases.json")),
];

#[derive(Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
enum Check {
    Dual { input: Document, expected: Document },
    Enumerate { input: Document, count: usize, hasse_edges: Option<usize> },
    /// One matrix per line, in line order.
    Rank { input: Document, expected: Vec<Vec<Vec<u32>>> },
    Le { first: Document, second: Document, le: bool, ge: bool },
    Verify { input: Document },
    /// Violation kinds, as printed before the colon.
    Invalid { input: Document, violations: Vec<String> },
}

#[derive(Deserialize)]
struct Fixture {
    name: String,
    tags: Vec<String>,
    #[serde(flatten)]
    check: Check,
}

type CaseResult = Result<String, String>;

fn param(d: &Document) -> Result<LParameter, String> {
    d.to_parameter().map_err(|e| e.to_string())
}

fn valid(d: &Document) -> Result<LParameter, String> {
    let p = param(d)?;
    p.validate().map_err(|e| e.to_string())?;
    Ok(p)
}

fn expect<T: PartialEq + std::fmt::Debug>(got: T, want: T, what: &str) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn run_check(c: &Check) -> CaseResult {
    match c {
        Check::Dual { input, expected } => {
            let d = pyasetskii_dual(&valid(input)?).map_err(|e| e.to_string())?;
            let want = param(expected)?;
            expect(d.mseg.to_string(), want.mseg.to_string(), "dual")?;
            Ok(format!("{} -> {}", valid(input)?.mseg, d.mseg))
        }
        Check::Enumerate { input, count, hasse_edges } => {
            let (g, lambda) = input.to_infinitesimal().map_err(|e| e.to_string())?;
            let params = enum_parameters(&lambda, g, Some(DEFAULT_CAP)).map_err(|e| e.to_string())?;
            expect(params.len(), *count, "parameter count")?;
            if let Some(edges) = hasse_edges {
                let poset = build_poset(params).map_err(|e| e.to_string())?;
                expect(poset.hasse.len(), *edges, "Hasse edges")?;
            }
            Ok(format!("{count} parameters of {g}"))
        }
        Check::Rank { input, expected } => {
            let p = valid(input)?;
            let got: Vec<_> = rank_matrices(&p.mseg).map_err(|e| e.to_string())?.into_values().map(|r| r.entries).collect();
            expect(&got, expected, "rank matrices")?;
            Ok(format!("{} lines", got.len()))
        }
        Check::Le { first, second, le, ge } => {
            let (a, b) = (valid(first)?, valid(second)?);
            expect(closure_leq(&a, &b).map_err(|e| e.to_string())?, *le, "le")?;
            expect(closure_leq(&b, &a).map_err(|e| e.to_string())?, *ge, "ge")?;
            Ok(format!("le={le} ge={ge}"))
        }
        Check::Verify { input } => {
            let rep = verify_dual(&valid(input)?, &OracleConfig::default()).map_err(|e| e.to_string())?;
            match rep.lines.iter().find(|l| !l.matches) {
                None => Ok(format!("{} lines match", rep.lines.len())),
                Some(l) => Err(format!("line {}: {} vs {}", l.line, l.algorithm_rank_matrix, l.oracle_rank_matrix)),
            }
        }
        Check::Invalid { input, violations } => {
            let got: Vec<String> = param(input)?
                .violations()
                .iter()
                .map(|v| v.to_string().split(':').next().unwrap_or_default().to_string())
                .collect();
            expect(&got, violations, "violations")?;
            Ok(format!("{} violations", got.len()))
        }
    }
}

fn bad_open_suite() -> CaseResult {
    for (d, r) in bad_open_grid() {
        let m0 = bad_open_m0(d, r);
        let top = Segment::new(pya_core::RhoClass::trivial(), d.shift(-(r as i64)), d).map_err(|e| e.to_string())?;
        let want: MultiSegment = [top.clone(), top.dual()].into_iter().collect();
        let got = az_bad(&m0).map_err(|e| e.to_string())?;
        expect(got.to_string(), want.to_string(), &format!("d={d} r={r}"))?;
        let params = enum_parameters(&m0.infinitesimal(), bad_open_group(d, r), None).map_err(|e| e.to_string())?;
        let poset = build_poset(params).map_err(|e| e.to_string())?;
        let top = poset.maximum().map(|i| poset.nodes[i].mseg.to_string());
        let bottom = poset.minimum().map(|i| poset.nodes[i].mseg.to_string());
        expect(top, Some(want.to_string()), "maximum")?;
        expect(bottom, Some(m0.to_string()), "minimum")?;
    }
    Ok(format!("{} (d, r) pairs", bad_open_grid().len()))
}

fn catalog_params() -> Result<Vec<LParameter>, String> {
    let mut out = Vec::new();
    for e in catalog() {
        out.extend(enum_parameters(&e.lambda, e.group, Some(10)).map_err(|err| format!("{}: {err}", e.name))?);
    }
    Ok(out)
}

fn involution_suite() -> CaseResult {
    let params = catalog_params()?;
    for p in &params {
        let d = pyasetskii_dual(p).map_err(|e| format!("{p}: {e}"))?;
        let dd = pyasetskii_dual(&d).map_err(|e| format!("{d}: {e}"))?;
        expect(dd.to_string(), p.to_string(), "dual of dual")?;
        expect(d.infinitesimal() == p.infinitesimal(), true, "infinitesimal parameter preserved")?;
    }
    Ok(format!("{} parameters", params.len()))
}

fn oracle_suite() -> CaseResult {
    let params = catalog_params()?;
    let small: Vec<_> = params.iter().filter(|p| p.group.is_classical() && p.mseg.total_dim() <= 10).collect();
    for p in &small {
        let rep = verify_dual(p, &OracleConfig::default()).map_err(|e| format!("{p}: {e}"))?;
        if let Some(l) = rep.lines.iter().find(|l| !l.matches) {
            return Err(format!("{p} line {}: {} vs {}", l.line, l.algorithm_rank_matrix, l.oracle_rank_matrix));
        }
    }
    Ok(format!("{} parameters", small.len()))
}

struct Case {
    name: String,
    tags: Vec<String>,
    run: Box<dyn Fn() -> CaseResult>,
}

fn load_fixtures(dir: Option<&Path>) -> Result<Vec<Case>, Failure> {
    let files: Vec<(String, String)> = match dir {
        None => BUNDLED.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect(),
        Some(dir) => {
            let entries = std::fs::read_dir(dir).map_err(|e| Failure::Parse(format!("{}: {e}", dir.display())))?;
            let mut paths: Vec<_> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            paths
                .into_iter()
                .map(|p| {
                    let text = std::fs::read_to_string(&p).map_err(|e| Failure::Parse(format!("{}: {e}", p.display())))?;
                    Ok((p.display().to_string(), text))
                })
                .collect::<Result<_, Failure>>()?
        }
    };
    let mut cases = Vec::new();
    for (name, text) in files {
        let fixtures: Vec<Fixture> =
            serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("fixture file {name}: {e}")))?;
        for f in fixtures {
            let check = f.check;
            cases.push(Case { name: f.name, tags: f.tags, run: Box::new(move || run_check(&check)) });
        }
    }
    Ok(cases)
}

fn builtin() -> Vec<Case> {
    let tags = |t: &[&str]| t.iter().map(|s| s.to_string()).collect();
    vec![
        Case { name: "bad-open-grid".into(), tags: tags(&["worked-example", "bad-parity"]), run: Box::new(bad_open_suite) },
        Case { name: "involution-catalog".into(), tags: tags(&["involution"]), run: Box::new(involution_suite) },
        Case { name: "oracle-catalog".into(), tags: tags(&["oracle"]), run: Box::new(oracle_suite) },
    ]
}

pub fn run(filter: Option<&str>, dir: Option<&Path>) -> Result<(), Failure> {
    let mut cases = load_fixtures(dir)?;
    cases.extend(builtin());
    let selected: Vec<&Case> = cases
        .iter()
        .filter(|c| filter.is_none_or(|f| c.name.contains(f) || c.tags.iter().any(|t| t == f)))
        .collect();
    if selected.is_empty() {
        return Err(Failure::Parse(format!("no fixture matches {:?}", filter.unwrap_or(""))));
    }
    let color = color_enabled(std::io::stdout().is_terminal());
    let paint = |code: &str, s: &str| if color { format!("\x1b[{code}m{s}\x1b[0m") } else { s.to_string() };
    let mut failed = 0;
    for c in &selected {
        match (c.run)() {
            Ok(detail) => println!("{} {}: {detail}", paint("32", "PASS"), c.name),
            Err(detail) => {
                failed += 1;
                println!("{} {}: {detail}", paint("31", "FAIL"), c.name);
            }
        }
    }
    println!("{} of {} fixtures pass", selected.len() - failed, selected.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{failed} fixtures failed")))
    }
}
