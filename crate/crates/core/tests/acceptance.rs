//! One PASS/FAIL line per acceptance criterion. Tolerances are pinned
//! below; a panic inside a criterion counts as FAIL.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simplex_embed::chamber_search::{area_index, replay_not_found, search_embedding, SearchOptions, SearchReport, Verdict};
use simplex_embed::diagrams::{
    crystallographic_variants, enumerate_simplicial, gram_of, named_diagram, triangle, CoxeterDiagram, DynkinDiagram,
    Label, LabelSet, Normalization, NAMED_DIAGRAMS,
};
use simplex_embed::diophantine::{anchored_systems, build_with_norm, find_obstruction, search_witness, DiophAnchor, DEFAULT_MODULI};
use simplex_embed::lorentz::{triangle_area_over_pi, Realization};
use simplex_embed::pipeline::Catalog;
use simplex_embed::roots::{lift_embedding, SubsystemOutcome};
use simplex_embed::scalars::{bilinear, FieldScalar};

const LIMIT_CENSUS: Duration = Duration::from_secs(60);
const LIMIT_HEPTAGONAL: Duration = Duration::from_secs(60);
const LIMIT_POSITIVE: Duration = Duration::from_secs(60);
const LIMIT_DIOPHANTINE: Duration = Duration::from_secs(10);
const LIMIT_F4: Duration = Duration::from_secs(60);
const F4_BOUND: i64 = 10;
/// Chamber budget per anchor and wall-clock budget for the simply-laced
/// lifting run; pairs are taken in order of increasing rank.
const LIFT_BUDGET: usize = 20_000;
const LIFT_TIME: Duration = Duration::from_secs(120);
const ORACLE_PAIRS: usize = 20;
const ORACLE_SEED: u64 = 8;
const ORACLE_BOUND: i64 = 8;
const ORACLE_BUDGET: usize = 400_000;
const VISUAL_CASES: usize = 100;
const VISUAL_SEED: u64 = 9;
/// Per-anchor budget for the lattice build whose negatives are replayed.
const LATTICE_BUDGET: &str = "300";

type Outcome = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simplex-embed"))
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:.1?}, limit {limit:?}"))?;
    Ok(e)
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn census() -> Outcome {
    let t = Instant::now();
    let out = bin().args(["--json", "enumerate", "--ideal"]).output().map_err(|e| e.to_string())?;
    let e = within(t, LIMIT_CENSUS)?;
    ensure(out.status.success(), "enumerate failed")?;
    let list: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let list = list.as_array().ok_or("not a list")?;
    let names: BTreeSet<&str> = list.iter().filter_map(|d| d["name"].as_str()).collect();
    let expect: BTreeSet<&str> = ["(0,0,0)", "[4^{[4]}]", "[3^{[3,3]}]", "[(3,6)^{[2]}]", "[(3^2,4)^{[2]}]"].into();
    ensure(list.len() == 5 && names == expect, format!("got {names:?}"))?;
    // every listed diagram has only ideal vertices
    for name in &expect {
        let r = Realization::new(&named_diagram(name).unwrap(), None).map_err(|e| e.to_string())?;
        ensure(r.ideal_vertices().len() == r.rank(), format!("{name} has a finite vertex"))?;
    }
    Ok(format!("5 ideal simplices in {e:.1?}"))
}

fn heptagonal() -> Outcome {
    let t = Instant::now();
    let g = triangle(2, 3, 7).unwrap();
    let h = triangle(3, 3, 7).unwrap();
    ensure(triangle_area_over_pi(&g) == Some(q(1, 42)), "covolume of (2,3,7) is not π/42")?;
    let idx = area_index(&h, &g).ok_or("no area index")?;
    ensure(idx.ratio == q(8, 1), format!("ratio {}", idx.ratio))?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("report.json");
    let status = bin()
        .args(["embed", "--h", "(3,3,7)", "--g", "(2,3,7)", "--out"])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?
        .status;
    ensure(status.code() == Some(1), format!("embed exited with {status}"))?;
    let rep: SearchReport =
        serde_json::from_str(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::NotFound, "verdict is not not-exists")?;
    ensure(rep.runs.iter().all(|r| !r.frontier.is_empty()), "a run has no pruning witness")?;
    replay_not_found(&rep)?;
    let e = within(t, LIMIT_HEPTAGONAL)?;
    let walls: usize = rep.runs.iter().map(|r| r.frontier.len()).sum();
    Ok(format!("area π/42, ratio 8, not-exists with {walls} pruning mirrors replayed, {e:.1?}"))
}

/// Gram check written against the raw field: (a,b)² = cos²(π/m)(a,a)(b,b)
/// with (a,b) of the sign of −cos(π/m).
fn regram(h: &CoxeterDiagram, g: &CoxeterDiagram, norms: Option<&[u32]>, roots: &[Vec<FieldScalar>]) -> bool {
    let gram = match norms {
        Some(q) => gram_of(g, &Normalization::Root(q)),
        None => gram_of(g, &Normalization::Unit),
    };
    let target = gram_of(h, &Normalization::Unit);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let ab = bilinear(&gram, &roots[i], &roots[j]);
            let aa = bilinear(&gram, &roots[i], &roots[i]);
            let bb = bilinear(&gram, &roots[j], &roots[j]);
            let t = &target[i][j];
            if ab.square() != &(&t.square() * &aa) * &bb || ab.sign() != t.sign() {
                return false;
            }
        }
    }
    true
}

fn positive() -> Outcome {
    let t = Instant::now();
    let h = triangle(0, 0, 3).unwrap();
    let g = named_diagram("[3^{[3,3]}]").unwrap();
    let rep = search_embedding(&h, &g, &SearchOptions::default()).map_err(|e| e.to_string())?;
    ensure(rep.verdict == Verdict::Found, format!("verdict {:?}", rep.verdict))?;
    let c = &rep.certificates[0];
    c.verify().map_err(|e| e.to_string())?;
    ensure(regram(&h, &g, c.ambient_norms.as_deref(), &c.roots), "independent Gram check failed")?;
    let json = serde_json::to_string(c).map_err(|e| e.to_string())?;
    let back: simplex_embed::chamber_search::EmbeddingCertificate =
        serde_json::from_str(&json).map_err(|e| e.to_string())?;
    ensure(back == *c, "certificate changed in a JSON round trip")?;
    let status = bin().args(["embed", "--h", "(0,0,3)", "--g", "[3^{[3,3]}]"]).output().map_err(|e| e.to_string())?.status;
    ensure(status.code() == Some(0), format!("embed exited with {status}"))?;
    let e = within(t, LIMIT_POSITIVE)?;
    Ok(format!("exists, certificate re-verified exactly, {e:.1?}"))
}

fn diophantine() -> Outcome {
    let mut notes = Vec::new();
    let simply = |name: &str| {
        let d = named_diagram(name).unwrap();
        let n = d.rank();
        DynkinDiagram::new(d, vec![2; n]).unwrap()
    };

    let t = Instant::now();
    let g = simply("[3^{1,1,1,1,1}]");
    let sys = anchored_systems(&g, &triangle(0, 0, 3).unwrap(), 1);
    ensure(!sys.is_empty(), "no anchored system for (0,0,3)")?;
    for s in &sys {
        let ob = find_obstruction(s, &DEFAULT_MODULI).ok_or("(0,0,3): no obstruction")?;
        ensure(ob.modulus == 2 && ob.replay(s), format!("(0,0,3): modulus {}", ob.modulus))?;
    }
    notes.push(format!("(0,0,3) mod 2 in {:.1?}", within(t, LIMIT_DIOPHANTINE)?));

    let t = Instant::now();
    let g = DynkinDiagram::new(named_diagram("[4,3^{1,1,1}]").unwrap(), vec![4, 4, 4, 4, 2]).unwrap();
    let sys = anchored_systems(&g, &triangle(0, 2, 4).unwrap(), 1);
    ensure(sys.len() == 2, format!("(0,2,4): {} anchors", sys.len()))?;
    for s in &sys {
        let ob = find_obstruction(s, &DEFAULT_MODULI).ok_or("(0,2,4): no obstruction")?;
        ensure(ob.modulus == 4 && ob.replay(s), format!("(0,2,4): modulus {}", ob.modulus))?;
    }
    notes.push(format!("(0,2,4) mod 4 for both anchors in {:.1?}", within(t, LIMIT_DIOPHANTINE)?));

    let t = Instant::now();
    let g = simply("F3");
    let anchor = DiophAnchor::standard(7, 2, vec![0, 1], &[1, 2]);
    let s = build_with_norm(&g, &triangle(0, 0, 0).unwrap(), &anchor, 2).map_err(|e| e.to_string())?;
    let ob = find_obstruction(&s, &DEFAULT_MODULI).ok_or("F3: no obstruction")?;
    ensure(ob.replay(&s), "F3 obstruction does not replay")?;
    notes.push(format!("(0,0,0) in F3 mod {} in {:.1?}", ob.modulus, within(t, LIMIT_DIOPHANTINE)?));
    Ok(notes.join("; "))
}

fn f4_lift() -> Outcome {
    let t = Instant::now();
    let d = named_diagram("F4").unwrap();
    let g = DynkinDiagram::new(d, vec![2; 9]).unwrap();
    // the D̃4 cusp: a simple root and the null-sum combination around it
    let mut u1 = vec![0i64; 9];
    u1[1] = 1;
    let mut u2 = vec![0i64; 9];
    u2[0] = 2;
    u2[3] = 1;
    u2[5] = 1;
    u2[7] = 1;
    let anchor = DiophAnchor { missing: 2, h_vertices: vec![0, 1], roots: vec![u1, u2] };
    let s = build_with_norm(&g, &triangle(0, 0, 0).unwrap(), &anchor, 2).map_err(|e| e.to_string())?;
    let w = search_witness(&s, F4_BOUND);
    let wit = w.witness.ok_or(format!("no witness within {F4_BOUND}: {}", w.note))?;
    ensure(s.satisfied_by(&wit.coefficients), "witness does not solve the system")?;
    ensure(find_obstruction(&s, &DEFAULT_MODULI).is_none(), "an obstruction contradicts the witness")?;
    let e = within(t, LIMIT_F4)?;
    Ok(format!("witness {:?} ({:?}), {e:.1?}", wit.coefficients, wit.root))
}

fn crystallographic_gate() -> Outcome {
    let five = Label::finite(5).unwrap();
    let mut all: Vec<CoxeterDiagram> = NAMED_DIAGRAMS.iter().map(|n| named_diagram(n).unwrap()).filter(|d| d.rank() >= 4).collect();
    for rank in 4..=11 {
        all.extend(enumerate_simplicial(rank, &LabelSet::Unrestricted).map_err(|e| e.to_string())?);
    }
    let with_five: Vec<&CoxeterDiagram> = all.iter().filter(|d| d.has_label(five)).collect();
    let bad = with_five.iter().filter(|d| !crystallographic_variants(d).is_empty()).count();
    ensure(bad == 0, format!("{bad} diagrams with a 5-edge have variants"))?;
    let others = all.iter().filter(|d| !d.has_label(five) && !crystallographic_variants(d).is_empty()).count();
    Ok(format!("{} diagrams with a 5-edge rejected, {others} others accepted", with_five.len()))
}

fn simply_laced_lifts() -> Outcome {
    let cat = Catalog::builtin(11);
    let sl: Vec<&CoxeterDiagram> = cat
        .entries()
        .map(|e| &e.diagram)
        .filter(|d| d.rank() >= 4 && d.edges().iter().all(|&(_, _, m)| m.order() == Some(3)))
        .collect();
    let mut pairs: Vec<(&CoxeterDiagram, &CoxeterDiagram)> =
        sl.iter().flat_map(|&g| sl.iter().filter(move |h| h.rank() <= g.rank()).map(move |&h| (h, g))).collect();
    pairs.sort_by_key(|(h, g)| (g.rank(), h.rank()));
    let opts = SearchOptions { max_chambers: LIFT_BUDGET, all: true, ..SearchOptions::default() };
    let t = Instant::now();
    let (mut certs, mut done) = (0, 0);
    for (h, g) in &pairs {
        if t.elapsed() > LIFT_TIME {
            break;
        }
        done += 1;
        let Ok(rep) = search_embedding(h, g, &opts) else { continue };
        let gv = DynkinDiagram::new((*g).clone(), vec![2; g.rank()]).unwrap();
        let hv = DynkinDiagram::new((*h).clone(), vec![2; h.rank()]).unwrap();
        for c in &rep.certificates {
            certs += 1;
            match lift_embedding(c, &gv, Some(&hv)) {
                Ok(SubsystemOutcome::Certified(sub)) => sub.verify().map_err(|e| e.to_string())?,
                other => return Err(format!("lift failed for {h:?} in {g:?}: {other:?}")),
            }
        }
    }
    ensure(certs > 0, "no certificate to lift")?;
    let top = pairs[..done].last().map_or(0, |(_, g)| g.rank());
    Ok(format!(
        "{certs} certificates lifted, 0 failures; {done} of {} pairs of {} simply-laced groups (G up to rank {top}) within {LIFT_TIME:?}",
        pairs.len(),
        sl.len()
    ))
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let opts = SearchOptions { max_chambers: ORACLE_BUDGET, ..SearchOptions::default() };
    let pairs = common::random_pairs(&mut rng, [7, 7, 6]);
    ensure(pairs.len() == ORACLE_PAIRS, format!("{} pairs", pairs.len()))?;
    // `inapplicable` and `inconclusive` are declared non-answers; a
    // disagreement is a decided verdict that contradicts the brute force
    let (mut conclusive, mut agree, mut undecided) = (0, 0, 0);
    let mut disagreements = Vec::new();
    for (h, g) in &pairs {
        let rep = search_embedding(h, g, &opts).map_err(|e| e.to_string())?;
        for c in &rep.certificates {
            c.verify().map_err(|e| e.to_string())?;
        }
        if rep.verdict == Verdict::NotFound {
            replay_not_found(&rep)?;
        }
        if common::brute_embedding(h, g, ORACLE_BOUND).is_some() {
            conclusive += 1;
            match rep.verdict {
                Verdict::Found => agree += 1,
                Verdict::NotFound => disagreements.push(format!("{h:?} in {g:?}")),
                _ => undecided += 1,
            }
        }
    }
    ensure(disagreements.is_empty(), format!("search says not-exists: {}", disagreements.join("; ")))?;
    Ok(format!(
        "{ORACLE_PAIRS} pairs, brute force finds {conclusive} embeddings: search agrees on {agree}, undecided on {undecided}, 0 disagreements"
    ))
}

fn visual() -> Outcome {
    let mut all: Vec<CoxeterDiagram> = NAMED_DIAGRAMS.iter().map(|n| named_diagram(n).unwrap()).collect();
    for rank in 4..=6 {
        all.extend(enumerate_simplicial(rank, &LabelSet::Unrestricted).map_err(|e| e.to_string())?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(VISUAL_SEED);
    let n = common::visual_gram_checks(&all, VISUAL_CASES, &mut rng);
    Ok(format!("{n} shrink cases match exactly"))
}

fn negatives() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let st = dir.path().join("store");
    let out = bin()
        .args(["lattice", "--max-rank", "4", "--max-chambers", LATTICE_BUDGET, "--out", "json", "--build"])
        .arg(&st)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), format!("lattice build exited with {}", out.status))?;
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let negatives = doc["edges"].as_array().ok_or("no edges")?.iter().filter(|e| e["status"] == "not-exists").count();
    ensure(negatives > 0, "no not-exists edges")?;
    let v = bin().arg("verify").arg(&st).output().map_err(|e| e.to_string())?;
    let msg = String::from_utf8_lossy(&v.stdout).into_owned() + &String::from_utf8_lossy(&v.stderr);
    ensure(v.status.success(), format!("verify exited with {}: {msg}", v.status))?;
    ensure(msg.contains(&format!("{negatives} not-exists replayed")), format!("replay count differs: {msg}"))?;
    Ok(format!("{negatives}/{negatives} not-exists edges replayed"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("ideal-simplex census", census),
        ("heptagonal triangles", heptagonal),
        ("positive search", positive),
        ("diophantine obstructions", diophantine),
        ("F4 lift witness", f4_lift),
        ("crystallographic gate", crystallographic_gate),
        ("simply-laced lifting", simply_laced_lifts),
        ("oracle equivalence", oracle),
        ("visual-subgroup soundness", visual),
        ("soundness of negatives", negatives),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match res {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
