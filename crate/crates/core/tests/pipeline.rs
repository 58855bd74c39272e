use simplex_embed::diagrams::{named_diagram, triangle};
use simplex_embed::pipeline::{
    build_lattice, closure, export, import_json, run_pair, verify_evidence, Catalog, Config, EdgeStatus, Format, Lattice,
    Store, Strategy,
};

fn small_catalog() -> Catalog {
    let mut c = Catalog::new();
    for (p, q, r) in [(2, 3, 7), (3, 3, 7), (0, 0, 3), (0, 0, 0), (2, 4, 6)] {
        c.insert(&triangle(p, q, r).unwrap(), &[]).unwrap();
    }
    c.insert(&named_diagram("[3^{[3,3]}]").unwrap(), &["ideal"]).unwrap();
    c
}

fn built() -> (Catalog, Lattice) {
    let c = small_catalog();
    let cfg = Config { lattice_max_chambers: 20_000, ..Config::default() };
    let mut l = Lattice::from_catalog(&c);
    build_lattice(&c, &cfg, &mut l);
    closure(&mut l);
    (c, l)
}

fn status(c: &Catalog, l: &Lattice, h: &str, g: &str) -> Option<EdgeStatus> {
    let h = &c.resolve(h).unwrap().id;
    let g = &c.resolve(g).unwrap().id;
    l.edge(h, g).map(|e| e.status)
}

#[test]
fn lattice_has_the_known_edges() {
    let (c, l) = built();
    assert_eq!(status(&c, &l, "(3,3,7)", "(2,3,7)"), Some(EdgeStatus::NotExists));
    assert_eq!(status(&c, &l, "(0,0,3)", "ideal"), Some(EdgeStatus::Exists));
    for e in &l.edges {
        let ev = &l.evidence[&e.evidence];
        assert_eq!(ev.hash(), e.evidence);
        if e.status != EdgeStatus::Inconclusive {
            let h = &l.entry(&e.sub).unwrap().diagram;
            let g = &l.entry(&e.sup).unwrap().diagram;
            assert_eq!(verify_evidence(ev, h, g, true), Ok(e.status), "{} -> {}", e.sub, e.sup);
        }
    }
}

#[test]
fn store_round_trip_and_tampering() {
    let (c, l) = built();
    let dir = tempfile::tempdir().unwrap();
    let mut store = Store::open(dir.path()).unwrap();
    store.save(&l).unwrap();
    let (back, failures) = store.load_checked(true).unwrap();
    assert!(failures.is_empty(), "{failures:?}");
    assert_eq!(export(&back, Format::Json).unwrap(), export(&l, Format::Json).unwrap());

    let edge = l.edge(&c.resolve("(3,3,7)").unwrap().id, &c.resolve("(2,3,7)").unwrap().id).unwrap();
    let path = store.evidence_path(&edge.evidence);
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(drop_one_prune_witness(&mut doc));
    std::fs::write(&path, doc.to_string()).unwrap();
    let (_, failures) = store.load_checked(false).unwrap();
    assert_eq!(failures.len(), 1);

    std::fs::remove_file(&path).unwrap();
    let (flagged, failures) = store.load_checked(false).unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(flagged.edge(&edge.sub, &edge.sup).unwrap().status, EdgeStatus::Inconclusive);
}

fn drop_one_prune_witness(v: &mut serde_json::Value) -> bool {
    match v {
        serde_json::Value::Object(m) => {
            if let Some(serde_json::Value::Array(f)) = m.get_mut("frontier") {
                if f.pop().is_some() {
                    return true;
                }
            }
            m.values_mut().any(drop_one_prune_witness)
        }
        serde_json::Value::Array(a) => a.iter_mut().any(drop_one_prune_witness),
        _ => false,
    }
}

#[test]
fn exports_are_deterministic() {
    let (_, l) = built();
    let json = export(&l, Format::Json).unwrap();
    let back = import_json(&json).unwrap();
    assert_eq!(export(&back, Format::Json).unwrap(), json);
    let mut shuffled = l.clone();
    shuffled.edges.reverse();
    shuffled.entries.reverse();
    assert_eq!(export(&shuffled, Format::Json).unwrap(), json);
    let dot = String::from_utf8(export(&l, Format::Dot).unwrap()).unwrap();
    assert!(dot.starts_with("digraph"));
    let exists = l.edges.iter().filter(|e| e.status == EdgeStatus::Exists).count();
    assert_eq!(dot.matches("->").count(), exists);
    assert_eq!(export(&Lattice::default(), Format::Json).unwrap(), br#"{"entries":[],"edges":[]}"#);
}

#[test]
fn pairs_and_config() {
    let c = small_catalog();
    let cfg = Config::from_toml("max_chambers = 5000\nmoduli = [2, 4]\n").unwrap();
    assert_eq!(cfg.max_chambers, 5000);
    assert_eq!(cfg.moduli, vec![2, 4]);
    assert_eq!(cfg.witness_bound, Config::default().witness_bound);
    assert!(Config::from_toml("max_chambres = 1").is_err());
    let r = run_pair(&c, "(3,3,7)", "(2,3,7)", Strategy::Search, &cfg).unwrap();
    assert_eq!(r.edge.status, EdgeStatus::NotExists);
    let r = run_pair(&c, "(0,0,3)", "ideal", Strategy::Auto, &cfg).unwrap();
    assert_eq!(r.edge.status, EdgeStatus::Exists);
    assert!(run_pair(&c, "(2,3,7)", "no-such-group", Strategy::Auto, &cfg).is_err());
}
