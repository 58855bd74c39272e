use num_bigint::BigInt;
use proptest::prelude::*;
use simplex_embed::diagrams::{crystallographic_variants, enumerate_simplicial, named_diagram, triangle, DynkinDiagram, LabelSet};
use simplex_embed::diophantine::{
    anchored_systems, find_obstruction, integer_solutions, search_witness, DiophAnchor, DiophSystem, DEFAULT_MODULI,
};

fn variants() -> Vec<DynkinDiagram> {
    let mut out = Vec::new();
    for rank in 4..=5 {
        for d in enumerate_simplicial(rank, &LabelSet::Unrestricted).unwrap() {
            out.extend(crystallographic_variants(&d));
        }
    }
    out
}

fn gram(g: &DynkinDiagram) -> Vec<Vec<i64>> {
    g.gram_integers().iter().map(|r| r.iter().map(|x| x.try_into().unwrap()).collect()).collect()
}

fn system(g: &DynkinDiagram, anchors: &[usize], targets: &[i64], norm: i64) -> DiophSystem {
    let b = gram(g);
    let n = b.len();
    let anchor = DiophAnchor::standard(n, 0, (1..=anchors.len()).collect(), anchors);
    let rows = anchors.iter().map(|&a| b[a].clone()).collect();
    DiophSystem { ambient: g.clone(), gram: b, anchor, rows, targets: targets.to_vec(), norm }
}

/// Every integer vector with entries in [-r, r].
fn cube(n: usize, r: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * r + 1) as usize;
    (0..side.pow(n as u32)).map(move |mut c| {
        (0..n)
            .map(|_| {
                let d = (c % side) as i64 - r;
                c /= side;
                d
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    /// An obstruction is never claimed for a system that has a small
    /// solution, obstructions replay, and witnesses satisfy the system.
    #[test]
    fn obstructions_are_sound(
        (k, anchors, targets, norm) in (0..variants().len()).prop_flat_map(|k| {
            let n = variants()[k].rank();
            let anchors = prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..n);
            (Just(k), anchors, prop::collection::vec(-4i64..=4, n), prop::sample::select(vec![-2i64, 0, 2, 4, 6]))
        })
    ) {
        let g = &variants()[k];
        let s = system(g, &anchors, &targets[..anchors.len()], norm);
        let brute = cube(g.rank(), 3).find(|x| s.satisfied_by(x));
        let ob = find_obstruction(&s, &DEFAULT_MODULI);
        if let Some(ob) = &ob {
            prop_assert!(brute.is_none(), "{:?} solves a system obstructed mod {}", brute, ob.modulus);
            prop_assert!(ob.replay(&s));
        }
        let w = search_witness(&s, 3);
        if let Some(w) = &w.witness {
            prop_assert!(s.satisfied_by(&w.coefficients));
            prop_assert!(ob.is_none());
        } else {
            // the witness search covers every free coordinate in the cube
            prop_assert!(brute.is_none(), "{:?} missed", brute);
        }
    }

    #[test]
    fn linear_solutions_match_brute_force(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..3),
        rhs in prop::collection::vec(-6i64..=6, 2),
    ) {
        let rhs = &rhs[..rows.len()];
        let solves = |x: &[i64]| rows.iter().zip(rhs).all(|(r, b)| r.iter().zip(x).map(|(a, c)| a * c).sum::<i64>() == *b);
        let brute = cube(3, 8).find(|x| solves(x));
        match integer_solutions(&rows, rhs) {
            None => prop_assert!(brute.is_none(), "{brute:?}"),
            Some(sol) => {
                let p: Vec<i64> = sol.particular.iter().map(|x| x.try_into().unwrap()).collect();
                prop_assert!(solves(&p));
                for b in &sol.basis {
                    let b: Vec<i64> = b.iter().map(|x| x.try_into().unwrap()).collect();
                    let homog = rows.iter().all(|r| r.iter().zip(&b).map(|(a, c)| a * c).sum::<i64>() == 0);
                    prop_assert!(homog);
                }
                prop_assert!(sol.basis.iter().all(|b| b.iter().any(|x| *x != BigInt::from(0))));
            }
        }
    }
}

#[test]
fn ideal_tetrahedron_is_obstructed_mod_two() {
    let d = named_diagram("[3^{1,1,1,1,1}]").unwrap();
    let g = DynkinDiagram::new(d, vec![2; 6]).unwrap();
    let h = triangle(0, 0, 3).unwrap();
    let sys = anchored_systems(&g, &h, 1);
    assert!(!sys.is_empty());
    for s in &sys {
        let ob = find_obstruction(s, &DEFAULT_MODULI).expect("obstruction");
        assert_eq!(ob.modulus, 2);
        assert!(ob.replay(s));
        assert!(cube(6, 2).all(|x| !s.satisfied_by(&x)));
    }
}
