//! Named diagrams: triangle groups `(p,q,r)`, bracket notation and the
//! pyramid groups F2..F4.

use super::{CoxeterDiagram, DiagramError, Label};

/// Names with a fixed vertex numbering, matched case-insensitively after
/// normalization (see [`normalize_name`]).
pub const NAMED_DIAGRAMS: &[&str] = &[
    "(0,0,0)",
    "[4^{[4]}]",
    "[3^{[3,3]}]",
    "[(3,6)^{[2]}]",
    "[(3^2,4)^{[2]}]",
    "[3^{1,1,1,1,1}]",
    "[4,3^{1,1,1}]",
    "[(3^2,4^2)]",
    "F2",
    "F3",
    "F4",
];

/// Triangle group with angles π/p, π/q, π/r (0 meaning a zero angle).
/// Vertices 0, 1, 2 are the sides; m(0,1) = p, m(1,2) = q, m(2,0) = r.
pub fn triangle(p: u32, q: u32, r: u32) -> Result<CoxeterDiagram, DiagramError> {
    CoxeterDiagram::from_label_edges(3, &[(0, 1, p), (1, 2, q), (2, 0, r)])
        .map(|mut d| {
            // label 2 means no edge; from_label_edges already stored it
            for (i, j, m) in [(0, 1, p), (1, 2, q), (2, 0, r)] {
                if m == 2 {
                    d.set(i, j, Label::TWO);
                }
            }
            d
        })
}

/// Pyramid group F_k (k = 2, 3, 4): vertex 0 joined by simple edges to
/// 2k vertices, consecutive pairs (1,2), (3,4), ... joined by bold edges.
pub fn pyramid(k: usize) -> Result<CoxeterDiagram, DiagramError> {
    if !(2..=4).contains(&k) {
        return Err(DiagramError::UnknownName(format!("F{k}")));
    }
    let mut e = Vec::new();
    for i in 1..=2 * k {
        e.push((0, i, 3));
    }
    for p in 0..k {
        e.push((2 * p + 1, 2 * p + 2, 0));
    }
    CoxeterDiagram::from_label_edges(2 * k + 1, &e)
}

/// Lowercase, drop whitespace and `$`, unify superscript-two and the
/// script F, and accept `;` as a separator.
pub fn normalize_name(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        match ch {
            c if c.is_whitespace() || c == '$' => {}
            '²' => out.push_str("^2"),
            '₂' => out.push('2'),
            '₃' => out.push('3'),
            '₄' => out.push('4'),
            '𝓕' | 'ℱ' => out.push('f'),
            ';' => out.push(','),
            c => out.extend(c.to_lowercase()),
        }
    }
    out.replace("\\mathcal{f}", "f").replace("f_", "f")
}

/// Resolve a name to a diagram.
pub fn named_diagram(name: &str) -> Result<CoxeterDiagram, DiagramError> {
    let n = normalize_name(name);
    let unknown = || DiagramError::UnknownName(name.to_string());
    match n.as_str() {
        "f2" => return pyramid(2),
        "f3" => return pyramid(3),
        "f4" => return pyramid(4),
        // center 0 with five leaves
        "[3^{1,1,1,1,1}]" => {
            return CoxeterDiagram::from_label_edges(6, &[(0, 1, 3), (0, 2, 3), (0, 3, 3), (0, 4, 3), (0, 5, 3)])
        }
        // center 1 with simple leaves 0, 2, 3 and the 4-edge leaf 4
        "[4,3^{1,1,1}]" => {
            return CoxeterDiagram::from_label_edges(5, &[(0, 1, 3), (1, 2, 3), (1, 3, 3), (1, 4, 4)])
        }
        "[3^{[3,3]}]" => {
            return CoxeterDiagram::from_label_edges(
                4,
                &[(0, 1, 3), (0, 2, 3), (0, 3, 3), (1, 2, 3), (1, 3, 3), (2, 3, 3)],
            )
        }
        _ => {}
    }
    if let Some(inner) = n.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 3 {
            return Err(unknown());
        }
        let v: Result<Vec<u32>, _> = parts.iter().map(|p| p.parse::<u32>()).collect();
        let v = v.map_err(|_| unknown())?;
        return triangle(v[0], v[1], v[2]);
    }
    let inner = n
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(unknown)?;
    parse_bracket(inner).ok_or_else(unknown)?
}

fn parse_label(s: &str) -> Option<u32> {
    match s {
        "inf" | "∞" => Some(0),
        t => t.parse().ok(),
    }
}

/// `m` or `m^e` → e copies of m.
fn expand_items(s: &str) -> Option<Vec<u32>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        match item.split_once('^') {
            Some((m, e)) => {
                let m = parse_label(m)?;
                let e: usize = e.trim_matches(|c| c == '{' || c == '}').parse().ok()?;
                out.extend(std::iter::repeat_n(m, e));
            }
            None => out.push(parse_label(item)?),
        }
    }
    Some(out)
}

fn cycle(labels: &[u32]) -> Result<CoxeterDiagram, DiagramError> {
    let n = labels.len();
    let e: Vec<(usize, usize, u32)> = (0..n).map(|i| (i, (i + 1) % n, labels[i])).collect();
    CoxeterDiagram::from_label_edges(n, &e)
}

fn parse_bracket(s: &str) -> Option<Result<CoxeterDiagram, DiagramError>> {
    // cycles: (list) or (list)^{[k]}
    if let Some(rest) = s.strip_prefix('(') {
        let close = rest.find(')')?;
        let items = expand_items(&rest[..close])?;
        let tail = &rest[close + 1..];
        let reps = if tail.is_empty() {
            1
        } else {
            tail.strip_prefix("^{[")?.strip_suffix("]}")?.parse::<usize>().ok()?
        };
        let labels: Vec<u32> = items.iter().copied().cycle().take(items.len() * reps).collect();
        return Some(cycle(&labels));
    }
    // m^{[k]}: k-cycle with all labels m
    if let Some((m, rest)) = s.split_once("^{[") {
        if !m.contains(',') {
            let k: usize = rest.strip_suffix("]}")?.parse().ok()?;
            let m = parse_label(m)?;
            return Some(cycle(&vec![m; k]));
        }
    }
    // chain, optionally ending in a star 3^{a,b,c}
    let (chain_part, star) = match s.find("^{") {
        Some(pos) => {
            let head = &s[..pos];
            let (chain, center_label) = match head.rfind(',') {
                Some(c) => (&head[..c], &head[c + 1..]),
                None => ("", head),
            };
            let arms: Option<Vec<usize>> = s[pos + 2..]
                .strip_suffix('}')?
                .split(',')
                .map(|a| a.parse().ok())
                .collect();
            (chain, Some((parse_label(center_label)?, arms?)))
        }
        None => (s, None),
    };
    let chain = if chain_part.is_empty() { Vec::new() } else { expand_items(chain_part)? };
    let mut edges: Vec<(usize, usize, u32)> = Vec::new();
    let mut n = chain.len() + 1;
    for (i, &m) in chain.iter().enumerate() {
        edges.push((i, i + 1, m));
    }
    if let Some((m, arms)) = star {
        let center = chain.len();
        for len in arms {
            let mut prev = center;
            for _ in 0..len {
                edges.push((prev, n, m));
                prev = n;
                n += 1;
            }
        }
    }
    Some(CoxeterDiagram::from_label_edges(n, &edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{canonical_form, classify};

    #[test]
    fn paper_names_resolve() {
        for name in NAMED_DIAGRAMS {
            let d = named_diagram(name).unwrap();
            let c = classify(&d);
            if name.starts_with('f') || name.starts_with('F') {
                assert!(!c.is_hyperbolic_simplicial());
            } else {
                assert!(c.is_hyperbolic_simplicial(), "{name}: {c:?}");
            }
        }
        let a = named_diagram("[4;3^{1,1,1}]").unwrap();
        let b = named_diagram("[4,3^{1,1,1}]").unwrap();
        assert_eq!(a, b);
        assert_eq!(named_diagram("𝓕₃").unwrap(), pyramid(3).unwrap());
        let c1 = named_diagram("[(3²,4)^{[2]}]").unwrap();
        let c2 = named_diagram("[(3,3,4,3,3,4)]").unwrap();
        assert_eq!(canonical_form(&c1, None).code, canonical_form(&c2, None).code);
    }

    #[test]
    fn linear_and_star() {
        let d = named_diagram("[3,5,3]").unwrap();
        assert_eq!(d.rank(), 4);
        assert!(classify(&d).is_compact());
        let s = named_diagram("[3^{1,1,1}]").unwrap();
        assert_eq!(s.rank(), 4);
        assert_eq!(s.degree(0), 3);
    }
}
