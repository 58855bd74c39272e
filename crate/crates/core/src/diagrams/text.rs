//! Plain-text diagram format:
//!
//! ```text
//! name [4,3^{1,1,1}]
//! rank 5
//! edge 1 2 3
//! edge 2 5 4
//! arrow 5 2
//! ```
//!
//! Vertices are 1-based, labels are 3..7 or `inf`, absent pairs are 2.
//! `arrow i j` says the root at j is longer (Dynkin input). A file may
//! hold several stanzas, each starting with `rank`.

use super::{CoxeterDiagram, DiagramError, DynkinDiagram, Label};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedDiagram {
    pub diagram: CoxeterDiagram,
    pub name: Option<String>,
    /// Squared lengths when arrows were given (or the diagram is simply
    /// laced and arrows were requested by the caller).
    pub dynkin: Option<DynkinDiagram>,
}

struct Stanza {
    name: Option<String>,
    rank: usize,
    edges: Vec<(usize, usize, Label)>,
    arrows: Vec<(usize, usize)>,
}

pub fn parse_diagram_text(text: &str) -> Result<Vec<ParsedDiagram>, DiagramError> {
    let mut stanzas: Vec<Stanza> = Vec::new();
    let mut pending_name: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| DiagramError::Parse { line: lineno + 1, msg: msg.to_string() };
        let mut words = line.split_whitespace();
        let key = words.next().unwrap();
        let rest: Vec<&str> = words.collect();
        let vertex = |s: &str, rank: usize| -> Result<usize, DiagramError> {
            let v: usize = s.parse().map_err(|_| err(&format!("bad vertex {s:?}")))?;
            if v == 0 || v > rank {
                return Err(err(&format!("vertex {v} out of range 1..={rank}")));
            }
            Ok(v - 1)
        };
        match key {
            "name" => {
                let name = line["name".len()..].trim().to_string();
                match stanzas.last_mut() {
                    Some(s) if s.name.is_none() && !s.edges.is_empty() => s.name = Some(name),
                    _ => pending_name = Some(name),
                }
            }
            "rank" => {
                let n: usize = rest
                    .first()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("expected `rank N`"))?;
                if n == 0 {
                    return Err(err("rank must be positive"));
                }
                stanzas.push(Stanza { name: pending_name.take(), rank: n, edges: Vec::new(), arrows: Vec::new() });
            }
            "edge" => {
                let s = stanzas.last_mut().ok_or_else(|| err("`edge` before `rank`"))?;
                if rest.len() != 3 {
                    return Err(err("expected `edge i j m`"));
                }
                let i = vertex(rest[0], s.rank)?;
                let j = vertex(rest[1], s.rank)?;
                if i == j {
                    return Err(err("self-edge"));
                }
                let m: Label = rest[2].parse().map_err(|e: DiagramError| err(&e.to_string()))?;
                s.edges.push((i, j, m));
            }
            "arrow" => {
                let s = stanzas.last_mut().ok_or_else(|| err("`arrow` before `rank`"))?;
                if rest.len() != 2 {
                    return Err(err("expected `arrow i j`"));
                }
                let i = vertex(rest[0], s.rank)?;
                let j = vertex(rest[1], s.rank)?;
                s.arrows.push((i, j));
            }
            other => return Err(err(&format!("unknown keyword {other:?}"))),
        }
    }
    if stanzas.is_empty() {
        return Err(DiagramError::Parse { line: 0, msg: "no `rank` line".into() });
    }
    stanzas.into_iter().map(finish).collect()
}

fn finish(s: Stanza) -> Result<ParsedDiagram, DiagramError> {
    let diagram = CoxeterDiagram::from_edges(s.rank, &s.edges)?;
    let dynkin = if s.arrows.is_empty() {
        None
    } else {
        Some(norms_from_arrows(&diagram, &s.arrows)?)
    };
    Ok(ParsedDiagram { diagram, name: s.name, dynkin })
}

/// Squared lengths implied by arrows; each connected component is scaled
/// so that its shortest root has squared length 2.
pub(crate) fn norms_from_arrows(
    d: &CoxeterDiagram,
    arrows: &[(usize, usize)],
) -> Result<DynkinDiagram, DiagramError> {
    let n = d.rank();
    // log-exponents (of 2, of 3) relative to the component root
    let mut exp: Vec<Option<(i32, i32)>> = vec![None; n];
    let ratio = |i: usize, j: usize| -> Result<(i32, i32), DiagramError> {
        let m = d.label(i, j);
        let dir = if arrows.contains(&(i, j)) {
            1
        } else if arrows.contains(&(j, i)) {
            -1
        } else {
            0
        };
        let step = match m.order() {
            Some(3) => (0, 0),
            Some(4) => (1, 0),
            Some(6) => (0, 1),
            None => (2, 0),
            _ => return Err(DiagramError::BadLengths(format!("label {m} admits no root lengths"))),
        };
        if step != (0, 0) && dir == 0 && m.order().is_some() {
            return Err(DiagramError::BadLengths(format!("edge {}-{} needs an arrow", i + 1, j + 1)));
        }
        Ok((step.0 * dir, step.1 * dir))
    };
    for comp in super::components(d) {
        exp[comp[0]] = Some((0, 0));
        let mut stack = vec![comp[0]];
        while let Some(v) = stack.pop() {
            let ev = exp[v].unwrap();
            for u in d.neighbors(v) {
                let r = ratio(v, u)?;
                let eu = (ev.0 + r.0, ev.1 + r.1);
                match exp[u] {
                    None => {
                        exp[u] = Some(eu);
                        stack.push(u);
                    }
                    Some(old) if old != eu => {
                        return Err(DiagramError::BadLengths("inconsistent arrows around a cycle".into()))
                    }
                    _ => {}
                }
            }
        }
        let min2 = comp.iter().map(|&v| exp[v].unwrap().0).min().unwrap();
        let min3 = comp.iter().map(|&v| exp[v].unwrap().1).min().unwrap();
        for &v in &comp {
            let e = exp[v].unwrap();
            exp[v] = Some((e.0 - min2, e.1 - min3));
        }
    }
    let norms: Vec<u32> = exp
        .iter()
        .map(|e| {
            let (a, b) = e.unwrap();
            2 * 2u32.pow(a as u32) * 3u32.pow(b as u32)
        })
        .collect();
    DynkinDiagram::new(d.clone(), norms)
}

/// Render in the text format, with arrows when lengths are given.
pub fn format_diagram(d: &CoxeterDiagram, name: Option<&str>, norms: Option<&[u32]>) -> String {
    let mut out = String::new();
    if let Some(nm) = name {
        out.push_str(&format!("name {nm}\n"));
    }
    out.push_str(&format!("rank {}\n", d.rank()));
    for (i, j, m) in d.edges() {
        out.push_str(&format!("edge {} {} {}\n", i + 1, j + 1, m));
    }
    if let Some(q) = norms {
        for (i, j, _) in d.edges() {
            if q[i] < q[j] {
                out.push_str(&format!("arrow {} {}\n", i + 1, j + 1));
            } else if q[j] < q[i] {
                out.push_str(&format!("arrow {} {}\n", j + 1, i + 1));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_arrows() {
        let text = "name [4,3^{1,1,1}]\nrank 5\nedge 1 2 3\nedge 2 3 3\nedge 2 4 3\nedge 2 5 4\narrow 5 2\n";
        let parsed = parse_diagram_text(text).unwrap();
        assert_eq!(parsed.len(), 1);
        let p = &parsed[0];
        let dk = p.dynkin.as_ref().unwrap();
        assert_eq!(dk.norms, vec![4, 4, 4, 4, 2]);
        let again = format_diagram(&p.diagram, p.name.as_deref(), Some(&dk.norms));
        assert_eq!(parse_diagram_text(&again).unwrap()[0], *p);
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse_diagram_text("edge 1 2 3").is_err());
        assert!(parse_diagram_text("rank 2\nedge 1 3 3").is_err());
        assert!(parse_diagram_text("rank 2\nedge 1 2 9").is_err());
        assert!(parse_diagram_text("rank 2\nedge 1 2 4\narrow 1 2\narrow 2 1").is_err());
    }
}
