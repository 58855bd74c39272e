//! Indefinite coefficients: write the missing generator as u* = Σ k_i v_i
//! over the root lattice of G, impose its products with the anchor roots
//! and its norm, then look for a congruence obstruction or a small solution.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chamber_search::enumerate_anchors;
use crate::diagrams::{CoxeterDiagram, DynkinDiagram};
use crate::lorentz::sqrt_rational;
use crate::roots::{is_root, RootKind, RootSystemSpec};
use crate::scalars::FieldScalar;

pub const DEFAULT_MODULI: [u64; 6] = [2, 4, 3, 8, 9, 16];

/// Residue tuples per modulus above which a modulus is skipped.
pub const MAX_RESIDUE_TUPLES: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiophError {
    #[error("anchor root {0} has the wrong dimension")]
    AnchorDimension(usize),
    #[error("anchor and H vertex lists differ in length")]
    AnchorShape,
    #[error("anchor root {0} has norm {1}, not proportional to the H variant")]
    NormMismatch(usize, i64),
    #[error("target product between the new generator and anchor {anchor} is {value}, not an integer")]
    NonIntegerTarget { anchor: usize, value: String },
    #[error("target norm {0} is not an integer")]
    NonIntegerNorm(String),
}

/// Integer roots u_1..u_k of G placed on the vertices `h_vertices` of H;
/// the new generator takes the place of `missing`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiophAnchor {
    pub missing: usize,
    pub h_vertices: Vec<usize>,
    pub roots: Vec<Vec<i64>>,
}

impl DiophAnchor {
    /// Standard anchor on simple roots of G.
    pub fn standard(n: usize, missing: usize, h_vertices: Vec<usize>, g_vertices: &[usize]) -> Self {
        let roots = g_vertices.iter().map(|&g| (0..n).map(|i| (i == g) as i64).collect()).collect();
        DiophAnchor { missing, h_vertices, roots }
    }
}

/// Σ_i k_i (B u_t)_i = target_t for every anchor, and kᵀBk = norm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiophSystem {
    pub ambient: DynkinDiagram,
    pub gram: Vec<Vec<i64>>,
    pub anchor: DiophAnchor,
    pub rows: Vec<Vec<i64>>,
    pub targets: Vec<i64>,
    pub norm: i64,
}

fn fmt_linear(coeffs: &[i64], var: &str) -> String {
    let mut s = String::new();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "−" } else if s.is_empty() { "" } else { "+" };
        let mag = c.unsigned_abs();
        let coef = if mag == 1 { String::new() } else { mag.to_string() };
        if s.is_empty() {
            let _ = write!(s, "{sign}{coef}{var}{i}");
        } else {
            let _ = write!(s, " {sign} {coef}{var}{i}");
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl DiophSystem {
    pub fn unknowns(&self) -> usize {
        self.gram.len()
    }

    /// Human-readable equations, one per line.
    pub fn equations(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .rows
            .iter()
            .zip(&self.targets)
            .enumerate()
            .map(|(t, (row, b))| format!("{b} = (u*, u{}) = {}", t + 1, fmt_linear(row, "k")))
            .collect();
        out.push(format!("{} = (u*, u*) = kᵀBk", self.norm));
        out
    }

    /// Exact check of every equation.
    pub fn satisfied_by(&self, k: &[i64]) -> bool {
        if k.len() != self.unknowns() {
            return false;
        }
        let lin = self
            .rows
            .iter()
            .zip(&self.targets)
            .all(|(row, &b)| row.iter().zip(k).map(|(a, x)| *a as i128 * *x as i128).sum::<i128>() == b as i128);
        lin && quad_value(&self.gram, k) == self.norm as i128
    }
}

fn quad_value(b: &[Vec<i64>], k: &[i64]) -> i128 {
    let mut s = 0i128;
    for (i, row) in b.iter().enumerate() {
        let t: i128 = row.iter().zip(k).map(|(g, x)| *g as i128 * *x as i128).sum();
        s += k[i] as i128 * t;
    }
    s
}

fn gram_i64(g: &DynkinDiagram) -> Vec<Vec<i64>> {
    g.gram_integers().iter().map(|r| r.iter().map(|x| x.to_i64().expect("small Gram entry")).collect()).collect()
}

/// The system for a given norm of the new generator.
pub fn build_with_norm(
    g: &DynkinDiagram,
    h: &CoxeterDiagram,
    anchor: &DiophAnchor,
    norm_star: i64,
) -> Result<DiophSystem, DiophError> {
    let gram = gram_i64(g);
    let n = gram.len();
    if anchor.roots.len() != anchor.h_vertices.len() {
        return Err(DiophError::AnchorShape);
    }
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for (t, (u, &hv)) in anchor.roots.iter().zip(&anchor.h_vertices).enumerate() {
        if u.len() != n {
            return Err(DiophError::AnchorDimension(t));
        }
        let row: Vec<i64> = (0..n).map(|i| gram[i].iter().zip(u).map(|(a, b)| a * b).sum()).collect();
        let qt = quad_value(&gram, u);
        let prod = BigRational::from_integer(BigInt::from(qt * norm_star as i128));
        let value = -(sqrt_rational(&prod).unwrap_or_else(FieldScalar::zero) * h.label(anchor.missing, hv).cos());
        let target = value
            .to_integer()
            .and_then(|v| v.to_i64())
            .filter(|_| sqrt_rational(&prod).is_some())
            .ok_or_else(|| DiophError::NonIntegerTarget { anchor: t, value: value.to_string() })?;
        rows.push(row);
        targets.push(target);
    }
    Ok(DiophSystem { ambient: g.clone(), gram, anchor: anchor.clone(), rows, targets, norm: norm_star })
}

/// The system from a length assignment of H: anchor norms must equal the
/// H norms up to one common factor, which also scales the new norm.
pub fn build_system(g: &DynkinDiagram, h: &DynkinDiagram, anchor: &DiophAnchor) -> Result<DiophSystem, DiophError> {
    let gram = gram_i64(g);
    let mut scale: Option<BigRational> = None;
    for (t, (u, &hv)) in anchor.roots.iter().zip(&anchor.h_vertices).enumerate() {
        if u.len() != gram.len() {
            return Err(DiophError::AnchorDimension(t));
        }
        let q = quad_value(&gram, u) as i64;
        let r = BigRational::new(BigInt::from(q), BigInt::from(h.norms[hv]));
        match &scale {
            None => scale = Some(r),
            Some(s) if *s == r => {}
            Some(_) => return Err(DiophError::NormMismatch(t, q)),
        }
    }
    let scale = scale.unwrap_or_else(BigRational::one);
    let star = scale * BigRational::from_integer(BigInt::from(h.norms[anchor.missing]));
    let norm = star
        .to_integer()
        .to_i64()
        .filter(|_| star.is_integer())
        .ok_or_else(|| DiophError::NonIntegerNorm(star.to_string()))?;
    build_with_norm(g, &h.base, anchor, norm)
}

/// Systems for every standard anchor of H ∖ {missing} in G and every norm
/// of the new generator among the root lengths of G.
pub fn anchored_systems(g: &DynkinDiagram, h: &CoxeterDiagram, missing: usize) -> Vec<DiophSystem> {
    let mut lengths = g.norms.clone();
    lengths.sort_unstable();
    lengths.dedup();
    let mut out = Vec::new();
    for a in enumerate_anchors(h, &g.base, missing) {
        let anchor = DiophAnchor::standard(g.rank(), a.missing, a.h_vertices.clone(), &a.g_vertices);
        for &q in &lengths {
            if let Ok(sys) = build_with_norm(g, h, &anchor, q as i64) {
                out.push(sys);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// Integer solutions of the linear part.

/// k = particular + Σ_j t_j basis[j] describes every integer solution of
/// the linear equations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSolution {
    pub particular: Vec<BigInt>,
    pub basis: Vec<Vec<BigInt>>,
}

/// Column reduction A·U = [L | 0] with U unimodular, then forward
/// substitution. `None` when no integer solution exists.
pub fn integer_solutions(rows: &[Vec<i64>], rhs: &[i64]) -> Option<LinearSolution> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut u: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let swap_cols = |m: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    let sub_col = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let v = &row[src] * q;
            row[dst] -= v;
        }
    };
    let mut rank = 0;
    let mut pivot_of_row = vec![None; a.len()];
    for r in 0..a.len() {
        loop {
            let best = (rank..n).filter(|&c| !a[r][c].is_zero()).min_by_key(|&c| a[r][c].abs());
            let Some(c) = best else { break };
            swap_cols(&mut a, rank, c);
            swap_cols(&mut u, rank, c);
            let mut done = true;
            for c2 in rank + 1..n {
                if a[r][c2].is_zero() {
                    continue;
                }
                let q = a[r][c2].div_floor(&a[r][rank]);
                sub_col(&mut a, c2, rank, &q);
                sub_col(&mut u, c2, rank, &q);
                if !a[r][c2].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rank < n && !a[r][rank].is_zero() {
            pivot_of_row[r] = Some(rank);
            rank += 1;
        }
    }
    let mut y = vec![BigInt::zero(); n];
    let mut filled = 0;
    for r in 0..a.len() {
        let partial: BigInt = (0..filled).map(|c| &a[r][c] * &y[c]).sum();
        let rest = BigInt::from(rhs[r]) - partial;
        match pivot_of_row[r] {
            Some(p) => {
                if !(&rest % &a[r][p]).is_zero() {
                    return None;
                }
                y[p] = rest / &a[r][p];
                filled = p + 1;
            }
            None => {
                if !rest.is_zero() {
                    return None;
                }
            }
        }
    }
    let particular = (0..n).map(|i| (0..n).map(|j| &u[i][j] * &y[j]).sum()).collect();
    let basis = (rank..n).map(|j| (0..n).map(|i| u[i][j].clone()).collect()).collect();
    Some(LinearSolution { particular, basis })
}

/// F(t) = Σ_{i≤j} coeffs[i][j] t_i t_j + Σ linear[i] t_i + constant: the
/// norm equation on the solution lattice, divided by the gcd of all its
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedQuadratic {
    pub solution: LinearSolution,
    /// Upper triangular: coeffs[i][j] for i ≤ j.
    pub coeffs: Vec<Vec<BigInt>>,
    pub linear: Vec<BigInt>,
    pub constant: BigInt,
    /// gcd of all coefficients of the undivided equation.
    pub divisor: BigInt,
    pub divided: bool,
}

impl ReducedQuadratic {
    pub fn variables(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, t: &[BigInt]) -> BigInt {
        let d = self.variables();
        let mut v = self.constant.clone();
        for i in 0..d {
            v += &self.linear[i] * &t[i];
            for j in i..d {
                v += &self.coeffs[i][j] * &t[i] * &t[j];
            }
        }
        v
    }

    /// Exhaustive check of F(t) ≡ 0 (mod m). Returns the number of tuples
    /// examined and a solution if one exists; `None` if the modulus is too
    /// large for the number of variables.
    pub fn solve_mod(&self, m: u64) -> Option<(u64, Option<Vec<u64>>)> {
        let md = BigInt::from(m);
        let r = |x: &BigInt| x.mod_floor(&md).to_u64().unwrap() as u128;
        let d = self.variables();
        let q: Vec<Vec<u128>> = (0..d).map(|i| (0..d).map(|j| if j >= i { r(&self.coeffs[i][j]) } else { 0 }).collect()).collect();
        let lin: Vec<u128> = self.linear.iter().map(r).collect();
        let c = r(&self.constant);
        // variables whose coefficients all vanish mod m do not matter
        let live: Vec<usize> = (0..d)
            .filter(|&i| lin[i] != 0 || (0..d).any(|j| q[i.min(j)][i.max(j)] != 0))
            .collect();
        let total = (m as u128).checked_pow(live.len() as u32)?;
        if total > MAX_RESIDUE_TUPLES as u128 {
            return None;
        }
        let m128 = m as u128;
        let mut t = vec![0u128; d];
        let mut count = 0u64;
        loop {
            count += 1;
            let mut v = c;
            for (a, &i) in live.iter().enumerate() {
                if t[i] == 0 {
                    continue;
                }
                v += lin[i] * t[i];
                for &j in &live[a..] {
                    v += (q[i][j] * t[i] % m128) * t[j];
                }
                v %= m128;
            }
            if v % m128 == 0 {
                return Some((count, Some(t.iter().map(|&x| x as u64).collect())));
            }
            let mut k = 0;
            loop {
                if k == live.len() {
                    return Some((count, None));
                }
                let i = live[k];
                t[i] += 1;
                if t[i] < m128 {
                    break;
                }
                t[i] = 0;
                k += 1;
            }
        }
    }

    pub fn describe(&self) -> String {
        let d = self.variables();
        let mut s = String::new();
        for i in 0..d {
            for j in i..d {
                let c = &self.coeffs[i][j];
                if c.is_zero() {
                    continue;
                }
                let term = if i == j { format!("t{i}²") } else { format!("t{i}t{j}") };
                push_term(&mut s, c, &term);
            }
        }
        for i in 0..d {
            if !self.linear[i].is_zero() {
                push_term(&mut s, &self.linear[i], &format!("t{i}"));
            }
        }
        if !self.constant.is_zero() || s.is_empty() {
            push_term(&mut s, &self.constant, "");
        }
        s + " = 0"
    }
}

fn push_term(s: &mut String, c: &BigInt, var: &str) {
    let neg = c.is_negative();
    let mag = c.abs();
    let coef = if mag.is_one() && !var.is_empty() { String::new() } else { mag.to_string() };
    if s.is_empty() {
        let _ = write!(s, "{}{coef}{var}", if neg { "−" } else { "" });
    } else {
        let _ = write!(s, " {} {coef}{var}", if neg { "−" } else { "+" });
    }
}

/// Substitute the integer solutions of the linear part into kᵀBk − norm.
/// `None` when the linear part has no integer solution.
pub fn reduce(sys: &DiophSystem) -> Option<ReducedQuadratic> {
    let sol = integer_solutions(&sys.rows, &sys.targets)?;
    let n = sys.unknowns();
    let b: Vec<Vec<BigInt>> = sys.gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mat_vec = |v: &[BigInt]| -> Vec<BigInt> { (0..n).map(|i| (0..n).map(|j| &b[i][j] * &v[j]).sum()).collect() };
    let dotv = |x: &[BigInt], y: &[BigInt]| -> BigInt { x.iter().zip(y).map(|(a, c)| a * c).sum() };
    let bx0 = mat_vec(&sol.particular);
    let bb: Vec<Vec<BigInt>> = sol.basis.iter().map(|v| mat_vec(v)).collect();
    let d = sol.basis.len();
    let mut coeffs = vec![vec![BigInt::zero(); d]; d];
    for i in 0..d {
        for j in i..d {
            let g = dotv(&sol.basis[i], &bb[j]);
            coeffs[i][j] = if i == j { g } else { g * 2 };
        }
    }
    let mut linear: Vec<BigInt> = (0..d).map(|i| dotv(&sol.basis[i], &bx0) * 2).collect();
    let mut constant = dotv(&sol.particular, &bx0) - BigInt::from(sys.norm);
    let mut content = BigInt::zero();
    for i in 0..d {
        for j in i..d {
            content = content.gcd(&coeffs[i][j]);
        }
        content = content.gcd(&linear[i]);
    }
    let divisor = content.gcd(&constant);
    let divided = !divisor.is_zero() && !divisor.is_one();
    if divided {
        for row in coeffs.iter_mut() {
            for x in row.iter_mut() {
                *x = &*x / &divisor;
            }
        }
        for x in linear.iter_mut() {
            *x = &*x / &divisor;
        }
        constant /= &divisor;
    }
    Some(ReducedQuadratic { solution: sol, coeffs, linear, constant, divisor, divided })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub modulus: u64,
    /// Tuples examined; `None` when the modulus was skipped as too large.
    pub tuples: Option<u64>,
    pub solution: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ObstructionKind {
    /// The linear equations have no integer solution.
    Linear,
    /// No free parameters remain and the norm equation fails outright.
    Constant,
    /// No residue tuple solves the reduced equation mod `modulus`.
    Residues,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    /// 0 unless the obstruction is a congruence.
    pub modulus: u64,
    pub reduced: Option<ReducedQuadratic>,
    pub transcript: Vec<ResidueCheck>,
    pub derivation: Vec<String>,
}

impl Obstruction {
    /// Re-derive the verdict from the stored reduced equation.
    pub fn replay(&self, sys: &DiophSystem) -> bool {
        match self.kind {
            ObstructionKind::Linear => integer_solutions(&sys.rows, &sys.targets).is_none(),
            ObstructionKind::Constant => reduce(sys)
                .is_some_and(|r| Some(&r) == self.reduced.as_ref() && r.variables() == 0 && !r.constant.is_zero()),
            ObstructionKind::Residues => {
                let Some(r) = reduce(sys) else { return false };
                if Some(&r) != self.reduced.as_ref() {
                    return false;
                }
                matches!(r.solve_mod(self.modulus), Some((_, None)))
            }
        }
    }
}

/// Look for a congruence obstruction at each modulus in turn.
pub fn find_obstruction(sys: &DiophSystem, moduli: &[u64]) -> Option<Obstruction> {
    let mut derivation = sys.equations();
    let Some(red) = reduce(sys) else {
        derivation.push("the linear equations have no integer solution".into());
        return Some(Obstruction { kind: ObstructionKind::Linear, modulus: 0, reduced: None, transcript: vec![], derivation });
    };
    let d = red.variables();
    derivation.push(format!(
        "integer solutions of the linear equations: k = x₀ + Σ t_j b_j with {d} free parameter{}",
        if d == 1 { "" } else { "s" }
    ));
    if d == 0 {
        if red.constant.is_zero() {
            return None;
        }
        derivation.push(format!("the norm equation reduces to {} = 0", red.constant));
        return Some(Obstruction {
            kind: ObstructionKind::Constant,
            modulus: 0,
            reduced: Some(red),
            transcript: vec![],
            derivation,
        });
    }
    if red.divided {
        derivation.push(format!("dividing the norm equation by {}: {}", red.divisor, red.describe()));
    } else {
        derivation.push(format!("norm equation: {}", red.describe()));
    }
    let mut transcript = Vec::new();
    for &m in moduli {
        match red.solve_mod(m) {
            None => transcript.push(ResidueCheck { modulus: m, tuples: None, solution: None }),
            Some((count, sol)) => {
                let solved = sol.is_some();
                transcript.push(ResidueCheck { modulus: m, tuples: Some(count), solution: sol });
                if !solved {
                    derivation.push(format!("no solution modulo {m} ({count} residue tuples checked)"));
                    return Some(Obstruction { kind: ObstructionKind::Residues, modulus: m, reduced: Some(red), transcript, derivation });
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------
// Bounded search.

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub coefficients: Vec<i64>,
    pub root: RootKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub bound: i64,
    pub witness: Option<Witness>,
    pub examined: u64,
    pub note: String,
}

/// Rational elimination: pivots k_p = (c_p + Σ_f d_pf k_f) / den_p.
struct Elimination {
    free: Vec<usize>,
    pivots: Vec<(usize, i128, Vec<i128>, i128)>,
    consistent: bool,
}

fn eliminate(rows: &[Vec<i64>], rhs: &[i64], n: usize) -> Elimination {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .chain(std::iter::once(BigRational::from_integer(BigInt::from(b))))
                .collect()
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][c].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..=n {
                    let v = &m[row][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
        pivot_cols.push(c);
        row += 1;
    }
    let consistent = m[row..].iter().all(|r| r[n].is_zero());
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let pivots = pivot_cols
        .iter()
        .enumerate()
        .map(|(r, &c)| {
            let den = free
                .iter()
                .map(|&f| m[r][f].denom().clone())
                .fold(m[r][n].denom().clone(), |a, b| a.lcm(&b));
            let scale = BigRational::from_integer(den.clone());
            let cst = (&m[r][n] * &scale).to_integer().to_i128().unwrap();
            let coef = free.iter().map(|&f| (-&m[r][f] * &scale).to_integer().to_i128().unwrap()).collect();
            (c, cst, coef, den.to_i128().unwrap())
        })
        .collect();
    Elimination { free, pivots, consistent }
}

/// Search |k_f| ≤ bound over the free unknowns, in shells of increasing
/// max-norm. A solution that is a real root of G is preferred; otherwise
/// the first solution found is returned.
pub fn search_witness(sys: &DiophSystem, bound: i64) -> WitnessSearch {
    let n = sys.unknowns();
    let el = eliminate(&sys.rows, &sys.targets, n);
    let spec = RootSystemSpec::new(sys.ambient.clone());
    let mut out = WitnessSearch { bound, witness: None, examined: 0, note: String::new() };
    if !el.consistent {
        out.note = "linear equations are inconsistent".into();
        return out;
    }
    let d = el.free.len();
    let mut first: Option<Witness> = None;
    let mut k = vec![0i64; n];
    let mut t = vec![0i64; d];
    for shell in 0..=bound {
        // odometer over [-shell, shell]^d, keeping tuples on the shell
        for x in t.iter_mut() {
            *x = -shell;
        }
        loop {
            if d == 0 || t.iter().any(|x| x.abs() == shell) || shell == 0 {
                out.examined += 1;
                let mut ok = true;
                for (i, &f) in el.free.iter().enumerate() {
                    k[f] = t[i];
                }
                for (c, cst, coef, den) in &el.pivots {
                    let num: i128 = cst + coef.iter().zip(&t).map(|(a, b)| a * *b as i128).sum::<i128>();
                    if num % den != 0 {
                        ok = false;
                        break;
                    }
                    k[*c] = (num / den) as i64;
                }
                if ok && quad_value(&sys.gram, &k) == sys.norm as i128 {
                    debug_assert!(sys.satisfied_by(&k));
                    let root = is_root(&spec, &k).unwrap_or(RootKind::NotARoot);
                    let w = Witness { coefficients: k.clone(), root };
                    if root == RootKind::Real {
                        out.witness = Some(w);
                        out.note = format!("real root found at max-norm {shell}");
                        return out;
                    }
                    first.get_or_insert(w);
                }
            }
            if d == 0 || shell == 0 {
                break;
            }
            let mut i = 0;
            while i < d {
                t[i] += 1;
                if t[i] <= shell {
                    break;
                }
                t[i] = -shell;
                i += 1;
            }
            if i == d {
                break;
            }
        }
    }
    out.note = match &first {
        Some(_) => format!("solutions exist within bound {bound}, none of them a real root"),
        None => format!("no solution with free coefficients bounded by {bound}; this is not a proof of non-existence"),
    };
    out.witness = first;
    out
}

/// Pairs (α_i, β) with α_i simple and β a positive real root parallel to it
/// (normalized product −1), β found among reflections of simple roots with
/// coefficients at most `bound`. Not claimed to be complete.
pub fn parallel_pairs(g: &DynkinDiagram, bound: i64) -> Vec<(usize, Vec<i64>)> {
    let spec = RootSystemSpec::new(g.clone());
    let n = g.rank();
    let mut seen = std::collections::HashSet::new();
    let mut roots: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|k| (k == i) as i64).collect()).collect();
    for r in &roots {
        seen.insert(r.clone());
    }
    let mut idx = 0;
    while idx < roots.len() {
        let x = roots[idx].clone();
        idx += 1;
        for i in 0..n {
            let bx: i128 = spec.gram[i].iter().zip(&x).map(|(a, b)| *a as i128 * *b as i128).sum();
            let f = (2 * bx / spec.gram[i][i] as i128) as i64;
            let mut y = x.clone();
            y[i] -= f;
            if y.iter().all(|&c| (0..=bound).contains(&c)) && seen.insert(y.clone()) {
                roots.push(y);
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        let e: Vec<i64> = (0..n).map(|k| (k == i) as i64).collect();
        for r in &roots {
            let p = spec.inner(&e, r);
            let qq = spec.inner(r, r) * spec.gram[i][i] as i128;
            if p < 0 && p * p == qq {
                out.push((i, r.clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{named_diagram, triangle};

    fn simply_laced(name: &str) -> DynkinDiagram {
        let d = named_diagram(name).unwrap();
        let n = d.rank();
        DynkinDiagram::new(d, vec![2; n]).unwrap()
    }

    #[test]
    fn ideal_tetrahedron_equations() {
        let g = simply_laced("[3^{1,1,1,1,1}]");
        let h = triangle(0, 0, 3).unwrap();
        let sys = anchored_systems(&g, &h, 1);
        assert_eq!(sys.len(), 1);
        let s = &sys[0];
        assert_eq!(s.targets, vec![-2, -2]);
        assert_eq!(s.norm, 2);
        let ob = find_obstruction(s, &DEFAULT_MODULI).expect("obstruction");
        assert_eq!(ob.modulus, 2);
        assert!(ob.replay(s));
    }

    #[test]
    fn linear_solutions() {
        let sol = integer_solutions(&[vec![2, 4]], &[6]).unwrap();
        assert_eq!(sol.basis.len(), 1);
        assert!(integer_solutions(&[vec![2, 4]], &[3]).is_none());
    }

    #[test]
    fn two_length_example() {
        let g = DynkinDiagram::new(named_diagram("[4,3^{1,1,1}]").unwrap(), vec![4, 4, 4, 4, 2]).unwrap();
        let h = triangle(0, 2, 4).unwrap();
        let sys = anchored_systems(&g, &h, 1);
        assert_eq!(sys.len(), 2);
        for s in &sys {
            let ob = find_obstruction(s, &DEFAULT_MODULI).expect("obstruction");
            assert_eq!(ob.modulus, 4);
        }
    }

    #[test]
    fn pyramid_examples() {
        let f3 = named_diagram("F3").unwrap();
        let g = DynkinDiagram::new(f3, vec![2; 7]).unwrap();
        let h = triangle(0, 0, 0).unwrap();
        let anchor = DiophAnchor::standard(7, 2, vec![0, 1], &[1, 2]);
        let s = build_with_norm(&g, &h, &anchor, 2).unwrap();
        let ob = find_obstruction(&s, &DEFAULT_MODULI).expect("obstruction");
        assert!(ob.replay(&s));
        let f4 = named_diagram("F4").unwrap();
        let g = DynkinDiagram::new(f4, vec![2; 9]).unwrap();
        let mut u2 = vec![0i64; 9];
        u2[0] = 2;
        u2[3] = 1;
        u2[5] = 1;
        u2[7] = 1;
        let mut u1 = vec![0i64; 9];
        u1[1] = 1;
        let anchor = DiophAnchor { missing: 2, h_vertices: vec![0, 1], roots: vec![u1, u2] };
        let s = build_with_norm(&g, &h, &anchor, 2).unwrap();
        assert_eq!(s.targets, vec![-2, -2]);
        let w = search_witness(&s, 10);
        assert!(w.witness.is_some());
        assert!(find_obstruction(&s, &DEFAULT_MODULI).is_none());
    }
}
