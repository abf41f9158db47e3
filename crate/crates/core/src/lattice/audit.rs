//! Local operator audit: every term is a Hermitian projector and every pair
//! of terms with overlapping support commutes.
//!
//! Checks run on the joint support of the operators involved, so the cost
//! is `|G|^{|support|}` per pair rather than the full Hilbert dimension.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::terms::{TermOp, TermSet};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

pub const COMMUTATOR_TOLERANCE: f64 = 1e-12;
/// Largest local basis enumerated for a single check.
pub const LOCAL_LIMIT: u128 = 1 << 24;

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorFinding {
    pub first: String,
    pub second: String,
    /// Frobenius norm of the commutator on the joint support.
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectorFinding {
    pub term: String,
    /// Frobenius norm of `P² - P`.
    pub idempotency: f64,
    /// Frobenius norm of `P - P†`.
    pub hermiticity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub terms: usize,
    pub pairs_checked: usize,
    pub noncommuting: Vec<CommutatorFinding>,
    pub non_projectors: Vec<ProjectorFinding>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.noncommuting.is_empty() && self.non_projectors.is_empty()
    }

    /// `Err(Audit)` naming the first offending pair or term.
    pub fn into_result(self) -> Result<AuditReport> {
        if let Some(f) = self.noncommuting.first() {
            return Err(Error::Audit(format!(
                "{} and {} do not commute (norm {:.3e})",
                f.first, f.second, f.norm
            )));
        }
        if let Some(f) = self.non_projectors.first() {
            return Err(Error::Audit(format!("{} is not a projector", f.term)));
        }
        Ok(self)
    }
}

/// Operators restricted to a local support with mixed-radix state codes.
struct Local {
    n: usize,
    len: usize,
    ops: Vec<TermOp>,
}

impl Local {
    fn new(n: usize, ops: &[&TermOp]) -> Result<Local> {
        let mut support: Vec<usize> = ops.iter().flat_map(|o| o.support()).collect();
        support.sort_unstable();
        support.dedup();
        let size = (n as u128).checked_pow(support.len() as u32).unwrap_or(u128::MAX);
        if size > LOCAL_LIMIT {
            return Err(Error::Budget {
                what: "local audit basis",
                size,
                limit: LOCAL_LIMIT,
            });
        }
        let pos: HashMap<usize, usize> = support.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let ops = ops.iter().map(|o| o.relabel(&|e| pos[&e])).collect();
        Ok(Local {
            n,
            len: support.len(),
            ops,
        })
    }

    fn states(&self) -> u64 {
        (self.n as u64).pow(self.len as u32)
    }

    fn decode(&self, mut code: u64, out: &mut [u8]) {
        for v in out.iter_mut() {
            *v = (code % self.n as u64) as u8;
            code /= self.n as u64;
        }
    }

    fn encode(&self, x: &[u8]) -> u64 {
        x.iter().rev().fold(0u64, |acc, &v| acc * self.n as u64 + v as u64)
    }

    /// `op (v)` for a sparse vector `v`.
    fn apply(&self, g: &FiniteGroup, op: usize, v: &BTreeMap<u64, f64>) -> BTreeMap<u64, f64> {
        let mut out = BTreeMap::new();
        let mut buf = vec![0u8; self.len];
        for (&code, &c) in v {
            self.decode(code, &mut buf);
            self.ops[op].for_each_image(g, &mut buf, &mut |y, w| {
                *out.entry(self.encode(y)).or_insert(0.0) += c * w;
            });
        }
        out
    }

    fn column(&self, g: &FiniteGroup, op: usize, code: u64) -> BTreeMap<u64, f64> {
        self.apply(g, op, &BTreeMap::from([(code, 1.0)]))
    }
}

fn diff_norm_sq(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    let mut s = 0.0;
    for (k, &x) in a {
        let y = b.get(k).copied().unwrap_or(0.0);
        s += (x - y) * (x - y);
    }
    for (k, &y) in b {
        if !a.contains_key(k) {
            s += y * y;
        }
    }
    s
}

/// Parallel sum over `0..n` whose rounding does not depend on scheduling.
pub(crate) fn ordered_sum(n: u64, f: &(dyn Fn(u64) -> f64 + Sync)) -> f64 {
    const CHUNK: u64 = 4096;
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(n)).map(f).sum())
        .collect();
    partial.iter().sum()
}

/// Sorted, duplicate-free copy of a sparse vector held as `(code, weight)` pairs.
fn coalesce(v: &mut Vec<(u64, f64)>) {
    v.sort_unstable_by_key(|e| e.0);
    let mut w = 0;
    for r in 0..v.len() {
        if w > 0 && v[w - 1].0 == v[r].0 {
            v[w - 1].1 += v[r].1;
        } else {
            v[w] = v[r];
            w += 1;
        }
    }
    v.truncate(w);
}

/// `‖a - b‖²` for coalesced sparse vectors.
fn sorted_diff_norm_sq(a: &[(u64, f64)], b: &[(u64, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        let d = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                i += 1;
                j += 1;
                x.1 - y.1
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                i += 1;
                x.1
            }
            (Some(x), None) => {
                i += 1;
                x.1
            }
            (_, Some(y)) => {
                j += 1;
                y.1
            }
            (None, None) => unreachable!(),
        };
        s += d * d;
    }
    s
}

/// Scratch space for applying two local operators in sequence.
struct Scratch {
    buf: Vec<u8>,
    mid: Vec<(u64, f64)>,
    ab: Vec<(u64, f64)>,
    ba: Vec<(u64, f64)>,
}

impl Local {
    /// `second · first |code⟩` into `out`, coalesced.
    fn apply_pair(&self, g: &FiniteGroup, first: usize, second: usize, code: u64, s: &mut Scratch, ba: bool) {
        s.mid.clear();
        self.decode(code, &mut s.buf);
        let mid = &mut s.mid;
        self.ops[first].for_each_image(g, &mut s.buf, &mut |y, w| mid.push((self.encode(y), w)));
        let out = if ba { &mut s.ba } else { &mut s.ab };
        out.clear();
        for &(c, w) in s.mid.iter() {
            self.decode(c, &mut s.buf);
            self.ops[second].for_each_image(g, &mut s.buf, &mut |y, v| out.push((self.encode(y), w * v)));
        }
        coalesce(out);
    }
}

/// Frobenius norm of `[A, B]` on the joint support.
pub fn commutator_norm(g: &FiniteGroup, n: usize, a: &TermOp, b: &TermOp) -> Result<f64> {
    if a.is_diagonal() && b.is_diagonal() {
        return Ok(0.0);
    }
    let local = Local::new(n, &[a, b])?;
    const CHUNK: u64 = 4096;
    let states = local.states();
    let partial: Vec<f64> = (0..states.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut s = Scratch {
                buf: vec![0u8; local.len],
                mid: Vec::new(),
                ab: Vec::new(),
                ba: Vec::new(),
            };
            let mut sum = 0.0;
            for code in c * CHUNK..((c + 1) * CHUNK).min(states) {
                local.apply_pair(g, 1, 0, code, &mut s, false);
                local.apply_pair(g, 0, 1, code, &mut s, true);
                sum += sorted_diff_norm_sq(&s.ab, &s.ba);
            }
            sum
        })
        .collect();
    Ok(partial.iter().sum::<f64>().sqrt())
}

/// Frobenius norms of `P² - P` and `P - P†` on the support of `P`.
pub fn projector_defects(g: &FiniteGroup, n: usize, p: &TermOp) -> Result<(f64, f64)> {
    let local = Local::new(n, &[p])?;
    let mut matrix: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    let mut idem = 0.0;
    for code in 0..local.states() {
        let col = local.column(g, 0, code);
        let sq = local.apply(g, 0, &col);
        idem += diff_norm_sq(&sq, &col);
        for (&row, &v) in &col {
            matrix.insert((row, code), v);
        }
    }
    let mut herm = 0.0;
    for (&(r, c), &v) in &matrix {
        let t = matrix.get(&(c, r)).copied().unwrap_or(0.0);
        herm += (v - t) * (v - t);
    }
    Ok((idem.sqrt(), herm.sqrt()))
}

/// Checks every term and every pair of terms sharing an edge.
pub fn audit_commutation(terms: &TermSet, g: &FiniteGroup) -> Result<AuditReport> {
    terms.check_group(g)?;
    let n = g.order();
    let supports: Vec<Vec<usize>> = terms.terms.iter().map(|t| t.op.support()).collect();
    let mut by_edge: Vec<Vec<usize>> = vec![Vec::new(); terms.edge_count];
    for (i, s) in supports.iter().enumerate() {
        for &e in s {
            by_edge[e].push(i);
        }
    }
    let mut pairs = Vec::new();
    for i in 0..terms.len() {
        let mut partners: Vec<usize> = supports[i]
            .iter()
            .flat_map(|&e| by_edge[e].iter().copied())
            .filter(|&j| j > i)
            .collect();
        partners.sort_unstable();
        partners.dedup();
        pairs.extend(partners.into_iter().map(|j| (i, j)));
    }

    let mut noncommuting = Vec::new();
    for &(i, j) in &pairs {
        let norm = commutator_norm(g, n, &terms.terms[i].op, &terms.terms[j].op)?;
        if norm > COMMUTATOR_TOLERANCE {
            noncommuting.push(CommutatorFinding {
                first: terms.terms[i].label.clone(),
                second: terms.terms[j].label.clone(),
                norm,
            });
        }
    }
    let defects: Vec<(f64, f64)> = terms
        .terms
        .par_iter()
        .map(|t| projector_defects(g, n, &t.op))
        .collect::<Result<_>>()?;
    let non_projectors = terms
        .terms
        .iter()
        .zip(defects)
        .filter(|(_, (i, h))| *i > COMMUTATOR_TOLERANCE || *h > COMMUTATOR_TOLERANCE)
        .map(|(t, (i, h))| ProjectorFinding {
            term: t.label.clone(),
            idempotency: i,
            hermiticity: h,
        })
        .collect();
    Ok(AuditReport {
        terms: terms.len(),
        pairs_checked: pairs.len(),
        noncommuting,
        non_projectors,
    })
}
