//! Ground-space dimension of a commuting-projector term set.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::audit::ordered_sum;
use super::gauge::GaugeReduction;
use super::terms::{TermOp, TermSet};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;

/// Largest Hilbert dimension for the trace method.
pub const TRACE_LIMIT: u128 = 20_000_000;
/// Largest Hilbert dimension for dense diagonalization.
pub const DENSE_LIMIT: u128 = 4096;
/// Tolerance for ground-state eigenvector checks.
pub const EIGENVECTOR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GsdMethod {
    /// Trace of the product of all projectors over the full basis.
    Trace,
    /// Gauge-orbit count on flat, rim-constrained configurations.
    Counting,
    /// Dense diagonalization of `Σ (1 - P)`, with an explicit basis.
    Dense,
    /// Counting, cross-checked by trace whenever the trace budget allows.
    Auto,
}

impl std::str::FromStr for GsdMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace" => Ok(GsdMethod::Trace),
            "counting" => Ok(GsdMethod::Counting),
            "dense" => Ok(GsdMethod::Dense),
            "auto" => Ok(GsdMethod::Auto),
            other => Err(Error::Parse(format!("unknown GSD method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroundSpace {
    pub dimension: u64,
    /// Method that produced `dimension`.
    pub method: GsdMethod,
    /// Every method that ran, with its result.
    pub methods: Vec<(GsdMethod, u64)>,
    /// Orthonormal ground basis over the full Hilbert space (dense method only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
}

pub fn ground_space_dimension(terms: &TermSet, g: &FiniteGroup, method: GsdMethod) -> Result<GroundSpace> {
    terms.check_group(g)?;
    let single = |m: GsdMethod, d: u64, basis| GroundSpace {
        dimension: d,
        method: m,
        methods: vec![(m, d)],
        basis,
    };
    match method {
        GsdMethod::Trace => Ok(single(method, trace_method(terms, g)?, None)),
        GsdMethod::Counting => Ok(single(method, counting_method(terms, g)?, None)),
        GsdMethod::Dense => {
            let (d, basis) = dense_method(terms, g)?;
            Ok(single(method, d, Some(basis)))
        }
        GsdMethod::Auto => {
            let counted = counting_method(terms, g)?;
            let mut methods = vec![(GsdMethod::Counting, counted)];
            if terms.hilbert_dimension() <= TRACE_LIMIT {
                let traced = trace_method(terms, g)?;
                methods.push((GsdMethod::Trace, traced));
                if traced != counted {
                    return Err(Error::MethodDisagreement(format!(
                        "counting gives {counted}, trace gives {traced}"
                    )));
                }
            }
            Ok(GroundSpace {
                dimension: counted,
                method: GsdMethod::Counting,
                methods,
                basis: None,
            })
        }
    }
}

pub fn counting_method(terms: &TermSet, g: &FiniteGroup) -> Result<u64> {
    GaugeReduction::new(terms, g)?.count_orbits(g)
}

fn check_budget(terms: &TermSet, what: &'static str, limit: u128) -> Result<u64> {
    let size = terms.hilbert_dimension();
    if size > limit {
        return Err(Error::Budget { what, size, limit });
    }
    Ok(size as u64)
}

struct Codec {
    n: u64,
    len: usize,
}

impl Codec {
    fn decode(&self, mut code: u64, out: &mut [u8]) {
        for v in out.iter_mut() {
            *v = (code % self.n) as u8;
            code /= self.n;
        }
    }
    fn encode(&self, x: &[u8]) -> u64 {
        x.iter().rev().fold(0u64, |acc, &v| acc * self.n + v as u64)
    }
}

/// Applies `ops` in reverse order (rightmost first) to the basis state `x`.
fn apply_product(g: &FiniteGroup, codec: &Codec, ops: &[&TermOp], x: &[u8]) -> HashMap<u64, f64> {
    let mut v = HashMap::from([(codec.encode(x), 1.0)]);
    let mut buf = vec![0u8; codec.len];
    for op in ops.iter().rev() {
        let mut next = HashMap::with_capacity(v.len());
        for (&code, &c) in &v {
            codec.decode(code, &mut buf);
            op.for_each_image(g, &mut buf, &mut |y, w| {
                *next.entry(codec.encode(y)).or_insert(0.0) += c * w;
            });
        }
        v = next;
    }
    v
}

/// `Tr Π_i P_i` over the full basis. Diagonal factors are read off directly;
/// the rest is evaluated as `⟨Q_1 x | Q_2 x⟩` with the non-diagonal product
/// split in two halves.
pub fn trace_method(terms: &TermSet, g: &FiniteGroup) -> Result<u64> {
    let size = check_budget(terms, "trace-method Hilbert space", TRACE_LIMIT)?;
    let codec = Codec {
        n: g.order() as u64,
        len: terms.edge_count,
    };
    let diagonal: Vec<&TermOp> = terms.terms.iter().map(|t| &t.op).filter(|o| o.is_diagonal()).collect();
    let others: Vec<&TermOp> = terms.terms.iter().map(|t| &t.op).filter(|o| !o.is_diagonal()).collect();
    // Balance the halves by log of branching factor.
    let weight = |o: &TermOp| match o {
        TermOp::VertexGauge { elements, .. }
        | TermOp::EdgeGauge { elements, .. }
        | TermOp::LiteralEdge { elements, .. } => (elements.len() as f64).ln(),
        _ => 0.0,
    };
    let total: f64 = others.iter().map(|o| weight(o)).sum();
    let mut acc = 0.0;
    let mut split = others.len();
    for (i, o) in others.iter().enumerate() {
        if acc >= total / 2.0 {
            split = i;
            break;
        }
        acc += weight(o);
    }
    // P_1 ⋯ P_m = (P_s ⋯ P_1)† (P_{s+1} ⋯ P_m)
    let first: Vec<&TermOp> = others[..split].iter().rev().copied().collect();
    let second: Vec<&TermOp> = others[split..].to_vec();

    let value = ordered_sum(size, &|code| {
        let mut x = vec![0u8; codec.len];
        codec.decode(code, &mut x);
        if !diagonal.iter().all(|d| d.diagonal_value(g, &x) == Some(true)) {
            return 0.0;
        }
        let a = apply_product(g, &codec, &first, &x);
        let b = apply_product(g, &codec, &second, &x);
        let (small, large) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
        small
            .iter()
            .map(|(k, &v)| v * large.get(k).copied().unwrap_or(0.0))
            .sum()
    });
    let rounded = value.round();
    if (value - rounded).abs() > 1e-6 || rounded < 0.0 {
        return Err(Error::invariant(format!("trace {value} is not a non-negative integer")));
    }
    Ok(rounded as u64)
}

/// Dense diagonalization of `H = Σ_i (1 - P_i)`; returns the dimension and an
/// orthonormal basis of the zero-energy space.
pub fn dense_method(terms: &TermSet, g: &FiniteGroup) -> Result<(u64, Vec<Vec<f64>>)> {
    let size = check_budget(terms, "dense-method Hilbert space", DENSE_LIMIT)? as usize;
    let codec = Codec {
        n: g.order() as u64,
        len: terms.edge_count,
    };
    let mut h = DMatrix::<f64>::zeros(size, size);
    let mut x = vec![0u8; codec.len];
    for col in 0..size {
        codec.decode(col as u64, &mut x);
        for t in &terms.terms {
            h[(col, col)] += 1.0;
            t.op.for_each_image(g, &mut x, &mut |y, w| {
                h[(codec.encode(y) as usize, col)] -= w;
            });
        }
    }
    let eig = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..size).filter(|&i| eig.eigenvalues[i] < 0.5).collect();
    idx.sort_unstable();
    let basis: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    for v in &basis {
        check_ground_vector(terms, g, &codec, v)?;
    }
    Ok((basis.len() as u64, basis))
}

fn check_ground_vector(terms: &TermSet, g: &FiniteGroup, codec: &Codec, v: &[f64]) -> Result<()> {
    let mut x = vec![0u8; codec.len];
    for t in &terms.terms {
        let mut out = vec![0.0; v.len()];
        for (code, &c) in v.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            codec.decode(code as u64, &mut x);
            t.op.for_each_image(g, &mut x, &mut |y, w| {
                out[codec.encode(y) as usize] += c * w;
            });
        }
        let err: f64 = out.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if err > EIGENVECTOR_TOLERANCE {
            return Err(Error::invariant(format!(
                "ground vector is not a +1 eigenvector of {} (error {err:.3e})",
                t.label
            )));
        }
    }
    Ok(())
}
