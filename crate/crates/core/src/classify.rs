//! Recovering the block structure of a state and assigning its class.
//!
//! For a pure global state, the marginal on a subset `S` is pure exactly
//! when `S` is a tensor factor. The finest factorization is found by
//! scanning, for each qubit, the subsets that contain it in order of size
//! and then lexicographically, and keeping the first one whose marginal
//! purity reaches `1 - tol`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::{index_of, shape_of, IndexValue, IntegerPartition, SetPartition};
use crate::statecore::{
    self, gather, marginal_purity_unchecked, partial_trace, permute_qubits, BitSplit,
    DensityMatrix, PureState, QubitSet, DEFAULT_TOL, MAX_DENSE_QUBITS,
};

/// Below this register width subset scans stay on the calling thread.
const PARALLEL_MIN_QUBITS: usize = 8;

/// Near-threshold band: purity defects in `[tol, NEAR_FACTOR * tol]`.
const NEAR_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub blocks: SetPartition,
    pub shape: IntegerPartition,
    pub index: IndexValue,
    pub label: String,
    pub tolerance_used: f64,
    /// Subsets whose purity defect landed just above the tolerance.
    pub warnings: Vec<String>,
}

impl ClassReport {
    pub fn n_qubits(&self) -> usize {
        self.blocks.n_qubits()
    }

    pub fn is_fully_separable(&self) -> bool {
        self.index.get() == 0
    }
}

pub fn class_label(index: IndexValue) -> String {
    if index.get() == 0 {
        "fully separable".to_string()
    } else {
        format!("entangled class E={index}")
    }
}

/// Lexicographic `k`-combinations of `pool`.
fn combinations(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let n = pool.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        let Some(t) = (0..k).rev().find(|&t| idx[t] != t + n - k) else {
            return out;
        };
        idx[t] += 1;
        for u in t + 1..k {
            idx[u] = idx[u - 1] + 1;
        }
    }
}

fn with_qubit(others: &[usize], qubit: usize) -> QubitSet {
    let pos = others.partition_point(|&q| q < qubit);
    let mut v = Vec::with_capacity(others.len() + 1);
    v.extend_from_slice(&others[..pos]);
    v.push(qubit);
    v.extend_from_slice(&others[pos..]);
    QubitSet::from_sorted(v)
}

fn check_normalized(psi: &PureState, tol: f64) -> Result<()> {
    let norm_sqr = psi.norm_sqr();
    if (norm_sqr - 1.0).abs() > tol.max(DEFAULT_TOL) {
        return Err(Error::NotNormalized { norm_sqr, tol });
    }
    Ok(())
}

fn scan_minimal(psi: &PureState, qubit: usize, tol: f64, warnings: &mut Vec<String>) -> QubitSet {
    let n = psi.n_qubits();
    let others: Vec<usize> = (0..n).filter(|&q| q != qubit).collect();
    for k in 1..n {
        let candidates: Vec<QubitSet> = combinations(&others, k - 1)
            .into_iter()
            .map(|c| with_qubit(&c, qubit))
            .collect();
        let purities: Vec<f64> = if n >= PARALLEL_MIN_QUBITS {
            candidates
                .par_iter()
                .map(|s| marginal_purity_unchecked(psi, s))
                .collect()
        } else {
            candidates
                .iter()
                .map(|s| marginal_purity_unchecked(psi, s))
                .collect()
        };
        let mut winner = None;
        for (s, p) in candidates.iter().zip(&purities) {
            let defect = 1.0 - p;
            if defect >= tol && defect <= NEAR_FACTOR * tol {
                warnings.push(format!(
                    "subset {s} has purity defect {defect:e}, within {NEAR_FACTOR}x of tolerance {tol:e}"
                ));
            }
            if winner.is_none() && *p >= 1.0 - tol {
                winner = Some(s.clone());
            }
        }
        if let Some(s) = winner {
            return s;
        }
    }
    QubitSet::all(n)
}

/// Smallest subset containing `qubit` whose marginal is pure within `tol`.
pub fn minimal_pure_subset(psi: &PureState, qubit: usize, tol: f64) -> Result<QubitSet> {
    psi.check_qubit(qubit)?;
    check_normalized(psi, tol)?;
    Ok(scan_minimal(psi, qubit, tol, &mut Vec::new()))
}

fn factorize(psi: &PureState, tol: f64, warnings: &mut Vec<String>) -> Result<SetPartition> {
    check_normalized(psi, tol)?;
    let n = psi.n_qubits();
    let mut blocks: Vec<QubitSet> = Vec::new();
    for q in 0..n {
        // A qubit inside an already-found factor has that factor as its
        // minimal block; only uncovered qubits start a new scan.
        if blocks.iter().any(|b| b.contains(q)) {
            continue;
        }
        let s = scan_minimal(psi, q, tol, warnings);
        if let Some(b) = blocks.iter().find(|b| !b.is_disjoint(&s)) {
            return Err(Error::FactorizationInconsistent(format!(
                "minimal pure subset {s} of qubit {q} overlaps block {b} at tolerance {tol:e}"
            )));
        }
        blocks.push(s);
    }
    SetPartition::new(n, blocks)
}

/// Finest tensor factorization of `psi`, in canonical block order.
pub fn finest_factorization(psi: &PureState, tol: f64) -> Result<SetPartition> {
    factorize(psi, tol, &mut Vec::new())
}

/// Same result as [`finest_factorization`], but scans every qubit and checks
/// that the minimal subsets agree pairwise.
pub fn finest_factorization_exhaustive(psi: &PureState, tol: f64) -> Result<SetPartition> {
    check_normalized(psi, tol)?;
    let n = psi.n_qubits();
    let mut blocks: Vec<QubitSet> = Vec::new();
    for q in 0..n {
        let s = scan_minimal(psi, q, tol, &mut Vec::new());
        if blocks.contains(&s) {
            continue;
        }
        if let Some(b) = blocks.iter().find(|b| !b.is_disjoint(&s)) {
            return Err(Error::FactorizationInconsistent(format!(
                "minimal pure subset {s} of qubit {q} overlaps {b} at tolerance {tol:e}"
            )));
        }
        blocks.push(s);
    }
    SetPartition::new(n, blocks)
}

/// `N - p` for the finest factorization of `psi`.
pub fn entanglement_index(psi: &PureState, tol: f64) -> Result<IndexValue> {
    Ok(index_of(&shape_of(&finest_factorization(psi, tol)?)))
}

pub fn classify(psi: &PureState, tol: f64) -> Result<ClassReport> {
    let mut warnings = Vec::new();
    let blocks = factorize(psi, tol, &mut warnings)?;
    let shape = shape_of(&blocks);
    let index = index_of(&shape);
    debug_assert_eq!(index.get(), psi.n_qubits() - blocks.len());
    Ok(ClassReport {
        label: class_label(index),
        blocks,
        shape,
        index,
        tolerance_used: tol,
        warnings,
    })
}

/// Splits `psi` across `(s, complement)` into two normalized factors using
/// the dominant column of the `s x complement` amplitude matrix. Exact for
/// product states; for entangled cuts it returns the best guess along that
/// column.
pub fn extract_factors(psi: &PureState, s: &QubitSet) -> Result<(PureState, PureState)> {
    let n = psi.n_qubits();
    s.check_within(n)?;
    if s.is_empty() || s.len() == n {
        return Err(Error::InvalidQubitSet(format!(
            "{s} is not a proper nonempty subset of {n} qubits"
        )));
    }
    let split = BitSplit::new(n, s);
    let (rows, cols) = (split.inner.len(), split.outer.len());
    let m = gather(psi.amplitudes(), &split.inner, &split.outer);
    let col_norm = |e: usize| -> f64 { (0..rows).map(|i| m[i * cols + e].norm_sqr()).sum() };
    let best = (0..cols)
        .max_by(|&a, &b| col_norm(a).total_cmp(&col_norm(b)))
        .expect("at least one column");
    let left: Vec<Complex64> = (0..rows).map(|i| m[i * cols + best]).collect();
    let left = PureState::normalized(s.len(), left)?;
    let right: Vec<Complex64> = (0..cols)
        .map(|e| {
            (0..rows)
                .map(|i| left.amplitudes()[i].conj() * m[i * cols + e])
                .sum()
        })
        .collect();
    let right = PureState::normalized(n - s.len(), right)?;
    Ok((left, right))
}

/// Places `a` on the qubits of `s` and `b` on the rest.
pub fn embed_product(a: &PureState, b: &PureState, s: &QubitSet) -> Result<PureState> {
    let n = a.n_qubits() + b.n_qubits();
    if s.len() != a.n_qubits() {
        return Err(Error::DimensionMismatch(s.len(), a.n_qubits()));
    }
    s.check_within(n)?;
    let product = statecore::tensor(a, b)?;
    let layout: Vec<usize> = s
        .members()
        .iter()
        .chain(s.complement(n).members())
        .copied()
        .collect();
    permute_qubits(&product, &layout)
}

/// Content of one ensemble term.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsemblePayload {
    Partition(IntegerPartition),
    State(PureState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTerm {
    pub probability: f64,
    pub payload: EnsemblePayload,
}

/// Probability-weighted decomposition of an `n_qubits` state into
/// partition-structured terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    n_qubits: usize,
    terms: Vec<EnsembleTerm>,
}

impl Ensemble {
    pub fn new(n_qubits: usize, terms: Vec<EnsembleTerm>) -> Result<Self> {
        Self::with_tolerance(n_qubits, terms, DEFAULT_TOL)
    }

    /// `prob_tol` bounds `|sum p - 1|`.
    pub fn with_tolerance(
        n_qubits: usize,
        terms: Vec<EnsembleTerm>,
        prob_tol: f64,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidEnsemble("no terms".into()));
        }
        for (k, t) in terms.iter().enumerate() {
            if !(t.probability > 0.0 && t.probability <= 1.0) {
                return Err(Error::InvalidEnsemble(format!(
                    "term {k} has probability {} outside (0, 1]",
                    t.probability
                )));
            }
            let width = match &t.payload {
                EnsemblePayload::Partition(p) => p.total(),
                EnsemblePayload::State(s) => s.n_qubits(),
            };
            if width != n_qubits {
                return Err(Error::InvalidEnsemble(format!(
                    "term {k} covers {width} qubits, ensemble has {n_qubits}"
                )));
            }
        }
        let total: f64 = terms.iter().map(|t| t.probability).sum();
        if (total - 1.0).abs() > prob_tol {
            return Err(Error::InvalidEnsemble(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { n_qubits, terms })
    }

    /// Uniform mixture over the given partitions.
    pub fn uniform(n_qubits: usize, partitions: &[IntegerPartition]) -> Result<Self> {
        let p = 1.0 / partitions.len() as f64;
        Self::new(
            n_qubits,
            partitions
                .iter()
                .map(|l| EnsembleTerm {
                    probability: p,
                    payload: EnsemblePayload::Partition(l.clone()),
                })
                .collect(),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[EnsembleTerm] {
        &self.terms
    }

    /// `w * self + (1 - w) * other` as one ensemble.
    pub fn concat(&self, w: f64, other: &Ensemble) -> Result<Ensemble> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::InvalidEnsemble(format!("weight {w} outside (0, 1)")));
        }
        let scaled = |e: &Ensemble, f: f64| {
            e.terms
                .iter()
                .map(move |t| EnsembleTerm {
                    probability: t.probability * f,
                    payload: t.payload.clone(),
                })
                .collect::<Vec<_>>()
        };
        let mut terms = scaled(self, w);
        terms.extend(scaled(other, 1.0 - w));
        Ensemble::new(self.n_qubits, terms)
    }
}

/// `sum_k P_k E_k` over the given decomposition. A mixed state has many
/// decompositions; no minimization over them is attempted.
pub fn ensemble_index(ensemble: &Ensemble, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for t in &ensemble.terms {
        let e = match &t.payload {
            EnsemblePayload::Partition(p) => index_of(p),
            EnsemblePayload::State(s) => entanglement_index(s, tol)?,
        };
        total += t.probability * e.get() as f64;
    }
    Ok(total)
}

/// `|| rho - rho_S ⊗ rho_rest ||_F`, with the product laid out in `rho`'s
/// own qubit order.
fn product_defect(rho: &DensityMatrix, s: &QubitSet) -> Result<f64> {
    let n = rho.n_qubits();
    let rest = s.complement(n);
    let a = partial_trace(rho, s)?;
    let b = partial_trace(rho, &rest)?;
    let split = BitSplit::new(n, s);
    let dim = rho.dim();
    let mut sum = 0.0;
    for (i, &ri) in split.inner.iter().enumerate() {
        for (j, &cj) in split.inner.iter().enumerate() {
            let a_ij = a.entry(i, j);
            for (e, &re) in split.outer.iter().enumerate() {
                for (f, &cf) in split.outer.iter().enumerate() {
                    let want = a_ij * b.entry(e, f);
                    sum += (rho.entries()[(ri | re) * dim + (cj | cf)] - want).norm_sqr();
                }
            }
        }
    }
    Ok(sum.sqrt())
}

fn split_recursive(
    rho: &DensityMatrix,
    labels: &[usize],
    tol: f64,
    out: &mut Vec<QubitSet>,
) -> Result<()> {
    let n = rho.n_qubits();
    let local: Vec<usize> = (0..n).collect();
    for k in 1..=n / 2 {
        for c in combinations(&local, k) {
            let s = QubitSet::from_sorted(c);
            if product_defect(rho, &s)? <= tol {
                let rest = s.complement(n);
                for part in [&s, &rest] {
                    let sub = partial_trace(rho, part)?;
                    let sub_labels: Vec<usize> =
                        part.members().iter().map(|&q| labels[q]).collect();
                    split_recursive(&sub, &sub_labels, tol, out)?;
                }
                return Ok(());
            }
        }
    }
    out.push(QubitSet::new(labels.iter().copied())?);
    Ok(())
}

/// Product structure of a density matrix: repeatedly splits off the
/// smallest subset `S` with `rho ≈ rho_S ⊗ rho_rest` in Frobenius norm.
/// Reports blocks only; it does not classify the entanglement inside them.
pub fn mixed_product_split(rho: &DensityMatrix, tol: f64) -> Result<SetPartition> {
    let n = rho.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::QubitCapExceeded {
            requested: n,
            cap: MAX_DENSE_QUBITS,
        });
    }
    let mut blocks = Vec::new();
    split_recursive(rho, &(0..n).collect::<Vec<_>>(), tol, &mut blocks)?;
    SetPartition::new(n, blocks)
}
