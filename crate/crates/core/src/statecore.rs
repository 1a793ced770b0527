//! Dense complex linear algebra over qubit registers.
//!
//! Qubit 0 is the most significant bit of a basis index: for an `n`-qubit
//! register the basis index is `sum_i bit_i << (n - 1 - i)`.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// 2x2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_QUBITS: usize = 14;
/// Largest value accepted for the qubit cap override.
pub const MAX_QUBITS_LIMIT: usize = 20;
/// Full density matrices are never built above this many qubits.
pub const MAX_DENSE_QUBITS: usize = 12;
pub const MAX_QUBITS_ENV: &str = "ENTDEX_MAX_QUBITS";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Parses a qubit cap override, accepting `2..=20`.
pub fn parse_qubit_cap(raw: &str) -> Result<usize> {
    let value: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("{MAX_QUBITS_ENV}={raw:?} is not an integer")))?;
    if !(2..=MAX_QUBITS_LIMIT).contains(&value) {
        return Err(Error::OutOfRange {
            value,
            min: 2,
            max: MAX_QUBITS_LIMIT,
        });
    }
    Ok(value)
}

/// The qubit cap in effect for this process: `ENTDEX_MAX_QUBITS` if set and
/// valid, otherwise [`DEFAULT_MAX_QUBITS`]. Read once.
pub fn qubit_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_QUBITS_ENV)
            .ok()
            .and_then(|raw| parse_qubit_cap(&raw).ok())
            .unwrap_or(DEFAULT_MAX_QUBITS)
    })
}

pub(crate) fn check_cap(requested: usize) -> Result<()> {
    let cap = qubit_cap();
    if requested > cap {
        return Err(Error::QubitCapExceeded { requested, cap });
    }
    Ok(())
}

#[inline]
pub(crate) fn shift_of(n_qubits: usize, qubit: usize) -> usize {
    n_qubits - 1 - qubit
}

fn check_amplitudes(n_qubits: usize, amps: &[Complex64]) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::NoQubits);
    }
    if n_qubits >= usize::BITS as usize {
        return Err(Error::QubitCapExceeded {
            requested: n_qubits,
            cap: MAX_QUBITS_LIMIT,
        });
    }
    let expected = 1usize << n_qubits;
    if amps.len() != expected {
        return Err(Error::AmplitudeLength {
            n_qubits,
            expected,
            got: amps.len(),
        });
    }
    if let Some(k) = amps
        .iter()
        .position(|a| !(a.re.is_finite() && a.im.is_finite()))
    {
        return Err(Error::NonFinite(k));
    }
    Ok(())
}

fn norm_sqr_of(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Validates length, finiteness and normalization (within [`DEFAULT_TOL`]).
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(n_qubits, amps, DEFAULT_TOL)
    }

    pub fn with_tolerance(n_qubits: usize, amps: Vec<Complex64>, tol: f64) -> Result<Self> {
        check_amplitudes(n_qubits, &amps)?;
        let norm_sqr = norm_sqr_of(&amps);
        if (norm_sqr - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm_sqr, tol });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Rescales `amps` to unit norm. Fails on a zero vector.
    pub fn normalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_amplitudes(n_qubits, &amps)?;
        let norm = norm_sqr_of(&amps).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
                tol: DEFAULT_TOL,
            });
        }
        let scale = 1.0 / norm;
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok(Self { n_qubits, amps })
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr_of(&self.amps)
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &PureState) -> Result<f64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }
}

/// Hermitian, trace-one operator on `n_qubits` qubits, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn new(n_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(n_qubits, entries, DEFAULT_TOL)
    }

    pub fn with_tolerance(n_qubits: usize, entries: Vec<Complex64>, tol: f64) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        if n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: n_qubits,
                cap: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::AmplitudeLength {
                n_qubits,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if let Some(k) = entries
            .iter()
            .position(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::NonFinite(k));
        }
        let mut herm_dev = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                herm_dev = herm_dev.max(d);
            }
        }
        if herm_dev > tol {
            return Err(Error::NotHermitian(herm_dev));
        }
        let rho = Self { n_qubits, entries };
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::BadTrace(tr.re));
        }
        let p = purity(&rho);
        if p > 1.0 + tol {
            return Err(Error::Format(format!(
                "purity {p} exceeds 1: operator is not positive"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(n_qubits: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), 1 << (2 * n_qubits));
        Self { n_qubits, entries }
    }

    /// `identity / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        if n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: n_qubits,
                cap: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        let mut entries = vec![ZERO; dim * dim];
        let w = 1.0 / dim as f64;
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(w, 0.0);
        }
        Ok(Self::from_raw(n_qubits, entries))
    }

    /// Convex combination `sum_k w_k rho_k`. Weights must sum to one.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidEnsemble("empty mixture".into()))?
            .1;
        let mut entries = vec![ZERO; first.entries.len()];
        for (w, rho) in terms {
            if rho.n_qubits != first.n_qubits {
                return Err(Error::DimensionMismatch(first.n_qubits, rho.n_qubits));
            }
            for (e, r) in entries.iter_mut().zip(&rho.entries) {
                *e += r * *w;
            }
        }
        Self::new(first.n_qubits, entries)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.entries[i * dim + i]).sum()
    }

    /// Kronecker product; `self` occupies the leading (more significant) qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_DENSE_QUBITS {
            return Err(Error::QubitCapExceeded {
                requested: n,
                cap: MAX_DENSE_QUBITS,
            });
        }
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut entries = vec![ZERO; dim * dim];
        for ia in 0..da {
            for ja in 0..da {
                let a = self.entries[ia * da + ja];
                if a == ZERO {
                    continue;
                }
                for ib in 0..db {
                    let row = (ia * db + ib) * dim + ja * db;
                    let src = &other.entries[ib * db..(ib + 1) * db];
                    for (dst, b) in entries[row..row + db].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        Ok(DensityMatrix::from_raw(n, entries))
    }
}

/// Sorted, duplicate-free set of qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitSet(Vec<usize>);

impl QubitSet {
    /// Sorts `members`; rejects duplicates.
    pub fn new(members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidQubitSet(format!("duplicate qubit {}", w[0])));
        }
        Ok(Self(v))
    }

    pub(crate) fn from_sorted(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    /// `{0, 1, ..., n-1}`.
    pub fn all(n_qubits: usize) -> Self {
        Self((0..n_qubits).collect())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.0.binary_search(&qubit).is_ok()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn complement(&self, n_qubits: usize) -> QubitSet {
        QubitSet((0..n_qubits).filter(|q| !self.contains(*q)).collect())
    }

    pub fn is_disjoint(&self, other: &QubitSet) -> bool {
        self.0.iter().all(|q| !other.contains(*q))
    }

    pub fn is_subset(&self, other: &QubitSet) -> bool {
        self.0.iter().all(|q| other.contains(*q))
    }

    pub fn check_within(&self, n_qubits: usize) -> Result<()> {
        match self.0.last() {
            Some(&q) if q >= n_qubits => Err(Error::QubitOutOfRange { index: q, n_qubits }),
            _ => Ok(()),
        }
    }

    /// Image of the set under a qubit relabeling `q -> perm[q]`.
    pub fn map(&self, perm: &[usize]) -> QubitSet {
        let mut v: Vec<usize> = self.0.iter().map(|&q| perm[q]).collect();
        v.sort_unstable();
        QubitSet(v)
    }
}

impl fmt::Display for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, q) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("}")
    }
}

/// One 2x2 unitary per qubit; qubit `j` is acted on by `per_qubit[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    per_qubit: Vec<Mat2>,
}

impl LocalUnitary {
    pub fn new(per_qubit: Vec<Mat2>) -> Result<Self> {
        Self::with_tolerance(per_qubit, DEFAULT_TOL)
    }

    pub fn with_tolerance(per_qubit: Vec<Mat2>, tol: f64) -> Result<Self> {
        for (j, u) in per_qubit.iter().enumerate() {
            let dev = unitarity_defect(u);
            if !dev.is_finite() || dev > tol {
                return Err(Error::InvalidLocalUnitary(format!(
                    "matrix for qubit {j} is not unitary (max |U^dag U - I| = {dev:e})"
                )));
            }
        }
        Ok(Self { per_qubit })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            per_qubit: vec![[[ONE, ZERO], [ZERO, ONE]]; n_qubits],
        }
    }

    pub fn len(&self) -> usize {
        self.per_qubit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_qubit.is_empty()
    }

    pub fn matrices(&self) -> &[Mat2] {
        &self.per_qubit
    }
}

/// Largest elementwise deviation of `U^dag U` from the identity.
pub fn unitarity_defect(u: &Mat2) -> f64 {
    let mut dev = 0.0f64;
    for r in 0..2 {
        for c in 0..2 {
            let v = u[0][r].conj() * u[0][c] + u[1][r].conj() * u[1][c];
            let target = if r == c { ONE } else { ZERO };
            dev = dev.max((v - target).norm());
        }
    }
    dev
}

/// Bit-scatter tables splitting a register into a kept subset and its
/// complement: full index = `inner[i] | outer[e]`, where `i` and `e` are
/// big-endian indices over the sorted kept and traced-out qubits.
pub(crate) struct BitSplit {
    pub inner: Vec<usize>,
    pub outer: Vec<usize>,
}

impl BitSplit {
    pub fn new(n_qubits: usize, keep: &QubitSet) -> Self {
        let rest = keep.complement(n_qubits);
        Self {
            inner: scatter_table(n_qubits, keep.members()),
            outer: scatter_table(n_qubits, rest.members()),
        }
    }
}

fn scatter_table(n_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let mut table = vec![0usize];
    table.reserve((1 << qubits.len()) - 1);
    for &q in qubits {
        let bit = 1usize << shift_of(n_qubits, q);
        // Appending q as the new least significant bit of the local index.
        table = table.iter().flat_map(|&b| [b, b | bit]).collect();
    }
    table
}

fn check_keep(n_qubits: usize, keep: &QubitSet) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidQubitSet("keep-set is empty".into()));
    }
    keep.check_within(n_qubits)
}

/// `a ⊗ b`; qubits of `a` come first.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let n = a.n_qubits + b.n_qubits;
    check_cap(n)?;
    let mut amps = Vec::with_capacity(a.dim() * b.dim());
    for x in &a.amps {
        amps.extend(b.amps.iter().map(|y| x * y));
    }
    Ok(PureState::from_raw(n, amps))
}

/// `|psi><psi|`.
pub fn to_density(psi: &PureState) -> Result<DensityMatrix> {
    if psi.n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::QubitCapExceeded {
            requested: psi.n_qubits,
            cap: MAX_DENSE_QUBITS,
        });
    }
    let dim = psi.dim();
    let mut entries = Vec::with_capacity(dim * dim);
    for a in &psi.amps {
        entries.extend(psi.amps.iter().map(|b| a * b.conj()));
    }
    Ok(DensityMatrix::from_raw(psi.n_qubits, entries))
}

/// Reduced operator of a general density matrix on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &QubitSet) -> Result<DensityMatrix> {
    check_keep(rho.n_qubits, keep)?;
    let split = BitSplit::new(rho.n_qubits, keep);
    let dim = rho.dim();
    let k = split.inner.len();
    let mut entries = vec![ZERO; k * k];
    for (i, &ri) in split.inner.iter().enumerate() {
        for (j, &cj) in split.inner.iter().enumerate() {
            entries[i * k + j] = split
                .outer
                .iter()
                .map(|&e| rho.entries[(ri | e) * dim + (cj | e)])
                .sum();
        }
    }
    Ok(DensityMatrix::from_raw(keep.len(), entries))
}

/// Reduced operator of `|psi><psi|` on `keep`, contracted directly from the
/// amplitudes without forming the full density matrix.
pub fn reduced_density(psi: &PureState, keep: &QubitSet) -> Result<DensityMatrix> {
    check_keep(psi.n_qubits, keep)?;
    if keep.len() > MAX_DENSE_QUBITS {
        return Err(Error::QubitCapExceeded {
            requested: keep.len(),
            cap: MAX_DENSE_QUBITS,
        });
    }
    let split = BitSplit::new(psi.n_qubits, keep);
    let rows = gather(&psi.amps, &split.inner, &split.outer);
    let k = split.inner.len();
    let gram = gram_upper(&rows, k, split.outer.len());
    let mut entries = vec![ZERO; k * k];
    for i in 0..k {
        for j in i..k {
            let g = gram[i * k + j];
            entries[i * k + j] = g;
            entries[j * k + i] = g.conj();
        }
    }
    Ok(DensityMatrix::from_raw(keep.len(), entries))
}

/// `M[i][e] = amps[inner[i] | outer[e]]`, row-major.
pub(crate) fn gather(amps: &[Complex64], inner: &[usize], outer: &[usize]) -> Vec<Complex64> {
    let mut m = Vec::with_capacity(inner.len() * outer.len());
    for &i in inner {
        m.extend(outer.iter().map(|&e| amps[i | e]));
    }
    m
}

/// Upper triangle of `M M^dag` for a `rows x cols` row-major `M`.
fn gram_upper(m: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut g = vec![ZERO; rows * rows];
    for i in 0..rows {
        let ri = &m[i * cols..(i + 1) * cols];
        for j in i..rows {
            let rj = &m[j * cols..(j + 1) * cols];
            g[i * rows + j] = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
        }
    }
    g
}

/// `tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.entries.iter().map(|e| e.norm_sqr()).sum()
}

/// Purity of the marginal of `psi` on `keep`, computed on whichever side of
/// the cut is smaller (both marginals of a pure state share their spectrum).
pub fn marginal_purity(psi: &PureState, keep: &QubitSet) -> Result<f64> {
    check_keep(psi.n_qubits, keep)?;
    Ok(marginal_purity_unchecked(psi, keep))
}

pub(crate) fn marginal_purity_unchecked(psi: &PureState, keep: &QubitSet) -> f64 {
    let n = psi.n_qubits;
    if keep.len() == n {
        return psi.norm_sqr() * psi.norm_sqr();
    }
    let split = BitSplit::new(n, keep);
    let (inner, outer) = if keep.len() <= n - keep.len() {
        (&split.inner, &split.outer)
    } else {
        (&split.outer, &split.inner)
    };
    let m = gather(&psi.amps, inner, outer);
    let rows = inner.len();
    let g = gram_upper(&m, rows, outer.len());
    let mut total = 0.0;
    for i in 0..rows {
        total += g[i * rows + i].norm_sqr();
        for j in i + 1..rows {
            total += 2.0 * g[i * rows + j].norm_sqr();
        }
    }
    total
}

/// `sqrt(sum |rho_ij - sigma_ij|^2)`.
pub fn frobenius_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.n_qubits != sigma.n_qubits {
        return Err(Error::DimensionMismatch(rho.n_qubits, sigma.n_qubits));
    }
    Ok(rho
        .entries
        .iter()
        .zip(&sigma.entries)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `(U_0 ⊗ ... ⊗ U_{N-1}) psi`.
pub fn apply_local_unitary(psi: &PureState, u: &LocalUnitary) -> Result<PureState> {
    let n = psi.n_qubits;
    if u.len() != n {
        return Err(Error::InvalidLocalUnitary(format!(
            "{} matrices supplied for {n} qubits",
            u.len()
        )));
    }
    let mut amps = psi.amps.clone();
    for (q, m) in u.per_qubit.iter().enumerate() {
        let stride = 1usize << shift_of(n, q);
        for base in (0..amps.len()).step_by(2 * stride) {
            for i0 in base..base + stride {
                let i1 = i0 | stride;
                let (a0, a1) = (amps[i0], amps[i1]);
                amps[i0] = m[0][0] * a0 + m[0][1] * a1;
                amps[i1] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }
    Ok(PureState::from_raw(n, amps))
}

pub(crate) fn check_permutation(perm: &[usize], n_qubits: usize) -> Result<()> {
    if perm.len() != n_qubits {
        return Err(Error::InvalidPermutation(format!(
            "length {} does not match {n_qubits} qubits",
            perm.len()
        )));
    }
    let mut seen = vec![false; n_qubits];
    for &p in perm {
        if p >= n_qubits || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a bijection on 0..{n_qubits}"
            )));
        }
    }
    Ok(())
}

/// Relabels qubits so that qubit `i` ends up at position `perm[i]`.
pub fn permute_qubits(psi: &PureState, perm: &[usize]) -> Result<PureState> {
    let n = psi.n_qubits;
    check_permutation(perm, n)?;
    let targets: Vec<usize> = perm.iter().map(|&p| 1usize << shift_of(n, p)).collect();
    let mut amps = vec![ZERO; psi.dim()];
    for (old, a) in psi.amps.iter().enumerate() {
        let mut new = 0usize;
        for (i, t) in targets.iter().enumerate() {
            if old >> shift_of(n, i) & 1 == 1 {
                new |= t;
            }
        }
        amps[new] = *a;
    }
    Ok(PureState::from_raw(n, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(2, vec![c(h), ZERO, ZERO, c(h)]).unwrap()
    }

    fn ket(bits: &[u8]) -> PureState {
        let n = bits.len();
        let idx = bits.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        let mut amps = vec![ZERO; 1 << n];
        amps[idx] = ONE;
        PureState::new(n, amps).unwrap()
    }

    fn ghz3() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0] = c(h);
        amps[7] = c(h);
        PureState::new(3, amps).unwrap()
    }

    fn assert_entries(rho: &DensityMatrix, expected: &[f64]) {
        assert_eq!(rho.entries().len(), expected.len());
        for (got, want) in rho.entries().iter().zip(expected) {
            assert_abs_diff_eq!(got.re, *want, epsilon = 1e-12);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn state_validation() {
        assert!(matches!(PureState::new(0, vec![ONE]), Err(Error::NoQubits)));
        assert!(matches!(
            PureState::new(2, vec![ONE, ZERO]),
            Err(Error::AmplitudeLength { .. })
        ));
        assert!(matches!(
            PureState::new(1, vec![c(f64::NAN), ZERO]),
            Err(Error::NonFinite(0))
        ));
        assert!(matches!(
            PureState::new(1, vec![ONE, ONE]),
            Err(Error::NotNormalized { .. })
        ));
        let s = PureState::normalized(1, vec![ONE, ONE]).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-15);
        assert!(PureState::normalized(1, vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let zz = tensor(&ket(&[0]), &ket(&[0])).unwrap();
        assert_eq!(zz.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let b0 = tensor(&bell(), &ket(&[0])).unwrap();
        let want = [h, 0.0, 0.0, 0.0, 0.0, 0.0, h, 0.0];
        for (a, w) in b0.amplitudes().iter().zip(want) {
            assert_abs_diff_eq!(a.re, w, epsilon = 1e-15);
        }
        assert_eq!(b0.n_qubits(), 3);
    }

    #[test]
    fn tensor_respects_cap() {
        let big = PureState::normalized(8, vec![ONE; 256]).unwrap();
        let err = tensor(&big, &big).unwrap_err();
        assert_eq!(
            err,
            Error::QubitCapExceeded {
                requested: 16,
                cap: qubit_cap()
            }
        );
    }

    #[test]
    fn density_examples() {
        assert_entries(&to_density(&ket(&[0])).unwrap(), &[1.0, 0.0, 0.0, 0.0]);
        let mut want = [0.0; 16];
        for k in [0, 3, 12, 15] {
            want[k] = 0.5;
        }
        let rho = to_density(&bell()).unwrap();
        assert_entries(&rho, &want);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(purity(&rho), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let keep0 = QubitSet::new([0]).unwrap();
        let rho00 = to_density(&ket(&[0, 0])).unwrap();
        assert_entries(
            &partial_trace(&rho00, &keep0).unwrap(),
            &[1.0, 0.0, 0.0, 0.0],
        );

        let bell_m = partial_trace(&to_density(&bell()).unwrap(), &keep0).unwrap();
        assert_entries(&bell_m, &[0.5, 0.0, 0.0, 0.5]);

        let keep01 = QubitSet::new([0, 1]).unwrap();
        let ghz_m = partial_trace(&to_density(&ghz3()).unwrap(), &keep01).unwrap();
        let mut want = [0.0; 16];
        want[0] = 0.5;
        want[15] = 0.5;
        assert_entries(&ghz_m, &want);
        assert_abs_diff_eq!(purity(&ghz_m), 0.5, epsilon = 1e-12);

        let direct = reduced_density(&ghz3(), &keep01).unwrap();
        assert_abs_diff_eq!(
            frobenius_distance(&direct, &ghz_m).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn partial_trace_errors() {
        let rho = to_density(&bell()).unwrap();
        assert!(matches!(
            partial_trace(&rho, &QubitSet::new([]).unwrap()),
            Err(Error::InvalidQubitSet(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &QubitSet::new([2]).unwrap()),
            Err(Error::QubitOutOfRange { index: 2, .. })
        ));
        assert!(QubitSet::new([1, 1]).is_err());
    }

    #[test]
    fn purity_examples() {
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert_abs_diff_eq!(purity(&mixed), 0.5, epsilon = 1e-15);
        let keep = QubitSet::new([0, 1]).unwrap();
        assert_abs_diff_eq!(
            marginal_purity(&ghz3(), &keep).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            marginal_purity(&ghz3(), &QubitSet::all(3)).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn frobenius_examples() {
        let p0 = to_density(&ket(&[0])).unwrap();
        let p1 = to_density(&ket(&[1])).unwrap();
        assert_eq!(frobenius_distance(&p0, &p0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            frobenius_distance(&p0, &p1).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        let two = to_density(&bell()).unwrap();
        assert!(matches!(
            frobenius_distance(&p0, &two),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = vec![ONE, ZERO, ZERO, ONE];
        assert!(matches!(
            DensityMatrix::new(1, bad_trace),
            Err(Error::BadTrace(_))
        ));
        let i = Complex64::new(0.0, 0.25);
        let not_herm = vec![c(0.5), i, i, c(0.5)];
        assert!(matches!(
            DensityMatrix::new(1, not_herm),
            Err(Error::NotHermitian(_))
        ));
        let herm = vec![c(0.5), i, -i, c(0.5)];
        assert!(DensityMatrix::new(1, herm).is_ok());
    }

    #[test]
    fn local_unitary_examples() {
        let psi = bell();
        let same = apply_local_unitary(&psi, &LocalUnitary::identity(2)).unwrap();
        assert!(psi.distance(&same).unwrap() < 1e-12);

        let x: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
        let id: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
        let flip = LocalUnitary::new(vec![x, id]).unwrap();
        let out = apply_local_unitary(&ket(&[0, 0]), &flip).unwrap();
        assert_eq!(out, ket(&[1, 0]));

        let h = c(std::f64::consts::FRAC_1_SQRT_2);
        let had: Mat2 = [[h, h], [h, -h]];
        let u = LocalUnitary::new(vec![id, had]).unwrap();
        let out = apply_local_unitary(&psi, &u).unwrap();
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-12);
        let keep0 = QubitSet::new([0]).unwrap();
        assert_abs_diff_eq!(marginal_purity(&out, &keep0).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn local_unitary_errors() {
        let id: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
        let not_u: Mat2 = [[ONE, ONE], [ZERO, ONE]];
        assert!(LocalUnitary::new(vec![id, not_u]).is_err());
        let u = LocalUnitary::new(vec![id]).unwrap();
        assert!(matches!(
            apply_local_unitary(&bell(), &u),
            Err(Error::InvalidLocalUnitary(_))
        ));
    }

    #[test]
    fn permutation_examples() {
        let psi = ghz3();
        assert_eq!(permute_qubits(&psi, &[0, 1, 2]).unwrap(), psi);
        assert_eq!(
            permute_qubits(&ket(&[0, 1]), &[1, 0]).unwrap(),
            ket(&[1, 0])
        );
        let s = tensor(&bell(), &ket(&[0])).unwrap();
        let twice = permute_qubits(&permute_qubits(&s, &[2, 1, 0]).unwrap(), &[2, 1, 0]).unwrap();
        assert!(twice.distance(&s).unwrap() < 1e-12);
        // qubit 0 moves to position 2 of |100>.
        assert_eq!(
            permute_qubits(&ket(&[1, 0, 0]), &[2, 0, 1]).unwrap(),
            ket(&[0, 0, 1])
        );
        assert!(permute_qubits(&psi, &[0, 0, 1]).is_err());
        assert!(permute_qubits(&psi, &[0, 1]).is_err());
        assert!(permute_qubits(&psi, &[0, 1, 3]).is_err());
    }

    #[test]
    fn cap_parsing() {
        assert_eq!(parse_qubit_cap("16").unwrap(), 16);
        assert_eq!(parse_qubit_cap(" 2 ").unwrap(), 2);
        assert!(parse_qubit_cap("1").is_err());
        assert!(parse_qubit_cap("21").is_err());
        assert!(parse_qubit_cap("lots").is_err());
    }

    #[test]
    fn density_tensor_and_display() {
        let rho = to_density(&bell())
            .unwrap()
            .tensor(&DensityMatrix::maximally_mixed(1).unwrap())
            .unwrap();
        assert_eq!(rho.n_qubits(), 3);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(purity(&rho), 0.5, epsilon = 1e-15);
        assert_eq!(QubitSet::new([3, 1]).unwrap().to_string(), "{1,3}");
    }
}
