//! Executable checks of the four entanglement-measure properties:
//! zero on separable states, local-unitary invariance, non-increase of the
//! expected index under single-qubit projective measurement, and additivity
//! under tensor products. Also the GHZ/EPR index bookkeeping.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify, entanglement_index};
use crate::construct::{
    basis_state, ghz, ghz_product, random_local_unitary, seeded_rng, DressedProductSpec, GhzProduct,
};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, SetPartition};
use crate::statecore::{apply_local_unitary, qubit_cap, shift_of, tensor, PureState};

/// Outcomes below this probability are dropped.
const PRUNE_PROBABILITY: f64 = 1e-12;

/// Slack allowed when comparing a real expectation against an integer index.
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Basis {
    Z,
    X,
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" => Ok(Basis::Z),
            "X" | "x" => Ok(Basis::X),
            other => Err(Error::InvalidBasis(other.to_string())),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Z => "Z",
            Basis::X => "X",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome {
    /// 0 for `|0>` / `|+>`, 1 for `|1>` / `|->`.
    pub outcome: u8,
    pub probability: f64,
    /// Renormalized state with the measured qubit left in the outcome state.
    pub post_state: PureState,
}

/// Projective measurement of one qubit in the Z or X basis.
pub fn measure_qubit(
    psi: &PureState,
    qubit: usize,
    basis: Basis,
) -> Result<Vec<MeasurementOutcome>> {
    psi.check_qubit(qubit)?;
    let n = psi.n_qubits();
    let stride = 1usize << shift_of(n, qubit);
    let amps = psi.amplitudes();
    let mut outcomes = Vec::with_capacity(2);
    for outcome in 0..2u8 {
        let mut post = vec![Complex64::new(0.0, 0.0); amps.len()];
        for i0 in (0..amps.len()).filter(|i| i & stride == 0) {
            let i1 = i0 | stride;
            match basis {
                Basis::Z => {
                    let i = if outcome == 0 { i0 } else { i1 };
                    post[i] = amps[i];
                }
                Basis::X => {
                    let sign = if outcome == 0 { 1.0 } else { -1.0 };
                    // <±|psi> on the rest, then re-attach |±>.
                    let r = (amps[i0] + amps[i1] * sign) * FRAC_1_SQRT_2;
                    post[i0] = r * FRAC_1_SQRT_2;
                    post[i1] = r * (sign * FRAC_1_SQRT_2);
                }
            }
        }
        let probability: f64 = post.iter().map(|a| a.norm_sqr()).sum();
        if probability < PRUNE_PROBABILITY {
            continue;
        }
        outcomes.push(MeasurementOutcome {
            outcome,
            probability,
            post_state: PureState::normalized(n, post)?,
        });
    }
    Ok(outcomes)
}

/// `sum_k p_k E(post_k)` for one single-qubit measurement.
pub fn expected_index_after(psi: &PureState, qubit: usize, basis: Basis, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for o in measure_qubit(psi, qubit, basis)? {
        total += o.probability * entanglement_index(&o.post_state, tol)?.get() as f64;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Property {
    ZeroForSeparable = 1,
    LocalUnitaryInvariance = 2,
    MeasurementMonotonicity = 3,
    Additivity = 4,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::ZeroForSeparable,
        Property::LocalUnitaryInvariance,
        Property::MeasurementMonotonicity,
        Property::Additivity,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Property::ZeroForSeparable => "zero for separable states",
            Property::LocalUnitaryInvariance => "invariant under local unitaries",
            Property::MeasurementMonotonicity => "expected index non-increasing under measurement",
            Property::Additivity => "additive under tensor products",
        }
    }
}

impl TryFrom<u8> for Property {
    type Error = Error;

    fn try_from(id: u8) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.id() == id)
            .ok_or(Error::InvalidProperty(id))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property_id: u8,
    pub name: &'static str,
    pub max_n: usize,
    pub trials: usize,
    pub seed: u64,
    pub cases_run: usize,
    pub failures: Vec<String>,
    pub max_deviation: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct CaseResult {
    cases: usize,
    deviation: f64,
    failures: Vec<String>,
}

impl CaseResult {
    fn ok(cases: usize) -> Self {
        Self {
            cases,
            deviation: 0.0,
            failures: Vec::new(),
        }
    }
}

/// A random GHZ-block product with `n` qubits: random shape, random qubit
/// permutation, random local-unitary dressing.
fn random_product(rng: &mut ChaCha8Rng, n: usize) -> Result<(GhzProduct, String)> {
    let shapes = enumerate_partitions(n)?;
    let shape = shapes.choose(rng).expect("at least one partition").clone();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let lu_seed: u64 = rng.random();
    let desc = format!("shape {shape} perm {perm:?} lu_seed {lu_seed}");
    let spec = DressedProductSpec::new(shape)
        .with_perm(perm)
        .with_lu_seed(lu_seed);
    Ok((ghz_product(&spec)?, desc))
}

fn run_case(
    property: Property,
    max_n: usize,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<CaseResult> {
    match property {
        Property::ZeroForSeparable => {
            let n = rng.random_range(1..=max_n);
            let u = random_local_unitary(n, rng);
            let psi = apply_local_unitary(&basis_state(&vec![0; n])?, &u)?;
            let r = classify(&psi, tol)?;
            let mut res = CaseResult::ok(1);
            res.deviation = r.index.get() as f64;
            if r.index.get() != 0 || r.blocks != SetPartition::singletons(n) {
                res.failures.push(format!(
                    "random {n}-qubit product state classified as {} (E={})",
                    r.blocks, r.index
                ));
            }
            Ok(res)
        }
        Property::LocalUnitaryInvariance => {
            let n = rng.random_range(2..=max_n);
            let (p, desc) = random_product(rng, n)?;
            let u = random_local_unitary(n, rng);
            let before = classify(&p.state, tol)?;
            let after = classify(&apply_local_unitary(&p.state, &u)?, tol)?;
            let mut res = CaseResult::ok(1);
            res.deviation = before.index.get().abs_diff(after.index.get()) as f64;
            if before.blocks != after.blocks || before.shape != after.shape {
                // A block mismatch with equal indices still counts as one unit.
                res.deviation = res.deviation.max(1.0);
            }
            if res.deviation > 0.0 {
                res.failures.push(format!(
                    "{desc}: blocks {} (E={}) became {} (E={}) under a local unitary",
                    before.blocks, before.index, after.blocks, after.index
                ));
            }
            Ok(res)
        }
        Property::MeasurementMonotonicity => {
            let n = rng.random_range(2..=max_n);
            let (p, desc) = random_product(rng, n)?;
            let qubit = rng.random_range(0..n);
            let e = entanglement_index(&p.state, tol)?.get() as f64;
            let mut res = CaseResult::ok(0);
            for basis in [Basis::Z, Basis::X] {
                res.cases += 1;
                let after = expected_index_after(&p.state, qubit, basis, tol)?;
                let excess = (after - e).max(0.0);
                res.deviation = res.deviation.max(excess);
                if after > e + MONOTONE_SLACK {
                    res.failures.push(format!(
                        "{desc}: measuring qubit {qubit} in {basis} raised expected index {e} to {after}"
                    ));
                }
            }
            Ok(res)
        }
        Property::Additivity => {
            let n = rng.random_range(2..=max_n);
            let n1 = rng.random_range(1..n);
            let (a, da) = random_product(rng, n1)?;
            let (b, db) = random_product(rng, n - n1)?;
            let ea = entanglement_index(&a.state, tol)?.get();
            let eb = entanglement_index(&b.state, tol)?.get();
            let eab = entanglement_index(&tensor(&a.state, &b.state)?, tol)?.get();
            let mut res = CaseResult::ok(1);
            res.deviation = eab.abs_diff(ea + eb) as f64;
            if eab != ea + eb {
                res.failures.push(format!(
                    "[{da}] ⊗ [{db}]: E(a⊗b)={eab} but E(a)+E(b)={ea}+{eb}"
                ));
            }
            Ok(res)
        }
    }
}

/// Runs `trials` seeded random cases of one property. Trial `t` draws from
/// stream `t` of a generator seeded with `seed`, so results do not depend on
/// scheduling.
pub fn run_property_suite(
    property: Property,
    max_n: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    run_property_suite_with_tol(property, max_n, trials, seed, crate::statecore::DEFAULT_TOL)
}

pub fn run_property_suite_with_tol(
    property: Property,
    max_n: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<PropertyReport> {
    let cap = qubit_cap();
    if !(2..=cap).contains(&max_n) {
        return Err(Error::OutOfRange {
            value: max_n,
            min: 2,
            max: cap,
        });
    }
    let results: Vec<CaseResult> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed);
            rng.set_stream(t as u64);
            run_case(property, max_n, &mut rng, tol).unwrap_or_else(|e| CaseResult {
                cases: 1,
                deviation: max_n as f64,
                failures: vec![format!("trial {t}: {e}")],
            })
        })
        .collect();

    let mut report = PropertyReport {
        property_id: property.id(),
        name: property.name(),
        max_n,
        trials,
        seed,
        cases_run: 0,
        failures: Vec::new(),
        max_deviation: 0.0,
    };
    for (t, r) in results.into_iter().enumerate() {
        report.cases_run += r.cases;
        report.max_deviation = report.max_deviation.max(r.deviation);
        report
            .failures
            .extend(r.failures.into_iter().map(|f| format!("trial {t}: {f}")));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzEprRow {
    pub m: usize,
    pub ghz_index: usize,
    pub predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhzEprReport {
    pub epr_index: usize,
    pub rows: Vec<GhzEprRow>,
    pub ok: bool,
}

/// Checks `E(ghz(m)) = (m - 1) E(ghz(2))` for `m = 2..=max_m`.
pub fn ghz_epr_arithmetic(max_m: usize, tol: f64) -> Result<GhzEprReport> {
    let cap = qubit_cap();
    if !(2..=cap).contains(&max_m) {
        return Err(Error::OutOfRange {
            value: max_m,
            min: 2,
            max: cap,
        });
    }
    let epr_index = entanglement_index(&ghz(2)?, tol)?.get();
    let rows = (2..=max_m)
        .map(|m| {
            Ok(GhzEprRow {
                m,
                ghz_index: entanglement_index(&ghz(m)?, tol)?.get(),
                predicted: (m - 1) * epr_index,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.ghz_index == r.predicted);
    Ok(GhzEprReport {
        epr_index,
        rows,
        ok,
    })
}
