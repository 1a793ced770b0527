//! Representative states for each partition class: GHZ blocks, basis
//! states, and dressed tensor products of GHZ blocks.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::partitions::{shape_of, IntegerPartition, SetPartition};
use crate::statecore::{
    self, apply_local_unitary, check_cap, permute_qubits, LocalUnitary, Mat2, PureState,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The deterministic generator used for every seeded construction.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(|0...0> + |1...1>)/sqrt(2)` for `n >= 2`, `|0>` for `n = 1`.
pub fn ghz(n: usize) -> Result<PureState> {
    if n == 0 {
        return Err(Error::NoQubits);
    }
    check_cap(n)?;
    let mut amps = vec![ZERO; 1 << n];
    if n == 1 {
        amps[0] = Complex64::new(1.0, 0.0);
    } else {
        amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[(1 << n) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    }
    Ok(PureState::from_raw(n, amps))
}

/// Computational basis state; `bits[0]` is qubit 0.
pub fn basis_state(bits: &[u8]) -> Result<PureState> {
    if bits.is_empty() {
        return Err(Error::NoQubits);
    }
    check_cap(bits.len())?;
    let mut index = 0usize;
    for &b in bits {
        if b > 1 {
            return Err(Error::Format(format!("basis bit {b} is not 0 or 1")));
        }
        index = index << 1 | b as usize;
    }
    let mut amps = vec![ZERO; 1 << bits.len()];
    amps[index] = Complex64::new(1.0, 0.0);
    Ok(PureState::from_raw(bits.len(), amps))
}

/// `U(theta, phi, lambda)` with `cos(theta/2) = sqrt(u)`; the `u` draw makes
/// `|U_00|^2` uniform, which is the Haar marginal for SU(2).
pub fn single_qubit_unitary(u: f64, phi: f64, lambda: f64) -> Mat2 {
    let theta = 2.0 * u.sqrt().acos();
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -Complex64::from_polar(s, lambda)],
        [
            Complex64::from_polar(s, phi),
            Complex64::from_polar(c, phi + lambda),
        ],
    ]
}

/// `n` independent single-qubit unitaries drawn from `rng`.
pub fn random_local_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LocalUnitary {
    let mats = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let phi = TAU * rng.random::<f64>();
            let lambda = TAU * rng.random::<f64>();
            single_qubit_unitary(u, phi, lambda)
        })
        .collect();
    LocalUnitary::with_tolerance(mats, 1e-12).expect("parameterized matrices are unitary")
}

/// [`random_local_unitary`] with a fresh generator from `seed`.
pub fn seeded_local_unitary(n: usize, seed: u64) -> LocalUnitary {
    random_local_unitary(n, &mut seeded_rng(seed))
}

/// How a GHZ product is laid out and dressed.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedProductSpec {
    pub shape: IntegerPartition,
    /// Which qubits form each block; contiguous in shape order when `None`.
    pub assignment: Option<SetPartition>,
    pub lu_seed: Option<u64>,
    /// Applied after layout: qubit `i` moves to position `perm[i]`.
    pub perm: Option<Vec<usize>>,
}

impl DressedProductSpec {
    pub fn new(shape: IntegerPartition) -> Self {
        Self {
            shape,
            assignment: None,
            lu_seed: None,
            perm: None,
        }
    }

    pub fn with_assignment(mut self, assignment: SetPartition) -> Self {
        self.assignment = Some(assignment);
        self
    }

    pub fn with_lu_seed(mut self, seed: u64) -> Self {
        self.lu_seed = Some(seed);
        self
    }

    pub fn with_perm(mut self, perm: Vec<usize>) -> Self {
        self.perm = Some(perm);
        self
    }
}

/// A GHZ-block product state together with its ground-truth blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct GhzProduct {
    pub state: PureState,
    pub blocks: SetPartition,
}

/// Tensor product of `ghz(n_j)` blocks laid out per the spec, then permuted,
/// then dressed with a seeded local unitary.
pub fn ghz_product(spec: &DressedProductSpec) -> Result<GhzProduct> {
    let n = spec.shape.total();
    check_cap(n)?;

    let blocks = match &spec.assignment {
        Some(sp) => {
            if sp.n_qubits() != n || shape_of(sp) != spec.shape {
                return Err(Error::ShapeMismatch(format!(
                    "assignment {sp} has shape {} but spec shape is {}",
                    shape_of(sp),
                    spec.shape
                )));
            }
            sp.clone()
        }
        None => SetPartition::contiguous(&spec.shape),
    };

    // Contiguous product over the blocks in order, then scatter each
    // contiguous run onto the block's members.
    let mut state = ghz(blocks.blocks()[0].len())?;
    for b in &blocks.blocks()[1..] {
        state = statecore::tensor(&state, &ghz(b.len())?)?;
    }
    let layout: Vec<usize> = blocks
        .blocks()
        .iter()
        .flat_map(|b| b.members().iter().copied())
        .collect();
    state = permute_qubits(&state, &layout)?;

    let blocks = match &spec.perm {
        Some(perm) => {
            state = permute_qubits(&state, perm)?;
            blocks.permuted(perm)?
        }
        None => blocks,
    };
    if let Some(seed) = spec.lu_seed {
        state = apply_local_unitary(&state, &seeded_local_unitary(n, seed))?;
    }
    Ok(GhzProduct { state, blocks })
}
