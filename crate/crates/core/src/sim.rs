//! Numerical verification engine.
//!
//! Given a control schedule, this module computes the first-order average
//! Hamiltonian
//!
//! ```text
//! H̄⁽⁰⁾ = (1/T_c) ∫₀^{T_c} U_c(t)† H U_c(t) dt
//! ```
//!
//! exactly (up to floating point) for piecewise-constant bounded-strength
//! controls, and reports the decoupling residual ‖H̄⁽⁰⁾‖₂/‖H‖₂.
//!
//! Slot generators are constant in time: slot j applies
//! `u_{b_j}(δ) = exp(−i·h_{b_j}·δ)` where `h_b` is the principal-branch
//! logarithm of the slot unitary `U_b`, rescaled so `u_b(Δ) ∝ U_b` and
//! trace-removed (a scalar shift that drops out of every conjugation). In
//! the product eigenbasis of `h_{b_j}` the slot integral is analytic: matrix
//! element (r, c) picks up the factor `(e^{i(λ_r−λ_c)Δ}−1)/(i(λ_r−λ_c)Δ)`,
//! with limit value 1 on (near-)degenerate pairs. A Gauss–Legendre
//! quadrature path evaluates the same integrals numerically as an
//! independent oracle.
//!
//! Two evaluation modes exist: **full** conjugates the assembled d^n
//! Hamiltonian through every slot; **per-term** uses the locality reduction
//! (all unitaries off a term's support commute through it and cancel), so
//! the slot work happens in dimension d^ℓ per term.
//!
//! Time-symmetrized schedules mark their second half as time-reversed; those
//! slots run `exp(+i·h·δ)` for the forward label they retrace, which is what
//! realizes `U_c(t) = U_c(T_c − t)` and preserves H̄⁽⁰⁾ exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::cayley::{check_balanced, Cycle};
use crate::gf::field_from_order;
use crate::linalg::{
    gauss_legendre_01, is_hermitian, kron_list, spectral_norm_hermitian, unitary_eigen, CMatrix,
    C64, ZERO,
};
use crate::parallel;
use crate::pauli::{group_average, tensor_unitary, Representation};
use crate::schedule::ControlSchedule;
use crate::{Error, Result};

/// Largest dimension d^|support| a single Hamiltonian term (and hence the
/// per-term slot computation) may have.
pub const TERM_DIM_BUDGET: u64 = 256;

/// Largest full-register dimension d^n for assembling Hamiltonians,
/// full-space averaging, and spectral norms.
pub const FULL_DIM_BUDGET: u64 = 1 << 14;

/// Cap on the number of random terms when C(n, ℓ) is large.
pub const MAX_RANDOM_TERMS: usize = 50;

/// Eigenvalue gaps below this are treated as degenerate in the analytic slot
/// integral (the integrand factor degenerates to exactly 1).
const DEGENERACY_TOL: f64 = 1e-12;

/// Hermiticity / tracelessness tolerance for accepted Hamiltonian terms.
const ALGEBRA_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Local Hamiltonians
// ---------------------------------------------------------------------------

/// One interaction term: a Hermitian traceless matrix on a small sorted
/// subset of qudits.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    support: Vec<usize>,
    matrix: CMatrix,
}

impl HamiltonianTerm {
    /// Sorted, distinct, 0-based qudit indices the term acts on.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// The d^|support| Hermitian traceless matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// A few-body Hamiltonian H = Σ_k H_k on n qudits of dimension d, stored as
/// its list of local terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHamiltonian {
    n: usize,
    d: u32,
    terms: Vec<HamiltonianTerm>,
}

impl LocalHamiltonian {
    /// Validate and adopt a list of (support, matrix) terms. Supports are
    /// sorted; each matrix must be Hermitian and traceless to 1e−12 and of
    /// dimension d^|support| ≤ 256.
    pub fn new(n: usize, d: u32, terms: Vec<(Vec<usize>, CMatrix)>) -> Result<Self> {
        if n == 0 || d < 2 {
            return Err(Error::DimensionMismatch(
                "need at least one qudit of dimension at least 2".into(),
            ));
        }
        let mut out = Vec::with_capacity(terms.len());
        for (support, matrix) in terms {
            let mut support = support;
            support.sort_unstable();
            if support.is_empty() {
                return Err(Error::DimensionMismatch("empty term support".into()));
            }
            if support.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::DimensionMismatch(format!(
                    "duplicate qudit in support {support:?}"
                )));
            }
            if *support.last().unwrap() >= n {
                return Err(Error::DimensionMismatch(format!(
                    "support {support:?} outside 0..{n}"
                )));
            }
            let dim = (d as u64)
                .checked_pow(support.len() as u32)
                .filter(|&v| v <= TERM_DIM_BUDGET)
                .ok_or_else(|| {
                    Error::BudgetExceeded(format!(
                        "term dimension {d}^{} exceeds {TERM_DIM_BUDGET}",
                        support.len()
                    ))
                })? as usize;
            if matrix.nrows() != dim || matrix.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "term on {support:?} is {}×{}, expected {dim}×{dim}",
                    matrix.nrows(),
                    matrix.ncols()
                )));
            }
            let scale = 1.0 + matrix.norm();
            if !is_hermitian(&matrix, ALGEBRA_TOL * scale) {
                return Err(Error::DimensionMismatch(format!(
                    "term on {support:?} is not Hermitian"
                )));
            }
            if matrix.trace().norm() > ALGEBRA_TOL * scale {
                return Err(Error::DimensionMismatch(format!(
                    "term on {support:?} is not traceless"
                )));
            }
            out.push(HamiltonianTerm { support, matrix });
        }
        Ok(LocalHamiltonian { n, d, terms: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// Largest support size over the terms (the locality ℓ).
    pub fn locality(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.support.len())
            .max()
            .unwrap_or(0)
    }

    /// Assemble the full d^n matrix Σ_k H_k ⊗ id. Requires
    /// d^n ≤ [`FULL_DIM_BUDGET`].
    pub fn assemble(&self) -> Result<CMatrix> {
        let dim = full_dimension(self.n, self.d)?;
        let mut out = CMatrix::zeros(dim, dim);
        for term in &self.terms {
            embed_term_into(&mut out, self.n, self.d, &term.support, &term.matrix);
        }
        Ok(out)
    }
}

/// d^n as usize, enforcing the full-space budget.
fn full_dimension(n: usize, d: u32) -> Result<usize> {
    (d as u64)
        .checked_pow(n as u32)
        .filter(|&v| v <= FULL_DIM_BUDGET)
        .map(|v| v as usize)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "full register dimension {d}^{n} exceeds {FULL_DIM_BUDGET}; \
                 only per-term averages are available at this size"
            ))
        })
}

/// Add `m ⊗ id` (m living on `support`) into the full d^n matrix `out`.
/// Qudit 0 owns the most significant base-d digit, matching the row-order
/// Kronecker convention used everywhere else.
fn embed_term_into(out: &mut CMatrix, n: usize, d: u32, support: &[usize], m: &CMatrix) {
    let d = d as usize;
    let weights: Vec<usize> = (0..n).map(|i| d.pow((n - 1 - i) as u32)).collect();
    let env: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
    let env_total = d.pow(env.len() as u32);
    let m_dim = m.nrows();

    // Base-d digits of a term index, placed at the support positions
    // (support[last] is the least significant digit).
    let place = |mut idx: usize| -> usize {
        let mut acc = 0usize;
        for &pos in support.iter().rev() {
            acc += (idx % d) * weights[pos];
            idx /= d;
        }
        acc
    };
    let term_offsets: Vec<usize> = (0..m_dim).map(place).collect();

    for e in 0..env_total {
        let mut base = 0usize;
        let mut rest = e;
        for &pos in env.iter().rev() {
            base += (rest % d) * weights[pos];
            rest /= d;
        }
        for rt in 0..m_dim {
            for ct in 0..m_dim {
                let v = m[(rt, ct)];
                if v != ZERO {
                    out[(base + term_offsets[rt], base + term_offsets[ct])] += v;
                }
            }
        }
    }
}

/// Exact count of ℓ-subsets of n, saturating just above `cap`.
fn subset_count_capped(n: usize, k: usize, cap: u128) -> u128 {
    let mut count: u128 = 1;
    for i in 0..k {
        count = count * ((n - i) as u128) / ((i + 1) as u128);
        if count > cap {
            return cap + 1;
        }
    }
    count
}

/// Seeded random ℓ-local Hamiltonian: one Hermitian traceless term per
/// subset (all C(n,ℓ) subsets when at most [`MAX_RANDOM_TERMS`], otherwise
/// that many distinct random subsets). `diagonal_only` restricts every term
/// to a real diagonal traceless matrix.
pub fn random_local_hamiltonian(
    n: usize,
    d: u32,
    ell: usize,
    seed: u64,
    diagonal_only: bool,
) -> Result<LocalHamiltonian> {
    if ell == 0 || ell > n {
        return Err(Error::DimensionMismatch(format!(
            "locality {ell} outside 1..={n}"
        )));
    }
    let dim = (d as u64)
        .checked_pow(ell as u32)
        .filter(|&v| v <= TERM_DIM_BUDGET)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "term dimension {d}^{ell} exceeds {TERM_DIM_BUDGET}"
            ))
        })? as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Vec<usize>> =
        if subset_count_capped(n, ell, MAX_RANDOM_TERMS as u128) <= MAX_RANDOM_TERMS as u128 {
            (0..n).combinations(ell).collect()
        } else {
            let mut chosen: BTreeSet<Vec<usize>> = BTreeSet::new();
            while chosen.len() < MAX_RANDOM_TERMS {
                // Partial Fisher–Yates draw of ℓ distinct indices.
                let mut pool: Vec<usize> = (0..n).collect();
                for i in 0..ell {
                    let j = rng.random_range(i..n);
                    pool.swap(i, j);
                }
                let mut pick = pool[..ell].to_vec();
                pick.sort_unstable();
                chosen.insert(pick);
            }
            chosen.into_iter().collect()
        };

    let mut terms = Vec::with_capacity(subsets.len());
    for support in subsets {
        let matrix = if diagonal_only {
            let mut diag: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let mean = diag.iter().sum::<f64>() / (dim as f64);
            for v in &mut diag {
                *v -= mean;
            }
            CMatrix::from_fn(dim, dim, |r, c| {
                if r == c {
                    C64::new(diag[r], 0.0)
                } else {
                    ZERO
                }
            })
        } else {
            let a = CMatrix::from_fn(dim, dim, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let mut h = (&a + a.adjoint()).map(|z| z * 0.5);
            let shift = h.trace() / (dim as f64);
            for i in 0..dim {
                h[(i, i)] -= shift;
            }
            h
        };
        terms.push((support, matrix));
    }
    LocalHamiltonian::new(n, d, terms)
}

// ---------------------------------------------------------------------------
// Control generators
// ---------------------------------------------------------------------------

/// Eigendecomposition of one single-qudit slot generator: h = V diag(η) V†.
#[derive(Debug, Clone)]
pub struct GeneratorFactor {
    basis: CMatrix,
    eigenvalues: Vec<f64>,
}

impl GeneratorFactor {
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// The bounded-strength generator of one slot: per-qudit Hermitian matrices
/// h_{b_i} with `exp(−i·h_{b_i}·Δ) ∝ U_{b_i}`.
#[derive(Debug, Clone)]
pub struct ControlGenerator {
    label: Vec<u32>,
    delta: f64,
    factors: Vec<GeneratorFactor>,
}

impl ControlGenerator {
    pub fn label(&self) -> &[u32] {
        &self.label
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn factors(&self) -> &[GeneratorFactor] {
        &self.factors
    }

    /// The Hermitian generator h_{b_i} on qudit i.
    pub fn qudit_generator(&self, i: usize) -> CMatrix {
        let f = &self.factors[i];
        let d = f.basis.nrows();
        let diag = CMatrix::from_fn(d, d, |r, c| {
            if r == c {
                C64::new(f.eigenvalues[r], 0.0)
            } else {
                ZERO
            }
        });
        &f.basis * diag * f.basis.adjoint()
    }

    /// `u_{b_i}(t) = exp(−i·h_{b_i}·t)` on qudit i.
    pub fn qudit_propagator(&self, i: usize, time: f64) -> CMatrix {
        let f = &self.factors[i];
        let d = f.basis.nrows();
        let diag = CMatrix::from_fn(d, d, |r, c| {
            if r == c {
                C64::from_polar(1.0, -f.eigenvalues[r] * time)
            } else {
                ZERO
            }
        });
        &f.basis * diag * f.basis.adjoint()
    }
}

/// Per-label eigendata for every single-qudit unitary of a representation:
/// the reusable core behind slot integrals and control generators.
struct QuditEigen {
    bases: Vec<CMatrix>,
    etas: Vec<Vec<f64>>,
    delta: f64,
    d: usize,
}

impl QuditEigen {
    fn new(rep: &Representation, delta: f64) -> QuditEigen {
        let d = rep.d() as usize;
        let mut bases = Vec::with_capacity(rep.q() as usize);
        let mut etas = Vec::with_capacity(rep.q() as usize);
        for g in 0..rep.q() {
            if g == 0 {
                bases.push(CMatrix::identity(d, d));
                etas.push(vec![0.0; d]);
                continue;
            }
            let u = crate::pauli::unitary_for(rep, g).expect("label in range");
            let (v, theta) = unitary_eigen(u);
            // Principal phases θ_j ∈ (−π, π] give U = V diag(e^{iθ}) V†.
            // Choosing h's eigenvalues η_j = (θ̄ − θ_j)/Δ makes h traceless
            // and exp(−i·h·Δ) = e^{−iθ̄}·U ∝ U.
            let mean = theta.iter().sum::<f64>() / (theta.len() as f64);
            etas.push(theta.iter().map(|&t| (mean - t) / delta).collect());
            bases.push(v);
        }
        QuditEigen {
            bases,
            etas,
            delta,
            d,
        }
    }
}

/// Build the slot generator for a whole transition column.
pub fn control_generator(rep: &Representation, b: &[u32], delta: f64) -> Result<ControlGenerator> {
    if b.is_empty() {
        return Err(Error::DimensionMismatch(
            "control generator needs at least one label".into(),
        ));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::Unsupported(format!(
            "slot duration must be positive and finite, got {delta}"
        )));
    }
    for &g in b {
        if g >= rep.q() {
            return Err(Error::FieldMismatch {
                expected: rep.q(),
                got: g,
            });
        }
    }
    let eig = QuditEigen::new(rep, delta);
    let factors = b
        .iter()
        .map(|&g| GeneratorFactor {
            basis: eig.bases[g as usize].clone(),
            eigenvalues: eig.etas[g as usize].clone(),
        })
        .collect();
    Ok(ControlGenerator {
        label: b.to_vec(),
        delta,
        factors,
    })
}

// ---------------------------------------------------------------------------
// Slot integrals
// ---------------------------------------------------------------------------

/// Product eigenbasis of a multi-qudit slot generator: ⊗_i V_{b_i} together
/// with the Kronecker-sum eigenvalue vector (negated for time-reversed
/// slots, which run the negated generator).
fn product_basis(eig: &QuditEigen, labels: &[u32], negate: bool) -> (CMatrix, Vec<f64>) {
    let factors: Vec<CMatrix> = labels
        .iter()
        .map(|&g| eig.bases[g as usize].clone())
        .collect();
    let v = kron_list(&factors);
    let dim = v.nrows();
    let mut lambda = vec![0.0f64; dim];
    for (idx, slot) in lambda.iter_mut().enumerate() {
        let mut rest = idx;
        // labels[last] owns the least significant base-d digit.
        for &g in labels.iter().rev() {
            *slot += eig.etas[g as usize][rest % eig.d];
            rest /= eig.d;
        }
        if negate {
            *slot = -*slot;
        }
    }
    (v, lambda)
}

/// `(1/Δ) ∫₀^Δ u(δ)† M u(δ) dδ` for `u(δ) = V diag(e^{−iλδ}) V†`, evaluated
/// analytically: in the eigenbasis, element (r, c) picks up the factor
/// `(e^{i(λ_r−λ_c)Δ} − 1)/(i(λ_r−λ_c)Δ)` (1 on degenerate pairs).
fn slot_integral_exact(v: &CMatrix, lambda: &[f64], delta: f64, m: &CMatrix) -> CMatrix {
    let dim = v.nrows();
    let mm = v.adjoint() * m * v;
    let scaled = CMatrix::from_fn(dim, dim, |r, c| {
        let gap = lambda[r] - lambda[c];
        if gap.abs() < DEGENERACY_TOL {
            mm[(r, c)]
        } else {
            let x = gap * delta;
            let numerator = C64::new(x.cos() - 1.0, x.sin());
            mm[(r, c)] * (numerator / C64::new(0.0, x))
        }
    });
    v * scaled * v.adjoint()
}

/// The same slot integral by Gauss–Legendre quadrature on [0, Δ]: an
/// independent numerical oracle for the analytic factors.
fn slot_integral_quadrature(
    v: &CMatrix,
    lambda: &[f64],
    delta: f64,
    m: &CMatrix,
    nodes: &[f64],
    weights: &[f64],
) -> CMatrix {
    let dim = v.nrows();
    let mut acc = CMatrix::zeros(dim, dim);
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let t = x * delta;
        let phase = CMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                C64::from_polar(1.0, -lambda[r] * t)
            } else {
                ZERO
            }
        });
        let u = v * phase * v.adjoint();
        acc += (u.adjoint() * m * &u).map(|z| z * w);
    }
    // Weights on [0,1] sum to 1, so the weighted sum already is the
    // (1/Δ)-normalized average over the slot.
    acc
}

#[derive(Clone, Copy)]
enum Integrator<'a> {
    Exact,
    GaussLegendre {
        nodes: &'a [f64],
        weights: &'a [f64],
    },
}

/// One slot of a schedule, reduced to what the averaging loop needs: the
/// frame labels at slot start, the forward generator labels, and whether the
/// slot runs time-reversed.
struct SlotSpec {
    frame: Vec<u32>,
    forward: Vec<u32>,
    reversed: bool,
}

/// Slot list for the whole register (full mode).
fn full_slots(s: &ControlSchedule) -> Result<Vec<SlotSpec>> {
    let field = field_from_order(s.q() as u64)?;
    Ok((0..s.slots())
        .map(|j| {
            let b = &s.transitions()[j];
            let reversed = s.slot_reversed(j);
            let forward = if reversed {
                b.iter().map(|&v| field.neg_idx(v)).collect()
            } else {
                b.clone()
            };
            SlotSpec {
                frame: s.columns()[j].clone(),
                forward,
                reversed,
            }
        })
        .collect())
}

/// Slot list restricted to a term's support rows.
fn restricted_slots(s: &ControlSchedule, support: &[usize]) -> Result<Vec<SlotSpec>> {
    let field = field_from_order(s.q() as u64)?;
    Ok((0..s.slots())
        .map(|j| {
            let b = &s.transitions()[j];
            let a = &s.columns()[j];
            let reversed = s.slot_reversed(j);
            let forward = support
                .iter()
                .map(|&i| {
                    if reversed {
                        field.neg_idx(b[i])
                    } else {
                        b[i]
                    }
                })
                .collect();
            SlotSpec {
                frame: support.iter().map(|&i| a[i]).collect(),
                forward,
                reversed,
            }
        })
        .collect())
}

/// Average the conjugated slot integrals of `m` over a slot list:
/// `(1/N) Σ_j U_{frame_j}† [slot integral of m] U_{frame_j}`.
///
/// Slots are mapped in parallel; the fold runs in ascending slot order, so
/// the floating-point result is identical with and without threads.
fn conjugated_slot_average(
    m: &CMatrix,
    slots: &[SlotSpec],
    rep: &Representation,
    eig: &QuditEigen,
    integrator: Integrator<'_>,
) -> Result<CMatrix> {
    let mut bases: BTreeMap<(Vec<u32>, bool), (CMatrix, Vec<f64>)> = BTreeMap::new();
    let mut frames: BTreeMap<Vec<u32>, CMatrix> = BTreeMap::new();
    for spec in slots {
        let key = (spec.forward.clone(), spec.reversed);
        if !bases.contains_key(&key) {
            let vb = product_basis(eig, &spec.forward, spec.reversed);
            bases.insert(key, vb);
        }
        if !frames.contains_key(&spec.frame) {
            frames.insert(spec.frame.clone(), tensor_unitary(rep, &spec.frame)?);
        }
    }

    let dim = m.nrows();
    let contributions = parallel::map_indexed(slots.len(), |j| {
        let spec = &slots[j];
        let (v, lambda) = &bases[&(spec.forward.clone(), spec.reversed)];
        let inner = match integrator {
            Integrator::Exact => slot_integral_exact(v, lambda, eig.delta, m),
            Integrator::GaussLegendre { nodes, weights } => {
                slot_integral_quadrature(v, lambda, eig.delta, m, nodes, weights)
            }
        };
        let u = &frames[&spec.frame];
        u.adjoint() * inner * u
    });
    let mut acc = CMatrix::zeros(dim, dim);
    for c in contributions {
        acc += c;
    }
    Ok(acc.map(|z| z / (slots.len() as f64)))
}

// ---------------------------------------------------------------------------
// Average Hamiltonians
// ---------------------------------------------------------------------------

/// How H̄⁽⁰⁾ is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageMode {
    /// Conjugate the assembled d^n Hamiltonian through every slot.
    Full,
    /// Locality reduction: average each term on its own support (slot work
    /// in dimension d^|support|), then embed and sum.
    PerTerm,
}

impl std::fmt::Display for AverageMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AverageMode::Full => write!(f, "full"),
            AverageMode::PerTerm => write!(f, "per-term"),
        }
    }
}

impl std::str::FromStr for AverageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(AverageMode::Full),
            "per-term" | "per_term" => Ok(AverageMode::PerTerm),
            other => Err(Error::Parse(format!(
                "unknown averaging mode {other:?} (expected \"full\" or \"per-term\")"
            ))),
        }
    }
}

fn check_compatible(
    h: &LocalHamiltonian,
    s: &ControlSchedule,
    rep: &Representation,
) -> Result<()> {
    if h.n() != s.n() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian has {} qudits, schedule has {}",
            h.n(),
            s.n()
        )));
    }
    if h.d() != rep.d() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian qudit dimension {} does not match representation dimension {}",
            h.d(),
            rep.d()
        )));
    }
    if rep.spec() != s.rep() {
        return Err(Error::DimensionMismatch(format!(
            "representation ({}, {}) does not match the schedule's ({}, {})",
            rep.d(),
            rep.mode(),
            s.rep().d,
            s.rep().mode
        )));
    }
    Ok(())
}

/// Per-term first-order averages H̄_k⁽⁰⁾, each on its own support (dimension
/// d^|support|). This is the locality-reduction core and the only averaging
/// path whose cost is independent of n.
pub fn per_term_averages(
    h: &LocalHamiltonian,
    s: &ControlSchedule,
    rep: &Representation,
) -> Result<Vec<CMatrix>> {
    per_term_averages_with(h, s, rep, Integrator::Exact)
}

fn per_term_averages_with(
    h: &LocalHamiltonian,
    s: &ControlSchedule,
    rep: &Representation,
    integrator: Integrator<'_>,
) -> Result<Vec<CMatrix>> {
    check_compatible(h, s, rep)?;
    let eig = QuditEigen::new(rep, s.delta());
    let mut out = Vec::with_capacity(h.terms().len());
    for term in h.terms() {
        let slots = restricted_slots(s, term.support())?;
        out.push(conjugated_slot_average(
            term.matrix(),
            &slots,
            rep,
            &eig,
            integrator,
        )?);
    }
    Ok(out)
}

fn average_with(
    h: &LocalHamiltonian,
    s: &ControlSchedule,
    rep: &Representation,
    mode: AverageMode,
    integrator: Integrator<'_>,
) -> Result<CMatrix> {
    check_compatible(h, s, rep)?;
    match mode {
        AverageMode::Full => {
            let full = h.assemble()?;
            let eig = QuditEigen::new(rep, s.delta());
            let slots = full_slots(s)?;
            conjugated_slot_average(&full, &slots, rep, &eig, integrator)
        }
        AverageMode::PerTerm => {
            let per_term = per_term_averages_with(h, s, rep, integrator)?;
            let dim = full_dimension(h.n(), h.d())?;
            let mut out = CMatrix::zeros(dim, dim);
            for (term, avg) in h.terms().iter().zip(per_term.iter()) {
                embed_term_into(&mut out, h.n(), h.d(), term.support(), avg);
            }
            Ok(out)
        }
    }
}

/// The first-order average Hamiltonian H̄⁽⁰⁾ as a full d^n matrix, via the
/// exact analytic slot integrals.
pub fn average_hamiltonian(
    h: &LocalHamiltonian,
    s: &ControlSchedule,
    rep: &Representation,
    mode: AverageMode,
) -> Result<CMatrix> {
    average_with(h, s, rep, mode, Integrator::Exact)
}

/// The same quantity with every slot integral evaluated by `nodes`-point
/// Gauss–Legendre quadrature (independent oracle; `nodes ≥ 1`).
pub fn average_hamiltonian_quadrature(
    h: &LocalHamiltonian,
    s: &ControlSchedule,
    rep: &Representation,
    mode: AverageMode,
    nodes: usize,
) -> Result<CMatrix> {
    if nodes == 0 {
        return Err(Error::Unsupported(
            "quadrature needs at least one node".into(),
        ));
    }
    let (x, w) = gauss_legendre_01(nodes);
    average_with(
        h,
        s,
        rep,
        mode,
        Integrator::GaussLegendre {
            nodes: &x,
            weights: &w,
        },
    )
}

// ---------------------------------------------------------------------------
// Residual reports
// ---------------------------------------------------------------------------

/// Decoupling quality report: spectral-norm ratio of the average Hamiltonian
/// to the input Hamiltonian, with a per-term breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    /// ‖H̄⁽⁰⁾‖₂ / ‖H‖₂.
    pub residual: f64,
    /// ‖H̄_k⁽⁰⁾‖₂ / ‖H‖₂ per term, in term order.
    pub per_term: Vec<f64>,
    /// Σ_k per_term[k] − residual ≥ 0: how much the triangle inequality
    /// overestimates the assembled residual.
    pub triangle_slack: f64,
    /// ‖H‖₂ (the normalization).
    pub hamiltonian_norm: f64,
    /// ‖H̄⁽⁰⁾‖₂ before normalization.
    pub average_norm: f64,
    /// "eigenbasis_exact" or "quadrature".
    pub method: String,
    /// "full" or "per-term".
    pub mode: String,
    /// Slot count of the schedule.
    pub slots: usize,
    /// Wall-clock seconds spent.
    pub elapsed_seconds: f64,
}

/// Compute H̄⁽⁰⁾ (by the requested mode) and report the decoupling residual
/// ‖H̄⁽⁰⁾‖₂/‖H‖₂ with a per-term breakdown. `quadrature_nodes: None` uses
/// the exact analytic integrals; `Some(k)` uses k-point Gauss–Legendre.
pub fn decoupling_residual(
    h: &LocalHamiltonian,
    s: &ControlSchedule,
    rep: &Representation,
    mode: AverageMode,
    quadrature_nodes: Option<usize>,
) -> Result<ResidualReport> {
    let start = Instant::now();
    let (method, average, per_term_avgs) = match quadrature_nodes {
        None => (
            "eigenbasis_exact",
            average_with(h, s, rep, mode, Integrator::Exact)?,
            per_term_averages_with(h, s, rep, Integrator::Exact)?,
        ),
        Some(nodes) => {
            if nodes == 0 {
                return Err(Error::Unsupported(
                    "quadrature needs at least one node".into(),
                ));
            }
            let (x, w) = gauss_legendre_01(nodes);
            let integ = Integrator::GaussLegendre {
                nodes: &x,
                weights: &w,
            };
            (
                "quadrature",
                average_with(h, s, rep, mode, integ)?,
                per_term_averages_with(h, s, rep, integ)?,
            )
        }
    };

    let h_norm = spectral_norm_hermitian(&h.assemble()?);
    let average_norm = spectral_norm_hermitian(&average);
    let normalize = |v: f64| if h_norm > 0.0 { v / h_norm } else { 0.0 };
    let residual = normalize(average_norm);
    let per_term: Vec<f64> = per_term_avgs
        .iter()
        .map(|a| normalize(spectral_norm_hermitian(a)))
        .collect();
    let triangle_slack = per_term.iter().sum::<f64>() - residual;
    Ok(ResidualReport {
        residual,
        per_term,
        triangle_slack,
        hamiltonian_norm: h_norm,
        average_norm,
        method: method.to_string(),
        mode: mode.to_string(),
        slots: s.slots(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

// ---------------------------------------------------------------------------
// Whole-group balanced-cycle averaging (the inefficient protocol)
// ---------------------------------------------------------------------------

/// First-order average of the direct balanced-cycle protocol on the whole
/// group GF(q)^ℓ: `Π_G(Σ_s (μ_s/λ)·F_s(m))`, where F_s is the slot integral
/// for generator label s and Π_G the exact group average. This closed form
/// is what the slot-by-slot schedule evolution must reproduce on a
/// strength-ℓ array covering ℓ qudits.
pub fn balanced_cycle_average(
    rep: &Representation,
    cycle: &Cycle,
    m: &CMatrix,
    delta: f64,
) -> Result<CMatrix> {
    if rep.q() as u64 != cycle.q() as u64 {
        return Err(Error::FieldMismatch {
            expected: cycle.q(),
            got: rep.q(),
        });
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::Unsupported(format!(
            "slot duration must be positive and finite, got {delta}"
        )));
    }
    let ell = cycle.k();
    let dim = (rep.d() as u64)
        .checked_pow(ell as u32)
        .filter(|&v| v <= FULL_DIM_BUDGET)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "group dimension {}^{ell} exceeds {FULL_DIM_BUDGET}",
                rep.d()
            ))
        })? as usize;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}×{}, expected {dim}×{dim}",
            m.nrows(),
            m.ncols()
        )));
    }
    let report = check_balanced(cycle.q() as u64, cycle.vertices())?;
    if !report.balanced {
        return Err(Error::Unsupported(
            "cycle is not balanced; the protocol average is undefined".into(),
        ));
    }
    let lambda_total: u64 = report.mu.values().sum();
    let eig = QuditEigen::new(rep, delta);
    let mut f = CMatrix::zeros(dim, dim);
    for (label, &mu) in &report.mu {
        let (v, lam) = product_basis(&eig, label, false);
        let fs = slot_integral_exact(&v, &lam, delta, m);
        f += fs.map(|z| z * (mu as f64 / lambda_total as f64));
    }
    group_average(rep, ell, &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boa::{build_boa, pad_rows, BoaArray};
    use crate::builtin::{example_code_5_2_4, example_code_7_3_2, example_cycle_z2_3};
    use crate::cayley::{eulerian_cycle, standard_generators};
    use crate::codes::{hamming_dual_code, LinearCode};
    use crate::gf::field_from_order;
    use crate::linalg::{frobenius_distance, ONE};
    use crate::pauli::{build_representation, RepMode, RepSpec};
    use crate::schedule::schedule_from_boa;

    fn example1_schedule() -> ControlSchedule {
        let arr = build_boa(&example_code_7_3_2(), &example_cycle_z2_3()).unwrap();
        schedule_from_boa(
            &arr,
            RepSpec {
                d: 2,
                mode: RepMode::XOnly,
            },
            1.0,
        )
        .unwrap()
    }

    fn example2_schedule() -> ControlSchedule {
        let set = standard_generators(4, 2).unwrap();
        let cycle = eulerian_cycle(4, 2, &set).unwrap();
        let arr = build_boa(&example_code_5_2_4(), &cycle).unwrap();
        schedule_from_boa(
            &arr,
            RepSpec {
                d: 2,
                mode: RepMode::Weyl,
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn random_hamiltonian_has_expected_shape() {
        let h = random_local_hamiltonian(2, 2, 2, 7, false).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].support(), &[0, 1]);
        let m = h.terms()[0].matrix();
        assert_eq!(m.nrows(), 4);
        assert!(is_hermitian(m, 1e-12));
        assert!(m.trace().norm() < 1e-12);

        let h = random_local_hamiltonian(7, 2, 2, 7, false).unwrap();
        assert_eq!(h.terms().len(), 21);

        let h = random_local_hamiltonian(50, 2, 2, 7, false).unwrap();
        assert_eq!(h.terms().len(), MAX_RANDOM_TERMS);
        let supports: BTreeSet<Vec<usize>> =
            h.terms().iter().map(|t| t.support().to_vec()).collect();
        assert_eq!(supports.len(), MAX_RANDOM_TERMS);
    }

    #[test]
    fn random_hamiltonian_is_seed_deterministic() {
        let a = random_local_hamiltonian(5, 2, 2, 42, false).unwrap();
        let b = random_local_hamiltonian(5, 2, 2, 42, false).unwrap();
        assert_eq!(a, b);
        let c = random_local_hamiltonian(5, 2, 2, 43, false).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_hamiltonian_budget_is_enforced() {
        match random_local_hamiltonian(6, 4, 5, 1, false) {
            Err(Error::BudgetExceeded(_)) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_terms_commute_with_clock_operators() {
        let h = random_local_hamiltonian(5, 2, 2, 11, true).unwrap();
        for term in h.terms() {
            let m = term.matrix();
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    if r != c {
                        assert_eq!(m[(r, c)], ZERO);
                    } else {
                        assert_eq!(m[(r, c)].im, 0.0);
                    }
                }
            }
            // Commutes with Z on each qudit of its support (diagonal basis).
            let z = CMatrix::from_fn(2, 2, |r, c| {
                if r == c {
                    C64::new(if r == 0 { 1.0 } else { -1.0 }, 0.0)
                } else {
                    ZERO
                }
            });
            let id = CMatrix::identity(2, 2);
            for pos in 0..term.support().len() {
                let mats: Vec<CMatrix> = (0..term.support().len())
                    .map(|i| if i == pos { z.clone() } else { id.clone() })
                    .collect();
                let zfull = kron_list(&mats);
                assert!(frobenius_distance(&(m * &zfull), &(&zfull * m)) < 1e-12);
            }
        }
    }

    #[test]
    fn assembly_embeds_terms_at_the_right_positions() {
        // Single term Z⊗Z on qudits {0,2} of a 3-qubit register.
        let z = CMatrix::from_fn(2, 2, |r, c| {
            if r == c {
                C64::new(if r == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                ZERO
            }
        });
        let zz = kron_list(&[z.clone(), z.clone()]);
        let h = LocalHamiltonian::new(3, 2, vec![(vec![0, 2], zz)]).unwrap();
        let full = h.assemble().unwrap();
        let id = CMatrix::identity(2, 2);
        let expected = kron_list(&[z.clone(), id, z.clone()]);
        assert!(frobenius_distance(&full, &expected) < 1e-14);
    }

    #[test]
    fn generator_of_the_zero_label_is_zero() {
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        let g = control_generator(&rep, &[0, 0], 1.0).unwrap();
        for i in 0..2 {
            assert!(g.qudit_generator(i).norm() == 0.0);
        }
    }

    #[test]
    fn shift_generator_at_quarter_period_is_exactly_x() {
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        let g = control_generator(&rep, &[1], std::f64::consts::FRAC_PI_2).unwrap();
        let x = CMatrix::from_fn(2, 2, |r, c| if r != c { ONE } else { ZERO });
        assert!(frobenius_distance(&g.qudit_generator(0), &x) < 1e-12);
    }

    #[test]
    fn generators_reexponentiate_to_their_unitaries() {
        use crate::linalg::phase_free_distance;
        for (d, mode) in [
            (2u64, RepMode::Weyl),
            (3, RepMode::Weyl),
            (4, RepMode::Weyl),
            (2, RepMode::XOnly),
            (3, RepMode::XOnly),
        ] {
            let rep = build_representation(d, mode).unwrap();
            for delta in [1.0, std::f64::consts::FRAC_PI_2] {
                for b in 0..rep.q() {
                    let g = control_generator(&rep, &[b], delta).unwrap();
                    let u = g.qudit_propagator(0, delta);
                    let target = crate::pauli::unitary_for(&rep, b).unwrap();
                    assert!(
                        phase_free_distance(&u, target) < 1e-10,
                        "re-exponentiation failed for d={d} mode={mode} b={b} delta={delta}"
                    );
                }
            }
        }
    }

    #[test]
    fn slot_integral_preserves_trace_and_hermiticity() {
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let eig = QuditEigen::new(&rep, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for labels in [vec![1u32], vec![3], vec![1, 2], vec![3, 3]] {
            let dim = 2usize.pow(labels.len() as u32);
            let a = CMatrix::from_fn(dim, dim, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let h = (&a + a.adjoint()).map(|z| z * 0.5);
            let (v, lam) = product_basis(&eig, &labels, false);
            let out = slot_integral_exact(&v, &lam, 1.0, &h);
            assert!((out.trace() - h.trace()).norm() < 1e-12 * (1.0 + h.norm()));
            assert!(is_hermitian(&out, 1e-12 * (1.0 + h.norm())));
        }
    }

    #[test]
    fn example1_decouples_diagonal_hamiltonians() {
        let s = example1_schedule();
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        let h = random_local_hamiltonian(7, 2, 2, 1, true).unwrap();
        let report = decoupling_residual(&h, &s, &rep, AverageMode::Full, None).unwrap();
        assert!(
            report.residual <= 1e-10,
            "residual {} too large",
            report.residual
        );
        assert!(report.triangle_slack >= -1e-12);
    }

    #[test]
    fn example2_decouples_generic_hamiltonians() {
        let s = example2_schedule();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(5, 2, 2, 1, false).unwrap();
        let report = decoupling_residual(&h, &s, &rep, AverageMode::Full, None).unwrap();
        assert!(
            report.residual <= 1e-10,
            "residual {} too large",
            report.residual
        );
    }

    #[test]
    fn per_term_mode_matches_full_mode() {
        let s = example2_schedule();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(5, 2, 2, 3, false).unwrap();
        let full = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        let per_term = average_hamiltonian(&h, &s, &rep, AverageMode::PerTerm).unwrap();
        assert!(frobenius_distance(&full, &per_term) < 1e-10);
    }

    #[test]
    fn averaging_is_linear() {
        let s = example2_schedule();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h1 = random_local_hamiltonian(5, 2, 2, 21, false).unwrap();
        let h2 = random_local_hamiltonian(5, 2, 2, 22, false).unwrap();
        let alpha = 0.37;
        // Termwise combination αH₁ + H₂ (same subsets, same order).
        let combined: Vec<(Vec<usize>, CMatrix)> = h1
            .terms()
            .iter()
            .zip(h2.terms().iter())
            .map(|(a, b)| {
                assert_eq!(a.support(), b.support());
                (
                    a.support().to_vec(),
                    a.matrix().map(|z| z * alpha) + b.matrix(),
                )
            })
            .collect();
        let hc = LocalHamiltonian::new(5, 2, combined).unwrap();
        let avg1 = average_hamiltonian(&h1, &s, &rep, AverageMode::Full).unwrap();
        let avg2 = average_hamiltonian(&h2, &s, &rep, AverageMode::Full).unwrap();
        let avgc = average_hamiltonian(&hc, &s, &rep, AverageMode::Full).unwrap();
        let expected = avg1.map(|z| z * alpha) + avg2;
        let scale = 1.0 + avgc.norm().max(expected.norm());
        assert!(frobenius_distance(&avgc, &expected) < 1e-12 * scale);
    }

    #[test]
    fn averages_are_hermitian() {
        let s = example2_schedule();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(5, 2, 2, 8, false).unwrap();
        let avg = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        assert!(is_hermitian(&avg, 1e-12 * (1.0 + avg.norm())));
    }

    #[test]
    fn quadrature_converges_to_the_analytic_integral() {
        let s = example2_schedule();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(5, 2, 2, 5, false).unwrap();
        let exact = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        let q16 = average_hamiltonian_quadrature(&h, &s, &rep, AverageMode::Full, 16).unwrap();
        let err16 = frobenius_distance(&exact, &q16);
        assert!(err16 < 1e-9, "16-node quadrature error {err16}");
    }

    #[test]
    fn quadrature_error_is_visible_off_the_balance_manifold() {
        // On a balanced schedule the per-slot quadrature errors cancel in
        // the group average no matter how crude the rule, so the comparison
        // must run on an unbalanced schedule (one column deleted), where the
        // averages are nonzero and the integrator quality actually shows.
        let arr = build_boa(&example_code_7_3_2(), &example_cycle_z2_3()).unwrap();
        let rows: Vec<Vec<u32>> = (0..arr.n())
            .map(|i| arr.row(i)[..arr.cols() - 1].to_vec())
            .collect();
        let broken = BoaArray::from_rows(2, rows, 0, "unbalanced").unwrap();
        let s = schedule_from_boa(
            &broken,
            RepSpec {
                d: 2,
                mode: RepMode::XOnly,
            },
            1.0,
        )
        .unwrap();
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        let h = random_local_hamiltonian(7, 2, 2, 5, false).unwrap();
        let exact = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        let q16 = average_hamiltonian_quadrature(&h, &s, &rep, AverageMode::Full, 16).unwrap();
        let q1 = average_hamiltonian_quadrature(&h, &s, &rep, AverageMode::Full, 1).unwrap();
        let err16 = frobenius_distance(&exact, &q16);
        let err1 = frobenius_distance(&exact, &q1);
        assert!(err16 < 1e-9, "16-node quadrature error {err16}");
        assert!(
            err1 > 100.0 * err16.max(1e-15) && err1 > 1e-6,
            "single-node quadrature should be visibly worse (got {err1} vs {err16})"
        );
    }

    #[test]
    fn constant_slots_are_exact_at_any_node_count() {
        // A single zero-transition slot: the integrand is constant, so even
        // one quadrature node is exact and the "average" is H itself.
        let arr = BoaArray::from_rows(2, vec![vec![0], vec![0]], 0, "free evolution").unwrap();
        let s = schedule_from_boa(
            &arr,
            RepSpec {
                d: 2,
                mode: RepMode::XOnly,
            },
            1.0,
        )
        .unwrap();
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        let h = random_local_hamiltonian(2, 2, 2, 4, true).unwrap();
        let exact = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        let q1 = average_hamiltonian_quadrature(&h, &s, &rep, AverageMode::Full, 1).unwrap();
        assert!(frobenius_distance(&exact, &q1) < 1e-13);
        let full = h.assemble().unwrap();
        assert!(frobenius_distance(&exact, &full) < 1e-13);

        let report = decoupling_residual(&h, &s, &rep, AverageMode::Full, None).unwrap();
        assert!((report.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corrupted_schedule_fails_to_decouple() {
        // Delete the last column of the reference array and re-derive the
        // transitions: the walk is no longer balanced, so a residual floor
        // appears (measured empirically, far above the success threshold).
        let arr = build_boa(&example_code_7_3_2(), &example_cycle_z2_3()).unwrap();
        let rows: Vec<Vec<u32>> = (0..arr.n())
            .map(|i| arr.row(i)[..arr.cols() - 1].to_vec())
            .collect();
        let broken = BoaArray::from_rows(2, rows, 0, "negative control").unwrap();
        let s = schedule_from_boa(
            &broken,
            RepSpec {
                d: 2,
                mode: RepMode::XOnly,
            },
            1.0,
        )
        .unwrap();
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        for seed in [1u64, 2, 3] {
            let h = random_local_hamiltonian(7, 2, 2, seed, true).unwrap();
            let report = decoupling_residual(&h, &s, &rep, AverageMode::Full, None).unwrap();
            assert!(
                report.residual >= 1e-2,
                "negative control too small for seed {seed}: {}",
                report.residual
            );
        }
    }

    #[test]
    fn schedule_evolution_matches_the_group_theoretic_average() {
        // Strength-2 array covering both qudits of a 2-qudit register:
        // slot-by-slot Protocol-2 evolution must equal the closed form
        // Π_G(Σ_s (μ_s/λ)F_s(h)) of the whole-group protocol.
        let field = field_from_order(4).unwrap();
        let code = LinearCode::new(field, &[vec![1, 0], vec![0, 1]], "identity-2").unwrap();
        let set = standard_generators(4, 2).unwrap();
        let cycle = eulerian_cycle(4, 2, &set).unwrap();
        let arr = build_boa(&code, &cycle).unwrap();
        assert_eq!(arr.strength(), 2);
        let s = schedule_from_boa(
            &arr,
            RepSpec {
                d: 2,
                mode: RepMode::Weyl,
            },
            1.0,
        )
        .unwrap();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(2, 2, 2, 17, false).unwrap();
        let protocol2 = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        let protocol1 =
            balanced_cycle_average(&rep, &cycle, h.terms()[0].matrix(), 1.0).unwrap();
        assert!(
            frobenius_distance(&protocol2, &protocol1) < 1e-12,
            "protocols disagree: {}",
            frobenius_distance(&protocol2, &protocol1)
        );
        // Both should be (numerically) zero for traceless input.
        assert!(spectral_norm_hermitian(&protocol2) < 1e-12);
    }

    #[test]
    fn symmetrized_schedules_preserve_the_average_exactly() {
        let s = example2_schedule();
        let sym = s.symmetrize().unwrap();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(5, 2, 2, 9, false).unwrap();
        let base = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        let doubled = average_hamiltonian(&h, &sym, &rep, AverageMode::Full).unwrap();
        let scale = 1.0 + base.norm();
        assert!(
            frobenius_distance(&base, &doubled) < 1e-12 * scale,
            "symmetrization changed the first-order average: {}",
            frobenius_distance(&base, &doubled)
        );
        let report = decoupling_residual(&h, &sym, &rep, AverageMode::Full, None).unwrap();
        assert!(report.residual <= 1e-10);
    }

    #[test]
    fn qutrit_pipeline_decouples_and_modes_agree() {
        let code = hamming_dual_code(9, 10).unwrap();
        let set = standard_generators(9, 2).unwrap();
        let cycle = eulerian_cycle(9, 2, &set).unwrap();
        let arr = build_boa(&code, &cycle).unwrap();
        let small = pad_rows(&arr, 4).unwrap();
        let s = schedule_from_boa(
            &small,
            RepSpec {
                d: 3,
                mode: RepMode::Weyl,
            },
            1.0,
        )
        .unwrap();
        assert_eq!(s.slots(), 324);
        let rep = build_representation(3, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(4, 3, 2, 2, false).unwrap();
        let report = decoupling_residual(&h, &s, &rep, AverageMode::PerTerm, None).unwrap();
        assert!(report.residual <= 1e-10, "residual {}", report.residual);
        let full = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        let per_term = average_hamiltonian(&h, &s, &rep, AverageMode::PerTerm).unwrap();
        assert!(frobenius_distance(&full, &per_term) < 1e-10);
    }

    #[test]
    fn full_mode_dimension_budget_is_enforced() {
        let arr = build_boa(&example_code_5_2_4(), {
            let set = standard_generators(4, 2).unwrap();
            &eulerian_cycle(4, 2, &set).unwrap()
        })
        .unwrap();
        let wide = pad_rows(&arr, 5).unwrap();
        // 15 virtual qudits: widen by re-adding rows via a fresh array.
        let mut rows: Vec<Vec<u32>> = (0..5).map(|i| wide.row(i).to_vec()).collect();
        for _ in 5..15 {
            rows.push(vec![0; wide.cols()]);
        }
        let big = BoaArray::from_rows(4, rows, 0, "padded").unwrap();
        let s = schedule_from_boa(
            &big,
            RepSpec {
                d: 2,
                mode: RepMode::Weyl,
            },
            1.0,
        )
        .unwrap();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let h = random_local_hamiltonian(15, 2, 2, 1, false).unwrap();
        match average_hamiltonian(&h, &s, &rep, AverageMode::Full) {
            Err(Error::BudgetExceeded(_)) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
        // The per-term core itself still works at this width. Only terms
        // fully supported on the five real array rows decouple; the padded
        // all-zero rows leave their qudits untouched (free evolution).
        let per_term = per_term_averages(&h, &s, &rep).unwrap();
        assert_eq!(per_term.len(), h.terms().len());
        let mut decoupled = 0usize;
        for (term, avg) in h.terms().iter().zip(per_term.iter()) {
            if term.support().iter().all(|&i| i < 5) {
                assert!(spectral_norm_hermitian(avg) < 1e-10);
                decoupled += 1;
            }
            assert!(is_hermitian(avg, 1e-12 * (1.0 + avg.norm())));
        }
        assert!(decoupled > 0, "fixture should hit the covered rows");
    }

    #[test]
    fn zero_hamiltonian_averages_to_zero() {
        let s = example2_schedule();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let zero = CMatrix::zeros(4, 4);
        let h = LocalHamiltonian::new(5, 2, vec![(vec![0, 1], zero)]).unwrap();
        let avg = average_hamiltonian(&h, &s, &rep, AverageMode::Full).unwrap();
        assert!(avg.norm() == 0.0);
        let report = decoupling_residual(&h, &s, &rep, AverageMode::Full, None).unwrap();
        assert_eq!(report.residual, 0.0);
    }

    #[test]
    fn hamiltonian_validation_rejects_bad_terms() {
        // Non-Hermitian.
        let bad = CMatrix::from_fn(2, 2, |r, c| {
            if r == 0 && c == 1 {
                C64::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        assert!(LocalHamiltonian::new(2, 2, vec![(vec![0], bad)]).is_err());
        // Non-traceless.
        let id = CMatrix::identity(2, 2);
        assert!(LocalHamiltonian::new(2, 2, vec![(vec![0], id)]).is_err());
        // Support out of range.
        let z = CMatrix::from_fn(2, 2, |r, c| {
            if r == c {
                C64::new(if r == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                ZERO
            }
        });
        assert!(LocalHamiltonian::new(2, 2, vec![(vec![5], z.clone())]).is_err());
        // Duplicate support entry.
        assert!(LocalHamiltonian::new(2, 2, vec![(vec![0, 0], z)]).is_err());
    }

    #[test]
    fn incompatible_inputs_are_rejected() {
        let s = example2_schedule();
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        // Wrong qudit count.
        let h = random_local_hamiltonian(4, 2, 2, 1, false).unwrap();
        assert!(average_hamiltonian(&h, &s, &rep, AverageMode::Full).is_err());
        // Wrong representation mode for the schedule.
        let h = random_local_hamiltonian(5, 2, 2, 1, false).unwrap();
        let xrep = build_representation(2, RepMode::XOnly).unwrap();
        assert!(average_hamiltonian(&h, &s, &xrep, AverageMode::Full).is_err());
    }
}
