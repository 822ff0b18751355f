//! Projective unitary representations of the label field on a single qudit,
//! tensor lifts to registers, and the exact group-averaging (twirling) map.
//!
//! Two modes are provided:
//!
//! * **Weyl** — the irreducible projective representation of the additive
//!   group GF(d²) on a d-dimensional qudit. Writing d = p^e, a label's 2e
//!   GF(p) coordinates split into e X-exponents (first half) and e
//!   Z-exponents (second half); the unitary is
//!   `X̃^{a_1}Z̃^{b_1} ⊗ … ⊗ X̃^{a_e}Z̃^{b_e}` built from the p-dimensional
//!   cyclic shift X̃ and the clock matrix Z̃ = diag(ω^j), ω = e^{2πi/p}.
//!   For d = 2 this is exactly the Pauli basis {I, X, Z, XZ ∝ Y}.
//! * **XOnly** — the reducible shift-only representation a ↦ X̃^a of GF(d)
//!   itself (d ∈ {2, 3}), useful when the Hamiltonian is promised diagonal.
//!
//! Averaging a matrix over all tensor unitaries of the Weyl mode projects
//! onto the scalars (Schur's lemma), which is what makes the decoupling
//! schemes built on these labels work.

use serde::{Deserialize, Serialize};

use crate::gf::{field_from_order, FiniteField};
use crate::linalg::{kron_list, CMatrix, C64, ONE, ZERO};
use crate::parallel;
use crate::{Error, Result};

/// Largest single-qudit dimension accepted by [`build_representation`].
pub const MAX_QUDIT_DIM: u64 = 16;

/// Largest register dimension d^r a tensor unitary may reach.
pub const TENSOR_DIM_BUDGET: u64 = 1 << 14;

/// Largest label-group size q^r that [`group_average`] will enumerate.
pub const GROUP_ENUM_BUDGET: u64 = 1 << 20;

/// Chunk count for the parallel group average. Fixed so that the fold order
/// (and hence the floating-point result) never depends on the thread count.
const AVG_CHUNKS: usize = 256;

/// Which single-qudit representation the labels act through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepMode {
    /// Irreducible Weyl–Heisenberg representation of GF(d²).
    #[serde(rename = "weyl")]
    Weyl,
    /// Reducible shift-only representation of GF(d), d prime (2 or 3).
    #[serde(rename = "x_only")]
    XOnly,
}

impl std::fmt::Display for RepMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepMode::Weyl => write!(f, "weyl"),
            RepMode::XOnly => write!(f, "x_only"),
        }
    }
}

impl std::str::FromStr for RepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weyl" => Ok(RepMode::Weyl),
            "x_only" => Ok(RepMode::XOnly),
            other => Err(Error::Parse(format!(
                "unknown representation mode {other:?} (expected \"weyl\" or \"x_only\")"
            ))),
        }
    }
}

/// A (d, mode) pair: enough to rebuild a [`Representation`], and what control
/// schedules embed so that files stay self-describing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepSpec {
    pub d: u32,
    pub mode: RepMode,
}

impl RepSpec {
    pub fn build(&self) -> Result<Representation> {
        build_representation(self.d as u64, self.mode)
    }

    /// Order of the label field this spec acts for.
    pub fn q(&self) -> u64 {
        match self.mode {
            RepMode::Weyl => (self.d as u64) * (self.d as u64),
            RepMode::XOnly => self.d as u64,
        }
    }
}

/// One tensor factor of the single-qudit unitary: which GF(p) coordinates of
/// a label supply this factor's X and Z exponents (`z_coord` is `None` in
/// shift-only mode, which uses no clock matrices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisFactor {
    pub x_coord: usize,
    pub z_coord: Option<usize>,
}

/// A projective unitary representation ρ: GF(q) → U(d), stored as a lookup
/// table over the packed label indices. Immutable after construction; all
/// operations on it are pure.
#[derive(Debug, Clone)]
pub struct Representation {
    d: u32,
    mode: RepMode,
    field: FiniteField,
    table: Vec<CMatrix>,
    basis: Vec<BasisFactor>,
}

impl Representation {
    /// Qudit dimension d.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Label-field order q (d² for Weyl mode, d for shift-only mode).
    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn mode(&self) -> RepMode {
        self.mode
    }

    pub fn spec(&self) -> RepSpec {
        RepSpec {
            d: self.d,
            mode: self.mode,
        }
    }

    /// The label field GF(q).
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    /// How label coordinates map onto per-factor (X, Z) exponents.
    pub fn basis_map(&self) -> &[BasisFactor] {
        &self.basis
    }
}

/// ω^m for ω = e^{2πi/p}, with the exactly-representable cases (±1) emitted
/// without trigonometry so real matrices stay exactly real.
fn root_of_unity(p: u32, m: u32) -> C64 {
    let m = m % p;
    if m == 0 {
        return ONE;
    }
    if 2 * m == p {
        return C64::new(-1.0, 0.0);
    }
    let angle = 2.0 * std::f64::consts::PI * (m as f64) / (p as f64);
    C64::new(angle.cos(), angle.sin())
}

/// The p×p matrix X̃^a Z̃^b, where X̃ is the cyclic shift `X̃|j⟩ = |j−1 mod p⟩`
/// and Z̃ = diag(ω^j). With this orientation X̃Z̃ = ω Z̃X̃.
fn weyl_factor(p: u32, a: u32, b: u32) -> CMatrix {
    let pd = p as usize;
    CMatrix::from_fn(pd, pd, |r, c| {
        if r == ((c as u32 + p - (a % p)) % p) as usize {
            root_of_unity(p, ((c as u32) * (b % p)) % p)
        } else {
            ZERO
        }
    })
}

/// Build the lookup table ρ: GF(q) → U(d) for a qudit of dimension d.
///
/// Weyl mode accepts any prime power d ≤ 16 and uses q = d²; shift-only mode
/// accepts only the primes d = 2, 3 and uses q = d.
pub fn build_representation(d: u64, mode: RepMode) -> Result<Representation> {
    if d < 2 || d > MAX_QUDIT_DIM {
        return Err(Error::Unsupported(format!(
            "qudit dimension {d} out of range (2..={MAX_QUDIT_DIM})"
        )));
    }
    match mode {
        RepMode::Weyl => {
            // field_from_order rejects non-prime-power d² (d² is a prime
            // power exactly when d is).
            let field = field_from_order(d * d)?;
            let p = field.characteristic();
            let two_e = field.extension_degree() as usize;
            let e = two_e / 2;
            let mut table = Vec::with_capacity((d * d) as usize);
            for g in field.elements() {
                let coords = field.coords(g);
                let factors: Vec<CMatrix> = (0..e)
                    .map(|i| weyl_factor(p, coords[i], coords[e + i]))
                    .collect();
                table.push(kron_list(&factors));
            }
            let basis = (0..e)
                .map(|i| BasisFactor {
                    x_coord: i,
                    z_coord: Some(e + i),
                })
                .collect();
            Ok(Representation {
                d: d as u32,
                mode,
                field,
                table,
                basis,
            })
        }
        RepMode::XOnly => {
            if d != 2 && d != 3 {
                return Err(Error::Unsupported(format!(
                    "shift-only mode supports qudit dimension 2 or 3, got {d}"
                )));
            }
            let field = field_from_order(d)?;
            let p = field.characteristic();
            let table = (0..d as u32).map(|a| weyl_factor(p, a, 0)).collect();
            let basis = vec![BasisFactor {
                x_coord: 0,
                z_coord: None,
            }];
            Ok(Representation {
                d: d as u32,
                mode,
                field,
                table,
                basis,
            })
        }
    }
}

/// The stored d×d unitary for one label.
pub fn unitary_for(rep: &Representation, g: u32) -> Result<&CMatrix> {
    if g >= rep.q() {
        return Err(Error::FieldMismatch {
            expected: rep.q(),
            got: g,
        });
    }
    Ok(&rep.table[g as usize])
}

/// `U_{g_1} ⊗ … ⊗ U_{g_r}` for a column of labels, one per qudit, in row
/// order. The register dimension d^r must stay within [`TENSOR_DIM_BUDGET`].
pub fn tensor_unitary(rep: &Representation, labels: &[u32]) -> Result<CMatrix> {
    if labels.is_empty() {
        return Err(Error::DimensionMismatch(
            "tensor unitary needs at least one label".into(),
        ));
    }
    match (rep.d as u64).checked_pow(labels.len() as u32) {
        Some(dim) if dim <= TENSOR_DIM_BUDGET => {}
        _ => {
            return Err(Error::BudgetExceeded(format!(
                "register dimension {}^{} exceeds {TENSOR_DIM_BUDGET}",
                rep.d,
                labels.len()
            )))
        }
    }
    let factors: Vec<CMatrix> = labels
        .iter()
        .map(|&g| unitary_for(rep, g).cloned())
        .collect::<Result<_>>()?;
    Ok(kron_list(&factors))
}

/// Exact average `(1/|G|) Σ_{g ∈ GF(q)^r} U_g† A U_g` over the whole label
/// group. In Weyl mode this is the projection onto scalars:
/// `(tr A / d^r)·I`.
pub fn group_average(rep: &Representation, r: usize, a: &CMatrix) -> Result<CMatrix> {
    if r == 0 {
        return Err(Error::DimensionMismatch(
            "group average needs arity at least one".into(),
        ));
    }
    let q = rep.q() as u64;
    let total = q
        .checked_pow(r as u32)
        .filter(|&t| t <= GROUP_ENUM_BUDGET)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "group enumeration {q}^{r} exceeds {GROUP_ENUM_BUDGET} terms"
            ))
        })?;
    let dim = (rep.d as u64).pow(r as u32) as usize;
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}×{}, expected {dim}×{dim}",
            a.nrows(),
            a.ncols()
        )));
    }

    let ranges = parallel::chunk_ranges(total, AVG_CHUNKS);
    let partials = parallel::map_indexed(ranges.len(), |c| {
        let mut acc = CMatrix::zeros(dim, dim);
        let mut labels = vec![0u32; r];
        for g_index in ranges[c].clone() {
            // Little-endian base-q digits of the packed group index.
            let mut rest = g_index;
            for slot in labels.iter_mut() {
                *slot = (rest % q) as u32;
                rest /= q;
            }
            let u = tensor_unitary(rep, &labels).expect("labels in range by construction");
            acc += u.adjoint() * a * u;
        }
        acc
    });
    let mut sum = CMatrix::zeros(dim, dim);
    for p in partials {
        sum += p;
    }
    Ok(sum.map(|z| z / (total as f64)))
}

/// Debug/export serialization of a matrix as nested JSON arrays of
/// `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.nrows())
            .map(|r| {
                serde_json::Value::Array(
                    (0..m.ncols())
                        .map(|c| serde_json::json!([m[(r, c)].re, m[(r, c)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, is_unitary, phase_free_distance};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat2(rows: [[C64; 2]; 2]) -> CMatrix {
        CMatrix::from_fn(2, 2, |r, c| rows[r][c])
    }

    fn pauli_x() -> CMatrix {
        mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    fn pauli_z() -> CMatrix {
        mat2([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]])
    }

    fn pauli_y() -> CMatrix {
        mat2([
            [ZERO, C64::new(0.0, -1.0)],
            [C64::new(0.0, 1.0), ZERO],
        ])
    }

    fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
        CMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn qubit_weyl_table_is_the_pauli_basis() {
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        assert_eq!(rep.q(), 4);
        let id = CMatrix::identity(2, 2);
        assert!(frobenius_distance(unitary_for(&rep, 0).unwrap(), &id) == 0.0);
        assert!(frobenius_distance(unitary_for(&rep, 1).unwrap(), &pauli_x()) == 0.0);
        assert!(frobenius_distance(unitary_for(&rep, 2).unwrap(), &pauli_z()) == 0.0);
        // Index 3 is 1+α ↦ XZ, which equals Y up to a phase.
        let xz = pauli_x() * pauli_z();
        assert!(frobenius_distance(unitary_for(&rep, 3).unwrap(), &xz) == 0.0);
        assert!(phase_free_distance(unitary_for(&rep, 3).unwrap(), &pauli_y()) < 1e-12);
    }

    #[test]
    fn qubit_shift_only_table_is_identity_and_x() {
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        assert_eq!(rep.q(), 2);
        assert!(frobenius_distance(unitary_for(&rep, 0).unwrap(), &CMatrix::identity(2, 2)) == 0.0);
        assert!(frobenius_distance(unitary_for(&rep, 1).unwrap(), &pauli_x()) == 0.0);
    }

    #[test]
    fn qutrit_shift_and_clock_satisfy_the_weyl_commutation_rule() {
        let rep = build_representation(3, RepMode::Weyl).unwrap();
        assert_eq!(rep.q(), 9);
        // Little-endian GF(9) coordinates: index 1 = (1,0) is the pure shift,
        // index 3 = (0,1) is the pure clock.
        let x = unitary_for(&rep, 1).unwrap();
        let z = unitary_for(&rep, 3).unwrap();
        let omega = root_of_unity(3, 1);
        let lhs = x * z;
        let rhs = (z * x).map(|v| v * omega);
        assert!(frobenius_distance(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn all_table_entries_are_unitary() {
        for (d, mode) in [
            (2, RepMode::Weyl),
            (3, RepMode::Weyl),
            (4, RepMode::Weyl),
            (8, RepMode::Weyl),
            (9, RepMode::Weyl),
            (16, RepMode::Weyl),
            (2, RepMode::XOnly),
            (3, RepMode::XOnly),
        ] {
            let rep = build_representation(d, mode).unwrap();
            for g in 0..rep.q() {
                assert!(
                    is_unitary(unitary_for(&rep, g).unwrap(), 1e-12),
                    "non-unitary entry for d={d} mode={mode} g={g}"
                );
            }
        }
    }

    #[test]
    fn representation_is_projective_to_tolerance() {
        for (d, mode) in [
            (2, RepMode::Weyl),
            (3, RepMode::Weyl),
            (4, RepMode::Weyl),
            (2, RepMode::XOnly),
            (3, RepMode::XOnly),
        ] {
            let rep = build_representation(d, mode).unwrap();
            let field = rep.field().clone();
            let mut worst = 0.0f64;
            for g in 0..rep.q() {
                for h in 0..rep.q() {
                    let sum = field.add_idx(g, h);
                    let product = unitary_for(&rep, g).unwrap() * unitary_for(&rep, h).unwrap();
                    let dist = phase_free_distance(unitary_for(&rep, sum).unwrap(), &product);
                    worst = worst.max(dist);
                }
            }
            assert!(worst < 1e-12, "projectivity violated for d={d} mode={mode}: {worst}");
        }
    }

    #[test]
    fn weyl_mode_is_faithful_up_to_phase() {
        for d in [2u64, 3, 4] {
            let rep = build_representation(d, RepMode::Weyl).unwrap();
            for g in 0..rep.q() {
                for h in (g + 1)..rep.q() {
                    let dist = phase_free_distance(
                        unitary_for(&rep, g).unwrap(),
                        unitary_for(&rep, h).unwrap(),
                    );
                    assert!(
                        dist > 0.1,
                        "labels {g} and {h} coincide up to phase for d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn weyl_group_average_projects_onto_scalars() {
        // Schur's lemma: averaging over the whole label group leaves
        // (tr A / D)·I, so traceless matrices are annihilated.
        let mut checked = 0;
        for d in [2u64, 3] {
            for ell in [1usize, 2] {
                let rep = build_representation(d, RepMode::Weyl).unwrap();
                let dim = (d as usize).pow(ell as u32);
                let mut rng = ChaCha8Rng::seed_from_u64(1000 * d + ell as u64);
                for _ in 0..25 {
                    let a = random_matrix(&mut rng, dim);
                    let avg = group_average(&rep, ell, &a).unwrap();
                    let scalar = a.trace() / (dim as f64);
                    let expected = CMatrix::identity(dim, dim).map(|v| v * scalar);
                    let norm = a.norm();
                    assert!(
                        frobenius_distance(&avg, &expected) <= 1e-12 * norm.max(1.0),
                        "Schur projection failed for d={d} ell={ell}"
                    );
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 100);
    }

    #[test]
    fn shift_only_entries_are_real_commuting_permutations() {
        for d in [2u64, 3] {
            let rep = build_representation(d, RepMode::XOnly).unwrap();
            for g in 0..rep.q() {
                let u = unitary_for(&rep, g).unwrap();
                let mut row_sums = vec![0u32; d as usize];
                for r in 0..u.nrows() {
                    for c in 0..u.ncols() {
                        let v = u[(r, c)];
                        assert!(v.im == 0.0, "imaginary entry in shift-only unitary");
                        assert!(v.re == 0.0 || v.re == 1.0, "non-0/1 entry");
                        if v.re == 1.0 {
                            row_sums[r] += 1;
                        }
                    }
                }
                assert!(row_sums.iter().all(|&s| s == 1), "not a permutation matrix");
            }
            for g in 0..rep.q() {
                for h in 0..rep.q() {
                    let a = unitary_for(&rep, g).unwrap();
                    let b = unitary_for(&rep, h).unwrap();
                    assert!(frobenius_distance(&(a * b), &(b * a)) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn weyl_group_size_meets_the_dimension_lower_bound() {
        // A representation that averages everything to scalars on ℓ qudits
        // needs at least d^{2ℓ} labels; the Weyl mode meets that exactly.
        for d in [2u64, 3, 4, 8] {
            let rep = build_representation(d, RepMode::Weyl).unwrap();
            for ell in 1u32..=3 {
                assert_eq!((rep.q() as u64).pow(ell), d.pow(2 * ell));
            }
        }
    }

    #[test]
    fn tensor_of_zero_labels_is_the_identity() {
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let u = tensor_unitary(&rep, &[0, 0, 0]).unwrap();
        assert!(frobenius_distance(&u, &CMatrix::identity(8, 8)) == 0.0);
    }

    #[test]
    fn tensor_matches_explicit_kronecker_product() {
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let u = tensor_unitary(&rep, &[1, 2]).unwrap();
        let expected = kron_list(&[pauli_x(), pauli_z()]);
        assert!(frobenius_distance(&u, &expected) == 0.0);
    }

    #[test]
    fn transition_column_five_acts_as_x_on_qubits_2_3_6_7() {
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        let labels = [0u32, 1, 1, 0, 0, 1, 1];
        let u = tensor_unitary(&rep, &labels).unwrap();
        let id = CMatrix::identity(2, 2);
        let factors = [
            id.clone(),
            pauli_x(),
            pauli_x(),
            id.clone(),
            id.clone(),
            pauli_x(),
            pauli_x(),
        ];
        let expected = kron_list(&factors);
        assert!(frobenius_distance(&u, &expected) == 0.0);
    }

    #[test]
    fn tensor_budget_is_enforced() {
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let labels = vec![0u32; 15];
        match tensor_unitary(&rep, &labels) {
            Err(Error::BudgetExceeded(_)) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn group_average_budget_is_enforced() {
        let rep = build_representation(3, RepMode::XOnly).unwrap();
        let a = CMatrix::identity(1, 1);
        match group_average(&rep, 13, &a) {
            Err(Error::BudgetExceeded(_)) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn group_average_fixes_identity_and_shift_invariants() {
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        let id = CMatrix::identity(2, 2);
        let avg = group_average(&rep, 1, &id).unwrap();
        assert!(frobenius_distance(&avg, &id) < 1e-14);

        // In shift-only mode X commutes with every table entry, so the
        // average leaves it untouched: nothing decouples a diagonal-free X.
        let rep = build_representation(2, RepMode::XOnly).unwrap();
        let avg = group_average(&rep, 1, &pauli_x()).unwrap();
        assert!(frobenius_distance(&avg, &pauli_x()) < 1e-14);
    }

    #[test]
    fn labels_outside_the_field_are_rejected() {
        let rep = build_representation(2, RepMode::Weyl).unwrap();
        match unitary_for(&rep, 4) {
            Err(Error::FieldMismatch { expected: 4, got: 4 }) => {}
            other => panic!("expected field mismatch, got {other:?}"),
        }
    }

    #[test]
    fn shift_only_rejects_non_prime_dimensions() {
        for d in [4u64, 8, 9] {
            match build_representation(d, RepMode::XOnly) {
                Err(Error::Unsupported(_)) => {}
                other => panic!("expected unsupported error for d={d}, got {other:?}"),
            }
        }
    }

    #[test]
    fn prime_power_basis_splits_coordinates_between_x_and_z() {
        let rep = build_representation(4, RepMode::Weyl).unwrap();
        assert_eq!(rep.q(), 16);
        assert_eq!(
            rep.basis_map(),
            &[
                BasisFactor { x_coord: 0, z_coord: Some(2) },
                BasisFactor { x_coord: 1, z_coord: Some(3) },
            ]
        );
        let field = rep.field().clone();
        let id = CMatrix::identity(2, 2);

        let x_first = field.element_from_coords(&[1, 0, 0, 0]).unwrap();
        let expected = kron_list(&[pauli_x(), id.clone()]);
        assert!(frobenius_distance(unitary_for(&rep, x_first.index()).unwrap(), &expected) == 0.0);

        let z_first = field.element_from_coords(&[0, 0, 1, 0]).unwrap();
        let expected = kron_list(&[pauli_z(), id.clone()]);
        assert!(frobenius_distance(unitary_for(&rep, z_first.index()).unwrap(), &expected) == 0.0);

        let x_second = field.element_from_coords(&[0, 1, 0, 0]).unwrap();
        let expected = kron_list(&[id.clone(), pauli_x()]);
        assert!(frobenius_distance(unitary_for(&rep, x_second.index()).unwrap(), &expected) == 0.0);
    }

    #[test]
    fn matrix_json_round_trips_entries() {
        let v = matrix_json(&pauli_y());
        let expected = serde_json::json!([
            [[0.0, 0.0], [0.0, -1.0]],
            [[0.0, 1.0], [0.0, 0.0]],
        ]);
        assert_eq!(v, expected);
    }
}
