//! Executable bounded-strength control schedules.
//!
//! A schedule reads the columns `a_0..a_{N−1}` of a balanced-cycle orthogonal
//! array as the frame sequence of a piecewise control: during slot `j`
//! (j = 1..N) the control applies `u_{b_j}(δ) = exp(−i·h_{b_j}·δ)` where
//! `b_j = a_j − a_{j−1}` (with the wraparound `a_N = a_0 = 0`), so that at
//! slot boundaries the accumulated propagator is `U_{a_j}` up to phase.
//!
//! [`ControlSchedule::symmetrize`] produces the time-symmetric variant: the
//! column sequence `(a_0, …, a_{N−1}, 0, a_{N−1}, …, a_1)` — an exact
//! palindrome about the inserted midpoint — whose second half retraces the
//! first in reverse. The second-half slots are executed *time-reversed*
//! (negated generators; the simulator keys this off the `symmetrized` flag),
//! which realizes `U_c(t) = U_c(T_c − t)` exactly and keeps the first-order
//! average Hamiltonian identical to the unsymmetrized schedule's.

use serde::{Deserialize, Serialize};

use crate::boa::BoaArray;
use crate::gf::{field_from_order, FiniteField};
use crate::pauli::RepSpec;
use crate::{Error, Result};

/// A bounded-strength control schedule: frame columns, slot transitions and
/// the single-qudit representation the labels act through. Immutable value
/// type; every transform returns a new schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    q: u32,
    n: usize,
    delta: f64,
    rep: RepSpec,
    /// Frame columns a_0..a_{N−1}, each of length n.
    columns: Vec<Vec<u32>>,
    /// Slot transitions b_1..b_N with b_j = a_j − a_{j−1}, a_N = a_0 = 0.
    transitions: Vec<Vec<u32>>,
    symmetrized: bool,
}

/// On-disk JSON shape (field names are part of the file contract).
#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    q: u32,
    n: usize,
    #[serde(rename = "N")]
    slots: usize,
    delta: f64,
    rep: RepSpec,
    columns: Vec<Vec<u32>>,
    transitions: Vec<Vec<u32>>,
    symmetrized: bool,
}

/// Read a schedule off a verified array: columns become control frames and
/// adjacent-column differences become the slot transitions.
pub fn schedule_from_boa(arr: &BoaArray, rep: RepSpec, delta: f64) -> Result<ControlSchedule> {
    if rep.q() != arr.q() as u64 {
        return Err(Error::FieldMismatch {
            expected: arr.q(),
            got: rep.q() as u32,
        });
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::Unsupported(format!(
            "slot duration must be positive and finite, got {delta}"
        )));
    }
    let first = arr.column(0);
    if first.iter().any(|&v| v != 0) {
        return Err(Error::Unsupported(
            "schedule requires the array's first column to be the zero column".into(),
        ));
    }
    let field = field_from_order(arr.q() as u64)?;
    let columns: Vec<Vec<u32>> = (0..arr.cols()).map(|j| arr.column(j)).collect();
    let transitions = derive_transitions(&field, &columns);
    let schedule = ControlSchedule {
        q: arr.q(),
        n: arr.n(),
        delta,
        rep,
        columns,
        transitions,
        symmetrized: false,
    };
    schedule.validate()?;
    Ok(schedule)
}

/// b_j = a_j − a_{j−1} componentwise over GF(q), wrapping a_N = a_0.
fn derive_transitions(field: &FiniteField, columns: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n_slots = columns.len();
    (1..=n_slots)
        .map(|j| {
            let next = &columns[j % n_slots];
            let prev = &columns[j - 1];
            next.iter()
                .zip(prev.iter())
                .map(|(&a, &b)| field.sub_idx(a, b))
                .collect()
        })
        .collect()
}

impl ControlSchedule {
    /// Label-field order q.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of qudits (rows).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of slots N.
    pub fn slots(&self) -> usize {
        self.columns.len()
    }

    /// Slot duration Δ (dimensionless; total cycle length is N·Δ).
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rep(&self) -> RepSpec {
        self.rep
    }

    pub fn symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// Frame columns a_0..a_{N−1}.
    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    /// Slot transitions b_1..b_N; index `j` holds b_{j+1}.
    pub fn transitions(&self) -> &[Vec<u32>] {
        &self.transitions
    }

    /// Whether a slot (0-indexed) runs time-reversed: in a symmetrized
    /// schedule the second half retraces the first backwards, so those slots
    /// apply `exp(+i·h·δ)` for the forward label they undo.
    pub fn slot_reversed(&self, slot: usize) -> bool {
        self.symmetrized && slot >= self.slots() / 2
    }

    /// Check every structural invariant: zero start, prefix sums, closure,
    /// entry ranges, and the palindrome property when symmetrized.
    pub fn validate(&self) -> Result<()> {
        let n_slots = self.slots();
        if n_slots == 0 || self.n == 0 {
            return Err(Error::DimensionMismatch(
                "schedule needs at least one slot and one qudit".into(),
            ));
        }
        if self.transitions.len() != n_slots {
            return Err(Error::DimensionMismatch(format!(
                "{} transitions for {} columns",
                self.transitions.len(),
                n_slots
            )));
        }
        if self.rep.q() != self.q as u64 {
            return Err(Error::FieldMismatch {
                expected: self.q,
                got: self.rep.q() as u32,
            });
        }
        if !self.delta.is_finite() || self.delta <= 0.0 {
            return Err(Error::Unsupported(format!(
                "slot duration must be positive and finite, got {}",
                self.delta
            )));
        }
        let field = field_from_order(self.q as u64)?;
        for (name, list) in [("column", &self.columns), ("transition", &self.transitions)] {
            for (j, vec) in list.iter().enumerate() {
                if vec.len() != self.n {
                    return Err(Error::DimensionMismatch(format!(
                        "{name} {j} has {} entries, expected {}",
                        vec.len(),
                        self.n
                    )));
                }
                if let Some(&bad) = vec.iter().find(|&&v| v >= self.q) {
                    return Err(Error::FieldMismatch {
                        expected: self.q,
                        got: bad,
                    });
                }
            }
        }
        if self.columns[0].iter().any(|&v| v != 0) {
            return Err(Error::Unsupported(
                "schedule must start from the zero column".into(),
            ));
        }
        // Prefix-sum identity a_j = Σ_{i≤j} b_i (which also gives closure:
        // the full sum wraps back to a_0 = 0).
        let mut acc = vec![0u32; self.n];
        for j in 0..n_slots {
            for (slot, &b) in acc.iter_mut().zip(self.transitions[j].iter()) {
                *slot = field.add_idx(*slot, b);
            }
            let expected = &self.columns[(j + 1) % n_slots];
            if acc != *expected {
                return Err(Error::DimensionMismatch(format!(
                    "prefix sums of transitions diverge from the columns at slot {}",
                    j + 1
                )));
            }
        }
        if self.symmetrized {
            if n_slots % 2 != 0 {
                return Err(Error::DimensionMismatch(
                    "symmetrized schedule must have an even slot count".into(),
                ));
            }
            for j in 0..n_slots {
                let mirror = (n_slots - j) % n_slots;
                if self.columns[j] != self.columns[mirror] {
                    return Err(Error::DimensionMismatch(format!(
                        "symmetrized flag set but columns {j} and {mirror} differ"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Time-symmetric extension: revisit the columns in reverse after an
    /// inserted zero midpoint, giving the exact palindrome
    /// `a'_j = a'_{(2N−j) mod 2N}` of length 2N. The transitions come out as
    /// `(b_1, …, b_N, −b_N, …, −b_1)`; paired with time-reversed execution of
    /// the second half this realizes `U_c(t) = U_c(T_c − t)` and leaves the
    /// first-order average Hamiltonian exactly unchanged (each second-half
    /// slot integral replays a first-half one).
    pub fn symmetrize(&self) -> Result<ControlSchedule> {
        if self.symmetrized {
            return Err(Error::Unsupported(
                "schedule is already symmetrized".into(),
            ));
        }
        let n_slots = self.slots();
        let field = field_from_order(self.q as u64)?;
        let mut columns = self.columns.clone();
        columns.push(vec![0u32; self.n]);
        for j in (1..n_slots).rev() {
            columns.push(self.columns[j].clone());
        }
        let transitions = derive_transitions(&field, &columns);
        let out = ControlSchedule {
            q: self.q,
            n: self.n,
            delta: self.delta,
            rep: self.rep,
            columns,
            transitions,
            symmetrized: true,
        };
        out.validate()?;
        Ok(out)
    }

    /// Deterministic JSON serialization (schema: q, n, N, delta, rep,
    /// columns, transitions, symmetrized).
    pub fn to_json(&self) -> String {
        let doc = ScheduleJson {
            q: self.q,
            n: self.n,
            slots: self.slots(),
            delta: self.delta,
            rep: self.rep,
            columns: self.columns.clone(),
            transitions: self.transitions.clone(),
            symmetrized: self.symmetrized,
        };
        serde_json::to_string_pretty(&doc).expect("schedule serialization cannot fail")
    }

    /// Parse and fully validate a schedule from its JSON form.
    pub fn from_json(text: &str) -> Result<ControlSchedule> {
        let doc: ScheduleJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("schedule JSON: {e}")))?;
        if doc.slots != doc.columns.len() {
            return Err(Error::Parse(format!(
                "slot count {} disagrees with {} columns",
                doc.slots,
                doc.columns.len()
            )));
        }
        let schedule = ControlSchedule {
            q: doc.q,
            n: doc.n,
            delta: doc.delta,
            rep: doc.rep,
            columns: doc.columns,
            transitions: doc.transitions,
            symmetrized: doc.symmetrized,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Transition table as CSV: one row per qudit, one data column per slot
    /// (the same layout as the array CSV, but holding b_1..b_N).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self
                .transitions
                .iter()
                .map(|b| b[i].to_string())
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
