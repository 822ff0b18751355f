//! Balanced-cycle orthogonal arrays: n×N arrays over GF(q) whose columns
//! walk the codespace of a linear code along an Eulerian cycle of message
//! space. Strength-ℓ orthogonality makes every ℓ-row restriction hit each
//! ℓ-tuple equally often; the balanced-cycle property additionally makes
//! each restriction, *read in column order with wraparound*, a balanced
//! cycle on F_q^ℓ. The verifier here checks both exhaustively (budgeted)
//! rather than by sampling, because these properties are the whole point of
//! the artifact.

use itertools::Itertools;

use crate::cayley::{check_balanced, BalanceReport, Cycle};
use crate::codes::LinearCode;
use crate::parallel;
use crate::{Error, Result};

/// Budget on C(n,ℓ)·q^ℓ for exhaustive verification.
pub const VERIFY_BUDGET: u64 = 100_000_000;

/// An n×N array over GF(q) with strength metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoaArray {
    q: u32,
    n: usize,
    cols: usize,
    /// Row-major entries (element indices), matching the printed layout:
    /// rows are qudits, columns are time slots.
    entries: Vec<u32>,
    strength: usize,
    lambda: u64,
    provenance: String,
}

impl BoaArray {
    /// Assemble an array from row vectors with explicit claimed strength.
    /// λ = N/q^ℓ must come out an integer.
    pub fn from_rows(
        q: u64,
        rows: Vec<Vec<u32>>,
        strength: usize,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        crate::gf::field_from_order(q)?;
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("array needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::DimensionMismatch("array needs at least one column".into()));
        }
        if strength > n {
            return Err(Error::DimensionMismatch(format!(
                "strength {strength} exceeds row count {n}"
            )));
        }
        let mut entries = Vec::with_capacity(n * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged array rows".into()));
            }
            for &v in row {
                if v as u64 >= q {
                    return Err(Error::Parse(format!("entry {v} out of range for GF({q})")));
                }
                entries.push(v);
            }
        }
        let block = (q as u64).checked_pow(strength as u32).ok_or_else(|| {
            Error::SizeLimit(format!("q^ℓ overflows for q={q}, ℓ={strength}"))
        })?;
        if cols as u64 % block != 0 {
            return Err(Error::DimensionMismatch(format!(
                "{cols} columns is not a multiple of q^ℓ = {block}"
            )));
        }
        Ok(BoaArray {
            q: q as u32,
            n,
            cols,
            entries,
            strength,
            lambda: cols as u64 / block,
            provenance: provenance.into(),
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns (time slots), the N of BOA(N, n, q, ℓ).
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<u32> {
        (0..self.n).map(|i| self.entry(i, col)).collect()
    }

    /// Column subsequence over a row subset, in column order.
    pub fn restricted_columns(&self, rows: &[usize]) -> Vec<Vec<u32>> {
        (0..self.cols)
            .map(|j| rows.iter().map(|&i| self.entry(i, j)).collect())
            .collect()
    }

    // ---- text format: "q n N ℓ λ" header, then n rows of N integers ----

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {}\n",
            self.q, self.n, self.cols, self.strength, self.lambda
        );
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<BoaArray> {
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("expected an integer, found {t:?}")))
        });
        let mut next = |what: &str| {
            nums.next()
                .unwrap_or_else(|| Err(Error::Parse(format!("missing {what}"))))
        };
        let q = next("field order")?;
        let n = next("row count")? as usize;
        let cols = next("column count")? as usize;
        let strength = next("strength")? as usize;
        let lambda = next("lambda")?;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(cols);
            for j in 0..cols {
                row.push(next(&format!("entry ({i},{j})"))? as u32);
            }
            rows.push(row);
        }
        if nums.next().is_some() {
            return Err(Error::Parse("trailing data after the array".into()));
        }
        let arr = BoaArray::from_rows(q, rows, strength, "file")?;
        if arr.lambda != lambda {
            return Err(Error::Parse(format!(
                "header says λ = {lambda} but N/q^ℓ = {}",
                arr.lambda
            )));
        }
        Ok(arr)
    }

    /// CSV mirror of the printed layout: one line per qudit row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Build the array whose j-th column is G·m_j for the cycle's j-th vertex.
/// The claimed strength is the code's dual distance minus one (certified by
/// the family construction when available, otherwise computed exactly).
pub fn build_boa(code: &LinearCode, cycle: &Cycle) -> Result<BoaArray> {
    if cycle.q() != code.q() || cycle.k() != code.k() {
        return Err(Error::DimensionMismatch(format!(
            "cycle over F_{}^{} does not match a [{}..., k={}] code over GF({})",
            cycle.q(),
            cycle.k(),
            code.n(),
            code.k(),
            code.q()
        )));
    }
    let dual_distance = match code.certified_dual_distance() {
        Some(d) => d,
        None => code.dual_distance()?,
    };
    let strength = dual_distance - 1;
    let n = code.n();
    let cols = cycle.len();
    let mut rows = vec![vec![0u32; cols]; n];
    for (j, m) in cycle.vertices().iter().enumerate() {
        let word = code.encode(m)?;
        for (i, &w) in word.iter().enumerate() {
            rows[i][j] = w;
        }
    }
    BoaArray::from_rows(
        code.q() as u64,
        rows,
        strength,
        format!(
            "code {} [{},{}]_{} × cycle of length {}",
            code.label(),
            code.n(),
            code.k(),
            code.q(),
            cols
        ),
    )
}

fn check_verify_budget(arr: &BoaArray, ell: usize) -> Result<(Vec<Vec<usize>>, u64)> {
    if ell == 0 || ell > arr.n() {
        return Err(Error::DimensionMismatch(format!(
            "strength {ell} outside 1..={}",
            arr.n()
        )));
    }
    let mut block = 1u64;
    for _ in 0..ell {
        block = block.saturating_mul(arr.q() as u64);
        if block > VERIFY_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "q^ℓ = {}^{ell} alone exceeds the verification budget",
                arr.q()
            )));
        }
    }
    // count the subsets before materializing them
    let mut subset_count = 1u128;
    for i in 0..ell {
        subset_count = subset_count.saturating_mul((arr.n() - i) as u128);
        subset_count /= (i + 1) as u128;
    }
    let cost = subset_count.saturating_mul(block as u128);
    if cost > VERIFY_BUDGET as u128 {
        return Err(Error::BudgetExceeded(format!(
            "C({},{ell})·q^ℓ = {cost} exceeds the {VERIFY_BUDGET} verification budget",
            arr.n()
        )));
    }
    let subsets: Vec<Vec<usize>> = (0..arr.n()).combinations(ell).collect();
    Ok((subsets, block))
}

/// Exhaustive orthogonal-array check: true iff every ℓ-row subarray contains
/// each ℓ-tuple the same number of times, returning that common λ = N/q^ℓ.
pub fn verify_oa(arr: &BoaArray, ell: usize) -> Result<(bool, Option<u64>)> {
    let (subsets, block) = check_verify_budget(arr, ell)?;
    let q = arr.q() as u64;
    let lambda = arr.cols() as u64 / block;
    let oks = parallel::map_indexed(subsets.len(), |s| {
        let rows = &subsets[s];
        let mut counts = vec![0u64; block as usize];
        for j in 0..arr.cols() {
            let mut tuple = 0u64;
            for &i in rows.iter().rev() {
                tuple = tuple * q + arr.entry(i, j) as u64;
            }
            counts[tuple as usize] += 1;
        }
        counts.iter().all(|&c| c == lambda)
    });
    let ok = oks.iter().all(|&b| b);
    Ok((ok, if ok { Some(lambda) } else { None }))
}

/// Balance report for one row subset, together with the induced labels (the
/// distinct transition vectors of the restricted column walk).
#[derive(Clone, Debug)]
pub struct SubsetReport {
    pub rows: Vec<usize>,
    /// Induced generating labels: distinct restricted transitions, zero
    /// label included when present.
    pub labels: Vec<Vec<u32>>,
    pub report: BalanceReport,
}

/// Outcome of [`verify_boa`].
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub oa_ok: bool,
    /// Common tuple count when the OA check passes.
    pub lambda: Option<u64>,
    pub boa_ok: bool,
    /// One report per ℓ-row subset, in lexicographic subset order.
    pub per_subset: Vec<SubsetReport>,
    pub failures: Vec<String>,
}

/// Exhaustive balanced-cycle verification: every ℓ-row restriction of the
/// array, read in column order with wraparound to the (all-zero) first
/// column, must be a balanced cycle on F_q^ℓ. Also runs the plain OA check;
/// a passing BOA check implies a passing OA check.
pub fn verify_boa(arr: &BoaArray, ell: usize) -> Result<VerificationReport> {
    let (subsets, _) = check_verify_budget(arr, ell)?;
    let (oa_ok, lambda) = verify_oa(arr, ell)?;
    let q = arr.q() as u64;
    let reports: Vec<Result<SubsetReport>> = parallel::map_indexed(subsets.len(), |s| {
        let rows = &subsets[s];
        let restricted = arr.restricted_columns(rows);
        let report = check_balanced(q, &restricted)?;
        Ok(SubsetReport {
            rows: rows.clone(),
            labels: report.mu.keys().cloned().collect(),
            report,
        })
    });
    let mut per_subset = Vec::with_capacity(reports.len());
    let mut failures = Vec::new();
    for r in reports {
        let sr = r?;
        if !sr.report.balanced {
            failures.push(format!(
                "rows {:?}: {} departure-count violations{}{}",
                sr.rows,
                sr.report.violations.len(),
                if sr.report.generates { "" } else { "; labels do not generate" },
                if sr.report.covers_all_vertices { "" } else { "; vertices missing" },
            ));
        }
        per_subset.push(sr);
    }
    let boa_ok = failures.is_empty();
    Ok(VerificationReport {
        oa_ok,
        lambda,
        boa_ok,
        per_subset,
        failures,
    })
}

/// Restrict an array to its first `n_target` rows (dropping qudits keeps a
/// valid scheme for the smaller system); the strength claim becomes
/// min(ℓ, n_target) and λ is recomputed against it.
pub fn pad_rows(arr: &BoaArray, n_target: usize) -> Result<BoaArray> {
    if n_target == 0 || n_target > arr.n() {
        return Err(Error::DimensionMismatch(format!(
            "target row count {n_target} outside 1..={}",
            arr.n()
        )));
    }
    let rows: Vec<Vec<u32>> = (0..n_target).map(|i| arr.row(i).to_vec()).collect();
    let strength = arr.strength().min(n_target);
    let provenance = if n_target == arr.n() {
        arr.provenance().to_string()
    } else {
        format!("{} (first {n_target} rows)", arr.provenance())
    };
    BoaArray::from_rows(arr.q() as u64, rows, strength, provenance)
}
