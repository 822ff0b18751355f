//! Linear codes over GF(q) in the column convention: an [n, k] code is given
//! by an n×k generator matrix G of full column rank, and its codewords are
//! the column vectors G·m for messages m ∈ GF(q)^k. Rows of G correspond to
//! the qudits that array rows will later be assigned to, which is why the
//! convention is transposed relative to most coding-theory texts.
//!
//! Distances are computed honestly: the minimum distance by streaming over
//! all q^k codewords (budgeted), and the dual distance through the
//! MacWilliams identity applied to the exact weight distribution, which
//! avoids enumerating the (often enormous) dual code. Code families whose
//! construction certifies a distance carry that certificate along so that
//! large instances do not force an enumeration.

use num_bigint::BigInt;

use crate::gf::{cyclotomic_coset, field_from_order, FieldEmbedding, FiniteField, Polynomial};
use crate::parallel;
use crate::{Error, Result};

/// Cap on q^k for full codeword enumeration.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;
/// Number of chunks codeword scans are split into; fixed so that results do
/// not depend on thread count.
const SCAN_CHUNKS: usize = 256;

#[derive(Clone, Debug)]
pub struct LinearCode {
    field: FiniteField,
    n: usize,
    k: usize,
    /// Row-major n×k generator entries (element indices).
    gen: Vec<u32>,
    label: String,
    /// Distances certified by a family construction (skips enumeration).
    known_distance: Option<usize>,
    known_dual_distance: Option<usize>,
}

/// Summary emitted by [`LinearCode::report`] and the CLI `codes describe`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CodeReport {
    pub q: u32,
    pub n: usize,
    pub k: usize,
    pub distance: usize,
    pub dual_distance: usize,
    /// Orthogonal-array strength of the codeword array: dual distance − 1.
    pub strength: usize,
    pub label: String,
}

impl LinearCode {
    /// Build a code from generator rows (each of length k). Validates entry
    /// ranges and that G has full column rank.
    pub fn new(field: FiniteField, rows: &[Vec<u32>], label: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("a code needs at least one row".into()));
        }
        let k = rows[0].len();
        if k == 0 || k > n {
            return Err(Error::DimensionMismatch(format!(
                "generator must be n×k with 1 ≤ k ≤ n, got {n}×{k}"
            )));
        }
        let q = field.order();
        let mut gen = Vec::with_capacity(n * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch(
                    "ragged generator matrix rows".into(),
                ));
            }
            for &v in row {
                if v >= q {
                    return Err(Error::Parse(format!(
                        "generator entry {v} out of range for GF({q})"
                    )));
                }
                gen.push(v);
            }
        }
        // full column rank check on a working copy
        let mut work: Vec<Vec<u32>> = rows.to_vec();
        let pivots = rref(&field, &mut work);
        if pivots.len() != k {
            return Err(Error::RankDeficient);
        }
        Ok(LinearCode {
            field,
            n,
            k,
            gen,
            label: label.into(),
            known_distance: None,
            known_dual_distance: None,
        })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generator_entry(&self, row: usize, col: usize) -> u32 {
        self.gen[row * self.k + col]
    }

    pub fn generator_rows(&self) -> Vec<Vec<u32>> {
        (0..self.n)
            .map(|i| self.gen[i * self.k..(i + 1) * self.k].to_vec())
            .collect()
    }

    /// The codeword G·m for a message of element indices.
    pub fn encode(&self, message: &[u32]) -> Result<Vec<u32>> {
        if message.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "message length {} for a dimension-{} code",
                message.len(),
                self.k
            )));
        }
        let q = self.q();
        for &v in message {
            if v >= q {
                return Err(Error::Parse(format!(
                    "message entry {v} out of range for GF({q})"
                )));
            }
        }
        let mut word = vec![0u32; self.n];
        for (i, w) in word.iter_mut().enumerate() {
            let mut acc = 0u32;
            for (j, &m) in message.iter().enumerate() {
                acc = self
                    .field
                    .add_idx(acc, self.field.mul_idx(self.gen[i * self.k + j], m));
            }
            *w = acc;
        }
        Ok(word)
    }

    /// Codeword for the message whose q-ary digits (little-endian) are the
    /// digits of `msg_index`.
    pub fn encode_index(&self, msg_index: u64) -> Vec<u32> {
        let q = self.q() as u64;
        let mut rest = msg_index;
        let msg: Vec<u32> = (0..self.k)
            .map(|_| {
                let d = (rest % q) as u32;
                rest /= q;
                d
            })
            .collect();
        self.encode(&msg).expect("digits are in range")
    }

    /// Number of codewords q^k, or an error when it exceeds the enumeration
    /// budget.
    fn codeword_count_within_budget(&self) -> Result<u64> {
        let mut acc = 1u64;
        for _ in 0..self.k {
            acc = acc.saturating_mul(self.q() as u64);
            if acc > ENUMERATION_BUDGET {
                return Err(Error::BudgetExceeded(format!(
                    "{}^{} codewords exceed the {} enumeration budget",
                    self.q(),
                    self.k,
                    ENUMERATION_BUDGET
                )));
            }
        }
        Ok(acc)
    }

    /// Exact weight distribution A_0..A_n by streaming enumeration of all
    /// q^k codewords (budgeted; see [`ENUMERATION_BUDGET`]).
    pub fn weight_distribution(&self) -> Result<Vec<u64>> {
        let total = self.codeword_count_within_budget()?;
        let ranges = parallel::chunk_ranges(total, SCAN_CHUNKS);
        let hists = parallel::map_indexed(ranges.len(), |c| self.scan_weights(ranges[c].clone()));
        let mut out = vec![0u64; self.n + 1];
        for h in hists {
            for (o, v) in out.iter_mut().zip(h) {
                *o += v;
            }
        }
        debug_assert_eq!(out.iter().sum::<u64>(), total);
        Ok(out)
    }

    /// Histogram of codeword weights over a contiguous message-index range,
    /// maintained incrementally: stepping the message odometer by one only
    /// touches the columns whose digits changed.
    fn scan_weights(&self, range: std::ops::Range<u64>) -> Vec<u64> {
        let q = self.q();
        let f = &self.field;
        let mut hist = vec![0u64; self.n + 1];
        if range.is_empty() {
            return hist;
        }
        // element-index delta when a digit steps t → (t+1) mod q
        let delta: Vec<u32> = (0..q).map(|t| f.sub_idx((t + 1) % q, t)).collect();

        let mut digits: Vec<u32> = {
            let mut rest = range.start;
            (0..self.k)
                .map(|_| {
                    let d = (rest % q as u64) as u32;
                    rest /= q as u64;
                    d
                })
                .collect()
        };
        let mut word = self.encode(&digits).expect("digits in range");
        let mut weight = word.iter().filter(|&&x| x != 0).count();
        hist[weight] += 1;

        for _ in 1..(range.end - range.start) {
            // advance the odometer, folding column deltas into the codeword
            let mut j = 0;
            loop {
                let d = digits[j];
                let step = delta[d as usize];
                for i in 0..self.n {
                    let cell = &mut word[i];
                    let before = *cell != 0;
                    *cell = f.add_idx(*cell, f.mul_idx(step, self.gen[i * self.k + j]));
                    let after = *cell != 0;
                    weight = weight + after as usize - before as usize;
                }
                if d + 1 < q {
                    digits[j] = d + 1;
                    break;
                }
                digits[j] = 0;
                j += 1;
            }
            hist[weight] += 1;
        }
        hist
    }

    /// Minimum distance by brute-force enumeration (budgeted). Family
    /// certificates are *not* consulted here; see [`report`](Self::report).
    pub fn min_distance(&self) -> Result<usize> {
        let wd = self.weight_distribution()?;
        wd.iter()
            .enumerate()
            .skip(1)
            .find(|(_, &a)| a > 0)
            .map(|(i, _)| i)
            .ok_or_else(|| Error::DimensionMismatch("code has no nonzero codeword".into()))
    }

    /// The dual code: generator built from a null-space basis of Gᵀ, so that
    /// every dual codeword is orthogonal to every codeword under the plain
    /// dot product. Only defined for k < n (the dual of the full space has
    /// dimension 0, which is not representable as a generator matrix).
    pub fn dual_code(&self) -> Result<LinearCode> {
        if self.k == self.n {
            return Err(Error::Unsupported(
                "the dual of the full space is the zero code and has no generator".into(),
            ));
        }
        // Gᵀ as k rows of length n
        let mut mat: Vec<Vec<u32>> = (0..self.k)
            .map(|j| (0..self.n).map(|i| self.gen[i * self.k + j]).collect())
            .collect();
        let pivots = rref(&self.field, &mut mat);
        let free: Vec<usize> = (0..self.n).filter(|c| !pivots.contains(c)).collect();
        let kd = free.len();
        debug_assert_eq!(kd, self.n - self.k);
        // basis vector per free column
        let mut rows = vec![vec![0u32; kd]; self.n];
        for (jj, &fcol) in free.iter().enumerate() {
            rows[fcol][jj] = 1;
            for (r, &pcol) in pivots.iter().enumerate() {
                rows[pcol][jj] = self.field.neg_idx(mat[r][fcol]);
            }
        }
        let mut dual = LinearCode::new(self.field.clone(), &rows, format!("dual({})", self.label))?;
        dual.known_distance = self.known_dual_distance;
        dual.known_dual_distance = self.known_distance;
        Ok(dual)
    }

    /// Dual distance through the MacWilliams identity: the smallest j ≥ 1
    /// with a nonzero dual weight B_j, computed exactly in big integers from
    /// this code's own weight distribution. Returns n+1 when the dual is the
    /// zero code (k = n), matching the convention that such an array has
    /// full strength.
    pub fn dual_distance(&self) -> Result<usize> {
        let weights = self.weight_distribution()?;
        let n = self.n;
        let q = BigInt::from(self.q());
        let qm1 = BigInt::from(self.q() - 1);
        let size = (0..self.k).fold(BigInt::from(1), |acc, _| acc * &q);
        for j in 1..=n {
            // B_j·|C| = Σ_i A_i K_j(i) with the Krawtchouk kernel
            let mut sum = BigInt::from(0);
            for (i, &a) in weights.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let mut kj = BigInt::from(0);
                for s in 0..=j.min(i) {
                    if j - s > n - i {
                        continue;
                    }
                    let term = qm1.pow((j - s) as u32) * binomial(i, s) * binomial(n - i, j - s);
                    if s % 2 == 0 {
                        kj += term;
                    } else {
                        kj -= term;
                    }
                }
                sum += BigInt::from(a) * kj;
            }
            debug_assert!(
                (&sum % &size) == BigInt::from(0) && sum >= BigInt::from(0),
                "MacWilliams transform must yield nonnegative integers"
            );
            if sum != BigInt::from(0) {
                return Ok(j);
            }
        }
        Ok(n + 1)
    }

    /// Full code summary. Uses construction certificates where present and
    /// falls back to (budgeted) exact computation.
    pub fn report(&self) -> Result<CodeReport> {
        let distance = match self.known_distance {
            Some(d) => d,
            None => self.min_distance()?,
        };
        let dual_distance = match self.known_dual_distance {
            Some(d) => d,
            None => self.dual_distance()?,
        };
        Ok(CodeReport {
            q: self.q(),
            n: self.n,
            k: self.k,
            distance,
            dual_distance,
            strength: dual_distance - 1,
            label: self.label.clone(),
        })
    }

    /// Distance certified by the family construction, if any.
    pub fn certified_distance(&self) -> Option<usize> {
        self.known_distance
    }

    pub fn certified_dual_distance(&self) -> Option<usize> {
        self.known_dual_distance
    }

    // ---- text format: "q n k" header then n rows of k element indices ----

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.q(), self.n, self.k);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.k)
                .map(|j| self.gen[i * self.k + j].to_string())
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LinearCode> {
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("expected an integer, found {t:?}")))
        });
        let mut next = |what: &str| {
            nums.next()
                .unwrap_or_else(|| Err(Error::Parse(format!("missing {what}"))))
        };
        let q = next("field order")?;
        let n = next("code length")? as usize;
        let k = next("code dimension")? as usize;
        let field = field_from_order(q)?;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(k);
            for j in 0..k {
                let v = next(&format!("entry ({i},{j})"))?;
                row.push(v as u32);
                if v >= q {
                    return Err(Error::Parse(format!(
                        "entry {v} at ({i},{j}) out of range for GF({q})"
                    )));
                }
            }
            rows.push(row);
        }
        if nums.next().is_some() {
            return Err(Error::Parse("trailing data after the generator matrix".into()));
        }
        LinearCode::new(field, &rows, "user")
    }
}

/// Reduced row echelon form in place; returns pivot column indices.
fn rref(field: &FiniteField, mat: &mut [Vec<u32>]) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| mat[i][c] != 0) else {
            continue;
        };
        mat.swap(r, pr);
        let inv = field.inv_idx(mat[r][c]);
        for x in mat[r].iter_mut() {
            *x = field.mul_idx(*x, inv);
        }
        for i in 0..rows {
            if i != r && mat[i][c] != 0 {
                let f = mat[i][c];
                for cc in 0..cols {
                    let s = field.mul_idx(f, mat[r][cc]);
                    mat[i][cc] = field.sub_idx(mat[i][cc], s);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut num = BigInt::from(1);
    for i in 0..k {
        num *= n - i;
        num /= i + 1; // exact at every step for the falling-factorial order
    }
    num
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// Dual of the q-ary Hamming family: an [n, r] code whose generator rows are
/// one representative of every projective point of PG(r−1, q), normalized so
/// the first nonzero coordinate is 1 and listed in ascending index order.
/// Requires n = (q^r − 1)/(q − 1) exactly for some r ≥ 2; its dual is the
/// Hamming code, so the dual distance is exactly 3.
pub fn hamming_dual_code(q: u64, n: usize) -> Result<LinearCode> {
    let field = field_from_order(q)?;
    // solve (q−1)·n + 1 = q^r
    let target = (q - 1) * n as u64 + 1;
    let mut r = 0u32;
    let mut pw = 1u64;
    while pw < target {
        pw = pw.saturating_mul(q);
        r += 1;
    }
    if pw != target || r < 2 {
        // nearest admissible lengths for the error message
        let below = ((q.saturating_pow(r.saturating_sub(1)) - 1) / (q - 1)).max(0);
        let above = (q.saturating_pow(r.max(2)) - 1) / (q - 1);
        return Err(Error::Unsupported(format!(
            "no Hamming-family length {n} over GF({q}); nearest admissible lengths are {below} and {above}"
        )));
    }
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(n);
    let qu = q as u32;
    let total = q.pow(r);
    'vectors: for key in 1..total {
        let mut v = Vec::with_capacity(r as usize);
        let mut rest = key;
        for _ in 0..r {
            v.push((rest % q) as u32);
            rest /= q;
        }
        for &c in &v {
            if c == 0 {
                continue;
            }
            if c == 1 {
                break;
            }
            continue 'vectors; // first nonzero coordinate is not 1
        }
        rows.push(v);
        let _ = qu;
    }
    debug_assert_eq!(rows.len(), n);
    let mut code = LinearCode::new(field, &rows, "hamming-dual")?;
    // The dual is the Hamming code (distance exactly 3); every nonzero
    // codeword of this code has weight q^{r−1} (a simplex-type code).
    code.known_dual_distance = Some(3);
    code.known_distance = Some(q.pow(r - 1) as usize);
    Ok(code)
}

/// Result of the extended-BCH dimension bound check (see
/// [`bch_dimension_bound`]).
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct BoundCheck {
    /// The bound is only claimed for D ≤ q^{⌈m/2⌉} + 2.
    pub applicable: bool,
    /// n − m·⌈(q−1)(D−2)/q⌉ − 1 with n = q^m.
    pub bound: i64,
    pub satisfied: bool,
    /// dimension − bound (nonnegative when satisfied).
    pub slack: i64,
}

/// Dimension bound for extended primitive BCH codes: an extended BCH code
/// over GF(q) of length n = q^m and designed distance D has dimension at
/// least n − m·⌈((q−1)/q)(D−2)⌉ − 1, provided D ≤ q^{⌈m/2⌉} + 2.
pub fn bch_dimension_bound(q: u64, m: u32, designed: usize, dimension: usize) -> BoundCheck {
    let n = q.pow(m) as i64;
    let d2 = designed.saturating_sub(2) as i64;
    let ceil = ((q as i64 - 1) * d2 + q as i64 - 1) / q as i64;
    let bound = n - m as i64 * ceil - 1;
    let applicable = {
        let half = m.div_ceil(2);
        (designed as u64) <= q.pow(half) + 2
    };
    BoundCheck {
        applicable,
        bound,
        satisfied: dimension as i64 >= bound,
        slack: dimension as i64 - bound,
    }
}

/// An extended primitive narrow-sense BCH code together with its
/// construction data.
#[derive(Clone, Debug)]
pub struct ExtendedBchCode {
    pub code: LinearCode,
    pub generator_poly: Polynomial,
    pub base_order: u64,
    pub m: u32,
    pub designed: usize,
    pub bound: BoundCheck,
}

/// Extended primitive narrow-sense BCH code over GF(q) with extension field
/// GF(q^m): the cyclic code of length q^m − 1 whose generator polynomial is
/// the least common multiple of the minimal polynomials of α, α², …, α^{D−2}
/// (α a fixed primitive element), extended by an overall-parity coordinate
/// appended last. The designed distance D means the *extended* code has
/// distance ≥ D; D = 2 gives g = 1 and the even-sum code [q^m, q^m − 1].
pub fn bch_ext_code(q: u64, m: u32, designed: usize) -> Result<ExtendedBchCode> {
    if m == 0 {
        return Err(Error::Unsupported("extension degree m must be ≥ 1".into()));
    }
    let base = field_from_order(q)?;
    let ext_degree = base.extension_degree() * m;
    let ext = crate::gf::field_create(base.characteristic() as u64, ext_degree)?;
    let n0 = ext.order() as u64 - 1;
    if designed < 2 || designed as u64 > n0 + 1 {
        return Err(Error::Unsupported(format!(
            "designed distance {designed} outside 2..={} for length {}",
            n0 + 1,
            n0 + 1
        )));
    }
    let emb = FieldEmbedding::new(&base, &ext)?;
    let alpha = ext.primitive_element();

    // g = lcm of minimal polynomials of α^1..α^{D−2}: product over distinct
    // cyclotomic cosets
    let mut g = Polynomial::one(&base);
    let mut seen: Vec<u64> = Vec::new();
    for i in 1..=(designed.saturating_sub(2) as u64) {
        let coset = cyclotomic_coset(i, n0, q);
        if seen.contains(&coset[0]) {
            continue;
        }
        seen.push(coset[0]);
        let beta = ext.pow(alpha, i);
        let mp = emb.minimal_polynomial(beta)?;
        g = g.mul(&base, &mp);
    }
    let deg_g = g.degree().unwrap_or(0);
    let k0 = n0 as usize - deg_g;
    if k0 == 0 {
        return Err(Error::Unsupported(format!(
            "designed distance {designed} leaves no message coordinates at length {n0}"
        )));
    }

    // cyclic generator matrix: column j holds the coefficients of x^j·g(x),
    // then one parity row making every column sum to zero
    let gi = g.coeff_indices();
    let mut rows = vec![vec![0u32; k0]; n0 as usize + 1];
    for j in 0..k0 {
        for (t, &c) in gi.iter().enumerate() {
            rows[j + t][j] = c;
        }
    }
    for j in 0..k0 {
        let mut acc = 0u32;
        for row in rows.iter().take(n0 as usize) {
            acc = base.add_idx(acc, row[j]);
        }
        rows[n0 as usize][j] = base.neg_idx(acc);
    }

    let mut code = LinearCode::new(base.clone(), &rows, "bch-ext")?;
    code.known_distance = None; // exact distance only by enumeration
    let bound = bch_dimension_bound(q, m, designed, code.k());
    Ok(ExtendedBchCode {
        code,
        generator_poly: g,
        base_order: q,
        m,
        designed,
        bound,
    })
}
