//! Finite-field arithmetic for GF(p^e), p prime, p^e ≤ 2^16, e ≤ 8.
//!
//! Elements are coordinate vectors over GF(p) with respect to the power basis
//! {1, x, …, x^{e−1}} of GF(p)[x]/(f); an element is stored compactly as its
//! *index*, the base-p little-endian packing of the coordinate vector, so the
//! zero element is simply index 0 and needs no special casing. The reducing
//! polynomial f is deterministic: a fixed table for the small orders used
//! throughout the crate, and otherwise the lexicographically least monic
//! irreducible of the right degree (coefficient tuples compared constant term
//! first). Two calls with the same (p, e) always yield interchangeable
//! fields.
//!
//! Beyond element arithmetic this module provides dense polynomials over a
//! field, cyclotomic cosets, subfield embeddings and minimal polynomials —
//! the toolkit the BCH construction in [`crate::codes`] is built from.

use std::collections::HashMap;

use crate::{Error, Result};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 16;
/// Largest supported extension degree over the prime field.
pub const MAX_EXT_DEGREE: u32 = 8;
/// Multiplication/inverse lookup tables are built for orders up to this.
const TABLE_LIMIT: u32 = 256;

/// An element of a specific finite field, tagged with the field order so that
/// cross-field misuse is detectable. Construct through [`FiniteField`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    q: u32,
    idx: u32,
}

impl FieldElement {
    /// Index encoding: the coordinate vector packed base p, little-endian.
    pub fn index(&self) -> u32 {
        self.idx
    }

    /// Order of the owning field.
    pub fn field_order(&self) -> u32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }
}

/// The operations accepted by [`FiniteField::arith`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// GF(p^e) with a deterministic reducing polynomial.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u32,
    e: u32,
    q: u32,
    /// Monic reducing polynomial, ascending coefficients over GF(p), length e+1.
    modulus: Vec<u32>,
    /// reduction[t] = coordinates of x^{e+t} mod modulus, for t = 0..e−1.
    reduction: Vec<Vec<u32>>,
    /// Flat q×q multiplication table (index arithmetic), small fields only.
    mul_table: Option<Vec<u16>>,
    inv_table: Option<Vec<u16>>,
}

/// Construct GF(p^e). See the module docs for the modulus convention.
pub fn field_create(p: u64, e: u32) -> Result<FiniteField> {
    FiniteField::new(p, e)
}

/// Construct the field of a given order, factoring q = p^e first.
pub fn field_from_order(q: u64) -> Result<FiniteField> {
    if q < 2 {
        return Err(Error::Unsupported(format!("{q} is not a prime power")));
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q; // q itself is prime
    }
    let mut e = 0u32;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    if rest != 1 {
        return Err(Error::Unsupported(format!("{q} is not a prime power")));
    }
    FiniteField::new(p, e)
}

/// Fixed reducing polynomials for the orders exercised throughout the crate,
/// ascending coefficients. Everything else falls back to the lexicographic
/// search so that field construction stays reproducible.
const FIXED_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1]),          // x + 1
    (2, 2, &[1, 1, 1]),       // x² + x + 1
    (2, 3, &[1, 1, 0, 1]),    // x³ + x + 1
    (2, 4, &[1, 1, 0, 0, 1]), // x⁴ + x + 1
    (3, 1, &[0, 1]),          // x
    (3, 2, &[1, 0, 1]),       // x² + 1
];

impl FiniteField {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 || e > MAX_EXT_DEGREE {
            return Err(Error::SizeLimit(format!(
                "extension degree {e} outside 1..={MAX_EXT_DEGREE}"
            )));
        }
        let q = match p.checked_pow(e) {
            Some(q) if q <= MAX_FIELD_ORDER => q as u32,
            _ => {
                return Err(Error::SizeLimit(format!(
                    "field order {p}^{e} exceeds {MAX_FIELD_ORDER}"
                )))
            }
        };
        let p = p as u32;

        let modulus = match FIXED_MODULI.iter().find(|(fp, fe, _)| *fp == p && *fe == e) {
            Some((_, _, m)) => m.to_vec(),
            None => least_irreducible(p, e),
        };

        // x^e ≡ −(lower part of the modulus); extend by repeated shifts.
        let mut reduction: Vec<Vec<u32>> = Vec::with_capacity(e as usize);
        if e > 1 {
            let base: Vec<u32> = (0..e as usize).map(|i| (p - modulus[i] % p) % p).collect();
            reduction.push(base);
            for t in 1..e as usize {
                let prev = reduction[t - 1].clone();
                let mut next = vec![0u32; e as usize];
                // multiply prev by x, folding the overflowing x^e term back in
                let carry = prev[e as usize - 1];
                for i in (1..e as usize).rev() {
                    next[i] = prev[i - 1];
                }
                next[0] = 0;
                if carry != 0 {
                    for i in 0..e as usize {
                        next[i] = (next[i] + carry * reduction[0][i]) % p;
                    }
                }
                reduction.push(next);
            }
        }

        let mut field = FiniteField {
            p,
            e,
            q,
            modulus,
            reduction,
            mul_table: None,
            inv_table: None,
        };
        if q <= TABLE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut mul = vec![0u16; q * q];
        for a in 0..q as u32 {
            for b in a..q as u32 {
                let prod = self.mul_idx_raw(a, b);
                mul[a as usize * q + b as usize] = prod as u16;
                mul[b as usize * q + a as usize] = prod as u16;
            }
        }
        let mut inv = vec![0u16; q];
        for a in 1..q {
            if inv[a] != 0 {
                continue;
            }
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u16;
                    inv[b] = a as u16;
                    break;
                }
            }
        }
        self.mul_table = Some(mul);
        self.inv_table = Some(inv);
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Reducing polynomial, ascending coefficients over GF(p), length e+1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { q: self.q, idx: 0 }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { q: self.q, idx: 1 }
    }

    /// The residue class of x, i.e. the second power-basis vector. Only
    /// meaningful for genuine extensions (e ≥ 2).
    pub fn residue_x(&self) -> Result<FieldElement> {
        if self.e < 2 {
            return Err(Error::Unsupported(
                "the residue class of x only exists for extension degree ≥ 2".into(),
            ));
        }
        Ok(FieldElement {
            q: self.q,
            idx: self.p,
        })
    }

    pub fn element_from_index(&self, idx: u64) -> Result<FieldElement> {
        if idx >= self.q as u64 {
            return Err(Error::Parse(format!(
                "element index {idx} out of range for GF({})",
                self.q
            )));
        }
        Ok(FieldElement {
            q: self.q,
            idx: idx as u32,
        })
    }

    /// Element from its coordinate vector over GF(p) (little-endian, length
    /// ≤ e, entries < p).
    pub fn element_from_coords(&self, coords: &[u32]) -> Result<FieldElement> {
        if coords.len() > self.e as usize {
            return Err(Error::Parse(format!(
                "coordinate vector of length {} for an extension of degree {}",
                coords.len(),
                self.e
            )));
        }
        let mut idx = 0u32;
        for (i, &c) in coords.iter().enumerate() {
            if c >= self.p {
                return Err(Error::Parse(format!(
                    "coordinate {c} not reduced mod {}",
                    self.p
                )));
            }
            idx += c * self.p.pow(i as u32);
        }
        Ok(FieldElement { q: self.q, idx })
    }

    /// Coordinate vector over GF(p), little-endian, always of length e.
    pub fn coords(&self, a: FieldElement) -> Vec<u32> {
        self.expect_member(a);
        let mut v = Vec::with_capacity(self.e as usize);
        let mut rest = a.idx;
        for _ in 0..self.e {
            v.push(rest % self.p);
            rest /= self.p;
        }
        v
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(|idx| FieldElement { q: self.q, idx })
    }

    fn expect_member(&self, a: FieldElement) {
        assert_eq!(
            a.q, self.q,
            "element of GF({}) used with GF({})",
            a.q, self.q
        );
    }

    fn check_member(&self, a: FieldElement) -> Result<()> {
        if a.q != self.q {
            return Err(Error::FieldMismatch {
                expected: self.q,
                got: a.q,
            });
        }
        Ok(())
    }

    /// Checked arithmetic dispatch; the method-form operations below are the
    /// hot-path equivalents and panic on field mismatch instead.
    pub fn arith(&self, a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
        self.check_member(a)?;
        self.check_member(b)?;
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.expect_member(a);
        self.expect_member(b);
        FieldElement {
            q: self.q,
            idx: self.add_idx(a.idx, b.idx),
        }
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        self.expect_member(a);
        FieldElement {
            q: self.q,
            idx: self.neg_idx(a.idx),
        }
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.expect_member(a);
        self.expect_member(b);
        FieldElement {
            q: self.q,
            idx: self.mul_idx(a.idx, b.idx),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        self.check_member(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement {
            q: self.q,
            idx: self.inv_idx(a.idx),
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut n: u64) -> FieldElement {
        self.expect_member(a);
        let mut base = a.idx;
        let mut acc = 1u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_idx(acc, base);
            }
            base = self.mul_idx(base, base);
            n >>= 1;
        }
        FieldElement { q: self.q, idx: acc }
    }

    /// The Frobenius endomorphism a ↦ a^p.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.p as u64)
    }

    // ---- index-level arithmetic (hot paths; indices must be < q) ----

    pub fn add_idx(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if self.e == 1 {
            return (a + b) % self.p;
        }
        // digit-wise addition mod p, no carries between digits
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg_idx(&self, a: u32) -> u32 {
        debug_assert!(a < self.q);
        if self.e == 1 {
            return (self.p - a) % self.p;
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub_idx(&self, a: u32, b: u32) -> u32 {
        self.add_idx(a, self.neg_idx(b))
    }

    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.q && b < self.q);
        if let Some(t) = &self.mul_table {
            return t[a as usize * self.q as usize + b as usize] as u32;
        }
        self.mul_idx_raw(a, b)
    }

    /// Multiplication via coordinate polynomials; used to seed the tables and
    /// as the fallback for large fields.
    fn mul_idx_raw(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return ((a as u64 * b as u64) % self.p as u64) as u32;
        }
        let e = self.e as usize;
        let digits = |mut v: u32| {
            let mut d = [0u32; MAX_EXT_DEGREE as usize];
            for item in d.iter_mut().take(e) {
                *item = v % self.p;
                v /= self.p;
            }
            d
        };
        let da = digits(a);
        let db = digits(b);
        // schoolbook product, degree ≤ 2e−2
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE as usize];
        for i in 0..e {
            if da[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] += da[i] as u64 * db[j] as u64;
            }
        }
        // fold x^{e+t} through the reduction rows
        let mut out = [0u64; MAX_EXT_DEGREE as usize];
        for (i, item) in out.iter_mut().enumerate().take(e) {
            *item = prod[i];
        }
        for t in 0..e - 1 {
            let c = prod[e + t] % self.p as u64;
            if c == 0 {
                continue;
            }
            for i in 0..e {
                out[i] += c * self.reduction[t][i] as u64;
            }
        }
        let mut idx = 0u32;
        let mut place = 1u32;
        for item in out.iter().take(e) {
            idx += ((item % self.p as u64) as u32) * place;
            place *= self.p;
        }
        idx
    }

    pub fn inv_idx(&self, a: u32) -> u32 {
        debug_assert!(a != 0 && a < self.q);
        if let Some(t) = &self.inv_table {
            return t[a as usize] as u32;
        }
        // a^{q−2} by square-and-multiply
        let mut n = self.q as u64 - 2;
        let mut base = a;
        let mut acc = 1u32;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_idx_raw(acc, base);
            }
            base = self.mul_idx_raw(base, base);
            n >>= 1;
        }
        acc
    }

    // ---- multiplicative structure ----

    /// Order of `a` in the multiplicative group; errors on zero.
    pub fn multiplicative_order(&self, a: FieldElement) -> Result<u64> {
        self.check_member(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut order = self.q as u64 - 1;
        for f in prime_factors(self.q as u64 - 1) {
            while order % f == 0 && self.pow(a, order / f).idx == 1 {
                order /= f;
            }
        }
        Ok(order)
    }

    /// The least-index generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElement {
        for el in self.elements().skip(1) {
            if self.multiplicative_order(el).expect("nonzero") == self.q as u64 - 1 {
                return el;
            }
        }
        unreachable!("every finite field has a primitive element")
    }
}

/// Deterministic primality by trial division (fine for p ≤ 2^16).
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Lexicographically least monic irreducible of degree e over GF(p),
/// comparing ascending coefficient tuples constant-term first. Irreducibility
/// by trial division against all monic polynomials of degree ≤ e/2.
fn least_irreducible(p: u32, e: u32) -> Vec<u32> {
    let e = e as usize;
    let total = (p as u64).pow(e as u32);
    for key in 0..total {
        // constant-term-first lexicographic order: c_0 is the most
        // significant digit of the enumeration key, so it varies slowest
        let mut coeffs = vec![0u32; e + 1];
        coeffs[e] = 1;
        let mut rest = key;
        for i in (0..e).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        if prime_poly_is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}

/// Trial-division irreducibility for a monic polynomial over GF(p)
/// (ascending coefficients).
fn prime_poly_is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for key in 0..count {
            let mut g = vec![0u32; d + 1];
            g[d] = 1;
            let mut rest = key;
            for item in g.iter_mut().take(d) {
                *item = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            if prime_poly_divides(p, &g, f) {
                return false;
            }
        }
    }
    true
}

/// Does monic g divide f over GF(p)? Synthetic long division.
fn prime_poly_divides(p: u32, g: &[u32], f: &[u32]) -> bool {
    let mut rem: Vec<u32> = f.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = *rem.last().unwrap() % p;
        let shift = rem.len() - 1 - dg;
        if lead != 0 {
            for i in 0..=dg {
                let idx = shift + i;
                let sub = (lead as u64 * g[i] as u64) % p as u64;
                rem[idx] = ((rem[idx] as u64 + p as u64 - sub) % p as u64) as u32;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

// ---------------------------------------------------------------------------
// Polynomials over a finite field
// ---------------------------------------------------------------------------

/// Dense polynomial over a specific GF(q); coefficients are element indices
/// in ascending degree order with no trailing zeros (the zero polynomial has
/// an empty coefficient list).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    q: u32,
    coeffs: Vec<u32>,
}

impl Polynomial {
    pub fn zero(field: &FiniteField) -> Self {
        Polynomial {
            q: field.order(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &FiniteField) -> Self {
        Polynomial {
            q: field.order(),
            coeffs: vec![1],
        }
    }

    pub fn x(field: &FiniteField) -> Self {
        Polynomial {
            q: field.order(),
            coeffs: vec![0, 1],
        }
    }

    pub fn from_elements(field: &FiniteField, coeffs: &[FieldElement]) -> Self {
        let mut c: Vec<u32> = coeffs
            .iter()
            .map(|el| {
                assert_eq!(el.q, field.order(), "coefficient from the wrong field");
                el.idx
            })
            .collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Polynomial {
            q: field.order(),
            coeffs: c,
        }
    }

    pub fn from_indices(field: &FiniteField, coeffs: &[u32]) -> Self {
        let els: Vec<FieldElement> = coeffs
            .iter()
            .map(|&i| field.element_from_index(i as u64).expect("index in range"))
            .collect();
        Self::from_elements(field, &els)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, field: &FiniteField, i: usize) -> FieldElement {
        let idx = self.coeffs.get(i).copied().unwrap_or(0);
        FieldElement { q: field.order(), idx }
    }

    pub fn coeff_indices(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    fn expect_field(&self, field: &FiniteField) {
        assert_eq!(self.q, field.order(), "polynomial over the wrong field");
    }

    fn trimmed(q: u32, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { q, coeffs }
    }

    pub fn add(&self, field: &FiniteField, other: &Polynomial) -> Polynomial {
        self.expect_field(field);
        other.expect_field(field);
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                field.add_idx(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    other.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::trimmed(self.q, coeffs)
    }

    pub fn sub(&self, field: &FiniteField, other: &Polynomial) -> Polynomial {
        self.expect_field(field);
        other.expect_field(field);
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                field.sub_idx(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    other.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::trimmed(self.q, coeffs)
    }

    pub fn mul(&self, field: &FiniteField, other: &Polynomial) -> Polynomial {
        self.expect_field(field);
        other.expect_field(field);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(field);
        }
        let mut coeffs = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let prod = field.mul_idx(a, b);
                coeffs[i + j] = field.add_idx(coeffs[i + j], prod);
            }
        }
        Self::trimmed(self.q, coeffs)
    }

    pub fn scale(&self, field: &FiniteField, s: FieldElement) -> Polynomial {
        self.expect_field(field);
        field.expect_member(s);
        let coeffs = self.coeffs.iter().map(|&c| field.mul_idx(c, s.idx)).collect();
        Self::trimmed(self.q, coeffs)
    }

    /// Quotient and remainder with `deg r < deg divisor`. Errors on a zero
    /// divisor.
    pub fn divmod(&self, field: &FiniteField, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        self.expect_field(field);
        divisor.expect_field(field);
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = divisor.coeffs.len() - 1;
        let lead_inv = field.inv_idx(*divisor.coeffs.last().unwrap());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let lead = *rem.last().unwrap();
            let shift = rem.len() - 1 - dd;
            if lead != 0 {
                let factor = field.mul_idx(lead, lead_inv);
                quot[shift] = factor;
                for i in 0..=dd {
                    let sub = field.mul_idx(factor, divisor.coeffs[i]);
                    rem[shift + i] = field.sub_idx(rem[shift + i], sub);
                }
            }
            rem.pop();
        }
        Ok((Self::trimmed(self.q, quot), Self::trimmed(self.q, rem)))
    }

    pub fn eval(&self, field: &FiniteField, at: FieldElement) -> FieldElement {
        self.expect_field(field);
        field.expect_member(at);
        let mut acc = 0u32;
        for &c in self.coeffs.iter().rev() {
            acc = field.add_idx(field.mul_idx(acc, at.idx), c);
        }
        FieldElement { q: self.q, idx: acc }
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic cosets, embeddings, minimal polynomials
// ---------------------------------------------------------------------------

/// The q-cyclotomic coset of `i` modulo `n`: {i·q^j mod n}, ascending.
pub fn cyclotomic_coset(i: u64, n: u64, q: u64) -> Vec<u64> {
    assert!(n > 0, "modulus must be positive");
    let start = i % n;
    let mut coset = vec![start];
    let mut cur = (start * (q % n)) % n;
    while cur != start {
        coset.push(cur);
        cur = (cur * (q % n)) % n;
    }
    coset.sort_unstable();
    coset
}

/// The embedding GF(q) ↪ GF(q^m) induced by mapping the residue class of x
/// in the base field to its least-index root in the extension. Both fields
/// must share a characteristic and the degrees must nest.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    base: FiniteField,
    ext: FiniteField,
    /// Image (ext index) of each base element, indexed by base index.
    to_ext: Vec<u32>,
    /// Reverse lookup for coefficients that must land back in the base field.
    from_ext: HashMap<u32, u32>,
}

impl FieldEmbedding {
    pub fn new(base: &FiniteField, ext: &FiniteField) -> Result<Self> {
        if base.p != ext.p {
            return Err(Error::Unsupported(format!(
                "no embedding between characteristics {} and {}",
                base.p, ext.p
            )));
        }
        if ext.e % base.e != 0 {
            return Err(Error::Unsupported(format!(
                "GF({}) is not a subfield of GF({})",
                base.q, ext.q
            )));
        }

        // Root of the base modulus inside the extension, least index first.
        // For a prime base field the modulus is degree 1 and the embedding is
        // the identity on {0..p−1}; the root search below still covers it.
        let base_mod = Polynomial::from_indices(
            ext,
            &base
                .modulus
                .iter()
                .map(|&c| c % base.p)
                .collect::<Vec<u32>>(),
        );
        let root = ext
            .elements()
            .find(|&cand| base_mod.eval(ext, cand).is_zero())
            .ok_or_else(|| {
                Error::Unsupported(format!(
                    "base modulus has no root in GF({}); fields are incompatible",
                    ext.q
                ))
            })?;

        let mut to_ext = vec![0u32; base.q as usize];
        let mut from_ext = HashMap::with_capacity(base.q as usize);
        for a in 0..base.q {
            let coords = base.coords(FieldElement { q: base.q, idx: a });
            // Σ c_i · root^i with c_i lifted as prime-subfield elements
            let mut acc = ext.zero();
            let mut power = ext.one();
            for &c in &coords {
                let lift = FieldElement { q: ext.q, idx: c % ext.p };
                acc = ext.add(acc, ext.mul(lift, power));
                power = ext.mul(power, root);
            }
            to_ext[a as usize] = acc.idx;
            from_ext.insert(acc.idx, a);
        }
        if from_ext.len() != base.q as usize {
            return Err(Error::Unsupported(
                "embedding is not injective; incompatible moduli".into(),
            ));
        }
        Ok(FieldEmbedding {
            base: base.clone(),
            ext: ext.clone(),
            to_ext,
            from_ext,
        })
    }

    pub fn base(&self) -> &FiniteField {
        &self.base
    }

    pub fn ext(&self) -> &FiniteField {
        &self.ext
    }

    pub fn embed(&self, a: FieldElement) -> Result<FieldElement> {
        self.base.check_member(a)?;
        Ok(FieldElement {
            q: self.ext.q,
            idx: self.to_ext[a.idx as usize],
        })
    }

    /// Inverse of [`embed`](Self::embed); errors when the element lies
    /// outside the embedded copy of the base field.
    pub fn project(&self, a: FieldElement) -> Result<FieldElement> {
        self.ext.check_member(a)?;
        match self.from_ext.get(&a.idx) {
            Some(&idx) => Ok(FieldElement { q: self.base.q, idx }),
            None => Err(Error::Unsupported(format!(
                "element {} of GF({}) is not in the embedded GF({})",
                a.idx, self.ext.q, self.base.q
            ))),
        }
    }

    /// Minimal polynomial of `beta` (an extension element) over the base
    /// field: the product of (x − β^{Q^j}) over the Frobenius orbit with
    /// Q = |base|. Always monic; its coefficients provably lie in the base.
    pub fn minimal_polynomial(&self, beta: FieldElement) -> Result<Polynomial> {
        self.ext.check_member(beta)?;
        let qbase = self.base.q as u64;
        let mut orbit = vec![beta];
        let mut cur = self.ext.pow(beta, qbase);
        while cur != beta {
            orbit.push(cur);
            cur = self.ext.pow(cur, qbase);
        }
        let mut poly = Polynomial::one(&self.ext);
        for gamma in &orbit {
            let factor = Polynomial::from_elements(&self.ext, &[self.ext.neg(*gamma), self.ext.one()]);
            poly = poly.mul(&self.ext, &factor);
        }
        // pull the coefficients back down
        let mut base_coeffs = Vec::with_capacity(poly.coeffs.len());
        for &c in &poly.coeffs {
            let el = FieldElement { q: self.ext.q, idx: c };
            base_coeffs.push(self.project(el)?);
        }
        Ok(Polynomial::from_elements(&self.base, &base_coeffs))
    }
}

/// Minimal polynomial of `beta ∈ GF(q^m)` over `base = GF(q)`, with the
/// embedding fixed by the deterministic field conventions.
pub fn minimal_polynomial(
    beta: FieldElement,
    base: &FiniteField,
    ext: &FiniteField,
) -> Result<Polynomial> {
    FieldEmbedding::new(base, ext)?.minimal_polynomial(beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_moduli_are_used() {
        assert_eq!(field_create(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(field_create(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(field_create(2, 4).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(field_create(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn searched_modulus_is_lexicographically_least() {
        // For GF(25) the first irreducible in constant-term-first order is
        // x² + x + 1 (x² + 1 splits because −1 is a square mod 5).
        let f = field_create(5, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // GF(49): −1 is not a square mod 7, so x² + 1 is irreducible and
        // precedes x² + x + c candidates.
        let f = field_create(7, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn field_create_is_deterministic() {
        for (p, e) in [(2u64, 4u32), (3, 2), (5, 2), (2, 8)] {
            let a = field_create(p, e).unwrap();
            let b = field_create(p, e).unwrap();
            assert_eq!(a.modulus(), b.modulus());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(field_create(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(field_create(6, 2), Err(Error::NotPrime(6))));
        assert!(matches!(field_create(2, 0), Err(Error::SizeLimit(_))));
        assert!(matches!(field_create(2, 9), Err(Error::SizeLimit(_))));
        assert!(matches!(field_create(257, 2), Err(Error::SizeLimit(_))));
    }

    /// Independent oracle: multiply coordinate polynomials over GF(p) and
    /// reduce by the stated modulus, all in plain integer arithmetic.
    fn naive_mul(p: u32, modulus: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
        let e = modulus.len() - 1;
        let mut prod = vec![0u32; 2 * e];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        // long division by the monic modulus
        for d in (e..2 * e - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..e {
                let sub = (c * modulus[i]) % p;
                prod[d - e + i] = (prod[d - e + i] + p - sub) % p;
            }
        }
        prod[..e].to_vec()
    }

    #[test]
    fn multiplication_matches_naive_polynomial_oracle() {
        for (p, e) in [(2u64, 2u32), (2, 3), (2, 4), (3, 2), (5, 2)] {
            let f = field_create(p, e).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let got = f.coords(f.mul(a, b));
                    let want = naive_mul(
                        f.characteristic(),
                        f.modulus(),
                        &f.coords(a),
                        &f.coords(b),
                    );
                    assert_eq!(got, want, "GF({}) {}·{}", f.order(), a.index(), b.index());
                }
            }
        }
    }

    #[test]
    fn gf4_has_alpha_squared_equal_alpha_plus_one() {
        let f = field_create(2, 2).unwrap();
        let alpha = f.residue_x().unwrap();
        let alpha_sq = f.mul(alpha, alpha);
        let alpha_plus_one = f.add(alpha, f.one());
        assert_eq!(alpha_sq, alpha_plus_one);
        assert_eq!(alpha_sq.index(), 3);
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for (p, e) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4)] {
            let f = field_create(p, e).unwrap();
            let q = f.order();
            let els: Vec<FieldElement> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.zero()), a);
                assert_eq!(f.mul(a, f.one()), a);
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "distributivity in GF({q})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for (p, e) in [(2u64, 4u32), (3, 2), (5, 2)] {
            let f = field_create(p, e).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.frobenius(f.add(a, b));
                    let rhs = f.add(f.frobenius(a), f.frobenius(b));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn gf9_has_an_element_of_order_eight() {
        let f = field_create(3, 2).unwrap();
        let gen = f.primitive_element();
        assert_eq!(f.multiplicative_order(gen).unwrap(), 8);
    }

    #[test]
    fn orders_divide_group_order() {
        let f = field_create(2, 4).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(15 % f.multiplicative_order(a).unwrap(), 0);
        }
    }

    #[test]
    fn arith_detects_field_mismatch_and_zero_division() {
        let f4 = field_create(2, 2).unwrap();
        let f8 = field_create(2, 3).unwrap();
        let a = f4.one();
        let b = f8.one();
        assert!(matches!(
            f4.arith(a, b, ArithOp::Add),
            Err(Error::FieldMismatch { expected: 4, got: 8 })
        ));
        assert!(matches!(
            f4.arith(a, f4.zero(), ArithOp::Div),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn cyclotomic_cosets_mod_15() {
        assert_eq!(cyclotomic_coset(0, 15, 2), vec![0]);
        assert_eq!(cyclotomic_coset(1, 15, 2), vec![1, 2, 4, 8]);
        assert_eq!(cyclotomic_coset(3, 15, 2), vec![3, 6, 9, 12]);
        assert_eq!(cyclotomic_coset(5, 15, 2), vec![5, 10]);
        // over GF(4) the cosets mod 15 are smaller
        assert_eq!(cyclotomic_coset(1, 15, 4), vec![1, 4]);
        assert_eq!(cyclotomic_coset(2, 15, 4), vec![2, 8]);
    }

    #[test]
    fn polynomial_divmod_invariant() {
        let f = field_create(2, 2).unwrap();
        let a = Polynomial::from_indices(&f, &[1, 2, 3, 0, 1]);
        let b = Polynomial::from_indices(&f, &[2, 1, 1]);
        let (quot, rem) = a.divmod(&f, &b).unwrap();
        let recon = quot.mul(&f, &b).add(&f, &rem);
        assert_eq!(recon, a);
        assert!(rem.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn minimal_polynomial_of_zero_and_one() {
        let base = field_create(2, 1).unwrap();
        let ext = field_create(2, 4).unwrap();
        let emb = FieldEmbedding::new(&base, &ext).unwrap();
        let mp0 = emb.minimal_polynomial(ext.zero()).unwrap();
        assert_eq!(mp0.coeff_indices(), &[0, 1]); // x
        let mp1 = emb.minimal_polynomial(ext.one()).unwrap();
        assert_eq!(mp1.coeff_indices(), &[1, 1]); // x + 1
    }

    #[test]
    fn minimal_polynomial_of_primitive_element_gf16() {
        let base = field_create(2, 1).unwrap();
        let ext = field_create(2, 4).unwrap();
        let emb = FieldEmbedding::new(&base, &ext).unwrap();
        let alpha = ext.residue_x().unwrap();
        assert_eq!(ext.multiplicative_order(alpha).unwrap(), 15);
        let mp = emb.minimal_polynomial(alpha).unwrap();
        // x is a root of the reducing polynomial x⁴ + x + 1
        assert_eq!(mp.coeff_indices(), &[1, 1, 0, 0, 1]);
        // degree equals the coset size of 1
        assert_eq!(mp.degree().unwrap(), cyclotomic_coset(1, 15, 2).len());
        // it vanishes on the whole Frobenius orbit
        let lifted = Polynomial::from_indices(&ext, mp.coeff_indices());
        let mut gamma = alpha;
        for _ in 0..4 {
            assert!(lifted.eval(&ext, gamma).is_zero());
            gamma = ext.mul(gamma, gamma);
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let base = field_create(2, 2).unwrap();
        let ext = field_create(2, 4).unwrap();
        let emb = FieldEmbedding::new(&base, &ext).unwrap();
        for a in base.elements() {
            for b in base.elements() {
                let add = emb.embed(base.add(a, b)).unwrap();
                assert_eq!(add, ext.add(emb.embed(a).unwrap(), emb.embed(b).unwrap()));
                let mul = emb.embed(base.mul(a, b)).unwrap();
                assert_eq!(mul, ext.mul(emb.embed(a).unwrap(), emb.embed(b).unwrap()));
            }
        }
        // projection round-trips
        for a in base.elements() {
            assert_eq!(emb.project(emb.embed(a).unwrap()).unwrap(), a);
        }
    }

    #[test]
    fn minimal_polynomial_over_gf4_subfield() {
        let base = field_create(2, 2).unwrap();
        let ext = field_create(2, 4).unwrap();
        let emb = FieldEmbedding::new(&base, &ext).unwrap();
        let alpha = ext.residue_x().unwrap();
        let mp = emb.minimal_polynomial(alpha).unwrap();
        // coset of 1 mod 15 over GF(4) is {1, 4} → degree 2
        assert_eq!(mp.degree().unwrap(), 2);
        assert!(mp.is_monic());
    }
}
