//! Dense complex linear algebra shared by the representation and simulation
//! layers. Matrices are `nalgebra` dynamic matrices over `Complex<f64>`;
//! everything here is small-and-dense by design (qudit dimensions, not
//! many-body dimensions, except where a contract explicitly allows the full
//! register space).

use nalgebra::DMatrix;
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);

/// Kronecker product of a list of matrices, left factor slowest
/// (`kron_list([A, B]) = A ⊗ B`). An empty list gives the 1×1 identity.
pub fn kron_list(mats: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for m in mats {
        out = out.kronecker(m);
    }
    out
}

/// Frobenius distance `‖a − b‖_F`.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// Distance between `a` and `b` minimized over a global phase on `b`:
/// `min_φ ‖a − e^{iφ} b‖_F`. The optimal phase has a closed form,
/// `φ = arg tr(b† a)`; when the overlap vanishes the plain distance is
/// returned.
pub fn phase_free_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: C64 = (b.adjoint() * a).trace();
    if overlap.norm() < 1e-300 {
        return frobenius_distance(a, b);
    }
    let phase = overlap / overlap.norm();
    (a - b.map(|z| z * phase)).norm()
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= tol
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    (m * m.adjoint() - CMatrix::identity(n, n)).norm() <= tol
}

/// Spectral norm (largest |eigenvalue|) of a Hermitian matrix.
pub fn spectral_norm_hermitian(m: &CMatrix) -> f64 {
    debug_assert!(is_hermitian(m, 1e-9 * (1.0 + m.norm())));
    if m.nrows() == 0 {
        return 0.0;
    }
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Eigendecomposition of a unitary matrix: returns an orthonormal eigenbasis
/// `V` (columns) and eigenphases `θ_j ∈ (−π, π]` with
/// `U = V diag(e^{iθ}) V†`.
///
/// A unitary is normal, so it is simultaneously diagonalizable with the two
/// commuting Hermitian matrices `A = (U + U†)/2` and `B = (U − U†)/2i`. We
/// eigendecompose `A`, then rotate inside each (near-)degenerate eigenspace
/// of `A` to diagonalize the restriction of `B`. This uses only Hermitian
/// solves, which keeps the basis orthonormal even for repeated eigenvalues.
pub fn unitary_eigen(u: &CMatrix) -> (CMatrix, Vec<f64>) {
    assert!(u.is_square(), "unitary_eigen needs a square matrix");
    debug_assert!(is_unitary(u, 1e-10 * (1.0 + u.nrows() as f64)));
    let n = u.nrows();
    let a = (u + u.adjoint()).map(|z| z * 0.5);
    let b = (u - u.adjoint()).map(|z| z * Complex::new(0.0, -0.5));

    let eig = a.symmetric_eigen();
    // Deterministic column order: sort by the eigenvalue of A.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut v = CMatrix::zeros(n, n);
    let mut avals = vec![0.0f64; n];
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &eig.eigenvectors.column(src));
        avals[dst] = eig.eigenvalues[src];
    }

    // Rotate within clusters of A-eigenvalues so that B is diagonal there too.
    let cluster_tol = 1e-8;
    let mut lo = 0;
    while lo < n {
        let mut hi = lo + 1;
        while hi < n && (avals[hi] - avals[hi - 1]).abs() <= cluster_tol {
            hi += 1;
        }
        if hi - lo > 1 {
            let vc = v.columns(lo, hi - lo).into_owned();
            let bsub = vc.adjoint() * &b * &vc;
            let bsym = (&bsub + bsub.adjoint()).map(|z| z * 0.5);
            let sub = bsym.symmetric_eigen();
            let rotated = vc * sub.eigenvectors;
            for (off, col) in rotated.column_iter().enumerate() {
                v.set_column(lo + off, &col);
            }
        }
        lo = hi;
    }

    let phases: Vec<f64> = (0..n)
        .map(|j| {
            let col = v.column(j);
            let uv = u * col;
            let lambda: C64 = col.dotc(&uv); // v† (U v)
            lambda.arg()
        })
        .collect();

    debug_assert!({
        let d = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex::from_polar(1.0, phases[r])
            } else {
                ZERO
            }
        });
        (u - &v * d * v.adjoint()).norm() <= 1e-10 * (1.0 + n as f64)
    });

    (v, phases)
}

/// Gauss–Legendre nodes and weights on [0, 1].
///
/// Computed by Newton iteration on the Legendre polynomial recurrence; good
/// to machine precision for the modest node counts used here.
pub fn gauss_legendre_01(nodes: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(nodes >= 1, "need at least one quadrature node");
    let n = nodes;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess for the i-th root (descending order).
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-15 {
                let (_, d2) = legendre_with_derivative(n, t);
                dp = d2;
                break;
            }
        }
        let weight = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    // Affine map [-1, 1] → [0, 1].
    let points = x.iter().map(|v| 0.5 * (v + 1.0)).collect();
    let weights = w.iter().map(|v| 0.5 * v).collect();
    (points, weights)
}

/// Value and derivative of the Legendre polynomial P_n at `t`.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}
