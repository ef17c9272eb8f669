//! Small dense complex-matrix helpers for 2- and 3-level systems.
//!
//! The density matrices here are at most 3×3, so a hand-rolled cyclic Jacobi
//! eigensolver is simpler and more robust than pulling in a LAPACK backend.

use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    let mut out = Array2::zeros((a.ncols(), a.nrows()));
    for ((i, j), v) in a.indexed_iter() {
        out[(j, i)] = v.conj();
    }
    out
}

/// Trace.
pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().iter().sum()
}

/// Max absolute deviation from Hermiticity, ‖A − A†‖_max.
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let ad = dagger(a);
    a.iter()
        .zip(ad.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
pub fn hermitian_eigenvalues(a: &Array2<C64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();
    // symmetrize away roundoff so the rotations stay well conditioned
    let md = dagger(&m);
    m.zip_mut_with(&md, |x, y| *x = (*x + *y) * 0.5);

    let scale = m.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // phase that makes the pivot real, then a real Jacobi angle;
                // the rotation is U with U[p][p]=U[q][q]=c, U[q][p]=s·e^{-iφ},
                // U[p][q]=-s·e^{iφ}, applied as A ← U† A U
                let phase = apq / apq.norm();
                let g = apq.norm();
                let theta = 0.5 * (2.0 * g).atan2(app - aqq);
                let (c, s) = (theta.cos(), theta.sin());
                // columns: B = A U
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = aip * c + aiq * phase.conj() * s;
                    m[(i, q)] = -aip * phase * s + aiq * c;
                }
                // rows: A' = U† B
                for j in 0..n {
                    let bpj = m[(p, j)];
                    let bqj = m[(q, j)];
                    m[(p, j)] = bpj * c + bqj * phase * s;
                    m[(q, j)] = -bpj * phase.conj() * s + bqj * c;
                }
            }
        }
    }
    let mut eig: Vec<f64> = m.diag().iter().map(|v| v.re).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_hermitian_eigenvalue(a: &Array2<C64>) -> f64 {
    hermitian_eigenvalues(a)[0]
}

/// Orthonormal dressed states of the driven two-level block
/// h = [[0, Ω/2], [Ω/2, −δ]] in the {|g⟩, |e⟩} basis.
///
/// Returns `(upper, lower)` with eigenvalues (−δ ± Λ)/2, Λ = √(δ²+Ω²).
/// For blue detuning (δ > 0) the lower dressed state connects adiabatically
/// to the exciton as Ω → 0, the upper one to the ground state.
pub fn dressed_basis(omega: f64, delta: f64) -> ([f64; 2], [f64; 2]) {
    let lambda = (delta * delta + omega * omega).sqrt();
    // avoid cancellation in the small eigenvalue: e_up·e_lo = −Ω²/4
    let (e_up, e_lo) = if delta >= 0.0 {
        let lo = -0.5 * (delta + lambda);
        let up = if lo == 0.0 { 0.0 } else { -omega * omega / (4.0 * lo) };
        (up, lo)
    } else {
        let up = 0.5 * (-delta + lambda);
        let lo = if up == 0.0 { 0.0 } else { -omega * omega / (4.0 * up) };
        (up, lo)
    };
    // eigenvector of [[0, w/2],[w/2, -d]] for eigenvalue e is (w/2, e)
    let norm_up = ((omega / 2.0) * (omega / 2.0) + e_up * e_up).sqrt();
    let norm_lo = ((omega / 2.0) * (omega / 2.0) + e_lo * e_lo).sqrt();
    if norm_up < 1e-300 || norm_lo < 1e-300 {
        // degenerate (omega = delta = 0): any basis works
        return ([1.0, 0.0], [0.0, 1.0]);
    }
    (
        [omega / 2.0 / norm_up, e_up / norm_up],
        [omega / 2.0 / norm_lo, e_lo / norm_lo],
    )
}
