//! Small dense matrix helpers: matrix exponential and a rank-tolerant 2×2 Cholesky.

use nalgebra::{DMatrix, Matrix2, SMatrix};

// Padé [13/13] coefficients and the 1-norm threshold for degree 13 (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA_13: f64 = 5.371920351148152;

fn one_norm<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
///
/// Non-finite input yields a matrix of NaN.
pub fn expm<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = one_norm(m);
    if !norm.is_finite() {
        return SMatrix::from_element(f64::NAN);
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m * 2f64.powi(-s);

    let id = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let b = &PADE13;

    let u_inner =
        a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9]) + a6 * b[7] + a4 * b[5] + a2 * b[3] + id * b[1];
    let u = a * u_inner;
    let v =
        a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8]) + a6 * b[6] + a4 * b[4] + a2 * b[2] + id * b[0];

    let p = v + u;
    let q = v - u;
    // const-generic LU needs typenum bounds, so the solve goes through a dynamic matrix
    let qd = DMatrix::from_column_slice(N, N, q.as_slice());
    let pd = DMatrix::from_column_slice(N, N, p.as_slice());
    let mut r = match qd.lu().solve(&pd) {
        Some(r) => SMatrix::<f64, N, N>::from_column_slice(r.as_slice()),
        None => return SMatrix::from_element(f64::NAN),
    };
    for _ in 0..s {
        r = r * r;
    }
    r
}

/// Lower-triangular `h` with `h * hᵀ = s` for a symmetric positive semi-definite 2×2 `s`.
///
/// A pivot that is zero (or negative from rounding) is zeroed instead of failing, which
/// yields a rank-deficient factor.
pub fn cholesky2(s: &Matrix2<f64>) -> Matrix2<f64> {
    let scale = s.amax().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;
    let mut h = Matrix2::zeros();
    let d0 = s[(0, 0)];
    if d0 > tol {
        let l00 = d0.sqrt();
        h[(0, 0)] = l00;
        h[(1, 0)] = s[(1, 0)] / l00;
    }
    let rem = s[(1, 1)] - h[(1, 0)] * h[(1, 0)];
    if rem > tol {
        h[(1, 1)] = rem.sqrt();
    } else if d0 <= tol && s[(1, 1)] > tol {
        h[(1, 1)] = s[(1, 1)].sqrt();
    }
    h
}

/// Eigenvalue moduli of a real 2×2 matrix, largest first.
pub fn eigen_moduli2(a: &Matrix2<f64>) -> [f64; 2] {
    let tr = a.trace();
    let det = a.determinant();
    let disc = tr * tr / 4.0 - det;
    let mut out = if disc >= 0.0 {
        let r = disc.sqrt();
        [(tr / 2.0 + r).abs(), (tr / 2.0 - r).abs()]
    } else {
        // complex pair: |λ|² = det
        let m = det.abs().sqrt();
        [m, m]
    };
    if out[0] < out[1] {
        out.swap(0, 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Matrix4};

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(expm(&Matrix4::<f64>::zeros()), Matrix4::identity());
        assert_eq!(expm(&Matrix2::<f64>::zeros()), Matrix2::identity());
    }

    #[test]
    fn exp_of_diagonal() {
        let m = Matrix2::new(0.7, 0.0, 0.0, -3.2);
        let e = expm(&m);
        assert!((e[(0, 0)] - 0.7f64.exp()).abs() < 1e-15 * 0.7f64.exp() * 4.0);
        assert!((e[(1, 1)] - (-3.2f64).exp()).abs() < 1e-14 * (-3.2f64).exp());
        assert_eq!(e[(0, 1)], 0.0);
        assert_eq!(e[(1, 0)], 0.0);
    }

    #[test]
    fn exp_of_large_diagonal_uses_squaring() {
        let m = Matrix2::new(-40.0, 0.0, 0.0, 12.0);
        let e = expm(&m);
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(e[(0, 0)], (-40f64).exp()) < 1e-12);
        assert!(rel(e[(1, 1)], 12f64.exp()) < 1e-12);
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, t], [-t, 0]]) is a rotation by t
        let t = 1.3f64;
        let e = expm(&Matrix2::new(0.0, t, -t, 0.0));
        let expected = Matrix2::new(t.cos(), t.sin(), -t.sin(), t.cos());
        assert!((e - expected).amax() < 1e-15 * 8.0);
    }

    #[test]
    fn non_finite_input_gives_nan() {
        let e = expm(&Matrix2::new(f64::NAN, 0.0, 0.0, 1.0));
        assert!(e.iter().all(|v| v.is_nan()));
    }

    #[test]
    fn cholesky_full_rank() {
        let s = Matrix2::new(4.0, 2.0, 2.0, 3.0);
        let h = cholesky2(&s);
        assert_eq!(h[(0, 1)], 0.0);
        assert!((h * h.transpose() - s).amax() < 1e-15);
    }

    #[test]
    fn cholesky_rank_deficient() {
        let s = Matrix2::new(1.0, 2.0, 2.0, 4.0);
        let h = cholesky2(&s);
        assert_eq!(h[(1, 1)], 0.0);
        assert!((h * h.transpose() - s).amax() < 1e-14);

        let z = cholesky2(&Matrix2::zeros());
        assert_eq!(z, Matrix2::zeros());

        let only_second = cholesky2(&Matrix2::new(0.0, 0.0, 0.0, 9.0));
        assert!(
            (only_second * only_second.transpose() - Matrix2::new(0.0, 0.0, 0.0, 9.0)).amax()
                < 1e-15
        );
    }

    #[test]
    fn eigen_moduli_real_and_complex() {
        let m = eigen_moduli2(&Matrix2::new(0.5, 0.0, 0.0, -0.8));
        assert!((m[0] - 0.8).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);
        let r = eigen_moduli2(&Matrix2::new(0.0, 0.9, -0.9, 0.0));
        assert!((r[0] - 0.9).abs() < 1e-15 && (r[1] - 0.9).abs() < 1e-15);
    }
}
