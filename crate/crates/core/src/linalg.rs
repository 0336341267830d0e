//! Small dense matrix helpers.

use nalgebra::{DMatrix, DVector};

pub type Mat4 = [[f64; 4]; 4];

/// Determinant of a 4x4 matrix by cofactor expansion along the first row.
pub fn det4(m: &Mat4) -> f64 {
    let minor = |col: usize| {
        let mut s = [[0.0; 3]; 3];
        for r in 1..4 {
            let mut c2 = 0;
            for c in 0..4 {
                if c != col {
                    s[r - 1][c2] = m[r][c];
                    c2 += 1;
                }
            }
        }
        s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1])
            - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
            + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0])
    };
    (0..4).map(|c| if c % 2 == 0 { 1.0 } else { -1.0 } * m[0][c] * minor(c)).sum()
}

pub fn mat4_vec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// Divides each row by its Euclidean norm. Zero rows are left untouched.
pub fn normalize_rows(m: &mut DMatrix<f64>) {
    for mut row in m.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= n;
        }
    }
}

/// Determinant after row normalization. Same zeros and sign as the raw
/// determinant, but bounded by 1 in magnitude.
pub fn row_normalized_det(mut m: DMatrix<f64>) -> f64 {
    normalize_rows(&mut m);
    m.determinant()
}

/// Right singular vector for the smallest singular value, together with that
/// singular value, of the row-normalized matrix.
pub fn null_vector(mut m: DMatrix<f64>) -> (DVector<f64>, f64) {
    normalize_rows(&mut m);
    let n = m.ncols();
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, s)| (i, *s))
        .expect("non-empty matrix");
    let v = DVector::from_iterator(n, v_t.row(idx).iter().copied());
    (v, sigma)
}
