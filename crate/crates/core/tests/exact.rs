//! Kernel characterization checked in exact rational arithmetic.

use num_rational::Ratio;
use num_traits::{One, Zero};

use framescale::fmap::{f_of_frame, f_of_vector};
use framescale::Frame64;

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

/// `Σ u_k F(φ_k)`.
fn kernel_image(frame: &[Vec<Q>], u: &[Q]) -> Vec<Q> {
    let cols: Vec<Vec<Q>> = frame.iter().map(|v| f_of_vector(v).unwrap()).collect();
    (0..cols[0].len()).map(|i| cols.iter().zip(u).fold(Q::zero(), |acc, (c, &w)| acc + c[i] * w)).collect()
}

/// `Σ u_k φ_k φ_kᵀ`.
fn operator(frame: &[Vec<Q>], u: &[Q]) -> Vec<Vec<Q>> {
    let n = frame[0].len();
    let mut s = vec![vec![Q::zero(); n]; n];
    for (v, &w) in frame.iter().zip(u) {
        for i in 0..n {
            for j in 0..n {
                s[i][j] += w * v[i] * v[j];
            }
        }
    }
    s
}

fn is_multiple_of_identity(s: &[Vec<Q>]) -> bool {
    let n = s.len();
    (0..n).all(|i| (0..n).all(|j| if i == j { s[i][i] == s[0][0] } else { s[i][j].is_zero() }))
}

fn to_f64(frame: &[Vec<Q>]) -> Frame64 {
    Frame64::from_columns(
        &frame.iter().map(|v| v.iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect()).collect::<Vec<_>>(),
    )
    .unwrap()
}

/// Rational frames with Pythagorean directions: (3/5, 4/5) and friends.
fn fixtures() -> Vec<(Vec<Vec<Q>>, Vec<Q>)> {
    let one = Q::one();
    let zero = Q::zero();
    vec![
        (vec![vec![one, zero], vec![zero, one]], vec![q(1, 2), q(1, 2)]),
        // Two orthonormal bases: u = (1/4, 1/4, 1/4, 1/4).
        (
            vec![vec![one, zero], vec![zero, one], vec![q(3, 5), q(4, 5)], vec![q(-4, 5), q(3, 5)]],
            vec![q(1, 4); 4],
        ),
        // e1, e2 and (1,1): only (1/2, 1/2, 0) works; (1/3, 1/3, 1/3) does not.
        (vec![vec![one, zero], vec![zero, one], vec![one, one]], vec![q(1, 2), q(1, 2), zero]),
        (vec![vec![one, zero], vec![zero, one], vec![one, one]], vec![q(1, 3), q(1, 3), q(1, 3)]),
        // R³: standard basis plus (1,1,1)/1 with mismatched weights.
        (
            vec![vec![one, zero, zero], vec![zero, one, zero], vec![zero, zero, one], vec![one, one, zero]],
            vec![q(1, 3), q(1, 3), q(1, 3), zero],
        ),
        (
            vec![vec![one, zero, zero], vec![zero, one, zero], vec![zero, zero, one], vec![one, one, zero]],
            vec![q(1, 4), q(1, 4), q(1, 4), q(1, 4)],
        ),
    ]
}

#[test]
fn kernel_vectors_are_exactly_tight_scalings() {
    let mut kernel_hits = 0;
    for (frame, u) in fixtures() {
        let in_kernel = kernel_image(&frame, &u).iter().all(Zero::is_zero);
        let tight = is_multiple_of_identity(&operator(&frame, &u));
        assert_eq!(in_kernel, tight, "frame {frame:?} u {u:?}");
        kernel_hits += usize::from(in_kernel);
    }
    assert_eq!(kernel_hits, 4);
}

#[test]
fn floating_point_matrix_matches_rational_map() {
    for (frame, u) in fixtures() {
        let fm = f_of_frame(&to_f64(&frame)).unwrap();
        for (k, v) in frame.iter().enumerate() {
            let exact = f_of_vector(v).unwrap();
            for (a, b) in fm.column(k).iter().zip(&exact) {
                assert!((a - *b.numer() as f64 / *b.denom() as f64).abs() <= 1e-15);
            }
        }
        let uf: Vec<f64> = u.iter().map(|x| *x.numer() as f64 / *x.denom() as f64).collect();
        let exact_zero = kernel_image(&frame, &u).iter().all(Zero::is_zero);
        let s = to_f64(&frame).weighted_operator(&uf).unwrap();
        let level = s.trace() / s.rows() as f64;
        let defect = s.sub(&framescale::Matrix64::identity(s.rows()).scale(level)).unwrap().frobenius_norm();
        assert_eq!(exact_zero, defect <= 1e-10);
        assert_eq!(exact_zero, fm.residual(&uf).unwrap() <= 1e-12);
    }
}
