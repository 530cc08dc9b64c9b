//! Exact integer row reduction: Hermite normal form and saturated kernels.

use crate::scalar::Int;

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Returns the nonzero rows in echelon order with positive pivots and every entry
/// above a pivot reduced into `[0, pivot)`. Equal lattices give identical output.
pub fn hnf_rows<T: Int>(rows: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for j in 0..ncols {
        if r == m.len() {
            break;
        }
        // Euclid on column j among rows r.. until a single nonzero entry remains.
        loop {
            let mut pivot: Option<usize> = None;
            for i in r..m.len() {
                if !m[i][j].is_zero() && pivot.map_or(true, |p| m[i][j].abs() < m[p][j].abs()) {
                    pivot = Some(i);
                }
            }
            let Some(p) = pivot else { break };
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if !m[i][j].is_zero() {
                    let q = m[i][j].div_floor(&m[r][j]);
                    sub_multiple(&mut m, i, r, &q);
                    if !m[i][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < m.len() && !m[r][j].is_zero() {
            if m[r][j].is_negative() {
                for v in m[r].iter_mut() {
                    *v = -v.clone();
                }
            }
            for i in 0..r {
                let q = m[i][j].div_floor(&m[r][j]);
                if !q.is_zero() {
                    sub_multiple(&mut m, i, r, &q);
                }
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

fn sub_multiple<T: Int>(m: &mut [Vec<T>], target: usize, source: usize, q: &T) {
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(src) {
        *t = t.clone() - q.clone() * s;
    }
}

/// Basis of `{v in Z^n : M v = 0}` for the integer matrix `M` given by its rows, returned
/// in Hermite normal form. The kernel is automatically saturated.
pub fn integer_kernel<T: Int>(matrix: &[Vec<T>], n: usize) -> Vec<Vec<T>> {
    let m = matrix.len();
    // Rows of [M^T | I]; row operations act on the identity block as a unimodular U.
    let aug: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row: Vec<T> = matrix.iter().map(|r| r[i].clone()).collect();
            row.extend((0..n).map(|k| if k == i { T::one() } else { T::zero() }));
            row
        })
        .collect();
    let reduced = hnf_rows(&aug);
    let rank = reduced.iter().filter(|row| row[..m].iter().any(|v| !v.is_zero())).count();
    let kernel: Vec<Vec<T>> = reduced[rank..].iter().map(|row| row[m..].to_vec()).collect();
    hnf_rows(&kernel)
}

/// `M v` for a row-major integer matrix.
pub fn mat_vec<T: Int>(matrix: &[Vec<T>], v: &[T]) -> Vec<T> {
    matrix
        .iter()
        .map(|row| row.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}
