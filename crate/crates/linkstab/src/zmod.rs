//! Small dense linear algebra over the prime field `Z_k`, used for
//! tableau rank checks, stabilizer counting, and quadratic-form
//! elimination.

/// Reduced row echelon form in place. Returns `(pivot row, pivot col)`
/// pairs in order; rows below the last pivot end up zero.
pub(crate) fn rref(mat: &mut [Vec<u64>], k: u64) -> Vec<(usize, usize)> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| mat[i][c] % k != 0) else {
            continue;
        };
        mat.swap(r, p);
        let inv = inv_mod(mat[r][c], k);
        for v in mat[r].iter_mut() {
            *v = *v * inv % k;
        }
        for i in 0..rows {
            if i != r && mat[i][c] % k != 0 {
                let f = mat[i][c] % k;
                for c2 in 0..cols {
                    let sub = f * mat[r][c2] % k;
                    mat[i][c2] = (mat[i][c2] + k - sub) % k;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Rank of a matrix over `Z_k`.
pub(crate) fn rank(mat: &[Vec<u64>], k: u64) -> usize {
    let mut m: Vec<Vec<u64>> = mat.iter().map(|r| r.iter().map(|&v| v % k).collect()).collect();
    rref(&mut m, k).len()
}

/// Basis of the right kernel `{x : M x = 0}`.
pub(crate) fn kernel_basis(mat: &[Vec<u64>], cols: usize, k: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = mat.iter().map(|r| r.iter().map(|&v| v % k).collect()).collect();
    let pivots = rref(&mut m, k);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for f in 0..cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut x = vec![0u64; cols];
        x[f] = 1;
        for &(r, c) in &pivots {
            x[c] = (k - m[r][f] % k) % k;
        }
        basis.push(x);
    }
    basis
}

pub(crate) fn inv_mod(a: u64, k: u64) -> u64 {
    // k prime, a nonzero mod k
    let mut acc = 1u64;
    let mut b = a % k;
    let mut e = k - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % k;
        }
        b = b * b % k;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let k = 5;
        let m = vec![vec![1, 2, 3], vec![0, 1, 4], vec![1, 3, 2]];
        // row3 = row1 + row2 mod 5, so rank 2 and kernel dim 1
        assert_eq!(rank(&m, k), 2);
        let kb = kernel_basis(&m, 3, k);
        assert_eq!(kb.len(), 1);
        let x = &kb[0];
        for row in &m {
            let dot: u64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            assert_eq!(dot % k, 0);
        }
    }

    #[test]
    fn full_rank_has_empty_kernel() {
        let k = 3;
        let m = vec![vec![1, 0], vec![1, 1]];
        assert_eq!(rank(&m, k), 2);
        assert!(kernel_basis(&m, 2, k).is_empty());
    }
}
