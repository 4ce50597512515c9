//! Exact integer linear algebra for the verification suites: fraction-free
//! Gaussian elimination for ranks/kernels, plus a small unimodular search.

use num_bigint::BigInt;
use num_traits::Zero;

/// Dense integer matrix, row major.
#[derive(Debug, Clone)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    /// Rank over the rationals via Bareiss fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<BigInt>, i: usize, j: usize| m[i * cols + j].clone();
        let mut prev = BigInt::from(1);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            if row >= rows {
                break;
            }
            // find pivot
            let pivot_row = (row..rows).find(|&i| !at(&m, i, col).is_zero());
            let Some(p) = pivot_row else { continue };
            if p != row {
                for j in 0..cols {
                    m.swap(row * cols + j, p * cols + j);
                }
            }
            let pivot = at(&m, row, col);
            for i in (row + 1)..rows {
                for j in (col + 1)..cols {
                    let v = (&pivot * at(&m, i, j) - at(&m, i, col) * at(&m, row, j)) / &prev;
                    m[i * cols + j] = v;
                }
                m[i * cols + col] = BigInt::zero();
            }
            prev = pivot;
            rank += 1;
            row += 1;
        }
        rank
    }

    /// True when the kernel is trivial, i.e. the columns are independent.
    pub fn kernel_is_trivial(&self) -> bool {
        self.rank() == self.cols
    }
}

/// Searches GL2(Z) matrices with entries in [-range, range] for a base change
/// with U^T A U = B. Returns the first match in scan order.
pub fn find_unimodular_change(a: &[[i64; 2]; 2], b: &[[i64; 2]; 2], range: i64) -> Option<[[i64; 2]; 2]> {
    let vals = -range..=range;
    for u00 in vals.clone() {
        for u01 in vals.clone() {
            for u10 in vals.clone() {
                for u11 in vals.clone() {
                    let det = u00 * u11 - u01 * u10;
                    if det != 1 && det != -1 {
                        continue;
                    }
                    // (U^T A U)_{kl} = sum_{i,j} U_{ik} A_{ij} U_{jl}
                    let u = [[u00, u01], [u10, u11]];
                    let mut ok = true;
                    for k in 0..2 {
                        for l in 0..2 {
                            let mut s = 0i64;
                            for i in 0..2 {
                                for j in 0..2 {
                                    s += u[i][k] * a[i][j] * u[j][l];
                                }
                            }
                            if s != b[k][l] {
                                ok = false;
                            }
                        }
                    }
                    if ok {
                        return Some(u);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity() {
        let m = IntMatrix::from_rows(vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
        ]);
        assert_eq!(m.rank(), 2);
        assert!(m.kernel_is_trivial());
    }

    #[test]
    fn rank_detects_dependence() {
        let m = IntMatrix::from_rows(vec![
            vec![BigInt::from(2), BigInt::from(4)],
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(3), BigInt::from(6)],
        ]);
        assert_eq!(m.rank(), 1);
        assert!(!m.kernel_is_trivial());
    }

    #[test]
    fn unimodular_change_exists_for_hirzebruch_pairing() {
        // [[1,1],[1,0]] is equivalent to diag(1,-1)
        let a = [[1, 1], [1, 0]];
        let b = [[1, 0], [0, -1]];
        let u = find_unimodular_change(&a, &b, 2).expect("change of basis");
        let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
        assert!(det == 1 || det == -1);
    }
}
