//! Fusion data for the SO(3) theory at level `k = r + 3`: the integer
//! spins of the level-`r` SU(2) category, their 0/1 fusion table, the
//! sine-formula S-matrix, and Verlinde dimensions of genus-`g`
//! surfaces. Everything here is finite combinatorics plus a float
//! S-matrix whose outputs are integers with wide rounding margins.

use crate::error::{Error, Result};

const ROUNDING_TOL: f64 = 1e-6;

fn check_r(r: u64) -> Result<()> {
    if r < 5 || r % 2 == 0 {
        return Err(Error::InvalidR(r));
    }
    let mut d = 3;
    while d * d <= r {
        if r % d == 0 {
            return Err(Error::InvalidR(r));
        }
        d += 2;
    }
    Ok(())
}

/// 0/1 fusion multiplicities of the integer spins `0..=(r-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionTable {
    r: u64,
    count: usize,
    n: Vec<u8>,
}

impl FusionTable {
    pub fn r(&self) -> u64 {
        self.r
    }

    /// The Chern-Simons level this category belongs to, for display.
    pub fn level_k(&self) -> u64 {
        self.r + 3
    }

    pub fn anyon_count(&self) -> usize {
        self.count
    }

    /// Multiplicity `N_{ij}^ℓ` (zero or one).
    pub fn n(&self, i: usize, j: usize, l: usize) -> u64 {
        self.n[(i * self.count + j) * self.count + l] as u64
    }

    /// `Σ_{i,j,ℓ} (N_{ij}^ℓ)²`, the genus-two dimension by gluing two
    /// pairs of pants.
    pub fn squared_entry_sum(&self) -> u64 {
        self.n.iter().map(|&v| (v as u64) * (v as u64)).sum()
    }
}

/// Builds the fusion table by the truncated angular-momentum rule:
/// `N_{ij}^ℓ = 1` iff `|i−j| ≤ ℓ ≤ min(i+j, r−i−j)`.
pub fn fusion_rules(r: u64) -> Result<FusionTable> {
    check_r(r)?;
    let count = ((r + 1) / 2) as usize;
    let mut n = vec![0u8; count * count * count];
    for i in 0..count {
        for j in 0..count {
            let lo = i.abs_diff(j);
            let hi = (i + j).min((r as usize) - i - j);
            for l in 0..count {
                if lo <= l && l <= hi {
                    n[(i * count + j) * count + l] = 1;
                }
            }
        }
    }
    Ok(FusionTable { r, count, n })
}

/// The real symmetric S-matrix of the integer-spin sector:
/// `S_ab = (2/√(r+2)) sin(π (2a+1)(2b+1) / (r+2))`.
pub fn so3_s_matrix(r: u64) -> Result<Vec<Vec<f64>>> {
    check_r(r)?;
    let count = ((r + 1) / 2) as usize;
    let q = (r + 2) as f64;
    let norm = 2.0 / q.sqrt();
    let mut s = vec![vec![0f64; count]; count];
    for (a, row) in s.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let angle = std::f64::consts::PI * ((2 * a + 1) * (2 * b + 1)) as f64 / q;
            *v = norm * angle.sin();
        }
    }
    Ok(s)
}

/// Dimension of the genus-`g` surface Hilbert space by the Verlinde
/// formula, `Σ_a (S_{0a})^(2−2g)`, rounded to the nearest integer with
/// the residue asserted below `1e-6`.
pub fn verlinde_dim(r: u64, genus: u64) -> Result<u64> {
    let s = so3_s_matrix(r)?;
    let e = 2i32 - 2 * genus as i32;
    let total: f64 = s[0].iter().map(|v| v.powi(e)).sum();
    let rounded = total.round();
    if (total - rounded).abs() >= ROUNDING_TOL || rounded < 1.0 {
        return Err(Error::RoundingFailure {
            value: total,
            tol: ROUNDING_TOL,
        });
    }
    Ok(rounded as u64)
}

/// Whether two tori fit inside the genus-two surface:
/// `((r+1)/2)² ≤ verlinde_dim(r, 2)`.
pub fn dimension_inequality(r: u64) -> Result<bool> {
    let tori = ((r + 1) / 2) * ((r + 1) / 2);
    Ok(tori <= verlinde_dim(r, 2)?)
}
