use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix; a single off-diagonal array keeps it
/// symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    off_sq: Vec<f64>,
    pivot_min: f64,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!("{} diagonal vs {} off-diagonal entries", diag.len(), off.len()),
            });
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "assembling the tridiagonal matrix",
            });
        }
        let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
        let max_sq = off_sq.iter().copied().fold(1.0, f64::max);
        Ok(Self {
            diag,
            off,
            off_sq,
            pivot_min: f64::MIN_POSITIVE * max_sq,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diag(&self) -> &[f64] {
        &self.off
    }

    /// Entry (i, j) of the full matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence / LDLᵀ inertia).
    pub fn sturm_count(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = self.diag[0] - x;
        for i in 0.. {
            if d.abs() < self.pivot_min {
                d = -self.pivot_min;
            }
            if d < 0.0 {
                count += 1;
            }
            if i + 1 == self.diag.len() {
                break;
            }
            d = self.diag[i + 1] - x - self.off_sq[i] / d;
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            (lo.min(self.diag[i] - r), hi.max(self.diag[i] + r))
        })
    }

    /// The `k` smallest eigenvalues in ascending order, bisected to full precision.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        if k > self.dim() {
            return Err(Error::TooManyEigenvalues {
                requested: k,
                dimension: self.dim(),
            });
        }
        let (lo, hi) = self.gershgorin();
        let mut out = Vec::with_capacity(k);
        let mut floor = lo;
        for j in 0..k {
            let (mut a, mut b) = (floor, hi);
            for _ in 0..2000 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.sturm_count(mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            let value = 0.5 * (a + b);
            out.push(value);
            floor = a;
        }
        Ok(out)
    }
}
