//! Dense exact linear operators on V^{\otimes N}, V = C^n.
//!
//! The composite index of (a_1, ..., a_N), a_i in 1..=n, is
//! sum (a_i - 1) n^{N-i}: site 1 is the most significant digit.

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{FieldMode, Scalar};

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("site {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("operator is singular")]
    Singular,
}

#[derive(Debug, Clone)]
pub struct SiteOperator {
    pub mode: FieldMode,
    pub n: usize,
    pub sites: usize,
    pub dim: usize,
    entries: Vec<Scalar>,
}

impl SiteOperator {
    pub fn zero(mode: &FieldMode, n: usize, sites: usize) -> Self {
        let dim = n.pow(sites as u32);
        SiteOperator {
            mode: mode.clone(),
            n,
            sites,
            dim,
            entries: vec![mode.zero(); dim * dim],
        }
    }

    pub fn identity(mode: &FieldMode, n: usize, sites: usize) -> Self {
        let mut m = Self::zero(mode, n, sites);
        for i in 0..m.dim {
            m.entries[i * m.dim + i] = mode.one();
        }
        m
    }

    pub fn from_fn<F>(mode: &FieldMode, n: usize, sites: usize, f: F) -> Self
    where
        F: Fn(usize, usize) -> Scalar,
    {
        let dim = n.pow(sites as u32);
        let entries = (0..dim * dim)
            .map(|idx| f(idx / dim, idx % dim))
            .collect();
        SiteOperator {
            mode: mode.clone(),
            n,
            sites,
            dim,
            entries,
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.entries[r * self.dim + c] = v;
    }

    /// Decompose a composite index into per-site digits in 1..=n.
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sites];
        for s in (0..self.sites).rev() {
            out[s] = idx % self.n + 1;
            idx /= self.n;
        }
        out
    }

    pub fn index_of(n: usize, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, a| acc * n + (a - 1))
    }

    pub fn mul(&self, rhs: &SiteOperator) -> SiteOperator {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let dim = self.dim;
        let mode = self.mode.clone();
        let rows: Vec<Vec<Scalar>> = (0..dim)
            .into_par_iter()
            .map(|r| {
                let mut acc = vec![mode.zero(); dim];
                for k in 0..dim {
                    let a = self.entry(r, k);
                    if a.is_structural_zero() {
                        continue;
                    }
                    for c in 0..dim {
                        let b = rhs.entry(k, c);
                        if b.is_structural_zero() {
                            continue;
                        }
                        acc[c] = &acc[c] + &(a * b);
                    }
                }
                acc
            })
            .collect();
        SiteOperator {
            mode: self.mode.clone(),
            n: self.n,
            sites: self.sites,
            dim,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn add(&self, rhs: &SiteOperator) -> SiteOperator {
        assert_eq!(self.dim, rhs.dim);
        let entries = self
            .entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| a + b)
            .collect();
        SiteOperator {
            mode: self.mode.clone(),
            n: self.n,
            sites: self.sites,
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, rhs: &SiteOperator) -> SiteOperator {
        assert_eq!(self.dim, rhs.dim);
        let entries = self
            .entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(a, b)| a - b)
            .collect();
        SiteOperator {
            mode: self.mode.clone(),
            n: self.n,
            sites: self.sites,
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, s: &Scalar) -> SiteOperator {
        SiteOperator {
            mode: self.mode.clone(),
            n: self.n,
            sites: self.sites,
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_structural_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_structural_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Exact equality; on failure returns a witness (row, col, lhs, rhs).
    pub fn equals_witness(&self, rhs: &SiteOperator) -> Result<(), (usize, usize, Scalar, Scalar)> {
        assert_eq!(self.dim, rhs.dim, "operator dimension mismatch");
        let bad = (0..self.dim * self.dim).into_par_iter().find_map_first(|i| {
            let (r, c) = (i / self.dim, i % self.dim);
            let d = self.entry(r, c) - rhs.entry(r, c);
            if d.is_zero() {
                None
            } else {
                Some((r, c))
            }
        });
        match bad {
            None => Ok(()),
            Some((r, c)) => Err((r, c, self.entry(r, c).clone(), rhs.entry(r, c).clone())),
        }
    }

    pub fn equals(&self, rhs: &SiteOperator) -> bool {
        self.equals_witness(rhs).is_ok()
    }

    /// Matrix-vector product over the field.
    pub fn mat_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                let mut acc = self.mode.zero();
                for c in 0..self.dim {
                    let a = self.entry(r, c);
                    if a.is_structural_zero() || v[c].is_structural_zero() {
                        continue;
                    }
                    acc = &acc + &(a * &v[c]);
                }
                acc
            })
            .collect()
    }

    /// Vector-matrix product (row vector from the left).
    pub fn vec_mat(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|c| {
                let mut acc = self.mode.zero();
                for r in 0..self.dim {
                    if v[r].is_structural_zero() {
                        continue;
                    }
                    let a = self.entry(r, c);
                    if a.is_structural_zero() {
                        continue;
                    }
                    acc = &acc + &(&v[r] * a);
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = self.mode.zero();
        for i in 0..self.dim {
            acc = &acc + self.entry(i, i);
        }
        acc
    }

    /// Exact inverse by Gauss-Jordan elimination over the field.
    pub fn inverse(&self) -> Result<SiteOperator, TensorError> {
        let dim = self.dim;
        let mut a: Vec<Vec<Scalar>> = (0..dim)
            .map(|r| (0..dim).map(|c| self.entry(r, c).clone()).collect())
            .collect();
        let mut inv: Vec<Vec<Scalar>> = (0..dim)
            .map(|r| {
                (0..dim)
                    .map(|c| if r == c { self.mode.one() } else { self.mode.zero() })
                    .collect()
            })
            .collect();
        for col in 0..dim {
            let pivot = (col..dim).find(|&r| !a[r][col].is_zero()).ok_or(TensorError::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col].inv().ok_or(TensorError::Singular)?;
            for c in 0..dim {
                a[col][c] = &a[col][c] * &pinv;
                inv[col][c] = &inv[col][c] * &pinv;
            }
            for r in 0..dim {
                if r == col || a[r][col].is_structural_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in 0..dim {
                    let t1 = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &t1;
                    let t2 = &f * &inv[col][c];
                    inv[r][c] = &inv[r][c] - &t2;
                }
            }
        }
        Ok(SiteOperator {
            mode: self.mode.clone(),
            n: self.n,
            sites: self.sites,
            dim,
            entries: inv.into_iter().flatten().collect(),
        })
    }

    /// Kronecker product; `self` occupies the leading sites.
    pub fn kron(&self, rhs: &SiteOperator) -> SiteOperator {
        assert_eq!(self.n, rhs.n);
        let sites = self.sites + rhs.sites;
        let dim = self.dim * rhs.dim;
        let mut out = SiteOperator {
            mode: self.mode.clone(),
            n: self.n,
            sites,
            dim,
            entries: vec![self.mode.zero(); dim * dim],
        };
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.entry(r1, c1);
                if a.is_structural_zero() {
                    continue;
                }
                for r2 in 0..rhs.dim {
                    for c2 in 0..rhs.dim {
                        let b = rhs.entry(r2, c2);
                        if b.is_structural_zero() {
                            continue;
                        }
                        out.set(r1 * rhs.dim + r2, c1 * rhs.dim + c2, a * b);
                    }
                }
            }
        }
        out
    }
}

/// Permutation operator P(x (x) y) = y (x) x on V (x) V.
pub fn permutation(mode: &FieldMode, n: usize) -> SiteOperator {
    let mut p = SiteOperator::zero(mode, n, 2);
    for a in 1..=n {
        for b in 1..=n {
            let r = SiteOperator::index_of(n, &[b, a]);
            let c = SiteOperator::index_of(n, &[a, b]);
            p.set(r, c, mode.one());
        }
    }
    p
}

/// Embed `op` (acting on `sites.len()` sites) into V^{(x)N} acting as the
/// identity elsewhere. Site labels are 1-based.
pub fn embed(op: &SiteOperator, sites: &[usize], total: usize) -> Result<SiteOperator, TensorError> {
    if sites.len() != op.sites {
        return Err(TensorError::DimMismatch(format!(
            "operator acts on {} sites, got {} labels",
            op.sites,
            sites.len()
        )));
    }
    for &s in sites {
        if s < 1 || s > total {
            return Err(TensorError::SiteOutOfRange { site: s, sites: total });
        }
    }
    {
        let mut seen = sites.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != sites.len() {
            return Err(TensorError::DimMismatch("duplicate site labels".into()));
        }
    }
    let n = op.n;
    let dim = n.pow(total as u32);
    let mode = op.mode.clone();
    let entries: Vec<Scalar> = (0..dim * dim)
        .into_par_iter()
        .map(|idx| {
            let (r, c) = (idx / dim, idx % dim);
            let rd = digits_of(r, n, total);
            let cd = digits_of(c, n, total);
            for s in 0..total {
                if !sites.contains(&(s + 1)) && rd[s] != cd[s] {
                    return mode.zero();
                }
            }
            let rsub: Vec<usize> = sites.iter().map(|&s| rd[s - 1]).collect();
            let csub: Vec<usize> = sites.iter().map(|&s| cd[s - 1]).collect();
            op.entry(
                SiteOperator::index_of(n, &rsub),
                SiteOperator::index_of(n, &csub),
            )
            .clone()
        })
        .collect();
    Ok(SiteOperator {
        mode,
        n,
        sites: total,
        dim,
        entries,
    })
}

pub fn digits_of(mut idx: usize, n: usize, sites: usize) -> Vec<usize> {
    let mut out = vec![0; sites];
    for s in (0..sites).rev() {
        out[s] = idx % n + 1;
        idx /= n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_squares_to_identity() {
        for mode in [FieldMode::generic_q(2), FieldMode::cyclotomic(3, 1)] {
            let n = mode.n();
            let p = permutation(&mode, n);
            let id = SiteOperator::identity(&mode, n, 2);
            assert!(p.mul(&p).equals(&id));
        }
    }

    #[test]
    fn permutation_entries() {
        let mode = FieldMode::generic_q(2);
        let p = permutation(&mode, 2);
        for a in 1..=2usize {
            for b in 1..=2usize {
                for r in 0..4 {
                    let c = SiteOperator::index_of(2, &[a, b]);
                    let want = r == SiteOperator::index_of(2, &[b, a]);
                    assert_eq!(!p.entry(r, c).is_zero(), want);
                }
            }
        }
    }

    #[test]
    fn embed_identity_is_identity() {
        let mode = FieldMode::generic_q(2);
        let id2 = SiteOperator::identity(&mode, 2, 2);
        let e = embed(&id2, &[1, 2], 3).unwrap();
        assert!(e.equals(&SiteOperator::identity(&mode, 2, 3)));
    }

    #[test]
    fn embed_on_two_sites_is_op_itself() {
        let mode = FieldMode::generic_q(2);
        let p = permutation(&mode, 2);
        let e = embed(&p, &[1, 2], 2).unwrap();
        assert!(e.equals(&p));
    }

    #[test]
    fn embed_rejects_bad_sites() {
        let mode = FieldMode::generic_q(2);
        let p = permutation(&mode, 2);
        assert!(embed(&p, &[1, 4], 3).is_err());
        assert!(embed(&p, &[2, 2], 3).is_err());
        assert!(embed(&p, &[1], 3).is_err());
    }

    #[test]
    fn disjoint_embeddings_commute() {
        let mode = FieldMode::generic_q(2);
        let p = permutation(&mode, 2);
        let a = embed(&p, &[1, 2], 4).unwrap();
        let b = embed(&p, &[3, 4], 4).unwrap();
        assert!(a.mul(&b).equals(&b.mul(&a)));
    }

    #[test]
    fn conjugation_by_permutation_swaps_factors() {
        // P (A (x) B) P = B (x) A for exact single-site operators
        let mode = FieldMode::generic_q(2);
        let mk = |vals: [i64; 4]| {
            SiteOperator::from_fn(&mode, 2, 1, |r, c| mode.from_int(vals[r * 2 + c]))
        };
        let a = mk([1, 2, 3, 4]);
        let b = mk([5, -1, 0, 7]);
        let p = permutation(&mode, 2);
        let lhs = p.mul(&a.kron(&b)).mul(&p);
        assert!(lhs.equals(&b.kron(&a)));
    }

    #[test]
    fn inverse_roundtrip() {
        let mode = FieldMode::cyclotomic(2, 2);
        let m = SiteOperator::from_fn(&mode, 2, 1, |r, c| {
            if r == c {
                mode.q_int_pow(1 + r as i64)
            } else if r < c {
                mode.one()
            } else {
                mode.zero()
            }
        });
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).equals(&SiteOperator::identity(&mode, 2, 1)));
    }
}
