//! Quantum antisymmetrizers and the deformed epsilon tensors.
//!
//! The level-k antisymmetrizer is the Hecke sum
//! A_{1k} = q^{-k(k-1)/2} sum_{s in S_k} (-q)^{l(s)} g_s,
//! g_i = q^{-1/n} Rhat_i, normalized so that A_{1k}^2 = [k]! A_{1k}.
//! At level n it factorizes through the rank-n epsilon tensors.

use std::collections::HashMap;

use itertools::Itertools;
use thiserror::Error;

use crate::field::{FieldMode, Scalar};
use crate::report::{fail, CheckResult, CheckStatus};
use crate::rmatrix::{build_rhat, entry_fail, q_nth_root};
use crate::tensor::{embed, SiteOperator};
use crate::weight::Weight;
use crate::Corruption;

#[derive(Debug, Error)]
pub enum EpsilonError {
    #[error("singular weight: some [p_ij] vanishes in the active field mode")]
    SingularWeight,
}

#[derive(Debug, Clone)]
pub struct Antisymmetrizer {
    pub k: usize,
    pub op: SiteOperator,
}

/// Unnormalized Hecke sum S_k = sum_s (-q)^{l(s)} g_s on V^{(x)k}.
pub fn hecke_sum(mode: &FieldMode, k: usize) -> SiteOperator {
    let n = mode.n();
    if k == 1 {
        return SiteOperator::identity(mode, n, 1);
    }
    let g: Vec<SiteOperator> = (1..k)
        .map(|i| {
            embed(&build_rhat(mode, Corruption::None), &[i, i + 1], k)
                .unwrap()
                .scale(&q_nth_root(mode).inv().unwrap())
        })
        .collect();
    let id: Vec<usize> = (1..=k).collect();
    let mut known: HashMap<Vec<usize>, (usize, SiteOperator)> = HashMap::new();
    known.insert(id.clone(), (0, SiteOperator::identity(mode, n, k)));
    let mut frontier = vec![id];
    while let Some(next) = {
        let mut new_frontier = Vec::new();
        for sigma in &frontier {
            let (len, mat) = known[sigma].clone();
            for i in 0..k - 1 {
                if sigma[i] < sigma[i + 1] {
                    let mut tau = sigma.clone();
                    tau.swap(i, i + 1);
                    if !known.contains_key(&tau) {
                        let m = mat.mul(&g[i]);
                        known.insert(tau.clone(), (len + 1, m));
                        new_frontier.push(tau);
                    }
                }
            }
        }
        if new_frontier.is_empty() {
            None
        } else {
            Some(new_frontier)
        }
    } {
        frontier = next;
    }
    let minus_q = -&mode.q_int_pow(1);
    let mut acc = SiteOperator::zero(mode, n, k);
    for (_, (len, mat)) in known {
        acc = acc.add(&mat.scale(&minus_q.pow(len as u32)));
    }
    acc
}

/// Normalized antisymmetrizer with A^2 = [k]! A.
pub fn build_antisym(mode: &FieldMode, k: usize) -> Antisymmetrizer {
    assert!(k >= 1);
    let s = hecke_sum(mode, k);
    let c = mode.qpow(-4 * (mode.n() as i64) * (k as i64) * (k as i64 - 1) / 2);
    Antisymmetrizer { k, op: s.scale(&c) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsVariant {
    ConstantUpper,
    ConstantLower,
    DynamicalUpper,
    DynamicalLower,
}

/// Rank-n epsilon tensor, stored densely over all n^n index tuples.
#[derive(Debug, Clone)]
pub struct EpsTensor {
    pub n: usize,
    pub variant: EpsVariant,
    pub vals: Vec<Scalar>,
}

impl EpsTensor {
    pub fn get(&self, idx: &[usize]) -> &Scalar {
        &self.vals[SiteOperator::index_of(self.n, idx)]
    }
}

fn inversions(seq: &[usize]) -> usize {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// Constant tensors: eps^{a_1..a_n} = eps_{a_1..a_n} =
/// q^{-n(n-1)/4} (-q)^{l(s)} for s the permutation with two-line form
/// (n .. 1) over (a_1 .. a_n); zero if any index repeats.
pub fn build_eps(
    mode: &FieldMode,
    variant: EpsVariant,
    p: Option<&Weight>,
    corrupt: Corruption,
) -> Result<EpsTensor, EpsilonError> {
    let n = mode.n();
    let mut vals = vec![mode.zero(); n.pow(n as u32)];
    match variant {
        EpsVariant::ConstantUpper | EpsVariant::ConstantLower => {
            let pref = if corrupt == Corruption::DropEpsPrefactor {
                mode.one()
            } else {
                mode.qpow(-(n as i64) * (n as i64) * (n as i64 - 1))
            };
            let minus_q = -&mode.q_int_pow(1);
            for tuple in (1..=n).permutations(n) {
                // sigma(j) = a_{n+1-j}; inversions of the reversed tuple
                let rev: Vec<usize> = tuple.iter().rev().cloned().collect();
                let l = inversions(&rev);
                let idx = SiteOperator::index_of(n, &tuple);
                vals[idx] = &pref * &minus_q.pow(l as u32);
            }
        }
        EpsVariant::DynamicalLower => {
            // classical antisymmetric tensor, eps_{n n-1 .. 1} = 1
            let base = (n * (n - 1) / 2) % 2;
            for tuple in (1..=n).permutations(n) {
                let l = inversions(&tuple);
                let sign = if (l + base * (n * (n - 1) / 2 + 1)) % 2 == 0 {
                    1
                } else {
                    -1
                };
                // sign(tuple) * sign(n..1)
                let s_tuple = if inversions(&tuple) % 2 == 0 { 1 } else { -1 };
                let s_rev = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
                let _ = (l, sign);
                let idx = SiteOperator::index_of(n, &tuple);
                vals[idx] = mode.from_int((s_tuple * s_rev) as i64);
            }
        }
        EpsVariant::DynamicalUpper => {
            let p = p.expect("dynamical upper tensor needs a weight");
            let dq = p.dq(mode);
            let dq_inv = dq.inv().ok_or(EpsilonError::SingularWeight)?;
            let sign = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
            for tuple in (1..=n).permutations(n) {
                let mut prod = mode.from_int(sign as i64);
                for mu in 0..n {
                    for nu in mu + 1..n {
                        prod = &prod * &mode.qint(p.p_diff(tuple[mu], tuple[nu]) - 1);
                    }
                }
                let idx = SiteOperator::index_of(n, &tuple);
                vals[idx] = &prod * &dq_inv;
            }
        }
    }
    Ok(EpsTensor { n, variant, vals })
}

/// Both eigen-equations: Rhat_i eps = -q^{1+1/n} eps (upper tensor as a
/// column vector) and eps Rhat_i = -q^{1+1/n} eps (lower as a row).
pub fn check_eps_eigen_equations(mode: &FieldMode, corrupt: Corruption) -> CheckResult {
    let n = mode.n();
    let upper = build_eps(mode, EpsVariant::ConstantUpper, None, corrupt).unwrap();
    let lower = build_eps(mode, EpsVariant::ConstantLower, None, corrupt).unwrap();
    let rhat = build_rhat(mode, Corruption::None);
    let lam = -&(&mode.q_int_pow(1) * &q_nth_root(mode));
    for i in 1..n {
        let ri = embed(&rhat, &[i, i + 1], n).unwrap();
        let got = ri.mat_vec(&upper.vals);
        let want: Vec<Scalar> = upper.vals.iter().map(|v| &lam * v).collect();
        for idx in 0..got.len() {
            if !(&got[idx] - &want[idx]).is_zero() {
                return Err(fail(
                    format!("upper eigen-eq i={i} component {:?}", ri.digits(idx)),
                    &got[idx],
                    &want[idx],
                ));
            }
        }
        let got = ri.vec_mat(&lower.vals);
        let want: Vec<Scalar> = lower.vals.iter().map(|v| &lam * v).collect();
        for idx in 0..got.len() {
            if !(&got[idx] - &want[idx]).is_zero() {
                return Err(fail(
                    format!("lower eigen-eq i={i} component {:?}", ri.digits(idx)),
                    &got[idx],
                    &want[idx],
                ));
            }
        }
    }
    Ok(())
}

/// A_{1n} = eps-upper (x) eps-lower, entrywise.
pub fn check_antisym_factorization(mode: &FieldMode, corrupt: Corruption) -> CheckResult {
    let n = mode.n();
    let a = build_antisym(mode, n);
    let upper = build_eps(mode, EpsVariant::ConstantUpper, None, corrupt).unwrap();
    let lower = build_eps(mode, EpsVariant::ConstantLower, None, corrupt).unwrap();
    let outer = SiteOperator::from_fn(mode, n, n, |r, c| &upper.vals[r] * &lower.vals[c]);
    a.op.equals_witness(&outer)
        .map_err(|w| entry_fail("A_1n vs eps(x)eps", &a.op, w))
}

/// Normalization eps^{a..} eps_{a..} = [n]! for the constant pair and for
/// the dynamical pair at each supplied weight.
pub fn check_eps_normalization(
    mode: &FieldMode,
    weights: &[Weight],
    corrupt: Corruption,
) -> CheckResult {
    let n = mode.n();
    let fact = mode.qfact(n as u32);
    let upper = build_eps(mode, EpsVariant::ConstantUpper, None, corrupt).unwrap();
    let lower = build_eps(mode, EpsVariant::ConstantLower, None, corrupt).unwrap();
    let mut acc = mode.zero();
    for i in 0..upper.vals.len() {
        acc = &acc + &(&upper.vals[i] * &lower.vals[i]);
    }
    if !(&acc - &fact).is_zero() {
        return Err(fail("constant eps contraction", &acc, &fact));
    }
    let dlower = build_eps(mode, EpsVariant::DynamicalLower, None, corrupt).unwrap();
    for w in weights {
        let dupper = match build_eps(mode, EpsVariant::DynamicalUpper, Some(w), corrupt) {
            Ok(t) => t,
            Err(_) => {
                return Err(CheckStatus::Skipped {
                    reason: "SingularWeight in dynamical epsilon".into(),
                })
            }
        };
        let mut acc = mode.zero();
        for i in 0..dupper.vals.len() {
            acc = &acc + &(&dupper.vals[i] * &dlower.vals[i]);
        }
        if !(&acc - &fact).is_zero() {
            return Err(fail(
                format!("dynamical eps contraction at dynkin {:?}", w.dynkin()),
                &acc,
                &fact,
            ));
        }
    }
    Ok(())
}

/// A_{1k}^2 = [k]! A_{1k}; A g_i = g_i A = -q A; nonzero for k <= n.
pub fn check_antisym_properties(mode: &FieldMode, k: usize) -> CheckResult {
    let a = build_antisym(mode, k);
    let fact = mode.qfact(k as u32);
    let sq = a.op.mul(&a.op);
    let scaled = a.op.scale(&fact);
    sq.equals_witness(&scaled)
        .map_err(|w| entry_fail(&format!("A^2 = [{k}]!A"), &sq, w))?;
    if k >= 2 {
        let minus_q = -&mode.q_int_pow(1);
        for i in 1..k {
            let gi = embed(&build_rhat(mode, Corruption::None), &[i, i + 1], k)
                .unwrap()
                .scale(&q_nth_root(mode).inv().unwrap());
            let left = a.op.mul(&gi);
            let want = a.op.scale(&minus_q);
            left.equals_witness(&want)
                .map_err(|w| entry_fail(&format!("A g_{i} absorption"), &left, w))?;
            let right = gi.mul(&a.op);
            right
                .equals_witness(&want)
                .map_err(|w| entry_fail(&format!("g_{i} A absorption"), &right, w))?;
        }
    }
    if k <= mode.n() && a.op.is_zero() {
        return Err(fail(format!("A_1{k} nonzero"), "0", "nonzero"));
    }
    Ok(())
}

/// Vanishing of the antisymmetrizer one level above n.
pub fn check_antisym_vanishes_above_n(mode: &FieldMode) -> CheckResult {
    let n = mode.n();
    let a = build_antisym(mode, n + 1);
    if a.op.is_zero() {
        Ok(())
    } else {
        let w = a
            .op
            .equals_witness(&SiteOperator::zero(mode, n, n + 1))
            .unwrap_err();
        Err(entry_fail("A_{1,n+1}", &a.op, w))
    }
}

/// Exact rank by row reduction over the field.
pub fn rank(op: &SiteOperator) -> usize {
    let dim = op.dim;
    let mut rows: Vec<Vec<Scalar>> = (0..dim)
        .map(|r| (0..dim).map(|c| op.entry(r, c).clone()).collect())
        .collect();
    let mut rank = 0;
    for col in 0..dim {
        let pivot = (rank..dim).find(|&r| !rows[r][col].is_zero());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().unwrap();
        for c in col..dim {
            rows[rank][c] = &rows[rank][c] * &inv;
        }
        for r in 0..dim {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..dim {
                    let t = &f * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &t;
                }
            }
        }
        rank += 1;
        if rank == dim {
            break;
        }
    }
    rank
}

pub fn check_antisym_rank_one(mode: &FieldMode) -> CheckResult {
    let a = build_antisym(mode, mode.n());
    let r = rank(&a.op);
    if r == 1 {
        Ok(())
    } else {
        Err(fail("rank(A_1n)", r, 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_is_identity() {
        let mode = FieldMode::generic_q(2);
        let a = build_antisym(&mode, 1);
        assert!(a.op.equals(&SiteOperator::identity(&mode, 2, 1)));
    }

    #[test]
    fn level_two_matches_defining_combination() {
        // A_12 = q^{-1} id - q^{-1/n} Rhat
        for mode in [FieldMode::generic_q(2), FieldMode::cyclotomic(3, 1)] {
            let n = mode.n();
            let a = build_antisym(&mode, 2);
            let g = build_rhat(&mode, Corruption::None).scale(&q_nth_root(&mode).inv().unwrap());
            let want = SiteOperator::identity(&mode, n, 2)
                .scale(&mode.q_int_pow(-1))
                .sub(&g);
            assert!(a.op.equals(&want), "{mode}");
        }
    }

    #[test]
    fn normalization_matches_diagonal_rescale_procedure() {
        // S^2 = gamma S with gamma = q^{k(k-1)/2} [k]!, so c = [k]!/gamma.
        let mode = FieldMode::generic_q(2);
        for k in 2..=2usize {
            let s = hecke_sum(&mode, k);
            let sq = s.mul(&s);
            let (mut r0, mut c0) = (0, 0);
            'outer: for r in 0..s.dim {
                for c in 0..s.dim {
                    if !s.entry(r, c).is_zero() {
                        r0 = r;
                        c0 = c;
                        break 'outer;
                    }
                }
            }
            let gamma = sq.entry(r0, c0).div(s.entry(r0, c0)).unwrap();
            let want =
                &mode.qfact(k as u32) * &mode.qpow(4 * 2 * (k as i64) * (k as i64 - 1) / 2);
            assert!(gamma.eq_exact(&want));
            assert!(sq.equals(&s.scale(&gamma)));
        }
    }

    #[test]
    fn eps_values_n2() {
        let mode = FieldMode::generic_q(2);
        let lower = build_eps(&mode, EpsVariant::ConstantLower, None, Corruption::None).unwrap();
        // eps_{21} = q^{-1/2}, eps_{12} = -q^{1/2}
        assert!(lower.get(&[2, 1]).eq_exact(&mode.qpow(-4)));
        assert!(lower.get(&[1, 2]).eq_exact(&(-&mode.qpow(4))));
        assert!(lower.get(&[1, 1]).is_zero());
    }

    #[test]
    fn eps_values_n3() {
        let mode = FieldMode::generic_q(3);
        let lower = build_eps(&mode, EpsVariant::ConstantLower, None, Corruption::None).unwrap();
        // eps_{321} = q^{-3/2} = qpow(-18) at n=3
        assert!(lower.get(&[3, 2, 1]).eq_exact(&mode.qpow(-18)));
    }

    #[test]
    fn dynamical_eps_values_n2() {
        let mode = FieldMode::generic_q(2);
        let w = Weight::vacuum(2).add_box(1); // p_12 = 2
        let up = build_eps(&mode, EpsVariant::DynamicalUpper, Some(&w), Corruption::None).unwrap();
        let p = w.p_diff(1, 2);
        let want21 = mode.qint(p + 1).div(&mode.qint(p)).unwrap();
        let want12 = -&mode.qint(p - 1).div(&mode.qint(p)).unwrap();
        assert!(up.get(&[2, 1]).eq_exact(&want21));
        assert!(up.get(&[1, 2]).eq_exact(&want12));
        let low = build_eps(&mode, EpsVariant::DynamicalLower, None, Corruption::None).unwrap();
        assert!(low.get(&[2, 1]).is_one());
        assert!(low.get(&[1, 2]).eq_exact(&mode.from_int(-1)));
    }

    #[test]
    fn eigen_equations_and_factorization() {
        for mode in [FieldMode::generic_q(2), FieldMode::cyclotomic(3, 1)] {
            assert!(check_eps_eigen_equations(&mode, Corruption::None).is_ok());
            assert!(check_antisym_factorization(&mode, Corruption::None).is_ok());
            let weights = [Weight::vacuum(mode.n()), Weight::vacuum(mode.n()).add_box(1)];
            assert!(check_eps_normalization(&mode, &weights, Corruption::None).is_ok());
        }
    }

    #[test]
    fn corrupted_eps_fails_factorization() {
        let mode = FieldMode::generic_q(2);
        assert!(check_antisym_factorization(&mode, Corruption::DropEpsPrefactor).is_err());
    }

    #[test]
    fn antisym_properties_and_rank() {
        for mode in [FieldMode::generic_q(2), FieldMode::cyclotomic(2, 2)] {
            for k in 1..=mode.n() {
                assert!(check_antisym_properties(&mode, k).is_ok());
            }
            assert!(check_antisym_rank_one(&mode).is_ok());
        }
    }

    #[test]
    fn vanishing_above_n() {
        // identically zero on V^{(x)(n+1)}: root of unity or not
        assert!(check_antisym_vanishes_above_n(&FieldMode::cyclotomic(2, 1)).is_ok());
        assert!(check_antisym_vanishes_above_n(&FieldMode::generic_q(2)).is_ok());
    }
}
