//! The constant Drinfeld-Jimbo R-matrix for U_q(sl(n)) in the defining
//! representation, its dynamical (weight-dependent) companion, and the
//! braid/Hecke checks both must satisfy.

use thiserror::Error;

use crate::field::{FieldMode, Scalar};
use crate::report::{fail, CheckResult, CheckStatus};
use crate::tensor::{embed, permutation, SiteOperator};
use crate::weight::Weight;
use crate::Corruption;

#[derive(Debug, Error)]
pub enum RmatrixError {
    #[error("singular weight: [p_{i}{j}] = 0 in the active field mode")]
    SingularWeight { i: usize, j: usize },
}

/// Sign table: -1 below the diagonal argument order, +1 above.
pub fn eps_sign(a: usize, b: usize) -> i64 {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

/// q^{1/n} as an exact scalar (qpow works in units of 1/(4n)).
pub fn q_nth_root(mode: &FieldMode) -> Scalar {
    mode.qpow(4)
}

/// Braid form of the constant R-matrix, including the q^{1/n} prefactor:
/// q^{-1/n} Rhat^{ab}_{a'b'} = d^b_{a'} d^a_{b'} + (q^{-1} - q^{eps_{ba}}) d^a_{a'} d^b_{b'}.
pub fn build_rhat(mode: &FieldMode, corrupt: Corruption) -> SiteOperator {
    let n = mode.n();
    let pref = q_nth_root(mode);
    let qm1 = mode.q_int_pow(-1);
    let mut m = SiteOperator::zero(mode, n, 2);
    for a in 1..=n {
        for b in 1..=n {
            let col = SiteOperator::index_of(n, &[a, b]);
            // permutation part
            let r_perm = SiteOperator::index_of(n, &[b, a]);
            let mut acc_perm = m.entry(r_perm, col).clone();
            acc_perm = &acc_perm + &pref;
            m.set(r_perm, col, acc_perm);
            // diagonal part
            let diag = &qm1 - &mode.q_int_pow(eps_sign(b, a));
            if !diag.is_structural_zero() {
                let r_diag = col;
                let add = &pref * &diag;
                let cur = m.entry(r_diag, col).clone();
                m.set(r_diag, col, &cur + &add);
            }
        }
    }
    if corrupt == Corruption::PerturbRhat {
        let c = m.dim - 1;
        let cur = m.entry(0, c).clone();
        m.set(0, c, &cur + &mode.one());
    }
    m
}

/// R = P * Rhat.
pub fn build_r(mode: &FieldMode, corrupt: Corruption) -> SiteOperator {
    permutation(mode, mode.n()).mul(&build_rhat(mode, corrupt))
}

/// Exact inverse from the Hecke relation:
/// (q^{-1/n} Rhat)^{-1} = q^{-1/n} Rhat + (q - q^{-1}) id.
pub fn rhat_inverse(mode: &FieldMode) -> SiteOperator {
    let rhat = build_rhat(mode, Corruption::None);
    let g = rhat.scale(&q_nth_root(mode).inv().unwrap());
    let id = SiteOperator::identity(mode, mode.n(), 2);
    let shift = &mode.q_int_pow(1) - &mode.q_int_pow(-1);
    g.add(&id.scale(&shift)).scale(&q_nth_root(mode).inv().unwrap())
}

/// Dynamical R-matrix at a concrete weight, in the ice-rule form
/// q^{-1/n} Rhat(p)^{ij}_{i'j'} = a_ij(p) d^i_{j'} d^j_{i'} + b_ij(p) d^i_{i'} d^j_{j'}
/// with a_ii = q^{-1}, b_ii = 0, a_ij = [p_ij - 1]/[p_ij], b_ij = q^{-p_ij}/[p_ij].
pub fn build_rhat_dyn(mode: &FieldMode, p: &Weight) -> Result<SiteOperator, RmatrixError> {
    let n = mode.n();
    assert_eq!(p.n(), n);
    let pref = q_nth_root(mode);
    let mut m = SiteOperator::zero(mode, n, 2);
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                let col = SiteOperator::index_of(n, &[i, i]);
                m.set(col, col, &pref * &mode.q_int_pow(-1));
                continue;
            }
            let pij = p.p_diff(i, j);
            let bracket = mode.qint(pij);
            let inv = bracket
                .inv()
                .ok_or(RmatrixError::SingularWeight { i, j })?;
            let a_ij = &mode.qint(pij - 1) * &inv;
            let b_ij = &mode.q_int_pow(-pij) * &inv;
            let col = SiteOperator::index_of(n, &[i, j]);
            // a-part lands on the swapped row, b-part on the diagonal
            let r_swap = SiteOperator::index_of(n, &[j, i]);
            let cur = m.entry(r_swap, col).clone();
            m.set(r_swap, col, &cur + &(&pref * &a_ij));
            let cur = m.entry(col, col).clone();
            m.set(col, col, &cur + &(&pref * &b_ij));
        }
    }
    Ok(m)
}

/// Braid relation on three sites and far commutativity on four.
pub fn check_braid(mode: &FieldMode, corrupt: Corruption) -> CheckResult {
    let rhat = build_rhat(mode, corrupt);
    let r1 = embed(&rhat, &[1, 2], 3).unwrap();
    let r2 = embed(&rhat, &[2, 3], 3).unwrap();
    let lhs = r1.mul(&r2).mul(&r1);
    let rhs = r2.mul(&r1).mul(&r2);
    lhs.equals_witness(&rhs)
        .map_err(|w| entry_fail("braid V^3", &lhs, w))?;
    let s1 = embed(&rhat, &[1, 2], 4).unwrap();
    let s3 = embed(&rhat, &[3, 4], 4).unwrap();
    let lhs = s1.mul(&s3);
    let rhs = s3.mul(&s1);
    lhs.equals_witness(&rhs)
        .map_err(|w| entry_fail("far commutation V^4", &lhs, w))?;
    Ok(())
}

/// (q^{-1/n} X - q^{-1})(q^{-1/n} X + q) = 0 for the constant or the
/// dynamical braid matrix.
pub fn check_hecke(mode: &FieldMode, p: Option<&Weight>, corrupt: Corruption) -> CheckResult {
    let x = match p {
        None => build_rhat(mode, corrupt),
        Some(w) => build_rhat_dyn(mode, w).map_err(|e| CheckStatus::Skipped {
            reason: format!("SingularWeight: {e}"),
        })?,
    };
    let mut g = x.scale(&q_nth_root(mode).inv().unwrap());
    if corrupt == Corruption::DropRhatPrefactor {
        g = x;
    }
    let id = SiteOperator::identity(mode, mode.n(), 2);
    let lhs = g
        .sub(&id.scale(&mode.q_int_pow(-1)))
        .mul(&g.add(&id.scale(&mode.q_int_pow(1))));
    let zero = SiteOperator::zero(mode, mode.n(), 2);
    lhs.equals_witness(&zero)
        .map_err(|w| entry_fail("hecke", &lhs, w))
}

/// Entries vanish unless the incoming index pair is preserved as a set.
pub fn check_ice_rule(mode: &FieldMode) -> CheckResult {
    let rhat = build_rhat(mode, Corruption::None);
    let n = mode.n();
    for r in 0..rhat.dim {
        for c in 0..rhat.dim {
            if rhat.entry(r, c).is_zero() {
                continue;
            }
            let rd = rhat.digits(r);
            let cd = rhat.digits(c);
            let mut a = rd.clone();
            let mut b = cd.clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(fail(
                    format!("entry ({rd:?},{cd:?})"),
                    rhat.entry(r, c),
                    "0",
                ));
            }
        }
    }
    let _ = n;
    Ok(())
}

/// P Rhat P equals Rhat with the sign table transposed.
pub fn check_p_conjugation(mode: &FieldMode) -> CheckResult {
    let n = mode.n();
    let rhat = build_rhat(mode, Corruption::None);
    let p = permutation(mode, n);
    let lhs = p.mul(&rhat).mul(&p);
    let pref = q_nth_root(mode);
    let qm1 = mode.q_int_pow(-1);
    let mut flipped = SiteOperator::zero(mode, n, 2);
    for a in 1..=n {
        for b in 1..=n {
            let col = SiteOperator::index_of(n, &[a, b]);
            let r_perm = SiteOperator::index_of(n, &[b, a]);
            let cur = flipped.entry(r_perm, col).clone();
            flipped.set(r_perm, col, &cur + &pref);
            let diag = &qm1 - &mode.q_int_pow(eps_sign(a, b));
            if !diag.is_structural_zero() {
                let cur = flipped.entry(col, col).clone();
                flipped.set(col, col, &cur + &(&pref * &diag));
            }
        }
    }
    lhs.equals_witness(&flipped)
        .map_err(|w| entry_fail("p-conjugation", &lhs, w))
}

/// Annihilating polynomial plus trace pins the spectrum
/// {q^{-1} with multiplicity n(n+1)/2, -q with multiplicity n(n-1)/2}.
pub fn check_spectrum(mode: &FieldMode) -> CheckResult {
    check_hecke(mode, None, Corruption::None)?;
    let n = mode.n() as i64;
    let g = build_rhat(mode, Corruption::None).scale(&q_nth_root(mode).inv().unwrap());
    let tr = g.trace();
    let m_sym = mode.from_int(n * (n + 1) / 2);
    let m_anti = mode.from_int(n * (n - 1) / 2);
    let expect = &(&mode.q_int_pow(-1) * &m_sym) - &(&mode.q_int_pow(1) * &m_anti);
    if tr.eq_exact(&expect) {
        Ok(())
    } else {
        Err(fail("trace", &tr, &expect))
    }
}

/// Rhat is invertible and the Hecke-derived inverse is exact.
pub fn check_invertible(mode: &FieldMode) -> CheckResult {
    let rhat = build_rhat(mode, Corruption::None);
    let inv = rhat_inverse(mode);
    let id = SiteOperator::identity(mode, mode.n(), 2);
    let prod = rhat.mul(&inv);
    prod.equals_witness(&id)
        .map_err(|w| entry_fail("rhat * rhat^-1", &prod, w))?;
    // cross-check against Gaussian elimination
    let gauss = rhat.inverse().map_err(|_| fail("gaussian inverse", "singular", "invertible"))?;
    let prod = rhat.mul(&gauss);
    prod.equals_witness(&id)
        .map_err(|w| entry_fail("gaussian rhat^-1", &prod, w))
}

pub(crate) fn entry_fail(
    what: &str,
    op: &SiteOperator,
    w: (usize, usize, Scalar, Scalar),
) -> CheckStatus {
    let (r, c, lhs, rhs) = w;
    fail(
        format!("{what} entry ({:?},{:?})", op.digits(r), op.digits(c)),
        lhs,
        rhs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhat_entries_n2() {
        // q^{-1/2} Rhat: diagonal aa -> q^{-1}; (12,12) -> q^{-1} - q;
        // (12,21) and (21,12) -> 1; (21,21) -> 0.
        let mode = FieldMode::generic_q(2);
        let rhat = build_rhat(&mode, Corruption::None);
        let g = rhat.scale(&q_nth_root(&mode).inv().unwrap());
        let idx = |a: usize, b: usize| SiteOperator::index_of(2, &[a, b]);
        assert!(g.entry(idx(1, 1), idx(1, 1)).eq_exact(&mode.q_int_pow(-1)));
        assert!(g.entry(idx(2, 2), idx(2, 2)).eq_exact(&mode.q_int_pow(-1)));
        let diff = &mode.q_int_pow(-1) - &mode.q_int_pow(1);
        assert!(g.entry(idx(1, 2), idx(1, 2)).eq_exact(&diff));
        assert!(g.entry(idx(2, 1), idx(1, 2)).is_one());
        assert!(g.entry(idx(1, 2), idx(2, 1)).is_one());
        assert!(g.entry(idx(2, 1), idx(2, 1)).is_zero());
    }

    #[test]
    fn braid_holds_in_both_modes() {
        for mode in [
            FieldMode::cyclotomic(2, 1),
            FieldMode::cyclotomic(2, 2),
            FieldMode::generic_q(2),
            FieldMode::cyclotomic(3, 1),
        ] {
            assert!(check_braid(&mode, Corruption::None).is_ok(), "{mode}");
        }
    }

    #[test]
    fn braid_fails_when_perturbed() {
        let mode = FieldMode::cyclotomic(2, 1);
        assert!(check_braid(&mode, Corruption::PerturbRhat).is_err());
    }

    #[test]
    fn hecke_constant_and_dynamical() {
        for mode in [FieldMode::generic_q(2), FieldMode::cyclotomic(2, 2)] {
            assert!(check_hecke(&mode, None, Corruption::None).is_ok());
            let vac = Weight::vacuum(2);
            assert!(check_hecke(&mode, Some(&vac), Corruption::None).is_ok());
            assert!(check_hecke(&mode, Some(&vac.add_box(1)), Corruption::None).is_ok());
        }
        let mode = FieldMode::generic_q(3);
        assert!(check_hecke(&mode, Some(&Weight::vacuum(3)), Corruption::None).is_ok());
    }

    #[test]
    fn hecke_fails_without_prefactor() {
        let mode = FieldMode::generic_q(2);
        assert!(check_hecke(&mode, None, Corruption::DropRhatPrefactor).is_err());
    }

    #[test]
    fn dynamical_entries_at_vacuum_n2() {
        // p_12 = 1: a_12 = [0]/[1] = 0, b_12 = q^{-1}/[1] = q^{-1}
        let mode = FieldMode::generic_q(2);
        let p = Weight::vacuum(2);
        let rp = build_rhat_dyn(&mode, &p).unwrap();
        let g = rp.scale(&q_nth_root(&mode).inv().unwrap());
        let idx = |a: usize, b: usize| SiteOperator::index_of(2, &[a, b]);
        assert!(g.entry(idx(2, 1), idx(1, 2)).is_zero());
        assert!(g.entry(idx(1, 2), idx(1, 2)).eq_exact(&mode.q_int_pow(-1)));
        // diagonal sector q^{-1} (before the q^{1/n} prefactor)
        assert!(g.entry(idx(1, 1), idx(1, 1)).eq_exact(&mode.q_int_pow(-1)));
    }

    #[test]
    fn dynamical_singular_weight_detected() {
        // h = 3: p_12 = 3 has [3] = 0
        let mode = FieldMode::cyclotomic(2, 1);
        let p = Weight::vacuum(2).add_box(1).add_box(1);
        assert_eq!(p.p_diff(1, 2), 3);
        assert!(build_rhat_dyn(&mode, &p).is_err());
    }

    #[test]
    fn structural_checks() {
        for mode in [FieldMode::generic_q(2), FieldMode::cyclotomic(3, 1)] {
            assert!(check_ice_rule(&mode).is_ok());
            assert!(check_p_conjugation(&mode).is_ok());
            assert!(check_spectrum(&mode).is_ok());
            assert!(check_invertible(&mode).is_ok());
        }
    }
}
