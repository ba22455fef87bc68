//! Property tests over randomized exact-rational parameters.

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use scdet_core::liealg::{reduction_constants, s_values, Parity, Setup, SetupPreset};
use scdet_core::partition::{Eta, Partitions, RootCopy};
use scdet_core::rootdata::{family_preset, pi_bijection_holds, Family, N3Case, Sign};
use scdet_core::scalar::{q, qi};
use scdet_core::Q;

/// Rational in `(-1/2, 1/2]` with a small denominator.
fn small_phase() -> impl Strategy<Value = Q> {
    (1u8..=12, -6i64..=6).prop_filter_map("in range", |(d, n)| {
        let v = q(n, d as i64);
        if v > q(-1, 2) && v <= q(1, 2) {
            Some(v)
        } else {
            None
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_family_boundary_identities(a in small_phase()) {
        let st = Setup::new(SetupPreset::N2Ramond(a.clone())).unwrap();
        let sv = s_values(&st);
        let rc = reduction_constants(&st, &sv);
        // s-duality against the dual basis
        let dual = st.algebra.dual_basis();
        for i in st.s_prime() {
            let nz: Vec<usize> =
                (0..st.algebra.dim()).filter(|&l| !dual[i][l].is_zero()).collect();
            prop_assert_eq!(nz.len(), 1);
            prop_assert_eq!(sv.s[i].clone() + &sv.s[nz[0]], Q::one());
        }
        // signed boundary sum over the middle grade
        let sum: Q = st.s_half().iter().map(|&i| st.algebra.parity[i].sign_q() * &sv.s[i]).sum();
        prop_assert_eq!(sum, -qi(sv.epsilon as i64) / qi(2));
        // 2 gamma'(x) = 1 - h_vee - eps/2
        prop_assert_eq!(
            st.weight_on_x(&rc.gamma_prime) * qi(2),
            Q::one() - &st.algebra.dual_coxeter - qi(sv.epsilon as i64) / qi(2)
        );
    }

    #[test]
    fn partition_monotone_and_doubling(a in small_phase(), lvl_num in 0i64..=4) {
        let d = family_preset(&Family::N2Ramond { a }).unwrap();
        let depth = qi(2);
        let p = Partitions::new(&d, &depth);
        let eta = Eta { level: q(lvl_num, 2), nat: vec![Q::zero()] };
        // removing a copy never increases the count
        let removed = RootCopy { level: Q::one(), nat: vec![Q::zero()], parity: Parity::Even };
        prop_assert!(p.p_reduced(&removed, &eta) <= p.p(&eta));
        // the zero root is absent here, so P = P'
        prop_assert_eq!(p.p(&eta), p.p_prime(&eta));
    }

    #[test]
    fn series_matches_counting(a in small_phase()) {
        let d = family_preset(&Family::N2Ramond { a }).unwrap();
        let depth = q(3, 2);
        let p = Partitions::new(&d, &depth);
        let s = scdet_core::partition::w_partition_series(&d, &depth, &qi(12));
        for (eta, coeff) in s.terms() {
            if eta.level <= depth {
                prop_assert_eq!(coeff as u64, p.p_prime(&eta));
            }
        }
    }

    #[test]
    fn bijection_for_random_n4_parameters(a in small_phase(), b in small_phase()) {
        let d = family_preset(&Family::N4Ramond { a, b }).unwrap();
        prop_assert!(pi_bijection_holds(&d, &qi(2)));
    }

    #[test]
    fn bijection_for_random_n3_parameters(a in small_phase()) {
        let case = if a.is_positive() { N3Case::II } else { N3Case::I };
        let d = family_preset(&Family::N3 { case, a: a.clone() }).unwrap();
        prop_assert!(pi_bijection_holds(&d, &qi(2)));
        let d = family_preset(&Family::N3 { case: N3Case::III, a }).unwrap();
        prop_assert!(pi_bijection_holds(&d, &qi(2)));
    }

    #[test]
    fn bijection_for_random_big_n4(b in small_phase()) {
        let sign = if b.is_negative() { Sign::Minus } else { Sign::Plus };
        let d = family_preset(&Family::BigN4Twisted { sign, b }).unwrap();
        prop_assert!(pi_bijection_holds(&d, &qi(2)));
    }
}

#[test]
fn extra_factor_conjecture_random_samples() {
    // deterministic sweep over a denser parameter grid
    for n in -4..=4i64 {
        let a = q(n, 9);
        let d = family_preset(&Family::N3 { case: N3Case::III, a }).unwrap();
        assert_eq!(
            scdet_core::detform::phi_zero_simplified(&d),
            scdet_core::detform::phi_zero_conjecture(&d)
        );
    }
}
