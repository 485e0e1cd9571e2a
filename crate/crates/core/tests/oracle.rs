use num_bigint::BigInt;

use curvemotive::jets::{
    calibrate, calibrate_with, count_jets, count_jets_partitioned, count_jets_stratified,
    CurvePoly, JetError, DEFAULT_CAP,
};
use curvemotive::resolution::resolve_pq;
use curvemotive::zeta::{calibrated_kappa, contact_empty, denef_coefficient, ORIGIN_KAPPA};
use curvemotive::MotivicClass;

const CURVES: [(u64, u64); 3] = [(2, 3), (2, 5), (3, 4)];

fn curve(p: u64, q: u64) -> CurvePoly {
    CurvePoly::pq(p as u32, q as u32)
}

#[test]
fn partition_identity() {
    for (p, q) in CURVES {
        let f = curve(p, q);
        for field in [2, 3] {
            for n in 1..=5 {
                let total = count_jets(&f, field, n, true, DEFAULT_CAP).unwrap().raw_count;
                let sum: u64 = (1..=n)
                    .map(|k| count_jets_stratified(&f, field, n, k, DEFAULT_CAP).unwrap().raw_count)
                    .sum();
                assert_eq!(sum, total, "({p},{q}) q={field} n={n}");
            }
        }
    }
}

#[test]
fn zero_coherence_up_to_eight() {
    for (p, q) in CURVES {
        let f = curve(p, q);
        let g = resolve_pq(p, q).unwrap();
        for n in 1..=8 {
            let count = count_jets(&f, 2, n, true, DEFAULT_CAP).unwrap().raw_count;
            assert_eq!(count == 0, contact_empty(&g, n, true), "({p},{q}) n={n}");
        }
    }
}

#[test]
fn parallel_determinism() {
    let f = curve(2, 5);
    for n in [3, 5] {
        let counts: Vec<u64> = [1, 2, 5, 16, 64]
            .iter()
            .map(|&parts| count_jets_partitioned(&f, 3, n, false, DEFAULT_CAP, parts).unwrap())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
        let full = count_jets(&f, 3, n, false, DEFAULT_CAP).unwrap().raw_count;
        assert_eq!(counts[0], full);
    }
}

#[test]
fn one_kappa_per_mode_across_curves() {
    for origin_only in [true, false] {
        for (p, q) in CURVES {
            let g = resolve_pq(p, q).unwrap();
            let c = calibrate(&g, &curve(p, q), &[2, 3], &[2, 3, 4, 5, 6], origin_only, DEFAULT_CAP)
                .unwrap();
            assert_eq!(c.kappa, calibrated_kappa(origin_only), "({p},{q})");
            assert_eq!(c.samples.len(), 10);
        }
    }
}

#[test]
fn denef_reproduces_counts_at_five_and_seven() {
    let g = resolve_pq(2, 3).unwrap();
    let f = curve(2, 3);
    for field in [5u64, 7] {
        for n in 1..=4 {
            let count = count_jets(&f, field, n, true, DEFAULT_CAP).unwrap().raw_count;
            // Origin mode: count = evaluate(denef(n), q) · q^{κ - 2}.
            let value = denef_coefficient(&g, n, true)
                .shift(ORIGIN_KAPPA - 2)
                .evaluate(&BigInt::from(field))
                .unwrap();
            assert_eq!(value, BigInt::from(count), "q={field} n={n}");
        }
    }
}

#[test]
fn printed_prefactor_is_inconsistent() {
    // (L-1)^{|J|-1} [E_J^o] Σ L^{-Σ k ν}: the variant that skips the +1 in the exponent.
    let g = resolve_pq(2, 3).unwrap();
    let lm1 = &MotivicClass::lefschetz() - &MotivicClass::one();
    let printed = |n: u64| {
        let mut sum = MotivicClass::zero();
        for s in g.strata_in_mode(true) {
            let members = s.members();
            let data: Vec<(u64, u64)> = members
                .iter()
                .map(|&i| {
                    let d = g.divisor(i).unwrap();
                    (d.multiplicity, d.discrepancy)
                })
                .collect();
            let prefactor = &lm1.pow(data.len() as u32 - 1) * g.stratum_class(&s).unwrap();
            let mut inner = MotivicClass::zero();
            match data.as_slice() {
                [(a, nu)] if n % a == 0 => inner += &MotivicClass::lefschetz_power(-((n / a * nu) as i64)),
                [(a, nu_a), (b, nu_b)] => {
                    for k in 1..=n / a {
                        let rest = n - k * a;
                        if rest > 0 && rest % b == 0 {
                            let e = k * nu_a + rest / b * nu_b;
                            inner += &MotivicClass::lefschetz_power(-(e as i64));
                        }
                    }
                }
                _ => {}
            }
            sum += &(&prefactor * &inner);
        }
        sum.shift(2 * n as i64)
    };
    let err = calibrate_with(printed, &curve(2, 3), &[2, 3], &[2, 3, 4, 6], true, DEFAULT_CAP)
        .unwrap_err();
    assert!(matches!(err, JetError::Inconsistent(_)), "{err:?}");
}

#[test]
fn empty_sample_lists_are_underdetermined() {
    let g = resolve_pq(2, 3).unwrap();
    let err = calibrate(&g, &curve(2, 3), &[2], &[], true, DEFAULT_CAP).unwrap_err();
    assert_eq!(err, JetError::Underdetermined);
    // Only empty contact loci: nothing to read κ from.
    let err = calibrate(&g, &curve(2, 3), &[2, 3], &[1, 5], true, DEFAULT_CAP).unwrap_err();
    assert_eq!(err, JetError::Underdetermined);
}

#[test]
fn cap_is_enforced() {
    let err = count_jets(&curve(2, 3), 7, 12, false, DEFAULT_CAP).unwrap_err();
    assert_eq!(err.name(), "CapExceeded");
}
