use schemmel::arith::nth_prime;
use schemmel::certify::enumerate_sparsely;
use schemmel::construct::{build_member, doubling_family, validate_params, ConstructError, ConstructionParams};

const X: u64 = 300_000;

#[test]
fn built_members_are_certified() {
    for r in 1..=5 {
        let cert = enumerate_sparsely(r, X).unwrap();
        let mut checked = 0;
        for k in 1..=12 {
            for ell in 0..=4 {
                for d in 1..=20 {
                    let params = ConstructionParams { r, k, ell, d };
                    let valid = validate_params(&params).unwrap().is_valid();
                    match build_member(&params) {
                        Ok(n) => {
                            assert!(valid);
                            if n <= X {
                                assert!(cert.contains(n), "{params:?} -> {n}");
                                checked += 1;
                            }
                        }
                        Err(ConstructError::InvalidParams(rep)) => {
                            assert!(!valid);
                            assert!(!rep.violations.is_empty());
                        }
                        Err(e) => panic!("{params:?}: {e}"),
                    }
                }
            }
        }
        assert!(checked > 0, "r={r}");
    }
}

#[test]
fn family_members_are_certified() {
    for r in 1..=3 {
        let cert = enumerate_sparsely(r, X).unwrap();
        let family = doubling_family(r, 40).unwrap();
        let small: Vec<u64> = family.iter().filter_map(|m| m.n).filter(|&n| n <= X).collect();
        assert!(!small.is_empty());
        for n in small {
            assert!(cert.contains(n), "r={r} n={n}");
        }
    }
}

#[test]
fn family_logs_match_products() {
    for m in doubling_family(1, 15).unwrap() {
        let n = m.n.expect("small k fits");
        assert_eq!(m.primes.iter().product::<u64>(), n);
        assert!((m.log_n - (n as f64).ln()).abs() < 1e-9);
        let pk = nth_prime(m.k).unwrap();
        assert!(m.top_prime() < 2 * pk - 1 && m.top_prime() >= pk);
    }
}
