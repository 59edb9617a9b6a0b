//! Element-level primeness oracle.
//!
//! A ring is prime when no two nonzero ideals multiply to zero. Every nonzero
//! ideal contains a nonzero principal ideal `Id(a)`, so it is enough to test
//! the pairs `Id(a)·Id(b)`. For fixed `a` the elements `b` with
//! `Id(a)·Id(b) = 0` are exactly the right annihilator of `Id(a)`, which is an
//! ideal; its smallest nonzero element gives the smallest failing `b`.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{Closure, Elem, FiniteRing};

/// Default size bound for the oracle.
pub const ORACLE_BOUND: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeVerdict {
    pub prime: bool,
    /// Lexicographically first `(a, b)` with `Id(a)·Id(b) = 0`.
    pub witness: Option<(Elem, Elem)>,
    /// Set for the zero ring, where the definition is vacuous.
    pub degenerate: bool,
}

impl PrimeVerdict {
    pub fn prime() -> Self {
        PrimeVerdict {
            prime: true,
            witness: None,
            degenerate: false,
        }
    }

    pub fn not_prime(a: Elem, b: Elem) -> Self {
        PrimeVerdict {
            prime: false,
            witness: Some((a, b)),
            degenerate: false,
        }
    }

    pub fn degenerate() -> Self {
        PrimeVerdict {
            prime: false,
            witness: None,
            degenerate: true,
        }
    }
}

/// Generic principal-pair search. `candidates` lists the elements `a` (and
/// `b`) in increasing order; `close` computes the closed ideal generated by
/// one element, stopping early once it meets an earlier candidate.
pub(crate) fn principal_pair_search(
    ring: &FiniteRing,
    candidates: &[Elem],
    closure: &Closure,
) -> PrimeVerdict {
    let mut is_candidate = vec![false; ring.size()];
    for &c in candidates {
        is_candidate[c] = true;
    }
    for &a in candidates {
        if a == 0 {
            continue;
        }
        // If Id(a) contains a nonzero candidate c < a, then Id(c) ⊆ Id(a) and
        // c already passed, so a passes as well.
        let (ia, hit) = closure.run_until(ring, [a], |new| {
            new.iter().any(|&c| c != 0 && c < a && is_candidate[c])
        });
        if hit {
            continue;
        }
        let gens = ia.generators();
        let b = candidates
            .iter()
            .copied()
            .find(|&b| b != 0 && gens.iter().all(|&x| ring.mul(x, b) == 0));
        if let Some(b) = b {
            return PrimeVerdict::not_prime(a, b);
        }
    }
    PrimeVerdict::prime()
}

/// Decides primeness by the principal-ideal-pair criterion.
pub fn is_prime_bruteforce(ring: &FiniteRing, bound: usize) -> Result<PrimeVerdict> {
    if ring.size() > bound {
        return Err(Error::bound("ring for the primeness oracle", ring.size(), bound));
    }
    if ring.is_zero_ring() {
        return Ok(PrimeVerdict::degenerate());
    }
    let all: Vec<Elem> = ring.elements().collect();
    Ok(principal_pair_search(ring, &all, &Closure::ideal(ring)))
}

/// `aRb ≠ 0` for all nonzero `a, b`; returns the first failing pair. This is the
/// textbook element criterion for s-unital rings.
pub fn element_criterion(ring: &FiniteRing) -> Option<(Elem, Elem)> {
    let gens = ring.additive_generators();
    for a in 1..ring.size() {
        for b in 1..ring.size() {
            if gens.iter().all(|&r| ring.mul(ring.mul(a, r), b) == 0) {
                return Some((a, b));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::{ideal_generated, parse_ring, set_product};
    use super::*;

    /// Literal definition: all principal pairs, first failing in lexicographic order.
    fn naive(ring: &FiniteRing) -> Option<(Elem, Elem)> {
        let ids: Vec<_> = ring.elements().map(|a| ideal_generated(ring, [a])).collect();
        for a in 1..ring.size() {
            for b in 1..ring.size() {
                if set_product(&ids[a], &ids[b]).unwrap().is_zero() {
                    return Some((a, b));
                }
            }
        }
        None
    }

    #[test]
    fn examples() {
        let f2f2 = parse_ring("sum(F2, F2)").unwrap();
        let v = is_prime_bruteforce(&f2f2, ORACLE_BOUND).unwrap();
        assert!(!v.prime);
        let (a, b) = v.witness.unwrap();
        assert_eq!(ideal_generated(&f2f2, [a]).sorted(), vec![0, f2f2.parse_element("at(1,1)").unwrap()]);
        assert_eq!(ideal_generated(&f2f2, [b]).sorted(), vec![0, f2f2.parse_element("at(2,1)").unwrap()]);

        assert!(is_prime_bruteforce(&parse_ring("M(2, F2)").unwrap(), ORACLE_BOUND).unwrap().prime);

        let z4 = parse_ring("Z(4)").unwrap();
        assert_eq!(is_prime_bruteforce(&z4, ORACLE_BOUND).unwrap(), PrimeVerdict::not_prime(2, 2));

        let zero = parse_ring("Z(1)").unwrap();
        assert!(is_prime_bruteforce(&zero, ORACLE_BOUND).unwrap().degenerate);
        assert!(is_prime_bruteforce(&parse_ring("M(3, F2)").unwrap(), 100).is_err());
    }

    #[test]
    fn matches_naive_definition() {
        for s in [
            "Z(12)",
            "Z(9)",
            "F3",
            "GF(4)",
            "M(2, F2)",
            "M(2, Z(4))",
            "sum(F2, Z(4))",
            "group_ring(F2, C(2))",
            "group_ring(F3, C(2))",
            "group_ring(F2, C(3))",
        ] {
            let r = parse_ring(s).unwrap();
            let v = is_prime_bruteforce(&r, ORACLE_BOUND).unwrap();
            assert_eq!(v.witness, naive(&r), "{s}");
            assert_eq!(v.prime, v.witness.is_none());
        }
    }

    #[test]
    fn matrix_rings_over_small_fields_are_prime() {
        for s in ["M(1, F2)", "M(2, F2)", "M(1, F3)", "M(2, F3)"] {
            let r = parse_ring(s).unwrap();
            assert!(is_prime_bruteforce(&r, ORACLE_BOUND).unwrap().prime, "{s}");
        }
        let m3 = parse_ring("M(3, F2)").unwrap();
        assert_eq!(m3.size(), 512);
        assert!(is_prime_bruteforce(&m3, ORACLE_BOUND).unwrap().prime);
    }

    #[test]
    fn element_criterion_agrees_on_unital_rings() {
        for s in ["Z(12)", "M(2, F2)", "sum(F2, F3)", "group_ring(F2, C(2))", "GF(9)"] {
            let r = parse_ring(s).unwrap();
            let v = is_prime_bruteforce(&r, ORACLE_BOUND).unwrap();
            assert_eq!(v.prime, element_criterion(&r).is_none(), "{s}");
        }
    }
}
