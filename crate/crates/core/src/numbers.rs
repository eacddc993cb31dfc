//! Small integer number theory: gcd, 2-adic valuations, trial-division
//! primality and factorization. Everything here operates at desk scale
//! (arguments below 10^8), so the naive algorithms are the right tool.

/// Greatest common divisor. `gcd(0, m) = m`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// 2-adic valuation: largest `e` with `2^e | n`. Undefined for `n = 0`.
pub fn v2(n: u64) -> u32 {
    assert!(n != 0, "v2(0) is undefined");
    n.trailing_zeros()
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `q = p^k` with `p` prime, if possible.
pub fn as_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut k = 0;
    let mut m = q;
    while m > 1 {
        m /= p;
        k += 1;
    }
    Some((p, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_basics() {
        assert_eq!(gcd(0, 7), 7);
        assert_eq!(gcd(6, 48), 6);
        assert_eq!(gcd(30, 28), 2);
        assert_eq!(gcd(30, 60), 30);
    }

    #[test]
    fn v2_values() {
        assert_eq!(v2(48), 4);
        assert_eq!(v2(840), 3);
        assert_eq!(v2(7), 0);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors(48), vec![2, 3]);
        assert_eq!(prime_factors(624), vec![2, 3, 13]);
        assert_eq!(prime_factors(1), Vec::<u64>::new());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(as_prime_power(27), Some((3, 3)));
        assert_eq!(as_prime_power(49), Some((7, 2)));
        assert_eq!(as_prime_power(12), None);
        assert_eq!(as_prime_power(1), None);
    }
}
