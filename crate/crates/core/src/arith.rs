//! Small integer helpers shared by the field and graph code.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
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

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    let m_i = m as i64;
    let (mut r0, mut r1) = (a.rem_euclid(m_i), m_i);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m_i) as u64)
}

/// Reduce a signed integer into `0..m`.
pub fn modq(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

/// Multiplicative order of `a` modulo the prime `m` (`a` prime to `m`).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_and_orders() {
        assert_eq!(inv_mod(2, 5), Some(3));
        assert_eq!(inv_mod(-1, 3), Some(2));
        assert_eq!(inv_mod(3, 6), None);
        assert_eq!(multiplicative_order(5, 3), 2);
        assert_eq!(multiplicative_order(2, 5), 4);
        assert_eq!(prime_factors(48), vec![2, 3]);
        assert!(is_prime(13) && !is_prime(1) && !is_prime(91));
    }
}
