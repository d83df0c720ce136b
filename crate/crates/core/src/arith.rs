//! Small integer helpers shared by the field and p-adic layers.

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

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
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

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Base-`p` digits of `j`, least significant first. Zero has no digits.
pub fn digits(mut j: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while j > 0 {
        out.push(j % p);
        j /= p;
    }
    out
}

/// `p^k`, or `None` on overflow.
pub fn checked_pow(p: u64, k: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..k {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_divisors() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_divisors(26), vec![2, 13]);
        assert_eq!(prime_divisors(2186), vec![2, 1093]);
        assert_eq!(prime_divisors(1), Vec::<u64>::new());
    }

    #[test]
    fn modular_inverse() {
        assert_eq!(inv_mod(26, 27), Some(26));
        assert_eq!(inv_mod(2, 3), Some(2));
        assert_eq!(inv_mod(3, 27), None);
        for a in 1..27u64 {
            if a % 3 != 0 {
                assert_eq!(a * inv_mod(a, 27).unwrap() % 27, 1);
            }
        }
    }

    #[test]
    fn base_digits() {
        assert_eq!(digits(13, 3), vec![1, 1, 1]);
        assert_eq!(digits(0, 5), Vec::<u64>::new());
        assert_eq!(digits(24, 5), vec![4, 4]);
    }
}
