/// `μ(n)` for `0 ≤ n ≤ y` by a linear sieve; entry 0 is unused and set to 0.
pub fn mobius_sieve(y: usize) -> Vec<i8> {
    let mut mu = vec![0i8; y + 1];
    if y == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut composite = vec![false; y + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=y {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > y {
                break;
            }
            composite[m] = true;
            if i % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[i];
        }
    }
    mu
}

/// Mertens function `M(y) = Σ_{n ≤ y} μ(n)`.
pub fn mertens(y: usize) -> i64 {
    mobius_sieve(y).iter().map(|&m| m as i64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let mu = mobius_sieve(30);
        assert_eq!(mu[1], 1);
        assert_eq!(mu[2], -1);
        assert_eq!(mu[4], 0);
        assert_eq!(mu[6], 1);
        assert_eq!(mu[30], -1);
        assert_eq!(mu[12], 0);
    }

    #[test]
    fn mertens_reference_values() {
        // M(10) = −1, M(100) = 1, M(1000) = 2
        assert_eq!(mertens(10), -1);
        assert_eq!(mertens(100), 1);
        assert_eq!(mertens(1000), 2);
    }
}
