//! Dense polynomials over F_p, coefficient lists LSB-first.
//!
//! Only what field construction needs: reduction, products, gcd and the two
//! irreducibility tests (trial division and distinct-degree).

pub(crate) type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
    let p64 = p as u64;
    let mut b = base as u64 % p64;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p64;
        }
        b = b * b % p64;
        exp >>= 1;
    }
    acc as u32
}

pub(crate) fn rem(a: &[u32], f: &[u32], p: u32) -> Poly {
    let df = degree(f).expect("division by zero polynomial");
    let lead_inv = inv_mod(f[df], p) as u64;
    let mut r: Vec<u32> = a.to_vec();
    let p64 = p as u64;
    while let Some(dr) = degree(&r) {
        if dr < df {
            break;
        }
        let c = r[dr] as u64 * lead_inv % p64;
        let shift = dr - df;
        for (i, &fc) in f.iter().enumerate().take(df + 1) {
            let sub = c * fc as u64 % p64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p64 - sub) % p64) as u32;
        }
    }
    trim(r)
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p64 = p as u64;
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Poly {
    rem(&mul(a, b, p), f, p)
}

fn powmod(base: &[u32], mut exp: u64, f: &[u32], p: u32) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(&acc, &b, f, p);
        }
        b = mulmod(&b, &b, f, p);
        exp >>= 1;
    }
    acc
}

/// Exhaustive trial division by every monic polynomial of degree 1..=deg/2.
pub(crate) fn is_irreducible_trial(f: &[u32], p: u32) -> bool {
    let Some(df) = degree(f) else { return false };
    if df == 0 {
        return false;
    }
    for d in 1..=df / 2 {
        // monic divisors of degree d: low coefficients enumerate F_p^d
        let mut low = vec![0u32; d];
        loop {
            let mut g = low.clone();
            g.push(1);
            if rem(f, &g, p).is_empty() {
                return false;
            }
            // odometer increment
            let mut i = 0;
            while i < d {
                low[i] += 1;
                if low[i] < p {
                    break;
                }
                low[i] = 0;
                i += 1;
            }
            if i == d {
                break;
            }
        }
    }
    true
}

/// Distinct-degree (Ben-Or) test: gcd(x^{p^i} - x, f) = 1 for all i <= deg/2.
pub(crate) fn is_irreducible_ddf(f: &[u32], p: u32) -> bool {
    let Some(df) = degree(f) else { return false };
    if df == 0 {
        return false;
    }
    let x: Poly = vec![0, 1];
    let mut xp = rem(&x, f, p);
    for _ in 1..=df / 2 {
        xp = powmod(&xp, p as u64, f, p);
        let g = gcd(f, &sub(&xp, &x, p), p);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// Trial division when the divisor space is small, distinct-degree otherwise.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let df = degree(f).unwrap_or(0);
    let trial_space = (p as f64).powi((df / 2) as i32);
    if df <= 16 && trial_space <= 65536.0 {
        is_irreducible_trial(f, p)
    } else {
        is_irreducible_ddf(f, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_and_ddf_agree_on_small_degrees() {
        for &p in &[2u32, 3, 5] {
            for m in 1..=5usize {
                let count = (p as usize).pow(m as u32);
                for code in 0..count {
                    let mut f: Poly = (0..m)
                        .map(|i| ((code / (p as usize).pow(i as u32)) % p as usize) as u32)
                        .collect();
                    f.push(1);
                    assert_eq!(
                        is_irreducible_trial(&f, p),
                        is_irreducible_ddf(&f, p),
                        "p={p} f={f:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree 4 over F_2 is 3, over F_3 is 18
        let count = |p: u32, m: usize| {
            (0..(p as usize).pow(m as u32))
                .filter(|code| {
                    let mut f: Poly = (0..m)
                        .map(|i| ((code / (p as usize).pow(i as u32)) % p as usize) as u32)
                        .collect();
                    f.push(1);
                    is_irreducible(&f, p)
                })
                .count()
        };
        assert_eq!(count(2, 4), 3);
        assert_eq!(count(3, 4), 18);
        assert_eq!(count(2, 8), 30);
    }

    #[test]
    fn gcd_of_coprime_is_unit() {
        let g = gcd(&[1, 1], &[0, 1], 2);
        assert_eq!(g, vec![1]);
    }
}
