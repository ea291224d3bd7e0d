use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Binomial coefficient with overflow detection. Returns 0 when r > n and an
/// error once the exact value no longer fits in a u64 (never wraps).
pub fn binomial(n: u64, r: u64) -> Result<u64> {
    if r > n {
        return Ok(0);
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=r {
        // acc stays exact: after this step it equals C(n - r + i, i),
        // which is monotone in i, so a single bound check suffices.
        acc = acc * (n - r + i) as u128 / i as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::Overflow {
                what: "binomial coefficient",
            });
        }
    }
    Ok(acc as u64)
}
