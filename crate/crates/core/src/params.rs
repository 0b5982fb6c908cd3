//! Numeric knobs of the embedding engine and the exact integer arithmetic
//! behind every `⌈c·√δ·k⌉`-style threshold.
//!
//! Thresholds are never computed in floating point: `⌈x⌉` and `⌊x⌋` for
//! `x = c·√δ·k` are derived from the exact rational `x² = c²·δ·k²` via big
//! integer square roots, so boundary cases round the same way on every
//! platform.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

pub type Rat = Ratio<u64>;

/// Parses "p/q", plain integers, decimals ("0.05"), and scientific notation
/// with integer mantissa ("1e-10", "2.5e-3").
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = |msg: &str| Error::InvalidParameters(format!("cannot parse rational {s:?}: {msg}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: u64 = p.trim().parse().map_err(|_| bad("numerator"))?;
        let den: u64 = q.trim().parse().map_err(|_| bad("denominator"))?;
        if den == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Rat::new(num, den));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad("exponent"))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("empty"));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: u64 = digits.parse().map_err(|_| bad("mantissa"))?;
    let shift = exp - frac_part.len() as i32;
    let pow = |e: u32| -> Result<u64> {
        10u64
            .checked_pow(e)
            .ok_or_else(|| bad("exponent out of range"))
    };
    if shift >= 0 {
        let num = num
            .checked_mul(pow(shift as u32)?)
            .ok_or_else(|| bad("value out of range"))?;
        Ok(Rat::new(num, 1))
    } else {
        Ok(Rat::new(num, pow((-shift) as u32)?))
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Exact `⌊c·√δ·k⌋` for non-negative rationals `c`, `δ`.
pub fn floor_mul_sqrt(c: Rat, delta: Rat, k: usize) -> usize {
    // x = c·√δ·k, x² = N/D with N = pc²·pd·k², D = qc²·qd.
    // ⌊x⌋ = ⌊⌊√(N·D)⌋ / D⌋.
    let n = big(*c.numer()).pow(2) * big(*delta.numer()) * big(k as u64).pow(2);
    let d = big(*c.denom()).pow(2) * big(*delta.denom());
    let s = (&n * &d).sqrt();
    (s / d).to_usize().expect("threshold exceeds usize range")
}

/// Exact `⌈c·√δ·k⌉`.
pub fn ceil_mul_sqrt(c: Rat, delta: Rat, k: usize) -> usize {
    let n = big(*c.numer()).pow(2) * big(*delta.numer()) * big(k as u64).pow(2);
    let d = big(*c.denom()).pow(2) * big(*delta.denom());
    let f = floor_mul_sqrt(c, delta, k);
    if big(f as u64).pow(2) * d == n {
        f
    } else {
        f + 1
    }
}

/// Exact `⌈c·k⌉`.
pub fn ceil_mul(c: Rat, k: usize) -> usize {
    let num = *c.numer() as u128 * k as u128;
    let den = *c.denom() as u128;
    (num.div_ceil(den)) as usize
}

/// Exact test `x ≤ c·y`.
pub fn le_mul(x: usize, c: Rat, y: usize) -> bool {
    (x as u128) * (*c.denom() as u128) <= (*c.numer() as u128) * (y as u128)
}

/// Exact test `x < c·y`.
pub fn lt_mul(x: usize, c: Rat, y: usize) -> bool {
    (x as u128) * (*c.denom() as u128) < (*c.numer() as u128) * (y as u128)
}

/// Every numeric constant of the embedding procedure. Defaults follow the
/// published choices (`delta = 10⁻¹⁰` and the stock multipliers); any of them
/// can be overridden to exercise individual phases at small scale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterSet {
    /// The slack `δ` in the host-size bound `n ≤ (1+δ)k`.
    pub delta: Rat,
    /// Leaf-count threshold multiplier; the many-leaf case requires at least
    /// `⌈c_leafcut·√δ·k⌉` leaves.
    pub c_leafcut: Rat,
    /// Number of degree-2 path vertices consumed early: `⌊c_r1·√δ·k⌋`.
    pub c_r1: Rat,
    /// Condition (A) budget: `|J_π| ≤ c_a·√δ·k`.
    pub c_a: Rat,
    /// Condition (B) reservoir: `|H_π| ≥ c_b·√δ·k`.
    pub c_b: Rat,
    /// Permutation prefix fraction: `|V_π| = ⌈c_prefix·k⌉`.
    pub c_prefix: Rat,
    /// Non-neighbour fraction in the good-reservoir definition (`< c·a`).
    pub c_nonneigh: Rat,
    /// Small-set threshold `deg ≤ c_small_k·k + c_small_a·a`.
    pub c_small_k: Rat,
    pub c_small_a: Rat,
    /// Low-degree trim size: `⌈c_sprime·√δ·k⌉` vertices.
    pub c_sprime: Rat,
    /// Maximum permutation resamples before giving up.
    pub retry_budget: usize,
}

impl Default for ParameterSet {
    fn default() -> Self {
        ParameterSet {
            delta: Rat::new(1, 10_000_000_000),
            c_leafcut: Rat::from_integer(10),
            c_r1: Rat::from_integer(100),
            c_a: Rat::from_integer(30),
            c_b: Rat::from_integer(16),
            c_prefix: Rat::new(49, 50),
            c_nonneigh: Rat::new(1, 3),
            c_small_k: Rat::new(2, 3),
            c_small_a: Rat::from_integer(1),
            c_sprime: Rat::from_integer(2),
            retry_budget: 64,
        }
    }
}

impl ParameterSet {
    pub fn with_delta(mut self, delta: Rat) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        use num_traits::Zero;
        let err = |m: &str| Err(Error::InvalidParameters(m.to_string()));
        if self.delta.is_zero() || self.delta > Rat::from_integer(1) {
            return err("delta must lie in (0, 1]");
        }
        if self.c_prefix.is_zero() || self.c_prefix >= Rat::from_integer(1) {
            return err("c_prefix must lie in (0, 1)");
        }
        if self.retry_budget == 0 {
            return err("retry_budget must be at least 1");
        }
        Ok(())
    }

    /// `⌈c_leafcut·√δ·k⌉` — minimum leaf count for the many-leaf case.
    pub fn leaf_threshold(&self, k: usize) -> usize {
        ceil_mul_sqrt(self.c_leafcut, self.delta, k)
    }

    /// `⌊c_r1·√δ·k⌋` — vertices covered by the early path block.
    pub fn r1_target(&self, k: usize) -> usize {
        floor_mul_sqrt(self.c_r1, self.delta, k)
    }

    /// `min(n, ⌈c_sprime·√δ·k⌉)` — size of the low-degree trim.
    pub fn s_prime_size(&self, k: usize, n: usize) -> usize {
        ceil_mul_sqrt(self.c_sprime, self.delta, k).min(n)
    }

    /// `⌈c_prefix·k⌉` — permutation prefix length.
    pub fn prefix_len(&self, k: usize) -> usize {
        ceil_mul(self.c_prefix, k)
    }

    /// Condition (A): `x ≤ c_a·√δ·k`.
    pub fn passes_a(&self, j_len: usize, k: usize) -> bool {
        j_len <= floor_mul_sqrt(self.c_a, self.delta, k)
    }

    /// Condition (B): `x ≥ c_b·√δ·k`.
    pub fn passes_b(&self, h_len: usize, k: usize) -> bool {
        h_len >= ceil_mul_sqrt(self.c_b, self.delta, k)
    }

    /// `⌈c_b·√δ·k⌉` — size of the reserved good set.
    pub fn h_prime_size(&self, k: usize) -> usize {
        ceil_mul_sqrt(self.c_b, self.delta, k)
    }

    /// Small-set membership: `deg ≤ c_small_k·k + c_small_a·a`, exactly.
    pub fn is_small_degree(&self, deg: usize, k: usize, a: usize) -> bool {
        // deg ≤ pk·k/qk + pa·a/qa  ⟺  deg·qk·qa ≤ pk·k·qa + pa·a·qk
        let (pk, qk) = (
            *self.c_small_k.numer() as u128,
            *self.c_small_k.denom() as u128,
        );
        let (pa, qa) = (
            *self.c_small_a.numer() as u128,
            *self.c_small_a.denom() as u128,
        );
        (deg as u128) * qk * qa <= pk * (k as u128) * qa + pa * (a as u128) * qk
    }

    /// Non-neighbour bound in the reservoir definition: `count < c_nonneigh·a`.
    pub fn few_nonneighbors(&self, count: usize, a: usize) -> bool {
        lt_mul(count, self.c_nonneigh, a)
    }

    /// Host-size regime check `n ≤ (1+δ)k`, exactly.
    pub fn n_within_regime(&self, n: usize, k: usize) -> bool {
        if n < k {
            return true;
        }
        le_mul(n - k, self.delta, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: smallest t with t²·qc²·qd ≥ pc²·pd·k².
    fn ceil_brute(c: Rat, delta: Rat, k: usize) -> usize {
        let lhs = |t: u128| t * t * (*c.denom() as u128).pow(2) * (*delta.denom() as u128);
        let rhs = (*c.numer() as u128).pow(2) * (*delta.numer() as u128) * (k as u128).pow(2);
        let mut t = 0u128;
        while lhs(t) < rhs {
            t += 1;
        }
        t as usize
    }

    #[test]
    fn sqrt_thresholds_match_brute_force() {
        let cases = [
            (Rat::from_integer(10), Rat::new(1, 10_000_000_000), 1000),
            (Rat::from_integer(100), Rat::new(1, 100), 300),
            (Rat::from_integer(2), Rat::new(1, 4), 7),
            (Rat::new(49, 50), Rat::from_integer(1), 50),
            (Rat::from_integer(16), Rat::new(4, 1_000_000), 250),
            (Rat::from_integer(0), Rat::new(1, 2), 99),
        ];
        for (c, d, k) in cases {
            let expect_ceil = ceil_brute(c, d, k);
            assert_eq!(
                ceil_mul_sqrt(c, d, k),
                expect_ceil,
                "ceil c={c} d={d} k={k}"
            );
            let f = floor_mul_sqrt(c, d, k);
            // floor = ceil when x is an exact integer, else ceil-1
            assert!(f == expect_ceil || f + 1 == expect_ceil);
        }
    }

    #[test]
    fn sqrt_threshold_exact_square_boundary() {
        // c=2, δ=1/4, k=7: x = 2·(1/2)·7 = 7 exactly.
        let c = Rat::from_integer(2);
        let d = Rat::new(1, 4);
        assert_eq!(ceil_mul_sqrt(c, d, 7), 7);
        assert_eq!(floor_mul_sqrt(c, d, 7), 7);
    }

    #[test]
    fn paper_default_thresholds_collapse_at_desk_scale() {
        let p = ParameterSet::default();
        // ⌈2·10⁻⁵·k⌉ = 1 up to k = 50000.
        assert_eq!(p.s_prime_size(100, 1000), 1);
        assert_eq!(p.s_prime_size(50_000, usize::MAX >> 1), 1);
        assert_eq!(p.s_prime_size(50_001, usize::MAX >> 1), 2);
        assert_eq!(p.leaf_threshold(100), 1);
        assert_eq!(p.r1_target(100), 0);
    }

    #[test]
    fn ceil_mul_and_comparisons() {
        assert_eq!(ceil_mul(Rat::new(49, 50), 100), 98);
        assert_eq!(ceil_mul(Rat::new(49, 50), 101), 99);
        assert_eq!(ceil_mul(Rat::new(1, 3), 1), 1);
        assert!(le_mul(2, Rat::new(1, 3), 6));
        assert!(!le_mul(3, Rat::new(1, 3), 6) || 3 * 3 <= 6); // 3 ≤ 2 is false
        assert!(lt_mul(1, Rat::new(1, 3), 6));
        assert!(!lt_mul(2, Rat::new(1, 3), 6));
    }

    #[test]
    fn parse_rat_forms() {
        assert_eq!(parse_rat("3/4").unwrap(), Rat::new(3, 4));
        assert_eq!(parse_rat("0.05").unwrap(), Rat::new(1, 20));
        assert_eq!(parse_rat("7").unwrap(), Rat::from_integer(7));
        assert_eq!(parse_rat("1e-10").unwrap(), Rat::new(1, 10_000_000_000));
        assert_eq!(parse_rat("2.5e-3").unwrap(), Rat::new(1, 400));
        assert_eq!(parse_rat("1.5e2").unwrap(), Rat::from_integer(150));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn small_degree_threshold_is_exact() {
        let p = ParameterSet::default();
        // threshold 2k/3 + a with k=5, a=1 is 13/3 ≈ 4.33
        assert!(p.is_small_degree(4, 5, 1));
        assert!(!p.is_small_degree(5, 5, 1));
        // k=6, a=0: threshold exactly 4
        assert!(p.is_small_degree(4, 6, 0));
        assert!(!p.is_small_degree(5, 6, 0));
    }

    #[test]
    fn default_validates() {
        ParameterSet::default().validate().unwrap();
        let zero_delta = ParameterSet {
            delta: Rat::from_integer(0),
            ..ParameterSet::default()
        };
        assert!(zero_delta.validate().is_err());
        let full_prefix = ParameterSet {
            c_prefix: Rat::from_integer(1),
            ..ParameterSet::default()
        };
        assert!(full_prefix.validate().is_err());
    }
}
