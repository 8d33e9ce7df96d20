//! Base-b digit expansions.
//!
//! For x ↦ b·x mod 1 the orbit of x is the shift of its base-b expansion, so
//! orbit points can be read off exactly from a digit window instead of
//! accumulating floating-point error (a naive f64 doubling orbit collapses
//! to 0 after 53 steps). Periodic points of period m are exactly the numbers
//! whose expansion repeats an m-digit block, i.e. k / (b^m − 1).

use rand::Rng;

/// Finite (or cyclic) digit sequence in base `base`, most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStream {
    base: u32,
    digits: Vec<u8>,
    cyclic: bool,
}

/// Number of base-`base` digits that resolve an f64 to below 2⁻⁶⁰.
pub fn window_len(base: u32) -> usize {
    (60.0 / (base as f64).log2()).ceil() as usize
}

impl DigitStream {
    pub fn new(base: u32, digits: Vec<u8>) -> Self {
        assert!(base >= 2);
        debug_assert!(digits.iter().all(|&d| (d as u32) < base));
        DigitStream {
            base,
            digits,
            cyclic: false,
        }
    }

    /// The purely periodic expansion `0.(block)(block)…`.
    pub fn periodic(base: u32, block: Vec<u8>) -> Self {
        assert!(!block.is_empty());
        DigitStream {
            base,
            digits: block,
            cyclic: true,
        }
    }

    /// `len` independent uniform digits: a Lebesgue-typical point resolved to
    /// `len` digits.
    pub fn random<R: Rng + ?Sized>(base: u32, len: usize, rng: &mut R) -> Self {
        let digits = (0..len).map(|_| rng.random_range(0..base) as u8).collect();
        DigitStream::new(base, digits)
    }

    /// Base-`base` digits of `x ∈ [0, 1)` obtained by repeated multiplication.
    /// Exact for base 2 (every f64 is dyadic); for other bases the digits past
    /// the f64 precision are only approximate.
    pub fn from_f64(base: u32, x: f64, len: usize) -> Self {
        let b = base as f64;
        let mut v = crate::geometry::wrap(x);
        let mut digits = Vec::with_capacity(len);
        for _ in 0..len {
            let t = v * b;
            let d = (t.floor() as u32).min(base - 1);
            digits.push(d as u8);
            v = t - d as f64;
            if v < 0.0 {
                v = 0.0;
            }
        }
        DigitStream::new(base, digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit at absolute position `i` (missing trailing digits read as 0).
    pub fn digit(&self, i: usize) -> u8 {
        if self.cyclic {
            self.digits[i % self.digits.len()]
        } else {
            self.digits.get(i).copied().unwrap_or(0)
        }
    }

    /// Value of the shifted expansion starting at digit `offset`, i.e. the
    /// `offset`-th iterate under x ↦ b·x mod 1.
    pub fn value_at(&self, offset: usize) -> f64 {
        let b = self.base as f64;
        let w = window_len(self.base);
        let mut v = 0.0;
        for j in (0..w).rev() {
            v = (v + self.digit(offset + j) as f64) / b;
        }
        crate::geometry::wrap(v)
    }

    /// The first `m` digits as a block.
    pub fn prefix(&self, m: usize) -> Vec<u8> {
        (0..m).map(|i| self.digit(i)).collect()
    }
}

/// Adds the signed integer `delta` to the m-digit base-`base` numeral `block`
/// modulo bᵐ − 1. The all-(b−1) numeral is normalized to 0, since both
/// represent the fixed point 0.
pub fn offset_block(block: &[u8], base: u32, delta: i64) -> Vec<u8> {
    let m = block.len();
    let b = base as i64;
    let mut out: Vec<i64> = block.iter().map(|&d| d as i64).collect();
    // add delta at the least significant end, propagate carries
    let mut carry = delta;
    for i in (0..m).rev() {
        if carry == 0 {
            break;
        }
        let v = out[i] + carry;
        out[i] = v.rem_euclid(b);
        carry = v.div_euclid(b);
    }
    // b^m ≡ 1 (mod b^m − 1): fold the overflow back in at the bottom
    let mut guard = 0;
    while carry != 0 && guard < 8 {
        let mut c = carry;
        for i in (0..m).rev() {
            if c == 0 {
                break;
            }
            let v = out[i] + c;
            out[i] = v.rem_euclid(b);
            c = v.div_euclid(b);
        }
        carry = c;
        guard += 1;
    }
    let mut digits: Vec<u8> = out.into_iter().map(|d| d as u8).collect();
    if digits.iter().all(|&d| d as u32 == base - 1) {
        digits.iter_mut().for_each(|d| *d = 0);
    }
    digits
}

/// Smallest d dividing `block.len()` such that the block is invariant under
/// rotation by d: the minimal period of the periodic point it encodes.
pub fn minimal_period(block: &[u8]) -> usize {
    let m = block.len();
    (1..=m)
        .filter(|d| m.is_multiple_of(*d))
        .find(|&d| (0..m).all(|i| block[i] == block[(i + d) % m]))
        .unwrap_or(m)
}

/// Renders a block as a digit string, e.g. `01001`.
pub fn block_string(block: &[u8]) -> String {
    block
        .iter()
        .map(|&d| char::from_digit(d as u32, 36).unwrap_or('?'))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeral(block: &[u8], base: u32) -> u128 {
        block
            .iter()
            .fold(0u128, |acc, &d| acc * base as u128 + d as u128)
    }

    #[test]
    fn periodic_block_value_is_rational() {
        // 9 = 01001₂ → 9/31
        let s = DigitStream::periodic(2, vec![0, 1, 0, 0, 1]);
        assert!((s.value_at(0) - 9.0 / 31.0).abs() < 1e-16);
        // shift by one digit is doubling: 18/31
        assert!((s.value_at(1) - 18.0 / 31.0).abs() < 1e-16);
        assert!((s.value_at(5) - 9.0 / 31.0).abs() < 1e-16);
    }

    #[test]
    fn base_three_blocks() {
        let s = DigitStream::periodic(3, vec![1, 2]);
        // 12₃ = 5 → 5/8
        assert!((s.value_at(0) - 5.0 / 8.0).abs() < 1e-16);
        assert!((s.value_at(1) - 7.0 / 8.0).abs() < 1e-16);
    }

    #[test]
    fn from_f64_is_exact_in_base_two() {
        let s = DigitStream::from_f64(2, 0.3, 80);
        assert_eq!(s.value_at(0), 0.3);
        let mut x = 0.3f64;
        for i in 0..60 {
            assert_eq!(s.value_at(i), x, "step {i}");
            x = crate::geometry::wrap(2.0 * x);
        }
    }

    #[test]
    fn offsets_wrap_modulo_bm_minus_one() {
        let m = 5;
        let modulus = 31u128;
        for k in 0..31u128 {
            let block: Vec<u8> = (0..m).rev().map(|i| ((k >> i) & 1) as u8).collect();
            for delta in -40i64..40 {
                let got = numeral(&offset_block(&block, 2, delta), 2);
                let want = ((k as i128 + delta as i128).rem_euclid(modulus as i128)) as u128;
                assert_eq!(got, want, "k={k} delta={delta}");
            }
        }
    }

    #[test]
    fn minimal_periods() {
        assert_eq!(minimal_period(&[0, 1, 0, 1]), 2);
        assert_eq!(minimal_period(&[0, 0, 0]), 1);
        assert_eq!(minimal_period(&[0, 1, 0, 0, 1]), 5);
        assert_eq!(block_string(&[0, 1, 0, 0, 1]), "01001");
    }
}
