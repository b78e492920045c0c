use crate::error::{Error, Result};

/// A bit-packed element of `{-1, +1}^n`: a set bit is spin +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    n: usize,
    words: Vec<u64>,
}

impl SpinConfig {
    pub fn all_minus(n: usize) -> Self {
        SpinConfig { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn all_plus(n: usize) -> Self {
        let mut c = Self::all_minus(n);
        for (k, w) in c.words.iter_mut().enumerate() {
            let bits = (n - 64 * k).min(64);
            *w = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        }
        c
    }

    /// Any positive entry is +1, anything else -1.
    pub fn from_spins(spins: &[i8]) -> Self {
        let mut c = Self::all_minus(spins.len());
        for (i, &s) in spins.iter().enumerate() {
            if s > 0 {
                c.set(i, true);
            }
        }
        c
    }

    /// Configuration whose bit `i` of `code` is spin `i` (n ≤ 64).
    pub fn from_code(n: usize, code: u64) -> Self {
        assert!(n <= 64);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut c = Self::all_minus(n);
        if n > 0 {
            c.words[0] = code & mask;
        }
        c
    }

    pub fn code(&self) -> u64 {
        assert!(self.n <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_plus(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        if self.is_plus(i) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, plus: bool) {
        let bit = 1u64 << (i & 63);
        if plus {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    pub fn count_plus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `Σ_i x_i`.
    pub fn sum(&self) -> i64 {
        2 * self.count_plus() as i64 - self.n as i64
    }

    /// `X̄ = (1/n) Σ_i x_i`.
    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.n as f64
    }

    pub fn to_spins(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.spin(i)).collect()
    }

    pub fn negated(&self) -> Self {
        let mut c = self.clone();
        for w in c.words.iter_mut() {
            *w = !*w;
        }
        let tail = self.n % 64;
        if tail != 0 {
            *c.words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        c
    }

    fn bytes(&self) -> Vec<u8> {
        (0..self.n.div_ceil(8)).map(|k| (self.words[k / 8] >> (8 * (k % 8))) as u8).collect()
    }

    /// Lowercase hex of the packed bits; byte k holds spins 8k..8k+7, spin
    /// 8k+b in bit b.
    pub fn to_hex(&self) -> String {
        hex::encode(self.bytes())
    }

    pub fn from_hex(n: usize, text: &str) -> Result<Self> {
        let bytes = hex::decode(text.trim()).map_err(|e| Error::InvalidParameter(format!("bad hex: {e}")))?;
        if bytes.len() != n.div_ceil(8) {
            return Err(Error::DimensionMismatch { expected: n.div_ceil(8), got: bytes.len() });
        }
        let mut c = Self::all_minus(n);
        for (k, &b) in bytes.iter().enumerate() {
            c.words[k / 8] |= (b as u64) << (8 * (k % 8));
        }
        if c.negated().negated() != c {
            return Err(Error::InvalidParameter("bits set beyond n".into()));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let c = SpinConfig::from_spins(&[1, -1, 1, 1]);
        assert_eq!(c.sum(), 2);
        assert_eq!(c.mean(), 0.5);
        assert_eq!(c.code(), 0b1101);
        assert_eq!(SpinConfig::all_plus(70).sum(), 70);
        assert_eq!(SpinConfig::all_plus(70).negated(), SpinConfig::all_minus(70));
        assert_eq!(c.to_hex(), "0d");
        assert!(SpinConfig::from_hex(4, "1d").is_err());
    }

    proptest! {
        #[test]
        fn packing_round_trips(spins in prop::collection::vec(prop_oneof![Just(-1i8), Just(1i8)], 1..200)) {
            let c = SpinConfig::from_spins(&spins);
            prop_assert_eq!(c.to_spins(), spins.clone());
            prop_assert_eq!(SpinConfig::from_hex(spins.len(), &c.to_hex()).unwrap(), c.clone());
            prop_assert_eq!(c.negated().negated(), c.clone());
            prop_assert_eq!(c.negated().sum(), -c.sum());
        }
    }
}
