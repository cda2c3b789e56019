//! Fixed-weight bit strings and exact binomial coefficients.
//!
//! Bit strings label clone subsets and index every Gram matrix. The one
//! canonical ordering used across the whole crate is ascending lexicographic
//! with the leftmost bit most significant, so `enumerate_weight` returns
//! strings in ascending integer order and the position of a string in that
//! list is its matrix index. Serialized form is a plain `0`/`1` string whose
//! leftmost character is site 1.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// An `N`-site binary label (`N ≤ 32`; the practical regime is `N ≤ ~16`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BitString {
    len: usize,
    mask: u32,
}

impl BitString {
    /// Build from a raw mask whose bit `len−1−i` is site `i` (0-based from
    /// the left).
    pub fn new(len: usize, mask: u32) -> Result<Self> {
        if len == 0 || len > 32 {
            return Err(Error::InvalidArgument(format!(
                "bit string length must be in 1..=32, got {len}"
            )));
        }
        if len < 32 && mask >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask {mask:#b} does not fit in {len} bits"
            )));
        }
        Ok(BitString { len, mask })
    }

    /// The all-zero string of a given length.
    pub fn zeros(len: usize) -> Self {
        Self::new(len, 0).expect("valid length")
    }

    /// String with 1s exactly at the given 0-based site indices.
    pub fn from_sites(len: usize, sites: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &s in sites {
            if s >= len {
                return Err(Error::InvalidArgument(format!(
                    "site index {s} out of range for length {len}"
                )));
            }
            mask |= 1 << (len - 1 - s);
        }
        Self::new(len, mask)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // length is always ≥ 1
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Hamming weight (number of 1 flags).
    pub fn weight(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Flag at 0-based site index `i` (0 = leftmost character).
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "site index out of range");
        (self.mask >> (self.len - 1 - i)) & 1 == 1
    }

    /// 0-based indices of the 1 flags, ascending.
    pub fn sites(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.bit(i)).collect()
    }

    fn check_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch(self.len, other.len));
        }
        Ok(())
    }

    /// `Σ_n x_n y_n`, the size of the common support.
    pub fn dot(&self, other: &BitString) -> Result<usize> {
        self.check_len(other)?;
        Ok((self.mask & other.mask).count_ones() as usize)
    }

    pub fn union(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        Ok(BitString {
            len: self.len,
            mask: self.mask | other.mask,
        })
    }

    pub fn intersection(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        Ok(BitString {
            len: self.len,
            mask: self.mask & other.mask,
        })
    }

    /// Flip every flag.
    pub fn complement(&self) -> BitString {
        let all = if self.len == 32 {
            u32::MAX
        } else {
            (1u32 << self.len) - 1
        };
        BitString {
            len: self.len,
            mask: self.mask ^ all,
        }
    }

    /// `(union, intersection, complement of x)` in one call.
    pub fn set_ops(&self, other: &BitString) -> Result<(BitString, BitString, BitString)> {
        Ok((
            self.union(other)?,
            self.intersection(other)?,
            self.complement(),
        ))
    }

    /// All `C(N,w)` strings of weight `w`, in canonical ascending order.
    pub fn enumerate_weight(n: usize, w: usize) -> Result<Vec<BitString>> {
        if n == 0 || n > 32 {
            return Err(Error::InvalidArgument(format!(
                "length must be in 1..=32, got {n}"
            )));
        }
        if w > n {
            return Err(Error::InvalidArgument(format!(
                "weight {w} exceeds length {n}"
            )));
        }
        // Gosper's hack walks fixed-popcount masks in ascending order.
        let mut out = Vec::new();
        if w == 0 {
            out.push(BitString { len: n, mask: 0 });
            return Ok(out);
        }
        let limit: u64 = 1u64 << n;
        let mut m: u64 = (1u64 << w) - 1;
        while m < limit {
            out.push(BitString {
                len: n,
                mask: m as u32,
            });
            let c = m & m.wrapping_neg();
            let r = m + c;
            m = (((r ^ m) >> 2) / c) | r;
        }
        Ok(out)
    }

    /// Position of this string in `enumerate_weight(len, weight)`.
    pub fn canonical_index(&self) -> usize {
        let list = Self::enumerate_weight(self.len, self.weight()).expect("valid string");
        list.iter()
            .position(|b| b == self)
            .expect("string enumerates itself")
    }

    /// Apply a site permutation: output site `i` takes the flag of input
    /// site `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<BitString> {
        if perm.len() != self.len {
            return Err(Error::LengthMismatch(self.len, perm.len()));
        }
        let mut mask = 0u32;
        for (i, &p) in perm.iter().enumerate() {
            if p >= self.len {
                return Err(Error::InvalidArgument(format!(
                    "permutation entry {p} out of range"
                )));
            }
            if self.bit(p) {
                mask |= 1 << (self.len - 1 - i);
            }
        }
        Ok(BitString {
            len: self.len,
            mask,
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 32 {
            return Err(Error::InvalidArgument(format!(
                "bit string must have 1..=32 characters, got {:?}",
                s
            )));
        }
        let mut mask = 0u32;
        for c in s.chars() {
            mask <<= 1;
            match c {
                '0' => {}
                '1' => mask |= 1,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid character {c:?} in bit string {s:?}"
                    )))
                }
            }
        }
        BitString::new(s.len(), mask)
    }
}

/// A binomial symbol `C(n, k)` with the out-of-range convention built in:
/// the value is 0 whenever `k < 0` or `k > n`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Binomial {
    pub n: u64,
    pub k: i64,
}

impl Binomial {
    pub fn new(n: u64, k: i64) -> Self {
        Binomial { n, k }
    }

    /// Exact value as an arbitrary-precision integer.
    pub fn value(&self) -> BigUint {
        binom(self.n, self.k)
    }
}

/// Exact binomial coefficient; 0 outside `0 ≤ k ≤ n`.
pub fn binom(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k as u64))
}

/// Binomial with a possibly negative upper index; 0 when `n < 0` as well.
pub fn binom_i(n: i64, k: i64) -> BigUint {
    if n < 0 {
        return BigUint::zero();
    }
    binom(n as u64, k)
}

/// Binomial as an exact rational (numerator of Gram-matrix entries).
pub fn binom_rat(n: i64, k: i64) -> crate::Rat {
    crate::Rat::from_integer(binom_i(n, k).into())
}

/// Binomial as `usize`, for index arithmetic at desk scale. Panics on
/// overflow, which cannot happen for the sizes this crate admits.
pub fn binom_usize(n: usize, k: usize) -> usize {
    use num_traits::ToPrimitive;
    binom(n as u64, k as i64)
        .to_usize()
        .expect("binomial fits in usize at desk scale")
}

/// Binomial rounded into `f64` (display/tolerance work only; exact paths
/// never call this).
pub fn binom_f64(n: i64, k: i64) -> f64 {
    use num_traits::ToPrimitive;
    binom_i(n, k).to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(bs("0000").weight(), 0);
        assert_eq!(bs("1011").weight(), 3);
        assert_eq!(bs("1111").weight(), 4);
    }

    #[test]
    fn dot_examples() {
        assert_eq!(bs("1100").dot(&bs("0011")).unwrap(), 0);
        assert_eq!(bs("1100").dot(&bs("1100")).unwrap(), 2);
        assert_eq!(bs("1100").dot(&bs("1010")).unwrap(), 1);
        assert!(matches!(
            bs("110").dot(&bs("1100")),
            Err(Error::LengthMismatch(3, 4))
        ));
    }

    #[test]
    fn set_ops_examples() {
        let (u, i, c) = bs("1100").set_ops(&bs("0110")).unwrap();
        assert_eq!(u, bs("1110"));
        assert_eq!(i, bs("0100"));
        assert_eq!(c, bs("0011"));
        let (u, i, c) = bs("0000").set_ops(&bs("0000")).unwrap();
        assert_eq!((u, i, c), (bs("0000"), bs("0000"), bs("1111")));
        let (u, i, c) = bs("1111").set_ops(&bs("1111")).unwrap();
        assert_eq!((u, i, c), (bs("1111"), bs("1111"), bs("0000")));
    }

    #[test]
    fn enumerate_weight_examples() {
        let e31: Vec<String> = BitString::enumerate_weight(3, 1)
            .unwrap()
            .iter()
            .map(|b| b.to_string())
            .collect();
        assert_eq!(e31, ["001", "010", "100"]);
        let e40 = BitString::enumerate_weight(4, 0).unwrap();
        assert_eq!(e40.len(), 1);
        assert_eq!(e40[0].to_string(), "0000");
        let e42 = BitString::enumerate_weight(4, 2).unwrap();
        assert_eq!(e42.len(), 6);
        assert_eq!(e42.first().unwrap().to_string(), "0011");
        assert_eq!(e42.last().unwrap().to_string(), "1100");
        assert!(BitString::enumerate_weight(3, 4).is_err());
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(3, 2), BigUint::from(3u32));
        assert_eq!(binom(5, -1), BigUint::zero());
        assert_eq!(binom(30, 15), BigUint::from(155_117_520u64));
        assert_eq!(Binomial::new(30, 15).value(), BigUint::from(155_117_520u64));
        assert!(Binomial::new(4, 7).value().is_zero());
    }

    #[test]
    fn pascal_identity_up_to_40() {
        for n in 1..=40u64 {
            for k in 0..=n as i64 {
                assert_eq!(binom(n, k), binom(n - 1, k) + binom(n - 1, k - 1));
            }
        }
    }

    #[test]
    fn display_roundtrip_and_sites() {
        let b = bs("0101");
        assert_eq!(b.to_string(), "0101");
        assert_eq!(b.sites(), vec![1, 3]);
        assert_eq!(BitString::from_sites(4, &[1, 3]).unwrap(), b);
        assert!(b.bit(1) && !b.bit(0));
        assert!("01x1".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
    }

    #[test]
    fn permute_moves_flags() {
        // reverse the sites of 1100 -> 0011
        let b = bs("1100");
        assert_eq!(b.permute(&[3, 2, 1, 0]).unwrap(), bs("0011"));
    }
}
