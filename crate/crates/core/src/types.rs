//! Fixed-width integer types and their wrap-around value semantics.
//!
//! Values are carried as `u128` bit patterns masked to the type width. Every
//! concrete operation used by the interpreter and the constant evaluator lives
//! here so both agree on the edge cases (division by zero, oversized shifts).

use std::fmt;

use serde::{Deserialize, Serialize};

/// Widest bit-vector the solver handles. Program variables are at most 64
/// bits; template expressions and sums add a few bits on top.
pub const MAX_WIDTH: u32 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BvType {
    pub signed: bool,
    pub width: u32,
}

impl BvType {
    pub const BOOL: BvType = BvType { signed: false, width: 1 };
    pub const I8: BvType = BvType::signed(8);
    pub const I16: BvType = BvType::signed(16);
    pub const I32: BvType = BvType::signed(32);
    pub const I64: BvType = BvType::signed(64);
    pub const U8: BvType = BvType::unsigned(8);
    pub const U16: BvType = BvType::unsigned(16);
    pub const U32: BvType = BvType::unsigned(32);
    pub const U64: BvType = BvType::unsigned(64);

    pub const fn signed(width: u32) -> Self {
        BvType { signed: true, width }
    }

    pub const fn unsigned(width: u32) -> Self {
        BvType { signed: false, width }
    }

    pub fn is_bool(self) -> bool {
        self == BvType::BOOL
    }

    /// True for the widths a source program may declare.
    pub fn is_source_width(self) -> bool {
        matches!(self.width, 1 | 8 | 16 | 32 | 64)
    }

    pub fn mask(self) -> u128 {
        mask(self.width)
    }

    pub fn min_value(self) -> i128 {
        if self.signed {
            -(1i128 << (self.width - 1))
        } else {
            0
        }
    }

    pub fn max_value(self) -> i128 {
        if self.signed {
            (1i128 << (self.width - 1)) - 1
        } else if self.width >= 127 {
            i128::MAX
        } else {
            (1i128 << self.width) - 1
        }
    }

    /// Interpret a bit pattern as an integer of this type.
    pub fn to_int(self, bits: u128) -> i128 {
        if self.signed {
            to_signed(bits, self.width)
        } else {
            (bits & self.mask()) as i128
        }
    }

    /// Wrap an integer into this type's bit pattern.
    pub fn from_int(self, v: i128) -> u128 {
        (v as u128) & self.mask()
    }

    pub fn fits(self, v: i128) -> bool {
        v >= self.min_value() && v <= self.max_value()
    }
}

impl fmt::Display for BvType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bool() {
            write!(f, "bool")
        } else {
            write!(f, "{}{}", if self.signed { "i" } else { "u" }, self.width)
        }
    }
}

pub fn mask(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

pub fn to_signed(bits: u128, width: u32) -> i128 {
    let bits = bits & mask(width);
    if width == 0 {
        return 0;
    }
    if width >= 128 {
        return bits as i128;
    }
    if bits >> (width - 1) & 1 == 1 {
        (bits | !mask(width)) as i128
    } else {
        bits as i128
    }
}

/// Concrete wrap-around operations on bit patterns of a given width.
pub mod ops {
    use super::{mask, to_signed};

    pub fn add(a: u128, b: u128, w: u32) -> u128 {
        a.wrapping_add(b) & mask(w)
    }

    pub fn sub(a: u128, b: u128, w: u32) -> u128 {
        a.wrapping_sub(b) & mask(w)
    }

    pub fn neg(a: u128, w: u32) -> u128 {
        0u128.wrapping_sub(a) & mask(w)
    }

    pub fn mul(a: u128, b: u128, w: u32) -> u128 {
        a.wrapping_mul(b) & mask(w)
    }

    /// `x / 0` is all-ones.
    pub fn udiv(a: u128, b: u128, w: u32) -> u128 {
        let (a, b) = (a & mask(w), b & mask(w));
        if b == 0 {
            mask(w)
        } else {
            a / b
        }
    }

    /// `x % 0` is `x`.
    pub fn urem(a: u128, b: u128, w: u32) -> u128 {
        let (a, b) = (a & mask(w), b & mask(w));
        if b == 0 {
            a
        } else {
            a % b
        }
    }

    /// Truncating signed division; `x / 0` is all-ones, `MIN / -1` wraps to `MIN`.
    pub fn sdiv(a: u128, b: u128, w: u32) -> u128 {
        if b & mask(w) == 0 {
            return mask(w);
        }
        let (sa, sb) = (to_signed(a, w), to_signed(b, w));
        let neg = (sa < 0) != (sb < 0);
        let q = sa.unsigned_abs() / sb.unsigned_abs();
        let q = q & mask(w);
        if neg {
            neg_bits(q, w)
        } else {
            q
        }
    }

    /// Remainder takes the dividend's sign; `x % 0` is `x`.
    pub fn srem(a: u128, b: u128, w: u32) -> u128 {
        if b & mask(w) == 0 {
            return a & mask(w);
        }
        let (sa, sb) = (to_signed(a, w), to_signed(b, w));
        let r = sa.unsigned_abs() % sb.unsigned_abs();
        if sa < 0 {
            neg_bits(r, w)
        } else {
            r & mask(w)
        }
    }

    fn neg_bits(a: u128, w: u32) -> u128 {
        0u128.wrapping_sub(a) & mask(w)
    }

    /// Shift amounts at or beyond the width give 0.
    pub fn shl(a: u128, b: u128, w: u32) -> u128 {
        let b = b & mask(w);
        if b >= w as u128 {
            0
        } else {
            (a << b) & mask(w)
        }
    }

    pub fn lshr(a: u128, b: u128, w: u32) -> u128 {
        let b = b & mask(w);
        if b >= w as u128 {
            0
        } else {
            (a & mask(w)) >> b
        }
    }

    /// Arithmetic shift; amounts at or beyond the width fill with the sign.
    pub fn ashr(a: u128, b: u128, w: u32) -> u128 {
        let b = b & mask(w);
        let sa = to_signed(a, w);
        let s = if b >= w as u128 { w.min(127) } else { b as u32 };
        ((sa >> s) as u128) & mask(w)
    }

    pub fn ult(a: u128, b: u128, w: u32) -> bool {
        (a & mask(w)) < (b & mask(w))
    }

    pub fn ule(a: u128, b: u128, w: u32) -> bool {
        (a & mask(w)) <= (b & mask(w))
    }

    pub fn slt(a: u128, b: u128, w: u32) -> bool {
        to_signed(a, w) < to_signed(b, w)
    }

    pub fn sle(a: u128, b: u128, w: u32) -> bool {
        to_signed(a, w) <= to_signed(b, w)
    }

    pub fn zext(a: u128, from: u32) -> u128 {
        a & mask(from)
    }

    pub fn sext(a: u128, from: u32, to: u32) -> u128 {
        (to_signed(a, from) as u128) & mask(to)
    }

    /// Convert a value between types: truncate, or extend by the source signedness.
    pub fn convert(a: u128, from: super::BvType, to: super::BvType) -> u128 {
        if to.width <= from.width {
            a & mask(to.width)
        } else if from.signed {
            sext(a, from.width, to.width)
        } else {
            zext(a, from.width)
        }
    }

    /// C-style value conversion: like [`convert`], except that conversion
    /// to `_Bool` from a wider type tests for non-zero.
    pub fn cast(a: u128, from: super::BvType, to: super::BvType) -> u128 {
        if to.is_bool() && !from.is_bool() {
            (a & mask(from.width) != 0) as u128
        } else {
            convert(a, from, to)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_by_zero_is_total() {
        assert_eq!(ops::udiv(7, 0, 8), 0xff);
        assert_eq!(ops::urem(7, 0, 8), 7);
        assert_eq!(ops::sdiv(7, 0, 8), 0xff);
        assert_eq!(ops::srem(0x85, 0, 8), 0x85);
    }

    #[test]
    fn signed_division_truncates_toward_zero() {
        let w = 32;
        let m7 = BvType::I32.from_int(-7);
        assert_eq!(BvType::I32.to_int(ops::sdiv(m7, 2, w)), -3);
        assert_eq!(BvType::I32.to_int(ops::srem(m7, 2, w)), -1);
        let min = BvType::I32.from_int(i32::MIN as i128);
        assert_eq!(ops::sdiv(min, BvType::I32.from_int(-1), w), min);
        assert_eq!(BvType::I32.to_int(ops::sdiv(min, 3, w)), -715827882);
        assert_eq!(BvType::I32.to_int(ops::srem(min, 3, w)), -2);
    }

    #[test]
    fn wraparound_add() {
        assert_eq!(ops::add(200, 100, 8), 44);
    }

    #[test]
    fn type_ranges() {
        assert_eq!(BvType::I32.min_value(), -2147483648);
        assert_eq!(BvType::U32.max_value(), 4294967295);
        assert_eq!(BvType::signed(33).max_value(), 4294967295);
        assert!(!BvType::U8.fits(256));
        assert_eq!(to_signed(0xff, 8), -1);
    }
}
