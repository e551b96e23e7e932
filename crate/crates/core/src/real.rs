//! Extended-precision scalar support.
//!
//! All rule generation runs on [`rug::Float`] (MPFR) values. A [`Ctx`] fixes
//! the working precision in bits and provides constructors, decimal parsing,
//! and lossless decimal rendering so the same context can be threaded through
//! every numeric routine.

use rug::float::ParseFloatError;
use rug::ops::Pow;
use rug::{Assign, Float};
use thiserror::Error;

/// Extended-precision real number.
pub type Real = Float;

const LOG2_10: f64 = 3.321928094887362;

/// Bits required to represent `digits` decimal digits, with a small guard.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 8
}

/// Decimal digits that guarantee a lossless binary -> decimal -> binary
/// round trip at `bits` of precision.
pub fn digits_for_bits(bits: u32) -> u32 {
    (bits as f64 / LOG2_10).ceil() as u32 + 2
}

#[derive(Debug, Error)]
#[error("invalid decimal number {text:?}: {source}")]
pub struct ParseRealError {
    pub text: String,
    #[source]
    source: ParseFloatError,
}

/// Working-precision context.
///
/// Cheap to copy; every constructor produces a `Real` carrying this
/// context's precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ctx {
    bits: u32,
    digits: u32,
}

impl Ctx {
    /// Context with at least `digits` decimal digits of working precision.
    pub fn from_digits(digits: u32) -> Self {
        Ctx {
            bits: bits_for_digits(digits),
            digits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// A context widened by `extra` guard digits.
    pub fn with_guard(&self, extra: u32) -> Ctx {
        Ctx::from_digits(self.digits + extra)
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits, value)
    }

    pub fn zero(&self) -> Real {
        Float::with_val(self.bits, 0)
    }

    pub fn one(&self) -> Real {
        Float::with_val(self.bits, 1)
    }

    /// Exact rational p/q at working precision.
    pub fn ratio(&self, p: i64, q: i64) -> Real {
        Float::with_val(self.bits, p) / Float::with_val(self.bits, q)
    }

    /// 10^e at working precision.
    pub fn pow10(&self, e: i32) -> Real {
        Float::with_val(self.bits, 10).pow(e)
    }

    /// Parse a decimal string at working precision.
    pub fn parse(&self, text: &str) -> Result<Real, ParseRealError> {
        match Float::parse(text.trim()) {
            Ok(incomplete) => Ok(Float::with_val(self.bits, incomplete)),
            Err(source) => Err(ParseRealError {
                text: text.to_owned(),
                source,
            }),
        }
    }

    /// Render to a decimal string that parses back to the identical value
    /// at this context's precision.
    pub fn render(&self, x: &Real) -> String {
        if x.is_zero() {
            return "0".to_owned();
        }
        x.to_string_radix(10, Some(digits_for_bits(self.bits) as usize))
    }
}

impl Default for Ctx {
    fn default() -> Self {
        Ctx::from_digits(64)
    }
}
