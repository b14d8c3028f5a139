//! Float helpers that compile with or without the standard library.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("aoi-core needs the `std` feature or the `libm` feature");

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(all(not(feature = "std"), feature = "libm"))]
    {
        libm::sqrt(x)
    }
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.ln()
    }
    #[cfg(all(not(feature = "std"), feature = "libm"))]
    {
        libm::log(x)
    }
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.exp()
    }
    #[cfg(all(not(feature = "std"), feature = "libm"))]
    {
        libm::exp(x)
    }
}

#[inline]
pub(crate) fn cbrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.cbrt()
    }
    #[cfg(all(not(feature = "std"), feature = "libm"))]
    {
        libm::cbrt(x)
    }
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & (u64::MAX >> 1))
}

/// `base^n` by binary exponentiation, so every build produces the same bits.
pub(crate) fn pow_int(base: f64, mut n: u64) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while n > 0 {
        if n & 1 == 1 {
            acc *= b;
        }
        b *= b;
        n >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow_int_edges() {
        assert_eq!(pow_int(0.0, 0), 1.0);
        assert_eq!(pow_int(0.0, 7), 0.0);
        assert_eq!(pow_int(0.5, 3), 0.125);
        assert_eq!(pow_int(1.0, u64::from(u32::MAX)), 1.0);
        // deep underflow is a clean zero
        assert_eq!(pow_int(0.5, 4096), 0.0);
    }

    #[test]
    fn abs_strips_sign() {
        assert_eq!(abs(-2.5), 2.5);
        assert_eq!(abs(2.5), 2.5);
        assert_eq!(abs(-0.0), 0.0);
        assert_eq!(abs(f64::NEG_INFINITY), f64::INFINITY);
    }
}
