//! Scalar log-likelihood-ratio algebra.
//!
//! An LLR is `ln(Pr{y | x = 0} / Pr{y | x = 1})` in natural-log units. It is
//! stored as a plain `f64` that may be `+inf` (bit surely 0) or `-inf` (bit
//! surely 1) but is never NaN.

use rand::Rng;

use crate::error::{Error, Result};

/// Log-likelihood ratio in natural-log units.
pub type Llr = f64;

/// A binary symbol, always 0 or 1.
pub type Bit = u8;

/// `ln(1 + e^{-x})` for `x >= 0`.
#[inline]
fn softplus_neg(x: f64) -> f64 {
    (-x).exp().ln_1p()
}

/// The LLR of the XOR of two independently observed bits,
/// `2 atanh(tanh(a/2) tanh(b/2))`.
///
/// Evaluated as `sgn(a) sgn(b) (min(|a|,|b|) + ln(1+e^{-(|a|+|b|)}) - ln(1+e^{-||a|-|b||}))`
/// which stays exact where the tanh form saturates. A zero operand wins over
/// an infinite one.
#[inline]
pub fn boxplus(a: Llr, b: Llr) -> Llr {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let negative = (a < 0.0) != (b < 0.0);
    let (x, y) = (a.abs(), b.abs());
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let magnitude = if hi == f64::INFINITY {
        lo
    } else {
        let m = lo + softplus_neg(lo + hi) - softplus_neg(hi - lo);
        // Rounding can push a tiny result below zero.
        m.max(0.0)
    };
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// Left fold of [`boxplus`] over a non-empty sequence.
pub fn boxplus_fold<I>(values: I) -> Result<Llr>
where
    I: IntoIterator<Item = Llr>,
{
    let mut it = values.into_iter();
    let first = it.next().ok_or(Error::Empty("boxplus_fold needs at least one value"))?;
    Ok(it.fold(first, boxplus))
}

/// Sum of two LLRs where contradictory certainties (`+inf + -inf`) give 0.
#[inline]
pub fn llr_add(a: Llr, b: Llr) -> Llr {
    let s = a + b;
    if s.is_nan() {
        0.0
    } else {
        s
    }
}

/// Hard decision on an LLR: 0 for positive, 1 for negative, a fair coin at 0.
#[inline]
pub fn hard_decision<R: Rng + ?Sized>(llr: Llr, tie_rng: &mut R) -> Bit {
    if llr > 0.0 {
        0
    } else if llr < 0.0 {
        1
    } else {
        tie_rng.random::<bool>() as Bit
    }
}

/// How a successive-cancellation decoder resolves an LLR of exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Draw a fair coin from the caller's rng.
    #[default]
    Random,
    /// Always decide 0, matching the lexicographic rule of the ML decoders.
    Zero,
}

impl TieBreak {
    #[inline]
    pub fn decide<R: Rng + ?Sized>(self, llr: Llr, rng: &mut R) -> Bit {
        match self {
            TieBreak::Random => hard_decision(llr, rng),
            TieBreak::Zero => (llr < 0.0) as Bit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tanh_form(a: f64, b: f64) -> f64 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    }

    #[test]
    fn boxplus_reference_values() {
        assert!((boxplus(2.0, 3.0) - 1.69346).abs() < 1e-5);
        assert!((boxplus(-2.0, 3.0) + 1.69346).abs() < 1e-5);
        assert!((boxplus(2.0, 3.0) - tanh_form(2.0, 3.0)).abs() < 1e-14);
    }

    #[test]
    fn boxplus_identities() {
        for a in [-7.5, -1.0, 0.3, 12.0, f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(boxplus(a, f64::INFINITY), a);
            assert_eq!(boxplus(a, f64::NEG_INFINITY), -a);
            assert_eq!(boxplus(a, 0.0), 0.0);
            assert_eq!(boxplus(0.0, a), 0.0);
        }
    }

    #[test]
    fn boxplus_large_arguments_stay_finite() {
        for (a, b) in [(30.0, 30.0), (40.0, 45.0), (-800.0, 900.0), (1e6, 1e6 + 1.0)] {
            let r = boxplus(a, b);
            let expect = a.signum() * b.signum() * f64::min(a.abs(), b.abs());
            assert!(r.is_finite());
            assert!((r - expect).abs() <= std::f64::consts::LN_2);
        }
    }

    #[test]
    fn fold_rules() {
        assert!(boxplus_fold(Vec::<f64>::new()).is_err());
        assert_eq!(boxplus_fold([4.25]).unwrap(), 4.25);
        let v = boxplus_fold([2.0, 3.0, f64::INFINITY]).unwrap();
        assert!((v - 1.69346).abs() < 1e-5);
        assert_eq!(boxplus_fold([2.0, 0.0, -5.0]).unwrap(), 0.0);
    }

    #[test]
    fn hard_decisions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(hard_decision(3.2, &mut rng), 0);
        assert_eq!(hard_decision(-0.1, &mut rng), 1);
        let ones: u32 = (0..20_000).map(|_| hard_decision(0.0, &mut rng) as u32).sum();
        // 4.5 sigma band around 10_000
        assert!((ones as f64 - 10_000.0).abs() < 4.5 * 70.72, "{ones}");
        assert_eq!(TieBreak::Zero.decide(0.0, &mut rng), 0);
        assert_eq!(TieBreak::Zero.decide(-0.0, &mut rng), 0);
    }

    #[test]
    fn llr_add_contradiction() {
        assert_eq!(llr_add(f64::INFINITY, f64::NEG_INFINITY), 0.0);
        assert_eq!(llr_add(1.5, 2.0), 3.5);
    }

    fn extended() -> impl Strategy<Value = f64> {
        prop_oneof![
            8 => -50.0f64..50.0,
            1 => Just(f64::INFINITY),
            1 => Just(f64::NEG_INFINITY),
            1 => Just(0.0),
        ]
    }

    fn close(x: f64, y: f64) -> bool {
        if x.is_infinite() || y.is_infinite() {
            return x == y;
        }
        (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
    }

    proptest! {
        #[test]
        fn commutative_and_associative(a in -40.0f64..40.0, b in -40.0f64..40.0, c in -40.0f64..40.0) {
            prop_assert_eq!(boxplus(a, b), boxplus(b, a));
            let l = boxplus(boxplus(a, b), c);
            let r = boxplus(a, boxplus(b, c));
            prop_assert!(close(l, r), "{} vs {}", l, r);
        }

        #[test]
        fn sign_and_magnitude(a in extended(), b in extended()) {
            let r = boxplus(a, b);
            prop_assert!(!r.is_nan());
            prop_assert!(r.abs() <= a.abs().min(b.abs()));
            let s = |x: f64| if x > 0.0 { 1 } else if x < 0.0 { -1 } else { 0 };
            if r != 0.0 || a == 0.0 || b == 0.0 {
                prop_assert_eq!(s(r), s(a) * s(b));
            }
            prop_assert_eq!(boxplus(-a, b), -r);
        }

        #[test]
        fn matches_tanh_form_where_it_is_accurate(a in -15.0f64..15.0, b in -15.0f64..15.0) {
            let r = boxplus(a, b);
            let t = tanh_form(a, b);
            prop_assert!((r - t).abs() <= 1e-9 * (1.0 + t.abs()));
        }
    }
}
