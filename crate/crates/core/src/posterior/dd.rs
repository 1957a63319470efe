//! Error-free transformations for double-double coefficient arithmetic.
//!
//! Products use Dekker splitting rather than `mul_add`, which is a libm call
//! on targets without hardware FMA.

use num_complex::Complex64;

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// A factor with its Dekker split precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Factor {
    v: f64,
    hi: f64,
    lo: f64,
}

impl Factor {
    #[inline(always)]
    pub(crate) fn new(v: f64) -> Self {
        let (hi, lo) = split(v);
        Factor { v, hi, lo }
    }

    /// `self · b` as an unevaluated sum `p + e`.
    #[inline(always)]
    fn times(self, b: f64) -> (f64, f64) {
        let p = self.v * b;
        let (bh, bl) = split(b);
        (p, ((self.hi * bh - p) + self.hi * bl + self.lo * bh) + self.lo * bl)
    }

    fn neg(self) -> Self {
        Factor {
            v: -self.v,
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// Accumulates exact products, compensated.
#[derive(Default)]
struct Acc {
    s: f64,
    err: f64,
}

impl Acc {
    #[inline(always)]
    fn add_product(&mut self, f: Factor, hi: f64, lo: f64) {
        let (p, e) = f.times(hi);
        let (s, e2) = two_sum(self.s, p);
        self.s = s;
        self.err += e + e2 + f.v * lo;
    }

    #[inline(always)]
    fn finish(self) -> (f64, f64) {
        quick_two_sum(self.s, self.err)
    }
}

/// The three-tap stencil `α x_0 + w x_− + w̄ x_+` with complex `w`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    alpha: Factor,
    wr: Factor,
    wi: Factor,
    neg_wi: Factor,
}

impl Stencil {
    pub(crate) fn new(alpha: f64, w: Complex64) -> Self {
        let wi = Factor::new(w.im);
        Stencil {
            alpha: Factor::new(alpha),
            wr: Factor::new(w.re),
            wi,
            neg_wi: wi.neg(),
        }
    }

    /// Applies the stencil to double-double inputs given as `(hi, lo)`
    /// pairs; returns the result as `(hi, lo)`.
    #[inline(always)]
    pub(crate) fn apply(
        &self,
        centre: (Complex64, Complex64),
        minus: (Complex64, Complex64),
        plus: (Complex64, Complex64),
    ) -> (Complex64, Complex64) {
        let mut re = Acc::default();
        re.add_product(self.alpha, centre.0.re, centre.1.re);
        re.add_product(self.wr, minus.0.re, minus.1.re);
        re.add_product(self.neg_wi, minus.0.im, minus.1.im);
        re.add_product(self.wr, plus.0.re, plus.1.re);
        re.add_product(self.wi, plus.0.im, plus.1.im);
        let mut im = Acc::default();
        im.add_product(self.alpha, centre.0.im, centre.1.im);
        im.add_product(self.wr, minus.0.im, minus.1.im);
        im.add_product(self.wi, minus.0.re, minus.1.re);
        im.add_product(self.wr, plus.0.im, plus.1.im);
        im.add_product(self.neg_wi, plus.0.re, plus.1.re);
        let (rh, rl) = re.finish();
        let (ih, il) = im.finish();
        (Complex64::new(rh, ih), Complex64::new(rl, il))
    }
}

/// `(hi + lo) · f` renormalized.
#[inline(always)]
pub(crate) fn scale(hi: Complex64, lo: Complex64, f: Factor) -> (Complex64, Complex64) {
    let part = |h: f64, l: f64| {
        let (p, e) = f.times(h);
        quick_two_sum(p, e + f.v * l)
    };
    let (rh, rl) = part(hi.re, lo.re);
    let (ih, il) = part(hi.im, lo.im);
    (Complex64::new(rh, ih), Complex64::new(rl, il))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_are_exact() {
        // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60
        let a = 1.0 + 2f64.powi(-30);
        let (p, e) = Factor::new(a).times(a);
        assert_eq!(p, 1.0 + 2f64.powi(-29));
        assert_eq!(e, 2f64.powi(-60));
        let (p, e) = Factor::new(-a).times(a);
        assert_eq!((p, e), (-1.0 - 2f64.powi(-29), -(2f64.powi(-60))));
    }

    #[test]
    fn stencil_recovers_cancelled_bits() {
        let st = Stencil::new(1.0, Complex64::new(-0.5, 0.0));
        let x = Complex64::new(1.0 + f64::EPSILON, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        // 1·x − 0.5·1 − 0.5·1 = ε exactly
        let (h, l) = st.apply((x, zero), (one, zero), (one, zero));
        assert_eq!(h.re, f64::EPSILON);
        assert_eq!(l.re, 0.0);
        // low parts enter at full weight
        let (h, _) = st.apply((one, Complex64::new(1e-20, 0.0)), (one, zero), (one, zero));
        assert_eq!(h.re, 1e-20);
    }
}
