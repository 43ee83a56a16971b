//! Thin float-math layer over `libm` plus the summation helpers shared by the
//! dynamic programs.
//!
//! The crate is `no_std`, so `f64` methods like `exp` are not available;
//! everything funnels through here.

/// e^x.
#[inline(always)]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// Natural logarithm.
#[inline(always)]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

/// ln(1 + x), accurate near zero.
#[inline(always)]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

/// e^x − 1, accurate near zero.
#[inline(always)]
pub fn exp_m1(x: f64) -> f64 {
    libm::expm1(x)
}

/// Square root.
#[inline(always)]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// ln Γ(x) for x > 0.
#[inline(always)]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// |x|.
#[inline(always)]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// ln cosh(x), stable for large |x|.
#[inline]
pub fn ln_cosh(x: f64) -> f64 {
    let a = abs(x);
    // cosh x = e^a (1 + e^{-2a}) / 2
    a + ln_1p(exp(-2.0 * a)) - core::f64::consts::LN_2
}

/// log(e^a + e^b) without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + ln_1p(exp(lo - hi))
}

/// log Σ e^{x_i} over a slice, streaming, tolerating −∞ entries.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &x in xs {
        if x > max {
            max = x;
        }
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for &x in xs {
        sum += exp(x - max);
    }
    max + ln(sum)
}

/// Neumaier-compensated sum; the error of the plain sum is carried separately
/// and folded in at the end.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Streaming log-sum-exp accumulator: keeps a running maximum and a sum
/// rescaled to it, so it never materializes the whole term list.
#[derive(Debug, Clone, Copy)]
pub struct StreamingLse {
    max: f64,
    scaled: f64,
}

impl Default for StreamingLse {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl StreamingLse {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add_log(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += exp(x - self.max);
        } else {
            self.scaled = self.scaled * exp(self.max - x) + 1.0;
            self.max = x;
        }
    }

    /// log of the accumulated Σ e^{x_i}.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + ln(self.scaled)
        }
    }
}

/// Dot product of `a` with `b` (same length), eight independent accumulator
/// lanes in a fixed layout, so the result is identical on every run and
/// thread count.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
        acc[4] += x[4] * y[4];
        acc[5] += x[5] * y[5];
        acc[6] += x[6] * y[6];
        acc[7] += x[7] * y[7];
    }
    let mut rest = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        rest += x * y;
    }
    (((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]))) + rest
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_add_exp_matches_direct() {
        let v = log_add_exp(ln(2.0), ln(3.0));
        assert!((v - ln(5.0)).abs() < 1e-14);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
    }

    #[test]
    fn streaming_lse_matches_slice_lse() {
        let xs = [0.3, -2.0, 700.0, 699.5, -1000.0];
        let mut s = StreamingLse::new();
        for &x in &xs {
            s.add_log(x);
        }
        assert!((s.value() - log_sum_exp(&xs)).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut c = CompensatedSum::new();
        c.add(1.0);
        for _ in 0..1_000 {
            c.add(1e-18);
        }
        assert!((c.value() - (1.0 + 1e-15)).abs() < 1e-18);
    }

    #[test]
    fn ln_cosh_stable() {
        assert!((ln_cosh(0.4) - ln(libm::cosh(0.4))).abs() < 1e-15);
        // naive cosh overflows here; the stable form equals |x| - ln 2 + tiny
        assert!((ln_cosh(800.0) - (800.0 - core::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn dot_simple() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 2.0, 2.0, 2.0, 2.0];
        assert_eq!(dot(&a, &b), 30.0);
    }
}
