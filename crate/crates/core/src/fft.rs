//! In-place radix-2 complex FFT.
//!
//! Lengths must be powers of two. The forward transform computes
//! `X_k = sum_j x_j exp(-2 pi i jk / n)`; the inverse uses the opposite sign and
//! does not rescale. There is no plan cache, so calls are reentrant.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub fn forward(buf: &mut [Complex64]) {
    transform(buf, Direction::Forward);
}

pub fn inverse(buf: &mut [Complex64]) {
    transform(buf, Direction::Inverse);
}

/// Transforms `buf` in place.
///
/// # Panics
/// If `buf.len()` is not a power of two.
pub fn transform(buf: &mut [Complex64], dir: Direction) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length {n} is not a power of two");
    if n < 2 {
        return;
    }
    bit_reverse(buf);

    let sign = match dir {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    // Twiddles for the largest stage; smaller stages stride through them.
    let half = n / 2;
    let twiddles: Vec<Complex64> = (0..half)
        .map(|k| {
            let theta = sign * 2.0 * PI * k as f64 / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(len / 2);
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = *b * twiddles[k * stride];
                *b = *a - t;
                *a += t;
            }
        }
        len <<= 1;
    }
}

fn bit_reverse(buf: &mut [Complex64]) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
}

/// Linear convolution of two real sequences through a zero-padded transform.
///
/// The result has `a.len() + b.len() - 1` entries.
pub fn convolve_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa: Vec<Complex64> = Vec::with_capacity(n);
    fa.extend(a.iter().map(|&x| Complex64::new(x, 0.0)));
    fa.resize(n, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = Vec::with_capacity(n);
    fb.extend(b.iter().map(|&x| Complex64::new(x, 0.0)));
    fb.resize(n, Complex64::new(0.0, 0.0));
    forward(&mut fa);
    forward(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inverse(&mut fa);
    let scale = 1.0 / n as f64;
    fa.iter().take(out_len).map(|z| z.re * scale).collect()
}
