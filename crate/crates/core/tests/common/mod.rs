//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Bessel function of the first kind by the trapezoidal rule on
/// `J_n(x) = (1/π) ∫_0^π cos(nτ − x sin τ) dτ`.
///
/// The integrand extends to a smooth 2π-periodic function, so the rule
/// converges geometrically; 4096 panels give machine precision for
/// `|n|, x ≤ 150`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    const PANELS: usize = 4096;
    let h = PI / PANELS as f64;
    let f = |tau: f64| (n as f64 * tau - x * tau.sin()).cos();
    // Neumaier summation keeps the rounding error independent of PANELS.
    let (mut acc, mut comp) = (0.5 * (f(0.0) + f(PI)), 0.0);
    for k in 1..PANELS {
        let v = f(k as f64 * h);
        let t = acc + v;
        comp += if acc.abs() >= v.abs() { (acc - t) + v } else { (v - t) + acc };
        acc = t;
    }
    (acc + comp) / PANELS as f64
}

/// Free-lattice amplitude `(−i)^{n−n₀} J_{n−n₀}(t)` for the packet started at `n0`.
pub fn free_packet_amplitude(site: usize, n0: usize, t: f64) -> Complex64 {
    let d = site as i64 - n0 as i64;
    let phase = match d.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    };
    phase * bessel_j(d, t)
}

/// Mean of `2(s − s²)` over every `L`-subset, enumerated by bitmask.
pub fn brute_force_block_average(probs: &[f64], l: usize) -> f64 {
    let n = probs.len();
    let mut total = 0.0;
    let mut count = 0u64;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != l {
            continue;
        }
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| probs[i]).sum();
        total += 2.0 * (s - s * s);
        count += 1;
    }
    total / count as f64
}

/// `Σ_n |ψ_n|⁴` straight from amplitudes.
pub fn sum_fourth_powers(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr().powi(2)).sum()
}
