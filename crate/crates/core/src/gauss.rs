//! Gauss–Legendre rules on [0, 1] at extended precision.
//!
//! Nodes are found by Newton iteration on the Legendre polynomial, seeded
//! from the usual cosine estimates in double precision. These rules seed the
//! 1-D continuation solver and serve as the per-panel rule of the certified
//! integration oracles.

use crate::real::{Ctx, Real};

/// Legendre P_n(t) and its derivative on [-1, 1] via the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, t: &Real, ctx: &Ctx) -> (Real, Real) {
    let mut p_prev = ctx.one();
    let mut p = t.clone();
    if n == 0 {
        return (p_prev, ctx.zero());
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}
        let kf = ctx.real(k as u32);
        let next = (ctx.real(2 * k as u32 + 1) * t * &p - &kf * &p_prev) / ctx.real(k as u32 + 1);
        p_prev = std::mem::replace(&mut p, next);
    }
    // (1 - t^2) P' = n (P_{n-1} - t P_n)
    let one_minus_t2 = ctx.one() - t.clone() * t;
    let deriv = ctx.real(n as u32) * (p_prev - t.clone() * &p) / one_minus_t2;
    (p, deriv)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [0, 1].
///
/// Nodes are strictly increasing; weights sum to 1. The rule integrates
/// polynomials through degree 2n-1 exactly.
pub fn gauss_legendre_01(n: usize, ctx: &Ctx) -> (Vec<Real>, Vec<Real>) {
    assert!(n >= 1, "rule must have at least one node");
    let mut nodes = vec![ctx.zero(); n];
    let mut weights = vec![ctx.zero(); n];
    let tol = {
        let mut e = ctx.one();
        e >>= ctx.bits() - 6;
        e
    };
    let half = n / 2;
    for i in 0..half + (n % 2) {
        // descending node index i = 0 is the largest root
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut t = ctx.real(guess);
        for _ in 0..200 {
            let (p, dp) = legendre_with_derivative(n, &t, ctx);
            let step = p / dp;
            t -= &step;
            if step.abs() < tol {
                break;
            }
        }
        if n % 2 == 1 && i == half {
            t = ctx.zero(); // middle root is exact
        }
        let (_, dp) = legendre_with_derivative(n, &t, ctx);
        let one_minus_t2 = ctx.one() - t.clone() * &t;
        let w = ctx.real(2) / (one_minus_t2 * dp.clone() * dp);
        // map [-1,1] -> [0,1]; t descending in i, so node order ascends from the far end.
        // The low node mirrors the high one exactly so rules are bit-symmetric.
        let hi = n - 1 - i;
        nodes[hi] = (ctx.one() + &t) / ctx.real(2);
        nodes[i] = ctx.one() - &nodes[hi];
        weights[hi] = w / ctx.real(2);
        weights[i] = weights[hi].clone();
    }
    (nodes, weights)
}
