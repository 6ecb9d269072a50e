use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

use super::{ln_factorial, TruncatedState};
use crate::sweep::{self, Execution};

/// Wigner function at phase-space point `(x, p)`, normalized so that
/// `∫∫ W dx dp = 1` with vacuum variance 1.
///
/// Uses the displaced-parity form `W = (1/2π) tr[ρ D(β) Π D†(β)]` with
/// `D(β) Π D†(β) = D(2β) Π` and `2β = x + ip`; the displacement matrix
/// elements are the exact (untruncated) Laguerre expressions, so no
/// truncation error enters beyond the state itself.
pub fn wigner_at(state: &TruncatedState, x: f64, p: f64) -> f64 {
    displaced_parity(state.matrix(), Complex64::new(x, p)) / (2.0 * PI)
}

/// `W(xs[i], ps[j])` as a `xs.len() × ps.len()` matrix.
pub fn wigner_grid(state: &TruncatedState, xs: &[f64], ps: &[f64]) -> DMatrix<f64> {
    let rows = sweep::map(xs, Execution::default(), |&x| {
        ps.iter().map(|&p| wigner_at(state, x, p)).collect::<Vec<_>>()
    });
    DMatrix::from_fn(xs.len(), ps.len(), |i, j| rows[i][j])
}

/// `tr[ρ D(β) Π] = Σ_{m,n} ρ_{nm} (−1)^n ⟨m|D(β)|n⟩`.
fn displaced_parity(rho: &DMatrix<Complex64>, beta: Complex64) -> f64 {
    let dim = rho.nrows();
    let t = beta.norm_sqr();
    let ln_abs = if t > 0.0 { 0.5 * t.ln() } else { f64::NEG_INFINITY };
    let arg = beta.arg();
    let ln_fact: Vec<f64> = (0..dim).map(ln_factorial).collect();

    let mut total = Complex64::new(0.0, 0.0);
    for shift in 0..dim {
        // L_n^{(shift)}(t) for n = 0 .. dim−1−shift by the three-term recurrence.
        let count = dim - shift;
        let mut laguerre = vec![0.0; count];
        laguerre[0] = 1.0;
        if count > 1 {
            laguerre[1] = 1.0 + shift as f64 - t;
        }
        for j in 1..count.saturating_sub(1) {
            let jf = j as f64;
            laguerre[j + 1] = ((2.0 * jf + 1.0 + shift as f64 - t) * laguerre[j]
                - (jf + shift as f64) * laguerre[j - 1])
                / (jf + 1.0);
        }
        let phase_up = Complex64::from_polar(1.0, shift as f64 * arg);
        // ⟨n|D(β)|m⟩ for n > m equals (−β*)^k… i.e. ⟨m+k|D(β)|m⟩ with β → −β*.
        let phase_down = Complex64::from_polar(1.0, shift as f64 * (PI - arg));
        for (low, lag) in laguerre.iter().enumerate() {
            let high = low + shift;
            let magnitude = if shift == 0 {
                (-t / 2.0).exp()
            } else {
                (0.5 * (ln_fact[low] - ln_fact[high]) + shift as f64 * ln_abs - t / 2.0).exp()
            } * lag;
            if magnitude == 0.0 {
                continue;
            }
            // m = high, n = low: ⟨high|D|low⟩
            let upper = phase_up * magnitude;
            total += rho[(low, high)] * upper * parity(low);
            if shift > 0 {
                // m = low, n = high: ⟨low|D|high⟩
                let lower = phase_down * magnitude;
                total += rho[(high, low)] * lower * parity(high);
            }
        }
    }
    total.re
}

fn parity(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{cat_state, coherent_state, displacement_operator, CatParity, ComplexAmplitude};

    fn grid(range: f64, step: f64) -> Vec<f64> {
        let n = (2.0 * range / step).round() as usize;
        (0..=n).map(|i| -range + i as f64 * step).collect()
    }

    /// Independent route: parity of `D†(β) ρ D(β)` with a numerically
    /// exponentiated displacement on an enlarged basis.
    fn parity_by_exponential(state: &TruncatedState, x: f64, p: f64, big: usize) -> f64 {
        let dim = state.dim();
        let mut rho = DMatrix::zeros(big, big);
        rho.view_mut((0, 0), (dim, dim)).copy_from(state.matrix());
        let d = displacement_operator(ComplexAmplitude::new(x / 2.0, p / 2.0), big);
        let shifted = d.adjoint() * rho * d;
        let par: f64 = (0..big).map(|n| parity(n) * shifted[(n, n)].re).sum();
        par / (2.0 * PI)
    }

    #[test]
    fn vacuum_peak() {
        let vac = TruncatedState::vacuum(10).unwrap();
        assert!((wigner_at(&vac, 0.0, 0.0) - 1.0 / (2.0 * PI)).abs() < 1e-14);
        let w = wigner_at(&vac, 1.0, -0.5);
        assert!((w - (-(1.25f64) / 2.0).exp() / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn fock_one_is_negative_at_origin() {
        let one = TruncatedState::fock(1, 10).unwrap();
        assert!((wigner_at(&one, 0.0, 0.0) + 1.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn coherent_peak_sits_at_twice_the_amplitude() {
        let c = coherent_state(ComplexAmplitude::new(0.7, -0.3), 30).unwrap();
        assert!((wigner_at(&c, 1.4, -0.6) - 1.0 / (2.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn vacuum_grid_integrates_to_one() {
        let xs = grid(6.0, 0.1);
        let w = wigner_grid(&TruncatedState::vacuum(10).unwrap(), &xs, &xs);
        let integral = w.sum() * 0.01;
        assert!((integral - 1.0).abs() < 1e-3, "integral = {integral}");
    }

    #[test]
    fn cat_grid_integrates_to_one() {
        let xs = grid(7.0, 0.1);
        let cat = cat_state(1.0.into(), CatParity::Odd, 30).unwrap();
        let integral = wigner_grid(&cat, &xs, &xs).sum() * 0.01;
        assert!((integral - 1.0).abs() < 1e-3, "integral = {integral}");
    }

    #[test]
    fn laguerre_route_matches_exponential_route() {
        let cat = cat_state(ComplexAmplitude::new(0.8, 0.4), CatParity::Odd, 20).unwrap();
        for &(x, p) in &[(0.0, 0.0), (0.7, -0.4), (-1.2, 1.5), (2.0, 0.3)] {
            let laguerre = wigner_at(&cat, x, p);
            let expm = parity_by_exponential(&cat, x, p, 80);
            assert!((laguerre - expm).abs() < 1e-9, "({x},{p}): {laguerre} vs {expm}");
        }
    }
}
