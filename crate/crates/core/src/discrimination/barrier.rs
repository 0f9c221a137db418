//! Log-barrier Newton method on the dual problem
//! `min Tr Y  s.t.  Y ⪰ p_i ρ_i`, used when the fixed-point iteration
//! stalls.
//!
//! On the central path for parameter `t` the operators
//! `Π_i = (Y - p_i ρ_i)^{-1} / t` form a POVM whose Lagrange operator is
//! `Y - (N/t) I`, so its certificate gap is at most `N/t`.

use crate::linalg::{eigh, Complex64, ComplexMatrix, Eigh};

const T_GROWTH: f64 = 8.0;
const MAX_NEWTON: usize = 60;
const DECREMENT_TOL: f64 = 1e-12;

/// Hermitian basis `{E_a}`, orthonormal under `Re Tr(E_a E_b)`.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut e = ComplexMatrix::zeros(d, d);
        e[(k, k)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for k in 0..d {
        for l in (k + 1)..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(k, l)] = Complex64::new(h, 0.0);
            re[(l, k)] = Complex64::new(h, 0.0);
            out.push(re);
            let mut im = ComplexMatrix::zeros(d, d);
            im[(k, l)] = Complex64::new(0.0, h);
            im[(l, k)] = Complex64::new(0.0, -h);
            out.push(im);
        }
    }
    out
}

/// `Re Tr(A B)`
fn re_tr_prod(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a.rows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

/// Slacks `S_i = Y - W_i` and their spectra, if all are positive definite.
fn slacks(y: &ComplexMatrix, weighted: &[ComplexMatrix]) -> Option<Vec<Eigh>> {
    weighted
        .iter()
        .map(|w| {
            let ev = eigh(&y.sub(w)).ok()?;
            (ev.min() > 0.0).then_some(ev)
        })
        .collect()
}

fn barrier_value(y: &ComplexMatrix, spectra: &[Eigh], t: f64) -> f64 {
    let log_det: f64 = spectra
        .iter()
        .map(|ev| ev.values.iter().map(|x| x.ln()).sum::<f64>())
        .sum();
    t * y.trace().re - log_det
}

/// Candidate POVM elements `(Y - W_i)^{-1}`, not yet scaled or completed.
pub(super) fn dual_barrier(weighted: &[ComplexMatrix], target_gap: f64) -> Option<Vec<ComplexMatrix>> {
    let d = weighted[0].rows();
    let n = weighted.len() as f64;
    let basis = hermitian_basis(d);
    let m = basis.len();

    let scale = weighted.iter().map(|w| w.trace().re).sum::<f64>().max(1e-300);
    let mut y = ComplexMatrix::identity(d).scale(2.0 * scale);
    let mut spectra = slacks(&y, weighted)?;
    let mut t = (n * d as f64) / scale;
    let t_final = n / target_gap;

    loop {
        for _ in 0..MAX_NEWTON {
            let inverses: Vec<ComplexMatrix> = spectra.iter().map(|ev| ev.apply(|x| 1.0 / x)).collect();
            let grad: Vec<f64> = basis
                .iter()
                .map(|e| t * e.trace().re - inverses.iter().map(|s| re_tr_prod(s, e)).sum::<f64>())
                .collect();
            // H_ab = Σ_i Re Tr(S_i^{-1} E_a S_i^{-1} E_b)
            let sandwiched: Vec<Vec<ComplexMatrix>> = inverses
                .iter()
                .map(|s| basis.iter().map(|e| s.matmul(e).matmul(s)).collect())
                .collect();
            let mut hess = ComplexMatrix::zeros(m, m);
            for a in 0..m {
                for b in a..m {
                    let v: f64 = sandwiched.iter().map(|sa| re_tr_prod(&sa[a], &basis[b])).sum();
                    hess[(a, b)] = Complex64::new(v, 0.0);
                    hess[(b, a)] = Complex64::new(v, 0.0);
                }
            }
            let h_ev = eigh(&hess).ok()?;
            let floor = 1e-300_f64.max(h_ev.values.last().copied().unwrap_or(0.0) * 1e-15);
            let h_inv = h_ev.apply(|x| if x > floor { 1.0 / x } else { 0.0 });
            let step: Vec<f64> = (0..m)
                .map(|a| -(0..m).map(|b| h_inv[(a, b)].re * grad[b]).sum::<f64>())
                .collect();
            let decrement: f64 = -step.iter().zip(&grad).map(|(s, g)| s * g).sum::<f64>();
            if decrement / 2.0 <= DECREMENT_TOL {
                break;
            }
            let mut direction = ComplexMatrix::zeros(d, d);
            for (e, s) in basis.iter().zip(&step) {
                direction.add_assign(&e.scale(*s));
            }
            let f0 = barrier_value(&y, &spectra, t);
            let mut alpha = 1.0;
            let mut accepted = None;
            while alpha > 1e-12 {
                let cand = y.add(&direction.scale(alpha));
                if let Some(sp) = slacks(&cand, weighted) {
                    if barrier_value(&cand, &sp, t) <= f0 - 0.25 * alpha * decrement {
                        accepted = Some((cand, sp));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            match accepted {
                Some((cand, sp)) => {
                    y = cand;
                    spectra = sp;
                }
                None => break,
            }
        }
        if t >= t_final {
            break;
        }
        t = (t * T_GROWTH).min(t_final);
    }
    Some(spectra.iter().map(|ev| ev.apply(|x| 1.0 / x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal() {
        let b = hermitian_basis(3);
        assert_eq!(b.len(), 9);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let v = re_tr_prod(x, y);
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }
}
