//! Constraint matrices in the basis `u₀..u_{N−1}` (and `v₀..v_N` for the padded
//! mapping variants).

use crate::error::{Error, Result};
use crate::schedules::StepSchedule;
use crate::Matrix;

/// Adds `w(u_i u_kᵀ + u_k u_iᵀ)`.
fn add_sym(m: &mut Matrix, i: usize, k: usize, w: f64) {
    m[(i, k)] += w;
    m[(k, i)] += w;
}

fn check_index(index: usize, lo: usize, hi: usize) -> Result<()> {
    if index < lo || index > hi {
        Err(Error::IndexOutOfRange { index, lo, hi })
    } else {
        Ok(())
    }
}

/// `A_{i−1,i} = ½u_iu_iᵀ − ½(u_{i−1}u_iᵀ + u_iu_{i−1}ᵀ) + ½Σ_{k<i} h_{i,k}(u_iu_kᵀ + u_ku_iᵀ)`
/// for `1 ≤ i ≤ N − 1`.
pub fn build_a(h: &StepSchedule, i: usize) -> Result<Matrix> {
    let n = h.horizon();
    check_index(i, 1, n.saturating_sub(1))?;
    let mut m = Matrix::zeros(n, n);
    m[(i, i)] = 0.5;
    add_sym(&mut m, i - 1, i, -0.5);
    for (k, &hik) in h.row(i).iter().enumerate() {
        add_sym(&mut m, i, k, 0.5 * hik);
    }
    Ok(m)
}

/// `D_i = ½u_iu_iᵀ + ½Σ_{j=1}^{i} Σ_{k<j} h_{j,k}(u_iu_kᵀ + u_ku_iᵀ)` for `0 ≤ i ≤ N − 1`.
pub fn build_d(h: &StepSchedule, i: usize) -> Result<Matrix> {
    let n = h.horizon();
    check_index(i, 0, n - 1)?;
    let mut m = Matrix::zeros(n, n);
    m[(i, i)] = 0.5;
    for j in 1..=i {
        for (k, &hjk) in h.row(j).iter().enumerate() {
            add_sym(&mut m, i, k, 0.5 * hjk);
        }
    }
    Ok(m)
}

fn pad(m: &Matrix) -> Matrix {
    let n = m.nrows();
    let mut out = Matrix::zeros(n + 1, n + 1);
    out.view_mut((0, 0), (n, n)).copy_from(m);
    out
}

/// `A_{i−1,i}` embedded in the top-left corner of an `(N+1)×(N+1)` zero matrix.
pub fn build_a_padded(h: &StepSchedule, i: usize) -> Result<Matrix> {
    build_a(h, i).map(|m| pad(&m))
}

/// `D_i` embedded in the top-left corner of an `(N+1)×(N+1)` zero matrix.
pub fn build_d_padded(h: &StepSchedule, i: usize) -> Result<Matrix> {
    build_d(h, i).map(|m| pad(&m))
}

fn check_lengths(h: &StepSchedule, lambda: &[f64], tau: &[f64]) -> Result<usize> {
    let n = h.horizon();
    if lambda.len() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, found: lambda.len() });
    }
    if tau.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: tau.len() });
    }
    Ok(n)
}

/// `S = Σ_{i=1}^{N−1} λ_i A_{i−1,i} + Σ_{i=0}^{N−1} τ_i D_i`, with `lambda[i−1] = λ_i`.
///
/// Accumulated entrywise instead of summing the `2N − 1` dense matrices.
pub fn build_s(h: &StepSchedule, lambda: &[f64], tau: &[f64]) -> Result<Matrix> {
    let n = check_lengths(h, lambda, tau)?;
    let mut m = Matrix::zeros(n, n);
    for i in 1..n {
        let l = lambda[i - 1];
        m[(i, i)] += 0.5 * l;
        add_sym(&mut m, i - 1, i, -0.5 * l);
        for (k, &hik) in h.row(i).iter().enumerate() {
            add_sym(&mut m, i, k, 0.5 * l * hik);
        }
    }
    // Σ_{j≤i} h_{j,k} for every k, grown with i.
    let mut cumulative = vec![0.0; n];
    for i in 0..n {
        if i >= 1 {
            for (k, &hik) in h.row(i).iter().enumerate() {
                cumulative[k] += hik;
            }
        }
        let w = tau[i];
        m[(i, i)] += 0.5 * w;
        for (k, &c) in cumulative.iter().enumerate().take(i) {
            add_sym(&mut m, i, k, 0.5 * w * c);
        }
    }
    Ok(m)
}

/// `S′ = Σλ_i Ā_{i−1,i} + Στ_i D̄_i + ½η v_Nv_Nᵀ − Σ_{i=0}^{N} β_i v_iv_iᵀ`.
pub fn build_s_prime(h: &StepSchedule, lambda: &[f64], tau: &[f64], eta: f64, beta: &[f64]) -> Result<Matrix> {
    let n = check_lengths(h, lambda, tau)?;
    if beta.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: beta.len() });
    }
    let mut m = pad(&build_s(h, lambda, tau)?);
    m[(n, n)] += 0.5 * eta;
    for (i, b) in beta.iter().enumerate() {
        m[(i, i)] -= b;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::{step_coefficients, TSequence};
    use crate::Vector;

    fn unit(n: usize, i: usize) -> Vector {
        let mut u = Vector::zeros(n);
        u[i] = 1.0;
        u
    }

    fn outer_sym(n: usize, i: usize, k: usize) -> Matrix {
        let (ui, uk) = (unit(n, i), unit(n, k));
        &ui * uk.transpose() + &uk * ui.transpose()
    }

    /// Dense accumulation of outer products, term by term.
    fn a_oracle(h: &StepSchedule, i: usize) -> Matrix {
        let n = h.horizon();
        let ui = unit(n, i);
        let mut m = &ui * ui.transpose() * 0.5 - outer_sym(n, i - 1, i) * 0.5;
        for k in 0..i {
            m += outer_sym(n, i, k) * (0.5 * h.h(i, k));
        }
        m
    }

    fn d_oracle(h: &StepSchedule, i: usize) -> Matrix {
        let n = h.horizon();
        let ui = unit(n, i);
        let mut m = &ui * ui.transpose() * 0.5;
        for j in 1..=i {
            for k in 0..j {
                m += outer_sym(n, i, k) * (0.5 * h.h(j, k));
            }
        }
        m
    }

    #[test]
    fn a_for_two_step_pgm() {
        let h = StepSchedule::pgm(2).unwrap();
        let a = build_a(&h, 1).unwrap();
        assert_eq!(a, Matrix::from_diagonal(&Vector::from_vec(vec![0.0, 0.5])));
    }

    #[test]
    fn a_and_d_match_dense_oracle() {
        for t in [
            TSequence::fista(3).unwrap(),
            TSequence::linear(7, 4.0).unwrap(),
            TSequence::opg(9, Default::default()).unwrap(),
        ] {
            let h = step_coefficients(&t);
            for i in 1..t.len() {
                let a = build_a(&h, i).unwrap();
                assert!((&a - a_oracle(&h, i)).amax() <= 1e-15);
                assert_eq!(a, a.transpose());
                assert!((a.trace() - 0.5).abs() <= 1e-15);
            }
            for i in 0..t.len() {
                let d = build_d(&h, i).unwrap();
                assert!((&d - d_oracle(&h, i)).amax() <= 1e-15);
                assert_eq!(d, d.transpose());
            }
        }
    }

    #[test]
    fn d_zero_is_corner() {
        let h = step_coefficients(&TSequence::fista(4).unwrap());
        let d = build_d(&h, 0).unwrap();
        let mut expected = Matrix::zeros(4, 4);
        expected[(0, 0)] = 0.5;
        assert_eq!(d, expected);
    }

    #[test]
    fn index_ranges() {
        let h = StepSchedule::pgm(4).unwrap();
        assert!(matches!(build_a(&h, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(build_a(&h, 4).is_err());
        assert!(build_d(&h, 4).is_err());
        assert!(build_a(&StepSchedule::pgm(1).unwrap(), 1).is_err());
    }

    #[test]
    fn s_matches_sum_of_parts() {
        let t = TSequence::linear(6, 3.0).unwrap();
        let h = step_coefficients(&t);
        let lambda: Vec<f64> = (1..6).map(|i| 0.1 * i as f64).collect();
        let tau: Vec<f64> = (0..6).map(|i| 0.3 + 0.05 * i as f64).collect();
        let mut expected = Matrix::zeros(6, 6);
        for i in 1..6 {
            expected += build_a(&h, i).unwrap() * lambda[i - 1];
        }
        for (i, w) in tau.iter().enumerate() {
            expected += build_d(&h, i).unwrap() * *w;
        }
        assert!((build_s(&h, &lambda, &tau).unwrap() - expected).amax() <= 1e-14);
    }

    #[test]
    fn zero_multipliers() {
        let h = step_coefficients(&TSequence::fista(5).unwrap());
        assert_eq!(build_s(&h, &[0.0; 4], &[0.0; 5]).unwrap(), Matrix::zeros(5, 5));
        let beta = [0.1, 0.2, 0.3, 0.1, 0.2, 0.1];
        let s = build_s_prime(&h, &[0.0; 4], &[0.0; 5], 0.0, &beta).unwrap();
        assert_eq!(s, -Matrix::from_diagonal(&Vector::from_row_slice(&beta)));
        assert!(build_s(&h, &[0.0; 3], &[0.0; 5]).is_err());
        assert!(build_s_prime(&h, &[0.0; 4], &[0.0; 5], 0.0, &beta[..5]).is_err());
    }

    #[test]
    fn padded_row_is_zero() {
        let h = step_coefficients(&TSequence::opg(6, Default::default()).unwrap());
        let s = build_s_prime(&h, &[0.3; 5], &[0.7; 6], 0.0, &[0.0; 7]).unwrap();
        assert!(s.row(6).iter().all(|&x| x == 0.0));
        assert!(s.column(6).iter().all(|&x| x == 0.0));
        let a = build_a_padded(&h, 3).unwrap();
        assert_eq!(a.view((0, 0), (6, 6)), build_a(&h, 3).unwrap());
        assert_eq!(build_d_padded(&h, 5).unwrap().nrows(), 7);
    }
}
