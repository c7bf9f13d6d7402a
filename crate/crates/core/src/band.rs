//! Small dense matrices acting on the `2^n` band space of one cell.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type BandMatrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> BandMatrix {
    BandMatrix::identity(dim, dim)
}

/// Single-mode Hadamard `(1/√2)[[1, 1], [1, −1]]`.
pub fn hadamard_1() -> BandMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    BandMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])
}

/// `H^{⊗n}`; mode 1 is the leftmost factor.
pub fn hadamard(n_modes: usize) -> BandMatrix {
    let h = hadamard_1();
    (1..n_modes).fold(h.clone(), |acc, _| acc.kronecker(&h))
}

/// `1 − 2 Σ |s⟩⟨s|` over the listed band strings.
pub fn reflection(dim: usize, strings: &[usize]) -> BandMatrix {
    let mut m = identity(dim);
    for &s in strings {
        m[(s, s)] -= c(2.0);
    }
    m
}

/// `1 − 2|v⟩⟨v|` for a unit vector `v`.
pub fn reflection_about(v: &[Complex64]) -> BandMatrix {
    let dim = v.len();
    BandMatrix::from_fn(dim, dim, |r, col| {
        let delta = if r == col { c(1.0) } else { c(0.0) };
        delta - c(2.0) * v[r] * v[col].conj()
    })
}

/// `|Ψ_L⟩ = H^{⊗n}|0…0⟩`, the uniform band vector.
pub fn uniform(n_modes: usize) -> Vec<Complex64> {
    let dim = 1usize << n_modes;
    vec![c(1.0 / (dim as f64).sqrt()); dim]
}

/// Places a one-mode matrix on `mode` with identities elsewhere.
pub fn embed(single: &BandMatrix, mode: usize, n_modes: usize) -> BandMatrix {
    let id = identity(2);
    (0..n_modes)
        .map(|i| if i == mode { single.clone() } else { id.clone() })
        .reduce(|acc, m| acc.kronecker(&m))
        .expect("at least one mode")
}

/// Largest entry of `|U†U − 1|`.
pub fn unitarity_defect(u: &BandMatrix) -> f64 {
    let p = u.adjoint() * u;
    (&p - identity(u.nrows()))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &BandMatrix, b: &BandMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `y = M x` without allocating.
#[inline]
pub fn mat_vec(m: &BandMatrix, x: &[Complex64], y: &mut [Complex64]) {
    let dim = x.len();
    let data = m.as_slice();
    y.iter_mut().for_each(|v| *v = c(0.0));
    // column-major storage
    for (col, xc) in x.iter().enumerate() {
        if xc.re == 0.0 && xc.im == 0.0 {
            continue;
        }
        let column = &data[col * dim..(col + 1) * dim];
        for (yr, mr) in y.iter_mut().zip(column) {
            *yr += mr * xc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_is_involution() {
        for n in 1..=3 {
            let h = hadamard(n);
            assert!(max_abs_diff(&(&h * &h), &identity(1 << n)) < 1e-15);
        }
    }

    #[test]
    fn hadamard_maps_zero_to_uniform() {
        let h = hadamard(3);
        let u = uniform(3);
        for (r, ur) in u.iter().enumerate() {
            assert!((h[(r, 0)] - ur).norm() < 1e-15);
        }
    }

    #[test]
    fn embed_puts_mode_one_first() {
        let x = BandMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let m = embed(&x, 0, 2);
        // band 0b00 -> 0b10
        assert_eq!(m[(0b10, 0b00)], c(1.0));
        let m = embed(&x, 1, 2);
        assert_eq!(m[(0b01, 0b00)], c(1.0));
    }

    #[test]
    fn mat_vec_agrees_with_nalgebra() {
        let m = BandMatrix::from_fn(4, 4, |r, col| Complex64::new(r as f64, col as f64 - 1.0));
        let x: Vec<Complex64> = (0..4).map(|i| Complex64::new(1.0, i as f64)).collect();
        let mut y = vec![c(0.0); 4];
        mat_vec(&m, &x, &mut y);
        let expect = &m * nalgebra::DVector::from_vec(x);
        for i in 0..4 {
            assert!((y[i] - expect[i]).norm() < 1e-14);
        }
    }
}
