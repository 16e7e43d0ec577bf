use rand::Rng;

use crate::field::FieldSpec;

use super::MatrixGF;

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, field: &FieldSpec, rng: &mut R) -> MatrixGF {
    let q = field.q();
    MatrixGF::from_fn(field, rows, cols, |_, _| field.elem(rng.gen_range(0..q)))
}

/// Uniform element of GL_d(q), by rejection from uniform d×d matrices.
/// Also returns the number of draws used.
pub fn random_gl_counted<R: Rng + ?Sized>(d: usize, field: &FieldSpec, rng: &mut R) -> (MatrixGF, u64) {
    assert!(d >= 1);
    let mut draws = 0;
    loop {
        draws += 1;
        let m = random_matrix(d, d, field, rng);
        if m.is_invertible() {
            return (m, draws);
        }
    }
}

pub fn random_gl<R: Rng + ?Sized>(d: usize, field: &FieldSpec, rng: &mut R) -> MatrixGF {
    random_gl_counted(d, field, rng).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gl_1_2_is_trivial() {
        let f = make_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert!(random_gl(1, &f, &mut rng).is_identity());
        }
    }

    #[test]
    fn acceptance_rate_gl4_2() {
        let f = make_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| random_matrix(4, 4, &f, &mut rng).is_invertible())
            .count();
        let p = 315.0 / 1024.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let rate = hits as f64 / n as f64;
        assert!((rate - p).abs() < 3.0 * sigma, "rate {rate} vs {p}");
    }

    #[test]
    fn determinant_balance_gl2_3() {
        let f = make_field(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let ones = (0..n)
            .filter(|_| random_gl(2, &f, &mut rng).det().unwrap() == f.one())
            .count();
        let sigma = (0.25 / n as f64).sqrt();
        assert!((ones as f64 / n as f64 - 0.5).abs() < 4.0 * sigma);
    }
}
