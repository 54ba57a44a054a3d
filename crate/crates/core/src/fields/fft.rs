//! Square 2D complex FFTs built from rustfft row transforms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut Array2<Complex64>) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse transform, in place.
    pub fn inverse(&self, data: &mut Array2<Complex64>) {
        self.run(data, &self.inverse);
    }

    /// Inverse transform of a spectrum whose rows `i` with `!active[i]` are
    /// zero; those row transforms are skipped.
    pub fn inverse_band(&self, data: &mut Array2<Complex64>, active: &[bool]) {
        let n = self.n;
        let plan = &self.inverse;
        let buf = data.as_slice_mut().expect("FFT buffers must be in standard layout");
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for (i, row) in buf.chunks_exact_mut(n).enumerate() {
            if active[i] {
                plan.process_with_scratch(row, &mut scratch);
            }
        }
        transpose_in_place(buf, n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, n);
    }

    /// Forward transform that only completes the columns `j` with
    /// `wanted[j]`; the remaining columns hold partial results.
    pub fn forward_band(&self, data: &mut Array2<Complex64>, wanted: &[bool]) {
        let n = self.n;
        let plan = &self.forward;
        let buf = data.as_slice_mut().expect("FFT buffers must be in standard layout");
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, n);
        for (j, row) in buf.chunks_exact_mut(n).enumerate() {
            if wanted[j] {
                plan.process_with_scratch(row, &mut scratch);
            }
        }
        transpose_in_place(buf, n);
    }

    fn run(&self, data: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.dim(), (self.n, self.n));
        let buf = data.as_slice_mut().expect("FFT buffers must be in standard layout");
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, self.n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, self.n);
    }
}

fn transpose_in_place(buf: &mut [Complex64], n: usize) {
    const B: usize = 32;
    let mut bi = 0;
    while bi < n {
        let mut bj = bi;
        while bj < n {
            let imax = (bi + B).min(n);
            let jmax = (bj + B).min(n);
            for i in bi..imax {
                let jstart = if bi == bj { i + 1 } else { bj };
                for j in jstart..jmax {
                    buf.swap(i * n + j, j * n + i);
                }
            }
            bj += B;
        }
        bi += B;
    }
}

/// Shared plan for grids of size `n`.
pub fn plan(n: usize) -> Arc<Fft2> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft2>>>> = OnceLock::new();
    let mut map = PLANS.get_or_init(|| Mutex::new(HashMap::new())).lock().expect("fft plan cache poisoned");
    map.entry(n).or_insert_with(|| Arc::new(Fft2::new(n))).clone()
}

/// Transform two real fields at once: returns their normalized spectra.
pub fn forward_real_pair(a: &Array2<f64>, b: &Array2<f64>) -> (Array2<Complex64>, Array2<Complex64>) {
    let n = a.nrows();
    let mut c = Array2::from_shape_fn((n, n), |(i, j)| Complex64::new(a[[i, j]], b[[i, j]]));
    plan(n).forward(&mut c);
    split_pair(&c)
}

/// Separate the spectrum of `a + i b` into the normalized spectra of `a` and `b`.
pub fn split_pair(c: &Array2<Complex64>) -> (Array2<Complex64>, Array2<Complex64>) {
    let n = c.nrows();
    let norm = 1.0 / (n * n) as f64;
    let mut ah = Array2::zeros((n, n));
    let mut bh = Array2::zeros((n, n));
    let src = c.as_slice().expect("standard layout");
    let (sa, sb) = (ah.as_slice_mut().unwrap(), bh.as_slice_mut().unwrap());
    for i in 0..n {
        let mi = (n - i) % n;
        let row = &src[i * n..(i + 1) * n];
        let mrow = &src[mi * n..(mi + 1) * n];
        for j in 0..n {
            let z = row[j];
            let zc = mrow[(n - j) % n].conj();
            sa[i * n + j] = (z + zc) * (0.5 * norm);
            sb[i * n + j] = (z - zc) * Complex64::new(0.0, -0.5 * norm);
        }
    }
    (ah, bh)
}

/// Inverse transform of two Hermitian spectra at once.
pub fn inverse_real_pair(ah: &Array2<Complex64>, bh: &Array2<Complex64>) -> (Array2<f64>, Array2<f64>) {
    let n = ah.nrows();
    let mut c = Array2::zeros((n, n));
    ndarray::Zip::from(&mut c).and(ah).and(bh).for_each(|z, &a, &b| *z = a + Complex64::i() * b);
    plan(n).inverse(&mut c);
    let mut a = Array2::zeros((n, n));
    let mut b = Array2::zeros((n, n));
    ndarray::Zip::from(&mut a).and(&mut b).and(&c).for_each(|x, y, z| {
        *x = z.re;
        *y = z.im;
    });
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transpose_roundtrip() {
        let n = 70;
        let orig: Vec<Complex64> = (0..n * n).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let mut buf = orig.clone();
        transpose_in_place(&mut buf, n);
        assert_eq!(buf[1], orig[n]);
        transpose_in_place(&mut buf, n);
        assert_eq!(buf, orig);
    }

    #[test]
    fn pair_transform_matches_single() {
        let n = 16;
        let a = Array2::from_shape_fn((n, n), |(i, j)| ((i * 3 + j * 7) % 11) as f64 - 5.0);
        let b = Array2::from_shape_fn((n, n), |(i, j)| ((i * i + 2 * j) % 5) as f64);
        let (ah, bh) = forward_real_pair(&a, &b);
        let mut single = a.mapv(|v| Complex64::new(v, 0.0));
        plan(n).forward(&mut single);
        for (x, y) in ah.iter().zip(single.iter()) {
            assert!((x - y / (n * n) as f64).norm() < 1e-12);
        }
        let (a2, b2) = inverse_real_pair(&ah, &bh);
        for (x, y) in a2.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in b2.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
