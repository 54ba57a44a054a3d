//! Shell pairs `A^L_k`, `A^S_k = b A^L_k` and the discrete wavevector lattice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Large-scale shell `k/2 <= |xi| <= 2k` and the adjacent small-scale shell
/// `bk/2 <= |xi| <= 2bk`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub b: u32,
    pub k: u64,
    pub d: usize,
}

impl ShellSpec {
    pub fn new(b: u32, k: u64, d: usize) -> Result<Self> {
        if !(2..=8).contains(&b) {
            return Err(Error::Config(format!("locality factor b = {b} outside 2..=8")));
        }
        if d != 2 && d != 3 {
            return Err(Error::Config(format!("dimension {d} not supported")));
        }
        if k == 0 {
            return Err(Error::Config("shell wavenumber must be positive".into()));
        }
        Ok(ShellSpec { b, k, d })
    }

    /// The unit shell pair, where the snapshot lives.
    pub fn unit(b: u32, d: usize) -> Result<Self> {
        Self::new(b, 1, d)
    }

    /// Shell pair at `k = b^n`.
    pub fn level(b: u32, n: u32, d: usize) -> Result<Self> {
        Self::new(b, (b as u64).pow(n), d)
    }

    pub fn in_large(&self, xi: &[f64]) -> bool {
        in_band(norm(xi), self.k as f64)
    }

    pub fn in_small(&self, xi: &[f64]) -> bool {
        in_band(norm(xi), (self.b as u64 * self.k) as f64)
    }

    pub fn in_union(&self, xi: &[f64]) -> bool {
        self.in_large(xi) || self.in_small(xi)
    }

    /// Exact membership tests for the lattice point `m / q` (integer arithmetic).
    pub fn lattice_large(&self, m2: u64, q: u64) -> bool {
        lattice_band(m2, self.k * q)
    }

    pub fn lattice_small(&self, m2: u64, q: u64) -> bool {
        lattice_band(m2, self.b as u64 * self.k * q)
    }

    pub fn lattice_union(&self, m2: u64, q: u64) -> bool {
        self.lattice_large(m2, q) || self.lattice_small(m2, q)
    }

    /// Outer radius of the small-scale shell.
    pub fn outer_radius(&self) -> f64 {
        2.0 * (self.b as u64 * self.k) as f64
    }
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn in_band(r: f64, k: f64) -> bool {
    r >= 0.5 * k && r <= 2.0 * k
}

// k q / 2 <= |m| <= 2 k q  <=>  (kq)^2 <= 4 |m|^2 <= 16 (kq)^2
fn lattice_band(m2: u64, kq: u64) -> bool {
    let kq2 = kq * kq;
    4 * m2 >= kq2 && 4 * m2 <= 16 * kq2
}

/// Periodic wavevector lattice `xi = m / q`, `m` in `[-M/2, M/2)^d`, stored in
/// FFT order. The physical period is `2 pi q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub d: usize,
    pub q: u64,
    pub m: usize,
}

impl Lattice {
    /// Smallest lattice on which products of two fields supported in
    /// `|xi| <= 2bk` alias nowhere inside `|xi| <= 2k`.
    pub fn for_shell(shell: &ShellSpec, q: u64) -> Self {
        let rs = (2 * shell.b as u64 * shell.k * q) as usize;
        let rl = (2 * shell.k * q) as usize;
        let m = fft_friendly(2 * rs + rl + 1);
        Lattice { d: shell.d, q, m }
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Lattice spacing `1 / q`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.q as f64
    }

    /// Volume element `q^-d`.
    pub fn cell(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    pub fn mode_of(&self, i: usize) -> i64 {
        let m = self.m as i64;
        let i = i as i64;
        if i < m - m / 2 {
            i
        } else {
            i - m
        }
    }

    /// Integer mode vector of a flat index (last axis fastest).
    pub fn modes(&self, idx: usize) -> [i64; 3] {
        let mut out = [0i64; 3];
        let mut r = idx;
        for a in (0..self.d).rev() {
            out[a] = self.mode_of(r % self.m);
            r /= self.m;
        }
        out
    }

    pub fn index(&self, modes: [i64; 3]) -> Option<usize> {
        let m = self.m as i64;
        let mut idx = 0usize;
        for &v in &modes[..self.d] {
            if v < -m / 2 || v >= m - m / 2 {
                return None;
            }
            idx = idx * self.m + v.rem_euclid(m) as usize;
        }
        Some(idx)
    }

    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let m = self.modes(idx);
        let s = self.spacing();
        [m[0] as f64 * s, m[1] as f64 * s, m[2] as f64 * s]
    }

    pub fn norm_sq(&self, idx: usize) -> u64 {
        self.modes(idx).iter().map(|v| (v * v) as u64).sum()
    }

    /// Flat indices inside the shell pair.
    pub fn support(&self, shell: &ShellSpec) -> Vec<usize> {
        (0..self.len()).filter(|&i| shell.lattice_union(self.norm_sq(i), self.q)).collect()
    }
}

fn fft_friendly(min: usize) -> usize {
    let mut best = usize::MAX;
    let mut p2 = 1usize;
    while p2 < 2 * min {
        let mut v = p2;
        while v < min {
            v *= 3;
        }
        best = best.min(v);
        p2 *= 2;
    }
    best
}

/// Vector-valued coefficients on a [`Lattice`], one array per component.
#[derive(Clone, Debug, PartialEq)]
pub struct HatField {
    lattice: Lattice,
    comps: Vec<Vec<Complex64>>,
}

impl HatField {
    pub fn zeros(lattice: Lattice) -> Self {
        HatField { lattice, comps: vec![vec![Complex64::new(0.0, 0.0); lattice.len()]; lattice.d] }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn component(&self, a: usize) -> &[Complex64] {
        &self.comps[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut [Complex64] {
        &mut self.comps[a]
    }

    pub fn get(&self, idx: usize) -> [Complex64; 3] {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for (a, c) in self.comps.iter().enumerate() {
            v[a] = c[idx];
        }
        v
    }

    pub fn set(&mut self, idx: usize, v: [Complex64; 3]) {
        for (a, c) in self.comps.iter_mut().enumerate() {
            c[idx] = v[a];
        }
    }

    pub fn add_at(&mut self, idx: usize, v: [Complex64; 3]) {
        for (a, c) in self.comps.iter_mut().enumerate() {
            c[idx] += v[a];
        }
    }

    pub fn scaled(&self, s: f64) -> HatField {
        HatField {
            lattice: self.lattice,
            comps: self.comps.iter().map(|c| c.iter().map(|z| z * s).collect()).collect(),
        }
    }

    pub fn add(&self, other: &HatField) -> HatField {
        let mut out = self.clone();
        for (a, c) in out.comps.iter_mut().enumerate() {
            for (z, w) in c.iter_mut().zip(&other.comps[a]) {
                *z += w;
            }
        }
        out
    }

    /// `sum |F|^2` times the lattice cell volume.
    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * self.lattice.cell()
    }

    /// Multiply every coefficient by `exp(i y . xi)`.
    pub fn shifted(&self, y: &[f64]) -> HatField {
        let mut out = self.clone();
        let l = self.lattice;
        for idx in 0..l.len() {
            let xi = l.xi(idx);
            let phase: f64 = (0..l.d).map(|a| y[a] * xi[a]).sum();
            let e = Complex64::from_polar(1.0, phase);
            for c in out.comps.iter_mut() {
                c[idx] *= e;
            }
        }
        out
    }

    /// Zero every coefficient outside the given mask.
    pub fn masked(&self, keep: impl Fn(u64) -> bool) -> HatField {
        let mut out = self.clone();
        let l = self.lattice;
        for idx in 0..l.len() {
            if !keep(l.norm_sq(idx)) {
                for c in out.comps.iter_mut() {
                    c[idx] = Complex64::new(0.0, 0.0);
                }
            }
        }
        out
    }

    /// `max |xi . F(xi)|`.
    pub fn divergence_residual(&self) -> f64 {
        let l = self.lattice;
        (0..l.len())
            .map(|idx| {
                let xi = l.xi(idx);
                let v = self.get(idx);
                (0..l.d).map(|a| v[a] * xi[a]).sum::<Complex64>().norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |F(-xi) - conj F(xi)|` over pairs inside the lattice.
    pub fn conjugate_residual(&self) -> f64 {
        let l = self.lattice;
        let mut worst: f64 = 0.0;
        for idx in 0..l.len() {
            let m = l.modes(idx);
            if let Some(j) = l.index([-m[0], -m[1], -m[2]]) {
                let a = self.get(idx);
                let b = self.get(j);
                for c in 0..l.d {
                    worst = worst.max((b[c] - a[c].conj()).norm());
                }
            }
        }
        worst
    }

    /// `(R o F)(xi) = R F(R^-1 xi)` for the quarter turn `R` about the last
    /// horizontal axis pair, applied `times` times. Exact on the lattice.
    pub fn quarter_turn(&self, times: u32) -> HatField {
        let mut cur = self.clone();
        for _ in 0..times % 4 {
            let l = cur.lattice;
            let mut out = HatField::zeros(l);
            for idx in 0..l.len() {
                let m = l.modes(idx);
                // R^-1 (m1, m2) = (m2, -m1)
                if let Some(src) = l.index([m[1], -m[0], m[2]]) {
                    let v = cur.get(src);
                    let mut w = v;
                    w[0] = -v[1];
                    w[1] = v[0];
                    out.set(idx, w);
                }
            }
            cur = out;
        }
        cur
    }
}
