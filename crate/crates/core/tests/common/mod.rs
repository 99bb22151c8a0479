//! Independent reference implementation of the vector field and helpers for
//! itinerary patterns. Nothing here calls into the crate's field code.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;

/// The field written out term by term from its defining formulas, on plain
/// vectors. `a` and `alpha` are the coefficients as they appear in the
/// equations: row = the equation, column = the squared coordinate.
pub struct Oracle {
    pub a: Vec<Vec<f64>>,
    pub alpha: Vec<Vec<Vec<f64>>>,
    pub eps: f64,
    pub phi: f64,
    pub psi: f64,
    pub omega: f64,
    pub bounded: bool,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| m[(i, k)]).collect()).collect()
}

impl Oracle {
    /// From pair-indexed tables (row = source vertex). With the default
    /// placement the equation of coordinate k carries pair (i, k) on x_i^2.
    pub fn from_pair_tables(
        sup: &DMatrix<f64>,
        subs: &[DMatrix<f64>],
        transpose: bool,
        eps: f64,
        (phi, psi, omega): (f64, f64, f64),
        bounded: bool,
    ) -> Self {
        let place = |m: &DMatrix<f64>| if transpose { rows(&m.transpose()) } else { rows(m) };
        Oracle { a: place(sup), alpha: subs.iter().map(place).collect(), eps, phi, psi, omega, bounded }
    }

    pub fn dim(&self) -> usize {
        self.a.len() + self.alpha.iter().map(|m| m.len()).sum::<usize>()
    }

    pub fn bump(&self, z: f64) -> f64 {
        let e = self.eps;
        if z <= 0.0 {
            1.0
        } else if z < e {
            let p = (-e / z).exp();
            let q = (-e / (e - z)).exp();
            // 1 - p/(p+q), without the cancellation as z approaches eps
            q / (p + q)
        } else {
            0.0
        }
    }

    pub fn field(&self, s: &[f64]) -> Vec<f64> {
        let n = self.a.len();
        let x_big = &s[..n];
        let norm2: f64 = x_big.iter().map(|v| v * v).sum();
        let mut out = Vec::with_capacity(s.len());
        for j in 0..n {
            let mut g = 1.0 - norm2;
            for k in 0..n {
                g += self.a[j][k] * x_big[k] * x_big[k];
            }
            out.push(self.phi * x_big[j] * g);
        }
        let mut off = n;
        for j in 0..n {
            let m = self.alpha[j].len();
            let x = &s[off..off + m];
            let mut d2 = 0.0;
            for (k, v) in x_big.iter().enumerate() {
                let target = if k == j { 1.0 } else { 0.0 };
                d2 += (v - target) * (v - target);
            }
            let b = self.bump(d2);
            let nx2: f64 = x.iter().map(|v| v * v).sum();
            for i in 0..m {
                let mut g = 1.0 - nx2;
                for k in 0..m {
                    g += self.alpha[j][i][k] * x[k] * x[k];
                }
                let decay = if self.bounded { 1.0 - x[i] } else { 1.0 };
                out.push(x[i] * (self.psi * g * b - self.omega * (1.0 - b) * decay));
            }
            off += m;
        }
        out
    }

    /// Central differences with step `h`, column by column.
    pub fn fd_jacobian(&self, s: &[f64], h: f64) -> DMatrix<f64> {
        let d = s.len();
        let mut jac = DMatrix::zeros(d, d);
        let mut y = s.to_vec();
        for c in 0..d {
            y[c] = s[c] + h;
            let fp = self.field(&y);
            y[c] = s[c] - h;
            let fm = self.field(&y);
            y[c] = s[c];
            for r in 0..d {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        jac
    }
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(0.0..=1.0)).collect()
}

/// Largest component-wise relative error of `got` against `want`; a zero
/// reference demands an exact zero.
pub fn max_relative_error(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| {
            if *w == 0.0 {
                if *g == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                ((g - w) / w).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// True if consecutive entries of `seq` follow the cyclic word `cycle`.
pub fn follows_cycle(seq: &[usize], cycle: &[usize]) -> bool {
    seq.windows(2).all(|w| {
        cycle.iter().position(|&c| c == w[0]).is_some_and(|p| cycle[(p + 1) % cycle.len()] == w[1])
    })
}

/// Number of occurrences of `pat` as a contiguous block of `seq`.
pub fn count_pattern(seq: &[usize], pat: &[usize]) -> usize {
    seq.windows(pat.len()).filter(|w| *w == pat).count()
}

pub fn show(seq: &[usize]) -> String {
    seq.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
