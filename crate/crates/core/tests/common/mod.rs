//! Independent reference computations used to check the library.
//!
//! Nothing here calls into the library's numerics: the matrix exponential is a scaled
//! Taylor series, the covariance is a direct quadrature of its defining integral, and the
//! swarm update is written particle by particle.

#![allow(dead_code)]

use nalgebra::{Matrix2, SMatrix, Vector2};
use pao::Hyperparams;

/// `exp(m)` by Taylor series on `m / 2^s` followed by `s` squarings.
pub fn taylor_expm<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = m.iter().map(|v| v.abs()).fold(0.0, f64::max) * N as f64;
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m / 2f64.powi(s);
    let mut term = SMatrix::<f64, N, N>::identity();
    let mut sum = term;
    for k in 1..=40 {
        term = term * scaled / k as f64;
        sum += term;
        if term.iter().all(|v| v.abs() < 1e-20 * sum.amax()) {
            break;
        }
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

/// Drift matrix written out from the equation of motion.
pub fn drift(hp: &Hyperparams) -> Matrix2<f64> {
    let kp: f64 = hp.k.iter().sum();
    let w2 = kp / hp.m;
    Matrix2::new(0.0, 1.0, -w2, -2.0 * w2.sqrt() * hp.zeta)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(x) and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫₀^dt e^{Fs} L q Lᵀ e^{Fᵀs} ds` with `L = (0, 1)ᵀ`, by composite Gauss–Legendre.
pub fn quadrature_covariance(
    f: &Matrix2<f64>,
    q: f64,
    dt: f64,
    panels: usize,
    nodes: usize,
) -> Matrix2<f64> {
    let rule = gauss_legendre(nodes);
    let l = Vector2::new(0.0, 1.0);
    let qll = l * l.transpose() * q;
    let h = dt / panels as f64;
    let mut sum = Matrix2::zeros();
    for p in 0..panels {
        let (a, b) = (p as f64 * h, (p + 1) as f64 * h);
        for &(x, w) in &rule {
            let s = 0.5 * (b - a) * x + 0.5 * (a + b);
            let e = taylor_expm(&(f * s));
            sum += e * qll * e.transpose() * (0.5 * (b - a) * w);
        }
    }
    sum
}

pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> f64 {
    m.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Particle-by-particle swarm used to check the tensorised engine.
#[derive(Debug, Clone)]
pub struct NaiveSwarm {
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub fit: Vec<f64>,
    pub lbest: Vec<Vec<f64>>,
    pub lbest_fit: Vec<f64>,
    pub gbest: Vec<f64>,
    pub gbest_fit: f64,
}

impl NaiveSwarm {
    pub fn from_positions(x: Vec<Vec<f64>>, v: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> f64) -> Self {
        let n = x.len();
        let d = x[0].len();
        let mut s = NaiveSwarm {
            fit: vec![0.0; n],
            lbest: x.clone(),
            lbest_fit: vec![f64::INFINITY; n],
            gbest: vec![0.0; d],
            gbest_fit: f64::INFINITY,
            x,
            v,
        };
        s.evaluate(f);
        s
    }

    pub fn evaluate(&mut self, f: impl Fn(&[f64]) -> f64) {
        for i in 0..self.x.len() {
            self.fit[i] = f(&self.x[i]);
            if self.fit[i] < self.lbest_fit[i] {
                self.lbest_fit[i] = self.fit[i];
                self.lbest[i] = self.x[i].clone();
            }
        }
        for i in 0..self.x.len() {
            if self.lbest_fit[i] < self.gbest_fit {
                self.gbest_fit = self.lbest_fit[i];
                self.gbest = self.lbest[i].clone();
            }
        }
    }

    /// One generation with local-best and global-best attractors (stiffnesses `k`), the
    /// per-element local/global gap as noise measure, and positions clipped to the box.
    ///
    /// `draw(i, j)` supplies the standard-normal pair of element `j` of particle `i`.
    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &mut self,
        a: &Matrix2<f64>,
        h: &Matrix2<f64>,
        k: [f64; 2],
        q0: f64,
        lower: &[f64],
        upper: &[f64],
        mut draw: impl FnMut(usize, usize) -> Vector2<f64>,
        f: impl Fn(&[f64]) -> f64,
    ) {
        let kp = k[0] + k[1];
        for i in 0..self.x.len() {
            for j in 0..self.x[i].len() {
                let centre = (k[0] * self.lbest[i][j] + k[1] * self.gbest[j]) / kp;
                let nu = (self.lbest[i][j] - self.gbest[j]).powi(2);
                let state = Vector2::new(self.x[i][j] - centre, self.v[i][j]);
                let noise = h * draw(i, j) * (q0 * nu).sqrt();
                let next = a * state + noise;
                self.x[i][j] = (next[0] + centre).clamp(lower[j], upper[j]);
                self.v[i][j] = next[1];
            }
        }
        self.evaluate(f);
    }
}
