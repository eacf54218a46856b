//! Chebyshev–Gauss–Lobatto collocation: points, differentiation matrices and
//! Clenshaw–Curtis weights on [-1, 1].
//!
//! Points are stored in ascending order, `z_j = -cos(j π / n)`.
//!
//! Each grid also carries a finer Gauss–Lobatto grid of degree `2n + 4`.
//! Quadratic functionals of a degree-`n` clamped function have integrands of
//! degree up to `2n + 4`, so integrating them there is free of aliasing.

use std::f64::consts::PI;
use std::iter::Sum;
use std::ops::Mul;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MIN_DEGREE: usize = 8;
pub const MAX_DEGREE: usize = 2048;

/// Collocation grid of polynomial degree `n` (`n + 1` points).
#[derive(Clone, Debug)]
pub struct SpectralGrid {
    n: usize,
    points: Vec<f64>,
    wall: Vec<f64>,
    d1: Mat<f64>,
    d2: Mat<f64>,
    d3: Mat<f64>,
    d4: Mat<f64>,
    weights: Vec<f64>,
    fine_points: Vec<f64>,
    fine_weights: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(n: usize) -> Result<Self> {
        build_grid(n)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `1 - z_j²`, computed as `sin²(j π / n)` to keep full relative accuracy
    /// next to the walls.
    pub fn wall_factor(&self) -> &[f64] {
        &self.wall
    }

    pub fn d1(&self) -> &Mat<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &Mat<f64> {
        &self.d2
    }

    pub fn d3(&self) -> &Mat<f64> {
        &self.d3
    }

    pub fn d4(&self) -> &Mat<f64> {
        &self.d4
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Clenshaw–Curtis approximation of `∫_{-1}^{1} f dz`, exact for
    /// polynomials of degree `<= n`.
    pub fn integrate<T>(&self, f: &[T]) -> Result<T>
    where
        T: Copy + Mul<f64, Output = T> + Sum<T>,
    {
        self.check_len(f.len())?;
        Ok(f.iter().zip(&self.weights).map(|(&v, &w)| v * w).sum())
    }

    /// Points of the quadrature grid of degree `2n + 4`, ascending.
    pub fn fine_points(&self) -> &[f64] {
        &self.fine_points
    }

    pub fn fine_weights(&self) -> &[f64] {
        &self.fine_weights
    }

    /// Clenshaw–Curtis integral of `f` sampled on [`Self::fine_points`].
    pub fn integrate_fine<T>(&self, f: &[T]) -> Result<T>
    where
        T: Copy + Mul<f64, Output = T> + Sum<T>,
    {
        if f.len() != self.fine_points.len() {
            return Err(Error::Shape {
                expected: self.fine_points.len(),
                got: f.len(),
            });
        }
        Ok(f.iter().zip(&self.fine_weights).map(|(&v, &w)| v * w).sum())
    }

    /// Applies a real grid matrix to a complex grid vector.
    pub fn apply(&self, m: &Mat<f64>, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(v.len())?;
        Ok((0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| v[j] * m[(i, j)]).sum())
            .collect())
    }

    /// First and second derivatives of a clamped grid function.
    ///
    /// `phi` is read as `(1 - z²) p(z)` where `p` interpolates `phi / (1 - z²)`
    /// at interior points and vanishes at the walls, so `phi` and `Dphi` are
    /// exactly zero at `z = ±1`. This is the representation the eigensolver
    /// uses for its trial functions.
    pub fn clamped_derivatives(&self, phi: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        self.check_len(phi.len())?;
        let n = self.n;
        let mut p = vec![Complex64::new(0.0, 0.0); n + 1];
        for j in 1..n {
            p[j] = phi[j] / self.wall[j];
        }
        let dp = self.apply(&self.d1, &p)?;
        let d2p = self.apply(&self.d2, &p)?;
        let mut dphi = Vec::with_capacity(n + 1);
        let mut d2phi = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let z = self.points[j];
            let w = self.wall[j];
            dphi.push(dp[j] * w - p[j] * (2.0 * z));
            d2phi.push(d2p[j] * w - dp[j] * (4.0 * z) - p[j] * 2.0);
        }
        Ok((dphi, d2phi))
    }

    /// `φ`, `Dφ` and `D²φ` of a clamped grid function on the fine grid.
    ///
    /// Same representation as [`Self::clamped_derivatives`]: `p`, `Dp` and
    /// `D²p` come from the differentiation matrices and are carried to the
    /// fine points by barycentric interpolation, which is exact for them.
    pub fn clamped_fine(&self, phi: &[Complex64]) -> Result<[Vec<Complex64>; 3]> {
        self.check_len(phi.len())?;
        let n = self.n;
        let mut p = vec![Complex64::new(0.0, 0.0); n + 1];
        for j in 1..n {
            p[j] = phi[j] / self.wall[j];
        }
        let dp = self.apply(&self.d1, &p)?;
        let d2p = self.apply(&self.d2, &p)?;
        let bary: Vec<f64> = (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();
        let m = self.fine_points.len();
        let mut out = [Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m)];
        for &x in &self.fine_points {
            let (pv, dpv, d2pv) = match self.points.iter().position(|&z| z == x) {
                Some(j) => (p[j], dp[j], d2p[j]),
                None => {
                    let mut num = [Complex64::new(0.0, 0.0); 3];
                    let mut den = 0.0;
                    for j in 0..=n {
                        let t = bary[j] / (x - self.points[j]);
                        num[0] += p[j] * t;
                        num[1] += dp[j] * t;
                        num[2] += d2p[j] * t;
                        den += t;
                    }
                    (num[0] / den, num[1] / den, num[2] / den)
                }
            };
            let w = 1.0 - x * x;
            out[0].push(pv * w);
            out[1].push(dpv * w - pv * (2.0 * x));
            out[2].push(d2pv * w - dpv * (4.0 * x) - pv * 2.0);
        }
        Ok(out)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got == self.n + 1 {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.n + 1,
                got,
            })
        }
    }
}

/// Builds the degree-`n` grid with its differentiation matrices and weights.
pub fn build_grid(n: usize) -> Result<SpectralGrid> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&n) {
        return Err(Error::Config(format!(
            "grid degree must lie in [{MIN_DEGREE}, {MAX_DEGREE}], got {n}"
        )));
    }
    let np = n + 1;
    let theta: Vec<f64> = (0..np).map(|k| k as f64 * PI / n as f64).collect();
    let derivs = chebyshev_derivatives(&theta, 4);

    let flip = |d: &Mat<f64>| Mat::from_fn(np, np, |i, j| d[(n - i, n - j)]);
    let points = lobatto_points(n);
    let mut wall: Vec<f64> = (0..np).map(|i| theta[n - i].sin().powi(2)).collect();
    wall[0] = 0.0;
    wall[n] = 0.0;
    let weights = clenshaw_curtis_weights(n);
    let fine = 2 * n + 4;
    let fine_points = lobatto_points(fine);
    let fine_weights = clenshaw_curtis_weights(fine);

    Ok(SpectralGrid {
        n,
        points,
        wall,
        d1: flip(&derivs[0]),
        d2: flip(&derivs[1]),
        d3: flip(&derivs[2]),
        d4: flip(&derivs[3]),
        weights,
        fine_points,
        fine_weights,
    })
}

/// Ascending Chebyshev–Gauss–Lobatto points of degree `n`, written with
/// sin so they are symmetric about zero to the last bit.
fn lobatto_points(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| (PI * (2.0 * i as f64 - n as f64) / (2.0 * n as f64)).sin())
        .collect()
}

/// Differentiation matrices of orders `1..=order` on the descending
/// Chebyshev points, via the Welfert recursion. Node differences use the
/// trigonometric identity with the flipping trick, and each diagonal is
/// set by the negative-sum trick.
fn chebyshev_derivatives(theta: &[f64], order: usize) -> Vec<Mat<f64>> {
    let np = theta.len();
    let n = np - 1;
    let half = np / 2;
    let mut dx = Mat::<f64>::zeros(np, np);
    for i in 0..np {
        for j in 0..np {
            dx[(i, j)] = 2.0 * ((theta[i] + theta[j]) / 2.0).sin() * ((theta[j] - theta[i]) / 2.0).sin();
        }
    }
    for i in half..np {
        for j in 0..np {
            dx[(i, j)] = -dx[(n - i, n - j)];
        }
    }
    let c = Mat::<f64>::from_fn(np, np, |i, j| {
        let mut v = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        if i == 0 || i == n {
            v *= 2.0;
        }
        if j == 0 || j == n {
            v /= 2.0;
        }
        v
    });
    let z = Mat::<f64>::from_fn(np, np, |i, j| if i == j { 0.0 } else { 1.0 / dx[(i, j)] });

    let mut out: Vec<Mat<f64>> = Vec::with_capacity(order);
    let mut prev = Mat::<f64>::identity(np, np);
    for ell in 1..=order {
        let l = ell as f64;
        let mut d = Mat::<f64>::from_fn(np, np, |i, j| {
            if i == j {
                0.0
            } else {
                l * z[(i, j)] * (c[(i, j)] * prev[(i, i)] - prev[(i, j)])
            }
        });
        for i in 0..np {
            let s: f64 = (0..np).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
            d[(i, i)] = -s;
        }
        out.push(d.clone());
        prev = d;
    }
    out
}

/// Clenshaw–Curtis weights on the `n + 1` Chebyshev points (symmetric, so
/// the ordering of the points does not matter).
fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    let end = if n % 2 == 0 { 1.0 / (nf * nf - 1.0) } else { 1.0 / (nf * nf) };
    w[0] = end;
    w[n] = end;
    for (k, wk) in w.iter_mut().enumerate().take(n).skip(1) {
        let theta = k as f64 * PI / nf;
        let mut v = 1.0;
        if n % 2 == 0 {
            for j in 1..n / 2 {
                let jf = j as f64;
                v -= 2.0 * (2.0 * jf * theta).cos() / (4.0 * jf * jf - 1.0);
            }
            v -= (nf * theta).cos() / (nf * nf - 1.0);
        } else {
            for j in 1..=(n - 1) / 2 {
                let jf = j as f64;
                v -= 2.0 * (2.0 * jf * theta).cos() / (4.0 * jf * jf - 1.0);
            }
        }
        *wk = 2.0 * v / nf;
    }
    w
}
