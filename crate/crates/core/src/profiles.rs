//! Base velocity profiles U(z) on the channel z in [-1, 1].
//!
//! Builtin profiles carry closed-form derivatives and closed-form extrema.
//! Tabulated profiles are interpolated by a not-a-knot cubic spline; their
//! extrema come from dense sampling.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names accepted by [`builtin_profile`].
pub const BUILTIN_NAMES: [&str; 4] = ["couette", "poiseuille", "tanh_layer", "bickley_jet"];

/// Number of uniform samples used to estimate extrema of tabulated profiles.
pub const DENSE_SAMPLES: usize = 10_001;

/// `atanh(1/sqrt(3))`, where `sech^2(s) tanh(s)` peaks.
const SECH2_TANH_PEAK: f64 = 0.658_478_948_462_408_4;

/// Where a profile came from. Serializable so saved spectra can rebuild it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSource {
    Couette,
    Poiseuille,
    TanhLayer { kappa: f64 },
    BickleyJet { kappa: f64 },
    Table { z: Vec<f64>, u: Vec<f64> },
}

/// Extremal values of a profile over [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub u_min: f64,
    pub u_max: f64,
    pub d2u_min: f64,
    pub d2u_max: f64,
    /// `max |DU|` over the channel.
    pub q: f64,
}

/// U, DU and D²U sampled on a set of points.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSamples {
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub d2u: Vec<f64>,
}

#[derive(Clone, Debug)]
enum Shape {
    Couette,
    Poiseuille,
    TanhLayer { kappa: f64 },
    BickleyJet { kappa: f64 },
    Spline(CubicSpline),
}

/// A base flow with exact first and second derivatives.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct VelocityProfile {
    name: String,
    shape: Shape,
    extrema: Extrema,
    source: ProfileSource,
}

/// Looks up a builtin profile with its default parameters (`kappa = 1`).
pub fn builtin_profile(name: &str) -> Result<VelocityProfile> {
    builtin_profile_with(name, None)
}

/// Looks up a builtin profile, overriding `kappa` for the profiles that take one.
pub fn builtin_profile_with(name: &str, kappa: Option<f64>) -> Result<VelocityProfile> {
    let kappa = kappa.unwrap_or(1.0);
    match name {
        "couette" => Ok(VelocityProfile::couette()),
        "poiseuille" => Ok(VelocityProfile::poiseuille()),
        "tanh_layer" => VelocityProfile::tanh_layer(kappa),
        "bickley_jet" => VelocityProfile::bickley_jet(kappa),
        _ => Err(Error::UnknownProfile {
            name: name.to_owned(),
            valid: BUILTIN_NAMES.to_vec(),
        }),
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("kappa must be positive and finite, got {kappa}")))
    }
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

impl VelocityProfile {
    /// Plane Couette flow, `U = z`.
    pub fn couette() -> Self {
        Self {
            name: "couette".into(),
            shape: Shape::Couette,
            extrema: Extrema {
                u_min: -1.0,
                u_max: 1.0,
                d2u_min: 0.0,
                d2u_max: 0.0,
                q: 1.0,
            },
            source: ProfileSource::Couette,
        }
    }

    /// Plane Poiseuille flow, `U = 1 - z²`.
    pub fn poiseuille() -> Self {
        Self {
            name: "poiseuille".into(),
            shape: Shape::Poiseuille,
            extrema: Extrema {
                u_min: 0.0,
                u_max: 1.0,
                d2u_min: -2.0,
                d2u_max: -2.0,
                q: 2.0,
            },
            source: ProfileSource::Poiseuille,
        }
    }

    /// Hyperbolic-tangent mixing layer, `U = tanh(kappa z)`.
    pub fn tanh_layer(kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        // D²U = -2 kappa² sech²(kappa z) tanh(kappa z), odd in z.
        let d2u_peak = if kappa >= SECH2_TANH_PEAK {
            2.0 / (3.0 * 3f64.sqrt())
        } else {
            sech2(kappa) * kappa.tanh()
        } * 2.0
            * kappa
            * kappa;
        Ok(Self {
            name: "tanh_layer".into(),
            shape: Shape::TanhLayer { kappa },
            extrema: Extrema {
                u_min: -kappa.tanh(),
                u_max: kappa.tanh(),
                d2u_min: -d2u_peak,
                d2u_max: d2u_peak,
                q: kappa,
            },
            source: ProfileSource::TanhLayer { kappa },
        })
    }

    /// Bickley jet, `U = sech²(kappa z)`.
    pub fn bickley_jet(kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        let q = if kappa >= SECH2_TANH_PEAK {
            4.0 * kappa / (3.0 * 3f64.sqrt())
        } else {
            2.0 * kappa * sech2(kappa) * kappa.tanh()
        };
        // With t = tanh²(kappa z): D²U = -2 kappa² (1 - t)(1 - 3t), t in [0, tanh² kappa].
        let t_max = kappa.tanh().powi(2);
        let h = |t: f64| (1.0 - t) * (1.0 - 3.0 * t);
        let h_min = h(t_max.min(2.0 / 3.0));
        Ok(Self {
            name: "bickley_jet".into(),
            shape: Shape::BickleyJet { kappa },
            extrema: Extrema {
                u_min: sech2(kappa),
                u_max: 1.0,
                d2u_min: -2.0 * kappa * kappa,
                d2u_max: -2.0 * kappa * kappa * h_min,
                q,
            },
            source: ProfileSource::BickleyJet { kappa },
        })
    }

    /// Builds a spline profile from a table. `z` must be strictly increasing
    /// with endpoints exactly -1 and 1, and hold at least four points.
    pub fn from_table(z: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if z.len() != u.len() {
            return Err(Error::Shape {
                expected: z.len(),
                got: u.len(),
            });
        }
        if z.len() < 4 {
            return Err(Error::Config(format!(
                "profile table needs at least 4 points, got {}",
                z.len()
            )));
        }
        if z[0] != -1.0 || z[z.len() - 1] != 1.0 {
            return Err(Error::Config(
                "profile table must start at z = -1 and end at z = 1 exactly".into(),
            ));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("profile table z must be strictly increasing".into()));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("profile table U must be finite".into()));
        }
        let spline = CubicSpline::not_a_knot(&z, &u);
        let extrema = sampled_extrema(&spline);
        Ok(Self {
            name: "table".into(),
            shape: Shape::Spline(spline),
            extrema,
            source: ProfileSource::Table { z, u },
        })
    }

    /// Loads a `z,U` CSV table.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let table_err = |msg: String| Error::Table {
            path: path.to_path_buf(),
            msg,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| table_err(e.to_string()))?;
        let headers = reader.headers().map_err(|e| table_err(e.to_string()))?;
        if headers.len() != 2 || &headers[0] != "z" || &headers[1] != "U" {
            return Err(table_err(format!(
                "header must be exactly `z,U`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut z = Vec::new();
        let mut u = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| table_err(e.to_string()))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| table_err(format!("row {}: {e}: `{s}`", line + 1)))
            };
            z.push(parse(&record[0])?);
            u.push(parse(&record[1])?);
        }
        let mut profile = Self::from_table(z, u).map_err(|e| match e {
            Error::Config(msg) => table_err(msg),
            other => other,
        })?;
        if let Some(stem) = path.file_stem() {
            profile.name = stem.to_string_lossy().into_owned();
        }
        Ok(profile)
    }

    pub fn from_source(source: &ProfileSource) -> Result<Self> {
        match source {
            ProfileSource::Couette => Ok(Self::couette()),
            ProfileSource::Poiseuille => Ok(Self::poiseuille()),
            ProfileSource::TanhLayer { kappa } => Self::tanh_layer(*kappa),
            ProfileSource::BickleyJet { kappa } => Self::bickley_jet(*kappa),
            ProfileSource::Table { z, u } => Self::from_table(z.clone(), u.clone()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &ProfileSource {
        &self.source
    }

    pub fn extrema(&self) -> &Extrema {
        &self.extrema
    }

    pub fn u_min(&self) -> f64 {
        self.extrema.u_min
    }

    pub fn u_max(&self) -> f64 {
        self.extrema.u_max
    }

    pub fn d2u_min(&self) -> f64 {
        self.extrema.d2u_min
    }

    pub fn d2u_max(&self) -> f64 {
        self.extrema.d2u_max
    }

    pub fn q(&self) -> f64 {
        self.extrema.q
    }

    /// Evaluates `(U, DU, D²U)` at `z` without a domain check.
    pub fn eval_unchecked(&self, z: f64) -> (f64, f64, f64) {
        match &self.shape {
            Shape::Couette => (z, 1.0, 0.0),
            Shape::Poiseuille => (1.0 - z * z, -2.0 * z, -2.0),
            Shape::TanhLayer { kappa } => {
                let k = *kappa;
                let t = (k * z).tanh();
                let s = sech2(k * z);
                (t, k * s, -2.0 * k * k * s * t)
            }
            Shape::BickleyJet { kappa } => {
                let k = *kappa;
                let t = (k * z).tanh();
                let s = sech2(k * z);
                (s, -2.0 * k * s * t, -2.0 * k * k * s * (s - 2.0 * t * t))
            }
            Shape::Spline(spline) => spline.eval(z),
        }
    }

    /// Evaluates `(U, DU, D²U)` at `z`, rejecting points outside [-1, 1].
    pub fn eval(&self, z: f64) -> Result<(f64, f64, f64)> {
        if !(-1.0..=1.0).contains(&z) {
            return Err(Error::Domain { z });
        }
        Ok(self.eval_unchecked(z))
    }

    pub fn u(&self, z: f64) -> f64 {
        self.eval_unchecked(z).0
    }

    pub fn du(&self, z: f64) -> f64 {
        self.eval_unchecked(z).1
    }

    pub fn d2u(&self, z: f64) -> f64 {
        self.eval_unchecked(z).2
    }

    /// Pointwise evaluation on `grid`, aligned with its order.
    pub fn sample(&self, grid: &[f64]) -> Result<ProfileSamples> {
        let mut out = ProfileSamples {
            u: Vec::with_capacity(grid.len()),
            du: Vec::with_capacity(grid.len()),
            d2u: Vec::with_capacity(grid.len()),
        };
        for &z in grid {
            let (u, du, d2u) = self.eval(z)?;
            out.u.push(u);
            out.du.push(du);
            out.d2u.push(d2u);
        }
        Ok(out)
    }
}

impl fmt::Display for VelocityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::TanhLayer { kappa } | Shape::BickleyJet { kappa } => {
                write!(f, "{} (kappa = {kappa})", self.name)
            }
            _ => f.write_str(&self.name),
        }
    }
}

/// Samples `DENSE_SAMPLES` uniform points plus the knots. D²U of a cubic
/// spline is piecewise linear, so its extrema sit on knots and are exact.
fn sampled_extrema(spline: &CubicSpline) -> Extrema {
    let mut ext = Extrema {
        u_min: f64::INFINITY,
        u_max: f64::NEG_INFINITY,
        d2u_min: f64::INFINITY,
        d2u_max: f64::NEG_INFINITY,
        q: 0.0,
    };
    let uniform = (0..DENSE_SAMPLES).map(|k| -1.0 + 2.0 * k as f64 / (DENSE_SAMPLES - 1) as f64);
    for z in uniform.chain(spline.knots.iter().copied()) {
        let (u, du, d2u) = spline.eval(z);
        ext.u_min = ext.u_min.min(u);
        ext.u_max = ext.u_max.max(u);
        ext.d2u_min = ext.d2u_min.min(d2u);
        ext.d2u_max = ext.d2u_max.max(d2u);
        ext.q = ext.q.max(du.abs());
    }
    ext
}

/// Not-a-knot cubic spline, stored as knot values and second derivatives.
#[derive(Clone, Debug)]
struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    /// Requires at least four strictly increasing knots.
    fn not_a_knot(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        // Unknowns M_1..M_{n-2}; M_0 and M_{n-1} are eliminated through the
        // third-derivative continuity at x_1 and x_{n-2}.
        let m = n - 2;
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            sub[k] = h[i - 1];
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            sup[k] = h[i];
            rhs[k] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        // M_0 = ((h0 + h1) M_1 - h0 M_2) / h1
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        sup[0] -= h0 * h0 / h1;
        // M_{n-1} = ((hl + hp) M_{n-2} - hl M_{n-3}) / hp
        let (hp, hl) = (h[n - 3], h[n - 2]);
        diag[m - 1] += hl * (hl + hp) / hp;
        sub[m - 1] -= hl * hl / hp;

        let inner = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        let mut second = Vec::with_capacity(n);
        second.push(((h0 + h1) * inner[0] - h0 * inner.get(1).copied().unwrap_or(inner[0])) / h1);
        second.extend_from_slice(&inner);
        let last = inner[m - 1];
        let prev = if m >= 2 { inner[m - 2] } else { inner[m - 1] };
        second.push(((hl + hp) * last - hl * prev) / hp);
        Self {
            knots: x.to_vec(),
            values: y.to_vec(),
            second,
        }
    }

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.knots.len();
        let i = self.knots.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let h = x1 - x0;
        let a = x1 - x;
        let b = x - x0;
        let c0 = y0 / h - m0 * h / 6.0;
        let c1 = y1 / h - m1 * h / 6.0;
        let s = m0 * a.powi(3) / (6.0 * h) + m1 * b.powi(3) / (6.0 * h) + c0 * a + c1 * b;
        let ds = -m0 * a * a / (2.0 * h) + m1 * b * b / (2.0 * h) - c0 + c1;
        let d2s = (m0 * a + m1 * b) / h;
        (s, ds, d2s)
    }
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
