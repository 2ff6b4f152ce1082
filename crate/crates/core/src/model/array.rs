use num_complex::Complex64;
use std::f64::consts::PI;

/// Default carrier wavelength (m).
pub const DEFAULT_WAVELENGTH: f64 = 0.1;

/// Uniform planar array of `n_x` by `n_y` elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayLayout {
    pub n_x: usize,
    pub n_y: usize,
    pub wavelength: f64,
    pub spacing: f64,
}

impl ArrayLayout {
    /// Half-wavelength planar array.
    pub fn planar(n_x: usize, n_y: usize) -> Self {
        Self { n_x, n_y, wavelength: DEFAULT_WAVELENGTH, spacing: DEFAULT_WAVELENGTH / 2.0 }
    }

    /// Half-wavelength linear array of `n` elements.
    pub fn linear(n: usize) -> Self {
        Self::planar(n, 1)
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `[1, e^{-j pi theta}, ..., e^{-j pi (n-1) theta}]`.
fn uniform_response(theta: f64, n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |k| Complex64::from_polar(1.0, -PI * k as f64 * theta))
}

/// Array response for azimuth `theta` and elevation `vartheta`, horizontal index outermost.
pub fn steering_vector(theta: f64, vartheta: f64, layout: &ArrayLayout) -> Vec<Complex64> {
    let scale = 2.0 * layout.spacing / layout.wavelength;
    let fx = scale * theta.sin() * vartheta.sin();
    let fy = scale * vartheta.cos();
    let wy: Vec<Complex64> = uniform_response(fy, layout.n_y).collect();
    uniform_response(fx, layout.n_x)
        .flat_map(|a| wy.iter().map(move |b| a * b))
        .collect()
}
