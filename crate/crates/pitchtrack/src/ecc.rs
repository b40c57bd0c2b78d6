//! Intensity-based rigid image alignment.
//!
//! Forward-additive maximization of the enhanced correlation
//! coefficient between a template and an input image. Zero-mean
//! normalization makes the estimate invariant to global brightness and
//! contrast changes. The returned warp maps input-image coordinates
//! onto template coordinates: if the input shows the template's content
//! shifted right by 3 pixels, the result is a translation of -3.

use crate::error::{Error, Result};
use crate::motion::Warp;

/// Single-channel image, f64 intensities, row-major.
#[derive(Debug, Clone)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "image data length mismatch");
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Bilinear lookup; None outside [0, w-1] x [0, h-1].
    fn sample(&self, x: f64, y: f64) -> Option<f64> {
        let xm = (self.width - 1) as f64;
        let ym = (self.height - 1) as f64;
        if !(x >= 0.0 && x <= xm && y >= 0.0 && y <= ym) {
            return None;
        }
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        Some(
            self.at(x0, y0) * (1.0 - fx) * (1.0 - fy)
                + self.at(x1, y0) * fx * (1.0 - fy)
                + self.at(x0, y1) * (1.0 - fx) * fy
                + self.at(x1, y1) * fx * fy,
        )
    }

    /// Central-difference gradients with replicated borders.
    fn gradients(&self) -> (GrayImage, GrayImage) {
        let gx = GrayImage::from_fn(self.width, self.height, |x, y| {
            let xl = x.saturating_sub(1);
            let xr = (x + 1).min(self.width - 1);
            (self.at(xr, y) - self.at(xl, y)) / (xr - xl).max(1) as f64
        });
        let gy = GrayImage::from_fn(self.width, self.height, |x, y| {
            let yl = y.saturating_sub(1);
            let yr = (y + 1).min(self.height - 1);
            (self.at(x, yr) - self.at(x, yl)) / (yr - yl).max(1) as f64
        });
        (gx, gy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarpModel {
    Translation,
    Euclidean,
}

#[derive(Debug, Clone, Copy)]
pub struct EccParams {
    pub max_iter: u32,
    /// Stop once the correlation gain per iteration drops below this.
    pub tol: f64,
}

impl Default for EccParams {
    fn default() -> Self {
        Self {
            max_iter: 50,
            tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EccResult {
    pub warp: Warp,
    pub converged: bool,
    pub iterations: u32,
    /// Best correlation coefficient reached, in [-1, 1].
    pub correlation: f64,
}

/// Solves the P x P system H x = b in place. P is 2 or 3.
fn solve_small(mut h: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if h[r][col].abs() > h[piv][col].abs() {
                piv = r;
            }
        }
        if h[piv][col].abs() < 1e-12 {
            return None;
        }
        h.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = h[r][col] / h[col][col];
            for c in col..n {
                h[r][c] -= f * h[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = b[col];
        for c in col + 1..n {
            v -= h[col][c] * b[c];
        }
        b[col] = v / h[col][col];
    }
    Some(b)
}

/// Estimates the rigid warp aligning `image` to `template`.
///
/// Divergence (anti-correlated update, vanishing overlap, singular
/// normal equations) ends the iteration early; the best warp seen so
/// far is returned with `converged = false` instead of an error, so an
/// uncorrelated frame pair degrades to a no-op rather than a crash.
pub fn ecc_align(
    template: &GrayImage,
    image: &GrayImage,
    model: WarpModel,
    params: &EccParams,
) -> Result<EccResult> {
    let tw = template.width;
    let th = template.height;
    let npx = tw * th;
    assert!(npx > 0, "empty template");

    let t_mean = template.data.iter().sum::<f64>() / npx as f64;
    let t_var = template
        .data
        .iter()
        .map(|v| (v - t_mean) * (v - t_mean))
        .sum::<f64>()
        / npx as f64;
    if t_var < 1e-12 {
        return Err(Error::DegenerateTemplate);
    }

    let (grad_x, grad_y) = image.gradients();
    let n_params = match model {
        WarpModel::Translation => 2,
        WarpModel::Euclidean => 3,
    };

    // Internally estimates q mapping template coords into the image;
    // the inverse is returned.
    let mut q = Warp::identity();
    let mut best_q = q;
    let mut best_rho = f64::NEG_INFINITY;
    let mut last_rho = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    let mut tvals = Vec::with_capacity(npx);
    let mut ivals = Vec::with_capacity(npx);
    let mut jac = Vec::with_capacity(npx);

    for iter in 1..=params.max_iter {
        iterations = iter;
        tvals.clear();
        ivals.clear();
        jac.clear();

        let (s, c) = q.theta.sin_cos();
        for y in 0..th {
            for x in 0..tw {
                let xf = x as f64;
                let yf = y as f64;
                let (wx, wy) = q.apply(xf, yf);
                let (Some(iv), Some(gx), Some(gy)) = (
                    image.sample(wx, wy),
                    grad_x.sample(wx, wy),
                    grad_y.sample(wx, wy),
                ) else {
                    continue;
                };
                tvals.push(template.at(x, y));
                ivals.push(iv);
                let mut row = [0.0; 3];
                row[0] = gx;
                row[1] = gy;
                if n_params == 3 {
                    row[2] = gx * (-s * xf - c * yf) + gy * (c * xf - s * yf);
                }
                jac.push(row);
            }
        }

        let n = tvals.len();
        if n < 8 * n_params {
            break;
        }

        let tm = tvals.iter().sum::<f64>() / n as f64;
        let im = ivals.iter().sum::<f64>() / n as f64;
        for v in &mut tvals {
            *v -= tm;
        }
        for v in &mut ivals {
            *v -= im;
        }

        let t_norm = tvals.iter().map(|v| v * v).sum::<f64>().sqrt();
        let i_norm = ivals.iter().map(|v| v * v).sum::<f64>().sqrt();
        let corr: f64 = tvals.iter().zip(&ivals).map(|(t, i)| t * i).sum();
        if t_norm < 1e-12 || i_norm < 1e-12 {
            break;
        }
        let rho = corr / (t_norm * i_norm);
        if rho > best_rho {
            best_rho = rho;
            best_q = q;
        }
        if iter > 1 && (rho - last_rho).abs() < params.tol {
            converged = true;
            break;
        }
        last_rho = rho;

        let mut h = vec![vec![0.0; n_params]; n_params];
        let mut g_t = vec![0.0; n_params];
        let mut g_i = vec![0.0; n_params];
        for (k, row) in jac.iter().enumerate() {
            for a in 0..n_params {
                for b in a..n_params {
                    h[a][b] += row[a] * row[b];
                }
                g_t[a] += row[a] * tvals[k];
                g_i[a] += row[a] * ivals[k];
            }
        }
        for a in 0..n_params {
            for b in 0..a {
                h[a][b] = h[b][a];
            }
        }

        let Some(h_inv_gi) = solve_small(h.clone(), g_i.clone()) else {
            break;
        };
        let lambda_n = i_norm * i_norm - g_i.iter().zip(&h_inv_gi).map(|(a, b)| a * b).sum::<f64>();
        let lambda_d = corr - g_t.iter().zip(&h_inv_gi).map(|(a, b)| a * b).sum::<f64>();
        if lambda_d <= 0.0 {
            break;
        }
        let lambda = lambda_n / lambda_d;

        let rhs: Vec<f64> = (0..n_params).map(|a| lambda * g_t[a] - g_i[a]).collect();
        let Some(delta) = solve_small(h, rhs) else {
            break;
        };
        q.dx += delta[0];
        q.dy += delta[1];
        if n_params == 3 {
            q.theta += delta[2];
        }
    }

    if best_rho == f64::NEG_INFINITY {
        best_q = Warp::identity();
        best_rho = 0.0;
    }
    Ok(EccResult {
        warp: best_q.inverse(),
        converged,
        iterations,
        correlation: best_rho,
    })
}
