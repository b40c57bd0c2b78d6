use crate::bbox::BoundingBox;

/// Rigid 2-D transform: rotate about the origin by `theta` radians,
/// then translate by (dx, dy). `theta = 0` gives a pure translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Warp {
    pub dx: f64,
    pub dy: f64,
    pub theta: f64,
}

impl Warp {
    pub fn identity() -> Self {
        Self {
            dx: 0.0,
            dy: 0.0,
            theta: 0.0,
        }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self {
            dx,
            dy,
            theta: 0.0,
        }
    }

    pub fn euclidean(dx: f64, dy: f64, theta: f64) -> Self {
        Self { dx, dy, theta }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (c * x - s * y + self.dx, s * x + c * y + self.dy)
    }

    pub fn inverse(&self) -> Self {
        let (s, c) = self.theta.sin_cos();
        Self {
            dx: -(c * self.dx + s * self.dy),
            dy: -(-s * self.dx + c * self.dy),
            theta: -self.theta,
        }
    }

    /// Multiplies the translation part only. Lifts a warp estimated on a
    /// downscaled image back to full-resolution pixels; rotation is
    /// scale-invariant.
    pub fn scale_translation(&self, k: f64) -> Self {
        Self {
            dx: self.dx * k,
            dy: self.dy * k,
            theta: self.theta,
        }
    }
}

/// Constant-velocity extrapolation over the last two boxes. The box
/// size is carried over from the newest entry; a single-entry history
/// predicts no motion.
pub fn cva_predict(history: &[BoundingBox]) -> BoundingBox {
    let last = *history.last().expect("cva_predict needs at least one box");
    if history.len() < 2 {
        return last;
    }
    let prev = history[history.len() - 2];
    let (px, py) = prev.center();
    let (cx, cy) = last.center();
    last.with_center(2.0 * cx - px, 2.0 * cy - py)
}

/// Moves a box by mapping its center through `warp`; size is preserved.
pub fn cmc_apply(warp: &Warp, bbox: &BoundingBox) -> BoundingBox {
    let (cx, cy) = bbox.center();
    let (nx, ny) = warp.apply(cx, cy);
    bbox.with_center(nx, ny)
}
