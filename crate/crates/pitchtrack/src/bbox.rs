use serde::{Deserialize, Serialize};

/// Axis-aligned box in continuous pixel coordinates, stored as
/// (left, top, width, height).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        debug_assert!(w > 0.0 && h > 0.0, "box dimensions must be positive");
        Self { x, y, w, h }
    }

    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self::new(cx - w / 2.0, cy - h / 2.0, w, h)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self::new(self.x + dx, self.y + dy, self.w, self.h)
    }

    /// Same size, new center.
    pub fn with_center(&self, cx: f64, cy: f64) -> Self {
        Self::from_center(cx, cy, self.w, self.h)
    }

    /// True when the box lies fully inside `[0, width] x [0, height]`.
    pub fn contained_in(&self, width: f64, height: f64) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.right() <= width && self.bottom() <= height
    }
}

/// Intersection over union. Symmetric, in [0, 1]; identical boxes score
/// exactly 1, disjoint or edge-touching boxes score 0.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let ix = a.right().min(b.right()) - a.x.max(b.x);
    let iy = a.bottom().min(b.bottom()) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    // Rounding in right()/bottom() can push the ratio a few ulps past 1.
    (inter / (a.area() + b.area() - inter)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iou_identical_is_exactly_one() {
        let b = BoundingBox::new(12.3, 45.6, 7.8, 9.1);
        assert_eq!(iou(&b, &b), 1.0);
    }

    #[test]
    fn iou_disjoint_is_zero() {
        let a = BoundingBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BoundingBox::new(20.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &b), 0.0);
    }

    #[test]
    fn iou_edge_touching_is_zero() {
        let a = BoundingBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BoundingBox::new(10.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &b), 0.0);
    }

    #[test]
    fn iou_half_overlap() {
        // Two 10x10 boxes offset by 5 horizontally: inter 50, union 150.
        let a = BoundingBox::new(0.0, 0.0, 10.0, 10.0);
        let b = BoundingBox::new(5.0, 0.0, 10.0, 10.0);
        let v = iou(&a, &b);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(v, iou(&b, &a));
    }

    #[test]
    fn center_roundtrip() {
        let b = BoundingBox::from_center(100.0, 50.0, 8.0, 20.0);
        assert_eq!(b.center(), (100.0, 50.0));
        assert_eq!(b.x, 96.0);
        assert_eq!(b.y, 40.0);
    }

    #[test]
    fn containment() {
        let b = BoundingBox::new(0.0, 0.0, 10.0, 10.0);
        assert!(b.contained_in(10.0, 10.0));
        assert!(!b.translated(0.5, 0.0).contained_in(10.0, 10.0));
        assert!(!b.translated(-0.5, 0.0).contained_in(10.0, 10.0));
    }
}
