//! Piecewise smooth paths in the complex plane.

use crate::{Complex64, Error, Result};
use std::f64::consts::PI;

const JOIN_TOL: f64 = 1e-12;

/// One smooth piece of a [`ComplexPath`], parametrised by `tau` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { a: Complex64, b: Complex64 },
    Arc { center: Complex64, radius: f64, phi_start: f64, phi_end: f64 },
}

impl Segment {
    pub fn line(a: Complex64, b: Complex64) -> Self {
        Segment::Line { a, b }
    }

    pub fn arc(center: Complex64, radius: f64, phi_start: f64, phi_end: f64) -> Self {
        Segment::Arc { center, radius, phi_start, phi_end }
    }

    pub fn start(&self) -> Complex64 {
        match *self {
            Segment::Line { a, .. } => a,
            Segment::Arc { center, radius, phi_start, .. } => {
                center + Complex64::from_polar(radius, phi_start)
            }
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            Segment::Line { b, .. } => b,
            Segment::Arc { center, radius, phi_end, .. } => {
                center + Complex64::from_polar(radius, phi_end)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => (b - a).norm(),
            Segment::Arc { radius, phi_start, phi_end, .. } => radius * (phi_end - phi_start).abs(),
        }
    }

    /// Point at parameter `tau`.
    pub fn point(&self, tau: f64) -> Complex64 {
        match *self {
            Segment::Line { a, b } => {
                if tau <= 0.5 {
                    a + (b - a) * tau
                } else {
                    b - (b - a) * (1.0 - tau)
                }
            }
            Segment::Arc { center, radius, phi_start, phi_end } => {
                center + Complex64::from_polar(radius, phi_start + tau * (phi_end - phi_start))
            }
        }
    }

    /// Derivative of the point with respect to `tau`.
    pub fn tangent(&self, tau: f64) -> Complex64 {
        match *self {
            Segment::Line { a, b } => b - a,
            Segment::Arc { radius, phi_start, phi_end, .. } => {
                let dphi = phi_end - phi_start;
                Complex64::i()
                    * Complex64::from_polar(radius, phi_start + tau * dphi)
                    * dphi
            }
        }
    }

    /// Offsets `point - start` and `point - end`, accurate when the point is
    /// close to either endpoint. `sigma` is `1 - tau`, supplied separately so
    /// that it keeps full relative precision.
    pub fn offsets(&self, tau: f64, sigma: f64) -> (Complex64, Complex64) {
        match *self {
            Segment::Line { a, b } => ((b - a) * tau, -(b - a) * sigma),
            Segment::Arc { radius, phi_start, phi_end, .. } => {
                let dphi = phi_end - phi_start;
                (
                    chord(radius, phi_start, tau * dphi),
                    chord(radius, phi_end, -sigma * dphi),
                )
            }
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Line { a, b } => Segment::Line { a: b, b: a },
            Segment::Arc { center, radius, phi_start, phi_end } => Segment::Arc {
                center,
                radius,
                phi_start: phi_end,
                phi_end: phi_start,
            },
        }
    }

    /// Splits the segment at parameter `tau` in `(0, 1)`.
    pub fn split(&self, tau: f64) -> (Self, Self) {
        match *self {
            Segment::Line { a, b } => {
                let m = self.point(tau);
                (Segment::Line { a, b: m }, Segment::Line { a: m, b })
            }
            Segment::Arc { center, radius, phi_start, phi_end } => {
                let phi = phi_start + tau * (phi_end - phi_start);
                (
                    Segment::Arc { center, radius, phi_start, phi_end: phi },
                    Segment::Arc { center, radius, phi_start: phi, phi_end },
                )
            }
        }
    }
}

// r e^{i phi0} (e^{i dphi} - 1) without cancellation for small dphi.
fn chord(radius: f64, phi0: f64, dphi: f64) -> Complex64 {
    let half = 0.5 * dphi;
    Complex64::from_polar(2.0 * radius * half.sin(), phi0 + half + 0.5 * PI)
}

/// Ordered chain of segments sharing endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPath {
    segments: Vec<Segment>,
}

impl ComplexPath {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidPath("path has no segments".into()));
        }
        for (k, s) in segments.iter().enumerate() {
            let ok = match *s {
                Segment::Line { a, b } => a.is_finite() && b.is_finite(),
                Segment::Arc { center, radius, phi_start, phi_end } => {
                    center.is_finite()
                        && radius.is_finite()
                        && radius > 0.0
                        && phi_start.is_finite()
                        && phi_end.is_finite()
                }
            };
            if !ok {
                return Err(Error::InvalidPath(format!("segment {k} is degenerate")));
            }
        }
        for (k, w) in segments.windows(2).enumerate() {
            let gap = (w[0].end() - w[1].start()).norm();
            if gap > JOIN_TOL {
                return Err(Error::InvalidPath(format!(
                    "segments {k} and {} are {gap:.3e} apart",
                    k + 1
                )));
            }
        }
        let path = ComplexPath { segments };
        let len = path.length();
        if !(len > 0.0 && len.is_finite()) {
            return Err(Error::InvalidPath(format!("total length {len}")));
        }
        Ok(path)
    }

    pub fn line(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(vec![Segment::line(a, b)])
    }

    pub fn arc(center: Complex64, radius: f64, phi_start: f64, phi_end: f64) -> Result<Self> {
        Self::new(vec![Segment::arc(center, radius, phi_start, phi_end)])
    }

    /// Appends a straight segment from the current end to `b`.
    pub fn line_to(mut self, b: Complex64) -> Self {
        let a = self.end();
        self.segments.push(Segment::line(a, b));
        self
    }

    /// Appends an arc about `center` from the current end, sweeping the
    /// angle by `sweep` radians (positive is counter-clockwise).
    pub fn arc_by(mut self, center: Complex64, sweep: f64) -> Self {
        let d = self.end() - center;
        let phi_start = d.arg();
        self.segments
            .push(Segment::arc(center, d.norm(), phi_start, phi_start + sweep));
        self
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> Complex64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn reversed(&self) -> Self {
        ComplexPath {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    /// Splits segment `index` at parameter `tau`; other segments are untouched.
    pub fn subdivide(&self, index: usize, tau: f64) -> Result<Self> {
        if index >= self.segments.len() || !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "cannot split segment {index} at {tau}"
            )));
        }
        let mut segments = self.segments.clone();
        let (first, second) = segments[index].split(tau);
        segments[index] = first;
        segments.insert(index + 1, second);
        Ok(ComplexPath { segments })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_gaps_and_empty_paths() {
        assert!(ComplexPath::new(vec![]).is_err());
        let gap = vec![Segment::line(c(0.0, 0.0), c(1.0, 0.0)), Segment::line(c(1.1, 0.0), c(2.0, 0.0))];
        assert!(ComplexPath::new(gap).is_err());
        assert!(ComplexPath::line(c(1.0, 1.0), c(1.0, 1.0)).is_err());
    }

    #[test]
    fn arc_endpoints_and_length() {
        let p = ComplexPath::arc(c(0.0, 0.0), 1.0, -PI, 0.0).unwrap();
        assert!((p.start() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((p.end() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((p.length() - PI).abs() < 1e-15);
        assert!(p.segments()[0].point(0.5).im < -0.99);
    }

    #[test]
    fn offsets_match_direct_differences() {
        let s = Segment::arc(c(0.3, -0.2), 0.7, 0.4, 2.9);
        for &tau in &[1e-9, 0.25, 0.5, 0.9, 1.0 - 1e-9] {
            let (ds, de) = s.offsets(tau, 1.0 - tau);
            let p = s.point(tau);
            assert!((ds - (p - s.start())).norm() < 1e-14);
            assert!((de - (p - s.end())).norm() < 1e-14);
        }
    }

    #[test]
    fn builder_chains_segments() {
        let p = ComplexPath::line(c(0.0, 0.0), c(1.0, 0.0))
            .unwrap()
            .arc_by(c(1.0, 1.0), PI)
            .line_to(c(0.0, 2.0));
        assert_eq!(p.segments().len(), 3);
        assert!(ComplexPath::new(p.segments().to_vec()).is_ok());
        assert!((p.end() - c(0.0, 2.0)).norm() < 1e-15);
    }
}
