use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{Color, ColoredPoint, Point, MAX_COORD};

/// A red/blue point set on a decimal lattice.
///
/// Coordinates are stored as integers; the real value of a coordinate `v`
/// is `v / 10^scale`. The scale is normalized to the smallest value that
/// represents every coordinate exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    points: Vec<ColoredPoint>,
    scale: u32,
}

impl Instance {
    pub fn new(points: Vec<(Point, Color)>, scale: u32) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let mut seen: HashMap<Point, usize> = HashMap::with_capacity(points.len());
        for (i, (p, _)) in points.iter().enumerate() {
            if p.x.abs() > MAX_COORD || p.y.abs() > MAX_COORD {
                return Err(Error::CoordinateRange { value: format!("{p}") });
            }
            if let Some(&j) = seen.get(p) {
                return Err(Error::DuplicatePoint { first: j, second: i });
            }
            seen.insert(*p, i);
        }
        let mut inst = Self {
            points: points
                .into_iter()
                .enumerate()
                .map(|(index, (pos, color))| ColoredPoint { pos, color, index })
                .collect(),
            scale,
        };
        inst.normalize_scale();
        Ok(inst)
    }

    fn normalize_scale(&mut self) {
        while self.scale > 0 && self.points.iter().all(|p| p.pos.x % 10 == 0 && p.pos.y % 10 == 0) {
            for p in &mut self.points {
                p.pos.x /= 10;
                p.pos.y /= 10;
            }
            self.scale -= 1;
        }
    }

    pub fn points(&self) -> &[ColoredPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pos(&self, i: usize) -> Point {
        self.points[i].pos
    }

    pub fn color(&self, i: usize) -> Color {
        self.points[i].color
    }

    /// Decimal digits after the point.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Lattice units per unit length.
    pub fn unit(&self) -> f64 {
        10f64.powi(self.scale as i32)
    }

    pub fn count(&self, color: Color) -> usize {
        self.points.iter().filter(|p| p.color == color).count()
    }

    /// Rejects instances with two or more points of a single color.
    pub fn require_bichromatic(&self) -> Result<()> {
        let n = self.len();
        if n >= 2 && (self.count(Color::Red) == 0 || self.count(Color::Blue) == 0) {
            return Err(Error::MonochromaticInstance { n });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert_eq!(Instance::new(vec![], 0), Err(Error::EmptyInstance));
        let dup = vec![(Point::new(1, 1), Color::Red), (Point::new(1, 1), Color::Blue)];
        assert_eq!(Instance::new(dup, 0), Err(Error::DuplicatePoint { first: 0, second: 1 }));
    }

    #[test]
    fn scale_normalizes() {
        let inst = Instance::new(vec![(Point::new(1500, 0), Color::Red), (Point::new(0, 20), Color::Blue)], 3).unwrap();
        assert_eq!(inst.scale(), 2);
        assert_eq!(inst.pos(0), Point::new(150, 0));
    }

    #[test]
    fn monochromatic_detection() {
        let mono = Instance::new(vec![(Point::new(0, 0), Color::Red), (Point::new(1, 0), Color::Red)], 0).unwrap();
        assert_eq!(mono.require_bichromatic(), Err(Error::MonochromaticInstance { n: 2 }));
        let single = Instance::new(vec![(Point::new(0, 0), Color::Blue)], 0).unwrap();
        assert!(single.require_bichromatic().is_ok());
    }
}
