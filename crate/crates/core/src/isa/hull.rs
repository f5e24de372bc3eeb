//! Convex boundary of the instance space and per-solver footprints.

use super::IsaError;

pub type Point = [f64; 2];

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by the monotone chain; counter-clockwise, no collinear
/// vertices, starting from the lexicographically smallest point.
pub fn convex_hull(points: &[Point]) -> Result<Vec<Point>, IsaError> {
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(IsaError::NonFinite("hull input".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return Err(IsaError::Degenerate(format!("{} distinct point(s)", pts.len())));
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let floor = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= floor + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(IsaError::Degenerate("all points are collinear".into()));
    }
    Ok(hull)
}

/// CLOISTER-style boundary: the hull of every projected instance.
pub fn cloister_boundary(points: &[Point]) -> Result<Vec<Point>, IsaError> {
    convex_hull(points)
}

/// Shoelace area (positive for counter-clockwise polygons).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    twice / 2.0
}

/// Inside-or-on test for a counter-clockwise convex polygon. Points on an
/// edge count as inside, up to a slack scaled by edge length and magnitude.
pub fn in_convex_polygon(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        let scale = 1.0 + a[0].abs().max(a[1].abs()).max(p[0].abs()).max(p[1].abs());
        cross(a, b, p) >= -1e-12 * len * scale
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Footprint {
    pub solver_id: String,
    /// Empty when the solver has fewer than 3 non-collinear good points.
    pub polygon: Vec<Point>,
    pub area: f64,
    /// Good instances per unit area; 0 for an empty footprint.
    pub density: f64,
    /// Good instances over all instances inside the polygon.
    pub purity: f64,
    pub good_count: usize,
    pub enclosed_count: usize,
}

impl Footprint {
    pub fn is_empty(&self) -> bool {
        self.polygon.is_empty()
    }
}

/// Hull of the solver's good instances, with area, density and purity.
pub fn footprint(solver_id: &str, points: &[Point], good: &[bool]) -> Result<Footprint, IsaError> {
    if points.len() != good.len() {
        return Err(IsaError::Shape);
    }
    let good_points: Vec<Point> = points.iter().zip(good).filter(|(_, &g)| g).map(|(p, _)| *p).collect();
    let mut fp = Footprint {
        solver_id: solver_id.to_string(),
        polygon: Vec::new(),
        area: 0.0,
        density: 0.0,
        purity: 0.0,
        good_count: good_points.len(),
        enclosed_count: 0,
    };
    let polygon = match convex_hull(&good_points) {
        Ok(p) => p,
        Err(IsaError::Degenerate(why)) => {
            log::info!("empty footprint for {solver_id}: {why}");
            return Ok(fp);
        }
        Err(e) => return Err(e),
    };
    let mut enclosed = 0usize;
    let mut enclosed_good = 0usize;
    for (p, &g) in points.iter().zip(good) {
        if in_convex_polygon(&polygon, *p) {
            enclosed += 1;
            enclosed_good += usize::from(g);
        }
    }
    fp.area = polygon_area(&polygon);
    fp.density = if fp.area > 0.0 { fp.good_count as f64 / fp.area } else { 0.0 };
    fp.purity = if enclosed > 0 { enclosed_good as f64 / enclosed as f64 } else { 0.0 };
    fp.enclosed_count = enclosed;
    fp.polygon = polygon;
    Ok(fp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_with_interior_points() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.2, 0.7], [0.5, 0.0]];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(polygon_area(&hull), 1.0);
        assert!(pts.iter().all(|&p| in_convex_polygon(&hull, p)));
        assert!(!in_convex_polygon(&hull, [1.1, 0.5]));
    }

    #[test]
    fn triangle_and_degenerate_inputs() {
        let tri = convex_hull(&[[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]).unwrap();
        assert_eq!(tri.len(), 3);
        assert_eq!(polygon_area(&tri), 2.0);
        assert!(matches!(convex_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]), Err(IsaError::Degenerate(_))));
        assert!(convex_hull(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn footprint_cases() {
        let pts = vec![[0.0, 0.0], [4.0, 0.0], [4.0, 4.0], [0.0, 4.0], [1.0, 1.0], [3.0, 1.0], [2.0, 3.0]];
        let all = footprint("a", &pts, &[true; 7]).unwrap();
        assert_eq!(all.polygon, cloister_boundary(&pts).unwrap());
        assert_eq!((all.area, all.purity, all.enclosed_count), (16.0, 1.0, 7));

        let good = [false, false, false, false, true, true, true];
        let tri = footprint("b", &pts, &good).unwrap();
        assert_eq!(tri.polygon.len(), 3);
        assert_eq!(tri.area, 2.0);
        assert_eq!(tri.density, 1.5);
        assert_eq!(tri.purity, 1.0);

        let few = footprint("c", &pts, &[true, true, false, false, false, false, false]).unwrap();
        assert!(few.is_empty());
        assert_eq!(few.area, 0.0);
    }
}
