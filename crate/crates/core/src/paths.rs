//! Image-source path enumeration.
//!
//! A path reflected on walls `w_1, ..., w_n` (in propagation order) is a
//! direct path from the image obtained by mirroring the emitter successively
//! across `w_1`, then `w_2`, and so on. The path exists when, unfolding it
//! backwards from the receiver, every reflection point falls on its wall
//! segment and no leg is blocked by another wall.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Location;
use crate::scene::Scene;

const ON_WALL_TOLERANCE: f64 = 1e-9;

/// One propagation path seen from one antenna element.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    /// Virtual antenna position `a_{l,j}`.
    pub virtual_source: Location,
    /// Complex path gain; the product of the traversed reflection coefficients.
    pub gamma: Complex64,
    /// Supplementary interaction delay in seconds. Reflection phases are folded
    /// into `gamma`, so generated paths carry `nu = 0`.
    pub nu: f64,
    pub bounce_count: usize,
    /// Wall indices in propagation order.
    pub walls: Vec<usize>,
    /// Reflection points in propagation order.
    pub reflection_points: Vec<Location>,
}

impl Path {
    pub fn line_of_sight(source: Location) -> Self {
        Self {
            virtual_source: source,
            gamma: Complex64::new(1.0, 0.0),
            nu: 0.0,
            bounce_count: 0,
            walls: Vec::new(),
            reflection_points: Vec::new(),
        }
    }

    /// Length of the folded geometric path from the physical emitter through
    /// the reflection points to `x`.
    pub fn folded_length(&self, emitter: Location, x: Location) -> f64 {
        let mut total = 0.0;
        let mut prev = emitter;
        for &p in &self.reflection_points {
            total += prev.distance(p);
            prev = p;
        }
        total + prev.distance(x)
    }
}

/// Paths per antenna element: `per_antenna[j]` lists the paths from element `j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSet {
    pub per_antenna: Vec<Vec<Path>>,
}

impl PathSet {
    pub fn antenna_count(&self) -> usize {
        self.per_antenna.len()
    }

    pub fn antenna(&self, j: usize) -> &[Path] {
        &self.per_antenna[j]
    }

    /// Largest per-antenna path count.
    pub fn max_path_count(&self) -> usize {
        self.per_antenna.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.per_antenna.iter().all(Vec::is_empty)
    }

    /// Multiplies every path gain by `factor`.
    pub fn scale_gains(&mut self, factor: Complex64) {
        for path in self.per_antenna.iter_mut().flatten() {
            path.gamma *= factor;
        }
    }
}

/// Every wall sequence of length `1..=max_bounces` without immediate repeats.
pub fn wall_sequences(wall_count: usize, max_bounces: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_bounces {
        let mut next = Vec::new();
        for seq in &frontier {
            for w in 0..wall_count {
                if seq.last() != Some(&w) {
                    let mut s = seq.clone();
                    s.push(w);
                    next.push(s);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Enumerates the line-of-sight path (when enabled and unobstructed) and every
/// valid reflected path up to `scene.max_bounces`, for each antenna element.
pub fn enumerate_paths(scene: &Scene, x: Location) -> Result<PathSet> {
    if !scene.contains(x) {
        return Err(Error::OutOfBounds {
            x: x.x,
            y: x.y,
            half: scene.half_side(),
        });
    }
    if let Some(wall) = scene
        .walls
        .iter()
        .position(|w| w.distance_to(x) < ON_WALL_TOLERANCE)
    {
        return Err(Error::LocationOnWall { x: x.x, y: x.y, wall });
    }
    if scene.array.elements().iter().any(|a| a.distance(x) == 0.0) {
        return Err(Error::CoincidentSource { x: x.x, y: x.y });
    }

    let sequences = wall_sequences(scene.walls.len(), scene.max_bounces);
    let per_antenna = scene
        .array
        .elements()
        .iter()
        .map(|&emitter| {
            let mut paths = Vec::new();
            if scene.los_enabled && !leg_blocked(scene, emitter, x, &[]) {
                paths.push(Path::line_of_sight(emitter));
            }
            paths.extend(sequences.iter().filter_map(|seq| trace(scene, emitter, x, seq)));
            paths
        })
        .collect();
    Ok(PathSet { per_antenna })
}

fn leg_blocked(scene: &Scene, p: Location, q: Location, skip: &[usize]) -> bool {
    scene
        .walls
        .iter()
        .enumerate()
        .any(|(i, w)| !skip.contains(&i) && w.blocks(p, q))
}

/// Validates one reflection sequence; returns the path when it exists.
fn trace(scene: &Scene, emitter: Location, x: Location, seq: &[usize]) -> Option<Path> {
    const EPS: f64 = 1e-9;
    // images[0] = emitter, images[n] = image across w_1 .. w_n
    let mut images = Vec::with_capacity(seq.len() + 1);
    images.push(emitter);
    for &w in seq {
        let prev = *images.last().unwrap();
        images.push(scene.walls[w].mirror(prev));
    }

    // Unfold backwards from the receiver.
    let mut points = vec![Location::ORIGIN; seq.len()];
    let mut current = x;
    for level in (0..seq.len()).rev() {
        let wall = &scene.walls[seq[level]];
        let image = images[level + 1];
        let (t, s) = wall.intersect(image, current)?;
        if !(t > EPS && t < 1.0 - EPS && (0.0..=1.0).contains(&s)) {
            return None;
        }
        let p = image + (current - image) * t;
        points[level] = p;
        current = p;
    }

    // Legs: emitter -> p_1 -> ... -> p_n -> x. A leg ending on a wall must not
    // be reported blocked by that same wall.
    let mut prev = emitter;
    for (i, &p) in points.iter().enumerate() {
        let mut skip = vec![seq[i]];
        if i > 0 {
            skip.push(seq[i - 1]);
        }
        if leg_blocked(scene, prev, p, &skip) {
            return None;
        }
        prev = p;
    }
    if leg_blocked(scene, prev, x, &[*seq.last()?]) {
        return None;
    }

    let gamma = seq
        .iter()
        .fold(Complex64::new(1.0, 0.0), |g, &w| g * scene.walls[w].reflection);
    Some(Path {
        virtual_source: *images.last().unwrap(),
        gamma,
        nu: 0.0,
        bounce_count: seq.len(),
        walls: seq.to_vec(),
        reflection_points: points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AntennaArray;
    use crate::scene::Wall;

    fn single_antenna(at: Location) -> AntennaArray {
        AntennaArray::new(vec![at], 0.0857).unwrap()
    }

    #[test]
    fn empty_scene_has_only_line_of_sight() {
        let scene = Scene::empty("e", single_antenna(Location::new(0.0, -3.0)), 4.0).unwrap();
        let paths = enumerate_paths(&scene, Location::new(0.3, 0.2)).unwrap();
        assert_eq!(paths.antenna(0).len(), 1);
        let p = &paths.antenna(0)[0];
        assert_eq!(p.gamma, Complex64::new(1.0, 0.0));
        assert_eq!(p.nu, 0.0);
        assert_eq!(p.virtual_source, Location::new(0.0, -3.0));
    }

    #[test]
    fn single_wall_mirror() {
        let wall = Wall::new(Location::new(-1e6, 0.0), Location::new(1e6, 0.0), Complex64::new(0.5, 0.2)).unwrap();
        let scene = Scene::new("w", single_antenna(Location::new(0.0, 5.0)), vec![wall], 1, 20.0, true).unwrap();
        let paths = enumerate_paths(&scene, Location::new(4.0, 5.0)).unwrap();
        let list = paths.antenna(0);
        assert_eq!(list.len(), 2);
        let reflected = list.iter().find(|p| p.bounce_count == 1).unwrap();
        assert!(reflected.virtual_source.distance(Location::new(0.0, -5.0)) < 1e-9);
        assert_eq!(reflected.gamma, Complex64::new(0.5, 0.2));
    }

    #[test]
    fn location_on_wall_is_rejected() {
        let wall = Wall::new(Location::new(-1.0, 1.0), Location::new(1.0, 1.0), Complex64::new(0.5, 0.0)).unwrap();
        let scene = Scene::new("w", single_antenna(Location::new(0.0, -3.0)), vec![wall], 1, 4.0, true).unwrap();
        assert!(matches!(
            enumerate_paths(&scene, Location::new(0.2, 1.0)),
            Err(Error::LocationOnWall { wall: 0, .. })
        ));
        assert!(matches!(
            enumerate_paths(&scene, Location::new(3.0, 0.0)),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn wall_blocks_line_of_sight() {
        let wall = Wall::new(Location::new(-1.0, -2.5), Location::new(0.2, -2.5), Complex64::new(0.5, 0.0)).unwrap();
        let scene = Scene::new("w", single_antenna(Location::new(0.0, -3.0)), vec![wall], 0, 4.0, true).unwrap();
        assert!(enumerate_paths(&scene, Location::new(0.0, 0.0)).unwrap().is_empty());
        assert_eq!(enumerate_paths(&scene, Location::new(1.9, 0.5)).unwrap().antenna(0).len(), 1);
    }

    #[test]
    fn sequence_count() {
        assert_eq!(wall_sequences(4, 2).len(), 4 + 12);
        assert_eq!(wall_sequences(3, 0).len(), 0);
        assert_eq!(wall_sequences(3, 3).len(), 3 + 6 + 12);
    }
}
