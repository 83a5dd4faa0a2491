//! Reflecting scenes and the `wavefield-scene v1` text format.
//!
//! ```text
//! wavefield-scene v1
//! # comments start with '#'
//! name street
//! side 4                      # location square is [-side/2, side/2]^2
//! max_bounces 2
//! los true
//! reference_frequency 3.5e9   # Hz, sets the array reference wavelength
//! ula 8 0 -3                  # count, centre x, centre y (x-axis ULA)
//! antenna 0.1 -3              # alternative to `ula`, repeated per element
//! wall -3.5 -6 -3.5 4 0.7 1.2 # x1 y1 x2 y2 |gamma| arg(gamma)
//! ```
//!
//! `ula` and `antenna` lines are mutually exclusive. Keys may appear in any
//! order after the header line.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path as FsPath;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{AntennaArray, Location, SPEED_OF_LIGHT};

pub const SCENE_HEADER: &str = "wavefield-scene v1";

/// Opaque line-segment reflector with a constant complex reflection coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wall {
    pub start: Location,
    pub end: Location,
    pub reflection: Complex64,
}

impl Wall {
    pub fn new(start: Location, end: Location, reflection: Complex64) -> Result<Self> {
        if start.distance(end) <= 0.0 || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidGeometry("wall endpoints must be distinct and finite".into()));
        }
        let mag = reflection.norm();
        if !(mag > 0.0 && mag <= 1.0) {
            return Err(Error::InvalidGeometry(format!(
                "reflection magnitude must lie in (0, 1], got {mag}"
            )));
        }
        Ok(Self { start, end, reflection })
    }

    /// Unit normal of the supporting line.
    pub fn normal(&self) -> Location {
        let d = (self.end - self.start).normalized().expect("wall has non-zero length");
        Location::new(-d.y, d.x)
    }

    /// Mirror image of `p` across the supporting line.
    pub fn mirror(&self, p: Location) -> Location {
        let n = self.normal();
        p - n * (2.0 * (p - self.start).dot(n))
    }

    /// Distance from `p` to the segment.
    pub fn distance_to(&self, p: Location) -> f64 {
        let e = self.end - self.start;
        let t = ((p - self.start).dot(e) / e.norm_sq()).clamp(0.0, 1.0);
        p.distance(self.start + e * t)
    }

    /// Intersection of the segment `p -> q` with this wall, as
    /// `(t along p->q, s along the wall)`; `None` when parallel.
    pub fn intersect(&self, p: Location, q: Location) -> Option<(f64, f64)> {
        let r = q - p;
        let e = self.end - self.start;
        let den = r.x * e.y - r.y * e.x;
        if den.abs() < 1e-300 {
            return None;
        }
        let ap = self.start - p;
        let t = (ap.x * e.y - ap.y * e.x) / den;
        let s = (ap.x * r.y - ap.y * r.x) / den;
        Some((t, s))
    }

    /// Whether the open segment `p -> q` crosses this wall.
    pub fn blocks(&self, p: Location, q: Location) -> bool {
        const EPS: f64 = 1e-9;
        match self.intersect(p, q) {
            Some((t, s)) => t > EPS && t < 1.0 - EPS && (0.0..=1.0).contains(&s),
            None => false,
        }
    }
}

/// A 2D propagation scene: emitting array, reflectors, and the square
/// region where receiver locations live.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: String,
    pub walls: Vec<Wall>,
    pub max_bounces: usize,
    pub array: AntennaArray,
    /// Side length `L` of the location square `[-L/2, L/2]^2`.
    pub side: f64,
    pub los_enabled: bool,
}

impl Scene {
    pub fn new(
        name: impl Into<String>,
        array: AntennaArray,
        walls: Vec<Wall>,
        max_bounces: usize,
        side: f64,
        los_enabled: bool,
    ) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidGeometry(format!("scene side must be positive, got {side}")));
        }
        Ok(Self {
            name: name.into(),
            walls,
            max_bounces,
            array,
            side,
            los_enabled,
        })
    }

    /// Reflector-free line-of-sight scene.
    pub fn empty(name: impl Into<String>, array: AntennaArray, side: f64) -> Result<Self> {
        Self::new(name, array, Vec::new(), 0, side, true)
    }

    /// Builds walls from bare segments, drawing each reflection coefficient
    /// once: magnitude uniform in `[0.3, 0.9]`, phase uniform in `[0, 2pi)`.
    pub fn random_walls(segments: &[(Location, Location)], seed: u64) -> Result<Vec<Wall>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        segments
            .iter()
            .map(|&(a, b)| {
                let mag = rng.gen_range(0.3..=0.9);
                let phase = rng.gen_range(0.0..TAU);
                Wall::new(a, b, Complex64::from_polar(mag, phase))
            })
            .collect()
    }

    /// Built-in desk-scale scenes.
    ///
    /// * `los-empty` - no reflectors, line of sight only.
    /// * `street` - a street canyon closed at the far end, plus a short
    ///   obstacle that shadows part of the location square; up to two bounces.
    /// * `street-nlos` - `street` without the line-of-sight component.
    ///
    /// All presets place an `antennas`-element ULA centred at `(0, -3)` below a
    /// 4 m location square.
    pub fn preset(name: &str, antennas: usize, reference_frequency: f64) -> Result<Self> {
        let lambda = SPEED_OF_LIGHT / reference_frequency;
        let array = AntennaArray::ula(antennas, Location::new(0.0, -3.0), lambda)?;
        let side = 4.0;
        match name {
            "los-empty" => Self::empty(name, array, side),
            "street" | "street-nlos" => {
                let segments = [
                    (Location::new(-3.5, -6.0), Location::new(-3.5, 4.0)),
                    (Location::new(3.5, -6.0), Location::new(3.5, 4.0)),
                    (Location::new(-3.5, 3.5), Location::new(3.5, 3.5)),
                    (Location::new(0.6, -2.4), Location::new(1.4, -2.4)),
                ];
                let walls = Self::random_walls(&segments, 1)?;
                Self::new(name, array, walls, 2, side, name == "street")
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown scene preset '{other}' (expected los-empty, street, street-nlos)"
            ))),
        }
    }

    pub fn half_side(&self) -> f64 {
        self.side / 2.0
    }

    pub fn contains(&self, x: Location) -> bool {
        let h = self.half_side();
        x.is_finite() && x.x.abs() <= h && x.y.abs() <= h
    }

    /// Upper bound on propagation delays realisable in the scene:
    /// `1.5 * (diagonal + two-bounce margin) / c`, where the margin is the
    /// largest array-to-wall-endpoint extent.
    pub fn max_delay(&self) -> f64 {
        let h = self.half_side();
        let corners = [
            Location::new(-h, -h),
            Location::new(-h, h),
            Location::new(h, -h),
            Location::new(h, h),
        ];
        let reference = self.array.reference();
        let mut extent = corners.iter().map(|c| c.distance(reference)).fold(0.0, f64::max);
        let diagonal = self.side * std::f64::consts::SQRT_2;
        if self.max_bounces > 0 {
            let wall_reach = self
                .walls
                .iter()
                .flat_map(|w| [w.start, w.end])
                .map(|p| p.distance(reference) + corners.iter().map(|c| c.distance(p)).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            extent = extent.max(wall_reach * self.max_bounces.min(2) as f64);
        }
        1.5 * (diagonal + extent) / SPEED_OF_LIGHT
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let header = lines
            .by_ref()
            .map(|(n, l)| (n, strip_comment(l)))
            .find(|(_, l)| !l.is_empty());
        match header {
            Some((_, l)) if l == SCENE_HEADER => {}
            Some((n, l)) => {
                return Err(Error::SceneParse {
                    line: n,
                    message: format!("expected header '{SCENE_HEADER}', found '{l}'"),
                })
            }
            None => {
                return Err(Error::SceneParse {
                    line: 0,
                    message: "empty scene file".into(),
                })
            }
        }

        let mut name = String::from("unnamed");
        let mut side = None;
        let mut max_bounces = 0usize;
        let mut los = true;
        let mut reference_frequency = None;
        let mut ula: Option<(usize, Location)> = None;
        let mut antennas = Vec::new();
        let mut walls = Vec::new();

        for (n, raw) in lines {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::SceneParse { line: n, message };
            let mut tokens = line.split_whitespace();
            let key = tokens.next().unwrap_or_default();
            let args: Vec<&str> = tokens.collect();
            let num = |i: usize| -> Result<f64> {
                let tok = args.get(i).ok_or_else(|| err(format!("'{key}' is missing argument {}", i + 1)))?;
                tok.parse::<f64>().map_err(|_| err(format!("'{tok}' is not a number")))
            };
            let expect_args = |count: usize| -> Result<()> {
                if args.len() == count {
                    Ok(())
                } else {
                    Err(err(format!("'{key}' takes {count} argument(s), got {}", args.len())))
                }
            };
            match key {
                "name" => {
                    expect_args(1)?;
                    name = args[0].to_string();
                }
                "side" => {
                    expect_args(1)?;
                    side = Some(num(0)?);
                }
                "max_bounces" => {
                    expect_args(1)?;
                    max_bounces = args[0]
                        .parse()
                        .map_err(|_| err(format!("'{}' is not a bounce count", args[0])))?;
                }
                "los" => {
                    expect_args(1)?;
                    los = match args[0] {
                        "true" | "on" | "1" => true,
                        "false" | "off" | "0" => false,
                        other => return Err(err(format!("'{other}' is not a boolean"))),
                    };
                }
                "reference_frequency" => {
                    expect_args(1)?;
                    reference_frequency = Some(num(0)?);
                }
                "ula" => {
                    expect_args(3)?;
                    let count = args[0]
                        .parse()
                        .map_err(|_| err(format!("'{}' is not an antenna count", args[0])))?;
                    ula = Some((count, Location::new(num(1)?, num(2)?)));
                }
                "antenna" => {
                    expect_args(2)?;
                    antennas.push(Location::new(num(0)?, num(1)?));
                }
                "wall" => {
                    expect_args(6)?;
                    let wall = Wall::new(
                        Location::new(num(0)?, num(1)?),
                        Location::new(num(2)?, num(3)?),
                        Complex64::from_polar(num(4)?, num(5)?),
                    )
                    .map_err(|e| err(e.to_string()))?;
                    walls.push(wall);
                }
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }

        let missing = |what: &str| Error::SceneParse {
            line: 0,
            message: format!("missing '{what}'"),
        };
        let side = side.ok_or_else(|| missing("side"))?;
        let f_r = reference_frequency.ok_or_else(|| missing("reference_frequency"))?;
        let lambda = SPEED_OF_LIGHT / f_r;
        let array = match (ula, antennas.is_empty()) {
            (Some((count, center)), true) => AntennaArray::ula(count, center, lambda)?,
            (None, false) => AntennaArray::new(antennas, lambda)?,
            (Some(_), false) => {
                return Err(Error::SceneParse {
                    line: 0,
                    message: "'ula' and 'antenna' are mutually exclusive".into(),
                })
            }
            (None, true) => return Err(missing("ula or antenna")),
        };
        Scene::new(name, array, walls, max_bounces, side, los)
    }

    /// Serialises the scene. Arrays are written element by element so any
    /// geometry round-trips.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let f_r = SPEED_OF_LIGHT / self.array.reference_wavelength();
        writeln!(out, "{SCENE_HEADER}").unwrap();
        writeln!(out, "name {}", self.name).unwrap();
        writeln!(out, "side {:e}", self.side).unwrap();
        writeln!(out, "max_bounces {}", self.max_bounces).unwrap();
        writeln!(out, "los {}", self.los_enabled).unwrap();
        writeln!(out, "reference_frequency {f_r:e}").unwrap();
        for a in self.array.elements() {
            writeln!(out, "antenna {:e} {:e}", a.x, a.y).unwrap();
        }
        for w in &self.walls {
            let (mag, phase) = w.reflection.to_polar();
            writeln!(
                out,
                "wall {:e} {:e} {:e} {:e} {:e} {:e}",
                w.start.x,
                w.start.y,
                w.end.x,
                w.end.y,
                mag,
                phase.rem_euclid(TAU)
            )
            .unwrap();
        }
        out
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or_default().trim()
}
