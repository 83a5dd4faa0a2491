//! Train/test location sampling, channel generation and the `WVFD1` binary
//! dataset format.
//!
//! Byte layout (all integers and floats little-endian):
//!
//! ```text
//! magic        5 bytes   "WVFD1"
//! na           u32
//! ns           u32
//! f_r          f64       Hz
//! bandwidth    f64       Hz
//! side         f64       m
//! seed         u64
//! split        u8        0 = train, 1 = test
//! count        u64
//! scene_len    u32
//! scene_id     scene_len bytes of UTF-8
//! records      count x (x f64, y f64, na*ns x (re f64, im f64))
//! ```
//!
//! Channel entries are stored antenna-major (`j * ns + k`).

use std::fs;
use std::io::Write;
use std::path::Path as FsPath;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::geometry::{FrequencyGrid, Location};
use crate::scene::Scene;

pub const MAGIC: &[u8; 5] = b"WVFD1";

/// Header bytes excluding the scene identifier.
pub const FIXED_HEADER_BYTES: u64 = 5 + 4 + 4 + 8 + 8 + 8 + 8 + 1 + 8 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    fn tag(self) -> u8 {
        match self {
            Split::Train => 0,
            Split::Test => 1,
        }
    }

    fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Split::Train),
            1 => Ok(Split::Test),
            other => Err(Error::InvalidArgument(format!("unknown split tag {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetHeader {
    pub antennas: u32,
    pub frequencies: u32,
    pub reference_frequency: f64,
    pub bandwidth: f64,
    pub scene_id: String,
    pub side: f64,
    pub seed: u64,
    pub split: Split,
    pub count: u64,
}

impl DatasetHeader {
    pub fn byte_len(&self) -> u64 {
        FIXED_HEADER_BYTES + self.scene_id.len() as u64
    }

    pub fn record_bytes(&self) -> u64 {
        record_bytes(self.antennas as usize, self.frequencies as usize)
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::uniform(self.reference_frequency, self.bandwidth, self.frequencies as usize)
    }
}

/// Bytes per record: two coordinates plus `2 * na * ns` floats.
pub fn record_bytes(na: usize, ns: usize) -> u64 {
    16 + 16 * (na * ns) as u64
}

/// Total file size of a dataset.
pub fn file_size(na: usize, ns: usize, count: u64, scene_id_len: usize) -> u64 {
    FIXED_HEADER_BYTES + scene_id_len as u64 + count * record_bytes(na, ns)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub records: Vec<ChannelMatrix>,
}

impl Dataset {
    /// Builds a dataset, filling `header.count` and checking record shapes.
    pub fn new(mut header: DatasetHeader, records: Vec<ChannelMatrix>) -> Result<Self> {
        let expected = (header.antennas * header.frequencies) as usize;
        for r in &records {
            if r.antennas() != header.antennas as usize || r.frequencies() != header.frequencies as usize {
                return Err(Error::DimensionMismatch {
                    expected,
                    got: r.antennas() * r.frequencies(),
                });
            }
        }
        header.count = records.len() as u64;
        Ok(Self { header, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn locations(&self) -> Vec<Location> {
        self.records.iter().map(|r| r.location).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity((h.byte_len() + h.count * h.record_bytes()) as usize);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&h.antennas.to_le_bytes());
        out.extend_from_slice(&h.frequencies.to_le_bytes());
        out.extend_from_slice(&h.reference_frequency.to_le_bytes());
        out.extend_from_slice(&h.bandwidth.to_le_bytes());
        out.extend_from_slice(&h.side.to_le_bytes());
        out.extend_from_slice(&h.seed.to_le_bytes());
        out.push(h.split.tag());
        out.extend_from_slice(&(self.records.len() as u64).to_le_bytes());
        out.extend_from_slice(&(h.scene_id.len() as u32).to_le_bytes());
        out.extend_from_slice(h.scene_id.as_bytes());
        for r in &self.records {
            out.extend_from_slice(&r.location.x.to_le_bytes());
            out.extend_from_slice(&r.location.y.to_le_bytes());
            for z in r.entries() {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic = cur.take(5, "magic")?;
        if magic != MAGIC {
            return Err(Error::BadMagic { found: magic.to_vec() });
        }
        let antennas = cur.u32("antenna count")?;
        let frequencies = cur.u32("frequency count")?;
        let reference_frequency = cur.f64("reference frequency")?;
        let bandwidth = cur.f64("bandwidth")?;
        let side = cur.f64("side")?;
        let seed = cur.u64("seed")?;
        let split = Split::from_tag(cur.take(1, "split")?[0])?;
        let count = cur.u64("record count")?;
        let scene_len = cur.u32("scene id length")? as usize;
        let scene_id = String::from_utf8(cur.take(scene_len, "scene id")?.to_vec())
            .map_err(|e| Error::InvalidArgument(format!("scene id is not UTF-8: {e}")))?;
        let header = DatasetHeader {
            antennas,
            frequencies,
            reference_frequency,
            bandwidth,
            scene_id,
            side,
            seed,
            split,
            count,
        };

        let per_record = header.record_bytes();
        let payload = (bytes.len() - cur.pos) as u64;
        let whole = payload / per_record;
        if !payload.is_multiple_of(per_record) {
            if whole < count {
                return Err(Error::Truncated(format!(
                    "payload of {payload} bytes is not a whole number of {per_record}-byte records"
                )));
            }
            return Err(Error::RecordCountMismatch {
                declared: count,
                actual: whole,
            });
        }
        if whole != count {
            return Err(Error::RecordCountMismatch {
                declared: count,
                actual: whole,
            });
        }

        let (na, ns) = (antennas as usize, frequencies as usize);
        let mut records = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let location = Location::new(cur.f64("x")?, cur.f64("y")?);
            let mut entries = Vec::with_capacity(na * ns);
            for _ in 0..na * ns {
                entries.push(Complex64::new(cur.f64("re")?, cur.f64("im")?));
            }
            records.push(ChannelMatrix::from_entries(na, ns, entries, location)?);
        }
        Ok(Self { header, records })
    }

    /// Writes through a temporary sibling file and an atomic rename.
    pub fn write(&self, path: impl AsRef<FsPath>) -> Result<()> {
        let path = path.as_ref();
        let tmp = path.with_extension("wvfd.tmp");
        let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(&self.to_bytes()).map_err(|e| Error::io(&tmp, e))?;
        file.sync_all().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Fails on the first record whose channel has zero Frobenius norm.
    pub fn check_nonzero(&self) -> Result<()> {
        match self.records.iter().position(|r| r.frobenius_norm_sq() == 0.0) {
            Some(index) => Err(Error::ZeroNormChannel { index }),
            None => Ok(()),
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Truncated(format!("unexpected end of file while reading {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Uniform location sampler over `[-side/2, side/2]^2`.
pub struct LocationSampler {
    rng: ChaCha8Rng,
    half: f64,
}

impl LocationSampler {
    pub fn new(side: f64, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            half: side / 2.0,
        }
    }

    pub fn sample(&mut self) -> Location {
        let x = self.rng.gen_range(-self.half..=self.half);
        let y = self.rng.gen_range(-self.half..=self.half);
        Location::new(x, y)
    }
}

/// Number of training locations for a square of side `side` at `density`
/// locations per square meter.
pub fn train_count(side: f64, density: f64) -> usize {
    (side * side * density).round() as usize
}

/// `round(side^2 * density)` i.i.d. uniform locations.
pub fn sample_train_locations(side: f64, density: f64, seed: u64) -> Result<Vec<Location>> {
    if !(density > 0.0) || !(side > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "side and density must be positive, got {side} and {density}"
        )));
    }
    let n = train_count(side, density);
    if n == 0 {
        return Err(Error::InvalidArgument(format!(
            "side {side} at density {density} yields no training location"
        )));
    }
    let mut sampler = LocationSampler::new(side, seed);
    Ok((0..n).map(|_| sampler.sample()).collect())
}

/// Grid points per axis: `floor(side / spacing) + 1`.
pub fn grid_axis_count(side: f64, spacing: f64) -> usize {
    // Guard against 1.0 / 0.5 evaluating to 1.9999999999999998.
    (side / spacing * (1.0 + 1e-12)).floor() as usize + 1
}

/// Axis-aligned grid from `-side/2` with step `spacing`, row-major with `y`
/// as the slow index.
pub fn build_test_grid(side: f64, spacing: f64) -> Result<Vec<Location>> {
    if !(spacing > 0.0) || !(side >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid grid side {side} / spacing {spacing}")));
    }
    let n = grid_axis_count(side, spacing);
    let start = -side / 2.0;
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            out.push(Location::new(start + ix as f64 * spacing, start + iy as f64 * spacing));
        }
    }
    Ok(out)
}

/// Ground-truth channel at `x`, or `None` when the location must be rejected
/// (on a wall, on a source, or without any path).
pub fn channel_or_reject(scene: &Scene, x: Location, grid: &FrequencyGrid) -> Result<Option<ChannelMatrix>> {
    match scene.channel_at(x, grid) {
        Ok(h) if h.frobenius_norm_sq() > 0.0 && h.is_finite() => Ok(Some(h)),
        Ok(_) => Ok(None),
        Err(Error::LocationOnWall { .. } | Error::CoincidentSource { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn header_for(scene: &Scene, grid: &FrequencyGrid, seed: u64, split: Split) -> DatasetHeader {
    DatasetHeader {
        antennas: scene.array.len() as u32,
        frequencies: grid.len() as u32,
        reference_frequency: grid.reference(),
        bandwidth: grid.bandwidth(),
        scene_id: scene.name.clone(),
        side: scene.side,
        seed,
        split,
        count: 0,
    }
}

/// Training set of `round(side^2 * density)` locations. Rejected locations
/// are replaced by further draws from the same seeded stream.
pub fn generate_train_set(scene: &Scene, grid: &FrequencyGrid, density: f64, seed: u64) -> Result<Dataset> {
    let initial = sample_train_locations(scene.side, density, seed)?;
    let mut sampler = LocationSampler::new(scene.side, seed);
    for _ in 0..initial.len() {
        sampler.sample();
    }
    let mut records = Vec::with_capacity(initial.len());
    let max_redraws = 100 * initial.len() + 1000;
    let mut redraws = 0;
    for x in initial {
        let mut candidate = x;
        loop {
            if let Some(h) = channel_or_reject(scene, candidate, grid)? {
                records.push(h);
                break;
            }
            redraws += 1;
            if redraws > max_redraws {
                return Err(Error::InvalidGeometry(format!(
                    "scene {} rejects nearly every location",
                    scene.name
                )));
            }
            candidate = sampler.sample();
        }
    }
    Dataset::new(header_for(scene, grid, seed, Split::Train), records)
}

/// Test set on the `spacing` grid; rejected grid points are dropped.
pub fn generate_test_set(scene: &Scene, grid: &FrequencyGrid, spacing: f64) -> Result<Dataset> {
    let mut records = Vec::new();
    for x in build_test_grid(scene.side, spacing)? {
        if let Some(h) = channel_or_reject(scene, x, grid)? {
            records.push(h);
        }
    }
    Dataset::new(header_for(scene, grid, 0, Split::Test), records)
}
