//! `.vlbm` snapshot files.
//!
//! Little-endian layout: magic `VLBM`, u32 version, u32 flags (bit 0 =
//! diverged), u32 nx, u32 ny, f64 time, u64 sample seed, f64 dx (44 bytes),
//! then four f64 planes `rho, rho v1, rho v2, E`, each row-major with x
//! fastest. The y extent is centred on zero and x starts at zero.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, IoContext, Result};
use crate::euler::ConservedState;
use crate::grid::{FieldSnapshot, Grid};

pub const MAGIC: [u8; 4] = *b"VLBM";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 44;
const FLAG_DIVERGED: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotHeader {
    pub diverged: bool,
    pub nx: usize,
    pub ny: usize,
    pub time: f64,
    pub sample_seed: u64,
    pub dx: f64,
}

impl SnapshotHeader {
    pub fn of(s: &FieldSnapshot) -> Self {
        Self { diverged: s.diverged, nx: s.grid.nx, ny: s.grid.ny, time: s.time, sample_seed: s.sample_seed, dx: s.grid.dx() }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::from_spacing(self.nx, self.ny, self.dx)
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Total file length implied by the header.
    pub fn file_len(&self) -> u64 {
        HEADER_LEN + 32 * self.cells() as u64
    }

    fn plane_offset(&self, component: usize) -> u64 {
        HEADER_LEN + 8 * (component * self.cells()) as u64
    }

    fn encode(&self) -> [u8; HEADER_LEN as usize] {
        let mut b = [0u8; HEADER_LEN as usize];
        b[0..4].copy_from_slice(&MAGIC);
        b[4..8].copy_from_slice(&VERSION.to_le_bytes());
        b[8..12].copy_from_slice(&(if self.diverged { FLAG_DIVERGED } else { 0 }).to_le_bytes());
        b[12..16].copy_from_slice(&(self.nx as u32).to_le_bytes());
        b[16..20].copy_from_slice(&(self.ny as u32).to_le_bytes());
        b[20..28].copy_from_slice(&self.time.to_le_bytes());
        b[28..36].copy_from_slice(&self.sample_seed.to_le_bytes());
        b[36..44].copy_from_slice(&self.dx.to_le_bytes());
        b
    }

    fn decode(b: &[u8; HEADER_LEN as usize]) -> std::result::Result<Self, String> {
        if b[0..4] != MAGIC {
            return Err(format!("bad magic {:?}", &b[0..4]));
        }
        let u32_at = |o: usize| u32::from_le_bytes(b[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(b[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let flags = u32_at(8);
        if flags & !FLAG_DIVERGED != 0 {
            return Err(format!("unknown flags {flags:#x}"));
        }
        let h = Self {
            diverged: flags & FLAG_DIVERGED != 0,
            nx: u32_at(12) as usize,
            ny: u32_at(16) as usize,
            time: f64::from_bits(u64_at(20)),
            sample_seed: u64_at(28),
            dx: f64::from_bits(u64_at(36)),
        };
        if h.nx == 0 || h.ny == 0 || !(h.dx > 0.0) {
            return Err(format!("invalid dimensions {}x{} dx {}", h.nx, h.ny, h.dx));
        }
        Ok(h)
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format { path: path.to_path_buf(), reason: reason.into() }
}

/// Serializes `s` into `w`.
pub fn encode<W: Write>(s: &FieldSnapshot, mut w: W) -> io::Result<()> {
    w.write_all(&SnapshotHeader::of(s).encode())?;
    for k in 0..4 {
        for u in &s.data {
            w.write_all(&u.component(k).to_le_bytes())?;
        }
    }
    w.flush()
}

/// Writes through a temporary sibling and renames it into place, so a
/// reader never sees a partial file.
pub fn write_snapshot(s: &FieldSnapshot, path: &Path) -> Result<()> {
    write_atomic(path, |w| encode(s, w))
}

pub(crate) fn write_atomic(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let tmp = tmp_sibling(path);
    let file = File::create(&tmp).io_context(|| format!("creating {}", tmp.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).io_context(|| format!("writing {}", tmp.display()))?;
    let file = w.into_inner().map_err(|e| e.into_error()).io_context(|| format!("writing {}", tmp.display()))?;
    file.sync_all().io_context(|| format!("syncing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).io_context(|| format!("renaming {} to {}", tmp.display(), path.display()))
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

fn open_checked(path: &Path) -> Result<(File, SnapshotHeader)> {
    let mut file = File::open(path).io_context(|| format!("opening {}", path.display()))?;
    let mut b = [0u8; HEADER_LEN as usize];
    file.read_exact(&mut b).map_err(|_| format_err(path, "truncated header"))?;
    let h = SnapshotHeader::decode(&b).map_err(|r| format_err(path, r))?;
    let len = file.metadata().io_context(|| format!("stat {}", path.display()))?.len();
    if len != h.file_len() {
        let reason = if len < h.file_len() { "truncated data" } else { "trailing bytes" };
        return Err(format_err(path, format!("{reason}: {len} bytes, header implies {}", h.file_len())));
    }
    Ok((file, h))
}

pub fn read_header(path: &Path) -> Result<SnapshotHeader> {
    open_checked(path).map(|(_, h)| h)
}

pub fn read_snapshot(path: &Path) -> Result<FieldSnapshot> {
    let (file, h) = open_checked(path)?;
    let grid = h.grid().map_err(|e| format_err(path, e.to_string()))?;
    let n = h.cells();
    let mut r = BufReader::new(file);
    let mut data = vec![ConservedState::ZERO; n];
    let mut buf = [0u8; 8];
    for k in 0..4 {
        for u in data.iter_mut() {
            r.read_exact(&mut buf).map_err(|_| format_err(path, "truncated data"))?;
            let v = f64::from_le_bytes(buf);
            match k {
                0 => u.rho = v,
                1 => u.mom_x = v,
                2 => u.mom_y = v,
                _ => u.energy = v,
            }
        }
    }
    Ok(FieldSnapshot { grid, time: h.time, sample_seed: h.sample_seed, diverged: h.diverged, data })
}

/// Sequential reader of one scalar plane.
#[derive(Debug)]
pub struct PlaneReader {
    header: SnapshotHeader,
    inner: BufReader<File>,
    remaining: usize,
}

impl PlaneReader {
    pub fn open(path: &Path, component: usize) -> Result<Self> {
        assert!(component < 4, "component index out of range");
        let (mut file, header) = open_checked(path)?;
        file.seek(SeekFrom::Start(header.plane_offset(component))).io_context(|| format!("seeking {}", path.display()))?;
        Ok(Self { header, inner: BufReader::with_capacity(1 << 16, file), remaining: header.cells() })
    }

    pub fn header(&self) -> &SnapshotHeader {
        &self.header
    }

    /// Fills `out` with the next `out.len()` values.
    pub fn read_into(&mut self, out: &mut [f64]) -> io::Result<()> {
        if out.len() > self.remaining {
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "read past end of plane"));
        }
        let mut buf = [0u8; 8];
        for v in out.iter_mut() {
            self.inner.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        self.remaining -= out.len();
        Ok(())
    }
}

impl Iterator for PlaneReader {
    type Item = io::Result<f64>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        let mut v = [0.0];
        Some(self.read_into(&mut v).map(|_| v[0]))
    }
}

/// Cells of a snapshot in storage order, read through one cursor per plane.
#[derive(Debug)]
pub struct SnapshotStream {
    planes: [PlaneReader; 4],
}

pub fn open_streaming(path: &Path) -> Result<SnapshotStream> {
    Ok(SnapshotStream {
        planes: [PlaneReader::open(path, 0)?, PlaneReader::open(path, 1)?, PlaneReader::open(path, 2)?, PlaneReader::open(path, 3)?],
    })
}

impl SnapshotStream {
    pub fn header(&self) -> &SnapshotHeader {
        self.planes[0].header()
    }
}

impl Iterator for SnapshotStream {
    type Item = io::Result<ConservedState>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut v = [0.0; 4];
        for (k, p) in self.planes.iter_mut().enumerate() {
            match p.next()? {
                Ok(x) => v[k] = x,
                Err(e) => return Some(Err(e)),
            }
        }
        Some(Ok(ConservedState::from_array(v)))
    }
}
