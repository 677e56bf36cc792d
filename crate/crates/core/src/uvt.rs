//! The UVT binary tensor container.
//!
//! Layout, all integers little-endian u32: magic `UVTD`, version (1), rank,
//! `rank` dimensions, dtype code (0 = f32, 1 = u8), then the row-major
//! payload. Trailing bytes are an error.

use std::path::Path;

use nalgebra::{Point2, Point3};

use crate::codec::{GridTensor, IuvImage, LocationMap};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"UVTD";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum UvtData {
    F32(Vec<f32>),
    U8(Vec<u8>),
}

impl UvtData {
    fn len(&self) -> usize {
        match self {
            UvtData::F32(v) => v.len(),
            UvtData::U8(v) => v.len(),
        }
    }

    fn code(&self) -> u32 {
        match self {
            UvtData::F32(_) => 0,
            UvtData::U8(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UvtTensor {
    dims: Vec<usize>,
    data: UvtData,
}

impl UvtTensor {
    pub fn new(dims: Vec<usize>, data: UvtData) -> Result<Self> {
        let n = element_count(&dims)?;
        if n != data.len() {
            return Err(Error::Container(format!(
                "dims {dims:?} need {n} values, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &UvtData {
        &self.data
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.dims.len() + 4 * self.data.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dims.len() as u32).to_le_bytes());
        for &d in &self.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.data.code().to_le_bytes());
        match &self.data {
            UvtData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            UvtData::U8(v) => out.extend_from_slice(v),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Container("bad magic, expected UVTD".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Container(format!("unsupported version {version}")));
        }
        let rank = r.u32()? as usize;
        if rank > 16 {
            return Err(Error::Container(format!("rank {rank} is implausibly large")));
        }
        let dims = (0..rank).map(|_| r.u32().map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
        let n = element_count(&dims)?;
        let data = match r.u32()? {
            0 => {
                let raw = r.take(n.checked_mul(4).ok_or_else(|| Error::Container("payload too large".into()))?)?;
                UvtData::F32(
                    raw.chunks_exact(4)
                        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                        .collect(),
                )
            }
            1 => UvtData::U8(r.take(n)?.to_vec()),
            code => return Err(Error::Container(format!("unknown dtype code {code}"))),
        };
        if r.pos != bytes.len() {
            return Err(Error::Container(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        Self::new(dims, data)
    }

    fn f32_data(&self) -> Result<&[f32]> {
        match &self.data {
            UvtData::F32(v) => Ok(v),
            UvtData::U8(_) => Err(Error::Container("expected float32 payload".into())),
        }
    }

    fn expect_rank3(&self, channels: Option<usize>, what: &str) -> Result<(usize, usize, usize)> {
        match self.dims[..] {
            [h, w, c] if channels.is_none_or(|k| k == c) => Ok((h, w, c)),
            _ => Err(Error::Container(format!(
                "{what} needs dims [H, W, {}], got {:?}",
                channels.map_or("C".to_string(), |c| c.to_string()),
                self.dims
            ))),
        }
    }
}

fn element_count(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| {
            if d > u32::MAX as usize {
                None
            } else {
                acc.checked_mul(d)
            }
        })
        .ok_or_else(|| Error::Container(format!("dims {dims:?} overflow")))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Container(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

pub fn write_uvt(path: impl AsRef<Path>, tensor: &UvtTensor) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, tensor.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_uvt(path: impl AsRef<Path>) -> Result<UvtTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    UvtTensor::from_bytes(&bytes).map_err(|e| match e {
        Error::Container(msg) => Error::Container(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// `[H, W, 4]`: x, y, z and the mask as 0/1.
impl From<&LocationMap> for UvtTensor {
    fn from(map: &LocationMap) -> Self {
        let data = map
            .values()
            .iter()
            .zip(map.mask())
            .flat_map(|(p, &m)| [p.x as f32, p.y as f32, p.z as f32, if m { 1.0 } else { 0.0 }])
            .collect();
        Self {
            dims: vec![map.height(), map.width(), 4],
            data: UvtData::F32(data),
        }
    }
}

impl TryFrom<&UvtTensor> for LocationMap {
    type Error = Error;

    fn try_from(t: &UvtTensor) -> Result<Self> {
        let (h, w, _) = t.expect_rank3(Some(4), "location map")?;
        let d = t.f32_data()?;
        let values = d.chunks_exact(4).map(|c| Point3::new(c[0] as f64, c[1] as f64, c[2] as f64)).collect();
        let mask = d.chunks_exact(4).map(|c| c[3] != 0.0).collect();
        LocationMap::new(h, w, values, mask)
    }
}

/// `[H, W, 3]`: foreground probability, u, v.
impl From<&IuvImage> for UvtTensor {
    fn from(iuv: &IuvImage) -> Self {
        let data = iuv
            .fore()
            .iter()
            .zip(iuv.uv())
            .flat_map(|(&f, p)| [f as f32, p.x as f32, p.y as f32])
            .collect();
        Self {
            dims: vec![iuv.height(), iuv.width(), 3],
            data: UvtData::F32(data),
        }
    }
}

impl TryFrom<&UvtTensor> for IuvImage {
    type Error = Error;

    fn try_from(t: &UvtTensor) -> Result<Self> {
        let (h, w, _) = t.expect_rank3(Some(3), "IUV image")?;
        let d = t.f32_data()?;
        let fore = d.chunks_exact(3).map(|c| c[0] as f64).collect();
        let uv = d.chunks_exact(3).map(|c| Point2::new(c[1] as f64, c[2] as f64)).collect();
        IuvImage::new(h, w, fore, uv)
    }
}

/// `[H, W, C]`.
impl From<&GridTensor> for UvtTensor {
    fn from(g: &GridTensor) -> Self {
        Self {
            dims: vec![g.height(), g.width(), g.channels()],
            data: UvtData::F32(g.data().iter().map(|&x| x as f32).collect()),
        }
    }
}

impl TryFrom<&UvtTensor> for GridTensor {
    type Error = Error;

    fn try_from(t: &UvtTensor) -> Result<Self> {
        let (h, w, c) = t.expect_rank3(None, "grid")?;
        let data = match t.data() {
            UvtData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            UvtData::U8(v) => v.iter().map(|&x| x as f64).collect(),
        };
        GridTensor::from_data(h, w, c, data)
    }
}

/// `[n, n]`.
impl From<&DistanceMatrix> for UvtTensor {
    fn from(d: &DistanceMatrix) -> Self {
        Self {
            dims: vec![d.n(), d.n()],
            data: UvtData::F32(d.values().iter().map(|&x| x as f32).collect()),
        }
    }
}
