//! Grid import/export: a JSON header next to a flat binary payload.
//!
//! The payload stores voxel `k = i0 + d0·(i1 + d1·i2)` (axis 0 fastest) as
//! bit `k % 8` of byte `k / 8`, least significant bit first.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GridSet, DEFAULT_VOXEL_CAP};
use crate::error::{Error, Result};

pub const ENCODING: &str = "bits-lsb0";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridHeader {
    pub dims: Vec<usize>,
    pub spacing: f64,
    pub origin: Vec<f64>,
    pub encoding: String,
    /// Payload file name, relative to the header.
    pub data: String,
}

impl GridSet {
    /// Packs voxels in linear order, eight per byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let total = self.voxel_count() as usize;
        let mut out = vec![0u8; total.div_ceil(8)];
        let d0 = self.layout.dims[0];
        for r in 0..self.rows() {
            let row = self.row(r);
            for i in 0..d0 {
                if row[i / 64] >> (i % 64) & 1 == 1 {
                    let k = r * d0 + i;
                    out[k / 8] |= 1 << (k % 8);
                }
            }
        }
        out
    }

    pub fn from_bytes(header: &GridHeader, bytes: &[u8]) -> Result<Self> {
        if header.encoding != ENCODING {
            return Err(Error::Format(format!("unsupported encoding {:?}, expected {ENCODING:?}", header.encoding)));
        }
        let mut g = GridSet::empty(header.origin.clone(), header.spacing, &header.dims, DEFAULT_VOXEL_CAP)?;
        let total = g.voxel_count() as usize;
        if bytes.len() != total.div_ceil(8) {
            return Err(Error::Format(format!("payload has {} bytes, expected {}", bytes.len(), total.div_ceil(8))));
        }
        let d0 = header.dims[0];
        let wpr = g.layout.words_per_row;
        for k in 0..total {
            if bytes[k / 8] >> (k % 8) & 1 == 1 {
                let (r, i) = (k / d0, k % d0);
                g.bits[r * wpr + i / 64] |= 1 << (i % 64);
            }
        }
        Ok(g)
    }

    pub fn header(&self, data: &str) -> GridHeader {
        GridHeader {
            dims: self.layout.dims.clone(),
            spacing: self.h,
            origin: self.origin.clone(),
            encoding: ENCODING.into(),
            data: data.into(),
        }
    }

    /// Writes `<stem>.json` and `<stem>.bin`.
    pub fn save(&self, stem: &Path) -> Result<()> {
        let bin = stem.with_extension("bin");
        let name = bin.file_name().and_then(|n| n.to_str()).ok_or_else(|| Error::Format("grid path needs a file name".into()))?.to_string();
        fs::write(&bin, self.to_bytes())?;
        fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&self.header(&name))?)?;
        Ok(())
    }

    pub fn load(header_path: &Path) -> Result<Self> {
        let header: GridHeader = serde_json::from_str(&fs::read_to_string(header_path)?)?;
        let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
        let bytes = fs::read(dir.join(&header.data))?;
        Self::from_bytes(&header, &bytes)
    }
}
