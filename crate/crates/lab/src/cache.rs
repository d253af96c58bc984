//! Binary cache for Gram matrices and orbit grids.
//!
//! File layout (little endian): magic `GRTC`, `u32` version, `u32` key length,
//! key bytes, `u64` payload length, payload `f64`s. Files are named by the
//! SHA-256 of the key and written through a temp file plus atomic rename.

use std::fs;
use std::io::{Cursor, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use grauert_core::orbit::{orbit_grid_scaled, OrbitGrid};
use grauert_core::tube::gram;
use grauert_core::{GramMatrix, GramRoute, GroupSpec, IsotypicBasis, Weight, XtauGrid, C64};
use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::RunResult;

const MAGIC: &[u8; 4] = b"GRTC";
pub const VERSION: u32 = 1;

#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl Cache {
    /// A cache rooted at `dir`; `None` disables caching.
    pub fn new(dir: Option<PathBuf>) -> RunResult<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self { dir, ..Default::default() })
    }

    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    fn path(dir: &Path, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        dir.join(format!("{hex}.bin"))
    }

    fn decode(bytes: &[u8], key: &str) -> Option<Vec<f64>> {
        let mut r = Cursor::new(bytes);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).ok()?;
        if &magic != MAGIC || r.read_u32::<LittleEndian>().ok()? != VERSION {
            return None;
        }
        let klen = r.read_u32::<LittleEndian>().ok()? as usize;
        let mut kbytes = vec![0u8; klen];
        r.read_exact(&mut kbytes).ok()?;
        if kbytes != key.as_bytes() {
            return None;
        }
        let n = r.read_u64::<LittleEndian>().ok()? as usize;
        let mut out = vec![0.0; n];
        r.read_f64_into::<LittleEndian>(&mut out).ok()?;
        Some(out)
    }

    /// Payload stored under `key`, if present and readable.
    pub fn load(&self, key: &str) -> Option<Vec<f64>> {
        let dir = self.dir.as_ref()?;
        let bytes = fs::read(Self::path(dir, key)).ok()?;
        Self::decode(&bytes, key)
    }

    pub fn store(&self, key: &str, payload: &[f64]) -> RunResult<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let mut buf = Vec::with_capacity(24 + key.len() + 8 * payload.len());
        buf.write_all(MAGIC)?;
        buf.write_u32::<LittleEndian>(VERSION)?;
        buf.write_u32::<LittleEndian>(key.len() as u32)?;
        buf.write_all(key.as_bytes())?;
        buf.write_u64::<LittleEndian>(payload.len() as u64)?;
        for v in payload {
            buf.write_f64::<LittleEndian>(*v)?;
        }
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(&buf)?;
        tmp.as_file().sync_all()?;
        tmp.persist(Self::path(dir, key)).map_err(|e| e.error)?;
        Ok(())
    }

    fn get_or<F>(&self, key: &str, compute: F) -> RunResult<Vec<f64>>
    where
        F: FnOnce() -> RunResult<Vec<f64>>,
    {
        if let Some(v) = self.load(key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = compute()?;
        self.store(key, &v)?;
        Ok(v)
    }

    pub fn gram(&self, basis: &IsotypicBasis, grid: &XtauGrid, route: GramRoute) -> RunResult<GramMatrix> {
        let key = format!(
            "gram|v{VERSION}|{}|{:?}|k={}|tau={:016x}|res={:?}|{:?}",
            basis.spec.name,
            basis.lambda.lattice,
            basis.k,
            grid.tau.to_bits(),
            grid.resolution,
            route
        );
        let payload = self.get_or(&key, || {
            let g = gram(basis, grid, route)?;
            let mut v = vec![g.outer as f64, g.inner.nrows() as f64, g.log_scale];
            for z in g.inner.iter() {
                v.push(z.re);
                v.push(z.im);
            }
            Ok(v)
        })?;
        let (outer, n, log_scale) = (payload[0] as usize, payload[1] as usize, payload[2]);
        let inner = DMatrix::from_iterator(n, n, payload[3..].chunks(2).map(|c| C64::new(c[0], c[1])));
        Ok(GramMatrix { outer, inner, log_scale })
    }

    pub fn orbit_grid(&self, spec: &GroupSpec, lambda: &Weight, scale: f64, n: usize) -> RunResult<OrbitGrid> {
        let key = format!("orbit|v{VERSION}|{}|{:?}|scale={:016x}|n={n}", spec.name, lambda.lattice, scale.to_bits());
        let payload = self.get_or(&key, || {
            let g = orbit_grid_scaled(spec, lambda, scale, n)?;
            let mut v = vec![g.n_polar as f64, g.n_azimuth as f64, g.sym_volume];
            for (node, w) in g.nodes.iter().zip(&g.weights) {
                v.extend_from_slice(node);
                v.push(*w);
            }
            Ok(v)
        })?;
        let stride = spec.dim + 1;
        let body = &payload[3..];
        Ok(OrbitGrid {
            base_weight: lambda.clone(),
            scale,
            nodes: body.chunks(stride).map(|c| c[..spec.dim].to_vec()).collect(),
            weights: body.chunks(stride).map(|c| c[spec.dim]).collect(),
            sym_volume: payload[2],
            n_polar: payload[0] as usize,
            n_azimuth: payload[1] as usize,
        })
    }
}
