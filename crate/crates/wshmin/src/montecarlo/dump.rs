//! Binary sample dump: a 64-byte header followed by the samples as
//! little-endian f64 in sample-index order. The header pins down
//! everything needed to reproduce the run, so two dumps are byte-identical
//! exactly when they describe the same sample set.
//!
//! Layout (all integers little-endian u64):
//!   0..8    magic "WSHMIN01"
//!   8..16   N (matrix columns)
//!   16..24  M (matrix rows)
//!   24..32  number of samples
//!   32..40  seed
//!   40..48  RNG scheme id
//!   48..64  zero padding

use std::io::Write;

use super::{McError, SamplerConfig};

pub const DUMP_MAGIC: &[u8; 8] = b"WSHMIN01";
/// Scheme 1 pins the whole map from (seed, sample index) to sample value:
/// ChaCha12 seeded from the u64 seed with the sample index as stream
/// number, ziggurat normals drawn in column-major entry order.
pub const RNG_ID_CHACHA12_STREAM_PER_SAMPLE: u64 = 1;
pub const DUMP_HEADER_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DumpHeader {
    pub n: u64,
    pub m: u64,
    pub n_samples: u64,
    pub seed: u64,
    pub rng_id: u64,
}

impl DumpHeader {
    pub fn for_config(cfg: &SamplerConfig) -> Self {
        DumpHeader {
            n: u64::from(cfg.n),
            m: u64::from(cfg.m),
            n_samples: cfg.n_samples,
            seed: cfg.seed,
            rng_id: RNG_ID_CHACHA12_STREAM_PER_SAMPLE,
        }
    }

    fn to_bytes(&self) -> [u8; DUMP_HEADER_LEN] {
        let mut bytes = [0u8; DUMP_HEADER_LEN];
        bytes[..8].copy_from_slice(DUMP_MAGIC);
        bytes[8..16].copy_from_slice(&self.n.to_le_bytes());
        bytes[16..24].copy_from_slice(&self.m.to_le_bytes());
        bytes[24..32].copy_from_slice(&self.n_samples.to_le_bytes());
        bytes[32..40].copy_from_slice(&self.seed.to_le_bytes());
        bytes[40..48].copy_from_slice(&self.rng_id.to_le_bytes());
        bytes
    }
}

pub fn write_dump<W: Write>(
    out: &mut W,
    header: &DumpHeader,
    samples: &[f64],
) -> Result<(), McError> {
    if header.n_samples != samples.len() as u64 {
        return Err(McError::Format(format!(
            "header promises {} samples but {} were provided",
            header.n_samples,
            samples.len()
        )));
    }
    let mut bytes = Vec::with_capacity(DUMP_HEADER_LEN + 8 * samples.len());
    bytes.extend_from_slice(&header.to_bytes());
    for &s in samples {
        bytes.extend_from_slice(&s.to_le_bytes());
    }
    out.write_all(&bytes)?;
    Ok(())
}

/// Decode a dump. Every field is validated before any allocation sized
/// from the input, so arbitrary bytes produce an error, never a panic or
/// an oversized buffer.
pub fn read_dump(bytes: &[u8]) -> Result<(DumpHeader, Vec<f64>), McError> {
    if bytes.len() < DUMP_HEADER_LEN {
        return Err(McError::Format(format!(
            "dump is {} bytes, shorter than the {DUMP_HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..8] != DUMP_MAGIC {
        return Err(McError::Format("bad magic; not a sample dump".into()));
    }
    let field = |offset: usize| {
        u64::from_le_bytes(bytes[offset..offset + 8].try_into().expect("8-byte slice"))
    };
    let header = DumpHeader {
        n: field(8),
        m: field(16),
        n_samples: field(24),
        seed: field(32),
        rng_id: field(40),
    };
    if bytes[48..DUMP_HEADER_LEN].iter().any(|&b| b != 0) {
        return Err(McError::Format("nonzero header padding".into()));
    }
    if header.rng_id != RNG_ID_CHACHA12_STREAM_PER_SAMPLE {
        return Err(McError::Format(format!("unknown RNG scheme id {}", header.rng_id)));
    }
    if header.n < 1 || header.m < header.n {
        return Err(McError::Format(format!(
            "invalid dimensions N = {}, M = {}",
            header.n, header.m
        )));
    }
    let payload = &bytes[DUMP_HEADER_LEN..];
    if payload.len() % 8 != 0 {
        return Err(McError::Format("payload is not a whole number of f64 values".into()));
    }
    if (payload.len() / 8) as u64 != header.n_samples {
        return Err(McError::Format(format!(
            "header promises {} samples but the payload holds {}",
            header.n_samples,
            payload.len() / 8
        )));
    }
    let samples = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((header, samples))
}
