//! Binary state dumps for golden-file comparisons.
//!
//! Layout: the magic `PQDS`, a little-endian `u32` format version, six
//! little-endian `u64` header fields `p, m, n, k, T, σ`, the `u64` amplitude
//! count, then one `(re, im)` pair of little-endian `f64` per basis index.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"PQDS";
pub const DUMP_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DumpHeader {
    pub p: u64,
    pub m: u64,
    pub n: u64,
    pub k: u64,
    pub t: u64,
    pub sigma: u64,
}

pub fn write_state_dump<W: Write>(mut out: W, header: &DumpHeader, amps: &[Complex64]) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&DUMP_FORMAT_VERSION.to_le_bytes())?;
    for v in [header.p, header.m, header.n, header.k, header.t, header.sigma, amps.len() as u64] {
        out.write_all(&v.to_le_bytes())?;
    }
    for a in amps {
        out.write_all(&a.re.to_le_bytes())?;
        out.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_state_dump<R: Read>(mut input: R) -> Result<(DumpHeader, Vec<Complex64>)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a state dump".into()));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != DUMP_FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported dump version {version}")));
    }
    let mut read_u64 = || -> Result<u64> {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    };
    let header = DumpHeader {
        p: read_u64()?,
        m: read_u64()?,
        n: read_u64()?,
        k: read_u64()?,
        t: read_u64()?,
        sigma: read_u64()?,
    };
    let count = read_u64()? as usize;
    let mut amps = Vec::with_capacity(count);
    for _ in 0..count {
        let re = f64::from_bits(read_u64()?);
        let im = f64::from_bits(read_u64()?);
        amps.push(Complex64::new(re, im));
    }
    Ok((header, amps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let header = DumpHeader { p: 2, m: 2, n: 1, k: 1, t: 2, sigma: 2 };
        let amps = vec![Complex64::new(0.5, -0.25), Complex64::new(1e-300, 3.0)];
        let mut buf = Vec::new();
        write_state_dump(&mut buf, &header, &amps).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 7 * 8 + 2 * 16);
        let (h, a) = read_state_dump(buf.as_slice()).unwrap();
        assert_eq!(h, header);
        assert_eq!(a, amps);
        assert!(read_state_dump(&b"XXXX"[..]).is_err());
    }
}
