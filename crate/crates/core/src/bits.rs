//! Dense binary matrices and their on-disk framing.

use std::fmt;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Magic prefix of every serialized block.
pub const BLOCK_MAGIC: &[u8; 8] = b"SRSCBLK1";
const HEADER_LEN: usize = 16;

/// Row-major binary matrix, one byte per bit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitBlock {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BitBlock {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    /// Wraps row-major bits; every byte must be 0 or 1.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|&b| b > 1) {
            return Err(Error::Format("bit values must be 0 or 1".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) as u8);
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        assert!(r < self.rows && c < self.cols, "({r},{c}) outside {}x{}", self.rows, self.cols);
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) outside {}x{}", self.rows, self.cols);
        self.data[r * self.cols + c] = bit & 1;
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) outside {}x{}", self.rows, self.cols);
        self.data[r * self.cols + c] ^= 1;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u8] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn weight(&self) -> usize {
        self.data.iter().map(|&b| b as usize).sum()
    }

    /// Number of positions where `self` and `other` differ.
    pub fn distance(&self, other: &BitBlock) -> usize {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).filter(|(a, b)| a != b).count()
    }

    pub fn transpose(&self) -> BitBlock {
        BitBlock::from_fn(self.cols, self.rows, |r, c| self.get(c, r) == 1)
    }

    /// Coordinates of the set bits in row-major order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        self.data.iter().enumerate().filter(|(_, &b)| b == 1).map(|(i, _)| (i / self.cols, i % self.cols)).collect()
    }

    pub fn xor_assign(&mut self, other: &BitBlock) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
    }

    /// Serializes as header + row-major bits packed LSB-first.
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let rows = u32::try_from(self.rows).map_err(|_| Error::Format("too many rows".into()))?;
        let cols = u32::try_from(self.cols).map_err(|_| Error::Format("too many columns".into()))?;
        let mut buf = Vec::with_capacity(HEADER_LEN + self.data.len().div_ceil(8));
        buf.extend_from_slice(BLOCK_MAGIC);
        buf.extend_from_slice(&rows.to_le_bytes());
        buf.extend_from_slice(&cols.to_le_bytes());
        for chunk in self.data.chunks(8) {
            let byte = chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << i));
            buf.push(byte);
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Reads one block; `Ok(None)` on a clean end of stream.
    pub fn read_from<R: Read>(input: &mut R) -> Result<Option<Self>> {
        let mut header = [0u8; HEADER_LEN];
        let mut filled = 0;
        while filled < HEADER_LEN {
            let got = input.read(&mut header[filled..])?;
            if got == 0 {
                break;
            }
            filled += got;
        }
        if filled == 0 {
            return Ok(None);
        }
        if filled < HEADER_LEN {
            return Err(Error::Format("truncated header".into()));
        }
        if &header[..8] != BLOCK_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let rows = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let bits = rows.checked_mul(cols).ok_or_else(|| Error::Format("block dimensions overflow".into()))?;
        let mut packed = vec![0u8; bits.div_ceil(8)];
        input
            .read_exact(&mut packed)
            .map_err(|_| Error::Format(format!("truncated payload for {rows}x{cols} block")))?;
        let data = (0..bits).map(|i| (packed[i / 8] >> (i % 8)) & 1).collect();
        Ok(Some(Self { rows, cols, data }))
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitBlock {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = self.row(r).iter().map(|&b| if b == 1 { '1' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

pub fn write_blocks<W: Write>(out: &mut W, blocks: &[BitBlock]) -> Result<()> {
    for b in blocks {
        b.write_to(out)?;
    }
    Ok(())
}

pub fn read_blocks<R: Read>(input: &mut R) -> Result<Vec<BitBlock>> {
    let mut blocks = Vec::new();
    while let Some(b) = BitBlock::read_from(input)? {
        blocks.push(b);
    }
    Ok(blocks)
}
