//! Bit-packed sample storage and its file formats.
//!
//! Binary layout: the 8-byte magic `FLQSHOTS`, then shot count, detector
//! count and observable count as little-endian `u64`, then one row per shot
//! of `ceil((D + O) / 8)` bytes. Bits are LSB-first, detectors before
//! observables. The text form is one line per shot: detector bits, a space,
//! observable bits.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"FLQSHOTS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotBlock {
    shots: usize,
    num_detectors: usize,
    num_observables: usize,
    det_words: usize,
    obs_words: usize,
    detectors: Vec<u64>,
    observables: Vec<u64>,
}

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

impl ShotBlock {
    pub fn new(shots: usize, num_detectors: usize, num_observables: usize) -> Self {
        let (dw, ow) = (words(num_detectors), words(num_observables));
        ShotBlock {
            shots,
            num_detectors,
            num_observables,
            det_words: dw,
            obs_words: ow,
            detectors: vec![0; shots * dw],
            observables: vec![0; shots * ow],
        }
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn detector(&self, shot: usize, d: usize) -> bool {
        (self.detectors[shot * self.det_words + d / 64] >> (d % 64)) & 1 == 1
    }

    pub fn observable(&self, shot: usize, k: usize) -> bool {
        (self.observables[shot * self.obs_words + k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn set_detector(&mut self, shot: usize, d: usize, v: bool) {
        set_bit(&mut self.detectors[shot * self.det_words..], d, v);
    }

    pub fn set_observable(&mut self, shot: usize, k: usize, v: bool) {
        set_bit(&mut self.observables[shot * self.obs_words..], k, v);
    }

    pub fn detector_row(&self, shot: usize) -> &[u64] {
        &self.detectors[shot * self.det_words..(shot + 1) * self.det_words]
    }

    pub fn observable_row(&self, shot: usize) -> &[u64] {
        &self.observables[shot * self.obs_words..(shot + 1) * self.obs_words]
    }

    /// Indices of fired detectors.
    pub fn fired(&self, shot: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.detector_row(shot).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(w * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Observable flips of one shot as a mask (first 64 observables).
    pub fn observable_mask(&self, shot: usize) -> u64 {
        self.observable_row(shot).first().copied().unwrap_or(0)
    }

    /// Append the rows of `other`.
    pub fn extend(&mut self, other: &ShotBlock) -> Result<()> {
        if other.num_detectors != self.num_detectors
            || other.num_observables != self.num_observables
        {
            return Err(Error::InvalidArgument(
                "shot blocks have different shapes".into(),
            ));
        }
        self.shots += other.shots;
        self.detectors.extend_from_slice(&other.detectors);
        self.observables.extend_from_slice(&other.observables);
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        for v in [self.shots, self.num_detectors, self.num_observables] {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        let width = self.num_detectors + self.num_observables;
        let mut row = vec![0u8; width.div_ceil(8)];
        for s in 0..self.shots {
            row.iter_mut().for_each(|b| *b = 0);
            for i in 0..width {
                let bit = if i < self.num_detectors {
                    self.detector(s, i)
                } else {
                    self.observable(s, i - self.num_detectors)
                };
                if bit {
                    row[i / 8] |= 1 << (i % 8);
                }
            }
            w.write_all(&row)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::InvalidArgument("not a shot file".into()));
        }
        let mut header = [0usize; 3];
        for h in &mut header {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            *h = u64::from_le_bytes(b) as usize;
        }
        let [shots, nd, no] = header;
        let mut block = ShotBlock::new(shots, nd, no);
        let mut row = vec![0u8; (nd + no).div_ceil(8)];
        for s in 0..shots {
            r.read_exact(&mut row)?;
            for i in 0..nd + no {
                if (row[i / 8] >> (i % 8)) & 1 == 1 {
                    if i < nd {
                        block.set_detector(s, i, true);
                    } else {
                        block.set_observable(s, i - nd, true);
                    }
                }
            }
        }
        Ok(block)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::new();
        for s in 0..self.shots {
            line.clear();
            for d in 0..self.num_detectors {
                line.push(if self.detector(s, d) { '1' } else { '0' });
            }
            line.push(' ');
            for k in 0..self.num_observables {
                line.push(if self.observable(s, k) { '1' } else { '0' });
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (d, o) = line.split_once(' ').unwrap_or((line.as_str(), ""));
            let parse = |s: &str| -> Result<Vec<bool>> {
                s.trim()
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Parse {
                            line: i + 1,
                            message: format!("unexpected character {c:?}"),
                        }),
                    })
                    .collect()
            };
            rows.push((parse(d)?, parse(o)?, i + 1));
        }
        let (nd, no) = rows.first().map_or((0, 0), |r| (r.0.len(), r.1.len()));
        let mut block = ShotBlock::new(rows.len(), nd, no);
        for (s, (d, o, line)) in rows.into_iter().enumerate() {
            if d.len() != nd || o.len() != no {
                return Err(Error::Parse {
                    line,
                    message: "row width differs from the first row".into(),
                });
            }
            for (i, b) in d.into_iter().enumerate() {
                block.set_detector(s, i, b);
            }
            for (i, b) in o.into_iter().enumerate() {
                block.set_observable(s, i, b);
            }
        }
        Ok(block)
    }
}

fn set_bit(words: &mut [u64], i: usize, v: bool) {
    let m = 1u64 << (i % 64);
    if v {
        words[i / 64] |= m;
    } else {
        words[i / 64] &= !m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ShotBlock {
        let mut b = ShotBlock::new(3, 70, 2);
        b.set_detector(0, 3, true);
        b.set_detector(1, 69, true);
        b.set_detector(2, 64, true);
        b.set_observable(2, 1, true);
        b
    }

    #[test]
    fn binary_round_trip() {
        let b = sample();
        let mut buf = Vec::new();
        b.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 3 * 9);
        assert_eq!(ShotBlock::read_binary(&buf[..]).unwrap(), b);
    }

    #[test]
    fn text_round_trip() {
        let b = sample();
        let mut buf = Vec::new();
        b.write_text(&mut buf).unwrap();
        assert_eq!(ShotBlock::read_text(&buf[..]).unwrap(), b);
        assert_eq!(b.fired(1), vec![69]);
        assert_eq!(b.observable_mask(2), 2);
    }

    #[test]
    fn bad_text() {
        assert!(ShotBlock::read_text(&b"01x 0\n"[..]).is_err());
        assert!(ShotBlock::read_text(&b"01 0\n011 0\n"[..]).is_err());
    }
}
