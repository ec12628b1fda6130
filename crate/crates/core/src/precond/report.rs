use std::fmt::Write as _;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::schwarz::{restricted_block, WaveletPreconditioner};
use crate::decomposition::Kind;
use crate::linalg;
use crate::Result;

/// Singular values of one operator or band block, nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumBlock {
    pub id: String,
    pub values: Vec<f64>,
}

impl SpectrumBlock {
    /// `max / min` of the values (infinite if the smallest is zero).
    pub fn spread(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(&max), Some(&min)) if min > 0.0 => max / min,
            (Some(_), Some(_)) => f64::INFINITY,
            _ => 1.0,
        }
    }
}

/// Band boundary metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandMarker {
    pub id: String,
    pub kind: Option<Kind>,
    pub band: usize,
    pub rank: usize,
    pub weight: f64,
    pub window_low: Option<f64>,
    pub window_high: Option<f64>,
    pub block_norm: f64,
}

/// Spectra of the cured operator, each weighted band block
/// `w_j^2 U_j^T T U_j` and the preconditioned `Q T Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub blocks: Vec<SpectrumBlock>,
    pub markers: Vec<BandMarker>,
}

pub fn spectrum_report(t: &Mat<C64>, q: &WaveletPreconditioner) -> Result<SpectrumReport> {
    let mut blocks = vec![SpectrumBlock { id: "raw".into(), values: linalg::singular_values(t.as_ref())? }];
    let mut markers = Vec::new();
    for band in &q.bands {
        markers.push(BandMarker {
            id: band.id(),
            kind: band.kind,
            band: band.index,
            rank: band.projector.rank(),
            weight: band.weight,
            window_low: band.projector.window.map(|w| w.low),
            window_high: band.projector.window.and_then(|w| w.high),
            block_norm: band.norm.value,
        });
        if band.projector.rank() == 0 {
            continue;
        }
        let mut b = restricted_block(&band.projector, t);
        let w2 = band.weight * band.weight;
        for j in 0..b.ncols() {
            for i in 0..b.nrows() {
                b[(i, j)] *= w2;
            }
        }
        blocks.push(SpectrumBlock { id: band.id(), values: linalg::singular_values(b.as_ref())? });
    }
    let qtq = q.precondition(t);
    blocks.push(SpectrumBlock { id: "qtq".into(), values: linalg::singular_values(qtq.as_ref())? });
    Ok(SpectrumReport { blocks, markers })
}

impl SpectrumReport {
    pub fn block(&self, id: &str) -> Option<&SpectrumBlock> {
        self.blocks.iter().find(|b| b.id == id)
    }

    /// Blocks other than `raw` and `qtq`.
    pub fn band_blocks(&self) -> impl Iterator<Item = &SpectrumBlock> {
        self.blocks.iter().filter(|b| b.id != "raw" && b.id != "qtq")
    }

    /// `block_id,index,value` rows with shortest round-trip floats.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("block_id,index,value\n");
        for b in &self.blocks {
            for (i, v) in b.values.iter().enumerate() {
                let _ = writeln!(s, "{},{},{:e}", b.id, i, v);
            }
        }
        s
    }
}
