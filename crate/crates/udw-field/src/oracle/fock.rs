//! Truncated Fock bases and ladder-operator tables.
//!
//! A basis is the set of occupation tuples over the mode list, truncated
//! either per mode or by total occupation (the latter keeps many-mode bases
//! inside the dimension cap). Ladder operators are stored as index/amplitude
//! tables and materialized into dense matrices only on the small field
//! spaces where that is cheap.

use crate::{cr, C64};
use nalgebra::DMatrix;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FockTruncation {
    /// Occupation of every mode capped at `n_max`; dimension (n_max+1)^N.
    PerMode { n_max: usize },
    /// Total occupation over all modes capped; dimension C(N + n_tot, n_tot).
    TotalOccupation { n_tot: usize },
}

/// Enumerated occupation-number basis.
#[derive(Clone, Debug)]
pub struct FockBasis {
    pub occupations: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    pub truncation: FockTruncation,
    pub n_modes: usize,
}

impl FockBasis {
    pub fn new(n_modes: usize, truncation: FockTruncation) -> FockBasis {
        let mut occupations = Vec::new();
        let mut current = vec![0u8; n_modes];
        enumerate(&mut occupations, &mut current, 0, truncation);
        occupations.sort();
        let index = occupations
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        FockBasis { occupations, index, truncation, n_modes }
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn vacuum_index(&self) -> usize {
        *self.index.get(&vec![0u8; self.n_modes]).expect("vacuum always present")
    }

    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Annihilation table for mode `m`: entries `(src, dst, √n)` meaning
    /// `a|src⟩ = √n |dst⟩`.
    pub fn lowering(&self, m: usize) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (src, occ) in self.occupations.iter().enumerate() {
            let n = occ[m];
            if n == 0 {
                continue;
            }
            let mut lower = occ.clone();
            lower[m] = n - 1;
            if let Some(dst) = self.index_of(&lower) {
                out.push((src, dst, (n as f64).sqrt()));
            }
        }
        out
    }

    /// Dense annihilation matrix for mode `m`.
    pub fn lowering_matrix(&self, m: usize) -> DMatrix<C64> {
        let d = self.dim();
        let mut a = DMatrix::zeros(d, d);
        for (src, dst, amp) in self.lowering(m) {
            a[(dst, src)] = cr(amp);
        }
        a
    }

    /// Probability-weight of states whose occupation saturates the truncation
    /// boundary, as seen by a state vector; a cheap leakage indicator.
    pub fn boundary_weight(&self, v: &nalgebra::DVector<C64>) -> f64 {
        let mut acc = 0.0;
        for (i, occ) in self.occupations.iter().enumerate() {
            if self.on_boundary(occ) {
                acc += v[i].norm_sqr();
            }
        }
        acc
    }

    pub fn on_boundary(&self, occ: &[u8]) -> bool {
        match self.truncation {
            FockTruncation::PerMode { n_max } => occ.iter().any(|&n| n as usize == n_max),
            FockTruncation::TotalOccupation { n_tot } => {
                occ.iter().map(|&n| n as usize).sum::<usize>() == n_tot
            }
        }
    }
}

fn enumerate(
    out: &mut Vec<Vec<u8>>,
    current: &mut Vec<u8>,
    mode: usize,
    trunc: FockTruncation,
) {
    if mode == current.len() {
        out.push(current.clone());
        return;
    }
    let used: usize = current[..mode].iter().map(|&n| n as usize).sum();
    let cap = match trunc {
        FockTruncation::PerMode { n_max } => n_max,
        FockTruncation::TotalOccupation { n_tot } => n_tot - used,
    };
    for n in 0..=cap {
        current[mode] = n as u8;
        enumerate(out, current, mode + 1, trunc);
    }
    current[mode] = 0;
}
