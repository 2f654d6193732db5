//! Fixed-width bitsets over a dense taxon index.

use std::collections::HashMap;

use super::Taxon;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub fn empty(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Complement within `0..len`.
    pub fn complement(&self, len: usize) -> Bits {
        let mut out = Bits {
            words: self.words.iter().map(|w| !w).collect(),
        };
        let tail = len % 64;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }
}

/// Sorted taxon list with reverse lookup.
#[derive(Clone, Debug)]
pub(crate) struct TaxonIndex {
    taxa: Vec<Taxon>,
    pos: HashMap<Taxon, usize>,
}

impl TaxonIndex {
    pub fn new<'a>(taxa: impl IntoIterator<Item = &'a Taxon>) -> Self {
        let mut taxa: Vec<Taxon> = taxa.into_iter().cloned().collect();
        taxa.sort();
        taxa.dedup();
        let pos = taxa.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        TaxonIndex { taxa, pos }
    }

    pub fn len(&self) -> usize {
        self.taxa.len()
    }

    pub fn get(&self, t: &Taxon) -> Option<usize> {
        self.pos.get(t).copied()
    }

    pub fn taxon(&self, i: usize) -> &Taxon {
        &self.taxa[i]
    }
}
