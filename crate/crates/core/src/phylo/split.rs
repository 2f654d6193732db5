use std::collections::BTreeSet;
use std::fmt;

use super::bits::{Bits, TaxonIndex};
use super::Taxon;
use crate::error::{Error, Result};

/// A bipartition of a tree's taxa induced by one edge. `side_a` holds the
/// smallest taxon.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Split {
    side_a: BTreeSet<Taxon>,
    side_b: BTreeSet<Taxon>,
}

impl Split {
    pub fn new(a: BTreeSet<Taxon>, b: BTreeSet<Taxon>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Contract("split sides must be nonempty".into()));
        }
        if !a.is_disjoint(&b) {
            return Err(Error::Contract("split sides must be disjoint".into()));
        }
        Ok(if a.first() < b.first() {
            Split { side_a: a, side_b: b }
        } else {
            Split { side_a: b, side_b: a }
        })
    }

    pub(crate) fn from_bits(bits: &Bits, index: &TaxonIndex) -> Self {
        let mut a = BTreeSet::new();
        let mut b = BTreeSet::new();
        for i in 0..index.len() {
            let t = index.taxon(i).clone();
            if bits.get(i) {
                a.insert(t);
            } else {
                b.insert(t);
            }
        }
        Split { side_a: a, side_b: b }
    }

    pub fn side_a(&self) -> &BTreeSet<Taxon> {
        &self.side_a
    }

    pub fn side_b(&self) -> &BTreeSet<Taxon> {
        &self.side_b
    }

    /// One side is a single taxon.
    pub fn is_trivial(&self) -> bool {
        self.side_a.len() < 2 || self.side_b.len() < 2
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &BTreeSet<Taxon>| s.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b))
    }
}

/// An unrooted four-taxon topology `ab|cd`, stored with each pair sorted and
/// the pair holding the smallest taxon first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quartet {
    pair_1: (Taxon, Taxon),
    pair_2: (Taxon, Taxon),
}

impl Quartet {
    /// The quartet `ab|cd`.
    pub fn new(a: Taxon, b: Taxon, c: Taxon, d: Taxon) -> Result<Self> {
        let distinct: BTreeSet<&Taxon> = [&a, &b, &c, &d].into_iter().collect();
        if distinct.len() != 4 {
            return Err(Error::Contract(format!("quartet needs four distinct taxa: {a} {b} {c} {d}")));
        }
        let p1 = if a < b { (a, b) } else { (b, a) };
        let p2 = if c < d { (c, d) } else { (d, c) };
        Ok(if p1 < p2 {
            Quartet { pair_1: p1, pair_2: p2 }
        } else {
            Quartet { pair_1: p2, pair_2: p1 }
        })
    }

    /// Parses single-character shorthand such as `ab|cd`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Contract(format!("bad quartet shorthand `{s}`"));
        let (l, r) = s.split_once('|').ok_or_else(bad)?;
        let l: Vec<char> = l.chars().collect();
        let r: Vec<char> = r.chars().collect();
        if l.len() != 2 || r.len() != 2 {
            return Err(bad());
        }
        let t = |c: char| Taxon::new(&c.to_string());
        Quartet::new(t(l[0])?, t(l[1])?, t(r[0])?, t(r[1])?)
    }

    pub fn pairs(&self) -> (&(Taxon, Taxon), &(Taxon, Taxon)) {
        (&self.pair_1, &self.pair_2)
    }

    pub fn taxa(&self) -> BTreeSet<Taxon> {
        [&self.pair_1.0, &self.pair_1.1, &self.pair_2.0, &self.pair_2.1]
            .into_iter()
            .cloned()
            .collect()
    }
}

impl fmt::Display for Quartet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}|{}{}",
            self.pair_1.0, self.pair_1.1, self.pair_2.0, self.pair_2.1
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phylo::taxa;

    #[test]
    fn quartet_canonical_form() {
        let q1 = Quartet::parse("dc|ba").unwrap();
        let q2 = Quartet::parse("ab|cd").unwrap();
        assert_eq!(q1, q2);
        assert_eq!(q1.to_string(), "ab|cd");
        assert!(Quartet::parse("aa|cd").is_err());
    }

    #[test]
    fn split_orientation() {
        let s = Split::new(taxa(["c", "d"]), taxa(["a", "b"])).unwrap();
        assert_eq!(s.side_a(), &taxa(["a", "b"]));
        assert_eq!(s.to_string(), "a,b|c,d");
        assert!(Split::new(taxa(["a"]), taxa(["a", "b"])).is_err());
    }
}
