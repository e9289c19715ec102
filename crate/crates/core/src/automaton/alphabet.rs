use std::collections::BTreeSet;

use crate::formula::LetterSet;

/// Letters of one fresh block. Points carrying neither `ell` nor `r` get no
/// bits; the others get a tag, written in binary over `bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagLetters {
    pub ell: Option<u32>,
    pub r: Option<u32>,
    pub bits: Vec<u32>,
}

impl TagLetters {
    fn marks(&self, label: &LetterSet) -> bool {
        self.ell.is_some_and(|l| label.contains(l)) || self.r.is_some_and(|r| label.contains(r))
    }

    fn tag(&self, label: &LetterSet) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| label.contains(b))
            .map(|(i, _)| 1u64 << i.min(63))
            .sum()
    }

    fn capacity(&self) -> u64 {
        if self.bits.len() >= 63 {
            u64::MAX
        } else {
            1 << self.bits.len()
        }
    }

    fn write(&self, tag: u64, out: &mut LetterSet) {
        for (i, &b) in self.bits.iter().enumerate().take(64) {
            if tag >> i & 1 == 1 {
                out.insert(b);
            }
        }
    }
}

/// The letters tried from a search state.
///
/// Bit letters of a block are only compared for equality between the two
/// ends of an interval, so any accepted word stays accepted under a
/// renaming of tags. From a given state it is then enough to try the tags
/// already stored in it plus the least unused one.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    plain: Vec<u32>,
    blocks: Vec<TagLetters>,
}

impl Alphabet {
    pub fn new(plain: Vec<u32>, blocks: Vec<TagLetters>) -> Self {
        Alphabet { plain, blocks }
    }

    /// All subsets of `letters`, no tag blocks.
    pub fn plain(letters: &LetterSet) -> Self {
        Alphabet::new(letters.iter().collect(), Vec::new())
    }

    pub fn plain_letters(&self) -> &[u32] {
        &self.plain
    }

    pub fn blocks(&self) -> &[TagLetters] {
        &self.blocks
    }

    /// Sorted letters to try from a state whose stored labels are produced
    /// by `visit`.
    pub fn letters(&self, visit: impl FnOnce(&mut dyn FnMut(&LetterSet))) -> Vec<LetterSet> {
        let mut live: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); self.blocks.len()];
        if !self.blocks.is_empty() {
            visit(&mut |label| {
                for (blk, set) in self.blocks.iter().zip(live.iter_mut()) {
                    if blk.marks(label) {
                        set.insert(blk.tag(label));
                    }
                }
            });
        }
        let choices: Vec<Vec<u64>> = self
            .blocks
            .iter()
            .zip(&live)
            .map(|(blk, set)| {
                let mut c: Vec<u64> = set.iter().copied().collect();
                if let Some(fresh) = (0..blk.capacity()).find(|t| !set.contains(t)) {
                    c.push(fresh);
                }
                c
            })
            .collect();
        let mut out = Vec::new();
        for mask in 0..1u64 << self.plain.len() {
            let base: LetterSet = self
                .plain
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &l)| l)
                .collect();
            let mut partial = vec![base];
            for (blk, c) in self.blocks.iter().zip(&choices) {
                if !blk.marks(&partial[0]) {
                    continue;
                }
                partial = partial
                    .iter()
                    .flat_map(|p| {
                        c.iter().map(move |&t| {
                            let mut p = p.clone();
                            blk.write(t, &mut p);
                            p
                        })
                    })
                    .collect();
            }
            out.extend(partial);
        }
        out.sort();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u32]) -> LetterSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn plain_alphabet_is_powerset() {
        let a = Alphabet::plain(&set(&[0, 3]));
        let ls = a.letters(|_| {});
        assert_eq!(ls, vec![set(&[]), set(&[0]), set(&[0, 3]), set(&[3])]);
    }

    #[test]
    fn tags_live_plus_fresh() {
        // plain: ell=0, r=1; bits 2, 3
        let blk = TagLetters {
            ell: Some(0),
            r: Some(1),
            bits: vec![2, 3],
        };
        let a = Alphabet::new(vec![0, 1], vec![blk]);
        let fresh_only = a.letters(|_| {});
        // {} , {0}+tag0, {0,1}+tag0, {1}+tag0
        assert_eq!(fresh_only.len(), 4);
        let stored = set(&[0, 2]); // ell with tag 1
        let ls = a.letters(|f| f(&stored));
        // marked letters get tag 1 or fresh tag 0
        assert_eq!(ls.len(), 1 + 3 * 2);
        assert!(ls.contains(&set(&[1, 2])));
        assert!(ls.contains(&set(&[1])));
        assert!(!ls.contains(&set(&[1, 3])));
    }

    #[test]
    fn unmarked_labels_are_not_live() {
        let blk = TagLetters {
            ell: Some(0),
            r: None,
            bits: vec![1],
        };
        let a = Alphabet::new(vec![0], vec![blk]);
        let ls = a.letters(|f| f(&set(&[1])));
        assert_eq!(ls, vec![set(&[]), set(&[0])]);
    }
}
