use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use super::Letter;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("invalid letter name {0:?}")]
    InvalidName(String),
    #[error("duplicate letter {0:?}")]
    Duplicate(String),
    #[error("unknown letter {0:?}")]
    Unknown(String),
}

pub(crate) fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '#')
}

/// An ordered set of letter names. Index `i` refers to `letters()[i]`.
#[derive(Clone, Default)]
pub struct Signature {
    letters: Vec<Letter>,
    index: HashMap<Letter, u32>,
}

impl Signature {
    pub fn new<I, S>(names: I) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut sig = Signature::default();
        for n in names {
            sig.push(n.as_ref())?;
        }
        Ok(sig)
    }

    pub fn push(&mut self, name: &str) -> Result<u32, SignatureError> {
        if !valid_identifier(name) {
            return Err(SignatureError::InvalidName(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        let id = self.letters.len() as u32;
        let l: Letter = Arc::from(name);
        self.letters.push(l.clone());
        self.index.insert(l, id);
        Ok(id)
    }

    /// Adds the letter unless it is already present.
    pub fn ensure(&mut self, name: &str) -> Result<u32, SignatureError> {
        match self.index.get(name) {
            Some(&i) => Ok(i),
            None => self.push(name),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<u32, SignatureError> {
        self.get(name)
            .ok_or_else(|| SignatureError::Unknown(name.to_string()))
    }

    pub fn name(&self, i: u32) -> &str {
        &self.letters[i as usize]
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Letter set from names; unknown names are an error.
    pub fn set<I, S>(&self, names: I) -> Result<LetterSet, SignatureError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        names
            .into_iter()
            .map(|n| self.lookup(n.as_ref()))
            .collect::<Result<LetterSet, _>>()
    }

    pub fn names(&self, set: &LetterSet) -> Vec<String> {
        set.iter().map(|i| self.name(i).to_string()).collect()
    }

    pub fn full(&self) -> LetterSet {
        (0..self.len() as u32).collect()
    }
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl Eq for Signature {}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.letters.iter()).finish()
    }
}

impl Serialize for Signature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.letters
            .iter()
            .map(|l| l.as_ref())
            .collect::<Vec<&str>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let names = Vec::<String>::deserialize(d)?;
        Signature::new(names).map_err(serde::de::Error::custom)
    }
}

/// A set of letter indices, stored sorted. Labels are sparse, so this stays
/// small even over signatures with hundreds of letters.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LetterSet(SmallVec<[u32; 6]>);

impl LetterSet {
    pub fn new() -> Self {
        LetterSet(SmallVec::new())
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn insert(&mut self, i: u32) -> bool {
        match self.0.binary_search(&i) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, i);
                true
            }
        }
    }

    pub fn remove(&mut self, i: u32) -> bool {
        match self.0.binary_search(&i) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn intersection(&self, other: &LetterSet) -> LetterSet {
        let (mut i, mut j) = (0, 0);
        let mut out = SmallVec::new();
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        LetterSet(out)
    }

    pub fn union(&self, other: &LetterSet) -> LetterSet {
        let mut out = self.clone();
        for x in other.iter() {
            out.insert(x);
        }
        out
    }

    pub fn is_subset(&self, other: &LetterSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    /// All subsets of `self`, in increasing order of their bitmask.
    pub fn subsets(&self) -> Vec<LetterSet> {
        assert!(self.len() < 31, "too many letters to enumerate subsets");
        let n = self.len();
        (0u32..1 << n)
            .map(|mask| {
                (0..n)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| self.0[b])
                    .collect()
            })
            .collect()
    }
}

impl FromIterator<u32> for LetterSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut v: SmallVec<[u32; 6]> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        LetterSet(v)
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}
