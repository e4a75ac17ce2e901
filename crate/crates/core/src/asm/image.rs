use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("address 0x{0:04X} is written twice")]
pub struct Collision(pub u16);

/// Sparse code image: address → byte. Entry point is always 0x0000.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ObjectImage {
    bytes: BTreeMap<u16, u8>,
}

impl ObjectImage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, addr: u16, byte: u8) -> Result<(), Collision> {
        if self.bytes.insert(addr, byte).is_some() {
            return Err(Collision(addr));
        }
        Ok(())
    }

    pub fn get(&self, addr: u16) -> Option<u8> {
        self.bytes.get(&addr).copied()
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u16, u8)> + '_ {
        self.bytes.iter().map(|(&a, &b)| (a, b))
    }

    /// One past the highest occupied address (0 for an empty image).
    pub fn end(&self) -> u32 {
        self.bytes.keys().next_back().map_or(0, |&a| a as u32 + 1)
    }

    /// Maximal runs of consecutive addresses, in ascending order.
    pub fn runs(&self) -> Vec<(u16, Vec<u8>)> {
        let mut runs: Vec<(u16, Vec<u8>)> = Vec::new();
        for (addr, byte) in self.iter() {
            match runs.last_mut() {
                Some((start, data)) if *start as u32 + data.len() as u32 == addr as u32 => {
                    data.push(byte)
                }
                _ => runs.push((addr, vec![byte])),
            }
        }
        runs
    }
}

impl FromIterator<(u16, u8)> for ObjectImage {
    /// Later duplicates overwrite earlier ones.
    fn from_iter<I: IntoIterator<Item = (u16, u8)>>(iter: I) -> Self {
        ObjectImage {
            bytes: iter.into_iter().collect(),
        }
    }
}
