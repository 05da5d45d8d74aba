//! Brute-force reference memory: a plain map from address to byte.

use std::collections::BTreeMap;

use super::{MemoryError, MemoryModel};

/// Associative-map memory. Absent addresses read 0; footprint is 0 by
/// convention since the oracle is never benchmarked.
#[derive(Debug, Clone, Default)]
pub struct OracleMemory {
    store: BTreeMap<u64, u8>,
}

impl OracleMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn written_addresses(&self) -> usize {
        self.store.len()
    }
}

impl MemoryModel for OracleMemory {
    fn read_byte(&self, addr: u64) -> Result<u8, MemoryError> {
        Ok(self.store.get(&addr).copied().unwrap_or(0))
    }

    fn write_byte(&mut self, addr: u64, value: u8) -> Result<(), MemoryError> {
        self.store.insert(addr, value);
        Ok(())
    }

    fn footprint(&self) -> u64 {
        0
    }
}
