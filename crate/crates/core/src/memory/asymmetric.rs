//! Flat low region plus association-list high region.
//!
//! Addresses below `flat_len` hit an eagerly allocated zero-filled array in
//! O(1). Everything at or above `flat_len` lives in an association list,
//! newest record first, with no duplicate addresses: every high access scans
//! linearly, which makes distinct high writes deliberately quadratic in
//! aggregate. Footprint is `flat_len + 32 * high_entries`.

use super::{MemoryError, MemoryModel};

/// Accounted bytes per high-region record.
pub const HIGH_ENTRY_OVERHEAD: u64 = 32;

/// Eager flat array backed by a scanned high-address list.
pub struct AsymmetricMemory {
    flat: Vec<u8>,
    /// Newest first; addresses unique.
    high: Vec<(u64, u8)>,
}

impl AsymmetricMemory {
    pub fn new(flat_len: u64) -> Result<Self, MemoryError> {
        if flat_len == 0 || !flat_len.is_power_of_two() {
            return Err(MemoryError::InvalidParams(format!(
                "flat_len must be a positive power of two, got {flat_len}"
            )));
        }
        let len = usize::try_from(flat_len).map_err(|_| {
            MemoryError::InvalidParams(format!("flat_len {flat_len} exceeds this platform"))
        })?;
        Ok(Self { flat: vec![0u8; len], high: Vec::new() })
    }

    pub fn flat_len(&self) -> u64 {
        self.flat.len() as u64
    }

    pub fn high_entries(&self) -> u64 {
        self.high.len() as u64
    }
}

impl MemoryModel for AsymmetricMemory {
    fn read_byte(&self, addr: u64) -> Result<u8, MemoryError> {
        if addr < self.flat_len() {
            return Ok(self.flat[addr as usize]);
        }
        Ok(self
            .high
            .iter()
            .find(|(a, _)| *a == addr)
            .map(|(_, v)| *v)
            .unwrap_or(0))
    }

    fn write_byte(&mut self, addr: u64, value: u8) -> Result<(), MemoryError> {
        if addr < self.flat_len() {
            self.flat[addr as usize] = value;
            return Ok(());
        }
        match self.high.iter_mut().find(|(a, _)| *a == addr) {
            Some(record) => record.1 = value,
            None => self.high.insert(0, (addr, value)),
        }
        Ok(())
    }

    fn footprint(&self) -> u64 {
        self.flat_len() + HIGH_ENTRY_OVERHEAD * self.high_entries()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eager_flat_region_is_accounted_before_any_write() {
        let mem = AsymmetricMemory::new(1 << 24).unwrap();
        assert_eq!(mem.footprint(), 16_777_216);
    }

    #[test]
    fn low_writes_do_not_grow_the_footprint() {
        let mut mem = AsymmetricMemory::new(1 << 24).unwrap();
        mem.write_byte(0, 1).unwrap();
        mem.write_byte((1 << 24) - 1, 1).unwrap();
        assert_eq!(mem.footprint(), 1 << 24);
        assert_eq!(mem.read_byte(0).unwrap(), 1);
    }

    #[test]
    fn high_writes_cost_32_bytes_per_distinct_address() {
        let mut mem = AsymmetricMemory::new(1 << 24).unwrap();
        let high = (1 << 24) + 5;
        mem.write_byte(high, 9).unwrap();
        assert_eq!(mem.read_byte(high).unwrap(), 9);
        assert_eq!(mem.footprint(), (1 << 24) + 32);

        // Same address again: updated in place, no growth.
        mem.write_byte(high, 4).unwrap();
        assert_eq!(mem.high_entries(), 1);
        assert_eq!(mem.footprint(), (1 << 24) + 32);
        assert_eq!(mem.read_byte(high).unwrap(), 4);

        mem.write_byte(high + 1, 1).unwrap();
        assert_eq!(mem.footprint(), (1 << 24) + 64);
    }

    #[test]
    fn unwritten_high_addresses_read_zero() {
        let mem = AsymmetricMemory::new(1 << 20).unwrap();
        assert_eq!(mem.read_byte(u64::MAX).unwrap(), 0);
    }

    #[test]
    fn flat_len_must_be_a_power_of_two() {
        assert!(AsymmetricMemory::new(0).is_err());
        assert!(AsymmetricMemory::new(3).is_err());
        assert!(AsymmetricMemory::new(1 << 20).is_ok());
    }
}
