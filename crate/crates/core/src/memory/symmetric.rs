//! Uniform-cost paged memory: a radix tree of lazily allocated pages.
//!
//! The address space is `2^addr_bits` bytes split into pages of
//! `2^page_bits`. The page index is consumed top-down in radix chunks of at
//! most 10 bits; when the index width is not a multiple of 10 the *top*
//! level takes the remainder, so the level plan for a given
//! `(addr_bits, page_bits)` is canonical. The root interior node is
//! allocated up front; everything below appears on first write.
//!
//! Footprint accounting, chosen to be reproducible bit-for-bit anywhere:
//! `allocated_pages * 2^page_bits` plus 8 bytes per child slot of every
//! allocated interior node (the root included).

use super::{MemoryError, MemoryModel};

/// Widest radix chunk per tree level.
const MAX_LEVEL_BITS: u32 = 10;

/// Bytes accounted per interior-node child slot.
const SLOT_BYTES: u64 = 8;

enum Node {
    Interior(Vec<Option<Box<Node>>>),
    Page(Box<[u8]>),
}

/// Radix-paged byte memory with deterministic footprint accounting.
pub struct SymmetricMemory {
    addr_bits: u32,
    page_bits: u32,
    /// Radix widths, top level first. Sums to `addr_bits - page_bits`.
    levels: Vec<u32>,
    root: Node,
    allocated_pages: u64,
    node_slot_bytes: u64,
}

/// Canonical level plan: remainder chunk on top, then 10-bit chunks.
fn level_plan(index_bits: u32) -> Vec<u32> {
    if index_bits == 0 {
        return vec![0];
    }
    let mut levels = Vec::new();
    let remainder = index_bits % MAX_LEVEL_BITS;
    if remainder != 0 {
        levels.push(remainder);
    }
    for _ in 0..index_bits / MAX_LEVEL_BITS {
        levels.push(MAX_LEVEL_BITS);
    }
    levels
}

impl SymmetricMemory {
    pub fn new(addr_bits: u32, page_bits: u32) -> Result<Self, MemoryError> {
        if !(16..=64).contains(&addr_bits) {
            return Err(MemoryError::InvalidParams(format!(
                "addr_bits must be in [16, 64], got {addr_bits}"
            )));
        }
        if page_bits == 0 || page_bits > addr_bits {
            return Err(MemoryError::InvalidParams(format!(
                "page_bits must be in [1, addr_bits={addr_bits}], got {page_bits}"
            )));
        }
        let levels = level_plan(addr_bits - page_bits);
        let root_slots = 1usize << levels[0];
        Ok(Self {
            addr_bits,
            page_bits,
            levels,
            root: Node::Interior(vec_of_none(root_slots)),
            allocated_pages: 0,
            node_slot_bytes: root_slots as u64 * SLOT_BYTES,
        })
    }

    pub fn addr_bits(&self) -> u32 {
        self.addr_bits
    }

    pub fn page_bits(&self) -> u32 {
        self.page_bits
    }

    pub fn allocated_pages(&self) -> u64 {
        self.allocated_pages
    }

    fn check_range(&self, addr: u64) -> Result<(), MemoryError> {
        if self.addr_bits < 64 && addr >= 1u64 << self.addr_bits {
            return Err(MemoryError::AddressOutOfRange { addr, addr_bits: self.addr_bits });
        }
        Ok(())
    }

    /// Radix index of `addr`'s page at each level, top first.
    fn path(&self, addr: u64) -> Vec<usize> {
        let page_index = addr >> self.page_bits;
        let mut below: u32 = self.levels.iter().sum();
        self.levels
            .iter()
            .map(|&width| {
                below -= width;
                ((page_index >> below) & ((1u64 << width) - 1)) as usize
            })
            .collect()
    }
}

fn vec_of_none(len: usize) -> Vec<Option<Box<Node>>> {
    let mut v = Vec::with_capacity(len);
    v.resize_with(len, || None);
    v
}

impl MemoryModel for SymmetricMemory {
    fn read_byte(&self, addr: u64) -> Result<u8, MemoryError> {
        self.check_range(addr)?;
        let offset = (addr & ((1u64 << self.page_bits) - 1)) as usize;
        let mut node = &self.root;
        for idx in self.path(addr) {
            let Node::Interior(slots) = node else { unreachable!("path longer than tree") };
            match &slots[idx] {
                Some(child) => node = child,
                None => return Ok(0),
            }
        }
        match node {
            Node::Page(bytes) => Ok(bytes[offset]),
            Node::Interior(_) => unreachable!("path shorter than tree"),
        }
    }

    fn write_byte(&mut self, addr: u64, value: u8) -> Result<(), MemoryError> {
        self.check_range(addr)?;
        let offset = (addr & ((1u64 << self.page_bits) - 1)) as usize;
        let path = self.path(addr);
        let depth = path.len();
        let page_len = 1usize << self.page_bits;

        let mut node = &mut self.root;
        for (level, idx) in path.into_iter().enumerate() {
            let last = level + 1 == depth;
            let Node::Interior(slots) = node else { unreachable!("path longer than tree") };
            let slot = &mut slots[idx];
            if slot.is_none() {
                if last {
                    *slot = Some(Box::new(Node::Page(vec![0u8; page_len].into_boxed_slice())));
                    self.allocated_pages += 1;
                } else {
                    let width = self.levels[level + 1];
                    let slots_below = 1usize << width;
                    *slot = Some(Box::new(Node::Interior(vec_of_none(slots_below))));
                    self.node_slot_bytes += slots_below as u64 * SLOT_BYTES;
                }
            }
            node = slot.as_mut().unwrap();
        }
        match node {
            Node::Page(bytes) => bytes[offset] = value,
            Node::Interior(_) => unreachable!("path shorter than tree"),
        }
        Ok(())
    }

    fn footprint(&self) -> u64 {
        (self.allocated_pages << self.page_bits) + self.node_slot_bytes
    }
}
