//! Byte-addressable memory models sharing one logical signature.
//!
//! Three interchangeable implementations — a brute-force oracle, the
//! uniform-cost paged model, and the flat-plus-list asymmetric model — plus
//! an *attached* construction that reaches the asymmetric backing through
//! the object registry: the attachable paged interface is defined under a
//! pending attachment, and the resolved binding decides which backing to
//! build. Resolution happens once, at construction; the instance returned is
//! the backing itself, with no per-operation indirection.

mod asymmetric;
mod oracle;
mod symmetric;

pub use asymmetric::{AsymmetricMemory, HIGH_ENTRY_OVERHEAD};
pub use oracle::OracleMemory;
pub use symmetric::SymmetricMemory;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ident::Ident;
use crate::registry::{
    AbstractObjectSpec, PrimitiveSig, Provenance, RegistryState, ResolvedBinding,
};

/// The shared logical signature: byte reads and writes over 64-bit
/// addresses, plus deterministic accounted footprint.
pub trait MemoryModel {
    /// Last value written at `addr`, or 0 if never written. Never mutates.
    fn read_byte(&self, addr: u64) -> Result<u8, MemoryError>;
    /// Make subsequent reads of `addr` return `value`.
    fn write_byte(&mut self, addr: u64, value: u8) -> Result<(), MemoryError>;
    /// Accounted backing size in bytes; a function of the write history
    /// alone, monotone nondecreasing.
    fn footprint(&self) -> u64;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MemoryError {
    #[error("address {addr:#x} is outside the {addr_bits}-bit address space")]
    AddressOutOfRange { addr: u64, addr_bits: u32 },
    #[error("invalid memory parameters: {0}")]
    InvalidParams(String),
}

/// Construction parameters for every model kind; each kind reads the fields
/// it cares about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryParams {
    /// Symmetric address-space width.
    pub addr_bits: u32,
    /// Symmetric page size exponent.
    pub page_bits: u32,
    /// Asymmetric flat-region length in bytes.
    pub flat_len: u64,
}

impl Default for MemoryParams {
    fn default() -> Self {
        Self { addr_bits: 32, page_bits: 12, flat_len: 1 << 24 }
    }
}

/// Which model to construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryKind {
    Oracle,
    Symmetric,
    Asymmetric,
    /// The asymmetric backing reached by attaching it to the paged
    /// interface through the registry.
    Attached,
}

impl MemoryKind {
    pub const ALL: [MemoryKind; 4] =
        [MemoryKind::Oracle, MemoryKind::Symmetric, MemoryKind::Asymmetric, MemoryKind::Attached];

    pub fn as_str(&self) -> &'static str {
        match self {
            MemoryKind::Oracle => "oracle",
            MemoryKind::Symmetric => "symmetric",
            MemoryKind::Asymmetric => "asymmetric",
            MemoryKind::Attached => "attached",
        }
    }
}

impl fmt::Display for MemoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MemoryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(MemoryKind::Oracle),
            "symmetric" => Ok(MemoryKind::Symmetric),
            "asymmetric" => Ok(MemoryKind::Asymmetric),
            "attached" => Ok(MemoryKind::Attached),
            other => Err(format!("unknown memory kind `{other}`")),
        }
    }
}

/// A constructed memory instance. There is deliberately no `Attached`
/// variant: attachment is resolved at construction, so an attached instance
/// *is* its backing and dispatches at the same depth.
pub enum Memory {
    Oracle(OracleMemory),
    Symmetric(SymmetricMemory),
    Asymmetric(AsymmetricMemory),
}

impl Memory {
    /// The concrete backing this instance dispatches to.
    pub fn backing_kind(&self) -> MemoryKind {
        match self {
            Memory::Oracle(_) => MemoryKind::Oracle,
            Memory::Symmetric(_) => MemoryKind::Symmetric,
            Memory::Asymmetric(_) => MemoryKind::Asymmetric,
        }
    }
}

impl MemoryModel for Memory {
    fn read_byte(&self, addr: u64) -> Result<u8, MemoryError> {
        match self {
            Memory::Oracle(m) => m.read_byte(addr),
            Memory::Symmetric(m) => m.read_byte(addr),
            Memory::Asymmetric(m) => m.read_byte(addr),
        }
    }

    fn write_byte(&mut self, addr: u64, value: u8) -> Result<(), MemoryError> {
        match self {
            Memory::Oracle(m) => m.write_byte(addr, value),
            Memory::Symmetric(m) => m.write_byte(addr, value),
            Memory::Asymmetric(m) => m.write_byte(addr, value),
        }
    }

    fn footprint(&self) -> u64 {
        match self {
            Memory::Oracle(m) => m.footprint(),
            Memory::Symmetric(m) => m.footprint(),
            Memory::Asymmetric(m) => m.footprint(),
        }
    }
}

// ---------------------------------------------------------------------------
// The registry scenario behind `attached`
// ---------------------------------------------------------------------------

const PAGED_NAME: &str = "mem";
const PAGED_FOUNDATION: &str = "mem$pages";
const FLAT_NAME: &str = "mem{asym}";
const FLAT_FOUNDATION: &str = "mem{asym}$flat";

fn ident(s: &str) -> Ident {
    Ident::new(s).expect("static ident")
}

fn prims(suffix: &str) -> Vec<PrimitiveSig> {
    let sig = |export: String, logic: &str, arity: u32| {
        let exec = format!("{export}$c");
        PrimitiveSig::new(ident(&export), ident(logic), ident(&exec), arity)
    };
    vec![
        sig(format!("read-byte{suffix}"), "read-byte$a", 1),
        sig(format!("write-byte{suffix}"), "write-byte$a", 2),
        sig(format!("footprint{suffix}"), "footprint$a", 0),
    ]
}

/// The attachable paged-memory interface spec.
pub fn paged_memory_spec() -> AbstractObjectSpec {
    AbstractObjectSpec::new(ident(PAGED_NAME), ident(PAGED_FOUNDATION), prims(""))
        .expect("static spec")
        .attachable(true)
}

/// The asymmetric implementation spec, compatible with
/// [`paged_memory_spec`] and introduced non-executable.
pub fn asymmetric_memory_spec() -> AbstractObjectSpec {
    AbstractObjectSpec::new(ident(FLAT_NAME), ident(FLAT_FOUNDATION), prims("{asym}"))
        .expect("static spec")
        .non_executable(true)
}

/// Run the attach scenario and return the attachable's binding: define the
/// implementation, record the pending attachment, then define the
/// attachable.
fn attached_binding() -> ResolvedBinding {
    let state = RegistryState::new()
        .define_object(asymmetric_memory_spec())
        .expect("implementation defines cleanly")
        .attach(ident(PAGED_NAME), ident(FLAT_NAME))
        .expect("attach precedes the attachable definition")
        .define_object(paged_memory_spec())
        .expect("logic signatures match");
    state.effective_binding(&ident(PAGED_NAME)).expect("just defined").clone()
}

/// Construct a memory instance of the requested kind.
///
/// `attached` goes through the registry: the binding resolved at definition
/// time selects the backing by its effective foundation, and the returned
/// instance is that backing directly.
pub fn make_memory(kind: MemoryKind, params: &MemoryParams) -> Result<Memory, MemoryError> {
    match kind {
        MemoryKind::Oracle => Ok(Memory::Oracle(OracleMemory::new())),
        MemoryKind::Symmetric => Ok(Memory::Symmetric(SymmetricMemory::new(
            params.addr_bits,
            params.page_bits,
        )?)),
        MemoryKind::Asymmetric => Ok(Memory::Asymmetric(AsymmetricMemory::new(params.flat_len)?)),
        MemoryKind::Attached => {
            let binding = attached_binding();
            assert!(matches!(binding.provenance(), Provenance::AttachedVia(_)));
            match binding.effective_foundation().as_str() {
                FLAT_FOUNDATION => {
                    Ok(Memory::Asymmetric(AsymmetricMemory::new(params.flat_len)?))
                }
                PAGED_FOUNDATION => Ok(Memory::Symmetric(SymmetricMemory::new(
                    params.addr_bits,
                    params.page_bits,
                )?)),
                other => unreachable!("no backing for foundation `{other}`"),
            }
        }
    }
}
