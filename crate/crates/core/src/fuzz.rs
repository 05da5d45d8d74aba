//! Oracle-equivalence harness: replay random operation sequences through
//! every model and compare each read against the brute-force oracle.
//!
//! Work is split into cases, each driven by its own derived seed, so a
//! divergence comes with a small standalone reproduction: rerun with
//! `ops = case_ops` and the reported case seed.

use crate::bench::SplitMix64;
use crate::memory::{
    make_memory, MemoryError, MemoryKind, MemoryModel, MemoryParams, OracleMemory,
};

/// One generated operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzOp {
    Read { addr: u64 },
    Write { addr: u64, value: u8 },
}

/// Harness parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzParams {
    /// Total operations across all cases.
    pub ops: u64,
    pub seed: u64,
    /// Operations per case; each case gets fresh instances.
    pub case_ops: u64,
    /// Addresses are drawn from `[0, addr_space)`; must be a power of two
    /// within every model's reach.
    pub addr_space: u64,
    pub params: MemoryParams,
}

impl Default for FuzzParams {
    fn default() -> Self {
        // flat_len 2^20 puts three quarters of the 2^22 universe in the
        // asymmetric high region.
        Self {
            ops: 100_000,
            seed: 1,
            case_ops: 1000,
            addr_space: 1 << 22,
            params: MemoryParams { flat_len: 1 << 20, ..MemoryParams::default() },
        }
    }
}

/// First disagreement found, with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub case_seed: u64,
    pub op_index: u64,
    pub op: FuzzOp,
    pub model: String,
    pub expected: u8,
    pub actual: u8,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let addr = match self.op {
            FuzzOp::Read { addr } | FuzzOp::Write { addr, .. } => addr,
        };
        write!(
            f,
            "model `{}` diverged at op {} (addr {:#x}): expected {}, got {}; \
             reproduce with seed {:#x}",
            self.model, self.op_index, addr, self.expected, self.actual, self.case_seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzOutcome {
    pub ops_run: u64,
    pub cases_run: u64,
    pub divergence: Option<Divergence>,
}

impl FuzzOutcome {
    pub fn is_clean(&self) -> bool {
        self.divergence.is_none()
    }
}

/// A labelled set of models to check against the oracle.
pub type ModelSet = Vec<(String, Box<dyn MemoryModel>)>;

/// The three real models.
pub fn standard_models(params: &MemoryParams) -> Result<ModelSet, MemoryError> {
    [MemoryKind::Symmetric, MemoryKind::Asymmetric, MemoryKind::Attached]
        .into_iter()
        .map(|kind| {
            make_memory(kind, params)
                .map(|m| (kind.to_string(), Box::new(m) as Box<dyn MemoryModel>))
        })
        .collect()
}

fn gen_op(rng: &mut SplitMix64, addr_space: u64) -> FuzzOp {
    let addr = rng.next_u64() & (addr_space - 1);
    let raw = rng.next_u64();
    // Three writes for every read keeps state building up.
    if raw & 3 == 3 {
        FuzzOp::Read { addr }
    } else {
        FuzzOp::Write { addr, value: (raw >> 8) as u8 }
    }
}

fn run_case(
    case_seed: u64,
    ops: u64,
    addr_space: u64,
    models: &mut ModelSet,
) -> Result<Option<Divergence>, MemoryError> {
    let mut oracle = OracleMemory::new();
    let mut rng = SplitMix64::new(case_seed);
    for op_index in 0..ops {
        let op = gen_op(&mut rng, addr_space);
        match op {
            FuzzOp::Write { addr, value } => {
                oracle.write_byte(addr, value)?;
                for (_, model) in models.iter_mut() {
                    model.write_byte(addr, value)?;
                }
            }
            FuzzOp::Read { addr } => {
                let expected = oracle.read_byte(addr)?;
                for (label, model) in models.iter() {
                    let actual = model.read_byte(addr)?;
                    if actual != expected {
                        return Ok(Some(Divergence {
                            case_seed,
                            op_index,
                            op,
                            model: label.clone(),
                            expected,
                            actual,
                        }));
                    }
                }
            }
        }
    }
    // Sweep every address the oracle knows, so writes whose reads the
    // stream never sampled still get compared.
    for (label, model) in models.iter() {
        let mut rng = SplitMix64::new(case_seed);
        let mut remaining = ops;
        while remaining > 0 {
            remaining -= 1;
            if let FuzzOp::Write { addr, .. } = gen_op(&mut rng, addr_space) {
                let expected = oracle.read_byte(addr)?;
                let actual = model.read_byte(addr)?;
                if actual != expected {
                    return Ok(Some(Divergence {
                        case_seed,
                        op_index: ops,
                        op: FuzzOp::Read { addr },
                        model: label.clone(),
                        expected,
                        actual,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Run the harness against the standard model set.
pub fn run_fuzz(params: &FuzzParams) -> Result<FuzzOutcome, MemoryError> {
    run_fuzz_with(params, standard_models)
}

/// Run the harness against models built by `factory` (fresh per case).
pub fn run_fuzz_with<F>(params: &FuzzParams, factory: F) -> Result<FuzzOutcome, MemoryError>
where
    F: Fn(&MemoryParams) -> Result<ModelSet, MemoryError>,
{
    if params.addr_space == 0 || !params.addr_space.is_power_of_two() {
        return Err(MemoryError::InvalidParams(format!(
            "addr_space must be a positive power of two, got {}",
            params.addr_space
        )));
    }
    let case_ops = params.case_ops.max(1);
    // The first case runs on the master seed itself, later ones on derived
    // seeds. Rerunning with `seed = case_seed` and `ops = case_ops` therefore
    // replays a failing case exactly.
    let mut seed_rng = SplitMix64::new(params.seed);
    let mut ops_left = params.ops;
    let mut outcome = FuzzOutcome { ops_run: 0, cases_run: 0, divergence: None };
    while ops_left > 0 {
        let case_seed = if outcome.cases_run == 0 { params.seed } else { seed_rng.next_u64() };
        let ops = ops_left.min(case_ops);
        let mut models = factory(&params.params)?;
        let divergence = run_case(case_seed, ops, params.addr_space, &mut models)?;
        outcome.ops_run += ops;
        outcome.cases_run += 1;
        ops_left -= ops;
        if divergence.is_some() {
            outcome.divergence = divergence;
            break;
        }
    }
    Ok(outcome)
}
