//! The world of defined abstract objects and the attachment table.
//!
//! An abstract object is a named interface: an ordered list of primitive
//! signatures over a foundation object. An object declared *attachable* may
//! have its executable backing replaced at definition time by a previously
//! defined *implementation* object, provided both expose the same ordered
//! sequence of logic signatures. The replacement is requested ahead of time
//! with [`RegistryState::attach`] and applied by
//! [`RegistryState::define_object`], which resolves the attachment table
//! recursively and substitutes the implementation's exec ids and foundation
//! into the new object's [`ResolvedBinding`].
//!
//! States are values: every operation returns a fresh `RegistryState`,
//! leaving the input untouched. This keeps snapshot/rollback trivial for the
//! loader and its tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ident::Ident;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// One exported primitive: the visible name plus its logic and exec ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitiveSig {
    pub export_name: Ident,
    pub logic_id: Ident,
    pub exec_id: Ident,
    pub arity: u32,
}

impl PrimitiveSig {
    pub fn new(export_name: Ident, logic_id: Ident, exec_id: Ident, arity: u32) -> Self {
        Self { export_name, logic_id, exec_id, arity }
    }
}

/// A named abstract object specification.
///
/// Invariants enforced at construction: export names are pairwise distinct.
/// Child references are checked against the world when the spec is defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractObjectSpec {
    name: Ident,
    foundation: Ident,
    primitives: Vec<PrimitiveSig>,
    attachable: bool,
    non_executable: bool,
    children: Vec<Ident>,
}

impl AbstractObjectSpec {
    pub fn new(
        name: Ident,
        foundation: Ident,
        primitives: Vec<PrimitiveSig>,
    ) -> Result<Self, RegistryError> {
        let mut seen = BTreeSet::new();
        for prim in &primitives {
            if !seen.insert(&prim.export_name) {
                return Err(RegistryError::DuplicateExport {
                    name,
                    export: prim.export_name.clone(),
                });
            }
        }
        Ok(Self {
            name,
            foundation,
            primitives,
            attachable: false,
            non_executable: false,
            children: Vec::new(),
        })
    }

    pub fn attachable(mut self, yes: bool) -> Self {
        self.attachable = yes;
        self
    }

    pub fn non_executable(mut self, yes: bool) -> Self {
        self.non_executable = yes;
        self
    }

    pub fn children(mut self, children: Vec<Ident>) -> Self {
        self.children = children;
        self
    }

    pub fn name(&self) -> &Ident {
        &self.name
    }

    pub fn foundation(&self) -> &Ident {
        &self.foundation
    }

    pub fn primitives(&self) -> &[PrimitiveSig] {
        &self.primitives
    }

    pub fn is_attachable(&self) -> bool {
        self.attachable
    }

    pub fn is_non_executable(&self) -> bool {
        self.non_executable
    }

    pub fn child_names(&self) -> &[Ident] {
        &self.children
    }

    /// The ordered `(logic_id, arity)` sequence two specs must share for one
    /// to implement the other.
    pub fn logic_signature(&self) -> Vec<(&Ident, u32)> {
        self.primitives.iter().map(|p| (&p.logic_id, p.arity)).collect()
    }

    /// The spec's own exec ids, in primitive order.
    pub fn exec_ids(&self) -> Vec<Ident> {
        self.primitives.iter().map(|p| p.exec_id.clone()).collect()
    }

    /// Position of an export within the primitive list.
    pub fn export_position(&self, export: &Ident) -> Option<usize> {
        self.primitives.iter().position(|p| &p.export_name == export)
    }
}

/// Pending attachments: attachable name -> implementation name, in insertion
/// order. Entries are never mutated or removed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttachmentTable {
    entries: Vec<(Ident, Ident)>,
}

impl AttachmentTable {
    pub fn get(&self, key: &Ident) -> Option<&Ident> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn contains_key(&self, key: &Ident) -> bool {
        self.get(key).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Ident)> {
        self.entries.iter().map(|(k, v)| (k, v))
    }

    fn insert(&mut self, key: Ident, value: Ident) {
        debug_assert!(!self.contains_key(&key));
        self.entries.push((key, value));
    }
}

/// Where a binding's executable backing came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// The object's own spec supplied the exec ids and foundation.
    Own,
    /// Substituted via the attachment table; the chain lists each hop, ending
    /// at the object that actually supplied the backing.
    AttachedVia(Vec<Ident>),
}

/// The executable backing of a defined object after any substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedBinding {
    name: Ident,
    effective_foundation: Ident,
    effective_exec: Vec<Ident>,
    provenance: Provenance,
}

impl ResolvedBinding {
    pub fn name(&self) -> &Ident {
        &self.name
    }

    pub fn effective_foundation(&self) -> &Ident {
        &self.effective_foundation
    }

    pub fn effective_exec(&self) -> &[Ident] {
        &self.effective_exec
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_attached(&self) -> bool {
        matches!(self.provenance, Provenance::AttachedVia(_))
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// First point of disagreement between two logic signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicMismatch {
    pub position: usize,
    /// `(logic_id, arity)` of the attachable spec at that position, if any.
    pub attachable: Option<(Ident, u32)>,
    /// `(logic_id, arity)` of the implementation spec at that position, if any.
    pub implementation: Option<(Ident, u32)>,
}

impl fmt::Display for LogicMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn side(entry: &Option<(Ident, u32)>) -> String {
            match entry {
                Some((id, arity)) => format!("{id}/{arity}"),
                None => "<end of list>".to_string(),
            }
        }
        write!(
            f,
            "position {}: attachable has {}, implementation has {}",
            self.position,
            side(&self.attachable),
            side(&self.implementation)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("attach target `{0}` is already defined; attach must precede its definition")]
    AttachTargetDefined(Ident),
    #[error("implementation `{0}` is not defined; it must be defined before attach")]
    ImplementationUndefined(Ident),
    #[error("`{0}` already has a pending attachment")]
    DuplicateAttachment(Ident),
    #[error("object `{0}` is already defined")]
    AlreadyDefined(Ident),
    #[error("logic signatures of `{name}` and its attachment `{implementation}` differ: {mismatch}")]
    SignatureMismatch {
        name: Ident,
        implementation: Ident,
        mismatch: LogicMismatch,
    },
    #[error("`{0}` has a pending attachment but was defined without the attachable flag")]
    PendingAttachmentOnNonAttachable(Ident),
    #[error("object `{0}` is not defined")]
    Undefined(Ident),
    #[error("object `{0}` already has a global instance")]
    AlreadyGlobal(Ident),
    #[error("child `{child}` of `{name}` is not defined")]
    UndefinedChild { name: Ident, child: Ident },
    #[error("spec `{name}` exports `{export}` more than once")]
    DuplicateExport { name: Ident, export: Ident },
}

// ---------------------------------------------------------------------------
// Compatibility check
// ---------------------------------------------------------------------------

/// Ok iff both specs expose the identical ordered `(logic_id, arity)`
/// sequence. Export names and exec ids may differ freely.
pub fn check_compatible(
    attachable: &AbstractObjectSpec,
    implementation: &AbstractObjectSpec,
) -> Result<(), LogicMismatch> {
    let lhs = attachable.logic_signature();
    let rhs = implementation.logic_signature();
    let clone = |e: Option<&(&Ident, u32)>| e.map(|(id, a)| ((*id).clone(), *a));
    for position in 0..lhs.len().max(rhs.len()) {
        let a = lhs.get(position);
        let b = rhs.get(position);
        if a != b {
            return Err(LogicMismatch {
                position,
                attachable: clone(a),
                implementation: clone(b),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Registry state
// ---------------------------------------------------------------------------

/// The world: defined specs, the attachment table, live globals, and one
/// resolved binding per defined object.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegistryState {
    defined: BTreeMap<Ident, AbstractObjectSpec>,
    table: AttachmentTable,
    globals: BTreeSet<Ident>,
    bindings: BTreeMap<Ident, ResolvedBinding>,
}

impl RegistryState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_defined(&self, name: &Ident) -> bool {
        self.defined.contains_key(name)
    }

    pub fn is_global(&self, name: &Ident) -> bool {
        self.globals.contains(name)
    }

    pub fn spec(&self, name: &Ident) -> Option<&AbstractObjectSpec> {
        self.defined.get(name)
    }

    pub fn attachment_table(&self) -> &AttachmentTable {
        &self.table
    }

    pub fn defined_names(&self) -> impl Iterator<Item = &Ident> {
        self.defined.keys()
    }

    /// Record that `implementation` will back `attachable` once the latter is
    /// defined. The attachable must not be defined yet; the implementation
    /// must already be.
    pub fn attach(
        &self,
        attachable: Ident,
        implementation: Ident,
    ) -> Result<Self, RegistryError> {
        if self.is_defined(&attachable) {
            return Err(RegistryError::AttachTargetDefined(attachable));
        }
        if self.table.contains_key(&attachable) {
            return Err(RegistryError::DuplicateAttachment(attachable));
        }
        if !self.is_defined(&implementation) {
            return Err(RegistryError::ImplementationUndefined(implementation));
        }
        let mut next = self.clone();
        next.table.insert(attachable.clone(), implementation);
        // The definedness preconditions force acyclicity; assert it anyway.
        assert!(
            next.resolution_chain(&attachable).len() <= next.table.len(),
            "attachment table grew a cycle"
        );
        Ok(next)
    }

    /// Follow the attachment table from `name`. A top-level call answers
    /// "what implementation, if any, backs this name": `None` when the table
    /// has no entry. Recursive calls return the name itself once the chain
    /// runs out, so the result of a successful top-level call is the final
    /// object in the chain.
    pub fn resolve_attachment<'a>(&'a self, name: &'a Ident, top: bool) -> Option<&'a Ident> {
        match self.table.get(name) {
            Some(next) => self.resolve_attachment(next, false),
            None if top => None,
            None => Some(name),
        }
    }

    /// Every hop the table takes from `name`, excluding `name` itself.
    /// Empty iff `name` has no pending attachment.
    pub fn resolution_chain(&self, name: &Ident) -> Vec<Ident> {
        let mut chain = Vec::new();
        let mut cur = name;
        while let Some(next) = self.table.get(cur) {
            chain.push(next.clone());
            cur = next;
            assert!(chain.len() <= self.table.len(), "attachment table grew a cycle");
        }
        chain
    }

    /// Define a new object. If it is attachable and the table resolves its
    /// name, the logic signatures must match and the binding's exec ids and
    /// foundation are taken from the implementation's own binding; otherwise
    /// the spec backs itself. Unless flagged non-executable, the object also
    /// gains a global instance.
    pub fn define_object(&self, spec: AbstractObjectSpec) -> Result<Self, RegistryError> {
        let name = spec.name().clone();
        if self.is_defined(&name) {
            return Err(RegistryError::AlreadyDefined(name));
        }
        for child in spec.child_names() {
            if !self.is_defined(child) {
                return Err(RegistryError::UndefinedChild { name, child: child.clone() });
            }
        }
        if self.table.contains_key(&name) && !spec.is_attachable() {
            return Err(RegistryError::PendingAttachmentOnNonAttachable(name));
        }

        let attachment = if spec.is_attachable() {
            self.resolve_attachment(&name, true).cloned()
        } else {
            None
        };
        let binding = match attachment {
            Some(impl_name) => {
                let impl_spec = self
                    .spec(&impl_name)
                    .expect("resolution chain ends at a defined object");
                if let Err(mismatch) = check_compatible(&spec, impl_spec) {
                    return Err(RegistryError::SignatureMismatch {
                        name,
                        implementation: impl_name,
                        mismatch,
                    });
                }
                // Take the backing from the implementation's *binding*, not
                // its spec, so chained attachments compose.
                let impl_binding = &self.bindings[&impl_name];
                ResolvedBinding {
                    name: name.clone(),
                    effective_foundation: impl_binding.effective_foundation.clone(),
                    effective_exec: impl_binding.effective_exec.clone(),
                    provenance: Provenance::AttachedVia(self.resolution_chain(&name)),
                }
            }
            None => ResolvedBinding {
                name: name.clone(),
                effective_foundation: spec.foundation().clone(),
                effective_exec: spec.exec_ids(),
                provenance: Provenance::Own,
            },
        };
        debug_assert_eq!(binding.effective_exec.len(), spec.primitives().len());

        let mut next = self.clone();
        if !spec.is_non_executable() {
            next.globals.insert(name.clone());
        }
        next.bindings.insert(name.clone(), binding);
        next.defined.insert(name, spec);
        Ok(next)
    }

    /// Create the global instance of an already-defined object that was
    /// introduced non-executable.
    pub fn add_global_object(&self, name: &Ident) -> Result<Self, RegistryError> {
        if !self.is_defined(name) {
            return Err(RegistryError::Undefined(name.clone()));
        }
        if self.is_global(name) {
            return Err(RegistryError::AlreadyGlobal(name.clone()));
        }
        let mut next = self.clone();
        next.globals.insert(name.clone());
        Ok(next)
    }

    /// The stored binding of a defined object.
    pub fn effective_binding(&self, name: &Ident) -> Result<&ResolvedBinding, RegistryError> {
        self.bindings
            .get(name)
            .ok_or_else(|| RegistryError::Undefined(name.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    fn prim(export: &str, logic: &str, exec: &str, arity: u32) -> PrimitiveSig {
        PrimitiveSig::new(id(export), id(logic), id(exec), arity)
    }

    /// The attachable/implementation pair from the worked substitution
    /// example: same logic ids, distinct exports and execs.
    fn st_spec() -> AbstractObjectSpec {
        AbstractObjectSpec::new(id("ST"), id("ST$f"), vec![prim("p", "p$a", "p$c", 2)])
            .unwrap()
            .attachable(true)
    }

    fn impl_spec() -> AbstractObjectSpec {
        AbstractObjectSpec::new(
            id("IMPL"),
            id("IMPL$f"),
            vec![prim("p{impl}", "p$a", "p{impl}$c", 2)],
        )
        .unwrap()
    }

    fn check_invariants(state: &RegistryState) {
        for name in state.defined_names() {
            let spec = state.spec(name).unwrap();
            let binding = state.effective_binding(name).unwrap();
            assert_eq!(binding.effective_exec().len(), spec.primitives().len());
            if let Provenance::AttachedVia(chain) = binding.provenance() {
                assert!(!chain.is_empty());
                let last = chain.last().unwrap();
                assert!(state.is_defined(last));
                assert!(!state.attachment_table().contains_key(last));
            }
        }
        for name in &state.globals {
            assert!(state.is_defined(name));
        }
    }

    #[test]
    fn attach_records_pending_entry() {
        let state = RegistryState::new().define_object(impl_spec()).unwrap();
        let state = state.attach(id("ST"), id("IMPL")).unwrap();
        assert_eq!(state.attachment_table().get(&id("ST")), Some(&id("IMPL")));
        assert_eq!(state.attachment_table().len(), 1);
        check_invariants(&state);
    }

    #[test]
    fn attach_after_define_is_rejected() {
        let state = RegistryState::new()
            .define_object(impl_spec())
            .unwrap()
            .define_object(st_spec())
            .unwrap();
        assert_eq!(
            state.attach(id("ST"), id("IMPL")),
            Err(RegistryError::AttachTargetDefined(id("ST")))
        );
    }

    #[test]
    fn attach_requires_defined_implementation() {
        let state = RegistryState::new();
        assert_eq!(
            state.attach(id("ST"), id("GHOST")),
            Err(RegistryError::ImplementationUndefined(id("GHOST")))
        );
    }

    #[test]
    fn duplicate_attach_is_rejected() {
        let state = RegistryState::new()
            .define_object(impl_spec())
            .unwrap()
            .attach(id("ST"), id("IMPL"))
            .unwrap();
        assert_eq!(
            state.attach(id("ST"), id("IMPL")),
            Err(RegistryError::DuplicateAttachment(id("ST")))
        );
    }

    #[test]
    fn resolve_empty_table_is_none_at_top() {
        let state = RegistryState::new();
        assert_eq!(state.resolve_attachment(&id("ST"), true), None);
    }

    #[test]
    fn resolve_single_entry() {
        let state = RegistryState::new()
            .define_object(impl_spec())
            .unwrap()
            .attach(id("ST"), id("IMPL"))
            .unwrap();
        assert_eq!(state.resolve_attachment(&id("ST"), true), Some(&id("IMPL")));
    }

    #[test]
    fn resolve_follows_chained_entries() {
        // Order forced by the definedness rules: IMPL2 first, then IMPL
        // (pending on IMPL2), then ST pending on IMPL.
        let impl2 = AbstractObjectSpec::new(
            id("IMPL2"),
            id("IMPL2$f"),
            vec![prim("p{2}", "p$a", "p{2}$c", 2)],
        )
        .unwrap();
        let state = RegistryState::new()
            .define_object(impl2)
            .unwrap()
            .attach(id("IMPL"), id("IMPL2"))
            .unwrap()
            .define_object(impl_spec().attachable(true))
            .unwrap()
            .attach(id("ST"), id("IMPL"))
            .unwrap();
        assert_eq!(state.resolve_attachment(&id("ST"), true), Some(&id("IMPL2")));
        let state = state.define_object(st_spec()).unwrap();
        check_invariants(&state);

        // Chained attachments compose: ST executes with IMPL2's backing.
        let binding = state.effective_binding(&id("ST")).unwrap();
        assert_eq!(binding.effective_exec(), &[id("p{2}$c")]);
        assert_eq!(binding.effective_foundation(), &id("IMPL2$f"));
        assert_eq!(
            binding.provenance(),
            &Provenance::AttachedVia(vec![id("IMPL"), id("IMPL2")])
        );
    }

    #[test]
    fn compatible_specs_accept_differing_exports_and_execs() {
        assert_eq!(check_compatible(&st_spec(), &impl_spec()), Ok(()));
        assert_eq!(check_compatible(&st_spec(), &st_spec()), Ok(()));
    }

    #[test]
    fn mismatch_names_first_differing_position() {
        let other = AbstractObjectSpec::new(id("X"), id("X$f"), vec![prim("q", "q$a", "q$c", 2)])
            .unwrap();
        let err = check_compatible(&st_spec(), &other).unwrap_err();
        assert_eq!(err.position, 0);
        assert_eq!(err.attachable, Some((id("p$a"), 2)));
        assert_eq!(err.implementation, Some((id("q$a"), 2)));

        let longer = AbstractObjectSpec::new(
            id("Y"),
            id("Y$f"),
            vec![prim("p", "p$a", "p$c", 2), prim("r", "r$a", "r$c", 0)],
        )
        .unwrap();
        let err = check_compatible(&st_spec(), &longer).unwrap_err();
        assert_eq!(err.position, 1);
        assert_eq!(err.attachable, None);

        let arity = AbstractObjectSpec::new(id("Z"), id("Z$f"), vec![prim("p", "p$a", "p$c", 3)])
            .unwrap();
        assert_eq!(check_compatible(&st_spec(), &arity).unwrap_err().position, 0);
    }

    #[test]
    fn define_with_attachment_substitutes_exec_and_foundation() {
        let state = RegistryState::new()
            .define_object(impl_spec())
            .unwrap()
            .attach(id("ST"), id("IMPL"))
            .unwrap()
            .define_object(st_spec())
            .unwrap();
        let binding = state.effective_binding(&id("ST")).unwrap();
        assert_eq!(binding.effective_exec(), &[id("p{impl}$c")]);
        assert_eq!(binding.effective_foundation(), &id("IMPL$f"));
        assert_eq!(binding.provenance(), &Provenance::AttachedVia(vec![id("IMPL")]));
        // Attachment never rewrites the logic signature of the defined spec.
        assert_eq!(state.spec(&id("ST")).unwrap().logic_signature(), st_spec().logic_signature());
        check_invariants(&state);
    }

    #[test]
    fn define_without_attachment_binds_to_itself() {
        let state = RegistryState::new().define_object(st_spec()).unwrap();
        let binding = state.effective_binding(&id("ST")).unwrap();
        assert_eq!(binding.effective_exec(), &[id("p$c")]);
        assert_eq!(binding.effective_foundation(), &id("ST$f"));
        assert_eq!(binding.provenance(), &Provenance::Own);
    }

    #[test]
    fn define_rejects_incompatible_attachment() {
        let other = AbstractObjectSpec::new(
            id("IMPL"),
            id("IMPL$f"),
            vec![prim("q{impl}", "q$a", "q{impl}$c", 2)],
        )
        .unwrap();
        let err = RegistryState::new()
            .define_object(other)
            .unwrap()
            .attach(id("ST"), id("IMPL"))
            .unwrap()
            .define_object(st_spec())
            .unwrap_err();
        match err {
            RegistryError::SignatureMismatch { name, implementation, mismatch } => {
                assert_eq!(name, id("ST"));
                assert_eq!(implementation, id("IMPL"));
                assert_eq!(mismatch.position, 0);
            }
            other => panic!("expected SignatureMismatch, got {other:?}"),
        }
    }

    #[test]
    fn define_rejects_pending_attachment_without_flag() {
        let err = RegistryState::new()
            .define_object(impl_spec())
            .unwrap()
            .attach(id("ST"), id("IMPL"))
            .unwrap()
            .define_object(st_spec().attachable(false))
            .unwrap_err();
        assert_eq!(err, RegistryError::PendingAttachmentOnNonAttachable(id("ST")));
    }

    #[test]
    fn redefinition_is_rejected() {
        let state = RegistryState::new().define_object(impl_spec()).unwrap();
        assert_eq!(
            state.define_object(impl_spec()),
            Err(RegistryError::AlreadyDefined(id("IMPL")))
        );
    }

    #[test]
    fn children_must_be_defined() {
        let parent = AbstractObjectSpec::new(id("X86"), id("X86$f"), vec![])
            .unwrap()
            .children(vec![id("ST")]);
        let err = RegistryState::new().define_object(parent.clone()).unwrap_err();
        assert_eq!(err, RegistryError::UndefinedChild { name: id("X86"), child: id("ST") });

        let state = RegistryState::new()
            .define_object(st_spec())
            .unwrap()
            .define_object(parent)
            .unwrap();
        check_invariants(&state);
    }

    #[test]
    fn duplicate_export_rejected_at_construction() {
        let err = AbstractObjectSpec::new(
            id("B"),
            id("B$f"),
            vec![prim("p", "p$a", "p$c", 0), prim("p", "q$a", "q$c", 1)],
        )
        .unwrap_err();
        assert_eq!(err, RegistryError::DuplicateExport { name: id("B"), export: id("p") });
    }

    #[test]
    fn non_executable_lifecycle() {
        let state = RegistryState::new()
            .define_object(impl_spec().non_executable(true))
            .unwrap();
        assert!(!state.is_global(&id("IMPL")));

        let state = state.add_global_object(&id("IMPL")).unwrap();
        assert!(state.is_global(&id("IMPL")));
        assert_eq!(
            state.add_global_object(&id("IMPL")),
            Err(RegistryError::AlreadyGlobal(id("IMPL")))
        );
        check_invariants(&state);
    }

    #[test]
    fn add_global_on_normally_defined_object_errors() {
        let state = RegistryState::new().define_object(impl_spec()).unwrap();
        assert!(state.is_global(&id("IMPL")));
        assert_eq!(
            state.add_global_object(&id("IMPL")),
            Err(RegistryError::AlreadyGlobal(id("IMPL")))
        );
        assert_eq!(
            state.add_global_object(&id("GHOST")),
            Err(RegistryError::Undefined(id("GHOST")))
        );
    }

    /// Independent chain follower used as the oracle for resolution: plain
    /// iterative walk over the raw entry list, no shared code with
    /// `resolve_attachment`.
    fn brute_force_resolve(entries: &[(Ident, Ident)], start: &Ident) -> Option<Ident> {
        let lookup = |k: &Ident| {
            entries.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone())
        };
        let mut cur = lookup(start)?;
        loop {
            match lookup(&cur) {
                Some(next) => cur = next,
                None => return Some(cur),
            }
        }
    }

    /// Build a registry whose table has `n` entries by defining leaf objects
    /// and attaching pending names in an order the preconditions permit.
    /// `links[i]` picks which previously available name entry `i` points at.
    fn build_random_table(links: &[usize]) -> RegistryState {
        let mut state = RegistryState::new();
        // One shared logic signature keeps every pair compatible.
        let mut targets: Vec<Ident> = Vec::new();
        let root = AbstractObjectSpec::new(id("obj0"), id("obj0$f"), vec![
            prim("op0", "op$a", "op0$c", 1),
        ])
        .unwrap();
        state = state.define_object(root).unwrap();
        targets.push(id("obj0"));

        for (i, link) in links.iter().enumerate() {
            let name = id(&format!("obj{}", i + 1));
            let target = targets[link % targets.len()].clone();
            state = state.attach(name.clone(), target).unwrap();
            // Defining the pending name afterwards makes it a legal target
            // for later entries, exercising chains.
            let spec = AbstractObjectSpec::new(name.clone(), id(&format!("{name}$f")), vec![
                prim(&format!("op{}", i + 1), "op$a", &format!("op{}$c", i + 1), 1),
            ])
            .unwrap()
            .attachable(true);
            state = state.define_object(spec).unwrap();
            targets.push(name);
        }
        state
    }

    proptest! {
        /// Transcribed three-branch resolution agrees with the iterative
        /// brute-force follower on every reachable table.
        #[test]
        fn resolution_matches_brute_force(links in prop::collection::vec(0usize..64, 0..50)) {
            let state = build_random_table(&links);
            check_invariants(&state);
            let entries: Vec<(Ident, Ident)> = state
                .attachment_table()
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            for i in 0..=links.len() {
                let name = id(&format!("obj{i}"));
                let got = state.resolve_attachment(&name, true).cloned();
                let expected = brute_force_resolve(&entries, &name);
                prop_assert_eq!(got, expected);
            }
            // Unknown names resolve to none at top level.
            let ghost = id("ghost");
            prop_assert_eq!(state.resolve_attachment(&ghost, true), None);
        }

        /// Substitution correctness: an attached definition's binding equals,
        /// element for element, the binding of the object its chain ends at.
        #[test]
        fn attached_binding_equals_chain_end_binding(links in prop::collection::vec(0usize..64, 1..30)) {
            let state = build_random_table(&links);
            for name in state.defined_names() {
                let binding = state.effective_binding(name).unwrap();
                if let Provenance::AttachedVia(chain) = binding.provenance() {
                    let end = state.effective_binding(chain.last().unwrap()).unwrap();
                    prop_assert_eq!(binding.effective_exec(), end.effective_exec());
                    prop_assert_eq!(binding.effective_foundation(), end.effective_foundation());
                }
                // Logic preservation: the defined spec keeps its own signature.
                let spec = state.spec(name).unwrap();
                prop_assert_eq!(binding.effective_exec().len(), spec.primitives().len());
            }
        }
    }
}
