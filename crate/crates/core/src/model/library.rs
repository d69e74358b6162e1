use std::collections::BTreeMap;

use super::actors;
use super::{ActorDecl, CfdfActor, ModelError, Token, TokenType};
use crate::kernels::{KernelError, PassiveKernel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortSpec {
    pub name: String,
    /// `None` accepts either token type.
    pub ty: Option<TokenType>,
}

impl PortSpec {
    pub fn new(name: impl Into<String>, ty: Option<TokenType>) -> Self {
        PortSpec {
            name: name.into(),
            ty,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PortLayout {
    pub inputs: Vec<PortSpec>,
    pub outputs: Vec<PortSpec>,
}

impl PortLayout {
    pub fn new(inputs: Vec<PortSpec>, outputs: Vec<PortSpec>) -> Self {
        PortLayout { inputs, outputs }
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|p| p.name == name)
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|p| p.name == name)
    }

    pub fn input(&self, name: &str) -> Option<&PortSpec> {
        self.inputs.iter().find(|p| p.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&PortSpec> {
        self.outputs.iter().find(|p| p.name == name)
    }
}

pub type LayoutFn = fn(&ActorDecl) -> Result<PortLayout, ModelError>;
pub type ActiveFactory = fn(&ActorDecl, PortLayout) -> Result<Box<dyn CfdfActor>, ModelError>;
pub type PassiveFactory =
    fn(&ActorDecl, &PortLayout, usize) -> Result<PassiveKernel<Token>, KernelError>;

/// One registered actor kind. Every kind has an active implementation; a
/// kind with a passive implementation is a buffer actor.
#[derive(Clone)]
pub struct KindEntry {
    pub kind: String,
    pub layout: LayoutFn,
    pub active: ActiveFactory,
    pub passive: Option<PassiveFactory>,
}

impl KindEntry {
    pub fn has_passive_impl(&self) -> bool {
        self.passive.is_some()
    }
}

impl std::fmt::Debug for KindEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KindEntry")
            .field("kind", &self.kind)
            .field("has_passive_impl", &self.has_passive_impl())
            .finish()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ActorLibrary {
    kinds: BTreeMap<String, KindEntry>,
}

impl ActorLibrary {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The shipped actor kinds. Buffer actors: `fork`, `gainfork`,
    /// `interleave`.
    pub fn standard() -> Self {
        let mut lib = Self::empty();
        for entry in actors::standard_entries() {
            lib.register(entry);
        }
        lib
    }

    /// Adds or replaces a kind.
    pub fn register(&mut self, entry: KindEntry) {
        self.kinds.insert(entry.kind.clone(), entry);
    }

    pub fn entry(&self, kind: &str) -> Result<&KindEntry, ModelError> {
        self.kinds
            .get(kind)
            .ok_or_else(|| ModelError::UnknownKind(kind.to_string()))
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.kinds.keys().map(String::as_str)
    }

    pub fn is_buffer_actor(&self, kind: &str) -> Result<bool, ModelError> {
        Ok(self.entry(kind)?.has_passive_impl())
    }

    pub fn layout(&self, decl: &ActorDecl) -> Result<PortLayout, ModelError> {
        (self.entry(&decl.kind)?.layout)(decl)
    }

    pub fn instantiate_active(&self, decl: &ActorDecl) -> Result<Box<dyn CfdfActor>, ModelError> {
        let entry = self.entry(&decl.kind)?;
        let layout = (entry.layout)(decl)?;
        (entry.active)(decl, layout)
    }

    /// Builds the passive kernel of a buffer actor, or `None` for a
    /// computational kind.
    pub fn instantiate_passive(
        &self,
        decl: &ActorDecl,
        capacity: usize,
    ) -> Result<Option<PassiveKernel<Token>>, crate::Error> {
        let entry = self.entry(&decl.kind)?;
        let Some(factory) = entry.passive else {
            return Ok(None);
        };
        let layout = (entry.layout)(decl)?;
        Ok(Some(factory(decl, &layout, capacity)?))
    }
}
