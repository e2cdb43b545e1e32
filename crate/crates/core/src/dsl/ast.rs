use serde::Serialize;

use crate::dist::Dist;

/// 1-based line and column, counted in characters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// An identifier with the position it was read at. Equality ignores the
/// position, so printed and reparsed documents compare equal.
#[derive(Clone, Debug, Eq)]
pub struct Name {
    pub text: String,
    pub pos: Pos,
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name {
            text: text.into(),
            pos: Pos::default(),
        }
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub blocks: Vec<Block>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Space(SpaceDecl),
    Signature(SignatureDecl),
    Algebra(AlgebraDecl),
    Presentation(PresentationDecl),
    Map(MapDecl),
    Run(RunDecl),
}

impl Block {
    pub fn kind(&self) -> &'static str {
        match self {
            Block::Space(_) => "space",
            Block::Signature(_) => "signature",
            Block::Algebra(_) => "algebra",
            Block::Presentation(_) => "presentation",
            Block::Map(_) => "map",
            Block::Run(_) => "run",
        }
    }

    pub fn name(&self) -> &Name {
        match self {
            Block::Space(b) => &b.name,
            Block::Signature(b) => &b.name,
            Block::Algebra(b) => &b.name,
            Block::Presentation(b) => &b.name,
            Block::Map(b) => &b.name,
            Block::Run(b) => &b.command,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceDecl {
    pub name: Name,
    pub points: Vec<Name>,
    pub distances: Vec<(Name, Name, Dist)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArityExpr {
    Finite(usize),
    /// `@S`: indexed by the points of space `S`.
    Space(Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignatureDecl {
    pub name: Name,
    pub symbols: Vec<(Name, ArityExpr)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub op: Name,
    pub args: Vec<Name>,
    pub value: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraDecl {
    pub name: Name,
    pub partial: bool,
    pub signature: Name,
    pub space: Name,
    pub entries: Vec<TableEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum STerm {
    /// A variable, a point of the context, or a constant.
    Name(Name),
    App(Name, Vec<STerm>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Context {
    None,
    Space(Name),
    Hypotheses(Vec<(Name, Dist, Name)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationDecl {
    pub context: Context,
    pub lhs: STerm,
    pub eps: Dist,
    pub rhs: STerm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationDecl {
    pub name: Name,
    pub signature: Name,
    pub equations: Vec<EquationDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDecl {
    pub name: Name,
    pub dom: Name,
    pub cod: Name,
    pub pairs: Vec<(Name, Name)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Name(Name),
    Dist(Dist),
    List(Vec<Value>),
}

/// `run COMMAND { key = value ... }`: arguments for a CLI command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunDecl {
    pub command: Name,
    pub args: Vec<(Name, Value)>,
}

impl RunDecl {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.args.iter().find(|(k, _)| k.text == key).map(|(_, v)| v)
    }
}
