use crate::exactla::Q;

/// Source position, 1-based. Positions never take part in AST equality,
/// so a printed and re-parsed file compares equal to the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Group {
        name: String,
        pos: Pos,
    },
    Window {
        n_min: i64,
        n_max: i64,
        r_min: i64,
        r_max: i64,
    },
    Cutoff(i64),
    Cdga(CdgaDecl),
    Module(ModuleDecl),
    Map(MapDecl),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Grading {
    Adams(i64),
    /// Label text such as `sym(1)det(-1)` or `w(2)`.
    Rep(String),
}

/// `gen` and `vec` lines share this shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub degree: i64,
    pub grading: Grading,
    pub pos: Pos,
}

/// `coeff * f1 * f2 * ...`; no factors means a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: Q,
    pub factors: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffDecl {
    pub name: String,
    pub poly: Vec<Term>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdgaDecl {
    pub name: String,
    pub gens: Vec<VarDecl>,
    pub diffs: Vec<DiffDecl>,
    pub pos: Pos,
}

/// `coeff * a ⊗ v`, or `coeff * v` when `factors` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModTerm {
    pub coeff: Q,
    pub factors: Vec<String>,
    pub vec: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    /// `dM v = ...`
    Dm,
    /// `G v = ...`
    Conn,
    /// `f v = ...` inside a map
    Map,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub kind: EntryKind,
    pub name: String,
    pub terms: Vec<ModTerm>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDecl {
    pub name: String,
    pub over: String,
    pub vecs: Vec<VarDecl>,
    pub entries: Vec<Entry>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub entries: Vec<Entry>,
    pub pos: Pos,
}
