//! Syntax tree for ECO-mini and its ECO-free core subset.
//!
//! The same node types serve both: lowering removes the ECO-specific forms
//! (`ClasserTest`, `ClasserAccess`, `CallEMethod`, `Delete`, E-method members,
//! class flags) and the core parser refuses to produce them.

/// 1-based source position of a node's first token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Module {
    pub classes: Vec<ClassDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Name {
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub pos: Pos,
    pub file: String,
    pub name: String,
    pub is_extensible: bool,
    pub is_classer: bool,
    pub extend_target: Option<Name>,
    pub base: Option<Name>,
    pub members: Vec<Member>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Ctor(CtorDecl),
    EMethodSig(EMethodSig),
    EMethodBehavior(EMethodBehavior),
}

impl Member {
    pub fn pos(&self) -> Pos {
        match self {
            Member::Field(m) => m.pos,
            Member::Method(m) => m.pos,
            Member::Ctor(m) => m.pos,
            Member::EMethodSig(m) => m.pos,
            Member::EMethodBehavior(m) => m.pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub pos: Pos,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub pos: Pos,
    pub name: String,
    pub is_static: bool,
    pub params: Vec<String>,
    pub body: Block,
}

impl MethodDecl {
    /// Pseudo-constructors are static methods named `Make` by convention.
    pub fn is_pseudo_ctor(&self) -> bool {
        self.is_static && self.name == "Make"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtorDecl {
    pub pos: Pos,
    pub is_private: bool,
    pub params: Vec<String>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EMethodSig {
    pub pos: Pos,
    pub name: String,
    pub params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EMethodBehavior {
    pub pos: Pos,
    pub name: String,
    pub params: Vec<String>,
    pub body: Block,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub pos: Pos,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Var { name: String, init: Expr },
    Assign { target: Expr, value: Expr },
    If { cond: Expr, then_block: Block, else_block: Option<Block> },
    While { cond: Expr, body: Block },
    Return(Option<Expr>),
    Throw(Expr),
    Try { body: Block, var: String, handler: Block },
    Delete(Expr),
    Expr(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
}

impl BinaryOp {
    /// Binding strength; higher binds tighter. All levels are left-associative.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            Or => 1,
            And => 2,
            Eq | Ne => 3,
            Lt | Le | Gt | Ge => 4,
            Add | Sub => 5,
            Mul | Div | Rem => 6,
        }
    }

    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Or => "||",
            And => "&&",
            Eq => "==",
            Ne => "!=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Rem => "%",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub pos: Pos,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    List(Vec<Expr>),
    New { class: String, args: Vec<Expr> },
    This,
    Ident(String),
    Field { obj: Box<Expr>, name: String },
    MethodCall { obj: Box<Expr>, method: String, args: Vec<Expr> },
    Index { obj: Box<Expr>, index: Box<Expr> },
    /// Free function call: builtins, and runtime intrinsics in core text.
    Call { func: String, args: Vec<Expr> },
    Unary { op: UnaryOp, expr: Box<Expr> },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    /// `obj.{C}`
    ClasserTest { obj: Box<Expr>, classer: String },
    /// `obj.{C}.m(args)`
    ClasserAccess { obj: Box<Expr>, classer: String, method: String, args: Vec<Expr> },
    /// `call_e_method(M, args)`
    CallEMethod { name: String, args: Vec<Expr> },
}

impl Expr {
    pub fn new(pos: Pos, kind: ExprKind) -> Self {
        Expr { pos, kind }
    }
}

impl Module {
    /// Returns a copy with every position reset, for structural comparison.
    pub fn without_positions(&self) -> Module {
        let mut m = self.clone();
        for c in &mut m.classes {
            c.pos = Pos::default();
            c.file.clear();
            for n in c.extend_target.iter_mut().chain(c.base.iter_mut()) {
                n.pos = Pos::default();
            }
            for member in &mut c.members {
                match member {
                    Member::Field(f) => f.pos = Pos::default(),
                    Member::EMethodSig(s) => s.pos = Pos::default(),
                    Member::Method(m) => {
                        m.pos = Pos::default();
                        clear_block(&mut m.body);
                    }
                    Member::Ctor(m) => {
                        m.pos = Pos::default();
                        clear_block(&mut m.body);
                    }
                    Member::EMethodBehavior(m) => {
                        m.pos = Pos::default();
                        clear_block(&mut m.body);
                    }
                }
            }
        }
        m
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }
}

fn clear_block(b: &mut Block) {
    for s in &mut b.stmts {
        s.pos = Pos::default();
        match &mut s.kind {
            StmtKind::Var { init, .. } => clear_expr(init),
            StmtKind::Assign { target, value } => {
                clear_expr(target);
                clear_expr(value);
            }
            StmtKind::If { cond, then_block, else_block } => {
                clear_expr(cond);
                clear_block(then_block);
                if let Some(e) = else_block {
                    clear_block(e);
                }
            }
            StmtKind::While { cond, body } => {
                clear_expr(cond);
                clear_block(body);
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    clear_expr(e);
                }
            }
            StmtKind::Throw(e) | StmtKind::Delete(e) | StmtKind::Expr(e) => clear_expr(e),
            StmtKind::Try { body, handler, .. } => {
                clear_block(body);
                clear_block(handler);
            }
        }
    }
}

fn clear_expr(e: &mut Expr) {
    e.pos = Pos::default();
    for child in e.children_mut() {
        clear_expr(child);
    }
}

impl Expr {
    pub fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            Int(_) | Str(_) | Bool(_) | Null | This | Ident(_) => vec![],
            List(items) => items.iter().collect(),
            New { args, .. } | Call { args, .. } | CallEMethod { args, .. } => args.iter().collect(),
            Field { obj, .. } | ClasserTest { obj, .. } => vec![obj],
            MethodCall { obj, args, .. } | ClasserAccess { obj, args, .. } => {
                std::iter::once(&**obj).chain(args.iter()).collect()
            }
            Index { obj, index } => vec![obj, index],
            Unary { expr, .. } => vec![expr],
            Binary { lhs, rhs, .. } => vec![lhs, rhs],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        use ExprKind::*;
        match &mut self.kind {
            Int(_) | Str(_) | Bool(_) | Null | This | Ident(_) => vec![],
            List(items) => items.iter_mut().collect(),
            New { args, .. } | Call { args, .. } | CallEMethod { args, .. } => args.iter_mut().collect(),
            Field { obj, .. } | ClasserTest { obj, .. } => vec![obj],
            MethodCall { obj, args, .. } | ClasserAccess { obj, args, .. } => {
                std::iter::once(&mut **obj).chain(args.iter_mut()).collect()
            }
            Index { obj, index } => vec![obj, index],
            Unary { expr, .. } => vec![expr],
            Binary { lhs, rhs, .. } => vec![lhs, rhs],
        }
    }
}

/// Calls `f` on every expression in `block`, outermost first.
pub fn walk_block_exprs<'a>(block: &'a Block, f: &mut dyn FnMut(&'a Expr)) {
    for s in &block.stmts {
        walk_stmt_exprs(s, f);
    }
}

pub fn walk_stmt_exprs<'a>(s: &'a Stmt, f: &mut dyn FnMut(&'a Expr)) {
    match &s.kind {
        StmtKind::Var { init, .. } => walk_expr(init, f),
        StmtKind::Assign { target, value } => {
            walk_expr(target, f);
            walk_expr(value, f);
        }
        StmtKind::If { cond, then_block, else_block } => {
            walk_expr(cond, f);
            walk_block_exprs(then_block, f);
            if let Some(b) = else_block {
                walk_block_exprs(b, f);
            }
        }
        StmtKind::While { cond, body } => {
            walk_expr(cond, f);
            walk_block_exprs(body, f);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                walk_expr(e, f);
            }
        }
        StmtKind::Throw(e) | StmtKind::Delete(e) | StmtKind::Expr(e) => walk_expr(e, f),
        StmtKind::Try { body, handler, .. } => {
            walk_block_exprs(body, f);
            walk_block_exprs(handler, f);
        }
    }
}

pub fn walk_expr<'a>(e: &'a Expr, f: &mut dyn FnMut(&'a Expr)) {
    f(e);
    for c in e.children() {
        walk_expr(c, f);
    }
}
