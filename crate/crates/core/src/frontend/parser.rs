//! Recursive-descent parser for ECO-mini.

use super::ast::*;
use super::token::{unescape, Token, TokenKind};
use crate::diagnostic::{Code, Diagnostic};

/// Names of the runtime intrinsics emitted by lowering.
pub const INTRINSICS: [&str; 6] = [
    "eco_attach",
    "eco_detach",
    "eco_dispatch",
    "eco_has",
    "eco_get",
    "eco_destroy",
];

/// Prefix of identifiers injected by lowering.
pub const HIDDEN_PREFIX: &str = "__eco_";

pub fn is_reserved(name: &str) -> bool {
    name.starts_with(HIDDEN_PREFIX) || INTRINSICS.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    /// User-written ECO-mini: ECO forms allowed, reserved names rejected.
    Surface,
    /// Lowered core text: ECO forms rejected, reserved names allowed.
    Core,
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    file: &'a str,
    mode: ParseMode,
}

/// Parses a token stream from [`tokenize`](super::token::tokenize) in surface mode.
pub fn parse(tokens: &[Token], file: &str) -> Result<Module, Vec<Diagnostic>> {
    parse_with_mode(tokens, file, ParseMode::Surface)
}

/// Parses a token stream; on failure returns every error found, with
/// recovery at class boundaries.
pub fn parse_with_mode(tokens: &[Token], file: &str, mode: ParseMode) -> Result<Module, Vec<Diagnostic>> {
    let mut p = Parser { tokens, pos: 0, file, mode };
    let mut module = Module::default();
    let mut diags = Vec::new();
    while !p.at(TokenKind::Eoi) {
        if !p.at_class_start() {
            diags.push(p.unexpected("class declaration"));
            p.bump();
            p.sync_to_class();
            continue;
        }
        match p.class_decl() {
            Ok(c) => module.classes.push(c),
            Err(d) => {
                diags.push(d);
                p.bump();
                p.sync_to_class();
            }
        }
    }
    if diags.is_empty() {
        Ok(module)
    } else {
        Err(diags)
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn at(&self, kind: TokenKind) -> bool {
        self.peek().kind == kind
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos.min(self.tokens.len() - 1)];
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn here(&self) -> Pos {
        let t = self.peek();
        Pos { line: t.line, col: t.col }
    }

    fn error_at(&self, code: Code, msg: impl Into<String>, pos: Pos) -> Diagnostic {
        Diagnostic::new(code, msg, self.file, pos.line, pos.col)
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        let found = match t.kind {
            TokenKind::Eoi => "end of input".to_string(),
            _ => format!("'{}'", t.text),
        };
        self.error_at(Code::E005, format!("expected {expected}, found {found}"), self.here())
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<&Token> {
        if self.at(kind) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(kind.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<Name> {
        if !self.at(TokenKind::Ident) {
            return Err(self.unexpected(what));
        }
        let pos = self.here();
        let name = self.bump().text.clone();
        if self.mode == ParseMode::Surface && is_reserved(&name) {
            return Err(self.error_at(Code::E006, format!("'{name}' is a reserved identifier"), pos));
        }
        Ok(Name { name, pos })
    }

    fn surface_only(&self, what: &str) -> PResult<()> {
        match self.mode {
            ParseMode::Surface => Ok(()),
            ParseMode::Core => Err(self.error_at(
                Code::E005,
                format!("{what} is not allowed in core text"),
                self.here(),
            )),
        }
    }

    fn at_class_start(&self) -> bool {
        match self.peek().kind {
            TokenKind::KwExtensible | TokenKind::KwDynamic | TokenKind::KwClass => true,
            TokenKind::KwExtend => {
                self.peek_at(1).kind == TokenKind::KwClass
                    || (self.peek_at(1).kind == TokenKind::Ident && self.peek_at(2).kind == TokenKind::KwClass)
            }
            _ => false,
        }
    }

    fn sync_to_class(&mut self) {
        while !self.at(TokenKind::Eoi) && !self.at_class_start() {
            self.bump();
        }
    }

    fn class_decl(&mut self) -> PResult<ClassDecl> {
        let pos = self.here();
        let mut is_extensible = false;
        let mut is_classer = false;
        let mut extend_target = None;
        if self.at(TokenKind::KwExtensible) {
            self.surface_only("'extensible'")?;
            self.bump();
            is_extensible = true;
        }
        if self.at(TokenKind::KwDynamic) {
            self.surface_only("'dynamic'")?;
            self.bump();
            is_classer = true;
        }
        if self.at(TokenKind::KwExtend) {
            self.surface_only("'extend'")?;
            self.bump();
            extend_target = Some(self.ident("identifier after 'extend'")?);
        }
        self.expect(TokenKind::KwClass)?;
        let name = self.ident("class name")?.name;
        let base = if self.eat(TokenKind::KwExtends) {
            Some(self.ident("base class name")?)
        } else {
            None
        };
        self.expect(TokenKind::LBrace)?;
        let mut members = Vec::new();
        while !self.at(TokenKind::RBrace) {
            members.push(self.member()?);
        }
        self.expect(TokenKind::RBrace)?;
        Ok(ClassDecl {
            pos,
            file: self.file.to_string(),
            name,
            is_extensible,
            is_classer,
            extend_target,
            base,
            members,
        })
    }

    fn params(&mut self) -> PResult<Vec<String>> {
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if !self.at(TokenKind::RParen) {
            loop {
                params.push(self.ident("parameter name")?.name);
                if !self.eat(TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        Ok(params)
    }

    fn member(&mut self) -> PResult<Member> {
        let pos = self.here();
        match self.peek().kind {
            TokenKind::KwVar => {
                self.bump();
                let name = self.ident("field name")?.name;
                self.expect(TokenKind::Semi)?;
                Ok(Member::Field(FieldDecl { pos, name }))
            }
            TokenKind::KwStatic | TokenKind::KwMethod => {
                let is_static = self.eat(TokenKind::KwStatic);
                self.expect(TokenKind::KwMethod)?;
                let name = self.ident("method name")?.name;
                let params = self.params()?;
                let body = self.block()?;
                Ok(Member::Method(MethodDecl { pos, name, is_static, params, body }))
            }
            TokenKind::KwPrivate | TokenKind::KwConstructor => {
                let is_private = self.eat(TokenKind::KwPrivate);
                self.expect(TokenKind::KwConstructor)?;
                let params = self.params()?;
                let body = self.block()?;
                Ok(Member::Ctor(CtorDecl { pos, is_private, params, body }))
            }
            TokenKind::KwExtend => {
                self.surface_only("E-method declaration")?;
                self.bump();
                let name = self.ident("E-method name")?.name;
                let params = self.params()?;
                if self.eat(TokenKind::Semi) {
                    Ok(Member::EMethodSig(EMethodSig { pos, name, params }))
                } else {
                    let body = self.block()?;
                    Ok(Member::EMethodBehavior(EMethodBehavior { pos, name, params, body }))
                }
            }
            _ => Err(self.unexpected("member declaration")),
        }
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at(TokenKind::RBrace) {
            if self.at(TokenKind::Eoi) {
                return Err(self.unexpected("'}'"));
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(Block { stmts })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let pos = self.here();
        let kind = match self.peek().kind {
            TokenKind::KwVar => {
                self.bump();
                let name = self.ident("variable name")?.name;
                self.expect(TokenKind::Assign)?;
                let init = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Var { name, init }
            }
            TokenKind::KwIf => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let then_block = self.block()?;
                let else_block = if self.eat(TokenKind::KwElse) {
                    if self.at(TokenKind::KwIf) {
                        // `else if` is sugar for `else { if ... }`
                        Some(Block { stmts: vec![self.stmt()?] })
                    } else {
                        Some(self.block()?)
                    }
                } else {
                    None
                };
                StmtKind::If { cond, then_block, else_block }
            }
            TokenKind::KwWhile => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let body = self.block()?;
                StmtKind::While { cond, body }
            }
            TokenKind::KwReturn => {
                self.bump();
                let value = if self.at(TokenKind::Semi) { None } else { Some(self.expr()?) };
                self.expect(TokenKind::Semi)?;
                StmtKind::Return(value)
            }
            TokenKind::KwThrow => {
                self.bump();
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Throw(value)
            }
            TokenKind::KwTry => {
                self.bump();
                let body = self.block()?;
                self.expect(TokenKind::KwCatch)?;
                self.expect(TokenKind::LParen)?;
                let var = self.ident("catch variable")?.name;
                self.expect(TokenKind::RParen)?;
                let handler = self.block()?;
                StmtKind::Try { body, var, handler }
            }
            TokenKind::KwDelete => {
                self.surface_only("'delete'")?;
                self.bump();
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                StmtKind::Delete(value)
            }
            _ => {
                let target = self.expr()?;
                if self.at(TokenKind::Assign) {
                    if !matches!(
                        target.kind,
                        ExprKind::Ident(_) | ExprKind::Field { .. } | ExprKind::Index { .. }
                    ) {
                        return Err(self.error_at(Code::E005, "invalid assignment target", target.pos));
                    }
                    self.bump();
                    let value = self.expr()?;
                    self.expect(TokenKind::Semi)?;
                    StmtKind::Assign { target, value }
                } else {
                    self.expect(TokenKind::Semi)?;
                    StmtKind::Expr(target)
                }
            }
        };
        Ok(Stmt { pos, kind })
    }

    fn args(&mut self, close: TokenKind) -> PResult<Vec<Expr>> {
        let mut args = Vec::new();
        if !self.at(close) {
            loop {
                args.push(self.expr()?);
                if !self.eat(TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(close)?;
        Ok(args)
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        use BinaryOp::*;
        Some(match self.peek().kind {
            TokenKind::OrOr => Or,
            TokenKind::AndAnd => And,
            TokenKind::EqEq => Eq,
            TokenKind::NotEq => Ne,
            TokenKind::Lt => Lt,
            TokenKind::Le => Le,
            TokenKind::Gt => Gt,
            TokenKind::Ge => Ge,
            TokenKind::Plus => Add,
            TokenKind::Minus => Sub,
            TokenKind::Star => Mul,
            TokenKind::Slash => Div,
            TokenKind::Percent => Rem,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            if op.precedence() < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::new(lhs.pos, ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) });
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.here();
        let op = match self.peek().kind {
            TokenKind::Bang => UnaryOp::Not,
            TokenKind::Minus => UnaryOp::Neg,
            _ => return self.postfix(),
        };
        self.bump();
        let expr = self.unary()?;
        Ok(Expr::new(pos, ExprKind::Unary { op, expr: Box::new(expr) }))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            let pos = e.pos;
            if self.eat(TokenKind::Dot) {
                if self.at(TokenKind::LBrace) {
                    self.surface_only("classer access '.{...}'")?;
                    self.bump();
                    let classer = self.ident("classer name")?.name;
                    self.expect(TokenKind::RBrace)?;
                    if self.at(TokenKind::Dot) {
                        self.bump();
                        let method = self.ident("classer method name")?.name;
                        if !self.at(TokenKind::LParen) {
                            return Err(self.unexpected("'(' after classer method name"));
                        }
                        self.bump();
                        let args = self.args(TokenKind::RParen)?;
                        e = Expr::new(pos, ExprKind::ClasserAccess { obj: Box::new(e), classer, method, args });
                    } else {
                        e = Expr::new(pos, ExprKind::ClasserTest { obj: Box::new(e), classer });
                    }
                } else {
                    let name = self.ident("member name")?.name;
                    if self.eat(TokenKind::LParen) {
                        let args = self.args(TokenKind::RParen)?;
                        e = Expr::new(pos, ExprKind::MethodCall { obj: Box::new(e), method: name, args });
                    } else {
                        e = Expr::new(pos, ExprKind::Field { obj: Box::new(e), name });
                    }
                }
            } else if self.eat(TokenKind::LBracket) {
                let index = self.expr()?;
                self.expect(TokenKind::RBracket)?;
                e = Expr::new(pos, ExprKind::Index { obj: Box::new(e), index: Box::new(index) });
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.here();
        let kind = match self.peek().kind {
            TokenKind::Int => {
                let text = &self.bump().text;
                ExprKind::Int(text.parse().expect("lexer validated integer range"))
            }
            TokenKind::Str => ExprKind::Str(unescape(&self.bump().text)),
            TokenKind::KwTrue => {
                self.bump();
                ExprKind::Bool(true)
            }
            TokenKind::KwFalse => {
                self.bump();
                ExprKind::Bool(false)
            }
            TokenKind::KwNull => {
                self.bump();
                ExprKind::Null
            }
            TokenKind::KwThis => {
                self.bump();
                ExprKind::This
            }
            TokenKind::LBracket => {
                self.bump();
                ExprKind::List(self.args(TokenKind::RBracket)?)
            }
            TokenKind::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                return Ok(e);
            }
            TokenKind::KwNew => {
                self.bump();
                let class = self.ident("class name after 'new'")?.name;
                self.expect(TokenKind::LParen)?;
                let args = self.args(TokenKind::RParen)?;
                ExprKind::New { class, args }
            }
            TokenKind::KwCallEMethod => {
                self.surface_only("'call_e_method'")?;
                self.bump();
                self.expect(TokenKind::LParen)?;
                let name = self.ident("E-method name")?.name;
                let args = if self.eat(TokenKind::Comma) {
                    self.args(TokenKind::RParen)?
                } else {
                    self.expect(TokenKind::RParen)?;
                    Vec::new()
                };
                ExprKind::CallEMethod { name, args }
            }
            TokenKind::Ident => {
                let is_call = self.peek_at(1).kind == TokenKind::LParen;
                let text = self.peek().text.clone();
                if self.mode == ParseMode::Core && is_call && INTRINSICS.contains(&text.as_str()) {
                    self.bump();
                } else {
                    self.ident("identifier")?;
                }
                if is_call {
                    self.bump();
                    let args = self.args(TokenKind::RParen)?;
                    ExprKind::Call { func: text, args }
                } else {
                    ExprKind::Ident(text)
                }
            }
            _ => return Err(self.unexpected("expression")),
        };
        Ok(Expr::new(pos, kind))
    }
}
