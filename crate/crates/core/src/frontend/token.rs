use std::fmt;

use crate::diagnostic::{Code, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Int,
    Str,
    KwExtensible,
    KwDynamic,
    KwExtend,
    KwClass,
    KwExtends,
    KwVar,
    KwMethod,
    KwStatic,
    KwPrivate,
    KwConstructor,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwThrow,
    KwTry,
    KwCatch,
    KwDelete,
    KwNew,
    KwThis,
    KwTrue,
    KwFalse,
    KwNull,
    KwCallEMethod,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Dot,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Eoi,
}

impl TokenKind {
    pub fn keyword(word: &str) -> Option<TokenKind> {
        use TokenKind::*;
        Some(match word {
            "extensible" => KwExtensible,
            "dynamic" => KwDynamic,
            "extend" => KwExtend,
            "class" => KwClass,
            "extends" => KwExtends,
            "var" => KwVar,
            "method" => KwMethod,
            "static" => KwStatic,
            "private" => KwPrivate,
            "constructor" => KwConstructor,
            "if" => KwIf,
            "else" => KwElse,
            "while" => KwWhile,
            "return" => KwReturn,
            "throw" => KwThrow,
            "try" => KwTry,
            "catch" => KwCatch,
            "delete" => KwDelete,
            "new" => KwNew,
            "this" => KwThis,
            "true" => KwTrue,
            "false" => KwFalse,
            "null" => KwNull,
            "call_e_method" => KwCallEMethod,
            _ => return None,
        })
    }

    /// Human-readable description used in "expected X, found Y" messages.
    pub fn describe(self) -> &'static str {
        use TokenKind::*;
        match self {
            Ident => "identifier",
            Int => "integer literal",
            Str => "string literal",
            KwExtensible => "'extensible'",
            KwDynamic => "'dynamic'",
            KwExtend => "'extend'",
            KwClass => "'class'",
            KwExtends => "'extends'",
            KwVar => "'var'",
            KwMethod => "'method'",
            KwStatic => "'static'",
            KwPrivate => "'private'",
            KwConstructor => "'constructor'",
            KwIf => "'if'",
            KwElse => "'else'",
            KwWhile => "'while'",
            KwReturn => "'return'",
            KwThrow => "'throw'",
            KwTry => "'try'",
            KwCatch => "'catch'",
            KwDelete => "'delete'",
            KwNew => "'new'",
            KwThis => "'this'",
            KwTrue => "'true'",
            KwFalse => "'false'",
            KwNull => "'null'",
            KwCallEMethod => "'call_e_method'",
            LParen => "'('",
            RParen => "')'",
            LBrace => "'{'",
            RBrace => "'}'",
            LBracket => "'['",
            RBracket => "']'",
            Comma => "','",
            Semi => "';'",
            Dot => "'.'",
            Assign => "'='",
            Plus => "'+'",
            Minus => "'-'",
            Star => "'*'",
            Slash => "'/'",
            Percent => "'%'",
            EqEq => "'=='",
            NotEq => "'!='",
            Lt => "'<'",
            Le => "'<='",
            Gt => "'>'",
            Ge => "'>='",
            AndAnd => "'&&'",
            OrOr => "'||'",
            Bang => "'!'",
            Eoi => "end of input",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// The exact source slice; empty only for `Eoi`.
    pub text: String,
    pub line: u32,
    pub col: u32,
    /// Byte offset of the first character.
    pub offset: usize,
}

struct Lexer<'a> {
    src: &'a str,
    file: &'a str,
    pos: usize,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
    diags: Vec<Diagnostic>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(&mut self, code: Code, msg: String, line: u32, col: u32) {
        self.diags.push(Diagnostic::new(code, msg, self.file, line, col));
    }

    fn push(&mut self, kind: TokenKind, start: usize, line: u32, col: u32) {
        self.tokens.push(Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            line,
            col,
            offset: start,
        });
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let (start, line, col) = (self.pos, self.line, self.col);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '/' && self.peek2() == Some('/') {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                let kind = TokenKind::keyword(&self.src[start..self.pos]).unwrap_or(TokenKind::Ident);
                self.push(kind, start, line, col);
                continue;
            }
            if c.is_ascii_digit() {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                if self.src[start..self.pos].parse::<i64>().is_err() {
                    self.error(
                        Code::E004,
                        format!("integer literal '{}' is out of range", &self.src[start..self.pos]),
                        line,
                        col,
                    );
                } else {
                    self.push(TokenKind::Int, start, line, col);
                }
                continue;
            }
            if c == '"' {
                self.string(start, line, col);
                continue;
            }
            self.bump();
            let next = self.peek();
            use TokenKind::*;
            let kind = match (c, next) {
                ('=', Some('=')) => Some(EqEq),
                ('!', Some('=')) => Some(NotEq),
                ('<', Some('=')) => Some(Le),
                ('>', Some('=')) => Some(Ge),
                ('&', Some('&')) => Some(AndAnd),
                ('|', Some('|')) => Some(OrOr),
                _ => None,
            };
            if let Some(kind) = kind {
                self.bump();
                self.push(kind, start, line, col);
                continue;
            }
            let kind = match c {
                '(' => LParen,
                ')' => RParen,
                '{' => LBrace,
                '}' => RBrace,
                '[' => LBracket,
                ']' => RBracket,
                ',' => Comma,
                ';' => Semi,
                '.' => Dot,
                '=' => Assign,
                '+' => Plus,
                '-' => Minus,
                '*' => Star,
                '/' => Slash,
                '%' => Percent,
                '<' => Lt,
                '>' => Gt,
                '!' => Bang,
                other => {
                    self.error(Code::E003, format!("illegal character {other:?}"), line, col);
                    continue;
                }
            };
            self.push(kind, start, line, col);
        }
        self.tokens.push(Token {
            kind: TokenKind::Eoi,
            text: String::new(),
            line: self.line,
            col: self.col,
            offset: self.src.len(),
        });
    }

    fn string(&mut self, start: usize, line: u32, col: u32) {
        self.bump();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.error(Code::E002, "unterminated string literal".into(), line, col);
                    return;
                }
                Some('"') => {
                    self.bump();
                    self.push(TokenKind::Str, start, line, col);
                    return;
                }
                Some('\\') => {
                    let (eline, ecol) = (self.line, self.col);
                    self.bump();
                    match self.peek() {
                        Some('n' | 't' | '"' | '\\') => {
                            self.bump();
                        }
                        None | Some('\n') => {}
                        Some(other) => {
                            self.bump();
                            self.error(
                                Code::E008,
                                format!("invalid escape sequence '\\{other}'"),
                                eline,
                                ecol,
                            );
                        }
                    }
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }
}

/// Splits `source` into tokens, ending with an end-of-input token.
///
/// Lexing continues past errors so every lexical problem in the file is
/// reported at once.
pub fn tokenize(source: &str, file: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut lexer = Lexer {
        src: source,
        file,
        pos: 0,
        line: 1,
        col: 1,
        tokens: Vec::new(),
        diags: Vec::new(),
    };
    lexer.run();
    if lexer.diags.is_empty() {
        Ok(lexer.tokens)
    } else {
        Err(lexer.diags)
    }
}

/// Decodes the body of a string token (quotes included in `text`).
pub fn unescape(text: &str) -> String {
    let inner = &text[1..text.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Encodes a string value as a source literal, quotes included.
pub fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
