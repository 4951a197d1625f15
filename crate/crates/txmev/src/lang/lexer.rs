//! Lexer for contracts and transactions.
//!
//! Two comment forms exist: `//` to end of line anywhere, and `#` to end of
//! line only outside the contract body (inside braces `#` is the balance
//! operator).

use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Const(String),
    Num(u64),
    KwContract,
    KwTokens,
    KwPre,
    KwSkip,
    KwIf,
    KwThen,
    KwElse,
    KwNull,
    KwTrue,
    KwFalse,
    KwAnd,
    KwOr,
    KwNot,
    KwSec,
    KwVer,
    KwCmt,
    KwRvl,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Question,
    Colon,
    Bang,
    Hash,
    At,
    Dot,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Const(s) => format!("constant `{s}`"),
            Tok::Num(n) => format!("number `{n}`"),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Ident(_) | Tok::Const(_) | Tok::Num(_) => "",
            Tok::KwContract => "contract",
            Tok::KwTokens => "tokens",
            Tok::KwPre => "pre",
            Tok::KwSkip => "skip",
            Tok::KwIf => "if",
            Tok::KwThen => "then",
            Tok::KwElse => "else",
            Tok::KwNull => "null",
            Tok::KwTrue => "true",
            Tok::KwFalse => "false",
            Tok::KwAnd => "and",
            Tok::KwOr => "or",
            Tok::KwNot => "not",
            Tok::KwSec => "sec",
            Tok::KwVer => "ver",
            Tok::KwCmt => "cmt",
            Tok::KwRvl => "rvl",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Assign => ":=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Question => "?",
            Tok::Colon => ":",
            Tok::Bang => "!",
            Tok::Hash => "#",
            Tok::At => "@",
            Tok::Dot => ".",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut brace_depth: u32 = 0;

    macro_rules! push {
        ($tok:expr, $l:expr, $c:expr) => {
            out.push(Spanned { tok: $tok, line: $l, col: $c })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '/' => {
                bump(&mut chars);
                if chars.peek() == Some(&'/') {
                    while let Some(&d) = chars.peek() {
                        if d == '\n' {
                            break;
                        }
                        bump(&mut chars);
                    }
                } else {
                    push!(Tok::Slash, tl, tc);
                }
            }
            '#' if brace_depth == 0 => {
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '#' => {
                bump(&mut chars);
                push!(Tok::Hash, tl, tc);
            }
            '{' => {
                bump(&mut chars);
                brace_depth += 1;
                push!(Tok::LBrace, tl, tc);
            }
            '}' => {
                bump(&mut chars);
                brace_depth = brace_depth.saturating_sub(1);
                push!(Tok::RBrace, tl, tc);
            }
            '(' => {
                bump(&mut chars);
                push!(Tok::LParen, tl, tc);
            }
            ')' => {
                bump(&mut chars);
                push!(Tok::RParen, tl, tc);
            }
            '[' => {
                bump(&mut chars);
                push!(Tok::LBracket, tl, tc);
            }
            ']' => {
                bump(&mut chars);
                push!(Tok::RBracket, tl, tc);
            }
            ',' => {
                bump(&mut chars);
                push!(Tok::Comma, tl, tc);
            }
            ';' => {
                bump(&mut chars);
                push!(Tok::Semi, tl, tc);
            }
            '+' => {
                bump(&mut chars);
                push!(Tok::Plus, tl, tc);
            }
            '-' => {
                bump(&mut chars);
                push!(Tok::Minus, tl, tc);
            }
            '*' => {
                bump(&mut chars);
                push!(Tok::Star, tl, tc);
            }
            '?' => {
                bump(&mut chars);
                push!(Tok::Question, tl, tc);
            }
            '@' => {
                bump(&mut chars);
                push!(Tok::At, tl, tc);
            }
            '.' => {
                bump(&mut chars);
                push!(Tok::Dot, tl, tc);
            }
            ':' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::Assign, tl, tc);
                } else {
                    push!(Tok::Colon, tl, tc);
                }
            }
            '=' => {
                bump(&mut chars);
                push!(Tok::Eq, tl, tc);
            }
            '!' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::Ne, tl, tc);
                } else {
                    push!(Tok::Bang, tl, tc);
                }
            }
            '<' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::Le, tl, tc);
                } else {
                    push!(Tok::Lt, tl, tc);
                }
            }
            '>' => {
                bump(&mut chars);
                if chars.peek() == Some(&'=') {
                    bump(&mut chars);
                    push!(Tok::Ge, tl, tc);
                } else {
                    push!(Tok::Gt, tl, tc);
                }
            }
            '0'..='9' => {
                let mut text = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let n = text.parse::<u64>().map_err(|_| ParseError {
                    line: tl,
                    col: tc,
                    msg: format!("number `{text}` does not fit in 64 bits"),
                })?;
                push!(Tok::Num(n), tl, tc);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        text.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let tok = match text.as_str() {
                    "contract" => Tok::KwContract,
                    "tokens" => Tok::KwTokens,
                    "pre" => Tok::KwPre,
                    "skip" => Tok::KwSkip,
                    "if" => Tok::KwIf,
                    "then" => Tok::KwThen,
                    "else" => Tok::KwElse,
                    "null" => Tok::KwNull,
                    "true" => Tok::KwTrue,
                    "false" => Tok::KwFalse,
                    "and" => Tok::KwAnd,
                    "or" => Tok::KwOr,
                    "not" => Tok::KwNot,
                    "sec" => Tok::KwSec,
                    "ver" => Tok::KwVer,
                    "cmt" => Tok::KwCmt,
                    "rvl" => Tok::KwRvl,
                    _ if text.chars().next().unwrap().is_ascii_uppercase() => Tok::Const(text),
                    _ => Tok::Ident(text),
                };
                push!(tok, tl, tc);
            }
            other => {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}
