//! Tokenizer for the `.inet` program syntax.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Interact, // ><
    Arrow,    // ->
    Tilde,
    Pipe,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    KwMod,
    KwAnd,
    KwOr,
    KwNot,
    KwCase,
    KwOf,
    KwOtherwise,
    KwTrue,
    KwFalse,
    KwSymbols,
    KwRules,
    KwNets,
    KwFn,
    KwData,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Int(i) => write!(f, "`{}`", i),
            Tok::Interact => write!(f, "`><`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Tilde => write!(f, "`~`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::EqEq => write!(f, "`==`"),
            Tok::Ne => write!(f, "`!=`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Ge => write!(f, "`>=`"),
            Tok::KwMod => write!(f, "`mod`"),
            Tok::KwAnd => write!(f, "`and`"),
            Tok::KwOr => write!(f, "`or`"),
            Tok::KwNot => write!(f, "`not`"),
            Tok::KwCase => write!(f, "`case`"),
            Tok::KwOf => write!(f, "`of`"),
            Tok::KwOtherwise => write!(f, "`otherwise`"),
            Tok::KwTrue => write!(f, "`true`"),
            Tok::KwFalse => write!(f, "`false`"),
            Tok::KwSymbols => write!(f, "`symbols`"),
            Tok::KwRules => write!(f, "`rules`"),
            Tok::KwNets => write!(f, "`nets`"),
            Tok::KwFn => write!(f, "`fn`"),
            Tok::KwData => write!(f, "`data`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "mod" => Tok::KwMod,
        "and" => Tok::KwAnd,
        "or" => Tok::KwOr,
        "not" => Tok::KwNot,
        "case" => Tok::KwCase,
        "of" => Tok::KwOf,
        "otherwise" => Tok::KwOtherwise,
        "true" => Tok::KwTrue,
        "false" => Tok::KwFalse,
        "symbols" => Tok::KwSymbols,
        "rules" => Tok::KwRules,
        "nets" => Tok::KwNets,
        "fn" => Tok::KwFn,
        "data" => Tok::KwData,
        _ => return None,
    })
}

/// Tokenizes `text`. `#` starts a comment running to end of line. `=>` is
/// accepted as a synonym of `>=`.
pub fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! push {
        ($tok:expr, $len:expr) => {{
            out.push(Token {
                tok: $tok,
                line,
                col,
            });
            i += $len;
            col += $len;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '>' if next == Some('<') => push!(Tok::Interact, 2),
            '>' if next == Some('=') => push!(Tok::Ge, 2),
            '>' => push!(Tok::Gt, 1),
            '<' if next == Some('=') => push!(Tok::Le, 2),
            '<' => push!(Tok::Lt, 1),
            '-' if next == Some('>') => push!(Tok::Arrow, 2),
            '-' => push!(Tok::Minus, 1),
            '=' if next == Some('=') => push!(Tok::EqEq, 2),
            '=' if next == Some('>') => push!(Tok::Ge, 2),
            '!' if next == Some('=') => push!(Tok::Ne, 2),
            '~' => push!(Tok::Tilde, 1),
            '|' => push!(Tok::Pipe, 1),
            '(' => push!(Tok::LParen, 1),
            ')' => push!(Tok::RParen, 1),
            '{' => push!(Tok::LBrace, 1),
            '}' => push!(Tok::RBrace, 1),
            '[' => push!(Tok::LBracket, 1),
            ']' => push!(Tok::RBracket, 1),
            ',' => push!(Tok::Comma, 1),
            ';' => push!(Tok::Semi, 1),
            ':' => push!(Tok::Colon, 1),
            '+' => push!(Tok::Plus, 1),
            '*' => push!(Tok::Star, 1),
            '/' => push!(Tok::Slash, 1),
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let value: i64 = s.parse().map_err(|_| ParseError {
                    message: format!("integer literal `{}` out of range", s),
                    line,
                    col,
                })?;
                out.push(Token {
                    tok: Tok::Int(value),
                    line,
                    col,
                });
                col += i - start;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let tok = keyword(&s).unwrap_or(Tok::Ident(s));
                out.push(Token { tok, line, col });
                col += i - start;
            }
            other => {
                return Err(ParseError {
                    message: format!("unexpected character `{}`", other),
                    line,
                    col,
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
