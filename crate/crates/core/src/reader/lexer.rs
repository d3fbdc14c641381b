use crate::ast::Pos;
use crate::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    /// `( )`
    Paren,
    /// `< >`
    Angle,
    /// `[ ]`
    Square,
    /// `{ }`
    Curly,
    /// `{| |}`
    Hash,
}

impl Bracket {
    pub fn open_str(self) -> &'static str {
        match self {
            Bracket::Paren => "(",
            Bracket::Angle => "<",
            Bracket::Square => "[",
            Bracket::Curly => "{",
            Bracket::Hash => "{|",
        }
    }

    pub fn close_str(self) -> &'static str {
        match self {
            Bracket::Paren => ")",
            Bracket::Angle => ">",
            Bracket::Square => "]",
            Bracket::Curly => "}",
            Bracket::Hash => "|}",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Open(Bracket),
    Close(Bracket),
    Int(i64),
    Str(String),
    Bool(bool),
    Symbol(String),
    /// `$`, pattern-variable or hole marker.
    Dollar,
    /// `,`, value-pattern marker.
    Comma,
    /// `!`, not-pattern marker.
    Bang,
    /// `_` directly after an identifier, number or `)`: introduces an index.
    IndexSep,
    /// `@`, reserved.
    At,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
    /// No whitespace or comment separates this token from the previous one.
    pub joined: bool,
}

fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '+' | '*' | '/' | '?' | '=' | '&' | '|' | '.' | '%' | '\'' | ':' | '^' | '~' | '!')
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
    tokens: Vec<Token>,
    joined: bool,
    open: Vec<Bracket>,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.column }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn push(&mut self, kind: TokenKind, pos: Pos) {
        self.tokens.push(Token { kind, pos, joined: self.joined });
        self.joined = true;
    }

    /// Whether an `_` at the current point continues the previous token as
    /// an index separator.
    fn index_follows(&self) -> bool {
        self.joined
            && matches!(
                self.tokens.last().map(|t| &t.kind),
                Some(TokenKind::Symbol(_) | TokenKind::Int(_) | TokenKind::Close(Bracket::Paren))
            )
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        while let Some(&c) = self.chars.peek() {
            let pos = self.pos();
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                    self.joined = false;
                }
                ';' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                    self.joined = false;
                }
                '(' | '[' | '<' => {
                    self.bump();
                    let b = match c {
                        '(' => Bracket::Paren,
                        '[' => Bracket::Square,
                        _ => Bracket::Angle,
                    };
                    self.open.push(b);
                    self.push(TokenKind::Open(b), pos);
                }
                ')' | ']' | '>' | '}' => {
                    self.bump();
                    let b = match c {
                        ')' => Bracket::Paren,
                        ']' => Bracket::Square,
                        '>' => Bracket::Angle,
                        _ => Bracket::Curly,
                    };
                    self.close(b, pos)?;
                }
                '{' => {
                    self.bump();
                    if self.chars.peek() == Some(&'|') {
                        self.bump();
                        self.open.push(Bracket::Hash);
                        self.push(TokenKind::Open(Bracket::Hash), pos);
                    } else {
                        self.open.push(Bracket::Curly);
                        self.push(TokenKind::Open(Bracket::Curly), pos);
                    }
                }
                '$' => {
                    self.bump();
                    self.push(TokenKind::Dollar, pos);
                }
                ',' => {
                    self.bump();
                    self.push(TokenKind::Comma, pos);
                }
                '!' => {
                    self.bump();
                    self.push(TokenKind::Bang, pos);
                }
                '@' => {
                    self.bump();
                    self.push(TokenKind::At, pos);
                }
                '_' => {
                    self.bump();
                    if self.index_follows() {
                        self.push(TokenKind::IndexSep, pos);
                    } else {
                        self.push(TokenKind::Symbol("_".into()), pos);
                    }
                }
                '"' => self.string(pos)?,
                '#' => {
                    self.bump();
                    let kind = match self.bump() {
                        Some('t') => TokenKind::Bool(true),
                        Some('f') => TokenKind::Bool(false),
                        _ => return Err(ParseError::new(pos, "expected #t or #f")),
                    };
                    if self.chars.peek().is_some_and(|&c| is_symbol_char(c)) {
                        return Err(ParseError::new(pos, "expected #t or #f"));
                    }
                    self.push(kind, pos);
                }
                '|' => {
                    self.bump();
                    if self.chars.peek() == Some(&'}') {
                        self.bump();
                        self.close(Bracket::Hash, pos)?;
                    } else {
                        let text = self.symbol_run("|");
                        self.push(TokenKind::Symbol(text), pos);
                    }
                }
                c if is_symbol_char(c) => {
                    let text = self.symbol_run("");
                    let looks_numeric = text.starts_with(|c: char| c.is_ascii_digit())
                        || (text.len() > 1 && text.starts_with('-') && text[1..].starts_with(|c: char| c.is_ascii_digit()));
                    let kind = if looks_numeric {
                        match text.parse::<i64>() {
                            Ok(n) => TokenKind::Int(n),
                            Err(_) => {
                                return Err(ParseError::new(pos, format!("malformed integer literal '{text}'")))
                            }
                        }
                    } else {
                        TokenKind::Symbol(text)
                    };
                    self.push(kind, pos);
                }
                other => return Err(ParseError::new(pos, format!("unexpected character '{other}'"))),
            }
        }
        Ok(self.tokens)
    }

    fn close(&mut self, b: Bracket, pos: Pos) -> Result<(), ParseError> {
        match self.open.pop() {
            Some(open) if open == b => {
                self.push(TokenKind::Close(b), pos);
                Ok(())
            }
            Some(open) => Err(ParseError::new(
                pos,
                format!("mismatched '{}': expected '{}'", b.close_str(), open.close_str()),
            )),
            None => Err(ParseError::new(pos, format!("stray '{}'", b.close_str()))),
        }
    }

    fn symbol_run(&mut self, prefix: &str) -> String {
        let mut text = String::from(prefix);
        while let Some(&c) = self.chars.peek() {
            // `|}` closes a hash even when glued to a symbol.
            if c == '|' {
                let mut ahead = self.chars.clone();
                ahead.next();
                if ahead.peek() == Some(&'}') {
                    break;
                }
            }
            if !is_symbol_char(c) {
                break;
            }
            text.push(c);
            self.bump();
        }
        text
    }

    fn string(&mut self, pos: Pos) -> Result<(), ParseError> {
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return Err(ParseError::eof(pos, "unterminated string literal")),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('n') => text.push('\n'),
                    Some('t') => text.push('\t'),
                    Some('"') => text.push('"'),
                    Some('\\') => text.push('\\'),
                    Some(other) => {
                        return Err(ParseError::new(pos, format!("unknown escape '\\{other}' in string")))
                    }
                    None => return Err(ParseError::eof(pos, "unterminated string literal")),
                },
                Some(c) => text.push(c),
            }
        }
        self.push(TokenKind::Str(text), pos);
        Ok(())
    }
}

/// Splits source text into tokens, dropping whitespace and `;` comments.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    Lexer { chars: text.chars().peekable(), line: 1, column: 1, tokens: Vec::new(), joined: false, open: Vec::new() }.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        tokenize(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn collection_literal() {
        assert_eq!(
            kinds("{1 2 3}"),
            vec![
                TokenKind::Open(Bracket::Curly),
                TokenKind::Int(1),
                TokenKind::Int(2),
                TokenKind::Int(3),
                TokenKind::Close(Bracket::Curly)
            ]
        );
    }

    #[test]
    fn comment_yields_nothing() {
        assert_eq!(kinds("; c\n#t"), vec![TokenKind::Bool(true)]);
    }

    #[test]
    fn indexed_pattern_variable() {
        assert_eq!(
            kinds("$x_1"),
            vec![TokenKind::Dollar, TokenKind::Symbol("x".into()), TokenKind::IndexSep, TokenKind::Int(1)]
        );
    }

    #[test]
    fn wildcard_versus_index_separator() {
        assert_eq!(
            kinds("<cons _ x_(- i 1)>"),
            vec![
                TokenKind::Open(Bracket::Angle),
                TokenKind::Symbol("cons".into()),
                TokenKind::Symbol("_".into()),
                TokenKind::Symbol("x".into()),
                TokenKind::IndexSep,
                TokenKind::Open(Bracket::Paren),
                TokenKind::Symbol("-".into()),
                TokenKind::Symbol("i".into()),
                TokenKind::Int(1),
                TokenKind::Close(Bracket::Paren),
                TokenKind::Close(Bracket::Angle),
            ]
        );
    }

    #[test]
    fn hash_brackets_and_negative_numbers() {
        assert_eq!(
            kinds("{|[1 -2]|}"),
            vec![
                TokenKind::Open(Bracket::Hash),
                TokenKind::Open(Bracket::Square),
                TokenKind::Int(1),
                TokenKind::Int(-2),
                TokenKind::Close(Bracket::Square),
                TokenKind::Close(Bracket::Hash),
            ]
        );
        assert_eq!(kinds("(- 3)")[1], TokenKind::Symbol("-".into()));
    }

    #[test]
    fn or_pattern_head_and_ellipsis() {
        assert_eq!(
            kinds("(| ,2 ...)"),
            vec![
                TokenKind::Open(Bracket::Paren),
                TokenKind::Symbol("|".into()),
                TokenKind::Comma,
                TokenKind::Int(2),
                TokenKind::Symbol("...".into()),
                TokenKind::Close(Bracket::Paren),
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("(a\n  b)").unwrap();
        assert_eq!(toks[2].pos, Pos { line: 2, column: 3 });
        assert!(!toks[2].joined);
        assert!(toks[3].joined);
    }

    #[test]
    fn unterminated_string_is_incomplete() {
        let err = tokenize("\"abc").unwrap_err();
        assert!(err.incomplete);
        assert_eq!(err.pos, Pos { line: 1, column: 1 });
    }

    #[test]
    fn stray_and_mismatched_closers() {
        let err = tokenize("1 )").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, column: 3 });
        assert!(!err.incomplete);
        assert!(tokenize("(a]").unwrap_err().message.contains("mismatched"));
    }

    #[test]
    fn string_escapes() {
        assert_eq!(kinds(r#""a\"b\n""#), vec![TokenKind::Str("a\"b\n".into())]);
    }
}
