use super::{ParseError, ParseErrorKind, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number {
        value: f64,
        text: String,
    },
    Semi,
    Comma,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Arrow,
    /// `//@key rest-of-line`
    Directive {
        key: String,
        value: String,
    },
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let span_at = |i: usize, line: usize, line_start: usize| SourceSpan {
        line,
        column: text[line_start..i].chars().count() + 1,
        offset: i,
    };
    while i < bytes.len() {
        let c = bytes[i];
        let span = span_at(i, line, line_start);
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
            }
            b' ' | b'\t' | b'\r' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                let end = text[i..].find('\n').map_or(bytes.len(), |k| i + k);
                let body = &text[i + 2..end];
                if let Some(rest) = body.strip_prefix('@') {
                    let rest = rest.trim();
                    let (key, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    out.push(Token {
                        tok: Tok::Directive {
                            key: key.to_string(),
                            value: value.trim().to_string(),
                        },
                        span,
                    });
                }
                i = end;
            }
            b';' | b',' | b'[' | b']' | b'(' | b')' | b'+' | b'*' | b'/' => {
                let tok = match c {
                    b';' => Tok::Semi,
                    b',' => Tok::Comma,
                    b'[' => Tok::LBracket,
                    b']' => Tok::RBracket,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'+' => Tok::Plus,
                    b'*' => Tok::Star,
                    _ => Tok::Slash,
                };
                out.push(Token { tok, span });
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push(Token {
                        tok: Tok::Arrow,
                        span,
                    });
                    i += 2;
                } else {
                    out.push(Token {
                        tok: Tok::Minus,
                        span,
                    });
                    i += 1;
                }
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text_num = &text[start..i];
                let value: f64 = text_num.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::InvalidNumber(text_num.to_string()),
                    span,
                })?;
                out.push(Token {
                    tok: Tok::Number {
                        value,
                        text: text_num.to_string(),
                    },
                    span,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..i].to_string()),
                    span,
                });
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(ch),
                    span,
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span_at(bytes.len(), line, line_start),
    });
    Ok(out)
}
