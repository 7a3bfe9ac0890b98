#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub kind: TokKind,
    pub text: String,
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub end_line: u32,
}

impl Token {
    pub fn is(&self, s: &str) -> bool {
        self.text == s && matches!(self.kind, TokKind::Ident | TokKind::Punct)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Comment {
    pub text: String,
    pub line: u32,
}

#[derive(Debug, Default)]
pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: Vec<Comment>,
    /// Lines holding an unterminated literal or comment.
    pub errors: Vec<u32>,
}

// Longest first so that maximal munch works.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=",
];

pub(crate) fn lex(src: &str) -> Lexed {
    let bytes = src.as_bytes();
    let mut out = Lexed::default();
    let mut i = 0;
    let mut line = 1u32;

    let count_lines = |s: &str| s.bytes().filter(|b| *b == b'\n').count() as u32;

    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            let end = src[i..].find('\n').map_or(src.len(), |e| i + e);
            out.comments.push(Comment {
                text: src[i + 2..end].trim().to_string(),
                line,
            });
            i = end;
            continue;
        }
        if src[i..].starts_with("/*") {
            let (end, closed) = match src[i + 2..].find("*/") {
                Some(e) => (i + 2 + e + 2, true),
                None => (src.len(), false),
            };
            let body = &src[i + 2..if closed { end - 2 } else { end }];
            out.comments.push(Comment {
                text: body.trim_matches(|c: char| c == '*' || c.is_whitespace()).to_string(),
                line,
            });
            if !closed {
                out.errors.push(line);
            }
            line += count_lines(&src[i..end]);
            i = end;
            continue;
        }

        let start = i;
        let start_line = line;
        let kind;
        if c == b'"' {
            kind = TokKind::Str;
            if src[i..].starts_with("\"\"\"") {
                match src[i + 3..].find("\"\"\"") {
                    Some(e) => i = i + 3 + e + 3,
                    None => {
                        out.errors.push(line);
                        i = src.len();
                    }
                }
            } else {
                i = scan_quoted(bytes, i, b'"').unwrap_or_else(|| {
                    out.errors.push(line);
                    line_end(bytes, start)
                });
            }
        } else if c == b'\'' {
            kind = TokKind::Char;
            i = scan_quoted(bytes, i, b'\'').unwrap_or_else(|| {
                out.errors.push(line);
                line_end(bytes, start)
            });
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            kind = TokKind::Number;
            i += 1;
            while i < bytes.len() {
                let d = bytes[i];
                let exp_sign = (d == b'+' || d == b'-')
                    && matches!(bytes[i - 1], b'e' | b'E' | b'p' | b'P')
                    && !src[start..i].starts_with("0x");
                if d.is_ascii_alphanumeric() || d == b'_' || d == b'.' || exp_sign {
                    i += 1;
                } else {
                    break;
                }
            }
        } else if c == b'_' || c == b'$' || c.is_ascii_alphabetic() || c >= 0x80 {
            kind = TokKind::Ident;
            while i < bytes.len() {
                let d = bytes[i];
                if d == b'_' || d == b'$' || d.is_ascii_alphanumeric() || d >= 0x80 {
                    i += 1;
                } else {
                    break;
                }
            }
            // stay on a char boundary
            while !src.is_char_boundary(i) {
                i += 1;
            }
        } else {
            kind = TokKind::Punct;
            let op = OPERATORS.iter().find(|op| src[i..].starts_with(**op));
            i += op.map_or(1, |op| op.len());
            while !src.is_char_boundary(i) {
                i += 1;
            }
        }
        let text = &src[start..i];
        line += count_lines(text);
        out.tokens.push(Token {
            kind,
            text: text.to_string(),
            start,
            end: i,
            line: start_line,
            end_line: line,
        });
    }
    out
}

fn scan_quoted(bytes: &[u8], open: usize, quote: u8) -> Option<usize> {
    let mut i = open + 1;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 2,
            b'\n' => return None,
            b if b == quote => return Some(i + 1),
            _ => i += 1,
        }
    }
    None
}

fn line_end(bytes: &[u8], from: usize) -> usize {
    bytes[from..]
        .iter()
        .position(|b| *b == b'\n')
        .map_or(bytes.len(), |p| from + p)
}
