use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub token: Token,
    pub pos: usize,
}

pub(crate) fn tokenize(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let token = match c {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b',' => Token::Comma,
            b'<' | b'>' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                if eq {
                    i += 1;
                }
                match (c, eq) {
                    (b'<', false) => Token::Lt,
                    (b'<', true) => Token::Le,
                    (_, false) => Token::Gt,
                    (_, true) => Token::Ge,
                }
            }
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i);
                let text = &source[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    position: start,
                    kind: ParseErrorKind::Syntax(format!("malformed number `{text}`")),
                })?;
                out.push(Spanned {
                    token: Token::Num(value),
                    pos: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Spanned {
                    token: Token::Ident(source[start..i].to_string()),
                    pos: start,
                });
                continue;
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::Syntax(format!("unexpected character `{ch}`")),
                });
            }
        };
        i += 1;
        out.push(Spanned { token, pos: start });
    }
    Ok(out)
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    // exponent only when digits follow, so `2e` stays `2` then identifier `e`
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Token> {
        tokenize(src).unwrap().into_iter().map(|s| s.token).collect()
    }

    #[test]
    fn numbers_with_exponents() {
        assert_eq!(kinds("1e-10"), vec![Token::Num(1e-10)]);
        assert_eq!(kinds("2.5E3"), vec![Token::Num(2500.0)]);
        assert_eq!(kinds(".5"), vec![Token::Num(0.5)]);
        assert_eq!(
            kinds("2e"),
            vec![Token::Num(2.0), Token::Ident("e".into())]
        );
    }

    #[test]
    fn comparison_operators() {
        assert_eq!(
            kinds("x1<=1>2"),
            vec![
                Token::Ident("x1".into()),
                Token::Le,
                Token::Num(1.0),
                Token::Gt,
                Token::Num(2.0)
            ]
        );
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("x1 # 2").unwrap_err();
        assert_eq!(err.position, 3);
    }
}
