use std::fmt;

use crate::error::{Error, Result, Span};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Num(String),
    ColonEq,
    StarEq,
    Hash,
    Colon,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "string \"{s}\""),
            Tok::Num(s) => write!(f, "`{s}`"),
            Tok::ColonEq => f.write_str("`:=`"),
            Tok::StarEq => f.write_str("`*=`"),
            Tok::Hash => f.write_str("`#`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let span = Span::new(line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match ch {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            ':' if chars.get(i + 1) == Some(&'=') => {
                out.push(Token { tok: Tok::ColonEq, span });
                advance(2, &mut i, &mut col);
            }
            '*' if chars.get(i + 1) == Some(&'=') => {
                out.push(Token { tok: Tok::StarEq, span });
                advance(2, &mut i, &mut col);
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(Error::Syntax {
                        span,
                        expected: "closing `\"`".into(),
                        found: "end of line".into(),
                    });
                }
                let s: String = chars[start..j].iter().collect();
                out.push(Token { tok: Tok::Str(s), span });
                let n = j + 1 - i;
                advance(n, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(Token { tok: Tok::Ident(s), span });
                let n = j - i;
                advance(n, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(Token { tok: Tok::Num(s), span });
                let n = j - i;
                advance(n, &mut i, &mut col);
            }
            _ => {
                let tok = match ch {
                    '#' | '□' => Tok::Hash,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    other => {
                        return Err(Error::Syntax {
                            span,
                            expected: "a token".into(),
                            found: format!("`{other}`"),
                        })
                    }
                };
                out.push(Token { tok, span });
                advance(1, &mut i, &mut col);
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("// hi\n  [q] :=0;").unwrap();
        assert_eq!(toks[0].tok, Tok::LBracket);
        assert_eq!((toks[0].span.line, toks[0].span.col), (2, 3));
        assert_eq!(toks[3].tok, Tok::ColonEq);
        assert_eq!(toks[4].tok, Tok::Num("0".into()));
    }

    #[test]
    fn box_alias() {
        let toks = tokenize("a □ b").unwrap();
        assert_eq!(toks[1].tok, Tok::Hash);
    }

    #[test]
    fn unterminated_string() {
        assert!(matches!(tokenize("load \"abc"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn stray_character() {
        assert!(matches!(tokenize("skip $"), Err(Error::Syntax { .. })));
    }
}
