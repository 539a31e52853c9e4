use super::{Atom, Formula, KnowledgeBase, LogicError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next_token(&mut self) -> Result<(usize, Tok), LogicError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'-' if bytes.get(self.pos + 1) == Some(&b'>') => {
                self.pos += 2;
                return Ok((start, Tok::Implies));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = bytes[start..]
                    .iter()
                    .position(|b| !(b.is_ascii_alphanumeric() || *b == b'_'))
                    .map_or(bytes.len(), |n| start + n);
                self.pos = end;
                return Ok((start, Tok::Ident(self.src[start..end].to_string())));
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(LogicError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        self.pos += 1;
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: (usize, Tok),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, LogicError> {
        let mut lexer = Lexer { src, pos: 0 };
        let peeked = lexer.next_token()?;
        Ok(Parser { lexer, peeked })
    }

    fn bump(&mut self) -> Result<(usize, Tok), LogicError> {
        let next = self.lexer.next_token()?;
        Ok(std::mem::replace(&mut self.peeked, next))
    }

    fn implication(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.disjunction()?;
        if self.peeked.1 == Tok::Implies {
            self.bump()?;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.conjunction()?;
        while self.peeked.1 == Tok::Or {
            self.bump()?;
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.unary()?;
        while self.peeked.1 == Tok::And {
            self.bump()?;
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        let (offset, tok) = self.bump()?;
        match tok {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::Ident(name) => Ok(Formula::Atom(Atom(name))),
            Tok::LParen => {
                let inner = self.implication()?;
                match self.bump()? {
                    (_, Tok::RParen) => Ok(inner),
                    (at, _) => Err(LogicError::Syntax {
                        offset: at,
                        message: "expected `)`".into(),
                    }),
                }
            }
            Tok::End => Err(LogicError::Syntax {
                offset,
                message: "unexpected end of input, expected a formula".into(),
            }),
            other => Err(LogicError::Syntax {
                offset,
                message: format!("unexpected {}", describe(&other)),
            }),
        }
    }
}

fn describe(tok: &Tok) -> &'static str {
    match tok {
        Tok::Ident(_) => "atom",
        Tok::Not => "`!`",
        Tok::And => "`&`",
        Tok::Or => "`|`",
        Tok::Implies => "`->`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

/// Parses one formula. Precedence `!` > `&` > `|` > `->`; `->` associates to the right.
pub fn parse_formula(src: &str) -> Result<Formula, LogicError> {
    let mut p = Parser::new(src)?;
    let f = p.implication()?;
    match &p.peeked {
        (_, Tok::End) => Ok(f),
        (offset, tok) => Err(LogicError::Syntax {
            offset: *offset,
            message: format!("unexpected {} after formula", describe(tok)),
        }),
    }
}

/// One formula per line; `#` comments to end of line; blank lines ignored.
pub fn parse_kb(src: &str) -> Result<KnowledgeBase, LogicError> {
    let mut kb = KnowledgeBase::default();
    for (i, line) in src.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let f = parse_formula(content).map_err(|e| LogicError::KbLine {
            line: i + 1,
            source: Box::new(e),
        })?;
        kb.insert(f);
    }
    Ok(kb)
}
