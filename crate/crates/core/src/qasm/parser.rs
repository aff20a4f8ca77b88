use crate::circuit::{Circuit, Gate, GateKind, ParamExpr};

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind, SourceSpan};

/// Parse program text into a validated [`Circuit`].
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        qreg: None,
        creg: None,
    };
    p.program()
}

struct Register {
    name: String,
    size: usize,
}

/// Linear form `coeff * symbol + offset` accumulated while folding an expression.
#[derive(Clone, Debug)]
struct Linear {
    coeff: f64,
    symbol: Option<String>,
    offset: f64,
}

impl Linear {
    fn constant(v: f64) -> Self {
        Self {
            coeff: 0.0,
            symbol: None,
            offset: v,
        }
    }

    fn add(self, rhs: Linear, sign: f64) -> Option<Linear> {
        let symbol = match (self.symbol, rhs.symbol) {
            (Some(a), Some(b)) if a != b => return None,
            (a, b) => a.or(b),
        };
        Some(Linear {
            coeff: self.coeff + sign * rhs.coeff,
            symbol,
            offset: self.offset + sign * rhs.offset,
        })
    }

    fn scale(self, k: f64) -> Linear {
        Linear {
            coeff: self.coeff * k,
            symbol: self.symbol,
            offset: self.offset * k,
        }
    }

    fn into_param(self) -> ParamExpr {
        match self.symbol {
            None => ParamExpr::literal(self.offset),
            Some(s) => ParamExpr::linear(self.coeff, s, self.offset),
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qreg: Option<Register>,
    creg: Option<Register>,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number { text, .. } => format!("number `{text}`"),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Directive { key, .. } => format!("directive `{key}`"),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind, span: SourceSpan) -> Result<T, ParseError> {
        Err(ParseError { kind, span })
    }

    fn syntax<T>(&self, expected: &str) -> Result<T, ParseError> {
        let t = self.peek();
        self.err(
            ParseErrorKind::Syntax {
                expected: expected.into(),
                found: describe(&t.tok),
            },
            t.span,
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            self.syntax(what)
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => self.syntax(what),
        }
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        match &self.peek().tok {
            Tok::Number { text, .. } if text.bytes().all(|b| b.is_ascii_digit()) => {
                let text = text.clone();
                let span = self.bump().span;
                text.parse()
                    .or_else(|_| self.err(ParseErrorKind::InvalidNumber(text), span))
            }
            _ => self.syntax("integer"),
        }
    }

    fn program(&mut self) -> Result<Circuit, ParseError> {
        let mut name = None;
        let mut layout: Option<(Vec<usize>, SourceSpan)> = None;
        let mut gates = Vec::new();
        let mut header_allowed = true;
        loop {
            let tok = self.peek().clone();
            match &tok.tok {
                Tok::Eof => break,
                Tok::Directive { key, value } => {
                    self.bump();
                    match key.as_str() {
                        "name" => name = Some(value.clone()),
                        "layout" => {
                            let ids: Result<Vec<usize>, _> =
                                value.split_whitespace().map(str::parse).collect();
                            match ids {
                                Ok(ids) => layout = Some((ids, tok.span)),
                                Err(_) => {
                                    return self.err(
                                        ParseErrorKind::Directive(format!("layout `{value}`")),
                                        tok.span,
                                    )
                                }
                            }
                        }
                        other => {
                            return self.err(
                                ParseErrorKind::Directive(format!("unknown key `{other}`")),
                                tok.span,
                            )
                        }
                    }
                    continue;
                }
                Tok::Ident(word) => {
                    let word = word.clone();
                    match word.as_str() {
                        "OPENQASM" if header_allowed => {
                            self.bump();
                            match self.peek().tok {
                                Tok::Number { .. } => {
                                    self.bump();
                                }
                                _ => return self.syntax("version number"),
                            }
                            self.expect(Tok::Semi, "`;`")?;
                        }
                        "qreg" | "creg" => self.register(&word)?,
                        "measure" => gates.extend(self.measure()?),
                        _ => gates.extend(self.gate(&word)?),
                    }
                }
                _ => return self.syntax("statement"),
            }
            header_allowed = false;
        }
        let qreg = match &self.qreg {
            Some(r) => r,
            None => {
                let span = self.peek().span;
                return self.err(ParseErrorKind::UndeclaredRegister("qreg".into()), span);
            }
        };
        let mut c = Circuit::new(qreg.size, self.creg.as_ref().map_or(0, |r| r.size));
        if let Some(n) = name {
            c.name = n;
        }
        c.gates = gates;
        let span = layout.as_ref().map_or(
            SourceSpan {
                line: 1,
                column: 1,
                offset: 0,
            },
            |l| l.1,
        );
        c.layout = layout.map(|l| l.0);
        let v = c.validate();
        if !v.is_empty() {
            return self.err(ParseErrorKind::Invalid(v), span);
        }
        Ok(c)
    }

    fn register(&mut self, kw: &str) -> Result<(), ParseError> {
        let kw_span = self.bump().span;
        let (name, _) = self.ident("register name")?;
        self.expect(Tok::LBracket, "`[`")?;
        let size = self.integer()?;
        self.expect(Tok::RBracket, "`]`")?;
        self.expect(Tok::Semi, "`;`")?;
        let slot = if kw == "qreg" {
            &mut self.qreg
        } else {
            &mut self.creg
        };
        if slot.is_some() {
            let what = if kw == "qreg" { "quantum" } else { "classical" };
            return Err(ParseError {
                kind: ParseErrorKind::MultipleRegisters(what),
                span: kw_span,
            });
        }
        *slot = Some(Register { name, size });
        Ok(())
    }

    /// Returns the selected indices; a bare register name selects all of it.
    fn arg(&mut self, quantum: bool) -> Result<(Vec<usize>, SourceSpan), ParseError> {
        let (name, span) = self.ident("register operand")?;
        let reg = if quantum { &self.qreg } else { &self.creg };
        let size = match reg {
            Some(r) if r.name == name => r.size,
            _ => return self.err(ParseErrorKind::UndeclaredRegister(name), span),
        };
        if self.peek().tok == Tok::LBracket {
            self.bump();
            let idx_span = self.peek().span;
            let index = self.integer()?;
            self.expect(Tok::RBracket, "`]`")?;
            if index >= size {
                return self.err(
                    ParseErrorKind::IndexOutOfRange {
                        register: name,
                        index,
                    },
                    idx_span,
                );
            }
            Ok((vec![index], span))
        } else {
            Ok(((0..size).collect(), span))
        }
    }

    fn measure(&mut self) -> Result<Vec<Gate>, ParseError> {
        let kw = self.bump().span;
        let (q, _) = self.arg(true)?;
        self.expect(Tok::Arrow, "`->`")?;
        let (c, _) = self.arg(false)?;
        self.expect(Tok::Semi, "`;`")?;
        if q.len() != c.len() {
            return self.err(
                ParseErrorKind::Arity {
                    gate: "measure".into(),
                    what: "classical bits",
                    expected: q.len(),
                    found: c.len(),
                },
                kw,
            );
        }
        Ok(q.into_iter()
            .zip(c)
            .map(|(q, c)| Gate::measure(q, c))
            .collect())
    }

    fn gate(&mut self, name: &str) -> Result<Vec<Gate>, ParseError> {
        let name_span = self.bump().span;
        let param = if self.peek().tok == Tok::LParen {
            let lp = self.bump().span;
            let e = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            Some((e, lp))
        } else {
            None
        };
        let mut args = vec![self.arg(true)?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            args.push(self.arg(true)?);
        }
        self.expect(Tok::Semi, "`;`")?;

        let wants_param = matches!(name, "rx" | "ry" | "rz");
        let expected_qubits = match name {
            "x" | "sx" | "h" | "rx" | "ry" | "rz" | "reset" => 1,
            "cx" | "swap" => 2,
            "barrier" => 0,
            _ => return self.err(ParseErrorKind::UnknownGate(name.to_string()), name_span),
        };
        let found_params = usize::from(param.is_some());
        if found_params != usize::from(wants_param) {
            return self.err(
                ParseErrorKind::Arity {
                    gate: name.into(),
                    what: "parameters",
                    expected: usize::from(wants_param),
                    found: found_params,
                },
                param.as_ref().map_or(name_span, |p| p.1),
            );
        }
        if name == "barrier" {
            let qubits = args.into_iter().flat_map(|a| a.0).collect();
            return Ok(vec![Gate::barrier(qubits)]);
        }
        if args.len() != expected_qubits {
            return self.err(
                ParseErrorKind::Arity {
                    gate: name.into(),
                    what: "qubits",
                    expected: expected_qubits,
                    found: args.len(),
                },
                name_span,
            );
        }
        let param = param.map(|p| p.0.into_param());
        let make = |q: &[usize]| -> Gate {
            let kind = match name {
                "x" => GateKind::X,
                "sx" => GateKind::SX,
                "h" => GateKind::H,
                "rx" => GateKind::RX(param.clone().unwrap()),
                "ry" => GateKind::RY(param.clone().unwrap()),
                "rz" => GateKind::RZ(param.clone().unwrap()),
                "cx" => GateKind::CX,
                "swap" => GateKind::Swap,
                _ => GateKind::Reset,
            };
            Gate::new(kind, q.to_vec())
        };
        if expected_qubits == 1 {
            Ok(args[0].0.iter().map(|&q| make(&[q])).collect())
        } else {
            if args.iter().any(|a| a.0.len() != 1) {
                let span = args.iter().find(|a| a.0.len() != 1).unwrap().1;
                return self.syntax_at("indexed qubit operand", span);
            }
            Ok(vec![make(&[args[0].0[0], args[1].0[0]])])
        }
    }

    fn syntax_at<T>(&self, expected: &str, span: SourceSpan) -> Result<T, ParseError> {
        self.err(
            ParseErrorKind::Syntax {
                expected: expected.into(),
                found: "register".into(),
            },
            span,
        )
    }

    fn expr(&mut self) -> Result<Linear, ParseError> {
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek().tok {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => return Ok(acc),
            };
            let span = self.bump().span;
            let rhs = self.term()?;
            acc = match acc.add(rhs, sign) {
                Some(v) => v,
                None => return self.err(ParseErrorKind::NonLinear, span),
            };
        }
    }

    fn term(&mut self) -> Result<Linear, ParseError> {
        let mut acc = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => Tok::Star,
                Tok::Slash => Tok::Slash,
                _ => return Ok(acc),
            };
            let span = self.bump().span;
            let rhs = self.unary()?;
            acc = if op == Tok::Star {
                match (acc.symbol.is_some(), rhs.symbol.is_some()) {
                    (true, true) => return self.err(ParseErrorKind::NonLinear, span),
                    (false, _) => rhs.scale(acc.offset),
                    (true, false) => acc.scale(rhs.offset),
                }
            } else {
                if rhs.symbol.is_some() {
                    return self.err(ParseErrorKind::NonLinear, span);
                }
                if rhs.offset == 0.0 {
                    return self.err(ParseErrorKind::DivisionByZero, span);
                }
                Linear {
                    coeff: acc.coeff / rhs.offset,
                    symbol: acc.symbol,
                    offset: acc.offset / rhs.offset,
                }
            };
        }
    }

    fn unary(&mut self) -> Result<Linear, ParseError> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.scale(-1.0))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Linear, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Number { value, .. } => {
                self.bump();
                Ok(Linear::constant(value))
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "pi" {
                    Ok(Linear::constant(std::f64::consts::PI))
                } else {
                    Ok(Linear {
                        coeff: 1.0,
                        symbol: Some(name),
                        offset: 0.0,
                    })
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => self.syntax("angle expression"),
        }
    }
}
