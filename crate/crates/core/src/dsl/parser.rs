//! Recursive-descent parser for the circuit DSL.
//!
//! ```text
//! program  = { funcdef } circuit ;
//! circuit  = "circuit" IDENT "(" expr ")" block ;
//! funcdef  = "def" IDENT "(" [ IDENT { "," IDENT } ] ")" block ;
//! block    = "{" { stmt } "}" ;
//! stmt     = gatecall ";" | call ";" | forloop ;
//! forloop  = "for" IDENT "in" expr ".." expr block ;
//! gatecall = GATE [ "(" exprlist ")" ] operand { "," operand } ;
//! operand  = "q" "[" expr "]" ;
//! call     = IDENT "(" [ exprlist ] ")" ;
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | INT | NUMBER | IDENT | "(" expr ")" ;
//! ```

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::{Error, Result};
use crate::model::GateName;

pub fn parse(src: &str) -> Result<Program> {
    let tokens = tokenize(src)?;
    let mut p = Parser { src, tokens, pos: 0 };
    p.program()
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_tok(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn prev_end(&self) -> u32 {
        if self.pos == 0 {
            0
        } else {
            self.tokens[self.pos - 1].end
        }
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax {
            loc: t.loc,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<Token> {
        if *self.peek_tok() == tok {
            Ok(self.bump())
        } else {
            self.error(&[&format!("`{}`", tok.symbol())])
        }
    }

    fn ident(&mut self) -> Result<(String, Token)> {
        match self.peek_tok().clone() {
            Tok::Ident(name) => Ok((name, self.bump())),
            _ => self.error(&["identifier"]),
        }
    }

    fn span_from(&self, first: &Token) -> Span {
        Span {
            start: first.start,
            end: self.prev_end(),
            loc: first.loc,
        }
    }

    fn program(&mut self) -> Result<Program> {
        let mut funcs: Vec<FuncDef> = Vec::new();
        loop {
            match self.peek_tok() {
                Tok::Def => {
                    let f = self.funcdef()?;
                    if GateName::from_name(&f.name).is_some() {
                        return Err(Error::Semantic {
                            loc: f.span.loc,
                            message: format!("function name `{}` shadows a gate", f.name),
                        });
                    }
                    if funcs.iter().any(|g| g.name == f.name) {
                        return Err(Error::Semantic {
                            loc: f.span.loc,
                            message: format!("function `{}` defined twice", f.name),
                        });
                    }
                    funcs.push(f);
                }
                Tok::Circuit => break,
                _ => return self.error(&["`def`", "`circuit`"]),
            }
        }
        let circuit = self.circuit()?;
        if *self.peek_tok() != Tok::Eof {
            return self.error(&["end of input"]);
        }
        Ok(Program { funcs, circuit })
    }

    fn circuit(&mut self) -> Result<CircuitDef> {
        let first = self.expect(Tok::Circuit)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let qubits = self.expr()?;
        self.expect(Tok::RParen)?;
        let body = self.block()?;
        Ok(CircuitDef {
            name,
            qubits,
            body,
            span: self.span_from(&first),
        })
    }

    fn funcdef(&mut self) -> Result<FuncDef> {
        let first = self.expect(Tok::Def)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek_tok() != Tok::RParen {
            loop {
                let (p, tok) = self.ident()?;
                if params.contains(&p) {
                    return Err(Error::Semantic {
                        loc: tok.loc,
                        message: format!("duplicate parameter `{p}`"),
                    });
                }
                params.push(p);
                if *self.peek_tok() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let body = self.block()?;
        Ok(FuncDef {
            name,
            params,
            body,
            span: self.span_from(&first),
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek_tok() != Tok::RBrace {
            stmts.push(self.stmt()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt> {
        match self.peek_tok().clone() {
            Tok::For => self.forloop().map(Stmt::For),
            Tok::Ident(name) => {
                if let Some(gate) = GateName::from_name(&name) {
                    let g = self.gatecall(gate)?;
                    self.expect(Tok::Semi)?;
                    Ok(Stmt::Gate(g))
                } else {
                    let c = self.call()?;
                    self.expect(Tok::Semi)?;
                    Ok(Stmt::Call(c))
                }
            }
            _ => self.error(&["gate", "call", "`for`", "`}`"]),
        }
    }

    fn forloop(&mut self) -> Result<ForLoop> {
        let first = self.expect(Tok::For)?;
        let (var, _) = self.ident()?;
        self.expect(Tok::In)?;
        let start = self.expr()?;
        self.expect(Tok::DotDot)?;
        let end = self.expr()?;
        let body = self.block()?;
        Ok(ForLoop {
            var,
            start,
            end,
            body,
            span: self.span_from(&first),
        })
    }

    fn gatecall(&mut self, gate: GateName) -> Result<GateCall> {
        let first = self.bump();
        let mut params = Vec::new();
        if *self.peek_tok() == Tok::LParen {
            self.bump();
            loop {
                let expr = self.expr()?;
                let s = expr.span();
                let text = self.src[s.start as usize..s.end as usize]
                    .split_whitespace()
                    .collect::<Vec<_>>()
                    .join(" ");
                params.push(AngleArg { expr, text });
                if *self.peek_tok() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RParen)?;
        }
        let mut operands = vec![self.operand()?];
        while *self.peek_tok() == Tok::Comma {
            self.bump();
            operands.push(self.operand()?);
        }
        let span = self.span_from(&first);
        if params.len() != gate.param_count() {
            return Err(Error::Semantic {
                loc: first.loc,
                message: format!(
                    "gate `{gate}` takes {} angle argument(s), got {}",
                    gate.param_count(),
                    params.len()
                ),
            });
        }
        if operands.len() != gate.arity() {
            return Err(Error::Semantic {
                loc: first.loc,
                message: format!("gate `{gate}` takes {} qubit(s), got {}", gate.arity(), operands.len()),
            });
        }
        Ok(GateCall {
            gate,
            params,
            operands,
            span,
        })
    }

    fn operand(&mut self) -> Result<Expr> {
        match self.peek_tok() {
            Tok::Ident(q) if q == "q" => {
                self.bump();
            }
            _ => return self.error(&["`q`"]),
        }
        self.expect(Tok::LBracket)?;
        let e = self.expr()?;
        self.expect(Tok::RBracket)?;
        Ok(e)
    }

    fn call(&mut self) -> Result<Call> {
        let (callee, first) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek_tok() != Tok::RParen {
            args.push(self.expr()?);
            while *self.peek_tok() == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Call {
            callee,
            args,
            span: self.span_from(&first),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let first = self.peek().clone();
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_tok() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), self.span_from(&first));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let first = self.peek().clone();
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_tok() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs), self.span_from(&first));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        let first = self.peek().clone();
        match first.tok.clone() {
            Tok::Minus => {
                self.bump();
                let inner = self.unary()?;
                Ok(Expr::Neg(Box::new(inner), self.span_from(&first)))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v, self.span_from(&first)))
            }
            Tok::Float(s) => {
                self.bump();
                Ok(Expr::Float(s, self.span_from(&first)))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Var(name, self.span_from(&first)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                // keep the parentheses in the span so angle labels round-trip
                Ok(match inner {
                    Expr::Bin(op, a, b, _) => Expr::Bin(op, a, b, self.span_from(&first)),
                    Expr::Neg(a, _) => Expr::Neg(a, self.span_from(&first)),
                    other => other,
                })
            }
            _ => self.error(&["expression"]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Location;

    #[test]
    fn single_gate_program() {
        let p = parse("circuit main(3){ h q[0]; }").unwrap();
        assert_eq!(p.circuit.name, "main");
        assert!(matches!(p.circuit.qubits, Expr::Int(3, _)));
        assert_eq!(p.circuit.body.len(), 1);
        let Stmt::Gate(g) = &p.circuit.body[0] else {
            panic!("expected gate call")
        };
        assert_eq!(g.gate, GateName::H);
        assert!(matches!(g.operands[0], Expr::Int(0, _)));
    }

    #[test]
    fn loop_program() {
        let p = parse("circuit main(n){ for i in 0..n { h q[i]; } }").unwrap();
        assert_eq!(p.circuit.body.len(), 1);
        let Stmt::For(f) = &p.circuit.body[0] else {
            panic!("expected loop")
        };
        assert_eq!(f.var, "i");
        assert_eq!(f.body.len(), 1);
    }

    #[test]
    fn missing_semicolon() {
        let err = parse("circuit main(3){ h q[0] }").unwrap_err();
        match err {
            Error::Syntax { loc, expected, .. } => {
                assert_eq!(loc, Location { line: 1, col: 25 });
                assert!(expected.iter().any(|e| e == "`;`"), "{expected:?}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn angle_labels_keep_source_text() {
        let p = parse("circuit main(2){ rz(pi / 2) q[0]; cry(2*(t+1)) q[0], q[1]; }").unwrap();
        let labels: Vec<_> = p
            .circuit
            .body
            .iter()
            .map(|s| match s {
                Stmt::Gate(g) => g.params[0].text.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(labels, vec!["pi / 2", "2*(t+1)"]);
    }

    #[test]
    fn arity_is_checked() {
        let err = parse("circuit main(2){ cx q[0]; }").unwrap_err();
        assert!(err.to_string().contains("takes 2 qubit(s)"), "{err}");
        let err = parse("circuit main(2){ rz q[0]; }").unwrap_err();
        assert!(err.to_string().contains("angle"), "{err}");
    }

    #[test]
    fn functions_and_calls() {
        let src = "def f(a, b) { cx q[a], q[b]; }\ncircuit main(4) { f(0, 1); f(2, 3); }";
        let p = parse(src).unwrap();
        assert_eq!(p.funcs.len(), 1);
        assert_eq!(p.funcs[0].params, vec!["a", "b"]);
        assert_eq!(p.circuit.body.len(), 2);
        assert_eq!(p.circuit.body[1].span().loc, Location { line: 2, col: 28 });
    }

    #[test]
    fn precedence() {
        let p = parse("circuit main(1 + 2 * 3 - -1){ }").unwrap();
        let Expr::Bin(BinOp::Sub, lhs, rhs, _) = &p.circuit.qubits else {
            panic!()
        };
        assert!(matches!(**rhs, Expr::Neg(_, _)));
        assert!(matches!(**lhs, Expr::Bin(BinOp::Add, _, _, _)));
    }

    #[test]
    fn rejects_trailing_garbage_and_bad_names() {
        assert!(parse("circuit main(1){ } }").is_err());
        assert!(parse("def h() { } circuit main(1) { }").is_err());
        assert!(parse("def f() { } def f() { } circuit main(1) { }").is_err());
        assert!(parse("circuit main(1){ h r[0]; }").is_err());
    }
}
