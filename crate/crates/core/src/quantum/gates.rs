//! Built-in gates and a small expression language over them.
//!
//! `*` is the tensor product (left factor on the lower-numbered qubits),
//! `.` is the matrix product (`X.Z` applies `Z` first), a leading `-`
//! negates, and parentheses group. `*` binds tighter than `.`.

use crate::error::QuantumError;

use super::linalg::{c, r, CMatrix, C64};
use super::observable::Observable;
use super::state::bell_state;

pub const GATE_NAMES: [&str; 16] = [
    "I", "X", "Y", "Z", "H", "S", "CNOT", "CZ", "SWAP", "P0", "P1", "B1", "B2", "B3", "B4", "Bell",
];

pub fn gate(name: &str) -> Result<CMatrix, QuantumError> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let real = |rows: &[&[f64]]| CMatrix::from_real(rows).expect("square literal");
    Ok(match name {
        "I" => CMatrix::identity(2),
        "X" => real(&[&[0.0, 1.0], &[1.0, 0.0]]),
        "Y" => CMatrix::from_rows(vec![vec![r(0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), r(0.0)]])?,
        "Z" => real(&[&[1.0, 0.0], &[0.0, -1.0]]),
        "H" => real(&[&[h, h], &[h, -h]]),
        "S" => CMatrix::diag(&[r(1.0), c(0.0, 1.0)]),
        "CNOT" => real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]),
        "CZ" => CMatrix::diag(&[r(1.0), r(1.0), r(1.0), r(-1.0)]),
        "SWAP" => real(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]),
        "P0" => CMatrix::diag(&[r(1.0), r(0.0)]),
        "P1" => CMatrix::diag(&[r(0.0), r(1.0)]),
        "B1" | "B2" | "B3" | "B4" => bell_projector(name[1..].parse().expect("digit"))?,
        "Bell" => bell_observable().matrix().clone(),
        _ => {
            return Err(QuantumError::Unknown {
                kind: "gate",
                name: name.to_string(),
            })
        }
    })
}

pub fn bell_projector(i: usize) -> Result<CMatrix, QuantumError> {
    let b = bell_state(i)?;
    Ok(CMatrix::outer(b.amplitudes(), b.amplitudes()))
}

/// `Σ_i i·B_i` with outcome `i` for Bell state `i`.
pub fn bell_observable() -> Observable {
    let spectrum = (1..=4)
        .map(|i| (i as f64, bell_projector(i).expect("bell index")))
        .collect();
    Observable::from_spectrum("Bell", spectrum).expect("Bell projectors are a resolution of the identity")
}

/// `I, Z, X, X.Z`: the correction turning Bell state `i` into Bell state 1
/// when applied to the first qubit of the pair.
pub fn bell_correction(i: usize) -> Result<CMatrix, QuantumError> {
    Ok(match i {
        1 => gate("I")?,
        2 => gate("Z")?,
        3 => gate("X")?,
        4 => &gate("X")? * &gate("Z")?,
        _ => return Err(QuantumError::Index(i)),
    })
}

pub fn parse_gate_expr(text: &str) -> Result<CMatrix, QuantumError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let m = p.product()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Dot,
    Star,
    Minus,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Tok>, QuantumError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            ' ' | '\t' | '\n' => {
                chars.next();
            }
            '.' => {
                chars.next();
                out.push(Tok::Dot);
            }
            '*' => {
                chars.next();
                out.push(Tok::Star);
            }
            '-' => {
                chars.next();
                out.push(Tok::Minus);
            }
            '(' => {
                chars.next();
                out.push(Tok::Open);
            }
            ')' => {
                chars.next();
                out.push(Tok::Close);
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if !(c.is_ascii_alphanumeric() || c == '_') {
                        break;
                    }
                    name.push(c);
                    chars.next();
                }
                out.push(Tok::Name(name));
            }
            other => {
                return Err(QuantumError::Invalid(format!(
                    "unexpected `{other}` in gate expression `{text}`"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> QuantumError {
        QuantumError::Invalid(format!("gate expression: {msg} at token {}", self.pos + 1))
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn product(&mut self) -> Result<CMatrix, QuantumError> {
        let mut m = self.tensor()?;
        while self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            let rhs = self.tensor()?;
            m = m.matmul(&rhs)?;
        }
        Ok(m)
    }

    fn tensor(&mut self) -> Result<CMatrix, QuantumError> {
        let mut m = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.unary()?;
            m = m.kron(&rhs);
        }
        Ok(m)
    }

    fn unary(&mut self) -> Result<CMatrix, QuantumError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.scale(C64::new(-1.0, 0.0)));
        }
        match self.peek().cloned() {
            Some(Tok::Open) => {
                self.pos += 1;
                let m = self.product()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(m)
            }
            Some(Tok::Name(name)) => {
                self.pos += 1;
                gate(&name)
            }
            _ => Err(self.error("expected a gate")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::PureState;

    #[test]
    fn builtin_gates_are_unitary_or_projectors() {
        for name in ["I", "X", "Y", "Z", "H", "S", "CNOT", "CZ", "SWAP"] {
            assert!(gate(name).unwrap().unitary_deviation() < 1e-12, "{name}");
        }
        for name in ["P0", "P1", "B1", "B2", "B3", "B4"] {
            assert!(gate(name).unwrap().is_projector(1e-12), "{name}");
        }
    }

    #[test]
    fn expression_precedence() {
        let xz = &gate("X").unwrap() * &gate("Z").unwrap();
        let m = parse_gate_expr("(X.Z) * I").unwrap();
        assert_eq!(m, xz.kron(&CMatrix::identity(2)));
        // `*` binds tighter, so this multiplies a 2x2 by a 4x4.
        assert!(parse_gate_expr("X.Z * I").is_err());
        assert_eq!(parse_gate_expr("-(-X)").unwrap(), gate("X").unwrap());
    }

    #[test]
    fn corrections_map_bell_states_to_bell_one() {
        for i in 1..=4 {
            let fix = bell_correction(i).unwrap().kron(&CMatrix::identity(2));
            let b = bell_state(i).unwrap();
            let out = PureState::new(fix.apply(b.amplitudes()).unwrap()).unwrap();
            assert!(out.same_ray(&bell_state(1).unwrap()), "correction {i}");
        }
    }

    #[test]
    fn unknown_gates_are_reported() {
        assert!(parse_gate_expr("Q").is_err());
        assert!(parse_gate_expr("(X").is_err());
        assert!(parse_gate_expr("X Y").is_err());
    }
}
