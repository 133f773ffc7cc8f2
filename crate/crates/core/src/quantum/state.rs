use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::QuantumError;

use super::linalg::{inner, norm, C64, ONE, ZERO};

pub const NORM_TOLERANCE: f64 = 1e-10;
/// States whose overlap modulus is at least `1 − SAME_RAY_TOLERANCE` are
/// the same ray.
pub const SAME_RAY_TOLERANCE: f64 = 1e-9;

/// Unit vector in `C^(2^k)`.
#[derive(Clone, PartialEq)]
pub struct PureState {
    amps: Vec<C64>,
}

impl PureState {
    /// Requires unit norm.
    pub fn new(amps: Vec<C64>) -> Result<Self, QuantumError> {
        check_len(amps.len())?;
        let n = norm(&amps);
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::Invalid(format!(
                "state vector has norm {n}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    pub fn normalized(amps: Vec<C64>) -> Result<Self, QuantumError> {
        check_len(amps.len())?;
        let n = norm(&amps);
        if n < 1e-300 || !n.is_finite() {
            return Err(QuantumError::ZeroNorm);
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / n).collect(),
        })
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self, QuantumError> {
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(QuantumError::Index(index));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        PureState { amps }
    }

    pub fn overlap(&self, other: &PureState) -> f64 {
        if self.dim() != other.dim() {
            return 0.0;
        }
        inner(&self.amps, &other.amps).norm()
    }

    /// Equal up to a global phase.
    pub fn same_ray(&self, other: &PureState) -> bool {
        self.overlap(other) >= 1.0 - SAME_RAY_TOLERANCE
    }
}

fn check_len(n: usize) -> Result<(), QuantumError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(QuantumError::Invalid(format!(
            "state vector length {n} is not a power of two"
        )));
    }
    Ok(())
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.qubits();
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.4}{:+.4}i)|{:0k$b}>", a.re, a.im, i)?;
        }
        Ok(())
    }
}

/// Unitarily invariant random state: normalised complex Gaussian vector.
pub fn random_state<R: Rng>(rng: &mut R, qubits: usize) -> PureState {
    loop {
        let amps: Vec<C64> = (0..1usize << qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(s) = PureState::normalized(amps) {
            return s;
        }
    }
}

/// `(|00⟩+|11⟩)/√2`, `(|00⟩−|11⟩)/√2`, `(|01⟩+|10⟩)/√2`, `(|01⟩−|10⟩)/√2`
/// for `i = 1..=4`.
pub fn bell_state(i: usize) -> Result<PureState, QuantumError> {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let amps = match i {
        1 => vec![h, ZERO, ZERO, h],
        2 => vec![h, ZERO, ZERO, -h],
        3 => vec![ZERO, h, h, ZERO],
        4 => vec![ZERO, h, -h, ZERO],
        _ => return Err(QuantumError::Index(i)),
    };
    Ok(PureState { amps })
}

/// Reads a state expression: named single-qubit states `0 1 + - +i -i`,
/// `bell1..bell4`, amplitude lists `[1, 0.5-0.5i]` (normalised), and
/// tensor products joined by `*`.
pub fn parse_state(text: &str) -> Result<PureState, QuantumError> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            '*' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    let mut state: Option<PureState> = None;
    for part in parts {
        let factor = parse_factor(part.trim())?;
        state = Some(match state {
            None => factor,
            Some(s) => s.tensor(&factor),
        });
    }
    state.ok_or_else(|| QuantumError::Invalid("empty state expression".into()))
}

fn parse_factor(text: &str) -> Result<PureState, QuantumError> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = |a: [C64; 2]| PureState { amps: a.to_vec() };
    Ok(match text {
        "0" => amps([ONE, ZERO]),
        "1" => amps([ZERO, ONE]),
        "+" => amps([C64::new(h, 0.0), C64::new(h, 0.0)]),
        "-" => amps([C64::new(h, 0.0), C64::new(-h, 0.0)]),
        "+i" => amps([C64::new(h, 0.0), C64::new(0.0, h)]),
        "-i" => amps([C64::new(h, 0.0), C64::new(0.0, -h)]),
        _ if text.starts_with("bell") => {
            let i = text[4..]
                .parse()
                .map_err(|_| QuantumError::Invalid(format!("unknown state `{text}`")))?;
            bell_state(i)?
        }
        _ if text.starts_with('[') && text.ends_with(']') => {
            let inner = &text[1..text.len() - 1];
            let amps = inner
                .split(',')
                .map(|s| parse_complex(s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            PureState::normalized(amps)?
        }
        _ => {
            return Err(QuantumError::Unknown {
                kind: "state",
                name: text.to_string(),
            })
        }
    })
}

/// `1`, `-0.5`, `0.5i`, `-i`, `0.5-0.5i`, `1e-3+2i`.
pub fn parse_complex(text: &str) -> Result<C64, QuantumError> {
    let bad = || QuantumError::Invalid(format!("bad complex number `{text}`"));
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64, QuantumError> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re: f64 = body[..i].parse().map_err(|_| bad())?;
            Ok(C64::new(re, imag(&body[i..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_states_are_orthonormal() {
        for i in 1..=4 {
            for j in 1..=4 {
                let o = bell_state(i).unwrap().overlap(&bell_state(j).unwrap());
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((o - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parses_products_and_amplitudes() {
        let s = parse_state("+ * bell1").unwrap();
        assert_eq!(s.dim(), 8);
        let t = parse_state("[1, 1] * [0.5+0.5i, 0.5+0.5i, 0.5+0.5i, 0.5+0.5i]").unwrap();
        assert!((t.overlap(&parse_state("+ * + * +").unwrap()) - 1.0).abs() < 1e-12);
        assert!(parse_state("[0, 0]").is_err());
        assert!(parse_state("bell7").is_err());
        assert!(parse_state("q").is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.5-0.25i").unwrap(), C64::new(0.5, -0.25));
        assert_eq!(parse_complex("1e-3+2i").unwrap(), C64::new(1e-3, 2.0));
        assert_eq!(parse_complex("2").unwrap(), C64::new(2.0, 0.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn global_phase_is_ignored() {
        let s = parse_state("+").unwrap();
        let t = PureState::normalized(s.amplitudes().iter().map(|a| a * C64::new(0.0, 1.0)).collect()).unwrap();
        assert!(s.same_ray(&t));
        assert!(!s.same_ray(&parse_state("-").unwrap()));
    }
}
