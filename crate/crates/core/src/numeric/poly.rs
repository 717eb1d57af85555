use std::fmt;

use serde::{Deserialize, Serialize};

use super::real::{powi, real, Real};

/// The four polynomial families whose roots above 1 give the base thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `x^(4m+3) - x^(2m+2) - x^(m+2) - x^(m+1) + x + 1`
    P1,
    /// `x^(2m+3) - x^(2m+2) - x^2 + 1`
    P2,
    /// `x^(2m+3) - x - 1`
    P3,
    /// `x^(m+3) - x^(m+2) - x^(m+1) + 1`
    Lambda,
}

impl Family {
    pub const DENSE: [Family; 3] = [Family::P1, Family::P2, Family::P3];

    pub fn name(self) -> &'static str {
        match self {
            Family::P1 => "P1",
            Family::P2 => "P2",
            Family::P3 => "P3",
            Family::Lambda => "Lambda",
        }
    }
}

/// A sparse integer polynomial from one of the threshold families.
///
/// Terms are kept sorted by strictly decreasing exponent with nonzero
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialSpec {
    family: Family,
    m: u32,
    terms: Vec<(u32, i64)>,
}

impl PolynomialSpec {
    pub fn new(family: Family, m: u32) -> Self {
        let raw: Vec<(u32, i64)> = match family {
            Family::P1 => vec![
                (4 * m + 3, 1),
                (2 * m + 2, -1),
                (m + 2, -1),
                (m + 1, -1),
                (1, 1),
                (0, 1),
            ],
            Family::P2 => vec![(2 * m + 3, 1), (2 * m + 2, -1), (2, -1), (0, 1)],
            Family::P3 => vec![(2 * m + 3, 1), (1, -1), (0, -1)],
            Family::Lambda => vec![(m + 3, 1), (m + 2, -1), (m + 1, -1), (0, 1)],
        };
        PolynomialSpec {
            family,
            m,
            terms: normalize(raw),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `(exponent, coefficient)` pairs, highest exponent first.
    pub fn terms(&self) -> &[(u32, i64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.0)
    }

    pub fn coefficient(&self, exponent: u32) -> i64 {
        self.terms.iter().find(|t| t.0 == exponent).map_or(0, |t| t.1)
    }

    /// Evaluates by walking exponents downward, multiplying by the gap
    /// between consecutive terms (sparse Horner).
    pub fn eval(&self, x: Real) -> Real {
        let mut acc = real(0.0);
        let mut prev = self.degree();
        for &(e, c) in &self.terms {
            acc = acc * powi(x, prev - e) + c as f64;
            prev = e;
        }
        acc * powi(x, prev)
    }

    pub fn eval_derivative(&self, x: Real) -> Real {
        self.derivative().eval(x)
    }

    fn derivative(&self) -> PolynomialSpec {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.0 > 0)
            .map(|&(e, c)| (e - 1, c * e as i64))
            .collect();
        PolynomialSpec {
            family: self.family,
            m: self.m,
            terms,
        }
    }

    /// ASCII form such as `x^5-x^4-x^2+1`.
    pub fn to_ascii(&self) -> String {
        self.render(|e| format!("^{e}"), "-")
    }

    fn render(&self, exp: impl Fn(u32) -> String, minus: &str) -> String {
        let mut out = String::new();
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if c < 0 {
                out.push_str(minus);
            } else if i > 0 {
                out.push('+');
            }
            let a = c.unsigned_abs();
            if a != 1 || e == 0 {
                out.push_str(&a.to_string());
            }
            if e >= 1 {
                out.push('x');
            }
            if e >= 2 {
                out.push_str(&exp(e));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Unicode form with superscript exponents, e.g. `x⁵−x⁴−x²+1`.
impl fmt::Display for PolynomialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(superscript, "\u{2212}"))
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().bytes().map(|b| DIGITS[(b - b'0') as usize]).collect()
}

fn normalize(mut raw: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    raw.sort_by_key(|t| std::cmp::Reverse(t.0));
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(raw.len());
    for (e, c) in raw {
        match out.last_mut() {
            Some(last) if last.0 == e => last.1 += c,
            _ => out.push((e, c)),
        }
    }
    out.retain(|t| t.1 != 0);
    out
}
