//! Integer linear forms `s·x + c` in one parameter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    pub slope: i64,
    pub intercept: i64,
}

impl LinearForm {
    pub const fn new(slope: i64, intercept: i64) -> Self {
        LinearForm { slope, intercept }
    }

    pub const fn constant(c: i64) -> Self {
        LinearForm::new(0, c)
    }

    pub fn eval(&self, x: i64) -> i64 {
        self.slope * x + self.intercept
    }

    /// The form in `y` obtained by putting `x = y + shift`.
    pub fn shifted(&self, shift: i64) -> Self {
        LinearForm::new(self.slope, self.intercept + self.slope * shift)
    }

    pub fn sub(&self, other: &LinearForm) -> Self {
        LinearForm::new(self.slope - other.slope, self.intercept - other.intercept)
    }

    pub fn is_zero(&self) -> bool {
        self.slope == 0 && self.intercept == 0
    }

    /// Exact fit through `(x, y)` points; `None` unless every point lies on
    /// one integer line.
    pub fn fit(points: &[(i64, i64)]) -> Option<Self> {
        let (&(x0, y0), rest) = points.split_first()?;
        let Some(&(x1, y1)) = rest.first() else {
            return Some(LinearForm::constant(y0));
        };
        if x1 == x0 || (y1 - y0) % (x1 - x0) != 0 {
            return None;
        }
        let slope = (y1 - y0) / (x1 - x0);
        let form = LinearForm::new(slope, y0 - slope * x0);
        points.iter().all(|&(x, y)| form.eval(x) == y).then_some(form)
    }

    pub fn display_in(&self, var: &str) -> String {
        let s = self.slope;
        let c = self.intercept;
        let mut out = match s {
            0 => return c.to_string(),
            1 => var.to_string(),
            -1 => format!("-{var}"),
            _ => format!("{s}{var}"),
        };
        if c > 0 {
            out.push_str(&format!("+{c}"));
        } else if c < 0 {
            out.push_str(&format!("{c}"));
        }
        out
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("m"))
    }
}

impl FromStr for LinearForm {
    type Err = Error;

    /// Accepts sums of terms like `8m`, `-m`, `+3`, in any single letter.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidInput(format!("not a linear form: {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut form = LinearForm::constant(0);
        let mut var: Option<char> = None;
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let (sign, body) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ => (1, rest),
            };
            let end = body[1.min(body.len())..].find(['+', '-']).map_or(body.len(), |i| i + 1);
            let term = &body[..end];
            rest = &body[end..];
            let digits_end = term.find(|c: char| !c.is_ascii_digit()).unwrap_or(term.len());
            let (num, tail) = term.split_at(digits_end);
            match tail.chars().collect::<Vec<_>>().as_slice() {
                [] => {
                    let v: i64 = num.parse().map_err(|_| bad())?;
                    form.intercept += sign * v;
                }
                [c] if c.is_ascii_alphabetic() => {
                    if var.is_some_and(|v| v != *c) {
                        return Err(bad());
                    }
                    var = Some(*c);
                    let k: i64 = if num.is_empty() {
                        1
                    } else {
                        num.parse().map_err(|_| bad())?
                    };
                    form.slope += sign * k;
                }
                _ => return Err(bad()),
            }
        }
        Ok(form)
    }
}
