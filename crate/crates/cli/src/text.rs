//! Human-readable rendering.

use std::fmt::Write;

/// Six significant digits, `%g` style.
pub fn g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Aligned `key value` lines.
#[derive(Default)]
pub struct Lines {
    rows: Vec<(String, String)>,
}

impl Lines {
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.rows.push((key.into(), value.into()));
        self
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.push(key, g6(value))
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::g6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(g6(0.5), "0.5");
        assert_eq!(g6(1.0 / 3.0), "0.333333");
        assert_eq!(g6(1.4150374992788437), "1.41504");
        assert_eq!(g6(4.0), "4");
        assert_eq!(g6(123456789.0), "1.23457e8");
        assert_eq!(g6(-2.5e-7), "-2.5e-7");
        assert_eq!(g6(0.0), "0");
        assert_eq!(g6(-0.0), "0");
    }
}
