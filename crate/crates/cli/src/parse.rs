//! Text parsing for root lists and printed reference values.

use anyhow::{anyhow, bail, Result};
use num_complex::Complex64;

/// A complex number parsed from its printed form, remembering how many
/// decimals each part carried so comparisons can respect the printed
/// precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedComplex {
    pub value: Complex64,
    pub re_decimals: u32,
    pub im_decimals: u32,
}

impl PrintedComplex {
    /// Half-ulp tolerance of the printed value (worst component).
    pub fn rounding_tolerance(&self) -> f64 {
        let d = self.re_decimals.min(self.im_decimals);
        0.51 * 10f64.powi(-(d as i32)) + 1e-9
    }
}

fn decimals_of(num: &str) -> u32 {
    match num.split_once('.') {
        // Values printed without a decimal point (like "0") are exact.
        None => 6,
        Some((_, frac)) => frac.trim_end_matches(|c: char| !c.is_ascii_digit()).len() as u32,
    }
}

/// Parse forms like `1.5`, `-0.2264i`, `3.14159+0.916011i`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Result<PrintedComplex> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty complex literal");
    }
    // Split at the sign of the imaginary part: the last +/- that is not
    // the leading sign.
    let split = s
        .char_indices()
        .skip(1)
        .rev()
        .find(|&(_, c)| c == '+' || c == '-')
        .map(|(i, _)| i);
    let (re_str, im_str) = if s.ends_with('i') {
        match split {
            Some(i) => (&s[..i], &s[i..s.len() - 1]),
            None => ("", &s[..s.len() - 1]),
        }
    } else {
        if split.is_some() && s.contains('i') {
            bail!("malformed complex literal '{s}'");
        }
        (s.as_str(), "")
    };

    let parse_part = |part: &str, label: &str| -> Result<(f64, u32)> {
        if part.is_empty() {
            return Ok((0.0, 6));
        }
        if part == "+" || part == "-" {
            // Bare "i" or "-i".
            return Ok((if part == "-" { -1.0 } else { 1.0 }, 6));
        }
        let v: f64 = part
            .parse()
            .map_err(|_| anyhow!("cannot parse {label} part '{part}' of '{s}'"))?;
        Ok((v, decimals_of(part)))
    };

    let (re, re_decimals) = parse_part(re_str, "real")?;
    let (im, im_decimals) = if s.ends_with('i') {
        if im_str.is_empty() {
            parse_part(&s[..s.len() - 1], "imaginary")?
        } else {
            parse_part(im_str, "imaginary")?
        }
    } else {
        (0.0, 6)
    };
    // A pure-imaginary literal reuses the slot re_str parsed into.
    let (re, re_decimals) = if s.ends_with('i') && split.is_none() {
        (0.0, 6)
    } else {
        (re, re_decimals)
    };
    Ok(PrintedComplex { value: Complex64::new(re, im), re_decimals, im_decimals })
}

/// Parse a comma-separated root list, with optional surrounding parens
/// or brackets: `(1.5,-1.5,3.1)` or `3.14+0.91i, 1.8`.
pub fn parse_root_list(s: &str) -> Result<Vec<Complex64>> {
    let trimmed = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    if trimmed.trim().is_empty() {
        bail!("empty root list");
    }
    trimmed
        .split(',')
        .map(|tok| parse_complex(tok).map(|p| p.value))
        .collect()
}

/// Parse a comma-separated list of real parameters.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    let trimmed = s
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    trimmed
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("cannot parse parameter '{}'", tok.trim()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_printed_forms() {
        let p = parse_complex("3.14159+0.916011i").unwrap();
        assert_eq!(p.value, Complex64::new(3.14159, 0.916011));
        assert_eq!(p.re_decimals, 5);
        assert_eq!(p.im_decimals, 6);

        let p = parse_complex("-1.94553").unwrap();
        assert_eq!(p.value, Complex64::new(-1.94553, 0.0));

        let p = parse_complex("0.2264i").unwrap();
        assert_eq!(p.value, Complex64::new(0.0, 0.2264));
        assert_eq!(p.im_decimals, 4);

        let p = parse_complex("-0.831443i").unwrap();
        assert_eq!(p.value, Complex64::new(0.0, -0.831443));

        let p = parse_complex("0").unwrap();
        assert_eq!(p.value, Complex64::new(0.0, 0.0));

        let p = parse_complex("3.14159-0.91i").unwrap();
        assert_eq!(p.value, Complex64::new(3.14159, -0.91));

        assert!(parse_complex("").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn parses_root_lists() {
        let roots = parse_root_list("(1.5,-1.5,3.1)").unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[1], Complex64::new(-1.5, 0.0));

        let roots = parse_root_list("3.14+0.91i, 1.8").unwrap();
        assert_eq!(roots[0], Complex64::new(3.14, 0.91));
        assert_eq!(roots[1], Complex64::new(1.8, 0.0));
    }
}
