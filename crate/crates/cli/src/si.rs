//! Numbers with optional SI prefixes and units: `16ns`, `2.5k`, `0.2fF`,
//! `120nm`, `1e-9`.

const PREFIXES: [(&str, f64); 10] = [
    ("f", 1e-15),
    ("p", 1e-12),
    ("n", 1e-9),
    ("u", 1e-6),
    ("µ", 1e-6),
    ("m", 1e-3),
    ("k", 1e3),
    ("M", 1e6),
    ("G", 1e9),
    ("T", 1e12),
];

const UNITS: [&str; 9] = ["s", "V", "F", "A", "J", "m", "ohm", "Ω", "Hz"];

/// Length of the leading decimal literal.
fn numeric_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
        i += 1;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            i = j;
        }
    }
    i
}

/// A lone `m` is milli, not metre.
fn multiplier(suffix: &str) -> Option<f64> {
    if let Some(&(_, scale)) = PREFIXES.iter().find(|(p, _)| *p == suffix) {
        return Some(scale);
    }
    if suffix.is_empty() || UNITS.contains(&suffix) {
        return Some(1.0);
    }
    PREFIXES.iter().find_map(|&(p, scale)| {
        let rest = suffix.strip_prefix(p)?;
        (rest.is_empty() || UNITS.contains(&rest)).then_some(scale)
    })
}

pub fn parse(text: &str) -> Result<f64, String> {
    let s = text.trim();
    let n = numeric_len(s);
    let number: f64 = s[..n].parse().map_err(|_| format!("'{text}' is not a number"))?;
    let scale = multiplier(s[n..].trim()).ok_or_else(|| format!("unknown unit suffix in '{text}'"))?;
    let v = number * scale;
    if !v.is_finite() {
        return Err(format!("'{text}' is not finite"));
    }
    Ok(v)
}

/// Comma-separated list of SI numbers.
pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        assert!(close(parse("16ns").unwrap(), 16e-9));
        assert!(close(parse("2.5k").unwrap(), 2500.0));
        assert!(close(parse("2.5 kohm").unwrap(), 2500.0));
        assert!(close(parse("2.25M").unwrap(), 2.25e6));
        assert!(close(parse("0.2fF").unwrap(), 0.2e-15));
        assert!(close(parse("120nm").unwrap(), 120e-9));
        assert!(close(parse("5m").unwrap(), 5e-3));
        assert!(close(parse("1mV").unwrap(), 1e-3));
        assert_eq!(parse("1e-9").unwrap(), 1e-9);
        assert_eq!(parse("-0.5").unwrap(), -0.5);
        assert_eq!(parse("0.3V").unwrap(), 0.3);
        assert!(close(parse("30fJ").unwrap(), 30e-15));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("abc").is_err());
        assert!(parse("3 apples").is_err());
        assert!(parse("").is_err());
        assert!(parse("1e999").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("16ns, 32ns,64ns").unwrap(), vec![16e-9, 32e-9, 64e-9]);
        assert!(parse_list("1, x").is_err());
    }
}
