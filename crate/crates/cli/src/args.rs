//! Parsers for algebra names, complex numbers and grids.

use std::str::FromStr;

use num_complex::Complex64 as C64;
use odeim_core::cartan::{AlgebraKind, Family};

/// Parsed lists wrapped so clap treats each flag as a single value.
#[derive(Clone, Debug, PartialEq)]
pub struct List<T>(pub Vec<T>);

/// `A3`, `d4`, `E8`.
pub fn algebra(s: &str) -> Result<AlgebraKind, String> {
    let s = s.trim();
    let mut chars = s.chars();
    let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
        Some('A') => Family::A,
        Some('D') => Family::D,
        Some('E') => Family::E,
        _ => return Err(format!("unknown algebra '{s}' (expected A<n>, D<n> or E6/E7/E8)")),
    };
    let rank: usize = chars.as_str().parse().map_err(|_| format!("unknown algebra '{s}'"))?;
    AlgebraKind::new(family, rank).map_err(|_| format!("unknown algebra '{s}'"))
}

/// `0.3`, `-1.2+0.5i`, `2i`.
pub fn complex(s: &str) -> Result<C64, String> {
    C64::from_str(s.trim()).map_err(|_| format!("cannot parse '{s}' as a complex number"))
}

/// Comma-separated complex numbers.
pub fn complex_list(s: &str) -> Result<List<C64>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(complex).collect::<Result<_, _>>().map(List)
}

/// `a:b`.
pub fn window(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("window '{s}' must look like a:b"));
    }
    let a = parts[0].trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))?;
    let b = parts[1].trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))?;
    Ok((a, b))
}

/// `a:b:n` (n evenly spaced points) or a comma-separated list.
pub fn grid(s: &str) -> Result<List<f64>, String> {
    grid_points(s).map(List)
}

fn grid_points(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"))).collect(),
        3 => {
            let a = parts[0].trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))?;
            let b = parts[1].trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))?;
            let n = parts[2].trim().parse::<usize>().map_err(|e| format!("{s}: {e}"))?;
            if n == 0 {
                return Err("grid needs at least one point".into());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
        }
        _ => Err(format!("grid '{s}' must be a:b:n or a list")),
    }
}

/// Simple-reflection word such as `1,2,1`; empty for the identity.
pub fn word(s: &str) -> Result<List<usize>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t}: {e}")))
        .collect::<Result<_, _>>()
        .map(List)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebras() {
        assert_eq!(algebra("A3").unwrap(), AlgebraKind::a(3));
        assert_eq!(algebra("d4").unwrap(), AlgebraKind::d(4));
        assert!(algebra("E9").is_err());
        assert!(algebra("G2").is_err());
        assert!(algebra("D2").is_err());
    }

    #[test]
    fn complexes() {
        assert_eq!(complex("0.5-2i").unwrap(), C64::new(0.5, -2.0));
        assert_eq!(complex_list("1, 2i").unwrap().0, vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)]);
        assert!(complex("abc").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(grid("0:1:3").unwrap().0, vec![0.0, 0.5, 1.0]);
        assert_eq!(grid("2,0.5").unwrap().0, vec![2.0, 0.5]);
        assert_eq!(window("-30:0").unwrap(), (-30.0, 0.0));
        assert!(word("").unwrap().0.is_empty());
    }
}
