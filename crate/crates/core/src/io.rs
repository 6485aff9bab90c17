//! Loading shift and cocycle descriptions from JSON or TOML files.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::cocycle::{CocycleFile, FiniteRangeCocycle};
use crate::error::{Error, Result};
use crate::sft::{ShiftFile, ShiftSpace};

/// Parse `text` as TOML when `path` ends in `.toml`, JSON otherwise.
pub fn parse_document<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        toml::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    } else {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_document(path, &text)
}

pub fn load_shift(path: &Path) -> Result<ShiftSpace> {
    ShiftSpace::from_file(&read_document::<ShiftFile>(path)?)
}

pub fn load_cocycle(path: &Path) -> Result<FiniteRangeCocycle> {
    FiniteRangeCocycle::from_file(&read_document::<CocycleFile>(path)?)
}

/// Locale-free float text with 17 significant digits, enough to round-trip.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.0, 1.0 / 3.0, -2f64.ln(), 1e-300, 6.02e23] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(0.25), "2.5000000000000000e-1");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn both_formats_parse() {
        let json = r#"{"alphabet": 2, "transition": [[1,1],[1,0]]}"#;
        let toml_text = "alphabet = 2\ntransition = [[1,1],[1,0]]\n";
        let a: ShiftFile = parse_document(Path::new("s.json"), json).unwrap();
        let b: ShiftFile = parse_document(Path::new("s.toml"), toml_text).unwrap();
        assert_eq!(a, b);
        assert!(matches!(parse_document::<ShiftFile>(Path::new("s.json"), "{"), Err(Error::Parse(_))));
    }
}
