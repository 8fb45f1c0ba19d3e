//! JSON input files describing a state and its Hamiltonian.
//!
//! ```json
//! {
//!   "dims": [2],
//!   "amplitudes": [[0.7071067811865476, 0], [0.7071067811865476, 0]],
//!   "hamiltonian": [[0, 0], [0, 0], [0, 0], [1, 0]]
//! }
//! ```
//!
//! `amplitudes` (pure state) and `matrix` (density matrix, row-major) are
//! mutually exclusive. Complex numbers are `[re, im]` pairs.

use num_complex::Complex64;
use serde_json::{Map, Value};

use qsl_core::qcore::{CMatrix, CVector, DensityMatrix, Hamiltonian, PureState, SubsystemLayout};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub enum InputState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

#[derive(Debug, Clone)]
pub struct InputSystem {
    pub state: InputState,
    pub hamiltonian: Hamiltonian,
}

const KNOWN_FIELDS: [&str; 4] = ["dims", "amplitudes", "matrix", "hamiltonian"];

pub fn parse_system(text: &str) -> CliResult<InputSystem> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| CliError::schema("<root>", format!("not valid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| CliError::schema("<root>", "expected an object"))?;
    if let Some(key) = obj.keys().find(|k| !KNOWN_FIELDS.contains(&k.as_str())) {
        return Err(CliError::schema(key.as_str(), "unknown field"));
    }

    let dims = parse_dims(obj)?;
    let layout = SubsystemLayout::new(dims).map_err(|e| CliError::schema("dims", e.to_string()))?;
    let n = layout.total_dim();

    let h_values = complex_array(obj, "hamiltonian", n * n)?;
    let h_matrix = CMatrix::from_row_slice(n, n, &h_values);

    let state = match (obj.get("amplitudes"), obj.get("matrix")) {
        (Some(_), Some(_)) => {
            return Err(CliError::schema(
                "amplitudes",
                "give either `amplitudes` or `matrix`, not both",
            ))
        }
        (None, None) => {
            return Err(CliError::schema("amplitudes", "missing (or give `matrix`)"));
        }
        (Some(_), None) => {
            let amps = complex_array(obj, "amplitudes", n)?;
            InputState::Pure(PureState::new(layout.clone(), CVector::from_vec(amps))?)
        }
        (None, Some(_)) => {
            let values = complex_array(obj, "matrix", n * n)?;
            let m = CMatrix::from_row_slice(n, n, &values);
            InputState::Mixed(DensityMatrix::new(layout.clone(), m)?)
        }
    };
    let hamiltonian = Hamiltonian::new(layout, h_matrix)?;
    Ok(InputSystem { state, hamiltonian })
}

fn parse_dims(obj: &Map<String, Value>) -> CliResult<Vec<usize>> {
    let arr = obj
        .get("dims")
        .ok_or_else(|| CliError::schema("dims", "missing"))?
        .as_array()
        .ok_or_else(|| CliError::schema("dims", "expected an array of positive integers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64()
                .filter(|&d| d >= 1)
                .and_then(|d| usize::try_from(d).ok())
                .ok_or_else(|| CliError::schema(format!("dims[{i}]"), "expected a positive integer"))
        })
        .collect()
}

fn complex_array(obj: &Map<String, Value>, field: &str, expected_len: usize) -> CliResult<Vec<Complex64>> {
    let arr = obj
        .get(field)
        .ok_or_else(|| CliError::schema(field, "missing"))?
        .as_array()
        .ok_or_else(|| CliError::schema(field, "expected an array of [re, im] pairs"))?;
    if arr.len() != expected_len {
        return Err(CliError::schema(
            field,
            format!("expected {expected_len} entries, found {}", arr.len()),
        ));
    }
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            let pair = v.as_array().filter(|p| p.len() == 2);
            let parts = pair.and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
            match parts {
                Some((re, im)) if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
                _ => Err(CliError::schema(format!("{field}[{i}]"), "expected [re, im] with finite numbers")),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_field(text: &str) -> String {
        match parse_system(text).unwrap_err() {
            CliError::Schema { field, .. } => field,
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    const H: &str = r#""hamiltonian": [[0,0],[0,0],[0,0],[1,0]]"#;

    #[test]
    fn parses_pure_and_mixed() {
        let pure = format!(r#"{{"dims":[2],"amplitudes":[[1,0],[0,0]],{H}}}"#);
        assert!(matches!(parse_system(&pure).unwrap().state, InputState::Pure(_)));
        let mixed = format!(r#"{{"dims":[2],"matrix":[[0.5,0],[0,0],[0,0],[0.5,0]],{H}}}"#);
        assert!(matches!(parse_system(&mixed).unwrap().state, InputState::Mixed(_)));
    }

    #[test]
    fn schema_errors_name_the_field() {
        assert_eq!(err_field("[]"), "<root>");
        assert_eq!(err_field(&format!(r#"{{"amplitudes":[[1,0],[0,0]],{H}}}"#)), "dims");
        assert_eq!(err_field(&format!(r#"{{"dims":[0],"amplitudes":[],{H}}}"#)), "dims[0]");
        assert_eq!(err_field(&format!(r#"{{"dims":[2],"amplitudes":[[1,0]],{H}}}"#)), "amplitudes");
        assert_eq!(
            err_field(&format!(r#"{{"dims":[2],"amplitudes":[[1,0],[0]],{H}}}"#)),
            "amplitudes[1]"
        );
        assert_eq!(
            err_field(r#"{"dims":[2],"amplitudes":[[1,0],[0,0]],"hamiltonian":[[0,0],[0,0],[0,0],["x",0]]}"#),
            "hamiltonian[3]"
        );
        assert_eq!(err_field(&format!(r#"{{"dims":[2],{H}}}"#)), "amplitudes");
        assert_eq!(
            err_field(&format!(r#"{{"dims":[2],"amplitudes":[[1,0],[0,0]],"extra":1,{H}}}"#)),
            "extra"
        );
    }

    #[test]
    fn invariant_errors_are_not_schema_errors() {
        let text = format!(r#"{{"dims":[2],"amplitudes":[[1,0],[1,0]],{H}}}"#);
        assert_eq!(parse_system(&text).unwrap_err().exit_code(), 3);
        let text = r#"{"dims":[2],"amplitudes":[[1,0],[0,0]],"hamiltonian":[[0,0],[1,0],[0,0],[1,0]]}"#;
        assert_eq!(parse_system(text).unwrap_err().exit_code(), 3);
    }
}
