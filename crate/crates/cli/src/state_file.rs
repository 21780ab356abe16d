//! JSON dump format for states.
//!
//! ```json
//! { "schema_version": 1, "kind": "fourier_state", "n_min": -2, "n_max": 2,
//!   "re": [...], "im": [...] }
//! { "schema_version": 1, "kind": "piecewise_packet",
//!   "arcs": [{ "start": 0, "end": 1, "re": 2.5, "im": 0 }] }
//! ```
//!
//! Loading never renormalizes, so a dumped state reloads bit for bit.

use std::path::Path;

use qcircle_core::{Arc, Complex64, FourierState, PiecewisePacket};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::format::{to_json, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq)]
pub enum AnyState {
    Fourier(FourierState),
    Packet(PiecewisePacket),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcRecord {
    start: f64,
    end: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum StateRecord {
    FourierState {
        schema_version: u32,
        n_min: i64,
        n_max: i64,
        re: Vec<f64>,
        im: Vec<f64>,
    },
    PiecewisePacket {
        schema_version: u32,
        arcs: Vec<ArcRecord>,
    },
}

pub fn encode(state: &AnyState) -> Vec<u8> {
    let record = match state {
        AnyState::Fourier(s) => StateRecord::FourierState {
            schema_version: SCHEMA_VERSION,
            n_min: s.n_min(),
            n_max: s.n_max(),
            re: s.coeffs().iter().map(|c| c.re).collect(),
            im: s.coeffs().iter().map(|c| c.im).collect(),
        },
        AnyState::Packet(p) => StateRecord::PiecewisePacket {
            schema_version: SCHEMA_VERSION,
            arcs: p
                .arcs()
                .iter()
                .map(|a| ArcRecord {
                    start: a.start,
                    end: a.end,
                    re: a.amplitude.re,
                    im: a.amplitude.im,
                })
                .collect(),
        },
    };
    to_json(&record)
}

pub fn decode(text: &str) -> Result<AnyState, String> {
    let record: StateRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let check_version = |v: u32| {
        if v == SCHEMA_VERSION {
            Ok(())
        } else {
            Err(format!("unsupported schema_version {v}"))
        }
    };
    match record {
        StateRecord::FourierState {
            schema_version,
            n_min,
            n_max,
            re,
            im,
        } => {
            check_version(schema_version)?;
            if re.len() != im.len() {
                return Err("re and im have different lengths".into());
            }
            let expected = n_max
                .checked_sub(n_min)
                .and_then(|d| usize::try_from(d).ok())
                .map(|d| d + 1);
            if expected != Some(re.len()) {
                return Err(format!(
                    "{} coefficients do not cover [{n_min}, {n_max}]",
                    re.len()
                ));
            }
            let coeffs = re
                .into_iter()
                .zip(im)
                .map(|(r, i)| Complex64::new(r, i))
                .collect();
            FourierState::from_raw(n_min, coeffs)
                .map(AnyState::Fourier)
                .map_err(|e| e.to_string())
        }
        StateRecord::PiecewisePacket {
            schema_version,
            arcs,
        } => {
            check_version(schema_version)?;
            let arcs = arcs
                .into_iter()
                .map(|a| Arc::new(a.start, a.end, Complex64::new(a.re, a.im)))
                .collect();
            PiecewisePacket::new(arcs)
                .map(AnyState::Packet)
                .map_err(|e| e.to_string())
        }
    }
}

pub fn load(path: &Path) -> CliResult<AnyState> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    decode(&text).map_err(|message| CliError::StateFile {
        path: path.to_owned(),
        message,
    })
}
