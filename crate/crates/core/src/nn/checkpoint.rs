//! Checkpoint files: one line of JSON header, then the flat parameter vector
//! as little-endian `f64`.
//!
//! Parameters are ordered as policy mean network, log std (vector or
//! network), then the value network if present.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LogStd, Mlp, NnError, PolicyHead};

pub const CHECKPOINT_FORMAT: &str = "arpex-checkpoint-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogStdHeader {
    Independent { values: Vec<f64> },
    StateDependent { layer_sizes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub layer_sizes: Vec<usize>,
    pub log_std: LogStdHeader,
    pub value_layer_sizes: Option<Vec<usize>>,
    pub step: u64,
    pub num_params: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub head: PolicyHead,
    pub value: Option<Mlp>,
    pub step: u64,
}

impl Checkpoint {
    pub fn header(&self) -> CheckpointHeader {
        let log_std = match self.head.log_std() {
            LogStd::Independent(v) => LogStdHeader::Independent { values: v.clone() },
            LogStd::StateDependent(net) => LogStdHeader::StateDependent {
                layer_sizes: net.sizes().to_vec(),
            },
        };
        CheckpointHeader {
            format: CHECKPOINT_FORMAT.to_string(),
            layer_sizes: self.head.mean_net().sizes().to_vec(),
            log_std,
            value_layer_sizes: self.value.as_ref().map(|v| v.sizes().to_vec()),
            step: self.step,
            num_params: self.flat_params().len(),
        }
    }

    fn flat_params(&self) -> Vec<f64> {
        let mut p = self.head.params();
        if let Some(v) = &self.value {
            p.extend_from_slice(v.params());
        }
        p
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), NnError> {
        let header = serde_json::to_string(&self.header())?;
        w.write_all(header.as_bytes())?;
        w.write_all(b"\n")?;
        for p in self.flat_params() {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, NnError> {
        let mut r = BufReader::new(r);
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: CheckpointHeader = serde_json::from_str(line.trim_end())?;
        if header.format != CHECKPOINT_FORMAT {
            return Err(NnError::Checkpoint(format!(
                "unknown format {:?}",
                header.format
            )));
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != header.num_params * 8 {
            return Err(NnError::Checkpoint(format!(
                "expected {} parameters, found {} bytes",
                header.num_params,
                bytes.len()
            )));
        }
        let flat: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();

        let mean = Mlp::zeros(&header.layer_sizes)?;
        let log_std = match &header.log_std {
            LogStdHeader::Independent { values } => LogStd::Independent(values.clone()),
            LogStdHeader::StateDependent { layer_sizes } => {
                LogStd::StateDependent(Mlp::zeros(layer_sizes)?)
            }
        };
        let mut head = PolicyHead::from_parts(mean, log_std)?;
        let mut value = header
            .value_layer_sizes
            .as_deref()
            .map(Mlp::zeros)
            .transpose()?;
        let expected = head.num_params() + value.as_ref().map_or(0, Mlp::num_params);
        if expected != flat.len() {
            return Err(NnError::Checkpoint(format!(
                "header layout needs {expected} parameters, file has {}",
                flat.len()
            )));
        }
        let (hp, vp) = flat.split_at(head.num_params());
        head.set_params(hp)?;
        if let Some(v) = value.as_mut() {
            v.set_params(vp)?;
        }
        Ok(Self {
            head,
            value,
            step: header.step,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NnError> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NnError> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_both_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for sd in [false, true] {
            let mut head = PolicyHead::new(6, 2, &[16, 16], sd, &mut rng).unwrap();
            head.set_log_std(-0.3);
            let value = Mlp::orthogonal(&[6, 16, 16, 1], 1.0, &mut rng).unwrap();
            let ck = Checkpoint {
                head,
                value: Some(value),
                step: 17,
            };
            let mut buf = Vec::new();
            ck.write_to(&mut buf).unwrap();
            let back = Checkpoint::read_from(buf.as_slice()).unwrap();
            assert_eq!(back, ck);
        }
    }

    #[test]
    fn header_is_first_line_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let head = PolicyHead::new(2, 1, &[3], false, &mut rng).unwrap();
        let ck = Checkpoint {
            head,
            value: None,
            step: 0,
        };
        let mut buf = Vec::new();
        ck.write_to(&mut buf).unwrap();
        let nl = buf.iter().position(|&b| b == b'\n').unwrap();
        let h: serde_json::Value = serde_json::from_slice(&buf[..nl]).unwrap();
        assert_eq!(h["format"], CHECKPOINT_FORMAT);
        assert_eq!(h["layer_sizes"], serde_json::json!([2, 3, 1]));
        assert_eq!(buf.len() - nl - 1, 8 * ck.head.num_params());
    }

    #[test]
    fn truncated_file_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let head = PolicyHead::new(2, 1, &[3], false, &mut rng).unwrap();
        let ck = Checkpoint {
            head,
            value: None,
            step: 0,
        };
        let mut buf = Vec::new();
        ck.write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(Checkpoint::read_from(buf.as_slice()).is_err());
    }
}
