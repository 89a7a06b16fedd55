//! Run configuration: thresholds, cost-model knobs, workload and corpus
//! parameters. Values resolve with precedence CLI flag > config file >
//! built-in default; the file format is flat `key=value` lines with `#`
//! comments.

use thiserror::Error;

use crate::codec::GseLayout;
use crate::sim::CostModel;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: {what}")]
    BadValue { line: usize, what: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // Corpus
    pub docs: u32,
    pub tokens: u32,
    pub width: u32,
    // Compression thresholds (fractions of chunks per scheme group)
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    // Placement thresholds
    pub tau_gpu: f64,
    pub tau_pin: f64,
    pub tau_page: f64,
    // GSE layout
    pub gse_e_bits: u8,
    pub gse_m_bits: u8,
    // Workload
    pub queries: usize,
    pub k: usize,
    pub zipf_s: f64,
    pub seed: u64,
    // Cost model (bytes/s, microseconds)
    pub bw_disk_page: f64,
    pub bw_page_pin: f64,
    pub bw_pin_gpu: f64,
    pub lat_disk_page_us: f64,
    pub lat_page_pin_us: f64,
    pub lat_pin_gpu_us: f64,
    pub decode_int8: f64,
    pub decode_fp8e4m3: f64,
    pub decode_fp8e5m2: f64,
    pub decode_gse8: f64,
    pub gpu_access_time_us: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let model = CostModel::default();
        RunConfig {
            docs: 500,
            tokens: 512,
            width: 256,
            tau1: 0.10,
            tau2: 0.10,
            tau3: 0.10,
            tau_gpu: 0.05,
            tau_pin: 0.05,
            tau_page: 0.10,
            gse_e_bits: 4,
            gse_m_bits: 3,
            queries: 4096,
            k: 8,
            zipf_s: 1.1,
            seed: 42,
            bw_disk_page: model.link_bandwidth[0],
            bw_page_pin: model.link_bandwidth[1],
            bw_pin_gpu: model.link_bandwidth[2],
            lat_disk_page_us: model.link_latency[0] * 1e6,
            lat_page_pin_us: model.link_latency[1] * 1e6,
            lat_pin_gpu_us: model.link_latency[2] * 1e6,
            decode_int8: model.decode_rate[0],
            decode_fp8e4m3: model.decode_rate[1],
            decode_fp8e5m2: model.decode_rate[2],
            decode_gse8: model.decode_rate[3],
            gpu_access_time_us: model.gpu_access_time * 1e6,
        }
    }
}

impl RunConfig {
    /// Applies `key=value` lines over the current values.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::BadValue { line, what: format!("expected key=value, got '{content}'") })?;
            self.set(key.trim(), value.trim())
                .map_err(|what| match what {
                    SetError::Unknown => ConfigError::UnknownKey { line, key: key.trim().into() },
                    SetError::Parse(what) => ConfigError::BadValue { line, what },
                })?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), SetError> {
        macro_rules! parse {
            ($field:expr) => {{
                $field = value.parse().map_err(|e| SetError::Parse(format!("bad value for {key}: {e}")))?;
                Ok(())
            }};
        }
        match key {
            "docs" => parse!(self.docs),
            "tokens" => parse!(self.tokens),
            "width" => parse!(self.width),
            "tau1" => parse!(self.tau1),
            "tau2" => parse!(self.tau2),
            "tau3" => parse!(self.tau3),
            "tau_gpu" => parse!(self.tau_gpu),
            "tau_pin" => parse!(self.tau_pin),
            "tau_page" => parse!(self.tau_page),
            "gse_e_bits" => parse!(self.gse_e_bits),
            "gse_m_bits" => parse!(self.gse_m_bits),
            "queries" => parse!(self.queries),
            "k" => parse!(self.k),
            "zipf_s" => parse!(self.zipf_s),
            "seed" => parse!(self.seed),
            "bw_disk_page" => parse!(self.bw_disk_page),
            "bw_page_pin" => parse!(self.bw_page_pin),
            "bw_pin_gpu" => parse!(self.bw_pin_gpu),
            "lat_disk_page_us" => parse!(self.lat_disk_page_us),
            "lat_page_pin_us" => parse!(self.lat_page_pin_us),
            "lat_pin_gpu_us" => parse!(self.lat_pin_gpu_us),
            "decode_int8" => parse!(self.decode_int8),
            "decode_fp8e4m3" => parse!(self.decode_fp8e4m3),
            "decode_fp8e5m2" => parse!(self.decode_fp8e5m2),
            "decode_gse8" => parse!(self.decode_gse8),
            "gpu_access_time_us" => parse!(self.gpu_access_time_us),
            _ => Err(SetError::Unknown),
        }
    }

    /// Cross-field checks, run after all sources are applied.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let groups: [(&str, &[f64]); 2] = [
            ("tau1+tau2+tau3", &[self.tau1, self.tau2, self.tau3]),
            ("tau_gpu+tau_pin+tau_page", &[self.tau_gpu, self.tau_pin, self.tau_page]),
        ];
        for (name, taus) in groups {
            if taus.iter().any(|t| !(0.0..=1.0).contains(t)) || taus.iter().sum::<f64>() > 1.0 {
                return Err(ConfigError::Invalid(format!(
                    "{name} must each lie in [0,1] and sum to at most 1"
                )));
            }
        }
        if self.zipf_s < 0.0 || !self.zipf_s.is_finite() {
            return Err(ConfigError::Invalid("zipf_s must be >= 0".into()));
        }
        GseLayout::new(self.gse_e_bits, self.gse_m_bits)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.cost_model().validate().map_err(ConfigError::Invalid)?;
        Ok(())
    }

    pub fn gse_layout(&self) -> GseLayout {
        GseLayout::new(self.gse_e_bits, self.gse_m_bits).expect("validated layout")
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel {
            link_bandwidth: [self.bw_disk_page, self.bw_page_pin, self.bw_pin_gpu],
            link_latency: [
                self.lat_disk_page_us * 1e-6,
                self.lat_page_pin_us * 1e-6,
                self.lat_pin_gpu_us * 1e-6,
            ],
            decode_rate: [self.decode_int8, self.decode_fp8e4m3, self.decode_fp8e5m2, self.decode_gse8],
            gpu_access_time: self.gpu_access_time_us * 1e-6,
        }
    }

    pub fn compression_taus(&self) -> [f64; 3] {
        [self.tau1, self.tau2, self.tau3]
    }
}

enum SetError {
    Unknown,
    Parse(String),
}
