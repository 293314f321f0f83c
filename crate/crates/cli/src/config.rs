//! Option resolution: flag, then `--config` JSON, then built-in default.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use soliton_core::ode::OdeOptions;

use crate::failure::Failure;
use crate::GlobalArgs;

/// Values from a `--config` file.
#[derive(Debug, Default)]
pub struct Config {
    values: Map<String, Value>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(values)) => Ok(Config { values }),
            Ok(_) => Err(Failure::usage(format!(
                "{}: the config must be a JSON object",
                path.display()
            ))),
            Err(e) => Err(Failure::usage(format!("{}: {e}", path.display()))),
        }
    }

    /// `flag`, else the config entry `key`, else `None`.
    pub fn opt<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| Failure::usage(format!("config entry `{key}`: {e}"))),
        }
    }

    /// `flag`, else the config entry `key`, else `default`.
    pub fn get<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, Failure> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }
}

/// Settings shared by every subcommand.
pub struct Context {
    pub cfg: Config,
    pub out: PathBuf,
    pub ode: OdeOptions,
    pub seed: u64,
}

impl Context {
    pub fn new(global: &GlobalArgs) -> Result<Self, Failure> {
        let cfg = match &global.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let out: PathBuf = cfg.get(global.out.clone(), "out", PathBuf::from("."))?;
        let mut ode = OdeOptions::default();
        ode.rtol = cfg.get(global.tol_rel, "tol_rel", ode.rtol)?;
        ode.atol = cfg.get(global.tol_abs, "tol_abs", ode.atol)?;
        if !(ode.rtol > 0.0 && ode.atol > 0.0) {
            return Err(Failure::usage("tolerances must be positive"));
        }
        let seed = cfg.get(global.seed, "seed", 0)?;
        Ok(Context {
            cfg,
            out,
            ode,
            seed,
        })
    }

    /// `out/name`, creating the output directory first.
    pub fn path(&self, name: &str) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", self.out.display())))?;
        Ok(self.out.join(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_config_beats_defaults() {
        let cfg = Config {
            values: serde_json::from_str(r#"{"c": 2.0, "n": 3}"#).unwrap(),
        };
        assert_eq!(cfg.get(Some(5.0), "c", 1.0).unwrap(), 5.0);
        assert_eq!(cfg.get(None, "c", 1.0).unwrap(), 2.0);
        assert_eq!(cfg.get(None, "K", -1.0).unwrap(), -1.0);
        assert_eq!(cfg.get::<u32>(None, "n", 2).unwrap(), 3);
        assert!(cfg.get::<u32>(None, "c", 2).is_err());
    }
}
