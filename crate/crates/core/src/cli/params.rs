//! Parameter schemas and config resolution.
//!
//! Every experiment declares a flat schema of named parameters. Values come
//! from, in increasing precedence: schema defaults, a `--config` file of
//! `key=value` lines, then explicit `--key value` flags. Validation errors
//! always name the offending field.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    U64,
    F64,
    U64List,
    Str,
}

impl ParamKind {
    pub fn name(&self) -> &'static str {
        match self {
            ParamKind::U64 => "int",
            ParamKind::F64 => "float",
            ParamKind::U64List => "int-list",
            ParamKind::Str => "string",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub required: bool,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

impl ParamSpec {
    pub const fn required(name: &'static str, kind: ParamKind, help: &'static str) -> Self {
        Self {
            name,
            kind,
            required: true,
            default: None,
            help,
        }
    }

    pub const fn optional(
        name: &'static str,
        kind: ParamKind,
        default: &'static str,
        help: &'static str,
    ) -> Self {
        Self {
            name,
            kind,
            required: false,
            default: Some(default),
            help,
        }
    }

    /// Optional with no default (absent unless supplied).
    pub const fn free(name: &'static str, kind: ParamKind, help: &'static str) -> Self {
        Self {
            name,
            kind,
            required: false,
            default: None,
            help,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

pub fn field_error(field: &str, message: impl fmt::Display) -> CliError {
    CliError(format!("parameter `{field}`: {message}"))
}

/// Resolved parameter set for one experiment invocation.
#[derive(Debug, Clone)]
pub struct Params {
    schema: &'static [ParamSpec],
    values: BTreeMap<String, String>,
}

impl Params {
    /// Merge defaults, config-file lines, and CLI pairs, rejecting unknown
    /// keys and missing required fields.
    pub fn resolve(
        schema: &'static [ParamSpec],
        config_text: Option<&str>,
        cli_pairs: &[(String, String)],
    ) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for spec in schema {
            if let Some(default) = spec.default {
                values.insert(spec.name.to_string(), default.to_string());
            }
        }
        if let Some(text) = config_text {
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError(format!(
                        "config line {}: expected key=value, got `{line}`",
                        lineno + 1
                    ))
                })?;
                let key = key.trim();
                if !schema.iter().any(|s| s.name == key) {
                    return Err(field_error(key, "unknown parameter"));
                }
                values.insert(key.to_string(), value.trim().to_string());
            }
        }
        for (key, value) in cli_pairs {
            if !schema.iter().any(|s| s.name == key) {
                return Err(field_error(key, "unknown parameter"));
            }
            values.insert(key.clone(), value.clone());
        }
        let params = Self { schema, values };
        for spec in schema {
            if spec.required && !params.values.contains_key(spec.name) {
                return Err(field_error(spec.name, "required but not supplied"));
            }
            // Eagerly validate everything present against its kind.
            if params.values.contains_key(spec.name) {
                match spec.kind {
                    ParamKind::U64 => {
                        params.u64(spec.name)?;
                    }
                    ParamKind::F64 => {
                        params.f64(spec.name)?;
                    }
                    ParamKind::U64List => {
                        params.u64_list(spec.name)?;
                    }
                    ParamKind::Str => {}
                }
            }
        }
        Ok(params)
    }

    pub fn schema(&self) -> &'static [ParamSpec] {
        self.schema
    }

    pub fn raw(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    /// All resolved values, for the summary JSON.
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn get(&self, name: &str) -> CliResult<&str> {
        self.values
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| field_error(name, "required but not supplied"))
    }

    pub fn u64(&self, name: &str) -> CliResult<u64> {
        let raw = self.get(name)?;
        raw.parse()
            .map_err(|e| field_error(name, format!("`{raw}` is not an integer ({e})")))
    }

    pub fn f64(&self, name: &str) -> CliResult<f64> {
        let raw = self.get(name)?;
        raw.parse()
            .map_err(|e| field_error(name, format!("`{raw}` is not a float ({e})")))
    }

    pub fn u64_list(&self, name: &str) -> CliResult<Vec<u64>> {
        let raw = self.get(name)?;
        if raw.is_empty() {
            return Ok(vec![]);
        }
        raw.split(',')
            .map(|tok| {
                tok.trim().parse().map_err(|e| {
                    field_error(name, format!("`{tok}` is not an integer ({e})"))
                })
            })
            .collect()
    }

    pub fn str(&self, name: &str) -> CliResult<&str> {
        self.get(name)
    }

    pub fn opt_f64(&self, name: &str) -> CliResult<Option<f64>> {
        match self.values.get(name) {
            None => Ok(None),
            Some(_) => self.f64(name).map(Some),
        }
    }

    pub fn opt_u64(&self, name: &str) -> CliResult<Option<u64>> {
        match self.values.get(name) {
            None => Ok(None),
            Some(_) => self.u64(name).map(Some),
        }
    }
}
