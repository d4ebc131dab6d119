//! Scalar expressions over named variables, used by manifold definitions and
//! scenario truth dynamics.
//!
//! Grammar: the usual infix operators `+ - * / ^`, parentheses, and functions
//! such as `sin`, `cos`, `tan`, `exp`, `log`, `sqrt`, `abs`. `pi` is bound to π
//! unless a variable of that name is declared; `PI`, `π` and `E` are always
//! constants.

use std::f64::consts::PI;
use std::fmt;

use exmex::prelude::*;
use exmex::FlatEx;

use crate::error::{ReachError, Result};

#[derive(Clone)]
pub struct Expression {
    source: String,
    compiled: FlatEx<f64>,
    /// For each exmex variable (sorted by name), the index into the caller's
    /// values, or `None` for the `pi` binding.
    slots: Vec<Option<usize>>,
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expression({:?})", self.source)
    }
}

impl Expression {
    /// Parses `text`; every free variable must appear in `vars`.
    pub fn parse(text: &str, vars: &[String]) -> Result<Self> {
        let err = |message: String| ReachError::Expression {
            source_text: text.to_string(),
            message,
        };
        let compiled = exmex::parse::<f64>(text).map_err(|e| err(e.to_string()))?;
        let mut slots = Vec::new();
        for name in compiled.var_names() {
            match vars.iter().position(|v| v == name) {
                Some(i) => slots.push(Some(i)),
                None if name == "pi" => slots.push(None),
                None => {
                    return Err(err(format!(
                        "unknown variable `{name}` (known: {})",
                        if vars.is_empty() {
                            "none".to_string()
                        } else {
                            vars.join(", ")
                        }
                    )))
                }
            }
        }
        Ok(Self {
            source: text.to_string(),
            compiled,
            slots,
        })
    }

    /// Parses an expression with no free variables and evaluates it.
    pub fn constant(text: &str) -> Result<f64> {
        Self::parse(text, &[])?.eval(&[])
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, values: &[f64]) -> Result<f64> {
        let args: Vec<f64> = self
            .slots
            .iter()
            .map(|s| s.map_or(PI, |i| values.get(i).copied().unwrap_or(f64::NAN)))
            .collect();
        let v = self
            .compiled
            .eval(&args)
            .map_err(|e| ReachError::Expression {
                source_text: self.source.clone(),
                message: e.to_string(),
            })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ReachError::Expression {
                source_text: self.source.clone(),
                message: format!("evaluates to {v} at {values:?}"),
            })
        }
    }
}
