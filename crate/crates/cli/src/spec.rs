//! `kind:key=value,...` state descriptions used by `widths` and `scan`.

use errbar_core::StateSpec;

use crate::CliError;

fn bad(reason: impl Into<String>) -> CliError {
    CliError::Config { field: "state".into(), reason: reason.into() }
}

/// Parses e.g. `gaussian:sigma=1,x0=0.5` or `box:width=1`.
pub fn parse_state(text: &str) -> Result<StateSpec, CliError> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut spec = match kind.trim() {
        "gaussian" => StateSpec::Gaussian { sigma: f64::NAN, x0: 0.0, p0: 0.0 },
        "box" => StateSpec::Box { center: 0.0, width: f64::NAN },
        "superposition" => StateSpec::Superposition { sigma: f64::NAN, separation: f64::NAN },
        "mixture" => StateSpec::Mixture { sigma: f64::NAN, separation: f64::NAN },
        other => return Err(bad(format!("unknown state kind '{other}' (gaussian, box, superposition, mixture)"))),
    };
    for pair in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = pair.split_once('=').ok_or_else(|| bad(format!("'{pair}' is not key=value")))?;
        let value: f64 = value.trim().parse().map_err(|_| bad(format!("'{value}' is not a number")))?;
        set_param(&mut spec, key.trim(), value)?;
    }
    if let Some(missing) = params(&spec).iter().find(|(_, v)| v.is_nan()) {
        return Err(bad(format!("missing parameter '{}'", missing.0)));
    }
    Ok(spec)
}

/// Named parameters of a state, in declaration order.
pub fn params(spec: &StateSpec) -> Vec<(&'static str, f64)> {
    match *spec {
        StateSpec::Gaussian { sigma, x0, p0 } => vec![("sigma", sigma), ("x0", x0), ("p0", p0)],
        StateSpec::Box { center, width } => vec![("center", center), ("width", width)],
        StateSpec::Superposition { sigma, separation } | StateSpec::Mixture { sigma, separation } => {
            vec![("sigma", sigma), ("separation", separation)]
        }
    }
}

pub fn kind(spec: &StateSpec) -> &'static str {
    match spec {
        StateSpec::Gaussian { .. } => "gaussian",
        StateSpec::Box { .. } => "box",
        StateSpec::Superposition { .. } => "superposition",
        StateSpec::Mixture { .. } => "mixture",
    }
}

pub fn set_param(spec: &mut StateSpec, key: &str, value: f64) -> Result<(), CliError> {
    let slot = match (spec, key) {
        (StateSpec::Gaussian { sigma, .. }, "sigma") => sigma,
        (StateSpec::Gaussian { x0, .. }, "x0") => x0,
        (StateSpec::Gaussian { p0, .. }, "p0") => p0,
        (StateSpec::Box { center, .. }, "center") => center,
        (StateSpec::Box { width, .. }, "width") => width,
        (StateSpec::Superposition { sigma, .. } | StateSpec::Mixture { sigma, .. }, "sigma") => sigma,
        (StateSpec::Superposition { separation, .. } | StateSpec::Mixture { separation, .. }, "separation") => {
            separation
        }
        (s, k) => return Err(bad(format!("'{k}' is not a parameter of a {} state", kind(s)))),
    };
    *slot = value;
    Ok(())
}

/// `kind key=value ...` with values in report formatting.
pub fn describe(spec: &StateSpec) -> String {
    let mut out = kind(spec).to_string();
    for (k, v) in params(spec) {
        out.push_str(&format!(" {k}={}", crate::report::fmt_num(v)));
    }
    out
}
