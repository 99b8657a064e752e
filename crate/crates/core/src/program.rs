//! Line-oriented pulse-program text format (`.pp`).
//!
//! One statement per line, `#` starts a comment; comments of the form
//! `# key: value` are kept as metadata. Grammar:
//!
//! ```text
//! pulse <channel> angle=<number><deg|rad> phase=<x|y|-x|-y|<number>deg>
//! wait <number><ns|us|ms> [dephase=all|esr|none]
//! ```
//!
//! Channels are `esr+`, `esr-`, `endor1-2`, `endor3-4`, `endor5-6`,
//! `endor7-8`. Degrees are the canonical angle unit; radians are accepted on
//! input. Rendering produces canonical text (angles in degrees with four
//! decimals) and is idempotent: parsing rendered text and rendering again
//! reproduces the same bytes.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use thiserror::Error;

use crate::sequence::{Dephase, Pulse, SequenceStep};
use crate::spinsys::Transition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Malformed statement or argument.
    Syntax,
    /// `pulse` on a channel that does not exist.
    UnknownChannel,
    /// Number without its required unit suffix.
    MissingUnit,
    /// `wait` with a negative duration.
    NegativeDuration,
    /// No statements at all.
    Empty,
}

#[derive(Debug, Error)]
#[error("{kind:?} at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(kind: ParseErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            kind,
            line,
            column,
            message: message.into(),
        }
    }
}

/// A parsed pulse program: ordered steps plus free-form metadata. The
/// program name is the `name` metadata entry when present.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub name: String,
    pub metadata: Vec<(String, String)>,
    pub steps: Vec<SequenceStep>,
}

fn column_of(line: &str, token: &str) -> usize {
    line.find(token).map(|i| i + 1).unwrap_or(1)
}

/// Parse `<number><unit>` where unit must be one of `units`; returns the
/// value and the matched unit index.
fn parse_number_with_unit(
    token: &str,
    units: &[&str],
    line_no: usize,
    col: usize,
) -> Result<(f64, usize), ParseError> {
    for (idx, unit) in units.iter().enumerate() {
        if let Some(num) = token.strip_suffix(unit) {
            let value: f64 = num.parse().map_err(|_| {
                ParseError::new(
                    ParseErrorKind::Syntax,
                    line_no,
                    col,
                    format!("invalid number `{num}`"),
                )
            })?;
            if !value.is_finite() {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    line_no,
                    col,
                    format!("non-finite value `{num}`"),
                ));
            }
            return Ok((value, idx));
        }
    }
    // A bare number is a missing unit; anything else is a syntax error.
    if token.parse::<f64>().is_ok() {
        Err(ParseError::new(
            ParseErrorKind::MissingUnit,
            line_no,
            col,
            format!("`{token}` is missing a unit ({})", units.join("|")),
        ))
    } else {
        Err(ParseError::new(
            ParseErrorKind::Syntax,
            line_no,
            col,
            format!("cannot parse `{token}`"),
        ))
    }
}

fn parse_phase(token: &str, line_no: usize, col: usize) -> Result<f64, ParseError> {
    match token {
        "x" => Ok(0.0),
        "y" => Ok(90f64.to_radians()),
        "-x" => Ok(180f64.to_radians()),
        "-y" => Ok(270f64.to_radians()),
        other => {
            let (deg, _) = parse_number_with_unit(other, &["deg"], line_no, col)?;
            Ok(deg.to_radians())
        }
    }
}

fn expect_kv<'a>(
    token: &'a str,
    key: &str,
    line_no: usize,
    line: &str,
) -> Result<&'a str, ParseError> {
    token
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::Syntax,
                line_no,
                column_of(line, token),
                format!("expected `{key}=<...>`, got `{token}`"),
            )
        })
}

/// Parse a pulse program from text.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut metadata: Vec<(String, String)> = Vec::new();
    let mut steps: Vec<SequenceStep> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                let key = key.trim();
                let value = value.trim();
                if !key.is_empty() && !key.contains(char::is_whitespace) {
                    metadata.push((key.to_string(), value.to_string()));
                }
            }
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("pulse") => {
                let channel_tok = tokens.next().ok_or_else(|| {
                    ParseError::new(ParseErrorKind::Syntax, line_no, 6, "missing channel")
                })?;
                let transition = Transition::from_channel_name(channel_tok).map_err(|_| {
                    ParseError::new(
                        ParseErrorKind::UnknownChannel,
                        line_no,
                        column_of(line, channel_tok),
                        format!("unknown channel `{channel_tok}`"),
                    )
                })?;
                let angle_tok = tokens.next().ok_or_else(|| {
                    ParseError::new(ParseErrorKind::Syntax, line_no, line.len(), "missing angle")
                })?;
                let angle_val = expect_kv(angle_tok, "angle", line_no, line)?;
                let (value, unit) = parse_number_with_unit(
                    angle_val,
                    &["deg", "rad"],
                    line_no,
                    column_of(line, angle_tok),
                )?;
                let angle = if unit == 0 { value.to_radians() } else { value };
                let phase_tok = tokens.next().ok_or_else(|| {
                    ParseError::new(ParseErrorKind::Syntax, line_no, line.len(), "missing phase")
                })?;
                let phase_val = expect_kv(phase_tok, "phase", line_no, line)?;
                let phase = parse_phase(phase_val, line_no, column_of(line, phase_tok))?;
                if let Some(extra) = tokens.next() {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        line_no,
                        column_of(line, extra),
                        format!("unexpected token `{extra}`"),
                    ));
                }
                steps.push(SequenceStep::Pulse(Pulse::new(transition, angle, phase)));
            }
            Some("wait") => {
                let dur_tok = tokens.next().ok_or_else(|| {
                    ParseError::new(ParseErrorKind::Syntax, line_no, 5, "missing duration")
                })?;
                let (value, unit) = parse_number_with_unit(
                    dur_tok,
                    &["ns", "us", "ms"],
                    line_no,
                    column_of(line, dur_tok),
                )?;
                if value < 0.0 {
                    return Err(ParseError::new(
                        ParseErrorKind::NegativeDuration,
                        line_no,
                        column_of(line, dur_tok),
                        format!("negative duration `{dur_tok}`"),
                    ));
                }
                let duration = value * [1e-9, 1e-6, 1e-3][unit];
                let dephase = match tokens.next() {
                    None => Dephase::None,
                    Some(tok) => {
                        let val = expect_kv(tok, "dephase", line_no, line)?;
                        match val {
                            "all" => Dephase::All,
                            "esr" => Dephase::EsrOnly,
                            "none" => Dephase::None,
                            other => {
                                return Err(ParseError::new(
                                    ParseErrorKind::Syntax,
                                    line_no,
                                    column_of(line, tok),
                                    format!("unknown dephase mode `{other}`"),
                                ))
                            }
                        }
                    }
                };
                if let Some(extra) = tokens.next() {
                    return Err(ParseError::new(
                        ParseErrorKind::Syntax,
                        line_no,
                        column_of(line, extra),
                        format!("unexpected token `{extra}`"),
                    ));
                }
                steps.push(SequenceStep::Wait { duration, dephase });
            }
            Some(other) => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    line_no,
                    1,
                    format!("unknown statement `{other}`"),
                ))
            }
            None => unreachable!("blank lines are skipped"),
        }
    }

    if steps.is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::Empty,
            text.lines().count().max(1),
            1,
            "program has no steps",
        ));
    }

    let name = metadata
        .iter()
        .find(|(k, _)| k == "name")
        .map(|(_, v)| v.clone())
        .unwrap_or_default();
    Ok(Program {
        name,
        metadata,
        steps,
    })
}

/// Format a number with four decimals, trailing zeros trimmed.
fn fmt_trimmed(value: f64) -> String {
    let mut s = format!("{value:.4}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn render_phase(phase: f64) -> String {
    let deg = phase.to_degrees().rem_euclid(360.0);
    for (axis, val) in [("x", 0.0), ("y", 90.0), ("-x", 180.0), ("-y", 270.0)] {
        if (deg - val).abs() < 5e-5 {
            return axis.to_string();
        }
    }
    format!("{}deg", fmt_trimmed(deg))
}

fn render_duration(duration: f64) -> String {
    let (scale, unit) = if duration >= 1e-3 {
        (1e-3, "ms")
    } else if duration >= 1e-6 {
        (1e-6, "us")
    } else {
        (1e-9, "ns")
    };
    format!("{}{}", fmt_trimmed(duration / scale), unit)
}

/// Render a program as canonical text: metadata comments first, then one
/// statement per line, angles in degrees with four decimals.
pub fn render_program(p: &Program) -> String {
    let mut out = String::new();
    for (key, value) in &p.metadata {
        writeln!(out, "# {key}: {value}").unwrap();
    }
    for step in &p.steps {
        match step {
            SequenceStep::Pulse(pulse) => {
                writeln!(
                    out,
                    "pulse {} angle={:.4}deg phase={}",
                    pulse.transition.channel_name(),
                    pulse.angle.to_degrees(),
                    render_phase(pulse.phase),
                )
                .unwrap();
            }
            SequenceStep::Wait { duration, dephase } => {
                let mode = match dephase {
                    Dephase::All => "all",
                    Dephase::EsrOnly => "esr",
                    Dephase::None => "none",
                };
                writeln!(out, "wait {} dephase={mode}", render_duration(*duration)).unwrap();
            }
        }
    }
    out
}

/// Compare two programs structurally: identical shape, transitions, dephase
/// modes and metadata, with numeric fields equal within `tol` radians or
/// relative seconds.
pub fn programs_close(a: &Program, b: &Program, tol: f64) -> bool {
    if a.metadata != b.metadata || a.steps.len() != b.steps.len() {
        return false;
    }
    a.steps
        .iter()
        .zip(b.steps.iter())
        .all(|(sa, sb)| match (sa, sb) {
            (SequenceStep::Pulse(pa), SequenceStep::Pulse(pb)) => {
                pa.transition == pb.transition
                    && (pa.angle - pb.angle).abs() <= tol
                    && ((pa.phase - pb.phase).abs() <= tol
                        || ((pa.phase - pb.phase).abs() - TAU).abs() <= tol)
            }
            (
                SequenceStep::Wait {
                    duration: da,
                    dephase: ma,
                },
                SequenceStep::Wait {
                    duration: db,
                    dephase: mb,
                },
            ) => ma == mb && (da - db).abs() <= tol * da.abs().max(1e-12),
            _ => false,
        })
}

/// Names of the programs shipped with the crate.
pub const BUNDLED_PROGRAMS: [&str; 6] = [
    "pseudo_pure_10",
    "pseudo_pure_11",
    "bell_psi_plus",
    "bell_psi_minus",
    "bell_phi_plus",
    "bell_phi_minus",
];

/// Load a bundled program by name.
pub fn bundled_program(name: &str) -> Option<Program> {
    let text = match name {
        "pseudo_pure_10" => include_str!("../assets/pseudo_pure_10.pp"),
        "pseudo_pure_11" => include_str!("../assets/pseudo_pure_11.pp"),
        "bell_psi_plus" => include_str!("../assets/bell_psi_plus.pp"),
        "bell_psi_minus" => include_str!("../assets/bell_psi_minus.pp"),
        "bell_phi_plus" => include_str!("../assets/bell_phi_plus.pp"),
        "bell_phi_minus" => include_str!("../assets/bell_phi_minus.pp"),
        _ => return None,
    };
    Some(parse_program(text).expect("bundled programs are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinsys::EndorPair;

    #[test]
    fn parses_pulse_statement() {
        let p = parse_program("pulse esr- angle=109.47deg phase=y\n").unwrap();
        assert_eq!(p.steps.len(), 1);
        match &p.steps[0] {
            SequenceStep::Pulse(pulse) => {
                assert_eq!(pulse.transition, Transition::EsrMinus);
                assert!((pulse.angle - 109.47f64.to_radians()).abs() < 1e-12);
                assert!((pulse.phase - 90f64.to_radians()).abs() < 1e-12);
            }
            other => panic!("expected pulse, got {other:?}"),
        }
    }

    #[test]
    fn parses_wait_statement() {
        let p = parse_program("wait 5us dephase=all\n").unwrap();
        match &p.steps[0] {
            SequenceStep::Wait { duration, dephase } => {
                assert!((duration - 5e-6).abs() < 1e-18);
                assert_eq!(*dephase, Dephase::All);
            }
            other => panic!("expected wait, got {other:?}"),
        }
        // Default dephase mode is none.
        let p = parse_program("wait 40ns\n").unwrap();
        match &p.steps[0] {
            SequenceStep::Wait { dephase, .. } => assert_eq!(*dephase, Dephase::None),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_kinds_are_distinct() {
        let missing_unit = parse_program("pulse esr- angle=90 phase=y\n").unwrap_err();
        assert_eq!(missing_unit.kind, ParseErrorKind::MissingUnit);
        assert_eq!(missing_unit.line, 1);

        let unknown = parse_program("pulse esr0 angle=90deg phase=y\n").unwrap_err();
        assert_eq!(unknown.kind, ParseErrorKind::UnknownChannel);

        let negative = parse_program("wait -5us\n").unwrap_err();
        assert_eq!(negative.kind, ParseErrorKind::NegativeDuration);

        let syntax = parse_program("pluse esr- angle=90deg phase=y\n").unwrap_err();
        assert_eq!(syntax.kind, ParseErrorKind::Syntax);

        let empty = parse_program("# name: nothing\n").unwrap_err();
        assert_eq!(empty.kind, ParseErrorKind::Empty);

        let wait_no_unit = parse_program("wait 5\n").unwrap_err();
        assert_eq!(wait_no_unit.kind, ParseErrorKind::MissingUnit);
    }

    #[test]
    fn comments_and_metadata() {
        let text =
            "# name: demo\n# author: someone\n# plain comment without kv is dropped\nwait 1us\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.name, "demo");
        assert_eq!(p.metadata.len(), 2);
        assert_eq!(p.metadata[1], ("author".to_string(), "someone".to_string()));
    }

    #[test]
    fn render_produces_canonical_text() {
        let p = parse_program(
            "pulse endor7-8 angle=1.5707963267948966rad phase=x\nwait 100us dephase=all\n",
        )
        .unwrap();
        let text = render_program(&p);
        assert_eq!(
            text,
            "pulse endor7-8 angle=90.0000deg phase=x\nwait 100us dephase=all\n"
        );
    }

    #[test]
    fn canonical_round_trip_is_exact() {
        for name in BUNDLED_PROGRAMS {
            let p = bundled_program(name).unwrap();
            let text = render_program(&p);
            let q = parse_program(&text).unwrap();
            assert_eq!(p, q, "{name}");
            assert_eq!(render_program(&q), text, "{name}");
        }
    }

    #[test]
    fn canonicalization_is_idempotent_for_arbitrary_programs() {
        let raw = "pulse esr+ angle=0.7853981rad phase=137.25deg\nwait 123.456us dephase=esr\nwait 1.5ms\n";
        let p = parse_program(raw).unwrap();
        let once = render_program(&p);
        let twice = render_program(&parse_program(&once).unwrap());
        assert_eq!(once, twice);
        // The reparsed program matches the original within the canonical
        // 4-decimal-degree quantization.
        assert!(programs_close(&p, &parse_program(&once).unwrap(), 1e-5));
    }

    #[test]
    fn bundled_programs_have_expected_shapes() {
        let p10 = bundled_program("pseudo_pure_10").unwrap();
        assert_eq!(p10.name, "pseudo_pure_10");
        assert_eq!(p10.steps.len(), 4);
        let bell = bundled_program("bell_psi_minus").unwrap();
        assert_eq!(bell.steps.len(), 6);
        match &bell.steps[5] {
            SequenceStep::Pulse(pulse) => {
                assert_eq!(pulse.transition, Transition::EsrMinus);
                assert!((pulse.angle - std::f64::consts::PI).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        let phi = bundled_program("bell_phi_plus").unwrap();
        match &phi.steps[4] {
            SequenceStep::Pulse(pulse) => {
                assert_eq!(pulse.transition, Transition::Endor(EndorPair::P78));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(bundled_program("missing").is_none());
    }
}
