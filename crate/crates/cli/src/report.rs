use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use torus_locus::blaschke::BlaschkeFactors;
use torus_locus::density::{DensityVerdict, Reason, SelfStar, Verdict};
use torus_locus::torus::TorusSolutionSet;

pub const TOOL: &str = "torus-locus";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub input: InputEcho,
    pub config: ConfigEcho,
    #[serde(flatten)]
    pub body: Body,
    /// Wall-clock seconds; only filled in with `--timing` so output stays reproducible.
    pub timing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub expressions: Vec<String>,
    pub variables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tol: f64,
    pub grid: usize,
    pub probes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Body {
    Decide {
        verdict: Verdict,
        reason: Reason,
        self_star: SelfStar,
        summary: String,
        result: DensityVerdict,
    },
    Solve {
        solutions: TorusSolutionSet,
    },
    CircleMapMake {
        numerator: String,
        denominator: String,
        verified: String,
    },
    CircleMapVerify {
        status: String,
        detail: torus_locus::blaschke::CircleMapCheck,
    },
    CircleMapFactor {
        factors: BlaschkeFactors,
    },
}

/// Compact JSON with every float written to 17 significant digits, which is
/// enough to read back the same `f64`.
pub struct FloatFormatter;

impl Formatter for FloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FloatFormatter);
    value.serialize(&mut ser).expect("report types serialize");
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_c(c: Complex64) -> String {
    format!("{} {} {}i", fmt_f(c.re), if c.im < 0.0 { '-' } else { '+' }, fmt_f(c.im.abs()))
}
