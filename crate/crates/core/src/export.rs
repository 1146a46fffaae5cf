//! Deterministic text serialization of grids, marginals and result tables.
//!
//! CSV floats carry a fixed number of significant digits so that repeated
//! runs produce byte-identical files; JSON floats use the shortest
//! round-trip representation.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::json;

use crate::infotheory::{CrjRow, EntropyReport, MarginalDensity};
use crate::phasespace::PhaseGrid;

/// Significant digits of grid values in CSV.
pub const GRID_DIGITS: usize = 17;
/// Significant digits of table values in CSV.
pub const TABLE_DIGITS: usize = 12;

/// `v` with `digits` significant digits: positional notation for moderate
/// exponents, scientific otherwise, trailing zeros removed.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        s
    }
}

/// `x,p,value` rows, x-major.
pub fn write_grid_csv<W: Write>(grid: &PhaseGrid, mut out: W) -> io::Result<()> {
    writeln!(out, "x,p,value")?;
    let ps = grid.p_nodes();
    for (i, x) in grid.x_nodes().into_iter().enumerate() {
        let xs = format_significant(x, GRID_DIGITS);
        for (j, &p) in ps.iter().enumerate() {
            writeln!(
                out,
                "{},{},{}",
                xs,
                format_significant(p, GRID_DIGITS),
                format_significant(grid.get(i, j), GRID_DIGITS)
            )?;
        }
    }
    Ok(())
}

/// Run context recorded next to a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMetadata {
    pub lambda: f64,
    pub n: usize,
    pub integral: f64,
    pub min: f64,
    pub max: f64,
    /// Present for Wigner grids only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negativity_volume: Option<f64>,
}

/// `{"metadata": …, "x": […], "p": […], "values": [[…], …]}` with one inner
/// array per position node.
pub fn grid_json(grid: &PhaseGrid, meta: &GridMetadata) -> serde_json::Value {
    let spec = grid.spec();
    let rows: Vec<&[f64]> = (0..spec.x.count).map(|i| grid.row(i)).collect();
    json!({
        "metadata": {
            "kind": grid.kind().name(),
            "lambda": meta.lambda,
            "n": meta.n,
            "x": spec.x,
            "p": spec.p,
            "integral": meta.integral,
            "min": meta.min,
            "max": meta.max,
            "negativity_volume": meta.negativity_volume,
        },
        "x": grid.x_nodes(),
        "p": grid.p_nodes(),
        "values": rows,
    })
}

pub const ENTROPY_HEADER: &str = "lambda,n,kind,Re_S2d,Im_S2d,Sx,Sp,St,Re_I";

pub fn write_entropy_csv<'a, W, I>(reports: I, mut out: W) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a EntropyReport>,
{
    writeln!(out, "{ENTROPY_HEADER}")?;
    let f = |v: f64| format_significant(v, TABLE_DIGITS);
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            f(r.lambda),
            r.n,
            r.kind.label(),
            f(r.s2d.re),
            f(r.s2d.im),
            f(r.sx),
            f(r.sp),
            f(r.st),
            f(r.mutual_information.re)
        )?;
    }
    Ok(())
}

pub const CRJ_HEADER: &str = "lambda,n,space,pair,value";

pub fn write_crj_csv<'a, W, I>(rows: I, mut out: W) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a CrjRow>,
{
    writeln!(out, "{CRJ_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            format_significant(r.lambda, TABLE_DIGITS),
            r.n,
            r.space.name(),
            r.pair.label(),
            format_significant(r.value, TABLE_DIGITS)
        )?;
    }
    Ok(())
}

pub const MARGINAL_HEADER: &str = "space,kind,coordinate,density";

/// One row per node of each marginal, in the order given.
pub fn write_marginals_csv<'a, W, I>(marginals: I, mut out: W) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a MarginalDensity>,
{
    writeln!(out, "{MARGINAL_HEADER}")?;
    for m in marginals {
        let kind = m.source_kind().map_or("-", |k| k.label());
        for (t, v) in m.nodes().into_iter().zip(m.values()) {
            writeln!(
                out,
                "{},{},{},{}",
                m.projection().name(),
                kind,
                format_significant(t, TABLE_DIGITS),
                format_significant(*v, TABLE_DIGITS)
            )?;
        }
    }
    Ok(())
}
