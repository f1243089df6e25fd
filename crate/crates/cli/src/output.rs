//! Number formatting and the on-disk formats (JSON, CSV, plain PGM).

use serde::Serialize;
use serde_json::Value;

use ratdyn::map::OutcomeLabel;
use ratdyn::scan::BasinRaster;

pub const SIG_DIGITS: usize = 15;

/// `x` rounded to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal for `round_sig(x)`, in exponent form outside
/// `[1e-6, 1e15)`; non-finite values print as `NaN`, `inf`, `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round_sig(x);
        if r != 0.0 && (r.abs() < 1e-6 || r.abs() >= 1e15) {
            format!("{r:e}")
        } else {
            format!("{r}")
        }
    }
}

/// `a+bi` with both parts at 15 significant digits.
pub fn fmt_complex(z: num_complex::Complex<f64>) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", fmt_num(z.re), fmt_num(-z.im))
    } else {
        format!("{}+{}i", fmt_num(z.re), fmt_num(z.im))
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 15 significant digits.
/// Non-finite floats serialize as `null`.
pub fn to_json<S: Serialize>(report: &S) -> Result<String, serde_json::Error> {
    let mut v = serde_json::to_value(report)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Gray level of each label name: evenly spread over 0..=255.
pub fn gray_levels() -> Vec<(&'static str, u8)> {
    let n = OutcomeLabel::NAMES.len();
    OutcomeLabel::NAMES
        .iter()
        .enumerate()
        .map(|(i, &name)| (name, (i * 255 / (n - 1)) as u8))
        .collect()
}

fn gray_of(label: &OutcomeLabel) -> u8 {
    let name = label.name();
    gray_levels()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, g)| g)
        .unwrap_or(0)
}

pub fn basin_pgm<T>(raster: &BasinRaster<T>) -> String {
    let n = raster.grid.resolution;
    let mut out = format!("P2\n# ratdyn basin raster, row 0 = top\n{n} {n}\n255\n");
    for row in &raster.labels {
        let line: Vec<String> = row.iter().map(|l| gray_of(l).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct PgmLegend<'a, T: Serialize> {
    pub levels: Vec<LegendEntry>,
    pub counts: std::collections::BTreeMap<&'static str, usize>,
    pub grid: &'a ratdyn::ScanGrid,
    pub slice: ratdyn::scan::SlicePolicy,
    pub partner: num_complex::Complex<T>,
    pub params: &'a ratdyn::Params<T>,
    pub config: &'a ratdyn::ToleranceConfig,
}

#[derive(Serialize)]
pub struct LegendEntry {
    pub label: &'static str,
    pub gray: u8,
}

pub fn basin_legend(raster: &BasinRaster<f64>) -> PgmLegend<'_, f64> {
    PgmLegend {
        levels: gray_levels()
            .into_iter()
            .map(|(label, gray)| LegendEntry { label, gray })
            .collect(),
        counts: raster.label_counts(),
        grid: &raster.grid,
        slice: raster.slice,
        partner: raster.partner,
        params: &raster.params,
        config: &raster.config,
    }
}

/// One row per cell: `row,col,re,im,label`.
pub fn basin_csv(raster: &BasinRaster<f64>) -> String {
    let mut out = String::from("row,col,re,im,label\n");
    for (i, row) in raster.labels.iter().enumerate() {
        for (j, label) in row.iter().enumerate() {
            let c = raster.grid.point(i, j);
            out.push_str(&format!("{i},{j},{},{},{}\n", fmt_num(c.re), fmt_num(c.im), label.name()));
        }
    }
    out
}
