//! Run artifacts: JSON and CSV outputs of a search, and SVG plots of them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use genaug_core::augment::serialize_policy;
use genaug_core::evolve::{GenerationRecord, SearchOutcome};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const ARCHIVE_JSON: &str = "archive.json";
pub const FINAL_POLICY_JSON: &str = "final_policy.json";
pub const HISTORY_CSV: &str = "history.csv";
pub const PARETO_CSV: &str = "pareto.csv";
pub const EVOLUTION_SVG: &str = "evolution.svg";
pub const PARETO_SVG: &str = "pareto.svg";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub generation: usize,
    pub var_min: f64,
    pub var_mean: f64,
    pub var_max: f64,
    pub dist_min: f64,
    pub dist_mean: f64,
    pub dist_max: f64,
    pub mean_length: f64,
}

impl From<&GenerationRecord> for HistoryRow {
    fn from(r: &GenerationRecord) -> Self {
        Self {
            generation: r.generation,
            var_min: r.var_min,
            var_mean: r.var_mean,
            var_max: r.var_max,
            dist_min: r.dist_min,
            dist_mean: r.dist_mean,
            dist_max: r.dist_max,
            mean_length: r.mean_length,
        }
    }
}

/// One archive entry; `policy_index` points into `archive.json`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoRow {
    pub variance: f64,
    pub distance: f64,
    pub policy_index: usize,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::runtime(format!("{}: {e}", path.display()))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

const HISTORY_HEADER: [&str; 8] =
    ["generation", "var_min", "var_mean", "var_max", "dist_min", "dist_mean", "dist_max", "mean_length"];
const PARETO_HEADER: [&str; 3] = ["variance", "distance", "policy_index"];

/// Writes archive.json, final_policy.json, history.csv, and pareto.csv.
pub fn write_search_artifacts(dir: &Path, outcome: &SearchOutcome) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let entries = outcome.archive.sorted();

    let archive: Vec<serde_json::Value> = entries
        .iter()
        .map(|g| {
            let fit = g.expect_fitness();
            serde_json::json!({ "policy": g.policy.to_json(), "variance": fit.variance, "distance": fit.distance })
        })
        .collect();
    let path = dir.join(ARCHIVE_JSON);
    let text = serde_json::to_string_pretty(&archive).expect("json values serialize");
    fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;

    let path = dir.join(FINAL_POLICY_JSON);
    fs::write(&path, serialize_policy(&outcome.final_genome.policy) + "\n").map_err(|e| io_err(&path, e))?;

    let history: Vec<HistoryRow> = outcome.history.iter().map(HistoryRow::from).collect();
    write_csv(&dir.join(HISTORY_CSV), &history, &HISTORY_HEADER)?;

    let pareto: Vec<ParetoRow> = entries
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let fit = g.expect_fitness();
            ParetoRow { variance: fit.variance, distance: fit.distance, policy_index: i }
        })
        .collect();
    write_csv(&dir.join(PARETO_CSV), &pareto, &PARETO_HEADER)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let rows = r
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::usage(format!("malformed {}: {e}", path.display())))?;
    if rows.is_empty() {
        return Err(CliError::usage(format!("{} has no rows", path.display())));
    }
    Ok(rows)
}

pub fn read_history(path: &Path) -> Result<Vec<HistoryRow>, CliError> {
    read_csv(path)
}

pub fn read_pareto(path: &Path) -> Result<Vec<ParetoRow>, CliError> {
    read_csv(path)
}

const WIDTH: f64 = 640.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 60.0;
const PANEL_HEIGHT: f64 = 220.0;
const PANEL_GAP: f64 = 40.0;
const TOP: f64 = 40.0;

/// Linear map of `[lo, hi]` onto `[a, b]`; a degenerate domain maps to the midpoint.
fn scale(v: f64, (lo, hi): (f64, f64), (a, b): (f64, f64)) -> f64 {
    if hi > lo {
        a + (v - lo) / (hi - lo) * (b - a)
    } else {
        (a + b) / 2.0
    }
}

fn extent(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn polyline(points: &[(f64, f64)], class: &str, style: &str) -> String {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!("<polyline class=\"{class}\" points=\"{}\" fill=\"none\" {style}/>\n", pts.join(" "))
}

fn svg_open(height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"0 0 {WIDTH} {height}\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn y_axis_labels(out: &mut String, range: (f64, f64), top: f64, bottom: f64, x: f64, anchor: &str) {
    for (v, y) in [(range.1, top), (range.0, bottom)] {
        let _ = writeln!(out, "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"{anchor}\">{v:.4}</text>", y + 4.0);
    }
}

/// Two stacked panels (variance, distance) each with a min..max band and a
/// mean line; the variance panel also carries the mean genome length on a
/// right-hand axis. One x tick per generation, shared by both panels.
pub fn evolution_svg(rows: &[HistoryRow]) -> String {
    let height = TOP + 2.0 * PANEL_HEIGHT + PANEL_GAP + 50.0;
    let x_range = extent(rows.iter().map(|r| r.generation as f64));
    let x_px = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let x = |g: usize| scale(g as f64, x_range, x_px);

    let mut out = svg_open(height);
    type Pick = fn(&HistoryRow) -> (f64, f64, f64);
    let panels: [(&str, Pick, f64); 2] = [
        ("variance", |r| (r.var_min, r.var_mean, r.var_max), TOP),
        ("distance", |r| (r.dist_min, r.dist_mean, r.dist_max), TOP + PANEL_HEIGHT + PANEL_GAP),
    ];
    for (name, pick, top) in panels {
        let bottom = top + PANEL_HEIGHT;
        let range = extent(rows.iter().flat_map(|r| {
            let (lo, _, hi) = pick(r);
            [lo, hi]
        }));
        let y = |v: f64| scale(v, range, (bottom, top));
        let _ = writeln!(out, "<g class=\"panel\" id=\"{name}\">");
        let _ = writeln!(
            out,
            "<rect x=\"{MARGIN_LEFT}\" y=\"{top}\" width=\"{}\" height=\"{PANEL_HEIGHT}\" fill=\"none\" stroke=\"#888\"/>",
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        );
        let _ = writeln!(out, "<text x=\"{MARGIN_LEFT}\" y=\"{:.2}\">{name} (min/mean/max)</text>", top - 8.0);
        let mut band: Vec<String> = rows.iter().map(|r| format!("{:.2},{:.2}", x(r.generation), y(pick(r).2))).collect();
        band.extend(rows.iter().rev().map(|r| format!("{:.2},{:.2}", x(r.generation), y(pick(r).0))));
        let _ = writeln!(out, "<polygon class=\"band\" points=\"{}\" fill=\"#4c72b0\" fill-opacity=\"0.25\" stroke=\"none\"/>", band.join(" "));
        let mean: Vec<(f64, f64)> = rows.iter().map(|r| (x(r.generation), y(pick(r).1))).collect();
        out.push_str(&polyline(&mean, "mean", "stroke=\"#4c72b0\" stroke-width=\"2\""));
        y_axis_labels(&mut out, range, top, bottom, MARGIN_LEFT - 6.0, "end");

        if name == "variance" {
            let len_range = extent(rows.iter().map(|r| r.mean_length));
            let ly = |v: f64| scale(v, len_range, (bottom, top));
            let line: Vec<(f64, f64)> = rows.iter().map(|r| (x(r.generation), ly(r.mean_length))).collect();
            out.push_str(&polyline(&line, "mean-length", "stroke=\"#dd8452\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\""));
            y_axis_labels(&mut out, len_range, top, bottom, WIDTH - MARGIN_RIGHT + 6.0, "start");
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"#dd8452\">mean length</text>",
                WIDTH - MARGIN_RIGHT,
                top - 8.0
            );
        }
        out.push_str("</g>\n");
    }

    let axis_y = TOP + 2.0 * PANEL_HEIGHT + PANEL_GAP;
    let _ = writeln!(out, "<g class=\"x-axis\">");
    for r in rows {
        let _ = writeln!(
            out,
            "<g class=\"x-tick\"><line x1=\"{0:.2}\" y1=\"{axis_y}\" x2=\"{0:.2}\" y2=\"{1}\" stroke=\"#888\"/><text x=\"{0:.2}\" y=\"{2}\" text-anchor=\"middle\">{3}</text></g>",
            x(r.generation),
            axis_y + 5.0,
            axis_y + 18.0,
            r.generation
        );
    }
    let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">generation</text>", WIDTH / 2.0, axis_y + 36.0);
    out.push_str("</g>\n</svg>\n");
    out
}

/// Scatter of archive entries: distance on x, variance on y.
pub fn pareto_svg(rows: &[ParetoRow]) -> String {
    let height = 420.0;
    let (top, bottom) = (TOP, height - 50.0);
    let xr = extent(rows.iter().map(|r| r.distance));
    let yr = extent(rows.iter().map(|r| r.variance));
    let mut out = svg_open(height);
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN_LEFT}\" y=\"{top}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>",
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        bottom - top
    );
    for r in rows {
        let _ = writeln!(
            out,
            "<circle class=\"pareto-point\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#c44e52\"><title>#{} variance {} distance {}</title></circle>",
            scale(r.distance, xr, (MARGIN_LEFT, WIDTH - MARGIN_RIGHT)),
            scale(r.variance, yr, (bottom, top)),
            r.policy_index,
            r.variance,
            r.distance
        );
    }
    y_axis_labels(&mut out, yr, top, bottom, MARGIN_LEFT - 6.0, "end");
    for (v, x) in [(xr.0, MARGIN_LEFT), (xr.1, WIDTH - MARGIN_RIGHT)] {
        let _ = writeln!(out, "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{v:.4}</text>", bottom + 16.0);
    }
    let _ = writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">distance</text>", WIDTH / 2.0, bottom + 34.0);
    let _ = writeln!(out, "<text x=\"14\" y=\"{:.2}\" transform=\"rotate(-90 14 {:.2})\" text-anchor=\"middle\">variance</text>", (top + bottom) / 2.0, (top + bottom) / 2.0);
    out.push_str("</svg>\n");
    out
}

/// Reads history.csv and pareto.csv from `dir` and writes both plots next to them.
pub fn write_report(dir: &Path) -> Result<(), CliError> {
    let history = read_history(&dir.join(HISTORY_CSV))?;
    let pareto = read_pareto(&dir.join(PARETO_CSV))?;
    for (name, svg) in [(EVOLUTION_SVG, evolution_svg(&history)), (PARETO_SVG, pareto_svg(&pareto))] {
        let path = dir.join(name);
        fs::write(&path, svg).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}
