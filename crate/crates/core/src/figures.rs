//! Plot-ready data series.
//!
//! Each figure is one or more [`Series`]: a flat table with parameter
//! columns first and values after, written as CSV with a JSON sidecar that
//! records the generating parameters and column meanings.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::beliefs::{
    belief_envelope, probability_to_woe, woe_cdf, woe_pdf, woe_to_probability, Probability, WeightOfEvidence,
};
use crate::error::{Error, Result};
use crate::fairsolver::{normalized_mean_margin, quick_adjustment, solve_w1_star};
use crate::manifest::RunManifest;
use crate::posterior::{PosteriorDensity, Variant};
use crate::pricing::{conditional_mean_seller_margin, WeightRule};

/// Figures with data series.
pub const FIGURE_IDS: [u8; 8] = [1, 2, 3, 4, 6, 7, 8, 9];

/// Sampling of the horizontal axis and of the noise levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureGrid {
    /// Interior points on `(0, 1)`; `points = 99` gives steps of 0.01.
    pub points: usize,
    /// Noise levels; `None` uses each figure's own.
    pub epsilon: Option<Vec<f64>>,
}

impl Default for FigureGrid {
    fn default() -> Self {
        Self {
            points: 99,
            epsilon: None,
        }
    }
}

impl FigureGrid {
    fn axis(&self) -> Vec<f64> {
        let n = self.points.max(1);
        (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
    }

    fn closed_axis(&self) -> Vec<f64> {
        let n = self.points.max(1) + 1;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    fn eps(&self, default: &[f64]) -> Vec<f64> {
        self.epsilon.clone().unwrap_or_else(|| default.to_vec())
    }
}

/// One table of a figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    /// File stem, e.g. `figure3`.
    pub name: String,
    pub title: String,
    /// `(name, description)` per column.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    fn new(name: &str, title: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.into(),
            title: title.into(),
            columns: columns.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|(c, _)| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|(c, _)| c.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| {
                if x.is_finite() {
                    format!("{x:.16e}")
                } else {
                    x.to_string()
                }
            }))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Computes the series of figure `id`.
pub fn figure(id: u8, grid: &FigureGrid) -> Result<Vec<Series>> {
    match id {
        1 => Ok(vec![figure1(grid)?]),
        2 => figure2(grid),
        3 => Ok(vec![figure3(grid)?]),
        4 => Ok(vec![figure4(grid)?]),
        6 => Ok(vec![figure6(grid)?]),
        7 => Ok(vec![margin_and_adjustment("figure7", Variant::BasicGame, grid)?]),
        8 => Ok(vec![figure8(grid)?]),
        9 => Ok(vec![margin_and_adjustment("figure9", Variant::DeFinetti, grid)?]),
        other => Err(Error::Config(format!(
            "unknown figure {other} (expected one of 1, 2, 3, 4, 6, 7, 8, 9)"
        ))),
    }
}

/// Writes every series of figure `id` into `dir` as `<name>.csv` plus
/// `<name>.csv.json`, returning the CSV paths.
pub fn write_figure(id: u8, grid: &FigureGrid, dir: &Path) -> Result<Vec<PathBuf>> {
    let series = figure(id, grid)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for s in &series {
        let path = dir.join(format!("{}.csv", s.name));
        s.write_csv(BufWriter::new(File::create(&path)?))?;
        let mut manifest = RunManifest::new("figures")
            .param("figure", id)
            .param("series", &s.name)
            .param("title", &s.title)
            .param("points", grid.points)
            .param("epsilon", &grid.epsilon)
            .output(&path);
        for (c, d) in &s.columns {
            manifest = manifest.column(c, d);
        }
        manifest.write(&RunManifest::sidecar_path(&path))?;
        paths.push(path);
    }
    Ok(paths)
}

fn prob(x: f64) -> Result<Probability> {
    Probability::new(x)
}

/// Envelope bounds against `p_t`.
fn figure1(grid: &FigureGrid) -> Result<Series> {
    let mut s = Series::new(
        "figure1",
        "Belief envelope [L, H] around the true frequency",
        &[
            ("epsilon", "noise fraction"),
            ("p_t", "true frequency"),
            ("lower", "L, lowest belief"),
            ("upper", "H, highest belief"),
        ],
    );
    for e in grid.eps(&[0.25, 0.5, 0.75, 1.0]) {
        for p in grid.closed_axis() {
            let env = belief_envelope(prob(p)?, e)?;
            s.push(vec![e, p, env.lower().get(), env.upper().get()]);
        }
    }
    Ok(s)
}

/// Distribution of the gathered evidence, and the evidence-to-probability map.
fn figure2(grid: &FigureGrid) -> Result<Vec<Series>> {
    let mut left = Series::new(
        "figure2_left",
        "CDF and density of the weight of evidence gathered",
        &[
            ("epsilon", "noise fraction"),
            ("p_t", "true frequency"),
            ("woe_t", "weight of evidence of p_t, bans"),
            ("woe", "weight of evidence gathered, bans"),
            ("cdf", "probability of gathering at most woe"),
            ("pdf", "density per ban"),
        ],
    );
    let n = grid.points.max(2);
    for e in grid.eps(&[0.5, 1.0]) {
        for p in [0.05, 0.5, 0.95] {
            let env = belief_envelope(prob(p)?, e)?;
            let woe_t = probability_to_woe(prob(p)?)?.bans();
            for i in 0..=n {
                let w = -4.0 + 8.0 * i as f64 / n as f64;
                let woe = WeightOfEvidence::new(w)?;
                left.push(vec![e, p, woe_t, w, woe_cdf(woe, &env)?, woe_pdf(woe, &env)?]);
            }
        }
    }
    let mut right = Series::new(
        "figure2_right",
        "Probability as a function of weight of evidence",
        &[
            ("woe", "weight of evidence, bans"),
            ("probability", "1 / (10^-woe + 1)"),
        ],
    );
    for i in 0..=n {
        let w = -4.0 + 8.0 * i as f64 / n as f64;
        right.push(vec![w, woe_to_probability(WeightOfEvidence::new(w)?).get()]);
    }
    Ok(vec![left, right])
}

/// Seller's conditional mean margin against `p_t`.
fn figure3(grid: &FigureGrid) -> Result<Series> {
    let mut s = Series::new(
        "figure3",
        "Seller's mean margin when betting indiscriminately",
        &[
            ("w1", "weight on the seller's belief"),
            ("epsilon", "noise fraction"),
            ("p_t", "true frequency"),
            ("seller_margin", "mean objective margin of the seller"),
            ("buyer_margin", "mean objective margin of the buyer"),
        ],
    );
    for w in [0.25, 0.5, 0.75] {
        let rule = WeightRule::new(w)?;
        for e in grid.eps(&[0.25, 0.5, 1.0]) {
            for p in grid.axis() {
                let v = if e == 0.0 {
                    0.0
                } else {
                    conditional_mean_seller_margin(prob(p)?, e, rule)?
                };
                s.push(vec![w, e, p, v, -v]);
            }
        }
    }
    Ok(s)
}

/// Fair weight on the seller against `p_t`, with the resulting mean odds.
fn figure4(grid: &FigureGrid) -> Result<Series> {
    let mut s = Series::new(
        "figure4",
        "Weight on the seller's belief that makes indiscriminate betting fair",
        &[
            ("epsilon", "noise fraction"),
            ("p_t", "true frequency"),
            ("w1_star", "fair weight on the seller's belief"),
            ("mean_p_c", "mean consensus at w1_star"),
            ("consensus_odds", "1 / mean_p_c"),
            ("true_odds", "1 / p_t"),
        ],
    );
    for e in grid.eps(&[0.25, 0.5, 0.75, 1.0]) {
        for p in grid.axis() {
            let w = solve_w1_star(prob(p)?, e)?.w1;
            // E[max] = p + E/3 and E[min] = p - E/3 for two uniform draws
            let half = belief_envelope(prob(p)?, e)?.half_width();
            let mean_pc = p + half / 3.0 * (1.0 - 2.0 * w);
            s.push(vec![e, p, w, mean_pc, 1.0 / mean_pc, 1.0 / p]);
        }
    }
    Ok(s)
}

/// Posterior density of `p_t` for a few quotes.
fn figure6(grid: &FigureGrid) -> Result<Series> {
    let mut s = Series::new(
        "figure6",
        "Density of the true frequency given the agreed probability",
        &[
            ("epsilon", "noise fraction"),
            ("p_c", "agreed probability"),
            ("p_t", "true frequency"),
            ("density", "posterior density of p_t"),
        ],
    );
    for e in grid.eps(&[1.0, 0.5]) {
        for pc in [0.05, 0.5, 0.95] {
            let d = PosteriorDensity::new(prob(pc)?, e, Variant::BasicGame)?;
            for p in grid.closed_axis() {
                s.push(vec![e, pc, p, d.pdf(prob(p)?)]);
            }
        }
    }
    Ok(s)
}

/// Mean seller margin at unadjusted odds and the fair adjustment, both
/// against `p_c`.
fn margin_and_adjustment(name: &str, variant: Variant, grid: &FigureGrid) -> Result<Series> {
    let title = match variant {
        Variant::BasicGame => "Seller's mean margin given the agreed probability, and the fair adjustment",
        Variant::DeFinetti => "Quoting party's mean margin as seller, and the fair adjustment",
    };
    let mut s = Series::new(
        name,
        title,
        &[
            ("epsilon", "noise fraction"),
            ("p_c", "agreed probability"),
            ("seller_margin", "mean seller margin at odds 1/p_c"),
            ("m", "fair adjustment"),
            ("fair_probability", "p_c + m"),
            ("pair_sum", "(p_c + m(p_c)) + (1 - p_c + m(1 - p_c))"),
        ],
    );
    for e in grid.eps(&[0.25, 0.5, 0.75, 1.0]) {
        for p in grid.axis() {
            let pc = prob(p)?;
            let margin = normalized_mean_margin(pc, e, 0.0, variant)?;
            let m = quick_adjustment(pc, e, variant)?;
            let mirror = quick_adjustment(pc.complement(), e, variant)?;
            s.push(vec![e, p, margin, m, p + m, (p + m) + (1.0 - p + mirror)]);
        }
    }
    Ok(s)
}

/// Fair odds next to the naive odds.
fn figure8(grid: &FigureGrid) -> Result<Series> {
    let mut s = Series::new(
        "figure8",
        "Fair odds compared with the odds of the agreed probability",
        &[
            ("epsilon", "noise fraction"),
            ("p_c", "agreed probability"),
            ("naive_odds", "1 / p_c"),
            ("fair_odds", "1 / (p_c + m)"),
        ],
    );
    for e in grid.eps(&[0.0, 0.25, 0.5, 0.75, 1.0]) {
        for p in grid.axis() {
            let m = quick_adjustment(prob(p)?, e, Variant::BasicGame)?;
            s.push(vec![e, p, 1.0 / p, 1.0 / (p + m)]);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse() -> FigureGrid {
        FigureGrid {
            points: 19,
            epsilon: None,
        }
    }

    #[test]
    fn unknown_figure_is_rejected() {
        assert!(matches!(figure(5, &coarse()), Err(Error::Config(_))));
    }

    #[test]
    fn full_noise_envelope_at_chance_spans_the_unit_interval() {
        let s = figure(1, &coarse()).unwrap().remove(0);
        let row = s.rows.iter().find(|r| r[0] == 1.0 && r[1] == 0.5).unwrap();
        assert_eq!((row[2], row[3]), (0.0, 1.0));
    }

    #[test]
    fn seller_margin_is_flat_below_chance() {
        let s = figure(3, &coarse()).unwrap().remove(0);
        for e in [0.25, 0.5, 1.0] {
            let v: Vec<f64> = s
                .rows
                .iter()
                .filter(|r| r[0] == 0.5 && r[1] == e && r[2] < 0.5)
                .map(|r| r[3])
                .collect();
            let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
            assert!(hi - lo < 1e-9, "eps={e}");
        }
    }

    #[test]
    fn adjustment_crosses_zero_at_chance_and_conserves_the_pair() {
        let s = figure(7, &coarse()).unwrap().remove(0);
        for r in &s.rows {
            let (p, m) = (r[1], r[3]);
            if (p - 0.5).abs() < 1e-12 {
                assert!(m.abs() < 1e-12);
            } else {
                assert_eq!(m > 0.0, p < 0.5);
            }
            assert!((r[5] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn series_are_written_with_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_figure(2, &coarse(), dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        for p in paths {
            let side = RunManifest::read(&RunManifest::sidecar_path(&p)).unwrap();
            assert_eq!(side.output_paths, vec![p.clone()]);
            let text = std::fs::read_to_string(&p).unwrap();
            assert!(text.lines().count() > 10);
        }
    }
}
