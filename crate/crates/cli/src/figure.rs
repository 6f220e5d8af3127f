//! Two-panel eigenvalue plots (Im λ over Re λ against ε) as SVG plus plain plot data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use vortex_core::lattice::Model;
use vortex_core::Complex64;

use crate::compare::predictions;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::sweep::{expand_panels, Manifest, BRANCH_HEADER};

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    /// `(ε, λ)` samples in increasing `ε`.
    pub points: Vec<(f64, Complex64)>,
    pub bold: bool,
    pub dashed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelData {
    pub title: String,
    pub series: Vec<Series>,
}

pub fn check_regime(cfg: &RunConfig, figure: u8) -> Result<(), CliError> {
    let spec = cfg.spec()?;
    let ok = match figure {
        1 => cfg.model == Model::Scalar,
        2 => cfg.model == Model::Vector && !spec.is_manakov() && cfg.beta < 1.0,
        3 => cfg.model == Model::Vector && !spec.is_manakov() && cfg.beta > 1.0,
        4 => spec.is_manakov(),
        _ => return Err(CliError::Config(format!("unknown figure {figure}; expected 1 to 4"))),
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "figure {figure} does not match this run ({:?}, beta = {}, delta = {:?})",
            cfg.model, cfg.beta, cfg.delta
        )))
    }
}

/// Reads `branch.csv` into per-track samples.
pub fn read_branch(dir: &Path) -> Result<BTreeMap<usize, Vec<(f64, Complex64)>>, CliError> {
    let path = dir.join("branch.csv");
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("missing artifacts {}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next() != Some(BRANCH_HEADER) {
        return Err(CliError::Config(format!("{} has an unknown schema", path.display())));
    }
    lines.next();
    let mut tracks: BTreeMap<usize, Vec<(f64, Complex64)>> = BTreeMap::new();
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let bad = || CliError::Config(format!("{}: malformed row {}", path.display(), k + 3));
        if f.len() != 5 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let id = f[1].parse::<usize>().map_err(|_| bad())?;
        tracks.entry(id).or_default().push((num(f[0])?, Complex64::new(num(f[2])?, num(f[3])?)));
    }
    Ok(tracks)
}

/// A track is drawn bold when it is doubled by another track or leaves both axes.
fn is_bold(id: usize, pts: &[(f64, Complex64)], all: &BTreeMap<usize, Vec<(f64, Complex64)>>) -> bool {
    let quartet = pts.iter().any(|(_, z)| z.re.abs() > 1e-4 && z.im.abs() > 1e-4);
    let doubled = pts
        .iter()
        .filter(|(e, z)| {
            all.iter()
                .any(|(&o, q)| o != id && q.iter().any(|(eo, w)| eo == e && (w - z).norm() <= 1e-6 * (1.0 + z.norm())))
        })
        .count();
    quartet || (pts.len() > 1 && doubled * 5 >= pts.len() * 4)
}

pub fn panel_data(cfg: &RunConfig) -> Result<PanelData, CliError> {
    let dir = cfg.out_dir();
    Manifest::load(&dir)?;
    let tracks = read_branch(&dir)?;
    let mut series: Vec<Series> = tracks
        .iter()
        .map(|(&id, pts)| Series {
            name: format!("track {id}"),
            points: pts.clone(),
            bold: is_bold(id, pts, &tracks),
            dashed: false,
        })
        .collect();

    let spec = cfg.spec()?;
    let mut by_label: BTreeMap<String, Vec<(f64, Complex64)>> = BTreeMap::new();
    for eps in cfg.eps_grid.points().into_iter().filter(|&e| e > 0.0) {
        if let Some(set) = predictions(&spec, eps) {
            for p in set.pairs {
                let z = p.value;
                by_label.entry(p.label).or_default().push((eps, Complex64::new(z.re.abs(), z.im.abs())));
            }
        }
    }
    series.extend(by_label.into_iter().map(|(name, points)| Series { name, points, bold: false, dashed: true }));
    let title = match cfg.model {
        Model::Scalar => "scalar".to_string(),
        Model::Vector => format!("{} beta = {}", cfg.charges, cfg.beta),
    };
    Ok(PanelData { title, series })
}

const W: f64 = 360.0;
const H: f64 = 200.0;
const MARGIN: f64 = 50.0;

fn axis_max(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.fold(0.0f64, f64::max);
    if m > 0.0 {
        m * 1.1
    } else {
        1.0
    }
}

#[allow(clippy::too_many_arguments)]
fn plot(
    out: &mut String,
    x0: f64,
    y0: f64,
    data: &PanelData,
    eps_max: f64,
    part: fn(Complex64) -> f64,
    label: &str,
    clip: &str,
) {
    let measured = data.series.iter().filter(|s| !s.dashed).flat_map(|s| s.points.iter().map(|p| part(p.1)));
    let y_max = axis_max(measured);
    let sx = |e: f64| x0 + e / eps_max * W;
    let sy = |v: f64| y0 + H - v / y_max * H;
    let _ = writeln!(out, r#"<clipPath id="{clip}"><rect x="{x0}" y="{y0}" width="{W}" height="{H}"/></clipPath>"#);
    let _ = writeln!(out, r#"<rect x="{x0}" y="{y0}" width="{W}" height="{H}" fill="none" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{label}</text>"#,
        x0 - 30.0,
        y0 + H / 2.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="10">0</text><text x="{}" y="{}" font-size="10" text-anchor="end">{eps_max}</text>"#,
        x0,
        y0 + H + 14.0,
        x0 + W,
        y0 + H + 14.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{:.3e}</text>"#,
        x0 - 2.0,
        y0 + 8.0,
        y_max
    );
    for s in &data.series {
        if s.points.len() < 2 && !s.dashed {
            if let Some(&(e, z)) = s.points.first() {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" clip-path="url(#{clip})"/>"#,
                    sx(e),
                    sy(part(z))
                );
            }
            continue;
        }
        let mut d = String::new();
        for (k, &(e, z)) in s.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, sx(e), sy(part(z)));
        }
        let (width, dash, color) = match (s.dashed, s.bold) {
            (true, _) => (1.0, r#" stroke-dasharray="4,3""#, "#c03030"),
            (false, true) => (2.5, "", "#203080"),
            (false, false) => (1.0, "", "#203080"),
        };
        let _ = writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="{width}"{dash} clip-path="url(#{clip})"/>"#
        );
    }
}

pub fn render_svg(panels: &[PanelData], eps_max: f64, figure: u8) -> String {
    let width = MARGIN + panels.len() as f64 * (W + MARGIN);
    let height = 2.0 * H + 3.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    for (k, p) in panels.iter().enumerate() {
        let x0 = MARGIN + k as f64 * (W + MARGIN);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">Figure {figure}: {}</text>"#,
            x0 + W / 2.0,
            MARGIN - 20.0,
            p.title
        );
        plot(&mut out, x0, MARGIN, p, eps_max, |z| z.im, "Im", &format!("c{k}a"));
        plot(&mut out, x0, 2.0 * MARGIN + H, p, eps_max, |z| z.re, "Re", &format!("c{k}b"));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">epsilon</text>"#,
            x0 + W / 2.0,
            height - 8.0
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn plot_data(panels: &[PanelData]) -> String {
    let mut out = String::from("# panel\tseries\tbold\tdashed\teps\tre\tim\n");
    for (k, p) in panels.iter().enumerate() {
        for s in &p.series {
            for &(e, z) in &s.points {
                let _ = writeln!(
                    out,
                    "{k}\t{}\t{}\t{}\t{e:.16e}\t{:.16e}\t{:.16e}",
                    s.name, s.bold as u8, s.dashed as u8, z.re, z.im
                );
            }
        }
    }
    out
}

/// Writes `figure_<n>.svg` and `figure_<n>.tsv` into the run's output directory.
pub fn emit_figure(cfg: &RunConfig, figure: u8) -> Result<(PathBuf, PathBuf), CliError> {
    let panels_cfg = expand_panels(cfg);
    for c in &panels_cfg {
        check_regime(c, figure)?;
    }
    let panels = panels_cfg.iter().map(panel_data).collect::<Result<Vec<_>, _>>()?;
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let svg = dir.join(format!("figure_{figure}.svg"));
    let dat = dir.join(format!("figure_{figure}.tsv"));
    fs::write(&svg, render_svg(&panels, cfg.eps_grid.stop.max(1e-12), figure))?;
    fs::write(&dat, plot_data(&panels))?;
    Ok((svg, dat))
}
