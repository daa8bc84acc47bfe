//! Flat `key=value` experiment configuration.
//!
//! A config file holds one `key=value` pair per line; a leading `#` is
//! stripped, and lines without `=` or starting with `##` (free-form notes)
//! are skipped, so the header of any result CSV is itself a valid config.
//! Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bounds::{BoundKind, Exclusion, QuadConfig};
use crate::error::{Error, Result};
use crate::window::parse_dims;

/// Deployment families a coverage experiment can draw stations from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Ppp,
    Mhc,
    Grid,
    File,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Ppp => "ppp",
            Source::Mhc => "mhc",
            Source::Grid => "grid",
            Source::File => "file",
        })
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ppp" => Ok(Source::Ppp),
            "mhc" => Ok(Source::Mhc),
            "grid" => Ok(Source::Grid),
            "file" => Ok(Source::File),
            other => Err(Error::param(
                "source",
                format!("expected ppp, mhc, grid or file, got {other:?}"),
            )),
        }
    }
}

/// Thresholds `start, start + step, ..., <= end` in dB, written `start:step:end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaGrid {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

impl Default for BetaGrid {
    fn default() -> Self {
        BetaGrid {
            start: -10.0,
            step: 1.0,
            end: 30.0,
        }
    }
}

impl BetaGrid {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + self.step * k as f64).collect()
    }
}

impl fmt::Display for BetaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.step, self.end)
    }
}

impl FromStr for BetaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::param(
                "beta_db",
                format!("expected start:step:end or a single value, got {s:?}"),
            )
        };
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let grid = match parts[..] {
            [v] => BetaGrid {
                start: v,
                step: 1.0,
                end: v,
            },
            [start, step, end] => BetaGrid { start, step, end },
            _ => return Err(bad()),
        };
        if !(grid.start.is_finite()
            && grid.end.is_finite()
            && grid.step > 0.0
            && grid.step.is_finite())
            || grid.end < grid.start
        {
            return Err(bad());
        }
        Ok(grid)
    }
}

/// Window for the lattice deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridWindow {
    /// Torus sized so the lattice has square cells and the density of the
    /// MHC process being compared against.
    Matched,
    /// Explicit size; users are kept off the edges by the default guard band.
    Size(f64, f64),
}

impl fmt::Display for GridWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridWindow::Matched => f.write_str("matched"),
            GridWindow::Size(w, h) => write!(f, "{w}x{h}"),
        }
    }
}

impl FromStr for GridWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "matched" {
            return Ok(GridWindow::Matched);
        }
        let (w, h) = parse_dims(s)?;
        Ok(GridWindow::Size(w, h))
    }
}

/// Every setting of a `simulate`, `bound` or `fit` run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub scenario: String,
    pub sources: Vec<Source>,
    pub alpha: f64,
    pub p_t: f64,
    /// Noise power, in the same unit as `p_t`.
    pub sigma2: f64,
    pub lambda_p: f64,
    pub d: f64,
    /// Poisson density; `None` matches the MHC density.
    pub ppp_lambda: Option<f64>,
    pub grid_n: usize,
    pub grid_window: GridWindow,
    /// Torus for random sources; `None` sizes it from the density.
    pub window: Option<(f64, f64)>,
    pub file: Option<PathBuf>,
    pub file_window: (f64, f64),
    pub offset_x: Option<f64>,
    pub offset_y: Option<f64>,
    pub scale: Option<f64>,
    pub beta_db: BetaGrid,
    pub n_trials: usize,
    pub seed: u64,
    pub kinds: Vec<BoundKind>,
    pub quad: QuadConfig,
    pub quad_scale: usize,
    pub with_sim: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: "simulate".into(),
            scenario: "custom".into(),
            sources: vec![Source::Mhc],
            alpha: 4.0,
            p_t: 1.0,
            sigma2: 0.1,
            lambda_p: 2.0,
            d: 0.4,
            ppp_lambda: None,
            grid_n: 24,
            grid_window: GridWindow::Matched,
            window: None,
            file: None,
            file_window: (100.0, 80.0),
            offset_x: None,
            offset_y: None,
            scale: None,
            beta_db: BetaGrid::default(),
            n_trials: 10_000,
            seed: 1,
            kinds: BoundKind::ALL.to_vec(),
            quad: QuadConfig::default(),
            quad_scale: 1,
            with_sim: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::param(config_key(key), format!("cannot parse {value:?}")))
}

fn parse_opt<T: FromStr>(key: &str, value: &str, none: &str) -> Result<Option<T>> {
    if value == none {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}

fn show_opt<T: fmt::Display>(v: &Option<T>, none: &str) -> String {
    v.as_ref()
        .map_or_else(|| none.to_string(), |x| x.to_string())
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Error messages name the key; parameter names must be `'static`.
fn config_key(key: &str) -> &'static str {
    KEYS.iter().copied().find(|k| *k == key).unwrap_or("config")
}

const KEYS: &[&str] = &[
    "command",
    "scenario",
    "sources",
    "alpha",
    "p_t",
    "sigma2",
    "lambda_p",
    "d",
    "ppp_lambda",
    "grid_n",
    "grid_window",
    "window",
    "file",
    "file_window",
    "offset_x",
    "offset_y",
    "scale",
    "beta_db",
    "n_trials",
    "seed",
    "kinds",
    "n_r",
    "n_theta",
    "n_upsilon",
    "r_max",
    "tail_tol",
    "exclusion",
    "quad_scale",
    "with_sim",
];

impl ExperimentConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "command" => self.command = v.into(),
            "scenario" => self.scenario = v.into(),
            "sources" => {
                self.sources = v.split(',').map(str::parse).collect::<Result<_>>()?;
            }
            "alpha" => self.alpha = parse_num(key, v)?,
            "p_t" => self.p_t = parse_num(key, v)?,
            "sigma2" => self.sigma2 = parse_num(key, v)?,
            "lambda_p" => self.lambda_p = parse_num(key, v)?,
            "d" => self.d = parse_num(key, v)?,
            "ppp_lambda" => self.ppp_lambda = parse_opt(key, v, "matched")?,
            "grid_n" => self.grid_n = parse_num(key, v)?,
            "grid_window" => self.grid_window = v.parse()?,
            "window" => {
                self.window = if v == "auto" {
                    None
                } else {
                    Some(parse_dims(v)?)
                }
            }
            "file" => {
                self.file = if v == "none" {
                    None
                } else {
                    Some(PathBuf::from(v))
                }
            }
            "file_window" => self.file_window = parse_dims(v)?,
            "offset_x" => self.offset_x = parse_opt(key, v, "header")?,
            "offset_y" => self.offset_y = parse_opt(key, v, "header")?,
            "scale" => self.scale = parse_opt(key, v, "header")?,
            "beta_db" => self.beta_db = v.parse()?,
            "n_trials" => self.n_trials = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "kinds" => {
                self.kinds = v
                    .split(',')
                    .map(|k| k.trim().parse())
                    .collect::<Result<_>>()?
            }
            "n_r" => self.quad.n_r = parse_num(key, v)?,
            "n_theta" => self.quad.n_theta = parse_num(key, v)?,
            "n_upsilon" => self.quad.n_upsilon = parse_num(key, v)?,
            "r_max" => self.quad.r_max = parse_opt(key, v, "auto")?,
            "tail_tol" => self.quad.upsilon_tail_tol = parse_num(key, v)?,
            "exclusion" => self.quad.exclusion = v.parse::<Exclusion>()?,
            "quad_scale" => self.quad_scale = parse_num(key, v)?,
            "with_sim" => self.with_sim = parse_num(key, v)?,
            _ => return Err(Error::param("config", format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies every `key=value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.starts_with("##") {
                continue;
            }
            let line = line.trim_start_matches('#').trim();
            let Some((key, value)) = line.split_once('=') else {
                continue;
            };
            let key = key.trim();
            if key.contains(char::is_whitespace) || key.contains(',') {
                // Data or free text, not a setting.
                continue;
            }
            self.set(key, value).map_err(|e| match e {
                Error::Parameter { name, reason } => Error::Parameter {
                    name,
                    reason: format!("{reason} (config line {})", lineno + 1),
                },
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        config.apply_text(text)?;
        Ok(config)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// All settings as `(key, value)` pairs, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let q = &self.quad;
        vec![
            ("command", self.command.clone()),
            ("scenario", self.scenario.clone()),
            ("sources", join(&self.sources)),
            ("alpha", self.alpha.to_string()),
            ("p_t", self.p_t.to_string()),
            ("sigma2", self.sigma2.to_string()),
            ("lambda_p", self.lambda_p.to_string()),
            ("d", self.d.to_string()),
            ("ppp_lambda", show_opt(&self.ppp_lambda, "matched")),
            ("grid_n", self.grid_n.to_string()),
            ("grid_window", self.grid_window.to_string()),
            (
                "window",
                self.window
                    .map_or_else(|| "auto".into(), |(w, h)| format!("{w}x{h}")),
            ),
            (
                "file",
                self.file
                    .as_ref()
                    .map_or_else(|| "none".into(), |p| p.display().to_string()),
            ),
            (
                "file_window",
                format!("{}x{}", self.file_window.0, self.file_window.1),
            ),
            ("offset_x", show_opt(&self.offset_x, "header")),
            ("offset_y", show_opt(&self.offset_y, "header")),
            ("scale", show_opt(&self.scale, "header")),
            ("beta_db", self.beta_db.to_string()),
            ("n_trials", self.n_trials.to_string()),
            ("seed", self.seed.to_string()),
            ("kinds", join(&self.kinds)),
            ("n_r", q.n_r.to_string()),
            ("n_theta", q.n_theta.to_string()),
            ("n_upsilon", q.n_upsilon.to_string()),
            ("r_max", show_opt(&q.r_max, "auto")),
            ("tail_tol", q.upsilon_tail_tol.to_string()),
            ("exclusion", q.exclusion.to_string()),
            ("quad_scale", self.quad_scale.to_string()),
            ("with_sim", self.with_sim.to_string()),
        ]
    }

    /// `# key=value` header lines.
    pub fn to_header(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("# {k}={v}\n"))
            .collect()
    }

    /// The quadrature settings with `quad_scale` applied.
    pub fn effective_quad(&self) -> QuadConfig {
        self.quad.scaled(self.quad_scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trips() {
        let mut c = ExperimentConfig {
            sources: vec![Source::Ppp, Source::File],
            file: Some(PathBuf::from("data/sites.csv")),
            window: Some((12.5, 9.0)),
            ppp_lambda: Some(1.25),
            scale: Some(0.001),
            grid_window: GridWindow::Size(100.0, 80.0),
            kinds: vec![BoundKind::Proposition1],
            beta_db: "10:0.5:20".parse().unwrap(),
            seed: u64::MAX,
            ..Default::default()
        };
        c.quad.r_max = Some(3.0);
        c.quad.exclusion = Exclusion::Symmetric;
        let back = ExperimentConfig::from_text(&c.to_header()).unwrap();
        assert_eq!(back, c);
        assert_eq!(
            ExperimentConfig::from_text(&ExperimentConfig::default().to_header()).unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn result_csv_is_a_config() {
        let text = "# seed=9\n## mean_gap=0.01\n# n_trials=50\nbeta_db,p_c,std_err,label\n-10,0.9,0.01,mhc\n";
        let c = ExperimentConfig::from_text(text).unwrap();
        assert_eq!((c.seed, c.n_trials), (9, 50));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(ExperimentConfig::from_text("colour=blue").is_err());
        let err = ExperimentConfig::from_text("\n\nd=abc").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(ExperimentConfig::from_text("sources=ppp,cube").is_err());
    }

    #[test]
    fn beta_grid_arithmetic() {
        let g: BetaGrid = "10:1:20".parse().unwrap();
        assert_eq!(g.values().len(), 11);
        assert_eq!(g.values()[10], 20.0);
        let g: BetaGrid = "-10:0.1:-9".parse().unwrap();
        assert_eq!(g.values().len(), 11);
        assert_eq!("5".parse::<BetaGrid>().unwrap().values(), vec![5.0]);
        assert!("1:0:3".parse::<BetaGrid>().is_err());
        assert!("3:1:1".parse::<BetaGrid>().is_err());
        assert!("a:b".parse::<BetaGrid>().is_err());
        assert_eq!(BetaGrid::default().values().len(), 41);
    }
}
