//! Command-line surface: simulate, reconstruct, evaluate, preview and
//! spectrum-diag.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use snapcs_core::imaging::{add_gaussian_noise, forward, generate_mask};
use snapcs_core::metrics::QualityReport;
use snapcs_core::patch::{build_group, match_blocks};
use snapcs_core::solver::{CgParams, IterationRecord, WeightMode};
use snapcs_core::{hosvd, reconstruct, Measurement, Position, SolverParams, SystemMode};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::format::{read_cube, read_plane, write_cube, write_plane};
use crate::preview::{band_wavelengths, rgb_preview};

#[derive(Debug, Parser)]
#[command(name = "snapcs", version, about = "Snapshot hyperspectral simulation, reconstruction and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Cassi,
    Dcchi,
}

impl From<ModeArg> for SystemMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cassi => SystemMode::Cassi,
            ModeArg::Dcchi => SystemMode::DualCamera,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightModeArg {
    Magnitude,
    Literal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a snapshot measurement of a cube with a random mask.
    Simulate {
        #[arg(long)]
        cube: PathBuf,
        #[arg(long, value_enum, default_value = "cassi")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability that a mask pixel is open.
        #[arg(long, default_value_t = 0.5, value_parser = probability)]
        p: f64,
        #[arg(long)]
        out_meas: PathBuf,
        #[arg(long)]
        out_pan: Option<PathBuf>,
        #[arg(long)]
        out_mask: PathBuf,
        /// Writes the system description next to the data.
        #[arg(long)]
        out_config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        dispersion_step: usize,
        #[arg(long)]
        noise_sigma: Option<f64>,
    },
    /// Reconstruct a cube from a measurement.
    Reconstruct {
        #[arg(long)]
        meas: PathBuf,
        #[arg(long)]
        pan: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        mask: Option<PathBuf>,
        /// `I,J,L`: rows, columns and bands of the cube.
        #[arg(long, value_parser = dims, required_unless_present = "config")]
        dims: Option<(usize, usize, usize)>,
        /// System description; replaces --mask, --dims and --dispersion-step.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        dispersion_step: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.0055)]
        c: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 5)]
        s: usize,
        #[arg(long, default_value_t = 4)]
        step: usize,
        #[arg(long, default_value_t = 45)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        window: usize,
        #[arg(long, default_value_t = 600)]
        iters: usize,
        #[arg(long, default_value_t = 40)]
        rematch_every: usize,
        #[arg(long, value_enum, default_value = "magnitude")]
        weight_mode: WeightModeArg,
        #[arg(long, default_value_t = 50)]
        cg_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        cg_tol: f64,
        /// Progress CSV with columns iter, residual, seconds.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Score an estimate against a reference cube.
    Evaluate {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        est: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render an sRGB preview as binary PPM.
    Preview {
        #[arg(long)]
        cube: PathBuf,
        #[arg(long, default_value_t = 400.0)]
        wl_start: f64,
        #[arg(long, default_value_t = 10.0)]
        wl_step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sorted core-coefficient magnitudes of one nonlocal group.
    SpectrumDiag {
        #[arg(long)]
        cube: PathBuf,
        /// `i,j`: top-left corner of the reference patch.
        #[arg(long, value_parser = anchor)]
        anchor: Position,
        #[arg(long, default_value_t = 5)]
        s: usize,
        #[arg(long, default_value_t = 45)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        window: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn probability(s: &str) -> std::result::Result<f64, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is not a probability in [0, 1]"))
    }
}

fn usizes(s: &str, n: usize) -> std::result::Result<Vec<usize>, String> {
    let v: Vec<usize> = s.split(',').map(|x| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"))).collect::<std::result::Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated integers, got {}", v.len()));
    }
    Ok(v)
}

fn dims(s: &str) -> std::result::Result<(usize, usize, usize), String> {
    let v = usizes(s, 3)?;
    Ok((v[0], v[1], v[2]))
}

fn anchor(s: &str) -> std::result::Result<Position, String> {
    let v = usizes(s, 2)?;
    Ok(Position::new(v[0], v[1]))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn io_at(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> std::result::Result<(), RunError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(RunError::Args)?;
    run(cli).map_err(RunError::Command)
}

#[derive(Debug)]
pub enum RunError {
    Args(clap::Error),
    Command(Error),
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { cube, mode, seed, p, out_meas, out_pan, out_mask, out_config, dispersion_step, noise_sigma } => {
            let f = read_cube(&cube)?;
            let (rows, cols, bands) = f.dims();
            let mode = SystemMode::from(mode);
            if mode == SystemMode::DualCamera && out_pan.is_none() {
                return Err(Error::Usage("dcchi simulation needs --out-pan".into()));
            }
            let mask = generate_mask(rows, cols, p, seed)?;
            let cfg = SystemConfig {
                mode,
                dims: (rows, cols, bands),
                dispersion_step,
                response: None,
                pan_response: None,
                mask: out_mask.clone(),
                seed: Some(seed),
            };
            let sys = cfg.build_with_mask(mask)?;
            let mut y = forward(&f, &sys)?;
            if let Some(sigma) = noise_sigma {
                add_gaussian_noise(&mut y.cassi, sigma, seed.wrapping_add(1))?;
                if let Some(pan) = y.pan.as_mut() {
                    add_gaussian_noise(pan, sigma, seed.wrapping_add(2))?;
                }
            }
            write_plane(sys.mask(), &out_mask)?;
            write_plane(&y.cassi, &out_meas)?;
            if let (Some(pan), Some(path)) = (&y.pan, &out_pan) {
                write_plane(pan, path)?;
            }
            if let Some(path) = out_config {
                std::fs::write(&path, cfg.to_string()).map_err(io_at(&path))?;
            }
            Ok(())
        }
        Command::Reconstruct {
            meas,
            pan,
            mask,
            dims,
            config,
            dispersion_step,
            out,
            tau,
            c,
            eps,
            s,
            step,
            k,
            window,
            iters,
            rematch_every,
            weight_mode,
            cg_iters,
            cg_tol,
            log,
        } => {
            let mode = if pan.is_some() { SystemMode::DualCamera } else { SystemMode::Cassi };
            let sys = match config {
                Some(path) => {
                    let mut cfg = SystemConfig::load(&path)?;
                    cfg.mode = mode;
                    if let Some(m) = mask {
                        cfg.mask = m;
                    }
                    cfg.build()?
                }
                None => {
                    let (mask, dims) = (mask.expect("clap requires --mask"), dims.expect("clap requires --dims"));
                    let cfg = SystemConfig { mode, dims, dispersion_step, response: None, pan_response: None, mask, seed: None };
                    cfg.build()?
                }
            };
            let y = Measurement { cassi: read_plane(&meas)?, pan: pan.as_deref().map(read_plane).transpose()? };
            let params = SolverParams {
                tau,
                c,
                eps,
                patch_size: s,
                step,
                k,
                window,
                search_stride: 1,
                max_iter: iters,
                cg: CgParams { max_iter: cg_iters, tol: cg_tol },
                rematch_every,
                weight_mode: match weight_mode {
                    WeightModeArg::Magnitude => WeightMode::Magnitude,
                    WeightModeArg::Literal => WeightMode::Literal,
                },
                rel_change_tol: None,
            };
            let start = Instant::now();
            let mut log_file = log.as_deref().map(create).transpose()?;
            let mut log_err: Option<std::io::Error> = None;
            if let Some(w) = log_file.as_mut() {
                if let Err(e) = writeln!(w, "iter,residual,seconds") {
                    log_err = Some(e);
                }
            }
            let mut sink = |r: &IterationRecord| {
                if let (Some(w), None) = (log_file.as_mut(), &log_err) {
                    if let Err(e) = writeln!(w, "{},{:e},{:.3}", r.iter, r.residual, start.elapsed().as_secs_f64()) {
                        log_err = Some(e);
                    }
                }
            };
            let f = reconstruct(&y, &sys, &params, Some(&mut sink))?;
            if let (Some(path), Some(e)) = (&log, log_err) {
                return Err(Error::Io { path: path.clone(), source: e });
            }
            if let (Some(path), Some(mut w)) = (&log, log_file) {
                w.flush().map_err(io_at(path))?;
            }
            write_cube(&f, &out)
        }
        Command::Evaluate { reference, est, out } => {
            let q = QualityReport::compute(&read_cube(&reference)?, &read_cube(&est)?)?;
            let mut w = create(&out)?;
            write_report_csv(&q, &mut w).and_then(|_| w.flush()).map_err(io_at(&out))?;
            print!("{}", report_text(&q));
            Ok(())
        }
        Command::Preview { cube, wl_start, wl_step, out } => {
            let f = read_cube(&cube)?;
            rgb_preview(&f, &band_wavelengths(f.bands(), wl_start, wl_step))?.write_ppm(&out)
        }
        Command::SpectrumDiag { cube, anchor, s, k, window, out } => {
            let f = read_cube(&cube)?;
            let members = match_blocks(&f, anchor, s, k, window)?;
            let core = hosvd(&build_group(&f, &members, s)?.stacked)?.core;
            let mut mags: Vec<f64> = core.as_slice().iter().map(|v| v.abs()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let total: f64 = mags.iter().map(|m| m * m).sum();
            let mut w = create(&out)?;
            let mut body = || -> std::io::Result<()> {
                writeln!(w, "rank,magnitude,energy_fraction")?;
                let mut acc = 0.0;
                for (r, m) in mags.iter().enumerate() {
                    acc += m * m;
                    let frac = if total > 0.0 { acc / total } else { 0.0 };
                    writeln!(w, "{},{:e},{:.6}", r + 1, m, frac)?;
                }
                w.flush()
            };
            body().map_err(io_at(&out))
        }
    }
}

pub fn write_report_csv(q: &QualityReport, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "metric,value")?;
    writeln!(w, "psnr,{}", q.psnr)?;
    writeln!(w, "psnr_band_mean,{}", q.psnr_band_mean)?;
    writeln!(w, "ssim,{}", q.ssim)?;
    writeln!(w, "ergas,{}", q.ergas)?;
    writeln!(w, "rmse,{}", q.rmse)?;
    for (b, p) in q.band_psnr.iter().enumerate() {
        writeln!(w, "psnr_band_{b},{p}")?;
    }
    Ok(())
}

pub fn report_text(q: &QualityReport) -> String {
    format!(
        "PSNR {:.2} dB (band mean {:.2} dB)\nSSIM {:.4}\nERGAS {:.3}\nRMSE {:.5}\n",
        q.psnr, q.psnr_band_mean, q.ssim, q.ergas, q.rmse
    )
}
