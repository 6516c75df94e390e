use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use brt_cli::angle::parse_angle;
use brt_cli::config::RunConfig;
use brt_cli::field_file::{read, write_field, write_spectrum, StoredField};
use brt_cli::metrics::metrics;
use brt_cli::noise::{add_noise, GENERATOR_NAME};
use brt_cli::pgm::export_pgm;
use brt_cli::repro;
use brt_core::extend::{brt_extend, ExtensionPlan};
use brt_core::filter::{apply_psf, FilterSpec};
use brt_core::invert::{brt_invert_filtered, recover_blurred, recover_unfiltered};
use brt_core::spectral::{dft2, idft2};
use brt_core::Direction;

#[derive(Parser)]
#[command(
    name = "brt",
    about = "Broken-ray-transform simulation, filtering, and reconstruction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid as tmin,tmax,nt,ymin,ymax,ny (pixel centers)
    #[arg(long, value_name = "SPEC", allow_hyphen_values = true)]
    grid: Option<String>,
}

impl GridArgs {
    fn apply(&self, cfg: &mut RunConfig) -> anyhow::Result<()> {
        if let Some(spec) = &self.grid {
            let parts: Vec<&str> = spec.split(',').collect();
            if parts.len() != 6 {
                anyhow::bail!("grid spec needs 6 comma-separated values");
            }
            cfg.tmin = parts[0].trim().parse()?;
            cfg.tmax = parts[1].trim().parse()?;
            cfg.nt = parts[2].trim().parse()?;
            cfg.ymin = parts[3].trim().parse()?;
            cfg.ymax = parts[4].trim().parse()?;
            cfg.ny = parts[5].trim().parse()?;
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a phantom onto a grid
    Phantom {
        /// `shepp-logan` or a phantom text file
        #[arg(long, default_value = "shepp-logan")]
        phantom: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sample analytic transform data (cbt, brt, or sbrt)
    Forward {
        #[arg(long, default_value = "shepp-logan")]
        phantom: String,
        #[command(flatten)]
        grid: GridArgs,
        /// cbt | brt | sbrt
        #[arg(long, default_value = "brt")]
        mode: String,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        xi_i: String,
        #[arg(long, default_value = "pi/11", allow_hyphen_values = true)]
        xi_j: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Extend truncated BRT data (incident direction fixed at (-1, 0))
    Extend {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        xi_j: String,
        #[arg(long, default_value_t = 64)]
        m_t: usize,
        /// 0 sizes the -y extension from the shear automatically
        #[arg(long, default_value_t = 0)]
        m_y: usize,
        #[arg(long, default_value_t = 16)]
        pad: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Filter data with the four-impulse PSF
    Filter {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        xi_i: String,
        #[arg(long, allow_hyphen_values = true)]
        xi_j: String,
        #[arg(long)]
        a_i: f64,
        #[arg(long)]
        a_j: f64,
        /// Defaults to max(N/8, 16) trailing zeros per axis
        #[arg(long)]
        pad: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Invert filtered data in the frequency domain
    Invert {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        xi_i: String,
        #[arg(long, allow_hyphen_values = true)]
        xi_j: String,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recover an image from a filtered-image estimate or filtered data
    Recover {
        #[arg(short, long)]
        input: PathBuf,
        /// unfiltered (fold the four signed copies) | blurred (divide by the
        /// parallelogram-window response)
        #[arg(long)]
        method: String,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        xi_i: String,
        #[arg(long, allow_hyphen_values = true)]
        xi_j: String,
        #[arg(long)]
        a_i: f64,
        #[arg(long)]
        a_j: f64,
        /// Support extents v_i,v_j for the circumscribed parallelogram
        /// (unfiltered method)
        #[arg(long, allow_hyphen_values = true)]
        extents: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long, default_value_t = 64)]
        pad: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Add seeded Gaussian noise scaled to a reference peak
    Noise {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        std_factor: f64,
        /// Peak amplitude of the reference image; defaults to the input peak
        #[arg(long)]
        peak: Option<f64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare an estimate against a reference field
    Metrics {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        reference: PathBuf,
    },
    /// |K| or |H| spectrum panel on a grid
    Spectrum {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value = "pi", allow_hyphen_values = true)]
        xi_i: String,
        #[arg(long, allow_hyphen_values = true)]
        xi_j: String,
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        /// k | h
        #[arg(long, default_value = "k")]
        kind: String,
        #[arg(short, long)]
        output: PathBuf,
        /// Optional PGM panel next to the field file
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Run a named figure pipeline end to end
    Repro {
        /// fig3 | fig4 | fig5 | fig6 | fig7 | fig8
        figure: String,
        /// key=value configuration overrides
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        outdir: PathBuf,
    },
    /// Transform a stored field (dft2) or spectrum (idft2)
    Dft {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Invert instead of forward-transform
        #[arg(long)]
        inverse: bool,
    },
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Phantom { phantom, grid, output } => {
            let mut cfg = RunConfig { phantom, ..RunConfig::default() };
            grid.apply(&mut cfg)?;
            write_field(&output, &repro::rasterize_named(&cfg)?)?;
        }
        Command::Forward { phantom, grid, mode, xi_i, xi_j, output } => {
            let mut cfg = RunConfig { phantom, ..RunConfig::default() };
            grid.apply(&mut cfg)?;
            cfg.xi_i = parse_angle(&xi_i)?;
            cfg.xi_j = parse_angle(&xi_j)?;
            write_field(&output, &repro::forward_named(&cfg, &mode)?)?;
        }
        Command::Extend { input, xi_j, m_t, m_y, pad, output } => {
            let field = read(&input)?.into_real()?;
            let xi = parse_angle(&xi_j)?;
            let mut plan = ExtensionPlan::for_grid(&field.grid, xi, m_t, pad)?;
            if m_y > 0 {
                plan.m_y = m_y;
            }
            write_field(&output, &brt_extend(&field, xi, &plan)?)?;
        }
        Command::Filter { input, xi_i, xi_j, a_i, a_j, pad, output } => {
            let field = read(&input)?.into_real()?;
            let spec = FilterSpec::new(
                Direction::from_angle(parse_angle(&xi_i)?)?,
                Direction::from_angle(parse_angle(&xi_j)?)?,
                a_i,
                a_j,
            )?;
            let pad = pad.unwrap_or_else(|| {
                brt_core::spectral::default_shift_pad(field.grid.nt.max(field.grid.ny))
            });
            write_field(&output, &apply_psf(&field, &spec, pad)?)?;
        }
        Command::Invert { input, xi_i, xi_j, eps, output } => {
            let field = read(&input)?.into_real()?;
            let psi =
                brt_invert_filtered(&field, parse_angle(&xi_i)?, parse_angle(&xi_j)?, eps)?;
            write_field(&output, &psi)?;
        }
        Command::Recover {
            input,
            method,
            xi_i,
            xi_j,
            a_i,
            a_j,
            extents,
            eps,
            pad,
            output,
        } => {
            let field = read(&input)?.into_real()?;
            let ti = Direction::from_angle(parse_angle(&xi_i)?)?;
            let tj = Direction::from_angle(parse_angle(&xi_j)?)?;
            let spec = FilterSpec::new(ti, tj, a_i, a_j)?;
            let out = match method.as_str() {
                "unfiltered" => {
                    let extents = extents.ok_or_else(|| {
                        anyhow::anyhow!("--extents v_i,v_j is required for method=unfiltered")
                    })?;
                    let (vi, vj) = extents
                        .split_once(',')
                        .ok_or_else(|| anyhow::anyhow!("bad --extents"))?;
                    let par = brt_core::Parallelogram::from_extents(
                        ti,
                        tj,
                        vi.trim().parse()?,
                        vj.trim().parse()?,
                    )?;
                    recover_unfiltered(&field, &spec, &par, pad)?
                }
                "blurred" => recover_blurred(&field, &spec, eps)?,
                other => anyhow::bail!("unknown recover method {other:?}"),
            };
            write_field(&output, &out)?;
        }
        Command::Noise { input, std_factor, peak, seed, output } => {
            let field = read(&input)?.into_real()?;
            let peak = peak.unwrap_or_else(|| field.max_abs());
            let noisy = add_noise(&field, std_factor * peak, seed);
            write_field(&output, &noisy)?;
            println!(
                "noise generator={GENERATOR_NAME} seed={seed} sigma={:e}",
                std_factor * peak
            );
        }
        Command::Metrics { estimate, reference } => {
            let e = read(&estimate)?.into_real()?;
            let r = read(&reference)?.into_real()?;
            println!("{}", metrics(&e, &r)?);
        }
        Command::Spectrum { grid, xi_i, xi_j, eps, kind, output, pgm } => {
            let mut cfg = RunConfig::default();
            grid.apply(&mut cfg)?;
            cfg.xi_i = parse_angle(&xi_i)?;
            cfg.xi_j = parse_angle(&xi_j)?;
            cfg.epsilon = eps;
            let panel = repro::spectrum_panel(&cfg, &kind)?;
            write_field(&output, &panel)?;
            if let Some(p) = pgm {
                export_pgm(&panel, &p, None)?;
            }
        }
        Command::Repro { figure, config, outdir } => {
            std::fs::create_dir_all(&outdir)?;
            let base = |fig: &str| -> anyhow::Result<RunConfig> {
                let mut cfg = if fig == "fig6" {
                    repro::fig6_config()
                } else {
                    RunConfig::default()
                };
                if let Some(path) = &config {
                    cfg.apply(&std::fs::read_to_string(path)?)?;
                }
                Ok(cfg)
            };
            match figure.as_str() {
                "fig3" => repro::fig3(&base("fig3")?, &outdir)?,
                "fig4" => repro::fig4(&base("fig4")?, &outdir)?,
                "fig5" => {
                    let report = repro::fig5(&base("fig5")?, Some(&outdir))?;
                    println!(
                        "fig5 brt peak_err={:.6e} peak_image={:.6e} ratio={:.4}",
                        report.brt.peak_abs_err,
                        report.brt.peak_filtered_image,
                        report.brt.ratio()
                    );
                    println!(
                        "fig5 sbrt peak_err={:.6e} peak_image={:.6e} ratio={:.4}",
                        report.sbrt.peak_abs_err,
                        report.sbrt.peak_filtered_image,
                        report.sbrt.ratio()
                    );
                    anyhow::ensure!(
                        report.brt.ratio() < 0.05 && report.sbrt.ratio() < 0.05,
                        "peak filtering error exceeds 5% of the peak image value"
                    );
                }
                "fig6" => {
                    let report = repro::fig6(&base("fig6")?, Some(&outdir))?;
                    println!("fig6 rel_l2={:.6e}", report.rel_l2);
                }
                "fig7" => {
                    for p in repro::fig7(&base("fig7")?, Some(&outdir))? {
                        println!(
                            "fig7 xi_j={:.4} eps={:.0e} gmax={:.3e} cap={:.3e} trough_i={:.3e} trough_j={:.3e} ridge={:.3e}",
                            p.xi_j, p.epsilon, p.gmax, p.cap, p.trough_i, p.trough_j, p.ridge
                        );
                    }
                }
                "fig8" => {
                    for r in repro::fig8(&base("fig8")?, Some(&outdir))? {
                        println!(
                            "fig8 xi_j={:.4} eps={:.0e} residual={:.6e}",
                            r.xi_j, r.epsilon, r.residual
                        );
                    }
                }
                other => anyhow::bail!("unknown figure {other:?}"),
            }
        }
        Command::Dft { input, output, inverse } => match read(&input)? {
            StoredField::Real(f) if !inverse => write_spectrum(&output, &dft2(&f))?,
            StoredField::Complex(s) if inverse => write_field(&output, &idft2(&s))?,
            _ => anyhow::bail!(
                "dft expects a real field (forward) or a complex spectrum (--inverse)"
            ),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
