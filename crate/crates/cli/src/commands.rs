use std::fmt::Write as _;
use std::path::Path;

use steinerflow::battery::{lemma_battery, property_battery, LemmaConfig};
use steinerflow::lemmas::{default_t_ladder, truncated_monotonicity_check};
use steinerflow::pde::{boundary_verdict, brock_derivative, weak_residual, BoundaryMode, TestFunction};
use steinerflow::report::{fmt_f64, to_csv};
use steinerflow::sgf::{read_sgf_file, write_sgf_file};
use steinerflow::symmetry::decompose;
use steinerflow::{
    cst_with_levels, Error, ExemplarParams, NonlinearityPair, PropertyReport, Result,
    SampledGridFunction, Settings,
};

use crate::{Cli, Command, Equation, ExampleKind, Mode, Sym};

fn emit(cli: &Cli, csv: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, csv).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<SampledGridFunction> {
    read_sgf_file(path).map_err(|e| match e {
        Error::Io(m) => Error::Io(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn settings(sym: Sym) -> Settings {
    Settings::new(sym.axis, sym.levels)
}

fn equation(u: &SampledGridFunction, eq: Equation) -> Result<NonlinearityPair> {
    let e = ExemplarParams::three_mountain(u.dim()).with_ps(eq.p, eq.s);
    NonlinearityPair::p_laplacian(eq.p, e.source())
}

fn energy_pair(p: f64) -> Result<NonlinearityPair> {
    NonlinearityPair::p_laplacian(p, |_| 0.0)
}

fn reports(cli: &Cli, reports: &[PropertyReport]) -> Result<bool> {
    emit(cli, &to_csv(reports))?;
    Ok(reports.iter().all(|r| r.pass))
}

fn boundary_reports(
    u: &SampledGridFunction,
    mode: BoundaryMode,
    band_width: Option<f64>,
    expect: &[f64],
    rel: f64,
) -> Result<Vec<PropertyReport>> {
    let width = band_width.unwrap_or_else(|| u.geometry().max_spacing());
    let v = boundary_verdict(u, mode, width)?;
    if !expect.is_empty() {
        if expect.len() != v.c_estimates.len() {
            return Err(Error::InvalidParameter(format!(
                "--expect needs {} values",
                v.c_estimates.len()
            )));
        }
        return Ok(v
            .c_estimates
            .iter()
            .zip(expect)
            .enumerate()
            .map(|(k, (c, e))| {
                let err = (c - e).abs() / e.abs().max(f64::MIN_POSITIVE);
                PropertyReport::new(format!("boundary_gradient_{k}"), err, rel, 0.0)
            })
            .collect());
    }
    Ok(match mode {
        BoundaryMode::Degenerate { epsilon } => {
            vec![PropertyReport::new("boundary_gradient_degenerate", v.c_estimates[0], epsilon, 0.0)]
        }
        _ => v
            .c_estimates
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                PropertyReport::with_verdict(format!("boundary_gradient_{k}"), c, 0.0, 0.0, c > 0.0)
            })
            .collect(),
    })
}

pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Symmetrize { input, t, sym, out } => {
            let u = load(&input.input)?;
            let v = cst_with_levels(&u, sym.axis, *t, sym.levels)?;
            write_sgf_file(&v, out)?;
            let change = u
                .values()
                .iter()
                .zip(v.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let mut csv = String::from("t,axis,levels,sup_in,sup_out,max_change\n");
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt_f64(*t),
                sym.axis,
                sym.levels,
                fmt_f64(u.sup()),
                fmt_f64(v.sup()),
                fmt_f64(change)
            );
            emit(cli, &csv)?;
            Ok(true)
        }
        Command::Properties { input, upper, t, sym } => {
            let u = load(&input.input)?;
            let v = match upper {
                Some(p) => load(p)?,
                None => u.clone(),
            };
            reports(cli, &property_battery(&u, &v, *t, &settings(*sym))?)
        }
        Command::Lemmas { input, ring, eq, t, epsilon, sym } => {
            let u = load(&input.input)?;
            let ring = ring.as_deref().map(load).transpose()?;
            let pair = equation(&u, *eq)?;
            let config = LemmaConfig {
                t: *t,
                epsilon: *epsilon,
                ..LemmaConfig::default()
            };
            reports(cli, &lemma_battery(&u, ring.as_ref(), &pair, &config, &settings(*sym))?)
        }
        Command::Decompose { input, tol, expect_annuli } => {
            let u = load(&input.input)?;
            let d = decompose(&u, *tol)?;
            emit(cli, &d.to_csv())?;
            let count_ok = expect_annuli.is_none_or(|k| d.annuli.len() == k);
            Ok(d.accepted() && d.disjoint() && count_ok)
        }
        Command::VerifyPde {
            input,
            eq,
            tests,
            radius_min,
            radius_max,
            weak_tol,
            mode,
            epsilon,
            band_width,
            expect,
            rel,
        } => {
            let u = load(&input.input)?;
            let pair = equation(&u, *eq)?;
            let tol = weak_tol.unwrap_or_else(|| u.geometry().max_spacing());
            let phis = TestFunction::random_family(&u, *tests, (*radius_min, *radius_max), cli.seed)?;
            let mut out = Vec::new();
            for (k, phi) in phis.iter().enumerate() {
                let r = weak_residual(&u, &pair, phi)?;
                out.push(PropertyReport::new(format!("weak_residual_{k}"), r.abs(), tol, 0.0));
            }
            let mode = match mode {
                Mode::Outer => BoundaryMode::OuterPositive,
                Mode::Ring => BoundaryMode::Ring,
                Mode::Degenerate => BoundaryMode::Degenerate { epsilon: *epsilon },
            };
            out.extend(boundary_reports(&u, mode, *band_width, expect, *rel)?);
            reports(cli, &out)
        }
        Command::Brock { input, p, sym, eps_crit, times, energies } => {
            let u = load(&input.input)?;
            let pair = energy_pair(*p)?;
            let big_g = |z: f64| pair.big_g(z);
            let times = if times.is_empty() { default_t_ladder() } else { times.clone() };
            let b = brock_derivative(&u, &big_g, &times, &settings(*sym), *eps_crit)?;
            if let Some(path) = energies {
                std::fs::write(path, b.table_csv())
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            let bound = PropertyReport::new("brock_energy_bound", b.max_energy, 0.0, b.energy_slack);
            reports(cli, &[b.report.clone(), bound])
        }
        Command::Example { kind, p, s, n, dim, out } => {
            let base = match kind {
                ExampleKind::ThreeMountains => ExemplarParams::three_mountain(*dim),
                ExampleKind::Ring => ExemplarParams::ring(*dim),
                ExampleKind::Shifted => ExemplarParams::shifted(*dim),
                ExampleKind::Perturbed => ExemplarParams::perturbed(*dim),
            };
            let e = base.with_ps(*p, *s);
            if matches!(kind, ExampleKind::ThreeMountains | ExampleKind::Ring) {
                e.validate()?;
            }
            let u = e.sample(*n)?;
            write_sgf_file(&u, out)?;
            let name = match kind {
                ExampleKind::ThreeMountains => "three-mountains",
                ExampleKind::Ring => "ring",
                ExampleKind::Shifted => "shifted",
                ExampleKind::Perturbed => "perturbed",
            };
            let mut csv = String::from("variant,p,s,dim,n,sup,lipschitz\n");
            let _ = writeln!(
                csv,
                "{name},{},{},{dim},{n},{},{}",
                fmt_f64(*p),
                fmt_f64(*s),
                fmt_f64(u.sup()),
                fmt_f64(u.lipschitz())
            );
            emit(cli, &csv)?;
            Ok(true)
        }
        Command::Rings { input, p, t, truncations, band_width, expect, rel, sym } => {
            let u = load(&input.input)?;
            let [b1, b0, g0, g1] = truncations[..] else {
                return Err(Error::InvalidParameter("--truncations takes four values".into()));
            };
            let mut out = boundary_reports(&u, BoundaryMode::Ring, *band_width, expect, *rel)?;
            let pair = energy_pair(*p)?;
            let big_g = |z: f64| pair.big_g(z);
            out.push(truncated_monotonicity_check(&u, *t, (b1, b0, g0, g1), &big_g, &settings(*sym))?);
            reports(cli, &out)
        }
    }
}
