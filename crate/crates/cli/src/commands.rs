//! Subcommand implementations: deterministic in-memory assembly, then one
//! write per file.

use num_complex::Complex64;
use shg_core::dynamics::{
    self, evolve_realized, qc_closed_form, time_grid, InitialState, SolutionCache,
};
use shg_core::measures;
use shg_core::quasiclassical::{lambda_cmf, qc_eigvectors, AngleStrategy};
use shg_core::spectrum::{self, solve, SolveMethod, SpectralSolution};
use shg_core::{Block, Error as CoreError, ModelParams};

use crate::output::{self, fmt, Csv};
use crate::{CliError, CompareArgs, DynamicsArgs, FormatArg, MethodArg, SpectrumArgs};

/// One-decimal truncation toward zero, matching the reference printout
/// (which truncates rather than rounds).
fn trunc1(x: f64) -> f64 {
    (x * 10.0).trunc() / 10.0
}

fn trunc3(x: f64) -> f64 {
    (x * 1000.0).trunc() / 1000.0
}

/// Strategies of the comparison table, in column order.
const COMPARE_STRATEGIES: [AngleStrategy; 4] =
    [AngleStrategy::R1, AngleStrategy::MpR1, AngleStrategy::R2, AngleStrategy::R3];

fn solve_checked(
    block: &Block,
    params: &ModelParams,
    method: MethodArg,
) -> Result<SpectralSolution, CliError> {
    match method {
        MethodArg::Sturm => Ok(solve(block, params, SolveMethod::Sturm)?),
        MethodArg::Oracle => Ok(solve(block, params, SolveMethod::Oracle)?),
        MethodArg::Both => {
            let sturm = solve(block, params, SolveMethod::Sturm)?;
            let oracle = solve(block, params, SolveMethod::Oracle)?;
            let radius = shg_core::model::hamiltonian_matrix(block, params).radius().max(1.0);
            let mut max_dl = 0.0_f64;
            let mut max_dq = 0.0_f64;
            for v in 0..sturm.dim() {
                max_dl = max_dl.max((sturm.lambdas[v] - oracle.lambdas[v]).abs());
                let dot: f64 = sturm
                    .eigenvector(v)
                    .iter()
                    .zip(oracle.eigenvector(v))
                    .map(|(a, b)| a * b)
                    .sum();
                let sign = if dot < 0.0 { -1.0 } else { 1.0 };
                for (a, b) in sturm.eigenvector(v).iter().zip(oracle.eigenvector(v)) {
                    max_dq = max_dq.max((a - sign * b).abs());
                }
            }
            if max_dl > 1e-8 * radius || max_dq > 1e-7 {
                return Err(CliError::Core(CoreError::Convergence(format!(
                    "sturm/oracle disagreement: max|Δλ| = {max_dl:.3e}, max|ΔQ| = {max_dq:.3e}"
                ))));
            }
            eprintln!(
                "methods agree: max|Δλ| = {max_dl:.3e} (bound {:.3e}), max|ΔQ| = {max_dq:.3e}",
                1e-8 * radius
            );
            Ok(sturm)
        }
    }
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let params = args.physics.params()?;
    let block = Block::new(args.k, args.s)?;
    let dir = args.output.dir();

    let mut amplitude_rows: Option<Vec<output::AmplitudeRowJson>> = None;
    let lambdas = match (args.method, args.amplitudes) {
        // eigenvalue-only fast path: no amplitude matrix is materialized
        (MethodArg::Sturm, false) => match args.tol {
            Some(tol) => spectrum::eigenvalues_sturm_tol(&block, &params, tol)?,
            None => spectrum::eigenvalues_sturm(&block, &params)?,
        },
        _ => {
            if args.tol.is_some() {
                return Err(CliError::Usage(
                    "--tol applies to the sturm eigenvalue path only".into(),
                ));
            }
            let sol = solve_checked(&block, &params, args.method)?;
            if args.amplitudes {
                let mut csv = Csv::new("v,f,Q");
                let mut rows = Vec::with_capacity(sol.dim() * sol.dim());
                for v in 0..sol.dim() {
                    for f in 0..sol.dim() {
                        csv.row(&[v.to_string(), f.to_string(), fmt(sol.amplitude(f, v))]);
                        rows.push(output::AmplitudeRowJson { v, f, q: sol.amplitude(f, v) });
                    }
                }
                let path = output::write_text(&dir, "amplitudes.csv", &csv.into_string())?;
                println!("wrote {}", path.display());
                amplitude_rows = Some(rows);
            }
            sol.lambdas
        }
    };

    let mut csv = Csv::new("v,lambda");
    for (v, &lam) in lambdas.iter().enumerate() {
        csv.row(&[v.to_string(), fmt(lam)]);
    }
    let path = output::write_text(&dir, "spectrum.csv", &csv.into_string())?;
    println!("wrote {}", path.display());

    if args.output.format == FormatArg::Json {
        let json = output::SpectrumJson {
            v: (0..lambdas.len()).collect(),
            lambda: lambdas.clone(),
            amplitudes: amplitude_rows,
        };
        let path = output::write_json(&dir, "spectrum.json", &json)?;
        println!("wrote {}", path.display());
    }

    if args.table1 {
        println!("v lambda");
        for (v, &lam) in lambdas.iter().enumerate() {
            println!("{v} {:.1}", trunc1(lam));
        }
    }
    Ok(())
}

pub fn compare(args: &CompareArgs) -> Result<(), CliError> {
    let params = args.physics.params()?;
    let block = Block::new(args.k, args.s)?;
    if args.stride == 0 {
        return Err(CliError::Usage("--stride must be at least 1".into()));
    }
    let dir = args.output.dir();

    let exact = solve(&block, &params, SolveMethod::Sturm)?;
    let cmf: Vec<Vec<f64>> =
        COMPARE_STRATEGIES.iter().map(|st| lambda_cmf(&block, &params, st)).collect();

    // measures, reported at 100x (percent of the exact spectral weight)
    let mut d2h = [0.0; 4];
    let mut d2e = [0.0; 4];
    let mut d2e_up = [0.0; 4];
    for (i, approx) in cmf.iter().enumerate() {
        d2h[i] = 100.0 * measures::delta2_h(&exact.lambdas, approx)?;
        d2e[i] = 100.0 * measures::delta2_e(&exact.lambdas, approx, false)?;
        d2e_up[i] = 100.0 * measures::delta2_e(&exact.lambdas, approx, true)?;
    }

    let rows: Vec<usize> = (0..block.dim()).step_by(args.stride).collect();
    let mut csv = Csv::new("v,lambda_exact,cmf_r1,cmf_mp_r1,cmf_r2,cmf_r3");
    for &v in &rows {
        csv.row(&[
            v.to_string(),
            fmt(exact.lambdas[v]),
            fmt(cmf[0][v]),
            fmt(cmf[1][v]),
            fmt(cmf[2][v]),
            fmt(cmf[3][v]),
        ]);
    }
    for (name, vals) in [("delta2_H", &d2h), ("delta2_E", &d2e), ("delta2_E_up", &d2e_up)] {
        let mut fields = vec![name.to_string(), String::new()];
        fields.extend(vals.iter().map(|&x| fmt(x)));
        csv.row(&fields);
    }
    let path = output::write_text(&dir, "compare.csv", &csv.into_string())?;
    println!("wrote {}", path.display());

    // eigenvector overlaps for the single-angle strategies
    let single: [AngleStrategy; 3] = [AngleStrategy::R1, AngleStrategy::R2, AngleStrategy::R3];
    let mut overlap_csv = Csv::new("v,strategy,cos,delta2_ef");
    let mut overlap_json: Vec<Vec<output::OverlapRowJson>> = Vec::new();
    for st in &single {
        let s_mat = qc_eigvectors(&block, &params, st)?;
        let mut rows_json = Vec::with_capacity(block.dim());
        for v in 0..block.dim() {
            let (cos, deficit) = measures::overlap_deficit(s_mat.col(v), exact.eigenvector(v))?;
            overlap_csv.row(&[v.to_string(), st.label().to_string(), fmt(cos), fmt(deficit)]);
            rows_json.push(output::OverlapRowJson { v, cos, delta2_ef: deficit });
        }
        overlap_json.push(rows_json);
    }
    let path = output::write_text(&dir, "overlap.csv", &overlap_csv.into_string())?;
    println!("wrote {}", path.display());

    if args.output.format == FormatArg::Json {
        let mut it = overlap_json.into_iter();
        let (r1_rows, r2_rows, r3_rows) = (
            it.next().expect("r1 overlaps"),
            it.next().expect("r2 overlaps"),
            it.next().expect("r3 overlaps"),
        );
        let json = output::CompareJson {
            v: (0..block.dim()).collect(),
            lambda: exact.lambdas.clone(),
            cmf: output::CmfJson {
                r1: cmf[0].clone(),
                mp_r1: cmf[1].clone(),
                r2: cmf[2].clone(),
                r3: cmf[3].clone(),
            },
            delta2: output::Delta2Json {
                h: strategy_values(&d2h),
                e: strategy_values(&d2e),
                e_up: strategy_values(&d2e_up),
            },
            overlap: output::OverlapJson { r1: r1_rows, r2: r2_rows, r3: r3_rows },
        };
        let path = output::write_json(&dir, "compare.json", &json)?;
        println!("wrote {}", path.display());
    }

    if args.table1 {
        println!("v lambda cmf_r1 cmf_mp_r1 cmf_r2 cmf_r3");
        for &v in &rows {
            println!(
                "{v} {:.1} {:.1} {:.1} {:.1} {:.1}",
                trunc1(exact.lambdas[v]),
                trunc1(cmf[0][v]),
                trunc1(cmf[1][v]),
                trunc1(cmf[2][v]),
                trunc1(cmf[3][v])
            );
        }
        for (name, vals) in [("delta2_H", &d2h), ("delta2_E", &d2e), ("delta2_E_up", &d2e_up)] {
            println!(
                "{name} {:.3} {:.3} {:.3} {:.3}",
                trunc3(vals[0]),
                trunc3(vals[1]),
                trunc3(vals[2]),
                trunc3(vals[3])
            );
        }
    }
    Ok(())
}

fn strategy_values(vals: &[f64; 4]) -> output::StrategyValuesJson {
    output::StrategyValuesJson { r1: vals[0], mp_r1: vals[1], r2: vals[2], r3: vals[3] }
}

fn parse_init(args: &DynamicsArgs) -> Result<InitialState, CliError> {
    let usage = "--init takes cluster | fock:N1,N0 | coherent:RE1,IM1,RE0,IM0";
    if args.init == "cluster" {
        let (k, s) = match (args.k, args.s) {
            (Some(k), Some(s)) => (k, s),
            _ => return Err(CliError::Usage("--init cluster requires --k and --s".into())),
        };
        return Ok(InitialState::Cluster { block: Block::new(k, s)? });
    }
    if args.k.is_some() || args.s.is_some() {
        return Err(CliError::Usage(
            "--k/--s apply to --init cluster only; fock and coherent states carry their own labels"
                .into(),
        ));
    }
    if let Some(rest) = args.init.strip_prefix("fock:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(CliError::Usage(usage.into()));
        }
        let n1 = parts[0].trim().parse::<i64>().map_err(|_| CliError::Usage(usage.into()))?;
        let n0 = parts[1].trim().parse::<i64>().map_err(|_| CliError::Usage(usage.into()))?;
        return Ok(InitialState::Fock { n1, n0 });
    }
    if let Some(rest) = args.init.strip_prefix("coherent:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 4 {
            return Err(CliError::Usage(usage.into()));
        }
        let mut vals = [0.0_f64; 4];
        for (slot, raw) in vals.iter_mut().zip(&parts) {
            *slot = raw.trim().parse::<f64>().map_err(|_| CliError::Usage(usage.into()))?;
        }
        return Ok(InitialState::Coherent {
            alpha1: Complex64::new(vals[0], vals[1]),
            alpha0: Complex64::new(vals[2], vals[3]),
            eps: args.eps,
        });
    }
    Err(CliError::Usage(usage.into()))
}

pub fn dynamics(args: &DynamicsArgs) -> Result<(), CliError> {
    let params = args.physics.params()?;
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let initial = parse_init(args)?;
    let blocks = initial.realize(args.s_cap)?;
    let (s_bar, _) = dynamics::mean_labels(&blocks);

    let t_max = match (args.t_max, args.tau_max) {
        (Some(t), None) => t,
        (None, Some(tau)) => {
            let rate = params.g_abs * (2.0 * s_bar).sqrt();
            if rate == 0.0 {
                return Err(CliError::Usage(
                    "the dimensionless time τ is degenerate (g·√(2s̄) = 0); use --t-max".into(),
                ));
            }
            tau / rate
        }
        (None, None) => {
            return Err(CliError::Usage("specify the grid end: --t-max or --tau-max".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let times = time_grid(t_max, args.steps);

    let mut cache = SolutionCache::new();
    let mut trace = evolve_realized(&blocks, &params, &times, &mut cache)?;

    if args.qc {
        let block = match &initial {
            InitialState::Cluster { block } => *block,
            _ => {
                return Err(CliError::Usage(
                    "--qc provides the closed-form cluster approximation; use --init cluster"
                        .into(),
                ))
            }
        };
        trace.y0_qc = Some(qc_closed_form(&block, &params, &times)?);
    }

    if args.normalize && trace.s_bar == 0.0 {
        return Err(CliError::Usage("cannot normalize populations with s̄ = 0".into()));
    }
    let scale = if args.normalize { 1.0 / trace.s_bar } else { 1.0 };

    let n0_qc: Option<Vec<f64>> =
        trace.y0_qc.as_ref().map(|y| y.iter().map(|&v| (trace.s_bar / 2.0 - v) * scale).collect());

    let header =
        if trace.y0_qc.is_some() { "t,tau,Y0,N0,N1,Y0_qc,N0_qc" } else { "t,tau,Y0,N0,N1" };
    let mut csv = Csv::new(header);
    for i in 0..times.len() {
        let mut fields = vec![
            fmt(trace.times[i]),
            fmt(trace.taus[i]),
            fmt(trace.y0[i]),
            fmt(trace.n0[i] * scale),
            fmt(trace.n1[i] * scale),
        ];
        if let (Some(yqc), Some(nqc)) = (&trace.y0_qc, &n0_qc) {
            fields.push(fmt(yqc[i]));
            fields.push(fmt(nqc[i]));
        }
        csv.row(&fields);
    }
    let dir = args.output.dir();
    let path = output::write_text(&dir, "dynamics.csv", &csv.into_string())?;
    println!("wrote {}", path.display());

    if args.output.format == FormatArg::Json {
        let json = output::DynamicsJson {
            series: output::SeriesJson {
                t: trace.times.clone(),
                tau: trace.taus.clone(),
                y0: trace.y0.clone(),
                n0: trace.n0.iter().map(|&x| x * scale).collect(),
                n1: trace.n1.iter().map(|&x| x * scale).collect(),
                y0_qc: trace.y0_qc.clone(),
                n0_qc,
            },
        };
        let path = output::write_json(&dir, "dynamics.json", &json)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
