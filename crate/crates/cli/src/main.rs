//! Command-line front end: fixture generation, structure transforms, fast
//! products and solves, rank/error reports and scaling benchmarks.
//!
//! Reports go to standard output and are deterministic for a fixed seed
//! (benchmark timing columns excepted); diagnostics including wall time go
//! to standard error. Exit codes: 0 success, 1 usage error, 2 numerical
//! precondition failure (the class token is printed on standard error).

use num_complex::Complex64;
use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;
use strucmat::displacement::{generator_matvec, recover_dense, Generator};
use strucmat::fixtures;
use strucmat::rng::Rng;
use strucmat::solvers::{self, CauchyLikeOperand, Polynomial};
use strucmat::textio;
use strucmat::transforms::{CauchyVariant, TransformStep};
use strucmat::{ComplexVector, Error, KnotSet};

struct Args {
    verb: String,
    flags: HashMap<String, String>,
    bools: Vec<String>,
}

const VALUE_FLAGS: &[&str] = &[
    "n", "eps", "seed", "knots", "e", "gen", "map", "in", "rhs", "coeffs", "values", "roots",
    "targets", "col", "row", "sizes", "trials", "op", "kind", "out",
];
const BOOL_FLAGS: &[&str] = &["oracle", "help"];

fn parse_args() -> Result<Args, String> {
    let mut it = std::env::args().skip(1);
    let verb = it.next().ok_or_else(usage)?;
    let mut flags = HashMap::new();
    let mut bools = Vec::new();
    while let Some(arg) = it.next() {
        let name = arg
            .strip_prefix("--")
            .ok_or_else(|| format!("unexpected positional argument {arg:?}\n{}", usage()))?;
        if BOOL_FLAGS.contains(&name) {
            bools.push(name.to_string());
        } else if VALUE_FLAGS.contains(&name) {
            let value = it
                .next()
                .ok_or_else(|| format!("flag --{name} needs a value\n{}", usage()))?;
            flags.insert(name.to_string(), value);
        } else {
            return Err(format!("unknown flag --{name}\n{}", usage()));
        }
    }
    Ok(Args { verb, flags, bools })
}

fn usage() -> String {
    "usage: strucmat <verb> [flags]\n\
     verbs: gen matvec solve transform hss-report bench eval interp\n\
            vmatvec vsolve cvmatvec cvsolve tsolve logkernel\n\
     flags: --n N --eps E --seed S --knots {circle|annulus|clustered|file:PATH}\n\
            --e RE,IM --gen PATH --map {a..k|i2|tc-dft|reknot} --in PATH --rhs PATH\n\
            --coeffs PATH --values PATH --roots PATH --targets PATH --col PATH --row PATH\n\
            --sizes A,B,.. --trials T --op {cvmatvec|dense} --kind {toeplitz|cv|vandermonde}\n\
            --out PATH --oracle"
        .to_string()
}

impl Args {
    fn has(&self, name: &str) -> bool {
        self.bools.iter().any(|b| b == name)
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.flags.get(name).map(|s| s.as_str())
    }

    fn usize_or(&self, name: &str, default: usize) -> Result<usize, String> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("--{name} expects an integer, got {v:?}")),
        }
    }

    fn f64_or(&self, name: &str, default: f64) -> Result<f64, String> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("--{name} expects a number, got {v:?}")),
        }
    }

    fn u64_or(&self, name: &str, default: u64) -> Result<u64, String> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("--{name} expects an integer, got {v:?}")),
        }
    }

    fn complex_or(&self, name: &str, default: Complex64) -> Result<Complex64, String> {
        match self.get(name) {
            None => Ok(default),
            Some(v) => {
                let parts: Vec<&str> = v.split(',').collect();
                let bad = || format!("--{name} expects RE,IM, got {v:?}");
                if parts.len() > 2 || parts.is_empty() {
                    return Err(bad());
                }
                let re: f64 = parts[0].parse().map_err(|_| bad())?;
                let im: f64 = if parts.len() == 2 {
                    parts[1].parse().map_err(|_| bad())?
                } else {
                    0.0
                };
                Ok(Complex64::new(re, im))
            }
        }
    }
}

enum CliError {
    Usage(String),
    Numerical(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

fn load_knots(args: &Args, rng: &mut Rng, n: usize) -> Result<KnotSet, CliError> {
    let recipe = args.get("knots").unwrap_or("circle");
    match recipe {
        "circle" => Ok(fixtures::circle_knots(rng, n)),
        "annulus" => Ok(fixtures::annulus_knots(rng, n)),
        "clustered" => Ok(fixtures::clustered_knots(rng, n)),
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
                let v = textio::read_vector(&text)?;
                Ok(KnotSet::new(v.into_vec())?)
            } else {
                Err(CliError::Usage(format!(
                    "unknown knot recipe {other:?} (circle|annulus|clustered|file:PATH)"
                )))
            }
        }
    }
}

fn load_vector(path: &str) -> Result<ComplexVector, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    Ok(textio::read_vector(&text)?)
}

fn load_generator(path: &str) -> Result<Generator, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
    Ok(textio::read_generator(&text)?)
}

fn emit(args: &Args, payload: &str) -> Result<(), CliError> {
    match args.get("out") {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Usage(format!("cannot write {path}: {e}"))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(1);
        }
    };
    if args.has("help") {
        println!("{}", usage());
        return ExitCode::SUCCESS;
    }
    let code = match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(err)) => {
            eprintln!("error-class: {}", err.class_token());
            eprintln!("{err}");
            ExitCode::from(2)
        }
    };
    eprintln!("# wall_ms {:.3}", started.elapsed().as_secs_f64() * 1e3);
    code
}

fn run(args: &Args) -> Result<(), CliError> {
    match args.verb.as_str() {
        "gen" => cmd_gen(args),
        "matvec" => cmd_matvec(args),
        "solve" => cmd_solve(args),
        "transform" => cmd_transform(args),
        "hss-report" => cmd_hss_report(args),
        "bench" => cmd_bench(args),
        "eval" => cmd_eval(args),
        "interp" => cmd_interp(args),
        "vmatvec" => cmd_vandermonde(args, false),
        "vsolve" => cmd_vandermonde(args, true),
        "cvmatvec" => cmd_cv(args, false),
        "cvsolve" => cmd_cv(args, true),
        "tsolve" => cmd_tsolve(args),
        "logkernel" => cmd_logkernel(args),
        other => Err(CliError::Usage(format!(
            "unknown verb {other:?}\n{}",
            usage()
        ))),
    }
}

fn header(args: &Args, n: usize, eps: f64, seed: u64) {
    println!("command {}", args.verb);
    println!("n {n}");
    println!("eps {eps:e}");
    println!("seed {seed}");
}

fn cmd_gen(args: &Args) -> Result<(), CliError> {
    let n = args.usize_or("n", 64).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let kind = args.get("kind").unwrap_or("toeplitz");
    let mut rng = Rng::seed_from_u64(seed);
    let gen = match kind {
        "toeplitz" => {
            let (col, row) = fixtures::diagonally_dominant_toeplitz(&mut rng, n);
            solvers::toeplitz::toeplitz_generator(&col, &row)?
        }
        "cv" => {
            let s = load_knots(args, &mut rng, n)?;
            let e = args
                .complex_or("e", Complex64::new(1.0, 0.0))
                .map_err(CliError::Usage)?;
            let grid = KnotSet::dft_grid(e, n)?;
            CauchyLikeOperand::pure(s, grid)?.to_generator()?
        }
        "vandermonde" => {
            let s = load_knots(args, &mut rng, n)?;
            let v = strucmat::knots::vandermonde_dense(&s);
            strucmat::displacement::generator_from_dense(
                &v,
                &strucmat::displacement::Operator::Diagonal(s),
                &strucmat::displacement::Operator::Shift(Complex64::new(0.0, 0.0)),
                1e-12,
            )?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown --kind {other:?} (toeplitz|cv|vandermonde)"
            )))
        }
    };
    header(args, n, 0.0, seed);
    println!("kind {kind}");
    println!("class {}", gen.class().symbol());
    println!("length {}", gen.length());
    emit(args, &textio::write_generator(&gen))?;
    Ok(())
}

fn cmd_matvec(args: &Args) -> Result<(), CliError> {
    let path = args
        .get("gen")
        .ok_or_else(|| CliError::Usage("matvec needs --gen PATH".into()))?;
    let gen = load_generator(path)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let u = match args.get("in") {
        Some(p) => load_vector(p)?,
        None => ComplexVector::from_fn(gen.n_cols(), |_| rng.complex_normal()),
    };
    let y = generator_matvec(&gen, &u)?;
    header(args, gen.n_rows(), 0.0, seed);
    println!("class {}", gen.class().symbol());
    println!("length {}", gen.length());
    if args.has("oracle") {
        let dense = recover_dense(&gen)?;
        let exact = dense.matvec(&u)?;
        let err = y.sub(&exact).norm_inf() / exact.norm_inf().max(1e-300);
        println!("oracle_relative_error {err:.6e}");
    }
    emit(args, &textio::write_vector(&y))?;
    Ok(())
}

fn cmd_solve(args: &Args) -> Result<(), CliError> {
    let path = args
        .get("gen")
        .ok_or_else(|| CliError::Usage("solve needs --gen PATH".into()))?;
    let gen = load_generator(path)?;
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let b = match args.get("rhs") {
        Some(p) => load_vector(p)?,
        None => ComplexVector::from_fn(gen.n_rows(), |_| rng.complex_normal()),
    };
    use strucmat::displacement::StructureClass;
    let x = match gen.class() {
        StructureClass::Cauchy => {
            let m = CauchyLikeOperand::from_generator(&gen)?;
            if m.col_knots().dft_grid_scalar().is_some() {
                solvers::cauchy_like_solve(&m, &b, eps)?
            } else {
                solvers::cauchy_any_knots_solve(&m, &b, eps, None)?.0
            }
        }
        StructureClass::Toeplitz => {
            // recover the defining column and row through two matvecs
            let n = gen.n_cols();
            let col = generator_matvec(&gen, &ComplexVector::unit(n, 0))?;
            let row_t = strucmat::displacement::generator_matvec_transposed(
                &gen,
                &ComplexVector::unit(n, 0),
            )?;
            solvers::toeplitz_solve(&col, &row_t, &b, eps)?
        }
        _ => {
            let dense = recover_dense(&gen)?;
            strucmat::dense_solve(&dense, &b)?.x
        }
    };
    header(args, gen.n_rows(), eps, seed);
    println!("class {}", gen.class().symbol());
    if args.has("oracle") {
        let dense = recover_dense(&gen)?;
        let resid = dense.matvec(&x)?.sub(&b).norm() / b.norm().max(1e-300);
        println!("oracle_relative_residual {resid:.6e}");
    }
    emit(args, &textio::write_vector(&x))?;
    Ok(())
}

fn parse_map(args: &Args, name: &str, n: usize, rng: &mut Rng) -> Result<TransformStep, CliError> {
    let e = args
        .complex_or("e", Complex64::new(1.0, 0.0))
        .map_err(CliError::Usage)?;
    let grid = || KnotSet::dft_grid(e, n);
    Ok(match name {
        "a" => TransformStep::HankelFromToeplitz,
        "b" => TransformStep::VandermondeFromToeplitz(load_knots(args, rng, n)?),
        "c" => TransformStep::ToeplitzFromHankel,
        "d" => TransformStep::VandermondeFromHankel(load_knots(args, rng, n)?),
        "e" => TransformStep::HankelFromVandermonde,
        "f" => TransformStep::ToeplitzFromVandermonde,
        "g" => TransformStep::CauchyFromVandermonde(grid()?, CauchyVariant::Vinv),
        "h" => TransformStep::VandermondeFromCauchy,
        "i" => TransformStep::ToeplitzFromCauchy,
        "j" => TransformStep::HankelFromCauchy,
        "k" => TransformStep::CauchyFromToeplitz(load_knots(args, rng, n)?, grid()?, CauchyVariant::Vinv),
        "i2" => TransformStep::CauchyFromHankel(load_knots(args, rng, n)?, grid()?, CauchyVariant::Vinv),
        "tc-dft" => TransformStep::CauchyDftFromToeplitz,
        "reknot" => TransformStep::Reknot(e),
        other => {
            return Err(CliError::Usage(format!(
                "unknown --map {other:?} (a..k, i2, tc-dft, reknot)"
            )))
        }
    })
}

fn cmd_transform(args: &Args) -> Result<(), CliError> {
    let path = args
        .get("gen")
        .ok_or_else(|| CliError::Usage("transform needs --gen PATH".into()))?;
    let gen = load_generator(path)?;
    let map = args
        .get("map")
        .ok_or_else(|| CliError::Usage("transform needs --map NAME".into()))?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let step = parse_map(args, map, gen.n_rows(), &mut rng)?;
    let out = strucmat::transforms::compose_transform(&gen, &[step])?;
    header(args, gen.n_rows(), 0.0, seed);
    println!("map {map}");
    println!("input_class {}", gen.class().symbol());
    println!("input_length {}", gen.length());
    println!("output_class {}", out.generator.class().symbol());
    println!("output_length {}", out.generator.length());
    println!("length_budget {}", out.length_budget);
    emit(args, &textio::write_generator(&out.generator))?;
    Ok(())
}

fn cmd_hss_report(args: &Args) -> Result<(), CliError> {
    let n = args.usize_or("n", 256).map_err(CliError::Usage)?;
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let e = args
        .complex_or("e", Complex64::new(1.0, 0.0))
        .map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let s = load_knots(args, &mut rng, n)?;
    let h = strucmat::hss::build_cv_hss(&s, e, eps)?;
    header(args, n, eps, seed);
    println!("leaf_sectors {}", h.leaf_sectors());
    println!("levels {}", h.levels());
    println!("max_rank {}", h.max_rank());
    println!("max_bound {:.6e}", h.max_error_bound());
    println!("level sector rows cols rank theta delta bound");
    for (level, sector, rows, cols, rank, theta, delta, bound) in h.block_report() {
        println!("{level} {sector} {rows} {cols} {rank} {theta:.6e} {delta:.6e} {bound:.6e}");
    }
    Ok(())
}

fn cmd_bench(args: &Args) -> Result<(), CliError> {
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let trials = args.usize_or("trials", 3).map_err(CliError::Usage)?.max(1);
    let op = args.get("op").unwrap_or("cvmatvec");
    let sizes: Vec<usize> = match args.get("sizes") {
        None => vec![1024, 2048, 4096, 8192],
        Some(text) => text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad size {t:?}")))
            })
            .collect::<Result<_, _>>()?,
    };
    if sizes.windows(2).any(|w| w[1] <= w[0]) || sizes.iter().any(|s| !s.is_power_of_two()) {
        return Err(CliError::Usage(
            "--sizes must be ascending powers of two".into(),
        ));
    }
    println!("op,n,eps,median_ms,max_rank");
    for &n in &sizes {
        let mut rng = Rng::seed_from_u64(seed);
        let s = load_knots(args, &mut rng, n)?;
        let u = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let unit = Complex64::new(1.0, 0.0);
        let mut times = Vec::with_capacity(trials);
        let mut max_rank = 0usize;
        match op {
            "cvmatvec" => {
                // the cached build is excluded from the timing
                let h = solvers::cached_grid_hss(&s, unit, n, &[], eps)?;
                max_rank = h.max_rank();
                for _ in 0..trials {
                    let t0 = Instant::now();
                    let _ = h.matvec(&u)?;
                    times.push(t0.elapsed().as_secs_f64() * 1e3);
                }
            }
            "dense" => {
                let grid = KnotSet::dft_grid(unit, n)?;
                for _ in 0..trials {
                    let t0 = Instant::now();
                    let _ = strucmat::kernels::cauchy_matvec_direct(&s, &grid, &u);
                    times.push(t0.elapsed().as_secs_f64() * 1e3);
                }
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown --op {other:?} (cvmatvec|dense)"
                )))
            }
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = times[times.len() / 2];
        println!("{op},{n},{eps:e},{median:.4},{max_rank}");
    }
    Ok(())
}

fn cmd_eval(args: &Args) -> Result<(), CliError> {
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let coeffs = match args.get("coeffs") {
        Some(p) => load_vector(p)?,
        None => {
            let n = args.usize_or("n", 64).map_err(CliError::Usage)?;
            ComplexVector::from_fn(n, |_| rng.complex_normal())
        }
    };
    let n = args.usize_or("n", coeffs.len()).map_err(CliError::Usage)?;
    let s = load_knots(args, &mut rng, n)?;
    let p = Polynomial::new(coeffs.into_vec())?;
    let v = solvers::poly_multipoint_eval(&p, &s, eps)?;
    header(args, n, eps, seed);
    if args.has("oracle") {
        let oracle = ComplexVector::from_fn(n, |i| p.eval(s.knots()[i]));
        let rel = v.sub(&oracle).norm() / oracle.norm().max(1e-300);
        println!("oracle_relative_error {rel:.6e}");
    }
    emit(args, &textio::write_vector(&v))?;
    Ok(())
}

fn cmd_interp(args: &Args) -> Result<(), CliError> {
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let n = args.usize_or("n", 64).map_err(CliError::Usage)?;
    let s = load_knots(args, &mut rng, n)?;
    let values = match args.get("values") {
        Some(p) => load_vector(p)?,
        None => ComplexVector::from_fn(n, |_| rng.complex_normal()),
    };
    let p = solvers::poly_interpolate(&s, &values, eps)?;
    header(args, n, eps, seed);
    if args.has("oracle") {
        let back = ComplexVector::from_fn(n, |i| p.eval(s.knots()[i]));
        let rel = back.sub(&values).norm() / values.norm().max(1e-300);
        println!("oracle_relative_error {rel:.6e}");
    }
    emit(
        args,
        &textio::write_vector(&ComplexVector::new(p.coefficients().to_vec())?),
    )?;
    Ok(())
}

fn cmd_vandermonde(args: &Args, solve: bool) -> Result<(), CliError> {
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let n = args.usize_or("n", 256).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let s = load_knots(args, &mut rng, n)?;
    let input = match args.get(if solve { "rhs" } else { "in" }) {
        Some(p) => load_vector(p)?,
        None => ComplexVector::from_fn(n, |_| rng.complex_normal()),
    };
    let out = if solve {
        solvers::vandermonde_solve(&s, &input, eps)?
    } else {
        solvers::vandermonde_matvec(&s, &input, eps)?
    };
    header(args, n, eps, seed);
    if args.has("oracle") {
        let v = strucmat::knots::vandermonde_dense(&s);
        let rel = if solve {
            v.matvec(&out)?.sub(&input).norm() / input.norm().max(1e-300)
        } else {
            let dense = v.matvec(&input)?;
            out.sub(&dense).norm() / dense.norm().max(1e-300)
        };
        println!("oracle_relative_error {rel:.6e}");
    }
    emit(args, &textio::write_vector(&out))?;
    Ok(())
}

fn cmd_cv(args: &Args, solve: bool) -> Result<(), CliError> {
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let n = args.usize_or("n", 256).map_err(CliError::Usage)?;
    let e = args
        .complex_or("e", Complex64::new(1.0, 0.0))
        .map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let s = load_knots(args, &mut rng, n)?;
    let input = match args.get(if solve { "rhs" } else { "in" }) {
        Some(p) => load_vector(p)?,
        None => ComplexVector::from_fn(n, |_| rng.complex_normal()),
    };
    let out = if solve {
        solvers::cv_solve(&s, e, &input, eps)?
    } else {
        solvers::cv_matvec(&s, e, &input, eps)?
    };
    header(args, n, eps, seed);
    if args.has("oracle") {
        let grid = KnotSet::dft_grid(e, n)?;
        let cm = strucmat::knots::cauchy_dense(&s, &grid)?;
        let rel = if solve {
            cm.matvec(&out)?.sub(&input).norm() / input.norm().max(1e-300)
        } else {
            let dense = cm.matvec(&input)?;
            out.sub(&dense).norm() / dense.norm().max(1e-300)
        };
        println!("oracle_relative_error {rel:.6e}");
    }
    emit(args, &textio::write_vector(&out))?;
    Ok(())
}

fn cmd_tsolve(args: &Args) -> Result<(), CliError> {
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 7).map_err(CliError::Usage)?;
    let n = args.usize_or("n", 512).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let (col, row, b, planted) = match (args.get("col"), args.get("row"), args.get("rhs")) {
        (Some(pc), Some(pr), Some(pb)) => {
            (load_vector(pc)?, load_vector(pr)?, load_vector(pb)?, None)
        }
        (None, None, None) => {
            let (col, row) = fixtures::diagonally_dominant_toeplitz(&mut rng, n);
            let x_star = ComplexVector::from_fn(n, |_| rng.complex_normal());
            let b = strucmat::fft::toeplitz_matvec(&col, &row, &x_star)?;
            (col, row, b, Some(x_star))
        }
        _ => {
            return Err(CliError::Usage(
                "tsolve takes either all of --col --row --rhs or none".into(),
            ))
        }
    };
    let report = solvers::toeplitz_solve_with(&col, &row, &b, eps)?;
    header(args, col.len(), eps, seed);
    println!("relative_residual {:.6e}", report.relative_residual);
    println!("condition_estimate {:.6e}", report.condition_estimate);
    if args.has("oracle") {
        if let Some(x_star) = planted {
            let rel = report.x.sub(&x_star).norm() / x_star.norm().max(1e-300);
            println!("oracle_relative_error {rel:.6e}");
        }
    }
    emit(args, &textio::write_vector(&report.x))?;
    Ok(())
}

fn cmd_logkernel(args: &Args) -> Result<(), CliError> {
    let eps = args.f64_or("eps", 1e-8).map_err(CliError::Usage)?;
    let seed = args.u64_or("seed", 1).map_err(CliError::Usage)?;
    let n = args.usize_or("n", 64).map_err(CliError::Usage)?;
    let mut rng = Rng::seed_from_u64(seed);
    let roots = match args.get("roots") {
        Some(p) => KnotSet::new(load_vector(p)?.into_vec())?,
        None => fixtures::annulus_knots(&mut rng, n),
    };
    let targets = match args.get("targets") {
        Some(p) => KnotSet::new(load_vector(p)?.into_vec())?,
        None => KnotSet::new(
            (0..n)
                .map(|i| {
                    Complex64::from_polar(
                        2.2,
                        2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64,
                    )
                })
                .collect(),
        )?,
    };
    let values = solvers::log_kernel_eval_from_roots(&roots, &targets, eps)?;
    header(args, roots.len(), eps, seed);
    if args.has("oracle") {
        let mut worst = 0.0f64;
        for (i, target) in targets.knots().iter().enumerate() {
            let direct: Complex64 = roots.knots().iter().map(|r| target - r).product();
            worst = worst.max((values[i] - direct).norm() / direct.norm().max(1e-300));
        }
        println!("oracle_relative_error {worst:.6e}");
    }
    emit(args, &textio::write_vector(&values))?;
    Ok(())
}
