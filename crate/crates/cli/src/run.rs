//! Command implementations: resolve the configuration, run the library
//! calls, emit the table.

use std::fs::File;
use std::io::{BufWriter, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use moebius_expsum::{
    alpha_fixed_point, build_tables, ceil_x_pow_2_5, lemma1_check, lemma2_check, mobius_sum,
    parse_rational, select_q, theorem_sweep, vaughan_decompose, ConvergentGen, GammaVariant,
    IrrationalSpec, Rational, SequenceChoice, SieveTables,
};

use crate::table::TableDoc;
use crate::{Cli, CliError, Command, CommonOpts, GammaVariantArg, OutputFormat, SeqArg, XSelection};

/// Canonical, serializable echo of everything that determines a run.
/// Parsing the serialized form back reproduces it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub alpha: String,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output: Option<String>,
    pub sieve_limit: u64,
    pub frac_bits: u32,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub xs: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma_variant: Option<GammaVariantArg>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seq: Option<SeqArg>,
}

fn parse_number(s: &str) -> Result<u64, CliError> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s
        .parse()
        .map_err(|_| CliError::Usage(format!("not a number: {s:?}")))?;
    if !f.is_finite() || !(1.0..=9e15).contains(&f) || f.fract() != 0.0 {
        return Err(CliError::Usage(format!(
            "{s:?} is not a positive integer up to 9e15"
        )));
    }
    Ok(f as u64)
}

fn parse_x_range(s: &str) -> Result<Vec<u64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let usage = || {
        CliError::Usage(format!(
            "x-range must be start:stop:xK (geometric, factor K), got {s:?}"
        ))
    };
    if parts.len() != 3 {
        return Err(usage());
    }
    let factor = parts[2].strip_prefix('x').ok_or_else(usage)?;
    let start = parse_number(parts[0])?;
    let stop = parse_number(parts[1])?;
    let k = parse_number(factor)?;
    if start < 1 || stop < start || k < 2 {
        return Err(usage());
    }
    let mut xs = Vec::new();
    let mut x = start;
    loop {
        xs.push(x);
        match x.checked_mul(k) {
            Some(nx) if nx <= stop => x = nx,
            _ => break,
        }
    }
    Ok(xs)
}

fn resolve_xs(sel: &XSelection) -> Result<Vec<u64>, CliError> {
    match (&sel.x, &sel.x_range) {
        (Some(x), None) => Ok(vec![*x]),
        (None, Some(r)) => parse_x_range(r),
        (None, None) => Err(CliError::Usage("one of --x or --x-range is required".into())),
        (Some(_), Some(_)) => Err(CliError::Usage("--x conflicts with --x-range".into())),
    }
}

/// tau from the flag, or the spec's eta + 1/10 when the exponent is known
/// from the construction.
fn resolve_tau(spec: &IrrationalSpec, flag: &Option<String>) -> Result<Rational, CliError> {
    match flag {
        Some(s) => Ok(parse_rational(s)?),
        None => {
            let eta = spec.eta_hint().ok_or_else(|| {
                CliError::Usage(
                    "--tau is required for explicit continued fractions (no known eta)".into(),
                )
            })?;
            Ok(eta + Rational::new(1, 10))
        }
    }
}

fn rational_str(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn build_sieve(limit: u64) -> Result<SieveTables, CliError> {
    Ok(build_tables(limit)?)
}

fn apply_threads(common: &CommonOpts) {
    if let Some(t) = common.threads {
        // The global pool can only be installed once; later calls are no-ops.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
}

fn emit(common: &CommonOpts, config: &RunConfig, doc: &TableDoc) -> Result<(), CliError> {
    let config_value = serde_json::to_value(config)
        .map_err(|e| CliError::Resource(format!("config serialization: {e}")))?;
    let mut sink: Box<dyn Write> = match &common.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match common.format {
        OutputFormat::Csv => doc.write_csv(&mut sink)?,
        OutputFormat::Json => doc.write_json(&config_value, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

fn f(v: f64) -> Value {
    json!(v)
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sum { common, xs } => cmd_sum(common, xs),
        Command::Decompose {
            common,
            xs,
            m,
            n,
            gamma_variant,
        } => cmd_decompose(common, xs, m, n, gamma_variant),
        Command::Convergents { common, count } => cmd_convergents(common, count),
        Command::SelectQ { common, x, tau } => cmd_select_q(common, x, tau),
        Command::Sweep {
            common,
            xs,
            tau,
            epsilon,
            emit_plot_data,
        } => cmd_sweep(common, xs, tau, epsilon, emit_plot_data),
        Command::Lemma1 { common, x, m, tau } => cmd_lemma1(common, x, m, tau),
        Command::Lemma2 {
            common,
            x,
            m,
            n,
            tau,
            seq,
        } => cmd_lemma2(common, x, m, n, tau, seq),
    }
}

fn base_config(command: &str, common: &CommonOpts, sieve_limit: u64) -> RunConfig {
    RunConfig {
        command: command.into(),
        alpha: common.alpha.clone(),
        format: common.format,
        output: common.output.clone(),
        sieve_limit,
        frac_bits: common.frac_bits,
        seed: common.seed,
        threads: common.threads,
        xs: Vec::new(),
        tau: None,
        epsilon: None,
        m: None,
        n: None,
        count: None,
        gamma_variant: None,
        seq: None,
    }
}

fn cmd_sum(common: CommonOpts, xsel: XSelection) -> Result<(), CliError> {
    apply_threads(&common);
    let spec = IrrationalSpec::parse(&common.alpha)?;
    let xs = resolve_xs(&xsel)?;
    let limit = common.sieve_limit.unwrap_or(*xs.iter().max().unwrap());
    let tables = build_sieve(limit)?;
    let alpha = alpha_fixed_point(&spec, common.frac_bits)?;

    let mut config = base_config("sum", &common, limit);
    config.xs = xs.clone();

    let mut doc = TableDoc::new(vec!["x", "terms", "re", "im", "abs", "err_bound"]);
    for x in xs {
        let s = mobius_sum(x, &alpha, &tables)?;
        doc.push(vec![
            json!(x),
            json!(s.terms),
            f(s.re),
            f(s.im),
            f(s.abs()),
            f(s.err_bound),
        ]);
    }
    emit(&common, &config, &doc)
}

fn cmd_decompose(
    common: CommonOpts,
    xsel: XSelection,
    m_flag: Option<u64>,
    n_flag: Option<u64>,
    variant_arg: GammaVariantArg,
) -> Result<(), CliError> {
    apply_threads(&common);
    let spec = IrrationalSpec::parse(&common.alpha)?;
    let xs = resolve_xs(&xsel)?;
    let variant = match variant_arg {
        GammaVariantArg::Exact => GammaVariant::Exact,
        GammaVariantArg::Literal => GammaVariant::Literal,
    };

    // The sieve has to cover every x and every M*N product.
    let mut needed = *xs.iter().max().unwrap();
    for &x in &xs {
        let m = m_flag.unwrap_or_else(|| ceil_x_pow_2_5(x));
        let n = n_flag.unwrap_or_else(|| ceil_x_pow_2_5(x));
        needed = needed.max(m.saturating_mul(n));
    }
    let limit = common.sieve_limit.unwrap_or(needed);
    let tables = build_sieve(limit)?;
    let alpha = alpha_fixed_point(&spec, common.frac_bits)?;

    let mut config = base_config("decompose", &common, limit);
    config.xs = xs.clone();
    config.m = m_flag;
    config.n = n_flag;
    config.gamma_variant = Some(variant_arg);

    let mut doc = TableDoc::new(vec![
        "x",
        "m",
        "n",
        "gamma_variant",
        "s_re",
        "s_im",
        "t1_re",
        "t1_im",
        "t2_re",
        "t2_im",
        "sm_re",
        "sm_im",
        "sn_re",
        "sn_im",
        "residual",
        "err_budget",
    ]);
    let mut violation = None;
    for x in xs {
        let m = m_flag.unwrap_or_else(|| ceil_x_pow_2_5(x));
        let n = n_flag.unwrap_or_else(|| ceil_x_pow_2_5(x));
        let d = vaughan_decompose(x, m, n, &alpha, &tables, variant)?;
        if matches!(variant, GammaVariant::Exact) && d.residual > d.err_budget {
            violation = Some(format!(
                "residual {} exceeds the error budget {} at x = {x}",
                d.residual, d.err_budget
            ));
        }
        doc.push(vec![
            json!(x),
            json!(m),
            json!(n),
            json!(match variant_arg {
                GammaVariantArg::Exact => "exact",
                GammaVariantArg::Literal => "literal",
            }),
            f(d.s_total.re),
            f(d.s_total.im),
            f(d.t1.re),
            f(d.t1.im),
            f(d.t2.re),
            f(d.t2.im),
            f(d.s_m.re),
            f(d.s_m.im),
            f(d.s_n.re),
            f(d.s_n.im),
            f(d.residual),
            f(d.err_budget),
        ]);
    }
    emit(&common, &config, &doc)?;
    match violation {
        Some(msg) => Err(CliError::Invariant(msg)),
        None => Ok(()),
    }
}

fn cmd_convergents(common: CommonOpts, count: usize) -> Result<(), CliError> {
    let spec = IrrationalSpec::parse(&common.alpha)?;
    if count < 1 {
        return Err(CliError::Usage("--count must be >= 1".into()));
    }
    let mut config = base_config("convergents", &common, 0);
    config.count = Some(count);

    let mut doc = TableDoc::new(vec!["i", "a", "p", "q"]);
    let mut gen = ConvergentGen::new(&spec)?;
    for _ in 0..count {
        let (a, c) = gen.step()?;
        doc.push(vec![
            json!(c.index),
            json!(a.to_string()),
            json!(c.p.to_string()),
            json!(c.q.to_string()),
        ]);
    }
    emit(&common, &config, &doc)
}

fn cmd_select_q(common: CommonOpts, x: u64, tau: Option<String>) -> Result<(), CliError> {
    let spec = IrrationalSpec::parse(&common.alpha)?;
    let tau = resolve_tau(&spec, &tau)?;
    let sel = select_q(&spec, x, tau)?;
    if !sel.approx_ok {
        eprintln!(
            "moebius-expsum: warning: |alpha - p/q| > q^-tau not confirmed at index {} \
             (small denominators may precede the tail behaviour)",
            sel.index
        );
    }
    let mut config = base_config("select-q", &common, 0);
    config.xs = vec![x];
    config.tau = Some(rational_str(tau));

    let mut doc = TableDoc::new(vec!["x", "tau", "i", "q", "xrange_ok", "approx_ok"]);
    doc.push(vec![
        json!(x),
        json!(rational_str(tau)),
        json!(sel.index),
        json!(sel.q.to_string()),
        json!(sel.xrange_ok),
        json!(sel.approx_ok),
    ]);
    emit(&common, &config, &doc)
}

fn cmd_sweep(
    common: CommonOpts,
    xsel: XSelection,
    tau: Option<String>,
    epsilon: String,
    plot_path: Option<String>,
) -> Result<(), CliError> {
    apply_threads(&common);
    let spec = IrrationalSpec::parse(&common.alpha)?;
    let xs = resolve_xs(&xsel)?;
    let tau = resolve_tau(&spec, &tau)?;
    let eps = parse_rational(&epsilon)?;
    let limit = common.sieve_limit.unwrap_or(*xs.iter().max().unwrap());
    let tables = build_sieve(limit)?;

    let mut config = base_config("sweep", &common, limit);
    config.xs = xs.clone();
    config.tau = Some(rational_str(tau));
    config.epsilon = Some(rational_str(eps));

    let rows = theorem_sweep(&spec, &xs, tau, &tables, eps)?;

    let mut doc = TableDoc::new(vec![
        "x",
        "abs_sum",
        "emp_exponent",
        "pred_exponent",
        "tau",
        "q",
        "t1_bound",
        "t2_bound",
        "error",
    ]);
    for r in &rows {
        doc.push(vec![
            json!(r.x),
            f(r.abs_sum),
            f(r.emp_exponent),
            f(r.pred_exponent),
            json!(rational_str(r.tau)),
            r.q.as_ref().map_or(Value::Null, |q| json!(q.to_string())),
            r.t1_bound.map_or(Value::Null, f),
            r.t2_bound.map_or(Value::Null, f),
            r.error.as_ref().map_or(Value::Null, |e| json!(e)),
        ]);
    }
    emit(&common, &config, &doc)?;

    if let Some(path) = plot_path {
        let mut out = BufWriter::new(File::create(path)?);
        for r in &rows {
            if r.error.is_none() {
                let lx = (r.x as f64).log10();
                writeln!(
                    out,
                    "{} {} {}",
                    lx,
                    r.abs_sum.log10(),
                    r.pred_exponent * lx
                )?;
            }
        }
        out.flush()?;
    }
    Ok(())
}

fn cmd_lemma1(
    common: CommonOpts,
    x: u64,
    m: Option<u64>,
    tau: Option<String>,
) -> Result<(), CliError> {
    let spec = IrrationalSpec::parse(&common.alpha)?;
    let tau = resolve_tau(&spec, &tau)?;
    let m = m.unwrap_or_else(|| ceil_x_pow_2_5(x));
    let alpha = alpha_fixed_point(&spec, common.frac_bits)?;
    let qsel = select_q(&spec, x, tau)?;
    let r = lemma1_check(x, m, &alpha, &qsel)?;

    let mut config = base_config("lemma1", &common, 0);
    config.xs = vec![x];
    config.m = Some(m);
    config.tau = Some(rational_str(tau));

    let mut doc = TableDoc::new(vec!["x", "m", "q", "lhs", "rhs", "ratio"]);
    doc.push(vec![
        json!(r.x),
        json!(r.m),
        f(r.q),
        f(r.lhs),
        f(r.rhs),
        f(r.ratio),
    ]);
    emit(&common, &config, &doc)
}

fn cmd_lemma2(
    common: CommonOpts,
    x: u64,
    m: Option<u64>,
    n: Option<u64>,
    tau: Option<String>,
    seq: SeqArg,
) -> Result<(), CliError> {
    let spec = IrrationalSpec::parse(&common.alpha)?;
    let tau = resolve_tau(&spec, &tau)?;
    let m = m.unwrap_or_else(|| ceil_x_pow_2_5(x));
    let n = n.unwrap_or_else(|| ceil_x_pow_2_5(x));
    let limit = common.sieve_limit.unwrap_or(x);
    let tables = build_sieve(limit)?;
    let alpha = alpha_fixed_point(&spec, common.frac_bits)?;
    let qsel = select_q(&spec, x, tau)?;
    let choice = match seq {
        SeqArg::Mobius => SequenceChoice::MobiusNormalized,
        SeqArg::Ones => SequenceChoice::AllOnes,
        SeqArg::Random => SequenceChoice::RandomUnit { seed: common.seed },
    };
    let r = lemma2_check(x, m, n, &alpha, &qsel, choice, &tables)?;

    let mut config = base_config("lemma2", &common, limit);
    config.xs = vec![x];
    config.m = Some(m);
    config.n = Some(n);
    config.tau = Some(rational_str(tau));
    config.seq = Some(seq);

    let mut doc = TableDoc::new(vec!["x", "m", "n", "q", "seq", "seed", "lhs", "rhs", "ratio"]);
    doc.push(vec![
        json!(r.x),
        json!(r.m),
        json!(r.n.unwrap()),
        f(r.q),
        json!(match seq {
            SeqArg::Mobius => "mobius",
            SeqArg::Ones => "ones",
            SeqArg::Random => "random",
        }),
        json!(common.seed),
        f(r.lhs),
        f(r.rhs),
        f(r.ratio),
    ]);
    emit(&common, &config, &doc)
}
