use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use uscore::competition::{rank_descending, CompetitionReport};
use uscore::ingest::{build_tables, read_histories, read_rows};
use uscore::report::{format_number, to_json};
use uscore::significance::{MethodChoice, DEFAULT_ENUMERATION_CAP};
use uscore::simulation::{default_s_grid, s_grid};
use uscore::{
    ecdf, ert, f1_score, function_difficulty, pairwise_matrix, recommend_n, render_competition, render_rows,
    render_weight_sensitivity, run_experiment, score_competition, sp, tie_possible, u_test_with, weight_sensitivity,
    Error, Format, GroupedTables, HalfInt, Result, ScoringConfig, SimConfig, TrialTable, UTestConfig,
};

#[derive(Parser)]
#[command(name = "uscore", version, about = "Score stochastic optimizers with trial-based U-scores")]
struct Cli {
    /// Output format: text, csv or json.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-function U-scores, group subtotals and the weighted ranking.
    Score(ScoreArgs),
    /// Pairwise win counts between algorithms on each function.
    Pairwise(DataSelect),
    /// Mann-Whitney U test between two algorithms on each function.
    Sig(SigArgs),
    /// Which tie sizes are possible for m algorithms with n trials each.
    Ties(TiesArgs),
    /// Rank functions from easiest to hardest.
    Difficulty(Data),
    /// Crossover weights at which two algorithms swap ranks.
    Weights(WeightsArgs),
    /// ERT, SP, F1 points and (with histories) ECDF.
    Legacy(LegacyArgs),
    /// Monte Carlo comparison of U-scores against dominance, as plot-ready CSV.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct Data {
    /// Trial records (CSV or JSON).
    #[arg(long)]
    input: PathBuf,
    /// Scoring config (TOML, or JSON for a .json path).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct DataSelect {
    #[command(flatten)]
    data: Data,
    /// Only this function id.
    #[arg(long)]
    function: Option<String>,
    /// Only this dimension.
    #[arg(long)]
    dimension: Option<u32>,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long, requires = "config", conflicts_with = "subtotals")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    config: Option<PathBuf>,
    /// Precomputed subtotals: CSV `algorithm,<group>,<group>,...`.
    #[arg(long)]
    subtotals: Option<PathBuf>,
    /// Group weight as GROUP=W; repeatable, overrides the config.
    #[arg(long = "weight", value_parser = parse_weight)]
    weights: Vec<(String, f64)>,
}

#[derive(Args)]
struct SigArgs {
    #[command(flatten)]
    select: DataSelect,
    /// First algorithm.
    #[arg(long)]
    a: String,
    /// Second algorithm.
    #[arg(long)]
    b: String,
    /// Significance levels, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.01])]
    alpha: Vec<f64>,
    /// Always use the normal approximation.
    #[arg(long)]
    normal: bool,
    /// Largest n1+n2 for exact enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
}

#[derive(Args)]
struct TiesArgs {
    /// Number of algorithms.
    #[arg(long)]
    m: u64,
    /// Trials per algorithm.
    #[arg(long, conflicts_with_all = ["n_min", "n_max"])]
    n: Option<u64>,
    /// Recommend tie-minimizing n in [n-min, n-max].
    #[arg(long, requires = "n_max")]
    n_min: Option<u64>,
    #[arg(long, requires = "n_min")]
    n_max: Option<u64>,
}

#[derive(Args)]
struct WeightsArgs {
    #[arg(long, requires = "config", conflicts_with = "subtotals")]
    input: Option<PathBuf>,
    #[arg(long, requires = "input")]
    config: Option<PathBuf>,
    /// Precomputed subtotals: CSV `algorithm,<group>,<group>,...`.
    #[arg(long)]
    subtotals: Option<PathBuf>,
    /// Group kept at weight 1 (default: first group).
    #[arg(long)]
    base_group: Option<String>,
    /// Group whose weight varies (default: second group).
    #[arg(long)]
    weighted_group: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    w_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    w_max: f64,
}

#[derive(Args)]
struct LegacyArgs {
    #[command(flatten)]
    data: Data,
    /// Convergence histories: CSV `function,dimension,algorithm,trial,fe,ev`.
    #[arg(long, requires_all = ["targets", "budgets"])]
    history: Option<PathBuf>,
    /// ECDF error targets, comma separated.
    #[arg(long, value_delimiter = ',')]
    targets: Vec<f64>,
    /// ECDF evaluation budgets, comma separated.
    #[arg(long, value_delimiter = ',')]
    budgets: Vec<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Trials per algorithm.
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = SimConfig::DEFAULT_RUNS)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Separation grid START:STOP:STEP (default 0:1:0.05).
    #[arg(long)]
    s: Option<String>,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weight(s: &str) -> std::result::Result<(String, f64), String> {
    let (g, w) = s.split_once('=').ok_or_else(|| format!("expected GROUP=WEIGHT, got {s}"))?;
    let w: f64 = w.parse().map_err(|_| format!("bad weight in {s}"))?;
    Ok((g.to_string(), w))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => match write_output(cli.out.as_deref(), &text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error[{}]: {e}", e.class());
    ExitCode::FAILURE
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => File::create(p).map_err(|e| at(e, p))?.write_all(text.as_bytes())?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn at(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<String> {
    let f = cli.format;
    match &cli.command {
        Command::Score(a) => score(a, f),
        Command::Pairwise(a) => pairwise(a, f),
        Command::Sig(a) => sig(a, f),
        Command::Ties(a) => ties(a, f),
        Command::Difficulty(a) => difficulty(a, f),
        Command::Weights(a) => weights(a, f),
        Command::Legacy(a) => legacy(a, f),
        Command::Simulate(a) => simulate(a, f),
    }
}

fn load(data: &Data) -> Result<(ScoringConfig, GroupedTables)> {
    let cfg = ScoringConfig::load(&data.config)?;
    let rows = read_rows(&data.input)?;
    let tables = build_tables(&rows, &cfg)?;
    Ok((cfg, tables))
}

fn select(s: &DataSelect) -> Result<Vec<TrialTable>> {
    let (_, tables) = load(&s.data)?;
    let picked: Vec<TrialTable> = tables
        .into_iter()
        .map(|(_, t)| t)
        .filter(|t| s.function.as_ref().is_none_or(|f| *f == t.context.function_id))
        .filter(|t| s.dimension.is_none_or(|d| d == t.context.dimension))
        .collect();
    if picked.is_empty() {
        return Err(Error::Empty("no function matches the selection".into()));
    }
    Ok(picked)
}

/// `algorithm,<group>,...` with half-integer values.
fn read_subtotals(path: &Path) -> Result<(Vec<String>, Vec<String>, Vec<Vec<HalfInt>>)> {
    let text = std::fs::read_to_string(path).map_err(|e| at(e, path))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Empty("subtotals file is empty".into()))?;
    let header: Vec<&str> = header.split(',').map(str::trim).collect();
    if header.first() != Some(&"algorithm") || header.len() < 2 {
        return Err(Error::Schema { row: 1, message: "header must be algorithm,<group>,...".into() });
    }
    let groups: Vec<String> = header[1..].iter().map(|g| g.to_string()).collect();
    let (mut algs, mut values) = (Vec::new(), Vec::new());
    for (i, line) in lines {
        let row = i + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(Error::Schema { row, message: format!("expected {} fields, got {}", header.len(), cells.len()) });
        }
        let vals = cells[1..]
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .ok()
                    .and_then(HalfInt::from_f64)
                    .ok_or_else(|| Error::Schema { row, message: format!("{c} is not a multiple of 0.5") })
            })
            .collect::<Result<Vec<_>>>()?;
        algs.push(cells[0].to_string());
        values.push(vals);
    }
    Ok((algs, groups, values))
}

fn competition(
    input: Option<&PathBuf>,
    config: Option<&PathBuf>,
    subtotals: Option<&PathBuf>,
    cli_weights: &[(String, f64)],
) -> Result<CompetitionReport> {
    match (input, config, subtotals) {
        (Some(input), Some(config), None) => {
            let (cfg, tables) = load(&Data { input: input.clone(), config: config.clone() })?;
            let mut w = cfg.weight_list();
            w.retain(|(g, _)| !cli_weights.iter().any(|(c, _)| c == g));
            w.extend_from_slice(cli_weights);
            score_competition(&tables, &w)
        }
        (None, None, Some(path)) => {
            let (algs, groups, values) = read_subtotals(path)?;
            CompetitionReport::from_subtotals(algs, groups, values, cli_weights)
        }
        _ => Err(Error::InvalidInput("give either --input and --config, or --subtotals".into())),
    }
}

fn score(a: &ScoreArgs, f: Format) -> Result<String> {
    let report = competition(a.input.as_ref(), a.config.as_ref(), a.subtotals.as_ref(), &a.weights)?;
    render_competition(&report, f)
}

fn pairwise(a: &DataSelect, f: Format) -> Result<String> {
    let tables = select(a)?;
    let matrices = tables.iter().map(pairwise_matrix).collect::<Result<Vec<_>>>()?;
    if f == Format::Json {
        return to_json(&matrices);
    }
    let mut header: Vec<String> = ["function", "dimension", "algorithm"].map(String::from).to_vec();
    header.extend(matrices[0].algorithms.iter().map(|a| format!("vs {a}")));
    header.push("U".into());
    let mut rows = Vec::new();
    for (t, m) in tables.iter().zip(&matrices) {
        let sums = m.row_sums();
        for (j, alg) in m.algorithms.iter().enumerate() {
            let mut row = vec![t.context.function_id.clone(), t.context.dimension.to_string(), alg.clone()];
            row.extend(m.entries[j].iter().enumerate().map(|(l, v)| if l == j { "-".into() } else { v.to_string() }));
            row.push(sums[j].to_string());
            rows.push(row);
        }
    }
    render_rows(&header, &rows, f)
}

fn sig(a: &SigArgs, f: Format) -> Result<String> {
    let config = UTestConfig {
        enumeration_cap: a.cap,
        method: if a.normal { MethodChoice::Normal } else { MethodChoice::Auto },
    };
    let mut results = Vec::new();
    for t in select(&a.select)? {
        let find = |name: &str| {
            t.algorithm_index(name)
                .ok_or_else(|| Error::InvalidInput(format!("algorithm {name} not in {}", t.context.function_id)))
        };
        let (i, j) = (find(&a.a)?, find(&a.b)?);
        let r = u_test_with(&t.trials[i], &t.trials[j], &t.context, &a.alpha, config)?;
        results.push((t.context.function_id.clone(), t.context.dimension, r));
    }
    if f == Format::Json {
        let v: Vec<_> = results
            .iter()
            .map(|(id, d, r)| json!({"function": id, "dimension": d, "a": a.a, "b": a.b, "result": r}))
            .collect();
        return to_json(&v);
    }
    let mut header: Vec<String> = ["function", "dimension", "U_a", "U_b", "U", "p", "method"].map(String::from).to_vec();
    header.extend(a.alpha.iter().map(|x| format!("sig@{x}")));
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(id, d, r)| {
            let mut row = vec![
                id.clone(),
                d.to_string(),
                r.u_a.to_string(),
                r.u_b.to_string(),
                r.u_statistic.to_string(),
                format!("{:.6}", r.p_value),
                format!("{:?}", r.method),
            ];
            row.extend(r.significant_at.iter().map(|s| if s.significant { "yes" } else { "no" }.to_string()));
            row
        })
        .collect();
    render_rows(&header, &rows, f)
}

fn ties(a: &TiesArgs, f: Format) -> Result<String> {
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    match (a.n, a.n_min, a.n_max) {
        (Some(n), None, None) => {
            let r = tie_possible(a.m, n)?;
            if f == Format::Json {
                return to_json(&r);
            }
            let header = ["m", "n", "comparisons", "tie_free", "possible_tie_sizes"].map(String::from).to_vec();
            let rows = vec![vec![
                r.m.to_string(),
                r.n.to_string(),
                r.total_comparisons.to_string(),
                r.tie_free.to_string(),
                join(&r.possible_tie_sizes),
            ]];
            render_rows(&header, &rows, f)
        }
        (None, Some(lo), Some(hi)) => {
            let best = recommend_n(a.m, lo, hi)?;
            let reports = best.iter().map(|&n| tie_possible(a.m, n)).collect::<Result<Vec<_>>>()?;
            if f == Format::Json {
                return to_json(&json!({"m": a.m, "n_min": lo, "n_max": hi, "recommended": reports}));
            }
            let header = ["n", "possible_tie_sizes"].map(String::from).to_vec();
            let rows: Vec<Vec<String>> =
                reports.iter().map(|r| vec![r.n.to_string(), join(&r.possible_tie_sizes)]).collect();
            render_rows(&header, &rows, f)
        }
        _ => Err(Error::InvalidInput("give --n, or both --n-min and --n-max".into())),
    }
}

fn difficulty(a: &Data, f: Format) -> Result<String> {
    let (_, tables) = load(a)?;
    let tables: Vec<TrialTable> = tables.into_iter().map(|(_, t)| t).collect();
    let d = function_difficulty(&tables)?;
    if f == Format::Json {
        return to_json(&d);
    }
    let header = ["rank", "function", "dimension", "score"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = d
        .easiest_first()
        .into_iter()
        .enumerate()
        .map(|(r, i)| {
            let (id, dim) = &d.functions[i];
            vec![(r + 1).to_string(), id.clone(), dim.to_string(), d.scores[i].to_string()]
        })
        .collect();
    render_rows(&header, &rows, f)
}

fn weights(a: &WeightsArgs, f: Format) -> Result<String> {
    let report = competition(a.input.as_ref(), a.config.as_ref(), a.subtotals.as_ref(), &[])?;
    let group = |name: Option<&String>, default: usize| -> Result<usize> {
        match name {
            Some(g) => report
                .groups
                .iter()
                .position(|x| x == g)
                .ok_or_else(|| Error::InvalidInput(format!("no group named {g}; have {:?}", report.groups))),
            None if default < report.groups.len() => Ok(default),
            None => Err(Error::InvalidInput(format!("need two groups, have {:?}", report.groups))),
        }
    };
    let (b, w) = (group(a.base_group.as_ref(), 0)?, group(a.weighted_group.as_ref(), 1)?);
    if b == w {
        return Err(Error::InvalidInput("base and weighted group must differ".into()));
    }
    let base: Vec<HalfInt> = report.subtotals.iter().map(|s| s[b]).collect();
    let weighted: Vec<HalfInt> = report.subtotals.iter().map(|s| s[w]).collect();
    let r = weight_sensitivity(&report.algorithms, &base, &weighted, a.w_min, a.w_max)?;
    render_weight_sensitivity(&r, f)
}

fn legacy(a: &LegacyArgs, f: Format) -> Result<String> {
    let (_, tables) = load(&a.data)?;
    let histories = match &a.history {
        Some(p) => Some(read_histories(File::open(p).map_err(|e| at(e, p))?)?),
        None => None,
    };

    let mut rows = Vec::new();
    let mut ecdf_rows = Vec::new();
    let mut json_rows = Vec::new();
    for (_, t) in &tables {
        let u = uscore::u_scores(t)?;
        let totals: Vec<f64> = u.u_scores.iter().map(|s| s.to_f64()).collect();
        let (ranks, _) = rank_descending(&totals);
        for (j, alg) in t.algorithms.iter().enumerate() {
            let e = ert(&t.trials[j])?;
            let s = sp(&t.trials[j])?;
            let points = f1_score(ranks[j] as u32)?;
            let key = (t.context.function_id.clone(), t.context.dimension, alg.clone());
            let curve = match &histories {
                Some(h) => match h.get(&key) {
                    Some(hist) => Some(ecdf(hist, &a.targets, &a.budgets)?),
                    None => None,
                },
                None => None,
            };
            let opt = |v: Option<f64>| v.map_or("undefined".to_string(), format_number);
            rows.push(vec![
                key.0.clone(),
                key.1.to_string(),
                alg.clone(),
                format!("{}/{}", e.n_success, t.n()),
                opt(e.value),
                opt(s),
                u.u_scores[j].to_string(),
                ranks[j].to_string(),
                points.to_string(),
            ]);
            if let Some(c) = &curve {
                for (budget, frac) in &c.points {
                    ecdf_rows.push(vec![key.0.clone(), key.1.to_string(), alg.clone(), budget.to_string(), format_number(*frac)]);
                }
            }
            json_rows.push(json!({
                "function": key.0, "dimension": key.1, "algorithm": alg,
                "ert": e, "sp": s, "u_score": u.u_scores[j], "u_rank": ranks[j], "f1_points": points,
                "ecdf": curve,
            }));
        }
    }
    let note = "ECDF unavailable: pass --history with --targets and --budgets";
    if f == Format::Json {
        let mut v = json!({ "metrics": json_rows });
        if histories.is_none() {
            v["ecdf_note"] = json!(note);
        }
        return to_json(&v);
    }
    let header = ["function", "dimension", "algorithm", "successes", "ERT", "SP", "U", "U_rank", "F1"]
        .map(String::from)
        .to_vec();
    let mut out = render_rows(&header, &rows, f)?;
    if f == Format::Text {
        out.push('\n');
        if histories.is_none() {
            out.push_str(note);
            out.push('\n');
        } else if ecdf_rows.is_empty() {
            out.push_str("ECDF: no histories match the scored functions\n");
        } else {
            let header = ["function", "dimension", "algorithm", "budget", "fraction"].map(String::from).to_vec();
            out.push_str(&render_rows(&header, &ecdf_rows, f)?);
        }
    }
    Ok(out)
}

fn simulate(a: &SimulateArgs, f: Format) -> Result<String> {
    let grid = match &a.s {
        None => default_s_grid(),
        Some(spec) => {
            let parts: Vec<f64> = spec
                .split(':')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(format!("bad grid {spec}, expected START:STOP:STEP")))?;
            match parts[..] {
                [start, stop, step] => s_grid(start, stop, step),
                _ => return Err(Error::InvalidInput(format!("bad grid {spec}, expected START:STOP:STEP"))),
            }
        }
    };
    let curve = run_experiment(&SimConfig::new(a.n, a.runs, a.seed).with_s_grid(grid))?;
    match f {
        Format::Json => to_json(&curve),
        // plot-ready CSV is the only tabular form
        _ => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            Ok(String::from_utf8(buf).expect("csv output is utf-8"))
        }
    }
}
