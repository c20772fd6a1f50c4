use clap::{Args, Parser, Subcommand, ValueEnum};
use qmlsim::bosonic::{
    encode_tokens, optimize_token_params_traced, state_overlap, tokenize_smiles,
    tokenize_whitespace, QumodeConfig, TokenDictionary,
};
use qmlsim::circuit::{self, fuse, ExecutionStats, FusionCostModel};
use qmlsim::encoding::{
    amplitude_encode, angle_encode, angle_normalize, basis_encode, basis_encode_dataset_circuit,
    Axis, EncodingSpec,
};
use qmlsim::exec::{bench_scaling, BenchConfig};
use qmlsim::sim::sample_shots;
use qmlsim::variational::{
    build_qcnn, evaluate_dataset, train, CostSpec, PostProcess, TrainConfig, TrainInput,
    TrainSample,
};
use qmlsim::{Circuit, Error, Observable, PauliString, StateVector, C64};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qmlsim",
    version,
    about = "State-vector quantum circuit simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a circuit and print the outcome histogram.
    Run {
        circuit: PathBuf,
        #[arg(long, default_value_t = 1024)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Print the exact expectation of a Pauli observable.
    Expect {
        circuit: PathBuf,
        /// e.g. "ZZ" or "0.5*XI + -1*ZZ"; qubit 0 is the leftmost letter.
        #[arg(long)]
        obs: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Build a state-preparation circuit from data.
    Encode {
        #[arg(long, value_enum)]
        method: Method,
        /// CSV of feature rows, or one 0/1 string per line for basis encoding.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Data row to encode (angle and amplitude).
        #[arg(long, default_value_t = 0)]
        row: usize,
        #[arg(long, value_enum, default_value_t = AxisArg::Y)]
        axis: AxisArg,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        hi: f64,
    },
    /// Train an ansatz on labeled CSV data (features then label per row).
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// "qcnn" or a circuit JSON file with parameter slots.
        #[arg(long, default_value = "qcnn")]
        ansatz: String,
        #[arg(long, value_enum, default_value_t = Method::Basis)]
        encoding: Method,
        /// Observable for a circuit-file ansatz; defaults to Z on qubit 0.
        #[arg(long)]
        obs: Option<String>,
        #[arg(long, value_enum, default_value_t = PostArg::MseVsLabel)]
        postproc: PostArg,
        /// Write the trained parameters as a JSON array.
        #[arg(long)]
        params_out: Option<PathBuf>,
    },
    /// Encode token strings into a qubit-qumode state and print overlaps.
    EncodeTokens {
        #[arg(long)]
        dict: PathBuf,
        /// One string per flag. Strings with spaces are token streams, others are SMILES.
        #[arg(long, required = true)]
        tokens: Vec<String>,
        /// Comma-separated vocabulary for greedy SMILES tokenization.
        #[arg(long)]
        vocab: Option<String>,
        #[arg(long, default_value_t = qmlsim::bosonic::DEFAULT_CUTOFF)]
        cutoff: usize,
        /// Optimize the dictionary on the given strings for this many steps first.
        #[arg(long, default_value_t = 0)]
        optimize: usize,
        #[arg(long, default_value_t = 0.1)]
        learning_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the optimized dictionary.
        #[arg(long)]
        dict_out: Option<PathBuf>,
    },
    /// Time batches of layered circuits over a range of widths.
    Bench {
        /// Inclusive range, e.g. 4..16.
        #[arg(long)]
        qubits: String,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long, default_value_t = 100)]
        jobs: usize,
        /// Comma-separated worker counts.
        #[arg(long, default_value = "1")]
        workers: String,
        #[arg(long)]
        out: PathBuf,
        /// Wider rows are only estimated.
        #[arg(long, default_value_t = qmlsim::sim::DEFAULT_MAX_QUBITS)]
        max_qubits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Merge runs of gates into matrix blocks.
    Fuse {
        circuit: PathBuf,
        #[arg(long, default_value_t = 5)]
        max_qubits: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Comma-separated slot values.
    #[arg(long)]
    params: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Basis,
    Angle,
    Amplitude,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum PostArg {
    Identity,
    Mean,
    MseVsLabel,
    CrossEntropyVsLabel,
}

impl From<PostArg> for PostProcess {
    fn from(p: PostArg) -> Self {
        match p {
            PostArg::Identity => PostProcess::Identity,
            PostArg::Mean => PostProcess::Mean,
            PostArg::MseVsLabel => PostProcess::MseVsLabel,
            PostArg::CrossEntropyVsLabel => PostProcess::CrossEntropyVsLabel,
        }
    }
}

type CliResult<T> = Result<T, Error>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> CliResult<Vec<T>> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad {what} value '{s}'")))
        })
        .collect()
}

fn load_bound(path: &Path, params: &ParamArgs) -> CliResult<Circuit> {
    let c = circuit::deserialize(&read(path)?)?;
    let values = match &params.params {
        Some(p) => parse_list(p, "parameter")?,
        None => Vec::new(),
    };
    c.bind_parameters(&values)
}

fn read_rows(path: &Path) -> CliResult<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "{} row {}: '{f}' is not a number",
                        path.display(),
                        i + 1
                    ))
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(rows)
}

fn read_bit_strings(path: &Path) -> CliResult<Vec<Vec<u8>>> {
    let text = read(path)?;
    let rows: Vec<Vec<u8>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse(format!("line {}: '{c}' is not a bit", i + 1))),
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    if rows.is_empty() {
        return Err(Error::Validation(format!(
            "{}: no bit strings",
            path.display()
        )));
    }
    Ok(rows)
}

fn axis(a: AxisArg) -> Axis {
    match a {
        AxisArg::X => Axis::X,
        AxisArg::Y => Axis::Y,
        AxisArg::Z => Axis::Z,
    }
}

fn pick_row(rows: &[Vec<f64>], row: usize) -> CliResult<&[f64]> {
    rows.get(row).map(Vec::as_slice).ok_or_else(|| {
        Error::Validation(format!(
            "row {row} requested, data has {} row(s)",
            rows.len()
        ))
    })
}

fn cmd_encode(
    method: Method,
    input: &Path,
    out: &Path,
    row: usize,
    ax: AxisArg,
    lo: f64,
    hi: f64,
) -> CliResult<()> {
    let (c, record) = match method {
        Method::Basis => {
            let rows = read_bit_strings(input)?;
            let c = if rows.len() == 1 {
                basis_encode(&rows[0])?
            } else {
                basis_encode_dataset_circuit(&rows)?
            };
            (c, None)
        }
        Method::Angle => {
            let rows = read_rows(input)?;
            let spec = EncodingSpec::angle(axis(ax)).with_range(lo, hi);
            let (angles, rec) = angle_normalize(pick_row(&rows, row)?, &spec)?;
            (angle_encode(&angles, &spec)?, Some(rec))
        }
        Method::Amplitude => {
            let rows = read_rows(input)?;
            let x: Vec<C64> = pick_row(&rows, row)?
                .iter()
                .map(|&v| C64::new(v, 0.0))
                .collect();
            let (c, rec) = amplitude_encode(&x)?;
            (c, Some(rec))
        }
    };
    write(out, &circuit::serialize(&c))?;
    println!(
        "wrote {} ({} qubits, {} gates)",
        out.display(),
        c.n_qubits(),
        c.len()
    );
    if let Some(rec) = record {
        println!(
            "{}",
            serde_json::to_string(&rec).expect("record serializes")
        );
    }
    Ok(())
}

fn encoding_spec(method: Method) -> EncodingSpec {
    match method {
        Method::Basis => EncodingSpec::basis(),
        Method::Angle => EncodingSpec::angle(Axis::Y),
        Method::Amplitude => EncodingSpec::amplitude(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    config: &Path,
    data: &Path,
    trace: &Path,
    ansatz: &str,
    encoding: Method,
    obs: Option<&str>,
    postproc: PostArg,
    params_out: Option<&Path>,
) -> CliResult<()> {
    let cfg: TrainConfig = serde_json::from_str(&read(config)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", config.display())))?;
    let rows = read_rows(data)?;
    let enc = encoding_spec(encoding);
    let samples: Vec<TrainSample> = rows
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            let label = r.pop().filter(|_| !r.is_empty()).ok_or_else(|| {
                Error::Validation(format!("row {} needs features and a label", i + 1))
            })?;
            Ok(TrainSample {
                input: TrainInput::Features {
                    features: r,
                    encoding: enc,
                },
                label: Some(label),
            })
        })
        .collect::<CliResult<_>>()?;
    let width = samples[0].input.to_state()?.n_qubits();

    let spec = if ansatz == "qcnn" {
        let (c, topo) = build_qcnn(width)?;
        CostSpec::new(c, vec![topo.readout_observable()], postproc.into())?
    } else {
        let c = circuit::deserialize(&read(Path::new(ansatz))?)?;
        let o = match obs {
            Some(s) => s.parse()?,
            None => Observable::single(PauliString::z(c.n_qubits(), 0)),
        };
        CostSpec::new(c, vec![o], postproc.into())?
    };

    let out = train(&spec, &samples, &cfg)?;
    write(trace, &out.trace_csv())?;
    let (loss, acc) = evaluate_dataset(&spec, &out.params, &samples)?;
    match acc {
        Some(a) => println!(
            "best epoch {}: loss {loss:.6}, accuracy {a:.4}",
            out.best_epoch
        ),
        None => println!("best epoch {}: loss {loss:.6}", out.best_epoch),
    }
    let params = serde_json::to_string(&out.params).expect("params serialize");
    match params_out {
        Some(p) => write(p, &params)?,
        None => println!("{params}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_encode_tokens(
    dict_path: &Path,
    strings: &[String],
    vocab: Option<&str>,
    cutoff: usize,
    optimize: usize,
    learning_rate: f64,
    seed: u64,
    dict_out: Option<&Path>,
) -> CliResult<()> {
    let config = QumodeConfig::new(cutoff)?;
    let mut dict = TokenDictionary::from_json(&read(dict_path)?)?;
    let vocab: Option<Vec<String>> = vocab.map(|v| parse_list(v, "token")).transpose()?;
    let corpus: Vec<Vec<String>> = strings
        .iter()
        .map(|s| {
            if s.trim().contains(char::is_whitespace) {
                Ok(tokenize_whitespace(s))
            } else {
                tokenize_smiles(s, vocab.as_deref())
            }
        })
        .collect::<CliResult<_>>()?;

    if optimize > 0 {
        let train = TrainConfig {
            learning_rate,
            epochs: optimize,
            seed,
            ..TrainConfig::default()
        };
        let (d, trace) = optimize_token_params_traced(&dict, &corpus, config, &train)?;
        println!(
            "optimized {optimize} steps: mean pairwise |overlap|^2 {:.6} -> {:.6}",
            trace[0],
            trace.last().expect("trace has the initial loss")
        );
        dict = d;
        if let Some(p) = dict_out {
            write(p, &dict.to_json())?;
        }
    }

    let states = corpus
        .iter()
        .map(|t| encode_tokens(t, &dict, config))
        .collect::<CliResult<Vec<_>>>()?;
    for (i, (tokens, s)) in corpus.iter().zip(&states).enumerate() {
        println!(
            "[{i}] {} | norm {:.12} | <n> {:.6}",
            tokens.join(" "),
            s.norm_sqr().sqrt(),
            s.mean_photon_number()
        );
    }
    if states.len() > 1 {
        println!("|overlap|^2:");
        for a in &states {
            let row: Vec<String> = states
                .iter()
                .map(|b| Ok(format!("{:.6}", state_overlap(a, b)?.norm_sqr())))
                .collect::<CliResult<_>>()?;
            println!("{}", row.join(" "));
        }
    }
    Ok(())
}

fn parse_range(text: &str) -> CliResult<std::ops::RangeInclusive<usize>> {
    let bad = || Error::Parse(format!("qubit range '{text}' is not of the form a..b"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(Error::Validation(format!("empty qubit range {a}..{b}")));
    }
    Ok(a..=b)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run {
            circuit,
            shots,
            seed,
            params,
        } => {
            let c = load_bound(&circuit, &params)?;
            let state = c.execute(&StateVector::zero(c.n_qubits())?)?;
            print!("{}", sample_shots(&state, shots, seed)?);
        }
        Command::Expect {
            circuit,
            obs,
            params,
        } => {
            let c = load_bound(&circuit, &params)?;
            let o: Observable = obs.parse()?;
            let state = c.execute(&StateVector::zero(c.n_qubits())?)?;
            println!("{}", o.expectation(&state)?);
        }
        Command::Encode {
            method,
            input,
            out,
            row,
            axis,
            lo,
            hi,
        } => cmd_encode(method, &input, &out, row, axis, lo, hi)?,
        Command::Train {
            config,
            data,
            trace,
            ansatz,
            encoding,
            obs,
            postproc,
            params_out,
        } => cmd_train(
            &config,
            &data,
            &trace,
            &ansatz,
            encoding,
            obs.as_deref(),
            postproc,
            params_out.as_deref(),
        )?,
        Command::EncodeTokens {
            dict,
            tokens,
            vocab,
            cutoff,
            optimize,
            learning_rate,
            seed,
            dict_out,
        } => cmd_encode_tokens(
            &dict,
            &tokens,
            vocab.as_deref(),
            cutoff,
            optimize,
            learning_rate,
            seed,
            dict_out.as_deref(),
        )?,
        Command::Bench {
            qubits,
            layers,
            jobs,
            workers,
            out,
            max_qubits,
            seed,
        } => {
            let config = BenchConfig {
                qubits: parse_range(&qubits)?,
                layers,
                jobs,
                workers: parse_list(&workers, "worker")?,
                max_qubits,
                seed,
            };
            let report = bench_scaling(&config)?;
            let csv = report.to_csv();
            write(&out, &csv)?;
            print!("{csv}");
        }
        Command::Fuse {
            circuit: path,
            max_qubits,
            out,
        } => {
            let c = circuit::deserialize(&read(&path)?)?;
            let fused = fuse(&c, &FusionCostModel::with_max_qubits(max_qubits))?;
            let mut stats = ExecutionStats::default();
            circuit::execute(
                &fused,
                &StateVector::zero(fused.n_qubits())?,
                Some(&mut stats),
            )?;
            write(&out, &circuit::serialize(&fused))?;
            println!(
                "{} ops -> {} ops ({} fused blocks)",
                c.len(),
                fused.len(),
                stats.fused_groups
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
