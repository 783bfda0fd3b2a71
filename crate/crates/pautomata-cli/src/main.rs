//! Command-line surface: build carry automata, verify relations, compute
//! Sylow tree embeddings, minimize alphabets, act on words, compare
//! automaton states, export DOT, and run the full pipeline.
//!
//! Exit codes: 0 success, 1 verification failure, 2 malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pautomata::error::Error;
use pautomata::{jsonio, AffineAutomaton, PipelineSpec, PointedAutomaton};

#[derive(Parser)]
#[command(
    name = "pautomata",
    about = "Finite p-automata for ascending HNN extensions of free abelian groups",
    version
)]
struct Cli {
    /// Seed for randomized checks (reproducibility); echoed into reports.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the carry automaton of a matrix over base n.
    BuildAm {
        /// JSON matrix file: {"rows": [[...], ...]}.
        #[arg(long)]
        matrix: PathBuf,
        /// Base (alphabet digit range), at least 2.
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Verify the HNN presentation relations of an emitted carry automaton.
    VerifyRelations {
        /// Automaton file produced by build-am (carries matrix metadata).
        am_file: PathBuf,
    },
    /// Embed the group generated by permutations into the p-regular tree.
    SylowEmbed {
        /// JSON file: {"generators": [{"images": [...]}, ...]}.
        #[arg(long)]
        gens: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Closure cap.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Re-express an automaton over the embedding's small alphabet.
    MinimizeAlphabet {
        am_file: PathBuf,
        /// Tree-embedding JSON file ({"p":, "k":, "pi": [[point, "word"], ...]}).
        #[arg(long)]
        embedding: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the whole construction from a spec file.
    Pipeline {
        #[arg(long)]
        spec: PathBuf,
        /// Output directory (defaults to the spec's "out_dir", then "pipeline-out").
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply an automaton state to a word.
    Act {
        file: PathBuf,
        /// State id, e.g. "0,0" or "-1,0" (defaults to the file's start state).
        #[arg(long, allow_hyphen_values = true)]
        state: Option<String>,
        /// Input word: letters separated by spaces or semicolons,
        /// e.g. "1,0 0,1" or "0;1;1".
        #[arg(long)]
        word: String,
    },
    /// Decide exact equality of two automaton states: file#state file#state.
    Equal { left: String, right: String },
    /// Export an automaton to DOT.
    ExportDot {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            if err.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::BuildAm { matrix, n, output } => {
            let m = jsonio::read_matrix(&matrix)?;
            let am = AffineAutomaton::build(m.clone(), n)?;
            jsonio::write_automaton(
                &output,
                am.automaton(),
                Some(am.zero_state()),
                Some(&m),
                Some(n),
            )?;
            println!(
                "built automaton: {} states, {} letters -> {}",
                am.state_count(),
                am.automaton().alphabet(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyRelations { am_file } => {
            let am = load_affine(&am_file)?;
            let report = pautomata::verify_hnn_relations(&am)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::SylowEmbed {
            gens,
            p,
            output,
            cap,
        } => {
            let generators = jsonio::read_generators(&gens)?;
            let embedding = pautomata::sylow_tree_embedding(&generators, p, cap)?;
            jsonio::write_embedding(&output, &embedding)?;
            println!(
                "embedded {} points into the {}-regular tree of depth {} -> {}",
                embedding.len(),
                p,
                embedding.k(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::MinimizeAlphabet {
            am_file,
            embedding,
            output,
        } => {
            let file = jsonio::read_automaton(&am_file)?;
            let tree = jsonio::read_embedding(&embedding)?;
            let emb = pautomata::embedding_from_tree(&tree, &file.automaton)?;
            let minimized = pautomata::build_b(&file.automaton, &emb)?;
            let start = file.start.map(|q| minimized.section_state(q));
            jsonio::write_automaton(&output, minimized.automaton(), start, None, None)?;
            println!(
                "minimized alphabet to {} letters: {} states -> {}",
                emb.y(),
                minimized.state_count(),
                output.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Pipeline { spec, output } => {
            let mut spec = PipelineSpec::from_file(&spec)?;
            if let Some(seed) = cli.seed {
                spec.seed = seed;
            }
            let out_dir = output
                .or_else(|| spec.out_dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("pipeline-out"));
            let out = pautomata::run_pipeline(&spec, &out_dir)?;
            println!(
                "pipeline succeeded: {} states over {} letters, minimized to {} states over {} letters",
                out.report.states,
                out.automaton.automaton().alphabet(),
                out.report.b_states,
                spec.p
            );
            println!("report: {}", out_dir.join("report.json").display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Act { file, state, word } => {
            let loaded = jsonio::read_automaton(&file)?;
            let start = resolve_state(&loaded, state.as_deref())?;
            let letters = parse_word(&loaded.automaton, &word)?;
            let out = loaded.automaton.act_from(start, &letters)?;
            let names: Vec<&str> = out
                .iter()
                .map(|&y| loaded.automaton.letters()[y].as_str())
                .collect();
            println!("{}", names.join(" "));
            Ok(ExitCode::SUCCESS)
        }
        Command::Equal { left, right } => {
            let a = load_pointed(&left)?;
            let b = load_pointed(&right)?;
            if a.equal(&b)? {
                println!("equal");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("not equal");
                Ok(ExitCode::from(1))
            }
        }
        Command::ExportDot { file, output } => {
            let loaded = jsonio::read_automaton(&file)?;
            std::fs::write(
                &output,
                pautomata::dot::automaton_dot(&loaded.automaton, loaded.start),
            )?;
            println!("wrote {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_affine(path: &Path) -> Result<AffineAutomaton, Error> {
    let file = jsonio::read_automaton(path)?;
    let matrix = file.matrix.ok_or_else(|| {
        Error::InvalidFile("automaton file carries no matrix metadata; run build-am".into())
    })?;
    let n = file
        .n
        .ok_or_else(|| Error::InvalidFile("automaton file carries no base metadata".into()))?;
    let rebuilt = AffineAutomaton::build(matrix, n)?;
    // Cross-check the stored tables against the rebuilt automaton, so a
    // verification verdict always refers to the file's contents.
    let stored = &file.automaton;
    if stored.state_count() != rebuilt.state_count()
        || stored.alphabet() != rebuilt.automaton().alphabet()
    {
        return Err(Error::InvalidFile(
            "stored automaton does not match its matrix".into(),
        ));
    }
    for q in 0..stored.state_count() {
        let qr = rebuilt
            .automaton()
            .state_index(stored.state_id(q))
            .ok_or_else(|| {
                Error::InvalidFile(format!("unexpected state {}", stored.state_id(q)))
            })?;
        for x in 0..stored.alphabet() {
            let same_out = stored.out(q, x) == rebuilt.automaton().out(qr, x);
            let same_next = stored.state_id(stored.next(q, x))
                == rebuilt.automaton().state_id(rebuilt.automaton().next(qr, x));
            if !same_out || !same_next {
                return Err(Error::InvalidFile(format!(
                    "stored transitions differ from the matrix construction at state {}",
                    stored.state_id(q)
                )));
            }
        }
    }
    Ok(rebuilt)
}

fn resolve_state(file: &jsonio::AutomatonFile, state: Option<&str>) -> Result<usize, Error> {
    match state {
        Some(id) => file
            .automaton
            .state_index(id)
            .ok_or_else(|| Error::UnknownState { id: id.to_string() }),
        None => file
            .start
            .ok_or_else(|| Error::InvalidInput("no --state given and file has no start".into())),
    }
}

fn parse_word(automaton: &pautomata::PermAutomaton, word: &str) -> Result<Vec<usize>, Error> {
    word.split(|c: char| c.is_whitespace() || c == ';')
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            automaton
                .letters()
                .iter()
                .position(|name| name == tok)
                .ok_or_else(|| Error::InvalidInput(format!("unknown letter {tok:?}")))
        })
        .collect()
}

fn load_pointed(spec: &str) -> Result<PointedAutomaton, Error> {
    let (path, state) = spec
        .rsplit_once('#')
        .ok_or_else(|| Error::InvalidInput(format!("expected file#state, got {spec:?}")))?;
    let file = jsonio::read_automaton(Path::new(path))?;
    let start = file
        .automaton
        .state_index(state)
        .ok_or_else(|| Error::UnknownState {
            id: state.to_string(),
        })?;
    Ok(file.automaton.pointed(start))
}
