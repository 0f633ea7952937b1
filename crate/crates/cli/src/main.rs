use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sartco_core::board_gen::{make_splits, write_jsonl, Split, SplitConfig};
use sartco_core::harness::run::load_records;
use sartco_core::harness::{ablate, run_tasks, MockMode, ModelConfig, RunManifest, Section, TurnMode};
use sartco_core::instructions::{build_describe_prompt, import_human, render_template, InstructionStyle};
use sartco_core::metrics::{aggregate, score};
use sartco_core::{describe_grid, render_ascii, TaskKind};

#[derive(Parser)]
#[command(name = "sartco", version, about = "Grid assembly code-generation benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample train/val/test boards and write them as JSONL.
    GenBoards {
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render template instructions, import human ones, or write the
    /// prompts used to ask a model for instructions.
    GenInstructions {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum, default_value_t = StyleArg::TemplateMulti)]
        style: StyleArg,
        #[arg(long, value_enum)]
        split: Option<SplitArg>,
        /// JSONL of {"record_id", "text"} lines to convert.
        #[arg(long, conflicts_with = "describe_prompts")]
        import_human: Option<PathBuf>,
        /// Emit {"record_id", "prompt"} lines instead of instructions.
        #[arg(long)]
        describe_prompts: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prompt a model for every record of a split and score the replies.
    Run(RunArgs),
    /// Repeat a run once per prompt structure.
    Ablate(RunArgs),
    /// Score existing predictions: JSONL of {"record_id", "code"} lines.
    Score {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long, default_value = "external")]
        model: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a record's board and gold programs.
    Render {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        id: String,
        /// Print the instruction-writing prompt instead.
        #[arg(long)]
        describe: bool,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = TaskArg::All)]
    task: TaskArg,
    /// Defaults to test for `run` and val for `ablate`.
    #[arg(long, value_enum)]
    split: Option<SplitArg>,
    #[arg(long, default_value_t = 5)]
    k_examples: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, env = "SARTCO_ENDPOINT", default_value = "http://localhost:8000/v1/chat/completions")]
    endpoint: String,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    #[arg(long, default_value_t = 250)]
    max_tokens: u32,
    #[arg(long, value_enum)]
    mock: Option<MockArg>,
    /// Reply used by `--mock fixed_text`.
    #[arg(long, default_value = "hello")]
    mock_text: String,
    #[arg(long, env = "SARTCO_API_KEY", hide_env_values = true)]
    api_key: Option<String>,
    /// Pre-rendered instruction sets; templates are used when omitted.
    #[arg(long)]
    instructions: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StyleArg::TemplateMulti)]
    style: StyleArg,
    #[arg(long, value_enum, default_value_t = TurnsArg::Joined)]
    turns: TurnsArg,
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    max_requests: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    All,
    #[value(name = "property_comp")]
    PropertyComp,
    #[value(name = "func_comp_sequences")]
    FuncCompSequences,
    #[value(name = "func_comp_optimal")]
    FuncCompOptimal,
    #[value(name = "func_repeat")]
    FuncRepeat,
}

impl TaskArg {
    fn tasks(self) -> Vec<TaskKind> {
        match self {
            TaskArg::All => TaskKind::ALL.to_vec(),
            TaskArg::PropertyComp => vec![TaskKind::PropertyComp],
            TaskArg::FuncCompSequences => vec![TaskKind::FuncCompSequences],
            TaskArg::FuncCompOptimal => vec![TaskKind::FuncCompOptimal],
            TaskArg::FuncRepeat => vec![TaskKind::FuncRepeat],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Val,
    Test,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Split {
        match s {
            SplitArg::Train => Split::Train,
            SplitArg::Val => Split::Val,
            SplitArg::Test => Split::Test,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MockArg {
    #[value(name = "echo_gold")]
    EchoGold,
    #[value(name = "fixed_text")]
    FixedText,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    #[value(name = "template_single")]
    TemplateSingle,
    #[value(name = "template_multi")]
    TemplateMulti,
    #[value(name = "model_generated")]
    ModelGenerated,
    #[value(name = "human_written")]
    HumanWritten,
}

impl From<StyleArg> for InstructionStyle {
    fn from(s: StyleArg) -> InstructionStyle {
        match s {
            StyleArg::TemplateSingle => InstructionStyle::TemplateSingle,
            StyleArg::TemplateMulti => InstructionStyle::TemplateMulti,
            StyleArg::ModelGenerated => InstructionStyle::ModelGenerated,
            StyleArg::HumanWritten => InstructionStyle::HumanWritten,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TurnsArg {
    Joined,
    Separate,
}

fn manifest(args: &RunArgs, default_split: Split) -> RunManifest {
    let mock = match args.mock {
        None => MockMode::Off,
        Some(MockArg::EchoGold) => MockMode::EchoGold,
        Some(MockArg::FixedText) => MockMode::FixedText(args.mock_text.clone()),
    };
    let model_name = args.model.clone().unwrap_or_else(|| match args.mock {
        Some(MockArg::EchoGold) => "mock-echo-gold".into(),
        Some(MockArg::FixedText) => "mock-fixed-text".into(),
        None => "default".into(),
    });
    let model = ModelConfig {
        endpoint: args.endpoint.clone(),
        model: model_name,
        temperature: args.temperature,
        max_new_tokens: args.max_tokens,
        request_budget: args.max_requests,
        mock,
        api_key: args.api_key.clone(),
        ..ModelConfig::default()
    };
    let tasks = args.task.tasks();
    RunManifest {
        instructions: args.instructions.clone(),
        style: args.style.into(),
        turn_mode: match args.turns {
            TurnsArg::Joined => TurnMode::Joined,
            TurnsArg::Separate => TurnMode::Separate,
        },
        split: args.split.map_or(default_split, Split::from),
        k_examples: args.k_examples,
        rng_seed: args.rng_seed,
        sections: Section::ORDER.to_vec(),
        concurrency: args.concurrency,
        limit: args.limit,
        output_dir: args.out.clone(),
        ..RunManifest::new(&args.dataset, tasks[0], model)
    }
}

fn writer(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json_lines<T: serde::Serialize>(path: &PathBuf, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = writer(path)?;
    for item in items {
        serde_json::to_writer(&mut w, &item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(serde::Deserialize)]
struct Prediction {
    record_id: String,
    code: String,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::GenBoards { rng_seed, out } => {
            let set = make_splits(&SplitConfig { rng_seed, ..SplitConfig::default() })?;
            write_jsonl(&set.records, writer(&out)?)?;
            eprintln!("wrote {} records to {}", set.records.len(), out.display());
        }
        Command::GenInstructions { dataset, style, split, import_human: human, describe_prompts, out } => {
            if let Some(path) = human {
                let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                let sets = import_human(BufReader::new(file))?;
                eprintln!("imported {} instruction sets", sets.len());
                return write_json_lines(&out, sets);
            }
            let records = load_records(&dataset)?;
            let records = records.iter().filter(|r| split.is_none_or(|s| r.split == Split::from(s)));
            if describe_prompts {
                let lines: Vec<serde_json::Value> = records
                    .map(|r| serde_json::json!({"record_id": r.id, "prompt": build_describe_prompt(r)}))
                    .collect();
                return write_json_lines(&out, lines);
            }
            let sets = records.map(|r| render_template(r, style.into())).collect::<Result<Vec<_>, _>>()?;
            write_json_lines(&out, sets)?;
        }
        Command::Run(args) => {
            let m = manifest(&args, Split::Test);
            let result = run_tasks(&m, &args.task.tasks())?;
            print!("{}", result.report.to_text());
        }
        Command::Ablate(args) => {
            let tasks = args.task.tasks();
            if tasks.len() != 1 {
                bail!("ablate needs a single --task");
            }
            let table = ablate(&manifest(&args, Split::Val))?;
            print!("{}", table.to_text());
        }
        Command::Score { dataset, task, predictions, model, out } => {
            let tasks = task.tasks();
            if tasks.len() != 1 {
                bail!("score needs a single --task");
            }
            let records = load_records(&dataset)?;
            let file = File::open(&predictions).with_context(|| format!("opening {}", predictions.display()))?;
            let mut outcomes = Vec::new();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let p: Prediction =
                    serde_json::from_str(&line).with_context(|| format!("prediction line {}", i + 1))?;
                let record = records
                    .iter()
                    .find(|r| r.id == p.record_id)
                    .with_context(|| format!("unknown record {}", p.record_id))?;
                outcomes.push(score(record, tasks[0], &model, &p.code));
            }
            let report = aggregate(&outcomes)?;
            if let Some(path) = out {
                write_json_lines(&path, &outcomes)?;
            }
            print!("{}", report.to_text());
        }
        Command::Render { dataset, id, describe } => {
            let records = load_records(&dataset)?;
            let record = records.iter().find(|r| r.id == id).with_context(|| format!("unknown record {id}"))?;
            if describe {
                print!("{}", build_describe_prompt(record));
            } else {
                println!("{}\n\n{}\n", render_ascii(&record.target), describe_grid(&record.target));
                println!("# first order\n{}\n", record.gold.first_order);
                println!("# higher order\n{}\n", record.gold.higher_order);
                println!("# optimal\n{}", record.gold.optimal);
            }
        }
    }
    Ok(())
}
