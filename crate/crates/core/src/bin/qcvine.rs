use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qcvine::abstraction::abstract_diagram;
use qcvine::context::entanglement_history;
use qcvine::dsl::{compile_with, NodeKind, Params};
use qcvine::import::import_flat;
use qcvine::model::CircuitModel;
use qcvine::render::RenderTheme;
use qcvine::segment::{segment, FoldState};
use qcvine::service::{self, AppState};
use qcvine::view::{render_view, ViewKind, ViewOptions};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qcvine", version, about = "Semantic-aware quantum circuit diagrams")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a circuit program (or flat gate list) to model JSON.
    Compile {
        file: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Treat the input as a flat gate-list JSON.
        #[arg(long)]
        from_json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Render one view of a model as SVG, or its JSON payload with --json.
    Render {
        /// Model JSON, or a `.qv` program compiled on the fly.
        model: PathBuf,
        #[arg(long, value_enum)]
        view: View,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        fold: FoldArgs,
        #[arg(long)]
        qubit: Option<u32>,
        /// Scope the connectivity view to a tree node.
        #[arg(long)]
        node: Option<u32>,
        #[arg(long, default_value_t = 1)]
        threshold: u32,
        #[arg(long)]
        json: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summarize a model: size, loop patterns, layout and entanglement.
    Analyze {
        model: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        fold: FoldArgs,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service for the explorer UI.
    Serve {
        /// Program to load at startup.
        file: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
}

#[derive(Args)]
struct ParamArgs {
    /// Program parameter as name=int; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, i64)>,
}

impl ParamArgs {
    fn to_params(&self) -> Params {
        self.params.iter().cloned().collect()
    }
}

#[derive(Args)]
struct FoldArgs {
    /// Unfold every node shallower than this depth (root is depth 0).
    #[arg(long, conflicts_with = "unfold")]
    fold_depth: Option<usize>,
    /// Comma-separated node ids to unfold.
    #[arg(long, value_delimiter = ',')]
    unfold: Option<Vec<u32>>,
}

impl FoldArgs {
    fn options(&self) -> ViewOptions {
        ViewOptions {
            fold_depth: self.fold_depth,
            unfolded: self.unfold.clone(),
            ..ViewOptions::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum View {
    Component,
    Abstraction,
    Provenance,
    Placement,
    Connectivity,
}

impl From<View> for ViewKind {
    fn from(v: View) -> Self {
        match v {
            View::Component => ViewKind::Component,
            View::Abstraction => ViewKind::Abstraction,
            View::Provenance => ViewKind::Provenance,
            View::Placement => ViewKind::Placement,
            View::Connectivity => ViewKind::Connectivity,
        }
    }
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=int, got {s:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("not an integer: {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("{}", path.display()))
}

fn compile_file(path: &Path, params: &Params) -> anyhow::Result<CircuitModel> {
    let src = read(path)?;
    compile_with(&src, params).map_err(|e| anyhow!(e.diagnostic(&path.display().to_string())))
}

/// Model JSON, or a program when the file ends in `.qv`.
fn load_model(path: &Path, params: &Params) -> anyhow::Result<CircuitModel> {
    if path.extension().is_some_and(|e| e == "qv") {
        return compile_file(path, params);
    }
    let text = read(path)?;
    CircuitModel::from_json(&text).with_context(|| format!("{}: not a model file", path.display()))
}

fn write_out(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("{}", p.display())),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn analyze(model: &CircuitModel, fold: &FoldState, as_json: bool) -> anyhow::Result<String> {
    let diagram = segment(model, fold);
    let abs = abstract_diagram(&diagram, &model.tree);
    let loops: Vec<_> = model
        .tree
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Loop)
        .map(|n| json!({ "node": n.id, "label": n.label, "pattern": n.pattern }))
        .collect();
    let ent = entanglement_history(model);
    let report = json!({
        "qubits": model.qubit_count,
        "gates": model.gates.len(),
        "treeNodes": model.tree.nodes.len(),
        "loops": loops,
        "superGates": diagram.super_gates.len(),
        "superBits": diagram.super_bits.len(),
        "width": diagram.width,
        "abstraction": { "gates": abs.gates.len(), "width": abs.width, "rows": abs.rows.len() },
        "entanglementGroups": ent.last().groups,
    });
    if as_json {
        return Ok(report.to_string());
    }
    let mut out = format!(
        "qubits {}\ngates {}\ntree nodes {}\nlayout {} super-gates on {} wires, width {}\nabstraction {} gates, width {}\n",
        model.qubit_count,
        model.gates.len(),
        model.tree.nodes.len(),
        diagram.super_gates.len(),
        diagram.super_bits.len(),
        diagram.width,
        abs.gates.len(),
        abs.width,
    );
    for n in model.tree.nodes.iter().filter(|n| n.kind == NodeKind::Loop) {
        let p = n.pattern.as_ref().map_or("irregular".to_string(), |p| {
            format!("{} x{} (unit {})", p.direction, p.iterations, p.unit_size)
        });
        out.push_str(&format!("loop {} [{}]: {p}\n", n.label, n.id.0));
    }
    out.push_str(&format!("entanglement groups {}\n", ent.last().groups.len()));
    Ok(out)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::Compile {
            file,
            params,
            from_json,
            output,
        } => {
            let model = if from_json {
                import_flat(&read(&file)?).with_context(|| format!("{}", file.display()))?
            } else {
                compile_file(&file, &params.to_params())?
            };
            write_out(output.as_deref(), &model.to_json())
        }
        Cmd::Render {
            model,
            view,
            params,
            fold,
            qubit,
            node,
            threshold,
            json,
            output,
        } => {
            let m = load_model(&model, &params.to_params())?;
            let opts = ViewOptions {
                qubit,
                node,
                threshold,
                json,
                ..fold.options()
            };
            let theme = RenderTheme::from_env()?;
            let text = render_view(&m, view.into(), &opts, &theme)?;
            write_out(output.as_deref(), &text)
        }
        Cmd::Analyze {
            model,
            params,
            fold,
            json,
        } => {
            let m = load_model(&model, &params.to_params())?;
            let fold = fold.options().fold(&m)?;
            write_out(None, &analyze(&m, &fold, json)?)
        }
        Cmd::Serve {
            file,
            params,
            host,
            port,
        } => {
            let state = Arc::new(AppState::new(RenderTheme::from_env()?));
            if let Some(file) = file {
                let src = read(&file)?;
                let id = state
                    .load(&src, &params.to_params())
                    .map_err(|e| anyhow!(e.diagnostic(&file.display().to_string())))?;
                eprintln!("loaded {} as model {id}", file.display());
            }
            let addr = SocketAddr::new(host, port);
            eprintln!("listening on http://{addr}");
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::serve(addr, state))?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
