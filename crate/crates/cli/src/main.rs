use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use archemap::ModelVariant;
use archemap_cli::{
    cmd_convert, cmd_report, cmd_validate, CliConfig, InputFormat, OutputFormat, EXIT_ERROR,
    EXIT_OK,
};
use clap::{Args, Parser, Subcommand};

/// Crosswalk EAD finding aids and ArchivesSpace bundles to Schema.org
/// linked data.
#[derive(Debug, Parser)]
#[command(name = "archemap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write one linked-data document per input.
    Convert {
        #[command(flatten)]
        conversion: ConversionArgs,
        /// Output serialization.
        #[arg(long, default_value = "jsonld")]
        format: OutputFormat,
        /// Directory for output documents (default: beside each input).
        #[arg(long = "out", value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Exit 2 when any source element has no known mapping.
        #[arg(long)]
        strict: bool,
    },
    /// Check JSON-LD documents against the profile vocabulary.
    Validate {
        #[command(flatten)]
        profile: ProfileArgs,
        /// JSON-LD documents.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Print the aggregated gap report without writing documents.
    Report {
        #[command(flatten)]
        conversion: ConversionArgs,
    },
}

#[derive(Debug, Args)]
struct ProfileArgs {
    /// Model variant for archive typing.
    #[arg(long, default_value = "alternative")]
    variant: ModelVariant,
    /// Registry JSON file (falls back to ARCHEMAP_REGISTRY, then the shipped default).
    #[arg(long, value_name = "PATH")]
    registry: Option<PathBuf>,
    /// Namespace for the pending archive terms, e.g. http://pending.schema.org/
    #[arg(long, value_name = "IRI")]
    pending_namespace: Option<String>,
}

#[derive(Debug, Args)]
struct ConversionArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    /// Absolute IRI prefix; each document is identified as BASE/<file stem>.
    #[arg(long, value_name = "IRI")]
    base_uri: String,
    /// Input format; auto treats .xml files as EAD and directories as ArchivesSpace bundles.
    #[arg(long, default_value = "auto")]
    input_format: InputFormat,
    /// Also write the aggregated report as JSON.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// EAD files or ArchivesSpace bundle directories.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

impl ProfileArgs {
    fn apply(self, config: &mut CliConfig) {
        config.variant = self.variant;
        config.registry_path = self.registry;
        config.pending_namespace = self.pending_namespace;
    }
}

impl ConversionArgs {
    fn into_config(self) -> (CliConfig, Vec<PathBuf>) {
        let mut config = CliConfig {
            base_uri: self.base_uri,
            input_format: self.input_format,
            report_path: self.report,
            ..Default::default()
        };
        self.profile.apply(&mut config);
        (config, self.inputs)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (stdout, stderr) = (io::stdout(), io::stderr());
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let code = match cli.command {
        Command::Convert {
            conversion,
            format,
            out_dir,
            strict,
        } => {
            let (mut config, inputs) = conversion.into_config();
            config.output_format = format;
            config.out_dir = out_dir;
            config.strict = strict;
            cmd_convert(&config, &inputs, &mut out, &mut err)
        }
        Command::Validate { profile, inputs } => {
            let mut config = CliConfig::default();
            profile.apply(&mut config);
            cmd_validate(&config, &inputs, &mut out, &mut err)
        }
        Command::Report { conversion } => {
            let (config, inputs) = conversion.into_config();
            cmd_report(&config, &inputs, &mut out, &mut err)
        }
    };
    ExitCode::from(code as u8)
}
