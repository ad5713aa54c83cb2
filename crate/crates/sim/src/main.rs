use std::fs;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clock_core::glyphs::Layout;
use clock_core::TimeOfDay;
use clocksim::{run_headless, ten_digit_screen, ButtonScript, Display, Firmware, Frame, SimConfig, SimError};

#[derive(Parser)]
#[command(name = "clocksim", version, about = "Bangla digit clock simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run headless for a fixed span of virtual time and print the final frame.
    Run(RunArgs),
    /// Serve the HTTP/WebSocket API and UI.
    Serve(ServeArgs),
    /// Print a one-shot snapshot of the clock face.
    Render(RenderArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// `native`, `basic` for the built-in BASIC firmware, or a .bas file.
    #[arg(long, default_value = "native")]
    firmware: String,
    /// Glyph asset file; the built-in asset when omitted.
    #[arg(long)]
    glyphs: Option<PathBuf>,
    #[arg(long, default_value = "hms")]
    layout: Layout,
    /// Virtual ms per wall ms. For `run`, 0 runs unpaced; for `serve`, 0 pauses time.
    #[arg(long)]
    speed: Option<f64>,
    /// Virtual ms per firmware scan.
    #[arg(long, default_value_t = 100)]
    scan_ms: u64,
    /// Keep counting seconds while a field is being adjusted (native only).
    #[arg(long)]
    keep_ticking: bool,
    /// Time shown at 0 ms.
    #[arg(long, default_value = "00:00:00")]
    start: TimeOfDay,
}

impl ConfigArgs {
    fn config(&self, default_speed: f64) -> SimConfig {
        let firmware = match self.firmware.as_str() {
            "native" => Firmware::Native,
            "basic" => Firmware::ShippedBasic,
            path => Firmware::BasicFile(path.into()),
        };
        SimConfig {
            firmware,
            glyph_asset: self.glyphs.clone(),
            layout: self.layout,
            speed: self.speed.unwrap_or(default_speed),
            freeze_while_adjusting: !self.keep_ticking,
            scan_ms: self.scan_ms,
            start_time: self.start,
            every_frame: false,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Button script; no presses when omitted.
    #[arg(long)]
    script: Option<PathBuf>,
    #[arg(long)]
    duration_ms: u64,
    /// Write one snapshot file per frame here.
    #[arg(long)]
    snapshot_dir: Option<PathBuf>,
    /// Snapshot every virtual millisecond instead of only on change.
    #[arg(long)]
    every_frame: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 8080)]
    port: u16,
    /// Directory of built UI assets to serve at /.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, default_value = "00:00:00", conflicts_with = "demo_digits")]
    time: TimeOfDay,
    #[arg(long)]
    glyphs: Option<PathBuf>,
    #[arg(long, default_value = "hms")]
    layout: Layout,
    /// Show all ten digit glyphs in a row instead of the clock face.
    #[arg(long)]
    demo_digits: bool,
}

fn run(args: RunArgs) -> Result<(), SimError> {
    let mut config = args.config.config(0.0);
    config.every_frame = args.every_frame;
    let script = match &args.script {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| SimError::Config(format!("cannot read script {}: {e}", path.display())))?;
            ButtonScript::parse(&text)?
        }
        None => ButtonScript::empty(),
    };
    let output = run_headless(&config, &script, args.duration_ms)?;
    if let Some(dir) = &args.snapshot_dir {
        fs::create_dir_all(dir)?;
        let write = |frame: &Frame| fs::write(dir.join(format!("{:09}.txt", frame.virtual_ms)), frame.snapshot());
        if args.every_frame {
            output.frames_every_ms().try_for_each(|f| write(&f))?;
        } else {
            output.frames.iter().try_for_each(write)?;
        }
    }
    print!("{}", output.final_frame.snapshot());
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), SimError> {
    let config = args.config.config(1.0);
    config.validate()?;
    let addr = SocketAddr::from((Ipv4Addr::UNSPECIFIED, args.port));
    let runtime = tokio::runtime::Runtime::new()?;
    eprintln!("clocksim listening on http://{addr}");
    runtime.block_on(clocksim::service::serve(config, addr, args.ui_dir))
}

fn render(args: RenderArgs) -> Result<(), SimError> {
    let config = SimConfig {
        glyph_asset: args.glyphs,
        layout: args.layout,
        start_time: args.time,
        ..SimConfig::default()
    };
    let glyphs = config.load_glyphs()?;
    if args.demo_digits {
        print!("{}", ten_digit_screen(&glyphs));
        return Ok(());
    }
    let mut display = Display::new(glyphs, config.layout);
    display.show(args.time).map_err(clocksim::FirmwareError::from)?;
    print!("{}", Frame::capture(0, args.time, Default::default(), &display).snapshot());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Serve(args) => serve(args),
        Command::Render(args) => render(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clocksim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
