use clap::Parser;

fn main() {
    let cli = gamow::Cli::parse();
    match gamow::run(&cli) {
        Ok(()) => {}
        // Downstream closed early (`gamow ... | head`): not an error.
        Err(gamow::CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        Err(e) => {
            eprintln!("gamow: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
