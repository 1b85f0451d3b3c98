use std::io::Write as _;
use std::process::ExitCode;

fn main() -> ExitCode {
    let run = opb_cli::execute(std::env::args_os(), &mut |line| eprintln!("{line}"));
    print!("{}", run.stdout);
    eprint!("{}", run.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(run.code)
}
