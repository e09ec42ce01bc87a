use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = nilsplit::cli::run(std::env::args_os());
    let mut out: Box<dyn Write> = if result.exit_code == 0 {
        Box::new(std::io::stdout().lock())
    } else {
        Box::new(std::io::stderr().lock())
    };
    let _ = out.write_all(result.payload.as_bytes());
    let _ = out.flush();
    ExitCode::from(result.exit_code as u8)
}
