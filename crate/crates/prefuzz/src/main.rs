use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::init();
    match prefuzz::cli::run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
