//! Standalone subject runner speaking the exit-code protocol: input on
//! stdin, verdict in the exit status (0 complete, 1 incomplete, 2
//! incorrect, 3 incorrect with the failure index as a decimal on the first
//! line of stderr).

use std::io::Read;
use std::process::ExitCode;

use prefuzz::feedback::ExitCodeProtocol;
use prefuzz::subjects;

// Outside the protocol's 0..=3 verdict range, so misuse decodes loudly.
const EX_USAGE: u8 = 64;

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let name = match (args.next(), args.next()) {
        (Some(name), None) => name,
        _ => {
            eprintln!("usage: prefuzz-subject <subject-name>  (input on stdin)");
            return ExitCode::from(EX_USAGE);
        }
    };
    let Some(subject) = subjects::find_subject(&name) else {
        eprintln!("unknown subject {name:?}");
        return ExitCode::from(EX_USAGE);
    };

    let mut input = Vec::new();
    if let Err(err) = std::io::stdin().read_to_end(&mut input) {
        eprintln!("failed to read stdin: {err}");
        return ExitCode::from(EX_USAGE);
    }

    let verdict = (subject.validate)(&input);
    let (status, index_line) = ExitCodeProtocol::encode(verdict);
    if let Some(line) = index_line {
        eprintln!("{line}");
    }
    ExitCode::from(status as u8)
}
