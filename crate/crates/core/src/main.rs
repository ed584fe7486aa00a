use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let (code, report) = maxcsp3::cli::run(&args);
    if !report.is_empty() {
        if code == 2 {
            eprintln!("{report}");
        } else {
            println!("{report}");
        }
    }
    ExitCode::from(code as u8)
}
