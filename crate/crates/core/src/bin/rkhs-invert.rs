use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("RKHS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: RKHS_THREADS ignored: {e}");
        }
    }
    let code = rkhs_invert::cli::run_from(std::env::args_os());
    ExitCode::from(u8::try_from(code).unwrap_or(2))
}
