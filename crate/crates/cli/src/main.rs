use clap::Parser;
use levykit_cli::{error_kind, exit_code, run, Cli, EXIT_CHECK_FAILED, EXIT_OK};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(env) => {
            if cli.json {
                println!("{}", env.to_json());
            } else {
                print!("{}", env.to_text());
            }
            if env.all_passed() {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(err) => {
            let code = exit_code(&err);
            if cli.json {
                let reason = serde_json::json!({
                    "error": error_kind(&err),
                    "message": format!("{err:#}"),
                    "exit_code": code,
                });
                eprintln!("{reason}");
            } else {
                eprintln!("error[{}]: {err:#}", error_kind(&err));
            }
            code
        }
    };
    std::process::exit(code);
}
