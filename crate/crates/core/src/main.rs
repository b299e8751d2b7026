use std::io;

fn main() {
    let code =
        gasket_solenoid::cli::dispatch(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
