fn main() {
    let seed = std::env::var("ORTHOFORGE_SEED_ORDER").ok();
    let code = orthoforge::app::run(
        std::env::args_os(),
        seed.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
