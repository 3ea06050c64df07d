fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ZC_EVOLVE_LOG", "warn")).init();
    std::process::exit(zc_evolve::cli::run(std::env::args_os()));
}
