fn main() {
    std::process::exit(torus_obs::cli::dispatch(std::env::args()));
}
