fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("NFCBMS_LOG"))
        .format_timestamp(None)
        .init();
    std::process::exit(nfc_bms::cli::main_with_args(std::env::args_os()));
}
