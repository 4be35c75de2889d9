fn main() {
    folner_lab::cli::main()
}
