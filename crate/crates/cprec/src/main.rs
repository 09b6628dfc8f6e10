fn main() {
    cprec::cli::main();
}
