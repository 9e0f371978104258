fn main() {
    println!("murmurlab: subcommands arrive in later commits");
}
