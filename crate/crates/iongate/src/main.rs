// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(iongate::cli::main_with(std::env::args_os()));
}
