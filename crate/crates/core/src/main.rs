use clap::Parser;

use algebroid::cli::{render_text, run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    if cli.opts.json {
        println!("{}", serde_json::to_string_pretty(&out.report).unwrap());
    } else {
        print!("{}", out.text.unwrap_or_else(|| render_text(&out.report)));
    }
    if let Some(notes) = out.report.get("notes").and_then(|n| n.as_array()) {
        for n in notes {
            eprintln!("warning: {}", n.as_str().unwrap_or_default());
        }
    }
    std::process::exit(out.code);
}
