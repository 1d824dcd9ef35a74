//! `report`: bundle the pipeline's CSV outputs into one Markdown file.

use std::fs;
use std::path::PathBuf;

use crate::config::RunConfig;
use crate::io::Staged;
use crate::CliError;

const SECTIONS: [(&str, &str); 7] = [
    ("eligibility.csv", "Eligibility"),
    ("clusters.csv", "Country clusters"),
    ("scores.csv", "Scores"),
    ("correlations.csv", "Metric correlations"),
    ("distance_correlations.csv", "Metric-distance correlations"),
    ("regressions.csv", "Regressions"),
    ("mediation.csv", "Mediation"),
];

fn markdown_table(csv_text: &str) -> Result<String, csv::Error> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(csv_text.as_bytes());
    let mut out = String::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cells: Vec<String> = rec.iter().map(|c| c.replace('|', "\\|")).collect();
        out.push_str(&format!("| {} |\n", cells.join(" | ")));
        if i == 0 {
            out.push_str(&format!("|{}\n", "---|".repeat(cells.len())));
        }
    }
    Ok(out)
}

/// Writes `report.md` in the output directory; returns its path. Missing
/// inputs are noted rather than treated as errors.
pub fn cmd_report(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let out = cfg.output_dir();
    let mut md = String::from("# cultnov report\n");
    let mut found = 0;
    for (file, title) in SECTIONS {
        let path = if file == "scores.csv" { cfg.scores_path() } else { out.join(file) };
        md.push_str(&format!("\n## {title}\n\n"));
        match fs::read_to_string(&path) {
            Ok(text) => {
                md.push_str(&markdown_table(&text).map_err(|e| CliError::input(&path, e))?);
                found += 1;
            }
            Err(_) => md.push_str(&format!("_`{file}` not found._\n")),
        }
    }
    if found == 0 {
        return Err(CliError::input(&out, "no pipeline outputs to report on"));
    }
    let path = out.join("report.md");
    let mut staged = Staged::default();
    staged.add(path.clone(), md.into_bytes());
    staged.commit()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_has_separator() {
        let t = markdown_table("a,b\n1,x|y\n").unwrap();
        assert_eq!(t, "| a | b |\n|---|---|\n| 1 | x\\|y |\n");
    }
}
