use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};

use thurston_core::cover::CoverPresentation;
use thurston_core::format::{emit_presentation, parse_oracle_response};
use thurston_core::pipeline::{GeometrizationOracle, OracleAnswer};

/// Runs `sh -c <command>` per request: one presentation document on stdin,
/// one `token:<x>` or `unavailable` line on stdout.
pub struct SubprocessOracle {
    pub command: String,
}

impl SubprocessOracle {
    fn ask(&self, piece: &CoverPresentation) -> Result<OracleAnswer, String> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| e.to_string())?;
        let doc = emit_presentation(piece, &[]);
        child.stdin.take().ok_or("no stdin")?.write_all(doc.as_bytes()).map_err(|e| e.to_string())?;
        let mut line = String::new();
        BufReader::new(child.stdout.take().ok_or("no stdout")?).read_line(&mut line).map_err(|e| e.to_string())?;
        child.wait().map_err(|e| e.to_string())?;
        parse_oracle_response(&line)
    }
}

impl GeometrizationOracle for SubprocessOracle {
    fn fingerprint(&self, piece: &CoverPresentation) -> OracleAnswer {
        self.ask(piece).unwrap_or_else(|e| {
            eprintln!("oracle: {e}");
            OracleAnswer::Unavailable
        })
    }
}
