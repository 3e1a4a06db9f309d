//! Plain-text run reports with `== section ==` markers and SHA-256 input
//! digests. Output depends only on the inputs and the command line.

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    command: String,
    inputs: Vec<(String, String)>,
    sections: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn input(&mut self, name: impl Into<String>, content: &[u8]) -> &mut Self {
        self.inputs.push((name.into(), sha256_hex(content)));
        self
    }

    pub fn section(&mut self, title: impl Into<String>, body: impl Into<String>) -> &mut Self {
        self.sections.push((title.into(), body.into()));
        self
    }

    pub fn render(&self) -> String {
        let mut out = format!("== command ==\n{}\n", self.command);
        if !self.inputs.is_empty() {
            out.push_str("== inputs ==\n");
            for (name, digest) in &self.inputs {
                out.push_str(&format!("{name} sha256:{digest}\n"));
            }
        }
        for (title, body) in &self.sections {
            out.push_str(&format!("== {title} ==\n"));
            out.push_str(body);
            if !body.ends_with('\n') {
                out.push('\n');
            }
        }
        out.push_str("== end ==\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn sections_in_order() {
        let mut r = RunReport::new("multisect pi1 x.msd");
        r.input("x.msd", b"abc").section("pi1", "< g1 | g1 g1 >");
        let text = r.render();
        let markers: Vec<&str> = text.lines().filter(|l| l.starts_with("== ")).collect();
        assert_eq!(markers, vec!["== command ==", "== inputs ==", "== pi1 ==", "== end =="]);
    }
}
