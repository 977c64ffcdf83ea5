/// Text report plus a JSON value with the same content.
#[derive(Clone, Debug)]
pub struct Report {
    /// False when a verification failed; the command then exits with 2.
    pub ok: bool,
    pub text: String,
    pub json: serde_json::Value,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            ok: true,
            text: String::new(),
            json: serde_json::json!({ "command": command }),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    /// Records a failed verification.
    pub fn fail(&mut self, s: impl AsRef<str>) {
        self.ok = false;
        self.line(s);
    }
}
