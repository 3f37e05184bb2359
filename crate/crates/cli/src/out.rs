//! Human and JSON output. Human text goes to stdout and diagnostics to
//! stderr; JSON mode prints a single object on stdout at the end.

use std::io::IsTerminal;
use std::process::ExitCode;

use cfc_core::lexer::Span;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Semantic = 1,
    Parse = 2,
    Invariant = 3,
}

pub struct Out {
    json: bool,
    color: bool,
    file: String,
    diagnostics: Vec<Value>,
    fields: Map<String, Value>,
}

fn color_enabled() -> bool {
    match std::env::var("CFC_COLOR").as_deref() {
        Ok("0") => false,
        Ok(_) => true,
        Err(_) => std::io::stderr().is_terminal(),
    }
}

impl Out {
    pub fn new(json: bool, file: &str) -> Out {
        Out { json, color: color_enabled(), file: file.to_string(), diagnostics: Vec::new(), fields: Map::new() }
    }

    pub fn set_file(&mut self, file: &str) {
        self.file = file.to_string();
    }

    pub fn json(&self) -> bool {
        self.json
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    /// Reports a problem located in the current file (or input string).
    pub fn error(&mut self, span: Option<Span>, code: &str, message: &str) {
        if self.json {
            let mut d = json!({ "code": code, "message": message, "file": self.file });
            if let Some(s) = span {
                d["line"] = json!(s.line);
                d["column"] = json!(s.col);
            }
            self.diagnostics.push(d);
        } else {
            let at = match span {
                Some(s) => format!("{}:{}:{}", self.file, s.line, s.col),
                None => self.file.clone(),
            };
            eprintln!("{at}: {}: {message}", self.paint("1;31", &format!("error[{code}]")));
        }
    }

    /// A line of human output; ignored in JSON mode.
    pub fn line(&self, text: impl AsRef<str>) {
        if !self.json {
            println!("{}", text.as_ref());
        }
    }

    pub fn ok_line(&self, text: &str) {
        if !self.json {
            println!("{}", self.paint("32", text));
        }
    }

    /// A field of the JSON object; ignored in human mode.
    pub fn field(&mut self, key: &str, value: Value) {
        if self.json {
            self.fields.insert(key.to_string(), value);
        }
    }

    pub fn finish(self, command: &str, exit: Exit) -> ExitCode {
        if self.json {
            let mut obj = Map::new();
            obj.insert("command".into(), json!(command));
            obj.insert("ok".into(), json!(exit == Exit::Ok));
            obj.insert("exit_code".into(), json!(exit as u8));
            obj.insert("diagnostics".into(), Value::Array(self.diagnostics));
            obj.extend(self.fields);
            println!("{}", serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize"));
        }
        ExitCode::from(exit as u8)
    }
}
