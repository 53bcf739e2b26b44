use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Files written together: every part goes to a temporary sibling first and is
/// renamed into place only after all parts were written.
#[derive(Debug, Default)]
pub struct Outputs {
    parts: Vec<(Option<PathBuf>, String)>,
}

impl Outputs {
    /// `None` means standard output.
    pub fn add(&mut self, path: Option<&Path>, contents: String) {
        self.parts.push((path.map(Path::to_path_buf), contents));
    }

    pub fn commit(self) -> io::Result<()> {
        let mut staged = Vec::new();
        let mut stdout = Vec::new();
        for (path, contents) in self.parts {
            match path {
                Some(p) => {
                    let tmp = temp_sibling(&p);
                    if let Err(e) = write_synced(&tmp, contents.as_bytes()) {
                        let _ = fs::remove_file(&tmp);
                        for (t, _) in &staged {
                            let _ = fs::remove_file(t);
                        }
                        return Err(e);
                    }
                    staged.push((tmp, p));
                }
                None => stdout.push(contents),
            }
        }
        for (tmp, p) in staged {
            fs::rename(&tmp, &p)?;
        }
        let mut out = io::stdout().lock();
        for s in stdout {
            out.write_all(s.as_bytes())?;
        }
        out.flush()
    }
}

fn temp_sibling(p: &Path) -> PathBuf {
    let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    p.with_file_name(format!(".{name}.{}.tmp", std::process::id()))
}

fn write_synced(p: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut f = fs::File::create(p)?;
    f.write_all(bytes)?;
    f.sync_all()
}
