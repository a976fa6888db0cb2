//! Content-addressed store of canonical forms, one `digest length bytes`
//! record per line (hex-encoded digest and bytes).

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::CanonicalForm;

#[derive(Debug, Clone, Default)]
pub struct FormCache {
    forms: Vec<CanonicalForm>,
    by_digest: HashMap<[u8; 16], Vec<usize>>,
}

impl FormCache {
    pub fn new() -> Self {
        FormCache::default()
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn contains(&self, form: &CanonicalForm) -> bool {
        self.by_digest
            .get(&form.digest())
            .is_some_and(|ids| ids.iter().any(|&i| self.forms[i].bytes() == form.bytes()))
    }

    /// Returns false if the form was already present.
    pub fn insert(&mut self, form: CanonicalForm) -> bool {
        if self.contains(&form) {
            return false;
        }
        self.by_digest.entry(form.digest()).or_default().push(self.forms.len());
        self.forms.push(form);
        true
    }

    pub fn forms(&self) -> &[CanonicalForm] {
        &self.forms
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cache = FormCache::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: &str| format!("cache line {}: {what}", lineno + 1);
            let mut parts = line.split_whitespace();
            // Empty forms have no bytes field.
            let (Some(digest), Some(len), bytes, None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("expected `digest length bytes`"));
            };
            let bytes = bytes.unwrap_or("");
            let len: usize = len.parse().map_err(|_| bad("bad length"))?;
            let bytes = hex::decode(bytes).map_err(|_| bad("bytes are not hex"))?;
            if bytes.len() != len {
                return Err(bad("length does not match bytes"));
            }
            let form = CanonicalForm::from_bytes(bytes);
            if form.digest_hex() != digest.to_ascii_lowercase() {
                return Err(bad("digest does not match bytes"));
            }
            cache.insert(form);
        }
        Ok(cache)
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        if !path.exists() {
            return Ok(FormCache::new());
        }
        FormCache::parse(&fs::read_to_string(path)?).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.forms {
            let line = format!("{} {} {}", f.digest_hex(), f.bytes().len(), hex::encode(f.bytes()));
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(self.to_text().as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_dedup() {
        let mut c = FormCache::new();
        assert!(c.insert(CanonicalForm::from_bytes(vec![1, 2, 3])));
        assert!(!c.insert(CanonicalForm::from_bytes(vec![1, 2, 3])));
        assert!(c.insert(CanonicalForm::from_bytes(vec![])));
        let again = FormCache::parse(&c.to_text()).unwrap();
        assert_eq!(again.forms(), c.forms());
    }

    #[test]
    fn corrupt_records_rejected() {
        let good = FormCache::parse(&{
            let mut c = FormCache::new();
            c.insert(CanonicalForm::from_bytes(vec![9; 4]));
            c.to_text()
        });
        assert!(good.is_ok());
        assert!(FormCache::parse("00 1 ff\n").unwrap_err().contains("digest"));
        assert!(FormCache::parse("zz\n").is_err());
    }
}
