use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Anything that can sit in a [`Registry`].
pub trait Named {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
}

/// Named strategies behind a common trait object, looked up at runtime.
pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: Vec::new(),
        }
    }

    pub fn register(&mut self, entry: Box<T>) -> Result<()> {
        if self.entries.iter().any(|e| e.name() == entry.name()) {
            return Err(Error::InvalidParameter(format!(
                "{} `{}` is already registered",
                self.kind,
                entry.name()
            )));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn with(mut self, entry: Box<T>) -> Self {
        self.register(entry).expect("duplicate registry entry");
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| {
                Error::UnknownEntry(format!(
                    "unknown {} `{name}` (known: {})",
                    self.kind,
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|e| e.as_ref())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl<T: ?Sized + Named> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.names())
            .finish()
    }
}

/// `key=value` parameters for a registry entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in items {
            let item = item.as_ref();
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("parameter `{item}` is not key=value")))?;
            if map
                .insert(k.trim().to_string(), v.trim().to_string())
                .is_some()
            {
                return Err(Error::Parse(format!("parameter `{k}` given twice")));
            }
        }
        Ok(Params(map))
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.into(), value.to_string());
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Fails on keys outside `allowed`.
    pub fn restrict(&self, allowed: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParameter(format!(
                "unknown parameter `{k}` (allowed: {})",
                if allowed.is_empty() {
                    "none".to_string()
                } else {
                    allowed.join(", ")
                }
            ))),
            None => Ok(()),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Parse(format!("cannot parse parameter {key}={v}")))
            })
            .transpose()
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("cannot parse `{s}` in {key}={v}")))
                    })
                    .collect()
            })
            .transpose()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dummy(&'static str);

    impl Named for Dummy {
        fn name(&self) -> &'static str {
            self.0
        }
        fn summary(&self) -> &'static str {
            "dummy"
        }
    }

    #[test]
    fn lookup_and_duplicates() {
        let mut r: Registry<Dummy> = Registry::new("thing");
        r.register(Box::new(Dummy("a"))).unwrap();
        r.register(Box::new(Dummy("b"))).unwrap();
        assert!(r.register(Box::new(Dummy("a"))).is_err());
        assert_eq!(r.get("b").unwrap().name(), "b");
        assert!(matches!(r.get("c"), Err(Error::UnknownEntry(_))));
        assert_eq!(r.names(), vec!["a", "b"]);
    }

    #[test]
    fn params_parse_and_restrict() {
        let p = Params::parse(&["lambda=0.5", "blocks=1,2"]).unwrap();
        assert_eq!(p.get::<f64>("lambda").unwrap(), Some(0.5));
        assert_eq!(p.list::<usize>("blocks").unwrap(), Some(vec![1, 2]));
        assert_eq!(p.get::<f64>("missing").unwrap(), None);
        assert!(p.restrict(&["lambda"]).is_err());
        assert!(p.restrict(&["lambda", "blocks"]).is_ok());
        assert!(Params::parse(&["oops"]).is_err());
        assert!(Params::parse(&["a=1", "a=2"]).is_err());
        assert!(p.get::<usize>("lambda").is_err());
    }
}
