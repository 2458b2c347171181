//! Name-keyed registries of interchangeable strategies.
//!
//! Aggregators, colour ramps and the like implement [`Named`] and are
//! registered under that name. Front ends pick one at runtime from a
//! config value or command-line flag.

use crate::error::{Error, Result};

pub trait Named {
    /// Stable identifier used in config files and on the command line.
    fn name(&self) -> &'static str;
}

/// Ordered collection of boxed strategies looked up by name.
pub struct Registry<T: ?Sized + Named> {
    kind: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Registry<T> {
        Registry {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds a strategy, replacing any earlier one with the same name.
    pub fn register(&mut self, entry: Box<T>) -> &mut Self {
        let name = entry.name();
        match self.entries.iter().position(|e| e.name() == name) {
            Some(i) => self.entries[i] = entry,
            None => self.entries.push(entry),
        }
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello(&'static str);

    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
    }

    impl Greeter for Hello {
        fn greet(&self) -> String {
            self.0.to_string()
        }
    }

    #[test]
    fn lookup_and_replace() {
        let mut reg: Registry<dyn Greeter> = Registry::new("greeter");
        reg.register(Box::new(Hello("a")));
        assert_eq!(reg.get("hello").unwrap().greet(), "a");
        reg.register(Box::new(Hello("b")));
        assert_eq!(reg.len(), 1);
        assert_eq!(reg.get("hello").unwrap().greet(), "b");
    }

    #[test]
    fn unknown_name_lists_available() {
        let mut reg: Registry<dyn Greeter> = Registry::new("greeter");
        reg.register(Box::new(Hello("a")));
        let err = reg.get("bye").err().unwrap().to_string();
        assert!(err.contains("bye") && err.contains("hello"), "{err}");
    }
}
