//! Partitions of a finite set into ordered chains of length at least 2.

use std::collections::HashSet;
use std::fmt::Display;
use std::hash::Hash;

use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPartition<T> {
    universe: Vec<T>,
    chains: Vec<Vec<T>>,
}

impl<T: Clone + Eq + Hash> ChainPartition<T> {
    /// Unchecked; see [`ChainPartition::validate`].
    pub fn new(universe: Vec<T>, chains: Vec<Vec<T>>) -> Self {
        ChainPartition { universe, chains }
    }

    pub fn universe(&self) -> &[T] {
        &self.universe
    }

    pub fn chains(&self) -> &[Vec<T>] {
        &self.chains
    }

    pub fn into_chains(self) -> Vec<Vec<T>> {
        self.chains
    }

    /// Checks that the chains are disjoint, cover the universe exactly, have
    /// length at least 2, and that `step(a, b)` holds for consecutive members.
    pub fn validate<F>(&self, step: F) -> std::result::Result<(), String>
    where
        F: Fn(&T, &T) -> bool,
        T: Display,
    {
        let universe: HashSet<&T> = self.universe.iter().collect();
        if universe.len() != self.universe.len() {
            return Err("universe has repeated elements".into());
        }
        let mut seen = HashSet::new();
        for (n, chain) in self.chains.iter().enumerate() {
            if chain.len() < 2 {
                return Err(format!("chain {n} has length {}", chain.len()));
            }
            for x in chain {
                if !universe.contains(x) {
                    return Err(format!("chain {n} contains {x}, which is outside the universe"));
                }
                if !seen.insert(x) {
                    return Err(format!("{x} appears in more than one place"));
                }
            }
            for w in chain.windows(2) {
                if !step(&w[0], &w[1]) {
                    return Err(format!("chain {n}: {} -> {} is not a valid step", w[0], w[1]));
                }
            }
        }
        if seen.len() != universe.len() {
            let missing = self.universe.iter().find(|x| !seen.contains(x)).unwrap();
            return Err(format!("{missing} is not covered"));
        }
        Ok(())
    }
}

impl<T: Display> Serialize for ChainPartition<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let chains: Vec<Vec<String>> = self
            .chains
            .iter()
            .map(|c| c.iter().map(ToString::to_string).collect())
            .collect();
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("size", &self.universe.len())?;
        m.serialize_entry("chains", &chains)?;
        m.end()
    }
}
