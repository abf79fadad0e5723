use std::fmt;

use crate::error::{Error, Result};

/// Ordered tuple of distinct qubit variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VarTuple(Vec<String>);

impl VarTuple {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidVars(format!("duplicate variable `{n}`")));
            }
        }
        Ok(VarTuple(names))
    }

    /// Panicking constructor for literals in tests and builtins.
    pub fn of(names: &[&str]) -> Self {
        VarTuple::new(names.iter().copied()).expect("distinct variable names")
    }

    pub fn empty() -> Self {
        VarTuple(Vec::new())
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        1usize << self.0.len()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    pub fn is_subset_of(&self, other: &VarTuple) -> bool {
        self.0.iter().all(|n| other.contains(n))
    }

    pub fn is_disjoint(&self, other: &VarTuple) -> bool {
        self.0.iter().all(|n| !other.contains(n))
    }

    /// `self ++ other`, failing on overlap.
    pub fn concat(&self, other: &VarTuple) -> Result<VarTuple> {
        if let Some(shared) = self.0.iter().find(|n| other.contains(n)) {
            return Err(Error::Disjointness(shared.clone()));
        }
        let mut names = self.0.clone();
        names.extend(other.0.iter().cloned());
        Ok(VarTuple(names))
    }

    /// Variables of `self` that are not in `other`, in `self` order.
    pub fn minus(&self, other: &VarTuple) -> VarTuple {
        VarTuple(self.0.iter().filter(|n| !other.contains(n)).cloned().collect())
    }

    /// Order-preserving union: `self` followed by new names from `other`.
    pub fn union(&self, other: &VarTuple) -> VarTuple {
        let mut names = self.0.clone();
        for n in &other.0 {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        VarTuple(names)
    }
}

impl fmt::Display for VarTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        assert!(VarTuple::new(["q", "r", "q"]).is_err());
    }

    #[test]
    fn concat_overlap_is_an_error() {
        let a = VarTuple::of(&["q", "r"]);
        let b = VarTuple::of(&["r"]);
        assert!(matches!(a.concat(&b), Err(Error::Disjointness(v)) if v == "r"));
    }

    #[test]
    fn set_operations_keep_order() {
        let a = VarTuple::of(&["a", "b", "c"]);
        let b = VarTuple::of(&["c", "d"]);
        assert_eq!(a.minus(&b), VarTuple::of(&["a", "b"]));
        assert_eq!(a.union(&b), VarTuple::of(&["a", "b", "c", "d"]));
        assert_eq!(a.dim(), 8);
    }
}
