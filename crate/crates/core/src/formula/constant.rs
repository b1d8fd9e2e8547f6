use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

/// Sort of an uninterpreted constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    /// Only used internally (convex-closure multipliers).
    Real,
}

/// A named constant. Constants are ordered lexicographically by name, which
/// fixes the order of summands in every normalized term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constant {
    name: Arc<str>,
    sort: Sort,
}

impl Constant {
    pub fn new(name: impl Into<Arc<str>>, sort: Sort) -> Self {
        Constant { name: name.into(), sort }
    }

    pub fn int(name: &str) -> Self {
        Constant::new(name, Sort::Int)
    }

    pub fn real(name: &str) -> Self {
        Constant::new(name, Sort::Real)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn is_int(&self) -> bool {
        self.sort == Sort::Int
    }

    /// Next-state copies are written `x'`.
    pub fn is_primed(&self) -> bool {
        self.name.ends_with('\'')
    }

    pub fn primed(&self) -> Constant {
        let mut name = String::from(&*self.name);
        name.push('\'');
        Constant::new(name, self.sort)
    }

    pub fn unprimed(&self) -> Constant {
        match self.name.strip_suffix('\'') {
            Some(base) => Constant::new(base, self.sort),
            None => self.clone(),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
